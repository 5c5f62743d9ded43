#pragma once

#include <algorithm>
#include <cstdint>
#include <limits>
#include <map>
#include <optional>
#include <queue>
#include <set>
#include <string>
#include <unordered_map>
#include <vector>

#include "common.hpp"

namespace rr {

/// Context-free grammar over interned symbols.
///
/// Terminals and nonterminals share one symbol table; declaration order is
/// kept for both kinds and is the tie-breaking order for shortest words.
class Cfg {
public:
    using Id = std::uint32_t;

    struct Rule {
        Id lhs;
        std::vector<Id> rhs;
    };

    Id add_nonterminal(const std::string& name)
    {
        if (auto id = find(name)) {
            if (terminal_[*id]) throw InputError("'" + name + "' is already a terminal");
            return *id;
        }
        Id id = intern(name, false);
        nonterminals_.push_back(id);
        if (!axiom_) axiom_ = id;
        return id;
    }

    Id add_terminal(const std::string& name)
    {
        if (name.empty()) throw InputError("empty terminal name");
        if (auto id = find(name)) {
            if (!terminal_[*id]) throw InputError("'" + name + "' is already a nonterminal");
            return *id;
        }
        Id id = intern(name, true);
        terminals_.push_back(id);
        return id;
    }

    std::optional<Id> find(const std::string& name) const
    {
        auto it = ids_.find(name);
        if (it == ids_.end()) return std::nullopt;
        return it->second;
    }

    Id id(const std::string& name) const
    {
        auto i = find(name);
        if (!i) throw InputError("unknown grammar symbol '" + name + "'");
        return *i;
    }

    void set_axiom(Id a)
    {
        if (a >= names_.size() || terminal_[a]) throw ContractError("axiom must be a nonterminal");
        axiom_ = a;
    }

    Id axiom() const
    {
        if (!axiom_) throw ContractError("grammar has no axiom");
        return *axiom_;
    }

    bool has_axiom() const { return axiom_.has_value(); }

    void add_rule(Id lhs, std::vector<Id> rhs)
    {
        if (lhs >= names_.size() || terminal_[lhs]) throw ContractError("rule lhs must be a nonterminal");
        for (Id s : rhs)
            if (s >= names_.size()) throw ContractError("rule rhs symbol out of range");
        if (!rule_set_.emplace(lhs, rhs).second) return;
        by_lhs_[lhs].push_back(rules_.size());
        rules_.push_back({lhs, std::move(rhs)});
    }

    void add_rule(const std::string& lhs, const std::vector<std::string>& rhs)
    {
        std::vector<Id> ids;
        ids.reserve(rhs.size());
        for (const auto& s : rhs) ids.push_back(id(s));
        add_rule(id(lhs), std::move(ids));
    }

    std::size_t num_symbols() const { return names_.size(); }
    const std::string& name(Id s) const { return names_.at(s); }
    bool is_terminal(Id s) const { return terminal_.at(s); }
    const std::vector<Id>& nonterminals() const { return nonterminals_; }
    const std::vector<Id>& terminals() const { return terminals_; }
    const std::vector<Rule>& rules() const { return rules_; }

    const std::vector<std::size_t>& rules_for(Id lhs) const { return by_lhs_.at(lhs); }

    std::vector<Symbol> terminal_names() const
    {
        std::vector<Symbol> out;
        for (Id t : terminals_) out.push_back(names_[t]);
        return out;
    }

    /// Rules are A -> B C or A -> t; only the axiom may derive epsilon and it
    /// never occurs on a right-hand side.
    bool is_cnf() const
    {
        if (!axiom_) return false;
        for (const auto& r : rules_) {
            if (r.rhs.empty()) {
                if (r.lhs != *axiom_) return false;
            } else if (r.rhs.size() == 1) {
                if (!terminal_[r.rhs[0]]) return false;
            } else if (r.rhs.size() == 2) {
                for (Id s : r.rhs)
                    if (terminal_[s] || s == *axiom_) return false;
            } else {
                return false;
            }
        }
        return true;
    }

private:
    Id intern(const std::string& name, bool terminal)
    {
        Id id = static_cast<Id>(names_.size());
        names_.push_back(name);
        terminal_.push_back(terminal);
        ids_.emplace(name, id);
        by_lhs_.emplace_back();
        return id;
    }

    std::vector<std::string> names_;
    std::vector<bool> terminal_;
    std::unordered_map<std::string, Id> ids_;
    std::vector<Id> nonterminals_;
    std::vector<Id> terminals_;
    std::optional<Id> axiom_;
    std::vector<Rule> rules_;
    std::set<std::pair<Id, std::vector<Id>>> rule_set_;
    std::vector<std::vector<std::size_t>> by_lhs_;
};

/// Least fixpoint of "has a rule whose rhs is all terminals or productive".
inline std::vector<char> productive_symbols(const Cfg& g)
{
    std::vector<char> prod(g.num_symbols());
    for (Cfg::Id t : g.terminals()) prod[t] = 1;
    bool changed = true;
    while (changed) {
        changed = false;
        for (const auto& r : g.rules()) {
            if (prod[r.lhs]) continue;
            if (std::all_of(r.rhs.begin(), r.rhs.end(), [&](Cfg::Id s) { return prod[s] != 0; })) {
                prod[r.lhs] = 1;
                changed = true;
            }
        }
    }
    return prod;
}

inline bool grammar_nonempty(const Cfg& g)
{
    if (!g.has_axiom()) return false;
    return productive_symbols(g)[g.axiom()] != 0;
}

namespace detail {

inline std::string fresh_name(const Cfg& g, std::string base)
{
    while (g.find(base)) base += "'";
    return base;
}

inline std::vector<char> nullable_symbols(const Cfg& g)
{
    std::vector<char> nullable(g.num_symbols());
    bool changed = true;
    while (changed) {
        changed = false;
        for (const auto& r : g.rules()) {
            if (nullable[r.lhs]) continue;
            if (std::all_of(r.rhs.begin(), r.rhs.end(), [&](Cfg::Id s) { return nullable[s] != 0; })) {
                nullable[r.lhs] = 1;
                changed = true;
            }
        }
    }
    return nullable;
}

/// Same symbol table (and ids), no rules.
inline Cfg symbols_only(const Cfg& g)
{
    Cfg out;
    for (Cfg::Id s = 0; s < g.num_symbols(); ++s) {
        if (g.is_terminal(s)) out.add_terminal(g.name(s));
        else out.add_nonterminal(g.name(s));
    }
    if (g.has_axiom()) out.set_axiom(g.axiom());
    return out;
}

} // namespace detail

/// Chomsky normal form with the same language.
///
/// Steps: fresh axiom if the axiom occurs on a right-hand side, epsilon
/// rules, unit rules, long rules, terminals inside binary rules, and finally
/// removal of unproductive or unreachable nonterminals. Fresh nonterminals
/// are named `S'`, `<A.r.k>` and `<t>`.
inline Cfg cnf_convert(const Cfg& g)
{
    using Id = Cfg::Id;
    Cfg work = g;  // symbol table grows with fresh names; rules are rebuilt below
    Id axiom = g.axiom();

    std::vector<Cfg::Rule> rules = g.rules();
    bool axiom_on_rhs = false;
    for (const auto& r : rules)
        if (std::find(r.rhs.begin(), r.rhs.end(), axiom) != r.rhs.end()) axiom_on_rhs = true;
    if (axiom_on_rhs) {
        Id fresh = work.add_nonterminal(detail::fresh_name(work, g.name(axiom) + "'"));
        rules.push_back({fresh, {axiom}});
        axiom = fresh;
    }

    // epsilon rules
    std::set<std::pair<Id, std::vector<Id>>> current;
    {
        Cfg tmp = work;
        for (const auto& r : rules) tmp.add_rule(r.lhs, r.rhs);
        auto nullable = detail::nullable_symbols(tmp);
        for (const auto& r : rules) {
            std::vector<std::size_t> opt;
            for (std::size_t i = 0; i < r.rhs.size(); ++i)
                if (nullable[r.rhs[i]]) opt.push_back(i);
            const std::size_t variants = std::size_t{1} << opt.size();
            for (std::size_t mask = 0; mask < variants; ++mask) {
                std::vector<Id> rhs;
                std::size_t k = 0;
                for (std::size_t i = 0; i < r.rhs.size(); ++i) {
                    if (k < opt.size() && opt[k] == i) {
                        bool drop = (mask >> k) & 1u;
                        ++k;
                        if (drop) continue;
                    }
                    rhs.push_back(r.rhs[i]);
                }
                if (!rhs.empty()) current.emplace(r.lhs, std::move(rhs));
            }
        }
        if (nullable[axiom]) current.emplace(axiom, std::vector<Id>{});
    }

    // unit rules
    {
        const std::size_t n = work.num_symbols();
        std::vector<std::vector<char>> unit(n, std::vector<char>(n));
        for (Id a : work.nonterminals()) unit[a][a] = 1;
        bool changed = true;
        while (changed) {
            changed = false;
            for (const auto& [lhs, rhs] : current) {
                if (rhs.size() != 1 || work.is_terminal(rhs[0])) continue;
                for (Id a : work.nonterminals()) {
                    if (!unit[a][lhs]) continue;
                    if (!unit[a][rhs[0]]) {
                        unit[a][rhs[0]] = 1;
                        changed = true;
                    }
                }
            }
        }
        std::set<std::pair<Id, std::vector<Id>>> next;
        for (Id a : work.nonterminals()) {
            for (const auto& [lhs, rhs] : current) {
                if (!unit[a][lhs]) continue;
                if (rhs.size() == 1 && !work.is_terminal(rhs[0])) continue;
                if (rhs.empty() && a != axiom) continue;
                next.emplace(a, rhs);
            }
        }
        current = std::move(next);
    }

    // long rules, then terminals inside binary rules
    std::vector<std::pair<Id, std::vector<Id>>> binary;
    std::size_t rule_no = 0;
    for (const auto& [lhs, rhs] : current) {
        ++rule_no;
        if (rhs.size() <= 2) {
            binary.emplace_back(lhs, rhs);
            continue;
        }
        Id left = lhs;
        for (std::size_t i = 0; i + 2 < rhs.size(); ++i) {
            Id chain = work.add_nonterminal(detail::fresh_name(
                work, "<" + work.name(lhs) + "." + std::to_string(rule_no) + "." + std::to_string(i + 1) + ">"));
            binary.emplace_back(left, std::vector<Id>{rhs[i], chain});
            left = chain;
        }
        binary.emplace_back(left, std::vector<Id>{rhs[rhs.size() - 2], rhs.back()});
    }
    std::map<Id, Id> wrapper;
    auto wrap = [&](Id t) {
        auto it = wrapper.find(t);
        if (it != wrapper.end()) return it->second;
        Id w = work.add_nonterminal(detail::fresh_name(work, "<" + work.name(t) + ">"));
        wrapper.emplace(t, w);
        return w;
    };
    std::vector<std::pair<Id, std::vector<Id>>> final_rules;
    for (auto& [lhs, rhs] : binary) {
        if (rhs.size() == 2)
            for (auto& s : rhs)
                if (work.is_terminal(s)) s = wrap(s);
        final_rules.emplace_back(lhs, rhs);
    }
    for (const auto& [t, w] : wrapper) final_rules.emplace_back(w, std::vector<Id>{t});

    // keep productive and reachable nonterminals only
    Cfg full = detail::symbols_only(work);
    full.set_axiom(axiom);
    for (const auto& [lhs, rhs] : final_rules) full.add_rule(lhs, rhs);
    auto prod = productive_symbols(full);
    std::vector<char> reach(full.num_symbols());
    std::vector<Id> stack{axiom};
    reach[axiom] = 1;
    while (!stack.empty()) {
        Id u = stack.back();
        stack.pop_back();
        for (std::size_t ri : full.rules_for(u)) {
            const auto& r = full.rules()[ri];
            if (!std::all_of(r.rhs.begin(), r.rhs.end(), [&](Id s) { return prod[s] != 0; })) continue;
            for (Id s : r.rhs)
                if (!full.is_terminal(s) && !reach[s]) {
                    reach[s] = 1;
                    stack.push_back(s);
                }
        }
    }

    Cfg out;
    out.add_nonterminal(full.name(axiom));
    for (Id a : full.nonterminals())
        if (a != axiom && reach[a] && prod[a]) out.add_nonterminal(full.name(a));
    for (Id t : g.terminals()) out.add_terminal(g.name(t));
    out.set_axiom(out.id(full.name(axiom)));
    for (const auto& r : full.rules()) {
        if (!reach[r.lhs] || !prod[r.lhs]) continue;
        if (!std::all_of(r.rhs.begin(), r.rhs.end(), [&](Id s) { return prod[s] != 0; })) continue;
        std::vector<Id> rhs;
        for (Id s : r.rhs) rhs.push_back(out.id(full.name(s)));
        out.add_rule(out.id(full.name(r.lhs)), std::move(rhs));
    }
    return out;
}

/// CYK membership for a CNF grammar.
inline bool cyk_member(const Cfg& g, const Word& w)
{
    if (!g.is_cnf()) throw ContractError("cyk_member requires a grammar in Chomsky normal form");
    const Cfg::Id axiom = g.axiom();
    const std::size_t n = w.size();
    if (n == 0) {
        for (std::size_t ri : g.rules_for(axiom))
            if (g.rules()[ri].rhs.empty()) return true;
        return false;
    }
    std::vector<Cfg::Id> word;
    for (const auto& s : w) {
        auto id = g.find(s);
        if (!id || !g.is_terminal(*id)) return false;
        word.push_back(*id);
    }
    const std::size_t k = g.num_symbols();
    // table[(i * n + len - 1) * k + A]: A derives w[i, i + len)
    std::vector<char> table(n * n * k);
    auto cell = [&](std::size_t i, std::size_t len) { return table.data() + (i * n + len - 1) * k; };
    for (std::size_t i = 0; i < n; ++i)
        for (const auto& r : g.rules())
            if (r.rhs.size() == 1 && r.rhs[0] == word[i]) cell(i, 1)[r.lhs] = 1;
    for (std::size_t len = 2; len <= n; ++len)
        for (std::size_t i = 0; i + len <= n; ++i) {
            char* target = cell(i, len);
            for (std::size_t split = 1; split < len; ++split) {
                const char* left = cell(i, split);
                const char* right = cell(i + split, len - split);
                for (const auto& r : g.rules())
                    if (r.rhs.size() == 2 && left[r.rhs[0]] && right[r.rhs[1]]) target[r.lhs] = 1;
            }
        }
    return cell(0, n)[axiom] != 0;
}

/// Length of a shortest word derivable from every symbol (terminals have 1,
/// unproductive nonterminals the max value), by Knuth's generalisation of
/// Dijkstra to grammars.
inline std::vector<std::uint64_t> shortest_lengths(const Cfg& g)
{
    using Id = Cfg::Id;
    constexpr std::uint64_t inf = std::numeric_limits<std::uint64_t>::max();
    const std::size_t k = g.num_symbols();
    std::vector<std::uint64_t> len(k, inf);
    std::vector<char> done(k);
    for (Id t : g.terminals()) {
        len[t] = 1;
        done[t] = 1;
    }
    const auto& rules = g.rules();
    std::vector<std::size_t> pending(rules.size());
    std::vector<std::vector<std::size_t>> uses(k);
    using Item = std::pair<std::uint64_t, Id>;
    std::priority_queue<Item, std::vector<Item>, std::greater<>> queue;
    auto cost = [&](const Cfg::Rule& r) {
        std::uint64_t c = 0;
        for (Id s : r.rhs) {
            c += len[s];
            if (c > inf / 4) return inf / 4;
        }
        return c;
    };
    for (std::size_t ri = 0; ri < rules.size(); ++ri) {
        for (Id s : rules[ri].rhs)
            if (!g.is_terminal(s)) {
                ++pending[ri];
                uses[s].push_back(ri);
            }
        if (pending[ri] == 0) queue.emplace(cost(rules[ri]), rules[ri].lhs);
    }
    while (!queue.empty()) {
        auto [c, a] = queue.top();
        queue.pop();
        if (done[a]) continue;
        done[a] = 1;
        len[a] = c;
        for (std::size_t ri : uses[a])
            if (--pending[ri] == 0 && !done[rules[ri].lhs]) queue.emplace(cost(rules[ri]), rules[ri].lhs);
    }
    return len;
}

/// A minimum-length word of L(g), least in terminal declaration order among those.
inline std::optional<Word> grammar_shortest_word(const Cfg& g)
{
    using Id = Cfg::Id;
    if (!g.has_axiom()) return std::nullopt;
    constexpr std::uint64_t inf = std::numeric_limits<std::uint64_t>::max();
    constexpr std::uint64_t max_materialized = std::uint64_t{1} << 26;
    auto len = shortest_lengths(g);
    if (len[g.axiom()] == inf) return std::nullopt;
    if (len[g.axiom()] > max_materialized) throw ContractError("shortest word is too long to materialize");

    std::vector<std::size_t> rank(g.num_symbols());
    for (std::size_t i = 0; i < g.terminals().size(); ++i) rank[g.terminals()[i]] = i;
    auto less = [&](const std::vector<Id>& x, const std::vector<Id>& y) {
        return std::lexicographical_compare(x.begin(), x.end(), y.begin(), y.end(),
                                            [&](Id p, Id q) { return rank[p] < rank[q]; });
    };

    // Fixpoint over optimal rules; every value is a derivable word, and each
    // round can only lower a value in a finite set of equal-length words.
    std::vector<std::optional<std::vector<Id>>> best(g.num_symbols());
    for (Id t : g.terminals()) best[t] = std::vector<Id>{t};
    std::vector<std::size_t> optimal;
    for (std::size_t ri = 0; ri < g.rules().size(); ++ri) {
        const auto& r = g.rules()[ri];
        if (len[r.lhs] == inf) continue;
        std::uint64_t c = 0;
        bool ok = true;
        for (Id s : r.rhs) {
            if (len[s] == inf) { ok = false; break; }
            c += len[s];
        }
        if (ok && c == len[r.lhs]) optimal.push_back(ri);
    }
    bool changed = true;
    while (changed) {
        changed = false;
        for (std::size_t ri : optimal) {
            const auto& r = g.rules()[ri];
            if (!std::all_of(r.rhs.begin(), r.rhs.end(), [&](Id s) { return best[s].has_value(); })) continue;
            std::vector<Id> cand;
            for (Id s : r.rhs) cand.insert(cand.end(), best[s]->begin(), best[s]->end());
            if (!best[r.lhs] || less(cand, *best[r.lhs])) {
                best[r.lhs] = std::move(cand);
                changed = true;
            }
        }
    }
    Word out;
    for (Id t : *best[g.axiom()]) out.push_back(g.name(t));
    return out;
}

} // namespace rr
