#pragma once

// Brute-force oracles and random instance generators shared by the tests.
// Nothing here calls into the library's decision procedures.

#include <algorithm>
#include <functional>
#include <map>
#include <random>
#include <set>
#include <string>
#include <tuple>
#include <unordered_map>
#include <unordered_set>
#include <vector>

#include "rr/rr.hpp"

namespace oracle {

using rr::Symbol;
using rr::Word;

inline std::vector<Word> all_words(const std::vector<Symbol>& alphabet, std::size_t max_len)
{
    std::vector<Word> out{{}};
    std::size_t begin = 0;
    for (std::size_t len = 1; len <= max_len; ++len) {
        std::size_t end = out.size();
        for (std::size_t i = begin; i < end; ++i)
            for (const auto& s : alphabet) {
                Word w = out[i];
                w.push_back(s);
                out.push_back(std::move(w));
            }
        begin = end;
    }
    return out;
}

/// Acceptance by search over (state, position) with explicit epsilon steps.
inline bool path_accepts(const rr::Nfa& a, const Word& w)
{
    if (a.num_states() == 0) return false;
    std::set<std::pair<std::size_t, std::size_t>> seen;
    std::vector<std::pair<std::size_t, std::size_t>> stack{{a.initial(), 0}};
    while (!stack.empty()) {
        auto [q, i] = stack.back();
        stack.pop_back();
        if (!seen.insert({q, i}).second) continue;
        if (i == w.size() && a.is_accepting(q)) return true;
        for (const auto& e : a.edges()) {
            if (e.from != q) continue;
            if (e.label == rr::Nfa::epsilon) stack.emplace_back(e.to, i);
            else if (i < w.size() && a.alphabet()[static_cast<std::size_t>(e.label)] == w[i]) stack.emplace_back(e.to, i + 1);
        }
    }
    return false;
}

/// Earley recognizer for an arbitrary grammar (epsilon rules allowed), fed
/// one letter at a time so that words sharing a prefix share its columns.
class Earley {
public:
    explicit Earley(const rr::Cfg& g) : g_(g), rules_(g.rules()), by_lhs_(g.num_symbols()), nullable_(g.num_symbols())
    {
        for (std::size_t ri = 0; ri < rules_.size(); ++ri) by_lhs_[rules_[ri].lhs].push_back(ri);
        for (bool changed = true; changed;) {
            changed = false;
            for (const auto& r : rules_) {
                if (nullable_[r.lhs]) continue;
                bool all = std::all_of(r.rhs.begin(), r.rhs.end(), [&](rr::Cfg::Id s) { return nullable_[s] != 0; });
                if (all) nullable_[r.lhs] = changed = true;
            }
        }
        columns_.emplace_back();
        if (g.has_axiom())
            for (std::size_t ri : by_lhs_[g.axiom()]) add(0, {ri, 0, 0});
        close(0);
    }

    /// Extends the input by one symbol; returns false if the symbol is not a terminal.
    bool push(const Symbol& s)
    {
        const std::size_t k = columns_.size() - 1;
        columns_.emplace_back();
        auto id = g_.find(s);
        if (!id || !g_.is_terminal(*id)) return false;
        auto found = columns_[k].waiting.find(*id);
        if (found != columns_[k].waiting.end())
            for (const auto& it : found->second) add(k + 1, {it.rule, it.dot + 1, it.origin});
        close(k + 1);
        return true;
    }

    void pop() { columns_.pop_back(); }

    /// True if at least one item survives, so some extension may still be accepted.
    bool alive() const { return !columns_.back().agenda.empty(); }

    bool accepts() const
    {
        if (!g_.has_axiom()) return false;
        for (const auto& it : columns_.back().agenda)
            if (it.origin == 0 && rules_[it.rule].lhs == g_.axiom() && it.dot == rules_[it.rule].rhs.size()) return true;
        return false;
    }

private:
    struct Item {
        std::size_t rule, dot, origin;
    };
    struct Column {
        std::unordered_set<std::uint64_t> seen;
        std::vector<Item> agenda;
        std::unordered_map<rr::Cfg::Id, std::vector<Item>> waiting;
        std::unordered_set<rr::Cfg::Id> predicted;
    };

    void add(std::size_t k, Item it)
    {
        Column& c = columns_[k];
        const std::uint64_t key = (std::uint64_t{it.rule} << 32) | (std::uint64_t{it.dot} << 20) | it.origin;
        if (!c.seen.insert(key).second) return;
        c.agenda.push_back(it);
        if (it.dot < rules_[it.rule].rhs.size()) c.waiting[rules_[it.rule].rhs[it.dot]].push_back(it);
    }

    void close(std::size_t k)
    {
        for (std::size_t idx = 0; idx < columns_[k].agenda.size(); ++idx) {
            Item it = columns_[k].agenda[idx];
            const auto& r = rules_[it.rule];
            if (it.dot == r.rhs.size()) {
                auto found = columns_[it.origin].waiting.find(r.lhs);
                if (found == columns_[it.origin].waiting.end()) continue;
                const auto& parents = found->second;
                for (std::size_t j = 0; j < parents.size(); ++j) {
                    Item p = parents[j];
                    add(k, {p.rule, p.dot + 1, p.origin});
                }
                continue;
            }
            rr::Cfg::Id next = r.rhs[it.dot];
            if (g_.is_terminal(next)) continue;
            if (columns_[k].predicted.insert(next).second)
                for (std::size_t rj : by_lhs_[next]) add(k, {rj, 0, k});
            if (nullable_[next]) add(k, {it.rule, it.dot + 1, it.origin});
        }
    }

    const rr::Cfg& g_;
    const std::vector<rr::Cfg::Rule>& rules_;
    std::vector<std::vector<std::size_t>> by_lhs_;
    std::vector<char> nullable_;
    std::vector<Column> columns_;
};

inline bool earley(const rr::Cfg& g, const Word& w)
{
    Earley e(g);
    for (const auto& s : w)
        if (!e.push(s) || !e.alive()) return false;
    return e.accepts();
}

/// All words of L(g) over the alphabet up to max_len, walking the word trie.
inline std::set<Word> earley_language(const rr::Cfg& g, const std::vector<Symbol>& alphabet, std::size_t max_len)
{
    std::set<Word> out;
    Earley e(g);
    Word cur;
    std::function<void()> walk = [&] {
        if (e.accepts()) out.insert(cur);
        if (cur.size() == max_len) return;
        for (const auto& s : alphabet) {
            if (e.push(s) && e.alive()) {
                cur.push_back(s);
                walk();
                cur.pop_back();
            }
            e.pop();
        }
    };
    walk();
    return out;
}

/// Dyck membership by repeatedly cancelling adjacent matching pairs.
inline bool dyck_by_cancellation(const Word& w, const std::map<Symbol, Symbol>& closer_of)
{
    Word cur = w;
    for (bool changed = true; changed;) {
        changed = false;
        for (std::size_t i = 0; i + 1 < cur.size(); ++i) {
            auto it = closer_of.find(cur[i]);
            if (it != closer_of.end() && cur[i + 1] == it->second) {
                cur.erase(cur.begin() + static_cast<long>(i), cur.begin() + static_cast<long>(i) + 2);
                changed = true;
                break;
            }
        }
    }
    return cur.empty();
}

inline std::map<Symbol, Symbol> dyck_pairs(int n)
{
    std::map<Symbol, Symbol> out;
    for (int k = 1; k <= n; ++k) out["a" + std::to_string(k)] = "abar" + std::to_string(k);
    return out;
}

inline bool d1(const Word& w) { return dyck_by_cancellation(w, dyck_pairs(1)); }
inline bool d2(const Word& w) { return dyck_by_cancellation(w, dyck_pairs(2)); }

/// x-word is a palindrome-like mirror: w = u . mirror-bar(u).
inline bool symmetric(const Word& w)
{
    static const std::map<Symbol, Symbol> bar{{"x1", "xbar1"}, {"x2", "xbar2"}};
    if (w.size() % 2) return false;
    for (std::size_t i = 0; i < w.size() / 2; ++i) {
        auto it = bar.find(w[i]);
        if (it == bar.end() || w[w.size() - 1 - i] != it->second) return false;
    }
    return true;
}

/// Words of L(a) up to max_len, visited depth first with dead states pruned.
inline void for_each_accepted(const rr::Nfa& a, std::size_t max_len, const std::function<void(const Word&)>& visit)
{
    const std::size_t n = a.num_states();
    if (n == 0) return;
    std::vector<char> live(n);
    for (std::size_t q = 0; q < n; ++q) live[q] = a.is_accepting(q);
    for (bool changed = true; changed;) {
        changed = false;
        for (const auto& e : a.edges())
            if (live[e.to] && !live[e.from]) live[e.from] = changed = true;
    }
    auto close = [&](std::set<std::size_t> s) {
        std::vector<std::size_t> stack(s.begin(), s.end());
        while (!stack.empty()) {
            std::size_t q = stack.back();
            stack.pop_back();
            for (std::size_t ei : a.out_edges(q)) {
                const auto& e = a.edges()[ei];
                if (e.label == rr::Nfa::epsilon && live[e.to] && s.insert(e.to).second) stack.push_back(e.to);
            }
        }
        return s;
    };
    Word w;
    std::function<void(const std::set<std::size_t>&)> go = [&](const std::set<std::size_t>& cur) {
        for (std::size_t q : cur)
            if (a.is_accepting(q)) {
                visit(w);
                break;
            }
        if (w.size() == max_len) return;
        for (std::size_t s = 0; s < a.alphabet().size(); ++s) {
            std::set<std::size_t> next;
            for (std::size_t q : cur)
                for (std::size_t ei : a.out_edges(q)) {
                    const auto& e = a.edges()[ei];
                    if (e.label == static_cast<int>(s) && live[e.to]) next.insert(e.to);
                }
            if (next.empty()) continue;
            w.push_back(a.alphabet()[s]);
            go(close(next));
            w.pop_back();
        }
    };
    if (live[a.initial()]) go(close({a.initial()}));
}

inline std::vector<Word> accepted_words(const rr::Nfa& a, std::size_t max_len)
{
    std::vector<Word> out;
    for_each_accepted(a, max_len, [&](const Word& w) { out.push_back(w); });
    return out;
}

/// Random automaton with states "s0".."s{n-1}", s0 initial.
inline rr::Nfa random_nfa(std::mt19937_64& rng, const std::vector<Symbol>& alphabet, std::size_t n, double density,
                          double eps_density = 0.0, double accept_p = 0.4)
{
    rr::Nfa a(alphabet);
    for (std::size_t q = 0; q < n; ++q) a.add_state("s" + std::to_string(q));
    a.set_initial(0);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    bool any = false;
    for (std::size_t q = 0; q < n; ++q)
        if (u(rng) < accept_p) {
            a.set_accepting(q);
            any = true;
        }
    if (!any) a.set_accepting(n - 1);
    for (std::size_t q = 0; q < n; ++q)
        for (std::size_t p = 0; p < n; ++p) {
            for (std::size_t s = 0; s < alphabet.size(); ++s)
                if (u(rng) < density) a.add_transition(q, static_cast<int>(s), p);
            if (q != p && u(rng) < eps_density) a.add_transition(q, rr::Nfa::epsilon, p);
        }
    return a;
}

/// Random CNF grammar with nonterminals N0..N{k-1} (N0 the axiom, never on a right side).
inline rr::Cfg random_cnf(std::mt19937_64& rng, const std::vector<Symbol>& terminals, std::size_t k, bool allow_empty = true)
{
    rr::Cfg g;
    for (std::size_t i = 0; i < k; ++i) g.add_nonterminal("N" + std::to_string(i));
    for (const auto& t : terminals) g.add_terminal(t);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    std::uniform_int_distribution<std::size_t> pick_t(0, terminals.size() - 1);
    std::uniform_int_distribution<std::size_t> pick_nt(k > 1 ? 1 : 0, k - 1);
    for (std::size_t i = 0; i < k; ++i) {
        std::size_t terminal_rules = 1 + (u(rng) < 0.3);
        for (std::size_t j = 0; j < terminal_rules; ++j)
            if (u(rng) < 0.7) g.add_rule(static_cast<rr::Cfg::Id>(i), {g.id(terminals[pick_t(rng)])});
        if (k > 1) {
            std::size_t binary = 1 + (u(rng) < 0.5) + (u(rng) < 0.3);
            for (std::size_t j = 0; j < binary; ++j)
                g.add_rule(static_cast<rr::Cfg::Id>(i), {static_cast<rr::Cfg::Id>(pick_nt(rng)), static_cast<rr::Cfg::Id>(pick_nt(rng))});
        }
    }
    if (allow_empty && u(rng) < 0.25) g.add_rule(g.axiom(), {});
    return g;
}

} // namespace oracle
