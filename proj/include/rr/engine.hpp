#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <map>
#include <numeric>
#include <optional>
#include <random>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "cfg.hpp"
#include "common.hpp"
#include "counter.hpp"
#include "filters.hpp"
#include "intersection.hpp"
#include "nfa.hpp"
#include "reductions.hpp"

namespace rr {

enum class Method { automatic, bar_hillel, counter, substitution, log2 };

inline std::string method_name(Method m)
{
    switch (m) {
    case Method::automatic: return "auto";
    case Method::bar_hillel: return "bar_hillel";
    case Method::counter: return "counter";
    case Method::substitution: return "substitution";
    case Method::log2: return "log2";
    }
    return "?";
}

struct DecisionReport {
    bool nonempty = false;
    std::optional<Word> witness;
    Method method = Method::bar_hillel;
    /// nonterminals, states, witness_length and method-specific counters.
    std::map<std::string, std::uint64_t> stats;
};

struct CheckerStats {
    std::size_t max_recursion_depth = 0;
    std::size_t max_live_triples = 0;
    bool result = false;
};

namespace detail {

inline void require_subalphabet(const Nfa& a, const std::vector<Symbol>& filter_alphabet, const std::string& filter)
{
    for (const auto& s : a.alphabet())
        if (std::find(filter_alphabet.begin(), filter_alphabet.end(), s) == filter_alphabet.end())
            throw InputError("automaton symbol '" + s + "' is not in the alphabet of filter " + filter);
}

inline void verify_witness(const Nfa& a, const FilterSpec& f, const DecisionReport& r)
{
    if (!r.witness) return;
    if (!nfa_accepts(a, *r.witness)) throw ContractError("witness rejected by the automaton");
    if (!f.contains(*r.witness)) throw ContractError("witness rejected by the filter");
}

inline DecisionReport decide_by_triples(const Nfa& a, const FilterSpec& f)
{
    const Cfg& cnf = *f.cnf();
    TripleSearch search(cnf, a);
    DecisionReport r;
    r.method = Method::bar_hillel;
    r.witness = search.shortest_word();
    r.nonempty = r.witness.has_value();
    r.stats["nonterminals"] = bar_hillel_nonterminal_count(cnf, a);
    r.stats["states"] = a.num_states();
    r.stats["settled_triples"] = search.settled_triples();
    if (r.witness) r.stats["witness_length"] = r.witness->size();
    return r;
}

inline DecisionReport decide_by_counter(const Nfa& a, const FilterSpec& f)
{
    CounterAutomaton m;
    if (f.kind() == FilterSpec::Kind::counter) m = *f.counter_automaton();
    else if (f.kind() == FilterSpec::Kind::dyck && f.dyck_order() == 1) m = dyck1_counter_automaton(AcceptMode::final_state);
    else throw InputError("filter " + f.name() + " has no counter automaton");
    CounterAutomaton product = counter_product(m, nfa_over_alphabet(a, m.alphabet()));
    Nfa expanded = counter_to_nfa(product);
    DecisionReport r;
    r.method = Method::counter;
    r.witness = nfa_shortest_witness(expanded);
    r.nonempty = r.witness.has_value();
    r.stats["nonterminals"] = 0;
    r.stats["states"] = expanded.num_states();
    r.stats["counter_cap"] = default_counter_cap(product);
    if (r.witness) r.stats["witness_length"] = r.witness->size();
    return r;
}

} // namespace detail

CheckerStats log2_check(const Cfg& g, const Nfa& a);

/// Decides whether L(a) meets the filter and returns a verified witness.
///
/// Grammar filters go through the triple search; counter filters (and dyck1
/// on request) through the bounded-counter expansion; log2 runs the
/// recursive checker and reports no witness.
inline DecisionReport nrr_decide(const Nfa& a, const FilterSpec& f, Method method = Method::automatic)
{
    detail::require_subalphabet(a, f.alphabet(), f.name());
    if (f.kind() == FilterSpec::Kind::s_sharp_up) throw InputError("filter ssharpup cannot be decided directly");
    if (method == Method::automatic) method = f.kind() == FilterSpec::Kind::counter ? Method::counter : Method::bar_hillel;
    DecisionReport r;
    switch (method) {
    case Method::bar_hillel:
        if (!f.cnf()) throw InputError("filter " + f.name() + " has no grammar");
        r = detail::decide_by_triples(a, f);
        break;
    case Method::counter: r = detail::decide_by_counter(a, f); break;
    case Method::log2: {
        if (!f.cnf()) throw InputError("filter " + f.name() + " has no grammar");
        CheckerStats s = log2_check(*f.cnf(), a);
        r.method = Method::log2;
        r.nonempty = s.result;
        r.stats["max_recursion_depth"] = s.max_recursion_depth;
        r.stats["max_live_triples"] = s.max_live_triples;
        r.stats["nonterminals"] = bar_hillel_nonterminal_count(*f.cnf(), a);
        r.stats["states"] = a.num_states();
        break;
    }
    default: throw InputError("method " + method_name(method) + " does not apply to a single filter");
    }
    detail::verify_witness(a, f, r);
    return r;
}

/// A substitution x -> L_x for the letters x of an outer alphabet.
using Substitution = std::vector<std::pair<Symbol, FilterSpec>>;

/// Automaton over the outer alphabet with an x-edge from q to p iff some word
/// of L_x leads from q to p in a. Epsilon moves of a are kept, so
/// L(a) meets sigma(L) iff the result meets L.
inline Nfa substitution_collapse(const Nfa& a, const Substitution& sub)
{
    std::vector<Symbol> outer;
    for (const auto& [x, f] : sub) outer.push_back(x);
    Nfa out(outer);
    for (std::size_t q = 0; q < a.num_states(); ++q) {
        out.add_state(a.state_name(q));
        if (a.is_accepting(q)) out.set_accepting(q);
    }
    if (a.num_states() == 0) return out;
    out.set_initial(a.initial());
    for (const auto& e : a.edges())
        if (e.label == Nfa::epsilon) out.add_transition(e.from, Nfa::epsilon, e.to);

    std::map<std::string, std::vector<std::pair<std::size_t, std::size_t>>> memo;
    for (std::size_t xi = 0; xi < sub.size(); ++xi) {
        const FilterSpec& f = sub[xi].second;
        if (f.kind() == FilterSpec::Kind::s_sharp_up) throw InputError("filter ssharpup cannot be a substituent");
        auto it = memo.find(f.key());
        if (it == memo.end()) {
            Nfa inner = nfa_over_alphabet(a, f.alphabet());
            std::vector<std::pair<std::size_t, std::size_t>> pairs;
            if (f.cnf()) {
                pairs = TripleSearch(*f.cnf(), inner, false).axiom_pairs();
            } else {
                for (std::size_t q = 0; q < a.num_states(); ++q)
                    for (std::size_t p = 0; p < a.num_states(); ++p)
                        if (nrr_decide(nfa_sub_automaton(inner, q, p), f).nonempty) pairs.emplace_back(q, p);
            }
            it = memo.emplace(f.key(), std::move(pairs)).first;
        }
        for (auto [q, p] : it->second) out.add_transition(q, static_cast<int>(xi), p);
    }
    return out;
}

/// Substitution collapse with an explicit outer alphabet; every letter needs an entry.
inline Nfa substitution_collapse(const Nfa& a, const std::vector<Symbol>& outer, const std::map<Symbol, FilterSpec>& sub)
{
    Substitution ordered;
    for (const auto& x : outer) {
        auto it = sub.find(x);
        if (it == sub.end()) throw InputError("no substitution for letter '" + x + "'");
        ordered.emplace_back(x, it->second);
    }
    return substitution_collapse(a, ordered);
}

/// Decides whether L(a) meets sigma(L(outer)). The witness is an inner word
/// u1 ... uk of L(a) with every ui in L_{xi} and x1 ... xk in L(outer).
inline DecisionReport substitution_decide(const Nfa& a, const FilterSpec& outer, const Substitution& sub)
{
    Nfa collapsed = substitution_collapse(a, sub);
    DecisionReport top = nrr_decide(collapsed, outer);
    DecisionReport r;
    r.method = Method::substitution;
    r.nonempty = top.nonempty;
    r.stats["nonterminals"] = top.stats["nonterminals"];
    r.stats["states"] = collapsed.num_states();
    if (!top.witness) return r;

    // accepting run of the collapsed automaton on the outer witness
    const auto& v = *top.witness;
    const std::size_t n = collapsed.num_states();
    auto closure = epsilon_closures(collapsed);
    std::vector<std::vector<std::optional<std::size_t>>> parent(v.size() + 1, std::vector<std::optional<std::size_t>>(n));
    std::vector<std::vector<char>> live(v.size() + 1, std::vector<char>(n));
    live[0][collapsed.initial()] = 1;
    for (std::size_t i = 0; i < v.size(); ++i) {
        const int x = collapsed.symbol(v[i]);
        for (std::size_t q = 0; q < n; ++q) {
            if (!live[i][q]) continue;
            for (std::size_t u : closure[q])
                for (std::size_t ei : collapsed.out_edges(u)) {
                    const auto& e = collapsed.edges()[ei];
                    if (e.label != x || live[i + 1][e.to]) continue;
                    live[i + 1][e.to] = 1;
                    parent[i + 1][e.to] = q;
                }
        }
    }
    std::optional<std::size_t> end;
    for (std::size_t q = 0; q < n && !end; ++q)
        if (live[v.size()][q])
            for (std::size_t u : closure[q])
                if (collapsed.is_accepting(u)) {
                    end = q;
                    break;
                }
    if (!end) throw ContractError("substitution witness has no accepting run");
    std::vector<std::size_t> states(v.size() + 1);
    states[v.size()] = *end;
    for (std::size_t i = v.size(); i > 0; --i) states[i - 1] = *parent[i][states[i]];

    Word w;
    for (std::size_t i = 0; i < v.size(); ++i) {
        const FilterSpec* f = nullptr;
        for (const auto& [x, spec] : sub)
            if (x == v[i]) f = &spec;
        Nfa inner = nfa_over_alphabet(a, f->alphabet());
        // the segment may start after epsilon moves from states[i]
        std::optional<Word> best;
        for (std::size_t u : closure[states[i]]) {
            for (std::size_t ei : collapsed.out_edges(u)) {
                const auto& e = collapsed.edges()[ei];
                if (e.label != collapsed.symbol(v[i]) || e.to != states[i + 1]) continue;
                auto piece = nrr_decide(nfa_sub_automaton(inner, u, e.to), *f).witness;
                if (piece && (!best || piece->size() < best->size())) best = piece;
            }
        }
        if (!best) throw ContractError("substitution witness segment missing");
        w.insert(w.end(), best->begin(), best->end());
    }
    if (!nfa_accepts(a, w)) throw ContractError("substitution witness rejected by the automaton");
    r.witness = std::move(w);
    r.stats["witness_length"] = r.witness->size();
    r.stats["outer_witness_length"] = v.size();
    return r;
}

struct IndexMode {
    bool exhaustive = true;
    std::size_t count = 0;
    std::uint64_t seed = 0;

    static IndexMode all() { return {}; }
    static IndexMode sample(std::size_t count, std::uint64_t seed) { return {false, count, seed}; }
};

namespace detail {

/// Shortest witness length into each state for an epsilon-free automaton
/// given as a transition bit set, or nullopt where the filter is missed.
inline std::vector<std::optional<std::uint32_t>> lengths_per_state(const FilterSpec& f, const Nfa& a)
{
    const std::size_t n = a.num_states();
    std::vector<std::optional<std::uint32_t>> out(n);
    if (f.cnf()) return TripleSearch(*f.cnf(), a, false).axiom_lengths_from_initial();
    for (std::size_t p = 0; p < n; ++p) {
        Nfa b = a;
        for (std::size_t s = 0; s < n; ++s) b.set_accepting(s, s == p);
        auto r = nrr_decide(b, f);
        if (r.witness) out[p] = static_cast<std::uint32_t>(r.witness->size());
    }
    return out;
}

inline Nfa nfa_from_bits(const std::vector<Symbol>& alphabet, std::size_t n, std::uint64_t bits)
{
    Nfa a(alphabet);
    for (std::size_t q = 0; q < n; ++q) a.add_state("q" + std::to_string(q));
    a.set_initial(0);
    const std::size_t k = alphabet.size();
    for (std::size_t q = 0; q < n; ++q)
        for (std::size_t s = 0; s < k; ++s)
            for (std::size_t p = 0; p < n; ++p)
                if (bits >> ((q * k + s) * n + p) & 1) a.add_transition(q, static_cast<int>(s), p);
    return a;
}

/// Least signature over relabelings that fix state 0.
inline std::uint64_t canonical_bits(std::size_t n, std::size_t k, std::uint64_t bits)
{
    std::vector<std::size_t> perm(n);
    std::iota(perm.begin(), perm.end(), 0);
    std::uint64_t best = bits;
    do {
        std::uint64_t image = 0;
        for (std::size_t q = 0; q < n; ++q)
            for (std::size_t s = 0; s < k; ++s)
                for (std::size_t p = 0; p < n; ++p)
                    if (bits >> ((q * k + s) * n + p) & 1) image |= std::uint64_t{1} << ((perm[q] * k + s) * n + perm[p]);
        best = std::min(best, image);
    } while (std::next_permutation(perm.begin() + 1, perm.end()));
    return best;
}

} // namespace detail

/// Rational index rho(n): the largest, over n-state automata whose language
/// meets the filter, of the shortest word in the intersection.
///
/// Automata are epsilon-free with state 0 initial. The exhaustive mode
/// visits one representative per relabeling class of the transition set;
/// the accepting set is maximized per state, since a single accepting state
/// always yields the largest minimum.
inline std::uint32_t rational_index(const FilterSpec& f, std::size_t n, IndexMode mode = IndexMode::all(),
                                    std::size_t ceiling = 3)
{
    if (n == 0) throw InputError("rational index needs at least one state");
    if (f.kind() == FilterSpec::Kind::s_sharp_up) throw InputError("filter ssharpup cannot be decided directly");
    const auto& alphabet = f.alphabet();
    const std::size_t k = alphabet.size();
    const std::size_t bits = n * n * k;
    if (mode.exhaustive && n > ceiling) throw InputError("exhaustive rational index is limited to " + std::to_string(ceiling) + " states");
    if (bits > 62) throw InputError("transition space too large for enumeration");
    std::uint32_t best = 0;
    auto consider = [&](std::uint64_t t) {
        Nfa a = detail::nfa_from_bits(alphabet, n, t);
        for (const auto& l : detail::lengths_per_state(f, a))
            if (l) best = std::max(best, *l);
    };
    if (mode.exhaustive) {
        for (std::uint64_t t = 0; t < (std::uint64_t{1} << bits); ++t)
            if (detail::canonical_bits(n, k, t) == t) consider(t);
    } else {
        std::mt19937_64 rng(mode.seed);
        std::uniform_int_distribution<std::uint64_t> dist(0, (std::uint64_t{1} << bits) - 1);
        for (std::size_t i = 0; i < mode.count; ++i) consider(dist(rng));
    }
    return best;
}

namespace detail {

/// Level-indexed recursive checker for triples [q, A, p] over an
/// epsilon-free automaton.
///
/// check(T, 0) holds iff T has a terminal rule matching a transition.
/// check(T, d) holds iff check(T, d - 1), or some proper descendant Y of T
/// passes check(Y, d - 1) along a chain of binary rules whose off-chain
/// siblings all pass check(., d - 1). A derivation of a word of length l
/// passes at level ceil(log_{3/2} l) by descending to the central node.
class Log2Checker {
public:
    using Id = Cfg::Id;

    Log2Checker(const Cfg& g, const Nfa& a) : g_(g), a_(a), nq_(a.num_states())
    {
        for (const auto& r : g.rules())
            if (r.rhs.size() == 2) binary_[r.lhs].push_back({r.rhs[0], r.rhs[1]});
        for (auto& [lhs, v] : binary_) std::sort(v.begin(), v.end());
    }

    bool check(std::size_t q, Id a, std::size_t p, std::size_t level)
    {
        Frame f = eval({q, a, p}, level);
        stats_.max_recursion_depth = std::max(stats_.max_recursion_depth, f.height);
        stats_.max_live_triples = std::max(stats_.max_live_triples, f.live + 1);
        return f.ok;
    }

    const CheckerStats& stats() const { return stats_; }

private:
    struct Triple {
        std::size_t q;
        Id a;
        std::size_t p;
        auto operator<=>(const Triple&) const = default;
    };

    /// Outcome of one call with the height of its recursion tree and the most
    /// chain triples held at once below it. Memo hits report the stored
    /// values, so both measure the unmemoized recursion.
    struct Frame {
        bool ok = false;
        std::size_t height = 1;
        std::size_t live = 0;
    };

    void absorb(Frame& f, const Frame& sub, std::size_t held) const
    {
        f.height = std::max(f.height, sub.height + 1);
        f.live = std::max(f.live, sub.live + held);
    }

    Frame eval(const Triple& t, std::size_t level)
    {
        auto key = std::make_pair(t, level);
        if (auto it = memo_.find(key); it != memo_.end()) return it->second;
        Frame f;
        f.ok = terminal(t);
        if (!f.ok && level > 0) {
            Frame lower = eval(t, level - 1);
            absorb(f, lower, 0);
            f.ok = lower.ok || chain_search(t, level - 1, f);
        }
        memo_[key] = f;
        return f;
    }

    bool terminal(const Triple& t) const
    {
        for (std::size_t ri : g_.rules_for(t.a)) {
            const auto& r = g_.rules()[ri];
            if (r.rhs.size() != 1) continue;
            auto s = a_.symbol_index(g_.name(r.rhs[0]));
            if (!s) continue;
            for (std::size_t ei : a_.out_edges(t.q)) {
                const auto& e = a_.edges()[ei];
                if (e.label == *s && e.to == t.p) return true;
            }
        }
        return false;
    }

    /// Looks for a proper descendant x of t passing at this level and walks
    /// back up to t, each step checking the sibling at this level. The search
    /// runs downward from t; the frame holds one chain triple at a time.
    bool chain_search(const Triple& t, std::size_t level, Frame& f)
    {
        f.live = std::max<std::size_t>(f.live, 1);
        auto sub = [&](const Triple& x) {
            Frame r = eval(x, level);
            absorb(f, r, 1);
            return r.ok;
        };
        std::set<Triple> seen;
        std::vector<Triple> todo{t};
        seen.insert(t);
        while (!todo.empty()) {
            Triple x = todo.back();
            todo.pop_back();
            if (x != t && sub(x)) return true;
            auto it = binary_.find(x.a);
            if (it == binary_.end()) continue;
            for (auto [b, c] : it->second)
                for (std::size_t r = 0; r < nq_; ++r) {
                    Triple left{x.q, b, r}, right{r, c, x.p};
                    if (!seen.contains(left) && sub(right)) {
                        seen.insert(left);
                        todo.push_back(left);
                    }
                    if (!seen.contains(right) && sub(left)) {
                        seen.insert(right);
                        todo.push_back(right);
                    }
                }
        }
        return false;
    }

    const Cfg& g_;
    const Nfa& a_;
    std::size_t nq_;
    std::map<Id, std::vector<std::pair<Id, Id>>> binary_;
    std::map<std::pair<Triple, std::size_t>, Frame> memo_;
    CheckerStats stats_;
};

} // namespace detail

/// Decides whether L(a) meets L(g) for a CNF grammar g with the recursive
/// triple checker, raising the level until an axiom triple passes or the
/// set of passing triples stops growing.
inline CheckerStats log2_check(const Cfg& g, const Nfa& a_in)
{
    if (!g.is_cnf()) throw ContractError("log2_check requires a grammar in Chomsky normal form");
    CheckerStats out;
    if (!g.has_axiom() || a_in.num_states() == 0) return out;
    const Nfa a = a_in.has_epsilon() ? nfa_remove_epsilon(a_in) : a_in;
    const std::size_t nq = a.num_states();
    for (std::size_t ri : g.rules_for(g.axiom()))
        if (g.rules()[ri].rhs.empty() && a.is_accepting(a.initial())) {
            out.result = true;
            return out;
        }
    detail::Log2Checker checker(g, a);
    std::size_t previous = 0;
    for (std::size_t level = 0;; ++level) {
        for (std::size_t f = 0; f < nq; ++f)
            if (a.is_accepting(f) && checker.check(a.initial(), g.axiom(), f, level)) {
                out = checker.stats();
                out.result = true;
                return out;
            }
        std::size_t passing = 0;
        for (Cfg::Id x : g.nonterminals())
            for (std::size_t q = 0; q < nq; ++q)
                for (std::size_t p = 0; p < nq; ++p) passing += checker.check(q, x, p, level);
        if (level > 0 && passing == previous) break;
        previous = passing;
    }
    out = checker.stats();
    out.result = false;
    return out;
}

} // namespace rr
