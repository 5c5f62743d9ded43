#pragma once

#include <algorithm>
#include <deque>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <tuple>
#include <unordered_map>
#include <vector>

#include "common.hpp"

namespace rr {

/// Nondeterministic finite automaton with optional epsilon transitions.
///
/// States carry opaque string names; internally they are dense indices in
/// insertion order. Symbols are indices into the declared alphabet, with
/// `Nfa::epsilon` standing for the empty label. The alphabet order is
/// significant: shortest-witness ties are broken by it.
class Nfa {
public:
    static constexpr int epsilon = -1;

    struct Edge {
        std::size_t from;
        int label;
        std::size_t to;
    };

    Nfa() = default;
    explicit Nfa(std::vector<Symbol> alphabet) : alphabet_(std::move(alphabet))
    {
        for (std::size_t i = 0; i < alphabet_.size(); ++i) {
            if (alphabet_[i].empty()) throw InputError("empty symbol name is reserved for epsilon");
            if (!symbol_ids_.emplace(alphabet_[i], static_cast<int>(i)).second)
                throw InputError("duplicate alphabet symbol '" + alphabet_[i] + "'");
        }
    }

    std::size_t add_state(std::string name)
    {
        if (state_ids_.contains(name)) throw InputError("duplicate state '" + name + "'");
        std::size_t id = names_.size();
        state_ids_.emplace(name, id);
        names_.push_back(std::move(name));
        accepting_.push_back(false);
        out_.emplace_back();
        return id;
    }

    std::optional<std::size_t> find_state(std::string_view name) const
    {
        auto it = state_ids_.find(std::string(name));
        if (it == state_ids_.end()) return std::nullopt;
        return it->second;
    }

    std::size_t state(std::string_view name) const
    {
        auto id = find_state(name);
        if (!id) throw InputError("unknown state '" + std::string(name) + "'");
        return *id;
    }

    void set_initial(std::size_t q)
    {
        check_state(q);
        initial_ = q;
    }

    void set_accepting(std::size_t q, bool on = true)
    {
        check_state(q);
        accepting_[q] = on;
    }

    void add_transition(std::size_t from, int label, std::size_t to)
    {
        check_state(from);
        check_state(to);
        if (label != epsilon && (label < 0 || static_cast<std::size_t>(label) >= alphabet_.size()))
            throw InputError("transition label index out of range");
        if (!edge_set_.emplace(from, label, to).second) return;
        out_[from].push_back(edges_.size());
        edges_.push_back({from, label, to});
        if (label == epsilon) has_epsilon_ = true;
    }

    void add_transition(std::size_t from, std::string_view label, std::size_t to)
    {
        add_transition(from, label.empty() ? epsilon : symbol(label), to);
    }

    const std::vector<Symbol>& alphabet() const { return alphabet_; }

    std::optional<int> symbol_index(std::string_view s) const
    {
        auto it = symbol_ids_.find(std::string(s));
        if (it == symbol_ids_.end()) return std::nullopt;
        return it->second;
    }

    int symbol(std::string_view s) const
    {
        auto id = symbol_index(s);
        if (!id) throw InputError("symbol '" + std::string(s) + "' is not in the automaton alphabet");
        return *id;
    }

    std::size_t num_states() const { return names_.size(); }
    const std::string& state_name(std::size_t q) const { return names_.at(q); }
    std::size_t initial() const { return initial_; }
    bool is_accepting(std::size_t q) const { return accepting_.at(q); }

    std::vector<std::size_t> accepting_states() const
    {
        std::vector<std::size_t> out;
        for (std::size_t q = 0; q < accepting_.size(); ++q)
            if (accepting_[q]) out.push_back(q);
        return out;
    }

    const std::vector<Edge>& edges() const { return edges_; }
    /// Indices into edges() of the transitions leaving q.
    const std::vector<std::size_t>& out_edges(std::size_t q) const { return out_.at(q); }
    bool has_epsilon() const { return has_epsilon_; }

    std::vector<int> encode(const Word& w) const
    {
        std::vector<int> out;
        out.reserve(w.size());
        for (const auto& s : w) out.push_back(symbol(s));
        return out;
    }

    Word decode(const std::vector<int>& w) const
    {
        Word out;
        out.reserve(w.size());
        for (int s : w) out.push_back(alphabet_.at(static_cast<std::size_t>(s)));
        return out;
    }

private:
    void check_state(std::size_t q) const
    {
        if (q >= names_.size()) throw InputError("state index out of range");
    }

    std::vector<Symbol> alphabet_;
    std::unordered_map<std::string, int> symbol_ids_;
    std::vector<std::string> names_;
    std::unordered_map<std::string, std::size_t> state_ids_;
    std::size_t initial_ = 0;
    std::vector<bool> accepting_;
    std::vector<Edge> edges_;
    std::set<std::tuple<std::size_t, int, std::size_t>> edge_set_;
    std::vector<std::vector<std::size_t>> out_;
    bool has_epsilon_ = false;
};

/// Reflexive-transitive epsilon closure of every state, each sorted ascending.
inline std::vector<std::vector<std::size_t>> epsilon_closures(const Nfa& a)
{
    const std::size_t n = a.num_states();
    std::vector<std::vector<std::size_t>> result(n);
    std::vector<char> seen(n);
    for (std::size_t q = 0; q < n; ++q) {
        std::fill(seen.begin(), seen.end(), 0);
        std::vector<std::size_t> stack{q};
        seen[q] = 1;
        while (!stack.empty()) {
            std::size_t u = stack.back();
            stack.pop_back();
            result[q].push_back(u);
            for (std::size_t e : a.out_edges(u)) {
                const auto& edge = a.edges()[e];
                if (edge.label == Nfa::epsilon && !seen[edge.to]) {
                    seen[edge.to] = 1;
                    stack.push_back(edge.to);
                }
            }
        }
        std::sort(result[q].begin(), result[q].end());
    }
    return result;
}

namespace detail {

inline void close_in_place(const Nfa& a, std::vector<char>& set)
{
    std::vector<std::size_t> stack;
    for (std::size_t q = 0; q < set.size(); ++q)
        if (set[q]) stack.push_back(q);
    while (!stack.empty()) {
        std::size_t u = stack.back();
        stack.pop_back();
        for (std::size_t e : a.out_edges(u)) {
            const auto& edge = a.edges()[e];
            if (edge.label == Nfa::epsilon && !set[edge.to]) {
                set[edge.to] = 1;
                stack.push_back(edge.to);
            }
        }
    }
}

} // namespace detail

/// Membership by epsilon-closed subset simulation on an encoded word.
inline bool nfa_accepts_encoded(const Nfa& a, const std::vector<int>& w)
{
    if (a.num_states() == 0) return false;
    std::vector<char> current(a.num_states()), next(a.num_states());
    current[a.initial()] = 1;
    detail::close_in_place(a, current);
    for (int s : w) {
        std::fill(next.begin(), next.end(), 0);
        bool any = false;
        for (std::size_t q = 0; q < current.size(); ++q) {
            if (!current[q]) continue;
            for (std::size_t e : a.out_edges(q)) {
                const auto& edge = a.edges()[e];
                if (edge.label == s) {
                    next[edge.to] = 1;
                    any = true;
                }
            }
        }
        if (!any) return false;
        detail::close_in_place(a, next);
        current.swap(next);
    }
    for (std::size_t q = 0; q < current.size(); ++q)
        if (current[q] && a.is_accepting(q)) return true;
    return false;
}

inline bool nfa_accepts(const Nfa& a, const Word& w) { return nfa_accepts_encoded(a, a.encode(w)); }

/// A shortest word of L(a), least in declared alphabet order among the shortest.
///
/// Breadth-first search over single states: every state is discovered first by
/// its shortlex-least word, and epsilon successors inherit that word.
inline std::optional<Word> nfa_shortest_witness(const Nfa& a)
{
    const std::size_t n = a.num_states();
    if (n == 0) return std::nullopt;
    constexpr std::size_t none = static_cast<std::size_t>(-1);
    std::vector<std::size_t> parent(n, none);
    std::vector<int> via(n, Nfa::epsilon);
    std::vector<char> seen(n);
    std::deque<std::size_t> queue;
    std::optional<std::size_t> found;

    auto discover = [&](std::size_t v, std::size_t from, int label) {
        // epsilon successors get the same word, so push them right behind v
        std::vector<std::size_t> stack{v};
        seen[v] = 1;
        parent[v] = from;
        via[v] = label;
        while (!stack.empty()) {
            std::size_t u = stack.back();
            stack.pop_back();
            queue.push_back(u);
            if (!found && a.is_accepting(u)) found = u;
            for (std::size_t e : a.out_edges(u)) {
                const auto& edge = a.edges()[e];
                if (edge.label == Nfa::epsilon && !seen[edge.to]) {
                    seen[edge.to] = 1;
                    parent[edge.to] = u;
                    via[edge.to] = Nfa::epsilon;
                    stack.push_back(edge.to);
                }
            }
        }
    };

    discover(a.initial(), none, Nfa::epsilon);
    const int k = static_cast<int>(a.alphabet().size());
    while (!found && !queue.empty()) {
        std::size_t u = queue.front();
        queue.pop_front();
        for (int s = 0; s < k && !found; ++s) {
            for (std::size_t e : a.out_edges(u)) {
                const auto& edge = a.edges()[e];
                if (edge.label == s && !seen[edge.to]) {
                    discover(edge.to, u, s);
                    if (found) break;
                }
            }
        }
    }
    if (!found) return std::nullopt;
    std::vector<int> rev;
    for (std::size_t v = *found; v != none; v = parent[v])
        if (via[v] != Nfa::epsilon) rev.push_back(via[v]);
    std::reverse(rev.begin(), rev.end());
    return a.decode(rev);
}

/// Copy of a rerooted at q with p as its only accepting state.
inline Nfa nfa_sub_automaton(const Nfa& a, std::size_t q, std::size_t p)
{
    if (q >= a.num_states() || p >= a.num_states()) throw InputError("unknown state index");
    Nfa out = a;
    for (std::size_t s = 0; s < out.num_states(); ++s) out.set_accepting(s, false);
    out.set_initial(q);
    out.set_accepting(p);
    return out;
}

inline Nfa nfa_sub_automaton(const Nfa& a, std::string_view q, std::string_view p)
{
    return nfa_sub_automaton(a, a.state(q), a.state(p));
}

/// Equivalent epsilon-free automaton on the same state set.
inline Nfa nfa_remove_epsilon(const Nfa& a)
{
    Nfa out(a.alphabet());
    for (std::size_t q = 0; q < a.num_states(); ++q) out.add_state(a.state_name(q));
    if (a.num_states() == 0) return out;
    out.set_initial(a.initial());
    auto closure = epsilon_closures(a);
    for (std::size_t q = 0; q < a.num_states(); ++q) {
        for (std::size_t r : closure[q]) {
            if (a.is_accepting(r)) out.set_accepting(q);
            for (std::size_t e : a.out_edges(r)) {
                const auto& edge = a.edges()[e];
                if (edge.label != Nfa::epsilon) out.add_transition(q, edge.label, edge.to);
            }
        }
    }
    return out;
}

/// Drops states that are unreachable or cannot reach acceptance; the initial state is kept.
inline Nfa nfa_trim(const Nfa& a)
{
    const std::size_t n = a.num_states();
    if (n == 0) return a;
    std::vector<char> fwd(n), bwd(n);
    std::vector<std::vector<std::size_t>> preds(n);
    for (const auto& e : a.edges()) preds[e.to].push_back(e.from);
    std::vector<std::size_t> stack{a.initial()};
    fwd[a.initial()] = 1;
    while (!stack.empty()) {
        std::size_t u = stack.back();
        stack.pop_back();
        for (std::size_t e : a.out_edges(u)) {
            std::size_t v = a.edges()[e].to;
            if (!fwd[v]) { fwd[v] = 1; stack.push_back(v); }
        }
    }
    for (std::size_t q = 0; q < n; ++q)
        if (a.is_accepting(q)) { bwd[q] = 1; stack.push_back(q); }
    while (!stack.empty()) {
        std::size_t u = stack.back();
        stack.pop_back();
        for (std::size_t v : preds[u])
            if (!bwd[v]) { bwd[v] = 1; stack.push_back(v); }
    }
    Nfa out(a.alphabet());
    std::vector<std::size_t> remap(n, static_cast<std::size_t>(-1));
    for (std::size_t q = 0; q < n; ++q)
        if ((fwd[q] && bwd[q]) || q == a.initial()) remap[q] = out.add_state(a.state_name(q));
    out.set_initial(remap[a.initial()]);
    for (std::size_t q = 0; q < n; ++q)
        if (remap[q] != static_cast<std::size_t>(-1) && a.is_accepting(q) && fwd[q]) out.set_accepting(remap[q]);
    for (const auto& e : a.edges()) {
        if (remap[e.from] == static_cast<std::size_t>(-1) || remap[e.to] == static_cast<std::size_t>(-1)) continue;
        if (!fwd[e.from]) continue;
        out.add_transition(remap[e.from], e.label, remap[e.to]);
    }
    return out;
}

/// Re-expresses a over another alphabet; transitions on symbols missing from it are dropped.
inline Nfa nfa_over_alphabet(const Nfa& a, const std::vector<Symbol>& alphabet)
{
    Nfa out(alphabet);
    for (std::size_t q = 0; q < a.num_states(); ++q) {
        out.add_state(a.state_name(q));
        if (a.is_accepting(q)) out.set_accepting(q);
    }
    if (a.num_states()) out.set_initial(a.initial());
    for (const auto& e : a.edges()) {
        if (e.label == Nfa::epsilon) {
            out.add_transition(e.from, Nfa::epsilon, e.to);
            continue;
        }
        if (auto s = out.symbol_index(a.alphabet()[static_cast<std::size_t>(e.label)]))
            out.add_transition(e.from, *s, e.to);
    }
    return out;
}

/// Chain automaton accepting exactly w.
inline Nfa nfa_single_word(const std::vector<Symbol>& alphabet, const Word& w)
{
    Nfa out(alphabet);
    for (std::size_t i = 0; i <= w.size(); ++i) out.add_state("w" + std::to_string(i));
    out.set_initial(0);
    out.set_accepting(w.size());
    for (std::size_t i = 0; i < w.size(); ++i) out.add_transition(i, w[i], i + 1);
    return out;
}

/// One accepting state with a self-loop on every symbol.
inline Nfa nfa_universal(const std::vector<Symbol>& alphabet)
{
    Nfa out(alphabet);
    out.add_state("u");
    out.set_initial(0);
    out.set_accepting(0);
    for (std::size_t s = 0; s < alphabet.size(); ++s) out.add_transition(0, static_cast<int>(s), 0);
    return out;
}

} // namespace rr
