#pragma once

#include <deque>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <tuple>
#include <unordered_map>
#include <vector>

#include "common.hpp"
#include "nfa.hpp"

namespace rr {

enum class Guard { any, zero, positive };
enum class AcceptMode { final_state, final_state_and_zero };

/// NFA with one nonnegative counter. Each move reads at most one symbol,
/// tests the counter, and changes it by -1, 0 or +1. A decrement is never
/// enabled at counter 0 whatever its guard says.
class CounterAutomaton {
public:
    static constexpr int epsilon = -1;

    struct Edge {
        std::size_t from;
        int read;
        Guard guard;
        int delta;
        std::size_t to;
    };

    CounterAutomaton() = default;
    explicit CounterAutomaton(std::vector<Symbol> alphabet, AcceptMode mode = AcceptMode::final_state)
        : alphabet_(std::move(alphabet)), mode_(mode)
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

    std::size_t state(std::string_view name) const
    {
        auto it = state_ids_.find(std::string(name));
        if (it == state_ids_.end()) throw InputError("unknown state '" + std::string(name) + "'");
        return it->second;
    }

    void set_initial(std::size_t q) { check_state(q); initial_ = q; }
    void set_accepting(std::size_t q, bool on = true) { check_state(q); accepting_[q] = on; }
    void set_accept_mode(AcceptMode m) { mode_ = m; }

    void add_transition(std::size_t from, int read, Guard guard, int delta, std::size_t to)
    {
        check_state(from);
        check_state(to);
        if (delta < -1 || delta > 1) throw InputError("counter delta must be -1, 0 or +1");
        if (read != epsilon && (read < 0 || static_cast<std::size_t>(read) >= alphabet_.size()))
            throw InputError("read label out of range");
        if (!edge_set_.emplace(from, read, static_cast<int>(guard), delta, to).second) return;
        out_[from].push_back(edges_.size());
        edges_.push_back({from, read, guard, delta, to});
    }

    void add_transition(std::size_t from, std::string_view read, Guard guard, int delta, std::size_t to)
    {
        add_transition(from, read.empty() ? epsilon : symbol(read), guard, delta, to);
    }

    int symbol(std::string_view s) const
    {
        auto it = symbol_ids_.find(std::string(s));
        if (it == symbol_ids_.end()) throw InputError("symbol '" + std::string(s) + "' is not in the counter automaton alphabet");
        return it->second;
    }

    const std::vector<Symbol>& alphabet() const { return alphabet_; }
    AcceptMode accept_mode() const { return mode_; }
    std::size_t num_states() const { return names_.size(); }
    const std::string& state_name(std::size_t q) const { return names_.at(q); }
    std::size_t initial() const { return initial_; }
    bool is_accepting(std::size_t q) const { return accepting_.at(q); }
    const std::vector<Edge>& edges() const { return edges_; }
    const std::vector<std::size_t>& out_edges(std::size_t q) const { return out_.at(q); }

    /// Counter value after taking e at value c, or nullopt if e is disabled.
    static std::optional<std::size_t> fire(const Edge& e, std::size_t c)
    {
        if (e.guard == Guard::zero && c != 0) return std::nullopt;
        if (e.guard == Guard::positive && c == 0) return std::nullopt;
        if (e.delta < 0 && c == 0) return std::nullopt;
        return e.delta < 0 ? c - 1 : c + static_cast<std::size_t>(e.delta);
    }

    bool accepts_config(std::size_t q, std::size_t c) const
    {
        return accepting_[q] && (mode_ == AcceptMode::final_state || c == 0);
    }

private:
    void check_state(std::size_t q) const
    {
        if (q >= names_.size()) throw InputError("state index out of range");
    }

    std::vector<Symbol> alphabet_;
    std::unordered_map<std::string, int> symbol_ids_;
    AcceptMode mode_ = AcceptMode::final_state;
    std::vector<std::string> names_;
    std::unordered_map<std::string, std::size_t> state_ids_;
    std::size_t initial_ = 0;
    std::vector<bool> accepting_;
    std::vector<Edge> edges_;
    std::set<std::tuple<std::size_t, int, int, int, std::size_t>> edge_set_;
    std::vector<std::vector<std::size_t>> out_;
};

/// Membership by configuration search from (initial, 0).
///
/// The counter is capped at (|w| + 1) * n^2 + n for n states so that epsilon
/// loops terminate; every explored run is a genuine run.
inline bool counter_accepts(const CounterAutomaton& m, const Word& w)
{
    const std::size_t n = m.num_states();
    if (n == 0) return false;
    std::vector<int> input;
    for (const auto& s : w) input.push_back(m.symbol(s));
    const std::size_t cap = (input.size() + 1) * n * n + n;
    const std::size_t width = cap + 1;
    std::vector<char> seen((input.size() + 1) * n * width);
    auto key = [&](std::size_t pos, std::size_t q, std::size_t c) { return (pos * n + q) * width + c; };
    std::vector<std::tuple<std::size_t, std::size_t, std::size_t>> stack{{0, m.initial(), 0}};
    seen[key(0, m.initial(), 0)] = 1;
    while (!stack.empty()) {
        auto [pos, q, c] = stack.back();
        stack.pop_back();
        if (pos == input.size() && m.accepts_config(q, c)) return true;
        for (std::size_t ei : m.out_edges(q)) {
            const auto& e = m.edges()[ei];
            std::size_t np = pos;
            if (e.read != CounterAutomaton::epsilon) {
                if (pos >= input.size() || input[pos] != e.read) continue;
                ++np;
            }
            auto nc = CounterAutomaton::fire(e, c);
            if (!nc || *nc > cap) continue;
            if (!seen[key(np, e.to, *nc)]) {
                seen[key(np, e.to, *nc)] = 1;
                stack.emplace_back(np, e.to, *nc);
            }
        }
    }
    return false;
}

/// Synchronized product with an NFA; L(result) = L(m) intersected with L(a).
inline CounterAutomaton counter_product(const CounterAutomaton& m, const Nfa& a)
{
    if (m.alphabet() != a.alphabet()) throw ContractError("counter_product: alphabets differ");
    CounterAutomaton out(m.alphabet(), m.accept_mode());
    const std::size_t na = a.num_states();
    for (std::size_t p = 0; p < m.num_states(); ++p)
        for (std::size_t q = 0; q < na; ++q) {
            std::size_t id = out.add_state("(" + m.state_name(p) + "," + a.state_name(q) + ")");
            if (m.is_accepting(p) && a.is_accepting(q)) out.set_accepting(id);
        }
    if (m.num_states() == 0 || na == 0) return out;
    auto id = [&](std::size_t p, std::size_t q) { return p * na + q; };
    out.set_initial(id(m.initial(), a.initial()));
    for (const auto& e : m.edges()) {
        if (e.read == CounterAutomaton::epsilon) {
            for (std::size_t q = 0; q < na; ++q) out.add_transition(id(e.from, q), e.read, e.guard, e.delta, id(e.to, q));
            continue;
        }
        for (const auto& f : a.edges())
            if (f.label == e.read) out.add_transition(id(e.from, f.from), e.read, e.guard, e.delta, id(e.to, f.to));
    }
    for (const auto& f : a.edges())
        if (f.label == Nfa::epsilon)
            for (std::size_t p = 0; p < m.num_states(); ++p)
                out.add_transition(id(p, f.from), CounterAutomaton::epsilon, Guard::any, 0, id(p, f.to));
    return out;
}

inline std::size_t default_counter_cap(const CounterAutomaton& m) { return m.num_states() * m.num_states(); }

/// NFA on (state, counter) pairs with counter in [0, cap]; overflow moves to
/// an absorbing, non-accepting "reject" state.
inline Nfa counter_to_nfa(const CounterAutomaton& m, std::optional<std::size_t> cap_opt = std::nullopt)
{
    const std::size_t cap = cap_opt.value_or(default_counter_cap(m));
    const std::size_t width = cap + 1;
    Nfa out(m.alphabet());
    for (std::size_t q = 0; q < m.num_states(); ++q)
        for (std::size_t c = 0; c <= cap; ++c) {
            std::size_t id = out.add_state("(" + m.state_name(q) + "," + std::to_string(c) + ")");
            if (m.accepts_config(q, c)) out.set_accepting(id);
        }
    std::string reject_name = "reject";
    while (out.find_state(reject_name)) reject_name += "'";
    const std::size_t reject = out.add_state(reject_name);
    if (m.num_states() == 0) {
        out.set_initial(reject);
        return out;
    }
    out.set_initial(m.initial() * width);
    for (const auto& e : m.edges())
        for (std::size_t c = 0; c <= cap; ++c) {
            auto nc = CounterAutomaton::fire(e, c);
            if (!nc) continue;
            std::size_t target = *nc > cap ? reject : e.to * width + *nc;
            out.add_transition(e.from * width + c, e.read, target);
        }
    for (int s = 0; s < static_cast<int>(m.alphabet().size()); ++s) out.add_transition(reject, s, reject);
    return out;
}

} // namespace rr
