#pragma once

#include <algorithm>
#include <cstdint>
#include <limits>
#include <optional>
#include <queue>
#include <unordered_map>
#include <utility>
#include <vector>

#include "cfg.hpp"
#include "common.hpp"
#include "nfa.hpp"

namespace rr {

/// Shortest-derivation search over the Bar-Hillel triples [q, A, p] of a CNF
/// grammar and an NFA, generated on the fly.
///
/// Only triples that derive something are ever stored, so the cost follows
/// the productive part of the triple grammar rather than |N| * |Q|^2.
/// Lengths are settled in increasing order (Knuth's generalization of
/// Dijkstra); words are the least in shortlex order by the NFA alphabet.
class TripleSearch {
public:
    using Id = Cfg::Id;
    using Key = std::uint64_t;
    static constexpr std::uint32_t unreached = std::numeric_limits<std::uint32_t>::max();

    /// With stop_at_axiom the search ends once every shortest axiom triple
    /// [q0, S, f] with f accepting is settled; otherwise all triples are settled.
    TripleSearch(const Cfg& g, const Nfa& a, bool stop_at_axiom = true) : g_(g), a_(a), nq_(a.num_states())
    {
        if (!g.is_cnf()) throw ContractError("triple search requires a grammar in Chomsky normal form");
        if (nq_ == 0 || !g.has_axiom()) return;
        closure_ = epsilon_closures(a);
        const std::size_t sigma = a.alphabet().size();
        step_.assign(nq_, std::vector<std::vector<std::size_t>>(sigma));
        for (std::size_t q = 0; q < nq_; ++q) {
            std::vector<std::vector<char>> mark(sigma, std::vector<char>(nq_));
            for (std::size_t u : closure_[q])
                for (std::size_t ei : a.out_edges(u)) {
                    const auto& e = a.edges()[ei];
                    if (e.label == Nfa::epsilon) continue;
                    auto s = static_cast<std::size_t>(e.label);
                    for (std::size_t v : closure_[e.to])
                        if (!mark[s][v]) {
                            mark[s][v] = 1;
                            step_[q][s].push_back(v);
                        }
                }
            for (auto& targets : step_[q]) std::sort(targets.begin(), targets.end());
        }

        terminal_rules_.resize(g.num_symbols());
        by_left_.resize(g.num_symbols());
        by_right_.resize(g.num_symbols());
        for (const auto& r : g.rules()) {
            if (r.rhs.size() == 1) {
                if (auto s = a.symbol_index(g.name(r.rhs[0]))) terminal_rules_[r.lhs].push_back(*s);
            } else if (r.rhs.size() == 2) {
                by_left_[r.rhs[0]].emplace_back(r.lhs, r.rhs[1]);
                by_right_[r.rhs[1]].emplace_back(r.lhs, r.rhs[0]);
            } else if (r.lhs == g.axiom()) {
                axiom_nullable_ = true;
            }
        }
        for (auto& v : terminal_rules_) std::sort(v.begin(), v.end());
        run(stop_at_axiom);
    }

    /// Length of the shortest word derived by [q, A, p], if any.
    std::optional<std::uint32_t> length(std::size_t q, Id a, std::size_t p) const
    {
        auto it = settled_.find(key(a, q, p));
        if (it == settled_.end()) return std::nullopt;
        return it->second;
    }

    /// Least word of shortest length derived by [q, A, p], as NFA symbol indices.
    std::optional<std::vector<int>> word(std::size_t q, Id a, std::size_t p)
    {
        if (!length(q, a, p)) return std::nullopt;
        return build(q, a, p);
    }

    /// Length of the shortest word of L(g) that a accepts, if any.
    std::optional<std::uint32_t> shortest_length() const
    {
        std::optional<std::uint32_t> best;
        if (nq_ == 0 || !g_.has_axiom()) return best;
        if (accepts_empty()) return 0u;
        for (std::size_t f = 0; f < nq_; ++f)
            if (a_.is_accepting(f))
                if (auto l = length(a_.initial(), g_.axiom(), f); l && (!best || *l < *best)) best = l;
        return best;
    }

    /// Least shortest word of L(g) intersected with L(a).
    std::optional<Word> shortest_word()
    {
        auto len = shortest_length();
        if (!len) return std::nullopt;
        if (*len == 0) return Word{};
        std::optional<std::vector<int>> best;
        for (std::size_t f = 0; f < nq_; ++f) {
            if (!a_.is_accepting(f) || length(a_.initial(), g_.axiom(), f) != len) continue;
            auto w = build(a_.initial(), g_.axiom(), f);
            if (!best || w < *best) best = std::move(w);
        }
        return a_.decode(*best);
    }

    /// Shortest lengths from the initial state to every state p through the axiom.
    std::vector<std::optional<std::uint32_t>> axiom_lengths_from_initial() const
    {
        std::vector<std::optional<std::uint32_t>> out(nq_);
        if (nq_ == 0 || !g_.has_axiom()) return out;
        for (std::size_t p = 0; p < nq_; ++p) out[p] = length(a_.initial(), g_.axiom(), p);
        if (axiom_nullable_)
            for (std::size_t p : closure_[a_.initial()]) out[p] = 0;
        return out;
    }

    /// Pairs (q, p) such that some word of L(g) leads from q to p.
    std::vector<std::pair<std::size_t, std::size_t>> axiom_pairs() const
    {
        std::vector<std::pair<std::size_t, std::size_t>> out;
        if (nq_ == 0 || !g_.has_axiom()) return out;
        for (std::size_t q = 0; q < nq_; ++q)
            for (std::size_t p = 0; p < nq_; ++p) {
                bool by_empty = axiom_nullable_ && std::binary_search(closure_[q].begin(), closure_[q].end(), p);
                if (by_empty || length(q, g_.axiom(), p)) out.emplace_back(q, p);
            }
        return out;
    }

    bool accepts_empty() const
    {
        if (!axiom_nullable_ || nq_ == 0) return false;
        for (std::size_t p : closure_[a_.initial()])
            if (a_.is_accepting(p)) return true;
        return false;
    }

    std::size_t settled_triples() const { return settled_.size(); }

private:
    Key key(Id a, std::size_t q, std::size_t p) const { return (static_cast<Key>(a) * nq_ + q) * nq_ + p; }

    static Key pair_key(Id a, std::size_t q, std::size_t nq) { return static_cast<Key>(a) * nq + q; }

    void relax(Id a, std::size_t q, std::size_t p, std::uint32_t len)
    {
        Key k = key(a, q, p);
        if (settled_.contains(k)) return;
        auto [it, fresh] = tentative_.emplace(k, len);
        if (!fresh) {
            if (it->second <= len) return;
            it->second = len;
        }
        queue_.emplace(len, k);
    }

    void run(bool stop_at_axiom)
    {
        for (Id a : g_.nonterminals())
            for (int s : terminal_rules_[a])
                for (std::size_t q = 0; q < nq_; ++q)
                    for (std::size_t p : step_[q][static_cast<std::size_t>(s)]) relax(a, q, p, 1);

        std::optional<std::uint32_t> target;
        while (!queue_.empty()) {
            auto [len, k] = queue_.top();
            queue_.pop();
            if (stop_at_axiom && target && len > *target) break;
            if (settled_.contains(k) || tentative_.at(k) != len) continue;
            settled_.emplace(k, len);
            const std::size_t p = k % nq_;
            const std::size_t q = (k / nq_) % nq_;
            const Id b = static_cast<Id>(k / nq_ / nq_);
            if (b == g_.axiom() && q == a_.initial() && a_.is_accepting(p) && !target) target = len;
            left_[pair_key(b, q, nq_)].push_back(p);
            right_[pair_key(b, p, nq_)].push_back(q);
            for (auto [parent, c] : by_left_[b])
                if (auto it = left_.find(pair_key(c, p, nq_)); it != left_.end())
                    for (std::size_t r : it->second) relax(parent, q, r, len + settled_.at(key(c, p, r)));
            for (auto [parent, l] : by_right_[b])
                if (auto it = right_.find(pair_key(l, q, nq_)); it != right_.end())
                    for (std::size_t r : it->second) relax(parent, r, p, settled_.at(key(l, r, q)) + len);
        }
    }

    const std::vector<int>& build(std::size_t q, Id a, std::size_t p)
    {
        Key k = key(a, q, p);
        if (auto it = words_.find(k); it != words_.end()) return it->second;
        const std::uint32_t len = settled_.at(k);
        std::optional<std::vector<int>> best;
        if (len == 1) {
            for (int s : terminal_rules_[a])
                if (std::binary_search(step_[q][static_cast<std::size_t>(s)].begin(),
                                       step_[q][static_cast<std::size_t>(s)].end(), p)) {
                    best = std::vector<int>{s};
                    break;
                }
        } else {
            for (std::size_t ri : g_.rules_for(a)) {
                const auto& r = g_.rules()[ri];
                if (r.rhs.size() != 2) continue;
                auto it = left_.find(pair_key(r.rhs[0], q, nq_));
                if (it == left_.end()) continue;
                for (std::size_t mid : it->second) {
                    auto lc = length(mid, r.rhs[1], p);
                    if (!lc || settled_.at(key(r.rhs[0], q, mid)) + *lc != len) continue;
                    std::vector<int> w = build(q, r.rhs[0], mid);
                    const auto& tail = build(mid, r.rhs[1], p);
                    w.insert(w.end(), tail.begin(), tail.end());
                    if (!best || w < *best) best = std::move(w);
                }
            }
        }
        if (!best) throw ContractError("triple search: inconsistent derivation lengths");
        return words_.emplace(k, std::move(*best)).first->second;
    }

    const Cfg& g_;
    const Nfa& a_;
    std::size_t nq_;
    std::vector<std::vector<std::size_t>> closure_;
    std::vector<std::vector<std::vector<std::size_t>>> step_;
    std::vector<std::vector<int>> terminal_rules_;
    std::vector<std::vector<std::pair<Id, Id>>> by_left_, by_right_;
    bool axiom_nullable_ = false;

    std::unordered_map<Key, std::uint32_t> tentative_, settled_;
    std::unordered_map<Key, std::vector<std::size_t>> left_, right_;
    std::priority_queue<std::pair<std::uint32_t, Key>, std::vector<std::pair<std::uint32_t, Key>>, std::greater<>> queue_;
    std::unordered_map<Key, std::vector<int>> words_;
};

} // namespace rr
