#pragma once

#include <map>
#include <set>
#include <string>
#include <tuple>
#include <unordered_map>
#include <vector>

#include "common.hpp"
#include "nfa.hpp"

namespace rr {

/// Rational transducer: every transition reads at most one input symbol and
/// writes at most one output symbol. Longer outputs are split over fresh
/// intermediate states by the builders.
class Transducer {
public:
    static constexpr int epsilon = -1;

    struct Edge {
        std::size_t from;
        int read;
        int write;
        std::size_t to;
    };

    Transducer() = default;
    Transducer(std::vector<Symbol> input_alphabet, std::vector<Symbol> output_alphabet)
        : input_(std::move(input_alphabet)), output_(std::move(output_alphabet))
    {
        index(input_, input_ids_);
        index(output_, output_ids_);
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

    void set_initial(std::size_t q) { check_state(q); initial_ = q; }
    void set_accepting(std::size_t q, bool on = true) { check_state(q); accepting_[q] = on; }

    void add_transition(std::size_t from, int read, int write, std::size_t to)
    {
        check_state(from);
        check_state(to);
        if (read != epsilon && (read < 0 || static_cast<std::size_t>(read) >= input_.size()))
            throw InputError("read label out of range");
        if (write != epsilon && (write < 0 || static_cast<std::size_t>(write) >= output_.size()))
            throw InputError("write label out of range");
        if (!edge_set_.emplace(from, read, write, to).second) return;
        out_[from].push_back(edges_.size());
        edges_.push_back({from, read, write, to});
    }

    void add_transition(std::size_t from, std::string_view read, std::string_view write, std::size_t to)
    {
        add_transition(from, read.empty() ? epsilon : input_symbol(read), write.empty() ? epsilon : output_symbol(write),
                       to);
    }

    const std::vector<Symbol>& input_alphabet() const { return input_; }
    const std::vector<Symbol>& output_alphabet() const { return output_; }

    int input_symbol(std::string_view s) const { return lookup(input_ids_, s, "input"); }
    int output_symbol(std::string_view s) const { return lookup(output_ids_, s, "output"); }

    std::size_t num_states() const { return names_.size(); }
    const std::string& state_name(std::size_t q) const { return names_.at(q); }
    std::size_t initial() const { return initial_; }
    bool is_accepting(std::size_t q) const { return accepting_.at(q); }
    const std::vector<Edge>& edges() const { return edges_; }
    const std::vector<std::size_t>& out_edges(std::size_t q) const { return out_.at(q); }

private:
    static void index(const std::vector<Symbol>& alpha, std::unordered_map<std::string, int>& ids)
    {
        for (std::size_t i = 0; i < alpha.size(); ++i) {
            if (alpha[i].empty()) throw InputError("empty symbol name is reserved for epsilon");
            if (!ids.emplace(alpha[i], static_cast<int>(i)).second)
                throw InputError("duplicate alphabet symbol '" + alpha[i] + "'");
        }
    }

    static int lookup(const std::unordered_map<std::string, int>& ids, std::string_view s, const char* which)
    {
        auto it = ids.find(std::string(s));
        if (it == ids.end()) throw InputError("symbol '" + std::string(s) + "' is not in the " + which + " alphabet");
        return it->second;
    }

    void check_state(std::size_t q) const
    {
        if (q >= names_.size()) throw InputError("state index out of range");
    }

    std::vector<Symbol> input_, output_;
    std::unordered_map<std::string, int> input_ids_, output_ids_;
    std::vector<std::string> names_;
    std::unordered_map<std::string, std::size_t> state_ids_;
    std::size_t initial_ = 0;
    std::vector<bool> accepting_;
    std::vector<Edge> edges_;
    std::set<std::tuple<std::size_t, int, int, std::size_t>> edge_set_;
    std::vector<std::vector<std::size_t>> out_;
};

/// All outputs u of T on w with |u| <= max_out.
///
/// Depth-first search over (state, input position, output so far); the
/// visited set makes epsilon cycles harmless because the output is bounded.
inline std::set<Word> transduce_bounded(const Transducer& t, const Word& w, std::size_t max_out)
{
    std::set<Word> result;
    if (t.num_states() == 0) return result;
    std::vector<int> input;
    for (const auto& s : w) input.push_back(t.input_symbol(s));

    struct Config {
        std::size_t state;
        std::size_t pos;
        std::vector<int> out;
        bool operator<(const Config& o) const { return std::tie(state, pos, out) < std::tie(o.state, o.pos, o.out); }
    };
    std::set<Config> seen;
    std::vector<Config> stack{{t.initial(), 0, {}}};
    seen.insert(stack.back());
    while (!stack.empty()) {
        Config c = std::move(stack.back());
        stack.pop_back();
        if (c.pos == input.size() && t.is_accepting(c.state)) {
            Word u;
            for (int s : c.out) u.push_back(t.output_alphabet()[static_cast<std::size_t>(s)]);
            result.insert(std::move(u));
        }
        for (std::size_t e : t.out_edges(c.state)) {
            const auto& edge = t.edges()[e];
            Config next{edge.to, c.pos, c.out};
            if (edge.read != Transducer::epsilon) {
                if (c.pos >= input.size() || input[c.pos] != edge.read) continue;
                ++next.pos;
            }
            if (edge.write != Transducer::epsilon) {
                if (next.out.size() >= max_out) continue;
                next.out.push_back(edge.write);
            }
            if (seen.insert(next).second) stack.push_back(std::move(next));
        }
    }
    return result;
}

namespace detail {

inline std::string pair_name(const std::string& p, const std::string& q) { return "(" + p + "," + q + ")"; }

/// Keeps the states of a product that are reachable from the initial state and co-reachable to acceptance.
template <typename Machine>
std::vector<char> useful_states(const Machine& m)
{
    const std::size_t n = m.num_states();
    std::vector<char> fwd(n), bwd(n);
    if (n == 0) return fwd;
    std::vector<std::vector<std::size_t>> preds(n);
    for (const auto& e : m.edges()) preds[e.to].push_back(e.from);
    std::vector<std::size_t> stack{m.initial()};
    fwd[m.initial()] = 1;
    while (!stack.empty()) {
        std::size_t u = stack.back();
        stack.pop_back();
        for (std::size_t e : m.out_edges(u)) {
            std::size_t v = m.edges()[e].to;
            if (!fwd[v]) { fwd[v] = 1; stack.push_back(v); }
        }
    }
    for (std::size_t q = 0; q < n; ++q)
        if (m.is_accepting(q) && fwd[q]) { bwd[q] = 1; stack.push_back(q); }
    while (!stack.empty()) {
        std::size_t u = stack.back();
        stack.pop_back();
        for (std::size_t v : preds[u])
            if (!bwd[v] && fwd[v]) { bwd[v] = 1; stack.push_back(v); }
    }
    for (std::size_t q = 0; q < n; ++q) fwd[q] = fwd[q] && bwd[q];
    fwd[m.initial()] = 1;
    return fwd;
}

inline Transducer trim(const Transducer& t)
{
    auto keep = useful_states(t);
    Transducer out(t.input_alphabet(), t.output_alphabet());
    if (t.num_states() == 0) return out;
    std::vector<std::size_t> remap(t.num_states(), static_cast<std::size_t>(-1));
    for (std::size_t q = 0; q < t.num_states(); ++q)
        if (keep[q]) remap[q] = out.add_state(t.state_name(q));
    out.set_initial(remap[t.initial()]);
    for (std::size_t q = 0; q < t.num_states(); ++q)
        if (keep[q] && t.is_accepting(q)) out.set_accepting(remap[q]);
    for (const auto& e : t.edges())
        if (keep[e.from] && keep[e.to]) out.add_transition(remap[e.from], e.read, e.write, remap[e.to]);
    return out;
}

} // namespace detail

/// Transducer for {(u, v) : exists y, (u, y) in R(t1) and (y, v) in R(t2)}.
inline Transducer compose_tt(const Transducer& t1, const Transducer& t2)
{
    if (t1.output_alphabet() != t2.input_alphabet())
        throw ContractError("compose_tt: output alphabet of the first transducer differs from input alphabet of the second");
    Transducer out(t1.input_alphabet(), t2.output_alphabet());
    if (t1.num_states() == 0 || t2.num_states() == 0) return out;
    const std::size_t n2 = t2.num_states();
    std::map<std::size_t, std::size_t> ids;
    std::vector<std::pair<std::size_t, std::size_t>> todo;
    auto get = [&](std::size_t p, std::size_t q) {
        std::size_t key = p * n2 + q;
        auto it = ids.find(key);
        if (it != ids.end()) return it->second;
        std::size_t id = out.add_state(detail::pair_name(t1.state_name(p), t2.state_name(q)));
        if (t1.is_accepting(p) && t2.is_accepting(q)) out.set_accepting(id);
        ids.emplace(key, id);
        todo.emplace_back(p, q);
        return id;
    };
    out.set_initial(get(t1.initial(), t2.initial()));
    while (!todo.empty()) {
        auto [p, q] = todo.back();
        todo.pop_back();
        std::size_t src = ids.at(p * n2 + q);
        for (std::size_t e1 : t1.out_edges(p)) {
            const auto& a = t1.edges()[e1];
            if (a.write == Transducer::epsilon) {
                out.add_transition(src, a.read, Transducer::epsilon, get(a.to, q));
                continue;
            }
            for (std::size_t e2 : t2.out_edges(q)) {
                const auto& b = t2.edges()[e2];
                if (b.read == a.write) out.add_transition(src, a.read, b.write, get(a.to, b.to));
            }
        }
        for (std::size_t e2 : t2.out_edges(q)) {
            const auto& b = t2.edges()[e2];
            if (b.read == Transducer::epsilon) out.add_transition(src, Transducer::epsilon, b.write, get(p, b.to));
        }
    }
    return detail::trim(out);
}

/// NFA over the input alphabet of t for {w : t(w) meets L(a)}.
inline Nfa compose_ta(const Transducer& t, const Nfa& a)
{
    if (t.output_alphabet() != a.alphabet())
        throw ContractError("compose_ta: transducer output alphabet differs from the automaton alphabet");
    Nfa out(t.input_alphabet());
    if (t.num_states() == 0 || a.num_states() == 0) {
        out.add_state("empty");
        return out;
    }
    const std::size_t na = a.num_states();
    std::map<std::size_t, std::size_t> ids;
    std::vector<std::pair<std::size_t, std::size_t>> todo;
    auto get = [&](std::size_t p, std::size_t q) {
        std::size_t key = p * na + q;
        auto it = ids.find(key);
        if (it != ids.end()) return it->second;
        std::size_t id = out.add_state(detail::pair_name(t.state_name(p), a.state_name(q)));
        if (t.is_accepting(p) && a.is_accepting(q)) out.set_accepting(id);
        ids.emplace(key, id);
        todo.emplace_back(p, q);
        return id;
    };
    out.set_initial(get(t.initial(), a.initial()));
    while (!todo.empty()) {
        auto [p, q] = todo.back();
        todo.pop_back();
        std::size_t src = ids.at(p * na + q);
        for (std::size_t e1 : t.out_edges(p)) {
            const auto& te = t.edges()[e1];
            if (te.write == Transducer::epsilon) {
                out.add_transition(src, te.read, get(te.to, q));
                continue;
            }
            for (std::size_t e2 : a.out_edges(q)) {
                const auto& ae = a.edges()[e2];
                if (ae.label == te.write) out.add_transition(src, te.read, get(te.to, ae.to));
            }
        }
        for (std::size_t e2 : a.out_edges(q)) {
            const auto& ae = a.edges()[e2];
            if (ae.label == Nfa::epsilon) out.add_transition(src, Nfa::epsilon, get(p, ae.to));
        }
    }
    return nfa_trim(out);
}

/// Forgets the output tape.
inline Nfa transducer_domain_nfa(const Transducer& t)
{
    Nfa out(t.input_alphabet());
    for (std::size_t q = 0; q < t.num_states(); ++q) {
        out.add_state(t.state_name(q));
        if (t.is_accepting(q)) out.set_accepting(q);
    }
    if (t.num_states()) out.set_initial(t.initial());
    for (const auto& e : t.edges()) out.add_transition(e.from, e.read, e.to);
    return out;
}

/// The transducer of the inverse relation.
inline Transducer inverse(const Transducer& t)
{
    Transducer out(t.output_alphabet(), t.input_alphabet());
    for (std::size_t q = 0; q < t.num_states(); ++q) {
        out.add_state(t.state_name(q));
        if (t.is_accepting(q)) out.set_accepting(q);
    }
    if (t.num_states()) out.set_initial(t.initial());
    for (const auto& e : t.edges()) out.add_transition(e.from, e.write, e.read, e.to);
    return out;
}

/// One-hub transducer realizing the morphism letter -> image.
/// Images longer than one symbol are spelled out over fresh states "<letter>.k".
inline Transducer morphism_transducer(const std::vector<Symbol>& input_alphabet,
                                      const std::vector<Symbol>& output_alphabet,
                                      const std::map<Symbol, Word>& image)
{
    Transducer t(input_alphabet, output_alphabet);
    std::size_t hub = t.add_state("hub");
    t.set_initial(hub);
    t.set_accepting(hub);
    for (const auto& letter : input_alphabet) {
        auto it = image.find(letter);
        if (it == image.end()) throw ContractError("morphism has no image for '" + letter + "'");
        const Word& img = it->second;
        int read = t.input_symbol(letter);
        if (img.size() <= 1) {
            t.add_transition(hub, read, img.empty() ? Transducer::epsilon : t.output_symbol(img[0]), hub);
            continue;
        }
        std::size_t prev = hub;
        for (std::size_t k = 0; k < img.size(); ++k) {
            std::size_t next = k + 1 == img.size() ? hub : t.add_state("<" + letter + "." + std::to_string(k + 1) + ">");
            t.add_transition(prev, k == 0 ? read : Transducer::epsilon, t.output_symbol(img[k]), next);
            prev = next;
        }
    }
    return t;
}

} // namespace rr
