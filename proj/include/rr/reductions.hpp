#pragma once

#include <algorithm>
#include <map>
#include <set>
#include <string>
#include <vector>

#include "cfg.hpp"
#include "common.hpp"
#include "filters.hpp"
#include "nfa.hpp"
#include "transducer.hpp"

namespace rr {

inline std::string triple_name(const std::string& q, const std::string& a, const std::string& p)
{
    return "[" + q + "," + a + "," + p + "]";
}

/// |N| * |Q|^2 + 1: the axiom plus one triple [q, A, p] per nonterminal and state pair.
inline std::size_t bar_hillel_nonterminal_count(const Cfg& g, const Nfa& a)
{
    return g.nonterminals().size() * a.num_states() * a.num_states() + 1;
}

/// Grammar for L(g) intersected with L(a) over triple nonterminals [q, A, p].
///
/// For every rule A -> X1 ... Xn and states q, p the output has the rules
/// [q,A,p] -> Y1 ... Yn threading a run of a from q to p: a nonterminal Xi
/// becomes a triple, a terminal Xi stays itself and must label a transition.
/// Terminal triples are folded into their parents, which keeps the
/// nonterminal count at |N| * |Q|^2 + 1. Epsilon moves of a may be taken
/// between any two consecutive symbols and at both ends.
inline Cfg bar_hillel(const Cfg& g, const Nfa& a)
{
    using Id = Cfg::Id;
    Cfg out;
    const std::size_t nq = a.num_states();
    std::string axiom_name = "S'";
    out.add_nonterminal(axiom_name);
    std::map<Id, std::size_t> nt_index;
    for (Id nt : g.nonterminals()) nt_index.emplace(nt, nt_index.size());
    std::vector<Id> triple_ids(g.nonterminals().size() * nq * nq);
    for (Id nt : g.nonterminals())
        for (std::size_t q = 0; q < nq; ++q)
            for (std::size_t p = 0; p < nq; ++p)
                triple_ids[(nt_index[nt] * nq + q) * nq + p] =
                    out.add_nonterminal(triple_name(a.state_name(q), g.name(nt), a.state_name(p)));
    for (const auto& s : a.alphabet()) out.add_terminal(s);
    std::vector<int> symbol_of(g.num_symbols(), Nfa::epsilon);
    for (Id t : g.terminals()) {
        Id id = out.add_terminal(g.name(t));
        (void)id;
        if (auto s = a.symbol_index(g.name(t))) symbol_of[t] = *s;
    }
    if (nq == 0) return out;

    auto triple = [&](std::size_t q, Id nt, std::size_t p) { return triple_ids[(nt_index.at(nt) * nq + q) * nq + p]; };
    auto closure = epsilon_closures(a);
    std::vector<std::vector<std::vector<std::size_t>>> step(nq, std::vector<std::vector<std::size_t>>(a.alphabet().size()));
    for (const auto& e : a.edges())
        if (e.label != Nfa::epsilon) step[e.from][static_cast<std::size_t>(e.label)].push_back(e.to);

    for (const auto& rule : g.rules()) {
        const std::size_t n = rule.rhs.size();
        std::vector<Id> rhs;
        rhs.reserve(n);
        for (std::size_t q = 0; q < nq; ++q) {
            // position i starts from run state s, may first follow epsilon moves
            auto expand = [&](auto&& self, std::size_t i, std::size_t s) -> void {
                if (i == n) {
                    for (std::size_t p : closure[s]) out.add_rule(triple(q, rule.lhs, p), rhs);
                    return;
                }
                Id x = rule.rhs[i];
                for (std::size_t u : closure[s]) {
                    if (!g.is_terminal(x)) {
                        for (std::size_t v = 0; v < nq; ++v) {
                            rhs.push_back(triple(u, x, v));
                            self(self, i + 1, v);
                            rhs.pop_back();
                        }
                    } else if (symbol_of[x] != Nfa::epsilon) {
                        for (std::size_t v : step[u][static_cast<std::size_t>(symbol_of[x])]) {
                            rhs.push_back(out.id(g.name(x)));
                            self(self, i + 1, v);
                            rhs.pop_back();
                        }
                    }
                }
            };
            expand(expand, 0, q);
        }
    }
    for (std::size_t f = 0; f < nq; ++f)
        if (a.is_accepting(f)) out.add_rule(out.axiom(), {triple(a.initial(), g.axiom(), f)});
    return out;
}

/// Transducer T over the D2 alphabet with T(D2) = L(g).
///
/// The CNF of g is run as a top-down pushdown machine whose stack holds the
/// pending right children of binary rules. The stack is replayed on a Dyck
/// word: pushing C reads the opening bracket of C and popping C reads its
/// closing bracket, so Dyck matching guarantees that every pop returns the
/// symbol on top. Terminal rules write their terminal. The bracket alphabet
/// is then decoded from D2 by the inverse of dyck_encoder.
inline Transducer cs_transducer(const Cfg& g)
{
    using Id = Cfg::Id;
    Cfg c = cnf_convert(g);
    std::vector<Id> stack_symbols;
    std::map<Id, int> bracket;
    for (const auto& r : c.rules())
        if (r.rhs.size() == 2 && !bracket.contains(r.rhs[1])) {
            bracket.emplace(r.rhs[1], 0);
            stack_symbols.push_back(r.rhs[1]);
        }
    std::sort(stack_symbols.begin(), stack_symbols.end());
    for (std::size_t i = 0; i < stack_symbols.size(); ++i) bracket[stack_symbols[i]] = static_cast<int>(i + 1);
    const int n = std::max<int>(1, static_cast<int>(stack_symbols.size()));

    Transducer replay(dyck_alphabet(n), c.terminal_names());
    std::size_t pop = replay.add_state("pop");
    std::map<Id, std::size_t> expand;
    for (Id a : c.nonterminals()) expand.emplace(a, replay.add_state("expand:" + c.name(a)));
    replay.set_initial(expand.at(c.axiom()));
    replay.set_accepting(pop);
    for (const auto& r : c.rules()) {
        std::size_t from = expand.at(r.lhs);
        if (r.rhs.empty()) {
            replay.add_transition(from, Transducer::epsilon, Transducer::epsilon, pop);
        } else if (r.rhs.size() == 1) {
            replay.add_transition(from, Transducer::epsilon, replay.output_symbol(c.name(r.rhs[0])), pop);
        } else {
            replay.add_transition(from, replay.input_symbol(dyck_open(bracket.at(r.rhs[1]))), Transducer::epsilon,
                                  expand.at(r.rhs[0]));
        }
    }
    for (Id s : stack_symbols)
        replay.add_transition(pop, replay.input_symbol(dyck_close(bracket.at(s))), Transducer::epsilon, expand.at(s));

    return compose_tt(inverse(dyck_encoder(n)), replay);
}

namespace detail {

inline const Cfg& dyck2_cnf()
{
    static const Cfg cnf = cnf_convert(dyck_grammar(2));
    return cnf;
}

inline void require_d2_alphabet(const Nfa& a)
{
    auto expected = dyck_alphabet(2);
    auto got = a.alphabet();
    std::sort(expected.begin(), expected.end());
    std::sort(got.begin(), got.end());
    if (expected != got) {
        for (const auto& s : a.alphabet())
            if (!std::binary_search(expected.begin(), expected.end(), s))
                throw InputError("symbol '" + s + "' is not in the D2 alphabet");
        throw InputError("automaton alphabet must be exactly {a1, a2, abar1, abar2}");
    }
}

} // namespace detail

/// Height cap m = (nonterminals of the Bar-Hillel grammar of CNF(D2) and a) + 1.
/// Some word of L(a) in D2, if any, keeps every position height <= m.
inline std::size_t height_bound(const Nfa& a)
{
    return bar_hillel_nonterminal_count(detail::dyck2_cnf(), a) + 1;
}

/// An automaton over the D2 alphabet together with its marking.
struct MarkedNfa {
    Nfa nfa;
    /// h(q) for every state; the reject state has no height and stores -1.
    std::vector<long> height;
    std::size_t reject_state = 0;
};

/// Marking transformation: states (q, i) for 0 <= i <= m plus an absorbing
/// reject state r. Opening brackets go up one level, closing brackets down
/// one level, overflow above m and underflow below 0 go to r, epsilon moves
/// keep the level.
inline MarkedNfa mark_automaton(const Nfa& a)
{
    detail::require_d2_alphabet(a);
    const std::size_t m = height_bound(a);
    const std::size_t nq = a.num_states();
    MarkedNfa out{Nfa(dyck_alphabet(2)), {}, 0};
    Nfa& b = out.nfa;
    for (std::size_t q = 0; q < nq; ++q)
        for (std::size_t i = 0; i <= m; ++i) {
            b.add_state("(" + a.state_name(q) + "," + std::to_string(i) + ")");
            out.height.push_back(static_cast<long>(i));
        }
    std::string reject = "r";
    while (b.find_state(reject)) reject += "'";
    out.reject_state = b.add_state(reject);
    out.height.push_back(-1);
    const std::size_t r = out.reject_state;
    auto id = [&](std::size_t q, std::size_t i) { return q * (m + 1) + i; };
    b.set_initial(nq ? id(a.initial(), 0) : r);
    for (std::size_t q = 0; q < nq; ++q)
        if (a.is_accepting(q)) b.set_accepting(id(q, 0));
    for (const auto& e : a.edges()) {
        if (e.label == Nfa::epsilon) {
            for (std::size_t i = 0; i <= m; ++i) b.add_transition(id(e.from, i), Nfa::epsilon, id(e.to, i));
            continue;
        }
        const Symbol& s = a.alphabet()[static_cast<std::size_t>(e.label)];
        const int label = b.symbol(s);
        const bool open = s == dyck_open(1) || s == dyck_open(2);
        for (std::size_t i = 0; i <= m; ++i) {
            if (open) b.add_transition(id(e.from, i), label, i < m ? id(e.to, i + 1) : r);
            else b.add_transition(id(e.from, i), label, i > 0 ? id(e.to, i - 1) : r);
        }
    }
    for (int s = 0; s < 4; ++s) b.add_transition(r, s, r);
    return out;
}

/// The morphism a1 -> a x1, abar1 -> xbar1 abar # #, a2 -> a x2, abar2 -> xbar2 abar # #.
inline Word phi_image(const Word& u)
{
    Word out;
    for (const auto& s : u) {
        if (s == dyck_open(1)) out.insert(out.end(), {pair_open, sym_open_1});
        else if (s == dyck_open(2)) out.insert(out.end(), {pair_open, sym_open_2});
        else if (s == dyck_close(1)) out.insert(out.end(), {sym_close_1, pair_close, sharp, sharp});
        else if (s == dyck_close(2)) out.insert(out.end(), {sym_close_2, pair_close, sharp, sharp});
        else throw InputError("symbol '" + s + "' is not in the D2 alphabet");
    }
    return out;
}

/// a x1 x2 phi(u) xbar2 xbar1 abar
inline Word ssharpup_word(const Word& u)
{
    Word out{pair_open, sym_open_1, sym_open_2};
    Word mid = phi_image(u);
    out.insert(out.end(), mid.begin(), mid.end());
    out.insert(out.end(), {sym_close_2, sym_close_1, pair_close});
    return out;
}

/// Automaton B over {a, abar, x1, x2, xbar1, xbar2, #} accepting exactly the
/// words a x1 x2 phi(u) xbar2 xbar1 abar for u accepted by the marking of a.
/// L(a) meets D2 iff L(B) meets the S#-up filter.
///
/// Every state s of the marking gets companions "s.a" (between a and x_k)
/// and "s.xbar1" / "s.xbar2" (between xbar_k and abar); the two '#' after a
/// closing pair run through "s.#2" and "s.#1" into s.
inline Nfa reduce_d2_to_ssharpup(const Nfa& a)
{
    MarkedNfa marked = mark_automaton(a);
    const Nfa& m = marked.nfa;
    Nfa b(s_sharp_up_alphabet());
    for (std::size_t q = 0; q < m.num_states(); ++q) b.add_state(m.state_name(q));
    const std::size_t n = m.num_states();
    std::vector<std::size_t> after_a(n), after_xbar1(n), after_xbar2(n), hash2(n), hash1(n);
    for (std::size_t q = 0; q < n; ++q) {
        const std::string& name = m.state_name(q);
        after_a[q] = b.add_state(name + ".a");
        after_xbar1[q] = b.add_state(name + ".xbar1");
        after_xbar2[q] = b.add_state(name + ".xbar2");
        hash2[q] = b.add_state(name + ".#2");
        hash1[q] = b.add_state(name + ".#1");
    }
    const std::size_t pre0 = b.add_state("<pre0>");
    const std::size_t pre1 = b.add_state("<pre1>");
    const std::size_t pre2 = b.add_state("<pre2>");
    const std::size_t suf1 = b.add_state("<suf1>");
    const std::size_t suf2 = b.add_state("<suf2>");
    const std::size_t fin = b.add_state("<fin>");
    b.set_initial(pre0);
    b.set_accepting(fin);
    b.add_transition(pre0, pair_open, pre1);
    b.add_transition(pre1, sym_open_1, pre2);
    b.add_transition(pre2, sym_open_2, m.initial());
    for (std::size_t q = 0; q < n; ++q) {
        if (m.is_accepting(q)) b.add_transition(q, sym_close_2, suf1);
        b.add_transition(q, pair_open, after_a[q]);
        b.add_transition(q, sym_close_1, after_xbar1[q]);
        b.add_transition(q, sym_close_2, after_xbar2[q]);
        b.add_transition(hash2[q], sharp, hash1[q]);
        b.add_transition(hash1[q], sharp, q);
    }
    b.add_transition(suf1, sym_close_1, suf2);
    b.add_transition(suf2, pair_close, fin);
    for (const auto& e : m.edges()) {
        if (e.label == Nfa::epsilon) {
            b.add_transition(e.from, Nfa::epsilon, e.to);
            continue;
        }
        const Symbol& s = m.alphabet()[static_cast<std::size_t>(e.label)];
        if (s == dyck_open(1)) b.add_transition(after_a[e.from], sym_open_1, e.to);
        else if (s == dyck_open(2)) b.add_transition(after_a[e.from], sym_open_2, e.to);
        else if (s == dyck_close(1)) b.add_transition(after_xbar1[e.from], pair_close, hash2[e.to]);
        else b.add_transition(after_xbar2[e.from], pair_close, hash2[e.to]);
    }
    return b;
}

} // namespace rr
