#pragma once

#include <charconv>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "cfg.hpp"
#include "common.hpp"
#include "counter.hpp"
#include "transducer.hpp"

namespace rr {

// Symbol spelling: Dyck brackets "a<k>"/"abar<k>", the symmetric alphabet
// "x1","x2","xbar1","xbar2", the one-pair alphabet "a","abar", and "#".

inline Symbol dyck_open(int k) { return "a" + std::to_string(k); }
inline Symbol dyck_close(int k) { return "abar" + std::to_string(k); }

inline const Symbol sym_open_1 = "x1";
inline const Symbol sym_open_2 = "x2";
inline const Symbol sym_close_1 = "xbar1";
inline const Symbol sym_close_2 = "xbar2";
inline const Symbol pair_open = "a";
inline const Symbol pair_close = "abar";
inline const Symbol sharp = "#";

inline std::vector<Symbol> dyck_alphabet(int n)
{
    std::vector<Symbol> out;
    for (int k = 1; k <= n; ++k) out.push_back(dyck_open(k));
    for (int k = 1; k <= n; ++k) out.push_back(dyck_close(k));
    return out;
}

inline std::vector<Symbol> sym_alphabet() { return {sym_open_1, sym_open_2, sym_close_1, sym_close_2}; }

inline std::vector<Symbol> sym_sharp_alphabet() { return {sym_open_1, sym_open_2, sym_close_1, sym_close_2, sharp}; }

inline std::vector<Symbol> s_sharp_up_alphabet()
{
    return {pair_open, pair_close, sym_open_1, sym_open_2, sym_close_1, sym_close_2, sharp};
}

namespace detail {

struct Bracket {
    bool open;
    int kind;
};

/// Parses "a<k>" / "abar<k>" with 1 <= k <= n.
inline std::optional<Bracket> parse_dyck_symbol(const Symbol& s, int n)
{
    std::string_view v = s;
    bool open = true;
    if (v.starts_with("abar")) {
        open = false;
        v.remove_prefix(4);
    } else if (v.starts_with("a")) {
        v.remove_prefix(1);
    } else {
        return std::nullopt;
    }
    if (v.empty() || v[0] == '0') return std::nullopt;
    int k = 0;
    auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), k);
    if (ec != std::errc() || ptr != v.data() + v.size() || k < 1 || k > n) return std::nullopt;
    return Bracket{open, k};
}

/// +k for x_k, -k for xbar_k, 0 for '#'.
inline int sym_code(const Symbol& s, bool allow_sharp)
{
    if (s == sym_open_1) return 1;
    if (s == sym_open_2) return 2;
    if (s == sym_close_1) return -1;
    if (s == sym_close_2) return -2;
    if (allow_sharp && s == sharp) return 0;
    throw InputError("symbol '" + s + "' is not in the filter alphabet");
}

inline bool sym_codes_member(const std::vector<int>& codes)
{
    const std::size_t n = codes.size();
    if (n % 2) return false;
    for (std::size_t i = 0; i < n / 2; ++i)
        if (codes[i] <= 0 || codes[n - 1 - i] != -codes[i]) return false;
    return true;
}

enum class PairCode { open, close, x, sharp };

inline std::vector<PairCode> classify_up(const Word& w)
{
    std::vector<PairCode> out;
    out.reserve(w.size());
    for (const auto& s : w) {
        if (s == pair_open) out.push_back(PairCode::open);
        else if (s == pair_close) out.push_back(PairCode::close);
        else if (s == sharp) out.push_back(PairCode::sharp);
        else {
            sym_code(s, false);
            out.push_back(PairCode::x);
        }
    }
    return out;
}

} // namespace detail

/// Stack check: brackets type-matched, never below zero, balanced at the end.
inline bool dyck_member(int n, const Word& w)
{
    std::vector<int> stack;
    bool ok = true;
    for (const auto& s : w) {
        auto b = detail::parse_dyck_symbol(s, n);
        if (!b) throw InputError("symbol '" + s + "' is not in the D" + std::to_string(n) + " alphabet");
        if (!ok) continue;
        if (b->open) {
            stack.push_back(b->kind);
        } else if (stack.empty() || stack.back() != b->kind) {
            ok = false;
        } else {
            stack.pop_back();
        }
    }
    return ok && stack.empty();
}

/// Words u . mirror(bar(u)) over {x1, x2}.
inline bool sym_member(const Word& w)
{
    std::vector<int> codes;
    for (const auto& s : w) codes.push_back(detail::sym_code(s, false));
    return detail::sym_codes_member(codes);
}

/// S with a (possibly empty) block of '#' in front of every letter; pure-'#' words are rejected.
inline bool s_sharp_member(const Word& w)
{
    std::vector<int> codes;
    for (const auto& s : w) codes.push_back(detail::sym_code(s, true));
    if (!codes.empty() && codes.back() == 0) return false;
    std::vector<int> letters;
    for (int c : codes)
        if (c != 0) letters.push_back(c);
    return detail::sym_codes_member(letters);
}

/// M = a S_# abar, plus the empty word.
inline bool m_member(const Word& w)
{
    if (w.empty()) return true;
    auto cls = detail::classify_up(w);
    if (w.size() < 2 || cls.front() != detail::PairCode::open || cls.back() != detail::PairCode::close) return false;
    Word inner(w.begin() + 1, w.end() - 1);
    for (auto c : std::vector<detail::PairCode>(cls.begin() + 1, cls.end() - 1))
        if (c == detail::PairCode::open || c == detail::PairCode::close) return false;
    return s_sharp_member(inner);
}

namespace detail {

/// Recursive decomposition of w[lo, hi) against the M^(inf) definition:
/// the outer a ... abar pair, top-level bracket groups as z-blocks, the rest
/// as y-blocks (interior ones nonempty), and a y1...yn abar in M.
inline bool m_inf_range(const Word& w, const std::vector<PairCode>& cls, std::size_t lo, std::size_t hi,
                        std::map<std::pair<std::size_t, std::size_t>, bool>& memo)
{
    if (lo == hi) return true;
    auto key = std::make_pair(lo, hi);
    if (auto it = memo.find(key); it != memo.end()) return it->second;
    bool result = false;
    if (hi - lo >= 2 && cls[lo] == PairCode::open && cls[hi - 1] == PairCode::close) {
        Word ys{pair_open};
        std::vector<std::pair<std::size_t, std::size_t>> blocks;
        std::vector<std::size_t> y_lengths{0};
        bool ok = true;
        std::size_t i = lo + 1;
        while (i < hi - 1 && ok) {
            if (cls[i] == PairCode::close) {
                ok = false;
            } else if (cls[i] == PairCode::open) {
                int depth = 0;
                std::size_t j = i;
                for (; j < hi - 1; ++j) {
                    if (cls[j] == PairCode::open) ++depth;
                    else if (cls[j] == PairCode::close && --depth == 0) break;
                }
                if (j >= hi - 1) {
                    ok = false;
                } else {
                    blocks.emplace_back(i, j + 1);
                    y_lengths.push_back(0);
                    i = j + 1;
                }
            } else {
                ys.push_back(w[i]);
                ++y_lengths.back();
                ++i;
            }
        }
        if (ok) {
            ys.push_back(pair_close);
            for (std::size_t k = 1; k + 1 < y_lengths.size(); ++k)
                if (y_lengths[k] == 0) ok = false;
            if (ok && m_member(ys)) {
                result = true;
                for (const auto& [b, e] : blocks)
                    if (!m_inf_range(w, cls, b, e, memo)) {
                        result = false;
                        break;
                    }
            }
        }
    }
    memo.emplace(key, result);
    return result;
}

} // namespace detail

inline bool m_inf_member(const Word& w)
{
    auto cls = detail::classify_up(w);
    std::map<std::pair<std::size_t, std::size_t>, bool> memo;
    return detail::m_inf_range(w, cls, 0, w.size(), memo);
}

/// Erasing X and '#' leaves a word over {a, abar} outside D1.
inline bool m_plus_member(const Word& w)
{
    auto cls = detail::classify_up(w);
    long height = 0;
    for (auto c : cls) {
        if (c == detail::PairCode::open) ++height;
        else if (c == detail::PairCode::close && --height < 0) return true;
    }
    return height != 0;
}

inline bool s_sharp_up_member(const Word& w) { return m_inf_member(w) || m_plus_member(w); }

/// S -> S S | eps | a1 S abar1 | ... | an S abarn
inline Cfg dyck_grammar(int n)
{
    if (n < 1) throw ContractError("Dyck order must be positive");
    Cfg g;
    g.add_nonterminal("S");
    for (const auto& s : dyck_alphabet(n)) g.add_terminal(s);
    g.add_rule("S", {"S", "S"});
    g.add_rule("S", {});
    for (int k = 1; k <= n; ++k) g.add_rule("S", {dyck_open(k), "S", dyck_close(k)});
    return g;
}

/// S -> x1 S xbar1 | x2 S xbar2 | eps
inline Cfg sym_grammar()
{
    Cfg g;
    g.add_nonterminal("S");
    for (const auto& s : sym_alphabet()) g.add_terminal(s);
    g.add_rule("S", {sym_open_1, "S", sym_close_1});
    g.add_rule("S", {sym_open_2, "S", sym_close_2});
    g.add_rule("S", {});
    return g;
}

/// S with H = #* in front of every letter.
inline Cfg sym_sharp_grammar()
{
    Cfg g;
    g.add_nonterminal("S");
    g.add_nonterminal("H");
    for (const auto& s : sym_sharp_alphabet()) g.add_terminal(s);
    g.add_rule("S", {"H", sym_open_1, "S", "H", sym_close_1});
    g.add_rule("S", {"H", sym_open_2, "S", "H", sym_close_2});
    g.add_rule("S", {});
    g.add_rule("H", {sharp, "H"});
    g.add_rule("H", {});
    return g;
}

/// S -> s S | eps for every symbol s: all words over the alphabet.
inline Cfg all_words_grammar(const std::vector<Symbol>& alphabet)
{
    Cfg g;
    g.add_nonterminal("S");
    for (const auto& s : alphabet) g.add_terminal(s);
    for (const auto& s : alphabet) g.add_rule("S", {s, "S"});
    g.add_rule("S", {});
    return g;
}

/// Letter morphism a_k -> a1 a2^k, abar_k -> abar2^k abar1 from D_n into D_2.
inline Transducer dyck_encoder(int n)
{
    if (n < 1) throw ContractError("Dyck order must be positive");
    std::map<Symbol, Word> image;
    for (int k = 1; k <= n; ++k) {
        Word open{dyck_open(1)}, close;
        for (int i = 0; i < k; ++i) {
            open.push_back(dyck_open(2));
            close.push_back(dyck_close(2));
        }
        close.push_back(dyck_close(1));
        image[dyck_open(k)] = open;
        image[dyck_close(k)] = close;
    }
    return morphism_transducer(dyck_alphabet(n), dyck_alphabet(2), image);
}

/// Counter recognizer of D1 over {a1, abar1}.
///
/// final_state_and_zero: one accepting state, a1 increments, abar1 decrements.
/// final_state: the same loop plus a zero-guarded epsilon move into a sink
/// accepting state with no outgoing moves.
inline CounterAutomaton dyck1_counter_automaton(AcceptMode mode = AcceptMode::final_state)
{
    CounterAutomaton m(dyck_alphabet(1), mode);
    std::size_t loop = m.add_state("loop");
    m.set_initial(loop);
    m.add_transition(loop, dyck_open(1), Guard::any, +1, loop);
    m.add_transition(loop, dyck_close(1), Guard::positive, -1, loop);
    if (mode == AcceptMode::final_state_and_zero) {
        m.set_accepting(loop);
    } else {
        std::size_t done = m.add_state("done");
        m.add_transition(loop, CounterAutomaton::epsilon, Guard::zero, 0, done);
        m.set_accepting(done);
    }
    return m;
}

/// A filter language: membership oracle plus, where available, a grammar or counter machine.
class FilterSpec {
public:
    enum class Kind { dyck, symmetric, symmetric_sharp, s_sharp_up, user_grammar, counter };

    static FilterSpec dyck(int n)
    {
        if (n < 1) throw InputError("Dyck order must be positive");
        FilterSpec f(Kind::dyck, n == 1 ? "dyck1" : n == 2 ? "dyck2" : "dyckN:" + std::to_string(n), dyck_alphabet(n));
        f.n_ = n;
        f.set_grammar(dyck_grammar(n));
        return f;
    }

    static FilterSpec symmetric()
    {
        FilterSpec f(Kind::symmetric, "sym", sym_alphabet());
        f.set_grammar(sym_grammar());
        return f;
    }

    static FilterSpec symmetric_sharp()
    {
        FilterSpec f(Kind::symmetric_sharp, "symsharp", sym_sharp_alphabet());
        f.set_grammar(sym_sharp_grammar());
        return f;
    }

    static FilterSpec s_sharp_up() { return FilterSpec(Kind::s_sharp_up, "ssharpup", s_sharp_up_alphabet()); }

    static FilterSpec user_grammar(Cfg g, std::string name = "grammar")
    {
        FilterSpec f(Kind::user_grammar, std::move(name), g.terminal_names());
        f.set_grammar(std::move(g));
        return f;
    }

    static FilterSpec counter(CounterAutomaton m, std::string name = "counter")
    {
        FilterSpec f(Kind::counter, std::move(name), m.alphabet());
        f.counter_ = std::make_shared<const CounterAutomaton>(std::move(m));
        return f;
    }

    /// Built-in filters by CLI name: dyck1, dyck2, dyckN:k, sym, symsharp, ssharpup.
    static FilterSpec from_name(const std::string& name)
    {
        if (name == "dyck1") return dyck(1);
        if (name == "dyck2") return dyck(2);
        if (name.starts_with("dyckN:")) {
            int k = 0;
            std::string_view v(name);
            v.remove_prefix(6);
            auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), k);
            if (ec != std::errc() || ptr != v.data() + v.size() || k < 1) throw InputError("bad Dyck order in '" + name + "'");
            return dyck(k);
        }
        if (name == "sym") return symmetric();
        if (name == "symsharp") return symmetric_sharp();
        if (name == "ssharpup") return s_sharp_up();
        throw InputError("unknown filter '" + name + "'");
    }

    Kind kind() const { return kind_; }
    const std::string& name() const { return name_; }
    int dyck_order() const { return n_; }
    const std::vector<Symbol>& alphabet() const { return alphabet_; }

    /// The generating grammar, if this kind has one.
    const Cfg* grammar() const { return grammar_.get(); }
    const Cfg* cnf() const { return cnf_.get(); }
    const CounterAutomaton* counter_automaton() const { return counter_.get(); }

    /// Identity of the underlying language, used to share memoized decisions.
    std::string key() const
    {
        if (kind_ == Kind::user_grammar) return name_ + "@" + std::to_string(reinterpret_cast<std::uintptr_t>(grammar_.get()));
        if (kind_ == Kind::counter) return name_ + "@" + std::to_string(reinterpret_cast<std::uintptr_t>(counter_.get()));
        return name_;
    }

    bool contains(const Word& w) const
    {
        switch (kind_) {
        case Kind::dyck: return dyck_member(n_, w);
        case Kind::symmetric: return sym_member(w);
        case Kind::symmetric_sharp: return s_sharp_member(w);
        case Kind::s_sharp_up: return s_sharp_up_member(w);
        case Kind::user_grammar:
            for (const auto& s : w)
                if (!grammar_->find(s) || !grammar_->is_terminal(grammar_->id(s)))
                    throw InputError("symbol '" + s + "' is not in the filter alphabet");
            return cyk_member(*cnf_, w);
        case Kind::counter: return counter_accepts(*counter_, w);
        }
        return false;
    }

private:
    FilterSpec(Kind kind, std::string name, std::vector<Symbol> alphabet)
        : kind_(kind), name_(std::move(name)), alphabet_(std::move(alphabet))
    {
    }

    void set_grammar(Cfg g)
    {
        cnf_ = std::make_shared<const Cfg>(cnf_convert(g));
        grammar_ = std::make_shared<const Cfg>(std::move(g));
    }

    Kind kind_;
    std::string name_;
    std::vector<Symbol> alphabet_;
    int n_ = 0;
    std::shared_ptr<const Cfg> grammar_;
    std::shared_ptr<const Cfg> cnf_;
    std::shared_ptr<const CounterAutomaton> counter_;
};

} // namespace rr
