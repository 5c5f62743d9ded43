#include <gtest/gtest.h>

#include "support.hpp"

using namespace rr;

namespace {

Word split(const std::string& s) { return split_word(s); }

Nfa d2_word(const std::string& w) { return nfa_single_word(dyck_alphabet(2), split(w)); }

Nfa d2_loop()
{
    Nfa a = nfa_universal(dyck_alphabet(2));
    a.set_accepting(0);
    return a;
}

bool heights_ok(const Word& w)
{
    long h = 0;
    for (const auto& s : w) {
        h += s.starts_with("abar") ? -1 : 1;
        if (h < 0) return false;
    }
    return h == 0;
}

} // namespace

TEST(BarHillel, EmptyWordThroughLoop)
{
    Cfg out = bar_hillel(cnf_convert(dyck_grammar(2)), d2_loop());
    EXPECT_TRUE(grammar_nonempty(out));
    EXPECT_EQ(grammar_shortest_word(out), Word{});
}

TEST(BarHillel, NonterminalCount)
{
    Cfg g = cnf_convert(dyck_grammar(1));
    std::mt19937_64 rng(41);
    for (std::size_t q = 1; q <= 4; ++q) {
        Nfa a = oracle::random_nfa(rng, dyck_alphabet(1), q, 0.3);
        EXPECT_EQ(bar_hillel(g, a).nonterminals().size(), g.nonterminals().size() * q * q + 1);
        EXPECT_EQ(bar_hillel_nonterminal_count(g, a), g.nonterminals().size() * q * q + 1);
    }
}

TEST(BarHillel, CloseBeforeOpenIsEmpty)
{
    Cfg out = bar_hillel(cnf_convert(dyck_grammar(1)), nfa_single_word(dyck_alphabet(1), split("abar1 a1")));
    EXPECT_FALSE(grammar_nonempty(out));
}

TEST(BarHillel, BoundedLanguageEquality)
{
    std::mt19937_64 rng(42);
    const std::vector<Symbol> sigma{"a", "b"};
    for (int round = 0; round < 30; ++round) {
        Cfg g = oracle::random_cnf(rng, sigma, 1 + round % 4);
        Nfa a = oracle::random_nfa(rng, sigma, 1 + round % 3, 0.35, round % 2 ? 0.25 : 0.0);
        Cfg out = bar_hillel(g, a);
        for (const auto& w : oracle::all_words(sigma, 6))
            ASSERT_EQ(oracle::earley(out, w), oracle::earley(g, w) && oracle::path_accepts(a, w)) << round << " " << join_word(w);
    }
}

TEST(CsTransducer, SingleLetter)
{
    Transducer t = cs_transducer(grammar_from_text("S -> a\n"));
    EXPECT_EQ(t.input_alphabet(), dyck_alphabet(2));
    bool found = false;
    for (const auto& d : oracle::all_words(dyck_alphabet(2), 8)) {
        if (!oracle::d2(d)) continue;
        for (const auto& out : transduce_bounded(t, d, 10)) {
            EXPECT_EQ(out, Word{"a"});
            found = true;
        }
    }
    EXPECT_TRUE(found);
}

TEST(CsTransducer, EmptyWord)
{
    Transducer t = cs_transducer(grammar_from_text("S ->\n"));
    EXPECT_TRUE(transduce_bounded(t, {}, 4).contains(Word{}));
}

TEST(CsTransducer, DyckOnePreimages)
{
    Cfg g = dyck_grammar(1);
    Transducer t = cs_transducer(g);
    auto d2 = FilterSpec::dyck(2);
    for (const auto& w : oracle::all_words(dyck_alphabet(1), 4)) {
        if (!oracle::d1(w)) continue;
        Nfa domain = compose_ta(t, nfa_single_word(dyck_alphabet(1), w));
        auto r = nrr_decide(domain, d2);
        ASSERT_TRUE(r.nonempty) << join_word(w);
        EXPECT_TRUE(oracle::d2(*r.witness));
        EXPECT_TRUE(transduce_bounded(t, *r.witness, w.size()).contains(w));
    }
}

TEST(HeightBound, FixedConstantAndMonotone)
{
    const std::size_t k = cnf_convert(dyck_grammar(2)).nonterminals().size();
    ASSERT_EQ(k, 10u);
    Nfa one = d2_loop();
    EXPECT_EQ(height_bound(one), 12u);
    std::size_t prev = height_bound(one);
    for (std::size_t q = 2; q <= 5; ++q) {
        Nfa a(dyck_alphabet(2));
        for (std::size_t i = 0; i < q; ++i) a.add_state("p" + std::to_string(i));
        a.set_initial(0);
        EXPECT_EQ(height_bound(a), k * q * q + 2);
        EXPECT_GT(height_bound(a), prev);
        prev = height_bound(a);
    }
}

TEST(MarkAutomaton, Examples)
{
    MarkedNfa m = mark_automaton(d2_word("a1 abar1"));
    EXPECT_TRUE(nfa_accepts(m.nfa, split("a1 abar1")));
    EXPECT_FALSE(nfa_shortest_witness(mark_automaton(d2_word("abar1 a1")).nfa).has_value());

    Nfa star(dyck_alphabet(2));
    star.add_state("p");
    star.add_state("f");
    star.set_initial(0);
    star.set_accepting(1);
    star.add_transition(0, "a1", 0);
    star.add_transition(0, "abar1", 1);
    MarkedNfa ms = mark_automaton(star);
    EXPECT_EQ(oracle::accepted_words(ms.nfa, 6), (std::vector<Word>{split("a1 abar1")}));
}

TEST(MarkAutomaton, ShapeAndHeights)
{
    Nfa a = d2_word("a1 a2 abar2 abar1");
    MarkedNfa m = mark_automaton(a);
    const std::size_t bound = height_bound(a);
    EXPECT_EQ(m.nfa.num_states(), a.num_states() * (bound + 1) + 1);
    EXPECT_FALSE(m.nfa.is_accepting(m.reject_state));
    for (const auto& e : m.nfa.edges()) {
        if (e.from == m.reject_state) {
            EXPECT_EQ(e.to, m.reject_state);
            continue;
        }
        if (e.to == m.reject_state) continue;
        const auto& s = m.nfa.alphabet()[static_cast<std::size_t>(e.label)];
        EXPECT_EQ(m.height[e.to] - m.height[e.from], s.starts_with("abar") ? -1 : 1);
    }
    EXPECT_EQ(m.height[m.nfa.initial()], 0);
    for (std::size_t q : m.nfa.accepting_states()) EXPECT_EQ(m.height[q], 0);
}

TEST(MarkAutomaton, ForeignSymbol)
{
    EXPECT_THROW(mark_automaton(Nfa({"a1", "a2", "abar1", "x"})), InputError);
}

TEST(MarkAutomaton, PreservesDyckEmptiness)
{
    std::mt19937_64 rng(43);
    auto d2 = FilterSpec::dyck(2);
    Cfg cnf = cnf_convert(dyck_grammar(2));
    for (int round = 0; round < 25; ++round) {
        Nfa a = oracle::random_nfa(rng, dyck_alphabet(2), 1 + round % 3, 0.2, round % 4 == 0 ? 0.2 : 0.0);
        MarkedNfa m = mark_automaton(a);
        ASSERT_EQ(grammar_nonempty(bar_hillel(cnf, a)), nrr_decide(m.nfa, d2).nonempty) << round;
        for (const auto& w : oracle::accepted_words(m.nfa, 8)) ASSERT_TRUE(heights_ok(w)) << join_word(w);
    }
}

TEST(PhiReduction, SingleWordExample)
{
    Nfa b = reduce_d2_to_ssharpup(d2_word("a1 abar1"));
    Word expected = split("a x1 x2 a x1 xbar1 abar # # xbar2 xbar1 abar");
    EXPECT_EQ(oracle::accepted_words(b, 20), std::vector<Word>{expected});
    EXPECT_TRUE(m_inf_member(expected));
    EXPECT_EQ(ssharpup_word(split("a1 abar1")), expected);
}

TEST(PhiReduction, EmptyStaysEmpty)
{
    Nfa a(dyck_alphabet(2));
    a.add_state("q");
    a.set_initial(0);
    a.add_transition(0, "a1", 0);
    EXPECT_FALSE(nfa_shortest_witness(reduce_d2_to_ssharpup(a)).has_value());
}

TEST(PhiReduction, MismatchedPairHasNoFilterWord)
{
    Nfa b = reduce_d2_to_ssharpup(d2_word("a1 abar2"));
    std::size_t seen = 0;
    oracle::for_each_accepted(b, 20, [&](const Word& w) {
        ++seen;
        EXPECT_FALSE(s_sharp_up_member(w)) << join_word(w);
    });
    EXPECT_EQ(seen, 1u);
}

TEST(PhiReduction, ImageOfDyckWordsIsInMInf)
{
    for (const auto& u : oracle::all_words(dyck_alphabet(2), 6)) {
        if (!oracle::d2(u)) continue;
        ASSERT_TRUE(m_inf_member(ssharpup_word(u))) << join_word(u);
    }
}
