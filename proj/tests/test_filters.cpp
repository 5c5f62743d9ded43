#include <gtest/gtest.h>

#include "support.hpp"

using namespace rr;

namespace {

Word split(const std::string& s) { return split_word(s); }

Word project_a(const Word& w)
{
    Word out;
    for (const auto& s : w)
        if (s == "a" || s == "abar") out.push_back(s);
    return out;
}

} // namespace

TEST(DyckMember, Examples)
{
    EXPECT_TRUE(dyck_member(2, split("a1 a2 abar2 abar1")));
    EXPECT_FALSE(dyck_member(2, split("a1 a2 abar1 abar2")));
    EXPECT_TRUE(dyck_member(1, {}));
    EXPECT_THROW(dyck_member(1, split("a2")), InputError);
}

TEST(DyckMember, AgreesWithGrammarAndCancellation)
{
    for (int n = 1; n <= 2; ++n) {
        Cfg c = cnf_convert(dyck_grammar(n));
        auto pairs = oracle::dyck_pairs(n);
        for (const auto& w : oracle::all_words(dyck_alphabet(n), n == 1 ? 10 : 8)) {
            bool expected = oracle::dyck_by_cancellation(w, pairs);
            ASSERT_EQ(dyck_member(n, w), expected);
            ASSERT_EQ(cyk_member(c, w), expected);
        }
    }
}

TEST(SymMember, Examples)
{
    EXPECT_TRUE(sym_member(split("x1 x2 xbar2 xbar1")));
    EXPECT_FALSE(sym_member(split("x1 xbar2")));
    EXPECT_TRUE(s_sharp_member(split("x1 # xbar1")));
    EXPECT_TRUE(s_sharp_member({}));
    EXPECT_FALSE(s_sharp_member(split("#")));
    EXPECT_FALSE(s_sharp_member(split("x1 xbar1 #")));
    EXPECT_THROW(sym_member(split("#")), InputError);
}

TEST(SymMember, AgreesWithGrammars)
{
    Cfg s = cnf_convert(sym_grammar());
    for (const auto& w : oracle::all_words(sym_alphabet(), 6)) {
        ASSERT_EQ(sym_member(w), oracle::symmetric(w));
        ASSERT_EQ(cyk_member(s, w), oracle::symmetric(w));
    }
    for (const auto& w : oracle::all_words(sym_sharp_alphabet(), 5)) {
        Word stripped;
        for (const auto& x : w)
            if (x != "#") stripped.push_back(x);
        bool expected = oracle::symmetric(stripped) && (w.empty() || w.back() != "#");
        ASSERT_EQ(s_sharp_member(w), expected) << join_word(w);
        ASSERT_EQ(oracle::earley(sym_sharp_grammar(), w), expected) << join_word(w);
    }
}

TEST(MInfMember, Examples)
{
    EXPECT_TRUE(m_inf_member({}));
    EXPECT_TRUE(m_inf_member(split("a abar")));
    EXPECT_TRUE(m_inf_member(split("a x1 a abar xbar1 abar")));
    EXPECT_FALSE(m_inf_member(split("a x1 xbar2 abar")));
    EXPECT_THROW(m_inf_member(split("a1")), InputError);
}

TEST(MInfMember, ProjectionIsBalanced)
{
    for (const auto& w : oracle::all_words(s_sharp_up_alphabet(), 6)) {
        if (!m_inf_member(w)) continue;
        Word p = project_a(w);
        ASSERT_TRUE(oracle::dyck_by_cancellation(p, {{"a", "abar"}})) << join_word(w);
    }
}

TEST(MPlusMember, Examples)
{
    EXPECT_TRUE(m_plus_member(split("a x1 abar abar")));
    EXPECT_FALSE(m_plus_member(split("a x1 abar")));
    EXPECT_FALSE(m_plus_member({}));
}

TEST(SSharpUpMember, Examples)
{
    EXPECT_TRUE(s_sharp_up_member({}));
    EXPECT_TRUE(s_sharp_up_member(split("abar")));
    EXPECT_FALSE(s_sharp_up_member(split("a x1 xbar2 abar")));
}

TEST(SSharpUpMember, WordsWithoutPairLetters)
{
    // with no a/abar the projection is empty, so only the empty word qualifies
    for (const auto& w : oracle::all_words(sym_sharp_alphabet(), 5)) ASSERT_EQ(s_sharp_up_member(w), w.empty()) << join_word(w);
}

TEST(SSharpUpMember, IsTheUnion)
{
    for (const auto& w : oracle::all_words(s_sharp_up_alphabet(), 5)) {
        bool balanced = oracle::dyck_by_cancellation(project_a(w), {{"a", "abar"}});
        ASSERT_EQ(m_plus_member(w), !balanced);
        ASSERT_EQ(s_sharp_up_member(w), m_inf_member(w) || !balanced);
    }
}

TEST(DyckEncoder, Examples)
{
    Transducer h = dyck_encoder(2);
    EXPECT_EQ(transduce_bounded(dyck_encoder(1), split("a1 abar1"), 10), (std::set<Word>{split("a1 a2 abar2 abar1")}));
    auto image = transduce_bounded(h, split("a1 abar2"), 10);
    ASSERT_EQ(image.size(), 1u);
    EXPECT_EQ(*image.begin(), split("a1 a2 abar2 abar2 abar1"));
    EXPECT_FALSE(dyck_member(2, *image.begin()));
    EXPECT_EQ(transduce_bounded(h, {}, 10), (std::set<Word>{{}}));
}

TEST(DyckEncoder, Faithful)
{
    for (int n = 1; n <= 3; ++n) {
        Transducer h = dyck_encoder(n);
        for (const auto& u : oracle::all_words(dyck_alphabet(n), n == 3 ? 6 : 8)) {
            auto image = transduce_bounded(h, u, 8 * (n + 1));
            ASSERT_EQ(image.size(), 1u);
            ASSERT_EQ(dyck_member(2, *image.begin()), oracle::dyck_by_cancellation(u, oracle::dyck_pairs(n)));
        }
    }
}

TEST(FilterSpec, Registry)
{
    EXPECT_EQ(FilterSpec::from_name("dyck1").alphabet(), dyck_alphabet(1));
    EXPECT_EQ(FilterSpec::from_name("dyckN:3").alphabet(), dyck_alphabet(3));
    EXPECT_EQ(FilterSpec::from_name("sym").alphabet(), sym_alphabet());
    EXPECT_EQ(FilterSpec::from_name("ssharpup").alphabet(), s_sharp_up_alphabet());
    EXPECT_THROW(FilterSpec::from_name("dyckN:0"), InputError);
    EXPECT_THROW(FilterSpec::from_name("nope"), InputError);
    EXPECT_TRUE(FilterSpec::from_name("symsharp").contains(split("x1 # xbar1")));
}
