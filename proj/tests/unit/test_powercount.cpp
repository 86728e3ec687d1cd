#include <hermlab/io.hpp>
#include <hermlab/powercount.hpp>

#include <gtest/gtest.h>

#include <algorithm>
#include <numeric>
#include <random>

using namespace hermlab;

namespace {

Rational R(long p, long q = 1) { return Rational(p) / Rational(q); }

AffineFunctional lin(std::vector<long> c)
{
    AffineFunctional f;
    for (long v : c) f.coeffs.push_back(Rational(v));
    return f;
}

// y1-y2, y2-y3, y3-y4, y4-y1
FunctionalSystem cycle(const Rational& alpha, const Rational& beta)
{
    FunctionalSystem s;
    s.m = 4;
    s.T = {lin({1, -1, 0, 0}), lin({0, 1, -1, 0}), lin({0, 0, 1, -1}), lin({-1, 0, 0, 1})};
    s.alphas.assign(4, alpha);
    s.betas.assign(4, beta);
    return s;
}

std::string data(const char* name) { return std::string(HERMLAB_DATA_DIR) + "/powercount/" + name; }

} // namespace

TEST(Powercount, ClosureAndRank)
{
    const auto s = cycle(R(-2, 5), R(-4, 5));
    EXPECT_EQ(rank(s, full_set(s)), 3u);
    EXPECT_EQ(span_closure(s, 0b0011), 0b0011u);
    EXPECT_EQ(span_closure(s, 0b0111), 0b1111u);
    EXPECT_EQ(span_closure(s, 0), 0u);
    for (Subset w = 0; w < 16; ++w) {
        const Subset c = span_closure(s, w);
        EXPECT_EQ(c & w, w);
        EXPECT_EQ(span_closure(s, c), c);
        for (Subset v = 0; v < 16; ++v)
            if ((w & v) == w) EXPECT_EQ(c & span_closure(s, v), c);
    }
    EXPECT_EQ(enumerate_flats(s).size(), 1u + 4u + 6u + 1u);
}

TEST(Powercount, Padded)
{
    const auto s = cycle(R(-2, 5), R(-4, 5));
    EXPECT_TRUE(is_padded(s, 0));
    EXPECT_TRUE(is_padded(s, 0b1111));
    EXPECT_FALSE(is_padded(s, 0b0011));
    EXPECT_FALSE(is_padded(s, 0b0111));  // not closed
}

TEST(Powercount, DegreeExamples)
{
    const auto s = cycle(R(-2, 5), R(-4, 5));
    EXPECT_EQ(d0(s, 0b1111), R(7, 5));
    EXPECT_EQ(d0(s, 0b0001), R(3, 5));
    EXPECT_EQ(d_infinity(s, 0), R(-1, 5));
    EXPECT_EQ(d_infinity(s, 0b0011), R(-3, 5));
    EXPECT_THROW(d0(s, 0b0111), DomainError);
    EXPECT_THROW(d_infinity(s, 0b0111), DomainError);

    FunctionalSystem one;
    one.m = 1;
    one.T = {lin({1})};
    one.alphas = {R(-1, 2)};
    one.betas = {R(-2)};
    EXPECT_EQ(d0(one, 1), R(1, 2));
    EXPECT_EQ(d_infinity(one, 0), R(-1));
    const auto r = check_integrability(one);
    EXPECT_TRUE(r.finite_at_zero());
    EXPECT_TRUE(r.finite_at_infinity());
}

TEST(Powercount, CycleThresholds)
{
    auto bad = check_integrability(cycle(R(1, 5) - 1, R(-4, 5)));
    EXPECT_EQ(bad.at_zero, Verdict::not_established);
    EXPECT_EQ(*bad.witness_zero, 0b1111u);
    EXPECT_EQ(bad.d0_T, R(-1, 5));
    auto good = check_integrability(cycle(R(-2, 5), R(-4, 5)));
    EXPECT_TRUE(good.finite_at_zero());
    EXPECT_TRUE(good.finite_at_infinity());
    EXPECT_TRUE(good.zero_padded_only);
    EXPECT_TRUE(good.infinity_padded_only);
    auto edge = check_integrability(cycle(R(-2, 5), R(-3, 4)));
    EXPECT_EQ(edge.at_infinity, Verdict::not_established);
    EXPECT_EQ(*edge.witness_infinity, 0u);
}

TEST(Powercount, ShiftedSystemMatchesUnshifted)
{
    for (auto H : {R(3, 5), R(1, 5), R(1, 4), R(9, 10)}) {
        const SymbolValues env{H, R(7, 10)};
        const auto a = check_integrability(load_system(data("ou_shifted.json"), env));
        const auto b = check_integrability(load_system(data("cycle.json"), env));
        EXPECT_EQ(a.d0_T, 4 * H - 1);
        EXPECT_EQ(a.at_zero, b.at_zero);
        EXPECT_EQ(a.at_infinity, b.at_infinity);
        EXPECT_EQ(a.finite_at_zero(), 4 * H - 1 > 0);
    }
}

TEST(Powercount, MinusOneIsInconclusive)
{
    auto s = cycle(R(-2, 5), R(-4, 5));
    s.alphas[2] = -1;
    const auto r = check_integrability(s);
    EXPECT_EQ(r.at_zero, Verdict::inconclusive);
    EXPECT_FALSE(r.finite_at_zero());
    EXPECT_STREQ(to_string(r.at_zero), "inconclusive");
}

TEST(Powercount, SizeCap)
{
    FunctionalSystem s;
    s.m = 1;
    for (int i = 0; i < 21; ++i) {
        s.T.push_back(lin({i + 1}));
        s.alphas.push_back(R(-1, 2));
        s.betas.push_back(R(-2));
    }
    EXPECT_THROW(check_integrability(s), ResourceError);
    s.T.pop_back();
    s.alphas.pop_back();
    s.betas.pop_back();
    EXPECT_NO_THROW(check_integrability(s));
}

TEST(Powercount, DiagonalSystems)
{
    // coordinate functionals: finite iff every alpha > -1 and every beta < -1
    std::mt19937_64 rng(7);
    std::uniform_int_distribution<int> m_dist(1, 5), q_dist(-12, 3);
    for (int trial = 0; trial < 50; ++trial) {
        FunctionalSystem s;
        s.m = static_cast<std::size_t>(m_dist(rng));
        bool z = true, inf = true;
        for (std::size_t i = 0; i < s.m; ++i) {
            std::vector<long> c(s.m, 0);
            c[i] = 1;
            s.T.push_back(lin(c));
            int a = q_dist(rng);
            if (a == -4) a = -5;
            s.alphas.push_back(R(a, 4));
            s.betas.push_back(R(q_dist(rng), 4));
            z = z && s.alphas.back() > -1;
            inf = inf && s.betas.back() < -1;
        }
        const auto r = check_integrability(s);
        EXPECT_EQ(r.finite_at_zero(), z) << trial;
        EXPECT_EQ(r.finite_at_infinity(), inf) << trial;
    }
}

TEST(Powercount, PermutationInvariant)
{
    auto s = cycle(R(-2, 5), R(-4, 5));
    s.alphas = {R(-1, 5), R(-2, 5), R(-7, 10), R(-1, 2)};
    s.betas = {R(-4, 5), R(-9, 10), R(-1), R(-1, 2)};
    const auto base = check_integrability(s);
    std::vector<std::size_t> p{0, 1, 2, 3};
    while (std::next_permutation(p.begin(), p.end())) {
        FunctionalSystem t;
        t.m = s.m;
        for (auto i : p) {
            t.T.push_back(s.T[i]);
            t.alphas.push_back(s.alphas[i]);
            t.betas.push_back(s.betas[i]);
        }
        const auto r = check_integrability(t);
        EXPECT_EQ(r.at_zero, base.at_zero);
        EXPECT_EQ(r.at_infinity, base.at_infinity);
        EXPECT_EQ(r.d0_T, base.d0_T);
    }
}

TEST(Powercount, Parser)
{
    EXPECT_EQ(parse_rational("0.6"), R(3, 5));
    EXPECT_EQ(parse_rational("-2/5"), R(-2, 5));
    EXPECT_EQ(parse_rational(" 3 "), R(3));
    EXPECT_THROW(parse_rational("H"), DomainError);
    EXPECT_THROW(parse_rational("1/0"), DomainError);
    EXPECT_THROW(parse_rational(""), DomainError);
    EXPECT_THROW(parse_rational("1/"), DomainError);
    const SymbolValues env{R(3, 5), R(4, 5)};
    EXPECT_EQ(eval_exponent("2H-2", env), R(-4, 5));
    EXPECT_EQ(eval_exponent("-(1-H)", env), R(-2, 5));
    EXPECT_EQ(eval_exponent("-gamma", env), R(-4, 5));
    EXPECT_EQ(eval_exponent("2*(H-1)/3", env), R(-4, 15));
    EXPECT_THROW(eval_exponent("H*H", env), DomainError);
    EXPECT_THROW(eval_exponent("H-1", SymbolValues{}), DomainError);
    EXPECT_EQ(to_string(R(-2, 5)), "-2/5");
    EXPECT_EQ(to_string(R(3)), "3");
}

TEST(Powercount, JsonRoundTrip)
{
    const auto s = load_system(data("cycle_numeric.json"));
    const auto j = to_json(s, check_integrability(s));
    EXPECT_TRUE(j.at("finite_at_zero").get<bool>());
    EXPECT_EQ(j.at("d0_T").get<std::string>(), "7/5");
    EXPECT_EQ(j.at("d_infinity_empty").get<std::string>(), "-1/5");
    EXPECT_EQ(j.at("rank_T").get<int>(), 3);
    EXPECT_TRUE(j.at("witness_zero").is_null());
    EXPECT_THROW(load_system(data("cycle.json")), DomainError);
    EXPECT_THROW(load_system(data("missing.json")), DomainError);
    EXPECT_THROW(parse_system(json::parse(R"({"m": 1, "functionals": []})")), DomainError);
    EXPECT_THROW(parse_system(json::parse(R"({"m": 1, "functionals": [{"coeffs": ["0"]}], "alphas": ["0"], "betas": ["0"]})")),
                 DomainError);
}
