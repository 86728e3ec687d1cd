#include <hermlab/core.hpp>
#include <hermlab/rng.hpp>

#include <gtest/gtest.h>

#include <cmath>
#include <set>

using namespace hermlab;

namespace {

RandomField field_from(const GridSpec& g, std::vector<double> v)
{
    RandomField f;
    f.grid = g;
    f.values = std::move(v);
    return f;
}

} // namespace

TEST(Core, HurstMultiIndexRejectsOutOfRange)
{
    EXPECT_THROW(HurstMultiIndex({0.5}), DomainError);
    EXPECT_THROW(HurstMultiIndex({1.0}), DomainError);
    EXPECT_THROW(HurstMultiIndex(std::vector<double>{}), DomainError);
    EXPECT_NO_THROW(HurstMultiIndex({0.51, 0.99}));
}

TEST(Core, GridSpecValidation)
{
    EXPECT_THROW(GridSpec({0.0}, {0.0}, {4}), DomainError);
    EXPECT_THROW(GridSpec({0.0}, {1.0}, {0}), DomainError);
    const GridSpec g = GridSpec::cube(2, 1.0, 4);
    EXPECT_EQ(g.node_count(), 25u);
    EXPECT_DOUBLE_EQ(g.mesh(1), 0.25);
}

TEST(Core, RectangleIncrementOneParameter)
{
    const GridSpec g = GridSpec::cube(1, 1.0, 4);
    const auto f = field_from(g, {0.0, 1.0, 3.0, 6.0, 10.0});
    const std::size_t lo[] = {1}, hi[] = {3};
    EXPECT_DOUBLE_EQ(rectangle_increment(f, lo, hi), 5.0);
}

TEST(Core, RectangleIncrementTwoParameter)
{
    const GridSpec g = GridSpec::cube(2, 1.0, 2);
    std::vector<double> v(9);
    for (std::size_t i = 0; i < 9; ++i) v[i] = static_cast<double>(i * i);
    const auto f = field_from(g, v);
    const std::size_t lo[] = {0, 1}, hi[] = {2, 2};
    // X(t1,t2) - X(t1,s2) - X(s1,t2) + X(s1,s2)
    const double expect = v[8] - v[7] - v[2] + v[1];
    EXPECT_DOUBLE_EQ(rectangle_increment(f, lo, hi), expect);
}

TEST(Core, RectangleIncrementConstantFieldIsZero)
{
    const GridSpec g = GridSpec::cube(3, 1.0, 3);
    const auto f = field_from(g, std::vector<double>(g.node_count(), 2.5));
    const std::size_t lo[] = {0, 1, 0}, hi[] = {3, 2, 2};
    EXPECT_EQ(rectangle_increment(f, lo, hi), 0.0);
}

TEST(Core, RectangleIncrementAdditive)
{
    const GridSpec g = GridSpec::cube(2, 1.0, 6);
    Stream s = derive_stream(7, 0);
    std::vector<double> v(g.node_count());
    for (auto& x : v) x = s.normal();
    const auto f = field_from(g, v);
    const std::size_t lo[] = {1, 0}, hi[] = {5, 4}, mid_hi[] = {3, 4}, mid_lo[] = {3, 0};
    EXPECT_NEAR(rectangle_increment(f, lo, hi), rectangle_increment(f, lo, mid_hi) + rectangle_increment(f, mid_lo, hi),
                1e-12);
}

TEST(Core, RectangleIncrementRejectsBadNodes)
{
    const GridSpec g = GridSpec::cube(1, 1.0, 4);
    const auto f = field_from(g, std::vector<double>(5, 0.0));
    const std::size_t lo[] = {3}, hi[] = {2}, out[] = {5};
    EXPECT_THROW(rectangle_increment(f, lo, hi), DomainError);
    EXPECT_THROW(rectangle_increment(f, lo, out), DomainError);
}

TEST(Core, IntegrandExamples)
{
    const Integrand box = Integrand::indicator(Box{{0.0, 0.0}, {1.0, 1.0}});
    const double p[] = {0.5, 0.3};
    EXPECT_EQ(integrand_eval(box, p), 1.0);
    const Integrand w = Integrand::exp_window(1.0, 1.0);
    const double u0[] = {0.0};
    EXPECT_NEAR(integrand_eval(w, u0), std::exp(-1.0), 1e-15);
    const Integrand unit = Integrand::unit_interval(0.0, 1.0);
    const double out[] = {1.5};
    EXPECT_EQ(integrand_eval(unit, out), 0.0);
    const double bad[] = {0.1, 0.2};
    EXPECT_THROW(integrand_eval(unit, bad), DomainError);
}

TEST(Core, IndicatorValuesAreZeroOrOne)
{
    const Integrand box = Integrand::indicator(Box{{-0.3, 0.2}, {0.7, 0.9}});
    Stream s = derive_stream(1, 0);
    for (int i = 0; i < 1000; ++i) {
        const double p[] = {2.0 * s.uniform() - 1.0, 2.0 * s.uniform() - 1.0};
        const double v = integrand_eval(box, p);
        EXPECT_TRUE(v == 0.0 || v == 1.0);
    }
}

TEST(Core, TabulatedInterpolation)
{
    const GridSpec g = GridSpec::cube(1, 1.0, 2);
    const Integrand f = Integrand::tabulated(g, {0.0, 1.0, 4.0});
    const double a[] = {0.25}, b[] = {0.75}, c[] = {1.5};
    EXPECT_DOUBLE_EQ(integrand_eval(f, a), 0.5);
    EXPECT_DOUBLE_EQ(integrand_eval(f, b), 2.5);
    EXPECT_EQ(integrand_eval(f, c), 0.0);
}

TEST(Core, DeriveStreamDeterministic)
{
    Stream a = derive_stream(42, 0), b = derive_stream(42, 0), c = derive_stream(42, 1);
    bool differs = false;
    for (int i = 0; i < 100; ++i) {
        const auto x = a.next_u64();
        EXPECT_EQ(x, b.next_u64());
        differs = differs || x != c.next_u64();
    }
    EXPECT_TRUE(differs);
}

TEST(Core, DeriveStreamIdsDistinct)
{
    std::set<std::uint64_t> ids;
    for (std::uint64_t k = 0; k < 1000; ++k) ids.insert(derive_stream(42, k).id());
    EXPECT_EQ(ids.size(), 1000u);
}

TEST(Core, LimitScenarioPartition)
{
    EXPECT_THROW(LimitScenario(2, {0}, LimitTarget::half, {0}), DomainError);
    EXPECT_THROW(LimitScenario(2, {2}, LimitTarget::half), DomainError);
    const LimitScenario s(3, {0}, LimitTarget::half, {1}, {{2, 0.7}});
    EXPECT_EQ(s.limit_value(0), 0.5);
    EXPECT_EQ(s.limit_value(1), 1.0);
    EXPECT_EQ(s.limit_value(2), 0.7);
}
