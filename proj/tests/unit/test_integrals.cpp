#include <hermlab/integrals.hpp>
#include <hermlab/stats.hpp>

#include <gtest/gtest.h>

#include <cmath>

using namespace hermlab;

TEST(Integrals, AlignedIndicatorIsIncrement)
{
    const GridSpec g = GridSpec::cube(1, 1.0, 16);
    Stream s = derive_stream(1, 0);
    const auto Z = simulate_hermite_sheet(HermiteSpec(2, HurstMultiIndex({0.7})), g, 256, s);
    const std::size_t lo[] = {4}, hi[] = {12};
    EXPECT_NEAR(wiener_hermite_integral(Integrand::unit_interval(0.25, 0.75), Z), rectangle_increment(Z, lo, hi), 1e-12);
}

TEST(Integrals, AlignedIndicatorTwoParameter)
{
    const GridSpec g = GridSpec::cube(2, 1.0, 8);
    Stream s = derive_stream(1, 1);
    const auto Z = simulate_fractional_gaussian_sheet({0.7, 0.6}, g, s);
    const std::size_t lo[] = {2, 0}, hi[] = {6, 8};
    const Integrand f = Integrand::indicator(Box{{0.25, 0.0}, {0.75, 1.0}});
    EXPECT_NEAR(wiener_hermite_integral(f, Z), rectangle_increment(Z, lo, hi), 1e-12);
}

TEST(Integrals, Linearity)
{
    const GridSpec g = GridSpec::cube(1, 1.0, 64);
    Stream s = derive_stream(2, 0);
    const auto Z = simulate_hermite_sheet(HermiteSpec(2, HurstMultiIndex({0.7})), g, 1024, s);
    const Integrand f = Integrand::exp_window(1.0, 1.0), h = Integrand::unit_interval(0.0, 0.5);
    const WienerIntegrator If(f, g), Ih(h, g);
    const auto w = If.weights();
    std::vector<double> combo(w.size());
    for (std::size_t i = 0; i < w.size(); ++i) combo[i] = 2.0 * w[i] - 3.0 * Ih.weights()[i];
    double direct = 0.0;
    const auto inc = cell_increments(Z);
    for (std::size_t i = 0; i < inc.size(); ++i) direct += combo[i] * inc[i];
    EXPECT_NEAR(direct, 2.0 * If(Z) - 3.0 * Ih(Z), 1e-12);
}

TEST(Integrals, MeanZeroAndIsometry)
{
    const GridSpec g = GridSpec::cube(1, 1.0, 256);
    const HermiteSheetGenerator gen(HermiteSpec(2, HurstMultiIndex({0.7})), g, std::size_t{1} << 12);
    const Integrand f = Integrand::exp_window(1.0, 1.0);
    const WienerIntegrator I(f, g);
    const MCReport r = mc_report([&](Stream& s) { return I(gen.sample(s)); }, 4000, 3);
    EXPECT_LT(std::abs(r.mean), 4 * r.stderr_mean);
    EXPECT_NEAR(r.variance / inner_product_HH(f, f, HurstMultiIndex({0.7})), 1.0, 0.10);
}

TEST(Integrals, TruncationDetected)
{
    const GridSpec g = GridSpec::cube(1, 0.5, 16);
    Stream s = derive_stream(4, 0);
    const auto Z = simulate_fractional_gaussian_sheet({0.7}, g, s);
    EXPECT_THROW(wiener_hermite_integral(Integrand::exp_window(1.0, 1.0), Z), TruncationError);
    EXPECT_NO_THROW(wiener_hermite_integral(Integrand::exp_window(1.0, 0.5), Z));
}

TEST(Integrals, MixedLimitSamplerIndicator)
{
    // inner integral is Z(1) for every u, outer integral of 1 over [0,1]
    const GridSpec lower = GridSpec::cube(1, 1.0, 64);
    const HermiteSheetGenerator gen(HermiteSpec(2, HurstMultiIndex({0.7})), lower, 1024);
    const Integrand f = Integrand::indicator(Box{{0.0, 0.0}, {1.0, 1.0}});
    const LimitScenario s(2, {0}, LimitTarget::one, {}, {{1, 0.7}});
    Stream st = derive_stream(5, 0);
    const auto Z = gen.sample(st);
    EXPECT_NEAR(mixed_limit_sampler(f, s, Z), Z.values.back(), 1e-12);
    EXPECT_EQ(mixed_limit_sampler(Integrand::zero(2), s, Z), 0.0);
    const MCReport r = mc_report([&](Stream& ss) { return mixed_limit_sampler(f, s, gen.sample(ss)); }, 2000, 6);
    EXPECT_NEAR(r.variance, 1.0, 0.10);
}

TEST(Integrals, MixedLimitSamplerMatchesOneLimitQuadrature)
{
    // f(u, v) = e^{-(1-u)} 1_{[0,1]}(v) on axis 0 in A_1
    const Integrand f = Integrand::exp_window(1.0, 1.0, 0.0, 0, 2, Box{{0.0}, {1.0}});
    const LimitScenario s(2, {0}, LimitTarget::one, {}, {{1, 0.7}});
    const HurstMultiIndex H({0.99, 0.7});
    const double quad = inner_product_HH(f, f, H);
    const double lim = one_limit_variance(f, H, s);
    EXPECT_NEAR(quad / lim, 1.0, 0.01);
    const GridSpec lower = GridSpec::cube(1, 1.0, 64);
    const HermiteSheetGenerator gen(HermiteSpec(2, HurstMultiIndex({0.7})), lower, 1024);
    const MCReport r = mc_report([&](Stream& ss) { return mixed_limit_sampler(f, s, gen.sample(ss)); }, 2000, 7);
    EXPECT_NEAR(r.variance / quad, 1.0, 0.10);
}

TEST(Integrals, MixedLimitSamplerRejectsFullScenario)
{
    const LimitScenario s(1, {0}, LimitTarget::one);
    Stream st = derive_stream(8, 0);
    const auto Z = simulate_fractional_gaussian_sheet({0.7}, GridSpec::cube(1, 1.0, 8), st);
    EXPECT_THROW(mixed_limit_sampler(Integrand::unit_interval(0, 1), s, Z), DomainError);
}

TEST(Integrals, OneLimitKsTrend)
{
    const GridSpec g = GridSpec::cube(1, 1.0, 128);
    const Integrand f = Integrand::unit_interval(0.0, 1.0);
    const WienerIntegrator I(f, g);
    const Cdf law = target_cdf_hermite_limit(2);
    auto ks_at = [&](double H) {
        const HermiteSheetGenerator gen(HermiteSpec(2, HurstMultiIndex({H})), g, std::size_t{1} << 12);
        auto x = run_replicates<double>(4000, 9, 1, [&](Stream& s, std::size_t) { return I(gen.sample(s)); });
        return ks_distance(x, law);
    };
    EXPECT_LT(ks_at(0.99), ks_at(0.9));
}
