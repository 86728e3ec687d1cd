#include <hermlab/ou.hpp>
#include <hermlab/quadrature.hpp>
#include <hermlab/stats.hpp>

#include <gtest/gtest.h>

#include <cmath>

using namespace hermlab;

namespace {

std::vector<double> terminal(const HouSimulator& sim, std::size_t n, std::uint64_t seed)
{
    return run_replicates<double>(n, seed, 1, [&](Stream& s, std::size_t) { return sim.sample(s).values.back(); });
}

} // namespace

TEST(OU, StartsAtInitialCondition)
{
    OUSpec spec;
    spec.xi = InitialCondition::constant(1.5);
    spec.n_internal = 1024;
    Stream s = derive_stream(1, 0);
    const RandomField Y = simulate_hou(spec, GridSpec::cube(1, 1.0, 64), s);
    EXPECT_EQ(Y.values.front(), 1.5);
    EXPECT_EQ(Y.values.size(), 65u);
    EXPECT_THROW(simulate_hou(spec, GridSpec({0.5}, {1.0}, {8}), s), DomainError);
}

TEST(OU, TerminalVarianceMatchesQuadrature)
{
    // tests/oracles/ou_oracle.py
    for (auto [H, ref] : {std::pair{0.7, 0.414900725802}, std::pair{0.95, 0.401552345123}}) {
        OUSpec spec;
        spec.H = H;
        spec.n_internal = 4096;
        const auto y = terminal(HouSimulator(spec, GridSpec::cube(1, 1.0, 256)), 3000, 11);
        EXPECT_NEAR(summarize(y, 11).variance / ref, 1.0, 0.10) << H;
    }
}

TEST(OU, SigmaScalesVariance)
{
    OUSpec spec;
    spec.sigma = 2.0;
    spec.n_internal = 1024;
    const GridSpec g = GridSpec::cube(1, 1.0, 64);
    const auto a = terminal(HouSimulator(spec, g), 200, 3);
    spec.sigma = 1.0;
    const auto b = terminal(HouSimulator(spec, g), 200, 3);
    for (std::size_t i = 0; i < a.size(); ++i) EXPECT_NEAR(a[i], 2.0 * b[i], 1e-12);
}

TEST(OU, LangevinResidual)
{
    OUSpec spec;
    spec.lambda = 2.0;
    spec.sigma = 0.5;
    spec.xi = InitialCondition::constant(0.3);
    spec.n_internal = 1 << 13;
    const GridSpec g = GridSpec::cube(1, 1.0, 1 << 12);
    const HouSimulator sim(spec, g);
    Stream s = derive_stream(5, 0);
    RandomField Z;
    const RandomField Y = sim.sample(s, &Z);
    const double h = g.mesh(0);
    double integral = 0.0, worst = 0.0, scale = 0.0;
    for (std::size_t i = 1; i < Y.values.size(); ++i) {
        integral += 0.5 * h * (Y.values[i] + Y.values[i - 1]);
        const double rhs = spec.sigma * Z.values[i];
        worst = std::max(worst, std::abs(Y.values[i] - 0.3 + spec.lambda * integral - rhs));
        scale = std::max(scale, std::abs(rhs));
    }
    EXPECT_LT(worst / scale, 0.02);
}

TEST(OU, StationaryVarianceIsFlat)
{
    OUSpec spec;
    spec.stationary = true;
    spec.n_internal = 4096;
    const StationaryHouSimulator sim(spec, GridSpec::cube(1, 1.0, 64));
    EXPECT_EQ(sim.path_grid().origin[0], -10.0);
    const auto rows = run_replicates<std::vector<double>>(2000, 9, 1, [&](Stream& s, std::size_t) {
        const auto X = sim.sample(s);
        return std::vector<double>{X.values[0], X.values[32], X.values[64]};
    });
    std::vector<MCReport> v;
    std::vector<double> c0(rows.size()), c1(rows.size());
    for (std::size_t j = 0; j < 3; ++j) {
        std::vector<double> col;
        for (const auto& r : rows) col.push_back(r[j]);
        v.push_back(summarize(col, 9));
    }
    for (std::size_t i = 0; i < rows.size(); ++i) {
        c0[i] = rows[i][0];
        c1[i] = rows[i][2];
    }
    QuadratureConfig qc;
    qc.panels = 1024;
    const double quad = inner_product_HH(Integrand::exp_window(1.0, 1.0, -10.0), Integrand::exp_window(1.0, 1.0, -10.0),
                                         HurstMultiIndex({0.7}), qc);
    for (const auto& r : v) EXPECT_LT(std::abs(r.variance - quad), 4 * r.stderr_variance);
    EXPECT_LT(sample_covariance(c0, c1).cov, 0.9 * v[0].variance);
}

TEST(OU, StationaryTruncationRefused)
{
    OUSpec spec;
    spec.stationary = true;
    spec.M = 4.0;
    EXPECT_THROW(spec.validate(), DomainError);
    spec.M = 5.0;
    EXPECT_NO_THROW(spec.validate());
    spec.stationary = false;
    Stream s = derive_stream(1, 0);
    EXPECT_THROW(simulate_stationary_hou(spec, GridSpec::cube(1, 1.0, 8), s), DomainError);
}

TEST(OU, LimitCovariance)
{
    EXPECT_NEAR(ou_limit_covariance(OUKind::nonstationary, 1.0, 1.0, 1.0, 1.0), (1.0 - std::exp(-2.0)) / 2.0, 1e-15);
    EXPECT_EQ(ou_limit_covariance(OUKind::nonstationary, 0.0, 1.0, 1.0, 1.0), 0.0);
    EXPECT_NEAR(ou_limit_covariance(OUKind::stationary, 1.0, 1.0, 2.0, 1.0), 0.25, 1e-15);
    EXPECT_NEAR(ou_limit_covariance(OUKind::stationary, 0.0, 1.0, 1.0, 1.0), 0.5 * std::exp(-1.0), 1e-15);
    EXPECT_THROW(ou_limit_covariance(OUKind::stationary, -1.0, 1.0, 1.0, 1.0), DomainError);
}

TEST(OU, HalfLimitTrend)
{
    const Integrand f = Integrand::exp_window(1.0, 1.0);
    const double target = ou_limit_covariance(OUKind::nonstationary, 1.0, 1.0, 1.0, 1.0);
    QuadratureConfig qc;
    qc.panels = 256;
    double prev = 1.0;
    for (double H : {0.8, 0.65, 0.55, 0.51}) {
        const double e = std::abs(inner_product_HH(f, f, HurstMultiIndex({H}), qc) - target);
        EXPECT_LT(e, prev) << H;
        prev = e;
    }
}

TEST(OU, OneLimitRandomVariable)
{
    const double c = 1.0 - std::exp(-1.0);
    auto var = [](auto fn) { return mc_report(fn, 100000, 21).variance; };
    EXPECT_NEAR(var([&](Stream& s) { return ou_limit_rv_H1(OUKind::nonstationary, 1.0, 1.0, 1.0, InitialCondition::constant(0.0), 2, s); }) / (c * c),
                1.0, 0.03);
    EXPECT_NEAR(var([&](Stream& s) {
                    return ou_limit_rv_H1(OUKind::nonstationary, 1.0, 1.0, 1.0, InitialCondition::gaussian(0.0, 1.0), 2, s);
                }) / (c * c + std::exp(-2.0)),
                1.0, 0.03);
    EXPECT_NEAR(var([&](Stream& s) { return ou_limit_rv_H1(OUKind::stationary, 1.0, 2.0, 1.0, {}, 2, s); }), 0.25, 0.01);
    std::vector<double> x(20000);
    Stream s = derive_stream(4, 0);
    for (auto& v : x) v = ou_limit_rv_H1(OUKind::stationary, 0.0, 1.0, 1.0, {}, 1, s);
    EXPECT_LT(ks_distance(x, normal_cdf), 0.02);
    Stream z = derive_stream(4, 1);
    EXPECT_EQ(ou_limit_rv_H1(OUKind::nonstationary, 0.0, 1.0, 1.0, InitialCondition::constant(0.7), 2, z), 0.7);
}
