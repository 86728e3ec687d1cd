#include <hermlab/quadrature.hpp>

#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

using namespace hermlab;

TEST(Quadrature, IndicatorExactForAnyPanelCount)
{
    const Integrand f = Integrand::unit_interval(0.0, 1.0);
    for (std::size_t n : {8, 37, 256}) {
        QuadratureConfig c;
        c.panels = n;
        EXPECT_NEAR(inner_product_HH(f, f, HurstMultiIndex({0.7}), c), 1.0, 1e-12) << n;
    }
    const Integrand h = Integrand::unit_interval(0.0, 0.5);
    EXPECT_NEAR(inner_product_HH(h, h, HurstMultiIndex({0.7})), std::pow(0.5, 1.4), 1e-12);
}

TEST(Quadrature, TwoParameterIndicator)
{
    const Integrand f = Integrand::indicator(Box{{0.0, 0.0}, {1.0, 1.0}});
    EXPECT_NEAR(inner_product_HH(f, f, HurstMultiIndex({0.6, 0.8})), 1.0, 1e-12);
}

TEST(Quadrature, SymmetryAndCauchySchwarz)
{
    const HurstMultiIndex H({0.7});
    const Integrand f = Integrand::unit_interval(0.0, 1.0), g = Integrand::exp_window(1.0, 1.0);
    const double fg = inner_product_HH(f, g, H), gf = inner_product_HH(g, f, H);
    EXPECT_NEAR(fg, gf, 1e-12);
    EXPECT_LE(std::abs(fg), std::sqrt(inner_product_HH(f, f, H) * inner_product_HH(g, g, H)) * (1 + 1e-9));
    EXPECT_GE(inner_product_HH(g, g, H), 0.0);
}

TEST(Quadrature, ExpWindowMatchesOracle)
{
    // independent mpmath values (tests/oracles/ou_oracle.py)
    const Integrand f = Integrand::exp_window(1.0, 1.0);
    QuadratureConfig c;
    c.panels = 1024;
    EXPECT_NEAR(inner_product_HH(f, f, HurstMultiIndex({0.7}), c), 0.414900725802, 2e-6);
    EXPECT_NEAR(inner_product_HH(f, f, HurstMultiIndex({0.95}), c), 0.401552345123, 2e-6);
    EXPECT_NEAR(inner_product_HH(f, f, HurstMultiIndex({0.51}), c), 0.431243542267, 2e-6);
}

TEST(Quadrature, PanelRefinementConverges)
{
    const Integrand f = Integrand::exp_window(1.0, 1.0);
    QuadratureConfig a, b;
    a.panels = 512;
    b.panels = 1024;
    const HurstMultiIndex H({0.65});
    EXPECT_LT(std::abs(inner_product_HH(f, f, H, a) - inner_product_HH(f, f, H, b)), a.tolerance);
}

TEST(Quadrature, GaussModeAgreesRoughly)
{
    const Integrand f = Integrand::exp_window(1.0, 1.0);
    QuadratureConfig c;
    c.mode = DiagonalMode::gauss_offdiag;
    EXPECT_NEAR(inner_product_HH(f, f, HurstMultiIndex({0.7}), c), 0.414900725802, 0.01);
}

TEST(Quadrature, RejectsBadInputs)
{
    const Integrand f = Integrand::unit_interval(0.0, 1.0);
    QuadratureConfig c;
    c.panels = 4;
    EXPECT_THROW(inner_product_HH(f, f, HurstMultiIndex({0.7}), c), DomainError);
    EXPECT_THROW(HurstMultiIndex({0.5}), DomainError);
    EXPECT_THROW(inner_product_HH(f, f, HurstMultiIndex({0.7, 0.7})), DomainError);
}

TEST(Quadrature, HbarNormExamples)
{
    const Integrand f = Integrand::indicator(Box{{0.0, 0.0}, {1.0, 1.0}});
    const LimitScenario s(2, {0}, LimitTarget::one, {}, {{1, 0.75}});
    EXPECT_NEAR(hbar_norm(f, HurstMultiIndex({0.75, 0.75}), s), std::sqrt(1.0 / (0.75 * 0.5)), 1e-9);
    EXPECT_EQ(hbar_norm(Integrand::zero(2), HurstMultiIndex({0.75, 0.75}), s), 0.0);
    const LimitScenario s3(3, {0, 1, 2}, LimitTarget::one);
    const Integrand g = Integrand::indicator(Box{{0.0, 0.0, 0.0}, {1.0, 1.0, 1.0}});
    EXPECT_THROW(hbar_norm(g, HurstMultiIndex({0.7, 0.7, 0.7}), s3), UnsupportedError);
}

TEST(Quadrature, HbarNormHeatWindowFinite)
{
    // time axis in A_1, space axis fixed at H = 0.7
    QuadratureConfig c;
    c.panels = 64;
    const Integrand F = Integrand::heat_window(1.0, {0.0}, 6.0);
    const LimitScenario s(2, {0}, LimitTarget::one, {}, {{1, 0.7}});
    const double v = hbar_norm(F, HurstMultiIndex({0.7, 0.7}), s, c);
    EXPECT_TRUE(std::isfinite(v));
    EXPECT_GT(v, 0.0);
}

TEST(Quadrature, LpAdmissibility)
{
    const auto a = lp_admissibility(Integrand::unit_interval(0.0, 1.0), HurstMultiIndex({0.7}));
    EXPECT_NEAR(a.l1, 1.0, 1e-12);
    EXPECT_NEAR(a.l2, 1.0, 1e-12);
    EXPECT_NEAR(a.l_1_over_H, 1.0, 1e-12);
    EXPECT_TRUE(a.admissible);
    const auto e = lp_admissibility(Integrand::exp_window(1.0, 1.0), HurstMultiIndex({0.7}));
    EXPECT_NEAR(e.l1, 1.0 - std::exp(-1.0), 1e-5);
    const auto z = lp_admissibility(Integrand::zero(1), HurstMultiIndex({0.7}));
    EXPECT_EQ(z.l1, 0.0);
    EXPECT_EQ(z.l_1_over_H, 0.0);
    EXPECT_TRUE(z.admissible);
}

TEST(Quadrature, QAlpha)
{
    EXPECT_NEAR(q_alpha(0.5), 1.0 / std::sqrt(2.0 * std::numbers::pi), 1e-12);
    const double H = 0.51;
    EXPECT_NEAR(H * (2 * H - 1) * q_alpha(2 * H - 1) / (0.5 / std::numbers::pi), 1.0, 0.02);
    EXPECT_LT(q_alpha(0.999), 1e-2);
    EXPECT_THROW(q_alpha(0.0), DomainError);
    EXPECT_THROW(q_alpha(1.0), DomainError);
}

TEST(Quadrature, EffectiveExponents)
{
    EXPECT_NEAR(effective_exponents(LimitScenario(1, {0}, LimitTarget::half)).gamma, 0.5, 1e-15);
    EXPECT_NEAR(effective_exponents(LimitScenario(2, {0}, LimitTarget::half, {}, {{1, 0.7}})).gamma0, 0.8, 1e-15);
    const auto e = effective_exponents(LimitScenario(1, {0}, LimitTarget::half));
    EXPECT_NEAR(1.0 - e.gamma0, 0.5, 1e-15);
}

TEST(Quadrature, SigmaLimit)
{
    const LimitScenario s(1, {0}, LimitTarget::half);
    EXPECT_NEAR(sigma_limit(Integrand::exp_window(1.0, 1.0), s), (1.0 - std::exp(-2.0)) / 2.0, 1e-5);
    EXPECT_NEAR(sigma_limit(Integrand::unit_interval(0.0, 1.0), s), 1.0, 1e-12);
    EXPECT_EQ(sigma_limit(Integrand::zero(1), s), 0.0);
    EXPECT_THROW(sigma_limit(Integrand::unit_interval(0.0, 1.0), LimitScenario(1, {}, LimitTarget::half, {}, {{0, 0.7}})),
                 DomainError);
}

TEST(Quadrature, SigmaLimitMatchesExtrapolation)
{
    const Integrand f = Integrand::exp_window(1.0, 1.0);
    const double a = inner_product_HH(f, f, HurstMultiIndex({0.55}));
    const double b = inner_product_HH(f, f, HurstMultiIndex({0.51}));
    const double extrap = b + (b - a) * (0.51 - 0.5) / (0.55 - 0.51);
    const double lim = sigma_limit(f, LimitScenario(1, {0}, LimitTarget::half));
    EXPECT_NEAR(extrap / lim, 1.0, 0.02);
}

TEST(Quadrature, ContractionNorm)
{
    const Integrand f = Integrand::unit_interval(0.0, 1.0);
    QuadratureConfig c;
    c.panels = 64;
    EXPECT_EQ(contraction_norm_sq(Integrand::zero(1), 0.7, 2, 1, c), 0.0);
    EXPECT_NEAR(contraction_norm_sq(f, 1.0, 2, 1, c), 0.25, 1e-12);
    const double a = contraction_norm_sq(f, 0.51, 2, 1, c);
    const double b = contraction_norm_sq(f, 0.6, 2, 1, c);
    const double d = contraction_norm_sq(f, 0.75, 2, 1, c);
    EXPECT_LT(a, b);
    EXPECT_LT(b, d);
    EXPECT_LT(a, 0.01);
    EXPECT_THROW(contraction_norm_sq(f, 0.7, 2, 2, c), DomainError);
    EXPECT_THROW(contraction_norm_sq(Integrand::indicator(Box{{0, 0}, {1, 1}}), 0.7, 2, 1, c), UnsupportedError);
}

TEST(Quadrature, BifractionalCovariance)
{
    EXPECT_NEAR(limit_covariance_bifractional(1, 1, 0.5, 1), std::sqrt(2.0), 1e-14);
    EXPECT_EQ(limit_covariance_bifractional(0, 0, 0.5, 1), 0.0);
    double prev = 0.0;
    for (double t : {0.1, 0.5, 1.0, 2.0}) {
        const double v = limit_covariance_bifractional(t, t, 0.3, 2.0);
        EXPECT_NEAR(v, 2.0 * 0.5 / 0.7 * std::pow(2 * t, 0.7), 1e-12);
        EXPECT_GT(v, prev);
        prev = v;
    }
    EXPECT_THROW(limit_covariance_bifractional(1, 1, 1.0, 1), DomainError);
}

TEST(Quadrature, LimitConstant)
{
    EXPECT_NEAR(limit_constant({}, 1), 1.0 / std::sqrt(2.0 * std::numbers::pi), 1e-15);
    EXPECT_NEAR(limit_covariance_bifractional(1, 1, 0.5, limit_constant({}, 1)), 1.0 / std::sqrt(std::numbers::pi), 1e-14);
    EXPECT_NEAR(limit_constant({0.75}, 1) / limit_constant({}, 1) / q_alpha(0.5), 3.6256099082, 1e-8);
}
