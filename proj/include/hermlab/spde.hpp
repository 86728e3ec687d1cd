#pragma once

#include "core.hpp"
#include "fields.hpp"
#include "integrals.hpp"
#include "quadrature.hpp"
#include "rational.hpp"

#include <boost/math/quadrature/tanh_sinh.hpp>

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <memory>
#include <numbers>
#include <vector>

namespace hermlab {

inline double green(double t, const std::vector<double>& x, std::size_t d)
{
    detail::require(x.size() == d, "green: point dimension must equal d");
    return green(t, std::span<const double>(x));
}

struct ExistenceResult {
    bool ok = false;
    double gamma_cond = 0.0;
};

// d < 4 H0 + sum_i (2 H_i - 1), compared in exact arithmetic on the decimal
// inputs so that boundary cases such as d = 3, all H = 0.6 are rejected.
// Entries may sit on the 1/2 boundary.
inline ExistenceResult existence_condition(double H0, const std::vector<double>& H, std::size_t d)
{
    detail::require(H.size() == d, "existence_condition: need one spatial Hurst value per dimension");
    Rational g = 4 * decimal_rational(H0);
    for (double h : H) g += 2 * decimal_rational(h) - 1;
    ExistenceResult r;
    r.gamma_cond = static_cast<double>(g);
    r.ok = Rational(static_cast<long>(d)) < g;
    return r;
}

struct HeatSpec {
    int q = 2;
    double H0 = 0.7;
    HurstMultiIndex H{std::vector<double>{0.7}};
    double half_width = 0.0;     // spatial truncation; 0 selects 6 sqrt(t_max)
    std::size_t time_steps = 512;
    std::size_t space_steps = 512;
    std::size_t n_internal = 0;  // fine cells per axis; 0 selects the grid itself

    HeatSpec() = default;
    HeatSpec(int order, double h0, HurstMultiIndex h) : q(order), H0(h0), H(std::move(h)) { validate(); }

    std::size_t dim() const noexcept { return H.size(); }

    void validate() const
    {
        detail::require(q >= 1, "heat: q must be >= 1");
        detail::require(H0 > 0.5 && H0 < 1.0, "heat: H0 must lie in (1/2, 1)");
        detail::require(time_steps >= 1 && space_steps >= 1, "heat: grid steps must be >= 1");
        detail::require(half_width >= 0.0, "heat: truncation must be >= 0");
        const auto e = existence_condition(H0, H.values(), dim());
        if (!e.ok)
            throw DomainError("heat: existence condition violated, d = " + std::to_string(dim()) +
                              " >= 4 H0 + sum(2 H_i - 1) = " + std::to_string(e.gamma_cond));
    }

    double truncation(double t_max) const { return half_width > 0.0 ? half_width : 6.0 * std::sqrt(t_max); }
};

// Mild solution at fixed x for one or more times, all from one simulated
// (d+1)-parameter sheet on [0, t_max] x box. Times must be grid nodes.
class MildSolutionSampler {
public:
    MildSolutionSampler(HeatSpec spec, double t_max, std::vector<double> x, std::vector<double> times = {})
        : spec_(std::move(spec)), x_(std::move(x)), times_(std::move(times))
    {
        spec_.validate();
        detail::require(x_.size() == spec_.dim(), "heat: point dimension must equal d");
        detail::require(t_max > 0.0, "heat: t_max must be > 0");
        if (times_.empty()) times_.push_back(t_max);
        const std::size_t d = spec_.dim();
        const double L = spec_.truncation(t_max);
        std::vector<double> origin{0.0}, extent{t_max};
        std::vector<std::size_t> steps{spec_.time_steps};
        for (std::size_t i = 0; i < d; ++i) {
            origin.push_back(x_[i] - L);
            extent.push_back(2.0 * L);
            steps.push_back(spec_.space_steps);
        }
        grid_ = GridSpec(origin, extent, steps);
        std::vector<double> hv{spec_.H0};
        for (double h : spec_.H.values()) hv.push_back(h);
        std::size_t n_int = spec_.n_internal;
        if (n_int == 0) n_int = std::max<std::size_t>(64, std::max(spec_.time_steps, spec_.space_steps));
        gen_ = std::make_unique<HermiteSheetGenerator>(HermiteSpec(spec_.q, HurstMultiIndex(hv)), grid_, n_int);
        for (double t : times_) {
            detail::require(t >= 0.0 && t <= t_max * (1.0 + 1e-12), "heat: time outside the grid horizon");
            const double k = t / grid_.mesh(0);
            detail::require(std::abs(k - std::round(k)) < 1e-6, "heat: requested time is not a grid node");
            if (t == 0.0) {
                weights_.emplace_back();
                continue;
            }
            const Integrand F = Integrand::heat_window(t, x_, L);
            detail::check_truncation(F, detail::field_box(grid_));
            weights_.push_back(detail::cell_midpoint_values(grid_, [&F](const double* p) { return F.eval(p); }));
        }
    }

    const GridSpec& grid() const noexcept { return grid_; }

    std::vector<double> sample(Stream& s) const
    {
        const RandomField Z = gen_->sample(s);
        const auto incr = cell_increments(Z);
        std::vector<double> out;
        for (const auto& w : weights_) out.push_back(w.empty() ? 0.0 : detail::dot(w, incr));
        return out;
    }

private:
    HeatSpec spec_;
    std::vector<double> x_;
    std::vector<double> times_;
    GridSpec grid_;
    std::unique_ptr<HermiteSheetGenerator> gen_;
    std::vector<std::vector<double>> weights_;
};

inline double sample_mild_solution(const HeatSpec& spec, double t, const std::vector<double>& x, Stream& stream)
{
    spec.validate();
    if (t == 0.0) return 0.0;
    return MildSolutionSampler(spec, t, x).sample(stream)[0];
}

namespace detail {

// int_0^t int_0^s |u-v|^a (t+s-u-v)^b dv du via w = u-v, z = t+s-u-v
// (Jacobian 1/2); the w-integral is closed form, z by tanh-sinh.
inline double heat_time_integral(double t, double s, double a, double b)
{
    if (t <= 0.0 || s <= 0.0) return 0.0;
    auto prim = [a](double w) { return std::copysign(std::pow(std::abs(w), a + 1.0) / (a + 1.0), w); };
    auto inner = [&](double z) {
        const double lo = std::max(z - t - s, t - s - z);
        const double hi = std::min(t - s + z, t + s - z);
        return hi > lo ? prim(hi) - prim(lo) : 0.0;
    };
    std::vector<double> br{0.0, std::abs(t - s), std::min(t, s), std::max(t, s), t + s};
    std::sort(br.begin(), br.end());
    br.erase(std::unique(br.begin(), br.end()), br.end());
    boost::math::quadrature::tanh_sinh<double> ts;
    double acc = 0.0;
    for (std::size_t i = 0; i + 1 < br.size(); ++i) {
        if (br[i + 1] - br[i] <= 0.0) continue;
        acc += ts.integrate([&](double z) { return z > 0.0 ? std::pow(z, b) * inner(z) : 0.0; }, br[i], br[i + 1]);
    }
    return 0.5 * acc;
}

} // namespace detail

// E u(t,x) u(s,x) for d = 1: the spatial double integral reduces to
// H1(2H1-1) E|N(0, t+s-u-v)|^{2H1-2}, written as
// H1(2H1-1) q_{2H1-1} 2^{1-H1} Gamma(1-H1) (t+s-u-v)^{H1-1}.
inline double heat_covariance_quadrature(const HeatSpec& spec, double t, double s)
{
    spec.validate();
    if (spec.dim() != 1) throw UnsupportedError("heat_covariance_quadrature supports d = 1 only");
    detail::require(t >= 0.0 && s >= 0.0, "heat covariance needs t, s >= 0");
    const double H0 = spec.H0, H1 = spec.H[0];
    const double pre = H0 * (2.0 * H0 - 1.0) * H1 * (2.0 * H1 - 1.0) * q_alpha(2.0 * H1 - 1.0) *
                       std::pow(2.0, 1.0 - H1) * std::tgamma(1.0 - H1);
    return pre * detail::heat_time_integral(t, s, 2.0 * H0 - 2.0, H1 - 1.0);
}

enum class HeatLimitCase { one = 1, two = 2, three = 3 };

// H -> 1/2 limits. Case 1: H0 and H_{A_k} -> 1/2, other spatial axes fixed.
// Case 2: H_{A_k} -> 1/2, H_{B_p} -> 1, H0 fixed. Case 3: d = 1, all -> 1/2.
inline double heat_limit_covariance(HeatLimitCase c, const LimitScenario& space, double H0, double t, double s)
{
    space.validate();
    detail::require(t >= 0.0 && s >= 0.0, "heat limit covariance needs t, s >= 0");
    detail::require(space.a_target == LimitTarget::half, "H -> 1/2 limit needs A_k driven to 1/2");
    detail::require(space.k() >= 1, "H -> 1/2 limit needs k >= 1");
    std::vector<double> fixed;
    for (const auto& [ax, h] : space.fixed) fixed.push_back(h);
    const auto e = effective_exponents(space);
    const double cst = limit_constant(fixed, space.k());
    switch (c) {
    case HeatLimitCase::three:
        detail::require(space.dim == 1 && space.k() == 1, "case 3 needs d = 1 with the single axis in A_k");
        return limit_covariance_bifractional(t, s, e.gamma0, cst);
    case HeatLimitCase::one:
        detail::require(space.b_axes.empty(), "case 1 has no axes driven to 1");
        detail::require(space.k() + space.fixed.size() == space.dim, "case 1 must assign every spatial axis");
        return limit_covariance_bifractional(t, s, e.gamma0, cst);
    case HeatLimitCase::two: {
        detail::require(H0 > 0.5 && H0 < 1.0, "case 2 keeps H0 fixed in (1/2, 1)");
        detail::require(space.k() + space.b_axes.size() + space.fixed.size() == space.dim,
                        "case 2 must assign every spatial axis");
        // time noise keeps the R_{H0} covariance: the collapsed time
        // integral becomes a Riesz double integral
        const double K = 1.0 - e.gamma0;
        detail::require(K > 0.0, "case 2: covariance exponent 1 - gamma0 must be > 0");
        return cst * H0 * (2.0 * H0 - 1.0) * detail::heat_time_integral(t, s, 2.0 * H0 - 2.0, -e.gamma0);
    }
    }
    throw DomainError("unknown heat limit case");
}

// H -> 1 limits. Case 3: all Hurst indices -> 1, limit t H_q(Z)/sqrt(q!).
// Case 1: H0 and H_{A_k} -> 1; case 2: H_{A_k} -> 1 with H0 fixed. Cases
// 1-2 integrate the heat window over the limiting axes and against a
// sheet over the remaining ones.
struct HeatH1Config {
    std::size_t lower_steps = 256;
    std::size_t n_internal = 512;
    std::size_t outer_panels = 64;
    double half_width = 0.0;
};

inline double heat_limit_sampler_H1(HeatLimitCase c, int q, const LimitScenario& space, double H0, double t,
                                    const std::vector<double>& x, Stream& stream, const HeatH1Config& cfg = {})
{
    space.validate();
    detail::require(q >= 1, "heat limit sampler needs q >= 1");
    detail::require(t >= 0.0, "heat limit sampler needs t >= 0");
    detail::require(x.size() == space.dim, "heat limit sampler: point dimension must equal d");
    detail::require(space.a_target == LimitTarget::one, "H -> 1 limit needs A_k driven to 1");
    if (c == HeatLimitCase::three) {
        detail::require(space.k() == space.dim, "case 3 drives every spatial axis to 1");
        return t * sample_hermite_limit_rv(q, stream);
    }
    detail::require(space.k() >= 1, "H -> 1 limit needs k >= 1");
    detail::require(space.k() + space.fixed.size() == space.dim, "cases 1-2 must fix every axis outside A_k");
    if (t == 0.0) return 0.0;
    const std::size_t d = space.dim;
    const double L = cfg.half_width > 0.0 ? cfg.half_width : 6.0 * std::sqrt(t);
    const Integrand F = Integrand::heat_window(t, x, L);

    // axes of F: 0 = time, 1..d = space
    std::vector<std::size_t> a_axes;
    if (c == HeatLimitCase::one) a_axes.push_back(0);
    else detail::require(H0 > 0.5 && H0 < 1.0, "case 2 keeps H0 fixed in (1/2, 1)");
    for (auto a : space.a_axes) a_axes.push_back(a + 1);
    std::map<std::size_t, double> fixed;
    std::vector<double> lower_h;
    std::vector<double> origin, extent;
    std::vector<std::size_t> steps;
    if (c == HeatLimitCase::two) {
        fixed[0] = H0;
        lower_h.push_back(H0);
        origin.push_back(0.0);
        extent.push_back(t);
        steps.push_back(cfg.lower_steps);
    }
    for (const auto& [ax, h] : space.fixed) {
        fixed[ax + 1] = h;
        lower_h.push_back(h);
        origin.push_back(x[ax] - L);
        extent.push_back(2.0 * L);
        steps.push_back(cfg.lower_steps);
    }
    const LimitScenario full(d + 1, a_axes, LimitTarget::one, {}, fixed);
    const GridSpec g(origin, extent, steps);
    const RandomField Z =
        simulate_hermite_sheet(HermiteSpec(q, HurstMultiIndex(lower_h)), g, std::max<std::size_t>(64, cfg.n_internal), stream);
    return mixed_limit_sampler(F, full, Z, MixedLimitConfig{cfg.outer_panels});
}

} // namespace hermlab
