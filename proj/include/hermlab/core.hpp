#pragma once

#include "errors.hpp"
#include "rng.hpp"

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <map>
#include <numbers>
#include <span>
#include <string>
#include <variant>
#include <vector>

namespace hermlab {

class HurstMultiIndex {
public:
    HurstMultiIndex() = default;
    explicit HurstMultiIndex(std::vector<double> values) : v_(std::move(values))
    {
        detail::require(!v_.empty(), "Hurst multi-index must have at least one entry");
        for (double h : v_)
            detail::require(h > 0.5 && h < 1.0, "Hurst entries must lie in (1/2, 1), got " + std::to_string(h));
    }

    std::size_t size() const noexcept { return v_.size(); }
    double operator[](std::size_t i) const { return v_[i]; }
    const std::vector<double>& values() const noexcept { return v_; }

    double sum() const noexcept
    {
        double s = 0.0;
        for (double h : v_) s += h;
        return s;
    }

private:
    std::vector<double> v_;
};

struct HermiteSpec {
    int q = 1;
    HurstMultiIndex hurst;

    HermiteSpec() = default;
    HermiteSpec(int order, HurstMultiIndex h) : q(order), hurst(std::move(h))
    {
        detail::require(q >= 1, "Hermite order q must be >= 1");
        detail::require(hurst.size() >= 1, "parameter dimension must be >= 1");
    }

    std::size_t dim() const noexcept { return hurst.size(); }
};

struct GridSpec {
    std::vector<double> origin;
    std::vector<double> extent;
    std::vector<std::size_t> steps;

    GridSpec() = default;
    GridSpec(std::vector<double> o, std::vector<double> e, std::vector<std::size_t> n)
        : origin(std::move(o)), extent(std::move(e)), steps(std::move(n))
    {
        detail::require(!steps.empty(), "grid needs at least one axis");
        detail::require(origin.size() == steps.size() && extent.size() == steps.size(),
                        "grid origin/extent/steps lengths differ");
        for (std::size_t j = 0; j < steps.size(); ++j) {
            detail::require(extent[j] > 0.0 && std::isfinite(extent[j]), "grid extent must be > 0");
            detail::require(steps[j] >= 1, "grid steps must be >= 1");
            detail::require(std::isfinite(origin[j]), "grid origin must be finite");
        }
    }

    // [0, t_max]^d with n steps per axis
    static GridSpec cube(std::size_t d, double t_max, std::size_t n)
    {
        return GridSpec(std::vector<double>(d, 0.0), std::vector<double>(d, t_max), std::vector<std::size_t>(d, n));
    }

    std::size_t dim() const noexcept { return steps.size(); }
    double mesh(std::size_t j) const { return extent[j] / static_cast<double>(steps[j]); }
    double coord(std::size_t j, std::size_t i) const { return origin[j] + mesh(j) * static_cast<double>(i); }

    std::size_t node_count() const noexcept
    {
        std::size_t n = 1;
        for (auto s : steps) n *= s + 1;
        return n;
    }

    // row-major, last axis fastest
    std::size_t flat(std::span<const std::size_t> idx) const
    {
        std::size_t k = 0;
        for (std::size_t j = 0; j < steps.size(); ++j) k = k * (steps[j] + 1) + idx[j];
        return k;
    }
};

struct FieldMeta {
    int q = 1;
    std::vector<double> hurst;
    std::uint64_t seed = 0;
    std::string method;
    std::size_t internal_resolution = 0;
};

struct RandomField {
    GridSpec grid;
    std::vector<double> values;
    FieldMeta meta;

    std::size_t dim() const noexcept { return grid.dim(); }
    double at(std::span<const std::size_t> idx) const { return values[grid.flat(idx)]; }
};

// Alternating-sign sum over the 2^d corners of [lo, hi].
inline double rectangle_increment(const RandomField& field, std::span<const std::size_t> lo,
                                  std::span<const std::size_t> hi)
{
    const std::size_t d = field.dim();
    detail::require(lo.size() == d && hi.size() == d, "rectangle corner dimension mismatch");
    for (std::size_t j = 0; j < d; ++j) {
        detail::require(hi[j] <= field.grid.steps[j], "rectangle corner outside grid");
        detail::require(lo[j] <= hi[j], "rectangle requires lo <= hi");
    }
    std::vector<std::size_t> corner(d);
    double acc = 0.0;
    for (std::size_t mask = 0; mask < (std::size_t{1} << d); ++mask) {
        int lows = 0;
        for (std::size_t j = 0; j < d; ++j) {
            const bool low = (mask >> j) & 1U;
            corner[j] = low ? lo[j] : hi[j];
            lows += low;
        }
        const double v = field.at(corner);
        acc += (lows % 2 == 0) ? v : -v;
    }
    return acc;
}

// Increments of every unit cell of the grid, row-major like the nodes
// but with steps (not steps+1) entries per axis.
inline std::vector<double> cell_increments(const RandomField& field)
{
    const auto& g = field.grid;
    const std::size_t d = g.dim();
    std::vector<double> cur = field.values;
    std::vector<std::size_t> shape(g.steps.size());
    for (std::size_t j = 0; j < d; ++j) shape[j] = g.steps[j] + 1;
    // difference along each axis in turn
    for (std::size_t ax = 0; ax < d; ++ax) {
        std::size_t outer = 1, inner = 1;
        for (std::size_t j = 0; j < ax; ++j) outer *= shape[j];
        for (std::size_t j = ax + 1; j < d; ++j) inner *= shape[j];
        const std::size_t n = shape[ax];
        std::vector<double> next(outer * (n - 1) * inner);
        for (std::size_t o = 0; o < outer; ++o)
            for (std::size_t i = 0; i + 1 < n; ++i) {
                const double* a = &cur[(o * n + i) * inner];
                const double* b = a + inner;
                double* out = &next[(o * (n - 1) + i) * inner];
                for (std::size_t k = 0; k < inner; ++k) out[k] = b[k] - a[k];
            }
        cur.swap(next);
        shape[ax] = n - 1;
    }
    return cur;
}

// ---------------------------------------------------------------------------
// Integrand family

constexpr double inf = std::numeric_limits<double>::infinity();

struct Box {
    std::vector<double> lo;
    std::vector<double> hi;

    std::size_t dim() const noexcept { return lo.size(); }
    bool bounded() const
    {
        for (std::size_t j = 0; j < lo.size(); ++j)
            if (!std::isfinite(lo[j]) || !std::isfinite(hi[j])) return false;
        return true;
    }
    bool contains(const double* x) const
    {
        for (std::size_t j = 0; j < lo.size(); ++j)
            if (x[j] < lo[j] || x[j] > hi[j]) return false;
        return true;
    }
};

// Heat kernel (2 pi t)^{-d/2} exp(-|x|^2 / 2t), zero for t <= 0.
inline double green(double t, std::span<const double> x)
{
    if (!(t > 0.0)) return 0.0;
    double r2 = 0.0;
    for (double xi : x) r2 += xi * xi;
    const double d = static_cast<double>(x.size());
    return std::pow(2.0 * std::numbers::pi * t, -0.5 * d) * std::exp(-r2 / (2.0 * t));
}

struct Indicator {
    Box box;
};

// e^{-lambda (t - u_axis)} on lo <= u_axis <= t, times the indicator of
// `cross` on the remaining axes (in order, skipping `axis`).
struct ExpWindow {
    double lambda;
    double t;
    double lo;
    std::size_t axis;
    std::size_t dim;
    Box cross;
};

// 1_{(0,t)}(u) G(t-u, x-y) on axis 0 = time, spatial axes 1..d, cut to
// the box |y_i - x_i| <= half_width.
struct HeatWindow {
    double t;
    std::vector<double> x;
    double half_width;
};

struct Tabulated {
    GridSpec grid;
    std::vector<double> values;
};

class Integrand {
public:
    using Variant = std::variant<Indicator, ExpWindow, HeatWindow, Tabulated>;

    static Integrand indicator(Box box)
    {
        detail::require(!box.lo.empty() && box.lo.size() == box.hi.size(), "indicator box malformed");
        for (std::size_t j = 0; j < box.dim(); ++j) detail::require(box.lo[j] <= box.hi[j], "indicator box has lo > hi");
        return Integrand(Indicator{std::move(box)});
    }

    static Integrand unit_interval(double a, double b) { return indicator(Box{{a}, {b}}); }

    static Integrand exp_window(double lambda, double t, double lo = 0.0)
    {
        return exp_window(lambda, t, lo, 0, 1, Box{});
    }

    static Integrand exp_window(double lambda, double t, double lo, std::size_t axis, std::size_t dim, Box cross)
    {
        detail::require(lambda > 0.0, "exp_window needs lambda > 0");
        detail::require(dim >= 1 && axis < dim, "exp_window axis out of range");
        detail::require(cross.dim() + 1 == dim, "exp_window cross box must cover the other axes");
        detail::require(lo <= t, "exp_window needs lo <= t");
        return Integrand(ExpWindow{lambda, t, lo, axis, dim, std::move(cross)});
    }

    static Integrand heat_window(double t, std::vector<double> x, double half_width)
    {
        detail::require(t >= 0.0, "heat_window needs t >= 0");
        detail::require(!x.empty(), "heat_window needs a spatial point");
        detail::require(half_width > 0.0, "heat_window truncation must be > 0");
        return Integrand(HeatWindow{t, std::move(x), half_width});
    }

    static Integrand tabulated(GridSpec grid, std::vector<double> values)
    {
        detail::require(values.size() == grid.node_count(), "tabulated values must match grid nodes");
        return Integrand(Tabulated{std::move(grid), std::move(values)});
    }

    static Integrand zero(std::size_t dim)
    {
        return tabulated(GridSpec(std::vector<double>(dim, 0.0), std::vector<double>(dim, 1.0),
                                  std::vector<std::size_t>(dim, 1)),
                         std::vector<double>(std::size_t{1} << dim, 0.0));
    }

    const Variant& variant() const noexcept { return v_; }

    std::size_t dim() const
    {
        return std::visit(
            [](const auto& f) -> std::size_t {
                using T = std::decay_t<decltype(f)>;
                if constexpr (std::is_same_v<T, Indicator>) return f.box.dim();
                else if constexpr (std::is_same_v<T, ExpWindow>) return f.dim;
                else if constexpr (std::is_same_v<T, HeatWindow>) return f.x.size() + 1;
                else return f.grid.dim();
            },
            v_);
    }

    Box support() const
    {
        return std::visit(
            [](const auto& f) -> Box {
                using T = std::decay_t<decltype(f)>;
                if constexpr (std::is_same_v<T, Indicator>) {
                    return f.box;
                } else if constexpr (std::is_same_v<T, ExpWindow>) {
                    Box b{std::vector<double>(f.dim), std::vector<double>(f.dim)};
                    for (std::size_t j = 0, c = 0; j < f.dim; ++j) {
                        if (j == f.axis) {
                            b.lo[j] = f.lo;
                            b.hi[j] = f.t;
                        } else {
                            b.lo[j] = f.cross.lo[c];
                            b.hi[j] = f.cross.hi[c];
                            ++c;
                        }
                    }
                    return b;
                } else if constexpr (std::is_same_v<T, HeatWindow>) {
                    Box b;
                    b.lo.push_back(0.0);
                    b.hi.push_back(f.t);
                    for (double xi : f.x) {
                        b.lo.push_back(xi - f.half_width);
                        b.hi.push_back(xi + f.half_width);
                    }
                    return b;
                } else {
                    Box b;
                    for (std::size_t j = 0; j < f.grid.dim(); ++j) {
                        b.lo.push_back(f.grid.origin[j]);
                        b.hi.push_back(f.grid.origin[j] + f.grid.extent[j]);
                    }
                    return b;
                }
            },
            v_);
    }

    // Unchecked evaluation; x must have dim() entries.
    double eval(const double* x) const
    {
        return std::visit([x](const auto& f) { return eval_impl(f, x); }, v_);
    }

    // Coordinates of a box that must appear as panel breakpoints for exact
    // cell integration of indicator-like pieces, per axis.
    std::vector<std::vector<double>> breakpoints() const
    {
        const Box b = support();
        std::vector<std::vector<double>> out(b.dim());
        for (std::size_t j = 0; j < b.dim(); ++j) {
            if (std::isfinite(b.lo[j])) out[j].push_back(b.lo[j]);
            if (std::isfinite(b.hi[j])) out[j].push_back(b.hi[j]);
        }
        return out;
    }

private:
    explicit Integrand(Variant v) : v_(std::move(v)) {}

    static double eval_impl(const Indicator& f, const double* x) { return f.box.contains(x) ? 1.0 : 0.0; }

    static double eval_impl(const ExpWindow& f, const double* x)
    {
        for (std::size_t j = 0, c = 0; j < f.dim; ++j) {
            if (j == f.axis) continue;
            if (x[j] < f.cross.lo[c] || x[j] > f.cross.hi[c]) return 0.0;
            ++c;
        }
        const double u = x[f.axis];
        if (u < f.lo || u > f.t) return 0.0;
        return std::exp(-f.lambda * (f.t - u));
    }

    static double eval_impl(const HeatWindow& f, const double* x)
    {
        const double u = x[0];
        if (!(u > 0.0 && u < f.t)) return 0.0;
        const std::size_t d = f.x.size();
        double r2 = 0.0;
        for (std::size_t i = 0; i < d; ++i) {
            const double dy = f.x[i] - x[i + 1];
            if (std::abs(dy) > f.half_width) return 0.0;
            r2 += dy * dy;
        }
        const double tau = f.t - u;
        return std::pow(2.0 * std::numbers::pi * tau, -0.5 * static_cast<double>(d)) * std::exp(-r2 / (2.0 * tau));
    }

    static double eval_impl(const Tabulated& f, const double* x)
    {
        const auto& g = f.grid;
        const std::size_t d = g.dim();
        std::vector<std::size_t> base(d);
        std::vector<double> frac(d);
        for (std::size_t j = 0; j < d; ++j) {
            const double s = (x[j] - g.origin[j]) / g.mesh(j);
            if (!(s >= 0.0) || s > static_cast<double>(g.steps[j])) return 0.0;
            std::size_t i = static_cast<std::size_t>(s);
            if (i >= g.steps[j]) i = g.steps[j] - 1;
            base[j] = i;
            frac[j] = s - static_cast<double>(i);
        }
        std::vector<std::size_t> idx(d);
        double acc = 0.0;
        for (std::size_t mask = 0; mask < (std::size_t{1} << d); ++mask) {
            double w = 1.0;
            for (std::size_t j = 0; j < d; ++j) {
                const bool up = (mask >> j) & 1U;
                idx[j] = base[j] + (up ? 1 : 0);
                w *= up ? frac[j] : 1.0 - frac[j];
            }
            if (w != 0.0) acc += w * f.values[g.flat(idx)];
        }
        return acc;
    }

    Variant v_;
};

inline double integrand_eval(const Integrand& f, std::span<const double> point)
{
    detail::require(point.size() == f.dim(), "integrand_eval: point dimension " + std::to_string(point.size()) +
                                                 " != integrand dimension " + std::to_string(f.dim()));
    return f.eval(point.data());
}

// ---------------------------------------------------------------------------

enum class LimitTarget { half, one };

struct LimitScenario {
    std::size_t dim = 0;
    std::vector<std::size_t> a_axes;
    LimitTarget a_target = LimitTarget::one;
    std::vector<std::size_t> b_axes;
    std::map<std::size_t, double> fixed;

    LimitScenario() = default;
    LimitScenario(std::size_t d, std::vector<std::size_t> a, LimitTarget target, std::vector<std::size_t> b = {},
                  std::map<std::size_t, double> fix = {})
        : dim(d), a_axes(std::move(a)), a_target(target), b_axes(std::move(b)), fixed(std::move(fix))
    {
        validate();
    }

    void validate() const
    {
        std::vector<int> seen(dim, 0);
        auto mark = [&](std::size_t ax) {
            detail::require(ax < dim, "scenario axis out of range");
            detail::require(seen[ax] == 0, "scenario axis listed twice");
            seen[ax] = 1;
        };
        for (auto a : a_axes) mark(a);
        for (auto b : b_axes) mark(b);
        for (const auto& [ax, h] : fixed) {
            mark(ax);
            detail::require(h > 0.5 && h < 1.0, "fixed Hurst values must lie in (1/2, 1)");
        }
    }

    std::size_t k() const noexcept { return a_axes.size(); }
    bool in_a(std::size_t ax) const { return std::find(a_axes.begin(), a_axes.end(), ax) != a_axes.end(); }
    bool in_b(std::size_t ax) const { return std::find(b_axes.begin(), b_axes.end(), ax) != b_axes.end(); }

    // Hurst value of an axis at the end of the limit.
    double limit_value(std::size_t ax) const
    {
        if (in_a(ax)) return a_target == LimitTarget::half ? 0.5 : 1.0;
        if (in_b(ax)) return 1.0;
        auto it = fixed.find(ax);
        detail::require(it != fixed.end(), "scenario leaves axis " + std::to_string(ax) + " unspecified");
        return it->second;
    }

    std::vector<std::size_t> complement_of_a() const
    {
        std::vector<std::size_t> out;
        for (std::size_t j = 0; j < dim; ++j)
            if (!in_a(j)) out.push_back(j);
        return out;
    }
};

} // namespace hermlab
