#pragma once

#include "core.hpp"
#include "fields.hpp"
#include "quadrature.hpp"

#include <cmath>
#include <cstddef>
#include <vector>

namespace hermlab {

namespace detail {

inline double overlap(double a0, double a1, double b0, double b1) { return std::max(0.0, std::min(a1, b1) - std::max(a0, b0)); }

// int over (support intersected with clip) of |f|; clip may be unbounded.
inline double integrand_mass(const Integrand& f, const Box& clip)
{
    const std::size_t d = f.dim();
    return std::visit(
        [&](const auto& g) -> double {
            using T = std::decay_t<decltype(g)>;
            if constexpr (std::is_same_v<T, Indicator>) {
                double v = 1.0;
                for (std::size_t j = 0; j < d; ++j) v *= overlap(g.box.lo[j], g.box.hi[j], clip.lo[j], clip.hi[j]);
                return v;
            } else if constexpr (std::is_same_v<T, ExpWindow>) {
                double v = 1.0;
                for (std::size_t j = 0, c = 0; j < d; ++j) {
                    if (j == g.axis) continue;
                    v *= overlap(g.cross.lo[c], g.cross.hi[c], clip.lo[j], clip.hi[j]);
                    ++c;
                }
                const double a = std::max(g.lo, clip.lo[g.axis]);
                const double b = std::min(g.t, clip.hi[g.axis]);
                if (!(b > a)) return 0.0;
                const double ea = std::isfinite(a) ? std::exp(-g.lambda * (g.t - a)) : 0.0;
                return v * (std::exp(-g.lambda * (g.t - b)) - ea) / g.lambda;
            } else if constexpr (std::is_same_v<T, HeatWindow>) {
                const double u0 = std::max(0.0, clip.lo[0]);
                const double u1 = std::min(g.t, clip.hi[0]);
                if (!(u1 > u0)) return 0.0;
                const std::size_t n = 1024;
                double acc = 0.0;
                for (std::size_t i = 0; i < n; ++i) {
                    const double u = u0 + (u1 - u0) * (static_cast<double>(i) + 0.5) / static_cast<double>(n);
                    const double sd = std::sqrt(g.t - u);
                    double p = 1.0;
                    for (std::size_t k = 0; k < g.x.size(); ++k) {
                        const double a = std::max(g.x[k] - g.half_width, clip.lo[k + 1]);
                        const double b = std::min(g.x[k] + g.half_width, clip.hi[k + 1]);
                        p *= b > a ? 0.5 * (std::erf((b - g.x[k]) / (sd * std::sqrt(2.0))) -
                                            std::erf((a - g.x[k]) / (sd * std::sqrt(2.0))))
                                   : 0.0;
                    }
                    acc += p;
                }
                return acc * (u1 - u0) / static_cast<double>(n);
            } else {
                Box sup = Integrand::tabulated(g.grid, g.values).support();
                Box b = sup;
                for (std::size_t j = 0; j < d; ++j) {
                    b.lo[j] = std::max(sup.lo[j], clip.lo[j]);
                    b.hi[j] = std::min(sup.hi[j], clip.hi[j]);
                    if (!(b.hi[j] > b.lo[j])) return 0.0;
                }
                Integrand clipped = Integrand::indicator(b);
                Integrand self = Integrand::tabulated(g.grid, g.values);
                Panels p = make_panels({&clipped}, 64);
                auto F = midpoint_values(self, p);
                auto vol = cell_volumes(p);
                double acc = 0.0;
                for (std::size_t c = 0; c < F.size(); ++c) acc += std::abs(F[c]) * vol[c];
                return acc;
            }
        },
        f.variant());
}

inline Box everything(std::size_t d) { return Box{std::vector<double>(d, -inf), std::vector<double>(d, inf)}; }

inline Box field_box(const GridSpec& g)
{
    Box b;
    for (std::size_t j = 0; j < g.dim(); ++j) {
        b.lo.push_back(g.origin[j]);
        b.hi.push_back(g.origin[j] + g.extent[j]);
    }
    return b;
}

inline void check_truncation(const Integrand& f, const Box& domain, double tol = 0.01)
{
    const double total = integrand_mass(f, everything(f.dim()));
    if (total == 0.0) return;
    if (!std::isfinite(total)) throw TruncationError("integrand has infinite mass; truncate its support");
    const double inside = integrand_mass(f, domain);
    const double loss = 1.0 - inside / total;
    if (loss > tol)
        throw TruncationError("integrand mass outside the field domain is " + std::to_string(100.0 * loss) +
                              "% (limit " + std::to_string(100.0 * tol) + "%)");
}

// f at the midpoint of every unit cell of the grid, row-major.
template <class Fn>
std::vector<double> cell_midpoint_values(const GridSpec& g, Fn&& f)
{
    const std::size_t d = g.dim();
    std::size_t n = 1;
    for (auto s : g.steps) n *= s;
    std::vector<double> out(n);
    std::vector<std::size_t> idx(d, 0);
    std::vector<double> x(d);
    for (std::size_t k = 0; k < n; ++k) {
        for (std::size_t j = 0; j < d; ++j) x[j] = g.coord(j, idx[j]) + 0.5 * g.mesh(j);
        out[k] = f(x.data());
        for (std::size_t j = d; j-- > 0;) {
            if (++idx[j] < g.steps[j]) break;
            idx[j] = 0;
        }
    }
    return out;
}

inline double dot(const std::vector<double>& a, const std::vector<double>& b)
{
    double acc = 0.0, comp = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        const double term = a[i] * b[i];
        const double s = acc + term;
        comp += std::abs(acc) >= std::abs(term) ? (acc - s) + term : (term - s) + acc;
        acc = s;
    }
    return acc + comp;
}

} // namespace detail

// Precomputed midpoint weights of f on a field grid; reuse across replicates.
class WienerIntegrator {
public:
    WienerIntegrator(const Integrand& f, const GridSpec& grid) : grid_(grid)
    {
        detail::require(f.dim() == grid.dim(), "integrand dimension must equal field dimension");
        detail::check_truncation(f, detail::field_box(grid));
        weights_ = detail::cell_midpoint_values(grid, [&f](const double* x) { return f.eval(x); });
    }

    double operator()(const RandomField& field) const
    {
        detail::require(field.grid.steps == grid_.steps && field.grid.origin == grid_.origin &&
                            field.grid.extent == grid_.extent,
                        "field grid differs from the integrator grid");
        return detail::dot(weights_, cell_increments(field));
    }

    const std::vector<double>& weights() const noexcept { return weights_; }

private:
    GridSpec grid_;
    std::vector<double> weights_;
};

// sum over cells of f(midpoint) * rectangle increment
inline double wiener_hermite_integral(const Integrand& f, const RandomField& field)
{
    return WienerIntegrator(f, field.grid)(field);
}

struct MixedLimitConfig {
    std::size_t outer_panels = 64;
};

// X = int du_{A_k} ( int f(u_{A_k}, .) dZ^{q, d-k} ) with the inner
// integral taken against lower_field (axes = complement of A_k, in order)
// and the outer one by the midpoint rule over f's support.
inline double mixed_limit_sampler(const Integrand& f, const LimitScenario& s, const RandomField& lower_field,
                                  const MixedLimitConfig& cfg = {})
{
    s.validate();
    const std::size_t d = f.dim();
    detail::require(s.dim == d, "scenario dimension must equal integrand dimension");
    const std::size_t k = s.k();
    detail::require(k >= 1, "mixed_limit_sampler needs k >= 1");
    detail::require(k < d, "k = d: use sample_hermite_limit_rv scaled by the integral of f instead");
    detail::require(lower_field.dim() == d - k, "lower field must have d - k parameters");
    detail::require(cfg.outer_panels >= 1, "outer_panels must be >= 1");

    const auto rest = s.complement_of_a();
    const Box sup = f.support();
    Box slab = detail::everything(d);
    const auto& g = lower_field.grid;
    for (std::size_t i = 0; i < rest.size(); ++i) {
        slab.lo[rest[i]] = g.origin[i];
        slab.hi[rest[i]] = g.origin[i] + g.extent[i];
    }
    detail::check_truncation(f, slab);
    for (auto a : s.a_axes)
        detail::require(std::isfinite(sup.lo[a]) && std::isfinite(sup.hi[a]),
                        "mixed_limit_sampler needs bounded support along A_k axes");

    const auto incr = cell_increments(lower_field);
    std::vector<double> x(d);
    std::vector<std::size_t> oidx(k, 0);
    const std::size_t n = cfg.outer_panels;
    std::size_t outer_total = 1;
    for (std::size_t i = 0; i < k; ++i) outer_total *= n;
    double acc = 0.0;
    for (std::size_t o = 0; o < outer_total; ++o) {
        double w = 1.0;
        for (std::size_t i = 0; i < k; ++i) {
            const std::size_t a = s.a_axes[i];
            const double h = (sup.hi[a] - sup.lo[a]) / static_cast<double>(n);
            x[a] = sup.lo[a] + (static_cast<double>(oidx[i]) + 0.5) * h;
            w *= h;
        }
        const auto vals = detail::cell_midpoint_values(g, [&](const double* y) {
            for (std::size_t i = 0; i < rest.size(); ++i) x[rest[i]] = y[i];
            return f.eval(x.data());
        });
        acc += w * detail::dot(vals, incr);
        for (std::size_t i = k; i-- > 0;) {
            if (++oidx[i] < n) break;
            oidx[i] = 0;
        }
    }
    return acc;
}

} // namespace hermlab
