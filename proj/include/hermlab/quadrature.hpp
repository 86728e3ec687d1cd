#pragma once

#include "core.hpp"
#include "fields.hpp"

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <numbers>
#include <vector>

namespace hermlab {

enum class DiagonalMode {
    exact_cell,  // closed-form cell-pair integrals of |u-v|^{2H-2} everywhere
    gauss_offdiag // exact on diagonal cells, 3x3 Gauss-Legendre product rule elsewhere
};

struct QuadratureConfig {
    std::size_t panels = 256;
    DiagonalMode mode = DiagonalMode::exact_cell;
    double tolerance = 1e-6;

    QuadratureConfig() = default;
    QuadratureConfig(std::size_t n, DiagonalMode m = DiagonalMode::exact_cell, double tol = 1e-6)
        : panels(n), mode(m), tolerance(tol)
    {
        validate();
    }

    void validate() const
    {
        detail::require(panels >= 8, "quadrature needs at least 8 panels per axis");
        detail::require(tolerance > 0.0, "quadrature tolerance must be > 0");
    }
};

namespace detail {

// int_{x0}^{x1} int_{y0}^{y1} |x-y|^a dy dx for a > -1, via the second
// antiderivative |w|^{a+2} / ((a+1)(a+2)).
inline double cell_pair_integral(double x0, double x1, double y0, double y1, double a)
{
    const double c = 1.0 / ((a + 1.0) * (a + 2.0));
    auto phi = [a, c](double w) { return c * std::pow(std::abs(w), a + 2.0); };
    return phi(x1 - y0) + phi(x0 - y1) - phi(x1 - y1) - phi(x0 - y0);
}

inline double gauss3_pair_integral(double x0, double x1, double y0, double y1, double a)
{
    static constexpr double node[3] = {-0.7745966692414834, 0.0, 0.7745966692414834};
    static constexpr double weight[3] = {5.0 / 9.0, 8.0 / 9.0, 5.0 / 9.0};
    const double hx = 0.5 * (x1 - x0), cx = 0.5 * (x1 + x0);
    const double hy = 0.5 * (y1 - y0), cy = 0.5 * (y1 + y0);
    double acc = 0.0;
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j)
            acc += weight[i] * weight[j] * std::pow(std::abs(cx + hx * node[i] - cy - hy * node[j]), a);
    return acc * hx * hy;
}

// Panel edges on [lo, hi]: n uniform panels with the breakpoints inserted.
inline std::vector<double> panel_edges(double lo, double hi, std::size_t n, const std::vector<double>& breaks)
{
    std::vector<double> e;
    e.reserve(n + 1 + breaks.size());
    for (std::size_t i = 0; i <= n; ++i) e.push_back(lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(n));
    e.back() = hi;
    for (double b : breaks)
        if (b > lo && b < hi) e.push_back(b);
    std::sort(e.begin(), e.end());
    const double tol = 1e-12 * std::max(1.0, hi - lo);
    std::vector<double> out;
    for (double x : e)
        if (out.empty() || x - out.back() > tol) out.push_back(x);
    if (out.back() != hi) out.back() = hi;
    return out;
}

struct Panels {
    std::vector<std::vector<double>> edges;  // per axis

    std::size_t dim() const noexcept { return edges.size(); }
    std::size_t count(std::size_t j) const noexcept { return edges[j].size() - 1; }
    std::size_t total() const
    {
        std::size_t n = 1;
        for (std::size_t j = 0; j < dim(); ++j) n *= count(j);
        return n;
    }
    double length(std::size_t j, std::size_t i) const { return edges[j][i + 1] - edges[j][i]; }
    double mid(std::size_t j, std::size_t i) const { return 0.5 * (edges[j][i] + edges[j][i + 1]); }
};

inline Box union_support(const std::vector<const Integrand*>& fs)
{
    Box b = fs.front()->support();
    for (std::size_t i = 1; i < fs.size(); ++i) {
        const Box o = fs[i]->support();
        for (std::size_t j = 0; j < b.dim(); ++j) {
            b.lo[j] = std::min(b.lo[j], o.lo[j]);
            b.hi[j] = std::max(b.hi[j], o.hi[j]);
        }
    }
    return b;
}

inline Panels make_panels(const std::vector<const Integrand*>& fs, std::size_t n)
{
    const std::size_t d = fs.front()->dim();
    for (auto* f : fs) require(f->dim() == d, "integrands have different dimensions");
    const Box b = union_support(fs);
    require(b.bounded(), "quadrature needs integrands with bounded support (truncate half-infinite windows)");
    Panels p;
    p.edges.resize(d);
    for (std::size_t j = 0; j < d; ++j) {
        std::vector<double> br;
        for (auto* f : fs) {
            auto bp = f->breakpoints();
            br.insert(br.end(), bp[j].begin(), bp[j].end());
        }
        double lo = b.lo[j], hi = b.hi[j];
        if (hi <= lo) hi = lo + 1.0;  // degenerate box; integrand is a null function there
        p.edges[j] = panel_edges(lo, hi, n, br);
    }
    return p;
}

// Integrand values at panel midpoints, row-major (last axis fastest).
inline std::vector<double> midpoint_values(const Integrand& f, const Panels& p)
{
    const std::size_t d = p.dim();
    std::vector<double> out(p.total());
    std::vector<std::size_t> idx(d, 0);
    std::vector<double> x(d);
    for (std::size_t k = 0; k < out.size(); ++k) {
        for (std::size_t j = 0; j < d; ++j) x[j] = p.mid(j, idx[j]);
        out[k] = f.eval(x.data());
        for (std::size_t j = d; j-- > 0;) {
            if (++idx[j] < p.count(j)) break;
            idx[j] = 0;
        }
    }
    return out;
}

inline std::vector<double> cell_volumes(const Panels& p)
{
    const std::size_t d = p.dim();
    std::vector<double> out(p.total());
    std::vector<std::size_t> idx(d, 0);
    for (std::size_t k = 0; k < out.size(); ++k) {
        double v = 1.0;
        for (std::size_t j = 0; j < d; ++j) v *= p.length(j, idx[j]);
        out[k] = v;
        for (std::size_t j = d; j-- > 0;) {
            if (++idx[j] < p.count(j)) break;
            idx[j] = 0;
        }
    }
    return out;
}

// Per-axis kernel acting between two cells.
struct AxisKernel {
    enum class Kind { riesz, diagonal, constant } kind = Kind::riesz;
    double exponent = 0.0;  // riesz: |u-v|^exponent
    double prefactor = 1.0;
};

inline AxisKernel riesz_kernel(double H) { return {AxisKernel::Kind::riesz, 2.0 * H - 2.0, H * (2.0 * H - 1.0)}; }

struct Matrix {
    std::size_t n = 0;
    std::vector<double> a;
    double operator()(std::size_t i, std::size_t j) const { return a[i * n + j]; }
};

// W(a,b) = integral over cell a x cell b of the axis kernel.
inline Matrix axis_weights(const std::vector<double>& edges, const AxisKernel& k, DiagonalMode mode)
{
    const std::size_t n = edges.size() - 1;
    Matrix w{n, std::vector<double>(n * n, 0.0)};
    for (std::size_t i = 0; i < n; ++i) {
        const double li = edges[i + 1] - edges[i];
        for (std::size_t j = 0; j <= i; ++j) {
            const double lj = edges[j + 1] - edges[j];
            double v = 0.0;
            switch (k.kind) {
            case AxisKernel::Kind::diagonal:
                v = (i == j) ? li : 0.0;
                break;
            case AxisKernel::Kind::constant:
                v = li * lj;
                break;
            case AxisKernel::Kind::riesz:
                if (mode == DiagonalMode::gauss_offdiag && i != j)
                    v = gauss3_pair_integral(edges[i], edges[i + 1], edges[j], edges[j + 1], k.exponent);
                else
                    v = cell_pair_integral(edges[i], edges[i + 1], edges[j], edges[j + 1], k.exponent);
                v *= k.prefactor;
                break;
            }
            w.a[i * n + j] = v;
            w.a[j * n + i] = v;
        }
    }
    return w;
}

// Apply a symmetric matrix along axis `ax` of a row-major array.
inline std::vector<double> apply_along_axis(const std::vector<double>& t, const std::vector<std::size_t>& shape,
                                            std::size_t ax, const Matrix& w)
{
    std::size_t outer = 1, inner = 1;
    for (std::size_t j = 0; j < ax; ++j) outer *= shape[j];
    for (std::size_t j = ax + 1; j < shape.size(); ++j) inner *= shape[j];
    const std::size_t n = shape[ax];
    std::vector<double> out(t.size(), 0.0);
    for (std::size_t o = 0; o < outer; ++o)
        for (std::size_t i = 0; i < n; ++i) {
            double* dst = &out[(o * n + i) * inner];
            for (std::size_t m = 0; m < n; ++m) {
                const double wim = w.a[i * n + m];
                if (wim == 0.0) continue;
                const double* src = &t[(o * n + m) * inner];
                for (std::size_t k = 0; k < inner; ++k) dst[k] += wim * src[k];
            }
        }
    return out;
}

inline std::vector<std::size_t> panel_shape(const Panels& p)
{
    std::vector<std::size_t> s(p.dim());
    for (std::size_t j = 0; j < p.dim(); ++j) s[j] = p.count(j);
    return s;
}

// sum_{a,b} F_a G_b prod_j W_j(a_j, b_j)
inline double weighted_pair_sum(const std::vector<double>& F, const std::vector<double>& G, const Panels& p,
                                const std::vector<AxisKernel>& kernels, DiagonalMode mode)
{
    const auto shape = panel_shape(p);
    std::vector<double> t = G;
    for (std::size_t j = 0; j < p.dim(); ++j) t = apply_along_axis(t, shape, j, axis_weights(p.edges[j], kernels[j], mode));
    double acc = 0.0, comp = 0.0;
    for (std::size_t i = 0; i < F.size(); ++i) {
        // Neumaier summation
        const double term = F[i] * t[i];
        const double s = acc + term;
        comp += std::abs(acc) >= std::abs(term) ? (acc - s) + term : (term - s) + acc;
        acc = s;
    }
    return acc + comp;
}

inline std::vector<AxisKernel> riesz_kernels(const HurstMultiIndex& H)
{
    std::vector<AxisKernel> k;
    for (std::size_t j = 0; j < H.size(); ++j) k.push_back(riesz_kernel(H[j]));
    return k;
}

} // namespace detail

// <f, g>_H = prod_j H_j(2H_j-1) int int f(u) g(v) prod_j |u_j - v_j|^{2H_j-2}
inline double inner_product_HH(const Integrand& f, const Integrand& g, const HurstMultiIndex& H,
                               const QuadratureConfig& cfg = {})
{
    cfg.validate();
    for (double h : H.values()) detail::require(h > 0.5 && h < 1.0, "inner_product_HH needs H in (1/2, 1)");
    detail::require(f.dim() == H.size() && g.dim() == H.size(), "integrand dimension must equal Hurst length");
    const auto p = detail::make_panels({&f, &g}, cfg.panels);
    const auto F = detail::midpoint_values(f, p);
    const auto G = detail::midpoint_values(g, p);
    return detail::weighted_pair_sum(F, G, p, detail::riesz_kernels(H), cfg.mode);
}

// Sum over prefix sets A_j of A_k (j = 1..k) of
//   int du_{A_j} ( int int |f(u,v)| |f(u,w)| |v-w|^{2H-2} dv dw )^{1/2},
// without the H(2H-1) prefactor. A_j = all axes gives the L1 norm.
inline double hbar_norm(const Integrand& f, const HurstMultiIndex& H, const LimitScenario& scenario,
                        const QuadratureConfig& cfg = {})
{
    cfg.validate();
    const std::size_t d = f.dim();
    const std::size_t k = scenario.k();
    if (d > 3 || k > 2) throw UnsupportedError("hbar_norm supports d <= 3 and k <= 2");
    detail::require(k >= 1, "hbar_norm needs a non-empty A_k");
    detail::require(H.size() == d && scenario.dim == d, "hbar_norm: dimension mismatch");
    const auto p = detail::make_panels({&f}, cfg.panels);
    auto F = detail::midpoint_values(f, p);
    for (double& v : F) v = std::abs(v);
    const auto vol = detail::cell_volumes(p);
    const auto shape = detail::panel_shape(p);

    double total = 0.0;
    for (std::size_t j = 1; j <= k; ++j) {
        std::vector<char> in_a(d, 0);
        for (std::size_t i = 0; i < j; ++i) in_a[scenario.a_axes[i]] = 1;
        if (j == d) {
            double l1 = 0.0;
            for (std::size_t c = 0; c < F.size(); ++c) l1 += F[c] * vol[c];
            total += l1;
            continue;
        }
        // pair the complement axes with the unweighted Riesz kernel; the
        // square root is taken per A_j cell
        std::vector<detail::Matrix> w(d);
        for (std::size_t ax = 0; ax < d; ++ax)
            if (!in_a[ax])
                w[ax] = detail::axis_weights(p.edges[ax], {detail::AxisKernel::Kind::riesz, 2.0 * H[ax] - 2.0, 1.0},
                                             cfg.mode);
        std::vector<double> t = F;
        for (std::size_t ax = 0; ax < d; ++ax)
            if (!in_a[ax]) t = detail::apply_along_axis(t, shape, ax, w[ax]);
        // For each A_j multi-index, sum F * t over the complement cells.
        std::vector<std::size_t> idx(d, 0);
        std::vector<double> inner_sum;
        std::size_t a_count = 1;
        std::vector<std::size_t> a_shape;
        for (std::size_t ax = 0; ax < d; ++ax)
            if (in_a[ax]) {
                a_count *= shape[ax];
                a_shape.push_back(ax);
            }
        inner_sum.assign(a_count, 0.0);
        for (std::size_t c = 0; c < F.size(); ++c) {
            std::size_t a_flat = 0;
            for (auto ax : a_shape) a_flat = a_flat * shape[ax] + idx[ax];
            inner_sum[a_flat] += F[c] * t[c];
            for (std::size_t ax = d; ax-- > 0;) {
                if (++idx[ax] < shape[ax]) break;
                idx[ax] = 0;
            }
        }
        // inner_sum[a] is the double integral at A-cell a; weight its root
        // by the A-cell volume.
        std::vector<std::size_t> aidx(a_shape.size(), 0);
        for (std::size_t a = 0; a < a_count; ++a) {
            double len = 1.0;
            for (std::size_t i = 0; i < a_shape.size(); ++i) len *= p.length(a_shape[i], aidx[i]);
            total += std::sqrt(std::max(0.0, inner_sum[a])) * len;
            for (std::size_t i = a_shape.size(); i-- > 0;) {
                if (++aidx[i] < shape[a_shape[i]]) break;
                aidx[i] = 0;
            }
        }
    }
    return total;
}

struct LpAdmissibility {
    double l1 = 0.0;
    double l2 = 0.0;
    double l_1_over_H = 0.0;
    double abs_hh = 0.0;  // sqrt of <|f|, |f|>_H
    bool admissible = false;
};

// L1, L2 and the anisotropic L^{1/H} norm (exponent 1/H_j on axis j,
// innermost axis last), plus the |H_H| norm of |f|.
inline LpAdmissibility lp_admissibility(const Integrand& f, const HurstMultiIndex& H, const QuadratureConfig& cfg = {})
{
    cfg.validate();
    const std::size_t d = f.dim();
    detail::require(H.size() == d, "lp_admissibility: dimension mismatch");
    const auto p = detail::make_panels({&f}, cfg.panels);
    auto F = detail::midpoint_values(f, p);
    for (double& v : F) v = std::abs(v);
    const auto vol = detail::cell_volumes(p);
    LpAdmissibility r;
    for (std::size_t c = 0; c < F.size(); ++c) {
        r.l1 += F[c] * vol[c];
        r.l2 += F[c] * F[c] * vol[c];
    }
    r.l2 = std::sqrt(r.l2);

    auto shape = detail::panel_shape(p);
    std::vector<double> cur = F;
    for (std::size_t ax = d; ax-- > 0;) {
        const double pexp = 1.0 / H[ax];
        std::size_t outer = 1;
        for (std::size_t j = 0; j < ax; ++j) outer *= shape[j];
        const std::size_t n = shape[ax];
        std::vector<double> next(outer, 0.0);
        for (std::size_t o = 0; o < outer; ++o) {
            double s = 0.0;
            for (std::size_t i = 0; i < n; ++i) s += std::pow(cur[o * n + i], pexp) * p.length(ax, i);
            next[o] = std::pow(s, 1.0 / pexp);
        }
        cur.swap(next);
    }
    r.l_1_over_H = cur[0];
    r.abs_hh = std::sqrt(std::max(0.0, detail::weighted_pair_sum(F, F, p, detail::riesz_kernels(H), cfg.mode)));
    r.admissible = std::isfinite(r.l1) && std::isfinite(r.l2) && std::isfinite(r.l_1_over_H) && std::isfinite(r.abs_hh);
    return r;
}

inline double q_alpha(double alpha)
{
    detail::require(alpha > 0.0 && alpha < 1.0, "q_alpha needs alpha in (0, 1)");
    return std::tgamma(alpha / 2.0) / (std::pow(2.0, 1.0 - alpha) * std::sqrt(std::numbers::pi) *
                                       std::tgamma((1.0 - alpha) / 2.0));
}

struct EffectiveExponents {
    double gamma = 0.0;
    double gamma0 = 0.0;
};

// gamma = d - sum_j H_j and gamma0 = d - k/2 - sum over the complement of
// A_k, all at the scenario's limiting Hurst values.
inline EffectiveExponents effective_exponents(const LimitScenario& s)
{
    s.validate();
    const double d = static_cast<double>(s.dim);
    EffectiveExponents e;
    double sum_all = 0.0, sum_rest = 0.0;
    for (std::size_t j = 0; j < s.dim; ++j) {
        const double h = s.limit_value(j);
        sum_all += h;
        if (!s.in_a(j)) sum_rest += h;
    }
    e.gamma = d - sum_all;
    e.gamma0 = d - 0.5 * static_cast<double>(s.k()) - sum_rest;
    return e;
}

// Limit of <f, f>_H as H_{A_k} -> 1/2 (diagonal collapse), with B_p axes
// at H = 1 (constant kernel) and fixed axes keeping the Riesz kernel.
inline double sigma_limit(const Integrand& f, const LimitScenario& s, const QuadratureConfig& cfg = {})
{
    cfg.validate();
    s.validate();
    detail::require(s.k() >= 1, "sigma_limit needs k >= 1");
    detail::require(s.a_target == LimitTarget::half, "sigma_limit drives A_k to 1/2");
    detail::require(f.dim() == s.dim, "sigma_limit: dimension mismatch");
    std::vector<detail::AxisKernel> k(s.dim);
    for (std::size_t j = 0; j < s.dim; ++j) {
        if (s.in_a(j)) k[j] = {detail::AxisKernel::Kind::diagonal, 0.0, 1.0};
        else if (s.in_b(j)) k[j] = {detail::AxisKernel::Kind::constant, 0.0, 1.0};
        else k[j] = detail::riesz_kernel(s.limit_value(j));
    }
    const auto p = detail::make_panels({&f}, cfg.panels);
    const auto F = detail::midpoint_values(f, p);
    return detail::weighted_pair_sum(F, F, p, k, cfg.mode);
}

// <f, f> with axes in A_k at H = 1 (constant kernel) and the rest Riesz at H.
inline double one_limit_variance(const Integrand& f, const HurstMultiIndex& H, const LimitScenario& s,
                                 const QuadratureConfig& cfg = {})
{
    cfg.validate();
    detail::require(f.dim() == s.dim && H.size() == s.dim, "one_limit_variance: dimension mismatch");
    std::vector<detail::AxisKernel> k(s.dim);
    for (std::size_t j = 0; j < s.dim; ++j)
        k[j] = (s.in_a(j) || s.in_b(j)) ? detail::AxisKernel{detail::AxisKernel::Kind::constant, 0.0, 1.0}
                                        : detail::riesz_kernel(H[j]);
    const auto p = detail::make_panels({&f}, cfg.panels);
    const auto F = detail::midpoint_values(f, p);
    return detail::weighted_pair_sum(F, F, p, k, cfg.mode);
}

// (1/q!^2)(H(2H-1))^2 times the 4-cycle integral with exponents
// a = 2(H-1)r/q on (u,v), (u',v') and b = 2(H-1)(q-r)/q on (u,u'), (v,v').
// Cell-averaged kernels make it trace((P A)^2), O(N^3). H may equal 1.
inline double contraction_norm_sq(const Integrand& f, double H, int q, int r, const QuadratureConfig& cfg = {})
{
    cfg.validate();
    if (f.dim() != 1) throw UnsupportedError("contraction_norm_sq supports d = 1 only");
    detail::require(q >= 2 && q <= 4, "contraction_norm_sq supports 2 <= q <= 4");
    detail::require(r >= 1 && r <= q - 1, "contraction index r must satisfy 1 <= r <= q-1");
    detail::require(H > 0.5 && H <= 1.0, "contraction_norm_sq needs H in (1/2, 1]");
    if (cfg.panels > 1024) throw ResourceError("contraction_norm_sq: at most 1024 panels");
    const auto p = detail::make_panels({&f}, cfg.panels);
    const auto F = detail::midpoint_values(f, p);
    const auto& e = p.edges[0];
    const std::size_t n = p.count(0);
    const double a = 2.0 * (H - 1.0) * r / q;
    const double b = 2.0 * (H - 1.0) * (q - r) / q;
    std::vector<double> A(n * n), P(n * n);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) {
            const double li = p.length(0, i), lj = p.length(0, j);
            const double avg_a = detail::cell_pair_integral(e[i], e[i + 1], e[j], e[j + 1], a) / (li * lj);
            const double avg_b = detail::cell_pair_integral(e[i], e[i + 1], e[j], e[j + 1], b) / (li * lj);
            A[i * n + j] = avg_a;
            P[i * n + j] = F[i] * li * avg_b * F[j] * lj;
        }
    // M = P A; result = trace(M M)
    std::vector<double> M(n * n, 0.0);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t k = 0; k < n; ++k) {
            const double pik = P[i * n + k];
            if (pik == 0.0) continue;
            for (std::size_t j = 0; j < n; ++j) M[i * n + j] += pik * A[k * n + j];
        }
    double tr = 0.0;
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) tr += M[i * n + j] * M[j * n + i];
    const double pre = H * (2.0 * H - 1.0) / factorial(q);
    return pre * pre * tr;
}

inline double limit_covariance_bifractional(double t, double s, double gamma0, double scale)
{
    detail::require(t >= 0.0 && s >= 0.0, "bifractional covariance needs t, s >= 0");
    const double K = 1.0 - gamma0;
    detail::require(K > 0.0 && K <= 1.0, "covariance exponent 1 - gamma0 must lie in (0, 1]");
    return scale * 0.5 / K * (std::pow(t + s, K) - std::pow(std::abs(t - s), K));
}

// (2 pi)^{-k/2} prod_a q_{2H_a - 1} Gamma(1 - H_a) over the fixed axes.
inline double limit_constant(const std::vector<double>& h_fixed, std::size_t k)
{
    double c = std::pow(2.0 * std::numbers::pi, -0.5 * static_cast<double>(k));
    for (double h : h_fixed) {
        detail::require(h > 0.5 && h < 1.0, "fixed Hurst values must lie in (1/2, 1)");
        c *= q_alpha(2.0 * h - 1.0) * std::tgamma(1.0 - h);
    }
    return c;
}

} // namespace hermlab
