#pragma once

#include "core.hpp"
#include "fft.hpp"

#include <cmath>
#include <cstddef>
#include <functional>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

namespace hermlab {

// Probabilists' Hermite polynomial via H_{q+1} = x H_q - q H_{q-1}.
inline double hermite_poly(int q, double x)
{
    detail::require(q >= 0, "hermite_poly needs q >= 0");
    if (q == 0) return 1.0;
    double h0 = 1.0, h1 = x;
    for (int k = 1; k < q; ++k) {
        const double h2 = x * h1 - k * h0;
        h0 = h1;
        h1 = h2;
    }
    return h1;
}

inline double factorial(int n)
{
    double f = 1.0;
    for (int k = 2; k <= n; ++k) f *= k;
    return f;
}

inline double sample_hermite_limit_rv(int q, Stream& stream)
{
    detail::require(q >= 1, "sample_hermite_limit_rv needs q >= 1");
    return hermite_poly(q, stream.normal()) / std::sqrt(factorial(q));
}

// Autocovariance of unit-variance fractional Gaussian noise at integer lag k.
inline double fgn_autocov(double H, double k)
{
    const double h2 = 2.0 * H;
    return 0.5 * (std::pow(std::abs(k + 1.0), h2) - 2.0 * std::pow(std::abs(k), h2) + std::pow(std::abs(k - 1.0), h2));
}

namespace detail {

inline std::size_t next_pow2(std::size_t n)
{
    std::size_t p = 1;
    while (p < n) p <<= 1;
    return p;
}

// Stationary Gaussian array with separable covariance prod_j r_j(k_j),
// sampled exactly by circulant embedding: X = C^{1/2} E with C^{1/2}
// applied through the FFT of real white noise E.
class CirculantGaussian {
public:
    using Autocov = std::function<double(std::size_t axis, std::size_t lag)>;

    CirculantGaussian(std::vector<std::size_t> n, const Autocov& r) : n_(std::move(n))
    {
        const std::size_t d = n_.size();
        std::vector<int> shape(d);
        std::vector<std::vector<double>> lam(d);
        for (std::size_t j = 0; j < d; ++j) {
            const std::size_t m = std::max<std::size_t>(2, next_pow2(2 * (n_[j] > 1 ? n_[j] - 1 : 1)));
            shape[j] = static_cast<int>(m);
            lam[j] = embedding_eigenvalues(j, m, r);
        }
        fft_ = std::make_unique<RealFFT>(shape);
        // sqrt of separable eigenvalues on the r2c half spectrum, with the
        // 1/M of the unnormalized inverse folded in
        const std::size_t last = static_cast<std::size_t>(shape.back());
        const std::size_t half = last / 2 + 1;
        const double inv_total = 1.0 / static_cast<double>(fft_->real_size());
        filter_.resize(fft_->complex_size());
        std::vector<std::size_t> idx(d, 0);
        for (std::size_t flat = 0; flat < filter_.size(); ++flat) {
            std::size_t rem = flat;
            double prod = 1.0;
            for (std::size_t j = d; j-- > 0;) {
                const std::size_t ext = (j + 1 == d) ? half : static_cast<std::size_t>(shape[j]);
                idx[j] = rem % ext;
                rem /= ext;
                prod *= lam[j][idx[j]];
            }
            filter_[flat] = std::sqrt(prod) * inv_total;
        }
        shape_ = std::move(shape);
    }

    std::size_t size() const
    {
        std::size_t s = 1;
        for (auto v : n_) s *= v;
        return s;
    }

    // Writes prod_j n_j values, row-major, into out.
    void sample(Stream& stream, double* out) const
    {
        auto white = alloc_real(fft_->real_size());
        auto spec = alloc_complex(fft_->complex_size());
        stream.fill_normal(white.get(), fft_->real_size());
        fft_->forward(white.get(), spec.get());
        for (std::size_t i = 0; i < filter_.size(); ++i) {
            spec.get()[i][0] *= filter_[i];
            spec.get()[i][1] *= filter_[i];
        }
        fft_->inverse(spec.get(), white.get());
        // copy the leading n_1 x ... x n_d block
        const std::size_t d = n_.size();
        std::vector<std::size_t> idx(d, 0);
        const std::size_t total = size();
        for (std::size_t k = 0; k < total; ++k) {
            std::size_t src = 0;
            for (std::size_t j = 0; j < d; ++j) src = src * static_cast<std::size_t>(shape_[j]) + idx[j];
            out[k] = white.get()[src];
            for (std::size_t j = d; j-- > 0;) {
                if (++idx[j] < n_[j]) break;
                idx[j] = 0;
            }
        }
    }

private:
    static std::vector<double> embedding_eigenvalues(std::size_t axis, std::size_t m, const Autocov& r)
    {
        RealFFT f({static_cast<int>(m)});
        auto c = alloc_real(m);
        auto out = alloc_complex(f.complex_size());
        for (std::size_t k = 0; k < m; ++k) c.get()[k] = r(axis, std::min(k, m - k));
        f.forward(c.get(), out.get());
        std::vector<double> lam(m);
        for (std::size_t k = 0; k < m; ++k) {
            const std::size_t kk = k <= m / 2 ? k : m - k;
            double v = out.get()[kk][0];
            if (v < -1e-10) {
                std::ostringstream os;
                os << "circulant embedding not positive definite: eigenvalue " << v << " at index " << k
                   << " (axis " << axis << ", size " << m << ")";
                throw InternalError(os.str());
            }
            lam[k] = v < 0.0 ? 0.0 : v;
        }
        return lam;
    }

    std::vector<std::size_t> n_;
    std::vector<int> shape_;
    std::unique_ptr<RealFFT> fft_;
    std::vector<double> filter_;
};

// In-place inclusive prefix sums along every axis of a row-major array.
inline void prefix_sum_all_axes(std::vector<double>& a, const std::vector<std::size_t>& shape)
{
    const std::size_t d = shape.size();
    for (std::size_t ax = 0; ax < d; ++ax) {
        std::size_t outer = 1, inner = 1;
        for (std::size_t j = 0; j < ax; ++j) outer *= shape[j];
        for (std::size_t j = ax + 1; j < d; ++j) inner *= shape[j];
        const std::size_t n = shape[ax];
        for (std::size_t o = 0; o < outer; ++o)
            for (std::size_t i = 1; i < n; ++i) {
                double* cur = &a[(o * n + i) * inner];
                const double* prev = cur - inner;
                for (std::size_t k = 0; k < inner; ++k) cur[k] += prev[k];
            }
    }
}

// Cell array (fine cells, shape fine) -> field values at grid nodes, where
// grid node i on axis j sits at fine node i*stride[j]. Node 0 is the origin.
inline std::vector<double> nodes_from_cells(std::vector<double>& cells, const std::vector<std::size_t>& fine,
                                            const GridSpec& grid, const std::vector<std::size_t>& stride,
                                            double scale)
{
    prefix_sum_all_axes(cells, fine);
    const std::size_t d = fine.size();
    std::vector<double> out(grid.node_count(), 0.0);
    std::vector<std::size_t> idx(d, 0);
    for (std::size_t k = 0; k < out.size(); ++k) {
        bool on_axis = false;
        std::size_t src = 0;
        for (std::size_t j = 0; j < d; ++j) {
            if (idx[j] == 0) on_axis = true;
            src = src * fine[j] + (idx[j] == 0 ? 0 : idx[j] * stride[j] - 1);
        }
        out[k] = on_axis ? 0.0 : scale * cells[src];
        for (std::size_t j = d; j-- > 0;) {
            if (++idx[j] <= grid.steps[j]) break;
            idx[j] = 0;
        }
    }
    return out;
}

} // namespace detail

// Fractional Brownian sheet on a grid, covariance prod_j R_{H_j}; entries of
// H may be anywhere in (0, 1). Construct once, sample per replicate.
class FractionalSheetGenerator {
public:
    FractionalSheetGenerator(std::vector<double> hurst, GridSpec grid) : hurst_(std::move(hurst)), grid_(std::move(grid))
    {
        detail::require(hurst_.size() == grid_.dim(), "Hurst length must equal grid dimension");
        for (double h : hurst_) detail::require(h > 0.0 && h < 1.0, "fractional sheet needs H in (0, 1)");
        const auto& hv = hurst_;
        gen_ = std::make_unique<detail::CirculantGaussian>(
            grid_.steps, [&hv](std::size_t ax, std::size_t k) { return fgn_autocov(hv[ax], static_cast<double>(k)); });
        scale_ = 1.0;
        for (std::size_t j = 0; j < grid_.dim(); ++j) scale_ *= std::pow(grid_.mesh(j), hurst_[j]);
    }

    RandomField sample(Stream& stream) const
    {
        std::vector<double> cells(gen_->size());
        gen_->sample(stream, cells.data());
        RandomField f;
        f.grid = grid_;
        f.values = detail::nodes_from_cells(cells, grid_.steps, grid_, std::vector<std::size_t>(grid_.dim(), 1), scale_);
        f.meta = FieldMeta{1, hurst_, stream.id(), "circulant_fgn", 1};
        return f;
    }

private:
    std::vector<double> hurst_;
    GridSpec grid_;
    std::unique_ptr<detail::CirculantGaussian> gen_;
    double scale_ = 1.0;
};

inline RandomField simulate_fractional_gaussian_sheet(const std::vector<double>& hurst, const GridSpec& grid,
                                                      Stream& stream)
{
    return FractionalSheetGenerator(hurst, grid).sample(stream);
}

inline std::size_t default_n_internal(std::size_t d) { return d == 1 ? (std::size_t{1} << 14) : (std::size_t{1} << 9); }

// Hermite-rank construction. The Gaussian input has separable correlation
// prod_j rho_{H_j}(k_j)^{1/q}, so H_q of it has covariance
// q! prod_j rho_{H_j}(k_j): the fGn structure of the target, exactly. Its
// normalized rectangular sums therefore have covariance prod_j R_{H_j} at
// fine nodes with the closed-form factor prod_j h_j^{H_j} / sqrt(q!).
class HermiteSheetGenerator {
public:
    HermiteSheetGenerator(HermiteSpec spec, GridSpec grid, std::size_t n_internal)
        : spec_(std::move(spec)), grid_(std::move(grid)), n_internal_(n_internal)
    {
        detail::require(spec_.q >= 1, "Hermite sheet needs q >= 1");
        detail::require(spec_.dim() == grid_.dim(), "Hermite spec dimension must equal grid dimension");
        detail::require(n_internal_ >= 64, "n_internal must be >= 64");
        const std::size_t d = grid_.dim();
        fine_.resize(d);
        stride_.resize(d);
        std::size_t total = 1;
        for (std::size_t j = 0; j < d; ++j) {
            stride_[j] = std::max<std::size_t>(1, (n_internal_ + grid_.steps[j] - 1) / grid_.steps[j]);
            fine_[j] = grid_.steps[j] * stride_[j];
            total *= fine_[j];
        }
        if (total > (std::size_t{1} << 24)) throw ResourceError("Hermite sheet fine mesh exceeds 2^24 cells");
        const auto hv = spec_.hurst.values();
        const double inv_q = 1.0 / spec_.q;
        gen_ = std::make_unique<detail::CirculantGaussian>(fine_, [hv, inv_q](std::size_t ax, std::size_t k) {
            return std::pow(fgn_autocov(hv[ax], static_cast<double>(k)), inv_q);
        });
        scale_ = 1.0 / std::sqrt(factorial(spec_.q));
        for (std::size_t j = 0; j < d; ++j)
            scale_ *= std::pow(grid_.extent[j] / static_cast<double>(fine_[j]), spec_.hurst[j]);
    }

    const std::vector<std::size_t>& fine_shape() const noexcept { return fine_; }

    RandomField sample(Stream& stream) const
    {
        std::vector<double> cells(gen_->size());
        gen_->sample(stream, cells.data());
        const int q = spec_.q;
        if (q > 1)
            for (double& x : cells) x = hermite_poly(q, x);
        RandomField f;
        f.grid = grid_;
        f.values = detail::nodes_from_cells(cells, fine_, grid_, stride_, scale_);
        f.meta = FieldMeta{q, spec_.hurst.values(), stream.id(), "hermite_rank", n_internal_};
        return f;
    }

private:
    HermiteSpec spec_;
    GridSpec grid_;
    std::size_t n_internal_;
    std::vector<std::size_t> fine_;
    std::vector<std::size_t> stride_;
    std::unique_ptr<detail::CirculantGaussian> gen_;
    double scale_ = 1.0;
};

inline RandomField simulate_hermite_sheet(const HermiteSpec& spec, const GridSpec& grid, std::size_t n_internal,
                                          Stream& stream)
{
    return HermiteSheetGenerator(spec, grid, n_internal).sample(stream);
}

inline void write_csv(const RandomField& field, std::ostream& os)
{
    const auto& g = field.grid;
    const std::size_t d = g.dim();
    for (std::size_t j = 0; j < d; ++j) os << "axis" << j << ',';
    os << "value\n";
    std::vector<std::size_t> idx(d, 0);
    char buf[64];
    for (std::size_t k = 0; k < field.values.size(); ++k) {
        for (std::size_t j = 0; j < d; ++j) {
            std::snprintf(buf, sizeof buf, "%.10g,", g.coord(j, idx[j]));
            os << buf;
        }
        std::snprintf(buf, sizeof buf, "%.17g\n", field.values[k]);
        os << buf;
        for (std::size_t j = d; j-- > 0;) {
            if (++idx[j] <= g.steps[j]) break;
            idx[j] = 0;
        }
    }
}

// ---------------------------------------------------------------------------
// Brute-force multiple Wiener integral on a small cell grid.

struct ChaosKernel {
    int q = 1;
    std::size_t cells = 0;      // cells in the base grid over R^d
    double cell_volume = 0.0;
    std::vector<double> table;  // cells^q entries, row-major over (y_1, ..., y_q)
};

inline constexpr std::size_t chaos_kernel_cap = std::size_t{1} << 22;

// Tabulates f at cell midpoints of `grid` (the base grid over R^d) for each
// of the q arguments. f receives q*d coordinates.
inline ChaosKernel make_chaos_kernel(int q, const GridSpec& grid,
                                     const std::function<double(std::span<const double>)>& f,
                                     std::size_t cap = chaos_kernel_cap)
{
    detail::require(q >= 1, "chaos kernel needs q >= 1");
    const std::size_t d = grid.dim();
    std::size_t cells = 1;
    double vol = 1.0;
    for (std::size_t j = 0; j < d; ++j) {
        cells *= grid.steps[j];
        vol *= grid.mesh(j);
    }
    double total = 1.0;
    for (int i = 0; i < q; ++i) total *= static_cast<double>(cells);
    if (total > static_cast<double>(cap)) throw ResourceError("chaos kernel table exceeds cap (cells^q > cap)");
    const std::size_t n = static_cast<std::size_t>(total);

    std::vector<std::vector<double>> mid(cells, std::vector<double>(d));
    for (std::size_t c = 0; c < cells; ++c) {
        std::size_t rem = c;
        for (std::size_t j = d; j-- > 0;) {
            const std::size_t i = rem % grid.steps[j];
            rem /= grid.steps[j];
            mid[c][j] = grid.coord(j, i) + 0.5 * grid.mesh(j);
        }
    }
    ChaosKernel k{q, cells, vol, std::vector<double>(n)};
    std::vector<double> arg(static_cast<std::size_t>(q) * d);
    for (std::size_t flat = 0; flat < n; ++flat) {
        std::size_t rem = flat;
        for (int a = q; a-- > 0;) {
            const std::size_t c = rem % cells;
            rem /= cells;
            std::copy(mid[c].begin(), mid[c].end(), arg.begin() + static_cast<std::ptrdiff_t>(a * d));
        }
        k.table[flat] = f(arg);
    }
    return k;
}

namespace detail {

inline double chaos_sum(const ChaosKernel& k, const double* w, int level, std::size_t offset, std::vector<char>& used)
{
    if (level == k.q) return k.table[offset];
    double acc = 0.0;
    for (std::size_t c = 0; c < k.cells; ++c) {
        if (used[c]) continue;
        used[c] = 1;
        acc += w[c] * chaos_sum(k, w, level + 1, offset * k.cells + c, used);
        used[c] = 0;
    }
    return acc;
}

inline double chaos_norm_sum(const ChaosKernel& k, int level, std::size_t offset, std::vector<char>& used)
{
    if (level == k.q) return k.table[offset] * k.table[offset];
    double acc = 0.0;
    for (std::size_t c = 0; c < k.cells; ++c) {
        if (used[c]) continue;
        used[c] = 1;
        acc += chaos_norm_sum(k, level + 1, offset * k.cells + c, used);
        used[c] = 0;
    }
    return acc;
}

} // namespace detail

// Off-diagonal sum of kernel * prod of the given white-noise increments.
inline double chaos_oracle_eval(const ChaosKernel& k, std::span<const double> increments)
{
    detail::require(increments.size() == k.cells, "chaos oracle: increment count must equal cell count");
    std::vector<char> used(k.cells, 0);
    return detail::chaos_sum(k, increments.data(), 0, 0, used);
}

inline double chaos_oracle_sample(const ChaosKernel& k, Stream& stream)
{
    std::vector<double> w(k.cells);
    const double sd = std::sqrt(k.cell_volume);
    for (auto& x : w) x = sd * stream.normal();
    return chaos_oracle_eval(k, w);
}

// Squared L2 norm of the step kernel with its diagonals removed.
inline double chaos_kernel_norm_sq(const ChaosKernel& k)
{
    std::vector<char> used(k.cells, 0);
    return detail::chaos_norm_sum(k, 0, 0, used) * std::pow(k.cell_volume, k.q);
}

} // namespace hermlab
