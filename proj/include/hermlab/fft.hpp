#pragma once

#include "errors.hpp"

#include <fftw3.h>

#include <cstddef>
#include <memory>
#include <mutex>
#include <vector>

namespace hermlab::detail {

// FFTW's planner is not thread-safe; execution with new arrays is.
inline std::mutex& fftw_planner_mutex()
{
    static std::mutex m;
    return m;
}

struct FftwFree {
    void operator()(void* p) const noexcept { fftw_free(p); }
};

using RealBuffer = std::unique_ptr<double, FftwFree>;
using ComplexBuffer = std::unique_ptr<fftw_complex, FftwFree>;

inline RealBuffer alloc_real(std::size_t n)
{
    auto* p = fftw_alloc_real(n);
    if (!p) throw ResourceError("fftw_alloc_real failed");
    return RealBuffer(p);
}

inline ComplexBuffer alloc_complex(std::size_t n)
{
    auto* p = fftw_alloc_complex(n);
    if (!p) throw ResourceError("fftw_alloc_complex failed");
    return ComplexBuffer(p);
}

// Pair of unnormalized multi-dimensional r2c / c2r transforms of fixed shape.
class RealFFT {
public:
    explicit RealFFT(std::vector<int> shape) : shape_(std::move(shape))
    {
        real_size_ = 1;
        for (int s : shape_) real_size_ *= static_cast<std::size_t>(s);
        complex_size_ = real_size_ / static_cast<std::size_t>(shape_.back()) *
                        (static_cast<std::size_t>(shape_.back()) / 2 + 1);
        auto in = alloc_real(real_size_);
        auto out = alloc_complex(complex_size_);
        std::lock_guard<std::mutex> lock(fftw_planner_mutex());
        const int rank = static_cast<int>(shape_.size());
        fwd_ = fftw_plan_dft_r2c(rank, shape_.data(), in.get(), out.get(), FFTW_ESTIMATE);
        inv_ = fftw_plan_dft_c2r(rank, shape_.data(), out.get(), in.get(), FFTW_ESTIMATE);
        if (!fwd_ || !inv_) throw InternalError("FFTW planning failed");
    }

    RealFFT(const RealFFT&) = delete;
    RealFFT& operator=(const RealFFT&) = delete;

    ~RealFFT()
    {
        std::lock_guard<std::mutex> lock(fftw_planner_mutex());
        if (fwd_) fftw_destroy_plan(fwd_);
        if (inv_) fftw_destroy_plan(inv_);
    }

    std::size_t real_size() const noexcept { return real_size_; }
    std::size_t complex_size() const noexcept { return complex_size_; }
    const std::vector<int>& shape() const noexcept { return shape_; }

    // Buffers must come from alloc_real / alloc_complex so alignment matches the plan.
    void forward(double* in, fftw_complex* out) const { fftw_execute_dft_r2c(fwd_, in, out); }
    void inverse(fftw_complex* in, double* out) const { fftw_execute_dft_c2r(inv_, in, out); }

private:
    std::vector<int> shape_;
    std::size_t real_size_ = 0;
    std::size_t complex_size_ = 0;
    fftw_plan fwd_ = nullptr;
    fftw_plan inv_ = nullptr;
};

} // namespace hermlab::detail
