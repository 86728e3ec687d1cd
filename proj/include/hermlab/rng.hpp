#pragma once

#include <cmath>
#include <cstddef>
#include <cstdint>

namespace hermlab {

namespace detail {

// SplitMix64 finalizer; a bijection on 64-bit words.
constexpr std::uint64_t mix64(std::uint64_t z) noexcept
{
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

constexpr std::uint64_t golden_gamma = 0x9e3779b97f4a7c15ULL;

constexpr std::uint64_t rotl(std::uint64_t x, int k) noexcept
{
    return (x << k) | (x >> (64 - k));
}

} // namespace detail

// xoshiro256** with a Marsaglia polar normal generator. The normal
// transform is implemented here (not std::normal_distribution) so draws
// are identical across standard libraries.
class Stream {
public:
    explicit Stream(std::uint64_t key = 0) noexcept : id_(key)
    {
        std::uint64_t s = key;
        for (auto& w : s_) {
            s += detail::golden_gamma;
            w = detail::mix64(s);
        }
    }

    std::uint64_t id() const noexcept { return id_; }

    std::uint64_t next_u64() noexcept
    {
        const std::uint64_t result = detail::rotl(s_[1] * 5, 7) * 9;
        const std::uint64_t t = s_[1] << 17;
        s_[2] ^= s_[0];
        s_[3] ^= s_[1];
        s_[1] ^= s_[2];
        s_[0] ^= s_[3];
        s_[2] ^= t;
        s_[3] = detail::rotl(s_[3], 45);
        return result;
    }

    // uniform on the open interval (0,1)
    double uniform() noexcept
    {
        return (static_cast<double>(next_u64() >> 11) + 0.5) * 0x1.0p-53;
    }

    double normal() noexcept
    {
        if (has_spare_) {
            has_spare_ = false;
            return spare_;
        }
        double u, v, s;
        do {
            u = 2.0 * uniform() - 1.0;
            v = 2.0 * uniform() - 1.0;
            s = u * u + v * v;
        } while (s >= 1.0 || s == 0.0);
        const double m = std::sqrt(-2.0 * std::log(s) / s);
        spare_ = v * m;
        has_spare_ = true;
        return u * m;
    }

    void fill_normal(double* out, std::size_t n) noexcept
    {
        for (std::size_t i = 0; i < n; ++i) out[i] = normal();
    }

private:
    std::uint64_t s_[4];
    std::uint64_t id_;
    double spare_ = 0.0;
    bool has_spare_ = false;
};

// Stream key is mix64(seed + (index+1)*gamma): injective in index for a
// fixed seed, so keys never collide within one run.
inline Stream derive_stream(std::uint64_t master_seed, std::uint64_t replicate_index) noexcept
{
    return Stream(detail::mix64(master_seed + (replicate_index + 1) * detail::golden_gamma));
}

} // namespace hermlab
