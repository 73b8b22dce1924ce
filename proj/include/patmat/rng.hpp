#pragma once

#include <cmath>
#include <cstdint>
#include <random>

#include <Eigen/Core>

namespace patmat {

/// Finalizer from the splitmix64 generator; bijective on 64-bit words.
constexpr std::uint64_t mix64(std::uint64_t z) noexcept {
    z += 0x9e3779b97f4a7c15ULL;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

/// Derives the seed of an independent substream, so that replicate r of an
/// experiment draws from (seed, r) without sharing generator state.
constexpr std::uint64_t derive_stream(std::uint64_t seed, std::uint64_t index) noexcept {
    return mix64(mix64(seed) ^ mix64(index + 0x632be59bd9b4e019ULL));
}

/// Standard-normal sampler: mt19937_64 driving a polar Box-Muller transform.
/// Both stages are fully specified here (no std::distribution involved), so a
/// given seed reproduces the same values on any platform with the same libm.
class NormalSampler {
public:
    explicit NormalSampler(std::uint64_t stream_seed) : engine_(stream_seed) {}

    double operator()() {
        if (has_spare_) {
            has_spare_ = false;
            return spare_;
        }
        double u, v, s;
        do {
            u = 2.0 * uniform01() - 1.0;
            v = 2.0 * uniform01() - 1.0;
            s = u * u + v * v;
        } while (s >= 1.0 || s == 0.0);
        const double factor = std::sqrt(-2.0 * std::log(s) / s);
        spare_ = v * factor;
        has_spare_ = true;
        return u * factor;
    }

private:
    double uniform01() {
        return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
    }

    std::mt19937_64 engine_;
    double spare_ = 0.0;
    bool has_spare_ = false;
};

/// len i.i.d. N(0,1) draws from the given substream seed.
inline Eigen::VectorXd gaussian_vector(Eigen::Index len, std::uint64_t stream_seed) {
    NormalSampler sampler(stream_seed);
    Eigen::VectorXd out(len);
    for (Eigen::Index i = 0; i < len; ++i) out[i] = sampler();
    return out;
}

} // namespace patmat
