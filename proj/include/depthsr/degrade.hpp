#pragma once

#include <cstdint>
#include <random>
#include <string>
#include <string_view>

#include "depthsr/core.hpp"

namespace depthsr {

/// Variances of the multiplicative (read) and additive Gaussian noise terms.
struct NoiseParams {
    double sigma_r2 = 0.02;
    double sigma_a2 = 0.05;

    void validate() const;
    friend bool operator==(const NoiseParams&, const NoiseParams&) = default;
};

struct DegradationConfig {
    QuantSpec quant{};
    int factor = 8;
    ResampleMethod downscale_method = ResampleMethod::BlockMean;
    NoiseParams noise{};
    std::uint64_t seed = 0;
    bool clamp_nonneg = true;

    void validate() const;
    friend bool operator==(const DegradationConfig&, const DegradationConfig&) = default;
};

/// 64-bit FNV-1a over raw bytes.
std::uint64_t fnv1a64(std::string_view bytes) noexcept;
std::uint64_t splitmix64(std::uint64_t x) noexcept;

/// Deterministic per-image random stream.
///
/// The stream seed is splitmix64(seed ^ fnv1a64(image_id)); uniforms come from
/// std::mt19937_64 seeded with it, mapped to (0, 1) as ((x >> 11) + 0.5) / 2^53.
/// Standard normals are produced in pairs by the Box-Muller transform:
/// r = sqrt(-2 ln u1), z0 = r cos(2 pi u2), z1 = r sin(2 pi u2).
class RngStream {
public:
    RngStream(std::uint64_t seed, std::string_view image_id);

    double uniform() noexcept;
    /// Two independent N(0, 1) draws from one Box-Muller pair.
    std::pair<double, double> normal_pair() noexcept;

    std::uint64_t stream_seed() const noexcept { return stream_seed_; }

private:
    std::uint64_t stream_seed_;
    std::mt19937_64 engine_;
};

/// Noise field n = d * n_r + n_a with independent per-pixel draws. Each pixel
/// consumes one Box-Muller pair in row-major order: the first normal feeds n_r,
/// the second n_a.
DepthMap sample_noise(const DepthMap& d, const NoiseParams& params, RngStream& rng);

/// d + sample_noise(d), optionally clamped to >= 0.
DepthMap add_noise(const DepthMap& d, const NoiseParams& params, RngStream& rng,
                   bool clamp_nonneg);

struct DegradeResult {
    DepthMap lq;            ///< d-hat
    DepthMap intermediate;  ///< d, before noise
};

/// Full HQ to LQ chain: quantize, downscale, add noise.
DegradeResult degrade(const DepthMap& hr, const DegradationConfig& config,
                      std::string_view image_id);

}  // namespace depthsr
