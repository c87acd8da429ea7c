#include "depthsr/degrade.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

namespace depthsr {

void NoiseParams::validate() const {
    if (!(sigma_r2 >= 0.0) || !(sigma_a2 >= 0.0) || !std::isfinite(sigma_r2) ||
        !std::isfinite(sigma_a2)) {
        throw std::invalid_argument("noise: variances must be finite and >= 0");
    }
}

void DegradationConfig::validate() const {
    quant.validate();
    noise.validate();
    if (factor < 1) throw std::invalid_argument("degrade: factor must be >= 1");
}

std::uint64_t fnv1a64(std::string_view bytes) noexcept {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : bytes) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    return h;
}

std::uint64_t splitmix64(std::uint64_t x) noexcept {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

RngStream::RngStream(std::uint64_t seed, std::string_view image_id)
    : stream_seed_(splitmix64(seed ^ fnv1a64(image_id))), engine_(stream_seed_) {}

double RngStream::uniform() noexcept {
    return (static_cast<double>(engine_() >> 11) + 0.5) * 0x1.0p-53;
}

std::pair<double, double> RngStream::normal_pair() noexcept {
    const double u1 = uniform();
    const double u2 = uniform();
    const double r = std::sqrt(-2.0 * std::log(u1));
    const double theta = 2.0 * std::numbers::pi * u2;
    return {r * std::cos(theta), r * std::sin(theta)};
}

DepthMap sample_noise(const DepthMap& d, const NoiseParams& params, RngStream& rng) {
    params.validate();
    const double sigma_r = std::sqrt(params.sigma_r2);
    const double sigma_a = std::sqrt(params.sigma_a2);
    DepthMap n(d.width(), d.height());
    auto src = d.values();
    auto dst = n.values();
    for (std::size_t i = 0; i < src.size(); ++i) {
        const auto [zr, za] = rng.normal_pair();
        dst[i] = src[i] * (sigma_r * zr) + sigma_a * za;
    }
    return n;
}

DepthMap add_noise(const DepthMap& d, const NoiseParams& params, RngStream& rng,
                   bool clamp_nonneg) {
    DepthMap out = sample_noise(d, params, rng);
    auto src = d.values();
    auto dst = out.values();
    for (std::size_t i = 0; i < src.size(); ++i) {
        dst[i] += src[i];
        if (clamp_nonneg) dst[i] = std::max(dst[i], 0.0);
    }
    return out;
}

DegradeResult degrade(const DepthMap& hr, const DegradationConfig& config,
                      std::string_view image_id) {
    config.validate();
    if (hr.width() % config.factor != 0 || hr.height() % config.factor != 0) {
        throw std::invalid_argument("degrade: " + std::to_string(hr.width()) + "x" +
                                    std::to_string(hr.height()) + " not divisible by factor " +
                                    std::to_string(config.factor));
    }
    DegradeResult result;
    result.intermediate =
        downscale(bitdepth_reduce(hr, config.quant), config.factor, config.downscale_method);
    RngStream rng(config.seed, image_id);
    result.lq = add_noise(result.intermediate, config.noise, rng, config.clamp_nonneg);
    return result;
}

}  // namespace depthsr
