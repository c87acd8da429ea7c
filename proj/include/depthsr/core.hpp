#pragma once

#include <cstdint>
#include <string>
#include <string_view>

#include "depthsr/grid.hpp"

namespace depthsr {

/// Linear fixed-point encoding of depth over [d_min, d_max] with 2^bits levels.
struct QuantSpec {
    int bits = 12;
    double d_min = 0.0;
    double d_max = 20.0;

    std::uint32_t max_level() const noexcept { return (std::uint32_t{1} << bits) - 1u; }
    double step() const noexcept { return (d_max - d_min) / static_cast<double>(max_level()); }

    /// Throws std::invalid_argument unless 1 <= bits <= 16 and d_min < d_max (both finite).
    void validate() const;

    friend bool operator==(const QuantSpec&, const QuantSpec&) = default;
};

/// round((clamp(v) - d_min) / step), ties away from zero.
std::uint32_t quantize_value(double v, const QuantSpec& spec);
double dequantize_value(std::uint32_t level, const QuantSpec& spec);

LevelGrid quantize(const DepthMap& depth, const QuantSpec& spec);
DepthMap dequantize(const LevelGrid& levels, const QuantSpec& spec);

/// Re-quantizes depth onto the QuantSpec level grid and returns meters. Idempotent.
DepthMap bitdepth_reduce(const DepthMap& depth, const QuantSpec& spec);

enum class ResampleMethod { BlockMean, Nearest, Bilinear, Bicubic };

std::string_view to_string(ResampleMethod method);
/// Accepts "block-mean", "nearest", "bilinear", "bicubic".
ResampleMethod parse_resample_method(std::string_view name);

/// Shrinks by an integer factor. Block-mean requires both dimensions divisible
/// by the factor; the other methods sample the source at output pixel centers.
DepthMap downscale(const DepthMap& depth, int factor = 8,
                   ResampleMethod method = ResampleMethod::BlockMean);

/// Enlarges by an integer factor with clamp-to-edge borders. Block-mean is
/// treated as nearest (pixel replication).
DepthMap upscale(const DepthMap& depth, int factor, ResampleMethod method);

/// Catmull-Rom (a = -0.5) cubic convolution weight.
double cubic_weight(double t) noexcept;

template <typename T, int C>
Grid<T, C> flip_horizontal(const Grid<T, C>& grid) {
    Grid<T, C> out(grid.width(), grid.height());
    const int w = grid.width();
    for (int y = 0; y < grid.height(); ++y) {
        for (int x = 0; x < w; ++x) {
            for (int c = 0; c < C; ++c) out.at(w - 1 - x, y, c) = grid.at(x, y, c);
        }
    }
    return out;
}

/// Area average of an RGB guide, used to bring it to the depth grid.
RgbImage downscale_rgb(const RgbImage& rgb, int factor);

}  // namespace depthsr
