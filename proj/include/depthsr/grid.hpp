#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace depthsr {

/// Row-major 2-D grid with interleaved channels.
template <typename T, int Channels = 1>
class Grid {
public:
    using value_type = T;
    static constexpr int channels = Channels;

    Grid() = default;

    Grid(int width, int height, T fill = T{})
        : width_(checked_dim(width)), height_(checked_dim(height)),
          data_(static_cast<std::size_t>(width) * height * Channels, fill) {}

    Grid(int width, int height, std::vector<T> values)
        : width_(checked_dim(width)), height_(checked_dim(height)), data_(std::move(values)) {
        if (data_.size() != static_cast<std::size_t>(width) * height * Channels) {
            throw std::invalid_argument("grid: value count does not match " +
                                        std::to_string(width) + "x" + std::to_string(height));
        }
    }

    int width() const noexcept { return width_; }
    int height() const noexcept { return height_; }
    std::size_t pixel_count() const noexcept { return static_cast<std::size_t>(width_) * height_; }
    bool empty() const noexcept { return data_.empty(); }

    T& at(int x, int y, int c = 0) noexcept {
        return data_[(static_cast<std::size_t>(y) * width_ + x) * Channels + c];
    }
    const T& at(int x, int y, int c = 0) const noexcept {
        return data_[(static_cast<std::size_t>(y) * width_ + x) * Channels + c];
    }

    std::span<T> values() noexcept { return data_; }
    std::span<const T> values() const noexcept { return data_; }
    std::vector<T>& storage() noexcept { return data_; }
    const std::vector<T>& storage() const noexcept { return data_; }

    bool same_size(int w, int h) const noexcept { return width_ == w && height_ == h; }
    template <typename U, int C>
    bool same_size(const Grid<U, C>& other) const noexcept {
        return width_ == other.width() && height_ == other.height();
    }

    friend bool operator==(const Grid&, const Grid&) = default;

private:
    static int checked_dim(int d) {
        if (d < 0) throw std::invalid_argument("grid: negative dimension");
        return d;
    }

    int width_ = 0;
    int height_ = 0;
    std::vector<T> data_;
};

/// Depth in meters, one value per pixel.
using DepthMap = Grid<double, 1>;
/// Normalized RGB intensities in [0, 1].
using RgbImage = Grid<double, 3>;
/// Fixed-point quantization levels.
using LevelGrid = Grid<std::uint32_t, 1>;
/// Nonzero entries mark pixels that take part in an evaluation.
using PixelMask = Grid<std::uint8_t, 1>;

inline PixelMask full_mask(int width, int height) { return PixelMask(width, height, 1); }

/// Throws with the first offending pixel when a value is NaN or infinite.
void require_finite(const DepthMap& depth, const char* what);

void require_unit_range(const RgbImage& rgb);

/// Rec. 601 luma of an RGB image.
Grid<double, 1> luminance(const RgbImage& rgb);

std::pair<double, double> min_max(const DepthMap& depth);

}  // namespace depthsr
