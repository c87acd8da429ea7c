#include "depthsr/core.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <stdexcept>

namespace depthsr {

void require_finite(const DepthMap& depth, const char* what) {
    for (int y = 0; y < depth.height(); ++y) {
        for (int x = 0; x < depth.width(); ++x) {
            if (!std::isfinite(depth.at(x, y))) {
                throw std::invalid_argument(std::string(what) + ": non-finite depth at (" +
                                            std::to_string(x) + ", " + std::to_string(y) + ")");
            }
        }
    }
}

void require_unit_range(const RgbImage& rgb) {
    for (double v : rgb.values()) {
        if (!(v >= 0.0 && v <= 1.0)) throw std::invalid_argument("rgb: intensity outside [0, 1]");
    }
}

Grid<double, 1> luminance(const RgbImage& rgb) {
    Grid<double, 1> out(rgb.width(), rgb.height());
    for (int y = 0; y < rgb.height(); ++y) {
        for (int x = 0; x < rgb.width(); ++x) {
            out.at(x, y) = 0.299 * rgb.at(x, y, 0) + 0.587 * rgb.at(x, y, 1) + 0.114 * rgb.at(x, y, 2);
        }
    }
    return out;
}

std::pair<double, double> min_max(const DepthMap& depth) {
    if (depth.empty()) throw std::invalid_argument("min_max: empty map");
    auto [lo, hi] = std::minmax_element(depth.values().begin(), depth.values().end());
    return {*lo, *hi};
}

void QuantSpec::validate() const {
    if (bits < 1 || bits > 16) {
        throw std::invalid_argument("quant: bits must be in [1, 16], got " + std::to_string(bits));
    }
    if (!std::isfinite(d_min) || !std::isfinite(d_max) || !(d_min < d_max)) {
        throw std::invalid_argument("quant: require finite d_min < d_max");
    }
}

std::uint32_t quantize_value(double v, const QuantSpec& spec) {
    const double clamped = std::clamp(v, spec.d_min, spec.d_max);
    // std::round rounds half away from zero; the argument is never negative here.
    const double level =
        std::round((clamped - spec.d_min) * static_cast<double>(spec.max_level()) / (spec.d_max - spec.d_min));
    return std::min(static_cast<std::uint32_t>(level), spec.max_level());
}

double dequantize_value(std::uint32_t level, const QuantSpec& spec) {
    if (level == spec.max_level()) return spec.d_max;
    return spec.d_min + static_cast<double>(level) * spec.step();
}

LevelGrid quantize(const DepthMap& depth, const QuantSpec& spec) {
    spec.validate();
    require_finite(depth, "quantize");
    LevelGrid out(depth.width(), depth.height());
    auto src = depth.values();
    auto dst = out.values();
    for (std::size_t i = 0; i < src.size(); ++i) dst[i] = quantize_value(src[i], spec);
    return out;
}

DepthMap dequantize(const LevelGrid& levels, const QuantSpec& spec) {
    spec.validate();
    DepthMap out(levels.width(), levels.height());
    auto src = levels.values();
    auto dst = out.values();
    for (std::size_t i = 0; i < src.size(); ++i) {
        if (src[i] > spec.max_level()) {
            const auto x = static_cast<int>(i % levels.width());
            const auto y = static_cast<int>(i / levels.width());
            throw std::invalid_argument("dequantize: level " + std::to_string(src[i]) +
                                        " out of range at (" + std::to_string(x) + ", " +
                                        std::to_string(y) + ")");
        }
        dst[i] = dequantize_value(src[i], spec);
    }
    return out;
}

DepthMap bitdepth_reduce(const DepthMap& depth, const QuantSpec& spec) {
    return dequantize(quantize(depth, spec), spec);
}

std::string_view to_string(ResampleMethod method) {
    switch (method) {
        case ResampleMethod::BlockMean: return "block-mean";
        case ResampleMethod::Nearest: return "nearest";
        case ResampleMethod::Bilinear: return "bilinear";
        case ResampleMethod::Bicubic: return "bicubic";
    }
    return "?";
}

ResampleMethod parse_resample_method(std::string_view name) {
    if (name == "block-mean") return ResampleMethod::BlockMean;
    if (name == "nearest") return ResampleMethod::Nearest;
    if (name == "bilinear") return ResampleMethod::Bilinear;
    if (name == "bicubic") return ResampleMethod::Bicubic;
    throw std::invalid_argument("unknown resample method '" + std::string(name) + "'");
}

double cubic_weight(double t) noexcept {
    constexpr double a = -0.5;
    t = std::abs(t);
    if (t <= 1.0) return ((a + 2.0) * t - (a + 3.0)) * t * t + 1.0;
    if (t < 2.0) return ((a * t - 5.0 * a) * t + 8.0 * a) * t - 4.0 * a;
    return 0.0;
}

namespace {

int clamp_index(int i, int n) { return std::clamp(i, 0, n - 1); }

// Samples at continuous source coordinate (u, v), pixel centers at integers.
double sample(const DepthMap& src, double u, double v, ResampleMethod method) {
    const int w = src.width();
    const int h = src.height();
    switch (method) {
        case ResampleMethod::BlockMean:
        case ResampleMethod::Nearest: {
            const int x = clamp_index(static_cast<int>(std::floor(u + 0.5)), w);
            const int y = clamp_index(static_cast<int>(std::floor(v + 0.5)), h);
            return src.at(x, y);
        }
        case ResampleMethod::Bilinear: {
            const int x0 = static_cast<int>(std::floor(u));
            const int y0 = static_cast<int>(std::floor(v));
            const double fx = u - x0;
            const double fy = v - y0;
            const int xa = clamp_index(x0, w), xb = clamp_index(x0 + 1, w);
            const int ya = clamp_index(y0, h), yb = clamp_index(y0 + 1, h);
            const double top = (1.0 - fx) * src.at(xa, ya) + fx * src.at(xb, ya);
            const double bot = (1.0 - fx) * src.at(xa, yb) + fx * src.at(xb, yb);
            return (1.0 - fy) * top + fy * bot;
        }
        case ResampleMethod::Bicubic: {
            const int x0 = static_cast<int>(std::floor(u));
            const int y0 = static_cast<int>(std::floor(v));
            std::array<double, 4> wx{}, wy{};
            for (int k = 0; k < 4; ++k) {
                wx[k] = cubic_weight(u - (x0 - 1 + k));
                wy[k] = cubic_weight(v - (y0 - 1 + k));
            }
            double acc = 0.0;
            for (int j = 0; j < 4; ++j) {
                const int y = clamp_index(y0 - 1 + j, h);
                double row = 0.0;
                for (int i = 0; i < 4; ++i) row += wx[i] * src.at(clamp_index(x0 - 1 + i, w), y);
                acc += wy[j] * row;
            }
            return acc;
        }
    }
    return 0.0;
}

void require_factor(int factor) {
    if (factor < 1) throw std::invalid_argument("resample: factor must be >= 1");
}

}  // namespace

DepthMap downscale(const DepthMap& depth, int factor, ResampleMethod method) {
    require_factor(factor);
    const int ow = depth.width() / factor;
    const int oh = depth.height() / factor;
    if (method == ResampleMethod::BlockMean) {
        if (depth.width() % factor != 0 || depth.height() % factor != 0) {
            throw std::invalid_argument("downscale: " + std::to_string(depth.width()) + "x" +
                                        std::to_string(depth.height()) +
                                        " is not divisible by factor " + std::to_string(factor));
        }
        DepthMap out(ow, oh);
        const double inv = 1.0 / (static_cast<double>(factor) * factor);
        for (int by = 0; by < oh; ++by) {
            for (int bx = 0; bx < ow; ++bx) {
                double sum = 0.0;
                for (int y = by * factor; y < (by + 1) * factor; ++y) {
                    for (int x = bx * factor; x < (bx + 1) * factor; ++x) sum += depth.at(x, y);
                }
                out.at(bx, by) = sum * inv;
            }
        }
        return out;
    }
    DepthMap out(ow, oh);
    for (int y = 0; y < oh; ++y) {
        for (int x = 0; x < ow; ++x) {
            const double u = (x + 0.5) * factor - 0.5;
            const double v = (y + 0.5) * factor - 0.5;
            out.at(x, y) = sample(depth, u, v, method);
        }
    }
    return out;
}

DepthMap upscale(const DepthMap& depth, int factor, ResampleMethod method) {
    require_factor(factor);
    const long long ow = static_cast<long long>(depth.width()) * factor;
    const long long oh = static_cast<long long>(depth.height()) * factor;
    if (ow > (1 << 20) || oh > (1 << 20)) throw std::invalid_argument("upscale: output too large");
    DepthMap out(static_cast<int>(ow), static_cast<int>(oh));
    if (depth.empty()) return out;
    if (method == ResampleMethod::BlockMean || method == ResampleMethod::Nearest) {
        for (int y = 0; y < out.height(); ++y) {
            for (int x = 0; x < out.width(); ++x) out.at(x, y) = depth.at(x / factor, y / factor);
        }
        return out;
    }
    const double inv = 1.0 / factor;
    for (int y = 0; y < out.height(); ++y) {
        const double v = (y + 0.5) * inv - 0.5;
        for (int x = 0; x < out.width(); ++x) {
            out.at(x, y) = sample(depth, (x + 0.5) * inv - 0.5, v, method);
        }
    }
    return out;
}

RgbImage downscale_rgb(const RgbImage& rgb, int factor) {
    require_factor(factor);
    if (rgb.width() % factor != 0 || rgb.height() % factor != 0) {
        throw std::invalid_argument("downscale_rgb: dimensions not divisible by factor");
    }
    RgbImage out(rgb.width() / factor, rgb.height() / factor);
    const double inv = 1.0 / (static_cast<double>(factor) * factor);
    for (int by = 0; by < out.height(); ++by) {
        for (int bx = 0; bx < out.width(); ++bx) {
            for (int c = 0; c < 3; ++c) {
                double sum = 0.0;
                for (int y = by * factor; y < (by + 1) * factor; ++y) {
                    for (int x = bx * factor; x < (bx + 1) * factor; ++x) sum += rgb.at(x, y, c);
                }
                out.at(bx, by, c) = sum * inv;
            }
        }
    }
    return out;
}

}  // namespace depthsr
