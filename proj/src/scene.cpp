#include "depthsr/scene.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <stdexcept>
#include <string>
#include <vector>

#include "depthsr/degrade.hpp"

namespace depthsr {

std::string_view to_string(SceneKind kind) {
    switch (kind) {
        case SceneKind::Ramp: return "ramp";
        case SceneKind::Steps: return "steps";
        case SceneKind::Spheres: return "spheres";
        case SceneKind::TexturedPlane: return "textured-plane";
    }
    return "?";
}

SceneKind parse_scene_kind(std::string_view name) {
    if (name == "ramp") return SceneKind::Ramp;
    if (name == "steps") return SceneKind::Steps;
    if (name == "spheres") return SceneKind::Spheres;
    if (name == "textured-plane") return SceneKind::TexturedPlane;
    throw std::invalid_argument("unknown scene kind '" + std::string(name) + "'");
}

void SceneSpec::validate() const {
    if (width <= 0 || height <= 0 || width % 8 != 0 || height % 8 != 0) {
        throw std::invalid_argument("scene: dimensions must be positive multiples of 8");
    }
    if (!std::isfinite(depth_min) || !std::isfinite(depth_max) || !(depth_min < depth_max) ||
        depth_min < 0.0) {
        throw std::invalid_argument("scene: require 0 <= depth_min < depth_max");
    }
}

namespace {

class Draw {
public:
    Draw(std::uint64_t seed, SceneKind kind) : rng_(seed, to_string(kind)) {}
    double uniform(double lo, double hi) { return lo + (hi - lo) * rng_.uniform(); }
    int index(int n) { return std::min(n - 1, static_cast<int>(rng_.uniform() * n)); }

    // Fisher-Yates over 0..n-1.
    std::vector<int> permutation(int n) {
        std::vector<int> p(n);
        for (int i = 0; i < n; ++i) p[i] = i;
        for (int i = n - 1; i > 0; --i) std::swap(p[i], p[index(i + 1)]);
        return p;
    }

    // Colour with the requested Rec. 601 luma and a random luma-neutral tint.
    std::array<double, 3> colour(double luma) {
        const double cr = uniform(-0.08, 0.08);
        const double cb = uniform(-0.08, 0.08);
        const double cg = -(0.299 * cr + 0.114 * cb) / 0.587;
        return {luma + cr, luma + cg, luma + cb};
    }

private:
    RngStream rng_;
};

void fill_rgb(RgbImage& rgb, int x, int y, const std::array<double, 3>& c, double shade = 1.0) {
    for (int k = 0; k < 3; ++k) rgb.at(x, y, k) = std::clamp(c[k] * shade, 0.0, 1.0);
}

Scene ramp(const SceneSpec& s) {
    Scene sc{DepthMap(s.width, s.height), RgbImage(s.width, s.height)};
    const double span = s.depth_max - s.depth_min;
    for (int y = 0; y < s.height; ++y) {
        for (int x = 0; x < s.width; ++x) {
            const double fx = s.width > 1 ? static_cast<double>(x) / (s.width - 1) : 0.0;
            const double fy = s.height > 1 ? static_cast<double>(y) / (s.height - 1) : 0.0;
            sc.depth.at(x, y) = x == s.width - 1 ? s.depth_max : s.depth_min + span * fx;
            fill_rgb(sc.rgb, x, y, {0.1 + 0.8 * fx, 0.2 + 0.6 * fy, 0.5});
        }
    }
    return sc;
}

Scene steps(const SceneSpec& s) {
    Draw draw(s.seed, s.kind);
    const int rects = 5 + draw.index(5);
    const int regions = rects + 1;
    const auto depth_order = draw.permutation(regions);
    const auto luma_order = draw.permutation(regions);
    std::vector<double> depth(regions), luma(regions);
    std::vector<std::array<double, 3>> colour(regions);
    for (int r = 0; r < regions; ++r) {
        depth[r] = s.depth_min + (s.depth_max - s.depth_min) * depth_order[r] / (regions - 1);
        luma[r] = 0.15 + 0.7 * luma_order[r] / (regions - 1);
        colour[r] = draw.colour(luma[r]);
    }
    std::vector<int> label(static_cast<std::size_t>(s.width) * s.height, 0);
    for (int r = 1; r < regions; ++r) {
        const int w = static_cast<int>(draw.uniform(s.width / 8.0, s.width / 2.0));
        const int h = static_cast<int>(draw.uniform(s.height / 8.0, s.height / 2.0));
        const int x0 = draw.index(s.width - w + 1);
        const int y0 = draw.index(s.height - h + 1);
        for (int y = y0; y < y0 + h; ++y) {
            for (int x = x0; x < x0 + w; ++x) label[static_cast<std::size_t>(y) * s.width + x] = r;
        }
    }
    Scene sc{DepthMap(s.width, s.height), RgbImage(s.width, s.height)};
    for (int y = 0; y < s.height; ++y) {
        for (int x = 0; x < s.width; ++x) {
            const int r = label[static_cast<std::size_t>(y) * s.width + x];
            sc.depth.at(x, y) = depth[r];
            fill_rgb(sc.rgb, x, y, colour[r]);
        }
    }
    return sc;
}

Scene spheres(const SceneSpec& s) {
    Draw draw(s.seed, s.kind);
    const int count = 3 + draw.index(4);
    struct Ball {
        double cx, cy, radius, front, relief;
        std::array<double, 3> colour;
    };
    std::vector<Ball> balls;
    const auto luma_order = draw.permutation(count + 1);
    const double span = s.depth_max - s.depth_min;
    const double extent = std::min(s.width, s.height);
    for (int i = 0; i < count; ++i) {
        Ball b;
        b.cx = draw.uniform(0.0, s.width);
        b.cy = draw.uniform(0.0, s.height);
        b.radius = draw.uniform(extent / 10.0, extent / 4.0);
        b.front = s.depth_min + draw.uniform(0.1, 0.6) * span;
        b.relief = draw.uniform(0.05, 0.3) * span;
        b.colour = draw.colour(0.2 + 0.6 * luma_order[i] / count);
        balls.push_back(b);
    }
    const auto background = draw.colour(0.2 + 0.6 * luma_order[count] / count);
    Scene sc{DepthMap(s.width, s.height, s.depth_max), RgbImage(s.width, s.height)};
    for (int y = 0; y < s.height; ++y) {
        for (int x = 0; x < s.width; ++x) {
            double best = s.depth_max;
            const Ball* hit = nullptr;
            double shade = 1.0;
            for (const Ball& b : balls) {
                const double dx = (x + 0.5 - b.cx) / b.radius;
                const double dy = (y + 0.5 - b.cy) / b.radius;
                const double rr = dx * dx + dy * dy;
                if (rr >= 1.0) continue;
                const double bulge = std::sqrt(1.0 - rr);
                // surface starts at relief behind the front point, capped by the plane
                const double z = std::min(s.depth_max, b.front + b.relief * (1.0 - bulge));
                if (z < best) {
                    best = z;
                    hit = &b;
                    shade = 0.75 + 0.25 * bulge;
                }
            }
            sc.depth.at(x, y) = best;
            fill_rgb(sc.rgb, x, y, hit ? hit->colour : background, hit ? shade : 1.0);
        }
    }
    return sc;
}

Scene textured_plane(const SceneSpec& s) {
    Draw draw(s.seed, s.kind);
    const int tile = 8 << draw.index(3);
    const int tiles_x = s.width / tile + 1;
    const int tiles_y = s.height / tile + 1;
    std::vector<std::array<double, 3>> palette;
    for (int i = 0; i < tiles_x * tiles_y; ++i) palette.push_back(draw.colour(draw.uniform(0.15, 0.85)));
    const double wx = draw.uniform(0.2, 0.8);
    Scene sc{DepthMap(s.width, s.height), RgbImage(s.width, s.height)};
    const double span = s.depth_max - s.depth_min;
    for (int y = 0; y < s.height; ++y) {
        for (int x = 0; x < s.width; ++x) {
            const double fx = s.width > 1 ? static_cast<double>(x) / (s.width - 1) : 0.0;
            const double fy = s.height > 1 ? static_cast<double>(y) / (s.height - 1) : 0.0;
            sc.depth.at(x, y) = std::min(s.depth_max, s.depth_min + span * (wx * fx + (1.0 - wx) * fy));
            fill_rgb(sc.rgb, x, y, palette[(y / tile) * tiles_x + x / tile]);
        }
    }
    return sc;
}

}  // namespace

Scene generate_scene(const SceneSpec& spec) {
    spec.validate();
    switch (spec.kind) {
        case SceneKind::Ramp: return ramp(spec);
        case SceneKind::Steps: return steps(spec);
        case SceneKind::Spheres: return spheres(spec);
        case SceneKind::TexturedPlane: return textured_plane(spec);
    }
    throw std::logic_error("unhandled scene kind");
}

}  // namespace depthsr
