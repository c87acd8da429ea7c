#pragma once

#include <cstdint>
#include <string_view>

#include "depthsr/grid.hpp"

namespace depthsr {

enum class SceneKind { Ramp, Steps, Spheres, TexturedPlane };

std::string_view to_string(SceneKind kind);
/// "ramp", "steps", "spheres", "textured-plane".
SceneKind parse_scene_kind(std::string_view name);

struct SceneSpec {
    SceneKind kind = SceneKind::Steps;
    int width = 512;   ///< multiple of 8
    int height = 512;  ///< multiple of 8
    double depth_min = 1.0;
    double depth_max = 20.0;
    std::uint64_t seed = 0;

    void validate() const;
};

struct Scene {
    DepthMap depth;
    RgbImage rgb;
};

/// Synthetic HR depth with a paired RGB guide. Pure function of the SceneSpec.
///
/// ramp: depth linear in x from depth_min to depth_max.
/// steps: overlapping axis-aligned rectangles of constant depth; each region
///   has a distinct depth and a distinct guide luma, so colour edges sit on
///   depth edges.
/// spheres: hemispherical bumps over a far background plane, shaded guide.
/// textured-plane: slanted plane under a checker texture unrelated to depth.
Scene generate_scene(const SceneSpec& spec);

}  // namespace depthsr
