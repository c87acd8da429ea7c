#pragma once

#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "depthsr/restore.hpp"

namespace depthsr {

/// One "name:key=val,..." segment of a restorer chain.
struct StageSpec {
    std::string name;
    std::vector<std::pair<std::string, std::string>> args;  ///< canonical parameter order

    friend bool operator==(const StageSpec&, const StageSpec&) = default;
};

/// Stages joined by '|'. The first stage is a restorer (bicubic, bilinear,
/// nearest, jbu, guided); later stages post-process its output (clip,
/// threshold, align, normalize) or wrap everything before them in a flip
/// ensemble (flip).
///
/// Arguments may be named (clip:lo=0.1,hi=20) or positional in parameter order
/// (clip:0.1,20). Parsing fills defaults, so format_chain(parse_chain(s)) is
/// the canonical, fully named form.
struct ChainSpec {
    std::vector<StageSpec> stages;

    friend bool operator==(const ChainSpec&, const ChainSpec&) = default;
};

ChainSpec parse_chain(std::string_view text);
std::string format_chain(const ChainSpec& chain);

/// Names accepted as the first stage.
std::vector<std::string> restorer_names();

/// Builds the callable. The restorer's name is the canonical chain string.
Restorer build_restorer(const ChainSpec& chain);
inline Restorer build_restorer(std::string_view text) { return build_restorer(parse_chain(text)); }

}  // namespace depthsr
