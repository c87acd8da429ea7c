#pragma once

#include <functional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "depthsr/core.hpp"

namespace depthsr {

/// Raised when a regression has no unique solution.
class DegenerateFitError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// Upsampling procedure from an LQ depth map (plus optional RGB guide) to HR.
///
/// When the guide is non-empty the output takes its dimensions; otherwise the
/// restorer's fallback factor is applied to the LQ map.
class Restorer {
public:
    using Fn = std::function<DepthMap(const DepthMap& lq, const RgbImage& guide, int factor)>;

    Restorer(std::string name, Fn fn, int fallback_factor = 8);

    /// Runs the procedure and enforces the output contract (dimensions, finiteness).
    DepthMap operator()(const DepthMap& lq, const RgbImage& guide) const;

    const std::string& name() const noexcept { return name_; }
    int fallback_factor() const noexcept { return fallback_factor_; }

private:
    std::string name_;
    Fn fn_;
    int fallback_factor_;
};

/// Integer ratio between guide and LQ dimensions; throws unless both axes agree.
int guide_factor(const DepthMap& lq, const RgbImage& guide);

DepthMap restore_bicubic(const DepthMap& lq, int factor = 8);

struct JbuParams {
    double sigma_spatial = 2.0;  ///< in LQ pixels
    double sigma_range = 0.1;    ///< in guide intensity units
};

/// Joint bilateral upsampling. Each HR pixel is a normalized Gaussian-weighted
/// mix of LQ pixels within ceil(2 sigma_spatial) of its LQ-grid position; the
/// range term compares the HR guide color to the area-averaged guide of the
/// LQ pixel.
DepthMap jbu(const DepthMap& lq, const RgbImage& guide, const JbuParams& params = {});

struct GuidedFilterParams {
    int radius = 4;      ///< window radius in HR pixels
    double eps = 1e-3;   ///< regularizer on the guide variance
};

/// Guided filter on the HR grid: the bicubic upsample of lq is filtered with the
/// guide's luma as the guidance image.
DepthMap guided_filter_upsample(const DepthMap& lq, const RgbImage& guide,
                                const GuidedFilterParams& params = {});

/// Mean over the (2r+1)^2 window clipped to the image; O(1) per pixel.
Grid<double, 1> box_mean(const Grid<double, 1>& src, int radius);

struct LineFit {
    double slope = 0.0;
    double intercept = 0.0;
};

/// Theil-Sen estimator: median of pairwise slopes over pairs with distinct x,
/// intercept = median(y - slope x). Even-count medians average the two central values.
LineFit fit_theil_sen(std::span<const double> xs, std::span<const double> ys);

double median(std::vector<double> values);

struct ScaleOffset {
    double s = 1.0;
    double t = 0.0;
};

/// Least-squares (s, t) minimizing sum (s pred + t - target)^2 over the mask.
/// In robust mode the 5% of pixels with the largest absolute residual are
/// dropped and the fit is repeated once.
ScaleOffset fit_scale_offset_lsq(const DepthMap& pred, const DepthMap& target,
                                 const PixelMask& mask, bool robust = false);

struct AlignParams {
    double global_scale = 16.0;
    int factor = 8;
    bool robust = false;
};

/// Fits pred_hr (block-mean reduced to the LQ grid) against lq * global_scale
/// and applies the resulting (s, t) to pred_hr.
DepthMap align_prediction(const DepthMap& pred_hr, const DepthMap& lq,
                          const AlignParams& params = {});

struct ClipRange {
    double lo = 0.1;
    double hi = 20.0;
};

DepthMap clip_depth(const DepthMap& depth, const ClipRange& range = {});

DepthMap threshold_background(const DepthMap& depth, double threshold = 25.0);

struct Normalized {
    DepthMap depth;
    double min = 0.0;
    double max = 1.0;
};

/// Rescales to [0, 1]; rejects constant maps.
Normalized minmax_normalize(const DepthMap& depth);
DepthMap minmax_denormalize(const Normalized& normalized);

/// 0.5 (r(lq, guide) + flip(r(flip(lq), flip(guide)))).
DepthMap flip_ensemble(const Restorer& restorer, const DepthMap& lq, const RgbImage& guide);

}  // namespace depthsr
