#pragma once

#include <optional>
#include <string>
#include <vector>

#include "depthsr/grid.hpp"

namespace depthsr {

struct SilogParams {
    double lambda = 0.85;
    double alpha = 10.0;

    void validate() const;
};

/// Mean absolute error over masked pixels.
double mae(const DepthMap& pred, const DepthMap& gt, const PixelMask& mask);
double mae(const DepthMap& pred, const DepthMap& gt);

double rmse(const DepthMap& pred, const DepthMap& gt, const PixelMask& mask);
double rmse(const DepthMap& pred, const DepthMap& gt);

/// (1/n) sum g^2 - (lambda/n^2) (sum g)^2 with g = log(pred) - log(gt).
/// Every masked value must be strictly positive.
double silog(const DepthMap& pred, const DepthMap& gt, double lambda, const PixelMask& mask);
double silog(const DepthMap& pred, const DepthMap& gt, double lambda = 0.5);

/// alpha * sqrt(silog(lambda)); the radicand is clamped at zero.
double silog_scaled(const DepthMap& pred, const DepthMap& gt, const SilogParams& params,
                    const PixelMask& mask);
double silog_scaled(const DepthMap& pred, const DepthMap& gt, const SilogParams& params = {});

struct ImageMetrics {
    std::string id;
    double mae = 0.0;
    double rmse = 0.0;
    std::optional<double> silog;  ///< scaled SILog; absent when a depth is non-positive
};

struct MetricsReport {
    std::vector<ImageMetrics> images;  ///< sorted by id
    double mae = 0.0;
    double rmse = 0.0;
    std::optional<double> silog;
    bool pooled = false;
    std::size_t pixel_count = 0;
};

struct EvalOptions {
    std::optional<double> mask_max_depth;  ///< exclude gt pixels above this depth
    bool pooled = false;                   ///< pool pixels across images instead of averaging
    SilogParams silog{};
};

/// Per-image sums used to form either aggregate.
struct ErrorSums {
    double abs_sum = 0.0;
    double sq_sum = 0.0;
    std::size_t count = 0;
};

ErrorSums error_sums(const DepthMap& pred, const DepthMap& gt, const PixelMask& mask);

PixelMask make_eval_mask(const DepthMap& gt, const EvalOptions& options);

ImageMetrics evaluate_image(const std::string& id, const DepthMap& pred, const DepthMap& gt,
                            const EvalOptions& options, ErrorSums* sums = nullptr);

/// Aggregates per-image results (sorted by id). Pooled mode needs the per-image sums.
MetricsReport assemble_report(std::vector<ImageMetrics> images, const EvalOptions& options,
                              const std::vector<ErrorSums>& sums = {});

/// CSV with header "id,mae,rmse,silog", LF endings, '.' decimals, 17 significant digits.
std::string report_csv(const MetricsReport& report);

/// Aligned-column table with a final aggregate row.
std::string report_table(const MetricsReport& report, const std::string& title = "");

}  // namespace depthsr
