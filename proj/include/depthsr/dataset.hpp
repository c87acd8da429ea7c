#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "depthsr/dataio.hpp"
#include "depthsr/degrade.hpp"
#include "depthsr/metrics.hpp"
#include "depthsr/restore.hpp"

namespace depthsr {

struct ItemError {
    std::string id;
    std::string message;
};

struct DatasetRun {
    DatasetManifest manifest;        ///< written to <out_dir>/manifest.jsonl
    std::vector<ItemError> errors;   ///< failed items, in manifest order
};

/// Degrades every HR depth in `input` into <out_dir>/<id>_lq.pfm. Each image
/// draws noise from RngStream(config.seed, id), so results do not depend on
/// order or thread count. Failed items are recorded and skipped.
DatasetRun degrade_dataset(const DatasetManifest& input, const DegradationConfig& config,
                           const std::filesystem::path& out_dir, int jobs = 1);

/// Applies `restorer` to every LQ depth (guided by its RGB image when present)
/// and writes <out_dir>/<id>_pred.pfm. The output manifest lists predictions
/// under hr_depth_path.
DatasetRun restore_dataset(const DatasetManifest& input, const Restorer& restorer,
                           const std::filesystem::path& out_dir, int jobs = 1);

/// Compares each prediction's hr_depth_path with the reference hr_depth_path
/// of the same id. Id sets must match exactly (ManifestError lists offenders).
MetricsReport evaluate_dataset(const DatasetManifest& predictions, const DatasetManifest& ground_truth,
                               const EvalOptions& options = {}, int jobs = 1);

}  // namespace depthsr
