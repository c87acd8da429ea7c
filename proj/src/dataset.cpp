#include "depthsr/dataset.hpp"

#include <map>
#include <optional>

#include "depthsr/parallel.hpp"

namespace depthsr {

namespace fs = std::filesystem;

namespace {

DatasetRun collect(const DatasetManifest& input, std::vector<std::optional<ManifestEntry>> produced,
                   std::vector<std::string> messages) {
    DatasetRun run;
    for (std::size_t i = 0; i < produced.size(); ++i) {
        if (produced[i]) {
            run.manifest.entries.push_back(std::move(*produced[i]));
        } else {
            run.errors.push_back({input.entries[i].id, std::move(messages[i])});
        }
    }
    return run;
}

std::optional<std::string> rebase(const DatasetManifest& m, const std::optional<std::string>& p,
                                  const fs::path& out_dir) {
    if (!p) return std::nullopt;
    return relative_to(m.resolve(*p), out_dir);
}

}  // namespace

DatasetRun degrade_dataset(const DatasetManifest& input, const DegradationConfig& config,
                           const fs::path& out_dir, int jobs) {
    if (input.entries.empty()) throw std::invalid_argument("degrade: manifest has no entries");
    config.validate();
    fs::create_directories(out_dir);
    const std::size_t n = input.entries.size();
    std::vector<std::optional<ManifestEntry>> produced(n);
    std::vector<std::string> messages(n);
    parallel_for(n, jobs, [&](std::size_t i) {
        const ManifestEntry& e = input.entries[i];
        try {
            if (!e.hr_depth_path) throw std::invalid_argument("no hr_depth_path");
            const DepthMap hr = read_depth(input.resolve(*e.hr_depth_path));
            const DegradeResult result = degrade(hr, config, e.id);
            const std::string name = e.id + "_lq.pfm";
            write_pfm(result.lq, out_dir / name);
            ManifestEntry out{e.id, rebase(input, e.rgb_path, out_dir),
                              rebase(input, e.hr_depth_path, out_dir), name};
            produced[i] = std::move(out);
        } catch (const std::exception& ex) {
            messages[i] = ex.what();
        }
    });
    DatasetRun run = collect(input, std::move(produced), std::move(messages));
    run.manifest.config = config;
    run.manifest.base_dir = out_dir;
    save_manifest(run.manifest, out_dir / kManifestName);
    return run;
}

DatasetRun restore_dataset(const DatasetManifest& input, const Restorer& restorer,
                           const fs::path& out_dir, int jobs) {
    if (input.entries.empty()) throw std::invalid_argument("restore: manifest has no entries");
    fs::create_directories(out_dir);
    const std::size_t n = input.entries.size();
    std::vector<std::optional<ManifestEntry>> produced(n);
    std::vector<std::string> messages(n);
    parallel_for(n, jobs, [&](std::size_t i) {
        const ManifestEntry& e = input.entries[i];
        try {
            if (!e.lq_depth_path) throw std::invalid_argument("no lq_depth_path");
            const DepthMap lq = read_depth(input.resolve(*e.lq_depth_path));
            const RgbImage guide = e.rgb_path ? read_rgb(input.resolve(*e.rgb_path)) : RgbImage{};
            const DepthMap hr = restorer(lq, guide);
            const std::string name = e.id + "_pred.pfm";
            write_pfm(hr, out_dir / name);
            produced[i] = ManifestEntry{e.id, rebase(input, e.rgb_path, out_dir), name,
                                        rebase(input, e.lq_depth_path, out_dir)};
        } catch (const std::exception& ex) {
            messages[i] = ex.what();
        }
    });
    DatasetRun run = collect(input, std::move(produced), std::move(messages));
    run.manifest.config = input.config;
    run.manifest.base_dir = out_dir;
    save_manifest(run.manifest, out_dir / kManifestName);
    return run;
}

MetricsReport evaluate_dataset(const DatasetManifest& predictions, const DatasetManifest& ground_truth,
                               const EvalOptions& options, int jobs) {
    std::map<std::string, const ManifestEntry*> gt_by_id;
    for (const auto& e : ground_truth.entries) gt_by_id[e.id] = &e;
    std::vector<std::string> issues;
    for (const auto& e : predictions.entries) {
        if (!gt_by_id.count(e.id)) issues.push_back(e.id + ": no ground truth entry");
    }
    for (const auto& e : ground_truth.entries) {
        if (!predictions.find(e.id)) issues.push_back(e.id + ": no prediction entry");
    }
    for (const auto& e : predictions.entries) {
        if (!e.hr_depth_path) issues.push_back(e.id + ": prediction has no hr_depth_path");
        auto it = gt_by_id.find(e.id);
        if (it != gt_by_id.end() && !it->second->hr_depth_path) {
            issues.push_back(e.id + ": ground truth has no hr_depth_path");
        }
    }
    if (!issues.empty()) throw ManifestError(std::move(issues));
    if (predictions.entries.empty()) throw std::invalid_argument("eval: no entries");

    const std::size_t n = predictions.entries.size();
    std::vector<ImageMetrics> metrics(n);
    std::vector<ErrorSums> sums(n);
    std::vector<std::string> failures(n);
    parallel_for(n, jobs, [&](std::size_t i) {
        const ManifestEntry& p = predictions.entries[i];
        const ManifestEntry& g = *gt_by_id.at(p.id);
        try {
            const DepthMap pred = read_depth(predictions.resolve(*p.hr_depth_path));
            const DepthMap gt = read_depth(ground_truth.resolve(*g.hr_depth_path));
            metrics[i] = evaluate_image(p.id, pred, gt, options, &sums[i]);
        } catch (const std::exception& ex) {
            failures[i] = p.id + ": " + ex.what();
        }
    });
    for (auto& f : failures) {
        if (!f.empty()) issues.push_back(std::move(f));
    }
    if (!issues.empty()) throw ManifestError(std::move(issues));
    return assemble_report(std::move(metrics), options, sums);
}

}  // namespace depthsr
