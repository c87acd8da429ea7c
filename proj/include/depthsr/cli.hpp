#pragma once

#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

#include "depthsr/degrade.hpp"
#include "depthsr/metrics.hpp"
#include "depthsr/scene.hpp"

namespace depthsr::cli {

inline constexpr const char* kToolVersion = "0.1.0";

enum ExitCode : int { kSuccess = 0, kFailure = 1, kUsage = 2 };

/// Everything a subcommand needs. Two runs with equal RunConfig write identical bytes.
struct RunConfig {
    std::string subcommand;
    std::filesystem::path input;
    std::filesystem::path output;
    std::filesystem::path gt;
    DegradationConfig degradation{};
    std::vector<std::string> chains;
    EvalOptions eval{};
    int jobs = 1;

    // synth / bench scene generation
    int count = 5;
    int size = 512;
    std::string scene_kind = "steps";  ///< a SceneKind name or "mixed"
    double depth_min = 1.0;
    double depth_max = 20.0;
};

/// Default restorer line-up evaluated by bench (bicubic first).
std::vector<std::string> default_bench_chains();

int cmd_synth(const RunConfig& config, std::ostream& out, std::ostream& err);
int cmd_degrade(const RunConfig& config, std::ostream& out, std::ostream& err);
int cmd_restore(const RunConfig& config, std::ostream& out, std::ostream& err);
int cmd_eval(const RunConfig& config, std::ostream& out, std::ostream& err);
int cmd_bench(const RunConfig& config, std::ostream& out, std::ostream& err);

/// Parses argv and dispatches to a subcommand.
int run(int argc, char** argv);

/// JSON run record: tool, version, subcommand, configuration and a
/// FNV-1a-64 hash of every file under `dir` (the record itself excluded).
std::string run_record(const RunConfig& config, const std::filesystem::path& dir);

/// File-system-safe directory name for a chain string.
std::string chain_slug(const std::string& chain);

}  // namespace depthsr::cli
