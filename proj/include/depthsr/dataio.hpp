#pragma once

#include <filesystem>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "depthsr/core.hpp"
#include "depthsr/degrade.hpp"

namespace depthsr {

/// Malformed or unreadable file.
class IoError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

enum class DepthFormat { Pfm, Png16 };

/// PFM ("Pf", little-endian float32, rows stored bottom to top). Values are
/// narrowed to float32 on write.
void write_pfm(const DepthMap& depth, const std::filesystem::path& path);
DepthMap read_pfm(const std::filesystem::path& path);

/// 16-bit grayscale PNG of quantization levels plus a JSON sidecar at
/// "<path>.json" holding {bits, d_min, d_max}.
void write_depth_png(const DepthMap& depth, const std::filesystem::path& path, const QuantSpec& spec);
DepthMap read_depth_png(const std::filesystem::path& path);

std::filesystem::path sidecar_path(const std::filesystem::path& png_path);

/// Dispatches on extension (.pfm or .png); PNG needs its sidecar.
DepthMap read_depth(const std::filesystem::path& path);
void write_depth(const DepthMap& depth, const std::filesystem::path& path,
                 DepthFormat format = DepthFormat::Pfm, const QuantSpec& png_spec = {16, 0.0, 20.0});

/// 8-bit PNG decoded as v / 255. Gray and palette images are expanded to RGB;
/// alpha is dropped; 16-bit samples are rejected.
RgbImage read_rgb(const std::filesystem::path& path);
void write_rgb(const RgbImage& rgb, const std::filesystem::path& path);

std::string config_to_json(const DegradationConfig& config);
DegradationConfig config_from_json(const std::string& text);

struct ManifestEntry {
    std::string id;
    std::optional<std::string> rgb_path;
    std::optional<std::string> hr_depth_path;
    std::optional<std::string> lq_depth_path;

    friend bool operator==(const ManifestEntry&, const ManifestEntry&) = default;
};

/// JSON-lines dataset index. The first line is a header
/// {"format":"depthsr-manifest","version":1[,"config":{...}]}; each following
/// line is one entry. Paths are relative to the manifest's directory.
struct DatasetManifest {
    static constexpr int kVersion = 1;

    std::vector<ManifestEntry> entries;
    std::optional<DegradationConfig> config;
    std::filesystem::path base_dir;  ///< not serialized

    std::filesystem::path resolve(const std::string& relative) const { return base_dir / relative; }
    const ManifestEntry* find(const std::string& id) const;

    friend bool operator==(const DatasetManifest& a, const DatasetManifest& b) {
        return a.entries == b.entries && a.config == b.config;
    }
};

/// Aggregated manifest problems, one line per offending item.
class ManifestError : public std::runtime_error {
public:
    explicit ManifestError(std::vector<std::string> issues);
    const std::vector<std::string>& issues() const noexcept { return issues_; }

private:
    std::vector<std::string> issues_;
};

/// Ids must be non-empty and use only [A-Za-z0-9_.-]; they double as file stems.
bool valid_id(const std::string& id);

std::string manifest_to_string(const DatasetManifest& manifest);
DatasetManifest manifest_from_string(const std::string& text);

void save_manifest(const DatasetManifest& manifest, const std::filesystem::path& path);
/// Parses and, when check_paths is set, verifies every referenced file exists.
DatasetManifest load_manifest(const std::filesystem::path& path, bool check_paths = true);

inline constexpr const char* kManifestName = "manifest.jsonl";

/// Path of `target` relative to `base`, with '/' separators.
std::string relative_to(const std::filesystem::path& target, const std::filesystem::path& base);

std::string read_file(const std::filesystem::path& path);
void write_file(const std::filesystem::path& path, const std::string& bytes);

}  // namespace depthsr
