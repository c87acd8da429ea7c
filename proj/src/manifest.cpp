#include <algorithm>
#include <set>
#include <sstream>

#include <json.hpp>

#include "depthsr/dataio.hpp"

namespace depthsr {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

void reject_unknown(const json& j, std::initializer_list<const char*> allowed, const std::string& where) {
    if (!j.is_object()) throw std::invalid_argument(where + ": expected an object");
    for (const auto& [key, _] : j.items()) {
        if (std::none_of(allowed.begin(), allowed.end(), [&](const char* a) { return key == a; })) {
            throw std::invalid_argument(where + ": unknown field '" + key + "'");
        }
    }
}

json config_json(const DegradationConfig& c) {
    return {
        {"quant", {{"bits", c.quant.bits}, {"d_min", c.quant.d_min}, {"d_max", c.quant.d_max}}},
        {"factor", c.factor},
        {"downscale_method", std::string(to_string(c.downscale_method))},
        {"noise", {{"sigma_r2", c.noise.sigma_r2}, {"sigma_a2", c.noise.sigma_a2}}},
        {"seed", c.seed},
        {"clamp_nonneg", c.clamp_nonneg},
    };
}

DegradationConfig config_of(const json& j) {
    reject_unknown(j, {"quant", "factor", "downscale_method", "noise", "seed", "clamp_nonneg"}, "config");
    DegradationConfig c;
    const json& q = j.at("quant");
    reject_unknown(q, {"bits", "d_min", "d_max"}, "config.quant");
    c.quant.bits = q.at("bits").get<int>();
    c.quant.d_min = q.at("d_min").get<double>();
    c.quant.d_max = q.at("d_max").get<double>();
    c.factor = j.at("factor").get<int>();
    c.downscale_method = parse_resample_method(j.at("downscale_method").get<std::string>());
    const json& n = j.at("noise");
    reject_unknown(n, {"sigma_r2", "sigma_a2"}, "config.noise");
    c.noise.sigma_r2 = n.at("sigma_r2").get<double>();
    c.noise.sigma_a2 = n.at("sigma_a2").get<double>();
    c.seed = j.at("seed").get<std::uint64_t>();
    c.clamp_nonneg = j.at("clamp_nonneg").get<bool>();
    c.validate();
    return c;
}

}  // namespace

std::string config_to_json(const DegradationConfig& config) { return config_json(config).dump(2) + "\n"; }

DegradationConfig config_from_json(const std::string& text) {
    try {
        return config_of(json::parse(text));
    } catch (const json::exception& e) {
        throw std::invalid_argument(std::string("config: ") + e.what());
    }
}

ManifestError::ManifestError(std::vector<std::string> issues)
    : std::runtime_error([&] {
          std::string msg = "manifest has " + std::to_string(issues.size()) + " problem(s)";
          for (const auto& i : issues) msg += "\n  " + i;
          return msg;
      }()),
      issues_(std::move(issues)) {}

bool valid_id(const std::string& id) {
    if (id.empty() || id == "." || id == "..") return false;
    return std::all_of(id.begin(), id.end(), [](char c) {
        return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || (c >= '0' && c <= '9') || c == '_' ||
               c == '-' || c == '.';
    });
}

const ManifestEntry* DatasetManifest::find(const std::string& id) const {
    for (const auto& e : entries) {
        if (e.id == id) return &e;
    }
    return nullptr;
}

std::string manifest_to_string(const DatasetManifest& manifest) {
    json header = {{"format", "depthsr-manifest"}, {"version", DatasetManifest::kVersion}};
    if (manifest.config) header["config"] = config_json(*manifest.config);
    std::string out = header.dump() + "\n";
    for (const auto& e : manifest.entries) {
        json line = {{"id", e.id}};
        if (e.rgb_path) line["rgb_path"] = *e.rgb_path;
        if (e.hr_depth_path) line["hr_depth_path"] = *e.hr_depth_path;
        if (e.lq_depth_path) line["lq_depth_path"] = *e.lq_depth_path;
        out += line.dump() + "\n";
    }
    return out;
}

DatasetManifest manifest_from_string(const std::string& text) {
    DatasetManifest m;
    std::vector<std::string> issues;
    std::istringstream in(text);
    std::string line;
    int lineno = 0;
    bool have_header = false;
    std::set<std::string> seen;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty()) continue;
        const std::string where = "line " + std::to_string(lineno);
        try {
            const json j = json::parse(line);
            if (!have_header) {
                reject_unknown(j, {"format", "version", "config"}, where);
                if (j.at("format").get<std::string>() != "depthsr-manifest") {
                    throw std::invalid_argument(where + ": not a depthsr manifest");
                }
                const int version = j.at("version").get<int>();
                if (version != DatasetManifest::kVersion) {
                    throw std::invalid_argument(where + ": unsupported manifest version " + std::to_string(version));
                }
                if (j.contains("config")) m.config = config_of(j.at("config"));
                have_header = true;
                continue;
            }
            reject_unknown(j, {"id", "rgb_path", "hr_depth_path", "lq_depth_path"}, where);
            ManifestEntry e;
            e.id = j.at("id").get<std::string>();
            if (!valid_id(e.id)) throw std::invalid_argument(where + ": invalid id '" + e.id + "'");
            if (j.contains("rgb_path")) e.rgb_path = j.at("rgb_path").get<std::string>();
            if (j.contains("hr_depth_path")) e.hr_depth_path = j.at("hr_depth_path").get<std::string>();
            if (j.contains("lq_depth_path")) e.lq_depth_path = j.at("lq_depth_path").get<std::string>();
            if (!seen.insert(e.id).second) throw std::invalid_argument(where + ": duplicate id '" + e.id + "'");
            m.entries.push_back(std::move(e));
        } catch (const json::exception& e) {
            issues.push_back(where + ": " + e.what());
            if (!have_header) break;
        } catch (const std::invalid_argument& e) {
            issues.push_back(e.what());
            if (!have_header) break;
        }
    }
    if (!have_header && issues.empty()) issues.emplace_back("missing manifest header");
    if (!issues.empty()) throw ManifestError(std::move(issues));
    return m;
}

void save_manifest(const DatasetManifest& manifest, const fs::path& path) {
    write_file(path, manifest_to_string(manifest));
}

DatasetManifest load_manifest(const fs::path& path, bool check_paths) {
    DatasetManifest m = manifest_from_string(read_file(path));
    m.base_dir = path.parent_path();
    if (!check_paths) return m;
    std::vector<std::string> issues;
    for (const auto& e : m.entries) {
        for (const auto* p : {&e.rgb_path, &e.hr_depth_path, &e.lq_depth_path}) {
            if (*p && !fs::exists(m.resolve(**p))) issues.push_back(e.id + ": missing file '" + **p + "'");
        }
    }
    if (!issues.empty()) throw ManifestError(std::move(issues));
    return m;
}

std::string relative_to(const fs::path& target, const fs::path& base) {
    const fs::path t = fs::weakly_canonical(fs::absolute(target));
    const fs::path b = fs::weakly_canonical(fs::absolute(base));
    return t.lexically_relative(b).generic_string();
}

}  // namespace depthsr
