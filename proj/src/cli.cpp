#include "depthsr/cli.hpp"

#include <algorithm>
#include <cstdio>
#include <iostream>
#include <map>
#include <ostream>

#include <CLI11.hpp>
#include <json.hpp>

#include "depthsr/chain.hpp"
#include "depthsr/dataset.hpp"
#include "depthsr/parallel.hpp"

namespace depthsr::cli {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

std::string hex64(std::uint64_t v) {
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(v));
    return buf;
}

json config_json(const RunConfig& c) {
    json j = json::parse(config_to_json(c.degradation));
    json eval = {{"pooled", c.eval.pooled},
                 {"silog_lambda", c.eval.silog.lambda},
                 {"silog_alpha", c.eval.silog.alpha}};
    eval["mask_max_depth"] = c.eval.mask_max_depth ? json(*c.eval.mask_max_depth) : json(nullptr);
    return {
        {"input", c.input.generic_string()},
        {"gt", c.gt.generic_string()},
        {"degradation", j},
        {"chains", c.chains},
        {"eval", eval},
        {"scenes", {{"count", c.count}, {"size", c.size}, {"kind", c.scene_kind},
                    {"depth_min", c.depth_min}, {"depth_max", c.depth_max}}},
    };
}

void write_run_record(const RunConfig& config, const fs::path& dir) {
    write_file(dir / "run_record.json", run_record(config, dir));
}

void report_errors(const std::vector<ItemError>& errors, std::ostream& err) {
    for (const auto& e : errors) err << "error: " << e.id << ": " << e.message << "\n";
}

DatasetManifest load_input_dataset(const fs::path& dir) {
    if (!fs::is_directory(dir)) throw IoError("input '" + dir.string() + "' is not a directory");
    const fs::path manifest = dir / kManifestName;
    if (fs::exists(manifest)) return load_manifest(manifest);
    // no manifest: every *.pfm is an HR depth map named by its stem
    DatasetManifest m;
    m.base_dir = dir;
    std::vector<fs::path> files;
    for (const auto& entry : fs::directory_iterator(dir)) {
        if (entry.is_regular_file() && entry.path().extension() == ".pfm") files.push_back(entry.path());
    }
    std::sort(files.begin(), files.end());
    for (const auto& f : files) {
        const std::string id = f.stem().string();
        if (!valid_id(id)) throw IoError("file name '" + f.filename().string() + "' is not a valid id");
        m.entries.push_back({id, std::nullopt, f.filename().string(), std::nullopt});
    }
    if (m.entries.empty()) throw IoError("no depth maps found in '" + dir.string() + "'");
    return m;
}

std::vector<SceneSpec> scene_specs(const RunConfig& c) {
    if (c.count <= 0) throw std::invalid_argument("scene count must be positive");
    static const SceneKind kinds[] = {SceneKind::Steps, SceneKind::Spheres, SceneKind::TexturedPlane,
                                      SceneKind::Ramp};
    std::vector<SceneSpec> specs;
    for (int i = 0; i < c.count; ++i) {
        SceneSpec s;
        s.kind = c.scene_kind == "mixed" ? kinds[i % 4] : parse_scene_kind(c.scene_kind);
        s.width = s.height = c.size;
        s.depth_min = c.depth_min;
        s.depth_max = c.depth_max;
        s.seed = splitmix64(c.degradation.seed + static_cast<std::uint64_t>(i));
        s.validate();
        specs.push_back(s);
    }
    return specs;
}

DatasetManifest synthesize(const RunConfig& c, const fs::path& dir) {
    const auto specs = scene_specs(c);
    fs::create_directories(dir);
    DatasetManifest m;
    m.base_dir = dir;
    m.entries.resize(specs.size());
    parallel_for(specs.size(), c.jobs, [&](std::size_t i) {
        char id[32];
        std::snprintf(id, sizeof id, "scene_%03zu", i);
        const Scene scene = generate_scene(specs[i]);
        write_pfm(scene.depth, dir / (std::string(id) + "_hr.pfm"));
        write_rgb(scene.rgb, dir / (std::string(id) + "_rgb.png"));
        m.entries[i] = {id, std::string(id) + "_rgb.png", std::string(id) + "_hr.pfm", std::nullopt};
    });
    save_manifest(m, dir / kManifestName);
    return m;
}

std::string ranking_table(const std::vector<std::pair<std::string, MetricsReport>>& rows) {
    std::size_t width = 6;
    for (const auto& [name, _] : rows) width = std::max(width, name.size());
    std::string out;
    char buf[512];
    std::snprintf(buf, sizeof buf, "%-4s  %-*s  %10s  %10s  %10s\n", "Rank", static_cast<int>(width), "Method",
                  "MAE", "RMSE", "SILog");
    out += buf;
    out += std::string(width + 42, '-') + "\n";
    int rank = 1;
    for (const auto& [name, r] : rows) {
        char silog[32] = "-";
        if (r.silog) std::snprintf(silog, sizeof silog, "%.4f", *r.silog);
        std::snprintf(buf, sizeof buf, "%-4d  %-*s  %10.4f  %10.4f  %10s\n", rank++, static_cast<int>(width),
                      name.c_str(), r.mae, r.rmse, silog);
        out += buf;
    }
    return out;
}

}  // namespace

std::vector<std::string> default_bench_chains() {
    return {"bicubic", "bilinear", "nearest", "jbu", "guided"};
}

std::string chain_slug(const std::string& chain) {
    std::string slug;
    for (char c : chain) {
        const bool keep = (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || (c >= '0' && c <= '9') ||
                          c == '.' || c == '-' || c == '_';
        slug += keep ? c : '_';
    }
    return slug;
}

std::string run_record(const RunConfig& config, const fs::path& dir) {
    std::map<std::string, std::string> hashes;
    for (const auto& entry : fs::recursive_directory_iterator(dir)) {
        if (!entry.is_regular_file()) continue;
        const std::string rel = entry.path().lexically_relative(dir).generic_string();
        if (rel == "run_record.json") continue;
        hashes[rel] = "fnv1a64:" + hex64(fnv1a64(read_file(entry.path())));
    }
    const json record = {
        {"tool", "depthsr"},
        {"version", kToolVersion},
        {"subcommand", config.subcommand},
        {"config", config_json(config)},
        {"outputs", hashes},
    };
    return record.dump(2) + "\n";
}

int cmd_synth(const RunConfig& config, std::ostream& out, std::ostream& err) {
    try {
        const auto m = synthesize(config, config.output);
        write_run_record(config, config.output);
        out << "wrote " << m.entries.size() << " scenes to " << config.output.string() << "\n";
        return kSuccess;
    } catch (const std::invalid_argument& e) {
        err << "error: " << e.what() << "\n";
        return kUsage;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << "\n";
        return kFailure;
    }
}

int cmd_degrade(const RunConfig& config, std::ostream& out, std::ostream& err) {
    try {
        config.degradation.validate();
        const DatasetManifest input = load_input_dataset(config.input);
        const DatasetRun run = degrade_dataset(input, config.degradation, config.output, config.jobs);
        write_run_record(config, config.output);
        report_errors(run.errors, err);
        out << "degraded " << run.manifest.entries.size() << "/" << input.entries.size() << " images\n";
        return run.errors.empty() ? kSuccess : kFailure;
    } catch (const ManifestError& e) {
        err << "error: " << e.what() << "\n";
        return kFailure;
    } catch (const IoError& e) {
        err << "error: " << e.what() << "\n";
        return kFailure;
    } catch (const std::invalid_argument& e) {
        err << "error: " << e.what() << "\n";
        return kUsage;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << "\n";
        return kFailure;
    }
}

int cmd_restore(const RunConfig& config, std::ostream& out, std::ostream& err) {
    std::vector<std::string> chains = config.chains.empty() ? std::vector<std::string>{"bicubic"} : config.chains;
    if (chains.size() != 1) {
        err << "error: restore takes exactly one --chain\n";
        return kUsage;
    }
    Restorer restorer = [&]() -> Restorer {
        try {
            return build_restorer(chains.front());
        } catch (const std::exception& e) {
            err << "usage error: " << e.what() << "\n";
            return Restorer("", nullptr);
        }
    }();
    if (restorer.name().empty()) return kUsage;
    try {
        const DatasetManifest input = load_input_dataset(config.input);
        const DatasetRun run = restore_dataset(input, restorer, config.output, config.jobs);
        write_run_record(config, config.output);
        report_errors(run.errors, err);
        out << "restored " << run.manifest.entries.size() << "/" << input.entries.size() << " images with "
            << restorer.name() << "\n";
        return run.errors.empty() ? kSuccess : kFailure;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << "\n";
        return kFailure;
    }
}

int cmd_eval(const RunConfig& config, std::ostream& out, std::ostream& err) {
    try {
        const DatasetManifest pred = load_manifest(config.input / kManifestName);
        const DatasetManifest gt = load_manifest(config.gt / kManifestName);
        const MetricsReport report = evaluate_dataset(pred, gt, config.eval, config.jobs);
        const std::string table = report_table(report);
        if (!config.output.empty()) {
            fs::create_directories(config.output);
            write_file(config.output / "metrics.csv", report_csv(report));
            write_file(config.output / "metrics.txt", table);
            write_run_record(config, config.output);
        }
        out << table;
        return kSuccess;
    } catch (const ManifestError& e) {
        err << "error: " << e.what() << "\n";
        return kFailure;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << "\n";
        return kFailure;
    }
}

int cmd_bench(const RunConfig& config, std::ostream& out, std::ostream& err) {
    std::vector<std::string> chains = default_bench_chains();
    for (const auto& c : config.chains) {
        if (std::find(chains.begin(), chains.end(), c) == chains.end()) chains.push_back(c);
    }
    std::vector<Restorer> restorers;
    try {
        for (const auto& c : chains) restorers.push_back(build_restorer(c));
        config.degradation.validate();
        scene_specs(config);
    } catch (const std::exception& e) {
        err << "usage error: " << e.what() << "\n";
        return kUsage;
    }
    try {
        const fs::path root = config.output;
        fs::create_directories(root);
        const DatasetManifest scenes = synthesize(config, root / "scenes");
        const DatasetRun degraded = degrade_dataset(scenes, config.degradation, root / "lq", config.jobs);
        report_errors(degraded.errors, err);
        if (!degraded.errors.empty()) return kFailure;

        std::vector<std::pair<std::string, MetricsReport>> rows;
        bool partial = false;
        MetricsReport summary;
        for (std::size_t k = 0; k < restorers.size(); ++k) {
            const fs::path dir = root / "pred" / chain_slug(chains[k]);
            const DatasetRun run = restore_dataset(degraded.manifest, restorers[k], dir, config.jobs);
            report_errors(run.errors, err);
            if (!run.errors.empty()) {
                partial = true;
                continue;
            }
            const MetricsReport report = evaluate_dataset(run.manifest, scenes, config.eval, config.jobs);
            write_file(dir / "metrics.csv", report_csv(report));
            rows.emplace_back(restorers[k].name(), report);
            summary.images.push_back({restorers[k].name(), report.mae, report.rmse, report.silog});
        }
        std::stable_sort(rows.begin(), rows.end(), [](const auto& a, const auto& b) {
            return a.second.mae != b.second.mae ? a.second.mae < b.second.mae : a.first < b.first;
        });
        const std::string table = ranking_table(rows);
        write_file(root / "ranking.txt", table);
        write_file(root / "results.csv", report_csv(summary));
        write_run_record(config, root);
        out << table;
        return partial ? kFailure : kSuccess;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << "\n";
        return kFailure;
    }
}

int run(int argc, char** argv) {
    CLI::App app{"Compressed depth map degradation, restoration baselines and evaluation"};
    app.require_subcommand(1);
    app.set_version_flag("--version", kToolVersion);
    RunConfig cfg;
    std::string method = "block-mean";
    bool no_clamp = false;
    double mask_max_depth = 0.0;

    auto add_degradation = [&](CLI::App* sub) {
        sub->add_option("--seed", cfg.degradation.seed, "Random seed")->capture_default_str();
        sub->add_option("--bits", cfg.degradation.quant.bits, "Quantization bit depth")->capture_default_str();
        sub->add_option("--d-min", cfg.degradation.quant.d_min, "Lower end of the quantized range (m)")
            ->capture_default_str();
        sub->add_option("--d-max", cfg.degradation.quant.d_max, "Upper end of the quantized range (m)")
            ->capture_default_str();
        sub->add_option("--factor", cfg.degradation.factor, "Downscale factor")->capture_default_str();
        sub->add_option("--sigma-r2", cfg.degradation.noise.sigma_r2, "Read-noise variance")->capture_default_str();
        sub->add_option("--sigma-a2", cfg.degradation.noise.sigma_a2, "Additive-noise variance")
            ->capture_default_str();
        sub->add_option("--method", method, "Downscale method (block-mean|nearest|bilinear|bicubic)")
            ->capture_default_str();
        sub->add_flag("--no-clamp", no_clamp, "Keep negative noisy depths");
    };
    auto add_scene = [&](CLI::App* sub) {
        sub->add_option("--count", cfg.count, "Number of scenes")->capture_default_str();
        sub->add_option("--size", cfg.size, "Scene width and height (multiple of 8)")->capture_default_str();
        sub->add_option("--kind", cfg.scene_kind, "ramp|steps|spheres|textured-plane|mixed")->capture_default_str();
        sub->add_option("--depth-min", cfg.depth_min)->capture_default_str();
        sub->add_option("--depth-max", cfg.depth_max)->capture_default_str();
    };
    auto add_eval = [&](CLI::App* sub) {
        sub->add_option("--mask-max-depth", mask_max_depth, "Ignore ground-truth pixels deeper than this");
        sub->add_flag("--pooled-metrics", cfg.eval.pooled, "Pool pixels over all images");
    };
    auto add_jobs = [&](CLI::App* sub) {
        sub->add_option("--jobs", cfg.jobs, "Worker threads")->capture_default_str()->check(CLI::PositiveNumber);
    };

    auto* synth = app.add_subcommand("synth", "Generate synthetic HR depth + RGB scenes");
    synth->add_option("--output", cfg.output)->required();
    synth->add_option("--seed", cfg.degradation.seed)->capture_default_str();
    add_scene(synth);
    add_jobs(synth);

    auto* degrade_cmd = app.add_subcommand("degrade", "Produce LQ depth maps from an HR dataset");
    degrade_cmd->add_option("--input", cfg.input)->required();
    degrade_cmd->add_option("--output", cfg.output)->required();
    add_degradation(degrade_cmd);
    add_jobs(degrade_cmd);

    auto* restore_cmd = app.add_subcommand("restore", "Upsample an LQ dataset with a restorer chain");
    restore_cmd->add_option("--input", cfg.input)->required();
    restore_cmd->add_option("--output", cfg.output)->required();
    restore_cmd->add_option("--chain", cfg.chains, "e.g. 'jbu:sigma_spatial=2|clip:0.1,20'");
    add_jobs(restore_cmd);

    auto* eval_cmd = app.add_subcommand("eval", "Score predictions against ground truth");
    eval_cmd->add_option("--input", cfg.input, "Prediction dataset directory")->required();
    eval_cmd->add_option("--gt", cfg.gt, "Ground-truth dataset directory")->required();
    eval_cmd->add_option("--output", cfg.output, "Directory for metrics.csv / metrics.txt");
    add_eval(eval_cmd);
    add_jobs(eval_cmd);

    auto* bench_cmd = app.add_subcommand("bench", "Synthesize, degrade, restore and rank");
    bench_cmd->add_option("--output", cfg.output)->required();
    bench_cmd->add_option("--chain", cfg.chains, "Extra restorer chains");
    add_degradation(bench_cmd);
    add_scene(bench_cmd);
    add_eval(bench_cmd);
    add_jobs(bench_cmd);
    cfg.count = 5;

    try {
        // bench defaults differ from synth
        bench_cmd->preparse_callback([&](std::size_t) { cfg.count = 20; });
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e) == 0 ? kSuccess : kUsage;
    }

    try {
        cfg.degradation.downscale_method = parse_resample_method(method);
    } catch (const std::exception& e) {
        std::cerr << "usage error: " << e.what() << "\n";
        return kUsage;
    }
    cfg.degradation.clamp_nonneg = !no_clamp;
    for (auto* sub : {eval_cmd, bench_cmd}) {
        if (sub->parsed() && sub->count("--mask-max-depth") > 0) cfg.eval.mask_max_depth = mask_max_depth;
    }

    if (synth->parsed()) {
        cfg.subcommand = "synth";
        return cmd_synth(cfg, std::cout, std::cerr);
    }
    if (degrade_cmd->parsed()) {
        cfg.subcommand = "degrade";
        return cmd_degrade(cfg, std::cout, std::cerr);
    }
    if (restore_cmd->parsed()) {
        cfg.subcommand = "restore";
        return cmd_restore(cfg, std::cout, std::cerr);
    }
    if (eval_cmd->parsed()) {
        cfg.subcommand = "eval";
        return cmd_eval(cfg, std::cout, std::cerr);
    }
    cfg.subcommand = "bench";
    return cmd_bench(cfg, std::cout, std::cerr);
}

}  // namespace depthsr::cli
