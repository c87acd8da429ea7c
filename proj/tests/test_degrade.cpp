#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <random>

#include "depthsr/dataio.hpp"
#include "depthsr/dataset.hpp"
#include "depthsr/degrade.hpp"
#include "oracles.hpp"

using namespace depthsr;
namespace fs = std::filesystem;

namespace {

struct Moments {
    double mean = 0;
    double var = 0;
};

Moments moments(const DepthMap& m) {
    long double s = 0, s2 = 0;
    for (double v : m.values()) s += v;
    const long double mean = s / m.pixel_count();
    for (double v : m.values()) s2 += (v - mean) * (v - mean);
    return {static_cast<double>(mean), static_cast<double>(s2 / (m.pixel_count() - 1))};
}

fs::path scratch(const std::string& name) {
    const fs::path p = fs::temp_directory_path() / ("depthsr_test_degrade_" + name);
    fs::remove_all(p);
    fs::create_directories(p);
    return p;
}

}  // namespace

TEST_CASE("zero variances give zero noise") {
    RngStream rng(1, "a");
    const DepthMap n = sample_noise(DepthMap(32, 32, 5.0), NoiseParams{0.0, 0.0}, rng);
    for (double v : n.values()) CHECK(v == 0.0);
}

TEST_CASE("negative variance is rejected") {
    RngStream rng(1, "a");
    CHECK_THROWS(sample_noise(DepthMap(2, 2), NoiseParams{-0.1, 0.0}, rng));
}

TEST_CASE("additive-only noise variance") {
    RngStream rng(42, "additive");
    const DepthMap n = sample_noise(DepthMap(1000, 1000, 0.0), NoiseParams{0.02, 0.05}, rng);
    const Moments m = moments(n);
    CHECK(std::abs(m.var - 0.05) / 0.05 < 0.01);
    CHECK(std::abs(m.mean) < 3 * std::sqrt(0.05 / 1e6));
}

TEST_CASE("signal-dependent noise variance at d = 10") {
    RngStream rng(42, "signal");
    const DepthMap n = sample_noise(DepthMap(1000, 1000, 10.0), NoiseParams{}, rng);
    const Moments m = moments(n);
    const double expected = 10.0 * 10.0 * 0.02 + 0.05;
    CHECK(std::abs(m.var - expected) / expected < 0.01);
    CHECK(std::abs(m.mean) < 3 * std::sqrt(expected / 1e6));
}

TEST_CASE("read and additive components are uncorrelated") {
    // Var[d n_r + n_a] only splits as d^2 s_r^2 + s_a^2 if the parts are independent;
    // check the split holds at two depths with the same stream layout.
    for (double d : {1.0, 4.0}) {
        RngStream rng(7, "split");
        const Moments m = moments(sample_noise(DepthMap(1000, 500, d), NoiseParams{0.02, 0.05}, rng));
        const double expected = d * d * 0.02 + 0.05;
        CHECK(std::abs(m.var - expected) / expected < 0.015);
    }
}

TEST_CASE("rng streams are reproducible and keyed by id") {
    RngStream a(5, "img"), b(5, "img"), c(5, "img2"), d(6, "img");
    for (int i = 0; i < 100; ++i) {
        const double va = a.uniform();
        CHECK(va == b.uniform());
        CHECK(va > 0.0);
        CHECK(va < 1.0);
    }
    CHECK(RngStream(5, "img").stream_seed() != c.stream_seed());
    CHECK(RngStream(5, "img").stream_seed() != d.stream_seed());
    // documented derivation
    CHECK(RngStream(5, "img").stream_seed() == splitmix64(5 ^ fnv1a64("img")));
}

TEST_CASE("fnv1a64 reference values") {
    CHECK(fnv1a64("") == 0xcbf29ce484222325ULL);
    CHECK(fnv1a64("a") == 0xaf63dc4c8601ec8cULL);
}

TEST_CASE("noise-free 16-bit degrade reduces to resampling") {
    std::mt19937_64 rng(1);
    const DepthMap hr = oracle::random_map(rng, 64, 32, 0.5, 19.5);
    DegradationConfig cfg;
    cfg.quant = {16, 0.0, 20.0};
    cfg.noise = {0.0, 0.0};
    const DegradeResult r = degrade(hr, cfg, "x");
    const DepthMap expected = downscale(hr, 8);
    REQUIRE(r.lq.same_size(expected));
    for (std::size_t i = 0; i < expected.pixel_count(); ++i) {
        CHECK(std::abs(r.lq.storage()[i] - expected.storage()[i]) <= cfg.quant.step() / 2 + 1e-12);
    }
    CHECK(r.lq == r.intermediate);
}

TEST_CASE("degrade is deterministic and clamps") {
    std::mt19937_64 rng(2);
    const DepthMap hr = oracle::random_map(rng, 128, 64, 0.0, 0.2);
    DegradationConfig cfg;
    cfg.seed = 99;
    const DegradeResult a = degrade(hr, cfg, "scene");
    const DegradeResult b = degrade(hr, cfg, "scene");
    CHECK(a.lq == b.lq);
    CHECK(*std::min_element(a.lq.values().begin(), a.lq.values().end()) >= 0.0);

    cfg.clamp_nonneg = false;
    const DegradeResult raw = degrade(hr, cfg, "scene");
    CHECK(*std::min_element(raw.lq.values().begin(), raw.lq.values().end()) < 0.0);
    CHECK_THROWS(degrade(DepthMap(12, 8), DegradationConfig{}, "odd"));
}

TEST_CASE("noise is zero-mean across seeds at a fixed pixel") {
    const DepthMap hr(8, 8, 6.0);
    DegradationConfig cfg;
    cfg.clamp_nonneg = false;
    const int n = 10000;
    long double sum = 0;
    double d = 0;
    for (int s = 0; s < n; ++s) {
        cfg.seed = static_cast<std::uint64_t>(s);
        const DegradeResult r = degrade(hr, cfg, "px");
        sum += r.lq.at(0, 0);
        d = r.intermediate.at(0, 0);
    }
    const double sigma = std::sqrt(d * d * cfg.noise.sigma_r2 + cfg.noise.sigma_a2);
    CHECK(std::abs(static_cast<double>(sum / n) - d) < 3 * sigma / std::sqrt(static_cast<double>(n)));
}

TEST_CASE("degrade_dataset contracts") {
    const fs::path root = scratch("dataset");
    DatasetManifest empty;
    empty.base_dir = root;
    CHECK_THROWS(degrade_dataset(empty, DegradationConfig{}, root / "out"));

    std::mt19937_64 rng(3);
    DatasetManifest in;
    in.base_dir = root;
    for (const char* id : {"a", "b", "c"}) {
        write_pfm(oracle::random_map(rng, 64, 48, 1.0, 15.0), root / (std::string(id) + ".pfm"));
        in.entries.push_back({id, std::nullopt, std::string(id) + ".pfm", std::nullopt});
    }
    DegradationConfig cfg;
    cfg.seed = 5;

    SUBCASE("one image gives HR/8 output") {
        DatasetManifest one = in;
        one.entries.resize(1);
        const DatasetRun run = degrade_dataset(one, cfg, root / "one");
        REQUIRE(run.errors.empty());
        const DepthMap lq = read_depth(root / "one" / "a_lq.pfm");
        CHECK(lq.width() == 8);
        CHECK(lq.height() == 6);
        const DatasetManifest back = load_manifest(root / "one" / kManifestName);
        CHECK(back.config == cfg);
    }
    SUBCASE("order and thread count do not change outputs") {
        DatasetManifest shuffled = in;
        std::reverse(shuffled.entries.begin(), shuffled.entries.end());
        REQUIRE(degrade_dataset(in, cfg, root / "fwd", 1).errors.empty());
        REQUIRE(degrade_dataset(shuffled, cfg, root / "rev", 3).errors.empty());
        for (const char* id : {"a", "b", "c"}) {
            const std::string name = std::string(id) + "_lq.pfm";
            CHECK(fnv1a64(read_file(root / "fwd" / name)) == fnv1a64(read_file(root / "rev" / name)));
        }
    }
    SUBCASE("unreadable item is recorded and the run continues") {
        write_file(root / "bad.pfm", "garbage");
        DatasetManifest with_bad = in;
        with_bad.entries.push_back({"bad", std::nullopt, "bad.pfm", std::nullopt});
        const DatasetRun run = degrade_dataset(with_bad, cfg, root / "bad_out");
        REQUIRE(run.errors.size() == 1);
        CHECK(run.errors[0].id == "bad");
        CHECK(run.manifest.entries.size() == 3);
    }
}

TEST_CASE("config JSON round-trips") {
    DegradationConfig cfg;
    cfg.seed = 0xfedcba9876543210ULL;
    cfg.quant = {10, 0.25, 80.0};
    cfg.noise = {0.013, 0.07};
    cfg.downscale_method = ResampleMethod::Nearest;
    cfg.clamp_nonneg = false;
    const std::string text = config_to_json(cfg);
    CHECK(config_from_json(text) == cfg);
    CHECK(config_to_json(config_from_json(text)) == text);
    CHECK_THROWS(config_from_json(R"({"quant":{"bits":12,"d_min":0,"d_max":20},"factor":8,"downscale_method":"block-mean","noise":{"sigma_r2":0.02,"sigma_a2":0.05},"seed":1,"clamp_nonneg":true,"extra":1})"));
}
