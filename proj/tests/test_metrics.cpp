#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "depthsr/metrics.hpp"
#include "oracles.hpp"

using namespace depthsr;

namespace {
DepthMap row(std::vector<double> v) {
    const int n = static_cast<int>(v.size());
    return DepthMap(n, 1, std::move(v));
}
}  // namespace

TEST_CASE("mae and rmse small cases") {
    const DepthMap p = row({1, 2, 3});
    const DepthMap g = row({1, 2, 5});
    CHECK(mae(p, p) == 0.0);
    CHECK(rmse(p, p) == 0.0);
    CHECK(mae(p, g) == doctest::Approx(2.0 / 3.0).epsilon(1e-15));
    CHECK(rmse(p, g) == doctest::Approx(std::sqrt(4.0 / 3.0)).epsilon(1e-15));
    CHECK(rmse(p, g) == doctest::Approx(1.154700).epsilon(1e-6));
}

TEST_CASE("metric errors") {
    CHECK_THROWS(mae(DepthMap(2, 2), DepthMap(2, 3)));
    CHECK_THROWS(rmse(DepthMap(2, 2), DepthMap(2, 2), PixelMask(2, 2, 0)));
    CHECK_THROWS(silog(row({1, 0}), row({1, 1})));
    CHECK_THROWS(silog(row({1, 2}), row({1, -1})));
    CHECK_THROWS(silog(row({1, 2}), row({1, 2}), 1.5));
}

TEST_CASE("masked metrics ignore excluded pixels") {
    const DepthMap p = row({1, 2, 100});
    const DepthMap g = row({2, 2, 0});
    const PixelMask m(3, 1, std::vector<std::uint8_t>{1, 1, 0});
    CHECK(mae(p, g, m) == 0.5);
}

TEST_CASE("metrics match the naive oracles on random pairs") {
    std::mt19937_64 rng(17);
    for (int trial = 0; trial < 20; ++trial) {
        const DepthMap p = oracle::random_map(rng, 64, 64, 0.1, 30);
        const DepthMap g = oracle::random_map(rng, 64, 64, 0.1, 30);
        CHECK(oracle::rel_diff(mae(p, g), oracle::mae(p.storage(), g.storage())) < 1e-9);
        CHECK(oracle::rel_diff(rmse(p, g), oracle::rmse(p.storage(), g.storage())) < 1e-9);
        CHECK(oracle::rel_diff(silog(p, g, 0.5), oracle::silog(p.storage(), g.storage(), 0.5)) < 1e-9);
        CHECK(rmse(p, g) >= mae(p, g));
        // symmetry and translation invariance
        CHECK(mae(p, g) == doctest::Approx(mae(g, p)).epsilon(1e-12));
        DepthMap ps = p, gs = g;
        for (auto& v : ps.storage()) v += 3.0;
        for (auto& v : gs.storage()) v += 3.0;
        CHECK(mae(ps, gs) == doctest::Approx(mae(p, g)).epsilon(1e-9));
    }
}

TEST_CASE("rmse >= mae on 1000 random pairs") {
    std::mt19937_64 rng(23);
    for (int i = 0; i < 1000; ++i) {
        const DepthMap p = oracle::random_map(rng, 8, 8, 0, 10);
        const DepthMap g = oracle::random_map(rng, 8, 8, 0, 10);
        REQUIRE(rmse(p, g) >= mae(p, g) * (1 - 1e-15));
    }
}

TEST_CASE("silog closed forms") {
    std::mt19937_64 rng(29);
    const DepthMap g = oracle::random_map(rng, 32, 32, 0.5, 10);
    DepthMap p = g;
    for (auto& v : p.storage()) v *= std::numbers::e;
    CHECK(silog(g, g, 0.5) == 0.0);
    CHECK(silog_scaled(g, g) == 0.0);
    CHECK(silog(p, g, 0.5) == doctest::Approx(0.5).epsilon(1e-12));
    CHECK(silog_scaled(p, g, SilogParams{0.85, 10}) == doctest::Approx(10 * std::sqrt(0.15)).epsilon(1e-9));
    CHECK(silog_scaled(p, g, SilogParams{0.85, 10}) == doctest::Approx(3.872983).epsilon(1e-6));

    // lambda = 1 is fully scale invariant
    DepthMap c = g;
    for (auto& v : c.storage()) v *= 3.7;
    CHECK(std::abs(silog(c, g, 1.0)) < 1e-12);
    CHECK(silog_scaled(c, g, SilogParams{1.0, 10}) < 1e-5);
}

TEST_CASE("silog limits and scaled variant consistency") {
    std::mt19937_64 rng(31);
    for (int i = 0; i < 100; ++i) {
        const DepthMap p = oracle::random_map(rng, 16, 16, 0.1, 20);
        const DepthMap g = oracle::random_map(rng, 16, 16, 0.1, 20);
        // lambda = 0 is the mean squared log error
        double msle = 0;
        for (std::size_t k = 0; k < p.pixel_count(); ++k) {
            const double d = std::log(p.storage()[k]) - std::log(g.storage()[k]);
            msle += d * d;
        }
        msle /= p.pixel_count();
        CHECK(silog(p, g, 0.0) == doctest::Approx(msle).epsilon(1e-12));
        // lambda = 1 invariant under pred -> c pred
        DepthMap pc = p;
        for (auto& v : pc.storage()) v *= 2.5;
        CHECK(silog(pc, g, 1.0) == doctest::Approx(silog(p, g, 1.0)).epsilon(1e-9));
        const SilogParams params{0.85, 10};
        CHECK(oracle::rel_diff(silog_scaled(p, g, params), 10 * std::sqrt(silog(p, g, 0.85))) < 1e-12);
    }
}

TEST_CASE("report aggregation") {
    EvalOptions opt;
    std::vector<ImageMetrics> images = {{"b", 2.0, 3.0, 0.5}, {"a", 1.0, 1.0, std::nullopt}};
    const MetricsReport r = assemble_report(images, opt);
    CHECK(r.images.front().id == "a");
    CHECK(r.mae == 1.5);
    CHECK(r.rmse == 2.0);
    REQUIRE(r.silog);
    CHECK(*r.silog == 0.5);
    CHECK(report_csv(r) == "id,mae,rmse,silog\na,1,1,\nb,2,3,0.5\n");

    const MetricsReport quoted = assemble_report({{"jbu:a=1,b=\"2\"", 1.0, 1.0, std::nullopt}}, opt);
    CHECK(report_csv(quoted) == "id,mae,rmse,silog\n\"jbu:a=1,b=\"\"2\"\"\",1,1,\n");

    const MetricsReport single = assemble_report({{"only", 0.25, 0.5, 1.0}}, opt);
    CHECK(single.mae == 0.25);
    CHECK(single.rmse == 0.5);
    CHECK_THROWS(assemble_report({}, opt));
}

TEST_CASE("pooled aggregation weights by pixel count") {
    EvalOptions opt;
    opt.pooled = true;
    const DepthMap g1(2, 1, 0.0), p1(2, 1, 1.0);
    const DepthMap g2(6, 1, 0.0), p2(6, 1, 3.0);
    ErrorSums s1, s2;
    auto m1 = evaluate_image("one", p1, g1, opt, &s1);
    auto m2 = evaluate_image("two", p2, g2, opt, &s2);
    const MetricsReport r = assemble_report({m1, m2}, opt, {s1, s2});
    CHECK(r.mae == doctest::Approx((2 * 1.0 + 6 * 3.0) / 8));
    CHECK(r.rmse == doctest::Approx(std::sqrt((2 * 1.0 + 6 * 9.0) / 8)));
    CHECK(r.pixel_count == 8);
}

TEST_CASE("max-depth mask excludes far ground truth") {
    EvalOptions opt;
    opt.mask_max_depth = 50.0;
    const DepthMap g = row({10, 65504});
    const DepthMap p = row({11, 25});
    const ImageMetrics m = evaluate_image("sky", p, g, opt);
    CHECK(m.mae == 1.0);
}

TEST_CASE("table layout has an aggregate row") {
    const MetricsReport r = assemble_report({{"img", 1.0, 2.0, std::nullopt}}, EvalOptions{});
    const std::string t = report_table(r);
    CHECK(t.find("MAE") != std::string::npos);
    CHECK(t.find("mean") != std::string::npos);
}
