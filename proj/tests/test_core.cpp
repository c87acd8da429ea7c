#include <doctest.h>

#include <cmath>
#include <random>

#include "depthsr/core.hpp"
#include "oracles.hpp"

using namespace depthsr;

TEST_CASE("quantize bounds and tie rounding") {
    const QuantSpec spec{12, 0.0, 20.0};
    const DepthMap m(3, 1, std::vector<double>{0.0, 20.0, 10.0});
    const LevelGrid q = quantize(m, spec);
    CHECK(q.at(0, 0) == 0u);
    CHECK(q.at(1, 0) == 4095u);
    // 10 / 20 * 4095 = 2047.5, ties away from zero
    CHECK(q.at(2, 0) == 2048u);

    // values outside the range clamp to the end levels
    const DepthMap out_of_range(2, 1, std::vector<double>{-3.0, 100.0});
    const LevelGrid qc = quantize(out_of_range, spec);
    CHECK(qc.at(0, 0) == 0u);
    CHECK(qc.at(1, 0) == 4095u);
}

TEST_CASE("quantize rejects non-finite input with the pixel coordinate") {
    DepthMap m(4, 3, 1.0);
    m.at(2, 1) = std::nan("");
    try {
        quantize(m, QuantSpec{});
        FAIL("expected rejection");
    } catch (const std::invalid_argument& e) {
        CHECK(std::string(e.what()).find("(2, 1)") != std::string::npos);
    }
}

TEST_CASE("quant spec validation") {
    CHECK_THROWS(QuantSpec{0, 0.0, 1.0}.validate());
    CHECK_THROWS(QuantSpec{17, 0.0, 1.0}.validate());
    CHECK_THROWS(QuantSpec{8, 1.0, 1.0}.validate());
    CHECK_NOTHROW(QuantSpec{16, 0.0, 65504.0}.validate());
}

TEST_CASE("dequantize ends and out-of-range levels") {
    const QuantSpec spec{8, 2.0, 10.0};
    const LevelGrid levels(2, 1, std::vector<std::uint32_t>{0u, 255u});
    const DepthMap d = dequantize(levels, spec);
    CHECK(d.at(0, 0) == 2.0);
    CHECK(d.at(1, 0) == 10.0);
    CHECK_THROWS_AS(dequantize(LevelGrid(1, 1, 256u), spec), std::invalid_argument);
}

TEST_CASE("quantize(dequantize(q)) == q for every level") {
    for (int bits : {1, 4, 8, 12, 16}) {
        const QuantSpec spec{bits, 0.5, 37.25};
        const std::uint32_t n = spec.max_level() + 1;
        LevelGrid all(static_cast<int>(n), 1);
        for (std::uint32_t i = 0; i < n; ++i) all.at(static_cast<int>(i), 0) = i;
        CHECK(quantize(dequantize(all, spec), spec) == all);
    }
}

TEST_CASE("bitdepth_reduce error bound on random values") {
    std::mt19937_64 rng(7);
    const QuantSpec spec{12, 0.0, 20.0};
    const DepthMap v = oracle::random_map(rng, 1000, 100, 0.0, 20.0);
    const DepthMap r = bitdepth_reduce(v, spec);
    double worst = 0.0;
    for (std::size_t i = 0; i < v.pixel_count(); ++i) worst = std::max(worst, std::abs(r.storage()[i] - v.storage()[i]));
    CHECK(worst <= spec.step() / 2 + 1e-12);
}

TEST_CASE("bitdepth_reduce is idempotent and fixes representable constants") {
    const QuantSpec spec{12, 0.0, 20.0};
    std::mt19937_64 rng(3);
    const DepthMap v = oracle::random_map(rng, 64, 64, -1.0, 25.0);
    const DepthMap once = bitdepth_reduce(v, spec);
    CHECK(bitdepth_reduce(once, spec) == once);

    const DepthMap constant(8, 8, dequantize_value(1234, spec));
    CHECK(bitdepth_reduce(constant, spec) == constant);
}

TEST_CASE("bitdepth_reduce ramp scan reaches step/2") {
    // a dense ramp hits points arbitrarily close to the level midpoints
    const QuantSpec spec{8, 0.0, 20.0};
    const int n = 200001;
    DepthMap ramp(n, 1);
    for (int i = 0; i < n; ++i) ramp.at(i, 0) = 20.0 * i / (n - 1);
    const DepthMap r = bitdepth_reduce(ramp, spec);
    double worst = 0.0;
    for (int i = 0; i < n; ++i) worst = std::max(worst, std::abs(r.at(i, 0) - ramp.at(i, 0)));
    CHECK(worst <= spec.step() / 2 + 1e-12);
    CHECK(worst >= spec.step() / 2 - 1e-3 * spec.step());
}

TEST_CASE("block-mean downscale") {
    SUBCASE("constant") {
        const DepthMap c(32, 16, 4.5);
        const DepthMap d = downscale(c, 8);
        CHECK(d.width() == 4);
        CHECK(d.height() == 2);
        for (double v : d.values()) CHECK(v == 4.5);
    }
    SUBCASE("single block") {
        CHECK(downscale(DepthMap(8, 8, 3.25), 8) == DepthMap(1, 1, 3.25));
    }
    SUBCASE("checkerboard of {0, 2} -> all ones") {
        DepthMap cb(16, 16);
        for (int y = 0; y < 16; ++y)
            for (int x = 0; x < 16; ++x) cb.at(x, y) = ((x + y) % 2) ? 2.0 : 0.0;
        const DepthMap d = downscale(cb, 8);
        CHECK(d == DepthMap(2, 2, 1.0));
    }
    SUBCASE("non-divisible dimensions are rejected") {
        CHECK_THROWS_AS(downscale(DepthMap(17, 16), 8), std::invalid_argument);
    }
    SUBCASE("global mean is preserved") {
        std::mt19937_64 rng(11);
        const DepthMap m = oracle::random_map(rng, 64, 48, 0.0, 100.0);
        const DepthMap d = downscale(m, 8);
        double a = 0, b = 0;
        for (double v : m.values()) a += v;
        for (double v : d.values()) b += v;
        CHECK(oracle::rel_diff(a / m.pixel_count(), b / d.pixel_count()) < 1e-6);
    }
}

TEST_CASE("upscale reproduces constants for every method") {
    const DepthMap c(5, 4, 7.0);
    for (auto m : {ResampleMethod::Nearest, ResampleMethod::Bilinear, ResampleMethod::Bicubic,
                   ResampleMethod::BlockMean}) {
        const DepthMap u = upscale(c, 3, m);
        CHECK(u.width() == 15);
        CHECK(u.height() == 12);
        for (double v : u.values()) CHECK(v == doctest::Approx(7.0).epsilon(1e-12));
    }
}

TEST_CASE("nearest x2 of a single pixel") {
    CHECK(upscale(DepthMap(1, 1, 2.5), 2, ResampleMethod::Nearest) == DepthMap(2, 2, 2.5));
}

TEST_CASE("bicubic reproduces linear ramps in the interior") {
    const int w = 16, h = 12, f = 8;
    DepthMap lq(w, h);
    auto plane = [](double u, double v) { return 1.5 + 0.75 * u - 0.4 * v; };
    for (int y = 0; y < h; ++y)
        for (int x = 0; x < w; ++x) lq.at(x, y) = plane(x, y);
    const DepthMap hr = upscale(lq, f, ResampleMethod::Bicubic);
    double worst = 0.0;
    for (int y = 0; y < hr.height(); ++y) {
        for (int x = 0; x < hr.width(); ++x) {
            const double u = (x + 0.5) / f - 0.5;
            const double v = (y + 0.5) / f - 0.5;
            // four-tap support must stay inside the source grid
            if (u < 1.0 || v < 1.0 || u > w - 2.0 || v > h - 2.0) continue;
            worst = std::max(worst, std::abs(hr.at(x, y) - plane(u, v)));
        }
    }
    CHECK(worst < 1e-5);
}

TEST_CASE("catmull-rom weights") {
    CHECK(cubic_weight(0.0) == 1.0);
    CHECK(cubic_weight(1.0) == doctest::Approx(0.0));
    CHECK(cubic_weight(2.0) == 0.0);
    CHECK(cubic_weight(1.5) == doctest::Approx(-0.0625));
    for (double t : {0.1, 0.37, 0.5, 0.91}) {
        const double sum = cubic_weight(t + 1) + cubic_weight(t) + cubic_weight(1 - t) + cubic_weight(2 - t);
        CHECK(sum == doctest::Approx(1.0).epsilon(1e-14));
    }
}

TEST_CASE("flip_horizontal") {
    const DepthMap row(3, 1, std::vector<double>{1, 2, 3});
    CHECK(flip_horizontal(row) == DepthMap(3, 1, std::vector<double>{3, 2, 1}));
    const DepthMap sym(3, 1, std::vector<double>{4, 9, 4});
    CHECK(flip_horizontal(sym) == sym);

    std::mt19937_64 rng(5);
    const RgbImage rgb = oracle::random_rgb(rng, 7, 5);
    CHECK(flip_horizontal(flip_horizontal(rgb)) == rgb);
    const DepthMap m = oracle::random_map(rng, 16, 8, 0, 1);
    CHECK(flip_horizontal(flip_horizontal(m)) == m);
}

TEST_CASE("flip commutes with block-mean downscale and bicubic upscale") {
    std::mt19937_64 rng(9);
    const DepthMap m = oracle::random_map(rng, 32, 16, 0, 10);
    const DepthMap da = flip_horizontal(downscale(m, 8));
    const DepthMap db = downscale(flip_horizontal(m), 8);
    for (std::size_t i = 0; i < da.pixel_count(); ++i) CHECK(da.storage()[i] == doctest::Approx(db.storage()[i]).epsilon(1e-12));
    const DepthMap a = flip_horizontal(upscale(m, 4, ResampleMethod::Bicubic));
    const DepthMap b = upscale(flip_horizontal(m), 4, ResampleMethod::Bicubic);
    for (std::size_t i = 0; i < a.pixel_count(); ++i) CHECK(a.storage()[i] == doctest::Approx(b.storage()[i]).epsilon(1e-12));
}

TEST_CASE("resample method names round-trip") {
    for (auto m : {ResampleMethod::BlockMean, ResampleMethod::Nearest, ResampleMethod::Bilinear,
                   ResampleMethod::Bicubic}) {
        CHECK(parse_resample_method(to_string(m)) == m);
    }
    CHECK_THROWS(parse_resample_method("lanczos"));
}
