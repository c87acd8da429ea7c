import math

import numpy as np
import pytest

import depthsr


def test_quantization_round_trip():
    spec = depthsr.QuantSpec(bits=12, d_min=0.0, d_max=20.0)
    v = np.linspace(0.0, 20.0, 10001).reshape(1, -1)
    r = depthsr.bitdepth_reduce(v, spec)
    assert r.shape == v.shape
    assert np.max(np.abs(r - v)) <= spec.step / 2 + 1e-12
    np.testing.assert_array_equal(depthsr.bitdepth_reduce(r, spec), r)


def test_noise_variance_matches_model():
    d = np.full((500, 500), 10.0)
    n = depthsr.add_noise(d, seed=3, id="smoke") - d
    assert abs(n.var() - 2.05) / 2.05 < 0.02
    a = depthsr.add_noise(d, seed=3, id="smoke")
    np.testing.assert_array_equal(a, depthsr.add_noise(d, seed=3, id="smoke"))


def test_metrics_against_numpy():
    rng = np.random.default_rng(0)
    p = rng.uniform(0.5, 10, (32, 24))
    g = rng.uniform(0.5, 10, (32, 24))
    assert depthsr.mae(p, g) == pytest.approx(np.mean(np.abs(p - g)), rel=1e-12)
    assert depthsr.rmse(p, g) == pytest.approx(math.sqrt(np.mean((p - g) ** 2)), rel=1e-12)
    d = np.log(p) - np.log(g)
    assert depthsr.silog(p, g, lam=0.5) == pytest.approx(np.mean(d**2) - 0.5 * np.mean(d) ** 2, rel=1e-10)
    assert depthsr.silog_scaled(p * math.e, p) == pytest.approx(10 * math.sqrt(0.15), rel=1e-9)
    mask = np.zeros_like(p, dtype=bool)
    mask[0, 0] = True
    assert depthsr.mae(p, g, mask) == pytest.approx(abs(p[0, 0] - g[0, 0]))


def test_restorers_beat_bicubic_on_a_step_scene():
    depth, rgb = depthsr.generate_scene("steps", 256, 256, seed=5)
    assert depth.shape == (256, 256) and rgb.shape == (256, 256, 3)
    cfg = depthsr.DegradationConfig()
    cfg.seed = 11
    lq = depthsr.degrade(depth, cfg, "s")
    assert lq.shape == (32, 32)
    bicubic = depthsr.mae(depthsr.restore("bicubic", lq, rgb), depth)
    assert depthsr.mae(depthsr.jbu(lq, rgb), depth) < bicubic
    out = depthsr.restore("guided|clip:0.1,20", lq, rgb)
    assert out.shape == depth.shape and out.min() >= 0.1 and out.max() <= 20.0
    assert depthsr.canonical_chain("bicubic|clip:0.1,20") == "bicubic:factor=8|clip:lo=0.1,hi=20"


def test_fits():
    assert depthsr.theil_sen([0, 1, 2, 3, 4, 5], [0, 16, 32, 48, 64, 1000])[0] == 16.0
    rng = np.random.default_rng(1)
    p = rng.uniform(0, 10, (16, 16))
    s, t = depthsr.fit_scale_offset(p, 2 * p + 3)
    assert s == pytest.approx(2, abs=1e-9) and t == pytest.approx(3, abs=1e-9)
    with pytest.raises(depthsr.DegenerateFitError):
        depthsr.fit_scale_offset(np.ones((4, 4)), p[:4, :4])
    depth, _ = depthsr.generate_scene("spheres", 64, 64, seed=2)
    lq = depthsr.downscale(depth) / 16
    aligned = depthsr.align_prediction(depth / 16, lq)
    assert depthsr.mae(aligned, depth) < 1e-9


def test_errors_and_io(tmp_path):
    with pytest.raises(ValueError):
        depthsr.restore("lanczos", np.ones((2, 2)))
    with pytest.raises(ValueError):
        depthsr.mae(np.ones((2, 2)), np.ones((3, 2)))
    d = np.arange(12, dtype=np.float32).reshape(3, 4).astype(np.float64)
    depthsr.write_pfm(d, tmp_path / "d.pfm")
    np.testing.assert_array_equal(depthsr.read_depth(tmp_path / "d.pfm"), d)
    with pytest.raises(depthsr.IoError):
        depthsr.read_depth(tmp_path / "missing.pfm")
