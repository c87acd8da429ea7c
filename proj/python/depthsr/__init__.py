"""Depth map degradation, guided restoration and evaluation.

Depth maps are 2-D float64 arrays (height, width) in meters; guides are
(height, width, 3) arrays with values in [0, 1].
"""

from ._depthsr import (
    DegenerateFitError,
    DegradationConfig,
    IoError,
    QuantSpec,
    add_noise,
    align_prediction,
    bitdepth_reduce,
    canonical_chain,
    degrade,
    downscale,
    fit_scale_offset,
    generate_scene,
    guided_filter,
    jbu,
    mae,
    read_depth,
    read_rgb,
    restore,
    rmse,
    silog,
    silog_scaled,
    theil_sen,
    upscale,
    write_pfm,
)

__version__ = "0.1.0"

__all__ = [
    "DegenerateFitError",
    "DegradationConfig",
    "IoError",
    "QuantSpec",
    "add_noise",
    "align_prediction",
    "bitdepth_reduce",
    "canonical_chain",
    "degrade",
    "downscale",
    "fit_scale_offset",
    "generate_scene",
    "guided_filter",
    "jbu",
    "mae",
    "read_depth",
    "read_rgb",
    "restore",
    "rmse",
    "silog",
    "silog_scaled",
    "theil_sen",
    "upscale",
    "write_pfm",
]
