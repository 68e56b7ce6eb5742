"""Phase-preserving curvelet-domain image denoising."""

from ._core import (  # noqa: F401
    CurveletTransform,
    DenoiseParams,
    FdctConfig,
    FinestMode,
    NoiseProfile,
    UndefinedResult,
    add_awgn,
    box_mean,
    ct_baseline,
    default_config,
    denoise,
    eki,
    guided_filter_self,
    load_image,
    load_profile,
    magnitude_sensitivity,
    monte_carlo_profile,
    pearson,
    phase_sensitivity,
    psnr,
    save_image,
    save_profile,
    ssim,
    thresholds,
    wedges_at_scale,
)

__version__ = "0.1.0"
