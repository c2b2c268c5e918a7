"""Quality metrics and efficiency profiling."""

from ..losses.perceptual import lpips_like
from .frechet import (
    GaussianStats,
    embed_images,
    fid_score,
    fit_gaussian,
    frechet_distance,
)
from .profiling import (
    LatencyStats,
    ProfileRow,
    benchmark_latency,
    comparison_report,
    count_flops,
    count_params,
    memory_estimate,
    profile_model,
    write_report,
)
