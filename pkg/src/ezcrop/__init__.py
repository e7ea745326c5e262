"""Frequency-domain channel importance scoring and structured pruning plans."""

from .bench import TimingRecord, fit_loglog_slope, run_bench
from .errors import FormatError, NumericError
from .formats import (
    ManifestEntry,
    load_feature_maps,
    read_keep_spec,
    read_manifest,
    read_plan,
    read_scores,
    read_tensor,
    write_manifest,
    write_plan,
    write_scores,
    write_tensor,
)
from .importance import (
    DEFAULT_BETA,
    LayerImportance,
    ZoneGeometry,
    circle_radius,
    circle_score,
    energy_zone_ratio,
    layer_energy_scores,
    numerical_rank,
    rank_score,
    score_layer,
    sort_channels,
    zone_center,
    zone_distance,
)
from .pruner import (
    PlanLayer,
    PrunePlan,
    apply_plan,
    compose_plans,
    count_conv_flops,
    count_params,
    make_plan,
    prune_kernel_chain,
)
from .spectral import (
    circular_conv_direct,
    energy_map,
    expand_kernel,
    fft2,
    fftshift,
    ifft2,
    spectral_conv,
)
from .synth import ranked_channel, ranked_layer
from .verify import VerifyResult, run_verification

__version__ = "0.1.0"

__all__ = [
    "DEFAULT_BETA",
    "FormatError",
    "LayerImportance",
    "ManifestEntry",
    "NumericError",
    "PlanLayer",
    "PrunePlan",
    "TimingRecord",
    "VerifyResult",
    "ZoneGeometry",
    "apply_plan",
    "circle_radius",
    "circle_score",
    "circular_conv_direct",
    "compose_plans",
    "count_conv_flops",
    "count_params",
    "energy_map",
    "energy_zone_ratio",
    "expand_kernel",
    "fft2",
    "fftshift",
    "fit_loglog_slope",
    "ifft2",
    "layer_energy_scores",
    "load_feature_maps",
    "make_plan",
    "numerical_rank",
    "prune_kernel_chain",
    "rank_score",
    "read_keep_spec",
    "read_manifest",
    "read_plan",
    "read_scores",
    "read_tensor",
    "run_bench",
    "run_verification",
    "score_layer",
    "sort_channels",
    "spectral_conv",
    "write_manifest",
    "write_plan",
    "write_scores",
    "write_tensor",
    "zone_center",
    "zone_distance",
]
