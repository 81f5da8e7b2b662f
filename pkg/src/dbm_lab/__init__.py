"""Exact community recovery on sparse graphs with node attributes."""

__version__ = "0.1.0"

from .divergences import (
    ch_divergence,
    chernoff_information,
    ct_divergence,
    ct_divergence_poisson,
    data_cannot_help,
    delta_noisy_erasure,
    separation_rate,
    threshold_erased,
    threshold_sbm,
    tv_distance,
)
from .metrics import aggregate, data_only_erp_closed_form, flip_invariant_error
from .model import (
    ChannelSpec,
    DbmParams,
    DbmSample,
    Graph,
    degree_profile,
    erased_channel,
    exponent_channel,
    noisy_channel,
    sample_dbm,
    split_graph,
)
from .recovery import (
    RecoveryResult,
    RefineConfig,
    canonicalize,
    map_refine,
    map_score,
    recover,
    scheffe_test,
    spectral_partition,
    symmetry_set,
)

__all__ = [
    "__version__",
    "ch_divergence",
    "chernoff_information",
    "ct_divergence",
    "ct_divergence_poisson",
    "data_cannot_help",
    "delta_noisy_erasure",
    "separation_rate",
    "threshold_erased",
    "threshold_sbm",
    "tv_distance",
    "aggregate",
    "data_only_erp_closed_form",
    "flip_invariant_error",
    "ChannelSpec",
    "DbmParams",
    "DbmSample",
    "Graph",
    "degree_profile",
    "erased_channel",
    "exponent_channel",
    "noisy_channel",
    "sample_dbm",
    "split_graph",
    "RecoveryResult",
    "RefineConfig",
    "canonicalize",
    "map_refine",
    "map_score",
    "recover",
    "scheffe_test",
    "spectral_partition",
    "symmetry_set",
]
