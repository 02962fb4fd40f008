"""Window feature families: pooled appearance embeddings, temporal-stability
deltas, dense optical-flow motion summaries, and per-block z-scored fusion."""

from .embeddings import PooledDescriptor, TemporalDeltas, l2_normalize, pool, temporal_deltas
from .encoders import HashProjectionEncoder, PrecomputedEmbeddings, build_registry, resolve_encoder
from .flow import FLOW_PRESETS, FlowParams, FlowPreset, MotionSummary, farneback_flow, motion_summary
from .fusion import BlockStats, FusionStats, apply_zscore, fuse, zscore_block
from .extract import FeatureSpec, FusedSpec, extract_features, spec_from_dict

__all__ = [
    "PooledDescriptor",
    "TemporalDeltas",
    "l2_normalize",
    "pool",
    "temporal_deltas",
    "HashProjectionEncoder",
    "PrecomputedEmbeddings",
    "build_registry",
    "resolve_encoder",
    "FLOW_PRESETS",
    "FlowParams",
    "FlowPreset",
    "MotionSummary",
    "farneback_flow",
    "motion_summary",
    "BlockStats",
    "FusionStats",
    "apply_zscore",
    "fuse",
    "zscore_block",
    "FeatureSpec",
    "FusedSpec",
    "extract_features",
    "spec_from_dict",
]
