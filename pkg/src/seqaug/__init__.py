"""seqaug: feature-wise temporal permutation augmentation for multimodal
sequence data.

For each sequence (and each augmented copy) a fraction of feature addresses
is sampled and exactly those features are shuffled along the time axis with
one shared permutation; all other values are copied bit-identically. Every
draw derives from (master_seed, sequence index, copy index, modality
ordinal), so results are reproducible across runs, platforms, thread counts,
and backends.
"""

from . import _backend
from .core import (
    AugmentConfig,
    AugmentPlan,
    Beta,
    ConfigError,
    FeatureSequence,
    Fixed,
    FoldedNormal,
    Mode,
    ModalityConfig,
    PlanLogRecord,
    SelectionDistribution,
    bits_equal,
    config_from_mapping,
    config_to_json,
    config_to_mapping,
    parse_config,
    validate_config,
)
from .engine import (
    MissingModalityError,
    MultimodalSample,
    PlanShapeError,
    apply_plan,
    augment_sample,
    augment_sequence,
    make_plan,
)
from .io import (
    CsvParseError,
    ModalityDataset,
    PlanLogError,
    SqafError,
    import_csv,
    import_csv_file,
    read_plan_log,
    read_sqaf,
    read_sqaf_file,
    write_plan_log,
    write_sqaf,
    write_sqaf_file,
)
from .sampling import (
    RngStream,
    derive_stream,
    draw_fraction,
    fraction_to_count,
    sample_addresses,
    sample_permutation,
    splitmix64,
)

__version__ = "0.1.0"


def backend_name() -> str:
    """Name of the active compute backend ('native' or 'python')."""
    return _backend.active_name()


__all__ = [
    "AugmentConfig", "AugmentPlan", "Beta", "ConfigError", "CsvParseError",
    "FeatureSequence", "Fixed", "FoldedNormal", "MissingModalityError",
    "Mode", "ModalityConfig", "ModalityDataset", "MultimodalSample",
    "PlanLogError", "PlanLogRecord", "PlanShapeError", "RngStream",
    "SelectionDistribution", "SqafError", "apply_plan", "augment_sample",
    "augment_sequence", "backend_name", "bits_equal", "config_from_mapping",
    "config_to_json", "config_to_mapping", "derive_stream", "draw_fraction",
    "fraction_to_count", "import_csv", "import_csv_file", "make_plan",
    "parse_config", "read_plan_log", "read_sqaf", "read_sqaf_file",
    "sample_addresses", "sample_permutation", "splitmix64", "validate_config",
    "write_plan_log", "write_sqaf", "write_sqaf_file", "__version__",
]
