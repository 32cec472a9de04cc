"""Entropy, dimensional entropy and Hausdorff dimension on symbolic systems."""
from .cover import (CoverSpec, EntropyEstimate, LocalBallSpec, conditional_cover_entropy,
                    conditional_entropy_star, estimate_cover_entropy, image_cover_entropy,
                    local_entropy, min_subcover_count, relative_entropy_over_factor,
                    separated_spanning_counts)
from .dimension import (CriticalExponent, CylinderElement, WeightedCylinderCover, best_cover,
                        dim_entropy, m_value, moran_oracle, n_value)
from .errors import *  # noqa: F401,F403
from .fractal import (CircleSet, DimensionEstimate, box_count_dimension, bridge_check,
                      hausdorff_dimension, hausdorff_measure_approx, project_intervals)
from .language import count_words, log_count_words, realized_words, schedule_entropy
from .lowering import (LoweringRequest, ProductExperiment, certify, diagonal_experiment, lower,
                       lower_in_full_shift, lower_in_sft, lower_within_subset)
from .symbolic import (EMPTY, BlockCode, DigitSetSchedule, MetricParams, ScheduleUnion,
                       SubshiftSpec, apply_block_code, is_mixing, spectral_entropy)
from .tower import (HStarProfile, PermutationPhi, TowerSystem, build_phi, build_tower,
                    h_star_profile, tower_local_entropy)

__version__ = "0.1.0"

__all__ = [
    "BaseEntropyTooSmall",
    "BlockCode",
    "CircleSet",
    "ConfigError",
    "CoverSpec",
    "CriticalExponent",
    "CylinderElement",
    "DepthCapTooSmall",
    "DepthOverflow",
    "DigitSetSchedule",
    "DimensionEstimate",
    "EMPTY",
    "EntropyEstimate",
    "HStarProfile",
    "InadmissibleWord",
    "IncompatibleAlphabet",
    "Inconclusive",
    "LocalBallSpec",
    "LoweringRequest",
    "MetricParams",
    "NonConvergentWarning",
    "NotIrreducibleWarning",
    "NotMixing",
    "PermutationPhi",
    "ProductExperiment",
    "ScaleUnderflow",
    "ScheduleUnion",
    "SubshiftSpec",
    "SymEntropyError",
    "TargetOutOfRange",
    "ToleranceUnachievable",
    "TowerSystem",
    "WeightedCylinderCover",
    "WordTooShort",
    "apply_block_code",
    "best_cover",
    "box_count_dimension",
    "bridge_check",
    "build_phi",
    "build_tower",
    "certify",
    "conditional_cover_entropy",
    "conditional_entropy_star",
    "count_words",
    "diagonal_experiment",
    "dim_entropy",
    "estimate_cover_entropy",
    "h_star_profile",
    "hausdorff_dimension",
    "hausdorff_measure_approx",
    "image_cover_entropy",
    "is_mixing",
    "local_entropy",
    "log_count_words",
    "lower",
    "lower_in_full_shift",
    "lower_in_sft",
    "lower_within_subset",
    "m_value",
    "min_subcover_count",
    "moran_oracle",
    "n_value",
    "project_intervals",
    "realized_words",
    "relative_entropy_over_factor",
    "schedule_entropy",
    "separated_spanning_counts",
    "spectral_entropy",
    "tower_local_entropy",
]
