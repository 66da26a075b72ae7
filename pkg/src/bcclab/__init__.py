"""Rate regions, channel-set distances and continuity checks for compound
broadcast channels with confidential messages."""

from .avc import AVCFamily, SymmetrizerResult, example_family, lambda_sweep, symmetrizability_check
from .channels import (
    BroadcastPair,
    Channel,
    CompoundBCC,
    marginals,
    perturb_compound,
    product_channel,
    validate_channel,
)
from .continuity import (
    ContinuityReport,
    DeltaBundle,
    delta_bundle,
    hybrid_distribution,
    verify_capacity_continuity,
    verify_entropy_continuity,
    verify_mi_continuity,
    verify_rectangle_continuity,
    verify_telescoping,
)
from .info import (
    AuxiliaryInput,
    JointDistribution,
    binary_entropy,
    conditional_mutual_information,
    entropy,
    induced_joint,
    mutual_information,
    total_variation,
)
from .metrics import (
    channel_distance,
    compound_distance,
    convex_region_distance,
    directed_set_distance,
    pair_distance,
    rectangle_corner_gap,
    region_distance,
)
from .regions import (
    GridSpec,
    RateRectangle,
    RegionApproximation,
    capacity_region_approx,
    convex_hull,
    rate_rectangle,
    region_Mn,
)

__version__ = "0.1.0"
