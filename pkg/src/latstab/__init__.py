"""Stability of projection inequalities and lattice edge-isoperimetry.

Given a finite set of lattice points that nearly attains equality in the
Loomis-Whitney / Uniform Cover inequality (or the edge-isoperimetric
inequality on Z^d), construct the approximating box (or cube) and check the
quantitative closeness bounds against brute-force oracles.
"""

from latstab.lattice_core import (
    CubeSpec,
    LatticeBox,
    PointSet,
    annulus,
    cuboid,
    edge_boundary,
    notched_cube,
    perturbed_box,
    project,
    sym_diff_size,
)
from latstab.cover import (
    CoverFamily,
    CoverStats,
    cover_stats,
    is_uniform_cover,
    loomis_whitney_cover,
    uc_tightness,
)
from latstab.entropy_info import (
    INFINITE,
    LatticeDistribution,
    PartitionSpec,
    entropy,
    hole_weight,
    kl_divergence,
    marginal,
    mutual_information,
    pinsker_bound,
    telescope_check,
    tight_to_info_check,
    uniform_on,
)
from latstab.box_stability import (
    BoxStabilityReport,
    TrimResult,
    approximate_box,
    certify_bound,
    rectangle_2d,
    trim,
)
from latstab.iso_stability import (
    IsoReport,
    am_gm_stability_check,
    approximate_cube,
    heavy_light_filter,
    iso_deficit,
    sharpness_probe,
)
from latstab.oracle import (
    BudgetExceeded,
    OracleBudget,
    optimal_box,
    optimal_cube,
    recompute_direct,
)

__version__ = "0.1.0"

__all__ = [
    "INFINITE",
    "BoxStabilityReport",
    "BudgetExceeded",
    "CoverFamily",
    "CoverStats",
    "CubeSpec",
    "IsoReport",
    "LatticeBox",
    "LatticeDistribution",
    "OracleBudget",
    "PartitionSpec",
    "PointSet",
    "TrimResult",
    "am_gm_stability_check",
    "annulus",
    "approximate_box",
    "approximate_cube",
    "certify_bound",
    "cover_stats",
    "cuboid",
    "edge_boundary",
    "entropy",
    "heavy_light_filter",
    "hole_weight",
    "is_uniform_cover",
    "iso_deficit",
    "kl_divergence",
    "loomis_whitney_cover",
    "marginal",
    "mutual_information",
    "notched_cube",
    "optimal_box",
    "optimal_cube",
    "perturbed_box",
    "pinsker_bound",
    "project",
    "recompute_direct",
    "rectangle_2d",
    "sharpness_probe",
    "sym_diff_size",
    "telescope_check",
    "tight_to_info_check",
    "trim",
    "uc_tightness",
    "uniform_on",
]
