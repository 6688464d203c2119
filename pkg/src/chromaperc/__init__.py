"""chromaperc: colored-percolation experiments and exact correlation-inequality
verification on small ground sets."""

from .chroma import (ColorDistribution, independent_half_percolations,
                     mask_from_letters, pair_subset, sample_coloring,
                     xor_subset)
from .events import MonotoneProperty, check_monotone, random_generated_property
from .exact import (InequalityReport, exact_half, exact_joint, exact_p,
                    multi_joint, verify_case)
from .lattice import (Lattice, build_cubic, build_hexagon, build_rectangle,
                      build_rhombus, build_triangular_box)
from .mc import Estimate, ExperimentSpec, majority_limit, run, run_pair_check
from .rng import RandomStream
from .sweep import SweepConfig, estimate_alpha_c, p_alpha_proxy
from .sweep import sweep as run_sweep

__all__ = [
    "ColorDistribution", "Estimate", "ExperimentSpec", "InequalityReport",
    "Lattice", "MonotoneProperty", "RandomStream", "SweepConfig",
    "build_cubic", "build_hexagon", "build_rectangle", "build_rhombus",
    "build_triangular_box", "check_monotone", "estimate_alpha_c",
    "exact_half", "exact_joint", "exact_p", "independent_half_percolations",
    "majority_limit", "mask_from_letters", "multi_joint", "p_alpha_proxy",
    "pair_subset", "random_generated_property", "run", "run_pair_check",
    "run_sweep", "sample_coloring", "verify_case", "xor_subset",
]
