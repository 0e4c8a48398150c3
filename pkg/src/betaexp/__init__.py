"""Certified beta-expansions with controlled digit statistics.

Exact arithmetic in Z[beta] and outward-rounded intervals back every
decision; anything that cannot be settled raises ``Undecidable``.
"""

from .errors import BetaExpError, DomainError, Undecidable
from .numerics import BetaValue, RInterval, as_beta, golden_ratio, tribonacci_like
from .expansion import Alphabet, Direction, MapWord, canonical_intervals, map_into_O
from .synthesis import build_partition_table, compute_constants, synthesize_omega
from .frequency import (
    GrowthFunction,
    accumulation_expansion,
    frequency_expansion,
    hybrid_expansion,
    simply_normal_expansion,
    slow_growth_expansion,
)
from .thuemorse import (
    base_ladder,
    dim_lower_bound,
    komornik_loreti,
    locate_rung,
    multinacci,
    quasi_greedy,
    thue_morse,
)
from .affine import AffineParams, certify_delta, fibre_interval, hare_sidorov, point_in_fibre

__version__ = "0.1.0"
