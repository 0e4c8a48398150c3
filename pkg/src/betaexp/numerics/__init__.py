from .interval import RInterval, Ordering, compare, geometric_tail
from .beta import BetaValue, as_beta, golden_ratio, tribonacci_like

__all__ = [
    "RInterval", "Ordering", "compare", "geometric_tail",
    "BetaValue", "as_beta", "golden_ratio", "tribonacci_like",
]
