from .interval import BigReal, hull
from .ops import (
    PrecisionPolicy,
    cceil,
    cfloor,
    compare,
    dist_exact,
    dist_nearest_int,
    escalate,
    exact_log_ratio,
    exact_pow,
    floor_pow,
    frac,
    frac_exact,
    inv_t_map,
    is_prime,
    mod_inverse,
    lazy_sum,
    power_real,
    t_map,
    t_map_real,
)
from .scalar import CReal, ExactScalar, LazyReal, as_creal, parse_scalar

__all__ = [
    "BigReal", "hull", "PrecisionPolicy", "cceil", "cfloor", "compare", "dist_exact",
    "dist_nearest_int", "escalate", "exact_log_ratio", "exact_pow", "floor_pow", "frac",
    "frac_exact", "inv_t_map", "is_prime", "lazy_sum", "mod_inverse", "power_real", "t_map", "t_map_real",
    "CReal", "ExactScalar", "LazyReal", "as_creal", "parse_scalar",
]
