"""Golden section search used by the coordinate-wise refiners"""

import math
from typing import Callable, Tuple

INV_PHI = (math.sqrt(5) - 1) / 2  # 1/phi
INV_PHI_SQ = (3 - math.sqrt(5)) / 2  # 1/phi^2


def _finite_or_ninf(value: float) -> float:
    value = float(value)
    return value if math.isfinite(value) else -math.inf


def golden_section_max(func: Callable[[float], float], a: float, b: float,
                       xtol: float) -> Tuple[float, float, int]:
    """Maximize a 1-D function on [a, b].

    Returns the best evaluated abscissa, its value and the number of
    evaluations. Non-finite values count as -inf.
    """
    dist = b - a
    if dist <= xtol:
        x = 0.5 * (a + b)
        return x, _finite_or_ninf(func(x)), 1

    n = int(math.ceil(math.log(xtol / dist) / math.log(INV_PHI)))

    c = a + INV_PHI_SQ * dist
    d = a + INV_PHI * dist
    yc = _finite_or_ninf(func(c))
    yd = _finite_or_ninf(func(d))
    best_x, best_y = (c, yc) if yc >= yd else (d, yd)
    evaluations = 2

    for _ in range(n - 1):
        if yc > yd:
            b = d
            d, yd = c, yc
            dist = INV_PHI * dist
            c = a + INV_PHI_SQ * dist
            yc = _finite_or_ninf(func(c))
            if yc > best_y:
                best_x, best_y = c, yc
        else:
            a = c
            c, yc = d, yd
            dist = INV_PHI * dist
            d = a + INV_PHI * dist
            yd = _finite_or_ninf(func(d))
            if yd > best_y:
                best_x, best_y = d, yd
        evaluations += 1

    return best_x, best_y, evaluations
