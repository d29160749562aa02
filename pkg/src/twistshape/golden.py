"""Golden-section search on a bracket."""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable

INVPHI = (math.sqrt(5) - 1) / 2


@dataclass
class GoldenResult:
    x: float
    fx: float
    iterations: int
    converged: bool


def golden_section(f: Callable[[float], float], lo: float, hi: float, tol: float = 1e-10,
                   max_iter: int = 200) -> GoldenResult:
    """Minimize a unimodal ``f`` on ``[lo, hi]`` until the bracket is shorter than ``tol``.

    Endpoints are never evaluated; the best interior probe is returned.
    """
    a, b = lo, hi
    x1 = b - INVPHI * (b - a)
    x2 = a + INVPHI * (b - a)
    f1, f2 = f(x1), f(x2)
    it = 0
    while b - a > tol and it < max_iter:
        if f1 <= f2:
            b, x2, f2 = x2, x1, f1
            x1 = b - INVPHI * (b - a)
            f1 = f(x1)
        else:
            a, x1, f1 = x1, x2, f2
            x2 = a + INVPHI * (b - a)
            f2 = f(x2)
        it += 1
    x, fx = (x1, f1) if f1 <= f2 else (x2, f2)
    return GoldenResult(x=x, fx=fx, iterations=it, converged=b - a <= tol)
