"""Problem parameters, admissibility and closed-form constants.

The problem is indexed by the dimension ``n`` and three exponents: ``p`` for
the gradient norm, ``q`` for the target norm and ``r`` for the signed moment
constraint ``int |u|^(r-2) u = 0``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

INF = math.inf


class InadmissibleParams(ValueError):
    """Raised when (n, p, q, r) violate the admissibility hypotheses."""


def critical_exponent(p: float, n: int) -> float:
    """Critical Sobolev exponent, ``1/p* = max(1/p - 1/n, 0)``.

    Returns ``math.inf`` when ``p >= n``.
    """
    if p < 1:
        raise ValueError(f"p must be >= 1, got {p}")
    if n < 1 or int(n) != n:
        raise ValueError(f"n must be a positive integer, got {n}")
    if p >= n:
        return INF
    return n * p / (n - p)


@dataclass(frozen=True)
class ProblemParams:
    n: int
    p: float
    q: float
    r: float
    p_star: float = field(init=False)

    def __post_init__(self):
        if self.n < 1 or int(self.n) != self.n:
            raise ValueError(f"n must be a positive integer, got {self.n}")
        object.__setattr__(self, "n", int(self.n))
        object.__setattr__(self, "p_star", critical_exponent(self.p, self.n) if self.p >= 1 else math.nan)

    def with_q(self, q: float) -> "ProblemParams":
        return ProblemParams(self.n, self.p, q, self.r)

    def require_admissible(self) -> "ProblemParams":
        verdict = validate(self)
        if not verdict.ok:
            raise InadmissibleParams("; ".join(verdict.reasons))
        return self


@dataclass(frozen=True)
class Admissibility:
    reasons: tuple[str, ...] = ()

    @property
    def ok(self) -> bool:
        return not self.reasons


def validate(params: ProblemParams) -> Admissibility:
    """List every violated hypothesis: 1 < p < inf, 1 < q < p*, 0 < r-1 < p*."""
    reasons = []
    p, q, r = params.p, params.q, params.r
    if not all(math.isfinite(v) for v in (p, q, r)):
        reasons.append("p, q, r must be finite")
        return Admissibility(tuple(reasons))
    if not p > 1:
        reasons.append(f"need p > 1 (p={p})")
        return Admissibility(tuple(reasons))
    ps = params.p_star
    if not q > 1:
        reasons.append(f"need q > 1 (q={q})")
    if not q < ps:
        reasons.append(f"need q < p* (q={q}, p*={ps})")
    if not r - 1 > 0:
        reasons.append(f"need r - 1 > 0 (r={r})")
    if not r - 1 < ps:
        reasons.append(f"need r - 1 < p* (r={r}, p*={ps})")
    return Admissibility(tuple(reasons))


def gamma_coeff(params: ProblemParams) -> float:
    """Quadratic Taylor coefficient of the reduced functional at the symmetric point.

    ``F(y) ~ 2^(1-p/q) (1 + gamma/2 y^2)``; negative gamma means the equal
    split is a local maximum within the dilation family.
    """
    n, p, q, r = params.n, params.p, params.q, params.r
    if r == 1:
        raise ValueError("gamma is undefined for r = 1")
    s = p / n + p / (r - 1)
    return s * (s - 1) - p / (r - 1) * (q / (r - 1) - 1)


def q_hat(p: float, r: float, n: int) -> float:
    """Exponent above which the unequal pair of balls is strictly better.

    Root in ``q`` of :func:`gamma_coeff`.
    """
    if not p > 1 or not r > 1 or n < 1:
        raise ValueError(f"q_hat needs p > 1, r > 1, n >= 1 (got p={p}, r={r}, n={n})")
    s = r - 1
    return (s / n + 1) ** 2 * p - s * s / n


@dataclass(frozen=True)
class GeometryConstants:
    n: int
    unit_ball_volume: float
    unit_sphere_area: float


def geometry(n: int) -> GeometryConstants:
    """Volume of the unit ball and area of the unit sphere in R^n.

    For n = 1 the ball is (-1, 1) and the sphere is the two points {-1, 1}.
    """
    if n < 1:
        raise ValueError(f"n must be >= 1, got {n}")
    vol = math.pi ** (n / 2) / math.gamma(n / 2 + 1)
    return GeometryConstants(n=n, unit_ball_volume=vol, unit_sphere_area=n * vol)
