"""The twisted quotient on a pair of disjoint balls.

Each ball carries one nonnegative radial bump; the sign-changing function is
``U = u_+`` on ``B_+`` and ``U = -u_-`` on ``B_-``.  For a fixed volume split
``t = R_+^n / C`` the discrete problem is

    minimize  I_+ + I_-   subject to  J_+ + J_- = 1,  M_+ = M_-,  u >= 0,

with ``I = int |u'|^p``, ``J = int u^q``, ``M = int u^(r-1)`` (radial weight
``omega rho^(n-1)``), after which ``lambda = I^(1/p)``.  Profiles are
piecewise linear on a uniform grid of ``m`` cells per ball; ``J`` and ``M``
use the lumped (nodal) quadrature.  The KKT system is solved by a damped
Lagrange-Newton iteration on a sparse bordered matrix.

When ``u >= 0`` binds, the bump on one ball detaches from its boundary
(possible for r <= 2).  The zero set is then an outer rim of that ball, so
the free-node count on it is located by bisection.

Multiplier convention: with ``||U||_q = 1`` the solution satisfies

    -Delta_p u_+ = lam u_+^(q-1) + mu u_+^(r-2)   on B_+,
    -Delta_p u_- = lam u_-^(q-1) - mu u_-^(r-2)   on B_-,

which is ``-div(|grad U|^(p-2) grad U) = lam |U|^(q-2) U + mu |U|^(r-2)``.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field
from typing import Mapping, Optional, Sequence

import numpy as np
import scipy.sparse as sp
from scipy.sparse.linalg import spsolve

from .golden import golden_section
from .params import ProblemParams, geometry
from .radial import RadialProfile, ground_state, weak_residual
from .reduced import reduced_F

log = logging.getLogger(__name__)

DEFAULT_MESH = 400
ASYM_Y = 1e-3
KKT_TOL = 1e-7
NEWTON_TOL = 1e-11


class SolverError(RuntimeError):
    pass


@dataclass(frozen=True)
class TwoBallConfig:
    t: float
    C: float
    R_plus: float
    R_minus: float
    n: int

    @property
    def y(self) -> float:
        return 2 * self.t - 1

    @classmethod
    def from_t(cls, t: float, n: int, C: float = 2.0) -> "TwoBallConfig":
        if not 0 < t < 1:
            raise ValueError(f"volume fraction t must lie in (0, 1), got {t}")
        if not C > 0:
            raise ValueError(f"total scaled volume C must be positive, got {C}")
        return cls(t=t, C=C, R_plus=(t * C) ** (1 / n), R_minus=((1 - t) * C) ** (1 / n), n=n)


class BallGrid:
    """Uniform radial grid on ``[0, R]`` with exact cell weights and lumped node weights.

    Only the first ``free`` nodes are unknowns; the rest are pinned at zero.
    """

    def __init__(self, n: int, R: float, m: int, free: Optional[int] = None):
        self.n, self.R, self.m = n, R, m
        self.free = m if free is None else free
        self.h = R / m
        self.radii = np.linspace(0.0, R, m + 1)
        omega = geometry(n).unit_sphere_area
        rho = self.radii
        cell_w = omega * (rho[1:] ** n - rho[:-1] ** n) / n
        xg, wg = np.polynomial.legendre.leggauss(8)
        a = rho[:-1, None]
        x = a + (xg[None, :] + 1) / 2 * self.h
        w = wg[None, :] / 2 * self.h * omega * x ** (n - 1)
        right = np.sum(w * (x - a) / self.h, axis=1)
        left = np.sum(w, axis=1) - right
        node = np.zeros(m + 1)
        node[:-1] += left
        node[1:] += right
        self.cell_w = cell_w[: self.free]
        self.node_w = node[: self.free]


def _phi(d, p, eps):
    """|d|^p (smoothed for p < 2) with first and second derivatives."""
    if p >= 2:
        a = np.abs(d)
        return a ** p, p * a ** (p - 2) * d, p * (p - 1) * a ** (p - 2)
    s = d * d + eps * eps
    return s ** (p / 2), p * d * s ** (p / 2 - 1), p * s ** (p / 2 - 1) + p * (p - 2) * d * d * s ** (p / 2 - 2)


def _pow0(u, e):
    """``u**e`` for ``u >= 0`` with the limits 0, 1, inf at ``u = 0``."""
    out = np.empty_like(u)
    pos = u > 0
    out[pos] = u[pos] ** e
    out[~pos] = 0.0 if e > 0 else (1.0 if e == 0 else np.inf)
    return out


class _Discrete:
    """Discrete functionals on the pair of balls; ``x = [u_+, u_-]`` over the free nodes."""

    def __init__(self, params: ProblemParams, config: TwoBallConfig, m: int, eps: float,
                 free: tuple[int, int] | None = None):
        self.params, self.config, self.m, self.eps = params, config, m, eps
        self.free = (m, m) if free is None else tuple(free)
        self.grids = (BallGrid(params.n, config.R_plus, m, self.free[0]),
                      BallGrid(params.n, config.R_minus, m, self.free[1]))

    def split(self, x):
        k = self.free[0]
        return x[:k], x[k:]

    def evaluate(self, x, hessian=True):
        p, q, r = self.params.p, self.params.q, self.params.r
        out = {"I": 0.0, "J": 0.0, "M": []}
        gI, gJ, gD, hI_d, hI_o, hJ, hD = [], [], [], [], [], [], []
        for sign, u, g in zip((1.0, -1.0), self.split(x), self.grids):
            d = np.diff(np.append(u, 0.0)) / g.h
            f0, f1, f2 = _phi(d, p, self.eps)
            out["I"] += np.dot(g.cell_w, f0)
            flux = g.cell_w * f1 / g.h
            grad = -flux
            grad[1:] += flux[:-1]
            gI.append(grad)
            uq = _pow0(u, q - 1)
            ur = _pow0(u, r - 2)
            out["J"] += np.dot(g.node_w, uq * u)
            out["M"].append(np.dot(g.node_w, _pow0(u, r - 1)))
            gJ.append(q * g.node_w * uq)
            gD.append(sign * (r - 1) * g.node_w * ur)
            if hessian:
                c = g.cell_w * f2 / g.h ** 2
                diag = c.copy()
                diag[1:] += c[:-1]
                hI_d.append(diag)
                hI_o.append(-c[:-1])
                hJ.append(q * (q - 1) * g.node_w * _pow0(u, q - 2))
                hD.append(sign * (r - 1) * (r - 2) * g.node_w * _pow0(u, r - 3) if r != 2 else np.zeros(len(u)))
        out["gI"] = np.concatenate(gI)
        out["gJ"] = np.concatenate(gJ)
        out["gD"] = np.concatenate(gD)
        out["D"] = out["M"][0] - out["M"][1]
        if hessian:
            out["hI"] = (np.concatenate(hI_d), np.concatenate([hI_o[0], [0.0], hI_o[1]]))
            out["hJ"] = np.concatenate(hJ)
            out["hD"] = np.concatenate(hD)
        return out

    def project(self, x):
        """Rescale ``u_-`` to match the moments, then both to ``J = 1``."""
        r, q = self.params.r, self.params.q
        up, um = self.split(np.maximum(x, 0.0))
        gp, gm = self.grids
        Mp = np.dot(gp.node_w, up ** (r - 1))
        Mm = np.dot(gm.node_w, um ** (r - 1))
        if Mp <= 0 or Mm <= 0:
            raise SolverError("profile has no positive mass on one ball")
        um = um * (Mp / Mm) ** (1 / (r - 1))
        x = np.concatenate([up, um])
        J = np.dot(gp.node_w, up ** q) + np.dot(gm.node_w, um ** q)
        return x / J ** (1 / q)


def _kkt(ev, a, b, active=None):
    """Scaled KKT violation.  On ``active`` (pinned-zero) nodes only a negative
    bound multiplier counts."""
    with np.errstate(invalid="ignore"):
        gL = ev["gI"] - a * ev["gJ"] - b * ev["gD"]
    gL = np.where(np.isnan(gL), 0.0, gL)
    if active is None:
        active = np.zeros(len(gL), bool)
    free = ~active
    scale = max(np.max(np.abs(ev["gI"][free])), 1e-300)
    stat = np.max(np.abs(gL[free]))
    dual = max(0.0, -np.min(gL[active])) if active.any() else 0.0
    return max(stat / scale, dual / scale, abs(ev["J"] - 1), abs(ev["D"]) / max(ev["M"]))


def _multipliers(ev):
    A = np.stack([ev["gJ"], ev["gD"]], axis=1)
    coef, *_ = np.linalg.lstsq(A, ev["gI"], rcond=None)
    return float(coef[0]), float(coef[1])


def _newton(prob: _Discrete, x, tol=NEWTON_TOL, max_iter=60):
    """Damped Lagrange-Newton on the KKT system, keeping every free node positive."""
    ev = prob.evaluate(x)
    a, b = _multipliers(ev)
    res = _kkt(ev, a, b)
    N = len(x)
    it = 0
    for it in range(1, max_iter + 1):
        if res <= tol:
            break
        d, off = ev["hI"]
        H = sp.diags([off, d - a * ev["hJ"] - b * ev["hD"], off], [-1, 0, 1], format="csc")
        B = sp.csc_matrix(np.stack([-ev["gJ"], -ev["gD"]], axis=1))
        K = sp.bmat([[H, B], [-B.T, None]], format="csc")
        gL = ev["gI"] - a * ev["gJ"] - b * ev["gD"]
        rhs = -np.concatenate([gL, [ev["J"] - 1, ev["D"]]])
        try:
            step = spsolve(K, rhs)
        except RuntimeError as exc:  # singular factor
            raise SolverError(str(exc)) from exc
        if not np.all(np.isfinite(step)):
            break
        dx, da, db = step[:N], step[N], step[N + 1]
        neg = dx < 0
        alpha = min(1.0, 0.995 * np.min(x[neg] / -dx[neg])) if np.any(neg) else 1.0
        for _ in range(30):
            xn = x + alpha * dx
            evn = prob.evaluate(xn)
            an, bn = a + alpha * da, b + alpha * db
            resn = _kkt(evn, an, bn)
            if resn < res * (1 - 1e-4 * alpha) or resn <= tol:
                break
            alpha *= 0.5
        else:
            break
        x, ev, a, b, res = xn, evn, an, bn, resn
    return x, a, b, res, it


@dataclass
class TwoBallSolution:
    config: TwoBallConfig
    profile_plus: RadialProfile
    profile_minus: RadialProfile
    lambda_value: float
    multiplier_lambda: float
    multiplier_mu: float
    moment: float
    kkt_residual: float
    converged: bool
    mesh: int
    eps: float
    support: tuple = (0, 0)  # free nodes per ball; < mesh where the bump detaches
    iterations: int = 0
    x: Optional[np.ndarray] = field(default=None, repr=False)

    def rows(self):
        """(ball, radius, value) rows, the negative-ball values carried with their sign."""
        for tag, prof, s in (("plus", self.profile_plus, 1.0), ("minus", self.profile_minus, -1.0)):
            for rho, v in zip(prof.radii, prof.values):
                yield tag, rho, s * v


def dilation_start(params: ProblemParams, config: TwoBallConfig, m: int) -> np.ndarray:
    """Discrete dilation-family start ``c_+- v(rho / R_+-)`` with the single-ball ground state.

    Amplitudes are fixed afterwards by projecting onto the constraints.
    """
    gs = ground_state(params.p, params.q, params.n, mesh=m)
    v = gs.profile.values[:-1]
    return np.concatenate([v, v])


def start_quotient(params: ProblemParams, config: TwoBallConfig, m: int = DEFAULT_MESH,
                   eps: Optional[float] = None) -> float:
    """Discrete quotient of the dilation-family start after projection onto the constraints."""
    prob = _Discrete(params, config, m, _default_eps(params.p) if eps is None else eps)
    ev = prob.evaluate(prob.project(dilation_start(params, config, m)), hessian=False)
    return ev["I"] ** (1 / params.p) / ev["J"] ** (1 / params.q)


def _full(prob: _Discrete, x):
    m = prob.m
    up, um = prob.split(x)
    return np.concatenate([up, np.zeros(m - len(up)), um, np.zeros(m - len(um))])


def _solution(prob: _Discrete, x, a, b, it) -> TwoBallSolution:
    """Assemble the full-grid solution and its KKT residual, bound multipliers included."""
    p, q, r, n = prob.params.p, prob.params.q, prob.params.r, prob.params.n
    m = prob.m
    xf = _full(prob, x)
    full = _Discrete(prob.params, prob.config, m, prob.eps)
    ev = full.evaluate(xf, hessian=False)
    active = np.zeros(2 * m, bool)
    active[prob.free[0]:m] = True
    active[m + prob.free[1]:] = True
    res = _kkt(ev, a, b, active)
    gp, gm = full.grids
    return TwoBallSolution(
        config=prob.config,
        profile_plus=RadialProfile(n, p, gp.radii, np.append(xf[:m], 0.0)),
        profile_minus=RadialProfile(n, p, gm.radii, np.append(xf[m:], 0.0)),
        lambda_value=ev["I"] ** (1 / p) / ev["J"] ** (1 / q),
        multiplier_lambda=a * q / p,
        multiplier_mu=b * (r - 1) / p,
        moment=ev["M"][0],
        kkt_residual=res,
        converged=bool(res <= KKT_TOL and np.all(x > 0)),
        mesh=m,
        eps=prob.eps,
        support=prob.free,
        iterations=it,
        x=xf,
    )


def _default_eps(p):
    return 1e-10 if p < 2 else 0.0


def _restrict(xf, m, free):
    """Squeeze full-grid profiles onto ``free`` nodes per ball (support rescaled)."""
    out = []
    for u, k in ((xf[:m], free[0]), (xf[m:], free[1])):
        support = int(np.count_nonzero(u > 0)) or m
        src = np.linspace(0.0, 1.0, support + 1)
        dst = np.linspace(0.0, 1.0, k + 1)[:-1]
        out.append(np.interp(dst, src, np.append(u[:support], 0.0)))
    return np.concatenate(out)


def _attempt(params, config, m, eps, free, xf):
    """Newton on the given free-node counts; also reports whether the free-node
    system itself converged with every unknown positive."""
    prob = _Discrete(params, config, m, eps, free)
    x = prob.project(_restrict(xf, m, free))
    x, a, b, res, it = _newton(prob, x)
    interior = bool(res <= NEWTON_TOL * 100 and np.min(x) > 1e-12 * np.max(x))
    return _solution(prob, x, a, b, it), interior


def _rim_search(params, config, m, eps, ball, xf) -> Optional[TwoBallSolution]:
    """Locate the free-node count on ``ball`` whose solution is dual feasible.

    Too many free nodes and Newton runs into ``u = 0``; too few and the
    pinned rim wants to lift (negative bound multiplier).  Bisect between.
    """
    def run(k, start):
        try:
            return _attempt(params, config, m, eps, (k, m) if ball == 0 else (m, k), start)
        except SolverError:
            return None, False

    hi, k = m, m // 2
    sol, interior = run(k, xf)
    while not interior:
        hi, k = k, k // 2
        if k < 8:
            return None
        sol, interior = run(k, xf)
    lo, best = k, sol
    if best.converged:
        return best
    while hi - lo > 1:
        mid = (lo + hi) // 2
        sol, interior = run(mid, best.x)
        if not interior:
            hi = mid
        else:
            lo, best = mid, sol
            if sol.converged:
                break
    return best


def solve_fixed_partition(params: ProblemParams, config: TwoBallConfig, m: int = DEFAULT_MESH,
                          eps: Optional[float] = None, starts: int = 2,
                          x0: Optional[np.ndarray] = None) -> TwoBallSolution:
    """Minimize the discrete twisted quotient for a fixed volume split.

    Starts from ``x0`` (a previous full-grid solution) or the dilation family,
    plus with ``starts > 1`` a shape-perturbed start; the lower converged
    quotient wins.  If no start gives a strictly positive solution, the bump
    on one ball is allowed to detach from the boundary.
    """
    params.require_admissible()
    if m < 100:
        raise ValueError("mesh must have at least 100 cells per ball")
    if config.n != params.n:
        raise ValueError("config dimension does not match params")
    eps = _default_eps(params.p) if eps is None else eps
    base = dilation_start(params, config, m) if x0 is None else np.asarray(x0, float)
    inits = [base]
    if starts > 1:
        s = np.linspace(0.0, 1.0, m + 1)[:-1]
        bump = 0.1 * np.cos(np.pi * s)
        inits.append(np.concatenate([base[:m] * (1 + bump), base[m:] * (1 - bump)]))
    sols = []
    for xf in inits:
        try:
            sols.append(_attempt(params, config, m, eps, (m, m), xf)[0])
        except SolverError as exc:
            log.debug("start failed: %s", exc)
    if not any(s.converged for s in sols):
        order = (0, 1) if config.t >= 0.5 else (1, 0)
        for ball in order:
            sol = _rim_search(params, config, m, eps, ball, base)
            if sol is not None:
                sols.append(sol)
                break
    if not sols:
        raise SolverError(f"all starts failed for t={config.t}")
    best = min(sols, key=lambda s: (not s.converged, s.lambda_value))
    if not best.converged:
        log.warning("fixed-partition solve did not converge (t=%g, kkt=%.2e)", config.t, best.kkt_residual)
    return best


def dilation_family_quotient(params: ProblemParams, config: TwoBallConfig, single_ball: Optional[float] = None) -> float:
    """Quotient of ``c_+- v(x / R_+-)`` with matched moments, in closed form up to the single-ball constant."""
    n, p, q, r = params.n, params.p, params.q, params.r
    if single_ball is None:
        single_ball = ground_state(p, q, n).quotient
    alpha = 1 - p / n - p / (r - 1)
    beta = 1 - q / (r - 1)
    scale = (config.C / 2) ** (alpha - beta * p / q)
    return single_ball * (scale * reduced_F(config.y, params)) ** (1 / p)


def closed_form_at_q_eq_rm1(params: ProblemParams, config: TwoBallConfig, single_ball: Optional[float] = None) -> float:
    """Exact optimal quotient for a fixed split when ``q = r - 1``.

    Then each bump solves a scaled single-ball equation, so the optimum stays
    in the dilation family.
    """
    if abs(params.q - (params.r - 1)) > 1e-14:
        raise ValueError(f"closed form requires q = r - 1 (q={params.q}, r={params.r})")
    return dilation_family_quotient(params, config, single_ball)


def euler_residual(solution: TwoBallSolution, params: ProblemParams, mu: Optional[float] = None) -> float:
    """Weak residual of the Euler equation on both balls with the extracted multipliers.

    Uses Gauss quadrature on the piecewise-linear profiles (consistent mass),
    independent of the solver's lumped quadrature.  ``mu`` overrides the
    stored multiplier.  Rows where the bump has detached are skipped.  Returns
    the larger of the two relative residuals.
    """
    lam = solution.multiplier_lambda
    mu = solution.multiplier_mu if mu is None else mu
    q, r = params.q, params.r
    res_p = weak_residual(solution.profile_plus, [(lam, q), (mu, r - 1)], interp="linear",
                          support_only=True)
    res_m = weak_residual(solution.profile_minus, [(lam, q), (-mu, r - 1)], interp="linear",
                          support_only=True)
    return max(res_p, res_m)


@dataclass
class PartitionResult:
    t_star: float
    solution: TwoBallSolution
    scan_t: np.ndarray
    scan_lambda: np.ndarray
    warm: dict = field(default_factory=dict, repr=False)

    @property
    def y_star(self) -> float:
        return 2 * self.t_star - 1


def optimize_partition(params: ProblemParams, C: float = 2.0, m: int = DEFAULT_MESH,
                       scan_points: int = 33, tol_t: float = 1e-6, t_max: float = 0.98,
                       warm: Optional[Mapping[float, np.ndarray]] = None,
                       eps: Optional[float] = None) -> PartitionResult:
    """Optimal volume split ``t* in [1/2, 1)``: scan then golden-section refinement.

    ``warm`` maps scan values of t to previous solution vectors (continuation
    in q).  Within the scan each solve starts from its neighbour.
    """
    if scan_points < 33:
        raise ValueError("scan_points must be >= 33")
    params.require_admissible()
    ts = np.linspace(0.5, t_max, scan_points)
    warm = dict(warm or {})
    lam = np.full(scan_points, np.nan)
    sols: dict[float, TwoBallSolution] = {}
    failures = 0
    prev = None
    for i, t in enumerate(ts):
        cfg = TwoBallConfig.from_t(float(t), params.n, C)
        x0 = warm.get(float(t), prev)
        try:
            sol = solve_fixed_partition(params, cfg, m, eps=eps, starts=1, x0=x0)
            if not sol.converged and x0 is not None:
                sol = solve_fixed_partition(params, cfg, m, eps=eps, starts=2)
        except SolverError:
            failures += 1
            continue
        if not sol.converged:
            failures += 1
            continue
        lam[i] = sol.lambda_value
        sols[float(t)] = sol
        prev = sol.x
    if failures > 0.2 * scan_points:
        raise SolverError(f"{failures}/{scan_points} inner solves failed during the partition scan")
    k = int(np.nanargmin(lam))
    lo, hi = ts[max(k - 1, 0)], ts[min(k + 1, scan_points - 1)]
    cache: dict[float, TwoBallSolution] = {}

    def f(t):
        near = min(sols, key=lambda s: abs(s - t))
        cfg = TwoBallConfig.from_t(t, params.n, C)
        sol = solve_fixed_partition(params, cfg, m, eps=eps, starts=1, x0=sols[near].x)
        cache[t] = sol
        return sol.lambda_value if sol.converged else math.inf

    gold = golden_section(f, lo, hi, tol=tol_t)
    t_star, best = gold.x, cache[gold.x]
    t_scan = float(ts[k])
    if lam[k] < best.lambda_value:
        t_star, best = t_scan, sols[t_scan]
    sym = sols.get(0.5)
    if sym is not None and best.lambda_value >= sym.lambda_value * (1 - 8 * np.finfo(float).eps):
        t_star, best = 0.5, sym
    new_warm = {t: s.x for t, s in sols.items()}
    return PartitionResult(t_star=float(t_star), solution=best, scan_t=ts, scan_lambda=lam, warm=new_warm)


@dataclass
class BifurcationDiagram:
    q_values: list
    y_star: list
    lambda_star: list
    kkt_residual: list
    mesh: int
    q_critical: Optional[float] = None
    errors: dict = field(default_factory=dict)
    exploratory: bool = True

    def rows(self):
        for q, y, lam, k in zip(self.q_values, self.y_star, self.lambda_star, self.kkt_residual):
            yield q, y, lam, k, self.mesh


def bifurcation_sweep(n: int, p: float, r: float, q_grid: Sequence[float], C: float = 2.0,
                      m: int = DEFAULT_MESH, scan_points: int = 33, refine_tol: Optional[float] = 0.05,
                      **kw) -> BifurcationDiagram:
    """Optimal asymmetry ``y*(q)`` along an increasing q grid, with continuation in q.

    ``q_critical`` is the first grid crossing of ``y* > 1e-3``, refined by
    bisection when ``refine_tol`` is set.  Estimates are exploratory: no
    exact value is known in dimension n >= 2.
    """
    q_grid = [float(q) for q in q_grid]
    if any(b <= a for a, b in zip(q_grid, q_grid[1:])):
        raise ValueError("q_grid must be strictly increasing")
    for q in q_grid:
        ProblemParams(n, p, q, r).require_admissible()
    diag = BifurcationDiagram([], [], [], [], mesh=m)
    warm = None
    crossing = None
    for q in q_grid:
        params = ProblemParams(n, p, q, r)
        try:
            res = optimize_partition(params, C=C, m=m, scan_points=scan_points, warm=warm, **kw)
        except SolverError as exc:
            diag.errors[q] = str(exc)
            diag.q_values.append(q)
            diag.y_star.append(math.nan)
            diag.lambda_star.append(math.nan)
            diag.kkt_residual.append(math.nan)
            continue
        warm = res.warm
        diag.q_values.append(q)
        diag.y_star.append(res.y_star)
        diag.lambda_star.append(res.solution.lambda_value)
        diag.kkt_residual.append(res.solution.kkt_residual)
        if crossing is None and res.y_star > ASYM_Y:
            prev = [(qq, yy) for qq, yy in zip(diag.q_values[:-1], diag.y_star[:-1]) if not math.isnan(yy)]
            crossing = (prev[-1][0] if prev else None, q)
    if crossing is not None:
        lo, hi = crossing
        if lo is None:
            diag.q_critical = hi  # onset at or below the first grid point
        elif refine_tol:
            diag.q_critical = critical_q(n, p, r, (lo, hi), tol_q=refine_tol, C=C, m=m,
                                         scan_points=scan_points, **kw)
        else:
            diag.q_critical = 0.5 * (lo + hi)
    return diag


def is_asymmetric(params: ProblemParams, C: float = 2.0, m: int = DEFAULT_MESH, **kw) -> bool:
    return optimize_partition(params, C=C, m=m, **kw).y_star > ASYM_Y


def critical_q(n: int, p: float, r: float, bracket: tuple[float, float], tol_q: float = 0.05,
               C: float = 2.0, m: int = DEFAULT_MESH, **kw) -> float:
    """Bisect q on the asymmetry indicator ``y* > 1e-3`` until the bracket is below ``tol_q``."""
    lo, hi = map(float, bracket)
    if not lo < hi:
        raise ValueError("bracket must be increasing")
    if is_asymmetric(ProblemParams(n, p, lo, r), C, m, **kw) or not is_asymmetric(ProblemParams(n, p, hi, r), C, m, **kw):
        raise ValueError(f"bracket {bracket} does not straddle the symmetry-breaking transition")
    while hi - lo > tol_q:
        mid = 0.5 * (lo + hi)
        if is_asymmetric(ProblemParams(n, p, mid, r), C, m, **kw):
            hi = mid
        else:
            lo = mid
    return 0.5 * (lo + hi)
