"""Radial p-Laplace ground state by shooting, plus radial norms.

Radial form of ``-div(|grad v|^(p-2) grad v) = v^(q-1)`` written with the flux
``w = rho^(n-1) |v'|^(p-2) v'``:

    w' = -rho^(n-1) v^(q-1),
    v' = sign(w) |w|^(1/(p-1)) rho^(-(n-1)/(p-1)).

The shot starts at ``v(0) = 1`` through the small-rho series and runs to the
first zero ``r_0``.  Homogeneity then maps it to the unit ball.
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass, replace
from typing import Optional

import numpy as np
from scipy.integrate import simpson, solve_ivp
from scipy.interpolate import CubicHermiteSpline, CubicSpline

from .params import geometry


class ShootingError(RuntimeError):
    pass


def spow(x, e):
    """Signed power ``|x|^e sign(x)``."""
    return np.sign(x) * np.abs(x) ** e


@dataclass(frozen=True)
class RadialProfile:
    """Radial function on ``[0, R]`` sampled at ``radii``.

    ``flux`` holds ``rho^(n-1) |v'|^(p-2) v'`` when known (shooting output);
    grid profiles from the two-ball solver leave it as ``None``.
    """
    n: int
    p: float
    radii: np.ndarray
    values: np.ndarray
    flux: Optional[np.ndarray] = None

    @property
    def R(self) -> float:
        return float(self.radii[-1])

    @property
    def m(self) -> int:
        return len(self.radii) - 1

    def slopes(self) -> np.ndarray:
        """``v'`` at the grid points, from the flux when available."""
        if self.flux is None:
            return np.gradient(self.values, self.radii, edge_order=2)
        rho = self.radii
        out = np.zeros_like(rho)
        pos = rho > 0
        g = np.abs(self.flux[pos]) / rho[pos] ** (self.n - 1)
        out[pos] = np.sign(self.flux[pos]) * g ** (1 / (self.p - 1))
        return out

    def scaled(self, c: float) -> "RadialProfile":
        flux = None if self.flux is None else self.flux * abs(c) ** (self.p - 1) * np.sign(c)
        return replace(self, values=self.values * c, flux=flux)

    def dilated(self, R: float) -> "RadialProfile":
        s = R / self.R
        flux = None if self.flux is None else self.flux * s ** (self.n - self.p)
        return replace(self, radii=self.radii * s, flux=flux)

    def to_csv(self, path) -> None:
        flux = self.flux if self.flux is not None else np.full_like(self.values, np.nan)
        with open(path, "w", newline="") as fh:
            w = csv.writer(fh)
            w.writerow(["radius", "value", "flux"])
            for row in zip(self.radii, self.values, flux):
                w.writerow([f"{x:.12g}" for x in row])


@dataclass(frozen=True)
class StepControl:
    """Integrator settings.

    ``method="adaptive"`` uses DOP853 at ``rtol``/``atol``; ``method="rk4"``
    takes fixed steps of length ``h`` (used for convergence studies).
    """
    method: str = "adaptive"
    rtol: float = 1e-12
    atol: float = 1e-14
    h: float = 1e-3
    h_start: float = 1e-6
    rho_max: float = 1e3


def _series_start(p, n, h0):
    # v ~ 1 - c rho^(p/(p-1)),  w ~ -rho^n / n
    c = (p - 1) / p * n ** (-1 / (p - 1))
    return 1 - c * h0 ** (p / (p - 1)), -h0 ** n / n


def _rhs(p, q, n):
    e = 1 / (p - 1)
    k = (n - 1) / (p - 1)

    def f(rho, y):
        v, w = y
        return np.array([spow(w, e) * rho ** (-k), -rho ** (n - 1) * spow(v, q - 1)])

    return f


def _rk4_shot(f, y0, h0, step: StepControl):
    h = step.h
    rho, y = h0, np.asarray(y0, float)
    nodes = [(rho, *y)]

    def rk4(rho, y, s):
        k1 = f(rho, y)
        k2 = f(rho + s / 2, y + s / 2 * k1)
        k3 = f(rho + s / 2, y + s / 2 * k2)
        k4 = f(rho + s, y + s * k3)
        return y + s / 6 * (k1 + 2 * k2 + 2 * k3 + k4)

    while rho < step.rho_max:
        y1 = rk4(rho, y, h)
        if y1[0] <= 0:
            lo, hi = 0.0, h
            while hi - lo > 1e-12 * (rho + h):
                mid = 0.5 * (lo + hi)
                if rk4(rho, y, mid)[0] > 0:
                    lo = mid
                else:
                    hi = mid
            s = 0.5 * (lo + hi)
            yz = rk4(rho, y, s)
            nodes.append((rho + s, 0.0, yz[1]))
            return rho + s, np.array(nodes)
        rho, y = rho + h, y1
        nodes.append((rho, *y))
    raise ShootingError(f"no zero found before rho_max={step.rho_max}")


def shoot_first_zero(p: float, q: float, n: int, mesh: int = 400,
                     step: StepControl = StepControl()) -> tuple[float, RadialProfile]:
    """Shoot from ``v(0)=1`` to the first zero; return ``r_0`` and the profile on ``[0, r_0]``.

    The profile is resampled on ``mesh`` uniform intervals.
    """
    if not p > 1 or not q > 1 or n < 1:
        raise ValueError(f"need p > 1, q > 1, n >= 1 (got p={p}, q={q}, n={n})")
    f = _rhs(p, q, n)
    h0 = step.h_start
    y0 = _series_start(p, n, h0)
    grid = np.linspace(0.0, 1.0, mesh + 1)

    if step.method == "adaptive":
        def hit_zero(rho, y):
            return y[0]
        hit_zero.terminal = True
        hit_zero.direction = -1
        sol = solve_ivp(f, (h0, step.rho_max), y0, method="DOP853", rtol=step.rtol,
                        atol=step.atol, events=hit_zero, dense_output=True)
        if sol.status != 1 or len(sol.t_events[0]) == 0:
            raise ShootingError(f"no zero found before rho_max={step.rho_max} ({sol.message})")
        r0 = float(sol.t_events[0][0])
        radii = grid * r0
        vals = np.empty_like(radii)
        flux = np.empty_like(radii)
        inner = radii < h0
        vs, ws = _series_start(p, n, np.maximum(radii[inner], 0.0))
        vals[inner], flux[inner] = vs, ws
        dense = sol.sol(radii[~inner])
        vals[~inner], flux[~inner] = dense[0], dense[1]
    elif step.method == "rk4":
        r0, nodes = _rk4_shot(f, y0, h0, step)
        rho_n, v_n, w_n = nodes.T
        dv = np.array([f(a, (b, c))[0] for a, b, c in nodes])
        spline = CubicHermiteSpline(rho_n, v_n, dv)
        radii = grid * r0
        inner = radii < h0
        vals = np.empty_like(radii)
        vals[inner] = _series_start(p, n, radii[inner])[0]
        vals[~inner] = spline(radii[~inner])
        flux = np.interp(radii, rho_n, w_n)
        flux[inner] = _series_start(p, n, radii[inner])[1]
    else:
        raise ValueError(f"unknown step method {step.method!r}")
    vals[-1] = 0.0
    return r0, RadialProfile(n=n, p=p, radii=radii, values=vals, flux=flux)


def rescale_to_unit_ball(raw: RadialProfile, r0: float, p: float, q: float) -> tuple[RadialProfile, float]:
    """Map the ``v(0)=1`` shot on ``B_{r0}`` to a solution on ``B_1``.

    For ``q != p`` returns ``(A v(r0 x), 1.0)`` with ``A = r0^(p/(q-p))``, which
    solves the equation with unit right-hand coefficient.  For ``q == p`` the
    problem is an eigenvalue problem: returns ``(v(r0 x), r0^p)``.
    """
    unit = raw.dilated(1.0) if raw.R != 1.0 else raw
    if q == p:
        return unit, r0 ** p
    A = r0 ** (p / (q - p))
    return unit.scaled(A), 1.0


def _norm_integrals(profile: RadialProfile, q: float) -> tuple[float, float]:
    omega = geometry(profile.n).unit_sphere_area
    rho = profile.radii
    wgt = omega * rho ** (profile.n - 1)
    grad = simpson(np.abs(profile.slopes()) ** profile.p * wgt, x=rho)
    val = simpson(np.abs(profile.values) ** q * wgt, x=rho)
    return grad, val


def quotient(profile: RadialProfile, q: float) -> float:
    """Rayleigh quotient ``||grad u||_p / ||u||_q`` over the ball of radius ``profile.R``."""
    if profile.m < 100:
        raise ValueError("profile grid too coarse (need m >= 100)")
    grad, val = _norm_integrals(profile, q)
    if val == 0:
        raise ValueError("identically zero profile")
    return grad ** (1 / profile.p) / val ** (1 / q)


@dataclass(frozen=True)
class GroundState:
    p: float
    q: float
    n: int
    first_zero: float
    profile: RadialProfile
    quotient: float
    coeff: float  # right-hand coefficient: 1, or the eigenvalue when q == p

    def residual(self) -> float:
        return ode_residual(self.profile, self.q, coeff=self.coeff)


def ground_state(p: float, q: float, n: int, mesh: int = 400,
                 step: StepControl = StepControl()) -> GroundState:
    r0, raw = shoot_first_zero(p, q, n, mesh=mesh, step=step)
    prof, coeff = rescale_to_unit_ball(raw, r0, p, q)
    return GroundState(p=p, q=q, n=n, first_zero=r0, profile=prof,
                       quotient=quotient(prof, q), coeff=coeff)


_GAUSS = np.polynomial.legendre.leggauss(8)


def _interpolant(profile: RadialProfile):
    if profile.flux is not None:
        spl = CubicHermiteSpline(profile.radii, profile.values, profile.slopes())
    else:
        spl = CubicSpline(profile.radii, profile.values, bc_type=((1, 0.0), "not-a-knot"))
    dspl = spl.derivative()
    return lambda x: (spl(x), dspl(x))


def weak_residual(profile: RadialProfile, terms, interp: str = "hermite", support_only: bool = False) -> float:
    """Relative weak residual of ``-Delta_p v = sum(c * |v|^(e-2) v)`` against grid hats.

    ``terms`` is a list of ``(coefficient, exponent)`` pairs.  Integrals use
    8-point Gauss rules on each cell, so the check does not share the
    quadrature of the discrete solver.  Returns ``||R|| / ||S||`` with ``S`` the
    p-Laplacian part.  With ``support_only`` only rows at nodes where ``v > 0``
    count (the equation need not hold where ``v`` vanishes).
    """
    rho = profile.radii
    m = profile.m
    omega = geometry(profile.n).unit_sphere_area
    xg, wg = _GAUSS
    a, b = rho[:-1, None], rho[1:, None]
    h = b - a
    x = a + (xg[None, :] + 1) / 2 * h
    w = wg[None, :] / 2 * h * omega * x ** (profile.n - 1)
    k = np.arange(m)
    if interp == "linear":
        d = np.diff(profile.values) / np.diff(rho)
        v = profile.values[:-1, None] + d[:, None] * (x - a)
        dv = np.broadcast_to(d[:, None], x.shape)
    else:
        v, dv = _interpolant(profile)(x)
    flux = spow(dv, profile.p - 1)
    phi_right = (x - a) / h   # hat of node k+1 on cell k
    phi_left = 1 - phi_right  # hat of node k on cell k
    src = np.zeros_like(x)
    for c, e in terms:
        src = src + c * spow(v, e - 1)
    stiff = np.zeros(m + 1)
    load = np.zeros(m + 1)
    np.add.at(stiff, k, np.sum(w * flux * (-1 / h), axis=1))
    np.add.at(stiff, k + 1, np.sum(w * flux * (1 / h), axis=1))
    np.add.at(load, k, np.sum(w * src * phi_left, axis=1))
    np.add.at(load, k + 1, np.sum(w * src * phi_right, axis=1))
    stiff, load = stiff[:m], load[:m]  # Dirichlet node excluded
    if support_only:
        keep = profile.values[:m] > 0
        stiff, load = stiff[keep], load[keep]
    denom = np.linalg.norm(stiff)
    if denom == 0:
        raise ValueError("zero profile")
    return float(np.linalg.norm(stiff - load) / denom)


def ode_residual(profile: RadialProfile, q: float, coeff: float = 1.0) -> float:
    """Weak-form residual of ``-Delta_p v = coeff * v^(q-1)`` on the profile's ball."""
    if not np.any(profile.values):
        raise ValueError("zero profile")
    return weak_residual(profile, [(coeff, q)])
