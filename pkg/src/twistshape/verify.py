"""Known-answer checks run by ``twistshape verify`` and by the acceptance tests.

Each check returns ``(ok, detail)``; every tolerance is fixed here.
"""

from __future__ import annotations

import math
import time
from dataclasses import dataclass
from typing import Callable, Iterable, Optional

import numpy as np

from .params import ProblemParams, critical_exponent, gamma_coeff, q_hat, validate
from .radial import ground_state, quotient, shoot_first_zero
from .reduced import (fd_second_derivative_at_zero, minimize_reduced_F, reduced_F,
                      second_derivative_at_zero)
from .twoball import (TwoBallConfig, bifurcation_sweep, closed_form_at_q_eq_rm1, critical_q,
                      optimize_partition, solve_fixed_partition)

BESSEL_J0_ZERO = 2.404825557695773


def random_admissible(rng: np.random.Generator, n_max: int = 5) -> ProblemParams:
    """Draw (n, p, q, r) satisfying 1 < p, 1 < q < p*, 0 < r-1 < p*."""
    while True:
        n = int(rng.integers(1, n_max + 1))
        p = float(rng.uniform(1.1, 6.0))
        ps = critical_exponent(p, n)
        top = min(ps, 12.0)
        q = float(rng.uniform(1.05, top))
        r = 1 + float(rng.uniform(0.05, top))
        params = ProblemParams(n, p, q, r)
        if validate(params).ok:
            return params


def check_gamma_qhat():
    rng = np.random.default_rng(1)
    worst = 0.0
    for _ in range(200):
        P = random_admissible(rng)
        worst = max(worst, abs(gamma_coeff(P.with_q(q_hat(P.p, P.r, P.n)))))
    return worst <= 1e-10, f"max |gamma(q_hat)| = {worst:.2e} (tol 1e-10)"


def check_qhat_at_critical_r():
    rng = np.random.default_rng(2)
    worst = 0.0
    for _ in range(50):
        n = int(rng.integers(2, 7))
        p = float(rng.uniform(1.05, n - 0.05))
        ps = critical_exponent(p, n)
        worst = max(worst, abs(q_hat(p, 1 + ps, n) - ps))
    return worst <= 1e-10, f"max |q_hat(r-1=p*) - p*| = {worst:.2e} (tol 1e-10)"


def check_one_dim_identity():
    rng = np.random.default_rng(3)
    worst = 0.0
    for _ in range(50):
        p = float(rng.uniform(1.05, 6.0))
        r = float(rng.uniform(1.05, 6.0))
        lhs = q_hat(p, r, 1) - (2 * r - 1) * p
        worst = max(worst, abs(lhs - (r - 1) ** 2 * (p - 1)))
    return worst <= 1e-12, f"max deviation = {worst:.2e} (tol 1e-12)"


def check_reduced_convex():
    P = ProblemParams(2, 2.0, 2.0, 3.0)
    res = minimize_reduced_F(P)
    y = np.linspace(-0.99, 0.99, 200)
    f = reduced_F(y, P)
    d2 = f[2:] - 2 * f[1:-1] + f[:-2]
    ok = res.y_star <= 1e-6 and bool(np.all(d2 > 0))
    return ok, f"y* = {res.y_star:.2e}, min second difference = {d2.min():.2e}"


def check_reduced_breaking():
    lo = minimize_reduced_F(ProblemParams(1, 2.0, 6.5, 2.0))
    hi = minimize_reduced_F(ProblemParams(1, 2.0, 8.0, 2.0))
    ok = lo.y_star <= 1e-6 and hi.y_star > 1e-3
    return ok, f"y*(q=6.5) = {lo.y_star:.2e}, y*(q=8) = {hi.y_star:.4f}"


def check_taylor():
    rng = np.random.default_rng(4)
    worst = 0.0
    for _ in range(20):
        P = random_admissible(rng)
        exact = second_derivative_at_zero(P)
        fd = fd_second_derivative_at_zero(P)
        worst = max(worst, abs(fd - exact) / abs(exact))
    return worst <= 1e-4, f"max relative error = {worst:.2e} (tol 1e-4)"


def check_shooting():
    errs = []
    for n, ref in ((1, math.pi / 2), (2, BESSEL_J0_ZERO), (3, math.pi)):
        r0, _ = shoot_first_zero(2.0, 2.0, n)
        errs.append(abs(r0 - ref))
    return max(errs) <= 1e-6, "first-zero errors " + ", ".join(f"{e:.1e}" for e in errs) + " (tol 1e-6)"


def check_scaling():
    rng = np.random.default_rng(5)
    amp, dil = 0.0, 0.0
    for p, q, n in ((2.0, 3.0, 2), (3.0, 4.0, 3), (1.5, 2.5, 1)):
        prof = ground_state(p, q, n).profile
        base = quotient(prof, q)
        for c in 10 ** rng.uniform(-3, 3, size=5):
            amp = max(amp, abs(quotient(prof.scaled(c), q) / base - 1))
        for R in (0.5, 2.0, 10.0):
            law = R ** (n / p - 1 - n / q) * base
            dil = max(dil, abs(quotient(prof.dilated(R), q) / law - 1))
    return amp <= 1e-13 and dil <= 1e-8, f"amplitude drift {amp:.1e} (tol 1e-13), dilation error {dil:.1e} (tol 1e-8)"


def check_oracle_equivalence():
    P = ProblemParams(2, 2.0, 2.0, 3.0)
    single = ground_state(2.0, 2.0, 2).quotient
    worst = 0.0
    for t in (0.5, 0.6, 0.75):
        cfg = TwoBallConfig.from_t(t, 2)
        sol = solve_fixed_partition(P, cfg, m=400)
        cf = closed_form_at_q_eq_rm1(P, cfg, single)
        worst = max(worst, abs(sol.lambda_value / cf - 1))
    return worst <= 5e-3, f"max relative gap = {worst:.2e} (tol 5e-3)"


def check_linear_case():
    res = optimize_partition(ProblemParams(2, 2.0, 2.0, 2.0))
    sol = solve_fixed_partition(ProblemParams(1, 2.0, 2.0, 2.0), TwoBallConfig.from_t(0.5, 1))
    rel = abs(sol.lambda_value / (math.pi / 2) - 1)
    ok = abs(res.t_star - 0.5) <= 1e-3 and rel <= 5e-3
    return ok, f"n=2 t* = {res.t_star:.6f}; n=1 lambda/(pi/2) - 1 = {rel:.1e}"


def check_bifurcation_1d():
    q400 = critical_q(1, 2.0, 2.0, (5.0, 7.0), tol_q=0.05, m=400)
    q800 = critical_q(1, 2.0, 2.0, (5.0, 7.0), tol_q=0.05, m=800)
    ok = 5.75 <= q400 <= 6.25 and abs(q800 - q400) <= 0.1
    return ok, f"q_c(m=400) = {q400:.4f}, q_c(m=800) = {q800:.4f} (target 6 = (2r-1)p)"


def check_exploratory_2d():
    grid = np.arange(3.0, 4.5 + 1e-9, 0.25)
    diag = bifurcation_sweep(2, 2.0, 2.0, grid)
    qc = diag.q_critical
    ok = qc is not None and qc <= 4.0 + 0.25
    return ok, f"exploratory q_c = {qc} vs q_hat = 4"


@dataclass(frozen=True)
class Check:
    name: str
    group: str
    func: Callable[[], tuple]
    budget_s: float


CHECKS = [
    Check("gamma_qhat", "closed-form", check_gamma_qhat, 1.0),
    Check("qhat_at_critical_r", "closed-form", check_qhat_at_critical_r, 1.0),
    Check("one_dim_identity", "closed-form", check_one_dim_identity, 1.0),
    Check("reduced_convex", "reduced", check_reduced_convex, 1.0),
    Check("reduced_breaking", "reduced", check_reduced_breaking, 1.0),
    Check("taylor", "reduced", check_taylor, 1.0),
    Check("shooting_anchors", "shooting", check_shooting, 5.0),
    Check("scaling_laws", "shooting", check_scaling, 5.0),
    Check("oracle_equivalence", "twoball", check_oracle_equivalence, 120.0),
    Check("linear_case", "twoball", check_linear_case, 300.0),
    Check("bifurcation_1d", "bifurcation", check_bifurcation_1d, 1800.0),
    Check("exploratory_2d", "bifurcation", check_exploratory_2d, 1800.0),
]


@dataclass
class CheckResult:
    name: str
    ok: bool
    detail: str
    seconds: float
    budget_s: float

    @property
    def line(self) -> str:
        status = "PASS" if self.ok else "FAIL"
        return f"{status} {self.name}: {self.detail} [{self.seconds:.2f}s / {self.budget_s:g}s]"


def select(only: Optional[Iterable[str]] = None) -> list[Check]:
    if not only:
        return list(CHECKS)
    wanted = set(only)
    picked = [c for c in CHECKS if c.name in wanted or c.group in wanted]
    unknown = wanted - {c.name for c in CHECKS} - {c.group for c in CHECKS}
    if unknown:
        raise KeyError(f"unknown checks: {sorted(unknown)}")
    return picked


def run_check(check: Check) -> CheckResult:
    t0 = time.perf_counter()
    try:
        ok, detail = check.func()
    except Exception as exc:  # a crashing check is a failing check
        ok, detail = False, f"{type(exc).__name__}: {exc}"
    dt = time.perf_counter() - t0
    if dt > check.budget_s:
        ok, detail = False, detail + " (over time budget)"
    return CheckResult(check.name, bool(ok), detail, dt, check.budget_s)


def run_verify(only=None, echo=print) -> list[CheckResult]:
    results = []
    for check in select(only):
        res = run_check(check)
        echo(res.line)
        results.append(res)
    return results
