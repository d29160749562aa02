"""Discretization studies: shooting order, two-ball quotient and Euler residual against mesh size."""

import math

from scipy.special import jn_zeros

from twistshape.params import ProblemParams
from twistshape.radial import StepControl, shoot_first_zero
from twistshape.twoball import TwoBallConfig, euler_residual, solve_fixed_partition


def shooting_orders():
    print("fixed-step RK4 first zero, observed order from three step sizes")
    cases = [(2.0, 2.0, 2, float(jn_zeros(0, 1)[0])), (3.0, 4.0, 2, None), (1.5, 3.0, 1, None), (4.0, 2.5, 3, None)]
    for p, q, n, exact in cases:
        ref = exact if exact is not None else shoot_first_zero(p, q, n)[0]
        errs = [abs(shoot_first_zero(p, q, n, step=StepControl(method="rk4", h=h))[0] - ref)
                for h in (0.02, 0.01, 0.005)]
        orders = [math.log2(a / b) if b > 0 else math.inf for a, b in zip(errs, errs[1:])]
        print(f"  p={p} q={q} n={n}: errors " + ", ".join(f"{e:.2e}" for e in errs)
              + "  orders " + ", ".join(f"{o:.2f}" for o in orders))


def twoball_mesh():
    print("two-ball quotient and Euler residual against m")
    for P, t in ((ProblemParams(2, 2.0, 2.0, 3.0), 0.6), (ProblemParams(2, 2.0, 3.0, 3.0), 0.7),
                 (ProblemParams(2, 2.0, 3.0, 2.5), 0.7), (ProblemParams(2, 2.0, 2.0, 2.0), 0.9),
                 (ProblemParams(3, 2.0, 3.0, 1.5), 0.7)):
        prev = None
        for m in (200, 400, 800):
            sol = solve_fixed_partition(P, TwoBallConfig.from_t(t, P.n), m=m)
            res = euler_residual(sol, P)
            d = "" if prev is None else f"  change {sol.lambda_value - prev:+.2e}"
            print(f"  {P.n},{P.p:g},{P.q:g},{P.r:g} t={t} m={m}: lambda={sol.lambda_value:.10f} "
                  f"euler={res:.2e} support={sol.support}{d}")
            prev = sol.lambda_value


if __name__ == "__main__":
    shooting_orders()
    twoball_mesh()
