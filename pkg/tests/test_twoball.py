import math

import numpy as np
import pytest
from scipy.optimize import minimize

from twistshape.params import InadmissibleParams, ProblemParams, geometry
from twistshape.radial import ground_state
from twistshape.twoball import (BallGrid, TwoBallConfig, bifurcation_sweep, closed_form_at_q_eq_rm1,
                                critical_q, dilation_family_quotient, euler_residual, optimize_partition,
                                solve_fixed_partition, start_quotient)

TRIPLE = ProblemParams(2, 2.0, 2.0, 3.0)  # q = r - 1


def test_config_volume_identity():
    for n in (1, 2, 3, 5):
        for t in (0.1, 0.5, 0.77):
            c = TwoBallConfig.from_t(t, n, C=3.0)
            assert abs(c.R_plus ** n + c.R_minus ** n - 3.0) <= 1e-14 * 3
            assert c.y == pytest.approx(2 * t - 1)
    for t in (0.0, 1.0, -0.2):
        with pytest.raises(ValueError):
            TwoBallConfig.from_t(t, 2)
    with pytest.raises(ValueError):
        TwoBallConfig.from_t(0.5, 2, C=0.0)


def test_grid_weights_integrate_exactly():
    g = BallGrid(3, 1.7, 100)
    assert g.cell_w.sum() == pytest.approx(geometry(3).unit_ball_volume * 1.7 ** 3, rel=1e-13)
    # node weights integrate the P1 interpolant of 1, which drops to 0 on the last cell
    full = BallGrid(3, 1.7, 100)
    assert full.node_w.sum() < full.cell_w.sum()


@pytest.mark.parametrize("t", [0.5, 0.6, 0.75])
def test_oracle_equivalence(t):
    cfg = TwoBallConfig.from_t(t, 2)
    sol = solve_fixed_partition(TRIPLE, cfg, m=400)
    assert sol.converged
    assert sol.lambda_value == pytest.approx(closed_form_at_q_eq_rm1(TRIPLE, cfg), rel=5e-3)


def test_profiles_are_dilated_ground_states():
    cfg = TwoBallConfig.from_t(0.6, 2)
    sol = solve_fixed_partition(TRIPLE, cfg, m=400)
    v = ground_state(2.0, 2.0, 2).profile
    for prof in (sol.profile_plus, sol.profile_minus):
        shape = np.interp(prof.radii / prof.R, v.radii, v.values)
        assert np.allclose(prof.values / prof.values[0], shape, atol=1e-4)


def test_closed_form_checks():
    with pytest.raises(ValueError):
        closed_form_at_q_eq_rm1(ProblemParams(2, 2.0, 3.0, 3.0), TwoBallConfig.from_t(0.5, 2))
    a = closed_form_at_q_eq_rm1(TRIPLE, TwoBallConfig.from_t(0.3, 2))
    b = closed_form_at_q_eq_rm1(TRIPLE, TwoBallConfig.from_t(0.7, 2))
    assert a == pytest.approx(b, rel=1e-14)
    assert closed_form_at_q_eq_rm1(TRIPLE, TwoBallConfig.from_t(0.75, 2)) > closed_form_at_q_eq_rm1(
        TRIPLE, TwoBallConfig.from_t(0.5, 2))


def test_symmetric_closed_form_is_single_ball_scaled():
    # two balls of volume C/2 each: lambda = lambda_1(B_R) * 2^(1/q - 1/p), R^n = C/2
    single = ground_state(2.0, 2.0, 2).quotient
    for C in (2.0, 5.0):
        R = (C / 2) ** 0.5
        expect = single / R * 2 ** (1 / 2 - 1 / 2)
        assert closed_form_at_q_eq_rm1(TRIPLE, TwoBallConfig.from_t(0.5, 2, C=C)) == pytest.approx(expect, rel=1e-12)


def test_one_dimensional_linear_value():
    sol = solve_fixed_partition(ProblemParams(1, 2.0, 2.0, 2.0), TwoBallConfig.from_t(0.5, 1), m=400)
    assert sol.lambda_value == pytest.approx(math.pi / 2, rel=5e-3)
    assert sol.multiplier_mu == pytest.approx(0.0, abs=1e-8)


def test_growth_as_negative_ball_vanishes():
    P = ProblemParams(1, 2.0, 5.0, 2.0)
    lam = [solve_fixed_partition(P, TwoBallConfig.from_t(t, 1), m=200).lambda_value
           for t in (0.95, 0.97, 0.98, 0.99)]
    assert all(b > a for a, b in zip(lam, lam[1:]))
    assert lam[-1] > 2 * lam[0]


@pytest.mark.parametrize("P", [ProblemParams(1, 2.0, 5.0, 2.0), ProblemParams(2, 2.0, 3.0, 2.5)])
def test_partition_symmetry(P):
    for t in (0.3, 0.4):
        a = solve_fixed_partition(P, TwoBallConfig.from_t(t, P.n), m=200)
        b = solve_fixed_partition(P, TwoBallConfig.from_t(1 - t, P.n), m=200)
        assert a.lambda_value == pytest.approx(b.lambda_value, rel=1e-9)
        assert a.multiplier_mu == pytest.approx(-b.multiplier_mu, rel=1e-6)


@pytest.mark.parametrize("P, t", [(ProblemParams(1, 2.0, 5.0, 2.0), 0.7), (ProblemParams(2, 2.0, 2.0, 2.0), 0.9),
                                  (ProblemParams(2, 3.0, 4.0, 2.5), 0.65), (ProblemParams(1, 1.5, 3.0, 2.0), 0.8)])
def test_constraints_and_multipliers(P, t):
    sol = solve_fixed_partition(P, TwoBallConfig.from_t(t, P.n), m=200)
    assert sol.converged and sol.kkt_residual <= 1e-7
    w = BallGrid(P.n, sol.config.R_minus, 200).node_w
    m_minus = float(np.dot(w, sol.profile_minus.values[:-1] ** (P.r - 1)))
    assert abs(sol.moment - m_minus) / max(sol.moment, m_minus) <= 1e-8
    # with J = 1 the Lagrange identity gives multiplier_lambda = lambda^p
    assert sol.multiplier_lambda == pytest.approx(sol.lambda_value ** P.p, rel=1e-7)
    for prof in (sol.profile_plus, sol.profile_minus):
        assert prof.values[-1] == 0.0 and np.all(prof.values >= 0)


def test_scale_law_in_C():
    P = ProblemParams(2, 2.0, 3.0, 2.5)
    for t in (0.5, 0.7):
        a = solve_fixed_partition(P, TwoBallConfig.from_t(t, 2, C=2.0), m=200).lambda_value
        b = solve_fixed_partition(P, TwoBallConfig.from_t(t, 2, C=8.0), m=200).lambda_value
        # C -> 2^n C dilates both balls by 2
        assert b / a == pytest.approx(2.0 ** (2 / 2 - 1 - 2 / 3), rel=1e-8)


@pytest.mark.parametrize("P", [ProblemParams(1, 2.0, 5.0, 2.0), ProblemParams(2, 3.0, 4.5, 2.0),
                               ProblemParams(3, 2.0, 3.0, 2.5)])
def test_never_worse_than_dilation_start(P):
    for t in (0.5, 0.65, 0.85):
        cfg = TwoBallConfig.from_t(t, P.n)
        sol = solve_fixed_partition(P, cfg, m=200)
        assert sol.lambda_value <= start_quotient(P, cfg, m=200) * (1 + 1e-12)


def test_matches_generic_bound_constrained_solver():
    # independent oracle: SLSQP with explicit bounds on a coarse grid
    P = ProblemParams(2, 2.0, 2.0, 2.0)
    m = 100
    for t, ref_support in ((0.8, 88), (0.6, 100)):
        cfg = TwoBallConfig.from_t(t, 2)
        sol = solve_fixed_partition(P, cfg, m=m)
        gp, gm = BallGrid(2, cfg.R_plus, m), BallGrid(2, cfg.R_minus, m)

        def split(x):
            return x[:m], x[m:]

        def energy(x):
            up, um = split(x)
            return sum(np.dot(g.cell_w, (np.diff(np.append(u, 0.0)) / g.h) ** 2)
                       for u, g in ((up, gp), (um, gm)))

        cons = [{"type": "eq", "fun": lambda x: np.dot(gp.node_w, split(x)[0] ** 2) + np.dot(gm.node_w, split(x)[1] ** 2) - 1},
                {"type": "eq", "fun": lambda x: np.dot(gp.node_w, split(x)[0]) - np.dot(gm.node_w, split(x)[1])}]
        x0 = np.concatenate([np.cos(np.linspace(0, 1.5, m)), np.cos(np.linspace(0, 1.5, m))])
        x0 /= math.sqrt(np.dot(gp.node_w, x0[:m] ** 2) + np.dot(gm.node_w, x0[m:] ** 2))
        ref = minimize(energy, x0, method="SLSQP", constraints=cons, bounds=[(0, None)] * (2 * m),
                       options={"maxiter": 2000, "ftol": 1e-14})
        assert sol.lambda_value == pytest.approx(math.sqrt(ref.fun), rel=1e-6)
        assert sol.support[0] == ref_support


def test_euler_residual_small_at_q_equal_r_minus_1():
    sol = solve_fixed_partition(TRIPLE, TwoBallConfig.from_t(0.5, 2), m=400)
    assert euler_residual(sol, TRIPLE) <= 1e-5


def test_euler_residual_needs_mu():
    P = ProblemParams(2, 2.0, 3.0, 2.5)
    sol = solve_fixed_partition(P, TwoBallConfig.from_t(0.7, 2), m=400)
    good = euler_residual(sol, P)
    assert abs(sol.multiplier_mu) > 1e-3
    assert euler_residual(sol, P, mu=0.0) > 100 * good


@pytest.mark.parametrize("P", [ProblemParams(2, 2.0, 3.0, 2.5), ProblemParams(2, 2.0, 3.0, 3.0)])
def test_euler_residual_decreases_with_mesh(P):
    res = [euler_residual(solve_fixed_partition(P, TwoBallConfig.from_t(0.7, 2), m=m), P) for m in (200, 400, 800)]
    assert res[0] > res[1] > res[2]
    if P.r == 3.0:
        # smooth source: second order; r = 2.5 has a u^(1/2) source and converges slower
        assert res[0] / res[1] == pytest.approx(4.0, rel=0.05)


def test_regularization_insensitive_for_p_below_2():
    P = ProblemParams(1, 1.5, 3.0, 2.0)
    cfg = TwoBallConfig.from_t(0.7, 1)
    a = solve_fixed_partition(P, cfg, m=200)
    b = solve_fixed_partition(P, cfg, m=200, eps=a.eps / 10)
    assert a.eps == 1e-10
    assert a.lambda_value == pytest.approx(b.lambda_value, rel=1e-9)


def test_fixed_partition_argument_checks():
    cfg = TwoBallConfig.from_t(0.5, 2)
    with pytest.raises(InadmissibleParams):
        solve_fixed_partition(ProblemParams(3, 2.0, 7.0, 2.0), TwoBallConfig.from_t(0.5, 3))
    with pytest.raises(ValueError):
        solve_fixed_partition(TRIPLE, cfg, m=50)
    with pytest.raises(ValueError):
        solve_fixed_partition(TRIPLE, TwoBallConfig.from_t(0.5, 3))


def test_dilation_family_agrees_with_reduced_form():
    # q != r - 1: the family quotient is not optimal but must dominate the solver
    P = ProblemParams(1, 2.0, 5.0, 2.0)
    for t in (0.5, 0.8):
        cfg = TwoBallConfig.from_t(t, 1)
        fam = dilation_family_quotient(P, cfg)
        sol = solve_fixed_partition(P, cfg, m=400)
        assert sol.lambda_value <= fam * (1 + 1e-4)


def test_optimal_split_symmetric_at_q_equal_r_minus_1():
    res = optimize_partition(TRIPLE)
    assert res.t_star == pytest.approx(0.5, abs=1e-3)
    assert res.solution.converged


def test_optimal_split_symmetric_linear_case():
    res = optimize_partition(ProblemParams(2, 2.0, 2.0, 2.0))
    assert res.t_star == pytest.approx(0.5, abs=1e-3)


def test_optimal_split_asymmetric_past_bifurcation():
    res = optimize_partition(ProblemParams(1, 2.0, 8.0, 2.0))
    assert res.t_star > 0.5 + 1e-3
    lam = res.scan_lambda
    assert res.solution.lambda_value <= np.nanmin(lam) * (1 + 1e-12)


def test_optimize_argument_checks():
    with pytest.raises(ValueError):
        optimize_partition(TRIPLE, scan_points=10)


def test_critical_q_one_dimensional():
    qc = critical_q(1, 2.0, 2.0, (5.0, 7.0), tol_q=0.1)
    assert abs(qc - 6.0) <= 0.1 + 0.05


@pytest.mark.slow
def test_critical_q_stable_under_mesh_doubling():
    a = critical_q(1, 2.0, 2.0, (5.0, 7.0), tol_q=0.05, m=400)
    b = critical_q(1, 2.0, 2.0, (5.0, 7.0), tol_q=0.05, m=800)
    assert abs(a - b) <= 2 * 0.05


@pytest.mark.slow
def test_critical_q_second_operating_point():
    assert critical_q(1, 3.0, 2.0, (7.0, 11.0), tol_q=0.1) == pytest.approx(9.0, abs=0.15)


def test_critical_q_bad_bracket():
    with pytest.raises(ValueError):
        critical_q(1, 2.0, 2.0, (2.0, 3.0))
    with pytest.raises(ValueError):
        critical_q(1, 2.0, 2.0, (7.0, 5.0))


@pytest.mark.slow
def test_sweep_one_dimensional():
    grid = np.arange(5.0, 7.0 + 1e-9, 0.25)
    diag = bifurcation_sweep(1, 2.0, 2.0, grid)
    assert diag.q_critical == pytest.approx(6.0, abs=0.25)
    assert diag.q_values == list(grid)
    y = np.array(diag.y_star)
    assert np.all((0 <= y) & (y < 1))
    assert np.all(y[np.array(diag.q_values) < 5.9] == 0)
    assert np.all(y[np.array(diag.q_values) > 6.1] > 1e-3)
    assert diag.errors == {}
    rows = list(diag.rows())
    assert len(rows) == len(grid) and rows[0][-1] == 400


@pytest.mark.slow
def test_sweep_two_dimensional_below_q_hat():
    diag = bifurcation_sweep(2, 2.0, 2.0, np.arange(3.0, 4.5 + 1e-9, 0.25))
    assert diag.exploratory
    assert diag.q_critical is not None and diag.q_critical <= 4.0 + 0.25


def test_sweep_argument_checks():
    with pytest.raises(InadmissibleParams):
        bifurcation_sweep(1, 2.0, 2.0, [0.5, 0.8])
    with pytest.raises(ValueError):
        bifurcation_sweep(1, 2.0, 2.0, [6.0, 5.0])
    empty = bifurcation_sweep(1, 2.0, 2.0, [])
    assert empty.q_values == [] and empty.q_critical is None
