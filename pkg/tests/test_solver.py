import numpy as np
import pytest

from frontforge.analysis import strict_increase_margin
from frontforge.errors import BadParams, Indeterminate, OutOfDomain, PotentialDomain
from frontforge.potential import PotentialSpec, build_normalized, builtin
from frontforge.profile import Grid, Profile, from_function, is_monotone, shift_nodes, shock_profile
from frontforge.solver import (CONVERGED, MAX_ITER, PLATEAU, TRAVELLING_SHIFT, HistoryEntry, SolverConfig,
                               action, action_sharp, apply_T, diagnose, euler_step, residual, solve_front)

HARMONIC = build_normalized(PotentialSpec((0.0, 0.0, 0.5)), -1.0, 1.0)


def direct_average(vals, k, h, left, right):
    """Loop-based trapezoid window sum, independent of the convolution in the library."""
    n = len(vals)
    out = np.empty(n)
    for i in range(n):
        s = 0.0
        for j in range(i - k, i + k + 1):
            v = left if j < 0 else right if j >= n else vals[j]
            s += (0.5 if abs(j - i) == k else 1.0) * v
        out[i] = h * s
    return out


def test_config_validation():
    for bad in (dict(lam=0.0), dict(lam=1.5), dict(tol=0.0), dict(max_iter=0), dict(diag_window=1)):
        with pytest.raises(BadParams):
            SolverConfig(**bad)


def test_harmonic_T_is_double_average():
    g = Grid(0.1, 4)
    w = shock_profile(g)
    once = direct_average(w.values, g.k, g.h, -1.0, 1.0)
    twice = direct_average(once, g.k, g.h, -1.0, 1.0)
    assert np.max(np.abs(apply_T(HARMONIC, w).values - twice)) <= 1e-12


@pytest.mark.parametrize("h", [0.05, 0.025])
def test_harmonic_T_of_shock_closed_form(h):
    # continuum: A^2 sgn = sgn(phi) (2|phi| - phi^2) on |phi| <= 1, sgn beyond
    g = Grid(h, 10)
    phi = g.nodes
    a = np.abs(phi)
    exact = np.sign(phi) * np.where(a <= 1.0, 2 * a - a * a, 1.0)
    assert np.max(np.abs(apply_T(HARMONIC, shock_profile(g)).values - exact)) <= h**2
    assert residual(HARMONIC, shock_profile(g)) == pytest.approx(np.sqrt(0.4), abs=2 * h)


def test_T_keeps_shock_outside_unit_window(cubic):
    g = Grid(0.05, 10)
    w = shock_profile(g)
    t = apply_T(cubic, w).values
    far = np.abs(g.nodes) >= 1.0 + g.h
    d = np.abs(t - w.values)
    assert d[far].max() <= 1e-14 and d[~far].max() > 0.1
    assert residual(cubic, w) > 0.1


def test_T_preserves_cone(cubic):
    g = Grid(0.05, 10)
    rng = np.random.default_rng(5)
    for _ in range(5):
        w = Profile(g, np.sort(rng.uniform(-1, 1, g.n)))
        t = apply_T(cubic, w)
        assert is_monotone(t) and t.values.min() >= -1 - 1e-15 and t.values.max() <= 1 + 1e-15


def test_T_rejects_overshoot(cubic):
    g = Grid(0.25, 2)
    with pytest.raises(PotentialDomain):
        apply_T(cubic, Profile(g, np.full(g.n, 1.2)))


def test_action_reference(cubic):
    g = Grid(0.05, 10)
    assert action(cubic, shock_profile(g)) == 0.0
    # only the node phi = 0, where W_sh = 0, contributes: h g(0)
    assert action_sharp(cubic, shock_profile(g)) == pytest.approx(g.h * 0.1, abs=1e-15)
    with pytest.raises(OutOfDomain):
        action_sharp(cubic, Profile(g, np.full(g.n, 1.01)))


def test_action_shift_invariance(cubic):
    g = Grid(0.05, 40)
    w = from_function(g, lambda x: np.tanh(1.3 * x))
    base = action(cubic, w)
    for s in (-40, 13, 60):
        assert action(cubic, shift_nodes(w, s)) == pytest.approx(base, abs=2 * g.h)


def test_sharp_action_negative_on_plateau():
    np_ = builtin("concave_convex", (0.4,))
    g = Grid(0.05, 40)
    w = from_function(g, lambda x: 0.5 * (np.tanh(x + 10) + np.tanh(x - 10)))
    assert action_sharp(np_, w) < 0.0


def test_euler_step_examples(cubic):
    g = Grid(0.05, 10)
    w = shock_profile(g)
    t = apply_T(cubic, w)
    assert np.allclose(euler_step(cubic, w, 1.0).values, t.values, atol=1e-15, rtol=0)
    assert np.allclose(euler_step(cubic, w, 0.5).values, 0.5 * (w.values + t.values), atol=1e-15)


def test_fixed_point_is_stationary(cubic, cubic_front):
    w = cubic_front.profile
    assert np.max(np.abs(euler_step(cubic, w, 0.7).values - w.values)) <= 1e-9


def test_cubic_front_converges(cubic_front):
    assert cubic_front.outcome == CONVERGED
    assert cubic_front.residual <= cubic_front.config.tol
    assert strict_increase_margin(cubic_front.profile) > 0.0
    assert cubic_front.max_correction <= 1e-12
    acts = np.array([h.action for h in cubic_front.history])
    assert np.all(np.diff(acts) <= 1e-12)


def test_lambda_below_one_also_converges(cubic):
    res = solve_front(cubic, SolverConfig(lam=0.6), Grid(0.1, 30))
    assert res.outcome == CONVERGED
    assert np.all(np.diff([h.action for h in res.history]) <= 1e-12)


def test_tilted_travelling_shift_sign():
    for delta in (0.1, -0.1):
        np_ = builtin("tilted", (0.4, delta))
        res = solve_front(np_, SolverConfig(max_iter=300), Grid(0.05, 40))
        assert res.outcome == TRAVELLING_SHIFT
        assert res.metadata["drift_sign"] == np.sign(np_.energy_gap)
        window = np.array(res.shifts[-49:])
        nz = window[window != 0]
        assert nz.size and np.all(np.sign(nz) == np.sign(delta))


def test_concave_convex_plateau():
    res = solve_front(builtin("concave_convex", (0.4,)), SolverConfig(), Grid(0.05, 40))
    assert res.outcome == PLATEAU
    assert res.metadata["plateau_level"] == 0.0
    assert res.metadata["growth_nodes_per_iteration"] > 1.0


def test_diagnose_converged_and_indeterminate(cubic):
    cfg = SolverConfig(tol=1e-6, diag_window=5)
    conv = [HistoryEntry(1.0, 0.0, 0, 0)] * 4 + [HistoryEntry(1e-7, 0.0, 0, 0)]
    assert diagnose(conv, cubic, cfg)[0] == CONVERGED
    wobble = [HistoryEntry(r, 0.0, 0, 0) for r in (1.0, 0.5, 1.0, 0.5, 1.0)]
    with pytest.raises(Indeterminate):
        diagnose(wobble, cubic, cfg, [1, -1, 1, -1])
    with pytest.raises(Indeterminate):
        diagnose(wobble[:3], cubic, cfg)


def test_max_iter_outcome(cubic):
    res = solve_front(cubic, SolverConfig(max_iter=3, diag_window=10), Grid(0.1, 20))
    assert res.outcome == MAX_ITER and res.iterations == 3
    assert "reason" in res.metadata
