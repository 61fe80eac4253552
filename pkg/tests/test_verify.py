import math

import numpy as np
import pytest

from monospline import (ProblemSpec, SolverState, baseline_step, build_dual_grid, build_problem,
                        constant_field, convergence_study, error_norms, exact_gaussian,
                        manufactured_sine, run, StepParams, spline_error_norms)
from monospline.verify import run_baseline
from oracles import pde_residual

# mpmath, 30 digits
PEAK_T0 = 8.920620580763856
PEAK_T1 = 6.307831305050400


def test_gaussian_values():
    assert exact_gaussian(0.4, 0.0, 0.001, 1.0) == pytest.approx(PEAK_T0, rel=1e-14)
    assert exact_gaussian(1.4, 1.0, 0.001, 1.0) == pytest.approx(PEAK_T1, rel=1e-14)
    t = 0.37
    peak = 1 / (2 * math.sqrt(math.pi * 0.02 * (t + 1)))
    assert exact_gaussian(0.2 - 0.5 * t, t, 0.02, -0.5, x0=0.2) == pytest.approx(peak, rel=1e-15)


def test_gaussian_satisfies_pde():
    D, V = 0.01, 1.0
    rng = np.random.default_rng(0)
    u = lambda x, t: exact_gaussian(x, t, D, V)
    x = rng.uniform(0, 2.4, 50)
    t = rng.uniform(0.1, 1.5, 50)
    res = pde_residual(u, D, V, 0.0, lambda x, t: 0.0, x, t)
    scale = 1 / (2 * math.sqrt(math.pi * D))
    assert np.max(np.abs(res)) <= 1e-4 * scale


def test_unshifted_gaussian_fails_pde():
    D, V = 0.01, 1.0
    u = lambda x, t: np.exp(-(x - 0.4) ** 2 / (4 * D * (t + 1))) / (2 * np.sqrt(np.pi * D * (t + 1)))
    res = pde_residual(u, D, V, 0.0, lambda x, t: 0.0, np.array([0.45]), np.array([0.5]))
    assert abs(res[0]) > 1.0


@pytest.mark.parametrize("A", [0.0, 1.0, -2.0])
def test_sine_fields(A):
    L, D, V = 2.0, 0.01, 1.0
    fld = manufactured_sine(L, D, V, A)
    assert fld["u"](L / 2, 0.0) == pytest.approx(1.0, abs=1e-15)
    assert fld["U0"](0.3) == fld["UL"](0.3) == 0.0
    assert abs(fld["u"](L, 0.7)) < 1e-15 and fld["u"](0.0, 0.7) == 0.0
    rng = np.random.default_rng(1)
    x, t = rng.uniform(0, L, 50), rng.uniform(0, 2, 50)
    res = pde_residual(fld["u"], D, V, A, fld["f"], x, t)
    assert np.max(np.abs(res)) <= 1e-4


def test_error_norms_zero_and_offset():
    g = build_dual_grid(3.0, 31, 0.5)
    ex = lambda x, t: np.sin(x) * (1 + t)
    rep = error_norms(ex(g.taus, 0.2), ex, g, 0.2)
    assert rep.linf == rep.l2 == rep.linf_rel == 0.0
    rep = error_norms(ex(g.taus, 0.2) + 1e-3, ex, g, 0.2)
    assert rep.linf == pytest.approx(1e-3, abs=1e-12)
    assert rep.l2 == pytest.approx(1e-3 * math.sqrt(3.0), abs=1e-12)
    assert rep.sample_count == g.N
    assert rep.linf >= rep.l2 / math.sqrt(3.0) - 1e-15


def test_spline_error_variant():
    p = build_problem("manufactured_sine", L=1.0, D=0.01, V=1.0)
    g = build_dual_grid(1.0, 101, 0.5)
    r = run(p, g, StepParams(0.01), 0.2)
    node = error_norms(r.state.spline, p.exact, g, r.state.t)
    spl = spline_error_norms(r.state.spline, p.exact, r.state.t)
    assert spl.sample_count == g.N + 10 * (g.N - 1)
    assert 0 < node.linf <= spl.linf < 2 * node.linf


def _bumpy_problem():
    return build_problem("gaussian", L=2.4, D=0.001, V=1.0)


@pytest.mark.parametrize("kind", ["implicit-upwind", "implicit-central"])
def test_baseline_constant(kind):
    p = build_problem("constant", c=1.7, A=0.4)
    nodes = np.linspace(0, 1, 21)
    s = SolverState(0, 0.0, np.full(21, 1.7))
    for _ in range(5):
        s = baseline_step(s, kind, p, nodes, 0.05)
    np.testing.assert_allclose(s.u_x, 1.7, rtol=1e-13)


def test_baseline_rejects_nonuniform():
    p = build_problem("constant")
    with pytest.raises(ValueError):
        baseline_step(SolverState(0, 0.0, np.ones(4)), "implicit-upwind", p,
                      np.array([0, 0.1, 0.5, 1.0]), 0.1)


def test_central_oscillates_upwind_does_not():
    p = _bumpy_problem()
    nodes = np.linspace(0, 2.4, 241)  # h = 0.01, cell Peclet 10
    peak = p.exact(0.4, 0.0)
    rho = 0.1
    mins = {}
    for kind in ("implicit-central", "implicit-upwind"):
        s = SolverState(0, 0.0, np.array(p.g(nodes)))
        m = np.inf
        for _ in range(50):
            s = baseline_step(s, kind, p, nodes, rho)
            m = min(m, s.u_x.min())
        mins[kind] = m
    assert mins["implicit-central"] < -1e-3 * peak
    assert mins["implicit-upwind"] >= -1e-10 * peak


def test_linear_convergence_is_exact():
    p = build_problem("linear_steady", L=1.0, D=0.05, V=1.0)
    rows = convergence_study(p, 11, 3, 0.05, 0.5)
    assert all(r.linf <= 1e-9 for r in rows)
    assert [r.exact for r in rows] == [False, True, True]


def test_convergence_needs_levels():
    p = build_problem("linear_steady")
    with pytest.raises(ValueError):
        convergence_study(p, 11, 1, 0.05, 0.5)


def test_time_sweep_order():
    p = build_problem("manufactured_sine", L=1.0, D=0.01, V=1.0)
    rows = convergence_study(p, 101, 3, 0.04, 1.0, sweep="time", strict=True)
    assert len({r.h for r in rows}) == 1
    for r in rows[1:]:
        assert 0.8 <= r.order <= 1.2


def test_space_sweep_monotone_decrease():
    p = build_problem("manufactured_sine", L=1.0, D=0.01, V=1.0)
    rows = convergence_study(p, 11, 4, 1e-4, 0.1)
    for a, b in zip(rows, rows[1:]):
        assert b.linf <= a.linf / 1.5


def test_run_baseline_snapshots():
    p = build_problem("constant")
    nodes = np.linspace(0, 1, 11)
    state, snaps = run_baseline("implicit-upwind", p, nodes, 0.1, 1.0, [0.5])
    assert state.k == 10 and list(snaps) == [5]
