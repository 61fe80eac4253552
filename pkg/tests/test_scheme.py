import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from monospline import (DegenerateEliminationError, DualGrid, ProblemSpec, StepParams,
                        assemble_general, assemble_uniform, build_dual_grid, build_problem,
                        constant_field, monotonicity_report, q_coefficients, reconstruct_c,
                        sample_initial, scheme_coefficients, thomas_solve)
from oracles import dense_collocation, nonuniform_grid_nodes

REF = dict(D=0.001, V=1.0, A=0.0, h=0.0005, mu=0.00025)


def solve_phi(problem, grid, params, u_prev, t_next, assembler):
    sys_ = assembler(problem, grid, params, u_prev, t_next)
    phi = np.empty(grid.N)
    phi[0], phi[-1] = problem.U0(t_next), problem.UL(t_next)
    phi[1:-1] = thomas_solve(sys_)
    return phi


def variable_problem(L=1.0):
    """Variable D, V, A with a steady sine solution and the matching source."""
    k = math.pi / L
    D = lambda x, t: 0.05 * (1 + np.asarray(x) ** 2)
    Dx = lambda x: 0.1 * np.asarray(x)
    V = lambda x, t: 1.0 + np.asarray(x)
    A = lambda x, t: 0.5 * np.cos(np.asarray(x))
    u = lambda x, t: np.sin(k * np.asarray(x, dtype=float))

    def f(x, t):
        x = np.asarray(x, dtype=float)
        # steady: 0 = D u'' - V u' + A u + f
        return -(D(x, t) * (-k * k) * np.sin(k * x) - V(x, t) * k * np.cos(k * x)
                 + A(x, t) * np.sin(k * x))

    return ProblemSpec(L=L, D=D, V=V, A=A, f=f, U0=lambda t: 0.0, UL=lambda t: 0.0,
                       g=lambda x: u(x, 0.0), exact=u)


# --------------------------------------------------------------- coefficients

def test_reference_coefficients():
    c = scheme_coefficients(rho=0.001, **REF)
    for name, want in dict(a=5000, b=3000, alpha=4875, beta=2875, gamma=8750).items():
        assert getattr(c, name) == pytest.approx(want, rel=1e-12), name
    assert c.gamma - c.alpha - c.beta == pytest.approx(1000.0, rel=1e-12)


def test_diffusion_limit_stencil():
    c = scheme_coefficients(D=1.0, V=0.0, A=0.0, rho=1e12, h=1.0, mu=0.5)
    assert (c.alpha, c.beta, c.gamma) == pytest.approx((1.0, 1.0, 2.0), abs=1e-11)


@settings(max_examples=300, deadline=None)
@given(D=st.floats(1e-5, 10), V=st.floats(-10, 10), A=st.floats(-10, 10),
       logrho=st.floats(-6, 2), h=st.floats(1e-4, 1.0), frac=st.floats(0.01, 0.99))
def test_gamma_identity(D, V, A, logrho, h, frac):
    rho = 10.0 ** logrho
    c = scheme_coefficients(D, V, A, rho, h, frac * h)
    scale = max(abs(c.alpha), abs(c.beta), abs(c.gamma), abs(1 / rho - A))
    assert abs((c.gamma - c.alpha - c.beta) - (1 / rho - A)) <= 1e-12 * scale


@pytest.mark.parametrize("kw", [dict(h=0.0), dict(mu=0.0), dict(mu=0.0005),
                                dict(rho=0.0), dict(D=0.0)])
def test_coefficient_preconditions(kw):
    args = dict(REF, rho=0.001)
    args.update(kw)
    with pytest.raises(ValueError):
        scheme_coefficients(**args)


def test_reference_thresholds():
    rep = monotonicity_report(rho=0.001, **REF)
    # mu^2 / (2 (D + V mu)) and (h - mu)^2 / (2 (D + V mu - V h)) by hand
    assert rep.rho1 == pytest.approx(2.5e-5, rel=1e-12)
    assert rep.rho2 == pytest.approx(1 / 24000, rel=1e-12)
    assert rep.rho_max_reaction == math.inf
    assert rep.monotone
    assert not monotonicity_report(rho=1e-5, **REF).monotone


def test_thresholds_are_sharp():
    rep = monotonicity_report(rho=0.001, **REF)
    th = max(rep.rho1, rep.rho2)
    assert monotonicity_report(rho=th * 1.001, **REF).monotone
    assert not monotonicity_report(rho=th * 0.999, **REF).monotone


def test_reaction_bound():
    args = dict(REF, A=100.0)
    rep = monotonicity_report(rho=0.02, **args)
    assert rep.alpha > 0 and rep.beta > 0
    assert rep.rho_max_reaction == pytest.approx(0.01)
    assert not rep.monotone
    assert monotonicity_report(rho=0.005, **args).monotone


def test_unsatisfiable_flag():
    # D + V mu - V h < 0: no time step gives beta > 0 at this offset
    rep = monotonicity_report(D=0.001, V=1.0, A=0.0, rho=1.0, h=0.01, mu=0.005)
    assert rep.rho2 == math.inf and not rep.rho2_satisfiable
    assert rep.rho1_satisfiable
    assert not rep.monotone


@settings(max_examples=300, deadline=None)
@given(D=st.floats(1e-4, 1), V=st.floats(-5, 5), A=st.floats(-5, 5),
       logrho=st.floats(-6, 1), h=st.floats(1e-3, 0.5), frac=st.floats(0.01, 0.99))
def test_verdict_matches_signs(D, V, A, logrho, h, frac):
    rho = 10.0 ** logrho
    rep = monotonicity_report(D, V, A, rho, h, frac * h)
    expect = (rep.alpha > 0 and rep.beta > 0 and rep.gamma >= rep.alpha + rep.beta
              and (A <= 0 or rho <= 1 / A))
    assert rep.monotone == expect
    if rep.monotone and rep.rho1_satisfiable and rep.rho2_satisfiable:
        assert rho > max(rep.rho1, rep.rho2) * (1 - 1e-9)


# --------------------------------------------------------------- assembly

def test_constant_rows_exact():
    c = 3.0
    p = build_problem("constant", c=c)
    g = build_dual_grid(1.0, 11, 0.5)
    params = StepParams(0.01)
    sys_ = assemble_uniform(p, g, params, sample_initial(p, g), 0.01)
    r = sys_.residual(np.full(g.N - 2, c))
    assert np.max(np.abs(r)) <= 1e-12 * np.max(np.abs(sys_.diag)) * c


def test_linear_rows_exact():
    p = build_problem("linear_steady", L=1.0, D=0.05, V=1.0)
    g = build_dual_grid(1.0, 21, 0.3)
    params = StepParams(0.05)
    sys_ = assemble_uniform(p, g, params, g.xs.copy(), 0.05)
    r = sys_.residual(g.taus[1:-1])
    assert np.max(np.abs(r)) <= 1e-12 * np.max(np.abs(sys_.diag))


def test_gaussian_first_row():
    p = build_problem("gaussian", L=2.4, D=0.001, V=1.0)
    g = build_dual_grid(2.4, 4801, 0.5)
    rho = 0.0005
    u0 = sample_initial(p, g)
    sys_ = assemble_uniform(p, g, StepParams(rho), u0, rho)
    alpha = scheme_coefficients(0.001, 1.0, 0.0, rho, g.h, g.mu).alpha
    want = -(u0[1] + u0[2]) / (2 * rho) - alpha * p.U0(rho)
    assert sys_.rhs[0] == pytest.approx(want, rel=1e-14)
    assert sys_.n == 4799


def test_uniform_rejects_variable_coefficients():
    g = build_dual_grid(1.0, 9, 0.5)
    p = variable_problem()
    with pytest.raises(ValueError, match="constant"):
        assemble_uniform(p, g, StepParams(0.01), sample_initial(p, g), 0.01)


def test_uniform_rejects_nonuniform_grid():
    xs, taus = nonuniform_grid_nodes(np.random.default_rng(0), 1.0, 8)
    g = DualGrid.from_nodes(xs, taus)
    p = build_problem("constant")
    with pytest.raises(ValueError, match="uniform"):
        assemble_uniform(p, g, StepParams(0.01), sample_initial(p, g), 0.01)


def test_q_homogeneous_source():
    q = q_coefficients((0.0, 0.5, 1.0), (0.25, 0.75), 0.1, 1.0, 0.0, 0.1, (0, 0), (0, 0))
    assert q.f_term == 0.0


def test_q_rows_proportional_to_uniform_stencil():
    D, V, A, rho, h, mu = 0.001, 1.0, 0.0, 0.0005, 0.0005, 0.00025
    c = scheme_coefficients(D, V, A, rho, h, mu)
    f = (0.3, -0.2)
    u = (4.0, 5.5)
    q = q_coefficients((0.0, h, 2 * h), (h - mu, 2 * h - mu), D, V, A, rho, f, u)
    rhs = -(f[0] + f[1]) / 2 - (u[0] + u[1]) / (2 * rho)
    ratios = np.array([q.q_prev / c.alpha, q.q_self / c.gamma, q.q_next / c.beta,
                       q.f_term / rhs])
    np.testing.assert_allclose(ratios, ratios[0], rtol=1e-10)
    # the raw continuity row has the opposite sign to alpha, -gamma, beta
    assert ratios[0] < 0


def test_q_interleaving_violated():
    with pytest.raises(ValueError, match="interleave"):
        q_coefficients((0.0, 0.5, 1.0), (0.6, 0.75), 0.1, 1.0, 0.0, 0.1, (0, 0), (0, 0))


def test_q_degenerate_denominator():
    # 2D - V((x - tau) + (x - tau')) over d1 d2 cancels 1/rho exactly
    D, V = 0.1, 1.0
    taus, xs = (0.0, 0.5, 1.0), (0.3, 0.8)
    d1, d2 = 0.3, 0.2
    bracket = (2 * D - V * (d1 - d2)) / (d1 * d2)
    rho = 1.0
    A = bracket + 1.0 / rho
    with pytest.raises(DegenerateEliminationError) as exc:
        q_coefficients(taus, xs, D, V, A, rho, (0, 0), (0, 0))
    assert exc.value.interval == 0


def test_q_three_intervals_against_dense():
    rng = np.random.default_rng(3)
    xs, taus = nonuniform_grid_nodes(rng, 1.0, 4)
    g = DualGrid.from_nodes(xs, taus)
    p = variable_problem()
    rho, t1 = 0.02, 0.02
    u_prev = p.g(g.xs) + 0.1 * rng.standard_normal(g.N + 1)
    samp = lambda fn, x: float(np.asarray(fn(np.array([x]), t1)).ravel()[0])
    rows = []
    for i in (1, 2):
        x2 = (g.xs[i], g.xs[i + 1])
        rows.append(q_coefficients(
            g.taus[i - 1:i + 2], x2,
            [samp(p.D, x) for x in x2], [samp(p.V, x) for x in x2],
            [samp(p.A, x) for x in x2], rho,
            [samp(p.f, x) for x in x2], u_prev[i:i + 2]))
    # boundary values are zero for this problem
    M = np.array([[-rows[0].q_self, rows[0].q_next], [rows[1].q_prev, -rows[1].q_self]])
    b = np.array([rows[0].f_term, rows[1].f_term])
    phi = np.linalg.solve(M, b)
    ref_phi, _ = dense_collocation(p, g, rho, u_prev, t1)
    np.testing.assert_allclose(phi, ref_phi[1:-1], rtol=1e-10)


@pytest.mark.parametrize("preset, kw", [
    ("gaussian", dict(L=2.4, D=0.001, V=1.0)),
    ("manufactured_sine", dict(L=1.0, D=0.01, V=-1.0, A=1.0)),
    ("linear_steady", dict(L=1.0, D=0.05, V=2.0, A=0.5)),
])
def test_general_matches_uniform(preset, kw):
    p = build_problem(preset, **kw)
    g = build_dual_grid(kw["L"], 241, 0.4)
    rho = 0.002
    u0 = sample_initial(p, g)
    su = assemble_uniform(p, g, StepParams(rho), u0, rho)
    sg = assemble_general(p, g, StepParams(rho, "general"), u0, rho)
    for a, b in ((su.sub, sg.sub), (su.diag, sg.diag), (su.sup, sg.sup), (su.rhs, sg.rhs)):
        np.testing.assert_allclose(b, a, rtol=1e-10, atol=1e-10 * np.max(np.abs(a)))
    pu = thomas_solve(su)
    pg = thomas_solve(sg)
    assert np.max(np.abs(pu - pg)) <= 1e-10 * np.max(np.abs(pu))


def test_general_residual_decreases_for_variable_coefficients():
    p = variable_problem()
    res = []
    for N in (21, 41, 81, 161):
        g = build_dual_grid(1.0, N, 0.5)
        u = p.exact(g.xs, 0.0)
        sys_ = assemble_general(p, g, StepParams(0.01, "general"), u, 0.01)
        r = sys_.residual(p.exact(g.taus[1:-1], 0.0)) / np.abs(sys_.diag)
        res.append(np.max(np.abs(r)))
    assert all(b < a for a, b in zip(res, res[1:]))
    assert res[-1] < 1e-3



def test_interleaving_violated_grid_simple():
    xs = [0.0, 0.2, 0.3, 0.7, 1.0]   # x_2 = 0.3 lies left of tau_1 = 0.4
    taus = [0.0, 0.4, 0.6, 1.0]
    with pytest.raises(ValueError, match="interleave"):
        DualGrid.from_nodes(xs, taus)


# --------------------------------------------------------------- reconstruction

def test_reconstruct_constant():
    p = build_problem("constant", c=2.5, A=0.3)
    g = build_dual_grid(1.0, 9, 0.5)
    phi = np.full(g.N, 2.5)
    c = reconstruct_c(phi, p, g, StepParams(0.1), sample_initial(p, g), 0.1)
    np.testing.assert_allclose(c, 2.5, rtol=1e-14)


def test_reconstruct_linear():
    p = build_problem("linear_steady", L=1.0, D=0.05, V=1.0)
    g = build_dual_grid(1.0, 21, 0.5)
    c = reconstruct_c(g.taus.copy(), p, g, StepParams(0.05), g.xs.copy(), 0.05)
    np.testing.assert_allclose(c, g.xs, rtol=1e-9, atol=1e-15)


def test_reconstruct_bad_length():
    p = build_problem("constant")
    g = build_dual_grid(1.0, 9, 0.5)
    with pytest.raises(ValueError):
        reconstruct_c(np.ones(5), p, g, StepParams(0.1), sample_initial(p, g), 0.1)


def test_gaussian_coarse_against_dense():
    p = build_problem("gaussian", L=2.4, D=0.001, V=1.0)
    g = build_dual_grid(2.4, 12, 0.9)
    rho = 0.05
    u0 = sample_initial(p, g)
    params = StepParams(rho, "general", strict=False)
    phi = solve_phi(p, g, params, u0, rho, assemble_general)
    c = reconstruct_c(phi, p, g, params, u0, rho)
    ref_phi, ref_c = dense_collocation(p, g, rho, u0, rho)
    np.testing.assert_allclose(phi, ref_phi, rtol=1e-10, atol=1e-10 * np.max(np.abs(ref_phi)))
    np.testing.assert_allclose(c, ref_c, rtol=1e-10, atol=1e-10 * np.max(np.abs(ref_c)))


@pytest.mark.parametrize("seed", range(6))
@pytest.mark.parametrize("uniform", [True, False])
def test_dense_collocation_oracle(seed, uniform):
    rng = np.random.default_rng(seed)
    N = int(rng.integers(4, 13))
    if uniform:
        g = build_dual_grid(1.0, N, float(rng.uniform(0.1, 0.9)))
        p = build_problem("manufactured_sine", L=1.0, D=0.05, V=float(rng.uniform(-2, 2)) or 1.0,
                          A=float(rng.uniform(-1, 1)))
    else:
        g = DualGrid.from_nodes(*nonuniform_grid_nodes(rng, 1.0, N))
        p = variable_problem()
    rho = float(rng.uniform(0.005, 0.1))
    u_prev = p.g(g.xs) + 0.05 * rng.standard_normal(g.N + 1)
    params = StepParams(rho, "general", strict=False)
    phi = solve_phi(p, g, params, u_prev, rho, assemble_general)
    c = reconstruct_c(phi, p, g, params, u_prev, rho)
    ref_phi, ref_c = dense_collocation(p, g, rho, u_prev, rho)
    scale = np.max(np.abs(ref_phi))
    assert np.max(np.abs(phi - ref_phi)) <= 1e-10 * scale
    assert np.max(np.abs(c - ref_c)) <= 1e-10 * max(scale, np.max(np.abs(ref_c)))
