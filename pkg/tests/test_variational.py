"""Gauged-energy minimization: gauge profile, energy/gradient, descent paths."""

import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from scipy.integrate import quad

from liouville.grids import make_grid
from liouville.oracles import conformal_bubble
from liouville.potentials import Constant, PowerGauss, Tabulated
from liouville.shooting import solve_for_beta
from liouville.variational import (
    EnergyUnboundedError, VariationalControls, build_gauge, energy, minimize,
    to_solution, variational_solve,
)
from liouville.verify import check_identities, compare_solutions

GAUSS = PowerGauss(n_pow=0.0, gamma=1.0, alpha_exp=2.0)


def _blend(beta, r):
    # gauge profile: quartic blend inside r<1 matching 2β log r in C¹ at r=1
    return beta * (2.0 * r * r - 0.5 * r ** 4 - 1.5)


def test_gauge_matches_log_branch_in_c1():
    g = make_grid(4.0, 8192)
    gz = build_gauge(1.0, g)
    r = g.nodes
    inner = r < 1.0
    assert np.allclose(gz.psi0[inner], _blend(1.0, r[inner]), atol=1e-14)
    assert np.allclose(gz.psi0[~inner], 2.0 * np.log(r[~inner]), atol=1e-14)
    # value 0 and slope 2β at the seam, from both branches
    assert _blend(1.0, 1.0) == pytest.approx(0.0, abs=1e-15)
    k = np.searchsorted(r, 1.0)
    fd = (gz.psi0[k + 1] - gz.psi0[k - 2]) / (r[k + 1] - r[k - 2])
    assert fd == pytest.approx(2.0, abs=1e-2)
    # slope column r·ψ₀′ is 2β on the log branch
    assert np.allclose(gz.dpsi0[~inner], 2.0, atol=1e-14)


def test_gauge_center_value_at_e():
    g = make_grid(12.0, 4096)
    gz = build_gauge(2.0, g)
    assert np.interp(math.e, g.nodes, gz.psi0) == pytest.approx(4.0, abs=1e-4)


@pytest.mark.parametrize("beta", [1.0, 2.5])
def test_gauge_source_integrates_to_minus_4_pi_beta(beta):
    gz = build_gauge(beta, make_grid(12.0, 4096))
    assert abs(gz.f_total + 4.0 * math.pi * beta) < 1e-8


def test_gauge_source_supported_inside_unit_disk():
    g = make_grid(6.0, 2048)
    gz = build_gauge(1.5, g)
    assert np.all(gz.f[g.nodes >= 1.0] == 0.0)
    # f = −8β(1−r²) at the origin end
    assert gz.f[0] == pytest.approx(-12.0, rel=1e-6)


def test_gauge_rejects_nonpositive_beta():
    g = make_grid(4.0, 256)
    with pytest.raises(ValueError, match="beta > 0"):
        build_gauge(0.0, g)
    with pytest.raises(ValueError, match="beta > 0"):
        build_gauge(-1.0, g)


def test_energy_zero_profile_matches_quadrature():
    # 𝓔[0] = −4πβ log ∫_{D(0,2)} e^{−ψ₀} for V ≡ 1, β = 1
    g = make_grid(2.0, 8192)
    gz = build_gauge(1.0, g)

    def integrand(r):
        psi0 = _blend(1.0, r) if r < 1.0 else 2.0 * math.log(r)
        return 2.0 * math.pi * r * math.exp(-psi0)

    total, _ = quad(integrand, 0.0, 2.0, points=[1.0], limit=200)
    expected = -4.0 * math.pi * math.log(total)
    value, _ = energy(gz, Constant(1.0), np.zeros(g.n_nodes))
    assert value == pytest.approx(expected, rel=1e-5)
    assert math.isfinite(value)


def test_energy_gradient_matches_finite_differences():
    g = make_grid(8.0, 1024)
    gz = build_gauge(1.0, g)
    phi = np.sin(np.linspace(0.0, 3.0, g.n_nodes))
    _, grad = energy(gz, GAUSS, phi)
    rng = np.random.default_rng(7)
    h = 1e-6
    for _ in range(5):
        d = rng.standard_normal(g.n_nodes)
        d /= np.linalg.norm(d)
        ep, _ = energy(gz, GAUSS, phi + h * d)
        em, _ = energy(gz, GAUSS, phi - h * d)
        fd = (ep - em) / (2.0 * h)
        assert fd == pytest.approx(float(grad @ d), rel=1e-5)


def test_energy_translation_invariance():
    # with the boundary row relaxed, 𝓔[φ+c] = 𝓔[φ] thanks to Σν = −4πβ
    g = make_grid(8.0, 2048)
    gz = build_gauge(1.0, g)
    phi = np.cos(np.linspace(0.0, 2.0, g.n_nodes))
    e1, _ = energy(gz, GAUSS, phi)
    e2, _ = energy(gz, GAUSS, phi + 11.25)
    assert abs(e1 - e2) < 1e-9


@settings(max_examples=25, deadline=None)
@given(c=st.floats(min_value=-30.0, max_value=30.0,
                   allow_nan=False, allow_infinity=False))
def test_energy_translation_invariance_property(c):
    g = make_grid(6.0, 512)
    gz = build_gauge(1.5, g)
    phi = np.tanh(np.linspace(-2.0, 2.0, g.n_nodes))
    e1, _ = energy(gz, GAUSS, phi)
    e2, _ = energy(gz, GAUSS, phi + c)
    assert abs(e1 - e2) < 1e-9 * (1.0 + abs(e1))


def test_energy_rejects_profile_outside_admissible_class():
    g = make_grid(4.0, 512)
    gz = build_gauge(1.0, g)
    dead = Tabulated([0.1, 1.0, 4.0], [0.0, 0.0, 0.0])
    with pytest.raises(ValueError, match="outside admissible"):
        energy(gz, dead, np.zeros(g.n_nodes))


def test_energy_rejects_wrong_shape():
    g = make_grid(4.0, 512)
    gz = build_gauge(1.0, g)
    with pytest.raises(ValueError, match="per grid node"):
        energy(gz, GAUSS, np.zeros(17))


def test_minimize_gaussian_converges_and_matches_shooting():
    V = PowerGauss(n_pow=0.0, gamma=0.5, alpha_exp=2.0)
    g = make_grid(12.0, 4096)
    gz = build_gauge(1.0, g)
    res = minimize(gz, V)
    assert res.converged
    assert res.grad_norm < 1e-8
    trace = res.energy_trace
    assert all(b <= a for a, b in zip(trace, trace[1:]))
    sol = to_solution(res, gz, V)
    reference = solve_for_beta(V, 0.0, 1.0, (-3.0, 3.0))
    sup = compare_solutions(sol, reference, mode="sup_diff")["sup_diff"]
    assert sup < 1e-3


def test_minimize_constant_trace_strictly_decreasing():
    g = make_grid(8.0, 4096)
    gz = build_gauge(1.0, g)
    res = minimize(gz, Constant(1.0), init=np.zeros(g.n_nodes))
    assert res.converged
    trace = res.energy_trace
    assert all(b < a for a, b in zip(trace, trace[1:]))


def test_minimize_borderline_coupling_flagged_or_unbounded():
    # β = 2 Gaussian sits exactly on the existence threshold: the run must
    # either detect an unbounded descent or carry a warning flag
    V = PowerGauss(n_pow=0.0, gamma=0.5, alpha_exp=2.0)
    g = make_grid(12.0, 4096)
    gz = build_gauge(2.0, g)
    try:
        res = minimize(gz, V)
    except EnergyUnboundedError as err:
        assert "infimum" in str(err)
    else:
        assert res.flags  # hypotheses-violated and/or non-convergence marker


def test_minimize_r_argument_must_match_grid():
    g = make_grid(8.0, 512)
    gz = build_gauge(1.0, g)
    with pytest.raises(ValueError, match="r_max"):
        minimize(gz, GAUSS, R=9.0)


def test_minimize_init_shape_checked():
    g = make_grid(8.0, 512)
    gz = build_gauge(1.0, g)
    with pytest.raises(ValueError, match="match the grid"):
        minimize(gz, GAUSS, init=np.zeros(100))


def test_threshold_weight_two_profile_is_a_bubble():
    # weight exponent 2 with β = 4 = n+2: the minimizer reproduces the
    # conformal family member selected by the disk truncation
    g = make_grid(30.0, 4096)
    gz = build_gauge(4.0, g)
    res = minimize(gz, Constant(1.0), n=2.0)
    sol = to_solution(res, gz, Constant(1.0))
    # fit λ* by matching the center value: ψ(0) = log(2/π) + 4 log λ
    lam = math.exp((float(sol.psi[0]) - math.log(2.0 / math.pi)) / 4.0)
    oracle = conformal_bubble(2, lam, g)
    assert float(np.max(np.abs(sol.psi - oracle.psi))) < 5e-3


def test_to_solution_columns_are_exact_at_the_boundary():
    V = PowerGauss(n_pow=0.0, gamma=0.5, alpha_exp=2.0)
    g = make_grid(12.0, 4096)
    gz = build_gauge(1.0, g)
    res = minimize(gz, V)
    sol = to_solution(res, gz, V)
    assert float(sol.mass[-1]) == pytest.approx(1.0, abs=1e-4)
    # flux at the rim: r ψ′(R⁻) = −2β M(R)
    assert float(sol.dpsi[-1]) == pytest.approx(-2.0 * sol.beta, abs=1e-3)
    assert np.all(np.diff(sol.mass) >= 0.0)


def test_to_solution_survives_identity_checks():
    V = PowerGauss(n_pow=0.0, gamma=0.5, alpha_exp=2.0)
    g = make_grid(12.0, 4096)
    gz = build_gauge(1.0, g)
    sol = to_solution(minimize(gz, V), gz, V)
    rep = check_identities(sol)
    assert rep.mass_residual < 1e-4
    assert rep.flux_residual < 1e-3
    assert rep.pokhozhaev_residual < 1e-3
    assert rep.log_lip_ok and rep.grad_bound_ok


def test_coercivity_witness_holds_for_converged_run():
    V = PowerGauss(n_pow=0.0, gamma=0.5, alpha_exp=2.0)
    g = make_grid(12.0, 4096)
    gz = build_gauge(1.0, g)
    res = minimize(gz, V)
    assert res.converged
    cert = res.certificate
    # structural ε = δ/(2(β+δ)) with δ = gap/2 = 1/2
    assert cert["delta"] == pytest.approx(0.5)
    assert cert["epsilon"] == pytest.approx(1.0 / 6.0)
    assert math.isfinite(cert["log_integral_origin"])
    assert math.isfinite(cert["log_integral_infinity"])
    bound = 0.5 * cert["epsilon"] * res.dirichlet + cert["certificate_constant"]
    assert res.energy >= bound


def test_variational_solve_auto_disk():
    V = PowerGauss(n_pow=0.0, gamma=0.5, alpha_exp=2.0)
    sol, res = variational_solve(V, 0.0, 1.0)
    assert res.converged
    assert sol.meta["r_refined"]
    assert sol.r_max <= 96.0
    reference = solve_for_beta(V, 0.0, 1.0, (-3.0, 3.0))
    assert float(sol.psi[0]) == pytest.approx(float(reference.psi[0]), abs=1e-3)
