"""Identity re-derivation and solution comparison.

check_identities must recompute everything from the ψ̃ samples — so a
hand-corrupted profile has to light up the report even though its stored
mass/slope columns still satisfy the invariants they were built with.
"""

import json
import math

import numpy as np
import pytest

from liouville.grids import make_grid
from liouville.oracles import conformal_bubble
from liouville.potentials import PowerGauss
from liouville.shooting import solve_for_beta
from liouville.solution import NormalizedSolution
from liouville.verify import check_identities, compare_solutions

GAUSS = PowerGauss(n_pow=0.0, gamma=1.0, alpha_exp=2.0)


@pytest.fixture(scope="module")
def gaussian_sol():
    return solve_for_beta(GAUSS, 0.0, 1.0, (-3.0, 3.0))


def test_report_on_clean_solution(gaussian_sol):
    rep = check_identities(gaussian_sol)
    assert rep.mass_residual < 1e-6
    assert rep.flux_residual < 1e-6 * (1.0 + abs(rep.beta))
    assert rep.slope_at_infinity < 1e-3
    assert rep.pokhozhaev_residual < 1e-4
    assert rep.log_lip_ok and rep.grad_bound_ok
    assert rep.P_min >= -1e-6
    assert rep.beta == pytest.approx(1.0, abs=1e-6)
    assert rep.n == 0.0 and rep.n_nodes == gaussian_sol.grid.n_nodes


def test_corrupted_profile_is_flagged(gaussian_sol):
    bump = 0.5 * np.exp(-(gaussian_sol.r - 3.0) ** 2)
    bad = NormalizedSolution(
        beta=gaussian_sol.beta, n=gaussian_sol.n,
        psi=gaussian_sol.psi + bump, dpsi=gaussian_sol.dpsi,
        mass=gaussian_sol.mass, grid=gaussian_sol.grid,
        potential=gaussian_sol.potential)
    rep = check_identities(bad)
    assert rep.flux_residual > 1e-2
    assert not rep.log_lip_ok
    assert rep.mass_residual > 1e-3


def test_potential_required():
    grid = make_grid(20.0, 128)
    sol = NormalizedSolution(beta=1.0, n=0.0, psi=np.zeros(128),
                             dpsi=np.zeros(128), mass=np.zeros(128),
                             grid=grid)
    with pytest.raises(ValueError, match="no potential"):
        check_identities(sol)


def test_minimum_resolution_enforced():
    grid = make_grid(20.0, 32)
    sol = NormalizedSolution(beta=1.0, n=0.0, psi=np.zeros(32),
                             dpsi=np.zeros(32), mass=np.zeros(32),
                             grid=grid, potential=GAUSS)
    with pytest.raises(ValueError, match="at least"):
        check_identities(sol)


def test_report_serialization(gaussian_sol, tmp_path):
    rep = check_identities(gaussian_sol)
    d = rep.to_dict()
    assert set(d) >= {"mass_residual", "flux_residual", "slope_at_infinity",
                      "pokhozhaev_residual", "log_lip_ok", "grad_bound_ok",
                      "P_min"}
    assert all(not isinstance(v, (np.floating, np.integer))
               for v in d.values())
    path = tmp_path / "report.json"
    text = rep.to_json(path)
    assert json.loads(text) == d
    assert json.loads(path.read_text()) == d


# ---------------------------------------------------------------------------
# comparison


def test_sup_diff_across_grids():
    fine = conformal_bubble(1.0, 1.0, make_grid(40.0, 4096, grading="log"))
    coarse = conformal_bubble(1.0, 1.0, make_grid(25.0, 2048, grading="power"))
    rep = compare_solutions(fine, coarse, "sup_diff")
    assert rep["sup_diff"] < 1e-6          # closed form + interpolation only
    assert rep["r_hi"] == pytest.approx(25.0)


def test_negative_beta_monotonicity():
    lo = solve_for_beta(GAUSS, 0.0, -1.0, (-3.0, 3.0))
    hi = solve_for_beta(GAUSS, 0.0, -0.5, (-3.0, 3.0))
    rep = compare_solutions(lo, hi, "beta_monotone")
    assert rep["violation"] < 1e-6
    assert rep["beta_lo"] == pytest.approx(-1.0, abs=1e-8)
    assert rep["beta_hi"] == pytest.approx(-0.5, abs=1e-8)


def test_compare_rejects_mismatches(gaussian_sol):
    with pytest.raises(TypeError, match="NormalizedSolution"):
        compare_solutions(gaussian_sol, {"psi": None}, "sup_diff")
    other = conformal_bubble(1.0, 1.0, make_grid(40.0, 2048))
    with pytest.raises(ValueError, match="incompatible potentials"):
        compare_solutions(gaussian_sol, other, "sup_diff")
    with pytest.raises(ValueError, match="unknown comparison mode"):
        compare_solutions(gaussian_sol, gaussian_sol, "psi_diff")


def test_compare_rejects_weight_mismatch():
    a = conformal_bubble(1.0, 1.0, make_grid(40.0, 2048))
    b = conformal_bubble(2.0, 1.0, make_grid(40.0, 2048))
    with pytest.raises(ValueError, match="weight exponents"):
        compare_solutions(a, b, "sup_diff")
