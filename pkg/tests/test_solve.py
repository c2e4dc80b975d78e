import json

import numpy as np
import pytest

from mixlap import fields
from mixlap.assembly import build_mesh, build_system, load_vector
from mixlap.errors import DomainError
from mixlap.kernel import OperatorParams
from mixlap.solve import (export_report, export_solution_csv,
                          lift_nonhomogeneous, solve_dirichlet)


@pytest.fixture(scope="module")
def sys_05_255():
    return build_system(build_mesh(-1.0, 1.0, 255), OperatorParams(1, 0.5))


def test_zero_load_gives_zero_solution(sys_05_255):
    rep = solve_dirichlet(sys_05_255, fields.zero())
    assert np.all(rep.solution.coeffs == 0.0)
    assert rep.energy == 0.0
    assert rep.ratio_energy == 0.0


def test_constant_load_nonnegative_and_symmetric(sys_05_255):
    rep = solve_dirichlet(sys_05_255, fields.constant(1.0))
    u = rep.solution.coeffs
    assert float(np.min(u)) >= -1e-10
    assert float(np.max(np.abs(u - u[::-1]))) <= 1e-10


def test_nonlocal_part_lowers_the_peak():
    mesh = build_mesh(-1.0, 1.0, 255)
    params = OperatorParams(1, 0.25)
    mixed = solve_dirichlet(build_system(mesh, params), fields.constant(1.0))
    pure = solve_dirichlet(build_system(mesh, params, include_nonlocal=False),
                           fields.constant(1.0))
    assert mixed.solution.coeffs.max() <= pure.solution.coeffs.max() + 1e-12


def test_solves_are_bitwise_deterministic(sys_05_255):
    a = solve_dirichlet(sys_05_255, fields.constant(1.0))
    b = solve_dirichlet(sys_05_255, fields.constant(1.0))
    assert np.array_equal(a.solution.coeffs, b.solution.coeffs)


def test_energy_identity(sys_05_255):
    f = fields.constant(1.0)
    rep = solve_dirichlet(sys_05_255, f)
    b = load_vector(f, rep.solution.mesh)
    assert rep.energy == pytest.approx(float(b @ rep.solution.coeffs), rel=1e-9)


def test_energy_dominates_gradient_norm(sys_05_255):
    rep = solve_dirichlet(sys_05_255, fields.constant(1.0))
    assert rep.energy >= rep.x_norm**2 - 1e-12


def test_solution_linearity(sys_05_255):
    r1 = solve_dirichlet(sys_05_255, fields.constant(1.0))
    r10 = solve_dirichlet(sys_05_255, fields.constant(10.0))
    assert np.allclose(r10.solution.coeffs, 10.0 * r1.solution.coeffs, rtol=1e-12)


def test_ratio_energy_stable_under_refinement():
    params = OperatorParams(1, 0.5)
    ratios = []
    for n in (63, 127, 255, 511):
        rep = solve_dirichlet(build_system(build_mesh(-1.0, 1.0, n), params),
                              fields.constant(1.0))
        ratios.append(rep.ratio_energy)
    assert max(ratios) / min(ratios) < 1.1


# ---------------------------------------------------------------------------
# nonhomogeneous lift
# ---------------------------------------------------------------------------


def test_lift_with_zero_datum_matches_plain_solve(quad):
    sys_ = build_system(build_mesh(-1.0, 1.0, 63), OperatorParams(1, 0.5))
    plain = solve_dirichlet(sys_, fields.constant(1.0))
    lifted = lift_nonhomogeneous(sys_, fields.constant(1.0), fields.zero(), quad)
    assert np.allclose(lifted.solution.coeffs, plain.solution.coeffs, atol=1e-12)


def test_lift_exterior_bump_nonnegative(quad):
    sys_ = build_system(build_mesh(-1.0, 1.0, 63), OperatorParams(1, 0.5))
    g = fields.mollifier_bump(2.0, 0.5, 1.0)  # supported outside the closure
    rep = lift_nonhomogeneous(sys_, fields.zero(), g, quad)
    assert float(np.min(rep.solution.coeffs)) >= -1e-10
    assert rep.exterior is g


def test_lift_far_plateau_is_nearly_constant(quad):
    sys_ = build_system(build_mesh(-1.0, 1.0, 63), OperatorParams(1, 0.5))
    g = fields.plateau(-60.0, -50.0, 50.0, 60.0, depth=1.0)
    rep = lift_nonhomogeneous(sys_, fields.zero(), g, quad)
    assert np.all(np.abs(rep.solution.coeffs - 1.0) < 5e-3)


def test_lift_rejects_datum_without_curvature(quad):
    sys_ = build_system(build_mesh(-1.0, 1.0, 15), OperatorParams(1, 0.5))
    bare = fields.ScalarField(evaluate=lambda x: np.zeros_like(np.asarray(x, float)))
    with pytest.raises(DomainError):
        lift_nonhomogeneous(sys_, fields.zero(), bare, quad)


# ---------------------------------------------------------------------------
# exports
# ---------------------------------------------------------------------------


def test_solution_csv_shape(tmp_path, sys_05_255):
    rep = solve_dirichlet(sys_05_255, fields.constant(1.0))
    path = tmp_path / "solution.csv"
    export_solution_csv(path, rep)
    lines = path.read_text().splitlines()
    assert lines[0] == "x,u"
    assert len(lines) == 1 + 255


def test_report_json_fields(tmp_path, sys_05_255):
    rep = solve_dirichlet(sys_05_255, fields.constant(1.0))
    path = tmp_path / "report.json"
    export_report(path, rep)
    doc = json.loads(path.read_text())
    for key in ("energy", "x_norm", "l2_f_norm", "ratio_energy", "residual_norm"):
        assert key in doc
    assert doc["n"] == 255
