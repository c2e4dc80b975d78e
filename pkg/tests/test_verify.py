import numpy as np
import pytest

from mixlap import assembly, barrier, fields, verify
from mixlap.assembly import build_mesh, build_system
from mixlap.errors import DomainError
from mixlap.kernel import OperatorParams, mixed_apply
from mixlap.solve import solve_dirichlet
from mixlap.verify import (check_boundary_lipschitz, check_linf_bound,
                           check_strong_mp_contact, check_weak_mp,
                           counterexample_boundary_only, counterexample_ces,
                           counterexample_general, residual_check, run_suite,
                           sobolev_index)


@pytest.fixture(scope="module")
def sys_05_255():
    return build_system(build_mesh(-1.0, 1.0, 255), OperatorParams(1, 0.5))


# ---------------------------------------------------------------------------
# weak principle
# ---------------------------------------------------------------------------


def test_weak_mp_constant_load(sys_05_255):
    rep = solve_dirichlet(sys_05_255, fields.constant(1.0))
    r = check_weak_mp(rep)
    assert r.passed
    assert r.measured >= r.threshold


def test_weak_mp_zero_load(sys_05_255):
    rep = solve_dirichlet(sys_05_255, fields.zero())
    r = check_weak_mp(rep)
    assert r.passed and r.measured == 0.0


def test_weak_mp_random_nonnegative_loads(sys_05_255):
    rng = np.random.default_rng(42)
    mesh = sys_05_255.mesh
    for _ in range(20):
        f = assembly.grid_interpolant(mesh, np.abs(rng.standard_normal(mesh.n)))
        assert check_weak_mp(solve_dirichlet(sys_05_255, f)).passed


def test_weak_mp_rejects_negative_exterior(sys_05_255):
    rep = solve_dirichlet(sys_05_255, fields.zero())
    with pytest.raises(DomainError):
        check_weak_mp(rep, exterior_min=-1.0)


# ---------------------------------------------------------------------------
# strong principle (guarded)
# ---------------------------------------------------------------------------


def test_strong_mp_zero_function(quad):
    p = OperatorParams(1, 0.5)
    r = check_strong_mp_contact(fields.zero(), p, quad, x0=0.3)
    assert r.passed


def test_strong_mp_barrier_is_inconclusive(quad):
    # gamma vanishes on the negative axis but its image is negative there,
    # so the supersolution guard must flag the check as not applicable
    p = barrier.build_barrier(0.6, quad)
    gf = barrier.gamma_field(p)
    params = OperatorParams(1, 0.6)
    r = check_strong_mp_contact(gf, params, quad, x0=-1.0, omega=(-2.0, 2.0))
    assert r.passed and "inconclusive" in r.notes


def test_strong_mp_contrapositive_on_positive_solve(sys_05_255, quad):
    rep = solve_dirichlet(sys_05_255, fields.constant(1.0))
    interp = rep.solution.as_field()
    params = OperatorParams(1, 0.5)
    x0 = float(rep.solution.mesh.nodes[0])
    r = check_strong_mp_contact(interp, params, quad, x0)
    assert r.passed
    assert "contrapositive" in r.notes or "inconclusive" in r.notes


# ---------------------------------------------------------------------------
# uniform bound and boundary growth
# ---------------------------------------------------------------------------


def _family(s, f, ns=(63, 127, 255)):
    params = OperatorParams(1, s)
    return [solve_dirichlet(build_system(build_mesh(-1.0, 1.0, n), params), f)
            for n in ns]


def test_linf_bound_constant_family():
    r = check_linf_bound(_family(0.5, fields.constant(1.0)), p=2.0)
    assert r.passed


def test_linf_bound_scaling_invariance():
    fam1 = _family(0.5, fields.constant(1.0), ns=(63, 127))
    fam10 = _family(0.5, fields.constant(10.0), ns=(63, 127))
    r1 = check_linf_bound(fam1)
    r10 = check_linf_bound(fam10)
    assert r1.measured == pytest.approx(r10.measured, abs=1e-9)


def test_linf_bound_zero_load_skipped():
    fam = _family(0.5, fields.zero(), ns=(63, 127))
    r = check_linf_bound(fam)
    assert r.passed and "inconclusive" in r.notes


def test_boundary_lipschitz_family():
    fam = _family(0.75, fields.constant(1.0), ns=(63, 127, 255))
    r = check_boundary_lipschitz(fam, band=0.1)
    assert r.passed
    assert "exponent" in r.notes


def test_boundary_lipschitz_zero_solution():
    fam = _family(0.5, fields.zero(), ns=(63,))
    r = check_boundary_lipschitz(fam, band=0.1)
    assert r.passed and r.measured == 0.0


def test_boundary_lipschitz_band_guard():
    fam = _family(0.5, fields.constant(1.0), ns=(63,))
    with pytest.raises(DomainError):
        check_boundary_lipschitz(fam, band=1.0)


# ---------------------------------------------------------------------------
# counterexamples
# ---------------------------------------------------------------------------


def test_ces_counterexample(quad):
    r = counterexample_ces(0.25, quad)
    assert r.passed
    assert "eps0=" in r.notes
    assert "weak principle passed" in r.notes


def test_ces_function_center_value():
    f = fields.parabola_cap()
    assert f(0.0) == -1.0
    eps = 0.25
    assert fields.scaled(f, eps)(0.0) == -1.0


def test_ces_rejects_large_order(quad):
    with pytest.raises(DomainError):
        counterexample_ces(0.6, quad)


def test_general_counterexample_1d(quad):
    r = counterexample_general(0.75, 1, quad)
    assert r.passed


def test_general_counterexample_center_value():
    u = verify._radial_counterexample_profile(1)
    assert float(u(0.0)) == -1.0


def test_general_counterexample_2d(quad):
    r = counterexample_general(0.5, 2, quad)
    assert r.passed


def test_boundary_only_counterexample(quad):
    r = counterexample_boundary_only(2.0, 0.5, 255, quad)
    assert r.passed
    assert r.measured < -1e-6  # the interior minimum is genuinely negative
    assert "v(+-1)=" in r.notes


def test_boundary_only_value_on_annulus(quad):
    # where the ring well vanishes, v equals the reflected minimum exactly
    phi = verify._ring_well(2.0)
    ys = np.linspace(1.1, 2.0, 7)
    assert np.all(phi.evaluate(ys) == 0.0)


def test_boundary_only_rejects_bad_radius(quad):
    with pytest.raises(DomainError):
        counterexample_boundary_only(0.5, 0.5, 63, quad)


# ---------------------------------------------------------------------------
# pointwise residual
# ---------------------------------------------------------------------------


def _manufactured_field(params, quad):
    u_man = fields.mollifier_bump(0.0, 0.7, 1.0)
    cache = {}

    def f_eval(x):
        arr = np.asarray(x, dtype=float)
        out = np.empty(arr.size)
        for i, t in enumerate(arr.ravel()):
            t = float(t)
            if t not in cache:
                cache[t] = mixed_apply(u_man, t, params, quad)
            out[i] = cache[t]
        return out.reshape(arr.shape)

    return fields.ScalarField(evaluate=f_eval, name="manufactured image")


def test_residual_decay_manufactured(quad):
    params = OperatorParams(1, 0.6)
    f = _manufactured_field(params, quad)
    reps = [solve_dirichlet(build_system(build_mesh(-1.0, 1.0, n), params), f)
            for n in (63, 127, 255)]
    r = residual_check(reps, f, params, quad)
    assert r.passed


def test_residual_zero_load(quad):
    params = OperatorParams(1, 0.5)
    f = fields.zero()
    reps = [solve_dirichlet(build_system(build_mesh(-1.0, 1.0, n), params), f)
            for n in (31, 63, 127)]
    r = residual_check(reps, f, params, quad)
    assert r.passed
    assert r.measured <= 1e-12


def test_residual_decay_constant_load(quad):
    # unit load, measured on the middle half of the interval only
    params = OperatorParams(1, 0.5)
    f = fields.constant(1.0)
    reps = [solve_dirichlet(build_system(build_mesh(-1.0, 1.0, n), params), f)
            for n in (63, 127, 255)]
    r = residual_check(reps, f, params, quad, halfwidth=0.5)
    assert r.passed


def test_residual_needs_three_meshes(quad):
    params = OperatorParams(1, 0.5)
    f = fields.constant(1.0)
    reps = [solve_dirichlet(build_system(build_mesh(-1.0, 1.0, 31), params), f)]
    with pytest.raises(DomainError):
        residual_check(reps, f, params, quad)


# ---------------------------------------------------------------------------
# embedding index
# ---------------------------------------------------------------------------


def test_sobolev_index_cases():
    assert sobolev_index(4, 2) == 2      # integer gap: one order lost
    assert sobolev_index(2, 3) == 0      # fractional gap: floor
    assert sobolev_index(1, 2) is None   # nonpositive gap: no conclusion
    assert sobolev_index(3, 2) == 1
    assert sobolev_index(5, 3) == 3
    with pytest.raises(DomainError):
        sobolev_index(-1, 2)


# ---------------------------------------------------------------------------
# suite
# ---------------------------------------------------------------------------


def test_suite_runs_and_passes(quad):
    reports = run_suite(0.5, 63, seed=7, quad=quad)
    assert all(r.passed for r in reports)
    names = {r.check_name for r in reports}
    assert "weak_maximum_principle" in names
    assert "counterexample_boundary_only" in names


def test_reports_are_reproducible(quad):
    a = run_suite(0.5, 63, seed=7, quad=quad)
    b = run_suite(0.5, 63, seed=7, quad=quad)
    assert [r.line() for r in a] == [r.line() for r in b]
    assert all(x.inputs_digest == y.inputs_digest for x, y in zip(a, b))
