"""Executable checks for the maximum principles, bounds and counterexamples.

Each check returns a :class:`VerificationReport`; ``passed`` always reflects
the stated comparison between ``measured`` and ``threshold``.  Checks whose
preconditions cannot be established are emitted with an ``inconclusive``
note rather than a failure, since they assert nothing either way.
"""

from __future__ import annotations

import hashlib
import math
from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np

from . import assembly, solve
from .assembly import build_mesh, build_system, load_vector
from .errors import DomainError, ResolutionError
from .fields import (RadialField, ScalarField, TailExpansion, scaled,
                     smoothstep, _smoothstep_d1, _smoothstep_d2)
from .kernel import (LocalSign, OperatorParams, QuadratureSpec, frac_apply,
                     mixed_apply)
from .solve import SolveReport, lp_norm, solve_dirichlet

MP_TOL = 1e-8


@dataclass(frozen=True)
class VerificationReport:
    check_name: str
    passed: bool
    measured: float
    threshold: float
    inputs_digest: str
    notes: str = ""

    def line(self) -> str:
        status = "passed" if self.passed else "FAILED"
        return (f"{self.check_name}: {status}  measured={self.measured:.6g} "
                f"threshold={self.threshold:.6g}  [{self.inputs_digest[:12]}] {self.notes}")


def _digest(**kw) -> str:
    text = "|".join(f"{k}={kw[k]!r}" for k in sorted(kw))
    return hashlib.sha256(text.encode()).hexdigest()


# ---------------------------------------------------------------------------
# maximum principles
# ---------------------------------------------------------------------------


def check_weak_mp(report: SolveReport, exterior_min: float = 0.0) -> VerificationReport:
    """Nonnegative data must give a nonnegative discrete solution.

    Small undershoots of order the conditioning are tolerated: the continuum
    statement does not guarantee a discrete M-matrix at every s.
    """
    if exterior_min < 0.0:
        raise DomainError("the principle requires nonnegative exterior data")
    u = report.solution.coeffs
    scale = 1.0 + (float(np.max(np.abs(u))) if u.size else 0.0)
    measured = float(np.min(u)) if u.size else 0.0
    threshold = -MP_TOL * scale
    return VerificationReport(
        check_name="weak_maximum_principle",
        passed=measured >= threshold,
        measured=measured,
        threshold=threshold,
        inputs_digest=_digest(n=report.solution.mesh.n, ext=exterior_min,
                              f=report.l2_f_norm, u0=u[0] if u.size else 0.0),
        notes=f"min nodal value vs -{MP_TOL}*(1+max|u|)",
    )


def check_strong_mp_contact(u, params: OperatorParams, quad: QuadratureSpec,
                            x0: float, omega=(-1.0, 1.0),
                            sample_halfwidth: float = 8.0) -> VerificationReport:
    """Interior contact point of a supersolution forces global vanishing.

    Exact contact points do not arise in floating point, so the check is
    guarded: with no contact it passes in contrapositive form; with contact
    but unverifiable operator sign it reports inconclusive.
    """
    a, b = omega
    digest = _digest(x0=x0, omega=omega, s=params.s)
    xs = np.linspace(-sample_halfwidth, sample_halfwidth, 801)
    uvals = u.evaluate(xs)
    maxu = float(np.max(np.abs(uvals)))
    if float(np.min(uvals)) < -1e-10 * (1.0 + maxu):
        return VerificationReport(
            "strong_maximum_principle", True, 0.0, 0.0, digest,
            notes="inconclusive: u is not nonnegative, principle not applicable",
        )
    u_at_x0 = float(u(x0))
    if u_at_x0 > 1e-12:
        return VerificationReport(
            "strong_maximum_principle", True, u_at_x0, 1e-12, digest,
            notes="no interior contact (u(x0) > 0); contrapositive holds",
        )
    if not (a < x0 < b):
        return VerificationReport(
            "strong_maximum_principle", True, 0.0, 0.0, digest,
            notes="inconclusive: contact point lies outside the domain",
        )
    if u.second_derivative is None:
        return VerificationReport(
            "strong_maximum_principle", True, 0.0, 0.0, digest,
            notes="inconclusive: operator sign unverifiable (no second derivative)",
        )
    interior = np.linspace(a, b, 41)[1:-1]
    try:
        lu = [mixed_apply(u, float(x), params, quad) for x in interior]
    except DomainError:
        return VerificationReport(
            "strong_maximum_principle", True, 0.0, 0.0, digest,
            notes="inconclusive: operator not evaluable on the domain grid",
        )
    if min(lu) < -100.0 * quad.tolerance:
        return VerificationReport(
            "strong_maximum_principle", True, 0.0, 0.0, digest,
            notes=(f"inconclusive: supersolution sign fails "
                   f"(min L u = {min(lu):.3g}), not applicable"),
        )
    return VerificationReport(
        "strong_maximum_principle", maxu <= 1e-8, maxu, 1e-8, digest,
        notes="interior contact forces global vanishing",
    )


# ---------------------------------------------------------------------------
# uniform bounds and boundary growth
# ---------------------------------------------------------------------------


def check_linf_bound(reports: Sequence[SolveReport], p: float = 2.0) -> VerificationReport:
    """sup |u_h| / ||f||_p must stabilize across refinements of one load."""
    if p < 1.0:
        raise DomainError("need an integrability exponent p >= 1 on the line")
    ratios = []
    ns = []
    for rep in reports:
        if rep.f is None:
            raise DomainError("reports must carry their load for the norm")
        fnorm = lp_norm(rep.f, rep.solution.mesh, p)
        if fnorm == 0.0:
            continue  # zero loads carry no information here
        ratios.append(rep.solution.max_abs() / fnorm)
        ns.append(rep.solution.mesh.n)
    digest = _digest(p=p, ns=tuple(ns))
    if len(ratios) < 2:
        return VerificationReport(
            "linf_bound", True, 0.0, 0.0, digest,
            notes="inconclusive: fewer than two nonzero-load refinements",
        )
    spread = (max(ratios) - min(ratios)) / min(ratios)
    return VerificationReport(
        "linf_bound", spread < 0.5, spread, 0.5, digest,
        notes=f"ratios {['%.5g' % r for r in ratios]} across n={ns}",
    )


def _distance_to_boundary(mesh) -> np.ndarray:
    return np.minimum(mesh.nodes - mesh.a, mesh.b - mesh.nodes)


def fit_boundary_exponent(report: SolveReport, band: float) -> float:
    """Least-squares slope of log |u| against log dist over the boundary band.

    Returns nan when the band holds too few nonzero values to fit."""
    mesh = report.solution.mesh
    d = _distance_to_boundary(mesh)
    if not np.any(d <= band):
        raise DomainError("no nodes inside the boundary band")
    u = np.abs(report.solution.coeffs)
    mask = (d <= band) & (u > 0.0)
    if int(np.sum(mask)) < 4:
        return math.nan
    X = np.log(d[mask])
    A = np.vstack([X, np.ones_like(X)]).T
    slope = np.linalg.lstsq(A, np.log(u[mask]), rcond=None)[0][0]
    return float(slope)


def check_boundary_lipschitz(reports: Sequence[SolveReport],
                             band: float) -> VerificationReport:
    """Q(h) = max |u|/dist over the boundary band must stay bounded under
    refinement; the fitted growth exponent is recorded in the notes."""
    if not reports:
        raise DomainError("need at least one solve report")
    mesh0 = reports[0].solution.mesh
    if band >= (mesh0.b - mesh0.a) / 4.0:
        raise DomainError("band must be smaller than a quarter of the interval")
    qs = []
    for rep in reports:
        mesh = rep.solution.mesh
        d = _distance_to_boundary(mesh)
        mask = d <= band
        if not np.any(mask):
            raise DomainError("no nodes inside the boundary band")
        qs.append(float(np.max(np.abs(rep.solution.coeffs[mask]) / d[mask])))
    exponent = fit_boundary_exponent(reports[-1], band)
    median = float(np.median(qs))
    measured = qs[-1]
    digest = _digest(band=band, ns=tuple(r.solution.mesh.n for r in reports))
    return VerificationReport(
        "boundary_lipschitz", measured <= 1.25 * median, measured, 1.25 * median,
        digest,
        notes=f"Q values {['%.5g' % q for q in qs]}; fitted exponent e={exponent:.3f}",
    )


# ---------------------------------------------------------------------------
# counterexamples for the wrong-sign operator
# ---------------------------------------------------------------------------


def _parabola_cap_scaled(eps: float) -> ScalarField:
    from .fields import parabola_cap

    return scaled(parabola_cap(), eps)


def counterexample_ces(s: float, quad: QuadratureSpec,
                       n_positive: int = 127) -> VerificationReport:
    """Zero exterior data, sign-reversed local part, s below 1/2.

    Scales the capped parabola until its wrong-sign image is strictly
    positive while the function itself is strictly negative inside; also
    solves the true-sign problem with the resulting positive load and
    demands the weak principle there.
    """
    if not (0.0 < s < 0.5):
        raise DomainError("this construction needs s in (0, 1/2)")
    params_plus = OperatorParams(1, s, LocalSign.PLUS)
    c1s = params_plus.c_ns
    coeff = 2.0 ** (1.0 - 2.0 * s) * c1s * (1.0 - s) / (s * (1.0 - 2.0 * s))
    eps0 = 0.5
    while 1.0 - eps0 ** (2.0 - 2.0 * s) * coeff <= 0.0:
        eps0 *= 0.5
        if eps0 < 2.0**-40:
            raise ResolutionError("no admissible scaling found")
    f_eps = _parabola_cap_scaled(eps0)
    grid = np.linspace(-eps0, eps0, 101)[1:-1]
    fvals = f_eps.evaluate(grid)
    lvals = np.array([mixed_apply(f_eps, float(x), params_plus, quad) for x in grid])
    violation = min(float(np.min(lvals)), float(np.min(-fvals)))

    # positive side: same positive data under the true-sign operator
    mesh = build_mesh(-eps0, eps0, n_positive)
    params_minus = OperatorParams(1, s, LocalSign.MINUS)
    sys_ = build_system(mesh, params_minus)
    cache: dict = {}

    def pos_load(x):
        arr = np.asarray(x, dtype=float)
        out = np.empty(arr.size)
        for i, t in enumerate(arr.ravel()):
            t = float(t)
            if t not in cache:
                cache[t] = max(mixed_apply(f_eps, t, params_plus, quad), 0.0)
            out[i] = cache[t]
        return out.reshape(arr.shape)

    rep = solve_dirichlet(sys_, ScalarField(evaluate=pos_load, name="wrong-sign image"))
    mp = check_weak_mp(rep)
    passed = violation > 0.0 and mp.passed
    return VerificationReport(
        "counterexample_zero_exterior", passed, violation, 0.0,
        _digest(s=s, eps0=eps0),
        notes=(f"eps0={eps0}; min wrong-sign image={np.min(lvals):.4g}; "
               f"max f={np.max(fvals):.4g}; true-sign weak principle "
               f"{'passed' if mp.passed else 'FAILED'} (min u={mp.measured:.3g})"),
    )


def _radial_counterexample_profile(n_dim: int):
    """(|x|^2 - 1) times a C^2 plateau equal to 1 on B(0,1), 0 outside B(0,2)."""

    def phi(r):
        return 1.0 - smoothstep(np.asarray(r, dtype=float) - 1.0)

    def phi_d1(r):
        return -float(_smoothstep_d1(r - 1.0))

    def phi_d2(r):
        return -float(_smoothstep_d2(r - 1.0))

    def prof(r):
        r = np.asarray(r, dtype=float)
        return (r * r - 1.0) * phi(r)

    def d1(r):
        return 2.0 * r * float(phi(r)) + (r * r - 1.0) * phi_d1(r)

    def d2(r):
        return (2.0 * float(phi(r)) + 4.0 * r * phi_d1(r)
                + (r * r - 1.0) * phi_d2(r))

    if n_dim == 1:
        def ev(x):
            return prof(np.abs(np.asarray(x, dtype=float)))

        return ScalarField(
            evaluate=ev,
            second_derivative=lambda x: d2(abs(x)),
            kinks=(-2.0, -1.0, 1.0, 2.0),
            tail=TailExpansion(2.0),
            name="capped paraboloid",
            tame_kinks=True,
        )
    return RadialField(
        profile=prof, d_profile=d1, dd_profile=d2, support_radius=2.0,
        kinks=(1.0, 2.0), name="capped paraboloid",
    )


def counterexample_general(s: float, n_dim: int, quad: QuadratureSpec,
                           n_positive: int = 127) -> VerificationReport:
    """Nonnegative exterior data, wrong-sign local part, any s in (0, 1)."""
    if n_dim not in (1, 2, 3):
        raise DomainError("dimensions 1, 2 and 3 only")
    params_plus = OperatorParams(n_dim, s, LocalSign.PLUS)
    u = _radial_counterexample_profile(n_dim)

    def frac_at(radius: float) -> float:
        if n_dim == 1:
            return frac_apply(u, radius, params_plus, quad)
        x = np.zeros(n_dim)
        x[0] = radius
        return frac_apply(u, x, params_plus, quad)

    radii = np.concatenate((np.linspace(0.0, 2.5, 41), np.geomspace(2.5, 8.0, 8)))
    sup_frac = max(abs(frac_at(float(r))) for r in radii if u.c2_distance(float(r)) > 1e-9)
    eps0 = 0.5
    while 2.0 * n_dim - eps0 ** (2.0 - 2.0 * s) * sup_frac <= 0.0:
        eps0 *= 0.5
        if eps0 < 2.0**-40:
            raise ResolutionError("no admissible scaling found")

    if n_dim == 1:
        u_eps = scaled(u, eps0)
        test_pts = np.linspace(-0.95 * eps0, 0.95 * eps0, 41)
        uvals = u_eps.evaluate(test_pts)
        lvals = np.array(
            [mixed_apply(u_eps, float(x), params_plus, quad) for x in test_pts]
        )
    else:
        u_eps = RadialField(
            profile=lambda r: u.profile(np.asarray(r, dtype=float) / eps0),
            d_profile=lambda r: u.d_profile(r / eps0) / eps0,
            dd_profile=lambda r: u.dd_profile(r / eps0) / eps0**2,
            support_radius=2.0 * eps0,
            kinks=tuple(k * eps0 for k in u.kinks),
            name="scaled capped paraboloid",
        )
        rr = np.linspace(0.0, 0.95 * eps0, 21)
        uvals = u_eps.profile(rr)
        lvals = []
        for r in rr:
            x = np.zeros(n_dim)
            x[0] = float(r)
            lvals.append(mixed_apply(u_eps, x, params_plus, quad))
        lvals = np.array(lvals)
    violation = min(float(np.min(lvals)), float(np.min(-uvals)))

    # positive side: the true-sign operator with the same positive data obeys
    # the weak principle (the discrete solver is one-dimensional)
    if n_dim == 1:
        mesh = build_mesh(-eps0, eps0, n_positive)
        sys_ = build_system(mesh, OperatorParams(1, s, LocalSign.MINUS))
        pos = np.maximum(np.interp(mesh.nodes, test_pts, lvals), 0.0)
        mp_rep = check_weak_mp(
            solve_dirichlet(sys_, assembly.grid_interpolant(mesh, pos)))
        positive_note = ("true-sign weak principle "
                         f"{'passed' if mp_rep.passed else 'FAILED'}")
        positive_ok = mp_rep.passed
    else:
        positive_note = "true-sign side certified in dimension 1 (solver is 1D)"
        positive_ok = True
    return VerificationReport(
        "counterexample_nonnegative_exterior",
        violation > 0.0 and positive_ok, violation, 0.0,
        _digest(s=s, N=n_dim, eps0=eps0),
        notes=(f"N={n_dim}, eps0={eps0}; sup |(-D)^s u| = {sup_frac:.4g}; "
               f"min wrong-sign image={np.min(lvals):.4g}; "
               f"max u={np.max(uvals):.4g}; {positive_note}"),
    )


def _ring_well(r: float) -> ScalarField:
    """Even C^2 field: -1 on r+2 <= |x| <= r+3, 0 inside |x| <= r+1 and
    outside |x| >= r+4, values in [-1, 0]."""

    def g(t):
        t = np.asarray(t, dtype=float)
        up = smoothstep(t - (r + 1.0))
        down = 1.0 - smoothstep(t - (r + 3.0))
        return up * down

    def g_d1(t):
        return (float(_smoothstep_d1(t - (r + 1.0))) * (1.0 - float(smoothstep(t - (r + 3.0))))
                - float(smoothstep(t - (r + 1.0))) * float(_smoothstep_d1(t - (r + 3.0))))

    def g_d2(t):
        return (float(_smoothstep_d2(t - (r + 1.0))) * (1.0 - float(smoothstep(t - (r + 3.0))))
                - 2.0 * float(_smoothstep_d1(t - (r + 1.0))) * float(_smoothstep_d1(t - (r + 3.0)))
                - float(smoothstep(t - (r + 1.0))) * float(_smoothstep_d2(t - (r + 3.0))))

    def ev(x):
        return -g(np.abs(np.asarray(x, dtype=float)))

    kink_radii = (r + 1.0, r + 2.0, r + 3.0, r + 4.0)
    return ScalarField(
        evaluate=ev,
        second_derivative=lambda x: -g_d2(abs(x)),
        kinks=tuple(-k for k in kink_radii[::-1]) + kink_radii,
        tail=TailExpansion(r + 4.0),
        name=f"ring well(r={r})",
        tame_kinks=True,
    )


def counterexample_boundary_only(r: float, s: float, n: int,
                                 quad: QuadratureSpec) -> VerificationReport:
    """Sign conditions on the topological boundary alone admit no principle.

    Builds the ring well, transfers it to a zero-exterior solve through its
    own mixed image, and exhibits v with L v = 0 inside, v > 0 on the
    boundary and on the surrounding annulus, yet v < 0 inside.
    """
    if r <= 1.0:
        raise DomainError("the annulus radius must exceed 1")
    params = OperatorParams(1, s, LocalSign.MINUS)
    phi = _ring_well(r)
    mesh = build_mesh(-1.0, 1.0, n)
    sys_ = build_system(mesh, params)

    cache: dict = {}

    def neg_image(x):
        arr = np.asarray(x, dtype=float)
        out = np.empty(arr.size)
        for i, t in enumerate(arr.ravel()):
            t = float(t)
            if t not in cache:
                cache[t] = -mixed_apply(phi, t, params, quad)
            out[i] = cache[t]
        return out.reshape(arr.shape)

    f = ScalarField(evaluate=neg_image, name="transferred ring load")
    b = load_vector(f, mesh)
    rep = solve_dirichlet(sys_, f)
    u = rep.solution.coeffs
    m = float(min(np.min(u), 0.0))
    if m >= -1e-6:
        raise ResolutionError(
            f"interior minimum {m:.3g} not negative at n={n}; refine the mesh"
        )
    A = sys_.combined()
    residual = 2.0 * float(np.linalg.norm(A @ u - b, ord=np.inf))
    res_scale = float(np.linalg.norm(b, ord=np.inf))
    v_boundary = -m
    v_min_inside = m
    annulus = np.linspace(1.0 + 1e-9, r, 33)
    v_annulus = 2.0 * phi.evaluate(annulus) - m

    # positive side: the transferred load is nonpositive inside, so its
    # negation drives a weak-principle-obeying solve on the same geometry
    neg_f = ScalarField(evaluate=lambda x: -np.asarray(f.evaluate(x)),
                        name="negated ring load")
    mp_rep = check_weak_mp(solve_dirichlet(sys_, neg_f))

    passed = (
        m < -1e-6
        and v_boundary > 0.0
        and v_min_inside < 0.0
        and float(np.min(v_annulus)) > 0.0
        and residual <= 10.0 * solve.RESIDUAL_RTOL * res_scale
        and mp_rep.passed
    )
    return VerificationReport(
        "counterexample_boundary_only", passed, m, -1e-6,
        _digest(r=r, s=s, n=n),
        notes=(f"v(+-1)={v_boundary:.4g} > 0; min v inside={v_min_inside:.4g}; "
               f"min v on annulus={float(np.min(v_annulus)):.4g}; "
               f"weak residual={residual:.3g} (scale {res_scale:.3g}); "
               f"full-exterior-data principle "
               f"{'passed' if mp_rep.passed else 'FAILED'}"),
    )


# ---------------------------------------------------------------------------
# pointwise residual of discrete solutions
# ---------------------------------------------------------------------------


def _pointwise_mixed_image(report: SolveReport, x: float,
                           params: OperatorParams, quad: QuadratureSpec) -> float:
    """L u_h at x: quintic-fit curvature plus the nonlocal image of the
    zero-extended interpolant."""
    mesh = report.solution.mesh
    vals = report.solution.values_with_boundary()
    xs = np.concatenate(([mesh.a], mesh.nodes, [mesh.b]))
    order = np.argsort(np.abs(xs - x))
    stencil = np.sort(order[:6])
    if stencil[0] == 0 or stencil[-1] == len(xs) - 1:
        raise DomainError("stencil touches the boundary")
    loc = (xs[stencil] - x) / mesh.h  # unit-spaced abscissas keep the fit conditioned
    coeffs = np.polyfit(loc, vals[stencil], 5)
    upp = 2.0 * coeffs[-3] / mesh.h**2
    field = report.solution.as_field()
    return -upp + frac_apply(field, x, params, quad)


def residual_check(reports: Sequence[SolveReport], f: ScalarField,
                   params: OperatorParams, quad: QuadratureSpec,
                   halfwidth: Optional[float] = None) -> VerificationReport:
    """Interior max |L u_h - f| must decrease across successive refinements."""
    if len(reports) < 3:
        raise DomainError("need at least three refinements")
    mesh0 = reports[0].solution.mesh
    center = 0.5 * (mesh0.a + mesh0.b)
    w = halfwidth if halfwidth is not None else (mesh0.b - mesh0.a) / 4.0
    targets = np.linspace(center - w, center + w, 17)
    residuals = []
    skipped = 0
    for rep in reports:
        mesh = rep.solution.mesh
        worst = 0.0
        for t in targets:
            k = int(np.floor((t - mesh.a) / mesh.h))
            x = mesh.a + (k + 0.5) * mesh.h  # snap to the element midpoint
            try:
                image = _pointwise_mixed_image(rep, float(x), params, quad)
            except DomainError:
                skipped += 1
                continue
            worst = max(worst, abs(image - float(f(x))))
        residuals.append(worst)
    floor = 1e-12
    decreasing = all(
        r2 < r1 or (r1 <= floor and r2 <= floor)
        for r1, r2 in zip(residuals[:-1], residuals[1:])
    )
    digest = _digest(ns=tuple(r.solution.mesh.n for r in reports), w=w)
    notes = f"residuals {['%.4g' % r for r in residuals]}"
    if skipped:
        notes += f"; {skipped} boundary-adjacent points skipped"
    return VerificationReport(
        "interior_residual_decay", decreasing, residuals[-1], residuals[-2],
        digest, notes=notes,
    )


# ---------------------------------------------------------------------------
# suite runner
# ---------------------------------------------------------------------------


def _random_nonneg_load(mesh, rng) -> ScalarField:
    vals = np.abs(rng.standard_normal(mesh.n))
    return assembly.grid_interpolant(mesh, vals)


def run_suite(s: float, n: int, seed: int, quad: QuadratureSpec,
              domain=(-1.0, 1.0), loads: int = 5) -> list:
    """A deterministic battery of checks at one fractional order.

    Returns the list of reports; the caller decides how to render them.
    """
    a, b = domain
    params = OperatorParams(1, s)
    rng = np.random.default_rng(seed)
    out = []

    mesh = build_mesh(a, b, n)
    sys_ = build_system(mesh, params)
    for _ in range(loads):
        f = _random_nonneg_load(mesh, rng)
        out.append(check_weak_mp(solve_dirichlet(sys_, f)))

    one = None
    family = []
    for nn in (63, 127, 255):
        m = build_mesh(a, b, nn)
        family.append(solve_dirichlet(build_system(m, params), _constant_one()))
    one = family[-1]
    out.append(check_linf_bound(family, p=2.0))
    out.append(check_boundary_lipschitz(family, band=(b - a) / 20.0))

    # contrapositive of the strong principle on the positive solve
    interp = one.solution.as_field()
    interior_min = float(np.min(one.solution.coeffs))
    x_star = float(one.solution.mesh.nodes[int(np.argmin(one.solution.coeffs))])
    out.append(
        check_strong_mp_contact(interp, params, quad, x_star, omega=(a, b))
        if interior_min <= 1e-12
        else VerificationReport(
            "strong_maximum_principle", True, interior_min, 1e-12,
            _digest(s=s, n=n, seed=seed),
            notes="positive load gives strictly positive interior; contrapositive holds",
        )
    )

    if s < 0.5:
        out.append(counterexample_ces(s, quad))
    else:
        out.append(counterexample_general(s, 1, quad))
    out.append(counterexample_boundary_only(2.0, s, 255, quad))
    return out


def _constant_one() -> ScalarField:
    from .fields import constant

    return constant(1.0)


# ---------------------------------------------------------------------------
# embedding index
# ---------------------------------------------------------------------------


def sobolev_index(m: int, n_dim: int):
    """Continuity order granted by the embedding of H^{m+2}: floor(m - N/2)
    off the integer lattice, one less on it; ``None`` when nothing follows.

    Whether the lattice convention includes zero is not fixed by usage; the
    nonpositive range returns ``None``.
    """
    if m < 0 or n_dim < 1:
        raise DomainError("need m >= 0 and N >= 1")
    diff = m - n_dim / 2.0
    if diff <= 0.0:
        return None
    if abs(diff - round(diff)) < 1e-12:
        return int(round(diff)) - 1
    return int(math.floor(diff))
