"""Construction and certification of the boundary barrier pipeline.

The lower barrier is produced in stages:

1. an exponent ladder ``alpha_j = 1 + 2 j (1 - s)`` whose truncated index
   keeps every power below the fractional order ``2s``;
2. kernel constants ``kappa_j`` (the fractional Laplacian acts on each
   admissible power as ``kappa_j x^(alpha_j - 2s)`` by homogeneity, with
   ``kappa_j < 0`` by convexity);
3. recursion coefficients ``c_j = -kappa_{j-1} c_{j-1} / (alpha_j (alpha_j - 1))``
   that make each monomial's nonlocal output cancel against the Laplacian of
   the next one (telescoping);
4. a capped top power so the sum stays bounded, a logarithmic corrector
   that absorbs the cap's nonlocal residue, and a window size d shrunk until
   the corrector is small relative to the window;
5. a convex parabolic deduction and a scaling M that turn the bounded-below
   inequality into a certified "mixed operator >= 1 near the boundary".

Existential constants are replaced by measured grid extrema with a 25%
safety margin; every built parameter set carries its own certificate of the
grid inequalities it was checked against.
"""

from __future__ import annotations

import dataclasses
import math
from dataclasses import dataclass, field
from typing import Optional, Tuple

import numpy as np

from .errors import AccuracyError, ConstructionError, DomainError
from .fields import RadialField, ScalarField, TailExpansion, smoothstep
from .fields import _smoothstep_d1, _smoothstep_d2, pure_power, truncated_power
from .kernel import (OperatorParams, QuadratureSpec, frac_apply,
                     mixed_apply)

_INTEGER_TOL = 1e-9


@dataclass(frozen=True)
class ExponentLadder:
    """Powers 1 + 2 j (1 - s); all but the last stay below 2s when s > 1/2."""

    s: float
    rho: float
    J: int
    alphas: Tuple[float, ...]
    case: str  # "high_s" or "low_s"


def build_ladder(s: float) -> ExponentLadder:
    if not (0.0 < s < 1.0):
        raise DomainError("s must lie in (0, 1)")
    rho = (2.0 * s - 1.0) / (2.0 * (1.0 - s))
    if s <= 0.5:
        return ExponentLadder(s=s, rho=rho, J=0, alphas=(1.0,), case="low_s")
    near = round(rho)
    if abs(rho - near) < _INTEGER_TOL and near >= 1:
        J = near - 1
    else:
        J = int(math.floor(rho))
    alphas = tuple(1.0 + 2.0 * j * (1.0 - s) for j in range(J + 2))
    ladder = ExponentLadder(s=s, rho=rho, J=J, alphas=alphas, case="high_s")
    for a in alphas[:-1]:
        if a >= 2.0 * s - 1e-12:
            raise AccuracyError("ladder exponent reached 2s prematurely")
    if alphas[-1] < 2.0 * s - 1e-9:
        raise AccuracyError("capped exponent fell below 2s")
    return ladder


def kappa(alpha: float, s: float, quad: QuadratureSpec) -> float:
    """Multiplier in (-Delta)^s x_+^alpha = kappa * x^(alpha - 2s), x > 0.

    Requires 1 <= alpha < 2s so the untruncated power is admissible; the
    value is evaluated at x = 1 and self-checked by homogeneity at x = 1/2
    and x = 2.
    """
    if not (1.0 <= alpha < 2.0 * s):
        raise DomainError("kappa needs 1 <= alpha < 2s")
    params = OperatorParams(1, s)
    u = pure_power(alpha)
    k = frac_apply(u, 1.0, params, quad)
    for x in (0.5, 2.0):
        v = frac_apply(u, x, params, quad)
        pred = k * x ** (alpha - 2.0 * s)
        if abs(v - pred) > 10.0 * quad.tolerance * (1.0 + abs(pred)):
            raise AccuracyError("homogeneity self-check failed",
                                achieved=abs(v - pred))
    if k >= 0.0:
        raise AccuracyError("kernel constant must be negative for convex powers")
    return k


def coefficients(ladder: ExponentLadder, kappas) -> Tuple[float, ...]:
    """c_0 = 1 and c_j = -kappa_{j-1} c_{j-1} / (alpha_j (alpha_j - 1))."""
    if ladder.case != "high_s":
        raise DomainError("the recursion only runs in the high-order case")
    kappas = tuple(float(k) for k in kappas)
    if len(kappas) != ladder.J + 1:
        raise DomainError("need one kernel constant per uncapped ladder rung")
    if any(k >= 0.0 for k in kappas):
        raise DomainError("kernel constants must all be negative")
    cs = [1.0]
    for j in range(1, ladder.J + 2):
        aj = ladder.alphas[j]
        denom = aj * (aj - 1.0)
        assert denom > 0.0, "ladder exponents above the first exceed 1"
        cs.append(-kappas[j - 1] * cs[-1] / denom)
    return tuple(cs)


def w_alpha(x, alpha: float, L: float):
    """x_+^alpha capped at the constant (2L)^alpha from x = 2L on."""
    arr = np.asarray(x, dtype=float)
    cap = (2.0 * L) ** alpha
    out = np.where(arr >= 2.0 * L, cap,
                   np.where(arr > 0.0, np.maximum(arr, 0.0) ** alpha, 0.0))
    return float(out) if np.isscalar(x) or arr.ndim == 0 else out


@dataclass(frozen=True)
class BarrierParams:
    """Certificate-carrying parameter set for the barrier pair (beta, gamma)."""

    ladder: ExponentLadder
    kappas: Tuple[float, ...]
    cs: Tuple[float, ...]
    d: float
    C_sharp: float
    C2: float
    C0: float
    C1: float
    ell: float
    M: float
    R: float
    c_gamma: float
    rho_omega: float
    S_d: float
    certificate: dict = field(default_factory=dict)


# ---------------------------------------------------------------------------
# corrector and barrier evaluators
# ---------------------------------------------------------------------------


def _log_potential(x):
    """x^2 (3 - 2 log x)_+ / 4; second derivative is -log x where active."""
    x = np.asarray(x, dtype=float)
    pos = x > 0.0
    xx = np.where(pos, x, 1.0)
    val = xx * xx * np.maximum(3.0 - 2.0 * np.log(xx), 0.0) / 4.0
    return np.where(pos, val, 0.0)


def _log_potential_d1(x: float) -> float:
    return x * (1.0 - math.log(x)) if 0.0 < x < math.exp(1.5) else 0.0


def _log_potential_d2(x: float) -> float:
    return -math.log(x) if 0.0 < x < math.exp(1.5) else 0.0


class _Corrector:
    """W: equals the explicit potential up to d, decays to 0 at 2d."""

    def __init__(self, d: float, c_sharp: float, mono: Tuple[Tuple[float, float], ...]):
        self.d = d
        self.c_sharp = c_sharp
        self.mono = mono  # (coef, alpha) pairs of (2/C#) sum c_j x^alpha_j

    def w_tilde(self, x):
        x = np.asarray(x, dtype=float)
        out = _log_potential(x)
        xp = np.maximum(x, 0.0)
        for coef, a in self.mono:
            out = out + coef * xp**a
        return out

    def w_tilde_d1(self, x: float) -> float:
        if x <= 0.0:
            return 0.0
        return _log_potential_d1(x) + sum(c * a * x ** (a - 1.0) for c, a in self.mono)

    def w_tilde_d2(self, x: float) -> float:
        if x <= 0.0:
            return 0.0
        return _log_potential_d2(x) + sum(
            c * a * (a - 1.0) * x ** (a - 2.0) for c, a in self.mono
        )

    def __call__(self, x):
        x = np.asarray(x, dtype=float)
        t = (x - self.d) / self.d
        fade = 1.0 - smoothstep(t)
        return np.where(x <= self.d, self.w_tilde(x),
                        np.where(x >= 2.0 * self.d, 0.0, self.w_tilde(x) * fade))

    def d2(self, x: float) -> float:
        if x <= 0.0 or x >= 2.0 * self.d:
            return 0.0
        if x <= self.d:
            return self.w_tilde_d2(x)
        t = (x - self.d) / self.d
        fade = 1.0 - float(smoothstep(t))
        f1 = -float(_smoothstep_d1(t)) / self.d
        f2 = -float(_smoothstep_d2(t)) / self.d**2
        wt = float(self.w_tilde(np.asarray(x)))
        return self.w_tilde_d2(x) * fade + 2.0 * self.w_tilde_d1(x) * f1 + wt * f2


def _barrier_monomials(p: BarrierParams) -> Tuple[Tuple[float, float], ...]:
    """(coef, power) pairs of the uncapped part of the barrier sum."""
    if p.ladder.case == "low_s":
        return ()
    return tuple((p.cs[j], p.ladder.alphas[j]) for j in range(p.ladder.J + 1))


def _corrector_for(p: BarrierParams) -> _Corrector:
    mono = tuple(
        (2.0 * p.cs[j] / p.C_sharp, p.ladder.alphas[j])
        for j in range(1, len(p.cs))
    )
    return _Corrector(p.d, p.C_sharp, mono)


def beta_sharp_field(p: BarrierParams) -> ScalarField:
    """The uncorrected barrier: ladder monomials plus the capped top power."""
    mono = _barrier_monomials(p)
    c_top = p.cs[-1]
    a_top = p.ladder.alphas[-1]
    cap = 2.0**a_top

    def ev(x):
        x = np.asarray(x, dtype=float)
        xp = np.maximum(x, 0.0)
        out = np.zeros_like(xp)
        for coef, a in mono:
            out = out + coef * xp**a
        return out + c_top * np.where(x >= 2.0, cap, xp**a_top)

    def d2(x):
        if x <= 0.0:
            return 0.0
        out = sum(c * a * (a - 1.0) * x ** (a - 2.0) for c, a in mono)
        if x < 2.0:
            out += c_top * a_top * (a_top - 1.0) * x ** (a_top - 2.0)
        return out

    plus = tuple((c, a) for c, a in mono) + ((c_top * cap, 0.0),)
    return ScalarField(
        evaluate=ev, second_derivative=d2, smooth_region=(0.0, 2.0),
        kinks=(0.0, 2.0), tail=TailExpansion(2.0, plus, ()),
        name="beta_sharp",
    )


def beta_field(p: BarrierParams) -> ScalarField:
    """The corrected barrier: beta = beta_sharp - C_sharp * W."""
    sharp = beta_sharp_field(p)
    W = _corrector_for(p)
    cs_ = p.C_sharp

    def ev(x):
        x = np.asarray(x, dtype=float)
        return sharp.evaluate(x) - cs_ * W(x)

    def d2(x):
        return sharp.second_derivative(x) - cs_ * W.d2(x)

    cutoff = max(2.0, 2.0 * p.d)
    mono = _barrier_monomials(p)
    plus = tuple(mono) + ((p.cs[-1] * 2.0 ** p.ladder.alphas[-1], 0.0),)
    return ScalarField(
        evaluate=ev, second_derivative=d2, smooth_region=(0.0, p.d),
        kinks=(0.0, p.d, 2.0 * p.d, 2.0), tail=TailExpansion(cutoff, plus, ()),
        name="beta",
    )


def beta(x, p: BarrierParams, quad: Optional[QuadratureSpec] = None):
    """Barrier value; vanishes for x <= 0, linear-ish on (0, d), bounded below
    by a positive constant past d."""
    return beta_field(p)(x)


def _beta_star(x, p: BarrierParams):
    """The convex parabolic deduction: 0, C2 x^2, its tangent line, a constant."""
    x = np.asarray(x, dtype=float)
    c2, ell, d = p.C2, p.ell, p.d
    out = np.where(
        x <= 0.0, 0.0,
        np.where(
            x < ell, c2 * x * x,
            np.where(x <= d, 2.0 * c2 * ell * x - c2 * ell**2,
                     c2 * ell * (2.0 * d - ell)),
        ),
    )
    return out


def gamma_field(p: BarrierParams) -> ScalarField:
    bf = beta_field(p)
    M = p.M

    def ev(x):
        x = np.asarray(x, dtype=float)
        return M * (bf.evaluate(x) - _beta_star(x, p))

    def d2(x):
        base = bf.second_derivative(x)
        if 0.0 < x < p.ell:
            base -= 2.0 * p.C2
        return M * base

    cutoff = max(2.0, 2.0 * p.d)
    mono = _barrier_monomials(p)
    const = p.cs[-1] * 2.0 ** p.ladder.alphas[-1] - p.C2 * p.ell * (2.0 * p.d - p.ell)
    plus = tuple((M * c, a) for c, a in mono) + ((M * const, 0.0),)
    return ScalarField(
        evaluate=ev, second_derivative=d2, smooth_region=(0.0, p.ell),
        kinks=(0.0, p.ell, p.d, 2.0 * p.d, 2.0),
        tail=TailExpansion(cutoff, plus, ()),
        name="gamma",
    )


def gamma(x, p: BarrierParams):
    """Scaled barrier: zero for x <= 0, comparable to x on (0, ell), >= 1 past ell."""
    return gamma_field(p)(x)


# ---------------------------------------------------------------------------
# the builder
# ---------------------------------------------------------------------------


class _AttemptFailed(Exception):
    pass


def _geometric_grid(lo: float, hi: float, count: int) -> np.ndarray:
    return np.geomspace(lo, hi, count)


def build_barrier(s: float, quad: QuadratureSpec,
                  rho_omega: float = 1.0) -> BarrierParams:
    """Assemble and certify the full barrier parameter set for the order s.

    The window d is halved (at most 12 times) until all shrink conditions
    hold simultaneously; measured constants carry a 25% margin and are
    re-certified on finer grids before the parameters are returned.
    """
    ladder = build_ladder(s)
    params_op = OperatorParams(1, s)
    if ladder.case == "high_s":
        kappas = tuple(kappa(a, s, quad) for a in ladder.alphas[: ladder.J + 1])
        cs = coefficients(ladder, kappas)
    else:
        kappas = ()
        cs = (1.0,)
    a_top = ladder.alphas[-1]
    c_top = cs[-1]
    w_top = truncated_power(a_top, 1.0)

    trace = []
    d = 0.5
    for _attempt in range(13):
        try:
            p = _attempt_build(
                s, quad, params_op, ladder, kappas, cs, w_top, c_top, d, rho_omega
            )
            return p
        except _AttemptFailed as exc:
            trace.append(f"d={d:.6g}: {exc}")
            d *= 0.5
    raise ConstructionError(
        "barrier construction failed after 12 window halvings", trace=trace
    )


def _attempt_build(s, quad, params_op, ladder, kappas, cs, w_top, c_top, d,
                   rho_omega) -> BarrierParams:
    tol = quad.tolerance

    # C_sharp: log-normalized bound of the capped power's nonlocal output
    grid = _geometric_grid(d * 1e-6, d * 0.999, 64)
    top_vals = np.array([frac_apply(w_top, float(x), params_op, quad) for x in grid])
    ratios = np.abs(c_top * top_vals) / (1.0 + np.abs(np.log(grid)))
    c_sharp = 1.25 * float(np.max(ratios))

    # provisional parameter shell so the field builders can be reused
    shell = BarrierParams(
        ladder=ladder, kappas=kappas, cs=cs, d=d, C_sharp=c_sharp,
        C2=1.0, C0=d / 2.0, C1=1.0, ell=d / 4.0, M=1.0, R=8.0 * rho_omega,
        c_gamma=0.5, rho_omega=rho_omega, S_d=0.0,
    )
    corr = _corrector_for(shell)

    # the explicit potential is increasing on (0, d] for d < 1, so its
    # maximum over (-inf, d] sits at d
    if d >= 1.0:
        raise _AttemptFailed("window must sit below 1")
    s_d = float(corr.w_tilde(np.asarray(d)))
    if corr.w_tilde_d1(d) <= 0.0:
        raise _AttemptFailed("corrector potential not increasing at the window edge")
    if s_d > d / (4.0 * c_sharp):
        raise _AttemptFailed(
            f"corrector size S(d)={s_d:.3g} exceeds d/(4 C#)={d / (4 * c_sharp):.3g}"
        )
    blend_grid = np.linspace(d, 2.0 * d, 257)
    w_on_blend = corr(blend_grid)
    if float(np.max(w_on_blend)) > 2.0 * s_d * (1.0 + 1e-12):
        raise _AttemptFailed("corrector blend exceeds its allowed range")
    if float(np.min(w_on_blend)) < -1e-15:
        raise _AttemptFailed("corrector blend went negative")

    shell = BarrierParams(
        ladder=ladder, kappas=kappas, cs=cs, d=d, C_sharp=c_sharp,
        C2=1.0, C0=d / 2.0, C1=1.0, ell=d / 4.0, M=1.0, R=8.0 * rho_omega,
        c_gamma=0.5, rho_omega=rho_omega, S_d=s_d,
    )
    bf = beta_field(shell)

    # sandwich constant C1 on (0, d)
    bgrid = _geometric_grid(d * 1e-6, d * 0.999, 128)
    bvals = bf.evaluate(bgrid)
    if float(np.min(bvals)) <= 0.0:
        raise _AttemptFailed("corrected barrier lost positivity inside the window")
    c1 = 1.25 * float(max(np.max(bvals / bgrid), np.max(bgrid / bvals)))
    c1 = max(c1, 1.0)

    # C0: floor past the window
    far_grid = np.concatenate((np.linspace(d, 4.0, 64), np.geomspace(4.0, 64.0, 16)))
    c0 = d / 2.0
    if float(np.min(bf.evaluate(far_grid))) < c0:
        raise _AttemptFailed("barrier dips below d/2 past the window")

    # C2: measured lower bound of the mixed operator on the window
    lgrid = _geometric_grid(d * 1e-6, d * 0.999, 400)
    lbeta = np.array([mixed_apply(bf, float(x), params_op, quad) for x in lgrid])
    c2 = max(1.25 * float(np.max(np.maximum(-lbeta, 0.0))), 0.05)

    ell = min(d / 4.0, 0.999 / (2.0 * c1 * c2))
    if d > 1.0 / (4.0 * c1 * c2):
        raise _AttemptFailed(
            f"window {d:.3g} exceeds 1/(4 C1 C2) = {1.0 / (4 * c1 * c2):.3g}"
        )
    convex_bound = 2.0 * params_op.c_ns * ell * (2.0 * d - ell) / (
        s * (d - ell) ** (2.0 * s)
    )
    if convex_bound > 0.5:
        raise _AttemptFailed("convex-deduction tail bound exceeds 1/2")

    M = max(2.0 / c2, 2.0 * c1 / ell)
    c_gamma = min(M / (2.0 * c1), 1.0 / (M * c1))
    assert 0.0 < c_gamma < 1.0

    p = BarrierParams(
        ladder=ladder, kappas=kappas, cs=cs, d=d, C_sharp=c_sharp, C2=c2,
        C0=c0, C1=c1, ell=ell, M=M, R=8.0 * rho_omega, c_gamma=c_gamma,
        rho_omega=rho_omega, S_d=s_d,
    )

    # certification grids
    gf = gamma_field(p)
    ggrid = _geometric_grid(ell * 1e-3, ell * 0.99, 200)
    lgamma = np.array([mixed_apply(gf, float(x), params_op, quad) for x in ggrid])
    lgamma_min = float(np.min(lgamma))
    if lgamma_min < 1.0 - 1e-6:
        raise _AttemptFailed(f"mixed operator on gamma dipped to {lgamma_min:.6g}")
    gvals = gf.evaluate(ggrid)
    sandwich_lo = float(np.min(gvals / ggrid))
    sandwich_hi = float(np.max(gvals / ggrid))
    if sandwich_lo < c_gamma or sandwich_hi > 1.0 / c_gamma:
        raise _AttemptFailed("linear sandwich on gamma failed")
    plateau_grid = np.concatenate(
        (np.linspace(ell, 4.0, 64), np.geomspace(4.0, 8.0 * p.R, 16))
    )
    gamma_floor = float(np.min(gf.evaluate(plateau_grid)))
    if gamma_floor < 1.0:
        raise _AttemptFailed("gamma dropped below 1 past the boundary layer")

    cert = {
        "s": s,
        "d": d,
        "C_sharp": c_sharp,
        "C1": c1,
        "C2": c2,
        "ell": ell,
        "M": M,
        "c_gamma": c_gamma,
        "S_d": s_d,
        "lbeta_min": float(np.min(lbeta)),
        "lbeta_floor": -c2,
        "lgamma_min": lgamma_min,
        "sandwich_lo": sandwich_lo,
        "sandwich_hi": sandwich_hi,
        "gamma_floor_past_ell": gamma_floor,
        "grid_sizes": {"c_sharp": 64, "c1": 128, "c2": 400, "lgamma": 200},
        "quad_tolerance": tol,
    }
    return dataclasses.replace(p, certificate=cert)


# ---------------------------------------------------------------------------
# truncation helpers
# ---------------------------------------------------------------------------


def radial_cutoff(R: float) -> RadialField:
    """C^2 radial plateau: 1 on |x| <= R, quintic decay, 0 beyond 2R."""
    if R <= 0:
        raise DomainError("cutoff radius must be positive")

    def prof(r):
        r = np.asarray(r, dtype=float)
        return 1.0 - smoothstep((r - R) / R)

    def d1(r):
        return -float(_smoothstep_d1((r - R) / R)) / R

    def d2(r):
        return -float(_smoothstep_d2((r - R) / R)) / R**2

    return RadialField(
        profile=prof, d_profile=d1, dd_profile=d2, support_radius=2.0 * R,
        kinks=(R, 2.0 * R), name=f"cutoff(R={R})",
    )


def theta(x, p: BarrierParams, cutoff: RadialField) -> float:
    """Truncated comparison function: gamma(x_1) times the radial plateau."""
    plateau_radius = cutoff.kinks[0] if cutoff.kinks else cutoff.support_radius / 2.0
    if plateau_radius <= 4.0 * p.rho_omega:
        raise DomainError("truncation radius must exceed four domain radii")
    xv = np.atleast_1d(np.asarray(x, dtype=float))
    r = float(np.linalg.norm(xv))
    return float(gamma(xv[0], p) * cutoff(r))


def tail_kappa(R: float, g, params: OperatorParams) -> float:
    """Weighted far-field mass: int over |y| >= R of |g(y)| / (1 + |y|^{N+2s}).

    Compactly supported fields give exactly zero once R clears the support;
    bounded tails are integrated with the 1/y substitution on graded panels.
    """
    if R <= 0:
        raise DomainError("radius must be positive")
    s = params.s
    from .kernel import _geometric_refine, _panel_nodes, _SPHERE_AREA

    if isinstance(g, RadialField):
        if R >= g.support_radius:
            return 0.0
        pts, w = _panel_nodes(_geometric_refine([R, g.support_radius], 4))
        vals = np.abs(g.profile(pts))
        n = params.n_dim
        return _SPHERE_AREA[n] * float(
            np.sum(w * vals * pts ** (n - 1) / (1.0 + pts ** (n + 2.0 * s)))
        )
    if params.n_dim != 1:
        raise DomainError("dimension above 1 requires a radial field")
    if g.tail.is_compact() and R >= g.tail.cutoff:
        return 0.0
    if g.tail.max_power() >= 2.0 * s:
        return math.inf
    t, tw = _panel_nodes(_geometric_refine([1e-10, 1.0], 4))
    y = R / t
    jac = R / t**2
    weight = 1.0 / (1.0 + y ** (1.0 + 2.0 * s))
    hi = float(np.sum(tw * np.abs(g.evaluate(y)) * weight * jac))
    lo = float(np.sum(tw * np.abs(g.evaluate(-y)) * weight * jac))
    return hi + lo
