"""Pointwise evaluation of the fractional Laplacian and the mixed operators.

The fractional Laplacian is evaluated through its regularized
second-difference form

    (-Delta)^s u(x) = -(c_{N,s}/2) * int (u(x+z) + u(x-z) - 2 u(x)) / |z|^{N+2s} dz,

which removes the principal value for C^2 integrands.  The integral is split
into an analytic core around z = 0 (second-order Taylor resummation, which
also steps over the floating-point cancellation floor of the raw second
difference), a graded-panel Gauss zone out to a finite radius, and an exact
tail resummation driven by the field's :class:`~mixlap.fields.TailExpansion`.

The normalization constant is computed from its defining integral by radial
splitting: a power series around the origin and a Fourier-weighted quadrature
for the oscillatory tail.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from typing import Optional, Union

import numpy as np
from numpy.polynomial.legendre import leggauss
from scipy.integrate import quad as _scipy_quad

from .errors import AccuracyError, DomainError, TailDivergenceError
from .fields import RadialField, ScalarField

_EPS = np.finfo(float).eps
_MIN_C2_ZONE = 1e-12

_GAUSS_ORDER = 12
_GX, _GW = leggauss(_GAUSS_ORDER)

_SPHERE_AREA = {1: 2.0, 2: 2.0 * math.pi, 3: 4.0 * math.pi}


class LocalSign(enum.Enum):
    """Sign of the local part: MINUS gives -Delta + (-Delta)^s, PLUS gives
    the wrong-sign operator Delta + (-Delta)^s."""

    MINUS = "minus"
    PLUS = "plus"


@dataclass(frozen=True)
class QuadratureSpec:
    """Node-placement parameters for the singular quadrature.

    ``panels`` is the number of geometric panels per factor-2 span; higher
    values tighten the Gauss error at proportional cost.
    """

    inner_radius: float = 0.25
    outer_radius: float = 64.0
    panels: int = 2
    tolerance: float = 1e-8

    def __post_init__(self):
        if not (0 < self.inner_radius < self.outer_radius):
            raise DomainError("require 0 < inner_radius < outer_radius")
        if self.panels < 1:
            raise DomainError("panels must be a positive integer")
        if self.tolerance <= 0:
            raise DomainError("tolerance must be positive")


@dataclass(frozen=True)
class OperatorParams:
    """Dimension, fractional order and local sign, with the cached constant."""

    n_dim: int
    s: float
    local_sign: LocalSign = LocalSign.MINUS
    c_ns: Optional[float] = None

    def __post_init__(self):
        if self.n_dim < 1:
            raise DomainError("dimension must be at least 1")
        if not (0.0 < self.s < 1.0):
            raise DomainError("s must lie in (0, 1)")
        if self.c_ns is None:
            object.__setattr__(self, "c_ns", normalization_constant(self.n_dim, self.s))
        if not (self.c_ns > 0.0 and math.isfinite(self.c_ns)):
            raise DomainError("normalization constant must be positive and finite")


# ---------------------------------------------------------------------------
# normalization constant
# ---------------------------------------------------------------------------


def _one_minus_cos_moment(s: float) -> float:
    """int_0^inf (1 - cos t) t^(-1-2s) dt via series + Fourier-weighted tail."""
    # [0, 1]: expand 1 - cos t = sum (-1)^(k+1) t^(2k) / (2k)! and integrate.
    head = 0.0
    term_sign = 1.0
    fact = 2.0  # (2k)! for k = 1
    k = 1
    while True:
        term = term_sign / (fact * (2 * k - 2 * s))
        head += term
        if abs(term) < 1e-18 * max(abs(head), 1.0):
            break
        k += 1
        fact *= (2 * k - 1) * (2 * k)
        term_sign = -term_sign
        if k > 60:  # unreachable for s in (0,1); guards the loop
            break
    # [1, inf): int t^(-1-2s) dt - int cos(t) t^(-1-2s) dt
    res = _scipy_quad(
        lambda t: t ** (-1.0 - 2.0 * s), 1.0, np.inf, weight="cos", wvar=1.0,
        epsabs=1e-13, limit=400, limlst=200, full_output=1,
    )
    osc, osc_err = res[0], res[1]
    tail = 1.0 / (2.0 * s) - osc
    value = head + tail
    if osc_err > 1e-9 * max(abs(value), 1e-3):
        raise AccuracyError("oscillatory tail quadrature did not converge",
                            achieved=osc_err)
    return value


def _first_coordinate_moment(n_dim: int, s: float) -> float:
    """int over the unit sphere of |theta_1|^{2s} d sigma, for N in {1, 2, 3}."""
    if n_dim == 1:
        return 2.0
    if n_dim == 2:
        # substitute t = cos(theta): 4 * int_0^1 t^{2s} (1-t^2)^{-1/2} dt,
        # with both algebraic endpoint factors folded into the weight
        val, err = _scipy_quad(
            lambda t: 1.0 / math.sqrt(1.0 + t), 0.0, 1.0,
            weight="alg", wvar=(2.0 * s, -0.5), epsabs=1e-13, limit=200,
        )
        if err > 1e-10:
            raise AccuracyError("angular moment quadrature did not converge",
                                achieved=err)
        return 4.0 * val
    if n_dim == 3:
        return 4.0 * math.pi / (2.0 * s + 1.0)
    raise DomainError("only dimensions 1, 2, 3 are supported")


def normalization_constant(n_dim: int, s: float) -> float:
    """Reciprocal of int over R^N of (1 - cos zeta_1) / |zeta|^{N+2s} d zeta.

    Writing zeta = r * theta and substituting t = r |theta_1| factorizes the
    integral into a one-dimensional radial moment times the sphere average of
    |theta_1|^{2s}; both factors are evaluated to ~1e-10 relative accuracy.
    """
    if not (0.0 < s < 1.0):
        raise DomainError("s must lie in (0, 1)")
    if n_dim < 1:
        raise DomainError("dimension must be at least 1")
    integral = _one_minus_cos_moment(s) * _first_coordinate_moment(n_dim, s)
    return 1.0 / integral


# ---------------------------------------------------------------------------
# panel machinery
# ---------------------------------------------------------------------------


def _geometric_refine(breaks, panels_per_octave: int):
    """Insert points so consecutive breakpoints have ratio <= 2^(1/panels)."""
    ratio = 2.0 ** (1.0 / panels_per_octave)
    out = [breaks[0]]
    for b in breaks[1:]:
        a = out[-1]
        if a > 0 and b / a > ratio:
            k = int(math.ceil(math.log(b / a) / math.log(ratio)))
            step = (b / a) ** (1.0 / k)
            for j in range(1, k):
                out.append(a * step**j)
        out.append(b)
    return out


def _dyadic_into(lo: float, hi: float, toward: float, floor: float):
    """Breakpoints on [lo, hi] accumulating dyadically toward one endpoint.

    Used where the integrand has an algebraic (fractional-power) kink at the
    endpoint; each panel then sees the singular point at a distance
    comparable to its own length, restoring Gauss accuracy.
    """
    gap = hi - lo
    pts = []
    d = gap / 2.0
    while d > floor and len(pts) < 48:
        pts.append(d)
        d /= 2.0
    if toward == lo:
        inner = [lo + t for t in reversed(pts)]
    else:
        inner = [hi - t for t in pts]
    return [lo] + inner + [hi]


def _assemble_breaks(z0, r_in, offsets, r_out, panels, sharp=True):
    """Full breakpoint list: graded core zone, kink offsets, outer growth.

    Kink offsets get dyadic accumulation from both sides when ``sharp``;
    piecewise-polynomial fields only need the plain breakpoints.
    """
    pts = [z0, r_in]
    for b in offsets:
        if b > pts[-1] * (1.0 + 1e-13):
            pts.append(b)
    if r_out > pts[-1] * (1.0 + 1e-13):
        pts.append(r_out)
    else:
        pts[-1] = r_out
    sharp_set = set(offsets) if sharp else set()
    breaks = [pts[0]]
    for lo, hi in zip(pts[:-1], pts[1:]):
        seg = _geometric_refine([lo, hi], panels)
        if lo in sharp_set and len(seg) >= 2:
            floor = 1e-12 * max(1.0, lo)
            seg = _dyadic_into(seg[0], seg[1], seg[0], floor) + seg[2:]
        if hi in sharp_set and len(seg) >= 2:
            floor = 1e-12 * max(1.0, hi)
            seg = seg[:-2] + _dyadic_into(seg[-2], seg[-1], seg[-1], floor)
        breaks.extend(seg[1:])
    return breaks


def _panel_nodes(breaks):
    """Gauss nodes/weights for all panels [breaks[i], breaks[i+1]] at once."""
    a = np.asarray(breaks[:-1])
    b = np.asarray(breaks[1:])
    mid = 0.5 * (a + b)[:, None]
    half = 0.5 * (b - a)[:, None]
    nodes = mid + half * _GX[None, :]
    weights = half * _GW[None, :]
    return nodes.ravel(), weights.ravel()


def _real_binomial(p: float, k: int) -> float:
    out = 1.0
    for i in range(1, k + 1):
        out *= (p - i + 1) / i
    return out


def _tail_power_moment(p: float, shift: float, radius: float, s: float) -> float:
    """int_R^inf (t + shift)^p t^(-1-2s) dt for |shift| < R and p < 2s.

    Expands (t + shift)^p = t^p sum_k C(p,k) (shift/t)^k; the series
    converges geometrically since |shift| / R < 1.
    """
    if p >= 2.0 * s:
        raise TailDivergenceError("tail power meets or exceeds 2s")
    if abs(shift) >= radius:
        raise DomainError("tail radius must exceed the evaluation offset")
    total = 0.0
    for k in range(0, 120):
        denom = 2.0 * s + k - p
        term = _real_binomial(p, k) * shift**k * radius ** (p - k - 2.0 * s) / denom
        total += term
        if k > 2 and abs(term) < 1e-18 * max(abs(total), 1e-300):
            break
    return total


def _tail_contribution(u: ScalarField, x: float, radius: float, s: float) -> float:
    """int_R^inf (u(x+t) + u(x-t) - 2 u(x)) t^(-1-2s) dt, resummed exactly."""
    ux = float(u(x))
    plus = sum(
        c * _tail_power_moment(p, x, radius, s) for c, p in u.tail.plus_terms
    )
    minus = sum(
        c * _tail_power_moment(p, -x, radius, s) for c, p in u.tail.minus_terms
    )
    return plus + minus - 2.0 * ux * radius ** (-2.0 * s) / (2.0 * s)


# ---------------------------------------------------------------------------
# fractional Laplacian, one dimension
# ---------------------------------------------------------------------------


def _noise_floor(s: float, tolerance: float, scale: float) -> float:
    """Smallest offset at which raw second differences beat roundoff.

    Integrating machine noise eps*scale against z^(-1-2s) from z0 outward
    contributes ~ eps*scale*z0^(-2s)/(2s); keep that below tolerance/10.
    """
    return (10.0 * _EPS * scale / (2.0 * s * tolerance)) ** (1.0 / (2.0 * s))


def _second_derivative_estimate(u: ScalarField, x: float, h: float):
    """(upp, u4): second derivative and a fourth-derivative estimate at x."""
    if u.second_derivative is not None:
        upp = float(u.second_derivative(x))
        d = max(h, 1e-5)
        d = min(d, u.c2_distance(x) / 4.0) if u.kinks else d
        if d > 0:
            try:
                u4 = (
                    float(u.second_derivative(x + d))
                    + float(u.second_derivative(x - d))
                    - 2.0 * upp
                ) / d**2
            except Exception:
                u4 = 0.0
        else:
            u4 = 0.0
        return upp, u4
    pts = np.array([x - h, x, x + h])
    vals = u.evaluate(pts)
    upp = (vals[0] + vals[2] - 2.0 * vals[1]) / h**2
    return float(upp), 0.0


def frac_apply_1d(u: ScalarField, x: float, params: "OperatorParams",
                  quad: QuadratureSpec) -> float:
    s = params.s
    c = params.c_ns
    r_c2 = u.c2_distance(x)
    if r_c2 < _MIN_C2_ZONE:
        raise DomainError(
            f"evaluation point {x} is within {_MIN_C2_ZONE} of a smoothness break"
        )
    if u.tail.max_power() >= 2.0 * s:
        raise TailDivergenceError(
            "field grows at least like |x|^(2s); the defining integral diverges"
        )

    r_in = min(quad.inner_radius, 0.5 * r_c2)
    scale = 1.0 + abs(float(u(x)))
    z0 = _noise_floor(s, quad.tolerance, scale)
    z0 = min(max(z0, 1e-8 * r_in), r_in / 8.0)

    # analytic core on (0, z0]: delta2(z) ~ upp z^2 + u4 z^4 / 12
    upp, u4 = _second_derivative_estimate(u, x, z0)
    core = -c * (
        upp * z0 ** (2.0 - 2.0 * s) / (2.0 - 2.0 * s)
        + u4 * z0 ** (4.0 - 2.0 * s) / (12.0 * (4.0 - 2.0 * s))
    )

    # breakpoints: graded [z0, r_in], then kink offsets out to the tail radius
    r_out = max(quad.outer_radius, 2.0 * abs(x) + 2.0, u.tail.cutoff + abs(x) + 1.0)
    offsets = sorted({abs(k - x) for k in u.kinks if z0 < abs(k - x) < r_out})
    breaks = _assemble_breaks(z0, r_in, offsets, r_out, quad.panels,
                              sharp=not u.tame_kinks)

    z, w = _panel_nodes(breaks)
    ux = float(u(x))
    delta2 = u.evaluate(x + z) + u.evaluate(x - z) - 2.0 * ux
    panel_vals = w * delta2 * z ** (-1.0 - 2.0 * s)
    # one fsum per panel keeps the inner-to-outer summation order explicit
    panel_sums = panel_vals.reshape(-1, _GAUSS_ORDER).sum(axis=1)
    middle = -c * math.fsum(panel_sums)

    tail = -c * _tail_contribution(u, x, r_out, s)
    return math.fsum((core, middle, tail))


# ---------------------------------------------------------------------------
# fractional Laplacian, radial fields in dimension 2 and 3
# ---------------------------------------------------------------------------


_ANGULAR_GX, _ANGULAR_GW = leggauss(24)


def _angular_mean(u: RadialField, r: float, rho: np.ndarray, n_dim: int) -> np.ndarray:
    """int over the unit sphere of u(|x + rho theta|) d sigma, |x| = r.

    The distance argument sweeps [|r - rho|, r + rho]; where it crosses a
    profile kink the angular integrand loses smoothness, so the angular
    variable is segmented at the crossing before applying Gauss panels.
    In dimension 2 the Chebyshev weight is absorbed by tau = cos(theta).
    """
    if n_dim not in (2, 3):
        raise DomainError("radial evaluation supports dimensions 2 and 3 only")
    omega = _SPHERE_AREA[n_dim]
    out = np.empty(rho.size)
    for idx, p in enumerate(rho):
        if r == 0.0 or p == 0.0:
            out[idx] = omega * float(u.profile(np.asarray([abs(r + p)]))[0])
            continue
        # angular positions where the swept distance hits a kink radius
        cuts = []
        for k in u.kinks:
            tau_star = (k * k - r * r - p * p) / (2.0 * r * p)
            if -1.0 < tau_star < 1.0:
                cuts.append(tau_star)
        if n_dim == 2:
            lo, hi = 0.0, math.pi
            cut_pts = sorted(math.acos(t) for t in cuts)
        else:
            lo, hi = -1.0, 1.0
            cut_pts = sorted(cuts)
        # grade each segment dyadically into both endpoints: the profile is
        # only Hoelder at a cut, and a cut sitting just beyond the interval
        # (crossing about to enter or leave) still puts a boundary layer at
        # the endpoint that plain Gauss cannot resolve
        breaks = [lo]
        for a, b in zip([lo] + cut_pts, cut_pts + [hi]):
            if b <= breaks[-1] + 1e-300:
                continue
            mid = 0.5 * (a + b)
            floor = (b - a) * 1e-8
            seg = (_dyadic_into(a, mid, a, floor)
                   + _dyadic_into(mid, b, b, floor)[1:])
            breaks.extend(seg[1:])
        nodes, weights = _panel_nodes(breaks)
        if n_dim == 2:
            dist = np.sqrt(np.maximum(
                r * r + p * p + 2.0 * r * p * np.cos(nodes), 0.0))
            out[idx] = 2.0 * float(u.profile(dist) @ weights)
        else:
            dist = np.sqrt(np.maximum(r * r + p * p + 2.0 * r * p * nodes, 0.0))
            out[idx] = 2.0 * math.pi * float(u.profile(dist) @ weights)
    return out


def frac_apply_radial(u: RadialField, x, params: "OperatorParams",
                      quad: QuadratureSpec) -> float:
    """(-Delta)^s of a compactly supported radial field at the point x."""
    n = params.n_dim
    s = params.s
    c = params.c_ns
    x = np.asarray(x, dtype=float).reshape(-1)
    if x.size != n:
        raise DomainError("point dimension does not match operator dimension")
    r = float(np.linalg.norm(x))
    if u.c2_distance(r) < _MIN_C2_ZONE:
        raise DomainError("evaluation radius sits on a smoothness break")

    omega = _SPHERE_AREA[n]
    ur = float(u(r))

    def sphere_defect(rho: np.ndarray) -> np.ndarray:
        """int_S (u(x + rho theta) - u(x)) d sigma(theta)."""
        return _angular_mean(u, r, rho, n) - omega * ur

    r_c2 = u.c2_distance(r)
    r_in = min(quad.inner_radius, 0.5 * r_c2) if math.isfinite(r_c2) else quad.inner_radius
    z0 = _noise_floor(s, quad.tolerance, 1.0 + abs(ur))
    z0 = min(max(z0, 1e-8 * r_in), r_in / 8.0)

    lap = u.laplacian(r, n)
    core = -(c / 2.0) * (omega * lap / n) * z0 ** (2.0 - 2.0 * s) / (2.0 - 2.0 * s)

    r_out = max(quad.outer_radius, u.support_radius + r + 1.0)
    offsets = sorted(
        {abs(k - r) for k in u.kinks if z0 < abs(k - r) < r_out}
        | {k + r for k in u.kinks if z0 < k + r < r_out}
    )
    breaks = _assemble_breaks(z0, r_in, offsets, r_out, quad.panels)

    rho, w = _panel_nodes(breaks)
    defect = sphere_defect(rho)
    panel_vals = w * defect * rho ** (-1.0 - 2.0 * s)
    panel_sums = panel_vals.reshape(-1, _GAUSS_ORDER).sum(axis=1)
    # the sphere integral of (u(x + rho theta) - u(x)) already pairs +/- rho,
    # so the 1/2 of the second-difference form cancels against the folding
    middle = -c * math.fsum(panel_sums)

    # beyond r_out the field vanishes: only the -2u(x) term survives
    tail = c * ur * omega * r_out ** (-2.0 * s) / (2.0 * s)
    return math.fsum((core, middle, tail))


# ---------------------------------------------------------------------------
# public operations
# ---------------------------------------------------------------------------

Field = Union[ScalarField, RadialField]


def frac_apply(u: Field, x, params: OperatorParams, quad: QuadratureSpec) -> float:
    """Pointwise (-Delta)^s u(x) via the regularized second-difference form."""
    if params.n_dim == 1:
        if not isinstance(u, ScalarField):
            raise DomainError("dimension 1 requires a ScalarField")
        return frac_apply_1d(u, float(np.asarray(x).reshape(())), params, quad)
    if not isinstance(u, RadialField):
        raise DomainError("dimensions 2 and 3 require a RadialField")
    return frac_apply_radial(u, x, params, quad)


def mixed_apply(u: Field, x, params: OperatorParams, quad: QuadratureSpec) -> float:
    """-+ Delta u(x) + (-Delta)^s u(x), sign set by ``params.local_sign``."""
    if params.n_dim == 1:
        if not isinstance(u, ScalarField) or u.second_derivative is None:
            raise DomainError("mixed operator needs a second derivative")
        lap = float(u.second_derivative(float(np.asarray(x).reshape(()))))
    else:
        if not isinstance(u, RadialField):
            raise DomainError("dimensions 2 and 3 require a RadialField")
        lap = u.laplacian(float(np.linalg.norm(np.asarray(x, dtype=float))), params.n_dim)
    local = -lap if params.local_sign is LocalSign.MINUS else lap
    return local + frac_apply(u, x, params, quad)


def tail_integral(u: Field, params: OperatorParams) -> float:
    """The membership integral int |u(x)| / (1 + |x|^{N+2s}) dx.

    Returns ``math.inf`` when the comparison test on the stored tail growth
    proves divergence.
    """
    s = params.s
    n = params.n_dim
    if n == 1:
        if not isinstance(u, ScalarField):
            raise DomainError("dimension 1 requires a ScalarField")
        if u.tail.max_power() >= 2.0 * s:
            return math.inf
        y0 = max(u.tail.cutoff, 1.0)
        breaks = _geometric_refine([1e-8 * y0, y0], 2)
        pts, w = _panel_nodes([-b for b in breaks[::-1]] + breaks)
        body = float(np.sum(w * np.abs(u.evaluate(pts)) / (1.0 + np.abs(pts) ** (1.0 + 2.0 * s))))
        # tails via y = y0 / t, t in (0, 1]
        t, tw = _panel_nodes(_geometric_refine([1e-10, 1.0], 4))
        y = y0 / t
        jac = y0 / t**2
        upper = float(np.sum(tw * np.abs(u.evaluate(y)) / (1.0 + y ** (1.0 + 2.0 * s)) * jac))
        lower = float(np.sum(tw * np.abs(u.evaluate(-y)) / (1.0 + y ** (1.0 + 2.0 * s)) * jac))
        return body + upper + lower
    if not isinstance(u, RadialField):
        raise DomainError("dimensions 2 and 3 require a RadialField")
    omega = _SPHERE_AREA[n]
    y0 = max(u.support_radius, 1.0)
    pts, w = _panel_nodes(_geometric_refine([1e-10 * y0, y0], 2))
    vals = np.abs(u.profile(pts))
    return omega * float(np.sum(w * vals * pts ** (n - 1) / (1.0 + pts ** (n + 2.0 * s))))
