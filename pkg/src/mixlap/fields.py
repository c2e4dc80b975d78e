"""Scalar fields on the line (and radial fields in higher dimension).

A :class:`ScalarField` bundles everything the singular-integral machinery
needs to evaluate nonlocal operators on an explicitly given function:

* a vectorized evaluator, defined on all of R,
* an optional second derivative, valid away from the listed kinks,
* an exact far-field description (:class:`TailExpansion`) so that the
  integral beyond any finite radius can be resummed in closed form.

The tail description is *exact*, not asymptotic: beyond ``cutoff`` the
function must equal the stated finite sum of power terms on each side
(an empty side means the function vanishes identically there).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Optional, Tuple

import numpy as np

from .errors import DomainError

Terms = Tuple[Tuple[float, float], ...]


@dataclass(frozen=True)
class TailExpansion:
    """Exact representation of a function beyond ``|x| > cutoff``.

    ``plus_terms`` is a tuple of ``(coef, power)`` pairs with
    ``u(x) = sum coef * x**power`` for ``x > cutoff``; ``minus_terms``
    plays the same role with ``u(x) = sum coef * |x|**power`` for
    ``x < -cutoff``.  Empty tuples mean the function is identically zero
    on that side.
    """

    cutoff: float
    plus_terms: Terms = ()
    minus_terms: Terms = ()

    def max_power(self) -> float:
        powers = [p for _, p in self.plus_terms] + [p for _, p in self.minus_terms]
        return max(powers) if powers else -math.inf

    def is_compact(self) -> bool:
        return not self.plus_terms and not self.minus_terms

    def scaled(self, eps: float) -> "TailExpansion":
        """Tail of x -> u(x/eps)."""
        return TailExpansion(
            cutoff=self.cutoff * eps,
            plus_terms=tuple((c * eps ** (-p), p) for c, p in self.plus_terms),
            minus_terms=tuple((c * eps ** (-p), p) for c, p in self.minus_terms),
        )


@dataclass(frozen=True)
class TailClass:
    """Coarse classification of far-field behaviour.

    ``kind`` is one of ``"compact_support"`` (with ``value`` the support
    radius), ``"bounded"`` (constant tails; ``value`` is the largest
    constant magnitude) or ``"power_growth"`` (``value`` is the growth
    exponent).
    """

    kind: str
    value: float


@dataclass(frozen=True)
class ScalarField:
    """A function on R with the metadata needed for nonlocal evaluation."""

    evaluate: Callable[[np.ndarray], np.ndarray]
    second_derivative: Optional[Callable[[float], float]] = None
    smooth_region: Optional[Tuple[float, float]] = None
    kinks: Tuple[float, ...] = ()
    tail: TailExpansion = field(default_factory=lambda: TailExpansion(0.0))
    name: str = ""
    # piecewise-polynomial fields (hat interpolants) only need plain panel
    # breaks at their kinks; fractional-power kinks need dyadic grading
    tame_kinks: bool = False

    def __call__(self, x):
        arr = np.asarray(x, dtype=float)
        out = self.evaluate(arr)
        return float(out) if np.isscalar(x) or arr.ndim == 0 else out

    def c2_distance(self, x: float) -> float:
        """Distance from x to the nearest smoothness breakpoint."""
        if not self.kinks:
            return math.inf
        return min(abs(x - k) for k in self.kinks)

    def tail_class(self) -> TailClass:
        if self.tail.is_compact():
            return TailClass("compact_support", self.tail.cutoff)
        p = self.tail.max_power()
        if p <= 0.0:
            mag = max(
                [abs(c) for c, q in self.tail.plus_terms if q == 0.0]
                + [abs(c) for c, q in self.tail.minus_terms if q == 0.0]
                + [0.0]
            )
            return TailClass("bounded", mag)
        return TailClass("power_growth", p)


# ---------------------------------------------------------------------------
# constructors
# ---------------------------------------------------------------------------


def constant(value: float) -> ScalarField:
    return ScalarField(
        evaluate=lambda x: np.full_like(np.asarray(x, dtype=float), value),
        second_derivative=lambda x: 0.0,
        kinks=(),
        tail=TailExpansion(0.0, ((value, 0.0),), ((value, 0.0),)),
        name=f"constant({value})",
    )


def zero() -> ScalarField:
    return ScalarField(
        evaluate=lambda x: np.zeros_like(np.asarray(x, dtype=float)),
        second_derivative=lambda x: 0.0,
        kinks=(),
        tail=TailExpansion(0.0),
        name="zero",
    )


def pure_power(alpha: float) -> ScalarField:
    """x -> max(x, 0)**alpha; grows like x**alpha at +infinity."""
    if alpha <= 0:
        raise DomainError("pure_power requires a positive exponent")

    def ev(x):
        x = np.asarray(x, dtype=float)
        return np.where(x > 0.0, np.maximum(x, 0.0) ** alpha, 0.0)

    def d2(x):
        if x <= 0.0:
            return 0.0
        return alpha * (alpha - 1.0) * x ** (alpha - 2.0)

    return ScalarField(
        evaluate=ev,
        second_derivative=d2,
        smooth_region=(0.0, math.inf),
        kinks=(0.0,),
        tail=TailExpansion(1.0, ((1.0, alpha),), ()),
        name=f"x_+^{alpha}",
    )


def truncated_power(alpha: float, L: float) -> ScalarField:
    """x -> x_+**alpha capped at the constant (2L)**alpha from x = 2L on."""
    if alpha <= 0 or L <= 0:
        raise DomainError("truncated_power requires alpha > 0 and L > 0")
    cap = (2.0 * L) ** alpha

    def ev(x):
        x = np.asarray(x, dtype=float)
        body = np.maximum(x, 0.0) ** alpha
        return np.where(x >= 2.0 * L, cap, np.where(x > 0.0, body, 0.0))

    def d2(x):
        if x <= 0.0 or x >= 2.0 * L:
            return 0.0
        return alpha * (alpha - 1.0) * x ** (alpha - 2.0)

    return ScalarField(
        evaluate=ev,
        second_derivative=d2,
        smooth_region=(0.0, 2.0 * L),
        kinks=(0.0, 2.0 * L),
        tail=TailExpansion(2.0 * L, ((cap, 0.0),), ()),
        name=f"w_alpha({alpha},L={L})",
    )


def parabola_cap() -> ScalarField:
    """x**2 - 1 inside [-1, 1], zero outside (compactly supported)."""

    def ev(x):
        x = np.asarray(x, dtype=float)
        return np.where(np.abs(x) <= 1.0, x * x - 1.0, 0.0)

    return ScalarField(
        evaluate=ev,
        second_derivative=lambda x: 2.0 if abs(x) < 1.0 else 0.0,
        smooth_region=(-1.0, 1.0),
        kinks=(-1.0, 1.0),
        tail=TailExpansion(1.0),
        name="parabola_cap",
    )


def scaled(u: ScalarField, eps: float) -> ScalarField:
    """x -> u(x / eps)."""
    if eps <= 0:
        raise DomainError("scaling factor must be positive")
    d2 = None
    if u.second_derivative is not None:
        d2 = lambda x: u.second_derivative(x / eps) / eps**2  # noqa: E731
    region = None
    if u.smooth_region is not None:
        region = (u.smooth_region[0] * eps, u.smooth_region[1] * eps)
    return ScalarField(
        evaluate=lambda x: u.evaluate(np.asarray(x, dtype=float) / eps),
        second_derivative=d2,
        smooth_region=region,
        kinks=tuple(k * eps for k in u.kinks),
        tail=u.tail.scaled(eps),
        name=f"{u.name}(x/{eps})",
    )


def translated(u: ScalarField, t: float) -> ScalarField:
    """x -> u(x - t).  Only supported for compact or constant tails."""
    if u.tail.max_power() > 0:
        raise DomainError("translation is only supported for bounded tails")
    d2 = None
    if u.second_derivative is not None:
        d2 = lambda x: u.second_derivative(x - t)  # noqa: E731
    region = None
    if u.smooth_region is not None:
        region = (u.smooth_region[0] + t, u.smooth_region[1] + t)
    return ScalarField(
        evaluate=lambda x: u.evaluate(np.asarray(x, dtype=float) - t),
        second_derivative=d2,
        smooth_region=region,
        kinks=tuple(k + t for k in u.kinks),
        tail=TailExpansion(u.tail.cutoff + abs(t), u.tail.plus_terms, u.tail.minus_terms),
        name=f"{u.name}(x-{t})",
    )


def linear_combination(coeffs, fields) -> ScalarField:
    """sum_k coeffs[k] * fields[k], with tails merged term by term."""
    coeffs = [float(c) for c in coeffs]
    fields = list(fields)
    if len(coeffs) != len(fields):
        raise DomainError("coefficient/field length mismatch")

    def ev(x):
        x = np.asarray(x, dtype=float)
        out = np.zeros_like(x)
        for c, f in zip(coeffs, fields):
            out = out + c * f.evaluate(x)
        return out

    d2 = None
    if all(f.second_derivative is not None for f in fields):
        d2 = lambda x: sum(  # noqa: E731
            c * f.second_derivative(x) for c, f in zip(coeffs, fields)
        )
    cutoff = max([f.tail.cutoff for f in fields] + [0.0])
    plus = tuple((c * a, p) for c, f in zip(coeffs, fields) for a, p in f.tail.plus_terms)
    minus = tuple((c * a, p) for c, f in zip(coeffs, fields) for a, p in f.tail.minus_terms)
    kinks = tuple(sorted({k for f in fields for k in f.kinks}))
    return ScalarField(
        evaluate=ev,
        second_derivative=d2,
        kinks=kinks,
        tail=TailExpansion(cutoff, plus, minus),
        name="+".join(f"{c}*{f.name}" for c, f in zip(coeffs, fields)),
    )


def _bump_profile(t):
    """exp(-1/(1-t^2)) on |t|<1, zero outside; smooth on all of R."""
    t = np.asarray(t, dtype=float)
    inside = np.abs(t) < 1.0
    out = np.zeros_like(t)
    tt = np.where(inside, t, 0.0)
    with np.errstate(divide="ignore", over="ignore"):
        out = np.where(inside, np.exp(-1.0 / np.maximum(1.0 - tt * tt, 1e-300)), 0.0)
    return out


def mollifier_bump(center: float, radius: float, height: float = 1.0) -> ScalarField:
    """Smooth bump supported on (center - radius, center + radius), peak = height."""
    if radius <= 0:
        raise DomainError("bump radius must be positive")
    h = height * math.e  # profile peaks at exp(-1)

    def ev(x):
        x = np.asarray(x, dtype=float)
        return h * _bump_profile((x - center) / radius)

    def d2(x):
        t = (x - center) / radius
        if abs(t) >= 1.0:
            return 0.0
        g = 1.0 - t * t
        e = math.exp(-1.0 / g)
        val = e * (4.0 * t * t / g**4 - 2.0 / g**2 - 8.0 * t * t / g**3)
        return h * val / radius**2

    # the support edges are smooth but non-analytic; listing them routes
    # dyadic panel grading there during singular quadrature
    return ScalarField(
        evaluate=ev,
        second_derivative=d2,
        smooth_region=(-math.inf, math.inf),
        kinks=(center - radius, center + radius),
        tail=TailExpansion(abs(center) + radius),
        name=f"bump(c={center},r={radius})",
    )


def smoothstep(t):
    """C^2 quintic ramp: 0 for t<=0, 1 for t>=1, monotone in between."""
    t = np.clip(np.asarray(t, dtype=float), 0.0, 1.0)
    return t * t * t * (10.0 + t * (-15.0 + 6.0 * t))


def _smoothstep_d1(t):
    t = np.clip(np.asarray(t, dtype=float), 0.0, 1.0)
    return 30.0 * t * t * (1.0 - t) ** 2


def _smoothstep_d2(t):
    t = np.clip(np.asarray(t, dtype=float), 0.0, 1.0)
    return 60.0 * t * (1.0 - t) * (1.0 - 2.0 * t)


def plateau(lo_inner, lo_outer, hi_inner, hi_outer, depth: float = 1.0) -> ScalarField:
    """C^2 plateau: depth on [lo_outer, hi_inner], 0 outside (lo_inner, hi_outer).

    Ramps are quintic smoothsteps; the result is C^2 on all of R.
    """
    if not (lo_inner < lo_outer <= hi_inner < hi_outer):
        raise DomainError("plateau breakpoints must be increasing")

    def ev(x):
        x = np.asarray(x, dtype=float)
        up = smoothstep((x - lo_inner) / (lo_outer - lo_inner))
        down = smoothstep((hi_outer - x) / (hi_outer - hi_inner))
        return depth * up * down

    def d2(x):
        wu = lo_outer - lo_inner
        wd = hi_outer - hi_inner
        tu = (x - lo_inner) / wu
        td = (hi_outer - x) / wd
        up = float(smoothstep(tu))
        down = float(smoothstep(td))
        up1 = float(_smoothstep_d1(tu)) / wu
        down1 = -float(_smoothstep_d1(td)) / wd
        up2 = float(_smoothstep_d2(tu)) / wu**2
        down2 = float(_smoothstep_d2(td)) / wd**2
        return depth * (up2 * down + 2.0 * up1 * down1 + up * down2)

    return ScalarField(
        evaluate=ev,
        second_derivative=d2,
        smooth_region=(-math.inf, math.inf),
        kinks=(),
        tail=TailExpansion(max(abs(lo_inner), abs(hi_outer))),
        name=f"plateau[{lo_inner},{lo_outer},{hi_inner},{hi_outer}]",
    )


# ---------------------------------------------------------------------------
# radial fields for N >= 2
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class RadialField:
    """A radial function u(x) = profile(|x|) with compact support.

    Only compactly supported radial profiles are supported: that is all the
    higher-dimensional counterexample drivers need, and it keeps the tail
    bookkeeping exact.
    """

    profile: Callable[[np.ndarray], np.ndarray]
    d_profile: Optional[Callable[[float], float]] = None
    dd_profile: Optional[Callable[[float], float]] = None
    support_radius: float = 1.0
    kinks: Tuple[float, ...] = ()
    name: str = ""

    def __call__(self, r):
        arr = np.asarray(r, dtype=float)
        out = self.profile(arr)
        return float(out) if np.isscalar(r) or arr.ndim == 0 else out

    def laplacian(self, r: float, n_dim: int) -> float:
        """Radial Laplacian profile'' + (N-1) profile' / r."""
        if self.dd_profile is None or self.d_profile is None:
            raise DomainError("radial field lacks stored derivatives")
        if r == 0.0:
            return n_dim * self.dd_profile(0.0)
        return self.dd_profile(r) + (n_dim - 1) * self.d_profile(r) / r

    def c2_distance(self, r: float) -> float:
        if not self.kinks:
            return math.inf
        return min(abs(r - k) for k in self.kinks)
