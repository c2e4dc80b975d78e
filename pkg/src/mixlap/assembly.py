"""Galerkin assembly for the mixed bilinear form on an interval.

Trial and test functions are piecewise-linear hats on a uniform partition of
(a, b), extended by zero to the whole line, so the discrete space mimics the
zero-exterior Dirichlet setting.  The bilinear form is

    B(u, v) = int u' v' dx
            + (c_{1,s}/2) * intint (u(x)-u(y)) (v(x)-v(y)) / |x-y|^{1+2s} dx dy,

with the double integral running over all of R x R (exterior strips
included).

For translated hats on a uniform mesh the double integral reduces, through
the substitution z = x - y, to one-dimensional moments of the hat-hat
correlation kernel (a cubic B-spline) against |z|^{-1-2s}.  Those moments
have closed-form antiderivatives on the spline's breakpoint intervals, so
every nonlocal entry is assembled exactly (up to rounding); the matrix is
symmetric Toeplitz.  At s = 1/2 the k = 1 moment switches to its logarithmic
antiderivative.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np
from numpy.polynomial.legendre import leggauss

from .errors import DomainError, InputError
from .fields import ScalarField, TailExpansion
from .kernel import OperatorParams, QuadratureSpec

_LOAD_GAUSS_X, _LOAD_GAUSS_W = leggauss(6)


@dataclass(frozen=True)
class Mesh:
    """Uniform partition of (a, b) with n interior nodes, spacing h."""

    a: float
    b: float
    n: int
    h: float
    nodes: np.ndarray

    def element_edges(self) -> np.ndarray:
        """The n+2 element boundaries a = x_0 < ... < x_{n+1} = b."""
        return np.linspace(self.a, self.b, self.n + 2)


def build_mesh(a: float, b: float, n: int) -> Mesh:
    if not (a < b):
        raise DomainError("mesh requires a < b")
    if n < 1:
        raise DomainError("mesh requires at least one interior node")
    h = (b - a) / (n + 1)
    nodes = a + h * np.arange(1, n + 1)
    return Mesh(a=float(a), b=float(b), n=int(n), h=h, nodes=nodes)


@dataclass(frozen=True)
class GridFunction:
    """Nodal coefficients of the piecewise-linear interpolant, zero outside."""

    mesh: Mesh
    coeffs: np.ndarray

    def __post_init__(self):
        c = np.asarray(self.coeffs, dtype=float)
        if c.shape != (self.mesh.n,):
            raise InputError("coefficient vector length must match node count")
        object.__setattr__(self, "coeffs", c)

    def values_with_boundary(self) -> np.ndarray:
        return np.concatenate(([0.0], self.coeffs, [0.0]))

    def as_field(self) -> ScalarField:
        return grid_interpolant(self.mesh, self.coeffs)

    def max_abs(self) -> float:
        return float(np.max(np.abs(self.coeffs))) if self.mesh.n else 0.0


def grid_interpolant(mesh: Mesh, coeffs: Sequence[float]) -> ScalarField:
    """Piecewise-linear field through the nodal values, zero beyond (a, b)."""
    xp = np.concatenate(([mesh.a], mesh.nodes, [mesh.b]))
    fp = np.concatenate(([0.0], np.asarray(coeffs, dtype=float), [0.0]))

    def ev(x):
        return np.interp(np.asarray(x, dtype=float), xp, fp, left=0.0, right=0.0)

    return ScalarField(
        evaluate=ev,
        second_derivative=None,
        kinks=tuple(xp),
        tail=TailExpansion(max(abs(mesh.a), abs(mesh.b))),
        name=f"interpolant(n={mesh.n})",
        tame_kinks=True,
    )


# ---------------------------------------------------------------------------
# hat-correlation kernel: closed-form nonlocal entries
# ---------------------------------------------------------------------------

# cubic B-spline pieces of Q(t) = int hat(y+t) hat(y) dy, ascending coeffs
_Q_PIECES = {
    (0, 1): (2.0 / 3.0, 0.0, -1.0, 0.5),
    (1, 2): (4.0 / 3.0, -2.0, 1.0, -1.0 / 6.0),
}


def _q_value(t: float) -> float:
    t = abs(t)
    if t >= 2.0:
        return 0.0
    lo = 0 if t < 1.0 else 1
    c = _Q_PIECES[(lo, lo + 1)]
    return c[0] + t * (c[1] + t * (c[2] + t * c[3]))


def _q_poly_at(offset: float, t_mid: float):
    """Coefficients (in t, ascending) of Q(t + offset) near t = t_mid."""
    tau = t_mid + offset
    a = abs(tau)
    if a >= 2.0:
        return None
    lo = 0 if a < 1.0 else 1
    c = list(_Q_PIECES[(lo, lo + 1)])
    if tau < 0.0:  # mirror: Q is even
        c = [c[0], -c[1], c[2], -c[3]]
    # substitute tau = t + offset into c0 + c1 tau + c2 tau^2 + c3 tau^3
    out = [0.0, 0.0, 0.0, 0.0]
    for k, ck in enumerate(c):
        for j in range(k + 1):
            out[j] += ck * math.comb(k, j) * offset ** (k - j)
    return out


def _power_moment(k: int, a: float, b: float, s: float) -> float:
    """int_a^b t^(k - 1 - 2s) dt with the logarithmic branch at k = 2s... 1."""
    e = k - 2.0 * s
    if abs(e) < 1e-14:
        return math.log(b / a)
    if a == 0.0:
        return b**e / e
    return (b**e - a**e) / e


def _correlation_moment(m: int, s: float) -> float:
    """G(m) = int_0^inf t^(-1-2s) [2 Q(m) - Q(t-m) - Q(t+m)] dt, exact."""
    qm = _q_value(float(m))
    candidates = {m + k for k in range(-2, 3)} | {k - m for k in range(-2, 3)}
    lo_edge = 0.0 if m < 2 else float(m - 2)
    pts = [lo_edge] + sorted(float(b) for b in candidates if lo_edge < b <= m + 2)
    total = 0.0
    for a, b in zip(pts[:-1], pts[1:]):
        mid = 0.5 * (a + b)
        coeffs = [0.0, 0.0, 0.0, 0.0]
        coeffs[0] = 2.0 * qm
        for off in (-m, m):
            piece = _q_poly_at(off, mid)
            if piece is not None:
                for k in range(4):
                    coeffs[k] -= piece[k]
        if a == 0.0:
            # the integrand vanishes to second order at t = 0
            if abs(coeffs[0]) > 1e-12 or abs(coeffs[1]) > 1e-12:
                raise AssertionError("correlation kernel must vanish at 0")
            coeffs[0] = coeffs[1] = 0.0
        total += sum(
            ck * _power_moment(k, a, b, s) for k, ck in enumerate(coeffs) if ck != 0.0
        )
    if qm != 0.0:
        total += 2.0 * qm * (m + 2.0) ** (-2.0 * s) / (2.0 * s)
    return total


def nonlocal_stiffness(mesh: Mesh, params: OperatorParams,
                       quad: QuadratureSpec | None = None) -> np.ndarray:
    """Dense symmetric matrix of the full-plane Gagliardo form on the hats.

    Entries are (c_{1,s}/2) * intint over R x R of the hat-difference
    product against |x-y|^{-1-2s}; on a uniform mesh they reduce to exact
    breakpoint integrals of the hat correlation spline, so the result is
    Toeplitz and includes the exterior strips analytically.  ``quad`` is
    accepted for interface symmetry; the entries do not need it.
    """
    if params.n_dim != 1:
        raise DomainError("the Galerkin assembly is one-dimensional")
    s = params.s
    scale = params.c_ns * mesh.h ** (1.0 - 2.0 * s)
    first_row = np.array([scale * _correlation_moment(m, s) for m in range(mesh.n)])
    idx = np.abs(np.subtract.outer(np.arange(mesh.n), np.arange(mesh.n)))
    return first_row[idx]


def local_stiffness(mesh: Mesh) -> np.ndarray:
    """Tridiagonal gradient Gram matrix: 2/h on the diagonal, -1/h off it."""
    n = mesh.n
    mat = np.zeros((n, n))
    np.fill_diagonal(mat, 2.0 / mesh.h)
    off = -1.0 / mesh.h
    for i in range(n - 1):
        mat[i, i + 1] = off
        mat[i + 1, i] = off
    return mat


def load_vector(f: ScalarField, mesh: Mesh) -> np.ndarray:
    """Components int f phi_i, by 6-point Gauss on each element."""
    edges = mesh.element_edges()
    mid = 0.5 * (edges[:-1] + edges[1:])
    half = 0.5 * mesh.h
    pts = mid[:, None] + half * _LOAD_GAUSS_X[None, :]
    w = half * _LOAD_GAUSS_W[None, :]
    vals = f.evaluate(pts.ravel()).reshape(pts.shape)
    if not np.all(np.isfinite(vals)):
        raise InputError("load function produced non-finite samples")
    # on element k the rising hat is phi_{k} (node edges[k+1]), the falling
    # hat is phi_{k-1}; interior node i collects from elements i-1 and i
    t = (pts - edges[:-1, None]) / mesh.h
    rising = np.sum(w * vals * t, axis=1)     # weight of node at right edge
    falling = np.sum(w * vals * (1.0 - t), axis=1)  # node at left edge
    b = np.zeros(mesh.n)
    b += rising[: mesh.n]
    b += falling[1 : mesh.n + 1]
    return b


@dataclass(frozen=True)
class StiffnessSystem:
    """Assembled local + nonlocal stiffness with its provenance."""

    local: np.ndarray
    nonlocal_: np.ndarray
    params: OperatorParams
    mesh: Mesh
    meta: dict = field(default_factory=dict)

    def combined(self) -> np.ndarray:
        return self.local + self.nonlocal_


def build_system(mesh: Mesh, params: OperatorParams,
                 quad: QuadratureSpec | None = None,
                 include_local: bool = True,
                 include_nonlocal: bool = True) -> StiffnessSystem:
    """Assemble the discrete operator; parts can be dropped for contrast runs."""
    n = mesh.n
    loc = local_stiffness(mesh) if include_local else np.zeros((n, n))
    non = nonlocal_stiffness(mesh, params, quad) if include_nonlocal else np.zeros((n, n))
    meta = {
        "method": "exact hat-correlation moments",
        "include_local": include_local,
        "include_nonlocal": include_nonlocal,
        "c_ns": params.c_ns,
        "s": params.s,
    }
    return StiffnessSystem(local=loc, nonlocal_=non, params=params, mesh=mesh, meta=meta)


def bilinear_eval(u: GridFunction, v: GridFunction, sys: StiffnessSystem) -> float:
    """u^T (local + nonlocal) v for grid functions on the system's mesh."""
    if u.mesh != sys.mesh or v.mesh != sys.mesh:
        raise DomainError("grid functions must live on the system's mesh")
    return float(u.coeffs @ sys.combined() @ v.coeffs)


def export_matrix(path, mat: np.ndarray, comment: str = "") -> None:
    """Plain-text triplet dump: header line, then `i j value` rows (1-based)."""
    mat = np.asarray(mat)
    with open(path, "w") as fh:
        fh.write(f"%%matrix coordinate real general  {comment}\n")
        fh.write(f"{mat.shape[0]} {mat.shape[1]} {mat.size}\n")
        for i in range(mat.shape[0]):
            for j in range(mat.shape[1]):
                fh.write(f"{i + 1} {j + 1} {mat[i, j]:.17g}\n")
