"""Anchors against the classical closed-form profile (1 - |x|^2)^s_+.

Its fractional image is the constant 2^{2s} Gamma(s+1) Gamma((N+2s)/2) /
Gamma(N/2) inside the unit ball, which exercises the kernel engines (1D and
radial) and, through the zero-exterior solve with a constant load, the whole
assembly/solve pipeline against an exact solution.
"""

import math

import numpy as np
import pytest
from scipy.special import gamma as _gamma

from mixlap import fields
from mixlap.assembly import build_mesh, build_system
from mixlap.kernel import OperatorParams, frac_apply
from mixlap.solve import solve_dirichlet


def _image_constant(n_dim: int, s: float) -> float:
    return (2.0 ** (2.0 * s) * _gamma(s + 1.0) * _gamma((n_dim + 2.0 * s) / 2.0)
            / _gamma(n_dim / 2.0))


def _cap_profile_1d(s: float) -> fields.ScalarField:
    def ev(x):
        x = np.asarray(x, dtype=float)
        g = np.maximum(1.0 - x * x, 0.0)
        return g**s

    def d2(x):
        g = 1.0 - x * x
        if g <= 0.0:
            return 0.0
        return -2.0 * s * g ** (s - 1.0) + 4.0 * s * (s - 1.0) * x * x * g ** (s - 2.0)

    return fields.ScalarField(
        evaluate=ev, second_derivative=d2, kinks=(-1.0, 1.0),
        tail=fields.TailExpansion(1.0), name=f"(1-x^2)^{s}",
    )


def _cap_profile_radial(s: float) -> fields.RadialField:
    def prof(r):
        r = np.asarray(r, dtype=float)
        g = np.maximum(1.0 - r * r, 0.0)
        return g**s

    def d1(r):
        g = 1.0 - r * r
        return -2.0 * s * r * g ** (s - 1.0) if g > 0.0 else 0.0

    def d2(r):
        g = 1.0 - r * r
        if g <= 0.0:
            return 0.0
        return -2.0 * s * g ** (s - 1.0) + 4.0 * s * (s - 1.0) * r * r * g ** (s - 2.0)

    return fields.RadialField(
        profile=prof, d_profile=d1, dd_profile=d2, support_radius=1.0,
        kinks=(1.0,), name=f"(1-r^2)^{s}",
    )


@pytest.mark.parametrize("s", [0.25, 0.5, 0.75])
def test_profile_image_is_constant_1d(s, quad):
    params = OperatorParams(1, s)
    u = _cap_profile_1d(s)
    lam = _image_constant(1, s)
    for x in (-0.8, -0.3, 0.0, 0.45, 0.9):
        val = frac_apply(u, x, params, quad)
        assert val == pytest.approx(lam, rel=1e-8)


@pytest.mark.parametrize("n_dim", [2, 3])
@pytest.mark.parametrize("s", [0.3, 0.5, 0.75, 0.9])
def test_profile_image_is_constant_radial(n_dim, s, quad):
    params = OperatorParams(n_dim, s)
    u = _cap_profile_radial(s)
    lam = _image_constant(n_dim, s)
    for r in (0.0, 0.35, 0.7):
        x = np.zeros(n_dim)
        x[0] = r
        val = frac_apply(u, x, params, quad)
        assert val == pytest.approx(lam, rel=1e-8)


def test_pure_fractional_solve_converges_to_profile(quad):
    # zero-exterior solve of the pure fractional operator with unit load:
    # the exact solution is the cap profile over its image constant
    s = 0.5
    lam = _image_constant(1, s)
    params = OperatorParams(1, s)
    errors = []
    for n in (63, 127, 255):
        mesh = build_mesh(-1.0, 1.0, n)
        sys_ = build_system(mesh, params, include_local=False)
        rep = solve_dirichlet(sys_, fields.constant(1.0))
        exact = (1.0 - mesh.nodes**2) ** s / lam
        errors.append(float(np.max(np.abs(rep.solution.coeffs - exact))))
    assert errors[0] > errors[1] > errors[2]
    # the boundary-limited uniform-mesh rate is about h^(1/2) at this order
    for e0, e1 in zip(errors[:-1], errors[1:]):
        assert 1.2 < e0 / e1 < 2.5
    assert errors[-1] < 6e-3
