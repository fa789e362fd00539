"""Closed-form unit-disk distance functions, gradients, and geodesics.

These analytic results serve as ground truth for the discrete solvers.
Points are complex numbers; the open unit disk is the domain.  Formulas:

    green(w, z)    = -log(|w-z| / |1 - conj(z)*w|) / (2*pi)
    neumann(w, z)  = -log(|w-z| * |1 - conj(z)*w|) / (2*pi)
    poisson(s, z)  = (1 - |z|^2) / (2*pi*|s-z|^2),  |s| = 1

Radial profiles ``g`` describe each distance to a target at the origin as a
function of x = |z|, and ``r`` its gradient factor (gradient = r(x) * z).
For an arbitrary convex ``f`` with f(1) = 0 the profile is the circle
average of f over the Poisson-kernel ratio, evaluated by quadrature.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass
from typing import Callable

import numpy as np
from scipy.integrate import quad

TWO_PI = 2.0 * math.pi


def _check_interior(*zs):
    for z in zs:
        if abs(z) >= 1.0:
            raise ValueError(f"point {z} is not strictly inside the unit disk")


def disk_green(w: complex, z: complex) -> float:
    """Dirichlet Green's function of the unit disk (symmetric, >= 0)."""
    _check_interior(w, z)
    if w == z:
        raise ValueError("green is singular at w == z")
    return -math.log(abs(w - z) / abs(1.0 - z.conjugate() * w)) / TWO_PI


def disk_neumann(w: complex, z: complex) -> float:
    """Boundary-normalized Neumann function of the unit disk."""
    _check_interior(w, z)
    if w == z:
        raise ValueError("neumann is singular at w == z")
    return -math.log(abs(w - z) * abs(1.0 - z.conjugate() * w)) / TWO_PI


def disk_poisson(s: complex, z: complex) -> float:
    """Poisson kernel density at boundary point s (|s| = 1) seen from z."""
    if abs(abs(s) - 1.0) > 1e-12:
        raise ValueError(f"|s| must be 1, got {abs(s)}")
    _check_interior(z)
    return (1.0 - abs(z) ** 2) / (TWO_PI * abs(s - z) ** 2)


def hyperbolic_distance(w: complex, z: complex) -> float:
    """Poincare metric of the disk: 2 atanh(|w-z| / |1 - conj(w) z|)."""
    _check_interior(w, z)
    return 2.0 * math.atanh(abs(w - z) / abs(1.0 - w.conjugate() * z))


# ---------------------------------------------------------------------------
# Radial profiles
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class RadialProfile:
    """Distance-to-origin profile g(x) and gradient factor r(x) = g'(x)/x."""

    kind: str
    g: Callable[[float], float]
    r: Callable[[float], float]


def _quad_profile(f) -> tuple[Callable, Callable]:
    def g(x: float) -> float:
        if not 0.0 <= x < 1.0:
            raise ValueError("profile argument must be in [0, 1)")
        if x == 0.0:
            return 0.0

        def integrand(phi):
            h = (1.0 - x * x) / (1.0 - 2.0 * x * math.cos(phi) + x * x)
            return float(f(h))

        val, _ = quad(integrand, 0.0, TWO_PI, epsabs=1e-10, limit=200)
        return val / TWO_PI

    def r(x: float) -> float:
        h = 1e-6 * x
        return (g(x + h) - g(x - h)) / (2.0 * h) / x

    return g, r


_CLOSED_FORMS = {
    "D": (lambda x: math.log(x) / TWO_PI,
          lambda x: 1.0 / (TWO_PI * x * x)),
    "HB": (lambda x: 2.0 * math.atanh(x),
           lambda x: 2.0 / (x * (1.0 - x * x))),
    "KL": (lambda x: -math.log(1.0 - x * x),
           lambda x: 2.0 / (1.0 - x * x)),
    "TV": (lambda x: 4.0 * math.asin(x) / math.pi,
           lambda x: 4.0 / (math.pi * x * math.sqrt(1.0 - x * x))),
    "chi2": (lambda x: (1.0 + x * x) / (1.0 - x * x),
             lambda x: 4.0 / (1.0 - x * x) ** 2),
}


def radial_profile(kind: str, f: Callable | None = None) -> RadialProfile:
    """Profile for one of D, HB, KL, TV, chi2, or generic-f.

    ``generic-f`` needs a convex scalar function ``f`` with f(1) = 0 and
    integrates the circle average adaptively (absolute tolerance 1e-10);
    its gradient factor uses centered differencing with step 1e-6*x.

    The chi2 row is kept in its tabulated form with g(0) = 1; divergence
    values correspond to g(x) - g(0).
    """
    if kind in _CLOSED_FORMS:
        g, r = _CLOSED_FORMS[kind]
        return RadialProfile(kind, g, r)
    if kind == "generic-f":
        if f is None:
            raise ValueError("generic-f profile needs the function f")
        g, r = _quad_profile(f)
        return RadialProfile(kind, g, r)
    raise ValueError(f"unknown profile kind {kind!r}")


# ---------------------------------------------------------------------------
# Conformal machinery
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class MobiusMap:
    """Disk automorphism C(z) = (z - p) / (1 - conj(p) z) sending p to 0."""

    p: complex

    def __call__(self, z: complex) -> complex:
        return (z - self.p) / (1.0 - self.p.conjugate() * z)

    def derivative(self, z: complex) -> complex:
        return (1.0 - abs(self.p) ** 2) / (1.0 - self.p.conjugate() * z) ** 2

    def inverse(self, w: complex) -> complex:
        return (w + self.p) / (1.0 + self.p.conjugate() * w)


def mobius_to_origin(p: complex) -> MobiusMap:
    _check_interior(p)
    return MobiusMap(complex(p))


def hyperbolic_geodesic(p: complex, q: complex, samples: int = 64) -> np.ndarray:
    """Polyline along the hyperbolic geodesic from p to q.

    The geodesic is the arc of the circle through p and q orthogonal to the
    unit circle (a straight chord when p, q and 0 are collinear).  Sampled as
    the Moebius preimage of the straight segment [0, C(q)] with C(p) = 0, so
    endpoints are exact.
    """
    _check_interior(p, q)
    if p == q:
        raise ValueError("geodesic endpoints must differ")
    C = mobius_to_origin(p)
    w = C(complex(q))
    ts = np.linspace(0.0, 1.0, samples)
    pts = np.array([C.inverse(t * w) for t in ts])
    pts[0], pts[-1] = complex(p), complex(q)
    return np.column_stack([pts.real, pts.imag])


def disk_dv_gradient(kind: str, p: complex, q: complex,
                     f: Callable | None = None) -> np.ndarray:
    """Gradient at q of the chosen distance with target p, via pushforward.

    grad d(q) = r(|C(q)|) * C(q) * conj(C'(q)) with C the Moebius map sending
    p to 0.  Nonzero for every q != p.
    """
    _check_interior(p, q)
    if p == q:
        raise ValueError("gradient is undefined at the target")
    prof = radial_profile(kind, f)
    C = mobius_to_origin(p)
    w = C(complex(q))
    grad = prof.r(abs(w)) * w * C.derivative(complex(q)).conjugate()
    return np.array([grad.real, grad.imag])


def disk_dv_integral(f: Callable, z: complex, w: complex) -> float:
    """Boundary-integral divergence between z (weight) and w on the disk.

    Evaluates  oint P(s,z) f(P(s,w)/P(s,z)) ds  by adaptive quadrature;
    used to check conformal invariance numerically.
    """
    _check_interior(z, w)

    def integrand(theta):
        s = cmath.exp(1j * theta)
        pz = disk_poisson(s, z)
        pw = disk_poisson(s, w)
        return pz * float(f(pw / pz))

    val, _ = quad(integrand, 0.0, TWO_PI, epsabs=1e-10, limit=400)
    return val


def radial_profile_csv(kind: str, xs, f: Callable | None = None) -> str:
    """CSV dump 'x,g,r' of a profile at the given sample points."""
    prof = radial_profile(kind, f)
    lines = ["x,g,r"]
    for x in xs:
        lines.append(f"{x:.12g},{prof.g(float(x)):.12g},{prof.r(float(x)):.12g}")
    return "\n".join(lines) + "\n"
