"""Disc automorphisms sigma(z) = lam (z - a) / (1 - conj(a) z).

Composition goes through 2x2 matrices and is renormalized back into the
canonical (lam, a) pair.
"""

from dataclasses import dataclass
import cmath
import math

import numpy as np

from .errors import BadSpec, DegenerateComposite, PointOutsideDisc

UNIMODULAR_TOL = 1e-12
IDENTITY_TOL = 1e-12
CIRCLE_TOL = 1e-9
COINCIDE_TOL = 1e-9
# |a|^2 - |lam - 1|^2 / 4, relative to the sum of the two terms, below this
# is treated as a double fixed point
PARABOLIC_TOL = 1e-10

INFINITY = complex(math.inf, 0.0)


def _points(z):
    arr = np.asarray(z, dtype=complex)
    if np.any(np.abs(arr) >= 1.0):
        raise PointOutsideDisc("Moebius evaluation needs |z| < 1")
    return arr


def _ret(val, arr):
    return complex(val) if arr.ndim == 0 else val


@dataclass(frozen=True)
class DiscAutomorphism:
    lam: complex = 1.0
    a: complex = 0.0

    def __post_init__(self):
        lam, a = complex(self.lam), complex(self.a)
        if not (cmath.isfinite(lam) and cmath.isfinite(a)):
            raise BadSpec("automorphism parameters must be finite")
        if abs(abs(lam) - 1.0) > UNIMODULAR_TOL:
            raise BadSpec(f"|lambda| must be 1, got {abs(lam)!r}")
        if abs(a) >= 1.0:
            raise BadSpec(f"|a| must be < 1, got {abs(a)!r}")
        object.__setattr__(self, "lam", lam)
        object.__setattr__(self, "a", a)

    @classmethod
    def identity(cls):
        return cls(1.0, 0.0)

    @classmethod
    def rotation(cls, angle):
        return cls(cmath.exp(1j * angle), 0.0)

    @classmethod
    def from_matrix(cls, m):
        """Canonical pair of z -> (A z + B) / (C z + D).

        a is the preimage of 0 and lam = sigma'(a) (1 - |a|^2).
        """
        (A, B), (C, D) = np.asarray(m, dtype=complex)
        if A == 0:
            raise DegenerateComposite("matrix does not fix the disc (A = 0)")
        a = -B / A
        if not abs(a) < 1.0:
            raise DegenerateComposite(f"renormalized |a| = {abs(a)!r} >= 1")
        lam = (A * D - B * C) / (C * a + D) ** 2 * (1.0 - abs(a) ** 2)
        if abs(abs(lam) - 1.0) > 1e-8:
            raise DegenerateComposite(f"renormalized |lambda| = {abs(lam)!r} != 1")
        return cls(complex(lam / abs(lam)), complex(a))

    def matrix(self):
        return np.array([[self.lam, -self.lam * self.a],
                         [-self.a.conjugate(), 1.0]], dtype=complex)

    def is_identity(self, tol=IDENTITY_TOL):
        return abs(self.lam - 1.0) <= tol and abs(self.a) <= tol

    def _apply(self, z):
        return self.lam * (z - self.a) / (1.0 - self.a.conjugate() * z)

    def _deriv(self, z):
        return self.lam * (1.0 - abs(self.a) ** 2) / (1.0 - self.a.conjugate() * z) ** 2

    def __call__(self, z):
        arr = _points(z)
        return _ret(self._apply(arr), arr)

    def derivative(self, z):
        arr = _points(z)
        return _ret(self._deriv(arr), arr)

    def to_dict(self):
        return {"lambda_re": self.lam.real, "lambda_im": self.lam.imag,
                "a_re": self.a.real, "a_im": self.a.imag}

    @classmethod
    def from_dict(cls, d):
        lam = complex(float(d.get("lambda_re", 1.0)), float(d.get("lambda_im", 0.0)))
        a = complex(float(d.get("a_re", 0.0)), float(d.get("a_im", 0.0)))
        return cls(lam, a)


def moebius_eval(sigma, z):
    return sigma(z)


def moebius_derivative(sigma, z):
    return sigma.derivative(z)


def compose(first, second):
    """second o first: apply ``first``, then ``second``."""
    return DiscAutomorphism.from_matrix(second.matrix() @ first.matrix())


def inverse(sigma):
    return DiscAutomorphism(sigma.lam.conjugate(), -sigma.lam * sigma.a)


def random_automorphism(rng, a_radius=0.75):
    """Seeded automorphism with |a| area-uniform below ``a_radius``."""
    lam = rng.unimodular()
    a = rng.disc_point(a_radius)
    return DiscAutomorphism(lam, a)


@dataclass(frozen=True)
class FixedPointReport:
    points: tuple
    classification: str

    def to_dict(self):
        pts = [("inf" if cmath.isinf(p) else [p.real, p.imag]) for p in self.points]
        return {"classification": self.classification, "points": pts}


def fixed_points(sigma):
    """Fixed points on the extended plane and the dynamical class.

    Solves conj(a) z^2 + (lam - 1) z - lam a = 0.  The class is read off the
    sign of |a|^2 - |lam - 1|^2/4 (a rescaled discriminant), measured relative
    to the size of its two terms.  That is better conditioned than comparing
    the two roots near the parabolic case and stays scale-free near the
    identity.
    """
    lam, a = sigma.lam, sigma.a
    if sigma.is_identity():
        return FixedPointReport((), "identity")
    A, B, C = a.conjugate(), lam - 1.0, -lam * a
    half = abs(lam - 1.0) ** 2 / 4.0
    gap = abs(a) ** 2 - half
    if abs(a) <= IDENTITY_TOL:
        # affine: (lam - 1) z = 0 plus the point at infinity
        return FixedPointReport((0j, INFINITY), "elliptic")
    if abs(gap) <= PARABOLIC_TOL * (abs(a) ** 2 + half):
        z = -B / (2.0 * A)
        return FixedPointReport((complex(z / abs(z)),), "parabolic")
    root = cmath.sqrt(B * B - 4.0 * A * C)
    q = -(B + root) if (B.conjugate() * root).real >= 0 else -(B - root)
    z1, z2 = q / (2.0 * A), 2.0 * C / q
    if gap > 0:
        # both roots sit on the circle; snap away rounding
        pts = tuple(sorted((complex(z1 / abs(z1)), complex(z2 / abs(z2))),
                           key=lambda p: (cmath.phase(p), abs(p))))
        return FixedPointReport(pts, "hyperbolic")
    inside, outside = (z1, z2) if abs(z1) < abs(z2) else (z2, z1)
    return FixedPointReport((complex(inside), complex(outside)), "elliptic")
