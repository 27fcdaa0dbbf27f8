"""Surjective isometries of the little Zygmund spaces and the diagonal
hermitian operators on Z0.

The canonical isometry on Z0^(0,1) is

    T f(z) = e^{i alpha} int_0^z [f'(sigma(xi)) - f'(sigma(0))] dxi,

so that (T f)'' = e^{i alpha} sigma' . f'' o sigma.  Operator outputs are
lazy :class:`TransformedFunction` objects carrying closed-form first and
second derivatives; values go through Gauss-Legendre path integration.
"""

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
import cmath
import math
import os

import numpy as np

from .analytic import (DEFAULT_SETTINGS, TransformedFunction, _as_points, _check_disc,
                       _derivative_raw, _path_integral_raw)
from .moebius import DiscAutomorphism, compose, inverse
from .zygmund import DEFAULT_GRID, SpaceVariant, require_membership, zygmund_norm

TWO_PI = 2 * math.pi


def _phase(x):
    return float(x) % TWO_PI


def _unit(t):
    return complex(math.cos(t), math.sin(t))


@dataclass(frozen=True)
class CanonicalIsometry:
    alpha: float = 0.0
    sigma: DiscAutomorphism = field(default_factory=DiscAutomorphism.identity)

    def __post_init__(self):
        object.__setattr__(self, "alpha", _phase(self.alpha))

    @classmethod
    def identity(cls):
        return cls(0.0, DiscAutomorphism.identity())

    def to_dict(self):
        return {"type": "canonical", "alpha": self.alpha, "sigma": self.sigma.to_dict()}


@dataclass(frozen=True)
class FullIsometry:
    theta: float = 0.0
    eta: float = 0.0
    alpha: float = 0.0
    sigma: DiscAutomorphism = field(default_factory=DiscAutomorphism.identity)

    def __post_init__(self):
        for name in ("theta", "eta", "alpha"):
            object.__setattr__(self, name, _phase(getattr(self, name)))

    def to_dict(self):
        return {"type": "full", "theta": self.theta, "eta": self.eta, "alpha": self.alpha,
                "sigma": self.sigma.to_dict()}


@dataclass(frozen=True)
class HermitianDiagonal:
    a1: float = 0.0
    a2: float = 0.0
    a3: float = 0.0

    def to_dict(self):
        return {"type": "hermitian", "a1": self.a1, "a2": self.a2, "a3": self.a3}


def _integral_part(alpha, sigma, f, settings):
    """e^{i alpha} int_0^z [f'(sigma(xi)) - f'(sigma(0))] dxi with closed derivatives."""
    rot = _unit(alpha)
    s0 = np.asarray(sigma._apply(0j))
    fp_s0 = complex(_derivative_raw(f, s0, 1, settings))

    def integrand(xi):
        return _derivative_raw(f, sigma._apply(xi), 1, settings) - fp_s0

    def value(z):
        return rot * _path_integral_raw(integrand, z, settings)

    def d1(z):
        return rot * integrand(z)

    def d2(z):
        return rot * sigma._deriv(z) * _derivative_raw(f, sigma._apply(z), 2, settings)

    return value, d1, d2


def apply_canonical(T, f, settings=DEFAULT_SETTINGS, check=True):
    """T f for f in Z0^(0,1).  Raises NotInSpace unless ``check`` is False."""
    if check:
        require_membership(f, SpaceVariant.Z0_01, settings)
    value, d1, d2 = _integral_part(T.alpha, T.sigma, f, settings)
    return TransformedFunction(value, {1: d1, 2: d2}, label=f"T[{f.label}]",
                               operator=T.to_dict(), source=f)


def second_derivative_direct(T, f, z, settings=DEFAULT_SETTINGS):
    """(T f)''(z) = e^{i alpha} sigma'(z) f''(sigma(z)), no quadrature."""
    arr = _as_points(z)
    _check_disc(arr)
    out = _unit(T.alpha) * T.sigma._deriv(arr) * _derivative_raw(
        f, T.sigma._apply(arr), 2, settings)
    return complex(out) if arr.ndim == 0 else out


def compose_isometries(T1, T2):
    """The isometry ``T1 o T2`` (apply T2 first); its automorphism is sigma2 o sigma1."""
    return CanonicalIsometry(T1.alpha + T2.alpha, compose(T1.sigma, T2.sigma))


def invert_isometry(T):
    return CanonicalIsometry(-T.alpha, inverse(T.sigma))


def adjoint_on_extreme(T, theta, z):
    """Image of e^{i theta} delta_z under the adjoint: returns (phase, w).

    w = sigma(z) and phase = theta + alpha + arg sigma'(z), so that
    (1-|z|^2) e^{i theta} (Tf)''(z) = e^{i phase} (1-|w|^2) f''(w).
    """
    w = T.sigma(z)
    phase = theta + T.alpha + cmath.phase(T.sigma.derivative(z))
    return _phase(phase), w


def apply_full(T, f, settings=DEFAULT_SETTINGS, check=True):
    """e^{i theta} f(0) + e^{i eta} f'(0) z + e^{i alpha} int_0^z [f'(sigma) - f'(sigma(0))]."""
    if check:
        require_membership(f, SpaceVariant.Z0, settings)
    origin = np.zeros((), dtype=complex)
    c0 = _unit(T.theta) * complex(f._eval(origin))
    c1 = _unit(T.eta) * complex(_derivative_raw(f, origin, 1, settings))
    value, d1, d2 = _integral_part(T.alpha, T.sigma, f, settings)
    return TransformedFunction(
        lambda z: c0 + c1 * z + value(z),
        {1: lambda z: c1 + d1(z), 2: d2},
        label=f"T_full[{f.label}]", operator=T.to_dict(), source=f)


def hermitian_apply(S, f, settings=DEFAULT_SETTINGS, check=True):
    """S f = a1 f(0) + a2 f'(0) z + a3 f."""
    if check:
        require_membership(f, SpaceVariant.Z0, settings)
    origin = np.zeros((), dtype=complex)
    c0 = S.a1 * complex(f._eval(origin))
    c1 = S.a2 * complex(_derivative_raw(f, origin, 1, settings))
    return TransformedFunction(
        lambda z: c0 + c1 * z + S.a3 * f._eval(z),
        {1: lambda z: c1 + S.a3 * _derivative_raw(f, z, 1, settings),
         2: lambda z: S.a3 * _derivative_raw(f, z, 2, settings)},
        label=f"S[{f.label}]", operator=S.to_dict(), source=f)


def hermitian_exponential(S, t):
    """e^{itS} as a full isometry with identity automorphism.

    On f = f(0) + f'(0) z + g the three pieces are eigenvectors of S with
    eigenvalues a1 + a3, a2 + a3 and a3.
    """
    return FullIsometry(theta=t * (S.a1 + S.a3), eta=t * (S.a2 + S.a3), alpha=t * S.a3,
                        sigma=DiscAutomorphism.identity())


def _threads():
    try:
        n = int(os.environ.get("ZYGLAB_THREADS", "1"))
    except ValueError:
        n = 1
    return max(n, 1)


def parallel_map(fn, items):
    """Ordered map, threaded when ZYGLAB_THREADS > 1."""
    items = list(items)
    n = _threads()
    if n == 1 or len(items) < 2:
        return [fn(x) for x in items]
    with ThreadPoolExecutor(max_workers=n) as pool:
        return list(pool.map(fn, items))


def verify_isometry(T, suite, settings=DEFAULT_SETTINGS, grid=DEFAULT_GRID):
    """Relative deviation | ||Tf|| - ||f|| | / ||f|| for every f in ``suite``."""
    apply = apply_full if isinstance(T, FullIsometry) else apply_canonical

    def row(f):
        before = zygmund_norm(f, settings, grid).total
        after = zygmund_norm(apply(T, f, settings), settings, grid).total
        dev = abs(after - before) / before if before > 0 else abs(after)
        return {"function": f.label, "norm": before, "image_norm": after,
                "relative_deviation": dev}

    table = parallel_map(row, suite)
    worst = max((r["relative_deviation"] for r in table), default=0.0)
    return {"operator": T.to_dict(), "max_relative_deviation": worst, "table": table}
