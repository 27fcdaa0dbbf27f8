"""Zygmund norm, the embedding Phi f = (1-|z|^2) f'', membership tests and
extreme-point functionals of the dual balls.
"""

from dataclasses import dataclass, field
from enum import Enum
import csv
import math
import warnings

import numpy as np
from scipy.optimize import minimize

from .analytic import (DEFAULT_SETTINGS, _as_points, _check_disc, _derivative_raw,
                       derivative, evaluate, peaking)
from .errors import BadSpec, GridTooCoarse, NotInSpace


@dataclass(frozen=True)
class GridSettings:
    n_r: int = 64
    n_theta: int = 256
    r_max: float = 0.999
    simplex_tol: float = 1e-10
    max_iter: int = 4000
    candidates: int = 4

    def __post_init__(self):
        if self.n_r < 1 or self.n_theta < 1 or self.candidates < 1:
            raise BadSpec("grid sizes must be positive")
        if not 0.0 < self.r_max < 1.0:
            raise BadSpec("r_max must lie in (0, 1)")


DEFAULT_GRID = GridSettings()


class SpaceVariant(str, Enum):
    Z0 = "Z0"
    Z0_I0 = "Z0_i0"
    Z0_I1 = "Z0_i1"
    Z0_01 = "Z0_01"


@dataclass
class ZygmundNormReport:
    value_at_zero: float
    deriv_at_zero: float
    seminorm: float
    argmax: complex
    total: float
    grid_meta: dict = field(default_factory=dict)

    def to_dict(self):
        return {"value_at_zero": self.value_at_zero, "deriv_at_zero": self.deriv_at_zero,
                "seminorm": self.seminorm, "argmax": [self.argmax.real, self.argmax.imag],
                "total": self.total, "grid_meta": dict(self.grid_meta)}


def _phi_raw(f, z, settings):
    return (1.0 - np.abs(z) ** 2) * _derivative_raw(f, z, 2, settings, "direct")


def phi_embed(f, z, settings=DEFAULT_SETTINGS):
    """Phi f(z) = (1 - |z|^2) f''(z), using closed-form f'' when available."""
    arr = _as_points(z)
    _check_disc(arr)
    out = _phi_raw(f, arr, settings)
    return complex(out) if arr.ndim == 0 else out


def polar_grid(n_r, n_theta, r_max=0.999):
    """Radii clustered geometrically toward r_max, equispaced angles."""
    if n_r == 1:
        radii = np.zeros(1)
    else:
        radii = 1.0 - (1.0 - r_max) ** (np.arange(n_r) / (n_r - 1))
    theta = 2 * np.pi * np.arange(n_theta) / n_theta
    return radii, theta


def _grid_candidates(vals, radii, limit):
    """Flat indices of grid-local maxima within 10% of the best cell.

    Neighbours wrap in angle and a zero-radius row counts as one point.  Ties
    resolve to the smallest radius, then the smallest angle.  At most
    ``limit`` indices, best first.
    """
    padded = np.pad(vals, ((1, 1), (0, 0)), constant_values=-np.inf)
    centre = padded[1:-1]
    peak = np.ones(vals.shape, dtype=bool)
    for di in (-1, 0, 1):
        for dj in (-1, 0, 1):
            if di or dj:
                peak &= centre >= np.roll(padded, (-di, -dj), axis=(0, 1))[1:-1]
    peak[radii == 0, 1:] = False
    flat = vals.ravel()
    idx = np.flatnonzero(peak.ravel() & (flat >= 0.9 * flat.max()))
    order = np.lexsort((idx, -flat[idx]))
    best = int(np.argmax(flat))
    picked = [best] + [int(k) for k in idx[order] if k != best]
    return picked[:limit]


def maximize_on_disc(func, grid=DEFAULT_GRID):
    """Maximize ``func`` (array of points -> nonnegative reals) over |z| <= r_max.

    Stage 1 scans the polar grid; ties resolve to the smallest radius, then
    the smallest angle.  The best cell and up to ``grid.candidates - 1``
    further grid-local maxima within 10% of it are each sharpened by three
    vectorized 7x7 zooms on a square patch the size of the cell.  Stage 2
    runs Nelder-Mead on -func from the sharpest candidate, with points beyond
    r_max projected radially back onto that circle.  Returns
    (value, argmax, meta).
    """
    radii, theta = polar_grid(grid.n_r, grid.n_theta, grid.r_max)
    pts = radii[:, None] * np.exp(1j * theta)[None, :]
    vals = np.asarray(func(pts), dtype=float)
    seeds = _grid_candidates(vals, radii, grid.candidates)
    i, j = divmod(seeds[0], grid.n_theta)
    best0, z0 = float(vals[i, j]), complex(pts[i, j])
    r_max = grid.r_max
    u = np.linspace(-1.0, 1.0, 7)
    offsets = u[:, None] + 1j * u[None, :]

    def clip(z):
        r = np.abs(z)
        return np.where(r > r_max, z * (r_max / np.maximum(r, r_max)), z)

    def zoom(k):
        i, j = divmod(k, grid.n_theta)
        if radii.size > 1:
            dr = (radii[min(i + 1, radii.size - 1)] - radii[max(i - 1, 0)]) / 2
        else:
            dr = 0.1
        h = max(dr, radii[i] * 2 * np.pi / grid.n_theta, 1e-6)
        z, val = complex(pts[i, j]), float(vals[i, j])
        for _ in range(3):
            patch = clip(z + h * offsets)
            pv = np.asarray(func(patch), dtype=float)
            a = int(np.argmax(pv))
            if pv.flat[a] > val:
                z, val = complex(patch.flat[a]), float(pv.flat[a])
            h /= 3
        return val, z, h

    val_s, zs, hs = max((zoom(k) for k in seeds), key=lambda c: c[0])

    def project(x):
        z = complex(x[0], x[1])
        r = abs(z)
        return z * (r_max / r) if r > r_max else z

    def objective(x):
        return -float(func(np.asarray(project(x))))

    simplex = np.array([[zs.real, zs.imag], [zs.real + hs, zs.imag], [zs.real, zs.imag + hs]])
    res = minimize(objective, np.array([zs.real, zs.imag]), method="Nelder-Mead",
                   options={"initial_simplex": simplex, "xatol": grid.simplex_tol,
                            "fatol": 1e-14 * max(best0, 1e-300), "maxiter": grid.max_iter,
                            "maxfev": 2 * grid.max_iter})
    z1 = project(res.x)
    best1 = -float(res.fun)
    if best1 > best0 + 0.1 * best0:
        warnings.warn(f"refinement raised the grid maximum {best0:.6g} -> {best1:.6g}",
                      GridTooCoarse, stacklevel=3)
    value, argmax = max([(best1, z1), (val_s, zs), (best0, z0)], key=lambda c: c[0])
    meta = {"n_r": grid.n_r, "n_theta": grid.n_theta, "r_max": grid.r_max,
            "candidates": len(seeds), "refinement_iterations": int(res.nit),
            "grid_value": best0}
    return value, argmax, meta


def zygmund_norm(f, settings=DEFAULT_SETTINGS, grid=DEFAULT_GRID):
    """|f(0)| + |f'(0)| + sup (1-|z|^2)|f''(z)|, with the located maximizer."""
    origin = np.zeros((), dtype=complex)
    v0 = abs(complex(np.asarray(f._eval(origin))))
    d0 = abs(complex(_derivative_raw(f, origin, 1, settings, "direct")))
    semi, argmax, meta = maximize_on_disc(lambda z: np.abs(_phi_raw(f, z, settings)), grid)
    return ZygmundNormReport(v0, d0, semi, argmax, v0 + d0 + semi, meta)


def phi_sup(f, settings=DEFAULT_SETTINGS, grid=DEFAULT_GRID):
    """sup |Phi f| over the disc; same maximizer as :func:`zygmund_norm`."""
    value, argmax, _ = maximize_on_disc(lambda z: np.abs(_phi_raw(f, z, settings)), grid)
    return value, argmax


def weighted_grid(f, n_r, n_theta, settings=DEFAULT_SETTINGS, r_max=0.999):
    """Rows (r, theta, |Phi f|) over the polar grid, radius-major."""
    radii, theta = polar_grid(n_r, n_theta, r_max)
    pts = radii[:, None] * np.exp(1j * theta)[None, :]
    vals = np.abs(_phi_raw(f, pts, settings))
    return [(float(radii[i]), float(theta[j]), float(vals[i, j]))
            for i in range(radii.size) for j in range(theta.size)]


def write_grid_csv(rows, path):
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["r", "theta", "value"])
        for r, t, v in rows:
            w.writerow([repr(r), repr(t), repr(v)])


@dataclass
class LittleZygmundReport:
    is_member: bool
    boundary_profile: list

    def to_dict(self):
        return {"is_member": self.is_member,
                "boundary_profile": [list(p) for p in self.boundary_profile]}


PROFILE_RADII = (0.9, 0.99, 0.999, 0.9999)


def little_zygmund_check(f, settings=DEFAULT_SETTINGS, n_theta=256):
    """Finite-sample test of (1-|z|^2)|f''(z)| -> 0 as |z| -> 1.

    M(r) = max over n_theta angles of |Phi f(r e^{it})| for r in
    0.9, 0.99, 0.999, 0.9999.  Membership needs M strictly decreasing over
    the last three radii and M(0.9999) below 1% of max M (or below 1e-6).
    This is a heuristic verifier, not a decision procedure.
    """
    theta = 2 * np.pi * np.arange(n_theta) / n_theta
    profile = []
    for r in PROFILE_RADII:
        vals = np.abs(_phi_raw(f, r * np.exp(1j * theta), settings))
        profile.append((r, float(np.max(vals))))
    m = [p[1] for p in profile]
    decaying = m[1] > m[2] > m[3] and m[3] < 1e-2 * max(m)
    return LittleZygmundReport(bool(decaying or m[3] < 1e-6), profile)


_POINT_TOL = 1e-10


def _point_conditions(f, variant, settings):
    variant = SpaceVariant(variant)
    failures = {}
    if variant in (SpaceVariant.Z0_01, SpaceVariant.Z0_I0):
        v = abs(evaluate(f, 0j))
        if v > _POINT_TOL:
            failures["f(0)"] = v
    if variant in (SpaceVariant.Z0_01, SpaceVariant.Z0_I1):
        d = abs(derivative(f, 0j, 1, settings, method="direct"))
        if d > _POINT_TOL:
            failures["f'(0)"] = d
    return failures


def membership_check(f, variant, settings=DEFAULT_SETTINGS):
    """Point conditions of the variant (to 1e-10) plus little-Zygmund decay."""
    if _point_conditions(f, variant, settings):
        return False
    return little_zygmund_check(f, settings).is_member


def require_membership(f, variant, settings=DEFAULT_SETTINGS):
    failures = _point_conditions(f, variant, settings)
    if failures:
        detail = ", ".join(f"|{k}| = {v:.3g}" for k, v in failures.items())
        raise NotInSpace(f"{f.label} not in {SpaceVariant(variant).value}: {detail}")
    if not little_zygmund_check(f, settings).is_member:
        raise NotInSpace(f"{f.label} fails the little-Zygmund decay test")


@dataclass(frozen=True)
class ExtremeFunctional:
    variant: SpaceVariant
    z0: complex
    theta0: float = 0.0
    theta1: float = 0.0
    theta2: float = 0.0

    def __post_init__(self):
        object.__setattr__(self, "variant", SpaceVariant(self.variant))
        object.__setattr__(self, "z0", complex(self.z0))
        if abs(self.z0) >= 1.0:
            raise BadSpec("extreme functional needs |z0| < 1")
        for name in ("theta0", "theta1", "theta2"):
            object.__setattr__(self, name, float(getattr(self, name)) % (2 * math.pi))


def extreme_functional_eval(phi, f, settings=DEFAULT_SETTINGS):
    """Evaluate an extreme point of the dual unit ball of phi.variant on f."""
    require_membership(f, phi.variant, settings)
    z0 = phi.z0
    e = lambda t: complex(math.cos(t), math.sin(t))
    out = e(phi.theta2) * (1.0 - abs(z0) ** 2) * derivative(f, z0, 2, settings, method="direct")
    v = phi.variant
    if v is SpaceVariant.Z0_I0:
        out += e(phi.theta1) * derivative(f, 0j, 1, settings, method="direct") * z0
    elif v is SpaceVariant.Z0_I1:
        out += e(phi.theta1) * evaluate(f, 0j)
    elif v is SpaceVariant.Z0:
        out += (e(phi.theta0) * evaluate(f, 0j)
                + e(phi.theta1) * derivative(f, 0j, 1, settings, method="direct") * z0)
    return out


def peaking_function(z0):
    """Peaking function whose |Phi f| attains 1 exactly at z0 (z0 = 0 -> z^2/2)."""
    return peaking(z0)
