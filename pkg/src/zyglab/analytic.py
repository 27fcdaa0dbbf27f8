"""Analytic functions on the open unit disc.

Point evaluation, Cauchy-integral differentiation and Gauss-Legendre path
integration.  Everything is vectorized over numpy arrays of points; scalar
inputs give Python ``complex`` results.
"""

from dataclasses import dataclass
from functools import lru_cache
import math

import numpy as np
from numpy.polynomial.legendre import leggauss

from .errors import (BadSpec, ConvergenceFailure, EvaluationSingularity,
                     PointOutsideDisc)
from .rng import SplitMix64

_EPS = np.finfo(float).eps


@dataclass(frozen=True)
class EvaluationSettings:
    derivative_circle_fraction: float = 0.5
    derivative_nodes: int = 64
    quadrature_order: int = 32
    max_subdivisions: int = 12
    abs_tolerance: float = 1e-12

    def __post_init__(self):
        if not 0.0 < self.derivative_circle_fraction < 1.0:
            raise BadSpec("derivative_circle_fraction must lie in (0, 1)")
        for name in ("derivative_nodes", "quadrature_order", "max_subdivisions"):
            if int(getattr(self, name)) < 1:
                raise BadSpec(f"{name} must be a positive integer")
        if not self.abs_tolerance > 0:
            raise BadSpec("abs_tolerance must be positive")

    def circle_radius(self, z):
        """Radius of the Cauchy circle around ``z``."""
        return np.minimum(self.derivative_circle_fraction * (1.0 - np.abs(z)), 0.25)


DEFAULT_SETTINGS = EvaluationSettings()


def _as_points(z):
    arr = np.asarray(z, dtype=complex)
    if not np.all(np.isfinite(arr)):
        raise BadSpec("non-finite point")
    return arr


def _check_disc(arr):
    if np.any(np.abs(arr) >= 1.0):
        bad = arr.flat[int(np.argmax(np.abs(arr) >= 1.0))]
        raise PointOutsideDisc(f"|z| >= 1 at z={complex(bad)!r}")


def _out(value, scalar):
    if scalar:
        return complex(value)
    return value


class AnalyticFunction:
    """Base class.  Subclasses implement ``_eval`` on arrays inside the disc.

    ``closed_derivative`` returns ``None`` when no closed form is known.
    """

    kind = "abstract"

    def __init__(self, label=""):
        self.label = label

    def _eval(self, z):
        raise NotImplementedError

    def closed_derivative(self, z, order):
        return None

    def describe(self):
        return {"kind": self.kind, "label": self.label}

    def __call__(self, z):
        return evaluate(self, z)

    def __repr__(self):
        return f"<{type(self).__name__} {self.label}>"

    # linear structure
    def __add__(self, other):
        return LinearCombination([(1.0, self), (1.0, other)])

    def __sub__(self, other):
        return LinearCombination([(1.0, self), (-1.0, other)])

    def __mul__(self, c):
        return LinearCombination([(complex(c), self)])

    __rmul__ = __mul__

    def __neg__(self):
        return LinearCombination([(-1.0, self)])


class Polynomial(AnalyticFunction):
    """Taylor polynomial; ``coefficients[k]`` multiplies ``z**k``."""

    kind = "polynomial"

    def __init__(self, coefficients, label=""):
        coeffs = np.atleast_1d(np.asarray(coefficients, dtype=complex)).copy()
        if coeffs.ndim != 1 or coeffs.size == 0:
            raise BadSpec("polynomial needs a non-empty 1-D coefficient list")
        if not np.all(np.isfinite(coeffs)):
            raise BadSpec("non-finite polynomial coefficient")
        coeffs.setflags(write=False)
        self.coefficients = coeffs
        super().__init__(label or f"poly(deg {coeffs.size - 1})")

    @staticmethod
    def _horner(coeffs, z):
        out = np.zeros_like(z) + coeffs[-1]
        for c in coeffs[-2::-1]:
            out = out * z + c
        return out

    def _eval(self, z):
        return self._horner(self.coefficients, z)

    def derivative_coefficients(self, order):
        c = self.coefficients
        for _ in range(order):
            if c.size == 1:
                return np.zeros(1, dtype=complex)
            c = c[1:] * np.arange(1, c.size)
        return c

    def closed_derivative(self, z, order):
        return self._horner(self.derivative_coefficients(order), z)

    def describe(self):
        return {"kind": self.kind, "label": self.label,
                "coefficients": [[c.real, c.imag] for c in self.coefficients]}


class CatalogFunction(AnalyticFunction):
    kind = "catalog"
    name = "catalog"

    def params(self):
        return {}

    def describe(self):
        return {"kind": self.kind, "name": self.name, "label": self.label,
                "params": self.params()}


def _neg_w_minus_log1m(w):
    """-w - Log(1 - w), accurate for small |w|."""
    direct = -w - np.log(1.0 - w)
    small = np.abs(w) < 0.1
    if not np.any(small):
        return direct
    ws = np.where(small, w, 0.0)
    series = np.zeros_like(ws)
    term = ws * ws
    for n in range(2, 20):
        series = series + term / n
        term = term * ws
    return np.where(small, series, direct)


class PeakingFunction(CatalogFunction):
    """f(z) = (1-|z0|^2) (-1/conj(z0)) [z + Log(1 - conj(z0) z) / conj(z0)].

    Its weighted second derivative (1-|z|^2) f''(z) has modulus 1 at ``z0``
    and strictly less elsewhere.  Requires 0 < |z0| < 1; see :func:`peaking`
    for the z0 = 0 convention.
    """

    name = "peaking"

    def __init__(self, z0):
        z0 = complex(z0)
        if not 0.0 < abs(z0) < 1.0:
            raise BadSpec("peaking function needs 0 < |z0| < 1")
        self.z0 = z0
        self._cz = z0.conjugate()
        self._scale = 1.0 - abs(z0) ** 2
        super().__init__(f"peaking({z0:.6g})")

    def params(self):
        return {"z0": [self.z0.real, self.z0.imag]}

    def _eval(self, z):
        w = self._cz * z
        # principal Log is safe: Re(1 - w) > 0 on the disc
        return self._scale / self._cz ** 2 * _neg_w_minus_log1m(w)

    def closed_derivative(self, z, order):
        d = 1.0 - self._cz * z
        if order == 1:
            return self._scale * z / d
        if order == 2:
            return self._scale / d ** 2
        if order == 3:
            return 2.0 * self._cz * self._scale / d ** 3
        return None


class BoundaryLog(CatalogFunction):
    """f(z) = (1-z) Log(1-z) + z, so f'' = 1/(1-z).

    In the Zygmund space but not the little Zygmund space.
    """

    name = "boundary_log"

    def __init__(self):
        super().__init__("boundary_log")

    def _eval(self, z):
        u = 1.0 - z
        return u * np.log(u) + z

    def closed_derivative(self, z, order):
        u = 1.0 - z
        if order == 1:
            return -np.log(u)
        if order == 2:
            return 1.0 / u
        if order == 3:
            return 1.0 / u ** 2
        return None


class TransformedFunction(AnalyticFunction):
    """Function produced by an operator.

    ``value`` maps an array of disc points to values; ``derivatives`` maps an
    order to a callable giving the closed-form derivative of that order.
    """

    kind = "transformed"

    def __init__(self, value, derivatives=None, label="", operator=None, source=None):
        super().__init__(label or "transformed")
        self._value = value
        self._derivatives = dict(derivatives or {})
        self.operator = operator
        self.source = source

    def _eval(self, z):
        return self._value(z)

    def closed_derivative(self, z, order):
        fn = self._derivatives.get(order)
        return None if fn is None else fn(z)

    def describe(self):
        out = {"kind": self.kind, "label": self.label}
        if self.operator is not None:
            out["operator"] = self.operator
        if self.source is not None:
            out["source"] = self.source.describe()
        return out


class LinearCombination(TransformedFunction):
    """sum_k c_k f_k; closed derivatives exist when every term has them."""

    def __init__(self, terms, label=""):
        flat = []
        for c, f in terms:
            if isinstance(f, LinearCombination):
                flat.extend((c * c2, f2) for c2, f2 in f.terms)
            else:
                flat.append((complex(c), f))
        self.terms = tuple(flat)
        label = label or " + ".join(f"({c:.4g})*{f.label}" for c, f in self.terms)
        super().__init__(self._combine_values, label=label, operator="linear_combination")

    def _combine_values(self, z):
        out = np.zeros_like(z)
        for c, f in self.terms:
            out = out + c * f._eval(z)
        return out

    def closed_derivative(self, z, order):
        out = np.zeros_like(z)
        for c, f in self.terms:
            d = f.closed_derivative(z, order)
            if d is None:
                return None
            out = out + c * d
        return out

    def describe(self):
        return {"kind": self.kind, "label": self.label, "operator": "linear_combination",
                "terms": [{"coefficient": [c.real, c.imag], "function": f.describe()}
                          for c, f in self.terms]}


def evaluate(f, z):
    """f(z) for |z| < 1."""
    arr = _as_points(z)
    _check_disc(arr)
    val = np.asarray(f._eval(arr), dtype=complex)
    val = np.broadcast_to(val, arr.shape)
    if not np.all(np.isfinite(val)):
        raise EvaluationSingularity(f"{f.label} is not finite at some requested point")
    return _out(val, arr.ndim == 0)


def cauchy_derivative(f, z, order, settings=DEFAULT_SETTINGS):
    """k-th derivative from the Cauchy integral on a circle, trapezoid rule.

    The node count is doubled once; the two estimates must agree to
    ``abs_tolerance`` plus the rounding floor eps*k!*max|f|/rho^k.
    """
    arr = _as_points(z)
    _check_disc(arr)
    return _out(_cauchy_raw(f, arr, order, settings), arr.ndim == 0)


def _cauchy_raw(f, z, order, settings):
    n = int(settings.derivative_nodes)
    rho = settings.circle_radius(z)
    theta = 2 * np.pi * np.arange(2 * n) / (2 * n)
    unit = np.exp(1j * theta)
    nodes = z[..., None] + rho[..., None] * unit
    vals = np.asarray(f._eval(nodes), dtype=complex)
    vals = np.broadcast_to(vals, nodes.shape)
    weights = np.exp(-1j * order * theta)
    fact = math.factorial(order)
    fine = fact * np.mean(vals * weights, axis=-1) / rho ** order
    coarse = fact * np.mean(vals[..., ::2] * weights[::2], axis=-1) / rho ** order
    floor = 256 * _EPS * fact * np.max(np.abs(vals), axis=-1) / rho ** order
    if np.any(np.abs(fine - coarse) > settings.abs_tolerance + floor):
        worst = float(np.max(np.abs(fine - coarse)))
        raise ConvergenceFailure(
            f"Cauchy derivative of order {order} changed by {worst:.3e} on node doubling")
    return fine


def derivative(f, z, order, settings=DEFAULT_SETTINGS, method="auto"):
    """f^(order)(z), order in {1, 2, 3}.

    ``method``: ``"auto"`` uses exact/closed forms for polynomial and catalog
    functions and the Cauchy integral for transformed ones; ``"direct"`` uses
    any closed form available; ``"cauchy"`` always integrates.
    """
    if order not in (1, 2, 3):
        raise BadSpec("derivative order must be 1, 2 or 3")
    arr = _as_points(z)
    _check_disc(arr)
    out = _derivative_raw(f, arr, order, settings, method)
    if not np.all(np.isfinite(out)):
        raise EvaluationSingularity(f"derivative of {f.label} is not finite")
    return _out(out, arr.ndim == 0)


def _derivative_raw(f, z, order, settings, method="direct"):
    if method not in ("auto", "direct", "cauchy"):
        raise BadSpec(f"unknown differentiation method {method!r}")
    if method == "direct" or (method == "auto" and f.kind in ("polynomial", "catalog")):
        d = f.closed_derivative(z, order)
        if d is not None:
            return np.broadcast_to(np.asarray(d, dtype=complex), z.shape)
    return _cauchy_raw(f, z, order, settings)


@lru_cache(maxsize=16)
def _unit_gauss(order):
    x, w = leggauss(order)
    return (x + 1.0) / 2.0, w / 2.0


def path_integral(g, endpoint, settings=DEFAULT_SETTINGS):
    """Integral of ``g`` from 0 to ``endpoint`` along the straight segment.

    ``g`` is an :class:`AnalyticFunction` or any vectorized callable.  The
    segment is split into 2**level equal pieces with a Gauss-Legendre rule on
    each; the level is raised for the whole batch until two consecutive
    levels agree within ``abs_tolerance`` (plus a relative rounding margin).
    """
    arr = _as_points(endpoint)
    _check_disc(arr)
    return _out(_path_integral_raw(g, arr, settings), arr.ndim == 0)


def _integrand(g):
    if isinstance(g, AnalyticFunction):
        return g._eval
    return g


def _gl_level(fn, e, level, order):
    s, w = _unit_gauss(order)
    pieces = 1 << level
    s_all = ((np.arange(pieces)[:, None] + s[None, :]) / pieces).ravel()
    w_all = np.tile(w, pieces) / pieces
    pts = e[..., None] * s_all
    vals = np.broadcast_to(np.asarray(fn(pts), dtype=complex), pts.shape)
    return e * (vals @ w_all)


def _path_integral_raw(g, e, settings):
    fn = _integrand(g)
    order = int(settings.quadrature_order)
    prev = _gl_level(fn, e, 0, order)
    for level in range(1, int(settings.max_subdivisions) + 1):
        cur = _gl_level(fn, e, level, order)
        gap = np.abs(cur - prev)
        if np.all(gap <= settings.abs_tolerance + 64 * _EPS * np.abs(cur)):
            if not np.all(np.isfinite(cur)):
                raise EvaluationSingularity("integrand is not finite on the path")
            return cur
        prev = cur
    raise ConvergenceFailure(
        f"path integral not converged after {settings.max_subdivisions} bisection levels "
        f"(gap {float(np.max(gap)):.3e})")


def monomial(k):
    """m_k(z) = z^k / k!."""
    k = int(k)
    if k < 2:
        raise BadSpec("monomial m_k needs k >= 2")
    coeffs = np.zeros(k + 1, dtype=complex)
    coeffs[k] = 1.0 / math.factorial(k)
    return Polynomial(coeffs, label=f"z^{k}/{k}!")


def peaking(z0):
    """Peaking function at z0; z0 = 0 gives z^2/2 (weight 1-|z|^2 peaks at 0)."""
    z0 = complex(z0)
    if abs(z0) >= 1.0:
        raise BadSpec("peaking point must satisfy |z0| < 1")
    if z0 == 0:
        return Polynomial([0, 0, 0.5], label="peaking(0)=z^2/2")
    return PeakingFunction(z0)


def random_poly(degree, seed):
    """Seeded polynomial with zero constant and linear terms."""
    degree = int(degree)
    if degree < 2:
        raise BadSpec("random_poly needs degree >= 2")
    rng = SplitMix64(seed)
    coeffs = [0j, 0j] + [rng.unit_square() for _ in range(degree - 1)]
    return Polynomial(coeffs, label=f"random_poly({degree}, seed={seed})")


def _complex_param(value, name):
    if isinstance(value, (list, tuple)):
        if len(value) != 2:
            raise BadSpec(f"{name} must be a number or a [re, im] pair")
        return complex(float(value[0]), float(value[1]))
    if isinstance(value, dict):
        return complex(float(value.get("re", 0.0)), float(value.get("im", 0.0)))
    try:
        return complex(value)
    except (TypeError, ValueError):
        raise BadSpec(f"{name} is not a complex number: {value!r}") from None


def make_test_function(spec):
    """Build a function from a dict spec.

    Recognised kinds: ``monomial`` (k), ``peaking`` (z0), ``random_poly``
    (degree, seed), ``polynomial`` (coefficients), ``boundary_log``.
    Complex parameters are numbers or ``[re, im]`` pairs.
    """
    if not isinstance(spec, dict) or "kind" not in spec:
        raise BadSpec(f"function spec needs a 'kind': {spec!r}")
    kind = spec["kind"]
    try:
        if kind == "monomial":
            return monomial(spec["k"])
        if kind == "peaking":
            return peaking(_complex_param(spec["z0"], "z0"))
        if kind == "random_poly":
            return random_poly(spec["degree"], spec.get("seed", 0))
        if kind == "polynomial":
            coeffs = [_complex_param(c, "coefficient") for c in spec["coefficients"]]
            return Polynomial(coeffs, label=spec.get("label", ""))
        if kind == "boundary_log":
            return BoundaryLog()
    except KeyError as exc:
        raise BadSpec(f"{kind} spec is missing {exc.args[0]!r}") from None
    raise BadSpec(f"unknown function kind {kind!r}")
