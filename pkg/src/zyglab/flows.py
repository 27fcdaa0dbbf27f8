"""One-parameter groups of disc automorphisms and the isometry groups and
generators built on them.

Families (t real):

* elliptic   sigma_t(z) = ((u - |tau|^2) z - tau (u - 1)) / (1 - |tau|^2 u - conj(tau)(1 - u) z),
  u = e^{ict}
* hyperbolic sigma_t(z) = ((q e - p) z + p q (1 - e)) / ((e - 1) z + (q - p e)), e = e^{phi t},
  fixing the boundary points p and q
* parabolic  sigma_t(z) = ((1 - ict) z + ict gamma) / (-ic conj(gamma) t z + 1 + ict)
"""

from dataclasses import dataclass, field
import cmath
import math

import numpy as np

from .analytic import (DEFAULT_SETTINGS, TransformedFunction, _as_points, _check_disc,
                       _derivative_raw, _path_integral_raw)
from .errors import (BadSpec, DegenerateComposite, DegenerateParameters, NotInSpace,
                     NumericalSingularity)
from .isometry import CanonicalIsometry, apply_canonical
from .moebius import DiscAutomorphism
from .zygmund import DEFAULT_GRID, little_zygmund_check, zygmund_norm

VARIANTS = ("trivial", "elliptic", "hyperbolic", "parabolic")
FD_STEP = 1e-3
_DENOM_TOL = 1e-14
HYPERBOLIC_FIELD = ("V(z) = +phi (z - p)(z - q) / (p - q): sign taken from the derivative of the "
                    "hyperbolic flow at t = 0, which points toward q for phi > 0")


@dataclass(frozen=True)
class FlowFamily:
    variant: str = "trivial"
    c: float = 0.0
    tau: complex = 0j
    phi: float = 0.0
    p: complex = 1 + 0j
    q: complex = -1 + 0j
    gamma: complex = 1 + 0j

    def __post_init__(self):
        if self.variant not in VARIANTS:
            raise BadSpec(f"unknown flow variant {self.variant!r}")
        for name in ("tau", "p", "q", "gamma"):
            object.__setattr__(self, name, complex(getattr(self, name)))
        object.__setattr__(self, "c", float(self.c))
        object.__setattr__(self, "phi", float(self.phi))
        v = self.variant
        if v == "elliptic":
            if self.c == 0 or not abs(self.tau) < 1:
                raise BadSpec("elliptic flow needs c != 0 and |tau| < 1")
        elif v == "hyperbolic":
            if not self.phi > 0:
                raise BadSpec("hyperbolic flow needs phi > 0")
            if abs(abs(self.p) - 1) > 1e-12 or abs(abs(self.q) - 1) > 1e-12:
                raise BadSpec("hyperbolic endpoints must be unimodular")
            if abs(self.p - self.q) <= 1e-9:
                raise BadSpec("hyperbolic endpoints must differ")
        elif v == "parabolic":
            if self.c == 0 or abs(abs(self.gamma) - 1) > 1e-12:
                raise BadSpec("parabolic flow needs c != 0 and |gamma| = 1")
        if not self.automorphism(0.0).is_identity():
            raise DegenerateParameters("sigma_0 is not the identity")
        for t in (-1.0, 0.5, 1.0):
            self.automorphism(t)
        probe = np.array([0j, 0.5, -0.3 + 0.6j])
        closed, fd = _field_closed(self, probe), _field_fd(self, probe)
        if np.max(np.abs(closed - fd) / np.maximum(np.abs(closed), 1.0)) > 1e-6:
            raise DegenerateParameters("closed-form field disagrees with the flow derivative")

    @classmethod
    def trivial(cls):
        return cls("trivial")

    @classmethod
    def elliptic(cls, c, tau=0j):
        return cls("elliptic", c=c, tau=tau)

    @classmethod
    def hyperbolic(cls, phi, p=1 + 0j, q=-1 + 0j):
        return cls("hyperbolic", phi=phi, p=p, q=q)

    @classmethod
    def parabolic(cls, c, gamma=1 + 0j):
        return cls("parabolic", c=c, gamma=gamma)

    def matrix(self, t):
        """Coefficients [[A, B], [C, D]] of sigma_t = (A z + B) / (C z + D)."""
        t = float(t)
        v = self.variant
        if v == "elliptic":
            u = cmath.exp(1j * self.c * t)
            s = abs(self.tau) ** 2
            ct = self.tau.conjugate()
            return np.array([[u - s, -self.tau * (u - 1)],
                             [-ct * (1 - u), 1 - s * u]])
        if v == "hyperbolic":
            e = math.exp(self.phi * t)
            p, q = self.p, self.q
            return np.array([[q * e - p, p * q * (1 - e)],
                             [e - 1, q - p * e]], dtype=complex)
        if v == "parabolic":
            k = 1j * self.c * t
            g = self.gamma
            return np.array([[1 - k, k * g],
                             [-k * g.conjugate(), 1 + k]])
        return np.eye(2, dtype=complex)

    def automorphism(self, t):
        try:
            return DiscAutomorphism.from_matrix(self.matrix(t))
        except (DegenerateComposite, BadSpec) as exc:
            raise DegenerateParameters(f"sigma_{t} is not a disc automorphism: {exc}") from None

    def fixed_set(self):
        """Fixed points in the closed disc shared by every sigma_t.

        The elliptic family also fixes the reflection 1/conj(tau) (or
        infinity); it is left out because it can be arbitrarily far away.
        """
        v = self.variant
        if v == "elliptic":
            return (self.tau,)
        if v == "hyperbolic":
            return (self.p, self.q)
        if v == "parabolic":
            return (self.gamma,)
        return ()

    def to_dict(self):
        d = {"variant": self.variant}
        if self.variant == "elliptic":
            d.update(c=self.c, tau=[self.tau.real, self.tau.imag])
        elif self.variant == "hyperbolic":
            d.update(phi=self.phi, p=[self.p.real, self.p.imag], q=[self.q.real, self.q.imag])
        elif self.variant == "parabolic":
            d.update(c=self.c, gamma=[self.gamma.real, self.gamma.imag])
        return d


def _mobius_apply(m, z):
    (A, B), (C, D) = m
    den = C * z + D
    if np.any(np.abs(den) < _DENOM_TOL):
        raise NumericalSingularity("flow denominator vanished")
    return (A * z + B) / den


def flow_eval(F, t, z):
    """sigma_t(z) from the family's printed formula."""
    arr = _as_points(z)
    _check_disc(arr)
    if F.variant == "trivial":
        out = arr.copy()
    else:
        out = _mobius_apply(F.matrix(t), arr)
    return complex(out) if arr.ndim == 0 else out


def flow_to_automorphism(F, t):
    return F.automorphism(t)


def group_law_check(F, s_values, t_values, sample_points):
    """max |sigma_s(sigma_t(z)) - sigma_{s+t}(z)| over the product grid."""
    z = _as_points(sample_points)
    _check_disc(z)
    worst = 0.0
    for s in s_values:
        for t in t_values:
            lhs = flow_eval(F, s, flow_eval(F, t, z))
            rhs = flow_eval(F, s + t, z)
            worst = max(worst, float(np.max(np.abs(lhs - rhs), initial=0.0)))
    return worst


def fixed_point_drift(F, t_values):
    """max |sigma_t(x) - x| over the family's finite fixed points."""
    worst = 0.0
    for t in t_values:
        m = F.matrix(t)
        for x in F.fixed_set():
            worst = max(worst, abs(complex(_mobius_apply(m, np.asarray(x))) - x))
    return worst


@dataclass(frozen=True)
class IsometryFlow:
    alpha_rate: float = 0.0
    family: FlowFamily = field(default_factory=FlowFamily.trivial)

    def to_dict(self):
        return {"type": "flow", "alpha_rate": self.alpha_rate, "family": self.family.to_dict()}


def isometry_at(flow, t):
    """T_t = e^{i alpha t} int_0^z [f'(sigma_t(xi)) - f'(sigma_t(0))] dxi."""
    return CanonicalIsometry(flow.alpha_rate * t, flow.family.automorphism(t))


def _field_closed(F, z):
    v = F.variant
    if v == "elliptic":
        tau = F.tau
        return 1j * F.c * (1 - tau.conjugate() * z) * (z - tau) / (1 - abs(tau) ** 2)
    if v == "hyperbolic":
        # sign fixed by differentiating the hyperbolic flow at t = 0 (see HYPERBOLIC_FIELD)
        return F.phi * (z - F.p) * (z - F.q) / (F.p - F.q)
    if v == "parabolic":
        return 1j * F.c * F.gamma.conjugate() * (z - F.gamma) ** 2
    return np.zeros_like(z)


def _field_prime(F, z):
    v = F.variant
    if v == "elliptic":
        tau = F.tau
        return 1j * F.c * (1 - 2 * tau.conjugate() * z + abs(tau) ** 2) / (1 - abs(tau) ** 2)
    if v == "hyperbolic":
        return F.phi * (2 * z - F.p - F.q) / (F.p - F.q)
    if v == "parabolic":
        return 2j * F.c * F.gamma.conjugate() * (z - F.gamma)
    return np.zeros_like(z)


def _field_second(F, z):
    v = F.variant
    if v == "elliptic":
        return -2j * F.c * F.tau.conjugate() / (1 - abs(F.tau) ** 2) + 0 * z
    if v == "hyperbolic":
        return 2 * F.phi / (F.p - F.q) + 0 * z
    if v == "parabolic":
        return 2j * F.c * F.gamma.conjugate() + 0 * z
    return np.zeros_like(z)


def _field_fd(F, z, h=FD_STEP):
    def central(step):
        return (_mobius_apply(F.matrix(step), z) - _mobius_apply(F.matrix(-step), z)) / (2 * step)

    if F.variant == "trivial":
        return np.zeros_like(z)
    return (4 * central(h / 2) - central(h)) / 3


def generator_field(F, z, mode="closed"):
    """Velocity V(z) = d/dt sigma_t(z) at t = 0.

    ``closed`` uses the closed forms; ``fd`` a central difference with step
    1e-3 and one Richardson step (h and h/2).
    """
    arr = _as_points(z)
    _check_disc(arr)
    if mode == "closed":
        out = _field_closed(F, arr)
    elif mode == "fd":
        out = _field_fd(F, arr)
    else:
        raise BadSpec(f"unknown field mode {mode!r}")
    out = np.broadcast_to(np.asarray(out, dtype=complex), arr.shape)
    return complex(out) if arr.ndim == 0 else out


@dataclass
class GeneratorReport:
    field_closed: complex
    field_fd: complex
    generator_value: complex
    discrepancy: float

    def to_dict(self):
        c = lambda w: [w.real, w.imag]
        return {"field_closed": c(self.field_closed), "field_fd": c(self.field_fd),
                "generator_value": c(self.generator_value), "discrepancy": self.discrepancy}


def generator_function(flow, f, settings=DEFAULT_SETTINGS):
    """G f = alpha f - i V f' as a function, with closed first/second derivatives."""
    F, alpha = flow.family, flow.alpha_rate

    def d(z, k):
        return _derivative_raw(f, z, k, settings)

    def value(z):
        return alpha * f._eval(z) - 1j * _field_closed(F, z) * d(z, 1)

    def d1(z):
        return alpha * d(z, 1) - 1j * (_field_prime(F, z) * d(z, 1)
                                       + _field_closed(F, z) * d(z, 2))

    def d2(z):
        return alpha * d(z, 2) - 1j * (_field_second(F, z) * d(z, 1)
                                       + 2 * _field_prime(F, z) * d(z, 2)
                                       + _field_closed(F, z) * d(z, 3))

    return TransformedFunction(value, {1: d1, 2: d2}, label=f"G[{f.label}]",
                               operator=flow.to_dict(), source=f)


def apply_generator(flow, f, z, settings=DEFAULT_SETTINGS, check=True):
    """alpha f(z) - i V(z) f'(z), V from the closed-form field."""
    if check:
        _require_01(f, settings)
    arr = _as_points(z)
    _check_disc(arr)
    out = generator_function(flow, f, settings)._eval(arr)
    return complex(out) if arr.ndim == 0 else out


def generator_report(flow, f, z, settings=DEFAULT_SETTINGS):
    closed = generator_field(flow.family, z, "closed")
    fd = generator_field(flow.family, z, "fd")
    value = apply_generator(flow, f, z, settings)
    return GeneratorReport(closed, fd, value, abs(closed - fd))


def flow_time_derivative(flow, f, z, settings=DEFAULT_SETTINGS):
    """-i d/dt T_t f(z) at t = 0, computed from the integral form of T_t.

    Differentiating under the integral gives
    alpha f(z) - i int_0^z [V(xi) f''(xi) - V(0) f''(0)] dxi,
    which is what difference quotients of T_t f converge to.
    """
    F, alpha = flow.family, flow.alpha_rate
    arr = _as_points(z)
    _check_disc(arr)
    origin = np.zeros((), dtype=complex)
    base = complex(_field_closed(F, origin) * _derivative_raw(f, origin, 2, settings))

    def integrand(xi):
        return _field_closed(F, xi) * _derivative_raw(f, xi, 2, settings) - base

    out = alpha * f._eval(arr) - 1j * _path_integral_raw(integrand, arr, settings)
    return complex(out) if arr.ndim == 0 else out


def difference_quotients(flow, f, z, ks=range(3, 11), settings=DEFAULT_SETTINGS):
    """[(t, (T_t f(z) - f(z)) / (i t))] for t = 2^-k."""
    fz = complex(f._eval(np.asarray(complex(z))))
    out = []
    for k in ks:
        t = 2.0 ** -k
        tf = apply_canonical(isometry_at(flow, t), f, settings, check=False)
        out.append((t, (complex(tf(z)) - fz) / (1j * t)))
    return out


def convergence_ratios(quotients, target):
    """Errors |Q(t) - target| and ratios between consecutive halvings of t."""
    errors = [abs(q - target) for _, q in quotients]
    ratios = [e0 / e1 if e1 > 0 else math.inf for e0, e1 in zip(errors, errors[1:])]
    return errors, ratios


def _require_01(f, settings):
    origin = np.zeros((), dtype=complex)
    v = abs(complex(f._eval(origin)))
    d = abs(complex(_derivative_raw(f, origin, 1, settings)))
    if v > 1e-10 or d > 1e-10:
        raise NotInSpace(f"{f.label} is not in Z0^(0,1) (|f(0)|={v:.3g}, |f'(0)|={d:.3g})")


def generator_domain_check(flow, f, settings=DEFAULT_SETTINGS):
    """Does G f land back in Z0^(0,1)?  Reports each failed condition."""
    g = generator_function(flow, f, settings)
    origin = np.zeros((), dtype=complex)
    v0 = abs(complex(g._eval(origin)))
    d0 = abs(complex(g.closed_derivative(origin, 1)))
    violations = []
    if v0 > 1e-10:
        violations.append({"condition": "Gf(0) = 0", "magnitude": v0})
    if d0 > 1e-10:
        violations.append({"condition": "(Gf)'(0) = 0", "magnitude": d0})
    lz = little_zygmund_check(g, settings)
    if not lz.is_member:
        violations.append({"condition": "little-Zygmund decay",
                           "magnitude": lz.boundary_profile[-1][1]})
    return {"in_domain": not violations, "violations": violations,
            "value_at_zero": v0, "deriv_at_zero": d0}


def unboundedness_probe(flow, degrees, settings=DEFAULT_SETTINGS, grid=DEFAULT_GRID):
    """[(n, ||G m_n|| / ||m_n||, domain report)] for monomials m_n = z^n / n!."""
    from .analytic import monomial

    out = []
    for n in degrees:
        if n < 2:
            raise BadSpec("unboundedness probe needs degrees >= 2")
        m = monomial(n)
        g = generator_function(flow, m, settings)
        ratio = zygmund_norm(g, settings, grid).total / zygmund_norm(m, settings, grid).total
        out.append((n, ratio, generator_domain_check(flow, m, settings)))
    return out


def strong_continuity(flow, f, t_values, settings=DEFAULT_SETTINGS, grid=DEFAULT_GRID):
    """||T_t f - f|| for each t; closed second derivatives, no quadrature."""
    out = []
    for t in t_values:
        tf = apply_canonical(isometry_at(flow, t), f, settings, check=False)
        out.append((t, zygmund_norm(tf - f, settings, grid).total))
    return out


def trajectories(F, points, t_values):
    """Rows (z_re, z_im, t, w_re, w_im) with w = sigma_t(z)."""
    rows = []
    for z in points:
        for t in t_values:
            w = flow_eval(F, t, z)
            rows.append((z.real, z.imag, t, w.real, w.imag))
    return rows


def flow_from_dict(d):
    """FlowFamily from ``{"variant": ..., parameters}``; complex values as [re, im]."""
    from .analytic import _complex_param

    if not isinstance(d, dict) or "variant" not in d:
        raise BadSpec("flow spec needs a 'variant'")
    v = d["variant"]
    try:
        if v == "trivial":
            return FlowFamily.trivial()
        if v == "elliptic":
            return FlowFamily.elliptic(float(d["c"]), _complex_param(d.get("tau", 0), "tau"))
        if v == "hyperbolic":
            return FlowFamily.hyperbolic(float(d["phi"]), _complex_param(d.get("p", 1), "p"),
                                         _complex_param(d.get("q", -1), "q"))
        if v == "parabolic":
            return FlowFamily.parabolic(float(d["c"]), _complex_param(d.get("gamma", 1), "gamma"))
    except KeyError as exc:
        raise BadSpec(f"{v} flow spec is missing {exc.args[0]!r}") from None
    raise BadSpec(f"unknown flow variant {v!r}")
