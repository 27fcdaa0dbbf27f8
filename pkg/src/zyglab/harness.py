"""Scenario configs, the named verification checks and run reports."""

from dataclasses import dataclass, field
import hashlib
import json
import math
import time
import zlib

import numpy as np

from . import __version__
from .analytic import (DEFAULT_SETTINGS, EvaluationSettings, Polynomial, _complex_param,
                       derivative, make_test_function, monomial, peaking)
from .errors import BadSpec, ConfigInvalid, ZygLabError
from .flows import (HYPERBOLIC_FIELD, FlowFamily, IsometryFlow, apply_generator,
                    convergence_ratios, difference_quotients, fixed_point_drift, flow_eval,
                    flow_from_dict, flow_time_derivative, generator_domain_check, generator_field,
                    group_law_check, isometry_at, strong_continuity, unboundedness_probe)
from .isometry import (CanonicalIsometry, FullIsometry, HermitianDiagonal, adjoint_on_extreme,
                       apply_canonical, apply_full, hermitian_exponential, parallel_map,
                       second_derivative_direct)
from .moebius import DiscAutomorphism, random_automorphism
from .rng import SplitMix64
from .zygmund import (ExtremeFunctional, SpaceVariant, extreme_functional_eval, phi_embed,
                      zygmund_norm)

DEFAULT_TOLERANCES = {
    "norm": 1e-6,
    "argmax": 1e-4,
    "peaking": 1e-7,
    "isometry": 1e-6,
    "closed_form": 1e-8,
    "schwarz_pick": 1e-12,
    "group_law": 1e-9,
    "fixed_points": 1e-10,
    "generator_field": 1e-6,
    "rate_low": 1.7,
    "rate_high": 2.3,
    "extreme": 1e-9,
    "hermitian": 1e-8,
    "domain": 1e-8,
    "unboundedness": 1e-6,
    "trivial_ratio": 1e-10,
}

CHECKS = ("domain", "extreme-point", "flow-group-law", "generator", "hermitian-exponential",
          "isometry", "norm", "unboundedness")

_TOP_KEYS = {"seed", "suite", "operator", "checks", "tolerances", "output", "params", "settings",
             "name"}


@dataclass
class ScenarioConfig:
    seed: int = 0
    suite: list = field(default_factory=list)
    operator: dict = None
    checks: list = field(default_factory=list)
    tolerances: dict = field(default_factory=dict)
    output: dict = field(default_factory=dict)
    params: dict = field(default_factory=dict)
    settings: dict = field(default_factory=dict)
    name: str = ""

    def tolerance(self, key):
        return self.tolerances.get(key, DEFAULT_TOLERANCES[key])

    def to_dict(self):
        return {"name": self.name, "seed": self.seed, "suite": self.suite,
                "operator": self.operator, "checks": list(self.checks),
                "tolerances": dict(sorted(self.tolerances.items())),
                "output": self.output, "params": self.params, "settings": self.settings}

    def digest(self):
        blob = json.dumps(self.to_dict(), sort_keys=True, separators=(",", ":"))
        return hashlib.sha256(blob.encode()).hexdigest()


def parse_config(data):
    """Validate a decoded JSON scenario.  Raises ConfigInvalid with a position."""
    if not isinstance(data, dict):
        raise ConfigInvalid("scenario must be a JSON object", "$")
    unknown = sorted(set(data) - _TOP_KEYS)
    if unknown:
        raise ConfigInvalid(f"unknown key {unknown[0]!r}", "$")
    seed = data.get("seed", 0)
    if not isinstance(seed, int) or isinstance(seed, bool) or not 0 <= seed < 2 ** 64:
        raise ConfigInvalid("seed must be an unsigned 64-bit integer", "$.seed")
    checks = data.get("checks", [])
    if not isinstance(checks, list):
        raise ConfigInvalid("checks must be a list", "$.checks")
    for i, name in enumerate(checks):
        if name not in CHECKS:
            raise ConfigInvalid(f"unknown check {name!r}", f"$.checks[{i}]")
    tolerances = data.get("tolerances", {})
    if not isinstance(tolerances, dict):
        raise ConfigInvalid("tolerances must be an object", "$.tolerances")
    for key, value in tolerances.items():
        if key not in DEFAULT_TOLERANCES:
            raise ConfigInvalid(f"unknown tolerance {key!r}", f"$.tolerances.{key}")
        if not isinstance(value, (int, float)) or isinstance(value, bool) or not value > 0:
            raise ConfigInvalid("tolerances must be strictly positive numbers",
                                f"$.tolerances.{key}")
    suite = data.get("suite", [])
    if not isinstance(suite, list):
        raise ConfigInvalid("suite must be a list", "$.suite")
    for i, spec in enumerate(suite):
        try:
            make_test_function(spec)
        except BadSpec as exc:
            raise ConfigInvalid(str(exc), f"$.suite[{i}]") from None
    operator = data.get("operator")
    if operator is not None:
        try:
            build_operator(operator)
        except (BadSpec, ZygLabError, TypeError, ValueError) as exc:
            raise ConfigInvalid(str(exc), "$.operator") from None
    settings = data.get("settings", {})
    try:
        EvaluationSettings(**settings)
    except (TypeError, BadSpec) as exc:
        raise ConfigInvalid(str(exc), "$.settings") from None
    output = data.get("output", {})
    if output and output.get("format", "json") not in ("json", "csv"):
        raise ConfigInvalid("output.format must be json or csv", "$.output.format")
    params = data.get("params", {})
    if not isinstance(params, dict):
        raise ConfigInvalid("params must be an object", "$.params")
    return ScenarioConfig(seed=seed, suite=suite, operator=operator, checks=list(checks),
                          tolerances={k: float(v) for k, v in tolerances.items()},
                          output=dict(output), params=params, settings=dict(settings),
                          name=str(data.get("name", "")))


def load_config(path):
    try:
        with open(path) as fh:
            data = json.load(fh)
    except OSError as exc:
        raise ConfigInvalid(f"cannot read config: {exc}") from None
    except json.JSONDecodeError as exc:
        raise ConfigInvalid(exc.msg, f"line {exc.lineno} column {exc.colno}") from None
    return data


def automorphism_from_dict(d):
    if not isinstance(d, dict):
        raise BadSpec("automorphism spec must be an object")
    if "lambda_re" in d or "a_re" in d or "lambda_im" in d or "a_im" in d:
        return DiscAutomorphism.from_dict(d)
    lam = _complex_param(d.get("lambda", 1), "lambda")
    return DiscAutomorphism(lam, _complex_param(d.get("a", 0), "a"))


def build_operator(d):
    kind = d.get("type") if isinstance(d, dict) else None
    if kind == "canonical":
        return CanonicalIsometry(float(d.get("alpha", 0.0)),
                                 automorphism_from_dict(d.get("sigma", {})))
    if kind == "full":
        return FullIsometry(float(d.get("theta", 0.0)), float(d.get("eta", 0.0)),
                            float(d.get("alpha", 0.0)), automorphism_from_dict(d.get("sigma", {})))
    if kind == "hermitian":
        return HermitianDiagonal(float(d.get("a1", 0.0)), float(d.get("a2", 0.0)),
                                 float(d.get("a3", 0.0)))
    if kind == "flow":
        return IsometryFlow(float(d.get("alpha_rate", 0.0)), flow_from_dict(d.get("family", {})))
    raise BadSpec(f"unknown operator type {kind!r}")


class _Check:
    """Accumulates measurements for one named check."""

    def __init__(self, name):
        self.name = name
        self.measurements = {}

    def le(self, key, value, tol):
        value = float(value)
        self.measurements[key] = {"value": value, "tolerance": tol, "relation": "<=",
                                  "pass": bool(value <= tol)}

    def within(self, key, value, low, high):
        value = float(value)
        self.measurements[key] = {"value": value, "tolerance": [low, high], "relation": "in",
                                  "pass": bool(low <= value <= high)}

    def flag(self, key, ok, detail=None):
        self.measurements[key] = {"value": detail, "tolerance": None, "relation": "holds",
                                  "pass": bool(ok)}

    def info(self, key, value):
        self.measurements[key] = {"value": value, "tolerance": None, "relation": "info",
                                  "pass": None}

    def status(self):
        flags = [m["pass"] for m in self.measurements.values() if m["pass"] is not None]
        return "pass" if all(flags) else "fail"


def _child_rng(seed, name):
    return SplitMix64((seed * 0x9E3779B97F4A7C15 + zlib.crc32(name.encode())) & (2 ** 64 - 1))


def _suite(cfg):
    return [make_test_function(s) for s in cfg.suite]


def _params(cfg, name):
    return cfg.params.get(name, {})


def _default_families():
    return [FlowFamily.elliptic(1.0, 0.3 + 0.2j),
            FlowFamily.hyperbolic(1.0, 1.0, -1.0),
            FlowFamily.parabolic(1.0, 1.0)]


def _families(cfg):
    op = build_operator(cfg.operator) if cfg.operator else None
    if isinstance(op, IsometryFlow):
        return [op.family]
    return _default_families()


def _monomial_oracle(k):
    """max over r of (1 - r^2) r^(k-2) / (k-2)!, and its radius."""
    n = k - 2
    r2 = n / (n + 2)
    return (1 - r2) * r2 ** (n / 2) / math.factorial(n), math.sqrt(r2)


def check_norm(cfg, settings):
    c = _Check("norm")
    tol, tol_arg, tol_pk = cfg.tolerance("norm"), cfg.tolerance("argmax"), cfg.tolerance("peaking")
    rng = _child_rng(cfg.seed, "norm")
    worst_mono = worst_mono_arg = 0.0
    worst_total = worst_hom = worst_tri = 0.0
    fns = _suite(cfg)
    for spec, f in zip(cfg.suite, fns):
        rep = zygmund_norm(f, settings)
        worst_total = max(worst_total, abs(rep.total - (rep.value_at_zero + rep.deriv_at_zero
                                                         + rep.seminorm)))
        if spec["kind"] == "monomial":
            semi, radius = _monomial_oracle(int(spec["k"]))
            worst_mono = max(worst_mono, abs(rep.seminorm - semi))
            if int(spec["k"]) > 2:
                worst_mono_arg = max(worst_mono_arg, abs(abs(rep.argmax) - radius))
        cval = rng.unit_square()
        scaled = zygmund_norm(cval * f, settings).total
        worst_hom = max(worst_hom, abs(scaled - abs(cval) * rep.total) / (abs(cval) * rep.total))
    for f, g in zip(fns, fns[1:]):
        s = zygmund_norm(f + g, settings).total
        worst_tri = max(worst_tri, s - zygmund_norm(f, settings).total
                        - zygmund_norm(g, settings).total)
    c.le("components_sum", worst_total, 1e-15)
    c.le("monomial_seminorm_error", worst_mono, tol)
    c.le("monomial_argmax_radius_error", worst_mono_arg, tol_arg)
    c.le("homogeneity_relative_error", worst_hom, 1e-8)
    c.le("triangle_excess", worst_tri, 1e-8)

    points = [_complex_param(p, "z0") for p in _params(cfg, "norm").get(
        "peaking_points", [[0.3 * math.cos(math.pi / 7), 0.3 * math.sin(math.pi / 7)],
                           0.8, [0, 0.5]])]
    worst_pk = worst_pk_arg = 0.0
    worst_strict = -math.inf
    for z0 in points:
        f0 = peaking(z0)
        rep = zygmund_norm(f0, settings)
        worst_pk = max(worst_pk, abs(rep.total - 1.0))
        worst_pk_arg = max(worst_pk_arg, abs(rep.argmax - z0))
        samples = [z for z in rng.disc_points(2000, 0.999) if abs(z - z0) >= 1e-3]
        vals = np.abs(phi_embed(f0, np.array(samples), settings))
        worst_strict = max(worst_strict, float(np.max(vals)))
    c.le("peaking_norm_error", worst_pk, tol_pk)
    c.le("peaking_argmax_error", worst_pk_arg, tol_arg)
    c.le("peaking_off_peak_max", worst_strict, 1 - 1e-7)
    return c


def _random_operators(rng, n, a_radius=0.75):
    return [CanonicalIsometry(rng.uniform(0, 2 * math.pi), random_automorphism(rng, a_radius))
            for _ in range(n)]


def check_isometry(cfg, settings):
    c = _Check("isometry")
    p = _params(cfg, "isometry")
    rng = _child_rng(cfg.seed, "isometry")
    # the canonical form acts on Z0^(0,1) only
    suite = [f for f in _suite(cfg) if abs(f(0j)) <= 1e-10
             and abs(derivative(f, 0j, 1, settings, method="direct")) <= 1e-10]
    ops = _random_operators(rng, int(p.get("random_operators", 100)),
                            float(p.get("a_radius", 0.75)))
    if cfg.operator and cfg.operator.get("type") in ("canonical", "full"):
        ops.insert(0, build_operator(cfg.operator))
    base = {f.label: zygmund_norm(f, settings).total for f in suite}

    def worst_for(T):
        full = isinstance(T, FullIsometry)
        worst = 0.0
        for f in suite:
            tf = (apply_full if full else apply_canonical)(T, f, settings)
            after = zygmund_norm(tf, settings).total
            worst = max(worst, abs(after - base[f.label]) / base[f.label])
        return worst

    devs = parallel_map(worst_for, ops)
    c.le("max_relative_deviation", max(devs, default=0.0), cfg.tolerance("isometry"))

    n_ops, n_pts = int(p.get("closed_form_operators", 10)), int(p.get("closed_form_points", 100))
    worst = 0.0
    probe = [f for f in suite if f.kind != "transformed"] or [monomial(3)]
    for i, T in enumerate(_random_operators(rng, n_ops)):
        f = probe[i % len(probe)]
        tf = apply_canonical(T, f, settings)
        z = np.array(rng.disc_points(n_pts, 0.95))
        numeric = derivative(tf, z, 2, settings)
        direct = second_derivative_direct(T, f, z, settings)
        worst = max(worst, float(np.max(np.abs(numeric - direct))))
    c.le("closed_form_max_abs", worst, cfg.tolerance("closed_form"))

    worst = 0.0
    for _ in range(int(p.get("schwarz_pick_samples", 10000))):
        s = random_automorphism(rng, 0.95)
        z = rng.disc_point(0.99)
        worst = max(worst, abs((1 - abs(z) ** 2) * abs(s.derivative(z)) - (1 - abs(s(z)) ** 2)))
    c.le("schwarz_pick_max_abs", worst, cfg.tolerance("schwarz_pick"))
    return c


def check_flow_group_law(cfg, settings):
    c = _Check("flow-group-law")
    rng = _child_rng(cfg.seed, "flow-group-law")
    grid = [-1.0, -0.3, 0.2, 0.7]
    pts = np.array(rng.disc_points(200, 0.99))
    for F in _families(cfg):
        v = F.variant
        c.le(f"group_law[{v}]", group_law_check(F, grid, grid, pts), cfg.tolerance("group_law"))
        c.le(f"identity_at_zero[{v}]", float(np.max(np.abs(flow_eval(F, 0.0, pts) - pts))), 1e-15)
        c.le(f"fixed_point_drift[{v}]", fixed_point_drift(F, grid), cfg.tolerance("fixed_points"))
        flow = IsometryFlow(0.7, F)
        gap = max(abs((isometry_at(flow, s + t).alpha - isometry_at(flow, s).alpha
                       - isometry_at(flow, t).alpha + math.pi) % (2 * math.pi) - math.pi)
                  for s in grid for t in grid)
        c.le(f"phase_additivity[{v}]", gap, 1e-12)
        norms = [n for _, n in strong_continuity(flow, monomial(3), [0.1, 0.01, 0.001], settings)]
        c.flag(f"strong_continuity[{v}]", norms[0] > norms[1] > norms[2], norms)
    return c


def check_generator(cfg, settings):
    c = _Check("generator")
    rng = _child_rng(cfg.seed, "generator")
    p = _params(cfg, "generator")
    n = int(p.get("field_points", 1000))
    z_probe = complex(p.get("z", 0.4))
    f = monomial(3)
    low, high = cfg.tolerance("rate_low"), cfg.tolerance("rate_high")
    families = [FlowFamily.trivial()] + _families(cfg)
    for F in families:
        v = F.variant
        pts = np.array(rng.disc_points(n, 0.99))
        closed = generator_field(F, pts, "closed")
        fd = generator_field(F, pts, "fd")
        rel = float(np.max(np.abs(closed - fd) / np.maximum(np.abs(closed), 1.0)))
        c.le(f"field_relative[{v}]", rel, cfg.tolerance("generator_field"))
        flow = IsometryFlow(0.7, F)
        quotients = difference_quotients(flow, f, z_probe, settings=settings)
        _, ratios = convergence_ratios(quotients, apply_generator(flow, f, z_probe, settings))
        c.within(f"quotient_rate_min[{v}]", min(ratios), low, high)
        c.within(f"quotient_rate_max[{v}]", max(ratios), low, high)
        _, ref = convergence_ratios(quotients, flow_time_derivative(flow, f, z_probe, settings))
        c.info(f"quotient_rate_vs_time_derivative[{v}]", [min(ref), max(ref)])
        if v == "hyperbolic":
            c.info("hyperbolic_field_convention", HYPERBOLIC_FIELD)
    return c


def check_extreme_point(cfg, settings):
    c = _Check("extreme-point")
    rng = _child_rng(cfg.seed, "extreme-point")
    fns = [monomial(2), monomial(3), peaking(0.5)]
    worst = 0.0
    for T in _random_operators(rng, 10):
        theta = rng.uniform(0, 2 * math.pi)
        pts = rng.disc_points(100, 0.95)
        for z in pts:
            phase, w = adjoint_on_extreme(T, theta, z)
            for f in fns:
                lhs = (1 - abs(z) ** 2) * complex(math.cos(theta), math.sin(theta)) \
                    * second_derivative_direct(T, f, z, settings)
                rhs = complex(math.cos(phase), math.sin(phase)) * (1 - abs(w) ** 2) \
                    * derivative(f, w, 2, settings)
                worst = max(worst, abs(lhs - rhs))
    c.le("transport_max_abs", worst, cfg.tolerance("extreme"))
    worst_pk = 0.0
    for z0 in (0.5, 0.3 + 0.4j, -0.7j):
        val = extreme_functional_eval(ExtremeFunctional(SpaceVariant.Z0_01, z0), peaking(z0),
                                      settings)
        worst_pk = max(worst_pk, abs(abs(val) - 1.0))
    c.le("peaking_functional_modulus_error", worst_pk, cfg.tolerance("extreme"))
    return c


def check_hermitian_exponential(cfg, settings):
    c = _Check("hermitian-exponential")
    op = build_operator(cfg.operator) if cfg.operator else None
    S = op if isinstance(op, HermitianDiagonal) else HermitianDiagonal(1.0, 2.0, 0.5)
    probes = [Polynomial([1, 1, 0.5], label="1+z+z^2/2")]
    base = [zygmund_norm(f, settings).total for f in probes]
    worst = 0.0
    for t in (0.1, 0.3, 1.0, math.pi):
        E = hermitian_exponential(S, t)
        for f, n0 in zip(probes, base):
            worst = max(worst, abs(zygmund_norm(apply_full(E, f, settings), settings).total - n0))
    c.le("norm_deviation", worst, cfg.tolerance("hermitian"))
    rng = _child_rng(cfg.seed, "hermitian-exponential")
    z = np.array(rng.disc_points(50, 0.9))
    f = probes[0]
    worst = 0.0
    for s, t in ((0.1, 0.3), (1.0, -0.4), (math.pi, 2.0)):
        two = apply_full(hermitian_exponential(S, s),
                         apply_full(hermitian_exponential(S, t), f, settings), settings)
        one = apply_full(hermitian_exponential(S, s + t), f, settings)
        worst = max(worst, float(np.max(np.abs(two(z) - one(z)))))
    c.le("group_property_max_abs", worst, 1e-12)
    return c


def check_domain(cfg, settings):
    c = _Check("domain")
    flow = IsometryFlow(0.0, FlowFamily.elliptic(1.0, 0.5))
    rep = generator_domain_check(flow, Polynomial([0, 0, 1], label="z^2"), settings)
    c.le("elliptic_tau_half_deriv_error", abs(rep["deriv_at_zero"] - 4.0 / 3.0),
         cfg.tolerance("domain"))
    c.flag("elliptic_tau_half_out_of_domain", not rep["in_domain"], rep["violations"])
    triv = generator_domain_check(IsometryFlow(0.7, FlowFamily.trivial()), monomial(2), settings)
    c.flag("trivial_in_domain", triv["in_domain"], triv["violations"])
    return c


def check_unboundedness(cfg, settings):
    c = _Check("unboundedness")
    degrees = [4, 8, 16, 32]
    probe = unboundedness_probe(IsometryFlow(0.0, FlowFamily.elliptic(1.0, 0.0)), degrees,
                                settings)
    ratios = [r for _, r, _ in probe]
    c.le("elliptic_ratio_error", max(abs(r - n) for n, r in zip(degrees, ratios)),
         cfg.tolerance("unboundedness"))
    c.flag("elliptic_strictly_increasing", all(a < b for a, b in zip(ratios, ratios[1:])), ratios)
    alpha = 2.0
    triv = unboundedness_probe(IsometryFlow(alpha, FlowFamily.trivial()), [4, 8], settings)
    c.le("trivial_ratio_error", max(abs(r - abs(alpha)) for _, r, _ in triv),
         cfg.tolerance("trivial_ratio"))
    return c


_RUNNERS = {
    "domain": check_domain,
    "extreme-point": check_extreme_point,
    "flow-group-law": check_flow_group_law,
    "generator": check_generator,
    "hermitian-exponential": check_hermitian_exponential,
    "isometry": check_isometry,
    "norm": check_norm,
    "unboundedness": check_unboundedness,
}


@dataclass
class RunReport:
    status: str
    checks: dict
    seed: int
    config_hash: str
    settings: dict
    tolerances: dict
    version: str = __version__

    @property
    def exit_code(self):
        return 0 if self.status == "pass" else 1

    def to_dict(self):
        return {"tool": "zyglab", "version": self.version, "status": self.status,
                "seed": self.seed, "config_hash": self.config_hash, "settings": self.settings,
                "tolerances": self.tolerances, "checks": self.checks}

    def to_json(self):
        return json.dumps(self.to_dict(), indent=2, sort_keys=True) + "\n"

    def csv_rows(self):
        rows = [("check", "measurement", "value", "relation", "tolerance", "status")]
        for name, chk in self.checks.items():
            for key, m in chk["measurements"].items():
                status = {True: "pass", False: "fail", None: "info"}[m["pass"]]
                rows.append((name, key, json.dumps(m["value"]), m["relation"],
                             json.dumps(m["tolerance"]), status))
        return rows


def run_scenario(cfg):
    """Run the named checks; checks are reported in name order."""
    settings = EvaluationSettings(**cfg.settings) if cfg.settings else DEFAULT_SETTINGS

    def run(name):
        start = time.perf_counter()
        try:
            chk = _RUNNERS[name](cfg, settings)
            out = {"status": chk.status(), "measurements": chk.measurements}
        except ZygLabError as exc:
            out = {"status": "fail", "measurements": {},
                   "error": f"{type(exc).__name__}: {exc}"}
        out["duration_s"] = time.perf_counter() - start
        return name, out

    names = sorted(set(cfg.checks))
    results = dict(parallel_map(run, names))
    status = "pass" if all(r["status"] == "pass" for r in results.values()) else "fail"
    tolerances = {k: cfg.tolerance(k) for k in sorted(DEFAULT_TOLERANCES)}
    return RunReport(status=status, checks=results, seed=cfg.seed, config_hash=cfg.digest(),
                     settings=settings.__dict__.copy(), tolerances=tolerances)


def strip_durations(report_dict):
    """Copy of a report dict without wall-clock fields."""
    out = json.loads(json.dumps(report_dict))
    for chk in out.get("checks", {}).values():
        chk.pop("duration_s", None)
    return out
