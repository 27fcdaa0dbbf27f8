"""Command-line front end: ``zyglab {norm,check,grid,classify}``.

Exit codes: 0 pass, 1 check failure, 2 configuration error.
"""

import argparse
import csv
import json
import sys
from importlib import resources

from .analytic import make_test_function
from .errors import BadSpec, ConfigInvalid, ZygLabError
from .flows import flow_from_dict
from .harness import (DEFAULT_TOLERANCES, automorphism_from_dict, load_config, parse_config,
                      run_scenario)
from .moebius import fixed_points
from .zygmund import weighted_grid, write_grid_csv, zygmund_norm

SHIPPED = {"paper-suite": "paper_suite.json"}


def _read(path):
    if path in SHIPPED:
        text = resources.files("zyglab.data").joinpath(SHIPPED[path]).read_text()
        return json.loads(text)
    return load_config(path)


def _tol_overrides(items):
    out = {}
    for item in items or ():
        name, sep, value = item.partition("=")
        if not sep:
            raise ConfigInvalid(f"--tol expects name=value, got {item!r}", "--tol")
        if name not in DEFAULT_TOLERANCES:
            raise ConfigInvalid(f"unknown tolerance {name!r}", "--tol")
        try:
            out[name] = float(value)
        except ValueError:
            raise ConfigInvalid(f"tolerance {name} is not a number", "--tol") from None
        if not out[name] > 0:
            raise ConfigInvalid(f"tolerance {name} must be positive", "--tol")
    return out


def _emit(text, out):
    if out:
        with open(out, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _rows_to_csv(rows, out):
    fh = open(out, "w", newline="") if out else sys.stdout
    try:
        csv.writer(fh, lineterminator="\n").writerows(rows)
    finally:
        if out:
            fh.close()


def cmd_check(args):
    data = _read(args.config)
    if args.seed is not None:
        data["seed"] = args.seed
    tol = dict(data.get("tolerances", {}))
    tol.update(_tol_overrides(args.tol))
    data["tolerances"] = tol
    cfg = parse_config(data)
    report = run_scenario(cfg)
    fmt = args.format or cfg.output.get("format", "json")
    out = args.out or cfg.output.get("path")
    if fmt == "csv":
        _rows_to_csv(report.csv_rows(), out)
    else:
        _emit(report.to_json(), out)
    for name, chk in report.checks.items():
        print(f"{chk['status'].upper():4s} {name}", file=sys.stderr)
    return report.exit_code


def _function_specs(data):
    if "function" in data:
        return [data["function"]]
    specs = data.get("suite")
    if not specs:
        raise ConfigInvalid("config needs 'function' or a non-empty 'suite'", "$")
    return specs


def _build(spec, where):
    try:
        return make_test_function(spec)
    except BadSpec as exc:
        raise ConfigInvalid(str(exc), where) from None


def cmd_norm(args):
    data = _read(args.config)
    reports = []
    for i, spec in enumerate(_function_specs(data)):
        f = _build(spec, f"$.suite[{i}]")
        reports.append({"function": f.describe(), "norm": zygmund_norm(f).to_dict()})
    if args.format == "csv":
        rows = [("label", "value_at_zero", "deriv_at_zero", "seminorm", "argmax_re",
                 "argmax_im", "total")]
        for r in reports:
            n = r["norm"]
            rows.append((r["function"]["label"], n["value_at_zero"], n["deriv_at_zero"],
                         n["seminorm"], n["argmax"][0], n["argmax"][1], n["total"]))
        _rows_to_csv(rows, args.out)
    else:
        _emit(json.dumps(reports, indent=2) + "\n", args.out)
    return 0


def cmd_grid(args):
    data = _read(args.config)
    spec = data.get("function")
    if not spec:
        raise ConfigInvalid("grid config needs a 'function'", "$.function")
    f = _build(spec, "$.function")
    n_r, n_theta = int(data.get("n_r", 64)), int(data.get("n_theta", 256))
    if n_r < 1 or n_theta < 1:
        raise ConfigInvalid("n_r and n_theta must be positive", "$")
    rows = weighted_grid(f, n_r, n_theta)
    if args.format == "json":
        _emit(json.dumps([{"r": r, "theta": t, "value": v} for r, t, v in rows]) + "\n",
              args.out)
    elif args.out:
        write_grid_csv(rows, args.out)
    else:
        _rows_to_csv([("r", "theta", "value")] + [tuple(map(repr, row)) for row in rows], None)
    return 0


def cmd_classify(args):
    data = _read(args.config)
    try:
        if "automorphism" in data:
            sigma = automorphism_from_dict(data["automorphism"])
        elif "flow" in data:
            sigma = flow_from_dict(data["flow"]).automorphism(float(data.get("t", 1.0)))
        else:
            raise ConfigInvalid("classify config needs 'automorphism' or 'flow'", "$")
    except (BadSpec, ZygLabError) as exc:
        if isinstance(exc, ConfigInvalid):
            raise
        raise ConfigInvalid(str(exc), "$") from None
    report = fixed_points(sigma).to_dict()
    report["automorphism"] = sigma.to_dict()
    _emit(json.dumps(report, indent=2) + "\n", args.out)
    return 0


def build_parser():
    parser = argparse.ArgumentParser(prog="zyglab", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)
    for name, fn in (("norm", cmd_norm), ("check", cmd_check), ("grid", cmd_grid),
                     ("classify", cmd_classify)):
        p = sub.add_parser(name)
        p.add_argument("--config", required=True,
                       help="JSON config path, or 'paper-suite' for the shipped scenario")
        p.add_argument("--seed", type=int, default=None)
        p.add_argument("--out", default=None)
        p.add_argument("--format", choices=("json", "csv"), default=None)
        p.add_argument("--tol", action="append", metavar="NAME=VALUE")
        p.set_defaults(func=fn)
    return parser


def main(argv=None):
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return 2 if exc.code else 0
    try:
        if args.seed is not None and not 0 <= args.seed < 2 ** 64:
            raise ConfigInvalid("seed must be an unsigned 64-bit integer", "--seed")
        return args.func(args)
    except ConfigInvalid as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
