"""Command-line front end.

Exit codes: 0 success, 1 I/O or parse error, 2 precondition violation,
3 internal invariant breach (including a failed closure equivalence check).

Option values are resolved as command-line flag, then ``--config`` file
(flat ``key = value`` lines, ``#`` comments), then built-in default. The
seed additionally falls back to the ``TRIADIC_SEED`` environment variable
before the default.
"""
from __future__ import annotations

import argparse
import csv
import io
import json
import os
import sys

import numpy as np

from .closure import LocalTestRule, counterexample_vs_bonferroni, default_grid, verify_theorem_equivalence
from .exceptions import (
    ComplementarityViolation,
    ConfigError,
    InternalInconsistency,
    ParseError,
    PreconditionError,
    TriadicError,
)
from .family import (
    FREE_COMBINATION,
    Decision,
    HypothesisFamily,
    PValuePair,
    ordered_threshold_oracle,
    partition_from_decisions,
)
from .models import GaussianMeansModel, NestedNormalModel, correlation_edge_test
from .procedures import Calibration, CalibrationKind, calibrate, single_step
from .risk import LossSpec, ProcedureSpec, monte_carlo_risk

EXIT_OK, EXIT_IO, EXIT_PRECONDITION, EXIT_INTERNAL = 0, 1, 2, 3
SEED_ENV = "TRIADIC_SEED"


def _floats(text):
    return [float(v) for v in str(text).replace(",", " ").split()]


DEFAULTS = {
    "alpha": 0.05,
    "calibration": "bonferroni",
    "format": "table",
    "seed": 0,
    "replicates": 10_000,
    "m": None,
    "theta": None,
    "boundary": None,
    "theta1": 0.0,
    "theta2": 10.0,
    "n": 1,
    "rho0": 0.0,
    "model": "gaussian",
    "procedure": "single-step",
    "loss_b": 0.5,
    "loss": None,
    "workers": 1,
    "trials": 10_000,
    "grid_points": 4001,
    "xbar_min": None,
    "xbar_max": None,
    "input": None,
}

CONVERTERS = {
    "alpha": float, "seed": int, "replicates": int, "m": int, "theta": _floats,
    "boundary": _floats, "theta1": float, "theta2": float, "n": int, "rho0": float,
    "loss_b": float, "loss": _floats, "workers": int, "trials": int,
    "grid_points": int, "xbar_min": float, "xbar_max": float,
}


def read_config_file(path):
    """Parse a flat ``key = value`` file into a dict of raw strings."""
    out = {}
    try:
        with open(path, encoding="utf-8") as fh:
            lines = fh.readlines()
    except OSError as exc:
        raise ParseError(f"cannot read config file {path}: {exc}") from exc
    for lineno, line in enumerate(lines, 1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ParseError("expected key = value", lineno)
        key, value = (s.strip() for s in line.split("=", 1))
        out[key.replace("-", "_")] = value
    return out


def resolve(args, key):
    """Flag value, else config-file value, else default."""
    value = getattr(args, key, None)
    if value is not None:
        return value
    cfg = getattr(args, "_config", {})
    if key in cfg:
        conv = CONVERTERS.get(key, str)
        try:
            return conv(cfg[key])
        except ValueError as exc:
            raise ConfigError(f"config key {key!r}: {exc}") from exc
    if key == "seed" and os.environ.get(SEED_ENV):
        try:
            return int(os.environ[SEED_ENV])
        except ValueError as exc:
            raise ConfigError(f"{SEED_ENV} must be an integer") from exc
    return DEFAULTS.get(key)


def _alpha(args):
    alpha = resolve(args, "alpha")
    if not 0.0 < alpha < 1.0:
        raise ConfigError(f"alpha={alpha} is not in (0, 1)")
    return alpha


def _fmt(x):
    return format(float(x), ".17g")


# --- input files -----------------------------------------------------------------

def _open_text(path):
    if path is None:
        raise ConfigError("--input is required")
    if path == "-":
        return sys.stdin.read()
    try:
        with open(path, encoding="utf-8", newline="") as fh:
            return fh.read()
    except OSError as exc:
        raise ParseError(f"cannot read {path}: {exc}") from exc


def _parse_probability(text, name, lineno):
    try:
        v = float(text)
    except ValueError:
        raise ParseError(f"{name}={text!r} is not a number", lineno) from None
    if not 0.0 <= v <= 1.0:
        raise ParseError(f"{name}={v!r} is outside [0, 1]", lineno)
    return v


def read_pvalue_csv(text):
    """Parse ``index,p_h[,p_k]`` rows; extra columns are ignored.

    Returns ``(indices, p_h, p_k_or_None)`` ordered by index.
    """
    rows = list(csv.reader(io.StringIO(text)))
    rows = [(i, r) for i, r in enumerate(rows, 1) if r and any(c.strip() for c in r)]
    if not rows:
        raise ParseError("empty input", 1)
    header_line, header = rows[0]
    header = [c.strip() for c in header]
    if "index" not in header or "p_h" not in header:
        raise ParseError("header must contain 'index' and 'p_h'", header_line)
    ci, ch = header.index("index"), header.index("p_h")
    ck = header.index("p_k") if "p_k" in header else None
    if len(rows) < 2:
        raise ParseError("no data rows", header_line)
    records = {}
    for lineno, row in rows[1:]:
        if len(row) != len(header):
            raise ParseError(f"expected {len(header)} fields, got {len(row)}", lineno)
        try:
            idx = int(row[ci])
        except ValueError:
            raise ParseError(f"index {row[ci]!r} is not an integer", lineno) from None
        if idx in records:
            raise ParseError(f"duplicate index {idx}", lineno)
        p_h = _parse_probability(row[ch], "p_h", lineno)
        p_k = None if ck is None else _parse_probability(row[ck], "p_k", lineno)
        records[idx] = (p_h, p_k)
    indices = sorted(records)
    if indices != list(range(1, len(indices) + 1)):
        raise ParseError(f"indices must be 1..{len(indices)}")
    p_h = [records[i][0] for i in indices]
    p_k = None if ck is None else [records[i][1] for i in indices]
    return indices, p_h, p_k


def read_data_csv(text):
    """Header of variable names followed by numeric rows."""
    rows = [(i, r) for i, r in enumerate(csv.reader(io.StringIO(text)), 1)
            if r and any(c.strip() for c in r)]
    if not rows:
        raise ParseError("empty input", 1)
    names = [c.strip() for c in rows[0][1]]
    data = []
    for lineno, row in rows[1:]:
        if len(row) != len(names):
            raise ParseError(f"expected {len(names)} fields, got {len(row)}", lineno)
        try:
            data.append([float(c) for c in row])
        except ValueError as exc:
            raise ParseError(str(exc), lineno) from None
    return names, np.array(data, dtype=float).reshape(len(data), len(names))


# --- output helpers ----------------------------------------------------------------

def _json(obj):
    return json.dumps(obj, indent=2, sort_keys=True) + "\n"


def _csv(header, rows):
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    w.writerows(rows)
    return buf.getvalue()


def _table(header, rows):
    cells = [[str(c) for c in header]] + [[str(c) for c in r] for r in rows]
    widths = [max(len(r[i]) for r in cells) for i in range(len(header))]
    lines = ["  ".join(c.ljust(w) for c, w in zip(r, widths)).rstrip() for r in cells]
    lines.insert(1, "  ".join("-" * w for w in widths))
    return "\n".join(lines) + "\n"


def _set_str(s):
    return "{" + ", ".join(str(i) for i in sorted(s)) + "}"


# --- commands ----------------------------------------------------------------------

def cmd_test(args):
    alpha = _alpha(args)
    kind = CalibrationKind(resolve(args, "calibration"))
    indices, p_h, p_k = read_pvalue_csv(_open_text(resolve(args, "input")))
    if p_k is None:
        family = HypothesisFamily.from_p_h(p_h)
    else:
        family = HypothesisFamily(tuple(PValuePair(a, b) for a, b in zip(p_h, p_k)))
    override = bool(args.allow_noncomplementary)
    cal = Calibration(kind, alpha, family.m)
    th = calibrate(kind, alpha, family.m)
    d = single_step(family, th, override=override)
    sets = partition_from_decisions(d)
    caveats = [c for c in (cal.caveat,) if c]
    if not family.complementary:
        caveats.append("non-complementary pairs tested separately (override)")
    report = {
        "alpha": alpha,
        "calibration": kind.value,
        "m": family.m,
        "thresholds": {"lower": th.lower, "upper": th.upper},
        "complementary": family.complementary,
        "override": override,
        "caveats": caveats,
        "decisions": [
            {"index": i, "p_h": p.p_h, "p_k": p.p_k, "decision": x.name}
            for i, p, x in zip(indices, family.pairs, d)
        ],
        "sets": {"u_bar": sorted(sets.u_bar), "l": sorted(sets.l), "g": sorted(sets.g)},
    }
    fmt = resolve(args, "format")
    if fmt == "json":
        return _json(report), EXIT_OK
    rows = [(i, _fmt(p.p_h), _fmt(p.p_k), x.name) for i, p, x in zip(indices, family.pairs, d)]
    if fmt == "csv":
        return _csv(("index", "p_h", "p_k", "decision"), rows), EXIT_OK
    out = _table(("index", "p_h", "p_k", "decision"), rows)
    out += (f"\nthresholds: lower={th.lower:.6g} upper={th.upper:.6g} "
            f"({kind.value}, alpha={alpha}, M={family.m})\n")
    out += f"complementary: {family.complementary}\n"
    out += (f"significantly false (U-bar): {_set_str(sets.u_bar)}\n"
            f"significantly true (L): {_set_str(sets.l)}\n"
            f"uncertain (G): {_set_str(sets.g)}\n")
    for c in caveats:
        out += f"note: {c}\n"
    return out, EXIT_OK


def _build_model(args):
    kind = resolve(args, "model")
    n = resolve(args, "n")
    theta = resolve(args, "theta")
    if kind == "nested":
        theta = 0.0 if theta is None else theta
        if isinstance(theta, list):
            if len(theta) != 1:
                raise ConfigError("the nested model takes a single --theta")
            theta = theta[0]
        return NestedNormalModel(theta, n, resolve(args, "theta1"), resolve(args, "theta2"))
    if kind != "gaussian":
        raise ConfigError(f"unknown model {kind!r}")
    m = resolve(args, "m")
    if theta is None:
        if m is None:
            raise ConfigError("give --theta or --m")
        theta = [0.0] * m
    elif m is not None and len(theta) == 1:
        theta = theta * m
    elif m is not None and len(theta) != m:
        raise ConfigError(f"--m {m} but {len(theta)} theta values")
    return GaussianMeansModel(theta, n, resolve(args, "boundary"))


def _loss_spec(args):
    raw = resolve(args, "loss")
    if raw is not None:
        if len(raw) != 4:
            raise ConfigError("--loss takes four values a,b,c,l")
        return LossSpec(*raw)
    return LossSpec.identity(resolve(args, "loss_b"))


def cmd_simulate(args):
    alpha = _alpha(args)
    model = _build_model(args)
    procedure = ProcedureSpec(resolve(args, "procedure").replace("-", "_"), alpha,
                              resolve(args, "calibration"))
    replicates = resolve(args, "replicates")
    if replicates < 1:
        raise ConfigError("replicates must be >= 1")
    report = monte_carlo_risk(model, procedure, _loss_spec(args), replicates,
                              resolve(args, "seed"), workers=resolve(args, "workers"))
    d = report.to_dict()
    d["fwer_within_alpha_3se"] = report.fwer_within(alpha)
    fmt = resolve(args, "format")
    if fmt == "json":
        return _json(d), EXIT_OK
    keys = ("fwer", "directional_h", "directional_k", "expected_g", "risk")
    rows = [(k, _fmt(d[k]), _fmt(d["std_errors"][k])) for k in keys]
    if fmt == "csv":
        return _csv(("quantity", "estimate", "std_error"), rows), EXIT_OK
    out = _table(("quantity", "estimate", "std_error"), rows)
    out += (f"\nmodel: {d['model']}\nprocedure: {d['procedure']}\n"
            f"replicates: {report.replicates}  seed: {report.seed}\n"
            f"FWER <= alpha + 3 SE: {d['fwer_within_alpha_3se']}\n")
    if report.decomposition_residual is not None:
        out += f"decomposition residual (exact): {report.decomposition_residual}\n"
    for c in report.caveats:
        out += f"note: {c}\n"
    return out, EXIT_OK


def cmd_closure_check(args):
    alpha = _alpha(args)
    if args.nested:
        family = HypothesisFamily.from_p_h(
            [0.5, 0.5], ordered_threshold_oracle((resolve(args, "theta1"), resolve(args, "theta2"))))
    else:
        m = resolve(args, "m") or 1
        family = HypothesisFamily.from_p_h([0.5] * m, FREE_COMBINATION)
    rule = LocalTestRule(resolve(args, "calibration"), alpha)
    rep = verify_theorem_equivalence(family, rule, resolve(args, "trials"), resolve(args, "seed"))
    code = EXIT_OK if rep.ok else EXIT_INTERNAL
    fmt = resolve(args, "format")
    d = rep.to_dict()
    if fmt == "json":
        return _json(d), code
    rows = [(k, d[k]) for k in ("m", "trials", "schedule", "mismatches", "ok")]
    rows += [("lower", _fmt(rep.thresholds.lower)), ("upper", _fmt(rep.thresholds.upper))]
    if fmt == "csv":
        return _csv(("key", "value"), rows), code
    out = _table(("key", "value"), rows)
    if rep.first_counterexample:
        out += f"\nfirst counterexample: {rep.first_counterexample}\n"
    return out, code


def cmd_counterexample(args):
    alpha = _alpha(args)
    n, t1, t2 = resolve(args, "n"), resolve(args, "theta1"), resolve(args, "theta2")
    points = resolve(args, "grid_points")
    lo, hi = resolve(args, "xbar_min"), resolve(args, "xbar_max")
    if t1 >= t2:
        from .exceptions import InvalidOrdering
        raise InvalidOrdering(f"need theta1 < theta2, got {t1} >= {t2}")
    grid = default_grid(n, t1, t2, alpha, points)
    if lo is not None or hi is not None:
        grid = np.linspace(grid[0] if lo is None else lo, grid[-1] if hi is None else hi, points)
    rep = counterexample_vs_bonferroni(grid, n, t1, t2, alpha)
    fmt = resolve(args, "format")
    d = rep.to_dict()
    if fmt == "json":
        return _json(d), EXIT_OK
    seg_rows = [(_fmt(s["xbar_from"]), _fmt(s["xbar_to"]), ",".join(s["closure"]),
                 ",".join(s["bonferroni"])) for s in d["segments"]]
    if fmt == "csv":
        return _csv(("xbar_from", "xbar_to", "closure", "bonferroni"), seg_rows), EXIT_OK
    crit_rows = [(name, f"{rep.closure_critical[name]:.6f}", f"{rep.bonferroni_critical[name]:.6f}")
                 for name in ("h1", "k1", "h2", "k2")]
    out = "critical values on the standardised scale sqrt(n)(xbar - theta_i)\n"
    out += _table(("test", "closure", "bonferroni"), crit_rows)
    out += "\ndecisions over the grid\n"
    out += _table(("xbar_from", "xbar_to", "closure", "bonferroni"),
                  [(f"{float(a):.6f}", f"{float(b):.6f}", c, e) for a, b, c, e in seg_rows])
    out += "\ndisagreement (standardised scale)\n"
    if not rep.analytic:
        out += "  none\n"
    for iv in rep.analytic:
        out += f"  index {iv.index}, test {iv.test}: {iv}\n"
    for ob in rep.observed:
        out += (f"  observed on grid, index {ob['index']}: xbar in "
                f"({ob['xbar_lo']:.6f}, {ob['xbar_hi']:.6f}); closure {ob['closure']}, "
                f"bonferroni {ob['bonferroni']}\n")
    return out, EXIT_OK


def cmd_graph(args):
    alpha = _alpha(args)
    kind = CalibrationKind(resolve(args, "calibration"))
    names, data = read_data_csv(_open_text(resolve(args, "input")))
    rho0 = resolve(args, "rho0")
    res = correlation_edge_test(data, rho0)
    report = {"alpha": alpha, "calibration": kind.value, "rho0": rho0,
              "n_obs": int(data.shape[0]), "n_vars": len(names), "m": len(res.edges),
              "structure": "free combination declared, not verified",
              "significant_edges": [], "significant_non_edges": [], "uncertain": [],
              "edges": []}
    if res.edges:
        th = calibrate(kind, alpha, len(res.edges))
        d = single_step(res.family, th)
        report["thresholds"] = {"lower": th.lower, "upper": th.upper}
        bucket = {Decision.D2: "significant_edges", Decision.D1: "significant_non_edges",
                  Decision.D3: "uncertain"}
        for (i, j), r, p, x in zip(res.edges, res.correlations, res.family.pairs, d):
            pair = [names[i - 1], names[j - 1]]
            report[bucket[x]].append(pair)
            report["edges"].append({"u": pair[0], "v": pair[1], "r": float(r),
                                    "p_h": p.p_h, "p_k": p.p_k, "decision": x.name})
    report["counts"] = {k: len(report[k]) for k in
                        ("significant_edges", "significant_non_edges", "uncertain")}
    fmt = resolve(args, "format")
    if fmt == "json":
        return _json(report), EXIT_OK
    rows = [(e["u"], e["v"], _fmt(e["r"]), _fmt(e["p_h"]), e["decision"]) for e in report["edges"]]
    if fmt == "csv":
        return _csv(("u", "v", "r", "p_h", "decision"), rows), EXIT_OK
    out = _table(("u", "v", "r", "p_h", "decision"), rows) if rows else "no edges\n"
    c = report["counts"]
    out += (f"\nsignificant edges: {c['significant_edges']}  "
            f"significant non-edges: {c['significant_non_edges']}  "
            f"uncertain |G|: {c['uncertain']}\n")
    return out, EXIT_OK


# --- parser --------------------------------------------------------------------------

def build_parser():
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--alpha", type=float)
    common.add_argument("--calibration", choices=[k.value for k in CalibrationKind])
    common.add_argument("--format", choices=["table", "json", "csv"])
    common.add_argument("--seed", type=int)
    common.add_argument("--config", help="flat key = value file")

    p = argparse.ArgumentParser(prog="triadic", description=__doc__.split("\n")[0])
    sub = p.add_subparsers(dest="command", required=True)

    t = sub.add_parser("test", parents=[common], help="three-way test of a p-value table")
    t.add_argument("--input", help="CSV with header index,p_h[,p_k]; '-' for stdin")
    t.add_argument("--allow-noncomplementary", action="store_true",
                   help="test p_h and p_k separately when p_h + p_k != 1")
    t.set_defaults(func=cmd_test)

    s = sub.add_parser("simulate", parents=[common], help="Monte Carlo FWER, E|G| and risk")
    s.add_argument("--model", choices=["gaussian", "nested"])
    s.add_argument("--procedure",
                   choices=["single-step", "bauer-bonferroni", "closure", "counterexample"])
    s.add_argument("--m", type=int)
    s.add_argument("--theta", type=float, nargs="+")
    s.add_argument("--boundary", type=float, nargs="+")
    s.add_argument("--theta1", type=float)
    s.add_argument("--theta2", type=float)
    s.add_argument("--n", type=int)
    s.add_argument("--replicates", type=int)
    s.add_argument("--loss-b", dest="loss_b", type=float,
                   help="symmetric loss with a = c = 1 - b, l = b")
    s.add_argument("--loss", type=float, nargs=4, metavar=("A", "B", "C", "L"))
    s.add_argument("--workers", type=int)
    s.set_defaults(func=cmd_simulate)

    c = sub.add_parser("closure-check", parents=[common],
                       help="closure vs single-step equivalence on random p-values")
    c.add_argument("--m", type=int)
    c.add_argument("--trials", type=int)
    c.add_argument("--nested", action="store_true",
                   help="use the ordered-threshold family (not freely combining)")
    c.add_argument("--theta1", type=float)
    c.add_argument("--theta2", type=float)
    c.set_defaults(func=cmd_closure_check)

    x = sub.add_parser("counterexample", parents=[common],
                       help="closure vs Bonferroni on two nested one-sided couples")
    x.add_argument("--theta1", type=float)
    x.add_argument("--theta2", type=float)
    x.add_argument("--n", type=int)
    x.add_argument("--grid-points", dest="grid_points", type=int)
    x.add_argument("--xbar-min", dest="xbar_min", type=float)
    x.add_argument("--xbar-max", dest="xbar_max", type=float)
    x.set_defaults(func=cmd_counterexample)

    g = sub.add_parser("graph", parents=[common], help="three-way threshold correlation graph")
    g.add_argument("--input", help="CSV data matrix with a header of variable names")
    g.add_argument("--rho0", type=float)
    g.set_defaults(func=cmd_graph)
    return p


def run(argv=None):
    """Run the CLI and return ``(output_text, exit_code)``; never exits."""
    args = build_parser().parse_args(argv)
    try:
        args._config = read_config_file(args.config) if args.config else {}
        return args.func(args)
    except (ParseError, OSError) as exc:
        return f"error: {exc}\n", EXIT_IO
    except ComplementarityViolation as exc:
        return f"error: {exc}\noffending rows: {list(exc.rows)}\n", EXIT_PRECONDITION
    except (PreconditionError, ValueError) as exc:
        return f"error: {exc}\n", EXIT_PRECONDITION
    except (InternalInconsistency, TriadicError) as exc:
        return f"internal error: {exc}\n", EXIT_INTERNAL


def main(argv=None):
    out, code = run(argv)
    is_error = out.startswith(("error:", "internal error:"))
    (sys.stderr if is_error else sys.stdout).write(out)
    return code


if __name__ == "__main__":
    sys.exit(main())
