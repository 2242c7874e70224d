"""
Command-line front end.

    congbox count   --p 7 --n 3 --s 1 --a 1 --b 3 --c 1 --k 3 --u 0 --h 6
    congbox verify  --seed 1 --battery 20
    congbox sweep   --target acz --grid 101,1009 --instances 10 --out acz.csv
    congbox moments --p 13 --u 2 --h 9 --rho random --seed 4

Options may also come from ``--config FILE`` holding ``key = value`` lines;
flags given on the command line win.  Exit status: 0 success, 1 failed
check, 2 bad configuration, 3 resource guard.
"""
from __future__ import annotations

import argparse
import configparser
import csv
import io
import json
import math
import sys
import time

import numpy as np

from . import __version__
from .bounds import EXTRA_COLUMNS, SweepPlan, run_sweep
from .counting import (BRUTE_CAP, BoxSpec, SystemSpec, count_bruteforce, count_spectral,
                       predicted_density)
from .errors import CongboxError, ValidationError
from .ffcore import build_field_ctx
from .sums import IntervalWeights, PolyMod, acz_quadruple_count, fourth_moment, weighted_quadruple_sum
from .verify import random_weights, run_battery

SWEEP_COLUMNS = ("target", "p", "h", "n", "s", "seed", "exact", "bound", "ratio", "flagged")

# option -> (parser, default); None default means "required for the command"
OPTIONS = {
    "count": {
        "p": (int, None), "n": (int, None), "s": (int, 0), "a": (int, None), "b": (str, ""),
        "c": (str, "1"), "k": (str, "3"), "m": (str, ""), "u": (str, "0"), "h": (int, None),
        "method": (str, "auto"), "transform": (str, "direct"), "force": (bool, False),
        "paper_regime": (bool, False), "workers": (int, 1),
    },
    "verify": {"battery": (int, 20), "inject_fault": (bool, False)},
    "sweep": {
        "target": (str, None), "grid": (str, None), "instances": (int, 10),
        "h_exp": (float, 0.5), "h_jitter": (float, 0.0), "kappa": (float, 0.25), "K": (int, 3),
        "n": (int, 6), "s": (int, 1), "k": (str, ""), "slack_eps": (float, 0.1),
        "slack_c": (float, 1.0), "weil_degree": (int, 2), "transform": (str, "direct"),
        "workers": (int, 1),
    },
    "moments": {"p": (int, None), "u": (int, 0), "h": (int, None), "rho": (str, "ones")},
}
COMMON = {"seed": (int, 1), "format": (str, "pretty"), "out": (str, "")}


def _to_bool(v) -> bool:
    if isinstance(v, bool):
        return v
    if str(v).strip().lower() in ("1", "true", "yes", "on"):
        return True
    if str(v).strip().lower() in ("0", "false", "no", "off", ""):
        return False
    raise ValidationError(f"not a boolean: {v!r}")


def _ints(text: str) -> list[int]:
    return [int(v) for v in str(text).replace(" ", "").split(",") if v != ""]


def _matrix(text: str, n: int, s: int, name: str) -> tuple:
    """``"1,2;3,4"`` -> rows; a single row is repeated for every variable."""
    rows = [_ints(r) for r in str(text).split(";") if r.strip()]
    if s == 0:
        return ((),) * n
    if len(rows) == 1:
        row = rows[0] * s if len(rows[0]) == 1 else rows[0]
        rows = [row] * n
    if len(rows) != n or any(len(r) != s for r in rows):
        raise ValidationError(f"--{name} must give n={n} rows of s={s} entries")
    return tuple(tuple(r) for r in rows)


def read_config_file(path: str) -> dict:
    parser = configparser.ConfigParser(interpolation=None)
    parser.optionxform = str
    with open(path) as fh:
        parser.read_string("[run]\n" + fh.read())
    return {key.replace("-", "_"): val for key, val in parser["run"].items()}


def resolve(command: str, args: argparse.Namespace) -> dict:
    """Merge defaults, config file and flags; reject unknown keys."""
    spec = {**COMMON, **OPTIONS[command]}
    raw = read_config_file(args.config) if args.config else {}
    unknown = sorted(set(raw) - set(spec))
    if unknown:
        raise ValidationError(f"unknown configuration keys: {', '.join(unknown)}")
    for key in spec:
        flag = getattr(args, key, None)
        if flag is not None:
            raw[key] = flag
    cfg = {}
    for key, (kind, default) in spec.items():
        if key not in raw:
            if default is None:
                raise ValidationError(f"missing required option --{key.replace('_', '-')}")
            cfg[key] = default
            continue
        try:
            cfg[key] = _to_bool(raw[key]) if kind is bool else kind(raw[key])
        except ValueError as exc:
            raise ValidationError(f"bad value for {key}: {raw[key]!r}") from exc
    if cfg["format"] not in ("csv", "json", "pretty"):
        raise ValidationError(f"unknown format {cfg['format']!r}")
    return cfg


# -- output ------------------------------------------------------------------

def fmt(v):
    """17 significant digits for floats, exact integers."""
    if isinstance(v, (bool, np.bool_)):
        return int(v)
    if isinstance(v, (int, np.integer)):
        return int(v)
    if isinstance(v, (float, np.floating)):
        return format(float(v), ".17g")
    return v


def _jsonable(v):
    if isinstance(v, complex):
        return {"re": float(v.real), "im": float(v.imag)}
    if isinstance(v, (np.integer,)):
        return int(v)
    if isinstance(v, (np.floating,)):
        return float(v)
    if isinstance(v, float) and not math.isfinite(v):
        return str(v)
    return v


def header(command: str, cfg: dict) -> dict:
    return {"tool": "congbox", "version": __version__, "command": command,
            "seed": cfg["seed"], "config": cfg}


def emit(text: str, cfg: dict) -> None:
    if cfg["out"]:
        with open(cfg["out"], "w", newline="") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def render(command: str, cfg: dict, fields: dict, elapsed: float,
           rows: list | None = None, columns: tuple | None = None) -> str:
    """Render a report; CSV omits wall-clock time so reruns are byte-identical."""
    head = header(command, cfg)
    if cfg["format"] == "json":
        doc = {**head, "elapsed_s": elapsed,
               **{k: _jsonable(v) for k, v in fields.items()}}
        if rows is not None:
            doc["rows"] = [{c: _jsonable(r[c]) for c in columns} for r in rows]
        return json.dumps(doc, indent=2, sort_keys=False) + "\n"
    if cfg["format"] == "csv":
        buf = io.StringIO()
        buf.write(f"# congbox {__version__} {command}\n")
        buf.write(f"# seed: {cfg['seed']}\n")
        buf.write(f"# config: {json.dumps(cfg, sort_keys=True)}\n")
        writer = csv.writer(buf, lineterminator="\n")
        if rows is None:
            rows, columns = [fields], tuple(fields)
        writer.writerow(columns)
        for r in rows:
            writer.writerow([fmt(r[c]) for c in columns])
        return buf.getvalue()
    lines = [f"congbox {__version__} {command}  seed={cfg['seed']}",
             "config: " + json.dumps(cfg, sort_keys=True)]
    width = max((len(k) for k in fields), default=0)
    lines += [f"{k:<{width}}  {v}" for k, v in fields.items()]
    if rows is not None:
        lines.append("  ".join(columns))
        for r in rows:
            lines.append("  ".join(str(fmt(r[c])) for c in columns))
    lines.append(f"elapsed_s  {elapsed:.3f}")
    return "\n".join(lines) + "\n"


# -- commands ----------------------------------------------------------------

def build_instance(cfg: dict):
    p, n, s = cfg["p"], cfg["n"], cfg["s"]
    b = [v % p for v in _ints(cfg["b"])]
    c = tuple(tuple(v % p for v in row) for row in _matrix(cfg["c"], n, s, "c"))
    k = _matrix(cfg["k"], n, s, "k")
    u = _ints(cfg["u"])
    if len(u) == 1:
        u = u * n
    form = None
    if cfg["m"]:
        m = _ints(cfg["m"])
        m = m * n if len(m) == 1 else m
        if len(m) != n:
            raise ValidationError(f"--m needs n={n} powers")
        form = tuple(PolyMod.monomial(1, mi, p) for mi in m)
    sys_ = SystemSpec(n, s, cfg["a"] % p, tuple(b), c, k, product_form=form,
                      paper_regime=cfg["paper_regime"])
    return sys_, BoxSpec(tuple(u), cfg["h"])


def cmd_count(cfg: dict) -> tuple[int, str]:
    t0 = time.perf_counter()
    if cfg["method"] not in ("brute", "spectral", "both", "auto"):
        raise ValidationError(f"unknown method {cfg['method']!r}")
    ctx = build_field_ctx(cfg["p"])
    sys_, box = build_instance(cfg)
    warnings = sys_.validate(ctx.p)
    box.validate(ctx.p, sys_.n)
    method = cfg["method"]
    if method == "auto":
        method = "brute" if box.h ** sys_.n <= BRUTE_CAP else "spectral"
    dens = predicted_density(sys_, box, ctx.p)
    fields = {"p": ctx.p, "n": sys_.n, "s": sys_.s, "h": box.h, "method": method}
    status = 0
    brute = spec = None
    if method in ("brute", "both"):
        brute = count_bruteforce(ctx, sys_, box, force=cfg["force"])
    if method in ("spectral", "both"):
        spec = count_spectral(ctx, sys_, box, method=cfg["transform"], workers=cfg["workers"])
    fields["count"] = spec.count if spec is not None else brute
    if method == "both":
        fields["count_brute"] = brute
        fields["count_spectral"] = spec.count
        fields["agree"] = brute == spec.count
        status = 0 if brute == spec.count else 1
    fields["main_term"] = dens.theorem
    fields["main_term_separated"] = dens.separated
    if spec is not None:
        fields.update({"r1_re": spec.r1.real, "r1_im": spec.r1.imag,
                       "r2_re": spec.r2.real, "r2_im": spec.r2.imag,
                       "zero_correction": spec.zero_correction, "residual": spec.residual})
    fields["warnings"] = "; ".join(warnings)
    return status, render("count", cfg, fields, time.perf_counter() - t0)


def cmd_verify(cfg: dict) -> tuple[int, str]:
    t0 = time.perf_counter()
    checks = run_battery(cfg["battery"], cfg["seed"], cfg["inject_fault"])
    names = list(dict.fromkeys(c.name for c in checks))
    rows = []
    for name in names:
        mine = [c for c in checks if c.name == name]
        bad = [c for c in mine if not c.ok]
        rows.append({"property": name, "checks": len(mine), "failed": len(bad),
                     "status": "FAIL" if bad else "PASS",
                     "first_failure": bad[0].detail if bad else ""})
    failed = [r["property"] for r in rows if r["failed"]]
    fields = {"checks": len(checks), "failed": ", ".join(failed) or "none",
              "result": "FAIL" if failed else "PASS"}
    text = render("verify", cfg, fields, time.perf_counter() - t0, rows,
                  ("property", "checks", "failed", "status", "first_failure"))
    return (1 if failed else 0), text


def _parse_grid(text: str) -> list:
    grid = []
    for item in text.replace(" ", "").split(","):
        if not item:
            continue
        if ":" in item:
            p, h = item.split(":")
            grid.append((int(p), int(h)))
        else:
            grid.append((int(item), None))
    return grid


def cmd_sweep(cfg: dict) -> tuple[int, str]:
    t0 = time.perf_counter()
    try:
        grid = _parse_grid(cfg["grid"])
    except ValueError as exc:
        raise ValidationError(f"bad grid {cfg['grid']!r}") from exc
    plan = SweepPlan(
        target=cfg["target"], grid=grid, instances=cfg["instances"], seed=cfg["seed"],
        h_exp=cfg["h_exp"], h_jitter=cfg["h_jitter"], kappa=cfg["kappa"], K=cfg["K"],
        n=cfg["n"], s=cfg["s"], exponents=tuple(_ints(cfg["k"])) or None,
        slack_eps=cfg["slack_eps"], slack_c=cfg["slack_c"], weil_degree=cfg["weil_degree"],
        method=cfg["transform"], workers=cfg["workers"])
    report = run_sweep(plan)
    columns = SWEEP_COLUMNS + EXTRA_COLUMNS[plan.target]
    rows = [{**{c: getattr(r, c) for c in SWEEP_COLUMNS}, **r.extra} for r in report.rows]
    elapsed = time.perf_counter() - t0
    if cfg["format"] == "csv":
        print(f"elapsed_s: {elapsed:.3f}", file=sys.stderr)
    return 0, render("sweep", cfg, report.summary(), elapsed, rows, columns)


def cmd_moments(cfg: dict) -> tuple[int, str]:
    t0 = time.perf_counter()
    ctx = build_field_ctx(cfg["p"])
    p, u, h = ctx.p, cfg["u"], cfg["h"]
    if h > p - 1:
        raise ValidationError(f"h={h} exceeds p-1={p - 1}")
    if cfg["rho"] == "ones":
        wts = IntervalWeights.ones(u, h)
    elif cfg["rho"] == "random":
        wts = IntervalWeights(u, h, random_weights(np.random.default_rng(cfg["seed"]), h))
    else:
        raise ValidationError(f"unknown weights {cfg['rho']!r}; expected ones or random")
    moment = fourth_moment(ctx, wts)
    weighted = weighted_quadruple_sum(ctx, wts)
    fields = {"p": p, "u": u, "h": h, "rho": cfg["rho"], "moment": moment,
              "weighted_quadruples": weighted}
    if cfg["rho"] == "ones":
        fields["quadruple_count"] = acz_quadruple_count(ctx, u, h)
    ratio = moment / weighted if weighted else math.nan
    ok = abs(moment - (p - 1) * weighted) <= 1e-6 * (p - 1) * weighted
    fields.update({"identity_ratio": ratio, "identity_holds": ok})
    return (0 if ok else 1), render("moments", cfg, fields, time.perf_counter() - t0)


COMMANDS = {"count": cmd_count, "verify": cmd_verify, "sweep": cmd_sweep, "moments": cmd_moments}


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="congbox", description=__doc__.split("\n\n")[0])
    parser.add_argument("--version", action="version", version=f"congbox {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)
    for name, opts in OPTIONS.items():
        sp = sub.add_parser(name)
        sp.add_argument("--config", help="key = value file; flags override it")
        for key, (kind, _) in {**COMMON, **opts}.items():
            flag = "--" + key.replace("_", "-")
            if kind is bool:
                sp.add_argument(flag, dest=key, action="store_const", const=True, default=None)
            else:
                sp.add_argument(flag, dest=key, type=kind, default=None)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        cfg = resolve(args.command, args)
        status, text = COMMANDS[args.command](cfg)
    except CongboxError as exc:
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return exc.exit_code
    except (OSError, configparser.Error) as exc:
        print(f"error: ConfigError: {exc}", file=sys.stderr)
        return 2
    emit(text, cfg)
    return status


if __name__ == "__main__":
    sys.exit(main())
