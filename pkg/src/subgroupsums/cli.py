"""Command-line runner: subgroupsums {survey,heilbronn,operators} [options].

Rows go to --out (stdout by default) as CSV or JSON lines.  Floats are written
with 17 significant digits so both encodings carry the same doubles; exact
integers stay integers.  The exit status is 1 when any assert-mode row fails.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import sys
from dataclasses import fields
from pathlib import Path

from .reports import ASSERT, REPORT, BoundReport
from .survey import DEFAULTS, HEILBRONN, OPERATORS, SURVEY, RunConfig, RunResult, registry, run

HEADER = ["p", "t", "checker", "lhs", "rhs_shape", "ratio", "mode", "hypothesis_flags", "pass"]
PLOT_HEADER = ["p", "t", "checker", "log_p_t", "ratio"]


def fmt_number(x) -> str:
    if isinstance(x, bool):
        return str(int(x))
    if isinstance(x, int) or (hasattr(x, "dtype") and x.dtype.kind in "iu"):
        return str(int(x))
    x = float(x)
    if math.isnan(x):
        return "nan"
    if math.isinf(x):
        return "inf" if x > 0 else "-inf"
    return format(x, ".17g")


def fmt_flags(flags: dict) -> str:
    return ";".join(f"{k}={int(bool(v))}" for k, v in sorted(flags.items()))


def row_fields(r: BoundReport) -> list[str]:
    return [
        str(r.p), str(r.t), r.name, fmt_number(r.lhs), fmt_number(r.rhs_shape), fmt_number(r.ratio),
        r.mode, fmt_flags(r.hypothesis_flags), "true" if r.passed else "false",
    ]


def to_csv(rows: list[BoundReport]) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(HEADER)
    for r in rows:
        w.writerow(row_fields(r))
    return buf.getvalue()


def _json_number(s: str) -> str:
    # JSON has no infinities; keep the CSV spelling as a string
    return json.dumps(s) if s in ("nan", "inf", "-inf") else s


def to_jsonl(rows: list[BoundReport]) -> str:
    lines = []
    for r in rows:
        f = row_fields(r)
        parts = [
            f'"p": {f[0]}', f'"t": {f[1]}', f'"checker": {json.dumps(f[2])}',
            f'"lhs": {_json_number(f[3])}', f'"rhs_shape": {_json_number(f[4])}', f'"ratio": {_json_number(f[5])}',
            f'"mode": {json.dumps(f[6])}', f'"hypothesis_flags": {json.dumps(f[7])}', f'"pass": {f[8]}',
        ]
        lines.append("{" + ", ".join(parts) + "}\n")
    return "".join(lines)


def to_plot_csv(rows: list[BoundReport]) -> str:
    """Ratio against log_p t for every report-mode row."""
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(PLOT_HEADER)
    for r in rows:
        if r.mode == REPORT and r.p > 1 and r.t >= 1:
            w.writerow([r.p, r.t, r.name, fmt_number(math.log(r.t) / math.log(r.p)), fmt_number(r.ratio)])
    return buf.getvalue()


def read_config_file(path: str) -> dict[str, str]:
    """Flat key = value lines; '#' starts a comment."""
    out: dict[str, str] = {}
    for n, line in enumerate(Path(path).read_text().splitlines(), start=1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ValueError(f"{path}:{n}: expected key = value")
        k, v = (s.strip() for s in line.split("=", 1))
        out[k.replace("-", "_")] = v
    return out


_CONVERT = {
    "p_min": int, "p_max": int, "alpha": float, "beta": float, "alpha_scale": float, "seed": int,
    "jobs": int, "instances": int, "max_set": int, "out": str, "fmt": str, "plot_data": str,
    "checkers": lambda s: tuple(c.strip() for c in s.split(",") if c.strip()),
}


def build_config(command: str, args: argparse.Namespace) -> RunConfig:
    values: dict = {}
    if args.config:
        raw = read_config_file(args.config)
        unknown = set(raw) - set(_CONVERT)
        if unknown:
            raise ValueError(f"unknown config key(s): {', '.join(sorted(unknown))}")
        values.update({k: _CONVERT[k](v) for k, v in raw.items()})
    for f in fields(RunConfig):
        v = getattr(args, f.name, None)
        if v is not None and f.name != "command":
            values[f.name] = _CONVERT[f.name](v) if f.name == "checkers" else v
    return RunConfig(command=command, **values)


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="subgroupsums", description=__doc__.splitlines()[0])
    sub = ap.add_subparsers(dest="command", required=True)
    for name, help_ in (
        (SURVEY, "bound checkers over all window subgroups"),
        (HEILBRONN, "Heilbronn sum profiles, one per prime"),
        (OPERATORS, "randomized weighted-operator checks"),
    ):
        sp = sub.add_parser(name, help=help_)
        sp.add_argument("--p-min", type=int, dest="p_min")
        sp.add_argument("--p-max", type=int, dest="p_max")
        sp.add_argument("--alpha", type=float, help="lower window exponent: t >= alpha_scale * p^alpha")
        sp.add_argument("--beta", type=float, help="upper window exponent: t <= p^beta")
        sp.add_argument("--alpha-scale", type=float, dest="alpha_scale")
        sp.add_argument("--checkers", help="comma separated; default: " + ",".join(DEFAULTS[name]))
        sp.add_argument("--seed", type=int)
        sp.add_argument("--out", help="output file (default stdout)")
        sp.add_argument("--jobs", type=int)
        sp.add_argument("--format", choices=("csv", "jsonl"), dest="fmt")
        sp.add_argument("--config", help="flat key = value file; command-line flags win")
        sp.add_argument("--plot-data", dest="plot_data", help="write ratio vs log_p t for report rows")
        sp.add_argument("--list-checkers", action="store_true")
        if name == OPERATORS:
            sp.add_argument("--instances", type=int)
            sp.add_argument("--max-set", type=int, dest="max_set")
    return ap


def execute(cfg: RunConfig) -> RunResult:
    """Run cfg and write its outputs; returns the rows."""
    result = RunResult(run(cfg))
    text = to_csv(result.rows) if cfg.fmt == "csv" else to_jsonl(result.rows)
    if cfg.out:
        Path(cfg.out).write_text(text)
    else:
        sys.stdout.write(text)
    if cfg.plot_data:
        Path(cfg.plot_data).write_text(to_plot_csv(result.rows))
    return result


def main(argv: list[str] | None = None) -> int:
    ap = build_parser()
    args = ap.parse_args(argv)
    if args.list_checkers:
        print("\n".join(registry(args.command)))
        return 0
    try:
        cfg = build_config(args.command, args)
    except (ValueError, OSError) as exc:
        ap.error(str(exc))
    try:
        result = execute(cfg)
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    for r in result.violations:
        print(f"violation: {r.name} p={r.p} t={r.t} ratio={fmt_number(r.ratio)}", file=sys.stderr)
    return result.exit_status


if __name__ == "__main__":
    sys.exit(main())
