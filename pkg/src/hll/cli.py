"""Command-line driver: ``hll verify | explore | hdet | lefschetz | normalize``."""

from __future__ import annotations

import argparse
import csv
import json
import math
import os
import sys
from pathlib import Path

import numpy as np

from . import cases
from .exterior import DimensionError, Form, kahler_form, power
from .hyperdet import Hypermatrix, PreconditionError, hdet, hdet_bounds
from .lefschetz import ISO_THRESHOLD, is_lefschetz
from .positivity import FormMatrix, normal_form

THEOREM_CASES = tuple(c for c in cases.CASE_IDS if c != "n6_explore")
DEFAULT_OUTPUT = "hll-results"
EXIT_OK, EXIT_FAIL, EXIT_USAGE = 0, 1, 2


class UsageError(Exception):
    pass


def _jsonable(x):
    if isinstance(x, dict):
        return {str(k): _jsonable(v) for k, v in x.items()}
    if isinstance(x, (list, tuple)):
        return [_jsonable(v) for v in x]
    if isinstance(x, (np.integer,)):
        return int(x)
    if isinstance(x, (float, np.floating)):
        x = float(x)
        return x if math.isfinite(x) else None
    if isinstance(x, (complex, np.complexfloating)):
        return [float(x.real), float(x.imag)]
    return x


def dumps(obj) -> str:
    return json.dumps(_jsonable(obj), sort_keys=True, indent=2) + "\n"


def report(summaries) -> str:
    """Fixed-width table: case, trials, failures, worst margin, seed."""
    header = f"{'case':<18} {'n':>3} {'trials':>7} {'failures':>9} {'worst_margin':>13} {'seed':>20}  status"
    lines = [header, "-" * len(header)]
    for s in summaries:
        if isinstance(s, cases.CaseReport):
            s = s.summary()
        margin = s.get("worst_margin")
        margin = "-" if margin is None else f"{margin:.4e}"
        status = "ok" if s["failures"] == 0 else "FAIL"
        n = "-" if s.get("n") is None else str(s["n"])
        lines.append(
            f"{s['case_id']:<18} {n:>3} {s['trials']:>7} {s['failures']:>9} {margin:>13} {s['seed']:>20}  {status}"
        )
    return "\n".join(lines)


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="hll", description=__doc__)
    sub = ap.add_subparsers(dest="command", required=True)

    def common(p):
        p.add_argument("--seed", type=int, default=0, help="root seed (all randomness derives from it)")
        p.add_argument("--threshold", type=float, default=ISO_THRESHOLD, help="relative singular-value threshold")
        p.add_argument("--output-dir", default=os.environ.get("HLL_OUTPUT_DIR", DEFAULT_OUTPUT))
        p.add_argument("--format", choices=("json", "csv", "both"), default="both")

    v = sub.add_parser("verify", help="run theorem-backed cases")
    v.add_argument("--case", default="all", help=f"one of {', '.join(THEOREM_CASES)} or 'all'")
    v.add_argument("--n", type=int)
    v.add_argument("--trials", type=int, default=100)
    v.add_argument("--t-steps", type=int, default=21)
    common(v)

    e = sub.add_parser("explore", help="n=6 bidegree (2,2) margin exploration")
    e.add_argument("--case", default="n6_explore")
    e.add_argument("--trials", type=int, default=1000)
    common(e)

    h = sub.add_parser("hdet", help="hyperdeterminant of a JSON hypermatrix")
    h.add_argument("--input", required=True)

    lf = sub.add_parser("lefschetz", help="Lefschetz report for a (k,k)-form")
    lf.add_argument("--input", help="form JSON; defaults to omega^k")
    lf.add_argument("--n", type=int)
    lf.add_argument("--k", type=int)
    lf.add_argument("--p", type=int, required=True)
    lf.add_argument("--q", type=int, required=True)
    lf.add_argument("--threshold", type=float, default=ISO_THRESHOLD)

    nm = sub.add_parser("normalize", help="normal form of a JSON matrix of (1,1)-forms")
    nm.add_argument("--input", required=True)
    return ap


def _validate(args):
    if getattr(args, "trials", 1) < 1:
        raise UsageError("--trials must be >= 1")
    if not 0 < getattr(args, "threshold", 0.5) < 1:
        raise UsageError("--threshold must lie in (0, 1)")
    if not 0 <= getattr(args, "seed", 0) < 2**64:
        raise UsageError("--seed must be a 64-bit unsigned value")
    if getattr(args, "t_steps", 2) < 1:
        raise UsageError("--t-steps must be >= 1")


def _config(args) -> dict:
    cfg = {k: v for k, v in vars(args).items() if k not in ("output_dir",)}
    return cfg


def _output_dir(path: str) -> Path:
    out = Path(path)
    try:
        out.mkdir(parents=True, exist_ok=True)
    except OSError as err:
        raise UsageError(f"cannot create output directory {out}: {err}") from err
    if not os.access(out, os.W_OK):
        raise UsageError(f"output directory {out} is not writable")
    return out


def write_outputs(rep: cases.CaseReport, config: dict, out: Path, fmt: str) -> list[Path]:
    stem = f"{rep.case_id}" + (f"_n{rep.n}" if rep.n is not None else "") + f"_seed{rep.seed}"
    written = []
    if fmt in ("json", "both"):
        path = out / f"{stem}.json"
        path.write_text(dumps({"config": config, **rep.summary()}))
        written.append(path)
    if fmt in ("csv", "both"):
        path = out / f"{stem}.csv"
        with path.open("w", newline="") as fh:
            fh.write(f"# config: {json.dumps(_jsonable(config), sort_keys=True)}\n")
            writer = csv.DictWriter(fh, fieldnames=cases.CSV_COLUMNS, lineterminator="\n")
            writer.writeheader()
            for row in rep.rows:
                writer.writerow({k: _fmt_cell(row[k]) for k in cases.CSV_COLUMNS})
        written.append(path)
    return written


def _fmt_cell(x):
    return repr(float(x)) if isinstance(x, (float, np.floating)) else x


def cmd_verify(args) -> int:
    if args.case == "all":
        ids = list(THEOREM_CASES)
    elif args.case in THEOREM_CASES:
        ids = [args.case]
    elif args.case == "n6_explore":
        raise UsageError("n6_explore is exploratory; use the explore command")
    else:
        raise UsageError(f"unknown case {args.case!r}; choose from {', '.join(THEOREM_CASES)} or 'all'")
    if args.n is not None and args.case == "hlt_partial_diag" and args.n < 4:
        raise UsageError("hlt_partial_diag needs --n >= 4")
    out = _output_dir(args.output_dir)
    config = _config(args)
    reports = []
    for cid in ids:
        rep = cases.run_case(cid, args.trials, args.seed, n=args.n, t_steps=args.t_steps, threshold=args.threshold)
        write_outputs(rep, {**config, "case": cid}, out, args.format)
        reports.append(rep)
    print(report(reports))
    failed = [r for r in reports if r.failures]
    for r in failed:
        print(f"\n{r.case_id}: {r.failures} failing trial(s); first witness:", file=sys.stderr)
        print(dumps(r.witnesses[0]), file=sys.stderr)
    return EXIT_FAIL if failed else EXIT_OK


def cmd_explore(args) -> int:
    if args.case != "n6_explore":
        raise UsageError(f"explore only supports n6_explore, got {args.case!r}")
    out = _output_dir(args.output_dir)
    config = _config(args)
    rep = cases.explore_n6_22(args.trials, args.seed, args.threshold)
    write_outputs(rep, config, out, args.format)
    wdir = out / f"n6_explore_seed{args.seed}_witnesses"
    wdir.mkdir(exist_ok=True)
    for rank, w in enumerate(rep.extra["worst"]):
        (wdir / f"worst_{rank:02d}.json").write_text(dumps({"config": config, "rank": rank, **w}))
    if rep.extra["sign_change"] is not None:
        (wdir / "sign_change.json").write_text(dumps({"config": config, **rep.extra["sign_change"]}))
    print(report([rep]))
    ex = rep.extra
    print(f"min margin {ex['min_margin']:.4e}  median {ex['median_margin']:.4e}  candidates {len(ex['candidates'])}")
    if ex["singular_instance_confirmed"]:
        root = ex["sign_change"]["root"]
        print(
            "block determinant changes sign (exact check on rational endpoints); "
            f"singular instance located with ratio {root['ratio']:.2e}, see {wdir / 'sign_change.json'}"
        )
    return EXIT_OK


def _load_json(path: str):
    try:
        return json.loads(Path(path).read_text())
    except (OSError, json.JSONDecodeError) as err:
        raise UsageError(f"cannot read {path}: {err}") from err


def cmd_hdet(args) -> int:
    try:
        h = Hypermatrix.from_json(_load_json(args.input))
    except (KeyError, ValueError) as err:
        raise UsageError(f"bad hypermatrix JSON: {err}") from err
    value = hdet(h)
    result = {"k": h.k, "hdet": value}
    try:
        lo, hi = hdet_bounds(h)
        result["bounds"] = [lo, hi]
    except PreconditionError as err:
        result["bounds"] = None
        result["bounds_note"] = str(err)
    print(dumps(result), end="")
    return EXIT_OK


def cmd_lefschetz(args) -> int:
    if args.input:
        try:
            form = Form.from_json(_load_json(args.input))
        except (KeyError, ValueError) as err:
            raise UsageError(f"bad form JSON: {err}") from err
    else:
        if args.n is None or args.k is None:
            raise UsageError("give --input or both --n and --k")
        if not 0 <= args.k <= args.n:
            raise UsageError("--k must lie in [0, n]")
        form = power(kahler_form(args.n), args.k)
    if args.n is not None and form.n != args.n or args.k is not None and form.p != args.k:
        raise UsageError(f"form has n={form.n}, degree ({form.p},{form.q}); --n/--k disagree")
    try:
        rep = is_lefschetz(form, args.p, args.q, args.threshold)
    except DimensionError as err:
        raise UsageError(str(err)) from err
    print(dumps(rep.to_json()), end="")
    return EXIT_OK if rep.is_isomorphism else EXIT_FAIL


def cmd_normalize(args) -> int:
    try:
        m = FormMatrix.from_json(_load_json(args.input))
    except (KeyError, ValueError) as err:
        raise UsageError(f"bad form-matrix JSON: {err}") from err
    mn, p, c = normal_form(m)
    print(dumps({"matrix": mn.to_json(), "P": p.tolist(), "C": c.tolist()}), end="")
    return EXIT_OK


COMMANDS = {
    "verify": cmd_verify,
    "explore": cmd_explore,
    "hdet": cmd_hdet,
    "lefschetz": cmd_lefschetz,
    "normalize": cmd_normalize,
}


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_USAGE if exc.code else EXIT_OK
    try:
        _validate(args)
        return COMMANDS[args.command](args)
    except UsageError as err:
        print(f"hll: error: {err}", file=sys.stderr)
        return EXIT_USAGE
    except PreconditionError as err:
        print(f"hll: precondition failed: {err}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
