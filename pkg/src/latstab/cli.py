"""latstab command line.

Exit codes: 0 all checks pass, 1 usage or parse error, 2 a proven bound was
violated (an implementation bug), 3 the oracle refused the instance.

Random instances come from numpy's PCG64 (``numpy.random.default_rng``)
seeded per trial with ``SeedSequence(seed, spawn_key=(d, trial))``, so a
trial's instance does not depend on how many trials run or in what order.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import logging
import math
import sys
from concurrent.futures import ProcessPoolExecutor
from fractions import Fraction
from pathlib import Path
from typing import Optional

import numpy as np

from latstab import report_json
from latstab.box_stability import approximate_box
from latstab.cover import CoverFamily, loomis_whitney_cover, uc_tightness
from latstab.entropy_info import tight_to_info_check
from latstab.fileformats import ParseError, format_pts, instance_hash, read_cover, read_pts
from latstab.iso_stability import approximate_cube
from latstab.lattice_core import GENERATORS, PointSet, make_generator
from latstab.oracle import BudgetExceeded, OracleBudget, optimal_box, optimal_cube

EXIT_OK, EXIT_USAGE, EXIT_VIOLATION, EXIT_REFUSED = 0, 1, 2, 3
UC_SLACK = 1e-12

CSV_COLUMNS = ["family", "params", "d", "trial", "epsilon", "ratio", "bound",
               "vacuous", "conjecture_stat", "oracle_ratio", "sha256"]

# inclusive integer ranges sampled per trial when --param does not fix them
DEFAULT_RANGES = {
    "annulus": {"a": (6, 14), "a_inner": (1, 4)},
    "cuboid": {"a": (2, 8)},
    "notched_cube": {"a": (3, 8), "r": (1, 2)},
    "perturbed_box": {"side": (3, 7), "flip_count": (0, 6)},
}
BOX_FAMILIES = {"annulus", "perturbed_box"}

log = logging.getLogger("latstab")


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


# -- shared helpers ------------------------------------------------------------


def _budget(args) -> OracleBudget:
    return OracleBudget.from_env(
        max_projection_size=args.budget_max_projection_size,
        max_cube_side=args.budget_max_cube_side,
        max_candidates=args.budget_max_candidates,
        max_grid=args.budget_max_grid,
    )


def _cover_for(spec: Optional[str], d: int) -> CoverFamily:
    if spec is None or spec == "loomis-whitney":
        return loomis_whitney_cover(d)
    G = read_cover(spec)
    if G.dim != d:
        raise UsageError(f"cover has dimension {G.dim}, set has {d}")
    return G


def _load_set(args) -> PointSet:
    if not args.set:
        raise UsageError("--set is required")
    return read_pts(args.set)


def _emit(text: str, out: Optional[str]) -> None:
    if out:
        Path(out).write_bytes(text.encode("utf-8"))
    else:
        sys.stdout.write(text)


def _emit_json(obj, out: Optional[str]) -> None:
    _emit(report_json.dumps(obj) + "\n", out)


# -- subcommands ---------------------------------------------------------------


def cmd_verify_uc(args) -> int:
    S = _load_set(args)
    G = _cover_for(args.cover, S.dim)
    tight = uc_tightness(S, G)
    info = tight_to_info_check(S, G)
    uc_ok = tight.raw_epsilon >= -UC_SLACK or not tight.hypothesis_ok
    ok = uc_ok and info.passed
    _emit_json({"tightness": tight, "uc_holds": uc_ok, "info": info, "passed": ok}, args.out)
    return EXIT_OK if ok else EXIT_VIOLATION


def cmd_approx_box(args) -> int:
    S = _load_set(args)
    G = _cover_for(args.cover, S.dim)
    report = approximate_box(S, G)
    bad = not report.vacuous and not (report.satisfied and report.s_minus_r_ok and report.r_minus_s_ok)
    _emit_json(report, args.out)
    return EXIT_VIOLATION if bad else EXIT_OK


def cmd_iso(args) -> int:
    S = _load_set(args)
    report = approximate_cube(S)
    bad = not report.vacuous and not (report.satisfied and report.claims_ok)
    _emit_json(report, args.out)
    return EXIT_VIOLATION if bad else EXIT_OK


def cmd_oracle(args) -> int:
    S = _load_set(args)
    budget = _budget(args)
    if args.target == "box":
        box, k = optimal_box(S, budget)
        result = {"target": "box", "box": box, "sym_diff": k}
    else:
        cube, k = optimal_cube(S, budget)
        result = {"target": "cube", "cube": cube, "sym_diff": k}
    result["size"] = len(S)
    result["ratio"] = Fraction(k, len(S)) if len(S) else Fraction(0)
    _emit_json(result, args.out)
    return EXIT_OK


def _parse_params(items) -> dict:
    """k=v or k=lo:hi (inclusive range) pairs."""
    out = {}
    for item in items or ():
        key, sep, val = item.partition("=")
        if not sep or not key:
            raise UsageError(f"bad --param {item!r}; expected key=value or key=lo:hi")
        try:
            if ":" in val:
                lo, hi = (int(v) for v in val.split(":", 1))
                if lo > hi:
                    raise UsageError(f"empty range in --param {item!r}")
                out[key] = (lo, hi)
            else:
                out[key] = (int(val), int(val))
        except ValueError:
            raise UsageError(f"non-integer value in --param {item!r}") from None
    return out


def _sample_params(family: str, ranges: dict, d: int, rng: np.random.Generator) -> dict:
    r = {**DEFAULT_RANGES[family], **ranges}
    draw = {k: int(rng.integers(lo, hi + 1)) for k, (lo, hi) in sorted(r.items())}
    if family == "annulus":
        draw["a_inner"] = min(draw["a_inner"], draw["a"] - 1)
        return {"a": draw["a"], "a_inner": draw["a_inner"]}
    if family == "cuboid":
        return {"a": draw["a"], "b": draw.get("b", draw["a"] + 1)}
    if family == "notched_cube":
        return {"a": draw["a"], "r": draw["r"]}
    # perturbed_box: one side length per axis, plus a seed for the flips
    sides = [int(rng.integers(r["side"][0], r["side"][1] + 1)) for _ in range(d)]
    return {"edges": sides, "flip_count": draw["flip_count"],
            "seed": int(rng.integers(0, 2 ** 63))}


def _run_trial(job) -> dict:
    family, ranges, d, trial, seed, cover_spec, with_oracle, budget = job
    rng = np.random.default_rng(np.random.SeedSequence(seed, spawn_key=(d, trial)))
    params = _sample_params(family, ranges, d, rng)
    S = make_generator(family, d, **params)
    row = {"family": family, "params": json.dumps(params, sort_keys=True, separators=(",", ":")),
           "d": d, "trial": trial, "sha256": instance_hash(S), "oracle_ratio": ""}
    if family in BOX_FAMILIES:
        G = _cover_for(cover_spec, d)
        rep = approximate_box(S, G)
        eps = rep.epsilon
        rho = float(rep.rho) if rep.rho is not None else math.nan
        ratio = float(rep.sym_diff_ratio)
        bound = rep.theoretical_bound
        vacuous = rep.vacuous
        violated = not vacuous and not rep.satisfied
        # d-free scaling: ratio / (rho eps)
        conj = ratio / (rho * eps) if eps > 0 and rho == rho else math.nan
        if with_oracle:
            try:
                _, k = optimal_box(S, budget)
                row["oracle_ratio"] = _fmt(k / len(S))
            except BudgetExceeded:
                row["oracle_ratio"] = "refused"
    else:
        rep = approximate_cube(S)
        eps = rep.epsilon_iso
        ratio = float(rep.sym_diff_ratio) if rep.sym_diff_ratio is not None else math.nan
        bound = rep.theoretical_bound
        vacuous = rep.vacuous
        violated = not vacuous and not (rep.satisfied and rep.claims_ok)
        conj = ratio / math.sqrt(eps) if eps > 0 else math.nan
        if with_oracle:
            try:
                _, k = optimal_cube(S, budget)
                row["oracle_ratio"] = _fmt(k / len(S))
            except BudgetExceeded:
                row["oracle_ratio"] = "refused"
    row.update(epsilon=_fmt(eps), ratio=_fmt(ratio), bound=_fmt(bound),
               vacuous=str(vacuous).lower(), conjecture_stat=_fmt(conj))
    row["_violated"] = violated
    return row


def _fmt(x: float) -> str:
    if x != x:
        return "nan"
    return format(x, ".15g")


def _load_config(path: str) -> dict:
    try:
        cfg = json.loads(Path(path).read_text(encoding="utf-8"))
    except (OSError, json.JSONDecodeError) as exc:
        raise UsageError(f"cannot read config {path}: {exc}") from None
    if not isinstance(cfg, dict):
        raise UsageError("config must be a JSON object")
    known = {"family", "d", "params", "cover", "seed", "trials", "format", "oracle"}
    extra = set(cfg) - known
    if extra:
        raise UsageError(f"unknown config keys: {sorted(extra)}")
    return cfg


def _parse_dims(raw) -> list[int]:
    dims = []
    for part in raw if isinstance(raw, list) else [raw]:
        text = str(part)
        try:
            if ".." in text:
                lo, hi = (int(v) for v in text.split("..", 1))
                dims.extend(range(lo, hi + 1))
            else:
                dims.append(int(text))
        except ValueError:
            raise UsageError(f"bad dimension {text!r}") from None
    if not dims or any(d < 2 for d in dims):
        raise UsageError("sweep dimensions must be >= 2")
    return dims


def cmd_sweep(args) -> int:
    cfg = _load_config(args.config) if args.config else {}
    family = args.family or cfg.get("family")
    if family not in DEFAULT_RANGES:
        raise UsageError(f"--family must be one of {sorted(DEFAULT_RANGES)}")
    dims = _parse_dims(args.d if args.d is not None else cfg.get("d", [2]))
    ranges = {}
    for k, v in (cfg.get("params") or {}).items():
        ranges[k] = tuple(v) if isinstance(v, list) else (int(v), int(v))
    ranges.update(_parse_params(args.param))
    unknown = set(ranges) - set(DEFAULT_RANGES[family]) - ({"b"} if family == "cuboid" else set())
    if unknown:
        raise UsageError(f"unknown parameters for {family}: {sorted(unknown)}")
    seed = args.seed if args.seed is not None else int(cfg.get("seed", 0))
    trials = args.trials if args.trials is not None else int(cfg.get("trials", 10))
    fmt = args.format or cfg.get("format", "csv")
    cover = args.cover or cfg.get("cover")
    with_oracle = args.oracle or bool(cfg.get("oracle", False))
    if seed < 0 or seed >= 2 ** 64 or trials < 0:
        raise UsageError("seed must be a 64-bit unsigned integer and trials >= 0")
    budget = _budget(args)
    jobs = [(family, ranges, d, t, seed, cover, with_oracle, budget)
            for d in dims for t in range(trials)]
    if args.jobs > 1:
        with ProcessPoolExecutor(max_workers=args.jobs) as pool:
            rows = list(pool.map(_run_trial, jobs, chunksize=4))  # map keeps input order
    else:
        rows = [_run_trial(j) for j in jobs]
    violated = any(r.pop("_violated") for r in rows)
    if fmt == "json":
        _emit(json.dumps(rows, indent=2, sort_keys=True) + "\n", args.out)
    else:
        buf = io.StringIO()
        w = csv.DictWriter(buf, fieldnames=CSV_COLUMNS, lineterminator="\n")
        w.writeheader()
        w.writerows(rows)
        _emit(buf.getvalue(), args.out)
    return EXIT_VIOLATION if violated else EXIT_OK


def cmd_gen(args) -> int:
    if args.family not in GENERATORS:
        raise UsageError(f"--family must be one of {sorted(GENERATORS)}")
    if args.d is None or len(args.d) != 1:
        raise UsageError("gen takes exactly one --d")
    (d,) = _parse_dims(args.d)
    rng = np.random.default_rng(np.random.SeedSequence(args.seed or 0, spawn_key=(d, 0)))
    params = _sample_params(args.family, _parse_params(args.param), d, rng)
    _emit(format_pts(make_generator(args.family, d, **params)), args.out)
    return EXIT_OK


# -- parser --------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="latstab", description="Stability checks for projection and "
                "isoperimetric inequalities on lattice point sets.")
    p.add_argument("-v", "--verbose", action="store_true")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    def common(sp, set_required=True):
        sp.add_argument("--out", help="write output here instead of stdout")
        g = sp.add_argument_group("oracle budget (defaults from LATSTAB_BUDGET_* env vars)")
        g.add_argument("--budget-max-projection-size", type=int)
        g.add_argument("--budget-max-cube-side", type=int)
        g.add_argument("--budget-max-candidates", type=int)
        g.add_argument("--budget-max-grid", type=int)
        if set_required:
            sp.add_argument("--set", required=True, help="point set in pts format")

    sp = sub.add_parser("verify-uc", help="uniform-cover tightness and information checks")
    common(sp)
    sp.add_argument("--cover", help="cover file, or 'loomis-whitney' (default)")
    sp.set_defaults(func=cmd_verify_uc)

    sp = sub.add_parser("approx-box", help="constructed box against the stability bound")
    common(sp)
    sp.add_argument("--cover", help="cover file, or 'loomis-whitney' (default)")
    sp.set_defaults(func=cmd_approx_box)

    sp = sub.add_parser("iso", help="isoperimetric deficit and cube construction")
    common(sp)
    sp.set_defaults(func=cmd_iso)

    sp = sub.add_parser("oracle", help="exhaustive optimal box or cube")
    common(sp)
    sp.add_argument("--target", choices=["box", "cube"], default="box")
    sp.set_defaults(func=cmd_oracle)

    for name, func, helptext in [("sweep", cmd_sweep, "seeded randomized sweep"),
                                 ("gen", cmd_gen, "generate a test-family instance")]:
        sp = sub.add_parser(name, help=helptext)
        common(sp, set_required=False)
        sp.add_argument("--family", help=f"one of {sorted(DEFAULT_RANGES)}")
        sp.add_argument("--d", nargs="+", help="dimensions, e.g. 2 3 or 2..4")
        sp.add_argument("--param", action="append", metavar="K=V|K=LO:HI")
        sp.add_argument("--seed", type=int)
        sp.set_defaults(func=func)
        if name == "sweep":
            sp.add_argument("--config", help="JSON sweep config; flags override it")
            sp.add_argument("--trials", type=int)
            sp.add_argument("--cover", help="cover file, or 'loomis-whitney' (default)")
            sp.add_argument("--format", choices=["csv", "json"])
            sp.add_argument("--oracle", action="store_true", help="add oracle ratios")
            sp.add_argument("--jobs", type=int, default=1, help="worker processes")
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s: %(message)s")
    try:
        return args.func(args)
    except (ParseError, UsageError, FileNotFoundError, IsADirectoryError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except BudgetExceeded as exc:
        print(f"oracle refused: {exc.reason} {exc.required}", file=sys.stderr)
        return EXIT_REFUSED
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
