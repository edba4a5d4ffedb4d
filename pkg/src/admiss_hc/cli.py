"""Command-line front end.

Exit codes: 0 on success, 2 when a valid run reaches a negative verdict
(not admissible, no generating tree), 1 on usage, parse or I/O errors.
"""

from __future__ import annotations

import argparse
import csv
import json
import sys
from dataclasses import dataclass
from decimal import Decimal, localcontext
from fractions import Fraction
from pathlib import Path
from typing import Optional, TextIO

from .core import fraction_str
from .gentree import construct_generating_tree, find_triple_violation
from .objective import ObjectiveSpec, gamma
from .oracle import DEFAULT_ENUM_LIMIT, brute_force_opt
from .scaling import DEFAULT_BOUND, SumScaling, assess_admissibility
from .solver import DEFAULT_MAX_EXACT_N, DEFAULT_RESTARTS, exact_cut, local_cut, rsc
from .treeio import read_matrix, read_tree, to_newick, tree_to_json

EXIT_OK, EXIT_ERROR, EXIT_REFUTED = 0, 1, 2
SUBCOMMANDS = ("eval", "rsc", "opt", "check-admissible", "gen-tree", "bench")


class UsageError(Exception):
    pass


@dataclass(frozen=True)
class RunConfig:
    subcommand: str
    matrix: Optional[str] = None
    objective: Optional[str] = None
    tree: Optional[str] = None
    format: str = "text"
    digits: int = 12
    seed: int = 0
    restarts: int = DEFAULT_RESTARTS
    cut: str = "exact"
    max_exact_n: int = DEFAULT_MAX_EXACT_N
    enum_limit: int = DEFAULT_ENUM_LIMIT
    bound: int = DEFAULT_BOUND
    dump_minimizers: bool = False
    count: int = 20
    n_min: int = 3
    n_max: int = 8
    mode: str = "mixed"
    output: Optional[str] = None

    def __post_init__(self):
        if self.subcommand not in SUBCOMMANDS:
            raise UsageError(f"unknown subcommand {self.subcommand!r}")
        for name in ("max_exact_n", "enum_limit", "restarts", "bound", "count", "n_min", "n_max"):
            if getattr(self, name) < 1:
                raise UsageError(f"--{name.replace('_', '-')} must be positive")
        if self.digits < 0:
            raise UsageError("--digits must be nonnegative")


def decimal_str(q: Fraction, digits: int) -> str:
    with localcontext() as ctx:
        ctx.prec = max(digits, 1) + len(str(abs(q.numerator) // q.denominator)) + 2
        value = Decimal(q.numerator) / Decimal(q.denominator)
        return str(value.quantize(Decimal(1).scaleb(-digits)))


def load_objective(text: Optional[str]) -> ObjectiveSpec:
    if text is None:
        raise UsageError("--objective is required for this subcommand")
    if text.strip().lower() == "dasgupta":
        return ObjectiveSpec.dasgupta()
    raw = text if text.lstrip().startswith("{") else Path(text).read_text()
    try:
        return ObjectiveSpec.from_json(json.loads(raw))
    except json.JSONDecodeError as exc:
        raise ValueError(f"objective is not valid JSON: {exc}") from exc
    except KeyError as exc:
        raise ValueError(f"objective is missing field {exc}") from exc


def _need(value, flag):
    if value is None:
        raise UsageError(f"{flag} is required for this subcommand")
    return value


def _number(q: Fraction, cfg: RunConfig) -> dict:
    return {"exact": fraction_str(q), "decimal": decimal_str(q, cfg.digits)}


def _emit_json(obj, out: TextIO):
    out.write(json.dumps(obj, sort_keys=True) + "\n")


def cmd_eval(cfg: RunConfig, out: TextIO) -> int:
    M = read_matrix(_need(cfg.matrix, "--matrix"))
    T, _ = read_tree(_need(cfg.tree, "--tree"), M.elements)
    spec = load_objective(cfg.objective)
    value = gamma(T, M, spec)
    if cfg.format == "json":
        _emit_json({"gamma": _number(value, cfg), "tree": to_newick(T), "objective": spec.to_json()}, out)
    else:
        out.write(f"gamma {fraction_str(value)} {decimal_str(value, cfg.digits)}\n")
    return EXIT_OK


def cmd_rsc(cfg: RunConfig, out: TextIO) -> int:
    M = read_matrix(_need(cfg.matrix, "--matrix"))
    cut = exact_cut(cfg.max_exact_n) if cfg.cut == "exact" else local_cut(cfg.seed, cfg.restarts)
    trace = rsc(M, cut)
    labels = M.elements.labels
    records = [
        {
            "cluster": [labels[i] for i in r.cluster],
            "side": [labels[i] for i in r.side],
            "density": fraction_str(r.density),
            "method": r.method,
        }
        for r in trace.records
    ]
    value = gamma(trace.tree, M, load_objective(cfg.objective)) if cfg.objective else None
    if cfg.format == "json":
        obj = {"newick": to_newick(trace.tree), "trace": records}
        if value is not None:
            obj["gamma"] = _number(value, cfg)
        _emit_json(obj, out)
    elif cfg.format == "newick":
        out.write(to_newick(trace.tree) + "\n")
    else:
        out.write(to_newick(trace.tree) + "\n")
        for rec in records:
            out.write(json.dumps(rec) + "\n")
        if value is not None:
            out.write(f"gamma {fraction_str(value)} {decimal_str(value, cfg.digits)}\n")
    return EXIT_OK


def cmd_opt(cfg: RunConfig, out: TextIO) -> int:
    M = read_matrix(_need(cfg.matrix, "--matrix"))
    spec = load_objective(cfg.objective)
    rep = brute_force_opt(M, spec, limit=cfg.enum_limit)
    trees = [to_newick(T) for T in rep.minimizers]
    if cfg.format == "json":
        obj = {
            "opt": _number(rep.opt_value, cfg),
            "minimizers": len(rep.minimizers),
            "tree_count": rep.tree_count,
            "overflow": rep.overflow,
        }
        if cfg.dump_minimizers:
            obj["newick"] = trees
        _emit_json(obj, out)
    elif cfg.format == "newick":
        out.write("".join(t + "\n" for t in trees))
    else:
        out.write(f"opt {fraction_str(rep.opt_value)} {decimal_str(rep.opt_value, cfg.digits)}\n")
        out.write(f"minimizers {len(rep.minimizers)}{'+' if rep.overflow else ''}\n")
        out.write(f"trees {rep.tree_count}\n")
        if cfg.dump_minimizers:
            out.write("".join(t + "\n" for t in trees))
    return EXIT_OK


def cmd_check(cfg: RunConfig, out: TextIO) -> int:
    spec = load_objective(cfg.objective)
    v = assess_admissibility(spec.scaling, spec.kind, cfg.bound)
    if cfg.format == "json":
        _emit_json({"verdict": v.status, "reason": v.reason, "witness": v.witness, "objective": spec.to_json()}, out)
    else:
        out.write(f"{v.status.replace('_', ' ')}: {v.reason}\n")
        if v.witness:
            out.write("witness " + json.dumps(v.witness, sort_keys=True) + "\n")
    return EXIT_REFUTED if v.status == "not_admissible" else EXIT_OK


def cmd_gen_tree(cfg: RunConfig, out: TextIO) -> int:
    M = read_matrix(_need(cfg.matrix, "--matrix"))
    cert = construct_generating_tree(M)
    if cert is None:
        x, y, z = find_triple_violation(M)
        labels = M.elements.labels
        witness = {
            "x": labels[x], "y": labels[y], "z": labels[z],
            "M(x,y)": fraction_str(M.value(x, y)),
            "M(y,z)": fraction_str(M.value(y, z)),
            "M(x,z)": fraction_str(M.value(x, z)),
        }
        if cfg.format == "json":
            _emit_json({"generating_tree": None, "violation": witness}, out)
        else:
            out.write("no generating tree: M(x,z) < min(M(x,y), M(y,z))\n")
            out.write("witness " + json.dumps(witness, sort_keys=True) + "\n")
        return EXIT_REFUTED
    if cfg.format == "json":
        _emit_json({"newick": to_newick(cert.tree, cert.h), "tree": tree_to_json(cert.tree, cert.h)}, out)
    else:
        out.write(to_newick(cert.tree, cert.h) + "\n")
        if cfg.format == "text":
            out.write(json.dumps(tree_to_json(cert.tree, cert.h), sort_keys=True) + "\n")
    return EXIT_OK


def cmd_bench(cfg: RunConfig, out: TextIO) -> int:
    from .bench import CSV_FIELDS, DEFAULT_BATTERY, BenchConfig, run_bench

    scalings = DEFAULT_BATTERY
    if cfg.objective:
        spec = load_objective(cfg.objective)
        if spec.kind != "sum" or not isinstance(spec.scaling, SumScaling):
            raise UsageError("bench needs a sum-type objective with a sum scaling")
        scalings = (spec.scaling,)
    bc = BenchConfig(
        seed=cfg.seed, count=cfg.count, n_min=cfg.n_min, n_max=cfg.n_max, mode=cfg.mode,
        scalings=scalings, cut=cfg.cut, restarts=cfg.restarts, max_exact_n=cfg.max_exact_n,
    )
    summary = run_bench(bc)
    target = open(cfg.output, "w", newline="") if cfg.output else out
    try:
        w = csv.writer(target, lineterminator="\n")
        w.writerow(CSV_FIELDS)
        for row in summary.rows:
            w.writerow(row.as_csv())
    finally:
        if cfg.output:
            target.close()
    mx, mean = summary.max_ratio, summary.mean_ratio
    sys.stderr.write(
        f"# rows={len(summary.rows)} failures={len(summary.failures)} "
        f"max_ratio={'' if mx is None else decimal_str(mx, 6)} "
        f"mean_ratio={'' if mean is None else decimal_str(mean, 6)}\n"
    )
    return EXIT_OK if not summary.failures else EXIT_REFUTED


HANDLERS = {
    "eval": cmd_eval,
    "rsc": cmd_rsc,
    "opt": cmd_opt,
    "check-admissible": cmd_check,
    "gen-tree": cmd_gen_tree,
    "bench": cmd_bench,
}


def run(cfg: RunConfig, out: TextIO | None = None) -> int:
    return HANDLERS[cfg.subcommand](cfg, out or sys.stdout)


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="admiss-hc", description=__doc__.splitlines()[0])
    sub = p.add_subparsers(dest="subcommand", required=True, parser_class=_Parser)

    def common(sp, matrix=True, objective=False):
        if matrix:
            sp.add_argument("--matrix", required=True, help="CSV matrix or TSV edge list")
        sp.add_argument("--objective", required=objective,
                        help='inline JSON, a JSON file, or "dasgupta"')
        sp.add_argument("--format", choices=("text", "json", "csv", "newick"), default="text")
        sp.add_argument("--digits", type=int, default=12, help="digits in decimal echoes")

    sp = sub.add_parser("eval", help="evaluate an objective on a tree")
    common(sp, objective=True)
    sp.add_argument("--tree", required=True, help="Newick string or file, or JSON tree file")

    sp = sub.add_parser("rsc", help="run recursive sparsest cut")
    common(sp)
    sp.add_argument("--cut", choices=("exact", "local"), default="exact")
    sp.add_argument("--seed", type=int, default=0)
    sp.add_argument("--restarts", type=int, default=DEFAULT_RESTARTS)
    sp.add_argument("--max-exact-n", type=int, default=DEFAULT_MAX_EXACT_N)

    sp = sub.add_parser("opt", help="exact optimum by enumerating all trees")
    common(sp, objective=True)
    sp.add_argument("--enum-limit", type=int, default=DEFAULT_ENUM_LIMIT)
    sp.add_argument("--dump-minimizers", action="store_true")

    sp = sub.add_parser("check-admissible", help="decide or refute admissibility of an objective")
    common(sp, matrix=False, objective=True)
    sp.add_argument("--bound", type=int, default=DEFAULT_BOUND, help="search bound for refutation scans")

    sp = sub.add_parser("gen-tree", help="construct a generating tree or a violated triple")
    common(sp)

    sp = sub.add_parser("bench", help="seeded RSC-versus-OPT battery as CSV")
    common(sp, matrix=False)
    sp.add_argument("--seed", type=int, default=0)
    sp.add_argument("--count", type=int, default=20)
    sp.add_argument("--n-min", type=int, default=3)
    sp.add_argument("--n-max", type=int, default=8)
    sp.add_argument("--mode", choices=("generating", "random", "mixed"), default="mixed")
    sp.add_argument("--cut", choices=("exact", "local"), default="exact")
    sp.add_argument("--restarts", type=int, default=DEFAULT_RESTARTS)
    sp.add_argument("--max-exact-n", type=int, default=DEFAULT_MAX_EXACT_N)
    sp.add_argument("--output", help="write CSV here instead of stdout")
    return p


def config_from_args(argv) -> RunConfig:
    ns = vars(build_parser().parse_args(argv))
    fields = RunConfig.__dataclass_fields__
    return RunConfig(**{k: v for k, v in ns.items() if k in fields and v is not None})


def main(argv=None) -> int:
    try:
        cfg = config_from_args(sys.argv[1:] if argv is None else argv)
        return run(cfg)
    except UsageError as exc:
        sys.stderr.write(f"usage error: {exc}\n")
        return EXIT_ERROR
    except (ValueError, OSError, KeyError) as exc:
        sys.stderr.write(f"error: {exc}\n")
        return EXIT_ERROR


if __name__ == "__main__":
    sys.exit(main())
