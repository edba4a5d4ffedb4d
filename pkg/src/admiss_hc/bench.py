"""Seeded benchmark battery: RSC versus the exact optimum, with charging bounds."""

from __future__ import annotations

import os
import random
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Optional

from .core import SimilarityMatrix, fraction_str
from .objective import ObjectiveSpec, gamma
from .oracle import charging_lower_bound, dp_opt, random_generating_instance, random_matrix, rsc_charge_sum
from .scaling import SumScaling
from .solver import exact_cut, local_cut, rsc

CSV_FIELDS = (
    "seed", "n", "objective_kind", "lambda", "mu", "nu", "opt", "rsc", "ratio",
    "lb_charge", "charge2", "lemma1_ok", "lemma2_ok",
)

DEFAULT_BATTERY = (
    SumScaling(1, 0, 0),
    SumScaling(0, 1, 0),
    SumScaling(0, 0, 1),
    SumScaling(1, 1, -2),
)


@dataclass(frozen=True)
class BenchConfig:
    seed: int = 0
    count: int = 20
    n_min: int = 3
    n_max: int = 8
    mode: str = "mixed"  # generating | random | mixed
    scalings: tuple = DEFAULT_BATTERY
    cut: str = "exact"
    restarts: int = 32
    max_exact_n: int = 20


@dataclass(frozen=True)
class BenchRow:
    seed: int
    n: int
    scaling: SumScaling
    opt: Fraction
    rsc: Fraction
    lb_charge: Fraction
    charge2: Fraction

    @property
    def ratio(self) -> Optional[Fraction]:
        if self.opt > 0:
            return self.rsc / self.opt
        return Fraction(1) if self.rsc == self.opt else None

    @property
    def lower_bound_ok(self) -> bool:
        return self.lb_charge <= self.opt

    @property
    def charge_ok(self) -> bool:
        return self.charge2 <= 2 * self.lb_charge

    def as_csv(self) -> list[str]:
        s = self.scaling
        ratio = self.ratio
        return [
            str(self.seed), str(self.n), "sum",
            fraction_str(s.lam), fraction_str(s.mu), fraction_str(s.nu),
            fraction_str(self.opt), fraction_str(self.rsc),
            "" if ratio is None else fraction_str(ratio),
            fraction_str(self.lb_charge), fraction_str(self.charge2),
            str(self.lower_bound_ok).lower(), str(self.charge_ok).lower(),
        ]


@dataclass
class BenchSummary:
    rows: list = field(default_factory=list)

    @property
    def ratios(self) -> list[Fraction]:
        return [r.ratio for r in self.rows if r.ratio is not None]

    @property
    def max_ratio(self) -> Optional[Fraction]:
        return max(self.ratios, default=None)

    @property
    def mean_ratio(self) -> Optional[Fraction]:
        rs = self.ratios
        return sum(rs, Fraction(0)) / len(rs) if rs else None

    @property
    def failures(self) -> list:
        return [r for r in self.rows if not (r.lower_bound_ok and r.charge_ok and r.rsc >= r.opt)]


def bench_instances(cfg: BenchConfig) -> list[tuple[int, SimilarityMatrix]]:
    """Deterministic (seed, matrix) pairs for the configured battery."""
    rng = random.Random(cfg.seed)
    out = []
    for k in range(cfg.count):
        n = rng.randint(cfg.n_min, cfg.n_max)
        inst_seed = cfg.seed * 1_000_003 + k
        kind = cfg.mode if cfg.mode != "mixed" else ("generating" if k % 2 == 0 else "random")
        if kind == "generating":
            M = random_generating_instance(n, inst_seed)[0]
        elif kind == "random":
            M = random_matrix(n, inst_seed)
        else:
            raise ValueError(f"unknown bench mode {cfg.mode!r}")
        out.append((inst_seed, M))
    return out


def evaluate_instance(seed: int, M: SimilarityMatrix, cfg: BenchConfig) -> list[BenchRow]:
    cut = exact_cut(cfg.max_exact_n) if cfg.cut == "exact" else local_cut(seed, cfg.restarts)
    trace = rsc(M, cut)
    rows = []
    for s in cfg.scalings:
        spec = ObjectiveSpec("sum", s)
        best = dp_opt(M, spec)
        rows.append(BenchRow(
            seed=seed,
            n=M.n,
            scaling=s,
            opt=best.opt_value,
            rsc=gamma(trace.tree, M, spec),
            lb_charge=charging_lower_bound(best.tree, M, s),
            charge2=rsc_charge_sum(trace, best.tree, M, s),
        ))
    return rows


def _evaluate_packed(args):
    return evaluate_instance(*args)


def worker_count() -> int:
    raw = os.environ.get("ADMISS_HC_THREADS", "1")
    try:
        return max(1, int(raw))
    except ValueError:
        raise ValueError(f"ADMISS_HC_THREADS must be an integer, got {raw!r}") from None


def run_bench(cfg: BenchConfig, workers: int | None = None) -> BenchSummary:
    for s in cfg.scalings:
        if not s.satisfies_solver_condition():
            raise ValueError(f"scaling {s} violates lam, mu >= 0 and lam + 2 mu + nu > 0")
    jobs = [(seed, M, cfg) for seed, M in bench_instances(cfg)]
    workers = worker_count() if workers is None else workers
    if workers > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(_evaluate_packed, jobs))
    else:
        results = [_evaluate_packed(j) for j in jobs]
    return BenchSummary([row for rows in results for row in rows])
