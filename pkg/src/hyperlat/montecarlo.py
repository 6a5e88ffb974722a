"""Threshold experiments: sample Z errors, decode, tally logical failures.

Determinism contract: every trial draws from its own RNG stream keyed by
(master seed, size index, p index, trial index), and failure counting is
order-independent, so results do not depend on how trials are split
across workers.
"""

from __future__ import annotations

import json
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from typing import NamedTuple

import numpy as np

from .css import CssCode
from .cycles import parity
from .decoder import Syndrome, _bfs, decode, residual_is_logical
from .errors import ConfigInvalid, InsufficientData
from .lattice import PeriodicGraph


@dataclass(frozen=True)
class SimConfig:
    pattern: tuple[int, int]
    quotient_files: tuple[str, ...]
    p_grid: tuple[float, ...]
    trials: int
    seed: int
    workers: int = 1

    def __post_init__(self):
        if not self.quotient_files:
            raise ConfigInvalid("at least one quotient file is required")
        if self.trials < 1:
            raise ConfigInvalid(f"trials must be >= 1, got {self.trials}")
        if any(not (0.0 <= p < 0.5) for p in self.p_grid):
            raise ConfigInvalid("p values must lie in [0, 0.5)")
        if any(a >= b for a, b in zip(self.p_grid, self.p_grid[1:])):
            raise ConfigInvalid("p grid must be strictly increasing")
        if self.workers < 1:
            raise ConfigInvalid("workers must be >= 1")

    @classmethod
    def from_json(cls, data: dict) -> "SimConfig":
        try:
            return cls(
                pattern=tuple(data["pattern"]),
                quotient_files=tuple(data["quotients"]),
                p_grid=tuple(float(x) for x in data["p_grid"]),
                trials=int(data["trials"]),
                seed=int(data["seed"]),
                workers=int(data.get("workers", 1)),
            )
        except (KeyError, TypeError, ValueError) as exc:
            raise ConfigInvalid(f"bad simulation config: {exc}") from exc


@dataclass(frozen=True)
class SimRow:
    pattern: str
    N: int
    n: int
    k: int
    p: float
    trials: int
    failures: int
    logical_rate: float
    ci_low: float
    ci_high: float
    seed: int


@dataclass(frozen=True)
class SimResult:
    rows: tuple[SimRow, ...]

    def to_csv(self) -> str:
        lines = ["pattern,N,n,k,p,trials,failures,logical_rate,ci_low,ci_high,seed"]
        for r in self.rows:
            # the pattern field contains a comma, so it is quoted (RFC 4180)
            lines.append(
                f'"{r.pattern}",{r.N},{r.n},{r.k},{r.p:.6g},{r.trials},{r.failures},'
                f"{r.logical_rate:.8f},{r.ci_low:.8f},{r.ci_high:.8f},{r.seed}"
            )
        return "\n".join(lines) + "\n"


def wilson_interval(failures: int, trials: int, z: float = 1.959963984540054) -> tuple[float, float]:
    """95% Wilson score interval for a binomial proportion."""
    if trials == 0:
        return 0.0, 1.0
    phat = failures / trials
    denom = 1.0 + z * z / trials
    center = (phat + z * z / (2 * trials)) / denom
    half = (z / denom) * math.sqrt(phat * (1 - phat) / trials + z * z / (4 * trials * trials))
    lo = 0.0 if failures == 0 else max(0.0, center - half)
    hi = 1.0 if failures == trials else min(1.0, center + half)
    return lo, hi


def _sample_error(rng: np.random.Generator, n: int, p: float) -> int:
    flips = np.nonzero(rng.random(n) < p)[0]
    err = 0
    for e in flips:
        err ^= 1 << int(e)
    return err


def run_trial(code: CssCode, gpbc: PeriodicGraph, p: float, seed_key: tuple[int, ...]) -> bool:
    """One sample-decode-classify round; True means logical failure."""
    rng = np.random.default_rng(np.random.SeedSequence(seed_key[0], spawn_key=seed_key[1:]))
    err = _sample_error(rng, code.n, p)
    s = Syndrome(defects=code.syndrome_x(err))
    m = decode(gpbc, s)
    return residual_is_logical(code, err, m.correction())


def _count_failures(code, gpbc, p, seed, size_idx, p_idx, trial_range) -> int:
    fails = 0
    for t in trial_range:
        if run_trial(code, gpbc, p, (seed, size_idx, p_idx, t)):
            fails += 1
    return fails


_WORKER_STATE: dict = {}


def _worker_chunk(args):
    code, gpbc, p, seed, size_idx, p_idx, lo, hi = args
    return _count_failures(code, gpbc, p, seed, size_idx, p_idx, range(lo, hi))


def run(config: SimConfig, codes: list[tuple[int, CssCode, PeriodicGraph]]) -> SimResult:
    """Run the full grid. `codes` holds (N, code, graph) per quotient file.

    The caller (CLI or tests) builds the codes so construction errors
    surface before any sampling starts.
    """
    if len(codes) != len(config.quotient_files):
        raise ConfigInvalid("one built code per quotient file is required")
    p_name = "{%d,%d}" % config.pattern
    rows = []
    pool = ProcessPoolExecutor(max_workers=config.workers) if config.workers > 1 else None
    try:
        for size_idx, (N, code, gpbc) in enumerate(codes):
            for p_idx, p in enumerate(config.p_grid):
                if pool is None:
                    fails = _count_failures(
                        code, gpbc, p, config.seed, size_idx, p_idx, range(config.trials)
                    )
                else:
                    chunk = max(1, math.ceil(config.trials / config.workers))
                    jobs = [
                        (code, gpbc, p, config.seed, size_idx, p_idx, lo, min(lo + chunk, config.trials))
                        for lo in range(0, config.trials, chunk)
                    ]
                    fails = sum(pool.map(_worker_chunk, jobs))
                lo, hi = wilson_interval(fails, config.trials)
                rows.append(
                    SimRow(
                        pattern=p_name, N=N, n=code.n, k=code.k, p=p,
                        trials=config.trials, failures=fails,
                        logical_rate=fails / config.trials, ci_low=lo, ci_high=hi,
                        seed=config.seed,
                    )
                )
    finally:
        if pool is not None:
            pool.shutdown()
    return SimResult(rows=tuple(rows))


class ThresholdEstimate(NamedTuple):
    p_low: float
    p_high: float
    crossed: bool


def estimate_threshold(result: SimResult) -> ThresholdEstimate:
    """Bracketing interval of pairwise logical-rate curve crossings.

    For each pair of sizes, adjacent grid segments where the rate
    difference changes sign contribute a linearly interpolated crossing;
    the estimate spans all crossings. Without any crossing the grid hull
    is returned with crossed=False.
    """
    by_n: dict[int, list[SimRow]] = {}
    for r in result.rows:
        by_n.setdefault(r.N, []).append(r)
    sizes = sorted(by_n)
    if len(sizes) < 2:
        raise InsufficientData("need at least two sizes")
    grids = {n: sorted(by_n[n], key=lambda r: r.p) for n in sizes}
    ps = [r.p for r in grids[sizes[0]]]
    if len(ps) < 3:
        raise InsufficientData("need at least three p points")
    for n in sizes:
        if [r.p for r in grids[n]] != ps:
            raise InsufficientData("sizes were run on different p grids")
    crossings = []
    for i in range(len(sizes)):
        for j in range(i + 1, len(sizes)):
            a = grids[sizes[i]]
            b = grids[sizes[j]]
            diff = [ra.logical_rate - rb.logical_rate for ra, rb in zip(a, b)]
            for s in range(len(ps) - 1):
                d0, d1 = diff[s], diff[s + 1]
                if d0 * d1 < 0:
                    t = d0 / (d0 - d1)
                    crossings.append(ps[s] + t * (ps[s + 1] - ps[s]))
    if not crossings:
        return ThresholdEstimate(ps[0], ps[-1], False)
    return ThresholdEstimate(min(crossings), max(crossings), True)
