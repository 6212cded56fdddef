"""Seeded, replicable Monte Carlo experiments over longest-chain statistics.

Every replication runs on its own random stream derived from a master seed,
so replications can execute on any number of worker threads without changing
a single output bit; aggregation always consumes results in replication-index
order to fix the floating-point summation order.

Seed derivation (bit-exact contract)
------------------------------------
``derive_rep_seed(master_seed, rep_index)`` applies the splitmix64 finalizer
to ``master_seed XOR (rep_index * 0x9E3779B97F4A7C15 mod 2^64)``:

    z = (input + 0x9E3779B97F4A7C15) mod 2^64
    z = ((z XOR (z >> 30)) * 0xBF58476D1CE4E5B9) mod 2^64
    z = ((z XOR (z >> 27)) * 0x94D049BB133111EB) mod 2^64
    output = z XOR (z >> 31)

The finalizer is a bijection of 2^64 and the odd multiplier makes the inputs
distinct across replication indices, so derived seeds never collide for a
fixed master seed (nor across distinct master seeds at a fixed index).
Streams are PCG64 generators seeded with the derived value.
"""

from __future__ import annotations

import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Callable, Iterable, Iterator

import numpy as np

from .bounds import BoundReport
from .chains import (
    ChainRunResult,
    longest_chain,
    longest_chain_patience,
    longest_chain_quadratic,
    sample_cloud,
)
from .errors import DomainError

_MASK64 = (1 << 64) - 1
_GOLDEN = 0x9E3779B97F4A7C15

ALGORITHMS = ("auto", "quadratic", "patience")


@dataclass(frozen=True)
class ExperimentSpec:
    """Replication plan: dimension, points per replication, count, seed, algorithm."""

    t: int
    n: int
    reps: int
    master_seed: int
    algorithm: str = "auto"

    def __post_init__(self) -> None:
        if self.t < 1:
            raise DomainError(f"need t >= 1, got {self.t}")
        if self.n < 1:
            raise DomainError(f"need n >= 1, got {self.n}")
        if self.reps < 1:
            raise DomainError(f"need reps >= 1, got {self.reps}")
        if not 0 <= self.master_seed <= _MASK64:
            raise DomainError(f"master_seed must be a 64-bit unsigned integer, got {self.master_seed}")
        if self.algorithm not in ALGORITHMS:
            raise DomainError(f"algorithm must be one of {ALGORITHMS}, got {self.algorithm!r}")
        if self.algorithm == "patience" and self.t != 2:
            raise DomainError("algorithm 'patience' requires t = 2")


@dataclass(frozen=True)
class ExperimentResult:
    """Aggregated scaled chain lengths over all replications of a spec."""

    spec: ExperimentSpec
    mean_ratio: float
    std_dev: float
    ci95: float
    min_ratio: float
    max_ratio: float
    per_rep: tuple[ChainRunResult, ...] | None = None

    def __post_init__(self) -> None:
        if not self.min_ratio <= self.mean_ratio <= self.max_ratio:
            raise DomainError("mean ratio must lie between the extremes")


@dataclass(frozen=True)
class BandVerdict:
    """Comparison of an experiment against the bound band for its dimension.

    The upper check is the bound proper (every ratio below bar_x); the lower
    check is a configurable sanity margin against the asymptotic lower bound,
    not a theorem: finite samples sit below it.
    """

    t: int
    bar_x: float
    bw_lower: float
    lower_fraction: float
    max_ratio: float
    mean_ratio: float
    max_below_upper: bool
    mean_above_lower: bool
    upper_margin: float
    lower_margin: float


def derive_rep_seed(master_seed: int, rep_index: int) -> int:
    """Collision-free 64-bit per-replication seed (splitmix64 finalizer, see module docs)."""
    if not 0 <= master_seed <= _MASK64:
        raise DomainError(f"master_seed must be a 64-bit unsigned integer, got {master_seed}")
    if rep_index < 0:
        raise DomainError(f"rep_index must be >= 0, got {rep_index}")
    z = (master_seed ^ ((rep_index * _GOLDEN) & _MASK64)) & _MASK64
    z = (z + _GOLDEN) & _MASK64
    z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & _MASK64
    z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & _MASK64
    return z ^ (z >> 31)


def stream(seed: int) -> np.random.Generator:
    """Fresh PCG64 stream for a derived seed."""
    return np.random.Generator(np.random.PCG64(seed))


def _run_one(spec: ExperimentSpec, rep_index: int) -> ChainRunResult:
    cloud = sample_cloud(spec.n, spec.t, stream(derive_rep_seed(spec.master_seed, rep_index)))
    if spec.algorithm == "quadratic":
        return longest_chain_quadratic(cloud)
    if spec.algorithm == "patience":
        return longest_chain_patience(cloud)
    return longest_chain(cloud)


def _results_in_order(spec: ExperimentSpec, threads: int) -> Iterator[ChainRunResult]:
    if threads == 1:
        for i in range(spec.reps):
            yield _run_one(spec, i)
        return
    with ThreadPoolExecutor(max_workers=threads) as pool:
        yield from pool.map(_run_one, [spec] * spec.reps, range(spec.reps))


def run_experiment(
    spec: ExperimentSpec,
    threads: int = 1,
    collect_per_rep: bool = False,
    on_result: Callable[[int, ChainRunResult], None] | None = None,
) -> ExperimentResult:
    """Run all replications of a spec and aggregate the scaled ratios.

    threads = 0 picks the machine's CPU count.  Replications execute
    independently, but the streaming mean/variance (Welford) and the optional
    on_result callback always consume them in replication-index order, so the
    result is bit-identical for every thread count.
    """
    if threads < 0:
        raise DomainError(f"threads must be >= 0, got {threads}")
    if threads == 0:
        threads = os.cpu_count() or 1
    threads = min(threads, spec.reps)

    mean = 0.0
    m2 = 0.0
    lo = math.inf
    hi = -math.inf
    seen = 0
    collected: list[ChainRunResult] = []
    for i, res in enumerate(_results_in_order(spec, threads)):
        seen += 1
        delta = res.ratio - mean
        mean += delta / seen
        m2 += delta * (res.ratio - mean)
        lo = min(lo, res.ratio)
        hi = max(hi, res.ratio)
        if collect_per_rep:
            collected.append(res)
        if on_result is not None:
            on_result(i, res)
    std_dev = math.sqrt(m2 / (seen - 1)) if seen > 1 else 0.0
    return ExperimentResult(
        spec=spec,
        mean_ratio=mean,
        std_dev=std_dev,
        ci95=1.96 * std_dev / math.sqrt(seen),
        min_ratio=lo,
        max_ratio=hi,
        per_rep=tuple(collected) if collect_per_rep else None,
    )


def bound_band_check(
    result: ExperimentResult, report: BoundReport, lower_fraction: float = 0.8
) -> BandVerdict:
    """Check an experiment against the bound band of its dimension.

    Verifies max_ratio < bar_x and mean_ratio > lower_fraction * bw_lower and
    reports both margins.  Raises on a dimension mismatch.
    """
    if result.spec.t != report.t:
        raise DomainError(f"dimension mismatch: experiment t={result.spec.t}, report t={report.t}")
    if not 0.0 < lower_fraction <= 1.0:
        raise DomainError(f"lower_fraction must be in (0, 1], got {lower_fraction}")
    lower_edge = lower_fraction * report.bw_lower
    return BandVerdict(
        t=report.t,
        bar_x=report.bar_x,
        bw_lower=report.bw_lower,
        lower_fraction=lower_fraction,
        max_ratio=result.max_ratio,
        mean_ratio=result.mean_ratio,
        max_below_upper=result.max_ratio < report.bar_x,
        mean_above_lower=result.mean_ratio > lower_edge,
        upper_margin=report.bar_x - result.max_ratio,
        lower_margin=result.mean_ratio - lower_edge,
    )


def streaming_moments(values: Iterable[float]) -> tuple[float, float]:
    """Welford mean and sample variance in one pass (consumed in input order)."""
    mean = 0.0
    m2 = 0.0
    k = 0
    for v in values:
        k += 1
        delta = v - mean
        mean += delta / k
        m2 += delta * (v - mean)
    if k == 0:
        raise DomainError("streaming_moments needs at least one value")
    return mean, (m2 / (k - 1) if k > 1 else 0.0)
