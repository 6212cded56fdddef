"""Random point clouds in [0,1]^t and chain statistics under the componentwise order.

A chain is an ordered sequence of sample points, each componentwise <= the
next (non-strict; exact coordinate ties occur with probability zero under
uniform sampling but the predicates below stay literal about them).  A chain
of length ell is *maximal* when none of its ell consecutive intervals --
starting from the origin, i.e. [0, X_1], [X_1, X_2], ..., [X_{ell-1}, X_ell]
-- contains another sample point strictly between its endpoints in every
coordinate.  The trailing interval up to (1,...,1) is deliberately not part
of that definition; ``trailing_interval_empty`` exposes it separately.

Longest-chain computation is exact: patience sorting for t = 2 (the classic
O(n log n) longest non-decreasing subsequence after a lexicographic sort) and
a quadratic dominance DP for t >= 3, with the DP re-checking all t
coordinates in every transition so equal first coordinates cannot produce
false predecessors.
"""

from __future__ import annotations

import math
from bisect import bisect_right
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .errors import DomainError

#: Hard cap for exhaustive maximal-chain enumeration.
MAX_ENUMERATION_POINTS = 14


@dataclass(frozen=True, eq=False)
class PointCloud:
    """n points in [0,1]^t in a flat coordinate layout.

    Point i occupies coords[i*t : (i+1)*t] (point-major, coordinate-minor).
    The coordinate buffer is copied and frozen at construction.
    """

    t: int
    n: int
    coords: np.ndarray

    def __post_init__(self) -> None:
        if self.t < 1:
            raise DomainError(f"dimension t must be >= 1, got {self.t}")
        if self.n < 0:
            raise DomainError(f"point count n must be >= 0, got {self.n}")
        arr = np.array(self.coords, dtype=np.float64, copy=True).reshape(-1)
        if arr.size != self.n * self.t:
            raise DomainError(f"coords has {arr.size} entries, expected n*t = {self.n * self.t}")
        if arr.size and (arr.min() < 0.0 or arr.max() > 1.0):
            raise DomainError("all coordinates must lie in [0, 1]")
        arr.setflags(write=False)
        object.__setattr__(self, "coords", arr)

    @property
    def matrix(self) -> np.ndarray:
        """Read-only (n, t) view of the coordinates."""
        return self.coords.reshape(self.n, self.t)

    def point(self, i: int) -> np.ndarray:
        return self.coords[i * self.t : (i + 1) * self.t]


@dataclass(frozen=True)
class ChainRunResult:
    """Longest chain length L and the scaled statistic L / n^{1/t}."""

    length: int
    ratio: float


@dataclass(frozen=True)
class MaximalChainCount:
    """Number of maximal chains of length exactly ell."""

    ell: int
    count: int


def sample_cloud(n: int, t: int, rng: np.random.Generator) -> PointCloud:
    """Draw n independent uniform points in [0,1]^t from the given stream.

    Exactly n*t variates are consumed in point-major, coordinate-minor order,
    so identical streams always reproduce identical clouds.
    """
    if n < 1:
        raise DomainError(f"need n >= 1 points, got {n}")
    if t < 1:
        raise DomainError(f"need dimension t >= 1, got {t}")
    return PointCloud(t=t, n=n, coords=rng.random(n * t))


def _check_indices(cloud: PointCloud, indices: Sequence[int]) -> list[int]:
    idx = list(indices)
    if not idx:
        raise DomainError("index list must be non-empty")
    seen = set()
    for i in idx:
        if not isinstance(i, (int, np.integer)) or isinstance(i, bool):
            raise DomainError(f"index {i!r} is not an integer")
        if not 0 <= i < cloud.n:
            raise DomainError(f"index {i} out of range for {cloud.n} points")
        if i in seen:
            raise DomainError(f"index {i} repeated")
        seen.add(i)
    return [int(i) for i in idx]


def is_chain(cloud: PointCloud, indices: Sequence[int]) -> bool:
    """True iff each consecutive pair of the listed points is componentwise <=."""
    idx = _check_indices(cloud, indices)
    m = cloud.matrix
    for lo, hi in zip(idx, idx[1:]):
        if not (m[lo] <= m[hi]).all():
            return False
    return True


def _strictly_inside(point: np.ndarray, lower: np.ndarray, upper: np.ndarray) -> bool:
    return bool((lower < point).all() and (point < upper).all())


def is_maximal_chain(cloud: PointCloud, indices: Sequence[int]) -> bool:
    """True iff the chain's consecutive intervals contain no other sample point.

    The intervals run from the origin: (0, X_{i_1}), (X_{i_1}, X_{i_2}), ...;
    a point disqualifies an interval only when it is strictly between the
    endpoints in every coordinate.  Points belonging to the chain itself are
    not counted.  Raises if the indices do not form a chain.
    """
    idx = _check_indices(cloud, indices)
    if not is_chain(cloud, idx):
        raise DomainError("indices do not form a chain")
    m = cloud.matrix
    members = set(idx)
    others = [j for j in range(cloud.n) if j not in members]
    lower = np.zeros(cloud.t)
    for i in idx:
        upper = m[i]
        for j in others:
            if _strictly_inside(m[j], lower, upper):
                return False
        lower = upper
    return True


def trailing_interval_empty(cloud: PointCloud, indices: Sequence[int]) -> bool:
    """True iff no other sample point lies strictly between the chain's top and (1,...,1).

    Not part of the maximality definition (longest chains happen to satisfy
    it); provided separately for exploration.
    """
    idx = _check_indices(cloud, indices)
    if not is_chain(cloud, idx):
        raise DomainError("indices do not form a chain")
    m = cloud.matrix
    members = set(idx)
    lower = m[idx[-1]]
    upper = np.ones(cloud.t)
    return not any(
        _strictly_inside(m[j], lower, upper) for j in range(cloud.n) if j not in members
    )


def _ratio(length: int, n: int, t: int) -> float:
    return length / n ** (1.0 / t)


def _lex_order(m: np.ndarray) -> np.ndarray:
    # coordinate 0 primary, then 1, ...; np.lexsort takes the primary key last
    return np.lexsort(tuple(m[:, j] for j in reversed(range(m.shape[1]))))


def _patience_length(values: list[float]) -> int:
    """Longest non-decreasing subsequence length via patience piles."""
    piles: list[float] = []
    for v in values:
        k = bisect_right(piles, v)
        if k == len(piles):
            piles.append(v)
        else:
            piles[k] = v
    return len(piles)


def _quadratic_length(m: np.ndarray) -> int:
    """O(n^2 t) dominance DP; compares all t coordinates in each transition."""
    n, t = m.shape
    order = _lex_order(m)
    s = m[order]
    cols = [np.ascontiguousarray(s[:, j]) for j in range(t)]
    best = np.ones(n, dtype=np.int64)
    mask = np.empty(n, dtype=bool)
    tmp = np.empty(n, dtype=bool)
    for i in range(1, n):
        np.less_equal(cols[0][:i], cols[0][i], out=mask[:i])
        for j in range(1, t):
            np.less_equal(cols[j][:i], cols[j][i], out=tmp[:i])
            np.logical_and(mask[:i], tmp[:i], out=mask[:i])
        if mask[:i].any():
            best[i] = 1 + best[:i][mask[:i]].max()
    return int(best.max())


def longest_chain_patience(cloud: PointCloud) -> ChainRunResult:
    """Patience-sorting longest chain, valid for t = 2 only.

    After sorting lexicographically by (first, second) coordinate the longest
    chain is the longest non-decreasing subsequence of second coordinates;
    sorting ties in the second coordinate ascending keeps equal-first-column
    groups internally chainable under the non-strict order.
    """
    if cloud.t != 2:
        raise DomainError(f"patience sorting requires t = 2, got t = {cloud.t}")
    if cloud.n < 1:
        raise DomainError("cloud is empty")
    m = cloud.matrix
    order = np.lexsort((m[:, 1], m[:, 0]))
    length = _patience_length(m[order, 1].tolist())
    return ChainRunResult(length=length, ratio=_ratio(length, cloud.n, cloud.t))


def longest_chain_quadratic(cloud: PointCloud) -> ChainRunResult:
    """Longest chain through the quadratic DP for any t >= 1 (cross-check path)."""
    if cloud.n < 1:
        raise DomainError("cloud is empty")
    length = _quadratic_length(cloud.matrix)
    return ChainRunResult(length=length, ratio=_ratio(length, cloud.n, cloud.t))


def longest_chain(cloud: PointCloud) -> ChainRunResult:
    """Exact longest chain length and scaled ratio L / n^{1/t}.

    Dispatches on dimension: t = 1 is totally ordered (every cloud is one
    chain), t = 2 uses patience sorting, t >= 3 the quadratic dominance DP.
    """
    if cloud.n < 1:
        raise DomainError("cloud is empty")
    if cloud.t == 1:
        return ChainRunResult(length=cloud.n, ratio=float(cloud.n) / cloud.n)
    if cloud.t == 2:
        return longest_chain_patience(cloud)
    length = _quadratic_length(cloud.matrix)
    return ChainRunResult(length=length, ratio=_ratio(length, cloud.n, cloud.t))


def count_maximal_chains(cloud: PointCloud, ell: int) -> MaximalChainCount:
    """Exact number of maximal chains of length ell by pruned depth-first search.

    Chains are extended only through empty intervals, which is exactly the
    maximality condition: a chain's own points can never lie strictly inside
    one of its intervals, so interval emptiness against all points equals
    emptiness against non-chain points.  Guarded to n <= 14; the enumeration
    is for desk-scale verification, not production counting.
    """
    if cloud.n > MAX_ENUMERATION_POINTS:
        raise DomainError(
            f"maximal-chain enumeration is capped at n <= {MAX_ENUMERATION_POINTS}, got n = {cloud.n}"
        )
    if not 1 <= ell <= cloud.n:
        raise DomainError(f"need 1 <= ell <= n, got ell = {ell}, n = {cloud.n}")
    m = cloud.matrix
    n = cloud.n
    leq = (m[:, None, :] <= m[None, :, :]).all(axis=2)
    strict = (m[:, None, :] < m[None, :, :]).all(axis=2)
    strict_int = strict.astype(np.int16)
    # (strict @ strict)[lo, hi] counts points strictly between lo and hi
    interval_empty = (strict_int @ strict_int) == 0
    positive = (m > 0.0).all(axis=1)
    # origin interval: points strictly inside (0, p) are strictly below p
    # with all coordinates positive
    origin_empty = ~(strict & positive[:, None]).any(axis=0)

    leq_rows = leq.tolist()
    empty_rows = interval_empty.tolist()
    total = 0

    def extend(last: int, depth: int, used: int) -> None:
        nonlocal total
        if depth == ell:
            total += 1
            return
        comparable = leq_rows[last]
        empty = empty_rows[last]
        for y in range(n):
            if not (used >> y) & 1 and comparable[y] and empty[y]:
                extend(y, depth + 1, used | (1 << y))

    for p in range(n):
        if origin_empty[p]:
            extend(p, 1, 1 << p)
    return MaximalChainCount(ell=ell, count=total)


def expected_count_integral_mc(
    n: int,
    t: int,
    ell: int,
    reps: int,
    rng: np.random.Generator,
    chunk: int = 65536,
) -> tuple[float, float]:
    """Monte Carlo estimate of the exact expectation formula for the maximal-chain count.

    The expected number of maximal chains of length ell equals

        (n)_ell * I,
        I = integral over {0 <= x(1) <= ... <= x(ell) <= 1, componentwise}
            of (1 - sum_i prod_j (x_j(i) - x_j(i-1)))^(n-ell) dx,

    with x(0) = 0: (n)_ell counts ordered point selections and the integrand
    is the probability that the remaining n-ell points avoid all ell
    consecutive intervals of the chain.

    Unbiasedness of the estimator: the integration region factors per
    coordinate j into the order simplex 0 <= x_j(1) <= ... <= x_j(ell) <= 1
    of volume 1/ell!.  Sorting ell iid uniforms draws from that simplex with
    constant density ell!, so over all t coordinates the sampling density on
    the region is (ell!)^t and

        I = E[integrand at sorted-uniform chains] / (ell!)^t.

    Hence estimate = (n)_ell / (ell!)^t * mean(integrand), whose expectation
    is exactly the display above.  Returns (estimate, standard error), the
    latter from the sample standard deviation of the scaled integrand.
    """
    if n < 1 or t < 1:
        raise DomainError(f"need n >= 1 and t >= 1, got n = {n}, t = {t}")
    if not 1 <= ell <= n:
        raise DomainError(f"need 1 <= ell <= n, got ell = {ell}, n = {n}")
    if reps < 1:
        raise DomainError(f"need reps >= 1, got {reps}")
    scale = math.perm(n, ell) / math.factorial(ell) ** t
    total = 0.0
    total_sq = 0.0
    done = 0
    while done < reps:
        k = min(chunk, reps - done)
        u = rng.random((k, t, ell))
        u.sort(axis=2)
        increments = np.diff(u, axis=2, prepend=0.0)
        covered = increments.prod(axis=1).sum(axis=1)
        integrand = np.clip(1.0 - covered, 0.0, 1.0) ** (n - ell)
        total += float(integrand.sum())
        total_sq += float((integrand * integrand).sum())
        done += k
    mean = total / reps
    estimate = scale * mean
    if reps == 1:
        return estimate, 0.0
    var = max(0.0, (total_sq - reps * mean * mean) / (reps - 1))
    std_error = scale * math.sqrt(var / reps)
    return estimate, std_error
