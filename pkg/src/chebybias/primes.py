"""Segmented prime sieve with ordered streaming and geometric checkpoint grids.

Primes are produced segment by segment (odd-only bitmaps, 2 handled
specially).  Segments may be sieved concurrently, but blocks are always
delivered to consumers in ascending order, so any floating-point work
done downstream is reproducible regardless of thread count.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

LIMIT_CAP = 1 << 40

DEFAULT_SEGMENT_SIZE = 1 << 22  # odd-number bitmap length; span 2^23 fits L2-ish


@dataclass(frozen=True)
class SieveConfig:
    """Parameters of one sieve run."""

    limit: int
    segment_size: int = DEFAULT_SEGMENT_SIZE
    thread_count: int = 1

    def __post_init__(self):
        if self.limit < 0:
            raise ValueError("limit must be nonnegative")
        if self.limit > LIMIT_CAP:
            raise ValueError(f"limit {self.limit} exceeds cap 2^40")
        if self.segment_size < 64:
            raise ValueError("segment_size must be >= 64")
        if self.thread_count < 1:
            raise ValueError("thread_count must be >= 1")


@dataclass(frozen=True)
class CheckpointGrid:
    """Sorted integer checkpoints, normally geometrically spaced."""

    points: tuple[int, ...]
    ratio: float | None = None

    def __post_init__(self):
        if not self.points:
            raise ValueError("grid must contain at least one point")
        for a, b in zip(self.points, self.points[1:]):
            if b <= a:
                raise ValueError("grid points must be strictly increasing")

    @property
    def x_min(self) -> int:
        return self.points[0]

    @property
    def x_max(self) -> int:
        return self.points[-1]

    def __len__(self):
        return len(self.points)


def make_grid(x_min: int, x_max: int, ratio: float = 1.05) -> CheckpointGrid:
    """Geometric grid from x_min to x_max; last point is exactly x_max."""
    if ratio <= 1.0:
        raise ValueError("ratio must be > 1")
    if not 2 <= x_min < x_max:
        raise ValueError("need 2 <= x_min < x_max")
    points = [x_min]
    while True:
        x = max(round(points[-1] * ratio), points[-1] + 1)
        if x >= x_max:
            break
        points.append(x)
    points.append(x_max)
    return CheckpointGrid(tuple(points), ratio)


def simple_sieve(limit: int) -> np.ndarray:
    """All primes <= limit by a plain unsegmented sieve (int64 array)."""
    if limit < 2:
        return np.array([], dtype=np.int64)
    is_prime = np.ones(limit + 1, dtype=bool)
    is_prime[:2] = False
    for p in range(2, math.isqrt(limit) + 1):
        if is_prime[p]:
            is_prime[p * p :: p] = False
    return np.flatnonzero(is_prime).astype(np.int64)


def sieve_segment(lo: int, hi: int, base_primes) -> np.ndarray:
    """Primality bitmap for the integers in [lo, hi).

    base_primes must contain every prime <= sqrt(hi - 1); bit i is set
    iff lo + i is prime.  Output is independent of how [2, N) was tiled.
    """
    if lo < 2:
        raise ValueError("lo must be >= 2")
    if hi <= lo:
        return np.zeros(0, dtype=bool)
    base = np.asarray(base_primes, dtype=np.int64)
    need = math.isqrt(hi - 1)
    if need >= 2:
        required = simple_sieve(need)
        if not np.isin(required, base).all():
            raise ValueError(f"base_primes must cover all primes <= {need}")
    mask = np.ones(hi - lo, dtype=bool)
    for p in base:
        p = int(p)
        if p * p >= hi:
            break
        start = max(p * p, ((lo + p - 1) // p) * p)
        if start < hi:
            mask[start - lo :: p] = False
    return mask


def _sieve_odd_segment(lo: int, hi: int, odd_base: np.ndarray) -> np.ndarray:
    # lo odd; bitmap over odd integers lo, lo+2, ..., < hi
    count = (hi - lo + 1) // 2
    mask = np.ones(count, dtype=bool)
    for p in odd_base:
        p = int(p)
        if p * p >= hi:
            break
        start = max(p * p, ((lo + p - 1) // p) * p)
        if start % 2 == 0:
            start += p
        if start < hi:
            mask[(start - lo) // 2 :: p] = False
    return mask


def _segment_bounds(limit: int, segment_size: int, start: int = 3):
    # segment s covers odds in [3 + 2*s*segment_size, 3 + 2*(s+1)*segment_size)
    span = 2 * segment_size
    s0 = max(0, (start - 3) // span)
    lo = 3 + s0 * span
    while lo <= limit:
        yield lo, min(lo + span, limit + 1)
        lo += span


def iter_prime_blocks(config: SieveConfig, start: int = 2):
    """Yield ascending int64 arrays of primes in [start, limit].

    Segment boundaries depend only on segment_size, never on start or
    thread_count, so partial runs resume at identical block edges.
    """
    limit = config.limit
    if limit < 2:
        return
    if start <= 2 <= limit:
        yield np.array([2], dtype=np.int64)
    if limit < 3:
        return
    base = simple_sieve(math.isqrt(limit))
    odd_base = base[base > 2]

    def primes_of(bounds):
        lo, hi = bounds
        mask = _sieve_odd_segment(lo, hi, odd_base)
        return lo + 2 * np.flatnonzero(mask).astype(np.int64)

    bounds_iter = _segment_bounds(limit, config.segment_size, max(start, 3))

    if config.thread_count == 1:
        for bounds in bounds_iter:
            block = primes_of(bounds)
            block = block[block >= start]
            if block.size:
                yield block
    else:
        with ThreadPoolExecutor(max_workers=config.thread_count) as pool:
            pending = []
            for bounds in bounds_iter:
                pending.append(pool.submit(primes_of, bounds))
                if len(pending) > config.thread_count + 2:
                    block = pending.pop(0).result()
                    block = block[block >= start]
                    if block.size:
                        yield block
            for fut in pending:
                block = fut.result()
                block = block[block >= start]
                if block.size:
                    yield block


def iter_primes(config: SieveConfig):
    """Yield individual primes <= limit in increasing order."""
    for block in iter_prime_blocks(config):
        yield from block.tolist()


def stream_primes(config: SieveConfig, consumer, state=None):
    """Fold consumer(state, p) over every prime p <= limit in order."""
    for p in iter_primes(config):
        state = consumer(state, p)
    return state


def prime_count(limit: int, segment_size: int = DEFAULT_SEGMENT_SIZE) -> int:
    """pi(limit) via the segmented engine."""
    total = 0
    for block in iter_prime_blocks(SieveConfig(limit, segment_size)):
        total += block.size
    return total
