"""Ramanujan tau coefficients and the tau(p) p^-6 bias series.

The discriminant cusp form expansion is computed exactly: the cube of
the eta-product is the sparse Jacobi series, and three dense squarings
give the 24th power.  The squarings run on integers packed into 128-bit
slots of one huge Python int, with positive/negative parts multiplied
separately so coefficients can carry signs.
"""

from __future__ import annotations

import hashlib
import math
import struct
from dataclasses import dataclass

import numpy as np

try:  # GMP multiplication is ~25x faster on the packed megabit integers
    from gmpy2 import mpz
except ImportError:  # pragma: no cover
    def mpz(x):
        return x

from .primes import CheckpointGrid, SieveConfig, iter_prime_blocks
from .series import CheckpointSeries, KahanSum, scale_values

N_CAP = 1 << 17
_SLOT_BITS = 128
_SLOT_BYTES = _SLOT_BITS // 8
_SLOT_LIMIT = 1 << (_SLOT_BITS - 1)  # headroom: one sign-free bit


class CoefficientOverflow(OverflowError):
    def __init__(self, index: int, value: int):
        super().__init__(f"coefficient at index {index} exceeds 128-bit budget")
        self.index = index
        self.value = value


def _pack(values: list[int]) -> int:
    data = b"".join(v.to_bytes(_SLOT_BYTES, "little") for v in values)
    return int.from_bytes(data, "little")


def _unpack(packed: int, count: int) -> list[int]:
    data = packed.to_bytes(max(count * _SLOT_BYTES, 1), "little")
    return [
        int.from_bytes(data[i * _SLOT_BYTES : (i + 1) * _SLOT_BYTES], "little")
        for i in range(count)
    ]


def _square_signed(values: list[int]) -> list[int]:
    """Exact coefficients of the square of a signed integer series.

    Splits into nonnegative parts P = A - B, squares the packed ints,
    and recombines slotwise; every intermediate slot must stay within
    the 128-bit budget or CoefficientOverflow is raised.
    """
    n = len(values)
    pos = mpz(_pack([v if v > 0 else 0 for v in values]))
    neg = mpz(_pack([-v if v < 0 else 0 for v in values]))
    square_part = pos * pos + neg * neg  # nonnegative coefficients
    cross_part = 2 * pos * neg
    # slots beyond n belong to truncated powers; mask them off
    mask = (mpz(1) << (_SLOT_BITS * n)) - 1
    d_slots = _unpack(int(square_part & mask), n)
    e_slots = _unpack(int(cross_part & mask), n)
    out = []
    for i, (d, e) in enumerate(zip(d_slots, e_slots)):
        if d >= _SLOT_LIMIT or e >= _SLOT_LIMIT:
            raise CoefficientOverflow(i, max(d, e))
        out.append(d - e)
    return out


def eta_cube_series(n: int) -> list[int]:
    """Coefficients of prod (1-x^k)^3 = sum (-1)^j (2j+1) x^(j(j+1)/2)."""
    out = [0] * n
    j = 0
    while j * (j + 1) // 2 < n:
        out[j * (j + 1) // 2] = (2 * j + 1) * (-1 if j & 1 else 1)
        j += 1
    return out


def pentagonal_series(n: int) -> list[tuple[int, int]]:
    """(offset, sign) pairs of prod (1-x^k) = sum (-1)^j x^(j(3j-1)/2)."""
    terms = [(0, 1)]
    j = 1
    while True:
        added = False
        for off in (j * (3 * j - 1) // 2, j * (3 * j + 1) // 2):
            if off < n:
                terms.append((off, -1 if j & 1 else 1))
                added = True
        if not added:
            break
        j += 1
    return terms


@dataclass
class DeltaExpansion:
    """tau(n) for 1 <= n <= n_max, exact integers."""

    n_max: int
    tau: list[int]  # tau[n], with tau[0] = 0 placeholder

    def __getitem__(self, n: int) -> int:
        if not 1 <= n <= self.n_max:
            raise IndexError(f"tau({n}) outside computed range")
        return self.tau[n]


def delta_coefficients(n_max: int) -> DeltaExpansion:
    """Exact tau(1..n_max) via the 8th power of the Jacobi cube series."""
    if n_max < 1:
        raise ValueError("n_max must be >= 1")
    if n_max > N_CAP:
        raise ValueError(f"n_max exceeds the 128-bit budget cap 2^17")
    series = eta_cube_series(n_max)
    for _ in range(3):
        series = _square_signed(series)
    tau = [0] + series[: n_max]
    out = DeltaExpansion(n_max, tau)
    _deligne_check(out)
    return out


def divisor_counts(n_max: int) -> np.ndarray:
    d = np.zeros(n_max + 1, dtype=np.int64)
    for k in range(1, n_max + 1):
        d[k::k] += 1
    return d


def _deligne_check(expansion: DeltaExpansion):
    """|tau(n)| < 2 d(n) n^(11/2), exactly: tau^2 < 4 d^2 n^11.

    A float pre-screen with a 1% margin keeps the exact big-integer
    comparison off the hot path.
    """
    d = divisor_counts(expansion.n_max)
    for n in range(1, expansion.n_max + 1):
        t = expansion.tau[n]
        bound = 4.0 * float(d[n]) ** 2 * float(n) ** 11
        if float(t) * float(t) < 0.99 * bound:
            continue
        if t * t >= 4 * int(d[n]) ** 2 * n**11:
            raise CoefficientOverflow(n, t)


def delta_coefficients_pentagonal(n_max: int) -> DeltaExpansion:
    """Independent route: 24 successive sparse multiplications by the
    pentagonal-number series (exact, object-array arithmetic)."""
    terms = pentagonal_series(n_max)
    current = np.zeros(n_max, dtype=object)
    for off, sign in terms:
        current[off] = sign
    base = current.copy()
    for _ in range(23):
        nxt = np.zeros(n_max, dtype=object)
        for off, sign in terms:
            if sign == 1:
                nxt[off:] += current[: n_max - off]
            else:
                nxt[off:] -= current[: n_max - off]
        current = nxt
    tau = [0] + [int(v) for v in current[: n_max]]
    return DeltaExpansion(n_max, tau)


def sigma11_mod(n: int, modulus: int) -> int:
    total = 0
    for d in range(1, n + 1):
        if n % d == 0:
            total += pow(d, 11, modulus)
    return total % modulus


def normalized_tau(expansion: DeltaExpansion, p: int) -> float:
    """a(p) = tau(p) p^(-11/2), in [-2, 2] under the Deligne bound."""
    return expansion[p] / p**5.5


def tau_bias_series(x_max: int, grid: CheckpointGrid,
                    expansion: DeltaExpansion | None = None) -> CheckpointSeries:
    """Sums of tau(p)/p^6 with the (1/2) loglog x prediction.

    Also carries the symmetric-square column sum (a(p)^2 - 1)/sqrt(p),
    predicted slope -1/2, via the Hecke relation tau(p^2) = tau(p)^2 - p^11.
    """
    if expansion is None:
        expansion = delta_coefficients(x_max)
    if expansion.n_max < x_max:
        raise ValueError("expansion shorter than requested range")
    if grid.x_max > x_max:
        raise ValueError("grid exceeds computed range")
    sum_main = KahanSum()
    sum_sym = KahanSum()
    rows_main, rows_sym = [], []
    points = list(grid.points)
    idx = 0

    def flush(limit: int):
        nonlocal idx
        while idx < len(points) and points[idx] <= limit:
            rows_main.append(sum_main.value)
            rows_sym.append(sum_sym.value)
            idx += 1

    for block in iter_prime_blocks(SieveConfig(x_max)):
        for p in block.tolist():
            flush(p - 1)
            a = expansion[p] / p**5.5
            sum_main.add(a / math.sqrt(p))   # tau(p)/p^6
            sum_sym.add((a * a - 1.0) / math.sqrt(p))
    flush(points[-1])

    main = np.array(rows_main)
    sym = np.array(rows_sym)
    prediction = 0.5 * scale_values(grid, "loglog")
    columns = {
        "tau_sum": main,
        "prediction": prediction,
        "residual": main - prediction,
        "sym_square_sum": sym,
        "sym_square_residual": sym + prediction,  # slope -1/2
    }
    return CheckpointSeries(grid, columns, {"x_max": x_max, "slope": 0.5})


_CACHE_MAGIC = b"TAU128\x00\x01"


def write_tau_cache(path, expansion: DeltaExpansion):
    """Little-endian signed 128-bit records with a checksummed header."""
    body = b"".join(
        expansion.tau[n].to_bytes(16, "little", signed=True)
        for n in range(1, expansion.n_max + 1)
    )
    digest = hashlib.sha256(body).digest()
    with open(path, "wb") as fh:
        fh.write(_CACHE_MAGIC)
        fh.write(struct.pack("<Q", expansion.n_max))
        fh.write(digest)
        fh.write(body)


def read_tau_cache(path) -> DeltaExpansion:
    with open(path, "rb") as fh:
        magic = fh.read(len(_CACHE_MAGIC))
        if magic != _CACHE_MAGIC:
            raise ValueError("not a tau cache file")
        (n_max,) = struct.unpack("<Q", fh.read(8))
        digest = fh.read(32)
        body = fh.read()
    if hashlib.sha256(body).digest() != digest:
        raise ValueError("tau cache checksum mismatch")
    if len(body) != 16 * n_max:
        raise ValueError("tau cache truncated")
    tau = [0] + [
        int.from_bytes(body[16 * i : 16 * (i + 1)], "little", signed=True)
        for i in range(n_max)
    ]
    return DeltaExpansion(n_max, tau)
