"""Characters of (Z/qZ)^x, central L-values, and Euler products on Re(s)=1/2.

Units mod q are stored by discrete log over a fixed generator set (CRT
over prime-power factors, smallest primitive root per odd prime power,
{-1, 5} for 2^k with k >= 3), so characters are exponent vectors and
products of character values are exact integer arithmetic on root-of-
unity indices.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass, field
from functools import lru_cache
from itertools import product

import numpy as np

from .primes import CheckpointGrid
from .series import CheckpointSeries, KahanSum, SeriesJob, drive_jobs, scale_values


class CentralZeroError(ArithmeticError):
    """Raised when an L-value at the central point is numerically zero.

    The slope formulas assume nonvanishing central values; when the
    check fails the vanishing order is unknown and we refuse to guess.
    """


def factorize(n: int) -> list[tuple[int, int]]:
    out = []
    d = 2
    while d * d <= n:
        if n % d == 0:
            e = 0
            while n % d == 0:
                n //= d
                e += 1
            out.append((d, e))
        d += 1 if d == 2 else 2
    if n > 1:
        out.append((n, 1))
    return out


def _primitive_root(p: int, k: int) -> int:
    """Smallest primitive root mod p^k for odd prime p."""
    phi_p = p - 1
    prime_divs = [f for f, _ in factorize(phi_p)]
    g = 2
    while True:
        if all(pow(g, phi_p // f, p) != 1 for f in prime_divs):
            break
        g += 1
    if k == 1:
        return g
    # g or g + p generates mod p^2 and hence mod every p^k
    if pow(g, phi_p, p * p) == 1:
        g += p
    return g


@dataclass
class UnitGroupStructure:
    """(Z/qZ)^x as a product of cyclic groups; dlog table built on demand."""

    q: int
    generators: tuple[tuple[int, int], ...]  # (residue, order)
    phi: int
    _dlog: dict[int, tuple[int, ...]] | None = field(default=None, repr=False)

    @property
    def dlog(self) -> dict[int, tuple[int, ...]]:
        if self._dlog is None:
            table: dict[int, tuple[int, ...]] = {}
            orders = [o for _, o in self.generators]
            for exps in product(*(range(o) for o in orders)):
                r = 1
                for (g, _), e in zip(self.generators, exps):
                    r = r * pow(g, e, self.q) % self.q
                table[r] = exps
            if len(table) != self.phi:
                raise AssertionError("generator set does not give a direct product")
            self._dlog = table
        return self._dlog

    def exponent_vector(self, a: int) -> tuple[int, ...]:
        a %= self.q
        if a not in self.dlog:
            raise ValueError(f"{a} is not a unit mod {self.q}")
        return self.dlog[a]


@lru_cache(maxsize=None)
def unit_group(q: int) -> UnitGroupStructure:
    """Deterministic generator set and discrete logs for (Z/qZ)^x."""
    if q < 3:
        raise ValueError("q must be >= 3")
    gens: list[tuple[int, int]] = []
    for p, k in factorize(q):
        pk = p**k
        rest = q // pk
        # lift local generator g mod p^k to a residue mod q that is 1 elsewhere
        def lift(g_local: int) -> int:
            if rest == 1:
                return g_local % q
            inv = pow(rest, -1, pk)
            return (1 + rest * ((g_local - 1) * inv % pk)) % q

        if p == 2:
            if k == 2:
                gens.append((lift(3), 2))
            elif k >= 3:
                gens.append((lift(2**k - 1), 2))        # image of -1
                gens.append((lift(5), 2 ** (k - 2)))
            # k == 1 contributes the trivial group
        else:
            g = _primitive_root(p, k)
            gens.append((lift(g), (p - 1) * p ** (k - 1)))

    phi = math.prod(order for _, order in gens) if gens else 1
    return UnitGroupStructure(q=q, generators=tuple(gens), phi=phi)


@dataclass
class DirichletCharacter:
    """Character mod q given by exponents against the unit-group generators.

    Values live in the cyclotomic field of order lcm(generator orders);
    value_exponent returns the exact index of the root of unity.
    """

    q: int
    exponents: tuple[int, ...]
    group: UnitGroupStructure = field(repr=False)
    central_zero_order: int | None = None  # set by central_l_value

    def __post_init__(self):
        orders = [o for _, o in self.group.generators]
        object.__setattr__(self, "exponents",
                           tuple(e % o for e, o in zip(self.exponents, orders)))

    @property
    def label(self) -> str:
        return f"{self.q}:" + ",".join(str(e) for e in self.exponents)

    @property
    def is_principal(self) -> bool:
        return all(e == 0 for e in self.exponents)

    @property
    def is_real(self) -> bool:
        return all((2 * e) % o == 0
                   for e, (_, o) in zip(self.exponents, self.group.generators))

    @property
    def frobenius_schur(self) -> int:
        """1 for real nonprincipal characters, else 0 (the sqrt-2 exponent)."""
        return 1 if self.is_real and not self.is_principal else 0

    @property
    def root_order(self) -> int:
        return math.lcm(*(o for _, o in self.group.generators)) if self.group.generators else 1

    def value_exponent(self, a: int) -> int:
        """k with chi(a) = exp(2 pi i k / root_order); a must be a unit."""
        vec = self.group.exponent_vector(a)
        order = self.root_order
        k = 0
        for e, v, (_, o) in zip(self.exponents, vec, self.group.generators):
            k += e * v * (order // o)
        return k % order

    def __call__(self, n: int) -> complex:
        n %= self.q
        if math.gcd(n, self.q) != 1:
            return 0j
        order = self.root_order
        k = self.value_exponent(n)
        if 2 * k % order == 0:
            return complex(1.0 if k == 0 else -1.0)
        return cmath.exp(2j * cmath.pi * k / order)

    def value_table(self) -> np.ndarray:
        """chi(r) for r = 0..q-1 as complex128 (0 on non-units)."""
        table = np.zeros(self.q, dtype=np.complex128)
        for r in range(self.q):
            table[r] = self(r)
        return table

    def conj_label_exponents(self) -> tuple[int, ...]:
        return tuple(-e % o for e, (_, o) in zip(self.exponents, self.group.generators))


def characters(q: int) -> list[DirichletCharacter]:
    """All phi(q) characters mod q, ordered by exponent vector."""
    group = unit_group(q)
    orders = [o for _, o in group.generators]
    return [DirichletCharacter(q, exps, group)
            for exps in product(*(range(o) for o in orders))]


def character_from_exponents(q: int, exponents) -> DirichletCharacter:
    return DirichletCharacter(q, tuple(exponents), unit_group(q))


def conductor(chi: DirichletCharacter) -> int:
    """Smallest f | q such that chi factors through (Z/fZ)^x."""
    q = chi.q
    units = [a for a in range(1, q) if math.gcd(a, q) == 1]
    values = {a: chi.value_exponent(a) for a in units}
    for f in sorted(d for d in range(1, q + 1) if q % d == 0):
        classes: dict[int, int] = {}
        ok = True
        for a in units:
            r = a % f
            if r in classes and classes[r] != values[a]:
                ok = False
                break
            classes.setdefault(r, values[a])
        if ok:
            return f
    return q


def is_quadratic_residue(a: int, q: int) -> bool:
    """True iff a is a square in (Z/qZ)^x, by exponent parity."""
    if math.gcd(a, q) != 1:
        raise ValueError(f"gcd({a}, {q}) != 1")
    group = unit_group(q)
    vec = group.exponent_vector(a % q)
    return all(v % 2 == 0 for v, (_, o) in zip(vec, group.generators) if o % 2 == 0)


def two_rank(q: int) -> int:
    """dim_F2 of (Z/qZ)^x modulo squares.

    Computed from the prime factorization case split and cross-checked
    against the count of even-order generators; the two must agree.
    """
    if q < 3:
        raise ValueError("q must be >= 3")
    distinct = len(factorize(q))
    if q % 4 == 2:
        t = distinct - 1
    elif q % 8 == 0:
        t = distinct + 1
    else:  # q odd or 4 || q
        t = distinct
    direct = sum(1 for _, o in unit_group(q).generators if o % 2 == 0)
    if t != direct:
        raise AssertionError(f"two_rank formula disagrees with unit group at q={q}")
    return t


@dataclass(frozen=True)
class SlopePrediction:
    """Predicted loglog coefficient split into its two contributions."""

    character_term: float   # from the real-character count
    central_term: float     # from central vanishing orders (0 in scope)

    @property
    def total(self) -> float:
        return self.character_term + self.central_term


def class_bias_slope(q: int, a: int, assume_nonvanishing: bool = False) -> SlopePrediction:
    """Slope of all-primes minus phi(q)-weighted class-a sums.

    (2^t - 1)/2 when a is a square mod q, otherwise -1/2.  Unless
    assume_nonvanishing is set, every central L-value mod q is checked
    first and a CentralZeroError propagates if any is below threshold.
    """
    if math.gcd(a, q) != 1:
        raise ValueError(f"gcd({a}, {q}) != 1")
    if not assume_nonvanishing:
        assert_no_central_zero(q)
    t = two_rank(q)
    term = (2**t - 1) / 2 if is_quadratic_residue(a, q) else -0.5
    return SlopePrediction(character_term=term, central_term=0.0)


def pair_bias_slope(q: int, a: int, b: int, assume_nonvanishing: bool = False) -> float:
    """Slope of pi_{1/2}(x;q,b) - pi_{1/2}(x;q,a): 2^(t-1)/phi(q) or 0.

    Nonzero only when exactly one of a, b is a square mod q; a square
    and b non-square is the positive orientation.
    """
    if not assume_nonvanishing:
        assert_no_central_zero(q)
    ra, rb = is_quadratic_residue(a, q), is_quadratic_residue(b, q)
    if ra == rb:
        return 0.0
    t = two_rank(q)
    value = 2 ** (t - 1) / unit_group(q).phi
    return value if ra and not rb else -value


_BERNOULLI = (
    (2, 1, 6), (4, -1, 30), (6, 1, 42), (8, -1, 30),
    (10, 5, 66), (12, -691, 2730), (14, 7, 6), (16, -3617, 510),
)

_EM_CUTOFF = 50


def hurwitz_zeta(s: float, a: float) -> float:
    """Euler-Maclaurin Hurwitz zeta for s in (0,1), a in (0,1].

    Truncation at N=50 with Bernoulli corrections through order 16
    leaves a remainder far below 1e-12 on this domain.
    """
    if not 0.0 < s < 1.0:
        raise ValueError("s must lie in (0, 1)")
    if not 0.0 < a <= 1.0:
        raise ValueError("a must lie in (0, 1]")
    n = _EM_CUTOFF
    head = math.fsum((k + a) ** (-s) for k in range(n))
    base = n + a
    total = head + base ** (1.0 - s) / (s - 1.0) + 0.5 * base ** (-s)
    poch = s
    power = base ** (-s - 1.0)
    for order, num, den in _BERNOULLI:
        total += (num / den) / math.factorial(order) * poch * power
        poch *= (s + order - 1.0) * (s + order)
        power /= base * base
    return total


def l_value_from_table(q: int, values: np.ndarray, s: float = 0.5) -> complex:
    """L(s, chi) = q^-s sum_a chi(a) zeta(s, a/q) for a value table mod q."""
    total = 0j
    for a in range(1, q + 1):
        v = values[a % q]
        if v != 0:
            total += v * hurwitz_zeta(s, a / q)
    return q ** (-s) * total


_CENTRAL_ZERO_THRESHOLD = 1e-8


def central_l_value(chi: DirichletCharacter) -> complex:
    """L(1/2, chi) to ~1e-12; records vanishing order 0 on the character.

    Raises CentralZeroError when |L| <= 1e-8, since then the vanishing
    order cannot be asserted to be zero.
    """
    if chi.is_principal:
        raise ValueError("principal character has no central L-value here")
    value = l_value_from_table(chi.q, chi.value_table())
    if abs(value) <= _CENTRAL_ZERO_THRESHOLD:
        raise CentralZeroError(
            f"L(1/2, chi) numerically zero for {chi.label}: |value|={abs(value):.2e}"
        )
    chi.central_zero_order = 0
    return value


@lru_cache(maxsize=None)
def assert_no_central_zero(q: int) -> None:
    for chi in characters(q):
        if not chi.is_principal:
            central_l_value(chi)


class CharacterSumJob(SeriesJob):
    """Streams sum of chi(p) p^(-1/2) plus the log-Euler-factor sums.

    Columns (re/im pairs): the k=1 character sum, the k=2 half-weight
    sum, the k>=3 tail summed as a truncated power series, and the
    partial Euler product reconstructed from exact -log(1 - chi(p)/sqrt(p)).
    """

    K_MAX = 64

    def __init__(self, chi: DirichletCharacter):
        self.chi = chi
        self.table = chi.value_table()
        self.sum1 = [KahanSum(), KahanSum()]
        self.sum2 = [KahanSum(), KahanSum()]
        self.tail = [KahanSum(), KahanSum()]
        self.logprod = [KahanSum(), KahanSum()]

    @staticmethod
    def _add(acc, values: np.ndarray):
        acc[0].add_block(values.real)
        acc[1].add_block(values.imag)

    def feed(self, primes: np.ndarray):
        vals = self.table[primes % self.chi.q]
        keep = vals != 0
        if not keep.any():
            return
        vals = vals[keep]
        z = vals / np.sqrt(primes[keep].astype(np.float64))
        self._add(self.sum1, z)
        self._add(self.sum2, 0.5 * z * z)
        self._add(self.logprod, -np.log(1.0 - z))
        acc = np.zeros_like(z)
        zk = z * z
        for k in range(3, self.K_MAX + 1):
            zk = zk * z
            acc += zk / k
        self._add(self.tail, acc)

    def snapshot(self, x: int) -> dict[str, float]:
        log_re = self.logprod[0].value
        log_im = self.logprod[1].value
        prod = cmath.exp(complex(log_re, log_im))
        return {
            "chi_sum_re": self.sum1[0].value,
            "chi_sum_im": self.sum1[1].value,
            "log_k2_re": self.sum2[0].value,
            "log_k2_im": self.sum2[1].value,
            "log_tail_re": self.tail[0].value,
            "log_tail_im": self.tail[1].value,
            "product_re": prod.real,
            "product_im": prod.imag,
        }

    def metadata(self) -> dict:
        return {"character": self.chi.label, "s": 0.5}

    def state(self) -> dict:
        return {
            "sum1": [a.state() for a in self.sum1],
            "sum2": [a.state() for a in self.sum2],
            "tail": [a.state() for a in self.tail],
            "logprod": [a.state() for a in self.logprod],
        }

    def load_state(self, state: dict):
        for name in ("sum1", "sum2", "tail", "logprod"):
            accs = [KahanSum.from_state(d) for d in state[name]]
            setattr(self, name, accs)


def partial_euler_product(chi: DirichletCharacter, grid: CheckpointGrid,
                          primes) -> CheckpointSeries:
    """Partial products of (1 - chi(p)/sqrt(p))^-1 at the checkpoints.

    Computed in log space and exponentiated; metadata carries the
    expected limit sqrt(2)^fs * L(1/2, chi).
    """
    if chi.is_principal:
        raise ValueError("principal character not allowed")
    lval = central_l_value(chi)
    series = drive_jobs([CharacterSumJob(chi)], grid, primes)[0]
    target = math.sqrt(2.0) ** chi.frobenius_schur * lval
    series.metadata.update(
        target_re=target.real, target_im=target.imag,
        frobenius_schur=chi.frobenius_schur,
        central_l_re=lval.real, central_l_im=lval.imag,
        central_zero_order=chi.central_zero_order,
    )
    return series


def drh_residual(chi: DirichletCharacter, grid: CheckpointGrid, primes) -> CheckpointSeries:
    """sum_{p<=x} chi(p)/sqrt(p) + (fs/2 + m) loglog x, expected bounded."""
    series = partial_euler_product(chi, grid, primes)
    slope = chi.frobenius_schur / 2.0 + chi.central_zero_order
    shift = slope * scale_values(grid, "loglog")
    out = series.with_column("residual_re", series.column("chi_sum_re") + shift)
    out = out.with_column("residual_im", series.column("chi_sum_im"))
    out.metadata["slope"] = slope
    return out
