"""Splitting and class-group bias series for imaginary quadratic fields.

Prime ideals are identified with reduced binary quadratic forms of the
field discriminant; split primes get their form from a square root of D
mod 4p (Tonelli-Shanks plus the parity condition b = D mod 2), inert
primes contribute one principal ideal of norm p^2.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache

import numpy as np

from .dirichlet import CentralZeroError, l_value_from_table, _CENTRAL_ZERO_THRESHOLD
from .primes import CheckpointGrid
from .series import (
    CheckpointSeries,
    KahanSum,
    PrimeClassifier,
    SeriesJob,
    accumulate_series,
    drive_jobs,
    scale_values,
)


def kronecker(a: int, n: int) -> int:
    """Kronecker symbol (a|n), completely multiplicative in n."""
    if n == 0:
        return 1 if a in (1, -1) else 0
    sign = 1
    if n < 0:
        n = -n
        if a < 0:
            sign = -1
    # factor out 2s from n: (a|2) = 0, 1, -1 for a even, a = +-1, a = +-3 mod 8
    t = 0
    while n % 2 == 0:
        n //= 2
        t += 1
    if t:
        if a % 2 == 0:
            return 0
        if t % 2 == 1 and a % 8 in (3, 5):
            sign = -sign
    a %= n
    # Jacobi symbol core by reciprocity
    while a != 0:
        while a % 2 == 0:
            a //= 2
            if n % 8 in (3, 5):
                sign = -sign
        a, n = n, a
        if a % 4 == 3 and n % 4 == 3:
            sign = -sign
        a %= n
    return sign if n == 1 else 0


def sqrt_mod(a: int, p: int) -> int:
    """A square root of a mod prime p (Tonelli-Shanks); a must be a residue."""
    a %= p
    if p == 2 or a == 0:
        return a
    if kronecker(a, p) != 1:
        raise ValueError(f"{a} is not a quadratic residue mod {p}")
    if p % 4 == 3:
        return pow(a, (p + 1) // 4, p)
    # write p - 1 = odd * 2^e
    odd, e = p - 1, 0
    while odd % 2 == 0:
        odd //= 2
        e += 1
    n = 2
    while kronecker(n, p) != -1:
        n += 1
    x = pow(a, (odd + 1) // 2, p)
    b = pow(a, odd, p)
    g = pow(n, odd, p)
    r = e
    while True:
        t, m = b, 0
        while t != 1:
            t = t * t % p
            m += 1
        if m == 0:
            return x
        gs = pow(g, 1 << (r - m - 1), p)
        g = gs * gs % p
        x = x * gs % p
        b = b * g % p
        r = m


@lru_cache(maxsize=None)
def is_fundamental(d: int) -> bool:
    """Fundamental discriminant test (d < 0 or d > 0, d != 1)."""
    if d == 0 or d == 1:
        return False
    if d % 4 == 1:
        return _squarefree(d)
    if d % 4 == 0:
        m = d // 4
        return m % 4 in (2, 3) and _squarefree(m)
    return False


def _squarefree(n: int) -> bool:
    n = abs(n)
    d = 2
    while d * d <= n:
        if n % (d * d) == 0:
            return False
        d += 1
    return True


def discriminant_prime_count(d: int) -> int:
    """Number of distinct primes dividing the discriminant."""
    n = abs(d)
    count = 0
    f = 2
    while f * f <= n:
        if n % f == 0:
            count += 1
            while n % f == 0:
                n //= f
        f += 1 if f == 2 else 2
    if n > 1:
        count += 1
    return count


def splitting_type(d: int, p: int) -> str:
    sym = kronecker(d, p)
    if sym == 1:
        return "split"
    if sym == -1:
        return "inert"
    return "ramified"


@dataclass(frozen=True, order=True)
class BinaryQuadraticForm:
    """a x^2 + b xy + c y^2 with b^2 - 4ac < 0 and a > 0."""

    a: int
    b: int
    c: int

    @property
    def discriminant(self) -> int:
        return self.b * self.b - 4 * self.a * self.c

    @property
    def is_reduced(self) -> bool:
        a, b, c = self.a, self.b, self.c
        return abs(b) <= a <= c and (b >= 0 or (abs(b) != a and a != c))

    def conjugate(self) -> "BinaryQuadraticForm":
        return BinaryQuadraticForm(self.a, -self.b, self.c)

    def represents(self, n: int) -> bool:
        """Brute-force search for ax^2 + bxy + cy^2 = n (n > 0)."""
        a, b, c, d = self.a, self.b, self.c, self.discriminant
        y_max = math.isqrt(4 * a * n // -d)
        for y in range(y_max + 1):
            disc = 4 * a * n + d * y * y
            if disc < 0:
                break
            r = math.isqrt(disc)
            if r * r != disc:
                continue
            for num in (-b * y + r, -b * y - r):
                if num % (2 * a) == 0:
                    return True
        return False


def reduce_form(f: BinaryQuadraticForm) -> BinaryQuadraticForm:
    """Canonical reduced representative of the form's equivalence class."""
    if f.discriminant >= 0:
        raise ValueError("only negative discriminants are supported")
    if f.a <= 0:
        raise ValueError("leading coefficient must be positive")
    a, b, c = f.a, f.b, f.c
    while True:
        if a > c:
            a, b, c = c, -b, a
            continue
        if b > a or b <= -a:
            # shift b into (-a, a]
            r = (a - b) // (2 * a)
            b2 = b + 2 * r * a
            c = a * r * r + b * r + c
            b = b2
            continue
        break
    if (b < 0 and (-b == a or a == c)):
        b = -b
    return BinaryQuadraticForm(a, b, c)


def principal_form(d: int) -> BinaryQuadraticForm:
    k = d & 1
    return BinaryQuadraticForm(1, k, (k * k - d) // 4)


def class_group(d: int) -> tuple[list[BinaryQuadraticForm], int]:
    """All reduced forms of discriminant d < 0 and the class number."""
    if d >= 0 or not is_fundamental(d):
        raise ValueError("d must be a negative fundamental discriminant")
    forms = []
    b = d & 1
    while b * b <= -d // 3:
        m = (b * b - d) // 4
        a = max(b, 1)
        while a * a <= m:
            if m % a == 0:
                c = m // a
                forms.append(BinaryQuadraticForm(a, b, c))
                if 0 < b < a < c:
                    forms.append(BinaryQuadraticForm(a, -b, c))
            a += 1
        b += 2
    forms.sort()
    return forms, len(forms)


def ambiguous_form_count(d: int) -> int:
    """Number of order-<=2 classes: reduced forms with b=0, a=b, or a=c."""
    forms, _ = class_group(d)
    return sum(1 for f in forms if f.b == 0 or f.a == f.b or f.a == f.c)


def prime_ideal_classes(d: int, p: int) -> list[tuple[BinaryQuadraticForm, int]]:
    """(reduced class, norm) for each prime ideal above p in Q(sqrt(d))."""
    if d >= 0 or not is_fundamental(d):
        raise ValueError("d must be a negative fundamental discriminant")
    kind = splitting_type(d, p)
    if kind == "inert":
        return [(principal_form(d), p * p)]
    if kind == "ramified":
        for b in range(d & 1, 2 * p, 2):  # b must match the parity of d
            if (b * b - d) % (4 * p) == 0:
                form = reduce_form(BinaryQuadraticForm(p, b, (b * b - d) // (4 * p)))
                return [(form, p)]
        raise AssertionError(f"no ramified form found for p={p}, d={d}")
    b = _sqrt_d_mod_4p(d, p)
    c = (b * b - d) // (4 * p)
    f1 = reduce_form(BinaryQuadraticForm(p, b, c))
    f2 = reduce_form(BinaryQuadraticForm(p, -b, c))
    return [(f1, p), (f2, p)]


def _sqrt_d_mod_4p(d: int, p: int) -> int:
    """b with b^2 = d (mod 4p) and b = d (mod 2), for split p."""
    if p == 2:
        # split 2 means d = 1 (mod 8); b = 1 works
        return 1
    r = sqrt_mod(d % p, p)
    if (r - d) % 2 != 0:
        r = p - r
    if (r * r - d) % (4 * p) != 0:
        raise AssertionError(f"parity lift failed for p={p}, d={d}")
    return r


def _quadratic_character_table(d: int) -> np.ndarray:
    """kronecker(d, n) for n = 0..|d|-1 (the real character mod |d|)."""
    return np.array([kronecker(d, n) for n in range(abs(d))], dtype=np.float64)


def assert_no_central_zero_quadratic(d: int) -> complex:
    """Central L-value of the discriminant character; error if it vanishes."""
    table = _quadratic_character_table(d).astype(np.complex128)
    value = l_value_from_table(abs(d), table)
    if abs(value) <= _CENTRAL_ZERO_THRESHOLD:
        raise CentralZeroError(f"L(1/2, chi_{d}) numerically zero")
    return value


def splitting_classifier(d: int) -> PrimeClassifier:
    """Labels split / inert / ramified by the Kronecker symbol (d|p)."""
    table = _quadratic_character_table(d)
    label_of = np.where(table == 1, 0, np.where(table == -1, 1, 2)).astype(np.int64)
    q = abs(d)

    def classify(p: int) -> int:
        return int(label_of[p % q])

    def classify_block(primes: np.ndarray) -> np.ndarray:
        return label_of[primes % q]

    return PrimeClassifier(
        label_count=3,
        labels=("split", "inert", "ramified"),
        expected_density=(Fraction(1, 2), Fraction(1, 2), Fraction(0)),
        classify=classify,
        classify_block=classify_block,
    )


def splitting_bias_series(d: int, grid: CheckpointGrid, primes) -> CheckpointSeries:
    """Nonsplit-minus-split weighted sums with the (1/2) loglog x prediction."""
    if d >= 0 or not is_fundamental(d):
        raise ValueError("d must be a negative fundamental discriminant")
    assert_no_central_zero_quadratic(d)
    series = accumulate_series(splitting_classifier(d), 0.5, grid, primes)
    nonsplit = series.column("class_inert") + series.column("class_ramified")
    series = series.with_column("nonsplit", nonsplit)
    series = series.with_column("split", series.column("class_split"))
    series = series.with_column("bias", nonsplit - series.column("class_split"))
    prediction = 0.5 * scale_values(grid, "loglog")
    series = series.with_column("prediction", prediction)
    series = series.with_column("residual", series.column("bias") - prediction)
    series.metadata.update(discriminant=d, slope=0.5)
    return series


class IdealClassJob(SeriesJob):
    """Streams weighted ideal sums split by principal / nonprincipal class.

    Split and ramified primes enter at norm p with their form class;
    inert primes enter the principal column once p^2 <= x, so snapshots
    take a pending list of inert primes into account.
    """

    def __init__(self, d: int):
        self.d = d
        self.forms, self.h = class_group(d)
        self.principal = principal_form(d)
        self.table = _quadratic_character_table(d)
        self.q = abs(d)
        self.principal_sum = KahanSum()
        self.nonprincipal_sum = KahanSum()
        self.principal_count = KahanSum()
        self.nonprincipal_count = KahanSum()
        self.pending_inert: list[int] = []  # ascending primes, p^2 not yet counted

    def _flush(self, x: int):
        keep = []
        for p in self.pending_inert:
            if p * p <= x:
                self.principal_sum.add(1.0 / p)
                self.principal_count.add(1.0)
            else:
                keep.append(p)
        self.pending_inert = keep

    def _add_ideal(self, form: BinaryQuadraticForm, weight: float):
        if form == self.principal:
            self.principal_sum.add(weight)
            self.principal_count.add(1.0)
        else:
            self.nonprincipal_sum.add(weight)
            self.nonprincipal_count.add(1.0)

    def feed(self, primes: np.ndarray):
        sym = self.table[primes % self.q]
        for p, s in zip(primes.tolist(), sym.tolist()):
            if s == -1.0:
                self.pending_inert.append(p)
                continue
            w = 1.0 / math.sqrt(p)
            for form, _ in prime_ideal_classes(self.d, p):
                self._add_ideal(form, w)

    def snapshot(self, x: int) -> dict[str, float]:
        self._flush(x)
        return {
            "principal": self.principal_sum.value,
            "nonprincipal": self.nonprincipal_sum.value,
            "principal_count": self.principal_count.value,
            "nonprincipal_count": self.nonprincipal_count.value,
        }

    def metadata(self) -> dict:
        return {"discriminant": self.d, "class_number": self.h, "s": 0.5}

    def state(self) -> dict:
        return {
            "principal_sum": self.principal_sum.state(),
            "nonprincipal_sum": self.nonprincipal_sum.state(),
            "principal_count": self.principal_count.state(),
            "nonprincipal_count": self.nonprincipal_count.state(),
            "pending_inert": list(self.pending_inert),
        }

    def load_state(self, state: dict):
        self.principal_sum = KahanSum.from_state(state["principal_sum"])
        self.nonprincipal_sum = KahanSum.from_state(state["nonprincipal_sum"])
        self.principal_count = KahanSum.from_state(state["principal_count"])
        self.nonprincipal_count = KahanSum.from_state(state["nonprincipal_count"])
        self.pending_inert = list(state["pending_inert"])


def principal_bias_series(d: int, grid: CheckpointGrid, primes) -> CheckpointSeries:
    """Nonprincipal vs principal ideal sums with the genus-theory slope.

    Prediction slope is (2^(t-1) - 1)/2 with t the number of primes
    dividing d; inert ideals (norm p^2) are included once p <= sqrt(x).
    """
    if d >= 0 or not is_fundamental(d):
        raise ValueError("d must be a negative fundamental discriminant")
    assert_no_central_zero_quadratic(d)
    job = IdealClassJob(d)
    series = drive_jobs([job], grid, primes)[0]
    h = job.h
    t = discriminant_prime_count(d)
    slope = (2 ** (t - 1) - 1) / 2
    combo = series.column("nonprincipal") - (h - 1) * series.column("principal")
    series = series.with_column("bias", combo)
    prediction = slope * scale_values(grid, "loglog")
    series = series.with_column("prediction", prediction)
    series = series.with_column("residual", combo - prediction)
    series.metadata.update(slope=slope, two_torsion=ambiguous_form_count(d))
    return series
