"""Residue-class bias for monic irreducibles in F_q[T], where the Euler
product convergence at the central point is a theorem, not a hypothesis.

Monic polynomials of degree d are encoded as the base-q integer of their
lower coefficients, so sieving and residue reduction are plain numpy
array work; PolyFq objects are the user-facing representation.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from itertools import product

import numpy as np

from .primes import CheckpointGrid
from .series import CheckpointSeries, KahanSum

ENUMERATION_BUDGET = 1 << 32        # q^max_deg cap for the sieve
UNIT_TABLE_BUDGET = 200_000         # residue count cap for unit tables


def _require_prime(q: int):
    if q < 2 or any(q % d == 0 for d in range(2, math.isqrt(q) + 1)):
        raise ValueError(f"field size {q} must be prime")


@dataclass(frozen=True)
class PolyFq:
    """Dense polynomial over F_q, lowest coefficient first, normalized."""

    q: int
    coeffs: tuple[int, ...]

    def __post_init__(self):
        _require_prime(self.q)
        c = tuple(v % self.q for v in self.coeffs)
        while c and c[-1] == 0:
            c = c[:-1]
        object.__setattr__(self, "coeffs", c)

    @property
    def degree(self) -> int:
        return len(self.coeffs) - 1  # -1 for the zero polynomial

    @property
    def is_zero(self) -> bool:
        return not self.coeffs

    @property
    def is_monic(self) -> bool:
        return bool(self.coeffs) and self.coeffs[-1] == 1

    def _check(self, other: "PolyFq"):
        if self.q != other.q:
            raise ValueError(f"mismatched field sizes {self.q} and {other.q}")

    def __add__(self, other: "PolyFq") -> "PolyFq":
        self._check(other)
        n = max(len(self.coeffs), len(other.coeffs))
        a = self.coeffs + (0,) * (n - len(self.coeffs))
        b = other.coeffs + (0,) * (n - len(other.coeffs))
        return PolyFq(self.q, tuple((x + y) % self.q for x, y in zip(a, b)))

    def __sub__(self, other: "PolyFq") -> "PolyFq":
        self._check(other)
        n = max(len(self.coeffs), len(other.coeffs))
        a = self.coeffs + (0,) * (n - len(self.coeffs))
        b = other.coeffs + (0,) * (n - len(other.coeffs))
        return PolyFq(self.q, tuple((x - y) % self.q for x, y in zip(a, b)))

    def __mul__(self, other: "PolyFq") -> "PolyFq":
        self._check(other)
        if self.is_zero or other.is_zero:
            return PolyFq(self.q, ())
        out = [0] * (len(self.coeffs) + len(other.coeffs) - 1)
        for i, x in enumerate(self.coeffs):
            if x:
                for j, y in enumerate(other.coeffs):
                    out[i + j] = (out[i + j] + x * y) % self.q
        return PolyFq(self.q, tuple(out))

    def __divmod__(self, other: "PolyFq") -> tuple["PolyFq", "PolyFq"]:
        self._check(other)
        if other.is_zero:
            raise ZeroDivisionError("polynomial division by zero")
        q_field = self.q
        rem = list(self.coeffs)
        div = other.coeffs
        inv_lead = pow(div[-1], -1, q_field)
        quot = [0] * max(0, len(rem) - len(div) + 1)
        for k in range(len(rem) - len(div), -1, -1):
            factor = rem[k + len(div) - 1] * inv_lead % q_field
            if factor:
                quot[k] = factor
                for j, y in enumerate(div):
                    rem[k + j] = (rem[k + j] - factor * y) % q_field
        return PolyFq(q_field, tuple(quot)), PolyFq(q_field, tuple(rem))

    def __mod__(self, other: "PolyFq") -> "PolyFq":
        return divmod(self, other)[1]

    def __floordiv__(self, other: "PolyFq") -> "PolyFq":
        return divmod(self, other)[0]

    def powmod(self, exponent: int, modulus: "PolyFq") -> "PolyFq":
        self._check(modulus)
        if exponent < 0:
            raise ValueError("exponent must be nonnegative")
        result = PolyFq(self.q, (1,))
        base = self % modulus
        while exponent:
            if exponent & 1:
                result = (result * base) % modulus
            base = (base * base) % modulus
            exponent >>= 1
        return result

    def gcd(self, other: "PolyFq") -> "PolyFq":
        self._check(other)
        a, b = self, other
        while not b.is_zero:
            a, b = b, a % b
        return a.monic() if not a.is_zero else a

    def monic(self) -> "PolyFq":
        if self.is_zero:
            raise ValueError("zero polynomial has no monic normalization")
        inv = pow(self.coeffs[-1], -1, self.q)
        return PolyFq(self.q, tuple(c * inv % self.q for c in self.coeffs))

    def derivative(self) -> "PolyFq":
        return PolyFq(self.q, tuple(i * c % self.q for i, c in enumerate(self.coeffs))[1:])

    def __str__(self) -> str:
        if self.is_zero:
            return "0"
        parts = []
        for i in range(self.degree, -1, -1):
            c = self.coeffs[i]
            if c == 0:
                continue
            if i == 0:
                parts.append(str(c))
            else:
                var = "T" if i == 1 else f"T^{i}"
                parts.append(var if c == 1 else f"{c}{var}")
        return "+".join(parts)


def poly_from_coeffs(q: int, coeffs) -> PolyFq:
    return PolyFq(q, tuple(coeffs))


def poly_from_code(q: int, code: int, degree: int | None = None) -> PolyFq:
    """Decode a base-q integer (c0 least significant); monic of the given
    degree when degree is not None, otherwise the raw encoded polynomial."""
    coeffs = []
    c = code
    while c:
        coeffs.append(c % q)
        c //= q
    if degree is not None:
        coeffs += [0] * (degree - len(coeffs))
        coeffs.append(1)
    return PolyFq(q, tuple(coeffs))


def poly_to_code(f: PolyFq, drop_leading: bool = False) -> int:
    coeffs = f.coeffs[:-1] if drop_leading else f.coeffs
    return sum(c * f.q**i for i, c in enumerate(coeffs))


def irreducible_count(q: int, d: int) -> int:
    """Number of monic irreducibles of degree d: (1/d) sum mu(e) q^(d/e)."""
    total = 0
    for e in range(1, d + 1):
        if d % e:
            continue
        total += _moebius(e) * q ** (d // e)
    return total // d


def _moebius(n: int) -> int:
    out = 1
    f = 2
    while f * f <= n:
        if n % f == 0:
            n //= f
            if n % f == 0:
                return 0
            out = -out
        f += 1
    if n > 1:
        out = -out
    return out


def _monic_coeff_matrix(q: int, d: int, codes: np.ndarray) -> np.ndarray:
    """Coefficient rows [c0..c_{d-1}, 1] for the given monic codes."""
    powers = q ** np.arange(d, dtype=np.int64)
    lower = (codes[:, None] // powers[None, :]) % q
    out = np.empty((codes.size, d + 1), dtype=np.int64)
    out[:, :d] = lower
    out[:, d] = 1
    return out


@lru_cache(maxsize=8)
def irreducible_code_table(q: int, max_deg: int) -> tuple[np.ndarray, ...]:
    """Codes of monic irreducibles per degree 1..max_deg, by polynomial sieve.

    Every composite monic is P*Q with P its least-degree irreducible
    factor, so marking all products P*Q with deg Q >= deg P covers the
    composites exactly once the degrees are processed in order.
    """
    _require_prime(q)
    if q**max_deg > ENUMERATION_BUDGET:
        raise ValueError(f"q^max_deg = {q}^{max_deg} exceeds the enumeration budget")
    composite = [None] + [np.zeros(q**d, dtype=bool) for d in range(1, max_deg + 1)]
    out: list[np.ndarray] = []
    for d in range(1, max_deg + 1):
        codes_d = np.flatnonzero(~composite[d]).astype(np.int64)
        out.append(codes_d)
        if codes_d.size == 0:
            continue
        p_matrix = _monic_coeff_matrix(q, d, codes_d)
        for m in range(d, max_deg - d + 1):
            _mark_products(q, composite[d + m], p_matrix, d, m)
    return tuple(out)


def _mark_products(q: int, target: np.ndarray, p_matrix: np.ndarray, d: int, m: int):
    """Mark codes of P*Q in target for all rows P and all monic Q of degree m."""
    n_irr = p_matrix.shape[0]
    total_deg = d + m
    powers = q ** np.arange(total_deg, dtype=np.int64)
    chunk = max(1, (1 << 18) // max(n_irr, 1))
    all_q = np.arange(q**m, dtype=np.int64)
    for start in range(0, q**m, chunk):
        q_codes = all_q[start : start + chunk]
        q_matrix = _monic_coeff_matrix(q, m, q_codes)
        conv = np.zeros((n_irr, q_codes.size, total_deg + 1), dtype=np.int64)
        for i in range(d + 1):
            conv[:, :, i : i + m + 1] += p_matrix[:, i, None, None] * q_matrix[None, :, :]
        conv %= q
        codes = conv[:, :, :total_deg].reshape(-1, total_deg) @ powers
        target[codes] = True


def enumerate_irreducibles(q: int, max_deg: int):
    """Yield monic irreducibles in degree order, ascending code within degree."""
    table = irreducible_code_table(q, max_deg)
    for d, codes in enumerate(table, start=1):
        for code in codes.tolist():
            yield poly_from_code(q, code, d)


def _reduction_codes(q: int, modulus: PolyFq, d: int, codes: np.ndarray) -> np.ndarray:
    """Residue code mod `modulus` for each monic code of degree d."""
    deg_m = modulus.degree
    # rows: T^j mod modulus, for j = 0..d
    rows = np.zeros((d + 1, deg_m), dtype=np.int64)
    t_power = PolyFq(q, (1,))
    t_poly = PolyFq(q, (0, 1))
    for j in range(d + 1):
        r = t_power % modulus
        rows[j, : len(r.coeffs)] = r.coeffs
        t_power = t_power * t_poly
    coeffs = _monic_coeff_matrix(q, d, codes)
    residues = coeffs @ rows % q
    powers = q ** np.arange(deg_m, dtype=np.int64)
    return residues @ powers


class UnitClassTable:
    """Brute-force structure of (F_q[T]/M)^x: units, squares, characters."""

    def __init__(self, q: int, modulus: PolyFq):
        _require_prime(q)
        if modulus.q != q:
            raise ValueError("modulus field size mismatch")
        if modulus.degree < 1:
            raise ValueError("modulus must have degree >= 1")
        modulus = modulus.monic()
        size = q**modulus.degree
        if size > UNIT_TABLE_BUDGET:
            raise ValueError(f"residue count {size} exceeds the unit-table budget")
        self.q = q
        self.modulus = modulus
        residues = [poly_from_code(q, code) for code in range(size)]
        self.units = [code for code, f in enumerate(residues)
                      if not f.is_zero and f.gcd(modulus).degree == 0]
        self.phi = len(self.units)
        self._poly = residues
        unit_set = set(self.units)
        self._mul_cache: dict[tuple[int, int], int] = {}
        self.square_set = {self.mul(u, u) for u in self.units}
        ratio = self.phi // len(self.square_set)
        t = ratio.bit_length() - 1
        if 2**t != ratio:
            raise AssertionError("square index is not a power of two")
        self.two_rank = t
        self._unit_set = unit_set
        self._generators: list[tuple[int, int]] | None = None
        self._dlog: dict[int, tuple[int, ...]] | None = None

    def mul(self, a: int, b: int) -> int:
        key = (a, b) if a <= b else (b, a)
        got = self._mul_cache.get(key)
        if got is None:
            got = poly_to_code((self._poly[a] * self._poly[b]) % self.modulus)
            self._mul_cache[key] = got
        return got

    def is_unit(self, code: int) -> bool:
        return code in self._unit_set

    def is_square(self, code: int) -> bool:
        return code in self.square_set

    def poly(self, code: int) -> PolyFq:
        return self._poly[code]

    @property
    def one(self) -> int:
        return 1  # code of the constant polynomial 1

    def _order(self, a: int) -> int:
        n = 1
        x = a
        while x != self.one:
            x = self.mul(x, a)
            n += 1
        return n

    def generators(self) -> list[tuple[int, int]]:
        if self._generators is None:
            self._generators = _abelian_decomposition(
                self.units, self.mul, self.one
            )
            total = math.prod(o for _, o in self._generators) if self._generators else 1
            if total != self.phi:
                raise AssertionError("decomposition does not span the unit group")
        return self._generators

    def dlog(self) -> dict[int, tuple[int, ...]]:
        if self._dlog is None:
            gens = self.generators()
            table: dict[int, tuple[int, ...]] = {}
            for exps in product(*(range(o) for _, o in gens)):
                r = self.one
                for (g, _), e in zip(gens, exps):
                    for _ in range(e):
                        r = self.mul(r, g)
                table[r] = exps
            if len(table) != self.phi:
                raise AssertionError("generators do not give a direct product")
            self._dlog = table
        return self._dlog

    def characters(self) -> list["ResidueCharacter"]:
        gens = self.generators()
        out = []
        for exps in product(*(range(o) for _, o in gens)):
            out.append(ResidueCharacter(self, tuple(exps)))
        return out

    def quadratic_character(self) -> "ResidueCharacter":
        """The character that is +1 on squares, -1 elsewhere (needs t = 1)."""
        if self.two_rank != 1:
            raise ValueError("square-indicator is a character only when t = 1")
        for chi in self.characters():
            if chi.is_principal:
                continue
            if all((chi.value_exponent(u) == 0) == (u in self.square_set)
                   for u in self.units):
                return chi
        raise AssertionError("no quadratic character found")

    def case_formula_report(self) -> dict:
        """Compare computed t with the distinct-irreducible-factor case rule."""
        m = self.modulus
        der = m.derivative()
        squarefree = (not der.is_zero) and m.gcd(der).degree == 0
        report = {"two_rank": self.two_rank, "modulus_squarefree": squarefree}
        if squarefree:
            r = _count_irreducible_factors(m)
            formula = 1 if self.q % 2 == 0 else 2**r
            report["case_formula_value"] = formula
            report["case_formula_matches"] = formula == self.two_rank
        return report


def _count_irreducible_factors(m: PolyFq) -> int:
    count = 0
    rest = m
    for p in enumerate_irreducibles(m.q, m.degree):
        if rest.degree < p.degree:
            break
        if (rest % p).is_zero:
            count += 1
            while (rest % p).is_zero:
                rest = rest // p
    return count


def _abelian_decomposition(elements: list[int], mul, identity: int) -> list[tuple[int, int]]:
    """Generators (element, order) of a direct-product decomposition.

    Picks an element of maximal order (= the exponent), then lifts a
    decomposition of the quotient, correcting each lifted generator into
    a true complement.
    """
    if len(elements) == 1:
        return []

    def order_of(a: int) -> int:
        n, x = 1, a
        while x != identity:
            x = mul(x, a)
            n += 1
        return n

    def power(a: int, e: int) -> int:
        r = identity
        x = a
        while e:
            if e & 1:
                r = mul(r, x)
            x = mul(x, x)
            e >>= 1
        return r

    g = max(elements, key=order_of)
    n = order_of(g)
    if n == len(elements):
        return [(g, n)]

    cyclic = {}
    x = identity
    for k in range(n):
        cyclic[x] = k
        x = mul(x, g)

    canon: dict[int, int] = {}
    for a in elements:
        coset = min(mul(a, s) for s in cyclic)
        canon[a] = coset
    q_elements = sorted(set(canon.values()))
    q_mul = lambda a, b: canon[mul(a, b)]
    sub = _abelian_decomposition(q_elements, q_mul, canon[identity])

    result = [(g, n)]
    for h_bar, m in sub:
        h = h_bar
        j = cyclic[power(h, m)]
        if j % m:
            raise AssertionError("lifting failed: relation not divisible")
        h_fixed = mul(h, power(g, (n - j // m) % n))
        result.append((h_fixed, m))
    return result


class ResidueCharacter:
    """Character of (F_q[T]/M)^x as exponents against the generator set."""

    def __init__(self, table: UnitClassTable, exponents: tuple[int, ...]):
        self.table = table
        gens = table.generators()
        self.exponents = tuple(e % o for e, (_, o) in zip(exponents, gens))
        self.root_order = math.lcm(*(o for _, o in gens)) if gens else 1

    @property
    def is_principal(self) -> bool:
        return all(e == 0 for e in self.exponents)

    @property
    def is_real(self) -> bool:
        return all(2 * e % o == 0
                   for e, (_, o) in zip(self.exponents, self.table.generators()))

    @property
    def frobenius_schur(self) -> int:
        return 1 if self.is_real and not self.is_principal else 0

    @property
    def label(self) -> str:
        return ",".join(str(e) for e in self.exponents)

    def value_exponent(self, code: int) -> int:
        vec = self.table.dlog()[code]
        k = 0
        for e, v, (_, o) in zip(self.exponents, vec, self.table.generators()):
            k += e * v * (self.root_order // o)
        return k % self.root_order

    def value(self, code: int) -> complex:
        if not self.table.is_unit(code):
            return 0j
        k = self.value_exponent(code)
        if 2 * k % self.root_order == 0:
            return complex(1.0 if k == 0 else -1.0)
        return cmath.exp(2j * cmath.pi * k / self.root_order)

    def value_int(self, code: int) -> int:
        """Exact value for real characters: 1, -1, or 0."""
        if not self.table.is_unit(code):
            return 0
        k = self.value_exponent(code)
        if k == 0:
            return 1
        if 2 * k % self.root_order == 0:
            return -1
        raise ValueError("character is not real")

    def value_table(self) -> np.ndarray:
        size = self.table.q**self.table.modulus.degree
        out = np.zeros(size, dtype=np.complex128)
        for u in self.table.units:
            out[u] = self.value(u)
        return out


def unit_class_table(q: int, modulus: PolyFq) -> UnitClassTable:
    return UnitClassTable(q, modulus)


def class_counts_by_degree(table: UnitClassTable, n_max: int) -> np.ndarray:
    """counts[d, code] = number of monic irreducibles of degree d in class code."""
    q = table.q
    size = q**table.modulus.degree
    counts = np.zeros((n_max + 1, size), dtype=np.int64)
    codes_by_degree = irreducible_code_table(q, n_max)
    for d, codes in enumerate(codes_by_degree, start=1):
        if codes.size == 0:
            continue
        residues = _reduction_codes(q, table.modulus, d, codes)
        counts[d] = np.bincount(residues, minlength=size)
    return counts


@dataclass
class LPolynomial:
    """Finite L-function of a nonprincipal character: sum c_d u^d, d < deg M."""

    q: int
    coefficients: list[complex]
    int_coefficients: list[int] | None  # exact values when the character is real
    central_value: complex = 0j
    central_zero_order: int = 0
    central_exact: tuple[Fraction, Fraction] | None = None  # A + B sqrt(1/q)


def character_coefficient_sum(chi: ResidueCharacter, d: int) -> complex:
    """sum of chi(f mod M) over monic f of degree d (zero for d >= deg M)."""
    table = chi.table
    q = table.q
    if d == 0:
        return complex(chi.value(1))
    codes = np.arange(q**d, dtype=np.int64)
    residues = _reduction_codes(q, table.modulus, d, codes)
    values = chi.value_table()
    return complex(values[residues].sum())


def l_polynomial(chi: ResidueCharacter) -> LPolynomial:
    """Exact L-polynomial and central value at u = q^(-1/2).

    For real characters the central value is handled in exact arithmetic
    as A + B/sqrt(q) with rational A, B, so the vanishing order is a
    finite algebraic test, not a numerical one.
    """
    if chi.is_principal:
        raise ValueError("principal character excluded")
    table = chi.table
    q = table.q
    deg_m = table.modulus.degree
    coeffs = [character_coefficient_sum(chi, d) for d in range(deg_m)]

    int_coeffs = None
    if chi.is_real:
        int_coeffs = []
        values = {u: chi.value_int(u) for u in table.units}
        for d in range(deg_m):
            if d == 0:
                int_coeffs.append(1)
                continue
            codes = np.arange(q**d, dtype=np.int64)
            residues = _reduction_codes(q, table.modulus, d, codes)
            total = 0
            for r in np.unique(residues):
                if table.is_unit(int(r)):
                    total += values[int(r)] * int(np.sum(residues == r))
            int_coeffs.append(total)
        for exact, numeric in zip(int_coeffs, coeffs):
            if abs(exact - numeric) > 1e-9:
                raise AssertionError("exact and numeric coefficients disagree")

    out = LPolynomial(q=q, coefficients=coeffs, int_coefficients=int_coeffs)
    u0 = q**-0.5
    out.central_value = sum(c * u0**d for d, c in enumerate(coeffs))

    if int_coeffs is not None:
        order = None
        for k in range(deg_m):
            a = Fraction(0)
            b = Fraction(0)
            for d in range(k, deg_m):
                scaled = int_coeffs[d] * math.perm(d, k)
                term = Fraction(scaled, q ** ((d - k) // 2))
                if (d - k) % 2 == 0:
                    a += term
                else:
                    b += term  # coefficient of q^(-1/2)
            if a != 0 or b != 0:
                order = k
                out.central_exact = (a, b)
                break
        if order is None:
            order = deg_m  # identically vanishing beyond all derivatives
        out.central_zero_order = order
    else:
        out.central_zero_order = 0 if abs(out.central_value) > 1e-8 else -1
        if out.central_zero_order < 0:
            raise ArithmeticError(
                "central value numerically zero for a non-real character"
            )
    return out


def ff_bias_series(q: int, modulus: PolyFq, n_max: int) -> CheckpointSeries:
    """Per-class weighted sums over irreducibles of degree <= n, n = 1..n_max.

    Column S_<A> is the all-classes sum minus Phi(M) times the class-A
    sum, with prediction slope (2^t - 1)/2 for square classes and -1/2
    otherwise, against log n.
    """
    table = unit_class_table(q, modulus)
    counts = class_counts_by_degree(table, n_max)
    phi = table.phi
    t = table.two_rank
    weights = np.array([0.0] + [q ** (-d / 2) for d in range(1, n_max + 1)])

    size = counts.shape[1]
    per_class = np.cumsum(counts * weights[:, None], axis=0)  # includes non-units
    unit_codes = table.units
    all_primes = np.cumsum(counts.sum(axis=1) * weights)
    excluded = all_primes - sum(per_class[:, u] for u in unit_codes)

    grid = CheckpointGrid(tuple(range(1, n_max + 1)))
    log_n = np.log(np.arange(1, n_max + 1, dtype=np.float64))
    columns: dict[str, np.ndarray] = {"all": all_primes[1:], "excluded": excluded[1:]}
    class_names = []
    for u in unit_codes:
        name = str(table.poly(u))
        class_names.append(name)
        columns[f"class_{name}"] = per_class[1:, u]
        combo = all_primes[1:] - phi * per_class[1:, u]
        slope = (2**t - 1) / 2 if table.is_square(u) else -0.5
        columns[f"S_{name}"] = combo
        columns[f"prediction_{name}"] = slope * log_n
        columns[f"residual_{name}"] = combo - slope * log_n

    meta = {
        "q": q,
        "modulus": str(modulus),
        "phi": phi,
        "two_rank": t,
        "scale": "logn",
        "class_columns": [f"class_{n}" for n in class_names],
        "square_classes": [str(table.poly(u)) for u in unit_codes if table.is_square(u)],
    }
    meta.update(table.case_formula_report())
    return CheckpointSeries(grid, columns, meta)


def ff_euler_product(chi: ResidueCharacter, n_max: int) -> CheckpointSeries:
    """Partial products over irreducibles of degree <= n at u = q^(-1/2).

    The target value sqrt(2)^fs * L(1/2, chi) is exact (finite
    L-polynomial), so the convergence check is unconditional.
    """
    table = chi.table
    q = table.q
    lpoly = l_polynomial(chi)
    m = lpoly.central_zero_order
    counts = class_counts_by_degree(table, n_max)
    values = chi.value_table()

    points = []
    rows = []
    log_acc = [KahanSum(), KahanSum()]
    for n in range(1, n_max + 1):
        u_n = q ** (-n / 2)
        for code in np.flatnonzero(counts[n]):
            v = complex(values[code])
            if v == 0:
                continue
            term = -cmath.log(1.0 - v * u_n) * int(counts[n][code])
            log_acc[0].add(term.real)
            log_acc[1].add(term.imag)
        prod = cmath.exp(complex(log_acc[0].value, log_acc[1].value))
        scaled = n**m * prod
        points.append(n)
        rows.append((scaled.real, scaled.imag))

    grid = CheckpointGrid(tuple(points))
    target = math.sqrt(2.0) ** chi.frobenius_schur * lpoly.central_value
    columns = {
        "product_re": np.array([r for r, _ in rows]),
        "product_im": np.array([i for _, i in rows]),
    }
    meta = {
        "q": q,
        "modulus": str(table.modulus),
        "character": chi.label,
        "frobenius_schur": chi.frobenius_schur,
        "central_zero_order": m,
        "target_re": target.real,
        "target_im": target.imag,
        "scale": "logn",
    }
    return CheckpointSeries(grid, columns, meta)
