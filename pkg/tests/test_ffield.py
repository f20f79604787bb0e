import math
from fractions import Fraction

import numpy as np
import pytest

from chebybias.ffield import (
    PolyFq,
    character_coefficient_sum,
    enumerate_irreducibles,
    ff_bias_series,
    ff_euler_product,
    irreducible_count,
    l_polynomial,
    poly_from_code,
    poly_to_code,
    unit_class_table,
)


def f(q, *coeffs):
    return PolyFq(q, tuple(coeffs))


# ------------------------------------------------------------------ arithmetic


def test_frobenius_square():
    assert (f(2, 1, 1) * f(2, 1, 1)) == f(2, 1, 0, 1)  # (T+1)^2 = T^2+1


def test_hand_division():
    assert f(2, 1, 1, 0, 1) % f(2, 0, 0, 1) == f(2, 1, 1)  # T^3+T+1 mod T^2


def test_powmod_example():
    assert f(2, 0, 1).powmod(2, f(2, 1, 1, 1)) == f(2, 1, 1)


def test_degree_additivity():
    import random

    rng = random.Random(3)
    for _ in range(200):
        q = rng.choice([2, 3, 5, 7])
        a = PolyFq(q, tuple(rng.randrange(q) for _ in range(rng.randrange(1, 6))))
        b = PolyFq(q, tuple(rng.randrange(q) for _ in range(rng.randrange(1, 6))))
        if a.is_zero or b.is_zero:
            continue
        assert (a * b).degree == a.degree + b.degree


def test_divmod_roundtrip():
    import random

    rng = random.Random(4)
    for _ in range(200):
        q = rng.choice([2, 3, 5])
        a = PolyFq(q, tuple(rng.randrange(q) for _ in range(rng.randrange(0, 8))))
        b = PolyFq(q, tuple(rng.randrange(q) for _ in range(rng.randrange(1, 5))))
        if b.is_zero:
            continue
        quot, rem = divmod(a, b)
        assert quot * b + rem == a
        assert rem.is_zero or rem.degree < b.degree


def test_field_size_mismatch():
    with pytest.raises(ValueError):
        f(2, 1, 1) * f(3, 1, 1)


def test_field_size_must_be_prime():
    with pytest.raises(ValueError):
        PolyFq(4, (1,))


def test_code_roundtrip():
    for q in (2, 3, 5):
        for code in range(q**3):
            p = poly_from_code(q, code, 3)
            assert p.is_monic and p.degree == 3
            assert poly_to_code(p, drop_leading=True) == code


# ----------------------------------------------------------------- irreducibles


def test_degree_one_and_three_over_f2():
    polys = list(enumerate_irreducibles(2, 3))
    names = [str(p) for p in polys]
    assert names[:2] == ["T", "T+1"]
    assert names[2:] == ["T^2+T+1", "T^3+T+1", "T^3+T^2+1"]
    assert irreducible_count(2, 3) == 2


def test_moebius_counts_match_sieve():
    for q, max_deg in ((2, 12), (3, 8), (5, 5), (7, 4)):
        polys = list(enumerate_irreducibles(q, max_deg))
        by_deg = {}
        for p in polys:
            by_deg[p.degree] = by_deg.get(p.degree, 0) + 1
        for d in range(1, max_deg + 1):
            assert by_deg.get(d, 0) == irreducible_count(q, d)


def test_q3_degree4_count():
    assert irreducible_count(3, 4) == 18 == (3**4 - 3**2) // 4


def test_sieve_matches_gcd_irreducibility():
    # independent oracle: f irreducible iff no irreducible of degree <= deg/2
    # divides it (checked by direct trial division over all lower-degree monics)
    q, max_deg = 3, 6

    def divides(a, b):
        return (b % a).is_zero

    sieved = {(p.degree, poly_to_code(p, drop_leading=True))
              for p in enumerate_irreducibles(q, max_deg)}
    monics = {d: [poly_from_code(q, c, d) for c in range(q**d)]
              for d in range(1, max_deg + 1)}
    for d in range(1, max_deg + 1):
        for cand in monics[d]:
            trial = True
            for e in range(1, d // 2 + 1):
                if any(divides(m, cand) for m in monics[e]):
                    trial = False
                    break
            assert trial == ((d, poly_to_code(cand, drop_leading=True)) in sieved)


def test_budget_guard():
    with pytest.raises(ValueError):
        list(enumerate_irreducibles(3, 50))


def test_prime_polynomial_density():
    # per-class counts approach q^n / (n Phi) (ratio -> 1/Phi across classes)
    series = ff_bias_series(3, f(3, 1, 1), 10)  # M = T+1
    meta = series.metadata
    counts = {}
    tab = unit_class_table(3, f(3, 1, 1))
    from chebybias.ffield import class_counts_by_degree

    counts = class_counts_by_degree(tab, 10)
    n = 10
    for u in tab.units:
        expect = 3**n / (n * tab.phi)
        assert abs(counts[n][u] / expect - 1.0) < 0.05


# ------------------------------------------------------------------ unit table


def test_unit_table_f2_t_squared():
    tab = unit_class_table(2, f(2, 0, 0, 1))
    assert [str(tab.poly(u)) for u in tab.units] == ["1", "T+1"]
    assert tab.phi == 2
    assert tab.square_set == {1}
    assert tab.two_rank == 1


def test_unit_table_f3_t():
    tab = unit_class_table(3, f(3, 0, 1))
    assert [str(tab.poly(u)) for u in tab.units] == ["1", "2"]
    assert tab.phi == 2 and tab.two_rank == 1


def test_unit_table_f2_t():
    tab = unit_class_table(2, f(2, 0, 1))
    assert tab.phi == 1 and tab.two_rank == 0


def test_unit_table_budget():
    with pytest.raises(ValueError):
        unit_class_table(7, PolyFq(7, (1,) * 8))


def test_unit_group_structure_various_moduli():
    # direct product decomposition reproduces the group exactly
    cases = [(2, (0, 0, 0, 1)), (2, (1, 1, 1)), (3, (0, 0, 1)), (5, (0, 1)),
             (2, (0, 1, 1)), (3, (2, 1, 1))]
    for q, coeffs in cases:
        tab = unit_class_table(q, PolyFq(q, coeffs))
        gens = tab.generators()
        assert math.prod(o for _, o in gens) == tab.phi if gens else tab.phi == 1
        assert len(tab.dlog()) == tab.phi
        # squares characterized by dlog parity on even-order factors
        for u in tab.units:
            vec = tab.dlog()[u]
            parity_square = all(v % 2 == 0 for v, (_, o) in zip(vec, gens) if o % 2 == 0)
            assert parity_square == (u in tab.square_set)


def test_characters_orthogonal():
    tab = unit_class_table(3, f(3, 1, 0, 1))  # M = T^2+1 over F_3
    chars = tab.characters()
    assert len(chars) == tab.phi
    for c1 in chars:
        for c2 in chars:
            total = sum(c1.value(u) * c2.value(u).conjugate() for u in tab.units)
            expect = tab.phi if c1.exponents == c2.exponents else 0.0
            assert abs(total - expect) < 1e-9


# ---------------------------------------------------------------- l-polynomial


def test_l_polynomial_q3_t():
    tab = unit_class_table(3, f(3, 0, 1))
    chi = tab.quadratic_character()
    lp = l_polynomial(chi)
    assert lp.int_coefficients == [1]
    assert lp.central_value == 1.0
    assert lp.central_zero_order == 0


def test_l_polynomial_q2_t_squared():
    tab = unit_class_table(2, f(2, 0, 0, 1))
    chi = tab.quadratic_character()
    lp = l_polynomial(chi)
    assert lp.int_coefficients == [1, -1]  # L(u) = 1 - u
    assert abs(lp.central_value - (1 - 2**-0.5)) < 1e-15
    assert lp.central_zero_order == 0
    assert lp.central_exact == (Fraction(1), Fraction(-1))


def test_l_polynomial_rejects_principal():
    tab = unit_class_table(3, f(3, 0, 1))
    principal = [c for c in tab.characters() if c.is_principal][0]
    with pytest.raises(ValueError):
        l_polynomial(principal)


def test_coefficient_sums_vanish_beyond_modulus_degree():
    for q, coeffs in ((2, (0, 0, 1)), (3, (0, 1)), (2, (1, 1, 1)), (3, (1, 0, 1))):
        tab = unit_class_table(q, PolyFq(q, coeffs))
        for chi in tab.characters():
            if chi.is_principal:
                continue
            for d in range(tab.modulus.degree, tab.modulus.degree + 3):
                assert abs(character_coefficient_sum(chi, d)) < 1e-9


# --------------------------------------------------------------------- series


def test_ff_bias_hand_values_q2_t_squared():
    series = ff_bias_series(2, f(2, 0, 0, 1), 3)
    c1 = series.column("class_1")
    ct = series.column("class_T+1")
    r2 = math.sqrt(2.0)
    assert abs(ct[-1] - (1 / r2 + 1 / 2 + 1 / (2 * r2))) < 1e-12
    assert abs(c1[-1] - 1 / (2 * r2)) < 1e-12
    assert abs(series.column("excluded")[-1] - 1 / r2) < 1e-12


def test_ff_bias_nonresidue_leads():
    series = ff_bias_series(2, f(2, 0, 0, 1), 20)
    c1 = series.column("class_1")
    ct = series.column("class_T+1")
    assert np.all(ct[1:] > c1[1:])  # from n = 2 on


def test_ff_bias_q3_t_slope():
    series = ff_bias_series(3, f(3, 0, 1), 13)
    assert series.metadata["two_rank"] == 1
    assert series.metadata["square_classes"] == ["1"]
    # class 2 (nonresidue) leads class 1, difference ~ (1/2) log 3^n scale-wise
    c1 = series.column("class_1")
    c2 = series.column("class_2")
    assert np.all(c2[1:] >= c1[1:])
    diff = c2 - c1
    n = np.arange(1, 14)
    slope = np.polyfit(np.log(n[4:]), 2 * diff[4:], 1)[0]
    # S_1 - S_2 = 2 Phi^-1 ... direct check: phi * diff ~ 2^{t-1} * ... use S columns
    s1 = series.column("S_1")
    s2 = series.column("S_2")
    fit1 = np.polyfit(np.log(n[4:]), s1[4:], 1)[0]
    fit2 = np.polyfit(np.log(n[4:]), s2[4:], 1)[0]
    assert abs(fit1 - 0.5) < 0.35
    assert abs(fit2 + 0.5) < 0.35


def test_ff_case_formula_flagged():
    series = ff_bias_series(3, f(3, 0, 1), 5)
    assert series.metadata["modulus_squarefree"] is True
    assert series.metadata["case_formula_value"] == 2
    assert series.metadata["case_formula_matches"] is False
    assert series.metadata["two_rank"] == 1


def test_ff_euler_product_empty():
    tab = unit_class_table(3, f(3, 0, 1))
    chi = tab.quadratic_character()
    series = ff_euler_product(chi, 1)
    # n=1: the only degree-1 irreducibles are T (excluded), T+1, T+2
    assert len(series.grid) == 1


def test_ff_euler_product_q3_t_converges_to_sqrt2():
    tab = unit_class_table(3, f(3, 0, 1))
    chi = tab.quadratic_character()
    series = ff_euler_product(chi, 13)
    target = series.metadata["target_re"]
    assert abs(target - math.sqrt(2.0)) < 1e-12
    dev = np.abs(series.column("product_re") - target) / target
    assert dev[-1] <= 0.10
    early = dev[6:10].mean()
    late = dev[9:13].mean()
    assert late < early


def test_ff_euler_product_q2_t_squared_target():
    tab = unit_class_table(2, f(2, 0, 0, 1))
    chi = tab.quadratic_character()
    series = ff_euler_product(chi, 16)
    lp = l_polynomial(chi)
    expect = math.sqrt(2.0) * (1 - 2**-0.5)
    assert abs(series.metadata["target_re"] - expect) < 1e-12
    dev = abs(series.column("product_re")[-1] - expect) / expect
    assert dev < 0.15
