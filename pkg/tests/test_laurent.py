from fractions import Fraction

import pytest
from hypothesis import given, settings, strategies as st

from milnork.algebra import AlgebraSpec, build_algebra
from milnork.errors import NonUnitEntry
from milnork.laurent import (
    LaurentEntry,
    LaurentPolynomial,
    LaurentState,
    LaurentSymbol,
    entries_sum_is_one,
    entries_sum_is_zero,
    entries_value_equal,
    entry_is_one,
)

T2 = build_algebra(AlgebraSpec(("t",), ("t^2",)))


def lp(coeffs):
    return LaurentPolynomial(T2, {d: T2.element(c) for d, c in coeffs.items()})


def test_basic_arithmetic():
    p = lp({0: "1", 1: "t"})
    q = lp({-1: "2"})
    assert (p + q).coeffs[-1] == T2.element("2")
    prod = p.mul(q)
    assert prod.coeffs[-1] == T2.element("2")
    assert prod.coeffs[0] == T2.element("2*t")
    assert p.ord() == 0 and q.ord() == -1
    assert (p - p).coeffs == {}


def test_power_and_shift():
    s = LaurentPolynomial.sigma(T2)
    assert s.power(3).coeffs == {3: T2.one}
    assert s.shift(-1).coeffs == {0: T2.one}
    one_minus = LaurentPolynomial.constant(T2, 1) - s
    sq = one_minus.power(2)
    assert sq.coeffs[1] == T2.element(-2)


def test_truncation_compatible_with_product():
    p = lp({0: "1+t", 1: "2", 3: "t"})
    q = lp({0: "1", 2: "3+t"})
    direct = p.mul(q, order=3)
    full = p.mul(q).truncate(3)
    assert direct.coeffs == full.coeffs


_coeff_pool = st.sampled_from(["0", "1", "-1", "t", "1+t", "2"])


@settings(max_examples=40, deadline=None, derandomize=True)
@given(st.lists(_coeff_pool, min_size=3, max_size=3),
       st.lists(_coeff_pool, min_size=3, max_size=3),
       st.integers(1, 4))
def test_truncated_product_property(cs1, cs2, order):
    p = lp({d: c for d, c in enumerate(cs1)})
    q = lp({d: c for d, c in enumerate(cs2)})
    assert p.mul(q, order=order).coeffs == p.mul(q).truncate(order).coeffs
    assert p.mul(q).coeffs == q.mul(p).coeffs


def test_entry_unit_guard():
    s = LaurentPolynomial.sigma(T2)
    LaurentEntry(T2, [(s, 1)])  # sigma itself is fine
    with pytest.raises(NonUnitEntry):
        LaurentEntry(T2, [(lp({1: "t"}), 1)])  # lowest coefficient t is not a unit
    with pytest.raises(NonUnitEntry):
        LaurentEntry(T2, [(lp({}), 1)])


def test_cross_multiplication_equality():
    one = LaurentPolynomial.constant(T2, 1)
    s = LaurentPolynomial.sigma(T2)
    u = one + lp({2: "1"})
    # (1-s)(1+s^2) as two atoms equals the expanded polynomial as one atom
    e1 = LaurentEntry(T2, [(one - s, 1), (u, 1)])
    expanded = (one - s).mul(u)
    e2 = LaurentEntry(T2, [(expanded, 1)])
    assert entries_value_equal(e1, e2)
    # inverses: u * u^(-1) = 1
    e3 = LaurentEntry(T2, [(u, 1), (u, -1)])
    assert entry_is_one(e3)
    assert not entries_value_equal(e1, LaurentEntry(T2, [(one, 1)]))


def test_sum_side_conditions():
    one = LaurentPolynomial.constant(T2, 1)
    s = LaurentPolynomial.sigma(T2)
    e_s = LaurentEntry(T2, [(s, 1)])
    e_oms = LaurentEntry(T2, [(one - s, 1)])
    assert entries_sum_is_one(e_s, e_oms)
    assert entries_sum_is_one(e_oms, e_s)
    e_neg = LaurentEntry(T2, [(lp({1: "-1"}), 1)])
    assert entries_sum_is_zero(e_s, e_neg)
    assert not entries_sum_is_one(e_s, e_s)


def test_state_canonicalization():
    one = LaurentPolynomial.constant(T2, 1)
    s = LaurentPolynomial.sigma(T2)
    sym = LaurentSymbol((LaurentEntry(T2, [(one - s, 1)]), LaurentEntry(T2, [(s, 1)])))
    state = LaurentState(T2, 2, [(1, sym), (2, sym), (-3, sym)])
    assert not state
    state2 = LaurentState(T2, 2, [(Fraction(1, 2), sym), (Fraction(1, 2), sym)])
    assert len(state2.terms) == 1 and state2.terms[0][0] == 1


def test_string_round_trip():
    p = lp({0: "1+t", 2: "-1/2"})
    text = p.to_string()
    back = LaurentPolynomial.from_string(T2, text)
    assert back.coeffs == p.coeffs
    with pytest.raises(ValueError):
        lp({-1: "1"}).to_string()
