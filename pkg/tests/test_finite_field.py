import numpy as np
import pytest
from hypothesis import assume, given, strategies as st

from random3m.finite_field import (Mat2, factorize, field_of_order, is_irreducible, is_prime, lowest_irreducible,
                                   make_field, mat2_det, mat2_inv, mat2_mul, normalize_proj, prime_power)

FIELDS = [(2, 1), (3, 1), (2, 3), (3, 2), (5, 2), (2, 4), (13, 1)]


def test_primes_and_factorization():
    assert [n for n in range(30) if is_prime(n)] == [2, 3, 5, 7, 11, 13, 17, 19, 23, 29]
    assert factorize(360) == {2: 3, 3: 2, 5: 1}
    assert prime_power(27) == (3, 3)
    with pytest.raises(ValueError):
        prime_power(12)


@pytest.mark.parametrize("p,e", FIELDS)
def test_field_axioms_exhaustive(p, e):
    F = make_field(p, e)
    add, mul = F.add_table, F.mul_table
    assert np.array_equal(add, add.T) and np.array_equal(mul, mul.T)
    # every nonzero element has a unique inverse, and the unit group is cyclic of order q - 1
    for a in range(1, F.q):
        assert mul[a, F.inv(a)] == 1
    orders = {a: next(k for k in range(1, F.q) if F.power(a, k) == 1) for a in range(1, F.q)}
    assert max(orders.values()) == F.q - 1
    # distributivity on a sample
    rng = np.random.default_rng(0)
    a, b, c = rng.integers(0, F.q, (3, 200))
    assert np.array_equal(mul[a, add[b, c]], add[mul[a, b], mul[a, c]])


@pytest.mark.parametrize("p,e", FIELDS)
def test_frobenius_is_automorphism(p, e):
    F = make_field(p, e)
    img = [F.frobenius(a) for a in range(F.q)]
    assert sorted(img) == list(range(F.q))
    for a in range(F.q):
        assert F.power(a, F.q) == a


def test_lowest_irreducible_is_irreducible():
    for p, e in [(2, 2), (2, 3), (2, 4), (3, 2), (3, 3), (5, 2), (7, 2)]:
        poly = lowest_irreducible(p, e)
        assert len(poly) == e + 1 and is_irreducible(poly, p)
    assert not is_irreducible([1, 0, 1], 2)  # x^2 + 1 = (x + 1)^2 over F_2


@given(st.sampled_from([4, 5, 7, 8, 9, 11, 16, 25]), st.lists(st.integers(0, 10 ** 6), min_size=4, max_size=4))
def test_mat2_inverse(q, entries):
    F = field_of_order(q)
    m = Mat2(*(x % q for x in entries))
    assume(mat2_det(m, F) != 0)
    prod = mat2_mul(m, mat2_inv(m, F), F)
    assert prod == Mat2(1, 0, 0, 1)
    assert normalize_proj(m, F) == normalize_proj(Mat2(*(F.mul(x, 1) for x in m)), F)
