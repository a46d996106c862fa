from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, strategies as st

from random3m.smith import cokernel
from random3m.surface import humphries_generators, symplectic_form, symplectic_image, with_inverses
from random3m.symplectic import (brute_sp_order, count_by_intersection, count_lagrangians, count_transverse,
                                 enumerate_lagrangians, h1_order, homology_dim_distribution, integral_h1,
                                 limit_dim_distribution, matrix_group_closure_size, mc_intersection_distribution,
                                 meridian_lagrangian, rank_mod_p, rank_mod_p_batch, sp_order,
                                 transvection_generators)

CASES = [(1, 2), (1, 3), (2, 2), (2, 3)]


@pytest.mark.parametrize("g,p", CASES)
def test_sp_order_formula_equals_brute_force(g, p):
    assert sp_order(g, p) == brute_sp_order(g, p)


@pytest.mark.parametrize("g,p", CASES)
def test_sp_order_equals_generated_group(g, p):
    assert matrix_group_closure_size(transvection_generators(g, p), p) == sp_order(g, p)


@pytest.mark.parametrize("g,p", CASES)
def test_lagrangian_counts_by_enumeration(g, p):
    Ls = enumerate_lagrangians(g, p)
    assert len(Ls) == count_lagrangians(g, p)
    J = meridian_lagrangian(g, p)
    dims = np.bincount([J.intersection_dim(L) for L in Ls], minlength=g + 1)
    assert dims.tolist() == [count_by_intersection(g, p, d) for d in range(g + 1)]
    assert dims[0] == count_transverse(g, p)


def test_genus2_mod2_distribution():
    assert homology_dim_distribution(2, 2) == [Fraction(8, 15), Fraction(6, 15), Fraction(1, 15)]


@pytest.mark.parametrize("p", [2, 3, 5])
def test_limit_distribution_is_probability(p):
    d = limit_dim_distribution(p)
    assert abs(sum(d) - 1) < 1e-12
    # genus-g values approach the limit
    assert abs(float(homology_dim_distribution(14, p)[0]) - d[0]) < 1e-3


@given(st.integers(0, 2 ** 32 - 1))
def test_rank_batch_matches_single(seed):
    rng = np.random.default_rng(seed)
    A = rng.integers(0, 3, (8, 3, 4))
    assert rank_mod_p_batch(A, 3).tolist() == [rank_mod_p(a, 3) for a in A]


def test_walk_histogram_is_close_to_exact():
    hist = mc_intersection_distribution(2, 2, 200, 3000, np.random.default_rng(5))
    exact = np.array([8, 6, 1]) / 15
    n = hist.sum()
    sigma = np.sqrt(n * exact * (1 - exact))
    assert np.all(np.abs(hist - n * exact) <= 4 * sigma)


@given(st.lists(st.integers(-1, 9), max_size=60))
def test_integral_h1_two_routes(steps):
    P = symplectic_image(steps, with_inverses(humphries_generators(2)))
    J = symplectic_form(2)
    assert np.array_equal(P.T.dot(J).dot(P).astype(np.int64), J)
    # H_1 = Z^4 / <b_1, b_2, phi(b_1), phi(b_2)> computed on the full lattice
    full = np.concatenate([np.eye(4, dtype=object)[:, 1::2], P[:, 1::2]], axis=1)
    assert integral_h1(P) == cokernel(full.tolist())
    assert h1_order(P) == integral_h1(P).order


def test_identity_gives_connected_sum_of_s1xs2():
    assert integral_h1(np.eye(4, dtype=object)).rank == 2
