import itertools
import math
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, strategies as st

from random3m.balanced import (abelianization, afp_chain_probability, afp_probability, all_cyclic_probability,
                               balanced_quotient_exact_binomial, balanced_quotient_mc, corank_probability,
                               count_rank, exponent_sums, expected_table_row, p_type_of_matrix, parse_type,
                               random_relator, simulate_afp, sylow_order_distribution, type_from_cyclic)
from random3m.smith import cokernel
from random3m.surface import exponent_sums as word_sums
from random3m.symplectic import rank_mod_p


def test_binomial_limit_a5():
    b = balanced_quotient_exact_binomial("A5", 2)
    assert b.n == 19
    assert abs(b.p - 0.0052646) < 1e-6
    assert abs(b.p_poisson - 0.0052638) < 1e-6


@pytest.mark.parametrize("n", [3, 4])
def test_mc_against_exact_parity_law(n):
    # Z/2 is a quotient of <a | R> iff R has an even number of non-identity letters
    exact = (1 + (-1 / 3) ** n) / 2
    r = balanced_quotient_mc("Z/2", 1, 1, n, 20000, seed=n)
    assert abs(r.estimate - exact) < 4 * math.sqrt(exact * (1 - exact) / r.n)


def test_mc_is_seed_deterministic():
    a = balanced_quotient_mc("A5", 2, 2, 30, 2000, seed=4)
    b = balanced_quotient_mc("A5", 2, 2, 30, 2000, seed=4)
    assert a.successes == b.successes


def test_code_and_letter_sums_agree():
    codes = np.random.default_rng(0).integers(0, 5, (50, 40))
    for row in codes:
        letters = [int(x) for x in random_relator_from_codes(row)]
        assert exponent_sums(row, 2).tolist() == word_sums([x for x in letters if x], 2).tolist()


def random_relator_from_codes(codes):
    k = (codes + 1) // 2
    return np.where(codes == 0, 0, np.where(codes % 2 == 1, k, -k))


def test_random_relator_alphabet():
    w = random_relator(3, 5000, seed=1)
    assert w.shape == (5000,) and set(np.unique(w).tolist()) == set(range(-3, 4))


@given(st.lists(st.lists(st.integers(-2, 2), min_size=8, max_size=8), min_size=2, max_size=2))
def test_abelianization_matches_cokernel(rels):
    rels = [np.array(r, dtype=np.int8) for r in rels]
    M = np.stack([word_sums([x for x in r if x], 2) for r in rels], axis=1)
    assert abelianization(rels, 2) == cokernel(M.tolist())


@pytest.mark.parametrize("m,n,p", [(2, 2, 2), (2, 3, 2), (2, 2, 3)])
def test_count_rank_brute_force(m, n, p):
    counts = [0] * (min(m, n) + 1)
    for entries in itertools.product(range(p), repeat=m * n):
        counts[rank_mod_p(np.array(entries).reshape(m, n), p)] += 1
    assert counts == [count_rank(m, n, r, p) for r in range(min(m, n) + 1)]


@pytest.mark.parametrize("p", [2, 3, 5])
def test_sylow_values(p):
    q = Fraction(1, p)
    ref = {2: [Fraction(3, 8), Fraction(9, 32), Fraction(9, 64), Fraction(3, 128)],
           3: [Fraction(16, 27), Fraction(64, 243), Fraction(64, 729), Fraction(16, 2187)]}
    got = [afp_probability(2, p, t) for t in ["1", f"Z/{p}", f"Z/{p * p}", f"(Z/{p})^2"]]
    if p in ref:
        assert got == ref[p]
    # trivial p-part: both F_p-ranks vanish
    assert got[0] == corank_probability(2, 0, p) == (1 - q) * (1 - q * q)


@pytest.mark.parametrize("g", [1, 2, 3])
def test_generating_function_equals_rank_chain(g):
    for rho in [(), (1,), (1, 1), (1, 1, 1), (2,), (2, 1), (2, 2), (3,), (3, 1)]:
        assert afp_probability(g, 2, rho) == afp_chain_probability(g, 2, rho)


def test_order_distribution_sums_types():
    # P(|Sylow_2| = 4) collects Z/4 and (Z/2)^2
    dist = sylow_order_distribution(2, 2, 3)
    assert dist[0] == Fraction(3, 8)
    assert dist[2] == afp_probability(2, 2, "Z/4") + afp_probability(2, 2, "(Z/2)^2")


def test_type_conventions():
    assert parse_type("Z/2+Z/4") == type_from_cyclic([1, 2]) == (2, 1)
    assert parse_type("(Z/3)^2") == (2,)
    assert p_type_of_matrix(np.array([[2, 0], [0, 4]]), 2) == (2, 1)


def test_simulation_matches_exact():
    n = 20000
    sim = simulate_afp(2, 2, n, seed=2)
    for t in ["1", "Z/2", "Z/4", "(Z/2)^2"]:
        p = float(afp_probability(2, 2, t))
        assert abs(sim.get(parse_type(t), 0) - n * p) <= 4 * math.sqrt(n * p * (1 - p))


def test_all_cyclic_limits():
    assert all_cyclic_probability(1) == 1.0
    vals = [all_cyclic_probability(g) for g in (2, 5, None)]
    assert vals[0] > vals[1] > vals[2]


def test_expected_table_row_a5():
    row = expected_table_row("A5")
    assert row.gen_pairs == 19 and row.out == 2
    assert row.exp_2gen == pytest.approx(19 / 3600)
