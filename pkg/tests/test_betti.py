import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from random3m.betti import (FinitePresentation, NotExtending, WordLengthExceeded, betti_trend_point, cover_betti,
                            fox_cover_betti, fox_walk, fox_betti_from_jacobian, heegaard_presentation,
                            homology_trend, is_non_increasing, rational_betti_mod_primes)
from random3m.catalog import build
from random3m.epi import enumerate_E
from random3m.surface import humphries_generators, lickorish_generators, with_inverses
from random3m.symplectic import integral_h1, integral_walk_image

GENS2 = with_inverses(humphries_generators(2))


def lens_space(p):
    """Genus-1 splitting phi = Ta^p: the meridian b goes to b a^p, so
    pi_1 = <a | a^p>, the lens space L(p, 1)."""
    gens = lickorish_generators(1)  # [Ta, Tb]
    return gens, [0] * p


@pytest.mark.parametrize("p,q,torsion", [(5, 5, ()), (4, 2, (2,)), (6, 3, (2,)), (6, 2, (3,))])
def test_lens_space_covers(p, q, torsion):
    gens, steps = lens_space(p)
    pres = heegaard_presentation(gens, steps)
    assert pres.relators == ((1,) * p,)
    assert pres.h1().torsion == (p,)
    # the Z/q cover of L(p, 1) is L(p/q, 1)
    ch = cover_betti(pres, [1], f"Z/{q}")
    assert (ch.betti, ch.torsion) == (0, torsion)
    assert fox_cover_betti(f"Z/{q}", [1], gens, steps) == 0


def test_s1xs2_cover_has_betti_one():
    # phi = identity: N is #^g S^1 x S^2 and every cover has positive beta_1
    pres = heegaard_presentation(GENS2, [])
    assert pres.relators == ((), ())
    assert cover_betti(pres, list(enumerate_E("A5", 2)[0, 0::2]), "A5").betti == 60 * 2 - 59
    assert fox_cover_betti("A5", enumerate_E("A5", 2)[0, 0::2], GENS2, []) == 61


@settings(max_examples=25)
@given(st.integers(0, 2 ** 32 - 1), st.integers(1, 25), st.sampled_from(["Z/2", "Z/3", "S3", "A5"]))
def test_fox_route_equals_rewriting(seed, L, Q):
    rng = np.random.default_rng(seed)
    steps = rng.integers(0, len(GENS2), L)
    pres = heegaard_presentation(GENS2, steps)
    assert pres.deficiency == 0
    G = build(Q).group
    E = enumerate_E(Q, 2)
    res = fox_walk(Q, E, GENS2, steps)
    for i in np.flatnonzero(np.all(res.tuples[:, 1::2] == G.identity, axis=1)):
        b = fox_betti_from_jacobian([J[i] for J in res.jacobians], G.table)
        assert cover_betti(pres, E[i, 0::2], Q).betti == b
    for i in np.flatnonzero(~np.all(res.tuples[:, 1::2] == G.identity, axis=1))[:2]:
        with pytest.raises(NotExtending):
            cover_betti(pres, E[i, 0::2], Q)


@given(st.integers(0, 2 ** 32 - 1), st.integers(0, 40))
def test_presentation_homology_matches_symplectic_route(seed, L):
    steps = np.random.default_rng(seed).integers(0, len(GENS2), L)
    pres = heegaard_presentation(GENS2, steps)
    H = integral_h1(integral_walk_image(GENS2, steps))
    assert pres.h1() == H
    assert rational_betti_mod_primes(GENS2, steps) == H.rank


def test_word_cap():
    steps = np.random.default_rng(0).integers(0, len(GENS2), 400)
    with pytest.raises(WordLengthExceeded):
        heegaard_presentation(GENS2, steps, cap=50)


def test_presentation_basics():
    P = FinitePresentation(2, ((1, 1), (2, -1, 2)))
    assert P.abelianization_matrix().tolist() == [[2, -1], [0, 2]]
    assert P.h1().order == 4


def test_small_trend_point_is_reproducible():
    a = betti_trend_point("Z/2", 2, 60, 40, seed=3)
    b = betti_trend_point("Z/2", 2, 60, 40, seed=3)
    assert a.samples == 40 and (a.positive, a.walks) == (b.positive, b.walks)
    assert a.word_route_checked + a.word_route_dropped == 20
    assert is_non_increasing([a, b])


def test_homology_trend_small():
    pts = homology_trend(2, (20, 200), walks=15, rational_samples=30, seed=1)
    assert [p.length for p in pts] == [20, 200]
    assert all(len(p.orders) == 15 for p in pts)
