import itertools
import math
from collections import Counter
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, strategies as st

from random3m.complexes import (all_matchings, connectivity_probability, corner_vertex_count, cycle_counts,
                                configuration_graph, edge_valence_stats, gluing_from_label_maps,
                                manifold_estimate_naive, manifold_probability_sis, poisson_cycle_means,
                                random_matching, random_surface, random_tet_gluing, short_cycle_stats,
                                surface_from_pairing, surface_stats, tet_from_pairing, two_tet_sphere,
                                vertex_bound)


def test_two_triangles_exhaustive():
    surfaces = [surface_from_pairing(pi) for pi in all_matchings(6)]
    assert len(surfaces) == 15
    # 12 spheres and 3 tori; v = 2 would give odd chi
    assert Counter(s.vertices for s in surfaces) == {3: 12, 1: 3}
    for s in surfaces:
        assert s.chi == s.vertices - 1
        if s.chi == 2:
            assert s.connected and s.genera == [0]


def test_two_triangle_connectivity_is_exact():
    assert connectivity_probability(2) == 1.0


def test_odd_triangle_count_rejected():
    with pytest.raises(ValueError):
        random_surface(3)


@given(st.integers(1, 60).map(lambda k: 2 * k), st.integers(0, 2 ** 32 - 1))
def test_two_vertex_counts_agree(n, seed):
    s = random_surface(n, seed)
    assert s.vertices == corner_vertex_count(s.pi)
    assert s.chi == s.vertices - n // 2
    # closed surfaces: chi = sum over components of 2 - 2 genus
    assert s.chi == sum(2 - 2 * g for g in s.genera)


def test_matching_marginals_are_uniform():
    rng = np.random.default_rng(0)
    m, N = 30, 100_000
    counts = np.zeros(m, dtype=np.int64)
    for _ in range(N):
        counts[random_matching(m, rng)[0]] += 1
    # slot 0 is paired with each of the other 29 slots equally often
    p = 1 / (m - 1)
    assert counts[0] == 0
    assert np.all(np.abs(counts[1:] - N * p) <= 4 * math.sqrt(N * p * (1 - p)))


def test_vertex_bound_holds_at_moderate_n():
    st_ = surface_stats(1000, 300, seed=1)
    assert st_.vertex_upper_confidence() <= vertex_bound(1000)


def test_cycle_counts_small_graphs():
    # a single 4-valent vertex carries two loops and nothing longer
    nbr, eid = configuration_graph(1, 4, np.random.default_rng(0))
    c = cycle_counts(nbr, eid, 3)
    assert c.tolist() == [0, 2, 0, 0]
    assert poisson_cycle_means(4, 3)[2] == pytest.approx(4.5)
    assert poisson_cycle_means(3, 1)[0] == pytest.approx(1.0)


def test_short_cycle_means_trivalent():
    counts = short_cycle_stats(3, 2000, 3, 400, seed=2)
    lam = poisson_cycle_means(3, 3)
    se = np.sqrt(lam / 400)
    assert np.all(np.abs(counts.mean(0) - lam) <= 4 * se)


def exhaustive_manifold_fraction(n):
    hits = total = 0
    for pi in all_matchings(4 * n):
        pairs = [(f, int(pi[f])) for f in range(4 * n) if f < pi[f]]
        for rots in itertools.product(range(3), repeat=len(pairs)):
            rot = np.zeros(4 * n, dtype=np.int64)
            for (f, g), r in zip(pairs, rots):
                rot[f] = rot[g] = r
            gl = tet_from_pairing(pi, rot)
            # manifold test by links agrees with the Euler characteristic test
            assert gl.is_manifold == (gl.euler == 0 and gl.folded_edges == 0)
            hits += gl.is_manifold
            total += 1
    return Fraction(hits, total)


def test_tetrahedra_exhaustive():
    assert exhaustive_manifold_fraction(1) == 1
    assert exhaustive_manifold_fraction(2) == Fraction(1091, 2835)


def test_two_tet_sphere():
    s = two_tet_sphere()
    assert s.is_manifold and s.vertices == 4 and s.edges == 6
    assert edge_valence_stats(s).mean == 2.0
    with pytest.raises(ValueError):
        gluing_from_label_maps(2, [(0, 0, 1, 0, {1: 1, 2: 2, 3: 3})])


@given(st.integers(1, 12), st.integers(0, 2 ** 32 - 1))
def test_link_euler_identity(n, seed):
    gl = random_tet_gluing(n, seed)
    assert gl.folded_edges == 0
    assert gl.euler == int(np.sum(1 - gl.link_chi // 2))
    assert int(gl.edge_valence.sum()) == 6 * n


def test_invalid_pairings_rejected():
    with pytest.raises(ValueError):
        tet_from_pairing(np.array([0, 1, 2, 3]), np.zeros(4, dtype=np.int64))


def test_sequential_estimator_matches_exact_small_n():
    exact = 1091 / 2835
    est = manifold_probability_sis(2, 20_000, seed=3, bias=1.0)
    assert abs(est.estimate - exact) <= 4 * est.stderr
    naive = manifold_estimate_naive(2, 20_000, seed=3)
    assert abs(naive.estimate - exact) <= 4 * naive.stderr
