import itertools
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, strategies as st

from random3m.catalog import UnsupportedGroup, build, parse_spec, schur_cover
from random3m.groups import commutator_fibers, fold_convolution_count, generates, orbit_labels

SMALL = ["Z/2", "Z/3", "Z/2 x Z/2", "S3", "A4", "A5", "S4", "PSL(2,7)", "PSL(2,8)", "SL(2,5)"]
ORDERS = {"Z/2": 2, "Z/3": 3, "Z/2 x Z/2": 4, "S3": 6, "A4": 12, "A5": 60, "S4": 24, "PSL(2,7)": 168,
          "PSL(2,8)": 504, "SL(2,5)": 120}


@pytest.mark.parametrize("name", SMALL)
def test_table_is_a_group(name):
    G = build(name).group
    t = G.table
    assert G.n == ORDERS[name]
    # Latin square, identity row, associativity on a random sample
    assert all(len(set(row)) == G.n for row in t.tolist())
    assert np.array_equal(t[G.identity], np.arange(G.n))
    rng = np.random.default_rng(1)
    a, b, c = rng.integers(0, G.n, (3, 500))
    assert np.array_equal(t[t[a, b], c], t[a, t[b, c]])
    assert np.array_equal(t[np.arange(G.n), G.inv], np.full(G.n, G.identity))
    assert generates(G.gens, G)


@pytest.mark.parametrize("name", ["A5", "PSL(2,7)", "S4", "A4"])
def test_class_equation_and_center(name):
    G = build(name).group
    sizes = [len(c) for c in G.conjugacy_classes]
    assert sum(sizes) == G.n and all(G.n % s == 0 for s in sizes)
    assert len(G.center) == sizes.count(1)


def test_commutator_fibers_match_character_formula():
    # |{(a,b): [a,b] = 1}| = |G| * (number of classes)
    for name in ["A5", "S4", "PSL(2,7)"]:
        G = build(name).group
        fib = commutator_fibers(G)
        assert sum(fib.values()) == G.n ** 2
        assert fib[G.identity] == G.n * len(G.conjugacy_classes)


def test_fold_convolution_counts_surface_homs():
    # |Hom(surface group of genus 2, Z/2)| = 16; for A5 the Frobenius count
    # |G| * sum_chi (|G| / chi(1))^(2g-2) at g = 2 gives 60^3 * sum chi(1)^-2
    assert fold_convolution_count(build("Z/2").group, 2) == 16
    dims = [1, 3, 3, 4, 5]
    expected = round(60 * sum((60 / d) ** 2 for d in dims))
    assert fold_convolution_count(build("A5").group, 2) == expected


def test_orbit_labels():
    perms = [np.array([1, 0, 2, 3]), np.array([0, 1, 3, 2])]
    lab = orbit_labels(4, perms)
    assert lab[0] == lab[1] and lab[2] == lab[3] and lab[0] != lab[2]


@pytest.mark.parametrize("text,expected", [("A5", "A 5"), ("a_5", "A 5"), ("PSL(2,13)", "PSL(2,13)"),
                                           ("psl2,7", "PSL(2,7)"), ("Z/2", "Z/2")])
def test_parse_spec(text, expected):
    assert str(parse_spec(text)) == expected


@pytest.mark.parametrize("bad", ["", "Q8x", "PSL(3,)", "banana"])
def test_parse_spec_rejects(bad):
    with pytest.raises(UnsupportedGroup):
        build(bad)


@pytest.mark.parametrize("name,h2,out", [("A5", 2, 2), ("PSL(2,7)", 2, 2), ("PSL(2,8)", 1, 3), ("A6", 6, 4)])
def test_metadata(name, h2, out):
    meta = build(name).meta
    assert (meta.h2, meta.order_out) == (h2, out)
    assert meta.mu == Fraction(meta.h2, meta.order_out)


@pytest.mark.parametrize("name", ["A5", "PSL(2,7)", "Z/2 x Z/2"])
def test_schur_cover_kernel_size_matches_table(name):
    cov = schur_cover(name)
    cov.check()
    assert len(cov.h2) == build(name).meta.h2
    assert cov.cover.n == build(name).group.n * len(cov.h2)


def test_automorphism_group_sizes():
    assert build("A5").aut.size == 120
    assert build("S3").aut.size == 6
    assert build("Z/2 x Z/2").aut.size == 6
    assert build("A5").aut.is_valid()


@given(st.sampled_from(["S3", "A4", "A5"]), st.integers(0, 2 ** 32 - 1))
def test_closure_is_subgroup(name, seed):
    G = build(name).group
    rng = np.random.default_rng(seed)
    H = G.closure(rng.integers(0, G.n, 2).tolist())
    hs = set(H.tolist())
    assert G.n % len(hs) == 0
    assert all(G.table[x, y] in hs for x, y in itertools.product(hs, hs))
