import numpy as np
import pytest
from hypothesis import given, strategies as st

from random3m.catalog import build
from random3m.kernels import GenProgram, apply_steps, apply_steps_perm
from random3m.surface import (HOLD, WalkSpec, apply_gen, cyclic_reduce, draw_steps, exponent_sums,
                              extends_over_handlebody, humphries_generators, inverse_word, is_cyclic_conjugate,
                              lickorish_generators, preserves_form, reduce_word, relator_value, substitute,
                              surface_relator, symplectic_form, symplectic_image, twist_a, twist_b, with_inverses)

words = st.lists(st.sampled_from([1, -1, 2, -2, 3, -3, 4, -4]), max_size=30)


@given(words)
def test_reduce_is_idempotent_and_inverse_cancels(w):
    r = reduce_word(w)
    assert reduce_word(r) == r
    assert all(x != -y for x, y in zip(r, r[1:]))
    assert reduce_word(tuple(w) + inverse_word(w)) == ()


@given(words, st.integers(0, 29))
def test_cyclic_conjugates(w, k):
    r = cyclic_reduce(w)
    if r:
        k %= len(r)
        assert is_cyclic_conjugate(r[k:] + r[:k], r)


@pytest.mark.parametrize("g", [1, 2, 3])
def test_generators_are_automorphisms_fixing_relator(g):
    gens = lickorish_generators(g) + (humphries_generators(g) if g >= 2 else [])
    for t in gens:
        t.check()
        assert preserves_form(t.matrix)
        inv = t.inverse()
        assert np.array_equal(t.matrix @ inv.matrix, np.eye(2 * g, dtype=int))


def test_twists_satisfy_braid_relation_on_homology():
    # twist_b turns the opposite way to twist_a, so the braid pair is (Ta, Tb^-1)
    A, B = twist_a(1, 1).matrix, twist_b(1, 1).inverse().matrix
    assert np.array_equal(A @ B @ A, B @ A @ B)
    assert np.array_equal(np.linalg.matrix_power(A @ B, 6), np.eye(2, dtype=int))


def test_symplectic_form_shape():
    J = symplectic_form(2)
    assert np.array_equal(J, -J.T)
    assert abs(round(np.linalg.det(J))) == 1


def random_surface_tuples(G, g, count, rng):
    """Uniform homomorphisms from the genus-g surface group: draw all but the
    last handle freely, then solve the last commutator from its fiber."""
    out = np.empty((count, 2 * g), dtype=np.int64)
    for k in range(count):
        t = rng.integers(0, G.n, 2 * g - 2)
        c = G.identity
        for i in range(g - 1):
            c = G.table[c, G.commutator(int(t[2 * i]), int(t[2 * i + 1]))]
        xs, ys = G.fiber(int(G.inv[c]))
        j = rng.integers(0, len(xs))
        out[k] = np.concatenate([t, [xs[j], ys[j]]])
    return out


@given(st.integers(0, 2 ** 32 - 1), st.sampled_from(["humphries", "lickorish"]))
def test_compiled_kernel_matches_word_substitution(seed, gset):
    G = build("A5").group
    rng = np.random.default_rng(seed)
    T = random_surface_tuples(G, 2, 20, rng)
    assert np.all(relator_value(T, G) == G.identity)
    spec = WalkSpec(2, 40, seed, gset)
    steps = draw_steps(40, len(spec.generators), spec.hold_probability, rng)
    fast = T.copy()
    apply_steps(fast, G.table.astype(np.int64), G.inv.astype(np.int64), G.identity, steps,
                GenProgram.compile(spec.generators))
    slow = T.copy()
    for s in steps:
        if s != HOLD:
            slow = apply_gen(slow, spec.generators[s], G)
    assert np.array_equal(fast, slow)
    assert np.all(relator_value(fast, G) == G.identity)


@given(st.lists(st.integers(-1, 9), max_size=40))
def test_symplectic_image_matches_substitution(steps):
    gens = with_inverses(humphries_generators(2))
    P = symplectic_image(steps, gens)
    images = [(x,) for x in range(1, 5)]
    for s in steps:
        if s != HOLD:
            # T <- T . tau: the image of x is tau(x) with letters replaced by current images
            images = [substitute(gens[s].images[x], images) for x in range(4)]
    M = np.stack([exponent_sums(w, 4) for w in images], axis=1)
    assert np.array_equal(P.astype(np.int64), M)
    assert preserves_form(P)


def test_permutation_kernel():
    perms = np.array([[1, 2, 0], [0, 2, 1]])
    state = np.arange(3)
    apply_steps_perm(state, perms, np.array([0, HOLD, 1]))
    assert state.tolist() == [2, 1, 0]


def test_extends_over_handlebody():
    G = build("A5").group
    a, b = G.gens[:2]
    assert extends_over_handlebody(np.array([a, G.identity, b, G.identity]), G)
    assert not extends_over_handlebody(np.array([a, b, b, G.identity]), G)
    assert surface_relator(2) == (1, 2, -1, -2, 3, 4, -3, -4)
