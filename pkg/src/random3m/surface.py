"""Surface groups, substitution automorphisms and mapping-class random walks.

Generators of pi_1 of the closed genus-g surface are ordered
``(a_1, b_1, ..., a_g, b_g)`` with the single relator
``[a_1, b_1] ... [a_g, b_g]`` where ``[x, y] = x y x^-1 y^-1``.  A word is a
tuple of nonzero ints; letter ``k`` (resp. ``-k``) is the generator with
tuple index ``k - 1`` (resp. its inverse).  The b_i are the meridians of the
fixed handlebody.

A substitution ``tau`` acts on a homomorphism ``f`` (stored as the tuple of
generator images) by precomposition: ``(f . tau)(x) = f(tau(x))``.  A walk
with steps ``s_1, ..., s_L`` produces ``f . tau_{s_1} . ... . tau_{s_L}``.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from functools import cached_property
from typing import Iterator, Sequence

import numpy as np

from .groups import FiniteGroup

Word = tuple[int, ...]


# -- words -------------------------------------------------------------------

def reduce_word(w: Sequence[int]) -> Word:
    out: list[int] = []
    for x in w:
        if out and out[-1] == -x:
            out.pop()
        else:
            out.append(int(x))
    return tuple(out)


def inverse_word(w: Sequence[int]) -> Word:
    return tuple(-x for x in reversed(w))


def cyclic_reduce(w: Sequence[int]) -> Word:
    w = reduce_word(w)
    i, j = 0, len(w)
    while j - i > 1 and w[i] == -w[j - 1]:
        i += 1
        j -= 1
    return w[i:j]


def is_cyclic_conjugate(w: Sequence[int], r: Sequence[int]) -> bool:
    """Whether w is conjugate in the free group to the cyclically reduced r."""
    w = cyclic_reduce(w)
    r = tuple(r)
    if len(w) != len(r):
        return False
    if not r:
        return True
    doubled = r + r
    return any(doubled[i:i + len(r)] == w for i in range(len(r)))


def substitute(w: Sequence[int], images: Sequence[Word]) -> Word:
    out: list[int] = []
    for x in w:
        out.extend(images[x - 1] if x > 0 else inverse_word(images[-x - 1]))
    return reduce_word(out)


def exponent_sums(w: Sequence[int], ngens: int) -> np.ndarray:
    v = np.zeros(ngens, dtype=np.int64)
    for x in w:
        v[abs(x) - 1] += 1 if x > 0 else -1
    return v


def evaluate(w: Sequence[int], t: np.ndarray, G: FiniteGroup) -> np.ndarray:
    """Value of the word at tuples ``t`` (shape (..., ngens)); vectorized."""
    t = np.asarray(t)
    out = np.full(t.shape[:-1], G.identity, dtype=np.int64)
    for x in w:
        v = t[..., x - 1] if x > 0 else G.inv[t[..., -x - 1]]
        out = G.table[out, v]
    return out


def commutator_word(x: int, y: int) -> Word:
    return (x, y, -x, -y)


def surface_relator(g: int) -> Word:
    return tuple(l for i in range(g) for l in commutator_word(2 * i + 1, 2 * i + 2))


def relator_value(t: np.ndarray, G: FiniteGroup) -> np.ndarray:
    t = np.asarray(t)
    g = t.shape[-1] // 2
    out = np.full(t.shape[:-1], G.identity, dtype=np.int64)
    for i in range(g):
        out = G.table[out, G.commutators(t[..., 2 * i], t[..., 2 * i + 1])]
    return out


@dataclass(frozen=True)
class SurfacePresentation:
    genus: int

    @property
    def ngens(self) -> int:
        return 2 * self.genus

    @property
    def relator(self) -> Word:
        return surface_relator(self.genus)

    @staticmethod
    def a(i: int) -> int:
        """Letter of a_i (1-based handle index)."""
        return 2 * i - 1

    @staticmethod
    def b(i: int) -> int:
        return 2 * i


# -- symplectic form ---------------------------------------------------------

def symplectic_form(g: int) -> np.ndarray:
    """Intersection form on H_1 in the basis (a_1, b_1, ..., a_g, b_g)."""
    w = np.zeros((2 * g, 2 * g), dtype=np.int64)
    for i in range(g):
        w[2 * i, 2 * i + 1] = 1
        w[2 * i + 1, 2 * i] = -1
    return w


def preserves_form(M: np.ndarray, modulus: int | None = None) -> bool:
    g = M.shape[0] // 2
    W = symplectic_form(g).astype(object)
    Mo = np.asarray(M, dtype=object)
    lhs = Mo.T.dot(W).dot(Mo)
    if modulus is None:
        return bool(np.all(lhs == W))
    return bool(np.all((lhs - W) % modulus == 0))


# -- mapping class generators -----------------------------------------------

@dataclass(frozen=True)
class MappingClassGen:
    name: str
    images: tuple[Word, ...]
    inverse_images: tuple[Word, ...]

    @property
    def ngens(self) -> int:
        return len(self.images)

    @cached_property
    def matrix(self) -> np.ndarray:
        """Action on H_1: column x is the abelianized image of generator x."""
        return np.stack([exponent_sums(w, self.ngens) for w in self.images], axis=1)

    @cached_property
    def changed(self) -> tuple[int, ...]:
        return tuple(i for i, w in enumerate(self.images) if w != (i + 1,))

    def inverse(self) -> "MappingClassGen":
        name = self.name[:-2] if self.name.endswith("^-1") else self.name + "^-1"
        return MappingClassGen(name, self.inverse_images, self.images)

    def check(self) -> None:
        """Raise AssertionError unless the substitution is an automorphism
        of the surface group fixing the relator up to conjugacy."""
        n = self.ngens
        for x in range(1, n + 1):
            if substitute(substitute((x,), self.images), self.inverse_images) != (x,):
                raise AssertionError(f"{self.name}: inverse substitution does not undo on gen {x}")
            if substitute(substitute((x,), self.inverse_images), self.images) != (x,):
                raise AssertionError(f"{self.name}: substitution does not undo its inverse on gen {x}")
        r = surface_relator(n // 2)
        for imgs in (self.images, self.inverse_images):
            if not is_cyclic_conjugate(substitute(r, imgs), r):
                raise AssertionError(f"{self.name}: relator not sent to a conjugate of itself")
        if not preserves_form(self.matrix):
            raise AssertionError(f"{self.name}: homology action is not symplectic")


def _identity_images(g: int) -> list[Word]:
    return [(x,) for x in range(1, 2 * g + 1)]


def twist_a(g: int, i: int) -> MappingClassGen:
    """Twist about a_i: b_i -> b_i a_i."""
    a, b = 2 * i - 1, 2 * i
    fwd, bwd = _identity_images(g), _identity_images(g)
    fwd[b - 1] = (b, a)
    bwd[b - 1] = (b, -a)
    return MappingClassGen(f"Ta{i}", tuple(fwd), tuple(bwd))


def twist_b(g: int, i: int) -> MappingClassGen:
    """Twist about b_i: a_i -> a_i b_i."""
    a, b = 2 * i - 1, 2 * i
    fwd, bwd = _identity_images(g), _identity_images(g)
    fwd[a - 1] = (a, b)
    bwd[a - 1] = (a, -b)
    return MappingClassGen(f"Tb{i}", tuple(fwd), tuple(bwd))


def twist_c(g: int, i: int) -> MappingClassGen:
    """Twist about the curve through handles i and i+1 (homology class
    a_i + a_{i+1}); it meets b_i and b_{i+1} once each."""
    a1, b1, a2, b2 = 2 * i - 1, 2 * i, 2 * i + 1, 2 * i + 2
    fwd, bwd = _identity_images(g), _identity_images(g)
    fwd[b1 - 1] = (-a1, -a2, b1)
    fwd[b2 - 1] = (-a2, -a1, b2)
    bwd[b1 - 1] = (a2, a1, b1)
    bwd[b2 - 1] = (a1, a2, b2)
    # the two handles' relator piece goes to its conjugate by c = a_i a_{i+1};
    # conjugating the remaining handles the same way keeps the full relator
    # a conjugate of itself (nothing to do at genus 2)
    c = (a1, a2)
    for x in range(1, 2 * g + 1):
        if x not in (a1, b1, a2, b2):
            fwd[x - 1] = inverse_word(c) + (x,) + c
            bwd[x - 1] = c + (x,) + inverse_word(c)
    return MappingClassGen(f"Tc{i}", tuple(fwd), tuple(bwd))


def humphries_generators(g: int, verify: bool = True) -> list[MappingClassGen]:
    """2g+1 Dehn twists: the chain a_1, b_1, c_1, b_2, c_2, ..., b_g plus a_2."""
    if g < 2:
        raise ValueError("Humphries generators need genus >= 2")
    gens = [twist_a(g, 1), twist_b(g, 1)]
    for i in range(1, g):
        gens += [twist_c(g, i), twist_b(g, i + 1)]
    gens.append(twist_a(g, 2))
    if verify:
        for t in gens:
            t.check()
    return gens


def lickorish_generators(g: int, verify: bool = True) -> list[MappingClassGen]:
    """3g-1 twists about every a_i, b_i and the linking curves c_i."""
    if g < 1:
        raise ValueError("genus must be >= 1")
    gens = [twist_a(g, i) for i in range(1, g + 1)] + [twist_b(g, i) for i in range(1, g + 1)]
    gens += [twist_c(g, i) for i in range(1, g)]
    if verify:
        for t in gens:
            t.check()
    return gens


GENERATOR_SETS = {"humphries": humphries_generators, "lickorish": lickorish_generators}


def with_inverses(gens: Sequence[MappingClassGen]) -> list[MappingClassGen]:
    return list(gens) + [t.inverse() for t in gens]


# -- compiled action on arrays of tuples ---------------------------------------

class CompiledGen:
    """Substitution compiled to per-coordinate evaluation on index arrays."""

    def __init__(self, gen: MappingClassGen):
        self.gen = gen
        self.updates = [(i, gen.images[i]) for i in gen.changed]

    def apply(self, T: np.ndarray, G: FiniteGroup) -> np.ndarray:
        """Return f . tau for each row f of T (shape (..., 2g))."""
        if not self.updates:
            return T
        new_vals = [(i, evaluate(w, T, G)) for i, w in self.updates]
        out = T.copy()
        for i, v in new_vals:
            out[..., i] = v
        return out


def apply_gen(t: np.ndarray, phi: MappingClassGen, G: FiniteGroup) -> np.ndarray:
    t = np.asarray(t, dtype=np.int64)
    if t.shape[-1] != phi.ngens:
        raise ValueError(f"tuple arity {t.shape[-1]} does not match generator arity {phi.ngens}")
    return CompiledGen(phi).apply(t, G)


def extends_over_handlebody(t: np.ndarray, G: FiniteGroup, check_generation: bool = True) -> bool | np.ndarray:
    """True where every meridian b_i maps to the identity (and, optionally,
    the a-coordinates generate G)."""
    t = np.asarray(t)
    ok = np.all(t[..., 1::2] == G.identity, axis=-1)
    if check_generation:
        if t.ndim == 1:
            return bool(ok) and G.generates(t[0::2].tolist())
        gen = np.array([G.generates(row[0::2].tolist()) for row in t.reshape(-1, t.shape[-1])])
        ok = ok & gen.reshape(ok.shape)
    return ok


# -- random walks ------------------------------------------------------------

HOLD = -1


@dataclass
class WalkSpec:
    genus: int
    length: int
    seed: int = 0
    generator_set: str = "humphries"
    hold: float | None = None  # default 1/(|T|+1), |T| counting inverses

    @cached_property
    def generators(self) -> list[MappingClassGen]:
        return with_inverses(GENERATOR_SETS[self.generator_set](self.genus))

    @property
    def hold_probability(self) -> float:
        h = 1.0 / (len(self.generators) + 1) if self.hold is None else self.hold
        if not 0 < h < 1:
            raise ValueError("hold probability must lie in (0, 1)")
        return h

    def rng(self) -> np.random.Generator:
        return np.random.default_rng(self.seed)


def draw_steps(n_steps: int, n_gens: int, hold: float, rng: np.random.Generator) -> np.ndarray:
    """Step indices in [0, n_gens) or HOLD."""
    moves = rng.integers(0, n_gens, n_steps)
    return np.where(rng.random(n_steps) < hold, HOLD, moves)


def random_walk_stream(spec: WalkSpec, rng: np.random.Generator | None = None,
                       chunk: int = 4096) -> Iterator[int]:
    """Lazily yield exactly ``spec.length`` step indices (HOLD for a hold)."""
    rng = rng or spec.rng()
    k, h = len(spec.generators), spec.hold_probability
    left = spec.length
    while left > 0:
        n = min(chunk, left)
        yield from draw_steps(n, k, h, rng).tolist()
        left -= n


def symplectic_image(steps: Sequence[int], gens: Sequence[MappingClassGen],
                     modulus: int | None = None) -> np.ndarray:
    """phi_* = M_{s_1} M_{s_2} ... M_{s_L} (exact integers unless a modulus is given)."""
    ngens = gens[0].ngens
    if modulus is None:
        P = np.eye(ngens, dtype=object)
        mats = [t.matrix.astype(object) for t in gens]
    else:
        P = np.eye(ngens, dtype=np.int64)
        mats = [t.matrix % modulus for t in gens]
    for s in steps:
        if s == HOLD:
            continue
        P = P.dot(mats[s])
        if modulus is not None:
            P %= modulus
    return P


def transvection_column_ops(gen: MappingClassGen) -> list[tuple[int, int, int]]:
    """The matrix of a generator as column operations (dst, src, coef):
    right-multiplying by it adds coef * column src into column dst."""
    M = gen.matrix
    ops = []
    for j in range(M.shape[1]):
        for i in range(M.shape[0]):
            if i != j and M[i, j]:
                ops.append((j, i, int(M[i, j])))
            elif i == j and M[i, j] != 1:
                raise ValueError("not a unipotent elementary matrix")
    return ops


def accumulate_image(P: np.ndarray, gen_ops: list[tuple[int, int, int]], modulus: int | None = None) -> None:
    """In place P <- P * M using precomputed column operations (columns are
    read before any is written)."""
    updates = [(dst, coef * P[:, src]) for dst, src, coef in gen_ops]
    for dst, v in updates:
        P[:, dst] = P[:, dst] + v
    if modulus is not None:
        P %= modulus
