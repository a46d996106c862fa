"""Symplectic groups and Lagrangians over F_p; homology of Heegaard gluings.

Coordinates on V = F_p^{2g} follow the surface convention
``(a_1, b_1, ..., a_g, b_g)`` with <a_i, b_i> = 1.  J is the span of the
b_i (the meridians); K is the span of the a_i.
"""
from __future__ import annotations

from fractions import Fraction
from itertools import product
from typing import Sequence

import numpy as np

from .smith import AbelianGroup, cokernel
from .surface import (HOLD, MappingClassGen, draw_steps, symplectic_form, transvection_column_ops,
                      with_inverses, GENERATOR_SETS)


# -- closed-form counts --------------------------------------------------------

def sp_order(g: int, p: int) -> int:
    out = p ** (g * g)
    for k in range(1, g + 1):
        out *= p ** (2 * k) - 1
    return out


def count_lagrangians(g: int, p: int) -> int:
    out = 1
    for k in range(1, g + 1):
        out *= p ** k + 1
    return out


def count_transverse(g: int, p: int) -> int:
    return p ** (g * (g + 1) // 2)


def count_by_intersection(g: int, p: int, d: int) -> int:
    """Lagrangians meeting a fixed Lagrangian in a d-dimensional subspace."""
    if not 0 <= d <= g:
        return 0
    num, den = 1, 1
    for k in range(1, d + 1):
        num *= p ** (g - k + 1) - 1
        den *= p ** k - 1
    return p ** ((g - d + 1) * (g - d) // 2) * num // den


def homology_dim_distribution(g: int, p: int) -> list[Fraction]:
    """c_d = P(dim H_1(M; F_p) = d) for a uniformly random gluing, d = 0..g."""
    total = count_lagrangians(g, p)
    return [Fraction(count_by_intersection(g, p, d), total) for d in range(g + 1)]


def limit_dim_distribution(p: int, dmax: int = 10, terms: int = 200) -> list[float]:
    """Large-genus limit of c_d: c_0 = prod_k (1 + p^-k)^-1 and
    c_d / c_0 = prod_{k=1..d} (p^k - 1)^-1."""
    c0 = 1.0
    for k in range(1, terms + 1):
        c0 /= 1.0 + p ** (-k)
    out, ratio = [], 1.0
    for d in range(dmax + 1):
        if d:
            ratio /= p ** d - 1
        out.append(c0 * ratio)
    return out


# -- linear algebra mod p ----------------------------------------------------

def rref_mod_p(M: np.ndarray, p: int) -> tuple[np.ndarray, int]:
    """Reduced row echelon form over F_p and the rank."""
    A = np.array(M, dtype=np.int64) % p
    rows, cols = A.shape
    r = 0
    for c in range(cols):
        if r == rows:
            break
        nz = np.flatnonzero(A[r:, c])
        if not nz.size:
            continue
        i = r + nz[0]
        A[[r, i]] = A[[i, r]]
        A[r] = (A[r] * pow(int(A[r, c]), p - 2, p)) % p
        for i in range(rows):
            if i != r and A[i, c]:
                A[i] = (A[i] - A[i, c] * A[r]) % p
        r += 1
    return A, r


def rank_mod_p(M: np.ndarray, p: int) -> int:
    return rref_mod_p(M, p)[1]


def rank_mod_p_batch(A: np.ndarray, p: int) -> np.ndarray:
    """Ranks of a stack of matrices (shape (s, m, n)) over F_p."""
    A = np.array(A, dtype=np.int64) % p
    s, m, n = A.shape
    rank = np.zeros(s, dtype=np.int64)
    inv = np.array([0] + [pow(x, p - 2, p) for x in range(1, p)], dtype=np.int64)
    ar = np.arange(s)
    for c in range(n):
        # pivot row: first row >= rank with a nonzero entry in column c
        rows = np.arange(m)[None, :]
        cand = (A[:, :, c] != 0) & (rows >= rank[:, None])
        has = cand.any(axis=1)
        piv = np.argmax(cand, axis=1)
        idx = ar[has]
        if not idx.size:
            continue
        r = rank[idx]
        pr = piv[idx]
        rowp = A[idx, pr].copy()
        A[idx, pr] = A[idx, r]
        rowp = (rowp * inv[rowp[:, c]][:, None]) % p
        A[idx, r] = rowp
        factors = A[idx, :, c].copy()
        factors[np.arange(len(idx)), r] = 0
        A[idx] = (A[idx] - factors[:, :, None] * rowp[:, None, :]) % p
        rank[idx] += 1
    return rank


def matrix_group_closure_size(gens: Sequence[np.ndarray], p: int, cap: int = 5 * 10 ** 7) -> int:
    """Order of the group generated by invertible matrices over F_p (BFS on
    integer codes)."""
    n = gens[0].shape[0]
    weights = np.array([p ** k for k in range(n * n)], dtype=np.int64)
    if p ** (n * n) >= 2 ** 63:
        raise ValueError("matrix codes overflow int64")
    G = np.stack([np.asarray(g, dtype=np.int64) % p for g in gens])

    def encode(X):
        return X.reshape(len(X), -1) @ weights

    def decode(c):
        return ((c[:, None] // weights[None, :]) % p).reshape(len(c), n, n)

    ident = np.eye(n, dtype=np.int64)[None]
    seen = encode(ident)
    frontier = seen.copy()
    while frontier.size:
        X = decode(frontier)
        new = np.concatenate([encode(np.einsum("sij,jk->sik", X, g) % p) for g in G])
        new = np.unique(new)
        new = new[~np.isin(new, seen, assume_unique=True)]
        seen = np.union1d(seen, new)
        frontier = new
        if seen.size > cap:
            raise ValueError("closure exceeds cap")
    return int(seen.size)


# -- Lagrangians -----------------------------------------------------------

class LagrangianFp:
    """A Lagrangian subspace stored by its canonical RREF basis."""

    def __init__(self, basis: np.ndarray, p: int):
        R, r = rref_mod_p(basis, p)
        self.p = p
        self.g = R.shape[1] // 2
        if r != self.g:
            raise ValueError("basis does not span a half-dimensional subspace")
        self.rref = R[:r]
        W = symplectic_form(self.g)
        if np.any((self.rref @ W @ self.rref.T) % p):
            raise ValueError("subspace is not isotropic")

    @property
    def key(self) -> bytes:
        return self.rref.tobytes()

    def __eq__(self, other) -> bool:
        return isinstance(other, LagrangianFp) and self.p == other.p and self.key == other.key

    def __hash__(self) -> int:
        return hash((self.p, self.key))

    def intersection_dim(self, other: "LagrangianFp") -> int:
        return 2 * self.g - rank_mod_p(np.vstack([self.rref, other.rref]), self.p)


def meridian_lagrangian(g: int, p: int) -> LagrangianFp:
    B = np.zeros((g, 2 * g), dtype=np.int64)
    for i in range(g):
        B[i, 2 * i + 1] = 1
    return LagrangianFp(B, p)


def enumerate_lagrangians(g: int, p: int) -> list[LagrangianFp]:
    """Brute force: RREF classes of all isotropic g-tuples of vectors."""
    W = symplectic_form(g)
    vecs = np.array(list(product(range(p), repeat=2 * g)), dtype=np.int64)[1:]
    found: dict[bytes, LagrangianFp] = {}

    def extend(chosen: list[np.ndarray]):
        if len(chosen) == g:
            B = np.stack(chosen)
            R, r = rref_mod_p(B, p)
            if r == g and R.tobytes() not in found:
                found[R.tobytes()] = LagrangianFp(B, p)
            return
        if chosen:
            ok = np.all((vecs @ W @ np.stack(chosen).T) % p == 0, axis=1)
            cands = vecs[ok]
        else:
            cands = vecs
        for v in cands:
            if chosen and rank_mod_p(np.stack(chosen + [v]), p) <= len(chosen):
                continue
            # keep the basis lexicographically increasing to cut repeats
            if chosen and tuple(v) <= tuple(chosen[-1]):
                continue
            extend(chosen + [v])

    extend([])
    return list(found.values())


def brute_sp_order(g: int, p: int) -> int:
    """Count matrices preserving the form by column-by-column backtracking."""
    W = symplectic_form(g)
    n = 2 * g
    vecs = np.array(list(product(range(p), repeat=n)), dtype=np.int64)
    form = (vecs @ W @ vecs.T) % p  # form[u, v] = <u, v>

    def count(cols: list[int]) -> int:
        k = len(cols)
        if k == n:
            return 1
        ok = np.ones(len(vecs), dtype=bool)
        for j, c in enumerate(cols):
            ok &= form[c, :] == W[j, k] % p
        cand = np.flatnonzero(ok)
        if k == n - 1:
            return len(cand)
        return sum(count(cols + [int(v)]) for v in cand)

    return count([])


# -- generators and walks ----------------------------------------------------

def transvection(v: np.ndarray, p: int | None = None) -> np.ndarray:
    """x -> x + <x, v> v as a matrix acting on column vectors."""
    v = np.asarray(v, dtype=np.int64)
    g = len(v) // 2
    W = symplectic_form(g)
    # <x, v> = x^T W v, so the matrix is I + v (W v)^T
    M = np.eye(2 * g, dtype=np.int64) + np.outer(v, (W @ v))
    return M % p if p else M


def transvection_generators(g: int, p: int) -> list[np.ndarray]:
    """Transvections along every basis vector and along a_i + a_{i+1}."""
    n = 2 * g
    vs = [np.eye(n, dtype=np.int64)[i] for i in range(n)]
    for i in range(g - 1):
        v = np.zeros(n, dtype=np.int64)
        v[2 * i] = v[2 * i + 2] = 1
        vs.append(v)
    return [transvection(v, p) for v in vs]


def _walk_matrices(mats: Sequence[np.ndarray], p: int, length: int, samples: int,
                   rng: np.random.Generator, hold: float | None = None) -> np.ndarray:
    k = len(mats)
    n = mats[0].shape[0]
    hold = 1.0 / (k + 1) if hold is None else hold
    stack = np.concatenate([np.asarray(mats, dtype=np.int64) % p, np.eye(n, dtype=np.int64)[None]])
    P = np.broadcast_to(np.eye(n, dtype=np.int64), (samples, n, n)).copy()
    for _ in range(length):
        s = draw_steps(samples, k, hold, rng)
        s = np.where(s == HOLD, k, s)
        P = np.einsum("sij,sjk->sik", P, stack[s]) % p
    return P


def walk_matrices(g: int, p: int, length: int, samples: int, rng: np.random.Generator,
                  source: str = "transvections") -> np.ndarray:
    """Endpoints in Sp(2g, F_p) of lazy random walks (generators closed under
    inverses).  ``source`` is "transvections" or a mapping-class generator
    set name ("humphries", "lickorish")."""
    if source == "transvections":
        base = transvection_generators(g, p)
        mats = base + [np.linalg.matrix_power(m, p - 1) % p for m in base]
    else:
        gens = with_inverses(GENERATOR_SETS[source](g))
        mats = [t.matrix % p for t in gens]
    return _walk_matrices(mats, p, length, samples, rng)


def meridian_intersection_dims(P: np.ndarray, p: int) -> np.ndarray:
    """dim(J cap phi J) for each phi in the stack: g - rank of the a-rows of
    the b-columns."""
    g = P.shape[-1] // 2
    block = P[:, 0::2, 1::2]
    return g - rank_mod_p_batch(block, p)


def mc_intersection_distribution(g: int, p: int, length: int, samples: int,
                                 rng: np.random.Generator, source: str = "transvections") -> np.ndarray:
    """Histogram over d = 0..g of dim(J cap phi J) for random walks."""
    P = walk_matrices(g, p, length, samples, rng, source)
    return np.bincount(meridian_intersection_dims(P, p), minlength=g + 1)


# -- integral homology ---------------------------------------------------------

def heegaard_block(P: np.ndarray) -> np.ndarray:
    """a-rows of the b-columns of phi_*: H_1(M_phi) is its cokernel."""
    return np.asarray(P, dtype=object)[0::2, 1::2]


def integral_h1(P: np.ndarray) -> AbelianGroup:
    """H_1(M_phi; Z) = H_1(Sigma) / <J, phi_* J> for an integral symplectic P."""
    return cokernel(heegaard_block(P))


def integral_walk_image(gens: Sequence[MappingClassGen], steps: Sequence[int]) -> np.ndarray:
    """Exact integer phi_* along a walk, by column operations."""
    n = gens[0].ngens
    P = np.eye(n, dtype=object)
    ops = [transvection_column_ops(t) for t in gens]
    for s in steps:
        if s == HOLD:
            continue
        updates = [(dst, coef * P[:, src]) for dst, src, coef in ops[s]]
        for dst, v in updates:
            P[:, dst] = P[:, dst] + v
    return P


def h1_order(P: np.ndarray) -> int:
    """|det| of the Heegaard block (0 when H_1 is infinite)."""
    B = heegaard_block(P)
    return abs(_bareiss_det(B))


def _bareiss_det(M) -> int:
    A = [[int(x) for x in row] for row in M]
    n = len(A)
    if n == 0:
        return 1
    sign, prev = 1, 1
    for k in range(n - 1):
        if A[k][k] == 0:
            sw = next((i for i in range(k + 1, n) if A[i][k]), None)
            if sw is None:
                return 0
            A[k], A[sw] = A[sw], A[k]
            sign = -sign
        for i in range(k + 1, n):
            for j in range(k + 1, n):
                A[i][j] = (A[i][j] * A[k][k] - A[i][k] * A[k][j]) // prev
        prev = A[k][k]
    return sign * A[n - 1][n - 1]
