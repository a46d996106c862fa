"""First Betti numbers of finite covers of random Heegaard manifolds.

Two routes compute the same number:

* ``heegaard_presentation`` + ``cover_betti`` build the words phi(b_i),
  project them to the free group on a_1..a_g and rewrite over the kernel of
  f (Reidemeister-Schreier with cosets = elements of Q), then take a Smith
  form.  Word lengths grow exponentially in the walk length, so this route
  is capped.
* ``fox_cover_betti`` carries the Fox Jacobian of the projected relators,
  evaluated in the group ring F_P[Q], along the walk.  The chain rule only
  needs the evolved tuple f . phi_k at each step, so the cost is linear in
  the walk length.  Ranks are taken modulo two large primes.
"""
from __future__ import annotations

import logging
import time
from statistics import median_low
from dataclasses import dataclass, field
from typing import Sequence

import numba
import numpy as np

from .covers import ExperimentReport
from .epi import context, enumerate_E
from .kernels import GenProgram
from .smith import AbelianGroup, cokernel
from .surface import HOLD, MappingClassGen, Word, reduce_word, with_inverses
from .symplectic import integral_h1, integral_walk_image, rank_mod_p

log = logging.getLogger(__name__)

WORD_CAP = 10 ** 6
PRIMES = (2_147_483_647, 2_147_483_629)


class WordLengthExceeded(RuntimeError):
    pass


class NotExtending(ValueError):
    """f does not kill every relator."""


@dataclass(frozen=True)
class FinitePresentation:
    """Generators a_1..a_g (letters +-j); one relator per meridian."""
    ngens: int
    relators: tuple[Word, ...]

    @property
    def deficiency(self) -> int:
        return self.ngens - len(self.relators)

    def abelianization_matrix(self) -> np.ndarray:
        """Exponent sums; column i is relator i."""
        M = np.zeros((self.ngens, len(self.relators)), dtype=np.int64)
        for i, r in enumerate(self.relators):
            for x in r:
                M[abs(x) - 1, i] += 1 if x > 0 else -1
        return M

    def h1(self) -> AbelianGroup:
        return cokernel(self.abelianization_matrix(), self.ngens)


def _project_letter(x: int) -> Word:
    # surface letters: a_i = 2i-1, b_i = 2i
    return () if abs(x) % 2 == 0 else ((1 if x > 0 else -1) * ((abs(x) + 1) // 2),)


def heegaard_presentation(gens: Sequence[MappingClassGen], steps: Sequence[int],
                          cap: int = WORD_CAP) -> FinitePresentation:
    """Presentation of pi_1(N_phi) for phi = tau_{s_1} ... tau_{s_L}.

    The projection to the a-letters is a homomorphism, so only projected
    images are stored: psi_{k+1}(y) = psi_k(tau_{s_{k+1}}(y)).
    """
    n = gens[0].ngens
    g = n // 2
    images: list[Word] = [_project_letter(x) for x in range(1, n + 1)]
    for s in steps:
        if s == HOLD:
            continue
        t = gens[s]
        new = {}
        for y in t.changed:
            w: list[int] = []
            for x in t.images[y]:
                img = images[abs(x) - 1]
                w.extend(img if x > 0 else [-z for z in reversed(img)])
            new[y] = reduce_word(w)
            if len(new[y]) > cap:
                raise WordLengthExceeded(f"relator length {len(new[y])} exceeds cap {cap}")
        for y, w in new.items():
            images[y] = w
    return FinitePresentation(g, tuple(images[2 * i + 1] for i in range(g)))


@dataclass(frozen=True)
class CoverHomology:
    betti: int
    torsion: tuple[int, ...]
    ngens: int
    nrels: int


def coset_table(f: Sequence[int], G) -> tuple[np.ndarray, np.ndarray]:
    """Right action of a_j on cosets (= elements of Q) and a BFS tree.

    Returns (action[h, j], tree_mask[h, j]) where tree edges are the
    Schreier generators set to 1.
    """
    table = G.table
    nQ, g = table.shape[0], len(f)
    action = table[:, np.asarray(f, dtype=np.int64)]
    tree = np.zeros((nQ, g), dtype=bool)
    seen = np.zeros(nQ, dtype=bool)
    seen[G.identity] = True
    queue = [G.identity]
    while queue:
        h = queue.pop(0)
        for j in range(g):
            k = action[h, j]
            if not seen[k]:
                seen[k] = True
                tree[h, j] = True
                queue.append(k)
    if not seen.all():
        raise ValueError("f is not surjective: the cover is disconnected")
    return action, tree


def cover_betti(pres: FinitePresentation, f: Sequence[int], Q) -> CoverHomology:
    """H_1 of the cover of the presented complex with group ker f."""
    ctx = context(Q)
    G = ctx.G
    if len(f) != pres.ngens:
        raise ValueError("f must assign one element per generator")
    action, tree = coset_table(f, G)
    nQ, g = action.shape
    inv_action = np.empty_like(action)
    for j in range(g):
        inv_action[action[:, j], j] = np.arange(nQ)
    col = -np.ones((nQ, g), dtype=np.int64)
    free = [(h, j) for h in range(nQ) for j in range(g) if not tree[h, j]]
    for c, (h, j) in enumerate(free):
        col[h, j] = c
    rows = []
    for r in pres.relators:
        for h0 in range(nQ):
            v = np.zeros(len(free), dtype=np.int64)
            h = h0
            for x in r:
                j = abs(x) - 1
                if x > 0:
                    if col[h, j] >= 0:
                        v[col[h, j]] += 1
                    h = action[h, j]
                else:
                    h = inv_action[h, j]
                    if col[h, j] >= 0:
                        v[col[h, j]] -= 1
            if h != h0:
                raise NotExtending("f does not kill the relators")
            rows.append(v)
    assert len(free) == nQ * g - (nQ - 1)
    M = np.array(rows, dtype=object).T if rows else np.zeros((len(free), 0), dtype=object)
    H = cokernel(M, len(free)) if M.shape[1] else AbelianGroup(len(free), ())
    return CoverHomology(H.rank, H.torsion, len(free), len(rows))


# -- Fox calculus along the walk ----------------------------------------------------

@numba.njit(cache=True)
def _fox_walk(T, D, table, inv, identity, steps, upd_ptr, target, let_ptr, coord, inverse, P):
    m, n = T.shape
    g = D.shape[2]
    nQ = D.shape[3]
    maxu = 0
    for s in range(upd_ptr.shape[0] - 1):
        maxu = max(maxu, upd_ptr[s + 1] - upd_ptr[s])
    newD = np.zeros((maxu, g, nQ), dtype=np.int64)
    newT = np.empty(maxu, dtype=T.dtype)
    for s in steps:
        if s < 0:
            continue
        u0, u1 = upd_ptr[s], upd_ptr[s + 1]
        for i in range(m):
            for u in range(u0, u1):
                acc = newD[u - u0]
                acc[:, :] = 0
                v = identity
                for l in range(let_ptr[u], let_ptr[u + 1]):
                    z = coord[l]
                    x = T[i, z]
                    if inverse[l]:
                        v = table[v, inv[x]]
                        for j in range(g):
                            for h in range(nQ):
                                c = D[i, z, j, h]
                                if c:
                                    k = table[v, h]
                                    acc[j, k] = (acc[j, k] - c) % P
                    else:
                        for j in range(g):
                            for h in range(nQ):
                                c = D[i, z, j, h]
                                if c:
                                    k = table[v, h]
                                    acc[j, k] = (acc[j, k] + c) % P
                        v = table[v, x]
                newT[u - u0] = v
            for u in range(u0, u1):
                T[i, target[u]] = newT[u - u0]
                D[i, target[u]] = newD[u - u0]


def fox_initial(m: int, g: int, nQ: int, identity: int) -> np.ndarray:
    """d psi_0(y) / d a_j: a_i -> delta_ij . 1, b_i -> 0."""
    D = np.zeros((m, 2 * g, g, nQ), dtype=np.int64)
    for i in range(g):
        D[:, 2 * i, i, identity] = 1
    return D


def group_ring_block_matrix(J: np.ndarray, table: np.ndarray, P: int) -> np.ndarray:
    """Left-regular matrix of a g x g matrix over F_P[Q] (shape (g, g, |Q|))."""
    g, _, nQ = J.shape
    M = np.zeros((g * nQ, g * nQ), dtype=np.int64)
    for i in range(g):
        for j in range(g):
            for v in np.flatnonzero(J[i, j]):
                M[i * nQ + table[v], j * nQ + np.arange(nQ)] = J[i, j, v]
    return M % P


def fox_betti_from_jacobian(J: np.ndarray, table: np.ndarray, primes: Sequence[int] = PRIMES) -> int:
    """beta_1 = g|Q| - (|Q| - 1) - rank; rank maximised over the primes."""
    g, _, nQ = J[0].shape
    rank = max(rank_mod_p(group_ring_block_matrix(Jp, table, p), p) for Jp, p in zip(J, primes))
    return g * nQ - (nQ - 1) - rank


@dataclass
class FoxWalkResult:
    tuples: np.ndarray          # f . phi for each starting f
    jacobians: list[np.ndarray]  # one (m, g, g, |Q|) array per prime


def fox_walk(Q, f_rows: np.ndarray, gens: Sequence[MappingClassGen], steps: np.ndarray,
             primes: Sequence[int] = PRIMES) -> FoxWalkResult:
    ctx = context(Q)
    G = ctx.G
    T0 = np.array(f_rows, dtype=np.int64, copy=True)
    m, n = T0.shape
    g = n // 2
    prog = GenProgram.compile(gens)
    steps = np.asarray(steps, dtype=np.int64)
    jac, T = [], None
    for p in primes:
        T = T0.copy()
        D = fox_initial(m, g, G.order, G.identity)
        _fox_walk(T, D, G.table, G.inv, G.identity, steps, prog.upd_ptr, prog.target, prog.let_ptr,
                  prog.coord, prog.inverse, p)
        jac.append(D[:, 1::2])
    return FoxWalkResult(T, jac)


def fox_cover_betti(Q, f: Sequence[int], gens: Sequence[MappingClassGen], steps: Sequence[int],
                    primes: Sequence[int] = PRIMES) -> int:
    """beta_1 of the Q-cover of N_phi given by f on the a-generators."""
    ctx = context(Q)
    G = ctx.G
    g = len(f)
    row = np.full((1, 2 * g), G.identity, dtype=np.int64)
    row[0, 0::2] = f
    res = fox_walk(Q, row, gens, steps, primes)
    if np.any(res.tuples[0, 1::2] != G.identity):
        raise NotExtending("f does not extend over the second handlebody")
    return fox_betti_from_jacobian([Jp[0] for Jp in res.jacobians], G.table, primes)


# -- experiments ----------------------------------------------------------------------

@dataclass
class BettiTrendPoint:
    length: int
    samples: int
    positive: int
    walks: int
    word_route_checked: int
    word_route_dropped: int
    report: ExperimentReport = field(repr=False)

    @property
    def frequency(self) -> float:
        return self.positive / self.samples if self.samples else float("nan")


def betti_trend_point(Q, g: int, length: int, samples: int, seed: int,
                      generator_set: str = "humphries", check_words: int = 20,
                      cap: int = WORD_CAP, max_walks: int | None = None,
                      max_drops: int = 3) -> BettiTrendPoint:
    """Sample walks of a fixed length until ``samples`` pairs (phi, f) with f
    in E extending over N_phi are collected; count beta_1 > 0.

    The first ``check_words`` extending pairs are recomputed by explicit
    rewriting when their relators fit under ``cap``; after ``max_drops``
    overflows the rewriting route is abandoned for this length.
    """
    from .surface import GENERATOR_SETS

    ctx = context(Q)
    G = ctx.G
    gens = with_inverses(GENERATOR_SETS[generator_set](g))
    E = enumerate_E(Q, g)
    rng = np.random.default_rng([seed, length])
    t0 = time.perf_counter()
    hist: dict[int, int] = {}
    positive = collected = walks = checked = dropped = 0
    max_walks = max_walks or 1000 * samples
    while collected < samples and walks < max_walks:
        steps = rng.integers(0, len(gens), size=length)
        walks += 1
        res = fox_walk(Q, E, gens, steps)
        ok = np.flatnonzero(np.all(res.tuples[:, 1::2] == G.identity, axis=1))
        for i in ok:
            if collected >= samples:
                break
            b = fox_betti_from_jacobian([Jp[i] for Jp in res.jacobians], G.table)
            if checked + dropped < check_words and dropped < max_drops:
                try:
                    pres = heegaard_presentation(gens, steps, cap=cap)
                    ch = cover_betti(pres, E[i, 0::2], Q)
                    if ch.betti != b:
                        raise AssertionError(f"rewriting gives beta_1={ch.betti}, Fox route {b}")
                    checked += 1
                except WordLengthExceeded as exc:
                    dropped += 1
                    log.info("word route dropped at L=%d: %s", length, exc)
            hist[b] = hist.get(b, 0) + 1
            positive += b > 0
            collected += 1
    cfg = dict(group=str(Q), genus=g, length=length, samples=samples, seed=seed,
               generator_set=generator_set)
    rep = ExperimentReport(cfg, collected, positive, hist, time.perf_counter() - t0,
                           dict(walks=walks, word_route_checked=checked, word_route_dropped=dropped))
    return BettiTrendPoint(length, collected, positive, walks, checked, dropped, rep)


def betti_trend_experiment(Q, g: int = 2, lengths: Sequence[int] = (100, 1000, 10000),
                           samples: int = 1000, seed: int = 0, **kw) -> list[BettiTrendPoint]:
    return [betti_trend_point(Q, g, L, samples, seed, **kw) for L in lengths]


def is_non_increasing(points: Sequence[BettiTrendPoint]) -> bool:
    fr = [p.frequency for p in points]
    return all(a >= b for a, b in zip(fr, fr[1:]))


# -- integral homology of N_phi -------------------------------------------------------

@dataclass
class HomologyTrendPoint:
    length: int
    orders: list[int]           # |H_1|, 0 when infinite
    median_order: int | float   # lower median; inf when most are infinite
    rational_positive: int      # samples with beta_1 > 0 (rank deficiency mod two primes)
    rational_samples: int


@numba.njit(cache=True)
def _walk_mod(P, steps, dst, src, coef, ptr, p):
    n = P.shape[0]
    for s in steps:
        if s < 0:
            continue
        for u in range(ptr[s], ptr[s + 1]):
            d, c, k = dst[u], src[u], coef[u]
            for r in range(n):
                P[r, d] = (P[r, d] + k * P[r, c]) % p


def _column_program(gens: Sequence[MappingClassGen]):
    from .surface import transvection_column_ops

    dst, src, coef, ptr = [], [], [], [0]
    for t in gens:
        for d, s, c in transvection_column_ops(t):
            dst.append(d)
            src.append(s)
            coef.append(c)
        ptr.append(len(dst))
    a = lambda v: np.asarray(v, dtype=np.int64)
    return a(dst), a(src), a(coef), a(ptr)


def rational_betti_mod_primes(gens: Sequence[MappingClassGen], steps: np.ndarray,
                              primes: Sequence[int] = PRIMES) -> int:
    """g - rank of the Heegaard block, rank maximised over the primes."""
    n = gens[0].ngens
    prog = _column_program(gens)
    best = 0
    for p in primes:
        P = np.eye(n, dtype=np.int64)
        _walk_mod(P, np.asarray(steps, dtype=np.int64), *prog, p)
        best = max(best, rank_mod_p(P[0::2, 1::2], p))
    return n // 2 - best


def homology_trend(g: int = 2, lengths: Sequence[int] = (100, 1000, 10000), walks: int = 100,
                   rational_samples: int = 1000, seed: int = 0,
                   generator_set: str = "humphries") -> list[HomologyTrendPoint]:
    from .surface import GENERATOR_SETS

    gens = with_inverses(GENERATOR_SETS[generator_set](g))
    out = []
    for L in lengths:
        rng = np.random.default_rng([seed, L])
        orders = []
        for _ in range(walks):
            steps = rng.integers(0, len(gens), size=L)
            orders.append(integral_h1(integral_walk_image(gens, steps)).order)
        pos = 0
        for _ in range(rational_samples):
            steps = rng.integers(0, len(gens), size=L)
            pos += rational_betti_mod_primes(gens, steps) > 0
        # infinite H_1 sorts above every finite order
        med = median_low([float("inf") if o == 0 else o for o in orders])
        out.append(HomologyTrendPoint(L, orders, med, pos, rational_samples))
    return out


__all__ = [
    "WORD_CAP", "PRIMES", "WordLengthExceeded", "NotExtending", "FinitePresentation",
    "heegaard_presentation", "CoverHomology", "coset_table", "cover_betti", "fox_walk",
    "fox_cover_betti", "fox_betti_from_jacobian", "group_ring_block_matrix", "BettiTrendPoint",
    "betti_trend_point", "betti_trend_experiment", "is_non_increasing", "HomologyTrendPoint",
    "rational_betti_mod_primes", "homology_trend",
]
