"""Random balanced presentations and the abelian p-Sylow statistics.

A relator is an unreduced word of length n whose letters are drawn
uniformly from {1, a_1^{+-1}, ..., a_g^{+-1}}.  Words are int8 arrays with
0 for the identity letter and +-k for a_k^{+-1}.
"""
from __future__ import annotations

import math
import time
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Sequence

import numba
import numpy as np
from sympy import primerange

from .catalog import EXPECTED_TABLE_ROWS, UnsupportedGroup, build, parse_spec
from .covers import ExperimentReport
from .epi import context, count_generating_tuples, enumerate_generating_tuples
from .smith import AbelianGroup, cokernel, smith_diagonal


def random_relator(g: int, n: int, seed: int | np.random.Generator | None = None) -> np.ndarray:
    if n < 0:
        raise ValueError("length must be non-negative")
    rng = seed if isinstance(seed, np.random.Generator) else np.random.default_rng(seed)
    return _letters(rng.integers(0, 2 * g + 1, n), g)


def _letters(codes: np.ndarray, g: int) -> np.ndarray:
    # code 0 -> identity, 2k-1 -> a_k, 2k -> a_k^{-1}
    codes = np.asarray(codes, dtype=np.int64)
    k = (codes + 1) // 2
    return np.where(codes == 0, 0, np.where(codes % 2 == 1, k, -k)).astype(np.int8)


# -- quotients onto a fixed group ------------------------------------------------

def _block_table(G, free: np.ndarray, b: int) -> np.ndarray:
    """value of every length-b letter block at every tuple: shape (m, (2g+1)^b);
    block digits are read most significant first."""
    m, g = free.shape
    letters = np.empty((m, 2 * g + 1), dtype=np.int64)
    letters[:, 0] = G.identity
    letters[:, 1::2] = free
    letters[:, 2::2] = G.inv[free]
    vals = np.full((m, 1), G.identity, dtype=np.int64)
    for _ in range(b):
        vals = G.table[vals[:, :, None], letters[:, None, :]].reshape(m, -1)
    return vals


@numba.njit(cache=True)
def _mc_kernel(blocks, tail, table, identity, r, nb, rem, samples, seed):
    """Count presentations (r relators, each nb blocks plus an optional tail
    block) killed by at least one tuple.  blocks has shape (n_blocks, m)."""
    np.random.seed(seed)
    m = blocks.shape[1]
    nblk, ntail = blocks.shape[0], tail.shape[0]
    v = np.empty(m, dtype=table.dtype)
    live = np.empty(m, dtype=np.int64)
    hits = 0
    for _ in range(samples):
        nlive = m
        for f in range(m):
            live[f] = f
        for _j in range(r):
            # only tuples that killed every earlier relator are evaluated
            for i in range(nlive):
                v[i] = identity
            for _k in range(nb):
                d = np.random.randint(0, nblk)
                for i in range(nlive):
                    v[i] = table[v[i], blocks[d, live[i]]]
            if rem:
                d = np.random.randint(0, ntail)
                for i in range(nlive):
                    v[i] = table[v[i], tail[d, live[i]]]
            k = 0
            for i in range(nlive):
                if v[i] == identity:
                    live[k] = live[i]
                    k += 1
            nlive = k
            if nlive == 0:
                break
        if nlive > 0:
            hits += 1
    return hits


def _block_size(g: int, m: int, n: int, budget: int) -> int:
    b = 1
    while (2 * g + 1) ** (b + 1) * m <= budget and b + 1 <= max(n, 1):
        b += 1
    return b


def balanced_quotient_mc(Q, g: int, r: int, n: int, samples: int, seed: int = 0,
                         budget: int = 2 * 10 ** 7) -> ExperimentReport:
    """Fraction of random presentations <a_1..a_g | R_1..R_r> (each R of length n)
    with some epimorphism onto Q.

    A run of b consecutive uniform letters is a uniform index into the
    (2g+1)^b possible blocks, so relators are drawn block-wise against a
    precomputed table of block values at every generating tuple.
    """
    t0 = time.perf_counter()
    ctx = context(Q)
    G = ctx.G
    free = enumerate_generating_tuples(ctx, g)
    m = len(free)
    b = _block_size(g, max(m, 1), n, budget)
    dt = np.int16 if G.n < 2 ** 15 else np.int32
    if m == 0 or samples == 0:
        hits = 0
    elif r == 0:
        hits = samples
    else:
        blocks = np.ascontiguousarray(_block_table(G, free, b).T.astype(dt))
        tail = np.ascontiguousarray(_block_table(G, free, n % b).T.astype(dt)) if n % b else blocks[:1]
        hits = _mc_kernel(blocks, tail, G.table.astype(dt), dt(G.identity), r, n // b, n % b, samples,
                          seed % 2 ** 32)
    cfg = {"group": str(ctx.cat.spec), "g": g, "r": r, "n": n, "samples": samples, "seed": seed}
    return ExperimentReport(cfg, samples, int(hits), {1: int(hits), 0: samples - int(hits)},
                            time.perf_counter() - t0, {"block": b, "classes": m})


@dataclass(frozen=True)
class BinomialLimit:
    n: int           # generating g-tuples mod Aut
    mu: float
    p: float         # 1 - (1 - |Q|^-g)^n
    p_poisson: float


def balanced_quotient_exact_binomial(Q, g: int = 2, n: int | None = None) -> BinomialLimit:
    if n is None:
        n = count_generating_tuples(Q, g) if g == 2 else len(enumerate_generating_tuples(Q, g))
    q = 1.0 / build(Q).group.n ** g
    mu = n * q
    return BinomialLimit(n, mu, -math.expm1(n * math.log1p(-q)), -math.expm1(-mu))


# -- the expected-quotient table ---------------------------------------------------

@dataclass(frozen=True)
class TableRow:
    name: str
    order: int
    gen_pairs: int
    out: int
    exp_2gen: float
    exp_ngen: float


def expected_table_row(Q) -> TableRow:
    cat = build(Q)
    order = cat.group.n
    pairs = count_generating_tuples(cat, 2)
    aut = cat.meta.order_aut or cat.aut.size
    return TableRow(str(cat.spec), order, pairs, aut // order if cat.meta.simple else cat.meta.order_out,
                    pairs / order ** 2, 1 / aut)


def reference_rows() -> list[TableRow]:
    return [TableRow(*row) for row in EXPECTED_TABLE_ROWS]


# -- abelianization ------------------------------------------------------------------

def abelianization_matrix(relators: Sequence[np.ndarray], g: int) -> np.ndarray:
    """(i, j) entry: exponent sum of a_{i+1} in relator j."""
    M = np.zeros((g, len(relators)), dtype=np.int64)
    for j, w in enumerate(relators):
        w = np.asarray(w, dtype=np.int64)
        for i in range(g):
            M[i, j] = int(np.count_nonzero(w == i + 1)) - int(np.count_nonzero(w == -(i + 1)))
    return M


def exponent_sums(codes: np.ndarray, g: int) -> np.ndarray:
    """Batch exponent sums from raw letter codes, shape (..., n) -> (..., g)."""
    L = _letters(codes, g).astype(np.int64)
    return np.stack([(L == i + 1).sum(-1) - (L == -(i + 1)).sum(-1) for i in range(g)], axis=-1)


def abelianization(relators: Sequence[np.ndarray], g: int) -> AbelianGroup:
    return cokernel(abelianization_matrix(relators, g), g)


# -- p-Sylow distributions -------------------------------------------------------------

def _series_mul(a: list[Fraction], b: list[Fraction], kmax: int) -> list[Fraction]:
    out = [Fraction(0)] * (kmax + 1)
    for i, x in enumerate(a):
        if x:
            for j, y in enumerate(b[:kmax + 1 - i]):
                out[i + j] += x * y
    return out


def sylow_order_distribution(g: int, p: int, kmax: int) -> list[Fraction]:
    """P(|Sylow_p| = p^k) for k <= kmax: coefficients of
    prod_{j=1..g} (p^j - 1)/(p^j - t)."""
    out = [Fraction(1)] + [Fraction(0)] * kmax
    for j in range(1, g + 1):
        pj = p ** j
        factor = [Fraction(pj - 1, pj) * Fraction(1, pj ** k) for k in range(kmax + 1)]
        out = _series_mul(out, factor, kmax)
    return out


def count_rank(m: int, n: int, r: int, p: int) -> int:
    """Number of m x n matrices over F_p of rank r."""
    if r > min(m, n) or r < 0:
        return 0
    num = 1
    for i in range(r):
        num *= (p ** m - p ** i) * (p ** n - p ** i)
    den = 1
    for i in range(r):
        den *= p ** r - p ** i
    return num // den


def corank_probability(h: int, k: int, p: int) -> Fraction:
    """P(h random vectors of F_p^h span a subspace of rank h - k)."""
    return Fraction(count_rank(h, h, h - k, p), p ** (h * h))


def type_from_cyclic(exponents: Iterable[int]) -> tuple[int, ...]:
    """Layer ranks rho_0, rho_1, ... of sum Z/p^{e} (zeros dropped at the end)."""
    ex = [e for e in exponents if e > 0]
    top = max(ex, default=0)
    return tuple(sum(1 for e in ex if e > i) for i in range(top))


def type_monomial(rho: Sequence[int]) -> dict[int, int]:
    """Exponents of t_k: one factor t_{rho_i} per nonzero layer."""
    out: dict[int, int] = {}
    for r in rho:
        if r:
            out[r] = out.get(r, 0) + 1
    return out


def parse_type(text: str) -> tuple[int, ...]:
    """'1' (trivial), 'Z/4', 'Z/2+Z/2', '(Z/2)^2', 'Z/p^2' style strings give
    layer ranks; the prime is implicit."""
    text = text.replace(" ", "")
    if text in ("", "0", "1", "trivial"):
        return ()
    exps = []
    for part in text.split("+"):
        mult = 1
        if part.startswith("(") and ")^" in part:
            part, mult = part[1:].split(")^")
            mult = int(mult)
        q = int(part.split("/")[1])
        exps += [_valuation_of_prime_power(q)] * mult
    return type_from_cyclic(exps)


def _valuation_of_prime_power(q: int) -> int:
    p = next(d for d in range(2, q + 1) if q % d == 0)
    e = 0
    while q % p == 0:
        q //= p
        e += 1
    if q != 1:
        raise ValueError("not a prime power")
    return e


def afp_chain_probability(g: int, p: int, rho: Sequence[int]) -> Fraction:
    """Exact probability of layer ranks ``rho`` from the layered-rank chain."""
    h = g
    prob = Fraction(1)
    for r in list(rho) + [0]:
        if r > h:
            return Fraction(0)
        prob *= corank_probability(h, r, p)
        if r == 0:
            break
        h = r
    return prob


def _afp_numerator(g: int, p: int) -> dict[tuple[int, ...], Fraction]:
    if g == 1:
        return {(0,): Fraction(p - 1)}
    if g == 2:
        c = (p - 1) ** 2 * (1 + p)
        return {(0, 0): Fraction(c * p ** 2), (1, 0): Fraction(c)}
    if g == 3:
        c = (p - 1) ** 3 * (1 + 2 * p + 2 * p ** 2 + p ** 3)
        return {(0, 0, 0): Fraction(c * p ** 8), (1, 0, 0): Fraction(c * (p ** 5 + p ** 6)),
                (0, 1, 0): Fraction(c * (p ** 2 + p ** 3)), (1, 1, 0): Fraction(c)}
    raise UnsupportedGroup("closed-form generating function only for g <= 3")


def afp_series_coefficient(g: int, p: int, monomial: dict[int, int]) -> Fraction:
    """Coefficient of prod t_k^{e_k} in N(t) / prod_k (p^{k^2} - t_k)."""
    e = tuple(monomial.get(k, 0) for k in range(1, g + 1))
    if any(k > g for k in monomial):
        return Fraction(0)
    total = Fraction(0)
    for m, c in _afp_numerator(g, p).items():
        if all(mi <= ei for mi, ei in zip(m, e)):
            term = c
            for k, (mi, ei) in enumerate(zip(m, e), start=1):
                term /= Fraction(p ** (k * k)) ** (ei - mi + 1)
            total += term
    return total


def afp_probability(g: int, p: int, abelian_type: str | Sequence[int]) -> Fraction:
    """Probability that the p-Sylow part of the abelianization of a random
    g-generator g-relator group has the given type, read off the generating
    function (g <= 3) or, for larger g, from the layered-rank chain."""
    rho = parse_type(abelian_type) if isinstance(abelian_type, str) else tuple(abelian_type)
    if g <= 3:
        return afp_series_coefficient(g, p, type_monomial(rho))
    return afp_chain_probability(g, p, rho)


def p_type_of_matrix(M: np.ndarray, p: int) -> tuple[int, ...]:
    """Layer ranks of the p-part of coker(M) for a square nonsingular M."""
    exps = []
    for d in smith_diagonal(M):
        if d == 0:
            raise ValueError("singular matrix")
        e = 0
        while d % p == 0:
            d //= p
            e += 1
        exps.append(e)
    return type_from_cyclic(exps)


def simulate_afp(g: int, p: int, samples: int, seed: int = 0, digits: int = 12) -> dict[tuple[int, ...], int]:
    """Empirical p-types of coker(M) for random g x g matrices with entries
    uniform modulo p^digits (a proxy for Haar measure on Z_p)."""
    rng = np.random.default_rng(seed)
    mod = p ** digits
    out: dict[tuple[int, ...], int] = {}
    for _ in range(samples):
        M = [[int(x) for x in row] for row in rng.integers(0, mod, (g, g), dtype=np.int64)]
        d = smith_diagonal(M)
        exps = []
        for x in d:
            e = 0
            x = x if x else mod  # zero invariant factor: valuation >= digits
            while x % p == 0 and e < digits:
                x //= p
                e += 1
            exps.append(e)
        t = type_from_cyclic(exps)
        out[t] = out.get(t, 0) + 1
    return out


# -- "all abelian quotients cyclic" -----------------------------------------------------

def _corank_le1(g: int | None, p: int) -> float:
    """P(random g x g matrix over F_p has corank <= 1); g=None is the limit."""
    if g is not None:
        return float(corank_probability(g, 0, p) + corank_probability(g, 1, p))
    # limit law: P(corank k) = p^{-k^2} prod_{i>=1}(1-p^-i) / prod_{i<=k}(1-p^-i)^2
    eta = math.prod(1 - p ** -i for i in range(1, 200))
    return eta * (1 + p ** -1 / (1 - p ** -1) ** 2)


def all_cyclic_probability(g: int | None, prime_bound: int = 10 ** 5) -> float:
    """prod_p P(no epimorphism onto (Z/p)^2); the neglected primes change the
    product by at most sum_{p > bound} p^-4 ~ bound^-3."""
    if g is not None and g <= 1:
        return 1.0
    out = 1.0
    for p in primerange(2, prime_bound):
        out *= _corank_le1(g, int(p))
    return out


__all__ = [
    "random_relator", "balanced_quotient_mc", "balanced_quotient_exact_binomial", "BinomialLimit",
    "expected_table_row", "reference_rows", "TableRow", "abelianization_matrix", "abelianization",
    "exponent_sums", "sylow_order_distribution", "count_rank", "corank_probability", "afp_probability",
    "afp_series_coefficient", "afp_chain_probability", "parse_type", "type_from_cyclic", "type_monomial",
    "p_type_of_matrix", "simulate_afp", "all_cyclic_probability",
]
