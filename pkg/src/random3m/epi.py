"""Epimorphisms from surface and free groups onto a finite group, modulo Aut(Q).

Tuples are integer arrays of element indices.  Surface tuples have arity 2g
in the order (a_1, b_1, ..., a_g, b_g); free tuples have arity g.  A class
modulo Aut(Q) is represented by its lexicographically smallest tuple.
"""
from __future__ import annotations

import csv
import math
from dataclasses import dataclass, field
from functools import cached_property
from typing import Sequence

import numpy as np
from scipy.sparse import coo_matrix
from scipy.sparse.csgraph import connected_components

from .catalog import CatalogGroup, CoverUnavailable, SchurCoverData, build, schur_cover
from .groups import AutomorphismSet, FiniteGroup, GroupTooLarge, SubgroupJoin, fold_convolution_count, product_generates
from .surface import MappingClassGen, CompiledGen, humphries_generators, relator_value

_CHUNK = 4 * 10 ** 7


class Canonicalizer:
    """Lexicographic minimum over the Aut(Q)-orbit of tuples."""

    def __init__(self, aut: AutomorphismSet):
        self.aut = aut
        self.G = aut.group
        self.AE = aut.elements
        self.orbit_min = aut.element_orbit_min
        self.transporters = aut.transporters

    @cached_property
    def representatives(self) -> np.ndarray:
        """Smallest element of each Aut-orbit on Q."""
        return np.flatnonzero(self.orbit_min == np.arange(self.G.n))

    def canonical(self, T: np.ndarray) -> np.ndarray:
        T = np.asarray(T, dtype=np.int64)
        if T.ndim == 1:
            return self.canonical(T[None])[0]
        m, k = T.shape
        out = np.empty_like(T)
        if m == 0:
            return out
        order = np.argsort(T[:, 0], kind="stable")
        firsts, starts = np.unique(T[order, 0], return_index=True)
        bounds = list(starts) + [m]
        for v, s, e in zip(firsts, bounds[:-1], bounds[1:]):
            idx = order[s:e]
            C = self.transporters[v]
            A = self.AE[C].astype(np.int64)
            step = max(1, _CHUNK // max(1, len(C) * k))
            for c0 in range(0, len(idx), step):
                sub = idx[c0:c0 + step]
                out[sub] = _lexmin(A, T[sub])
        return out

    def is_canonical(self, T: np.ndarray) -> np.ndarray:
        T = np.asarray(T, dtype=np.int64)
        return np.all(self.canonical(T) == T, axis=-1)

    def orbit(self, t: Sequence[int]) -> np.ndarray:
        """The whole raw Aut-orbit of one tuple (unique rows)."""
        t = np.asarray(t, dtype=np.int64)
        return np.unique(self.AE[:, t].astype(np.int64), axis=0)


def _lexmin(A: np.ndarray, T: np.ndarray) -> np.ndarray:
    """Row-wise lexicographic minimum of A[:, T] over the first axis."""
    imgs = A[:, T]  # (c, m, k)
    alive = np.ones(imgs.shape[:2], dtype=bool)
    out = np.empty(T.shape, dtype=np.int64)
    big = np.iinfo(np.int64).max
    for j in range(T.shape[1]):
        vals = np.where(alive, imgs[:, :, j], big)
        mn = vals.min(axis=0)
        out[:, j] = mn
        alive &= vals == mn
    return out


def tuple_keys(T: np.ndarray, n: int) -> np.ndarray:
    """Injective int64 keys (base-n digits) for tuples of arity k."""
    T = np.asarray(T, dtype=np.int64)
    k = T.shape[-1]
    if n ** k >= 2 ** 63:
        raise GroupTooLarge("tuple keys overflow int64")
    w = n ** np.arange(k - 1, -1, -1, dtype=np.int64)
    return T @ w


@dataclass
class GroupContext:
    """Everything the enumeration needs about one catalog group."""
    cat: CatalogGroup

    @property
    def G(self) -> FiniteGroup:
        return self.cat.group

    @cached_property
    def canon(self) -> Canonicalizer:
        return Canonicalizer(self.cat.aut)

    @cached_property
    def lattice(self) -> SubgroupJoin:
        return SubgroupJoin(self.G)

    @property
    def aut_order(self) -> int:
        return self.cat.aut.size


_CONTEXTS: dict[str, GroupContext] = {}


def context(Q) -> GroupContext:
    if isinstance(Q, GroupContext):
        return Q
    cat = Q if isinstance(Q, CatalogGroup) else build(Q)
    key = str(cat.spec)
    if key not in _CONTEXTS:
        _CONTEXTS[key] = GroupContext(cat)
    return _CONTEXTS[key]


# -- E: generating tuples of the handlebody group -----------------------------

def enumerate_generating_tuples(Q, g: int) -> np.ndarray:
    """Canonical generating g-tuples of Q modulo Aut(Q), orderly generation:
    every prefix of a canonical tuple is canonical."""
    ctx = context(Q)
    canon, lat = ctx.canon, ctx.lattice
    n = ctx.G.n
    prefixes = canon.representatives[:, None].astype(np.int64)
    for _ in range(g - 1):
        nxt = []
        step = max(1, 2 * 10 ** 6 // n)
        for start in range(0, len(prefixes), step):
            P = prefixes[start:start + step]
            cand = np.concatenate([np.repeat(P, n, axis=0), np.tile(np.arange(n), len(P))[:, None]], axis=1)
            nxt.append(cand[canon.is_canonical(cand)])
        prefixes = np.concatenate(nxt)
    return prefixes[lat.generates(prefixes)]


def handlebody_tuples(free: np.ndarray, identity: int) -> np.ndarray:
    """Surface tuples (a_1, 1, ..., a_g, 1) from free-group tuples."""
    m, g = free.shape
    out = np.full((m, 2 * g), identity, dtype=np.int64)
    out[:, 0::2] = free
    return out


def enumerate_E(Q, g: int) -> np.ndarray:
    """Classes of E_g as canonical surface tuples with trivial b-coordinates."""
    ctx = context(Q)
    return handlebody_tuples(enumerate_generating_tuples(ctx, g), ctx.G.identity)


def count_generating_tuples(Q, g: int = 2) -> int:
    """|E'(Q, g)| = (number of generating g-tuples) / |Aut(Q)|, counted via
    conjugacy classes without enumerating Aut(Q) (g = 2 only)."""
    if g != 2:
        return len(enumerate_generating_tuples(Q, g))
    cat = Q if isinstance(Q, CatalogGroup) else build(Q)
    G = cat.group
    lat = SubgroupJoin(G)
    total = 0
    for cls in G.conjugacy_classes:
        r = int(cls[0])
        cyc = int(lat.row(0)[r])
        total += len(cls) * int(np.count_nonzero(lat.row(cyc) == lat.full_id))
    aut = cat.meta.order_aut or cat.aut.size
    if total % aut:
        raise AssertionError("generating-tuple count not divisible by |Aut|")
    return total // aut


# -- A: surjective surface tuples -------------------------------------------

def _surjective_mask(ctx: GroupContext, T: np.ndarray) -> np.ndarray:
    return ctx.lattice.generates(T)


def enumerate_A_brute(Q, g: int = 2, chunk: int = 2 * 10 ** 6) -> np.ndarray:
    """Filter all |Q|^{2g} tuples (small groups only)."""
    ctx = context(Q)
    G, n = ctx.G, ctx.G.n
    k = 2 * g
    if n ** k > 10 ** 8:
        raise GroupTooLarge(f"brute force over {n}^{k} tuples")
    found = []
    for start in range(0, n ** k, chunk):
        codes = np.arange(start, min(n ** k, start + chunk), dtype=np.int64)
        T = np.stack([(codes // n ** (k - 1 - j)) % n for j in range(k)], axis=1)
        T = T[relator_value(T, G) == G.identity]
        T = T[_surjective_mask(ctx, T)]
        found.append(np.unique(ctx.canon.canonical(T), axis=0))
    return np.unique(np.concatenate(found), axis=0)


def enumerate_A_fiber(Q, g: int = 2) -> np.ndarray:
    """Orderly generation through commutator fibers (genus 2)."""
    if g != 2:
        raise ValueError("fiber method implemented for genus 2")
    ctx = context(Q)
    G, canon = ctx.G, ctx.canon
    n = G.n
    AE = canon.AE
    out = []
    for r in canon.representatives:
        stab = canon.transporters[r]  # automorphisms fixing r (r is its orbit min)
        imgs = AE[stab].astype(np.int64)  # (s, n)
        b1s = np.flatnonzero(imgs.min(axis=0) == np.arange(n))
        for b1 in b1s:
            c = G.commutator(int(r), int(b1))
            a2, b2 = G.fiber(int(G.inv[c]))
            T = np.empty((len(a2), 4), dtype=np.int64)
            T[:, 0], T[:, 1], T[:, 2], T[:, 3] = r, b1, a2, b2
            T = T[_surjective_mask(ctx, T)]
            stab2 = stab[imgs[:, b1] == b1]
            if len(stab2) > 1:
                T = T[np.all(_lexmin(AE[stab2].astype(np.int64), T) == T, axis=1)]
            out.append(T)
    A = np.concatenate(out) if out else np.empty((0, 4), dtype=np.int64)
    return A[np.lexsort(A.T[::-1])]


def enumerate_A_orbit_bfs(Q, g: int = 2, seeds: np.ndarray | None = None, expected: int | None = None,
                          probes: int = 2000, rng: np.random.Generator | None = None,
                          gens: Sequence[MappingClassGen] | None = None) -> tuple[np.ndarray, dict]:
    """Closure of seed classes under mapping-class generators, plus random
    probes.  Returns (classes, completeness report)."""
    ctx = context(Q)
    G = ctx.G
    rng = rng or np.random.default_rng(0)
    gens = list(gens or humphries_generators(g))
    if seeds is None:
        seeds = enumerate_E(ctx, g) if g > 0 else np.empty((0, 0))
    found = _bfs_closure(ctx, np.asarray(seeds, dtype=np.int64), gens)
    misses = 0
    total_probes = 0
    while True:
        if expected is not None and len(found) >= expected:
            break
        if total_probes >= probes:
            break
        T = _random_surjective(ctx, g, 256, rng)
        total_probes += len(T)
        C = ctx.canon.canonical(T)
        keys = tuple_keys(found, G.n)
        missing = ~np.isin(tuple_keys(C, G.n), keys)
        if missing.any():
            misses += 1
            found = _bfs_closure(ctx, np.concatenate([found, C[missing][:1]]), gens)
    if expected is not None:
        status = "exact" if len(found) == expected else "incomplete"
    else:
        status = "probabilistic"
    return found, {"status": status, "classes": len(found), "expected": expected,
                   "random_probes": total_probes, "probe_hits_outside": misses}


def _random_surjective(ctx: GroupContext, g: int, m: int, rng) -> np.ndarray:
    """Random surjective surface tuples: random 2g-1 coordinates, the last
    b-coordinate solved from a commutator fiber."""
    G = ctx.G
    out = []
    while sum(len(x) for x in out) < m:
        T = rng.integers(0, G.n, (4 * m, 2 * g))
        T = T[relator_value(T, G) == G.identity]
        T = T[_surjective_mask(ctx, T)]
        out.append(T)
    return np.concatenate(out)[:m]


def random_surface_epimorphisms(Q, g: int, samples: int, seed: int = 0) -> np.ndarray:
    """Uniform sample (with replacement) of surjective homs pi_1(Sigma_g) -> Q,
    by rejection from uniform 2g-tuples."""
    return _random_surjective(context(Q), g, samples, np.random.default_rng(seed))


def _bfs_closure(ctx: GroupContext, seeds: np.ndarray, gens: Sequence[MappingClassGen]) -> np.ndarray:
    G = ctx.G
    comp = [CompiledGen(t) for t in gens] + [CompiledGen(t.inverse()) for t in gens]
    found = np.unique(ctx.canon.canonical(seeds), axis=0)
    keys = set(tuple_keys(found, G.n).tolist())
    frontier = found
    parts = [found]
    while len(frontier):
        new = np.concatenate([ctx.canon.canonical(c.apply(frontier, G)) for c in comp])
        new = np.unique(new, axis=0)
        nk = tuple_keys(new, G.n)
        fresh = np.array([k not in keys for k in nk.tolist()], dtype=bool)
        new = new[fresh]
        keys.update(nk[fresh].tolist())
        parts.append(new)
        frontier = new
    A = np.concatenate(parts)
    return A[np.lexsort(A.T[::-1])]


def enumerate_A(Q, g: int = 2, method: str = "fiber", **kw) -> np.ndarray:
    if method == "brute":
        return enumerate_A_brute(Q, g)
    if method == "fiber":
        return enumerate_A_fiber(Q, g)
    if method == "orbit-bfs":
        return enumerate_A_orbit_bfs(Q, g, **kw)[0]
    raise ValueError(f"unknown method {method!r}")


# -- independent count of surjective surface homomorphisms --------------------

def _subgroup_ids(lat: SubgroupJoin, max_subgroups: int) -> list[int]:
    """Every subgroup id (breadth-first over joins), sorted by order."""
    todo, seen = [0], {0}
    while todo:
        sid = todo.pop()
        for kid in np.unique(lat.row(sid)).tolist():
            if kid not in seen:
                seen.add(kid)
                todo.append(kid)
                if len(seen) > max_subgroups:
                    raise GroupTooLarge("subgroup lattice too large")
    return sorted(seen, key=lambda s: lat.sizes[s])


def _moebius_surjective(lat: SubgroupJoin, ids: list[int], hom: dict) -> dict:
    """epi(H) = hom(H) - sum over proper subgroups K of epi(K)."""
    epi: dict = {}
    for sid in ids:
        below = sum((epi[k] for k in epi if lat.sizes[k] < lat.sizes[sid]
                     and not np.any(lat.masks[k] & ~lat.masks[sid])), 0 * hom[sid])
        epi[sid] = hom[sid] - below
    return epi


def count_surface_epimorphisms(Q, g: int, max_subgroups: int = 5000) -> int:
    """Exact number of surjective homs pi_1(Sigma_g) -> Q (raw, not modulo
    Aut), by Moebius inversion over the full subgroup lattice."""
    cat = Q if isinstance(Q, CatalogGroup) else build(Q)
    G = cat.group
    lat = SubgroupJoin(G)
    ids = _subgroup_ids(lat, max_subgroups)
    hom = {sid: fold_convolution_count(_subgroup(G, lat.members(sid)), g) for sid in ids}
    return int(_moebius_surjective(lat, ids, hom)[lat.full_id])


def surface_epimorphism_class_counts(Q, g: int, cover: SchurCoverData | None = None,
                                     max_subgroups: int = 5000) -> np.ndarray:
    """Surjective homs pi_1(Sigma_g) -> Q split by Schur class (indexed like
    ``cover.h2``).

    Every hom into a subgroup H lifts in |H_2|^(2g) ways to the preimage of
    H in the cover, and all lifts share the class, so the class counts of
    homs into H are commutator-product counts in that preimage divided by
    |H_2|^(2g); Moebius inversion then keeps the surjective ones.
    """
    cat = Q if isinstance(Q, CatalogGroup) else build(Q)
    G = cat.group
    cover = cover or schur_cover(cat.spec)
    S = cover.cover
    proj = cover.projection.image
    lat = SubgroupJoin(G)
    ids = _subgroup_ids(lat, max_subgroups)
    k = len(cover.h2)
    comm = S.commutator_table.astype(np.int64)
    hom = {}
    for sid in ids:
        pre = np.flatnonzero(lat.masks[sid][proj])
        c = np.bincount(comm[np.ix_(pre, pre)].ravel(), minlength=S.n).astype(object)
        v = c.copy()
        for _ in range(g - 1):
            nxt = np.zeros(S.n, dtype=object)
            for x in np.flatnonzero(v):
                nxt[S.table[x, pre]] += v[x] * c[pre]
            v = nxt
        hom[sid] = np.array([v[z] for z in cover.h2], dtype=object) // k ** (2 * g)
    return _moebius_surjective(lat, ids, hom)[lat.full_id]


def _subgroup(G: FiniteGroup, H: np.ndarray) -> FiniteGroup:
    pos = np.full(G.n, -1, dtype=np.int64)
    pos[H] = np.arange(len(H))
    table = pos[G.table[np.ix_(H, H)]]
    gens = [int(pos[h]) for h in H]  # generating set: all elements (small groups only)
    return FiniteGroup(table, gens, identity=int(pos[G.identity]))


# -- orbits of the mapping class group --------------------------------------

@dataclass
class OrbitTable:
    classes: np.ndarray          # (m, 2g) canonical tuples, sorted by key
    labels: np.ndarray           # orbit id per class
    sizes: np.ndarray            # per orbit
    representatives: np.ndarray  # (orbits, 2g)
    e_counts: np.ndarray         # per orbit
    h2_classes: list             # per orbit: int class index or "unavailable"
    perms: list[np.ndarray] = field(default_factory=list, repr=False)

    def __len__(self) -> int:
        return len(self.sizes)

    def rows(self) -> list[dict]:
        return [{"orbit_id": i, "size": int(s), "e_count": int(e), "h2_class": h}
                for i, (s, e, h) in enumerate(zip(self.sizes, self.e_counts, self.h2_classes))]

    def to_csv(self, path) -> None:
        with open(path, "w", newline="") as fh:
            w = csv.DictWriter(fh, fieldnames=["orbit_id", "size", "e_count", "h2_class"])
            w.writeheader()
            w.writerows(self.rows())

    def orbit_members(self, i: int) -> np.ndarray:
        return np.flatnonzero(self.labels == i)


def generator_permutations(Q, classes: np.ndarray, gens: Sequence[MappingClassGen]) -> list[np.ndarray]:
    """Action of each generator on the (sorted) class list as index arrays."""
    ctx = context(Q)
    G = ctx.G
    keys = tuple_keys(classes, G.n)
    if np.any(np.diff(keys) <= 0):
        raise ValueError("classes must be sorted and distinct")
    perms = []
    for t in gens:
        img = ctx.canon.canonical(CompiledGen(t).apply(classes, G))
        ik = tuple_keys(img, G.n)
        pos = np.searchsorted(keys, ik)
        if np.any(pos >= len(keys)) or np.any(keys[np.minimum(pos, len(keys) - 1)] != ik):
            raise ValueError("class set is not closed under the generators")
        perms.append(pos)
    return perms


def orbit_decomposition(Q, classes: np.ndarray, gens: Sequence[MappingClassGen] | None = None,
                        E: np.ndarray | None = None, cover: SchurCoverData | None | str = "auto") -> OrbitTable:
    ctx = context(Q)
    G = ctx.G
    classes = np.asarray(classes, dtype=np.int64)
    classes = classes[np.argsort(tuple_keys(classes, G.n))]
    g = classes.shape[1] // 2
    gens = list(gens or humphries_generators(g))
    perms = generator_permutations(ctx, classes, gens)
    m = len(classes)
    rows = np.concatenate([np.arange(m)] * len(perms))
    cols = np.concatenate(perms)
    graph = coo_matrix((np.ones(len(rows), dtype=np.int8), (rows, cols)), shape=(m, m))
    _, lab = connected_components(graph, directed=True, connection="weak")
    # renumber orbits by decreasing size, ties by smallest member
    sizes = np.bincount(lab)
    first = np.full(len(sizes), m)
    np.minimum.at(first, lab, np.arange(m))
    order = np.lexsort((first, -sizes))
    remap = np.empty_like(order)
    remap[order] = np.arange(len(order))
    lab = remap[lab]
    sizes = np.bincount(lab)
    reps = classes[[int(np.flatnonzero(lab == i)[0]) for i in range(len(sizes))]]
    if E is None:
        E = enumerate_E(ctx, g)
    ek = tuple_keys(ctx.canon.canonical(E), G.n)
    pos = np.searchsorted(tuple_keys(classes, G.n), ek)
    e_counts = np.bincount(lab[pos], minlength=len(sizes))
    if cover == "auto":
        try:
            cover = schur_cover(ctx.cat.spec)
        except CoverUnavailable:
            cover = None
    if cover is None:
        h2 = ["unavailable"] * len(sizes)
    else:
        h2 = [int(homology_class(r, cover)) for r in reps]
    return OrbitTable(classes, lab, sizes, reps, e_counts, h2, perms)


# -- Schur classes, stabilization, transitivity, Hall -------------------------

def homology_class(t: np.ndarray, cover: SchurCoverData, lifts: np.ndarray | None = None) -> np.ndarray:
    """Index into ``cover.h2`` of prod [s_i, t_i] for lifts of the tuple(s).

    ``lifts`` overrides the section (one cover element per coordinate).
    """
    t = np.asarray(t, dtype=np.int64)
    S = cover.cover
    L = cover.section[t] if lifts is None else np.asarray(lifts, dtype=np.int64)
    val = relator_value(L, S)
    pos = np.full(S.n, -1, dtype=np.int64)
    pos[cover.h2] = np.arange(len(cover.h2))
    out = pos[val]
    if np.any(out < 0):
        raise ValueError("tuple does not satisfy the surface relation")
    return out


def random_lifts(t: np.ndarray, cover: SchurCoverData, rng: np.random.Generator) -> np.ndarray:
    """Independent uniformly random preimages of every coordinate."""
    t = np.asarray(t, dtype=np.int64)
    S = cover.cover
    z = rng.choice(cover.h2, size=t.shape)
    return S.table[cover.section[t], z]


def stabilize(t: np.ndarray, h: int, identity: int = 0) -> np.ndarray:
    t = np.asarray(t, dtype=np.int64)
    pad = np.full(t.shape[:-1] + (2 * h,), identity, dtype=np.int64)
    return np.concatenate([t, pad], axis=-1)


def transitivity_degree(perms: Sequence[np.ndarray], points: np.ndarray | None = None, k: int = 2) -> bool:
    """Whether the group generated by ``perms`` acts k-transitively (k <= 2)
    on ``points`` (default: every point), which must form one orbit."""
    if k not in (1, 2):
        raise ValueError("only k <= 2 is checked exactly")
    perms = [np.asarray(p, dtype=np.int64) for p in perms]
    N = len(perms[0])
    pts = np.arange(N) if points is None else np.asarray(points, dtype=np.int64)
    m = len(pts)
    if m <= 1:
        return True
    local = np.full(N, -1, dtype=np.int64)
    local[pts] = np.arange(m)
    lp = []
    for p in perms:
        img = local[p[pts]]
        if np.any(img < 0):
            raise ValueError("points are not invariant")
        lp.append(img)
    # single orbit
    seen = np.zeros(m, dtype=bool)
    seen[0] = True
    frontier = np.array([0])
    while frontier.size:
        new = np.unique(np.concatenate([p[frontier] for p in lp]))
        new = new[~seen[new]]
        seen[new] = True
        frontier = new
    if not seen.all():
        return False
    if k == 1:
        return True
    seen2 = np.zeros(m * m, dtype=bool)
    start = 0 * m + 1
    seen2[start] = True
    frontier = np.array([start])
    while frontier.size:
        a, b = frontier // m, frontier % m
        new = np.unique(np.concatenate([p[a] * m + p[b] for p in lp]))
        new = new[~seen2[new]]
        seen2[new] = True
        frontier = new
    return int(seen2.sum()) == m * (m - 1)


def hall_product_check(f1: Sequence[int], f2: Sequence[int], Q) -> bool:
    """Whether the joint map x -> (f1(x), f2(x)) surjects onto Q x Q."""
    G = context(Q).G
    return product_generates(G, f1, f2)


def equivalent_under_aut(f1: Sequence[int], f2: Sequence[int], Q) -> bool:
    c = context(Q).canon
    return bool(np.array_equal(c.canonical(np.asarray(f1)), c.canonical(np.asarray(f2))))
