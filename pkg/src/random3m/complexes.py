"""Random gluings of triangles and tetrahedra, and random regular multigraphs.

Oriented pieces are glued orientation-reversingly.  Triangle t has side
slots 3t, 3t+1, 3t+2 (side j runs from corner j to corner j+1); a surface is
a fixed-point-free involution pi on the 3n slots, and the vertices are the
cycles of sigma.pi with sigma the rotation (3t, 3t+1, 3t+2).
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from itertools import combinations

import numba
import numpy as np


# -- union-find ------------------------------------------------------------------

@numba.njit(cache=True)
def _find(parent, x):
    root = x
    while parent[root] != root:
        root = parent[root]
    while parent[x] != root:
        parent[x], x = root, parent[x]
    return root


@numba.njit(cache=True)
def _union(parent, a, b):
    ra, rb = _find(parent, a), _find(parent, b)
    if ra != rb:
        if ra < rb:
            parent[rb] = ra
        else:
            parent[ra] = rb


@numba.njit(cache=True)
def _labels(parent):
    n = parent.shape[0]
    lab = np.full(n, -1, np.int64)
    k = 0
    for i in range(n):
        r = _find(parent, i)
        if lab[r] < 0:
            lab[r] = k
            k += 1
        lab[i] = lab[r]
    return lab, k


# -- triangulated surfaces -----------------------------------------------------------

def random_matching(m: int, rng: np.random.Generator) -> np.ndarray:
    """Uniform fixed-point-free involution on range(m) (m even)."""
    perm = rng.permutation(m)
    pi = np.empty(m, dtype=np.int64)
    pi[perm[0::2]] = perm[1::2]
    pi[perm[1::2]] = perm[0::2]
    return pi


@numba.njit(cache=True)
def _sigma_pi_cycles(pi):
    m = pi.shape[0]
    seen = np.zeros(m, np.bool_)
    cyc = np.full(m, -1, np.int64)
    k = 0
    for s in range(m):
        if seen[s]:
            continue
        x = s
        while not seen[x]:
            seen[x] = True
            cyc[x] = k
            y = pi[x]
            x = y - y % 3 + (y % 3 + 1) % 3  # sigma(pi(x))
        k += 1
    return cyc, k


@numba.njit(cache=True)
def _triangle_components(pi, n):
    parent = np.arange(n)
    for s in range(pi.shape[0]):
        _union(parent, s // 3, pi[s] // 3)
    return _labels(parent)


@numba.njit(cache=True)
def _corner_classes(pi, n):
    """Vertices by gluing corners directly: side (t, j) has corners j, j+1;
    the reversing identification sends them to corners j'+1, j' of (t', j')."""
    parent = np.arange(3 * n)
    for s in range(3 * n):
        t, j = s // 3, s % 3
        u = pi[s]
        t2, j2 = u // 3, u % 3
        _union(parent, 3 * t + j, 3 * t2 + (j2 + 1) % 3)
        _union(parent, 3 * t + (j + 1) % 3, 3 * t2 + j2)
    return _labels(parent)[1]


@dataclass
class TriangleGluing:
    n: int
    pi: np.ndarray
    vertices: int = 0
    components: int = 0
    genera: list[int] = field(default_factory=list)   # per component, largest first

    @property
    def chi(self) -> int:
        return self.vertices - self.n // 2

    @property
    def connected(self) -> bool:
        return self.components == 1


def surface_from_pairing(pi: np.ndarray) -> TriangleGluing:
    pi = np.asarray(pi, dtype=np.int64)
    n = len(pi) // 3
    cyc, v = _sigma_pi_cycles(pi)
    comp, k = _triangle_components(pi, n)
    faces = np.bincount(comp, minlength=k)
    # a vertex cycle lives in the component of any of its slots
    first_slot = np.full(v, -1)
    first_slot[cyc[::-1]] = np.arange(len(cyc))[::-1]
    verts = np.bincount(comp[first_slot // 3], minlength=k)
    chi = verts - faces * 3 // 2 + faces
    genera = sorted(((2 - chi) // 2).tolist(), reverse=True)
    return TriangleGluing(n, pi, int(v), int(k), genera)


def random_surface(n: int, seed: int | np.random.Generator | None = None) -> TriangleGluing:
    if n % 2:
        raise ValueError("the number of triangles must be even")
    rng = seed if isinstance(seed, np.random.Generator) else np.random.default_rng(seed)
    return surface_from_pairing(random_matching(3 * n, rng))


def corner_vertex_count(pi: np.ndarray) -> int:
    """Vertex count via union-find on triangle corners (independent of sigma.pi)."""
    pi = np.asarray(pi, dtype=np.int64)
    return int(_corner_classes(pi, len(pi) // 3))


def all_matchings(m: int):
    """Every fixed-point-free involution of range(m), as arrays."""
    def rec(rest):
        if not rest:
            yield []
            return
        a = rest[0]
        for i in range(1, len(rest)):
            for tail in rec(rest[1:i] + rest[i + 1:]):
                yield [(a, rest[i])] + tail
    for pairs in rec(list(range(m))):
        pi = np.empty(m, dtype=np.int64)
        for a, b in pairs:
            pi[a], pi[b] = b, a
        yield pi


@dataclass(frozen=True)
class SurfaceStats:
    n: int
    samples: int
    vertices: np.ndarray
    connected: np.ndarray
    main_genus: np.ndarray

    @property
    def mean_vertices(self) -> float:
        return float(self.vertices.mean())

    def vertex_upper_confidence(self, z: float = 2.326) -> float:
        """One-sided upper bound for E[v] (z = 2.326 for 99%)."""
        return self.mean_vertices + z * float(self.vertices.std(ddof=1)) / math.sqrt(self.samples)


def surface_stats(n: int, samples: int, seed: int = 0) -> SurfaceStats:
    rng = np.random.default_rng(seed)
    v = np.empty(samples, dtype=np.int64)
    conn = np.empty(samples, dtype=bool)
    genus = np.empty(samples, dtype=np.int64)
    for i in range(samples):
        s = random_surface(n, rng)
        v[i], conn[i], genus[i] = s.vertices, s.connected, s.genera[0]
    return SurfaceStats(n, samples, v, conn, genus)


def vertex_bound(n: int) -> float:
    return 1.5 * math.log(n) + 6


def connectivity_probability(n: int, samples: int | None = None, seed: int = 0) -> float:
    """Fraction of connected gluings; exact enumeration when samples is None."""
    if samples is None:
        hits = total = 0
        for pi in all_matchings(3 * n):
            total += 1
            hits += surface_from_pairing(pi).connected
        return hits / total
    return float(surface_stats(n, samples, seed).connected.mean())


# -- random regular multigraphs ------------------------------------------------------

@numba.njit(cache=True)
def _cycle_counts(nbr, eid, imax):
    """Cycles of lengths 1..imax in a multigraph given by per-vertex half-edge
    lists (neighbor, edge id), counting each cycle once."""
    n, d = nbr.shape
    counts = np.zeros(imax + 1, np.int64)
    # loops: each loop shows up twice in its vertex's list
    for v in range(n):
        for k in range(d):
            if nbr[v, k] == v:
                counts[1] += 1
    counts[1] //= 2
    if imax < 2:
        return counts
    path = np.empty(imax + 1, np.int64)
    edges = np.empty(imax + 1, np.int64)
    stack_k = np.empty(imax + 1, np.int64)
    raw = np.zeros(imax + 1, np.int64)
    for s in range(n):
        path[0] = s
        depth = 0
        stack_k[0] = 0
        while depth >= 0:
            k = stack_k[depth]
            if k >= d:
                depth -= 1
                continue
            stack_k[depth] = k + 1
            u = path[depth]
            w = nbr[u, k]
            e = eid[u, k]
            if w == u:
                continue
            if depth > 0 and e == edges[depth - 1]:
                continue
            length = depth + 1
            if w == s:
                if length >= 2:
                    raw[length] += 1
                continue
            # only extend along vertices larger than the start (canonical start)
            if w < s or length >= imax:
                continue
            dup = False
            for j in range(1, depth + 1):
                if path[j] == w:
                    dup = True
                    break
            if dup:
                continue
            edges[depth] = e
            depth += 1
            path[depth] = w
            stack_k[depth] = 0
    for i in range(2, imax + 1):
        counts[i] = raw[i] // 2  # two directions from the minimal vertex
    return counts


def configuration_graph(n: int, d: int, rng: np.random.Generator) -> tuple[np.ndarray, np.ndarray]:
    """Random d-regular multigraph: pair the n*d half-edges uniformly."""
    if (n * d) % 2:
        raise ValueError("n*d must be even")
    pi = random_matching(n * d, rng)
    half = np.arange(n * d)
    nbr = (pi // d).reshape(n, d)
    eid = np.minimum(half, pi).reshape(n, d)
    return nbr, eid


def cycle_counts(nbr: np.ndarray, eid: np.ndarray, imax: int) -> np.ndarray:
    return _cycle_counts(np.asarray(nbr, np.int64), np.asarray(eid, np.int64), imax)


def poisson_cycle_means(d: int, imax: int) -> np.ndarray:
    return np.array([(d - 1) ** i / (2 * i) for i in range(1, imax + 1)])


def short_cycle_stats(d: int, n: int, imax: int, samples: int, seed: int = 0) -> np.ndarray:
    """Per-sample cycle counts, shape (samples, imax), columns i = 1..imax."""
    rng = np.random.default_rng(seed)
    out = np.empty((samples, imax), dtype=np.int64)
    for k in range(samples):
        nbr, eid = configuration_graph(n, d, rng)
        out[k] = cycle_counts(nbr, eid, imax)[1:]
    return out


# -- tetrahedra ---------------------------------------------------------------------------

# face i is opposite vertex i, listed in boundary orientation
FACE_VERTS = np.array([[1, 2, 3], [0, 3, 2], [0, 1, 3], [0, 2, 1]], dtype=np.int64)
EDGE_INDEX = {pair: k for k, pair in enumerate(combinations(range(4), 2))}
_EDGE_LOOKUP = np.full((4, 4), -1, dtype=np.int64)
for (a, b), k in EDGE_INDEX.items():
    _EDGE_LOOKUP[a, b] = _EDGE_LOOKUP[b, a] = k


@numba.njit(cache=True)
def _tet_invariants(partner, rot, face_verts, edge_lookup):
    """Vertex classes, edge classes, edge-end classes and folded edges."""
    n4 = partner.shape[0]
    n = n4 // 4
    vpar = np.arange(4 * n)
    epar = np.arange(6 * n)
    # edge-end (t, v, w): edge {v, w} of tet t at its end v -> index (4t + v)*4 + w
    xpar = np.arange(16 * n)
    for f in range(n4):
        g = partner[f]
        if f > g:
            continue
        t, i = f // 4, f % 4
        t2, i2 = g // 4, g % 4
        r = rot[f]
        img = np.empty(4, np.int64)
        for k in range(3):
            img[face_verts[i, k]] = face_verts[i2, (r - k) % 3]
        for k in range(3):
            v = face_verts[i, k]
            _union(vpar, 4 * t + v, 4 * t2 + img[v])
            w = face_verts[i, (k + 1) % 3]
            _union(epar, 6 * t + edge_lookup[v, w], 6 * t2 + edge_lookup[img[v], img[w]])
            _union(xpar, (4 * t + v) * 4 + w, (4 * t2 + img[v]) * 4 + img[w])
            _union(xpar, (4 * t + w) * 4 + v, (4 * t2 + img[w]) * 4 + img[v])
    vlab, nv = _labels(vpar)
    elab, ne = _labels(epar)
    xlab, _ = _labels(xpar)
    # folded edge: its two ends fall into one edge-end class
    folded = 0
    link_v = np.zeros(nv, np.int64)
    seen_end = np.zeros(16 * n, np.bool_)
    for t in range(n):
        for v in range(4):
            for w in range(4):
                if v != w:
                    x = xlab[(4 * t + v) * 4 + w]
                    if not seen_end[x]:
                        seen_end[x] = True
                        link_v[vlab[4 * t + v]] += 1
                    if v < w and x == xlab[(4 * t + w) * 4 + v]:
                        folded += 1
    corners = np.zeros(nv, np.int64)
    for c in range(4 * n):
        corners[vlab[c]] += 1
    valence = np.zeros(ne, np.int64)
    for e in range(6 * n):
        valence[elab[e]] += 1
    return nv, ne, link_v, corners, valence, folded


@dataclass
class TetGluing:
    n: int
    partner: np.ndarray   # face 4t+i -> paired face
    rotation: np.ndarray  # per face, the same value on both faces of a pair
    vertices: int = 0
    edges: int = 0
    link_chi: np.ndarray = field(default_factory=lambda: np.zeros(0, np.int64))
    edge_valence: np.ndarray = field(default_factory=lambda: np.zeros(0, np.int64))
    folded_edges: int = 0

    @property
    def euler(self) -> int:
        return self.vertices - self.edges + 2 * self.n - self.n

    @property
    def is_manifold(self) -> bool:
        return bool(np.all(self.link_chi == 2)) and self.folded_edges == 0


def tet_from_pairing(partner: np.ndarray, rotation: np.ndarray) -> TetGluing:
    partner = np.asarray(partner, dtype=np.int64)
    rotation = np.asarray(rotation, dtype=np.int64)
    if np.any(partner[partner] != np.arange(len(partner))) or np.any(partner == np.arange(len(partner))):
        raise ValueError("face pairing must be a fixed-point-free involution")
    if np.any(rotation != rotation[partner]):
        raise ValueError("rotation must agree on paired faces")
    n = len(partner) // 4
    nv, ne, link_v, corners, valence, folded = _tet_invariants(partner, rotation, FACE_VERTS, _EDGE_LOOKUP)
    # link of a vertex class: corners are triangles, each with 3 edges shared in pairs
    link_chi = link_v - corners * 3 // 2 + corners
    return TetGluing(n, partner, rotation, int(nv), int(ne), link_chi, valence, int(folded))


def random_tet_gluing(n: int, seed: int | np.random.Generator | None = None) -> TetGluing:
    if n < 1:
        raise ValueError("need at least one tetrahedron")
    rng = seed if isinstance(seed, np.random.Generator) else np.random.default_rng(seed)
    partner = random_matching(4 * n, rng)
    rot = rng.integers(0, 3, 4 * n)
    rot = np.where(np.arange(4 * n) < partner, rot, rot[partner])
    return tet_from_pairing(partner, rot)


def manifold_probability(n: int, samples: int, seed: int = 0) -> tuple[float, int]:
    rng = np.random.default_rng(seed)
    hits = sum(random_tet_gluing(n, rng).is_manifold for _ in range(samples))
    return hits / samples, hits


# -- sequential importance sampling for the manifold probability ---------------------
#
# A closed 3-manifold has chi = 0, i.e. E = V + n.  Faces are glued one pair at a
# time (lowest unglued face first, partner and rotation uniform), which
# reproduces the uniform gluing.  Vertex and edge classes only merge, and a
# class with no unglued incident face is final, so after each step
#     closed_E + [open_E > 0] <= E <= closed_E + open_E
# and likewise for V.  Choices that make E = V + n impossible are discarded
# and the weight picks up the surviving fraction, which keeps the estimator
# unbiased.


@numba.njit(cache=True)
def _uf_root(parent, x):
    while parent[x] != x:
        x = parent[x]
    return x


@numba.njit(cache=True)
def _uf_log(log, nlog, kind, idx, old):
    log[nlog, 0] = kind
    log[nlog, 1] = idx
    log[nlog, 2] = old
    return nlog + 1


@numba.njit(cache=True)
def _glue(f, g, r, vpar, vsize, vslot, epar, esize, eslot, cnt, log, nlog, face_verts, edge_lookup):
    """Glue face f to face g with rotation r; changes are appended to the log.
    cnt = [V open, V closed, E open, E closed]."""
    t, i = f // 4, f % 4
    t2, i2 = g // 4, g % 4
    img = np.empty(4, np.int64)
    for k in range(3):
        img[face_verts[i, k]] = face_verts[i2, (r - k) % 3]
    vroots = np.empty(12, np.int64)
    eroots = np.empty(12, np.int64)
    nv = 0
    ne = 0
    for k in range(3):
        a, b = face_verts[i, k], face_verts[i, (k + 1) % 3]
        c, d = face_verts[i2, k], face_verts[i2, (k + 1) % 3]
        vroots[nv] = _uf_root(vpar, 4 * t + a)
        vroots[nv + 1] = _uf_root(vpar, 4 * t2 + c)
        nv += 2
        eroots[ne] = _uf_root(epar, 6 * t + edge_lookup[a, b])
        eroots[ne + 1] = _uf_root(epar, 6 * t2 + edge_lookup[c, d])
        ne += 2
    # remove the affected classes from the counts (each root once)
    for q in range(nv):
        dup = False
        for q2 in range(q):
            if vroots[q2] == vroots[q]:
                dup = True
        if not dup:
            if vslot[vroots[q]] > 0:
                cnt[0] -= 1
            else:
                cnt[1] -= 1
    for q in range(ne):
        dup = False
        for q2 in range(q):
            if eroots[q2] == eroots[q]:
                dup = True
        if not dup:
            if eslot[eroots[q]] > 0:
                cnt[2] -= 1
            else:
                cnt[3] -= 1
    # both faces stop being free slots of their corners and edges
    for k in range(3):
        for tt, ff, fi in ((t, f, i), (t2, g, i2)):
            a, b = face_verts[fi, k], face_verts[fi, (k + 1) % 3]
            rv = _uf_root(vpar, 4 * tt + a)
            nlog = _uf_log(log, nlog, 2, rv, vslot[rv])
            vslot[rv] -= 1
            re = _uf_root(epar, 6 * tt + edge_lookup[a, b])
            nlog = _uf_log(log, nlog, 5, re, eslot[re])
            eslot[re] -= 1
    for k in range(3):
        a, b = face_verts[i, k], face_verts[i, (k + 1) % 3]
        x, y = _uf_root(vpar, 4 * t + a), _uf_root(vpar, 4 * t2 + img[a])
        if x != y:
            if vsize[x] < vsize[y]:
                x, y = y, x
            nlog = _uf_log(log, nlog, 0, y, vpar[y])
            vpar[y] = x
            nlog = _uf_log(log, nlog, 1, x, vsize[x])
            vsize[x] += vsize[y]
            nlog = _uf_log(log, nlog, 2, x, vslot[x])
            vslot[x] += vslot[y]
        x = _uf_root(epar, 6 * t + edge_lookup[a, b])
        y = _uf_root(epar, 6 * t2 + edge_lookup[img[a], img[b]])
        if x != y:
            if esize[x] < esize[y]:
                x, y = y, x
            nlog = _uf_log(log, nlog, 3, y, epar[y])
            epar[y] = x
            nlog = _uf_log(log, nlog, 4, x, esize[x])
            esize[x] += esize[y]
            nlog = _uf_log(log, nlog, 5, x, eslot[x])
            eslot[x] += eslot[y]
    # add the merged classes back
    for q in range(nv):
        vroots[q] = _uf_root(vpar, vroots[q])
        dup = False
        for q2 in range(q):
            if vroots[q2] == vroots[q]:
                dup = True
        if not dup:
            if vslot[vroots[q]] > 0:
                cnt[0] += 1
            else:
                cnt[1] += 1
    for q in range(ne):
        eroots[q] = _uf_root(epar, eroots[q])
        dup = False
        for q2 in range(q):
            if eroots[q2] == eroots[q]:
                dup = True
        if not dup:
            if eslot[eroots[q]] > 0:
                cnt[2] += 1
            else:
                cnt[3] += 1
    return nlog


@numba.njit(cache=True)
def _undo(log, nlog, stop, vpar, vsize, vslot, epar, esize, eslot):
    while nlog > stop:
        nlog -= 1
        kind, idx, old = log[nlog, 0], log[nlog, 1], log[nlog, 2]
        if kind == 0:
            vpar[idx] = old
        elif kind == 1:
            vsize[idx] = old
        elif kind == 2:
            vslot[idx] = old
        elif kind == 3:
            epar[idx] = old
        elif kind == 4:
            esize[idx] = old
        else:
            eslot[idx] = old
    return nlog


@numba.njit(cache=True)
def _chi_feasible(cnt, n):
    e_lo = cnt[3] + (1 if cnt[2] > 0 else 0)
    e_hi = cnt[3] + cnt[2]
    v_lo = cnt[1] + (1 if cnt[0] > 0 else 0) + n
    v_hi = cnt[1] + cnt[0] + n
    return max(e_lo, v_lo) <= min(e_hi, v_hi)


@numba.njit(cache=True)
def _smc_manifold(n, N, seed, lam, ess_frac, face_verts, edge_lookup):
    """Population version of the sequential sampler; particles are resampled
    (systematically) whenever the effective sample size drops below
    ess_frac * N.  Returns log Z, the final weights and the gluings."""
    np.random.seed(seed)
    vpar = np.empty((N, 4 * n), np.int64)
    vsize = np.ones((N, 4 * n), np.int64)
    vslot = np.full((N, 4 * n), 3, np.int64)
    epar = np.empty((N, 6 * n), np.int64)
    esize = np.ones((N, 6 * n), np.int64)
    eslot = np.full((N, 6 * n), 2, np.int64)
    cnt = np.empty((N, 4), np.int64)
    free = np.ones((N, 4 * n), np.bool_)
    partner = np.full((N, 4 * n), -1, np.int64)
    rot = np.zeros((N, 4 * n), np.int64)
    for p in range(N):
        vpar[p] = np.arange(4 * n)
        epar[p] = np.arange(6 * n)
        cnt[p, 0], cnt[p, 1], cnt[p, 2], cnt[p, 3] = 4 * n, 0, 6 * n, 0
    w = np.ones(N)
    log_z = 0.0
    resamples = 0
    log = np.empty((64 * n + 64, 3), np.int64)
    cand_g = np.empty(12 * n, np.int64)
    cand_r = np.empty(12 * n, np.int64)
    cand_q = np.empty(12 * n)
    for step in range(2 * n):
        for p in range(N):
            if w[p] == 0.0:
                continue
            f = 0
            while not free[p, f]:
                f += 1
            free[p, f] = False
            total = 0
            nf = 0
            for g in range(4 * n):
                if not free[p, g]:
                    continue
                for r in range(3):
                    total += 1
                    c0, c1, c2, c3 = cnt[p, 0], cnt[p, 1], cnt[p, 2], cnt[p, 3]
                    nlog = _glue(f, g, r, vpar[p], vsize[p], vslot[p], epar[p], esize[p], eslot[p], cnt[p],
                                 log, 0, face_verts, edge_lookup)
                    if _chi_feasible(cnt[p], n):
                        cand_g[nf] = g
                        cand_r[nf] = r
                        cand_q[nf] = lam ** (cnt[p, 3] - c3)
                        nf += 1
                    _undo(log, nlog, 0, vpar[p], vsize[p], vslot[p], epar[p], esize[p], eslot[p])
                    cnt[p, 0], cnt[p, 1], cnt[p, 2], cnt[p, 3] = c0, c1, c2, c3
            if nf == 0:
                w[p] = 0.0
                continue
            qsum = 0.0
            for c in range(nf):
                qsum += cand_q[c]
            u = np.random.random() * qsum
            pick = 0
            while pick < nf - 1 and u >= cand_q[pick]:
                u -= cand_q[pick]
                pick += 1
            # true probability 1/total, proposal cand_q[pick]/qsum
            w[p] *= qsum / (cand_q[pick] * total)
            g, r = cand_g[pick], cand_r[pick]
            free[p, g] = False
            _glue(f, g, r, vpar[p], vsize[p], vslot[p], epar[p], esize[p], eslot[p], cnt[p], log, 0,
                  face_verts, edge_lookup)
            partner[p, f], partner[p, g] = g, f
            rot[p, f] = r
            rot[p, g] = r
        sw = w.sum()
        if sw == 0.0:
            return -np.inf, w, partner, rot, resamples
        ess = sw * sw / (w * w).sum()
        if step < 2 * n - 1 and ess < ess_frac * N:
            log_z += np.log(sw / N)
            cum = np.cumsum(w) / sw
            idx = np.empty(N, np.int64)
            u0 = np.random.random() / N
            j = 0
            for k in range(N):
                u = u0 + k / N
                while j < N - 1 and cum[j] < u:
                    j += 1
                idx[k] = j
            vpar[:] = vpar[idx]
            vsize[:] = vsize[idx]
            vslot[:] = vslot[idx]
            epar[:] = epar[idx]
            esize[:] = esize[idx]
            eslot[:] = eslot[idx]
            cnt[:] = cnt[idx]
            free[:] = free[idx]
            partner[:] = partner[idx]
            rot[:] = rot[idx]
            w[:] = 1.0
            resamples += 1
    return log_z, w, partner, rot, resamples


@dataclass(frozen=True)
class ManifoldEstimate:
    n: int
    samples: int
    estimate: float
    stderr: float
    nonzero: int          # naive: hits; sequential: particles alive at the end
    effective_samples: float
    method: str
    replicates: int = 1


def _smc_replicate(n: int, N: int, seed: int, bias: float, ess_frac: float) -> tuple[float, int, float]:
    log_z, w, partner, rot, _ = _smc_manifold(n, N, seed, float(bias), float(ess_frac), FACE_VERTS, _EDGE_LOOKUP)
    alive = np.flatnonzero(w)
    for p in alive:
        if not tet_from_pairing(partner[p], rot[p]).is_manifold:
            raise AssertionError("a completed sample with chi = 0 failed the link test")
    if not alive.size:
        return 0.0, 0, 0.0
    ess = float(w.sum() ** 2 / (w ** 2).sum())
    return float(np.exp(log_z) * w.mean()), int(alive.size), ess


def manifold_probability_sis(n: int, samples: int, seed: int = 0, bias: float = 4.0,
                             replicates: int = 10, ess_frac: float = 0.0) -> ManifoldEstimate:
    """Unbiased sequential Monte Carlo estimate of P(random gluing is a manifold).

    ``samples`` particles are split into ``replicates`` independent
    populations; the standard error is taken across them.  Among the
    surviving choices, one that closes k edge classes is proposed with
    relative weight bias**k.  ess_frac = 0 turns resampling off (plain
    importance sampling).  Completed gluings are re-checked with the full
    link computation.

    The weights are heavy-tailed once n >= 16: the effective sample size
    collapses and the estimate then typically lies far below the truth.
    """
    if n < 1:
        raise ValueError("need at least one tetrahedron")
    if replicates < 1 or samples < replicates:
        raise ValueError("need at least one particle per replicate")
    N = samples // replicates
    runs = [_smc_replicate(n, N, seed * 1_000_003 + k, bias, ess_frac) for k in range(replicates)]
    z = np.array([r[0] for r in runs])
    se = float(z.std(ddof=1) / math.sqrt(replicates)) if replicates > 1 else float("nan")
    return ManifoldEstimate(n, N * replicates, float(z.mean()), se, sum(r[1] for r in runs),
                            float(sum(r[2] for r in runs)), "smc", replicates)


def manifold_estimate_naive(n: int, samples: int, seed: int = 0) -> ManifoldEstimate:
    p, hits = manifold_probability(n, samples, seed)
    se = math.sqrt(p * (1 - p) / samples)
    return ManifoldEstimate(n, samples, p, se, hits, float(samples), "naive")


@dataclass(frozen=True)
class ValenceStats:
    mean: float
    frac_le6: float


def edge_valence_stats(gl: TetGluing) -> ValenceStats:
    v = gl.edge_valence
    if len(v) == 0:
        return ValenceStats(float("nan"), float("nan"))
    return ValenceStats(float(v.mean()), float(np.mean(v <= 6)))


def gluing_from_label_maps(n: int, pairs: list[tuple[int, int, int, int, dict]]) -> TetGluing:
    """Build a gluing from (t, i, t2, i2, vertex map) entries; each vertex map
    sends the vertices of face i of t to those of face i2 of t2 and must
    reverse the boundary orientations."""
    partner = np.full(4 * n, -1, dtype=np.int64)
    rot = np.zeros(4 * n, dtype=np.int64)
    for t, i, t2, i2, vmap in pairs:
        f, g = 4 * t + i, 4 * t2 + i2
        fv, gv = FACE_VERTS[i], FACE_VERTS[i2]
        r = next((r for r in range(3) if all(gv[(r - k) % 3] == vmap[int(fv[k])] for k in range(3))), None)
        if r is None:
            raise ValueError(f"vertex map on face {i} of tet {t} is not orientation-reversing")
        partner[f], partner[g] = g, f
        rot[f] = rot[g] = r
    return tet_from_pairing(partner, rot)


def two_tet_sphere() -> TetGluing:
    """The double of a 3-simplex: tet 1 is tet 0 relabelled by the odd
    permutation (0 1), glued along all four faces."""
    swap = {0: 1, 1: 0, 2: 2, 3: 3}
    pairs = [(0, i, 1, swap[i], {v: swap[v] for v in range(4) if v != i}) for i in range(4)]
    return gluing_from_label_maps(2, pairs)


__all__ = [
    "TriangleGluing", "random_surface", "surface_from_pairing", "corner_vertex_count", "all_matchings",
    "surface_stats", "SurfaceStats", "vertex_bound", "connectivity_probability", "random_matching",
    "configuration_graph", "cycle_counts", "poisson_cycle_means", "short_cycle_stats", "TetGluing",
    "tet_from_pairing", "random_tet_gluing", "manifold_probability", "edge_valence_stats", "ValenceStats",
    "two_tet_sphere", "gluing_from_label_maps", "FACE_VERTS", "ManifoldEstimate",
    "manifold_probability_sis", "manifold_estimate_naive",
]
