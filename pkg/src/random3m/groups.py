"""Dense finite groups: Cayley tables, conjugacy data, subgroup closure,
automorphism actions and commutator statistics.

Elements are the integers 0..n-1 in construction (BFS) order; that order
is the fixed element order used for every lexicographic comparison in
the package.
"""
from __future__ import annotations

import math
from collections import deque
from dataclasses import dataclass, field
from functools import cached_property
from typing import Callable, Hashable, Iterable, Sequence

import numpy as np
from scipy.sparse import coo_matrix
from scipy.sparse.csgraph import connected_components

MAX_DENSE = 20000


class GroupTooLarge(ValueError):
    pass


def _index_dtype(n: int):
    return np.int16 if n < 2 ** 15 else np.int32


class FiniteGroup:
    """A finite group given by its multiplication table.

    ``table[x, y]`` is the index of ``x*y``.  ``gens`` is a generating set
    (indices), needed for conjugacy classes and normal closures.
    """

    def __init__(self, table: np.ndarray, gens: Sequence[int], names: Sequence[str] | None = None,
                 identity: int = 0, name: str = ""):
        self.table = table
        self.n = int(table.shape[0])
        self.identity = int(identity)
        self.gens = [int(g) for g in gens]
        self.names = list(names) if names is not None else [str(i) for i in range(self.n)]
        self.name = name

    def __repr__(self):
        return f"FiniteGroup({self.name or '?'}, order={self.n})"

    def __len__(self):
        return self.n

    @property
    def order(self) -> int:
        return self.n

    @cached_property
    def inv(self) -> np.ndarray:
        rows, cols = np.nonzero(self.table == self.identity)
        inv = np.empty(self.n, dtype=np.int64)
        inv[rows] = cols
        return inv

    def mul(self, x: int, y: int) -> int:
        return int(self.table[x, y])

    def prod(self, xs: Iterable[int]) -> int:
        r = self.identity
        for x in xs:
            r = int(self.table[r, x])
        return r

    def commutator(self, g: int, h: int) -> int:
        """g h g^-1 h^-1."""
        t = self.table
        return int(t[t[g, h], t[self.inv[g], self.inv[h]]])

    def commutators(self, a: np.ndarray, b: np.ndarray) -> np.ndarray:
        t, inv = self.table, self.inv
        return t[t[a, b], t[inv[a], inv[b]]]

    @cached_property
    def element_orders(self) -> np.ndarray:
        orders = np.zeros(self.n, dtype=np.int64)
        cur = np.arange(self.n)
        k = 1
        todo = np.ones(self.n, dtype=bool)
        while todo.any():
            hit = todo & (cur == self.identity)
            orders[hit] = k
            todo &= ~hit
            cur = self.table[cur, np.arange(self.n)]
            k += 1
        return orders

    def is_abelian(self) -> bool:
        return bool(np.array_equal(self.table, self.table.T))

    # -- conjugacy ----------------------------------------------------------

    def conjugation_perm(self, s: int) -> np.ndarray:
        """x -> s x s^-1 as an index array."""
        return self.table[self.table[s, :], self.inv[s]].astype(np.int64)

    @cached_property
    def class_of(self) -> np.ndarray:
        """Conjugacy class id per element, ids ordered by smallest member."""
        perms = [self.conjugation_perm(s) for s in self.gens]
        return orbit_labels(self.n, perms)

    @cached_property
    def conjugacy_classes(self) -> list[np.ndarray]:
        return [np.flatnonzero(self.class_of == c) for c in range(self.class_of.max() + 1)]

    @cached_property
    def class_reps(self) -> np.ndarray:
        return np.array([c[0] for c in self.conjugacy_classes])

    # -- subgroups ----------------------------------------------------------

    def closure(self, S: Iterable[int]) -> np.ndarray:
        return subgroup_closure(S, self)

    def generates(self, S: Iterable[int]) -> bool:
        return generates(S, self)

    def normal_closure(self, S: Iterable[int]) -> np.ndarray:
        H = np.zeros(self.n, dtype=bool)
        gens = []
        pending = deque(int(s) for s in S)
        conj = [self.conjugation_perm(s) for s in self.gens]
        while pending:
            x = pending.popleft()
            if H[x]:
                continue
            gens.append(x)
            H[:] = False
            H[subgroup_closure(gens, self)] = True
            for c in conj:
                for h in gens:
                    y = int(c[h])
                    if not H[y]:
                        pending.append(y)
        return np.flatnonzero(H) if gens else np.array([self.identity])

    @cached_property
    def derived_subgroup(self) -> np.ndarray:
        gs = self.gens
        comms = {self.commutator(a, b) for a in gs for b in gs}
        comms.discard(self.identity)
        if not comms:
            return np.array([self.identity])
        return self.normal_closure(sorted(comms))

    @cached_property
    def center(self) -> np.ndarray:
        t = self.table
        ok = np.ones(self.n, dtype=bool)
        for s in self.gens:
            ok &= t[:, s] == t[s, :]
        return np.flatnonzero(ok)

    # -- commutator statistics ----------------------------------------------

    @cached_property
    def commutator_table(self) -> np.ndarray:
        if self.n > 9000:
            raise GroupTooLarge(f"commutator table for order {self.n}")
        x = np.arange(self.n)
        out = np.empty((self.n, self.n), dtype=_index_dtype(self.n))
        for i in range(self.n):
            out[i] = self.commutators(np.full(self.n, i), x)
        return out

    @cached_property
    def commutator_counts(self) -> np.ndarray:
        return np.bincount(self.commutator_table.ravel(), minlength=self.n).astype(np.int64)

    @cached_property
    def _fiber_index(self):
        flat = self.commutator_table.ravel()
        order = np.argsort(flat, kind="stable")
        starts = np.zeros(self.n + 1, dtype=np.int64)
        starts[1:] = np.cumsum(self.commutator_counts)
        return order, starts

    def fiber(self, c: int) -> tuple[np.ndarray, np.ndarray]:
        """All pairs (a, b) with [a, b] = c, in lexicographic order."""
        order, starts = self._fiber_index
        idx = order[starts[c]:starts[c + 1]]
        return idx // self.n, idx % self.n


def commutator(g: int, h: int, G: FiniteGroup) -> int:
    return G.commutator(g, h)


def orbit_labels(n: int, perms: Sequence[np.ndarray]) -> np.ndarray:
    """Orbit id per point under the group generated by ``perms``;
    ids are numbered in order of each orbit's smallest point."""
    if not perms:
        return np.arange(n)
    rows = np.concatenate([np.arange(n)] * len(perms))
    cols = np.concatenate([np.asarray(p) for p in perms])
    graph = coo_matrix((np.ones(len(rows), dtype=np.int8), (rows, cols)), shape=(n, n))
    _, labels = connected_components(graph, directed=True, connection="weak")
    _, first, inverse = np.unique(labels, return_index=True, return_inverse=True)
    rank = np.argsort(np.argsort(first))
    return rank[inverse].astype(np.int64)


def subgroup_closure(S: Iterable[int], G: FiniteGroup) -> np.ndarray:
    """Smallest subgroup containing S, as a sorted index array."""
    gens = sorted({int(s) for s in S} - {G.identity})
    member = np.zeros(G.n, dtype=bool)
    member[G.identity] = True
    frontier = np.array([G.identity])
    while frontier.size:
        new = np.unique(G.table[np.ix_(frontier, gens)].ravel()) if gens else frontier[:0]
        new = new[~member[new]]
        member[new] = True
        frontier = new
    return np.flatnonzero(member)


def generates(S: Iterable[int], G: FiniteGroup) -> bool:
    return len(subgroup_closure(S, G)) == G.n


def commutator_fibers(G: FiniteGroup) -> dict[int, int]:
    counts = G.commutator_counts
    return {int(c): int(counts[c]) for c in np.flatnonzero(counts)}


def fold_convolution_count(G: FiniteGroup, g: int) -> int:
    """Number of 2g-tuples with prod [a_i, b_i] = 1, by g-fold class-function
    convolution of the commutator distribution."""
    if g == 0:
        return 1
    N = [int(x) for x in G.commutator_counts]
    cls = G.class_of
    reps = G.class_reps
    t, inv = G.table, G.inv
    cur = list(N)
    for _ in range(g - 1):
        # (cur * N)(z) = sum_x cur(x) N(x^-1 z); constant on classes
        val = {}
        for c, z in enumerate(reps):
            col = t[inv, z]  # x^-1 z for every x
            val[c] = sum(cur[x] * N[int(y)] for x, y in enumerate(col) if cur[x] and N[int(y)])
        cur = [val[int(cls[x])] for x in range(G.n)]
    return cur[G.identity]


def random_walk_endpoints(G: FiniteGroup, gens: Sequence[int], length: int, samples: int,
                          rng: np.random.Generator, hold: float | None = None) -> np.ndarray:
    """Endpoints of lazy right-multiplication walks from the identity.

    Each step holds with probability ``hold`` (default 1/(k+1)) and
    otherwise multiplies by a uniformly chosen generator.
    """
    gens = np.asarray(list(gens), dtype=np.int64)
    k = len(gens)
    hold = 1.0 / (k + 1) if hold is None else hold
    if not 0 < hold < 1:
        raise ValueError("hold probability must be in (0, 1)")
    state = np.full(samples, G.identity, dtype=np.int64)
    cols = G.table[:, gens]  # (n, k)
    for _ in range(length):
        move = rng.random(samples) >= hold
        choice = rng.integers(0, k, samples)
        state = np.where(move, cols[state, choice], state)
    return state


def total_variation_from_uniform(samples: np.ndarray, n: int) -> float:
    freq = np.bincount(samples, minlength=n) / len(samples)
    return 0.5 * float(np.abs(freq - 1.0 / n).sum())


# -- construction ----------------------------------------------------------

def group_from_generators(gens: Sequence, mul: Callable, identity, key: Callable[..., Hashable] = lambda x: x,
                          name: str = "", namer: Callable = str, cap: int = MAX_DENSE):
    """Close ``gens`` under ``mul`` and build the dense table.

    Returns (group, elements) where elements[i] is the raw element for
    index i.  Elements are numbered in BFS order from the identity.
    """
    elems = [identity]
    index = {key(identity): 0}
    k = len(gens)
    right = [[] for _ in range(k)]  # right[s][i] = index(elems[i] * gens[s])
    i = 0
    while i < len(elems):
        x = elems[i]
        for s, g in enumerate(gens):
            y = mul(x, g)
            ky = key(y)
            j = index.get(ky)
            if j is None:
                j = len(elems)
                if j >= cap:
                    raise GroupTooLarge(f"group {name} exceeds {cap} elements")
                index[ky] = j
                elems.append(y)
            right[s].append(j)
        i += 1
    n = len(elems)
    R = [np.array(r, dtype=np.int64) for r in right]
    table = np.empty((n, n), dtype=_index_dtype(n))
    table[:, 0] = np.arange(n)
    done = np.zeros(n, dtype=bool)
    done[0] = True
    queue = deque([0])
    # column j*g_s = R_s[column j]
    while queue:
        j = queue.popleft()
        colj = table[:, j].astype(np.int64)
        for s in range(k):
            js = int(R[s][j])
            if not done[js]:
                table[:, js] = R[s][colj]
                done[js] = True
                queue.append(js)
    gen_idx = [index[key(g)] for g in gens]
    G = FiniteGroup(table, gen_idx, [namer(e) for e in elems], identity=0, name=name)
    return G, elems


@dataclass
class GroupHom:
    source: FiniteGroup
    target: FiniteGroup
    image: np.ndarray

    def __call__(self, x):
        return self.image[x]

    def is_homomorphism(self, samples: int = 2000, rng=None) -> bool:
        rng = rng or np.random.default_rng(0)
        a = rng.integers(0, self.source.n, samples)
        b = rng.integers(0, self.source.n, samples)
        lhs = self.image[self.source.table[a, b]]
        rhs = self.target.table[self.image[a], self.image[b]]
        return bool(np.array_equal(lhs, rhs)) and int(self.image[self.source.identity]) == self.target.identity

    @cached_property
    def kernel(self) -> np.ndarray:
        return np.flatnonzero(self.image == self.target.identity)


@dataclass
class AutomorphismSet:
    """Automorphisms of ``group`` as permutations of element indices.

    ``generators`` generate the recorded group; ``complete`` says whether
    that group is all of Aut(Q).
    """
    group: FiniteGroup
    generators: list[np.ndarray]
    complete: bool = True
    order_aut: int | None = None
    order_out: int | None = None
    _cap: int = field(default=10 ** 8, repr=False)

    @cached_property
    def elements(self) -> np.ndarray:
        """Every automorphism in the generated group, shape (|Aut|, n);
        row 0 is the identity."""
        n = self.group.n
        ident = np.arange(n, dtype=_index_dtype(n))
        rows = [ident]
        seen = {ident.tobytes()}
        i = 0
        gens = [g.astype(np.int64) for g in self.generators]
        while i < len(rows):
            a = rows[i].astype(np.int64)
            for g in gens:
                b = g[a].astype(ident.dtype)  # apply a then g
                kb = b.tobytes()
                if kb not in seen:
                    seen.add(kb)
                    rows.append(b)
                    if len(rows) * n > self._cap:
                        raise GroupTooLarge("automorphism group too large to enumerate")
            i += 1
        return np.stack(rows)

    @property
    def size(self) -> int:
        return len(self.elements)

    @cached_property
    def element_orbit_min(self) -> np.ndarray:
        """Smallest element in the Aut-orbit of each element."""
        return self.elements.min(axis=0).astype(np.int64)

    @cached_property
    def transporters(self) -> list[np.ndarray]:
        """transporters[x] = indices of automorphisms sending x to its orbit minimum."""
        A = self.elements
        hit = A == self.element_orbit_min[None, :].astype(A.dtype)
        rows, cols = np.nonzero(hit.T)
        splits = np.searchsorted(rows, np.arange(1, self.group.n))
        return np.split(cols, splits)

    def is_valid(self) -> bool:
        G = self.group
        t = G.table
        for g in self.generators:
            if len(np.unique(g)) != G.n:
                return False
            if not np.array_equal(g[t], t[g[:, None], g[None, :]]):
                return False
        return True


def spanning_levels(G: FiniteGroup) -> list[tuple[np.ndarray, np.ndarray, np.ndarray]]:
    """BFS levels of the Cayley graph from the identity under right
    multiplication by ``G.gens``: a list of (child, parent, gen_position)."""
    seen = np.zeros(G.n, dtype=bool)
    seen[G.identity] = True
    frontier = np.array([G.identity])
    levels = []
    gens = np.asarray(G.gens, dtype=np.int64)
    while frontier.size:
        kids = G.table[np.ix_(frontier, gens)].astype(np.int64)  # (f, k)
        par = np.repeat(frontier, len(gens))
        pos = np.tile(np.arange(len(gens)), len(frontier))
        kids = kids.ravel()
        _, first = np.unique(kids, return_index=True)
        first = first[~seen[kids[first]]]
        first.sort()
        child = kids[first]
        seen[child] = True
        levels.append((child, par[first], pos[first]))
        frontier = child
    return levels


def hom_from_generator_images(G: FiniteGroup, H: FiniteGroup, images: Sequence[int]) -> GroupHom | None:
    """The homomorphism G -> H sending G.gens[i] to images[i], or None if
    that assignment does not extend."""
    images = np.asarray(images, dtype=np.int64)
    img = np.full(G.n, -1, dtype=np.int64)
    img[G.identity] = H.identity
    for child, par, pos in spanning_levels(G):
        img[child] = H.table[img[par], images[pos]]
    for s, gs in enumerate(G.gens):
        if not np.array_equal(img[G.table[:, gs]], H.table[img, images[s]]):
            return None
    return GroupHom(G, H, img)


class SubgroupJoin:
    """Lazily built table of joins <H, z> between subgroups and elements.

    Subgroups get integer ids (0 is the trivial subgroup); ``join(ids, z)``
    is vectorized.  Used for exact generation tests of long tuples: a
    tuple generates G iff folding ``join`` over it ends at ``full_id``.
    """

    def __init__(self, G: FiniteGroup):
        self.G = G
        self.masks: list[np.ndarray] = []
        self.sizes: list[int] = []
        self.gens: list[list[int]] = []
        self._ids: dict[bytes, int] = {}
        self._rows: dict[int, np.ndarray] = {}
        self._intern(np.array([G.identity]), [])
        self.full_id = self._intern(np.arange(G.n), list(G.gens)) if G.n > 1 else 0

    def _intern(self, members: np.ndarray, gens: list[int]) -> int:
        mask = np.zeros(self.G.n, dtype=bool)
        mask[members] = True
        key = np.packbits(mask).tobytes()
        sid = self._ids.get(key)
        if sid is None:
            sid = len(self.masks)
            self._ids[key] = sid
            self.masks.append(mask)
            self.sizes.append(int(mask.sum()))
            self.gens.append(list(gens))
        return sid

    def members(self, sid: int) -> np.ndarray:
        return np.flatnonzero(self.masks[sid])

    def row(self, sid: int) -> np.ndarray:
        """row[z] = id of <H_sid, z>."""
        r = self._rows.get(sid)
        if r is not None:
            return r
        G = self.G
        t = G.table
        H = self.members(sid)
        r = np.full(G.n, -1, dtype=np.int64)
        r[H] = sid
        orders = G.element_orders
        for z in range(G.n):
            if r[z] >= 0:
                continue
            if sid == self.full_id:
                break
            K = subgroup_closure(self.gens[sid] + [z], G)
            kid = self._intern(K, self.gens[sid] + [z])
            # <H, z> = <H, h z^k h'> for h, h' in H and k prime to ord(z)
            o = int(orders[z])
            powers = [z]
            x = z
            for k in range(2, o):
                x = int(t[x, z])
                if math.gcd(k, o) == 1:
                    powers.append(x)
            Z = np.array(powers)
            HZ = t[np.ix_(H, Z)].ravel()
            dc = np.unique(t[np.ix_(HZ, H)].ravel())
            r[dc[r[dc] < 0]] = kid
        self._rows[sid] = r
        return r

    def join(self, ids: np.ndarray, z: np.ndarray) -> np.ndarray:
        ids = np.asarray(ids, dtype=np.int64)
        z = np.asarray(z, dtype=np.int64)
        out = np.empty(np.broadcast(ids, z).shape, dtype=np.int64)
        ids, z = np.broadcast_arrays(ids, z)
        for sid in np.unique(ids):
            sel = ids == sid
            out[sel] = self.row(int(sid))[z[sel]]
        return out

    def generated(self, T: np.ndarray) -> np.ndarray:
        """Subgroup id generated by each row of T (shape (m, k))."""
        T = np.asarray(T, dtype=np.int64)
        ids = np.zeros(T.shape[0], dtype=np.int64)
        for j in range(T.shape[1]):
            ids = self.join(ids, T[:, j])
        return ids

    def generates(self, T: np.ndarray) -> np.ndarray:
        return self.generated(T) == self.full_id


def product_generates(G: FiniteGroup, xs: Sequence[int], ys: Sequence[int]) -> bool:
    """Whether the pairs (x_i, y_i) generate G x G."""
    n = G.n
    gens = [(int(x), int(y)) for x, y in zip(xs, ys)]
    seen = np.zeros(n * n, dtype=bool)
    start = G.identity * n + G.identity
    seen[start] = True
    frontier = np.array([start])
    t = G.table
    while frontier.size:
        a, b = frontier // n, frontier % n
        new = np.concatenate([t[a, x].astype(np.int64) * n + t[b, y] for x, y in gens])
        new = np.unique(new)
        new = new[~seen[new]]
        seen[new] = True
        frontier = new
    return bool(seen.all())
