"""Constructors and metadata for the group families used in the experiments.

Spec strings accepted by :func:`parse_spec` (case and spacing tolerant)::

    Z/n            Z/a x Z/b x ...
    A n  (A5, A_5) S n
    PSL(2,q)       PGL(2,q)       SL(2,q)
    M11
"""
from __future__ import annotations

import math
import re
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from itertools import product

import numpy as np

from .finite_field import FqContext, Mat2, field_of_order, mat2_inv, mat2_mul, normalize_proj, prime_power
from .groups import (AutomorphismSet, FiniteGroup, GroupHom, GroupTooLarge, group_from_generators,
                     hom_from_generator_images)


class UnsupportedGroup(ValueError):
    pass


# ---------------------------------------------------------------------------
# spec strings

@dataclass(frozen=True)
class GroupSpec:
    family: str            # "Z", "A", "S", "PSL", "PGL", "SL", "M"
    params: tuple[int, ...]

    def __str__(self) -> str:
        f, p = self.family, self.params
        if f == "Z":
            return " x ".join(f"Z/{n}" for n in p)
        if f in ("A", "S"):
            return f"{f} {p[0]}"
        if f in ("PSL", "PGL", "SL"):
            return f"{f}(2,{p[0]})"
        if f == "M":
            return f"M{p[0]}"
        raise AssertionError(f)

    @property
    def compact(self) -> str:
        """Filesystem/CLI friendly name, e.g. ``A5`` or ``PSL2_13``."""
        f, p = self.family, self.params
        if f == "Z":
            return "x".join(f"Z{n}" for n in p)
        if f in ("PSL", "PGL", "SL"):
            return f"{f}2_{p[0]}"
        return f"{f}{p[0]}"


_Z_RE = re.compile(r"^z/(\d+)$")
_AS_RE = re.compile(r"^([as])_?(\d+)$")
_MAT_RE = re.compile(r"^(psl|pgl|sl)\(?2,(\d+)\)?$")


def parse_spec(text: str | GroupSpec) -> GroupSpec:
    if isinstance(text, GroupSpec):
        return text
    s = re.sub(r"\s+", "", str(text)).lower()
    if not s:
        raise UnsupportedGroup("empty group spec")
    if s.startswith("z/"):
        parts = s.split("x")
        orders = []
        for part in parts:
            m = _Z_RE.match(part)
            if not m:
                raise UnsupportedGroup(f"cannot parse group spec {text!r}")
            orders.append(int(m.group(1)))
        if any(n < 1 for n in orders):
            raise UnsupportedGroup(f"cyclic factor orders must be positive: {text!r}")
        return GroupSpec("Z", tuple(orders))
    m = _AS_RE.match(s)
    if m:
        n = int(m.group(2))
        if n < 1:
            raise UnsupportedGroup(f"bad degree in {text!r}")
        return GroupSpec(m.group(1).upper(), (n,))
    m = _MAT_RE.match(s)
    if m:
        q = int(m.group(2))
        prime_power(q)
        return GroupSpec(m.group(1).upper(), (q,))
    if s == "m11":
        return GroupSpec("M", (11,))
    raise UnsupportedGroup(f"cannot parse group spec {text!r}")


# ---------------------------------------------------------------------------
# metadata

@dataclass(frozen=True)
class GroupMeta:
    order: int
    order_out: int | None
    h2: int | None
    order_aut: int | None
    simple: bool
    source: str  # "table" (built-in values) or "computed"

    @property
    def mu(self) -> Fraction | None:
        if self.h2 is None or self.order_out is None:
            return None
        return Fraction(self.h2, self.order_out)


def _abelian_h2(orders: tuple[int, ...]) -> int:
    out = 1
    for i in range(len(orders)):
        for j in range(i + 1, len(orders)):
            out *= math.gcd(orders[i], orders[j])
    return out


def _is_simple_abelian(orders: tuple[int, ...]) -> bool:
    nontrivial = [n for n in orders if n > 1]
    if len(nontrivial) != 1:
        return False
    n = nontrivial[0]
    return n > 1 and all(n % d for d in range(2, int(n ** 0.5) + 1))


def builtin_meta(spec: GroupSpec) -> tuple[int | None, int | None, bool]:
    """(|Out|, |H_2|, simple) from standard tables, where known."""
    f, (n, *_) = spec.family, spec.params
    if f == "A":
        if n >= 5:
            out = 4 if n == 6 else 2
            h2 = 6 if n in (6, 7) else 2
            return out, h2, True
        if n == 4:
            return 2, 2, False
        return (2 if n == 3 else 1), 1, n == 3
    if f == "S":
        if n >= 4:
            return (2 if n == 6 else 1), 2, False
        return 1, 1, n == 2
    if f in ("PSL", "PGL", "SL"):
        p, e = prime_power(n)
        if f == "PSL":
            out = math.gcd(2, n - 1) * e
            if n == 9:
                h2 = 6
            elif n == 4:
                h2 = 2
            else:
                h2 = 2 if p != 2 else 1
            return out, h2, n >= 4
        if f == "PGL":
            if p == 2:
                return e, (2 if n == 4 else 1), n >= 4
            return e, 2, False
        if p == 2:
            return e, (2 if n == 4 else 1), n >= 4
        return 2 * e, (3 if n == 9 else 1), False
    if f == "M":
        return 1, 1, True
    return None, None, False


# ---------------------------------------------------------------------------
# the built group bundle

@dataclass
class CatalogGroup:
    spec: GroupSpec
    group: FiniteGroup
    aut: AutomorphismSet
    meta: GroupMeta
    elements: list  # raw element objects, index-aligned with the group

    @property
    def name(self) -> str:
        return str(self.spec)


def _perm_mul(p: tuple, q: tuple) -> tuple:
    """p*q = p after q."""
    return tuple(p[i] for i in q)


def _perm_inv(p: tuple) -> tuple:
    out = [0] * len(p)
    for i, x in enumerate(p):
        out[x] = i
    return tuple(out)


def _cycle(n: int, *cycles) -> tuple:
    p = list(range(n))
    for c in cycles:
        for i, x in enumerate(c):
            p[x] = c[(i + 1) % len(c)]
    return tuple(p)


def _perm_name(p: tuple) -> str:
    seen, parts = set(), []
    for i in range(len(p)):
        if i in seen or p[i] == i:
            continue
        c, j = [], i
        while j not in seen:
            seen.add(j)
            c.append(j)
            j = p[j]
        parts.append("(" + " ".join(map(str, c)) + ")")
    return "".join(parts) or "()"


def _index_map(elems, key=lambda x: x) -> dict:
    return {key(e): i for i, e in enumerate(elems)}


def _perm_autos(elems: list, index: dict, maps, key=lambda x: x) -> list[np.ndarray]:
    return [np.array([index[key(m(e))] for e in elems], dtype=np.int64) for m in maps]


# -- abelian -----------------------------------------------------------------

def _build_abelian(spec: GroupSpec) -> CatalogGroup:
    orders = spec.params
    n_total = math.prod(orders)
    elems = list(product(*[range(n) for n in orders]))
    index = _index_map(elems)
    add = lambda x, y: tuple((a + b) % n for a, b, n in zip(x, y, orders))
    k = len(orders)
    table = np.empty((n_total, n_total), dtype=np.int32)
    for i, x in enumerate(elems):
        table[i] = [index[add(x, y)] for y in elems]
    if n_total > 1:
        units = [tuple(int(i == j) for j in range(k)) for i in range(k)]
        gens = [index[u] for u, n in zip(units, orders) if n > 1]
    else:
        units, gens = [], []
    G = FiniteGroup(table, gens, [str(e) if k > 1 else str(e[0]) for e in elems], name=str(spec))
    # every automorphism: images of the unit vectors with compatible orders
    elem_order = [math.lcm(*[n // math.gcd(n, c) for n, c in zip(orders, e)]) for e in elems]
    cands = [[y for y, o in zip(elems, elem_order) if n % o == 0] for n in orders]
    if math.prod(len(c) for c in cands) > 2 * 10 ** 5:
        raise GroupTooLarge(f"automorphism search for {spec}")
    autos = []
    for imgs in product(*cands):
        perm = []
        for e in elems:
            v = tuple(0 for _ in orders)
            for c, y in zip(e, imgs):
                v = add(v, tuple((c * t) % n for t, n in zip(y, orders)))
            perm.append(index[v])
        if len(set(perm)) == n_total:
            autos.append(np.array(perm, dtype=np.int64))
    A = AutomorphismSet(G, autos or [np.arange(n_total)], complete=True, order_aut=len(autos),
                        order_out=len(autos))
    meta = GroupMeta(n_total, len(autos), _abelian_h2(tuple(n for n in orders if n > 1)), len(autos),
                     _is_simple_abelian(orders), "computed")
    return CatalogGroup(spec, G, A, meta, elems)


# -- symmetric and alternating -------------------------------------------------

def _alt_gens(n: int) -> list[tuple]:
    if n <= 2:
        return [tuple(range(n))]
    if n == 3:
        return [_cycle(3, (0, 1, 2))]
    if n % 2:
        return [_cycle(n, (0, 1, 2)), _cycle(n, tuple(range(n)))]
    return [_cycle(n, (0, 1, 2)), _cycle(n, tuple(range(1, n)))]


def _sym_gens(n: int) -> list[tuple]:
    if n == 1:
        return [tuple(range(1))]
    if n == 2:
        return [(1, 0)]
    return [_cycle(n, (0, 1)), _cycle(n, tuple(range(n)))]


def _build_perm_group(spec: GroupSpec, gens: list[tuple], conj_by: list[tuple]):
    n = len(gens[0])
    ident = tuple(range(n))
    G, elems = group_from_generators(gens, _perm_mul, ident, name=str(spec), namer=_perm_name)
    index = _index_map(elems)
    maps = [(lambda s, si: (lambda x: _perm_mul(_perm_mul(s, x), si)))(s, _perm_inv(s)) for s in conj_by]
    return G, elems, index, _perm_autos(elems, index, maps)


def _a6_outer(G: FiniteGroup, elems: list) -> np.ndarray:
    """An automorphism of A6 swapping the two classes of elements of order 3."""
    orders = G.element_orders
    x, y = G.gens
    moved = np.array([sum(1 for k, v in enumerate(e) if k != v) for e in elems])
    target_x = np.flatnonzero((orders == 3) & (moved == 6))
    target_y = np.flatnonzero(orders == orders[y])
    xy = orders[G.mul(x, y)]
    xyi = orders[G.mul(x, int(G.inv[y]))]
    for u in target_x:
        for v in target_y:
            if orders[G.mul(u, v)] != xy or orders[G.mul(u, int(G.inv[v]))] != xyi:
                continue
            h = hom_from_generator_images(G, G, [u, v])
            if h is not None and len(np.unique(h.image)) == G.n:
                return h.image.astype(np.int64)
    raise AssertionError("no outer automorphism of A6 found")


def _build_alternating(spec: GroupSpec) -> CatalogGroup:
    n = spec.params[0]
    if n < 3:
        raise UnsupportedGroup("A n needs n >= 3")
    G, elems, index, autos = _build_perm_group(spec, _alt_gens(n), _sym_gens(n))
    out, h2, simple = builtin_meta(spec)
    if n == 6:
        autos.append(_a6_outer(G, elems))
    order_aut = G.n * out if simple else None
    if n == 4:
        order_aut = 24
    if n == 3:
        order_aut = 2
    A = AutomorphismSet(G, autos, complete=True, order_aut=order_aut, order_out=out)
    meta = GroupMeta(G.n, out, h2, order_aut, simple, "table")
    return CatalogGroup(spec, G, A, meta, elems)


def _build_symmetric(spec: GroupSpec) -> CatalogGroup:
    n = spec.params[0]
    G, elems, index, autos = _build_perm_group(spec, _sym_gens(n), _sym_gens(n))
    out, h2, simple = builtin_meta(spec)
    order_aut = 1 if n <= 2 else G.n * out
    A = AutomorphismSet(G, autos, complete=n != 6, order_aut=order_aut, order_out=out)
    meta = GroupMeta(G.n, out, h2, order_aut, simple, "table")
    return CatalogGroup(spec, G, A, meta, elems)


# -- Mathieu M11 ---------------------------------------------------------------

def _build_m11(spec: GroupSpec) -> CatalogGroup:
    # points 0..10 for the usual 1..11 labels
    g1 = _cycle(11, tuple(range(11)))
    g2 = _cycle(11, (2, 6, 10, 7), (3, 9, 4, 5))
    G, elems = group_from_generators([g1, g2], _perm_mul, tuple(range(11)), name=str(spec), namer=_perm_name)
    index = _index_map(elems)
    maps = [(lambda s, si: (lambda x: _perm_mul(_perm_mul(s, x), si)))(s, _perm_inv(s)) for s in (g1, g2)]
    A = AutomorphismSet(G, _perm_autos(elems, index, maps), complete=True, order_aut=G.n, order_out=1)
    meta = GroupMeta(G.n, 1, 1, G.n, True, "table")
    return CatalogGroup(spec, G, A, meta, elems)


# -- 2x2 matrix groups ---------------------------------------------------------

def _primitive(F: FqContext) -> int:
    if F.q == 2:
        return 1
    exp, _ = F._logs
    return int(exp[1])


def _mat_conj(g: Mat2, F: FqContext):
    gi = mat2_inv(g, F)
    return lambda m: mat2_mul(mat2_mul(g, m, F), gi, F)


def _frob(F: FqContext):
    return lambda m: Mat2(*(F.frobenius(x) for x in m))


def _mat_name(m: Mat2) -> str:
    return f"[[{m.a},{m.b}],[{m.c},{m.d}]]"


def _build_matrix_group(spec: GroupSpec) -> CatalogGroup:
    q = spec.params[0]
    F = field_of_order(q)
    w = _primitive(F)
    U, L = Mat2(1, 1, 0, 1), Mat2(1, 0, 1, 1)
    D = Mat2(w, 0, 0, F.inv(w))   # in SL
    Dg = Mat2(w, 0, 0, 1)         # in GL, generates PGL over PSL
    projective = spec.family in ("PSL", "PGL")
    key = (lambda m: normalize_proj(m, F)) if projective else (lambda m: m)
    mul = lambda x, y: mat2_mul(x, y, F)
    gens = [U, L] + ([D] if q > 3 else [])
    if spec.family == "PGL":
        gens.append(Dg)
    gens = [key(g) for g in gens]
    G, elems = group_from_generators(gens, lambda x, y: key(mul(x, y)), Mat2(1, 0, 0, 1), key=key,
                                     name=str(spec), namer=_mat_name)
    index = _index_map(elems)
    maps = [(lambda c: (lambda m: key(c(m))))(_mat_conj(g, F)) for g in (U, L, Dg)]
    if F.e > 1:
        fr = _frob(F)
        maps.append(lambda m: key(fr(m)))
    autos = _perm_autos(elems, index, maps)
    out, h2, simple = builtin_meta(spec)
    e = F.e
    # |PGammaL(2,q)| = q(q^2-1) e
    order_aut = q * (q * q - 1) * e  # |PGammaL(2,q)|
    A = AutomorphismSet(G, autos, complete=True, order_aut=order_aut, order_out=out)
    meta = GroupMeta(G.n, out, h2, order_aut, simple, "table")
    return CatalogGroup(spec, G, A, meta, elems)


_BUILDERS = {
    "Z": _build_abelian,
    "A": _build_alternating,
    "S": _build_symmetric,
    "PSL": _build_matrix_group,
    "PGL": _build_matrix_group,
    "SL": _build_matrix_group,
    "M": _build_m11,
}


@lru_cache(maxsize=32)
def _build_cached(spec: GroupSpec) -> CatalogGroup:
    return _BUILDERS[spec.family](spec)


def build(spec: str | GroupSpec) -> CatalogGroup:
    """Construct the group, its automorphism generators and metadata."""
    return _build_cached(parse_spec(spec))


# ---------------------------------------------------------------------------
# Schur covers

@dataclass
class SchurCoverData:
    cover: FiniteGroup
    h2: np.ndarray          # central kernel elements of the cover
    projection: GroupHom    # cover -> base
    section: np.ndarray     # section[x] = a chosen preimage of base element x

    def check(self) -> None:
        S, pi = self.cover, self.projection
        if not pi.is_homomorphism(samples=4000):
            raise AssertionError("projection is not a homomorphism")
        if len(np.unique(pi.image)) != pi.target.n:
            raise AssertionError("projection not surjective")
        if not np.array_equal(np.sort(pi.kernel), np.sort(self.h2)):
            raise AssertionError("kernel differs from the listed H2 elements")
        t = S.table
        for z in self.h2:
            if not np.array_equal(t[z, :], t[:, z]):
                raise AssertionError("H2 element is not central")
        derived = set(S.derived_subgroup.tolist())
        if not set(self.h2.tolist()) <= derived:
            raise AssertionError("H2 is not inside the commutator subgroup")
        if not np.array_equal(pi.image[self.section], np.arange(pi.target.n)):
            raise AssertionError("section is not a section")


class CoverUnavailable(UnsupportedGroup):
    pass


def _section(image: np.ndarray, n: int) -> np.ndarray:
    sec = np.full(n, -1, dtype=np.int64)
    # smallest preimage per base element
    order = np.argsort(image, kind="stable")
    first = np.searchsorted(image[order], np.arange(n))
    sec[:] = order[first]
    return sec


def find_isomorphism(G: FiniteGroup, H: FiniteGroup) -> GroupHom | None:
    if G.n != H.n:
        return None
    og, oh = G.element_orders, H.element_orders
    cands = [np.flatnonzero(oh == og[g]) for g in G.gens]
    for imgs in product(*cands):
        h = hom_from_generator_images(G, H, list(imgs))
        if h is not None and len(np.unique(h.image)) == H.n:
            return h
    return None


def _heisenberg(n: int) -> tuple[FiniteGroup, list]:
    mul = lambda x, y: ((x[0] + y[0]) % n, (x[1] + y[1]) % n, (x[2] + y[2] + x[0] * y[1]) % n)
    return group_from_generators([(1, 0, 0), (0, 1, 0)], mul, (0, 0, 0), name=f"Heis(Z/{n})")


def _cover_for(spec: GroupSpec) -> SchurCoverData:
    base = build(spec)
    Q = base.group
    if spec.family == "Z":
        nontriv = [n for n in spec.params if n > 1]
        if len(nontriv) <= 1:
            ident = GroupHom(Q, Q, np.arange(Q.n))
            return SchurCoverData(Q, np.array([Q.identity]), ident, np.arange(Q.n))
        if len(nontriv) == 2 and nontriv[0] == nontriv[1]:
            n = nontriv[0]
            S, selems = _heisenberg(n)
            # generators (1,0,0), (0,1,0) go to the two unit vectors of Z/n x Z/n
            pi = hom_from_generator_images(S, Q, Q.gens)
            assert pi is not None
            h2 = np.array([i for i, e in enumerate(selems) if e[0] == 0 and e[1] == 0])
            return SchurCoverData(S, h2, pi, _section(pi.image, Q.n))
        raise CoverUnavailable(f"no Schur cover available for {spec}")
    if spec.family == "PSL":
        q = spec.params[0]
        if q % 2 == 0 or q == 9:
            if q % 2 == 0 and q != 4:
                ident = GroupHom(Q, Q, np.arange(Q.n))
                return SchurCoverData(Q, np.array([Q.identity]), ident, np.arange(Q.n))
            raise CoverUnavailable(f"no Schur cover available for {spec}")
        return _sl_cover(q, base)
    if spec.family == "A" and spec.params[0] == 5:
        psl = build("PSL(2,5)")
        iso = find_isomorphism(Q, psl.group)
        cov = _sl_cover(5, psl)
        # compose the PSL projection with the inverse isomorphism
        inv_iso = np.empty(Q.n, dtype=np.int64)
        inv_iso[iso.image] = np.arange(Q.n)
        pi = GroupHom(cov.cover, Q, inv_iso[cov.projection.image])
        return SchurCoverData(cov.cover, cov.h2, pi, _section(pi.image, Q.n))
    if spec.family == "M":
        ident = GroupHom(Q, Q, np.arange(Q.n))
        return SchurCoverData(Q, np.array([Q.identity]), ident, np.arange(Q.n))
    raise CoverUnavailable(f"no Schur cover available for {spec}")


def _sl_cover(q: int, psl: CatalogGroup) -> SchurCoverData:
    F = field_of_order(q)
    sl = build(f"SL(2,{q})")
    index = _index_map(psl.elements)
    image = np.array([index[normalize_proj(m, F)] for m in sl.elements], dtype=np.int64)
    pi = GroupHom(sl.group, psl.group, image)
    minus = sl.elements.index(Mat2(F.neg(1), 0, 0, F.neg(1)))
    h2 = np.array(sorted({0, minus}))
    return SchurCoverData(sl.group, h2, pi, _section(image, psl.group.n))


@lru_cache(maxsize=16)
def _schur_cached(spec: GroupSpec) -> SchurCoverData:
    data = _cover_for(spec)
    data.check()
    return data


def schur_cover(spec: str | GroupSpec) -> SchurCoverData:
    """Schur cover with its central H2 kernel, checked on construction.

    Raises :class:`CoverUnavailable` when no cover is implemented.
    """
    return _schur_cached(parse_spec(spec))


# ---------------------------------------------------------------------------
# reference table of simple groups: (name, order, generating pairs mod Aut, |Out|)

EXPECTED_TABLE_ROWS: list[tuple[str, int, int, int, float, float]] = [
    ("A5", 60, 19, 2, 0.005278, 0.008333),
    ("PSL(2,7)", 168, 57, 2, 0.002020, 0.002976),
    ("A6", 360, 53, 4, 0.000409, 0.000694),
    ("PSL(2,8)", 504, 142, 3, 0.000559, 0.000661),
    ("PSL(2,11)", 660, 254, 2, 0.000583, 0.000758),
    ("PSL(2,13)", 1092, 495, 2, 0.000415, 0.000458),
    ("PSL(2,17)", 2448, 1132, 2, 0.000189, 0.000204),
    ("A7", 2520, 916, 2, 0.000144, 0.000198),
    ("PSL(2,19)", 3420, 1570, 2, 0.000134, 0.000146),
    ("PSL(2,16)", 4080, 939, 4, 0.000056, 0.000061),
    ("PSL(3,3)", 5616, 2424, 2, 0.000077, 0.000089),
    ("U3(3)", 6048, 2784, 2, 0.000076, 0.000083),
    ("PSL(2,23)", 6072, 2881, 2, 0.000078, 0.000082),
    ("PSL(2,25)", 7800, 1822, 4, 0.000030, 0.000032),
    ("M11", 7920, 6478, 1, 0.000103, 0.000126),
    ("PSL(2,27)", 9828, 1572, 6, 0.000016, 0.000017),
    ("PSL(2,29)", 12180, 5825, 2, 0.000039, 0.000041),
    ("PSL(2,31)", 14880, 7135, 2, 0.000032, 0.000034),
    ("A8", 20160, 7448, 2, 0.000018, 0.000024),
    ("PSL(3,4)", 20160, 1452, 12, 0.000004, 0.000004),
    ("PSL(2,37)", 25308, 12291, 2, 0.000019, 0.000020),
    ("U4(2)", 25920, 11505, 2, 0.000017, 0.000019),
    ("Sz(8)", 29120, 9534, 3, 0.000011, 0.000011),
    ("PSL(2,32)", 32736, 6330, 5, 0.000006, 0.000006),
]

_TABLE_AUT = {name: order * out for name, order, _, out, _, _ in EXPECTED_TABLE_ROWS}


def order_aut(spec_or_name: str) -> int:
    """|Aut(Q)| from the catalog metadata, falling back to the reference table
    for groups the catalog does not construct."""
    if spec_or_name in _TABLE_AUT:
        return _TABLE_AUT[spec_or_name]
    spec = parse_spec(spec_or_name)
    key = spec.compact.replace("2_", "(2,") + (")" if spec.family in ("PSL", "PGL", "SL") else "")
    if key in _TABLE_AUT:
        return _TABLE_AUT[key]
    meta = build(spec).meta
    if meta.order_aut is None:
        raise UnsupportedGroup(f"|Aut| unknown for {spec}")
    return meta.order_aut


def partial_aut_sum(catalog: list[str], exact: bool = False) -> float | Fraction:
    """Sum of 1/|Aut(Q)| over the listed simple groups."""
    total = sum((Fraction(1, order_aut(name)) for name in catalog), Fraction(0))
    return total if exact else float(total)
