"""Where the last relators of a Heegaard diagram can land.

Torus step: a simple closed curve is a primitive vector of Z^2, and for a
cyclic target Z/a the primitive vectors in the kernel have density 1/beta(a).
Genus-2 step: the hyperelliptic involution forces images of non-separating
curves in PSL(2,q) into small anti-fixed sets of an involution.
"""
from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

import numpy as np
from sympy import mobius

from .catalog import build, schur_cover
from .epi import homology_class
from .finite_field import (FqContext, Mat2, factorize, field_of_order, mat2_det, mat2_identity, mat2_inv,
                           mat2_mul, mat2_trace, normalize_proj)


# -- beta and primitive vectors -----------------------------------------------------

def beta(a: int) -> int:
    """prod over p^k || a of p^(k-1) (p+1)."""
    if a < 1:
        raise ValueError("beta is defined for a >= 1")
    out = 1
    for p, k in factorize(a).items():
        out *= p ** (k - 1) * (p + 1)
    return out


def _disk_rows(r: float) -> np.ndarray:
    """Half-widths floor(sqrt(r^2 - x^2)) for x = -floor(r)..floor(r)."""
    R = int(np.floor(r))
    x = np.arange(-R, R + 1, dtype=np.int64)
    w = np.floor(np.sqrt(np.maximum(r * r - x * x, 0))).astype(np.int64)
    # repair float rounding at perfect squares
    w -= (w * w + x * x > r * r)
    w += ((w + 1) ** 2 + x * x <= r * r)
    return x, w


def _count_disk(r: float, xmod: int = 1, ymod: int = 1) -> int:
    """Lattice points in the disk of radius r with xmod | x and ymod | y."""
    if r < 0:
        return 0
    x, w = _disk_rows(r)
    keep = x % xmod == 0
    return int(np.sum(2 * (w[keep] // ymod) + 1))


@dataclass(frozen=True)
class KernelDensity:
    primitive: int
    in_kernel: int

    @property
    def density(self) -> Fraction:
        return Fraction(self.in_kernel, self.primitive) if self.primitive else Fraction(0)


def primitive_kernel_density(a: int, b: int = 0, radius: float = 1000.0) -> KernelDensity:
    """Primitive lattice points in the disk of the given radius, and those in
    the kernel of Z^2 -> Z/a (b = 0, (x, y) -> x) or Z^2 -> Z/a + Z/ab
    (b >= 1, coordinatewise), counted exactly by Moebius inversion over the
    common divisor d of the coordinates."""
    R = int(np.floor(radius))
    mx, my = a, (a * b if b else 1)
    prim = kern = 0
    for d in range(1, R + 1):
        mu = int(mobius(d))
        if not mu:
            continue
        r = radius / d
        prim += mu * (_count_disk(r) - 1)  # drop the origin
        kern += mu * (_count_disk(r, mx // math.gcd(mx, d), my // math.gcd(my, d)) - 1)
    return KernelDensity(prim, kern)


def primitive_kernel_scan(a: int, b: int, radius: int) -> KernelDensity:
    """Direct scan of the disk (oracle for the Moebius count)."""
    prim = kern = 0
    x, w = _disk_rows(radius)
    for xi, wi in zip(x.tolist(), w.tolist()):
        y = np.arange(-wi, wi + 1)
        ok = np.gcd(xi, y) == 1
        prim += int(ok.sum())
        if b == 0:
            if xi % a == 0:
                kern += int(ok.sum())
        else:
            kern += int((ok & (xi % a == 0) & (y % (a * b) == 0)).sum())
    return KernelDensity(prim, kern)


# -- linear algebra over F_q ------------------------------------------------------

def nullspace_fq(rows: Sequence[Sequence[int]], ncols: int, F: FqContext) -> list[list[int]]:
    """Basis of {v : M v = 0} over F_q."""
    M = [list(r) for r in rows]
    pivots = []
    r = 0
    for c in range(ncols):
        piv = next((i for i in range(r, len(M)) if M[i][c]), None)
        if piv is None:
            continue
        M[r], M[piv] = M[piv], M[r]
        inv = F.inv(M[r][c])
        M[r] = [F.mul(inv, x) for x in M[r]]
        for i in range(len(M)):
            if i != r and M[i][c]:
                f = M[i][c]
                M[i] = [F.sub(x, F.mul(f, y)) for x, y in zip(M[i], M[r])]
        pivots.append(c)
        r += 1
    free = [c for c in range(ncols) if c not in pivots]
    basis = []
    for fc in free:
        v = [0] * ncols
        v[fc] = 1
        for i, pc in enumerate(pivots):
            v[pc] = F.neg(M[i][fc])
        basis.append(v)
    return basis


def _trace_row(A: Mat2, F: FqContext) -> list[int]:
    """Coefficients of tr(T A) in the entries (t11, t12, t21, t22) of T."""
    return [A.a, A.c, A.b, A.d]


def _proj_eq(X: Mat2, Y: Mat2, F: FqContext) -> bool:
    return normalize_proj(X, F) == normalize_proj(Y, F)


def _conj(T: Mat2, X: Mat2, F: FqContext) -> Mat2:
    return mat2_mul(mat2_mul(T, X, F), mat2_inv(T, F), F)


def fixed_points(A: Mat2, F: FqContext) -> set:
    """Fixed points of A on P^1(F_q) as normalized column vectors."""
    pts = [(1, 0)] + [(x, 1) for x in F.elements()]
    out = set()
    for u, v in pts:
        w = (F.add(F.mul(A.a, u), F.mul(A.b, v)), F.add(F.mul(A.c, u), F.mul(A.d, v)))
        if F.sub(F.mul(w[0], v), F.mul(w[1], u)) == 0:
            out.add((u, v))
    return out


def common_fixed_point(mats: Sequence[Mat2], F: FqContext) -> bool:
    common = None
    for A in mats:
        fp = fixed_points(A, F)
        common = fp if common is None else common & fp
        if not common:
            return False
    return bool(common)


def _nonsingular_in_span(basis: list[list[int]], F: FqContext) -> Mat2 | None:
    if not basis:
        return None
    for v in basis:
        T = Mat2(*v)
        if mat2_det(T, F):
            return T
    if len(basis) > 3:
        return None
    for coeffs in itertools.product(F.elements(), repeat=len(basis)):
        v = [0, 0, 0, 0]
        for c, b in zip(coeffs, basis):
            v = [F.add(x, F.mul(c, y)) for x, y in zip(v, b)]
        T = Mat2(*v)
        if mat2_det(T, F):
            return T
    return None


@dataclass(frozen=True)
class InvolutionWitness:
    T: Mat2
    A: Mat2
    B: Mat2
    q: int

    def verify(self) -> bool:
        F = field_of_order(self.q)
        T = self.T
        return (mat2_det(T, F) != 0 and mat2_trace(T, F) == 0
                and _proj_eq(_conj(T, self.A, F), mat2_inv(self.A, F), F)
                and _proj_eq(_conj(T, self.B, F), mat2_inv(self.B, F), F))


class PreconditionError(ValueError):
    pass


def solve_reversing_involution(A: Mat2, B: Mat2, q: int) -> InvolutionWitness:
    """An involution T of PGL(2,q) with T A T^-1 = A^-1 and T B T^-1 = B^-1,
    from the homogeneous system tr(T) = tr(TA) = tr(TB) = 0."""
    F = field_of_order(q)
    if q % 2 == 0:
        raise PreconditionError("q must be odd")
    if common_fixed_point([A, B], F):
        raise PreconditionError("A and B share a fixed point on P^1")
    rows = [_trace_row(mat2_identity(), F), _trace_row(A, F), _trace_row(B, F)]
    basis = nullspace_fq(rows, 4, F)
    T = _nonsingular_in_span(basis, F)
    if T is None:
        raise AssertionError("no nonsingular solution: contradicts the reversing-involution lemma")
    w = InvolutionWitness(normalize_proj(T, F), A, B, q)
    if not w.verify():
        raise AssertionError("solution failed verification")
    return w


def pgl_elements(q: int) -> list[Mat2]:
    F = field_of_order(q)
    out = set()
    for v in itertools.product(F.elements(), repeat=4):
        M = Mat2(*v)
        if mat2_det(M, F):
            out.add(normalize_proj(M, F))
    return sorted(out)


def brute_reversing_involutions(A: Mat2, B: Mat2, q: int) -> list[Mat2]:
    F = field_of_order(q)
    Ai, Bi = mat2_inv(A, F), mat2_inv(B, F)
    return [T for T in pgl_elements(q)
            if _proj_eq(_conj(T, A, F), Ai, F) and _proj_eq(_conj(T, B, F), Bi, F)]


# -- anti-fixed sets -----------------------------------------------------------------

def _is_involution(U: Mat2, F: FqContext) -> bool:
    U2 = mat2_mul(U, U, F)
    return mat2_det(U, F) != 0 and U2.b == 0 and U2.c == 0 and U2.a == U2.d and not (U.b == 0 and U.c == 0 and U.a == U.d)


def anti_fixed_formula(U: Mat2, q: int) -> int:
    """(q^2 + (2 e_- - 1) q + 2 e_+) / 2 with e_pm = [pm det U is a square]."""
    F = field_of_order(q)
    if not _is_involution(U, F):
        raise ValueError("U must have order 2 in PGL(2,q)")
    d = mat2_det(U, F)
    ep = int(F.is_square(d))
    em = int(F.is_square(F.neg(d)))
    twice = q * q + (2 * em - 1) * q + 2 * ep
    return twice // 2


def anti_fixed_brute(U: Mat2, q: int) -> int:
    F = field_of_order(q)
    if not _is_involution(U, F):
        raise ValueError("U must have order 2 in PGL(2,q)")
    Ui = mat2_inv(U, F)
    n = 0
    for W in build(f"PSL(2,{q})").elements:
        if _proj_eq(mat2_mul(mat2_mul(U, W, F), Ui, F), mat2_inv(W, F), F):
            n += 1
    return n


def count_anti_fixed(U: Mat2, q: int, method: str = "formula") -> int:
    return anti_fixed_formula(U, q) if method == "formula" else anti_fixed_brute(U, q)


def pgl_involutions(q: int) -> list[Mat2]:
    F = field_of_order(q)
    return [U for U in pgl_elements(q) if _is_involution(U, F)]


def genus2_image_bound(q: int) -> int:
    return (q * q + q + 2) // 2


# -- words and the hyperelliptic involution ---------------------------------------------

def eval_word_mats(word: Sequence[int], mats: Sequence[Mat2], F: FqContext) -> Mat2:
    """Letters +-k stand for mats[k-1]^{+-1}."""
    out = mat2_identity()
    for x in word:
        M = mats[abs(x) - 1]
        out = mat2_mul(out, M if x > 0 else mat2_inv(M, F), F)
    return out


def standard_form_word(rng: np.random.Generator, half: int, s: int = 0) -> list[int]:
    """s p with p a palindrome in a^{+-1}, b^{+-1} (letters +-1, +-2): the free
    involution a -> a^-1, b -> b^-1 sends it to s^-1 w^-1 s."""
    letters = [1, -1, 2, -2]
    u = [letters[i] for i in rng.integers(0, 4, half)]
    mid = [letters[rng.integers(0, 4)]] if rng.integers(0, 2) else []
    p = u + mid + u[::-1]
    return ([s] if s else []) + p


def handlebody_image_check(q: int, samples: int, words: int, seed: int = 0) -> dict:
    """For random generating pairs (A, B) of PSL(2,q), images of standard-form
    words with a fixed prefix s fall in the anti-fixed set of U = f(s) T.
    Returns the largest image set seen and the bound."""
    F = field_of_order(q)
    cat = build(f"PSL(2,{q})")
    G = cat.group
    rng = np.random.default_rng(seed)
    worst = 0
    checked = 0
    while checked < samples:
        a, b = (int(x) for x in rng.integers(0, G.n, 2))
        if not G.generates([a, b]):
            continue
        A, B = cat.elements[a], cat.elements[b]
        T = solve_reversing_involution(A, B, q).T
        for s in (0, 1, -1, 2, -2):
            S = eval_word_mats([s], [A, B], F) if s else mat2_identity()
            U = mat2_mul(S, T, F)
            Ui = mat2_inv(U, F)
            seen = set()
            for _ in range(words):
                W = eval_word_mats(standard_form_word(rng, int(rng.integers(0, 12)), s), [A, B], F)
                if not _proj_eq(mat2_mul(mat2_mul(U, W, F), Ui, F), mat2_inv(W, F), F):
                    raise AssertionError("image escaped the anti-fixed set")
                seen.add(normalize_proj(W, F))
            worst = max(worst, len(seen))
        checked += 1
    return {"max_image": worst, "bound": genus2_image_bound(q), "group_order": G.n}


TAU_RULES = {
    # genus-2 group <a, b, c, d | [a,b] = [c,d]>, letters 1..4; x = a^-1 b^-1 d c
    1: [-1],
    2: [-2],
    3: [-1, -2, 4, 3, -3, -3, -4, 2, 1],
    4: [-1, -2, 4, 3, -4, -3, -4, 2, 1],
}


def tau_word(word: Sequence[int]) -> list[int]:
    """Image of a word under the hyperelliptic involution (letters 1..4 = a, b, c, d)."""
    out: list[int] = []
    for x in word:
        img = TAU_RULES[abs(x)]
        out.extend(img if x > 0 else [-y for y in reversed(img)])
    return out


def surface_to_abcd(t: Sequence[int]) -> tuple[int, int, int, int]:
    """(a1, b1, a2, b2) with prod [a_i, b_i] = 1 -> (a, b, c, d) = (a1, b1, b2, a2),
    so that [a, b] = [c, d]."""
    a1, b1, a2, b2 = (int(x) for x in t)
    return a1, b1, b2, a2


def _sl_lift(M: Mat2, F: FqContext) -> Mat2:
    d = mat2_det(M, F)
    for lam in F.elements():
        if lam and F.mul(F.mul(lam, lam), d) == 1:
            return Mat2(*(F.mul(lam, x) for x in M))
    raise ValueError("element is not in PSL(2,q)")


def _comm(X: Mat2, Y: Mat2, F: FqContext) -> Mat2:
    return mat2_mul(mat2_mul(X, Y, F), mat2_mul(mat2_inv(X, F), mat2_inv(Y, F), F), F)


@dataclass(frozen=True)
class HyperellipticSolution:
    T: Mat2 | None
    branch: str      # "irreducible" or "reducible"
    liftable: bool


def solve_hyperelliptic_T(mats: Sequence[Mat2], q: int) -> HyperellipticSolution:
    """T in PGL(2,q) with T f(w) T^-1 = f(tau w) for a homomorphism given by
    matrices (A, B, C, D) of a, b, c, d, from the six trace equations
    tr(T) = tr(TA) = tr(TB) = tr(X^-1 T) = tr(X^-1 T C) = tr(X^-1 T D) = 0
    where X = A^-1 B^-1 D C and A..D are SL(2,q) lifts."""
    F = field_of_order(q)
    A, B, C, D = (_sl_lift(M, F) for M in mats)
    liftable = _comm(A, B, F) == _comm(C, D, F)
    if not liftable:
        raise PreconditionError("the homomorphism does not lift to SL(2,q)")
    reducible = common_fixed_point([A, B, C, D], F)
    X = mat2_mul(mat2_mul(mat2_inv(A, F), mat2_inv(B, F), F), mat2_mul(D, C, F), F)
    Xi = mat2_inv(X, F)
    # tr(Xi T Y) = tr(T Y Xi)
    rows = [_trace_row(M, F) for M in (mat2_identity(), A, B, Xi, mat2_mul(C, Xi, F), mat2_mul(D, Xi, F))]
    T = _nonsingular_in_span(nullspace_fq(rows, 4, F), F)
    branch = "reducible" if reducible else "irreducible"
    if T is None:
        if reducible:
            return HyperellipticSolution(None, branch, True)
        raise AssertionError("no symmetry found for an irreducible liftable homomorphism")
    T = normalize_proj(T, F)
    if not verify_hyperelliptic(T, mats, q):
        raise AssertionError("symmetry failed verification")
    return HyperellipticSolution(T, branch, True)


def verify_hyperelliptic(T: Mat2, mats: Sequence[Mat2], q: int, words: Sequence[Sequence[int]] = ()) -> bool:
    F = field_of_order(q)
    tests = [[1], [2], [3], [4], *words]
    for w in tests:
        lhs = _conj(T, eval_word_mats(w, mats, F), F)
        rhs = eval_word_mats(tau_word(w), mats, F)
        if not _proj_eq(lhs, rhs, F):
            return False
    return True


def brute_hyperelliptic_T(mats: Sequence[Mat2], q: int) -> list[Mat2]:
    return [T for T in pgl_elements(q) if verify_hyperelliptic(T, mats, q)]


# -- torus images ------------------------------------------------------------------------

@dataclass(frozen=True)
class TorusImage:
    kind: str             # e.g. "Z/5", "Z/2+Z/2", "1"
    weight: int           # number of commuting pairs with this image type
    bounding: bool | None  # False when the torus class maps nontrivially to H_2(Q)


def _abelian_type(G, x: int, y: int) -> str:
    H = G.closure([x, y])
    n = len(H)
    if n == 1:
        return "1"
    orders = G.element_orders
    if orders[H].max() == n:
        return f"Z/{n}"
    m = int(orders[H].max())
    return f"Z/{n // m}+Z/{m}"


def torus_image_distribution(Q, samples: int | None = None, seed: int = 0) -> dict[str, TorusImage]:
    """Image types of Z^2 -> Q over uniformly chosen commuting pairs: exact
    weights when ``samples`` is None, otherwise a uniform sample."""
    cat = build(Q)
    G = cat.group
    t = G.table
    xs, ys = np.nonzero(t == t.T)
    if samples is not None:
        idx = np.random.default_rng(seed).integers(0, len(xs), samples)
        xs, ys = xs[idx], ys[idx]
    try:
        cover = schur_cover(cat.spec)
    except Exception:
        cover = None
    weights: dict[str, int] = {}
    bounding: dict[str, set] = {}
    cache: dict[tuple, str] = {}
    for x, y in zip(xs.tolist(), ys.tolist()):
        key = (x, y)
        if key not in cache:
            cache[key] = _abelian_type(G, x, y)
        kind = cache[key]
        weights[kind] = weights.get(kind, 0) + 1
        if cover is not None:
            cls = int(homology_class(np.array([x, y]), cover))
            bounding.setdefault(kind, set()).add(cls == 0)
    out = {}
    for kind, w in sorted(weights.items(), key=lambda kv: -kv[1]):
        b = bounding.get(kind)
        out[kind] = TorusImage(kind, w, None if b is None else all(b))
    return out


__all__ = [
    "beta", "primitive_kernel_density", "primitive_kernel_scan", "KernelDensity", "nullspace_fq",
    "solve_reversing_involution", "brute_reversing_involutions", "InvolutionWitness", "PreconditionError",
    "anti_fixed_formula", "anti_fixed_brute", "count_anti_fixed", "pgl_involutions", "pgl_elements",
    "genus2_image_bound", "handlebody_image_check", "standard_form_word", "tau_word", "TAU_RULES",
    "surface_to_abcd", "solve_hyperelliptic_T", "verify_hyperelliptic", "brute_hyperelliptic_T",
    "HyperellipticSolution", "torus_image_distribution", "TorusImage", "fixed_points", "common_fixed_point",
]
