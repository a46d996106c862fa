"""Arithmetic in F_q, q = p^e, and 2x2 (projective) matrices over it.

Elements are encoded as integers in [0, q): the coefficient vector
(c_0, ..., c_{e-1}) of the residue polynomial is read as base-p digits
with c_0 least significant.  This dense code lets group tables built
over F_q index directly.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from functools import cached_property
from itertools import product
from typing import NamedTuple

import numpy as np

MAX_ORDER = 2 ** 20


def is_prime(n: int) -> bool:
    if n < 2:
        return False
    if n % 2 == 0:
        return n == 2
    d = 3
    while d * d <= n:
        if n % d == 0:
            return False
        d += 2
    return True


def factorize(n: int) -> dict[int, int]:
    out: dict[int, int] = {}
    d = 2
    while d * d <= n:
        while n % d == 0:
            out[d] = out.get(d, 0) + 1
            n //= d
        d += 1
    if n > 1:
        out[n] = out.get(n, 0) + 1
    return out


def prime_power(q: int) -> tuple[int, int]:
    """Return (p, e) with q = p^e, or raise ValueError."""
    f = factorize(q)
    if len(f) != 1:
        raise ValueError(f"{q} is not a prime power")
    (p, e), = f.items()
    return p, e


# -- polynomials over F_p as coefficient lists, lowest degree first ----------

def _poly_trim(a: list[int]) -> list[int]:
    while a and a[-1] == 0:
        a.pop()
    return a


def _poly_mod(a: list[int], m: list[int], p: int) -> list[int]:
    a = _poly_trim(list(a))
    inv_lead = pow(m[-1], p - 2, p)
    dm = len(m) - 1
    while len(a) - 1 >= dm:
        c = a[-1] * inv_lead % p
        shift = len(a) - 1 - dm
        for i, mi in enumerate(m):
            a[shift + i] = (a[shift + i] - c * mi) % p
        _poly_trim(a)
    return a


def is_irreducible(poly: list[int], p: int) -> bool:
    """Trial division by every monic polynomial of degree <= deg/2."""
    deg = len(poly) - 1
    if deg < 1:
        return False
    if deg == 1:
        return True
    for d in range(1, deg // 2 + 1):
        for low in product(range(p), repeat=d):
            if not _poly_mod(poly, list(low) + [1], p):
                return False
    return True


def lowest_irreducible(p: int, e: int) -> list[int]:
    """Lowest monic irreducible of degree e, ordering the non-leading
    coefficients (c_{e-1}, ..., c_0) lexicographically."""
    if e == 1:
        return [0, 1]
    for m in range(p ** e):
        low = [(m // p ** i) % p for i in range(e)]
        poly = low + [1]
        if is_irreducible(poly, p):
            return poly
    raise AssertionError("no irreducible polynomial found")  # pragma: no cover


@dataclass(frozen=True)
class FqContext:
    p: int
    e: int
    modulus: tuple[int, ...]
    q: int = field(init=False)

    def __post_init__(self):
        object.__setattr__(self, "q", self.p ** self.e)

    # digit vectors of every element, shape (q, e)
    @cached_property
    def digits(self) -> np.ndarray:
        x = np.arange(self.q, dtype=np.int64)
        return np.stack([(x // self.p ** i) % self.p for i in range(self.e)], axis=1)

    @cached_property
    def _weights(self) -> np.ndarray:
        return self.p ** np.arange(self.e, dtype=np.int64)

    def encode(self, coeffs) -> int:
        return int(sum(int(c) % self.p * self.p ** i for i, c in enumerate(coeffs)))

    def decode(self, x: int) -> list[int]:
        return [(x // self.p ** i) % self.p for i in range(self.e)]

    def _polymul_code(self, a: int, b: int) -> int:
        p = self.p
        da, db = self.decode(a), self.decode(b)
        prod = [0] * (2 * self.e - 1)
        for i, x in enumerate(da):
            if x:
                for j, y in enumerate(db):
                    prod[i + j] = (prod[i + j] + x * y) % p
        r = _poly_mod(prod, list(self.modulus), p)
        return self.encode(r)

    @cached_property
    def _logs(self) -> tuple[np.ndarray, np.ndarray]:
        q = self.q
        if q == 2:
            return np.array([0, 1], dtype=np.int64), np.array([-1, 0], dtype=np.int64)
        order = q - 1
        prime_divs = list(factorize(order))
        for g in range(2, q):
            if all(self.pow_slow(g, order // r) != 1 for r in prime_divs):
                break
        exp = np.empty(2 * order, dtype=np.int64)
        x = 1
        for k in range(order):
            exp[k] = x
            x = self._polymul_code(x, g)
        exp[order:] = exp[:order]
        log = np.full(q, -1, dtype=np.int64)
        log[exp[:order]] = np.arange(order)
        return exp, log

    def pow_slow(self, x: int, n: int) -> int:
        r, b = 1, x
        while n:
            if n & 1:
                r = self._polymul_code(r, b)
            b = self._polymul_code(b, b)
            n >>= 1
        return r

    # -- scalar field operations --------------------------------------------

    def add(self, a: int, b: int) -> int:
        if self.e == 1:
            return (a + b) % self.p
        return int(((self.digits[a] + self.digits[b]) % self.p) @ self._weights)

    def neg(self, a: int) -> int:
        if self.e == 1:
            return (-a) % self.p
        return int(((-self.digits[a]) % self.p) @ self._weights)

    def sub(self, a: int, b: int) -> int:
        return self.add(a, self.neg(b))

    def mul(self, a: int, b: int) -> int:
        if a == 0 or b == 0:
            return 0
        if self.e == 1:
            return a * b % self.p
        exp, log = self._logs
        return int(exp[log[a] + log[b]])

    def inv(self, a: int) -> int:
        if a == 0:
            raise ZeroDivisionError("0 has no inverse in F_q")
        if self.e == 1:
            return pow(a, self.p - 2, self.p)
        exp, log = self._logs
        return int(exp[(self.q - 1 - log[a]) % (self.q - 1)])

    def power(self, a: int, n: int) -> int:
        if a == 0:
            return 0 if n > 0 else 1
        if self.e == 1:
            return pow(a, n % (self.p - 1), self.p)
        exp, log = self._logs
        return int(exp[(log[a] * n) % (self.q - 1)])

    def frobenius(self, a: int) -> int:
        return self.power(a, self.p)

    def from_int(self, n: int) -> int:
        """Image of the integer n under Z -> F_p -> F_q."""
        return n % self.p

    @cached_property
    def squares(self) -> frozenset[int]:
        return frozenset(self.mul(x, x) for x in range(self.q))

    def is_square(self, x: int) -> bool:
        return x in self.squares

    def elements(self) -> range:
        return range(self.q)

    # -- vectorized helpers used by the matrix-group builders ---------------

    @cached_property
    def add_table(self) -> np.ndarray:
        d = self.digits
        s = (d[:, None, :] + d[None, :, :]) % self.p
        return (s @ self._weights).astype(np.int64)

    @cached_property
    def mul_table(self) -> np.ndarray:
        exp, log = self._logs
        if self.e == 1:
            x = np.arange(self.q)
            return np.outer(x, x) % self.p
        t = exp[(log[:, None] + log[None, :]) % (self.q - 1)]
        t[0, :] = 0
        t[:, 0] = 0
        return t


def make_field(p: int, e: int = 1) -> FqContext:
    if not is_prime(p):
        raise ValueError(f"{p} is not prime")
    if e < 1:
        raise ValueError("extension degree must be >= 1")
    if p ** e > MAX_ORDER:
        raise ValueError(f"field order {p}^{e} exceeds {MAX_ORDER}")
    return FqContext(p, e, tuple(lowest_irreducible(p, e)))


def field_of_order(q: int) -> FqContext:
    p, e = prime_power(q)
    return make_field(p, e)


def is_square(x: int, ctx: FqContext) -> bool:
    return ctx.is_square(x)


# -- 2x2 matrices ------------------------------------------------------------

class Mat2(NamedTuple):
    a: int
    b: int
    c: int
    d: int


def mat2_mul(m: Mat2, n: Mat2, F: FqContext) -> Mat2:
    ad, mu = F.add, F.mul
    return Mat2(ad(mu(m.a, n.a), mu(m.b, n.c)), ad(mu(m.a, n.b), mu(m.b, n.d)),
                ad(mu(m.c, n.a), mu(m.d, n.c)), ad(mu(m.c, n.b), mu(m.d, n.d)))


def mat2_det(m: Mat2, F: FqContext) -> int:
    return F.sub(F.mul(m.a, m.d), F.mul(m.b, m.c))


def mat2_trace(m: Mat2, F: FqContext) -> int:
    return F.add(m.a, m.d)


def mat2_scale(m: Mat2, lam: int, F: FqContext) -> Mat2:
    return Mat2(*(F.mul(lam, x) for x in m))


def mat2_inv(m: Mat2, F: FqContext) -> Mat2:
    dinv = F.inv(mat2_det(m, F))
    return Mat2(F.mul(m.d, dinv), F.mul(F.neg(m.b), dinv), F.mul(F.neg(m.c), dinv), F.mul(m.a, dinv))


def mat2_identity() -> Mat2:
    return Mat2(1, 0, 0, 1)


def normalize_proj(m: Mat2, F: FqContext) -> Mat2:
    """Scale so the first nonzero entry in row-major order is 1."""
    for x in m:
        if x:
            return mat2_scale(m, F.inv(x), F)
    raise ValueError("zero matrix has no projective class")
