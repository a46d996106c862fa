"""Smith normal form over the integers (exact Python ints)."""
from __future__ import annotations

from dataclasses import dataclass


def _as_rows(M) -> list[list[int]]:
    return [[int(x) for x in row] for row in M]


def smith_diagonal(M) -> list[int]:
    """Invariant factors d_1 | d_2 | ... (zeros last) of an integer matrix.

    The list has min(rows, cols) entries.
    """
    A = _as_rows(M)
    m = len(A)
    n = len(A[0]) if m else 0
    diag: list[int] = []
    r = 0
    while r < min(m, n):
        # pivot: smallest nonzero |entry| in the trailing block
        piv = None
        for i in range(r, m):
            for j in range(r, n):
                if A[i][j] and (piv is None or abs(A[i][j]) < abs(A[piv[0]][piv[1]])):
                    piv = (i, j)
        if piv is None:
            diag.extend([0] * (min(m, n) - r))
            break
        i, j = piv
        A[r], A[i] = A[i], A[r]
        for row in A:
            row[r], row[j] = row[j], row[r]
        while True:
            p = A[r][r]
            done = True
            for i in range(r + 1, m):
                if A[i][r]:
                    q = A[i][r] // p
                    A[i] = [x - q * y for x, y in zip(A[i], A[r])]
                    if A[i][r]:
                        done = False
            for j in range(r + 1, n):
                if A[r][j]:
                    q = A[r][j] // p
                    for row in A:
                        row[j] -= q * row[r]
                    if A[r][j]:
                        done = False
            if done:
                # divisibility: fold in any entry not divisible by the pivot
                bad = next(((i, j) for i in range(r + 1, m) for j in range(r + 1, n) if A[i][j] % p), None)
                if bad is None:
                    break
                A[r] = [x + y for x, y in zip(A[r], A[bad[0]])]
                continue
            # move the smallest remaining entry of row/column r to the pivot
            best = (r, r)
            for i in range(r, m):
                if A[i][r] and abs(A[i][r]) < abs(A[best[0]][best[1]]):
                    best = (i, r)
            for j in range(r, n):
                if A[r][j] and abs(A[r][j]) < abs(A[best[0]][best[1]]):
                    best = (r, j)
            bi, bj = best
            A[r], A[bi] = A[bi], A[r]
            for row in A:
                row[r], row[bj] = row[bj], row[r]
        diag.append(abs(A[r][r]))
        r += 1
    return diag


@dataclass(frozen=True)
class AbelianGroup:
    """Z^rank + sum of Z/t for t in torsion (each t > 1)."""
    rank: int
    torsion: tuple[int, ...]

    @property
    def order(self) -> int:
        """0 for an infinite group."""
        if self.rank:
            return 0
        out = 1
        for t in self.torsion:
            out *= t
        return out

    def __str__(self) -> str:
        parts = ["Z"] * self.rank + [f"Z/{t}" for t in self.torsion]
        return " + ".join(parts) if parts else "0"


def cokernel(M, ngens: int | None = None) -> AbelianGroup:
    """Z^ngens modulo the column span of M (ngens = number of rows)."""
    A = _as_rows(M)
    rows = len(A) if ngens is None else ngens
    if not A or not A[0]:
        return AbelianGroup(rows, ())
    d = smith_diagonal(A)
    rank = rows - sum(1 for x in d if x)
    return AbelianGroup(rank, tuple(x for x in d if x > 1))
