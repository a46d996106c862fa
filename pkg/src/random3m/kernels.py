"""Compiled inner loops for walks that act on many tuples at once."""
from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numba
import numpy as np

from .surface import HOLD, MappingClassGen


@dataclass(frozen=True)
class GenProgram:
    """Flat encoding of substitutions: generator s updates coordinates
    target[u] for u in [upd_ptr[s], upd_ptr[s+1]); update u evaluates the
    letters l in [let_ptr[u], let_ptr[u+1]) (coordinate, inverse flag)."""
    upd_ptr: np.ndarray
    target: np.ndarray
    let_ptr: np.ndarray
    coord: np.ndarray
    inverse: np.ndarray

    @classmethod
    def compile(cls, gens: Sequence[MappingClassGen]) -> "GenProgram":
        upd_ptr, target, let_ptr, coord, inverse = [0], [], [0], [], []
        for t in gens:
            for i in t.changed:
                target.append(i)
                for x in t.images[i]:
                    coord.append(abs(x) - 1)
                    inverse.append(1 if x < 0 else 0)
                let_ptr.append(len(coord))
            upd_ptr.append(len(target))
        a = lambda v: np.asarray(v, dtype=np.int64)
        return cls(a(upd_ptr), a(target), a(let_ptr), a(coord), a(inverse))


@numba.njit(cache=True)
def _apply_steps(T, table, inv, identity, steps, upd_ptr, target, let_ptr, coord, inverse):
    m, k = T.shape
    buf = np.empty(k, dtype=T.dtype)
    for s in steps:
        if s < 0:
            continue
        u0, u1 = upd_ptr[s], upd_ptr[s + 1]
        for i in range(m):
            for u in range(u0, u1):
                v = identity
                for l in range(let_ptr[u], let_ptr[u + 1]):
                    x = T[i, coord[l]]
                    if inverse[l]:
                        x = inv[x]
                    v = table[v, x]
                buf[u - u0] = v
            for u in range(u0, u1):
                T[i, target[u]] = buf[u - u0]


def apply_steps(T: np.ndarray, table: np.ndarray, inv: np.ndarray, identity: int,
                steps: np.ndarray, prog: GenProgram) -> None:
    """In place: every row f of T becomes f . tau_{s_1} . ... . tau_{s_L}."""
    _apply_steps(T, table, inv, identity, np.asarray(steps, dtype=np.int64), prog.upd_ptr, prog.target,
                 prog.let_ptr, prog.coord, prog.inverse)


@numba.njit(cache=True)
def _apply_steps_perm(state, perms, steps):
    for s in steps:
        if s < 0:
            continue
        for i in range(state.shape[0]):
            state[i] = perms[s, state[i]]


def apply_steps_perm(state: np.ndarray, perms: np.ndarray, steps: np.ndarray) -> None:
    """In place walk of points under index permutations (HOLD skips)."""
    _apply_steps_perm(state, perms, np.asarray(steps, dtype=np.int64))


__all__ = ["GenProgram", "apply_steps", "apply_steps_perm", "HOLD"]
