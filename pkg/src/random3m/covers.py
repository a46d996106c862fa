"""Probabilities that a random Heegaard splitting has a Q-cover.

For a gluing map phi, the Q-quotients of the resulting manifold (mod Aut Q)
are the classes f in E with f . phi in E.  Exact routes work from the
mapping-class orbit table; Monte Carlo routes evolve every E-class along one
shared walk.
"""
from __future__ import annotations

import math
import time
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Sequence

import numpy as np
from scipy import stats

from .catalog import build, builtin_meta, parse_spec
from .epi import OrbitTable, context, enumerate_A, enumerate_E, generator_permutations, tuple_keys
from .kernels import GenProgram, apply_steps
from .surface import GENERATOR_SETS, WalkSpec, draw_steps

Z95 = 1.959963984540054
MIN_SPACING = 50


# -- reports -----------------------------------------------------------------

@dataclass
class ExperimentReport:
    """Result of one stochastic run.  ``estimate`` is successes / n and the
    interval is the normal approximation at 95%."""
    config: dict
    n: int
    successes: int
    histogram: dict[int, int] = field(default_factory=dict)
    wall_clock: float = 0.0
    extra: dict = field(default_factory=dict)

    @property
    def estimate(self) -> float:
        return self.successes / self.n if self.n else float("nan")

    @property
    def stderr(self) -> float:
        if not self.n:
            return float("nan")
        p = self.estimate
        return math.sqrt(p * (1 - p) / self.n)

    @property
    def ci(self) -> tuple[float, float]:
        p, s = self.estimate, self.stderr
        return (max(0.0, p - Z95 * s), min(1.0, p + Z95 * s))

    def merge(self, other: "ExperimentReport") -> "ExperimentReport":
        """Pool two runs of the same experiment (commutative and associative
        up to the order of recorded seeds, which is kept sorted)."""
        hist = dict(self.histogram)
        for k, v in other.histogram.items():
            hist[k] = hist.get(k, 0) + v
        seeds = sorted(set(_as_list(self.config.get("seed"))) | set(_as_list(other.config.get("seed"))))
        config = {**self.config, "seed": seeds}
        return ExperimentReport(config, self.n + other.n, self.successes + other.successes,
                                dict(sorted(hist.items())), self.wall_clock + other.wall_clock,
                                {**self.extra, **other.extra})

    def to_dict(self) -> dict:
        lo, hi = self.ci
        return {"config": self.config, "estimate": self.estimate, "ci95": [lo, hi], "n": self.n,
                "successes": self.successes, "histogram": {str(k): v for k, v in self.histogram.items()},
                "wall_clock": self.wall_clock, "extra": self.extra}


def _as_list(x) -> list:
    if x is None:
        return []
    return list(x) if isinstance(x, (list, tuple)) else [x]


@dataclass
class QuotientDistribution:
    histogram: dict[int, int]

    @property
    def n(self) -> int:
        return sum(self.histogram.values())

    @property
    def mean(self) -> float:
        return sum(k * v for k, v in self.histogram.items()) / self.n

    @property
    def poisson_mean(self) -> float:
        # maximum-likelihood fit
        return self.mean

    def chisquare(self, mu: float | None = None, kmax: int = 2) -> float:
        """p-value of the Poisson(mu) fit with bins 0..kmax-1 and >= kmax."""
        mu = self.poisson_mean if mu is None else mu
        obs = [self.histogram.get(k, 0) for k in range(kmax)]
        obs.append(self.n - sum(obs))
        probs = [stats.poisson.pmf(k, mu) for k in range(kmax)]
        probs.append(1 - sum(probs))
        exp = np.array(probs) * self.n
        return float(stats.chisquare(obs, exp).pvalue)


# -- exact values from the orbit table ----------------------------------------

def exact_p_from_orbits(ot: OrbitTable, exact: bool = False) -> float | Fraction:
    """1 - prod_i C(|A_i| - |E_i|, |E_i|) / C(|A_i|, |E_i|): the chance that a
    uniformly random |E_i|-subset of each orbit misses E_i."""
    miss = Fraction(1)
    for a, e in zip(ot.sizes.tolist(), ot.e_counts.tolist()):
        if e:
            miss *= Fraction(math.comb(a - e, e), math.comb(a, e))
    p = 1 - miss
    return p if exact else float(p)


def exact_expected(ot: OrbitTable) -> Fraction:
    return sum((Fraction(e * e, a) for a, e in zip(ot.sizes.tolist(), ot.e_counts.tolist())), Fraction(0))


def permutation_group_elements(perms: Sequence[np.ndarray], cap: int = 2 * 10 ** 6) -> np.ndarray:
    """All elements of the permutation group generated by ``perms``, one per
    row, by breadth-first closure."""
    perms = [np.asarray(p, dtype=np.int32) for p in perms]
    m = len(perms[0])
    ident = np.arange(m, dtype=np.int32)
    seen = {ident.tobytes()}
    out = [ident]
    frontier = [ident]
    while frontier:
        nxt = []
        for x in frontier:
            for s in perms:
                y = s[x]
                key = y.tobytes()
                if key not in seen:
                    seen.add(key)
                    out.append(y)
                    nxt.append(y)
        if len(out) > cap:
            raise ValueError(f"image group exceeds {cap} elements")
        frontier = nxt
    return np.stack(out)


def exact_p_small_group(Q, g: int = 2, generator_set: str = "humphries",
                        cap: int = 2 * 10 ** 6) -> Fraction:
    """Average over the image of the mapping class group in Sym(A) of the
    indicator that phi E meets E."""
    ctx = context(Q)
    A = enumerate_A(ctx, g)
    A = A[np.argsort(tuple_keys(A, ctx.G.n))]
    perms = generator_permutations(ctx, A, GENERATOR_SETS[generator_set](g))
    elements = permutation_group_elements(perms, cap)
    E = ctx.canon.canonical(enumerate_E(ctx, g))
    e_idx = np.searchsorted(tuple_keys(A, ctx.G.n), tuple_keys(E, ctx.G.n))
    in_E = np.zeros(len(A), dtype=bool)
    in_E[e_idx] = True
    hit = in_E[elements[:, e_idx]].any(axis=1)
    return Fraction(int(hit.sum()), len(elements))


# -- Monte Carlo ---------------------------------------------------------------

def _evolve(Q, walk: WalkSpec, epochs: int, burn_in: int,
            observe: Callable[[np.ndarray, int], int]) -> tuple[np.ndarray, dict]:
    """Push all E-classes along one walk; call ``observe`` at each epoch.

    Epochs are at least MIN_SPACING steps apart; when the requested number
    does not fit into the walk length it is lowered (recorded in the info).
    """
    if epochs <= 0:
        raise ValueError("need at least one sampling epoch")
    requested = epochs
    epochs = min(epochs, (walk.length - burn_in) // MIN_SPACING)
    if epochs < 1:
        raise ValueError("walk too short for the burn-in and the minimum epoch spacing")
    spacing = (walk.length - burn_in) // epochs
    ctx = context(Q)
    G = ctx.G
    T = enumerate_E(ctx, walk.genus).astype(np.int64)
    gens = walk.generators
    prog = GenProgram.compile(gens)
    rng = walk.rng()
    hold = walk.hold_probability
    table, inv = G.table.astype(np.int64), G.inv.astype(np.int64)
    apply_steps(T, table, inv, G.identity, draw_steps(burn_in, len(gens), hold, rng), prog)
    obs = np.empty(epochs, dtype=np.int64)
    for e in range(epochs):
        apply_steps(T, table, inv, G.identity, draw_steps(spacing, len(gens), hold, rng), prog)
        obs[e] = observe(T, G.identity)
    info = {"spacing": spacing, "e_size": len(T), "steps": burn_in + spacing * epochs,
            "epochs": epochs, "epochs_requested": requested}
    return obs, info


def _config(Q, walk: WalkSpec, epochs: int, burn_in: int) -> dict:
    return {"group": str(parse_spec(Q) if isinstance(Q, str) else context(Q).cat.spec), "genus": walk.genus,
            "length": walk.length, "epochs": epochs, "burn_in": burn_in, "seed": walk.seed,
            "generator_set": walk.generator_set, "hold": walk.hold_probability}


def quotient_counts(T: np.ndarray, identity: int) -> int:
    """Number of rows f . phi that lie in E (all b-coordinates trivial)."""
    return int(np.count_nonzero(np.all(T[:, 1::2] == identity, axis=1)))


def monte_carlo_p(Q, walk: WalkSpec, epochs: int = 20000, burn_in: int = 1000) -> ExperimentReport:
    """Fraction of sampled gluing maps along one walk whose manifold has a
    Q-cover.  The histogram is over the number of quotients per epoch."""
    t0 = time.perf_counter()
    counts, info = _evolve(Q, walk, epochs, burn_in, quotient_counts)
    hist = dict(sorted(_value_counts(counts).items()))
    rep = ExperimentReport(_config(Q, walk, epochs, burn_in), len(counts), int(np.count_nonzero(counts)), hist,
                           time.perf_counter() - t0, {**info, "mean_quotients": float(counts.mean())})
    return rep


def _value_counts(a: np.ndarray) -> dict[int, int]:
    vals, cnt = np.unique(a, return_counts=True)
    return {int(v): int(c) for v, c in zip(vals, cnt)}


def quotient_distribution(report: ExperimentReport) -> QuotientDistribution:
    return QuotientDistribution(dict(report.histogram))


def tunnel_one_experiment(Q, walk: WalkSpec, epochs: int = 20000, burn_in: int = 1000) -> ExperimentReport:
    """Attach one 2-handle to the genus-2 handlebody along phi(b_1).  A class
    f in E kills the attaching word iff (f . phi)(b_1) = 1."""
    if walk.genus != 2:
        raise ValueError("the single-relator experiment is defined at genus 2")
    t0 = time.perf_counter()
    if walk.length == 0:
        return ExperimentReport(_config(Q, walk, 1, 0), 1, 1, {1: 1}, 0.0, {"spacing": 0})
    hits, info = _evolve(Q, walk, epochs, burn_in,
                         lambda T, e: int(np.count_nonzero(T[:, 1] == e)))
    return ExperimentReport(_config(Q, walk, epochs, burn_in), len(hits), int(np.count_nonzero(hits)),
                            dict(sorted(_value_counts(hits).items())), time.perf_counter() - t0, info)


# -- limits --------------------------------------------------------------------

def _meta(Q):
    spec = parse_spec(Q) if not hasattr(Q, "spec") else Q.spec
    out, h2, simple = builtin_meta(spec)
    return spec, out, h2, simple


def poisson_mean(Q) -> Fraction:
    spec, out, h2, simple = _meta(Q)
    if out is None or h2 is None:
        raise ValueError(f"no metadata for {spec}")
    if not simple or spec.family == "Z":
        raise ValueError(f"{spec} is not a non-abelian simple group")
    return Fraction(h2, out)


def limit_probability(Q) -> tuple[Fraction, float]:
    """(mu, 1 - exp(-mu)) with mu = |H_2(Q)| / |Out(Q)|."""
    mu = poisson_mean(Q)
    return mu, 1 - math.exp(-float(mu))


def sequence_probability(specs: Sequence, k: int = 1) -> float:
    """P(Poisson(sum of mu_i) >= k)."""
    if k <= 0:
        return 1.0
    total = float(sum((poisson_mean(s) for s in specs), Fraction(0)))
    return float(stats.poisson.sf(k - 1, total))


def expectation_limit(Q) -> Fraction:
    """|Q'| |H_2(Q)| / |Aut(Q)|."""
    cat = build(Q) if isinstance(Q, str) else Q
    G = cat.group
    h2 = cat.meta.h2
    aut = cat.meta.order_aut or cat.aut.size
    if h2 is None:
        raise ValueError(f"|H_2| unknown for {cat.spec}")
    return Fraction(len(G.derived_subgroup) * h2, aut)


def alternating_model_p(Q, g: int = 2) -> tuple[float, Fraction, OrbitTable]:
    """Exact p and expectation from a full orbit decomposition."""
    from .epi import orbit_decomposition
    ctx = context(Q)
    ot = orbit_decomposition(ctx, enumerate_A(ctx, g), E=enumerate_E(ctx, g))
    return exact_p_from_orbits(ot), exact_expected(ot), ot


__all__ = [
    "ExperimentReport", "QuotientDistribution", "exact_p_from_orbits", "exact_expected", "exact_p_small_group",
    "permutation_group_elements", "monte_carlo_p", "quotient_distribution", "tunnel_one_experiment",
    "poisson_mean", "limit_probability", "sequence_probability", "expectation_limit", "alternating_model_p",
    "quotient_counts"
]
