"""Command-line front end: ``python -m random3m <command> ...``.

Every command prints a JSON report (or CSV for tables) and can write it with
``--out``.  The default seed comes from $RANDOM3M_SEED.  ``--config FILE``
reads a JSON RunConfig; flags given on the command line take precedence.
"""
from __future__ import annotations

import argparse
import logging
import sys
import time
from fractions import Fraction
from typing import Sequence

import numpy as np

from .report import (DERIVED, EXACT, MONTE_CARLO, RunConfig, default_seed, dump_report, make_report,
                     reproduce_table, tagged, write_csv)


class UsageError(Exception):
    pass


def _group(text: str) -> str:
    from .catalog import parse_spec

    try:
        parse_spec(text)
    except Exception as exc:
        raise argparse.ArgumentTypeError(f"invalid group spec {text!r}: {exc}") from exc
    return text


def _int_list(text: str) -> list[int]:
    try:
        return [int(float(x)) for x in text.split(",") if x]
    except ValueError as exc:
        raise argparse.ArgumentTypeError(f"expected comma-separated integers, got {text!r}") from exc


def _int(text: str) -> int:
    # accepts 1e6 style
    try:
        return int(float(text)) if "e" in text.lower() else int(text)
    except ValueError as exc:
        raise argparse.ArgumentTypeError(f"expected an integer, got {text!r}") from exc


# -- command implementations --------------------------------------------------------------

def cmd_estimate(a) -> dict:
    from .covers import monte_carlo_p, quotient_distribution, tunnel_one_experiment
    from .surface import WalkSpec

    walk = WalkSpec(a.genus, a.length, a.seed, a.generators)
    if a.tunnel_one:
        rep = tunnel_one_experiment(a.group, walk, a.epochs, a.burn_in)
        return {"tunnel_one": tagged(rep, MONTE_CARLO)}
    rep = monte_carlo_p(a.group, walk, a.epochs, a.burn_in)
    dist = quotient_distribution(rep)
    return {"p": tagged(rep, MONTE_CARLO), "mean_quotients": tagged(dist.mean, MONTE_CARLO)}


def cmd_exact(a) -> dict:
    from .catalog import build
    from .covers import alternating_model_p, exact_p_small_group, expectation_limit, limit_probability

    out: dict = {}
    method = a.method
    if method == "auto":
        method = "small" if build(a.group).group.n <= 8 else "orbits"
    if method == "small":
        out["p"] = tagged(exact_p_small_group(a.group, a.genus, a.generators), EXACT)
    else:
        p, expect, ot = alternating_model_p(a.group, a.genus)
        out["p_alternating_model"] = tagged(p, DERIVED)
        out["expected_quotients"] = tagged(expect, EXACT)
        out["orbit_sizes"] = tagged([int(s) for s in ot.sizes], EXACT)
        out["e_split"] = tagged([int(e) for e in ot.e_counts], EXACT)
    try:
        mu, lim = limit_probability(a.group)
        out["poisson_mean"] = tagged(mu, EXACT)
        out["p_limit"] = tagged(lim, DERIVED)
        out["expectation_limit"] = tagged(expectation_limit(a.group), EXACT)
    except ValueError as exc:
        out["limit"] = f"unavailable: {exc}"
    return out


def cmd_orbits(a) -> dict:
    from .epi import context, enumerate_A, enumerate_E, orbit_decomposition

    ctx = context(a.group)
    ot = orbit_decomposition(ctx, enumerate_A(ctx, a.genus), E=enumerate_E(ctx, a.genus))
    if a.csv:
        ot.to_csv(a.csv)
    return {"orbits": tagged(ot.rows(), EXACT), "A": tagged(int(ot.sizes.sum()), EXACT),
            "E": tagged(int(ot.e_counts.sum()), EXACT)}


def cmd_classes(a) -> dict:
    from .catalog import schur_cover
    from .epi import homology_class, random_surface_epimorphisms, surface_epimorphism_class_counts

    cover = schur_cover(a.group)
    exact = surface_epimorphism_class_counts(a.group, a.genus, cover)
    total = int(exact.sum())
    out = {"counts": tagged([int(x) for x in exact], EXACT),
           "fractions": tagged([Fraction(int(x), total) for x in exact], EXACT)}
    if a.samples:
        T = random_surface_epimorphisms(a.group, a.genus, a.samples, a.seed)
        hist = np.bincount(homology_class(T, cover), minlength=len(cover.h2))
        out["sampled"] = tagged((hist / a.samples).tolist(), MONTE_CARLO)
    return out


def cmd_enumerate(a) -> dict:
    from .epi import count_generating_tuples, enumerate_A, enumerate_E

    out = {"E": tagged(len(enumerate_E(a.group, a.genus)), EXACT),
           "generating_tuples_mod_aut": tagged(count_generating_tuples(a.group, a.genus), EXACT)}
    if not a.skip_a:
        out["A"] = tagged(len(enumerate_A(a.group, a.genus)), EXACT)
    return out


def cmd_homology(a) -> dict:
    from . import symplectic as sp

    if a.action == "counts":
        dims = sp.homology_dim_distribution(a.g, a.p)
        return {"sp_order": tagged(sp.sp_order(a.g, a.p), EXACT),
                "lagrangians": tagged(sp.count_lagrangians(a.g, a.p), EXACT),
                "transverse": tagged(sp.count_transverse(a.g, a.p), EXACT),
                "by_intersection": tagged([sp.count_by_intersection(a.g, a.p, d) for d in range(a.g + 1)], EXACT),
                "dim_distribution": tagged(dims, EXACT)}
    if a.action == "walk":
        hist = sp.mc_intersection_distribution(a.g, a.p, a.length, a.samples, np.random.default_rng(a.seed))
        return {"histogram": tagged(hist, MONTE_CARLO),
                "exact": tagged(sp.homology_dim_distribution(a.g, a.p), EXACT)}
    from .betti import homology_trend

    pts = homology_trend(a.g, a.lengths, a.walks, a.samples, a.seed)
    return {"trend": tagged([{"length": p.length, "median_order": p.median_order,
                              "median_digits": len(str(p.median_order)) if p.median_order != float("inf") else None,
                              "infinite": p.orders.count(0), "rational_beta1_positive": p.rational_positive,
                              "rational_samples": p.rational_samples} for p in pts], MONTE_CARLO)}


def cmd_balanced(a) -> dict:
    from . import balanced as bp
    from .report import reproduce_sylow_2gen

    if a.action == "table":
        rows = bp.reference_rows()
        return {"rows": tagged(rows, DERIVED)}
    if a.action == "sylow":
        dist = bp.sylow_order_distribution(a.g, a.p, a.kmax)
        out = {"order_distribution": tagged(dist, EXACT)}
        if a.g == 2:
            out["by_type"] = tagged(reproduce_sylow_2gen().rows, EXACT)
        return out
    if a.action == "afp":
        return {"probability": tagged(bp.afp_probability(a.g, a.p, a.type), EXACT)}
    if a.action == "all-cyclic":
        return {"probability": tagged(bp.all_cyclic_probability(None if a.g == 0 else a.g), DERIVED)}
    if a.action == "simulate-afp":
        hist = bp.simulate_afp(a.g, a.p, a.samples, a.seed)
        return {"histogram": tagged({str(k): v for k, v in sorted(hist.items())}, MONTE_CARLO)}
    rep = bp.balanced_quotient_mc(a.group, a.g, a.r, a.n, a.samples, a.seed)
    lim = bp.balanced_quotient_exact_binomial(a.group, a.g)
    return {"p": tagged(rep, MONTE_CARLO), "binomial": tagged(lim, DERIVED)}


def cmd_relator(a) -> dict:
    from . import relator as rel
    from .catalog import build

    if a.action == "beta":
        return {"beta": tagged(rel.beta(a.a), EXACT)}
    if a.action == "density":
        kd = rel.primitive_kernel_density(a.a, a.b, a.radius)
        return {"density": tagged(kd.density, MONTE_CARLO), "primitive": kd.primitive, "in_kernel": kd.in_kernel,
                "predicted": tagged(Fraction(1, rel.beta(a.a)) if a.b == 0 else None, EXACT)}
    if a.action == "involution":
        cat = build(f"PSL(2,{a.q})")
        rng = np.random.default_rng(a.seed)
        solved = failed = 0
        while solved + failed < a.samples:
            x, y = (int(v) for v in rng.integers(0, cat.group.n, 2))
            if not cat.group.generates([x, y]):
                continue
            try:
                ok = rel.solve_reversing_involution(cat.elements[x], cat.elements[y], a.q).verify()
            except rel.PreconditionError:
                ok = False
            solved += bool(ok)
            failed += not ok
        return {"solved": tagged(solved, MONTE_CARLO), "failed": failed}
    if a.action == "anti-fixed":
        rows = [{"U": list(U), "formula": rel.count_anti_fixed(U, a.q, "formula"),
                 "brute": rel.count_anti_fixed(U, a.q, "brute")} for U in rel.pgl_involutions(a.q)]
        return {"rows": tagged(rows, EXACT), "all_match": all(r["formula"] == r["brute"] for r in rows)}
    if a.action == "image-check":
        return {"check": tagged(rel.handlebody_image_check(a.q, a.samples, a.words, a.seed), MONTE_CARLO)}
    dist = rel.torus_image_distribution(a.group, a.samples, a.seed)
    total = sum(t.weight for t in dist.values())
    return {"images": tagged({k: {"weight": t.weight, "fraction": Fraction(t.weight, total),
                                  "bounding": t.bounding} for k, t in dist.items()},
                             EXACT if a.samples is None else MONTE_CARLO)}


def cmd_complexes(a) -> dict:
    from . import complexes as cx

    if a.action == "surface":
        st = cx.surface_stats(a.n, a.samples, a.seed)
        if a.csv:
            write_csv(({"sample": i, "vertices": int(v), "connected": bool(c), "genus": int(g)}
                       for i, (v, c, g) in enumerate(zip(st.vertices, st.connected, st.main_genus))), a.csv)
        return {"mean_vertices": tagged(st.mean_vertices, MONTE_CARLO),
                "upper_99": tagged(st.vertex_upper_confidence(), MONTE_CARLO),
                "bound": tagged(cx.vertex_bound(a.n), DERIVED),
                "connected_fraction": tagged(float(np.mean(st.connected)), MONTE_CARLO)}
    if a.action == "graph":
        counts = cx.short_cycle_stats(a.d, a.n, a.imax, a.samples, a.seed)
        return {"mean_cycles": tagged(counts.mean(axis=0), MONTE_CARLO),
                "poisson_means": tagged(cx.poisson_cycle_means(a.d, a.imax), EXACT)}
    if a.method == "sis":
        est = cx.manifold_probability_sis(a.n, a.samples, a.seed, bias=a.bias)
    else:
        est = cx.manifold_estimate_naive(a.n, a.samples, a.seed)
    return {"manifold_probability": tagged(est, MONTE_CARLO)}


def cmd_betti(a) -> dict:
    from .betti import betti_trend_experiment, is_non_increasing

    pts = betti_trend_experiment(a.group, a.genus, a.lengths, a.samples, a.seed, check_words=a.check_words)
    return {"trend": tagged([{"length": p.length, "samples": p.samples, "positive": p.positive,
                              "frequency": p.frequency, "ci95": list(p.report.ci), "walks": p.walks,
                              "histogram": p.report.histogram, "word_route_checked": p.word_route_checked,
                              "word_route_dropped": p.word_route_dropped} for p in pts], MONTE_CARLO),
            "non_increasing": is_non_increasing(pts)}


def cmd_reproduce(a) -> dict:
    kw = {}
    if a.table in ("expected_table", "genus2_simple"):
        kw["max_order"] = a.max_order
    if a.table == "genus2_simple":
        kw.update(length=a.length, epochs=a.epochs, seed=a.seed, monte_carlo=not a.no_monte_carlo)
    res = reproduce_table(a.table, **kw)
    text = res.to_csv()
    if a.csv:
        with open(a.csv, "w") as fh:
            fh.write(text)
    return {"table": res.name, "csv": text, "passed": res.passed}


# -- parser -------------------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="random3m", description=__doc__.splitlines()[0])
    p.add_argument("--config", help="JSON RunConfig file")
    p.add_argument("--out", help="write the JSON report here")
    p.add_argument("-v", "--verbose", action="store_true")
    sub = p.add_subparsers(dest="command", required=True)

    def common(sp, group=False, genus=False, seed=True):
        if group:
            sp.add_argument("--group", type=_group, required=True)
        if genus:
            sp.add_argument("--genus", type=int, default=2)
        if seed:
            sp.add_argument("--seed", type=int, default=default_seed())
        sp.add_argument("--out", help=argparse.SUPPRESS, default=argparse.SUPPRESS)

    s = sub.add_parser("estimate", help="Monte Carlo p(Q, g) along one long walk")
    common(s, group=True, genus=True)
    s.add_argument("--length", type=_int, default=10 ** 6)
    s.add_argument("--epochs", type=_int, default=20000)
    s.add_argument("--burn-in", type=_int, default=1000)
    s.add_argument("--generators", default="humphries", choices=["humphries", "lickorish"])
    s.add_argument("--tunnel-one", action="store_true", help="single 2-handle along b_1 instead")
    s.set_defaults(func=cmd_estimate)

    s = sub.add_parser("exact", help="exact or alternating-model p(Q, g) and limits")
    common(s, group=True, genus=True, seed=False)
    s.add_argument("--method", choices=["auto", "small", "orbits"], default="auto")
    s.add_argument("--generators", default="humphries", choices=["humphries", "lickorish"])
    s.set_defaults(func=cmd_exact)

    s = sub.add_parser("orbits", help="mapping-class orbit table on A_g")
    common(s, group=True, genus=True, seed=False)
    s.add_argument("--csv")
    s.set_defaults(func=cmd_orbits)

    s = sub.add_parser("classes", help="Schur-class split of surface epimorphisms")
    common(s, group=True, genus=True)
    s.add_argument("--samples", type=_int, default=0, help="also draw this many uniform epimorphisms")
    s.set_defaults(func=cmd_classes)

    s = sub.add_parser("enumerate", help="sizes of A_g and E_g")
    common(s, group=True, genus=True, seed=False)
    s.add_argument("--skip-a", action="store_true")
    s.set_defaults(func=cmd_enumerate)

    s = sub.add_parser("homology", help="symplectic counts and homology of N_phi")
    hs = s.add_subparsers(dest="action", required=True)
    h = hs.add_parser("counts")
    common(h, seed=False)
    h.add_argument("--g", type=int, default=2)
    h.add_argument("--p", type=int, default=2)
    h = hs.add_parser("walk")
    common(h)
    h.add_argument("--g", type=int, default=2)
    h.add_argument("--p", type=int, default=2)
    h.add_argument("--length", type=_int, default=100000)
    h.add_argument("--samples", type=_int, default=10000)
    h = hs.add_parser("integral")
    common(h)
    h.add_argument("--g", type=int, default=2)
    h.add_argument("--lengths", type=_int_list, default=[100, 1000, 10000])
    h.add_argument("--walks", type=_int, default=100)
    h.add_argument("--samples", type=_int, default=1000)
    s.set_defaults(func=cmd_homology)

    s = sub.add_parser("balanced", help="random balanced presentations")
    bs = s.add_subparsers(dest="action", required=True)
    b = bs.add_parser("table")
    common(b, seed=False)
    b = bs.add_parser("sylow")
    common(b, seed=False)
    b.add_argument("--p", type=int, default=2)
    b.add_argument("--g", type=int, default=2)
    b.add_argument("--kmax", type=int, default=4)
    b = bs.add_parser("afp")
    common(b, seed=False)
    b.add_argument("--p", type=int, default=2)
    b.add_argument("--g", type=int, default=2)
    b.add_argument("--type", default="1")
    b = bs.add_parser("all-cyclic")
    common(b, seed=False)
    b.add_argument("--g", type=int, default=2, help="0 for the g -> infinity limit")
    b = bs.add_parser("simulate-afp")
    common(b)
    b.add_argument("--p", type=int, default=2)
    b.add_argument("--g", type=int, default=2)
    b.add_argument("--samples", type=_int, default=10000)
    b = bs.add_parser("estimate")
    common(b, group=True)
    b.add_argument("--g", type=int, default=2)
    b.add_argument("--r", type=int, default=2)
    b.add_argument("--n", type=_int, default=10000)
    b.add_argument("--samples", type=_int, default=10 ** 6)
    s.set_defaults(func=cmd_balanced)

    s = sub.add_parser("relator", help="relator geometry in PSL(2,q)")
    rs = s.add_subparsers(dest="action", required=True)
    r = rs.add_parser("beta")
    common(r, seed=False)
    r.add_argument("--a", type=int, required=True)
    r = rs.add_parser("density")
    common(r, seed=False)
    r.add_argument("--a", type=int, required=True)
    r.add_argument("--b", type=int, default=0)
    r.add_argument("--radius", type=float, default=1000.0)
    r = rs.add_parser("involution")
    common(r)
    r.add_argument("--q", type=int, required=True)
    r.add_argument("--samples", type=_int, default=1000)
    r = rs.add_parser("anti-fixed")
    common(r, seed=False)
    r.add_argument("--q", type=int, required=True)
    r = rs.add_parser("image-check")
    common(r)
    r.add_argument("--q", type=int, required=True)
    r.add_argument("--samples", type=_int, default=20)
    r.add_argument("--words", type=_int, default=200)
    r = rs.add_parser("torus-image")
    common(r, group=True)
    r.add_argument("--samples", type=_int, default=None, help="omit for the exact count")
    s.set_defaults(func=cmd_relator)

    s = sub.add_parser("complexes", help="random surfaces, graphs and tetrahedra gluings")
    cs = s.add_subparsers(dest="action", required=True)
    c = cs.add_parser("surface")
    common(c)
    c.add_argument("--n", type=_int, required=True)
    c.add_argument("--samples", type=_int, default=1000)
    c.add_argument("--csv")
    c = cs.add_parser("graph")
    common(c)
    c.add_argument("--d", type=int, default=4)
    c.add_argument("--n", type=_int, default=10000)
    c.add_argument("--imax", type=int, default=4)
    c.add_argument("--samples", type=_int, default=1000)
    c = cs.add_parser("tets")
    common(c)
    c.add_argument("--n", type=_int, required=True)
    c.add_argument("--samples", type=_int, default=10000)
    c.add_argument("--method", choices=["naive", "sis"], default="naive")
    c.add_argument("--bias", type=float, default=4.0)
    s.set_defaults(func=cmd_complexes)

    s = sub.add_parser("betti", help="first Betti numbers of abelian covers")
    ts = s.add_subparsers(dest="action", required=True)
    t = ts.add_parser("trend")
    common(t, group=True, genus=True)
    t.add_argument("--lengths", type=_int_list, default=[100, 1000, 10000])
    t.add_argument("--samples", type=_int, default=1000)
    t.add_argument("--check-words", type=int, default=20)
    s.set_defaults(func=cmd_betti)

    s = sub.add_parser("reproduce-table", help="recompute a reference table and diff it")
    s.add_argument("table", choices=["expected_table", "genus2_simple", "sylow_2gen"])
    s.add_argument("--max-order", type=_int, default=8000)
    s.add_argument("--length", type=_int, default=10 ** 6)
    s.add_argument("--epochs", type=_int, default=20000)
    s.add_argument("--seed", type=int, default=default_seed())
    s.add_argument("--no-monte-carlo", action="store_true")
    s.add_argument("--csv")
    s.set_defaults(func=cmd_reproduce)
    return p


def _config_argv(path: str) -> list[str]:
    """Turn a RunConfig file into an argument list."""
    cfg = RunConfig.load(path)
    argv = cfg.command.split()
    flags = {"group": cfg.group, "genus": cfg.genus, "length": cfg.length, "samples": cfg.samples,
             "seed": cfg.seed, **cfg.options}
    for k, v in flags.items():
        if v is None:
            continue
        flag = "--" + k.replace("_", "-")
        if v is True:
            argv.append(flag)
        elif v is False:
            continue
        elif isinstance(v, (list, tuple)):
            argv += [flag, ",".join(str(x) for x in v)]
        else:
            argv += [flag, str(v)]
    return argv


def _split_config(argv: list[str]) -> tuple[str | None, list[str]]:
    if "--config" in argv:
        i = argv.index("--config")
        if i + 1 >= len(argv):
            raise UsageError("--config needs a file")
        return argv[i + 1], argv[:i] + argv[i + 2:]
    return None, argv


def main(argv: Sequence[str] | None = None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    try:
        cfg_path, argv = _split_config(argv)
    except UsageError as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        return 2
    if cfg_path:
        base = _config_argv(cfg_path)
        # command-line flags after the config's own flags win
        extra = argv[1:] if argv and argv[0] == base[0] else argv
        argv = base + extra
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING)
    t0 = time.perf_counter()
    try:
        results = args.func(args)
    except (ValueError, KeyError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    command = args.command + (f" {args.action}" if getattr(args, "action", None) else "")
    opts = {k: v for k, v in vars(args).items()
            if k not in ("func", "command", "action", "config", "out", "verbose", "group", "genus", "length",
                         "samples", "seed")}
    config = RunConfig(command, getattr(args, "group", None), getattr(args, "genus", None),
                       getattr(args, "length", None), getattr(args, "samples", None),
                       getattr(args, "seed", 0) or 0, args.out, getattr(args, "generators", "humphries"), opts)
    report = make_report(config, results)
    report["wall_clock"] = time.perf_counter() - t0
    if args.command == "reproduce-table":
        sys.stdout.write(results["csv"])
        if args.out:
            dump_report(report, args.out)
        return 0 if results["passed"] else 3
    text = dump_report(report, args.out)
    sys.stdout.write(text)
    return 0


if __name__ == "__main__":
    sys.exit(main())
