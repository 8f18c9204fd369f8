"""Command-line front end.

Subcommands: ``simulate`` (trajectories to histogram CSV + diagnostics
JSON), ``exact`` (stationary pmf CSV), ``density`` (limit-law curve CSV),
``verify`` (oracle grid, the primary CI gate), and ``fit`` (branch-wise
log-linear fit of a pmf against the asymmetric Laplace prediction).

Exit codes: 0 success, 2 usage, 3 runtime-invariant breach, 4 capacity,
5 verification failure.
"""

from __future__ import annotations

import argparse
import datetime
import json
import os
import sys
from concurrent.futures import ThreadPoolExecutor

import numpy as np

from . import __version__, asymptotics, exact, stats
from .dynamics import ModelParams, RNG_ALGORITHM, replica_seeds, simulate
from .errors import (
    CapacityError,
    CoinflowError,
    DegenerateParameterError,
    GraphError,
    InsufficientDataError,
    InvalidStateError,
    InvariantBreachError,
)
from .graph import NAMED_KINDS, GraphTopology, build_named, load_edge_list

EXIT_OK = 0
EXIT_USAGE = 2
EXIT_INVARIANT = 3
EXIT_CAPACITY = 4
EXIT_VERIFY = 5


class UsageError(CoinflowError):
    pass


def _parse_graph(spec: str) -> GraphTopology:
    parts = spec.split(":")
    if parts[0] == "named" and len(parts) == 3:
        kind, n = parts[1], parts[2]
        if kind not in NAMED_KINDS:
            raise UsageError(f"unknown named graph {kind!r}")
        return build_named(kind, int(n))
    if parts[0] == "file" and len(parts) == 2:
        return load_edge_list(parts[1])
    raise UsageError(f"graph spec must be named:<kind>:<n> or file:<path>, got {spec!r}")


def _write_manifest(path, command: str, args: dict, outputs: list[str]) -> None:
    manifest = {
        "command": command,
        "parameters": args,
        "rng_algorithm": RNG_ALGORITHM,
        "version": __version__,
        "timestamp": datetime.datetime.now(datetime.timezone.utc).isoformat(),
        "outputs": outputs,
    }
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(manifest, fh, indent=2)
        fh.write("\n")


def _threads(args) -> int:
    if args.threads is not None:
        return max(1, args.threads)
    env = os.environ.get("COINFLOW_THREADS")
    return max(1, int(env)) if env else 1


def _cmd_simulate(args) -> int:
    g = _parse_graph(args.graph)
    params = ModelParams(kind=args.model, money=args.money, limit=args.limit)
    seeds = replica_seeds(args.seed, args.replicas) if args.replicas > 1 else [args.seed]

    def run(seed):
        return simulate(
            g, params, seed,
            burn_in=args.burn_in, samples=args.samples, thinning=args.thin,
            policy=args.policy,
        )

    if len(seeds) > 1 and _threads(args) > 1:
        with ThreadPoolExecutor(max_workers=_threads(args)) as pool:
            reports = list(pool.map(run, seeds))
    else:
        reports = [run(s) for s in seeds]

    hist = stats.Histogram.from_report(reports[0])
    for rep in reports[1:]:
        hist = hist.merge(stats.Histogram.from_report(rep))

    hist_path = f"{args.out_prefix}_hist.csv"
    with open(hist_path, "w", encoding="utf-8") as fh:
        fh.write("c,count,frequency\n")
        for i, count in enumerate(hist.counts):
            fh.write(f"{hist.offset + i},{int(count)},{count / hist.total:.17g}\n")

    diag: dict = {
        "model": params.kind,
        "n": g.n,
        "money": params.money,
        "limit": params.limit,
        "temperature": float(params.temperature(g.n)),
        "seed": args.seed,
        "replicas": args.replicas,
        "burn_in": reports[0].burn_in,
        "samples": args.samples,
        "thinning": args.thin,
        "hist_total": hist.total,
    }
    if exact.exact_mode_cost(params.kind, g.n, params.money, params.limit) <= 2_000_000:
        pmf = exact.stationary_marginal(params.kind, g.n, params.money, params.limit)
        diag["tv_to_exact"] = stats.tv_distance(hist, pmf)
    t = float(params.temperature(g.n))
    cs = np.arange(hist.offset, hist.offset + hist.counts.size)
    if params.kind == exact.INDIVIDUAL:
        dens = asymptotics.shifted_exp_density(cs, t, params.limit)
    else:
        rho = params.limit / params.money if params.money else 0.0
        dens = (
            asymptotics.laplace_density(cs, asymptotics.laplace_params(t, rho))
            if rho > 0
            else None
        )
    if dens is not None and dens.sum() > 0:
        diag["tv_to_asymptotic"] = stats.tv_distance(hist, (hist.offset, dens / dens.sum()))
    if params.kind == exact.COLLECTIVE:
        merged_tally = sum(rep.tally for rep in reports)
        sym = stats.interaction_symmetry(merged_tally)
        diag["symmetry_stat"] = sym.statistic
        diag["symmetry_within_5_sigma"] = sym.within_5_sigma
        try:
            drift = stats.drift_estimate(reports[0])
            diag["drift"] = drift.mean_increment
            diag["drift_ci"] = drift.ci_halfwidth
            diag["zero_prob"] = drift.zero_prob
        except InsufficientDataError:
            diag["drift"] = None
        if params.limit > 0:
            diag["bank_curve_summary"] = stats.bank_depletion_curve(reports[0]).late_average
    diag_path = f"{args.out_prefix}_diag.json"
    with open(diag_path, "w", encoding="utf-8") as fh:
        json.dump(diag, fh, indent=2)
        fh.write("\n")

    manifest_path = f"{args.out_prefix}_manifest.json"
    _write_manifest(
        manifest_path, "simulate",
        {
            "model": args.model, "graph": args.graph, "money": args.money,
            "limit": args.limit, "seed": args.seed, "burn_in": reports[0].burn_in,
            "samples": args.samples, "thin": args.thin, "replicas": args.replicas,
            "policy": args.policy, "replica_seeds": seeds,
        },
        [hist_path, diag_path],
    )
    return EXIT_OK


def _cmd_exact(args) -> int:
    pmf = exact.stationary_marginal(args.model, args.n, args.money, args.limit, mode=args.mode)
    pmf.to_csv(args.out)
    outputs = [args.out]
    if args.json:
        pmf.to_json(args.json)
        outputs.append(args.json)
    manifest = args.out + ".manifest.json"
    _write_manifest(
        manifest, "exact",
        {"model": args.model, "n": args.n, "money": args.money,
         "limit": args.limit, "mode": args.mode},
        outputs,
    )
    return EXIT_OK


def _cmd_density(args) -> int:
    try:
        lo_s, hi_s, step_s = args.grid.split(":")
        lo, hi, step = float(lo_s), float(hi_s), float(step_s)
    except ValueError as exc:
        raise UsageError(f"bad grid spec {args.grid!r}") from exc
    if hi < lo or step <= 0:
        raise UsageError("grid needs lo <= hi and step > 0")
    cs = np.arange(lo, hi + step / 2, step)
    if args.law == "shifted-exp":
        if args.li is None:
            raise UsageError("shifted-exp needs --li")
        dens = asymptotics.shifted_exp_density(cs, args.t, args.li)
    else:
        if args.rho is None:
            raise UsageError("laplace needs --rho")
        p = asymptotics.laplace_params(args.t, args.rho)
        dens = asymptotics.laplace_density(cs, p)
    with open(args.out, "w", encoding="utf-8") as fh:
        fh.write("c,density\n")
        for c, d in zip(cs, dens):
            fh.write(f"{c:.17g},{d:.17g}\n")
    _write_manifest(
        args.out + ".manifest.json", "density",
        {"law": args.law, "t": args.t, "li": args.li, "rho": args.rho, "grid": args.grid},
        [args.out],
    )
    return EXIT_OK


def _cmd_verify(args) -> int:
    from . import oracle

    graphs = tuple(args.graphs.split(","))
    for kind in graphs:
        if kind not in NAMED_KINDS:
            raise UsageError(f"unknown graph family {kind!r}")
    report = oracle.verify_grid(
        max_n=args.grid_max_n,
        max_money=args.grid_max_money,
        max_limit=args.grid_max_limit,
        graphs=graphs,
    )
    summary = {
        "total": report["total"],
        "failed": report["failed"],
        "pass": report["pass"],
        "failures": report["failures"],
    }
    if args.out:
        with open(args.out, "w", encoding="utf-8") as fh:
            json.dump(report, fh, indent=2, default=int)
            fh.write("\n")
        _write_manifest(
            args.out + ".manifest.json", "verify",
            {"grid_max_n": args.grid_max_n, "grid_max_money": args.grid_max_money,
             "grid_max_limit": args.grid_max_limit, "graphs": args.graphs},
            [args.out],
        )
    print(json.dumps(summary, default=int))
    return EXIT_OK if report["pass"] else EXIT_VERIFY


def _cmd_fit(args) -> int:
    try:
        offset, probs = exact.load_pmf_csv(args.pmf)
    except (OSError, ValueError) as exc:
        raise UsageError(f"cannot read pmf CSV: {exc}") from exc
    p = asymptotics.laplace_params(args.t, args.rho)
    a_hat, b_hat, k_hat = asymptotics.fit_laplace_slopes(offset, probs)
    cs = np.arange(offset, offset + probs.size)
    dens = asymptotics.laplace_density(cs, p)
    tv = stats.tv_distance((offset, probs), (offset, dens / dens.sum()))
    result = {
        "fitted": {"a": a_hat, "b": b_hat, "k": k_hat},
        "predicted": {"a": p.a, "b": p.b, "k": p.k},
        "relative_errors": {
            "a": abs(a_hat - p.a) / p.a,
            "b": abs(b_hat - p.b) / p.b,
            "k": abs(k_hat - p.k) / p.k,
        },
        "tv_to_laplace": tv,
    }
    out = args.out or "fit.json"
    with open(out, "w", encoding="utf-8") as fh:
        json.dump(result, fh, indent=2)
        fh.write("\n")
    _write_manifest(
        out + ".manifest.json", "fit",
        {"pmf": args.pmf, "t": args.t, "rho": args.rho}, [out],
    )
    print(json.dumps(result))
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="coinflow", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    sim = sub.add_parser("simulate", help="run trajectories, emit histogram + diagnostics")
    sim.add_argument("--model", required=True, choices=("individual", "collective"))
    sim.add_argument("--graph", required=True, help="named:<kind>:<n> or file:<path>")
    sim.add_argument("--money", required=True, type=int)
    sim.add_argument("--limit", required=True, type=int)
    sim.add_argument("--seed", type=int, default=0)
    sim.add_argument("--burn-in", type=int, default=None)
    sim.add_argument("--samples", type=int, default=100_000)
    sim.add_argument("--thin", type=int, default=1)
    sim.add_argument("--replicas", type=int, default=1)
    sim.add_argument("--policy", default="even", choices=("even", "all_on_one"))
    sim.add_argument("--threads", type=int, default=None)
    sim.add_argument("--out-prefix", default="run")
    sim.set_defaults(func=_cmd_simulate)

    ex = sub.add_parser("exact", help="stationary pmf from the counting formulas")
    ex.add_argument("--model", required=True, choices=("individual", "collective"))
    ex.add_argument("--n", required=True, type=int)
    ex.add_argument("--money", required=True, type=int)
    ex.add_argument("--limit", required=True, type=int)
    ex.add_argument("--mode", default="exact", choices=("exact", "log"))
    ex.add_argument("--out", default="pmf.csv")
    ex.add_argument("--json", default=None)
    ex.set_defaults(func=_cmd_exact)

    den = sub.add_parser("density", help="limit-law density curve")
    den.add_argument("--law", required=True, choices=("shifted-exp", "laplace"))
    den.add_argument("--t", required=True, type=float)
    den.add_argument("--li", type=int, default=None)
    den.add_argument("--rho", type=float, default=None)
    den.add_argument("--grid", required=True, help="lo:hi:step")
    den.add_argument("--out", default="density.csv")
    den.set_defaults(func=_cmd_density)

    ver = sub.add_parser("verify", help="oracle verification grid (CI gate)")
    ver.add_argument("--grid-max-n", type=int, default=4)
    ver.add_argument("--grid-max-money", type=int, default=5)
    ver.add_argument("--grid-max-limit", type=int, default=3)
    ver.add_argument("--graphs", default="path,cycle,complete,star")
    ver.add_argument("--out", default=None)
    ver.set_defaults(func=_cmd_verify)

    fit = sub.add_parser("fit", help="fit a pmf against the asymmetric Laplace law")
    fit.add_argument("--pmf", required=True)
    fit.add_argument("--t", required=True, type=float)
    fit.add_argument("--rho", required=True, type=float)
    fit.add_argument("--out", default=None)
    fit.set_defaults(func=_cmd_fit)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (UsageError, GraphError, InvalidStateError, DegenerateParameterError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except InvariantBreachError as exc:
        print(f"invariant breach: {exc}", file=sys.stderr)
        return EXIT_INVARIANT
    except CapacityError as exc:
        print(f"capacity: {exc}", file=sys.stderr)
        return EXIT_CAPACITY


if __name__ == "__main__":
    sys.exit(main())
