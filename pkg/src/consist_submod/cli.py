"""Command-line entry point: ``consist-submod gen|run|audit|reproduce``."""
import json
import sys
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict
from itertools import combinations

import click

from . import acceptance
from .algorithms import (
    REGISTRY,
    CheckPoint,
    GreedyRecompute,
    SingleSwap,
    StaticFill,
    block_plan,
    greedy,
    greedy_with_certificate,
    local_search_with_stats,
)
from .exceptions import ConsistSubmodError
from .functions import CoverageFunction, TableFunction
from .hardness import (
    build_alignment_instance,
    build_gi_family,
    build_lifted_hard_instance,
)
from .harness import (
    AuditReport,
    RobustnessQuery,
    StreamTrace,
    _jsonable,
    addition_robustness_audit,
    approximation_audit,
    consistency_audit,
    run_stream,
)
from .io import dump_instance
from .rng import DEFAULT_SEED, SEED_ENV, default_seed, make_rng
from .robust_lp import (
    SolutionDistribution,
    build_and_solve_primal,
    enumerate_coverage_scenarios,
)

STREAM_ALGORITHMS = ("checkpoint", "static", "greedy-recompute", "single-swap")
OFFLINE_ALGORITHMS = ("greedy", "local-search", "certificate", "minmax")
TABULATE_LIMIT = 16


def _emit(text, path):
    if path in (None, "-"):
        click.echo(text)
    else:
        with open(path, "w") as fh:
            fh.write(text)
            if not text.endswith("\n"):
                fh.write("\n")


def _load_config(ctx, _param, path):
    """Eager ``--config`` callback: a JSON object becomes the default map, so flags still win."""
    if path:
        with open(path) as fh:
            data = json.load(fh)
        if not isinstance(data, dict):
            raise click.BadParameter("config file must hold a JSON object")
        ctx.default_map = {**(ctx.default_map or {}),
                           **{k.replace("-", "_"): v for k, v in data.items()}}
    return path


def _seed(seed):
    if seed is None:
        seed = default_seed()
        click.echo(f"seed: {seed} (default; override with --seed or {SEED_ENV})", err=True)
    return seed


def _fail(exc):
    click.echo(f"error: {exc}", err=True)
    sys.exit(2)


config_option = click.option("--config", type=click.Path(exists=True, dir_okay=False),
                             callback=_load_config, is_eager=True, expose_value=False,
                             help="JSON file of option defaults; flags take precedence.")
seed_option = click.option("--seed", type=int, default=None,
                           help=f"Random seed (default {DEFAULT_SEED} or ${SEED_ENV}).")


@click.group()
def main():
    """Consistent submodular maximization: generators, algorithms and audits."""


# ------------------------------------------------------------------------ gen

@main.group()
def gen():
    """Write a schema-valid instance file (generators: gi, lifted, align)."""


@gen.command("gi")
@click.option("--m", type=int, required=True, help="Number of a-elements.")
@click.option("--i", "index", type=int, default=0, show_default=True, help="Which g_i (0-based).")
@click.option("--out", default="-", show_default=True)
def gen_gi(m, index, out):
    """Table of g_i over m a-elements and r (2**(m+1) rows)."""
    try:
        fam = build_gi_family(m, exact=True)
        if not 0 <= index < m:
            raise click.BadParameter(f"--i must lie in [0, {m})")
        meta = {"generator": "gi", "m": m, "i": index, "r": fam.r}
        _emit(dump_instance(fam.tables[index], meta=meta), out)
    except ConsistSubmodError as exc:
        _fail(exc)


@gen.command("lifted")
@click.option("--m", type=int, required=True)
@click.option("--k", type=int, required=True)
@click.option("--i", "index", type=int, default=0, show_default=True, help="Which f_i (0-based).")
@click.option("--tabulate/--no-tabulate", default=None,
              help=f"Write a full table (default when m*k+1 <= {TABULATE_LIMIT}).")
@click.option("--out", default="-", show_default=True)
def gen_lifted(m, k, index, tabulate, out):
    """Lifted hard instance f_i with k copies per a-element; the stream ends with r."""
    try:
        inst = build_lifted_hard_instance(m, k, exact=True, validate=False)
        if not 0 <= index < m:
            raise click.BadParameter(f"--i must lie in [0, {m})")
        f = inst.functions[index]
        if tabulate is None:
            tabulate = inst.n <= TABULATE_LIMIT
        if tabulate:
            f = TableFunction.from_function(f, exact=True)
        meta = {"generator": "lifted", "m": m, "k": k, "i": index, "r": inst.r}
        _emit(dump_instance(f, inst.stream, meta), out)
    except ConsistSubmodError as exc:
        _fail(exc)


@gen.command("align")
@click.option("--kappa", type=int, required=True)
@click.option("--N", "N", type=int, default=None, help="Universe size (default 2*kappa).")
@click.option("--out", default="-", show_default=True)
def gen_align(kappa, N, out):
    """Coverage instance: N singleton sets now, one future element per kappa-subset of items."""
    N = 2 * kappa if N is None else N
    try:
        inst = build_alignment_instance(N, kappa)
        futures = [list(c) for c in combinations(range(N), kappa)]
        if len(futures) > 5000:
            raise click.BadParameter(f"{len(futures)} futures; choose a smaller N or kappa")
        sets = [[u] for u in range(N)] + futures
        cov = CoverageFunction(N, sets)
        fut = list(range(N, N + len(futures)))
        meta = {"generator": "align", "N": N, "kappa": kappa, "v_now": inst.v_now,
                "v_future": fut, "futures": [[]] + [[x] for x in fut]}
        _emit(dump_instance(cov, meta=meta), out)
    except ConsistSubmodError as exc:
        _fail(exc)


# ------------------------------------------------------------------------ run

def _read(path):
    """Instance, stream and meta from a file written by ``gen`` (or any schema file)."""
    with open(path) as fh:
        data = json.load(fh)
    from .io import instance_from_dict

    f, stream = instance_from_dict(data)
    return f, stream, data.get("meta") or {}


def _build_stream_alg(algorithm, epsilon, k, subroutine):
    if algorithm == "checkpoint":
        return CheckPoint(epsilon=epsilon, k=k, subroutine=subroutine)
    return {"static": StaticFill, "greedy-recompute": GreedyRecompute,
            "single-swap": SingleSwap}[algorithm](k=k)


@main.command("run")
@config_option
@click.option("--instance", "instance_path", type=click.Path(exists=True, dir_okay=False),
              required=True)
@click.option("--algorithm", type=click.Choice(STREAM_ALGORITHMS + OFFLINE_ALGORITHMS),
              required=True)
@click.option("--epsilon", type=float, default=0.25, show_default=True)
@click.option("--k", type=int, default=None, help="Cardinality for streaming algorithms.")
@click.option("--kappa", type=int, default=None, help="Cardinality for offline algorithms.")
@click.option("--eta", type=float, default=0.1, show_default=True)
@click.option("--gamma", type=float, default=0.84, show_default=True)
@click.option("--subroutine", type=click.Choice(sorted(REGISTRY)), default="local_search",
              show_default=True)
@click.option("--benchmark", type=click.Choice(["weak", "strong"]), default="strong",
              show_default=True, help="Benchmark for the minmax LP.")
@click.option("--opt/--no-opt", "with_opt", default=False,
              help="Record brute-force OPT_t in the trace.")
@seed_option
@click.option("--trace", "trace_path", default=None, help="CSV trace output (streaming).")
@click.option("--out", default="-", show_default=True, help="JSON summary/result output.")
def run_cmd(instance_path, algorithm, epsilon, k, kappa, eta, gamma, subroutine, benchmark,
            with_opt, seed, trace_path, out):
    """Run an algorithm on an instance file."""
    seed = _seed(seed)
    try:
        f, stream, meta = _read(instance_path)
        pool = meta.get("v_now")
        if algorithm in STREAM_ALGORITHMS:
            k = k if k is not None else meta.get("k") or meta.get("kappa")
            if k is None:
                raise click.BadParameter("--k is required")
            if stream is None:
                stream = [int(x) for x in make_rng(seed, "stream").permutation(f.n)]
            alg = _build_stream_alg(algorithm, epsilon, k, subroutine)
            trace = run_stream(alg, f, stream, seed=seed, k=k, compute_opt=with_opt)
            if trace_path:
                _emit(trace.to_csv(), trace_path)
            summary = {"algorithm": algorithm, "k": k, "seed": seed, "steps": len(trace),
                       "final_solution": sorted(trace.steps[-1].alg) if trace.steps else [],
                       "final_value": trace.steps[-1].alg_value if trace.steps else 0,
                       "max_additions": max(trace.recourse, default=0)}
            if algorithm == "checkpoint":
                summary["consistency_bound"] = block_plan(epsilon, k).consistency_bound
            _emit(json.dumps(_jsonable(summary), indent=2, sort_keys=True), out)
            return
        kappa = kappa if kappa is not None else meta.get("kappa")
        if kappa is None:
            raise click.BadParameter("--kappa is required")
        if algorithm == "greedy":
            res = greedy(f, pool, kappa)
            result = {"solution": sorted(res.solution), "value": res.value,
                      "order": list(res.order), "gains": list(res.gains)}
        elif algorithm == "local-search":
            sol, swaps = local_search_with_stats(f, pool, kappa, epsilon)
            result = {"solution": sorted(sol), "swaps": swaps,
                      "value": f.value(sum(1 << x for x in sol))}
        elif algorithm == "certificate":
            res = greedy_with_certificate(f, pool, kappa, eta, gamma, make_rng(seed, "certificate"))
            result = asdict(res)
        else:
            result = _run_minmax(f, meta, pool, kappa, benchmark).to_dict()
        result["seed"] = seed
        _emit(json.dumps(_jsonable(result), indent=2, sort_keys=True), out)
    except ConsistSubmodError as exc:
        _fail(exc)


def _run_minmax(f, meta, pool, kappa, benchmark):
    if not isinstance(f, CoverageFunction):
        raise click.BadParameter("minmax needs a coverage instance")
    futures = meta.get("futures")
    subsets = None
    if futures is not None:
        subsets = [sorted(set().union(*(f.sets[x] for x in r))) if r else [] for r in futures]
    fam = enumerate_coverage_scenarios(f, pool, subsets)
    _, dist = build_and_solve_primal(fam, kappa, "auto", benchmark, validate=False)
    return dist


# ---------------------------------------------------------------------- audit

@main.group()
def audit():
    """Audits (consistency, approximation, robustness, lemma); exit code 1 on failure."""


def _report(rep, out):
    _emit(rep.to_json(), out)
    sys.exit(rep.exit_code)


@audit.command("consistency")
@click.option("--trace", "trace_path", type=click.Path(exists=True, dir_okay=False),
              required=True)
@click.option("--c", "C", type=float, required=True, help="Per-step recourse bound.")
@click.option("--metric", type=click.Choice(["additions", "sym_diff"]), default="additions",
              show_default=True)
@click.option("--out", default="-")
def audit_consistency(trace_path, C, metric, out):
    with open(trace_path) as fh:
        trace = StreamTrace.from_csv(fh.read())
    _report(consistency_audit(trace, C, metric), out)


@audit.command("approximation")
@click.option("--trace", "trace_paths", type=click.Path(exists=True, dir_okay=False),
              multiple=True, required=True, help="Repeat once per seed.")
@click.option("--alpha", type=float, required=True)
@click.option("--z", type=float, default=1.96, show_default=True)
@click.option("--out", default="-")
def audit_approximation(trace_paths, alpha, z, out):
    traces = []
    for p in trace_paths:
        with open(p) as fh:
            traces.append(StreamTrace.from_csv(fh.read()))
    try:
        _report(approximation_audit(traces, alpha, z), out)
    except ConsistSubmodError as exc:
        _fail(exc)


@audit.command("robustness")
@click.option("--dist", "dist_path", type=click.Path(exists=True, dir_okay=False), required=True)
@click.option("--instance", "instance_path", type=click.Path(exists=True, dir_okay=False),
              required=True)
@click.option("--mode", type=click.Choice(["weak", "strong"]), default="weak", show_default=True)
@click.option("--kappa", type=int, default=None)
@click.option("--alpha", type=float, default=None, help="Fail below this ratio.")
@click.option("--out", default="-")
def audit_robustness(dist_path, instance_path, mode, kappa, alpha, out):
    """Exact ``min_R E[f(A + R)] / OPT`` of a solution distribution; reports alpha_measured."""
    try:
        f, _, meta = _read(instance_path)
        with open(dist_path) as fh:
            dist = SolutionDistribution.from_json(fh.read())
        kappa = kappa if kappa is not None else meta.get("kappa")
        if kappa is None:
            raise click.BadParameter("--kappa is required")
        v_now = meta.get("v_now", list(range(f.n)))
        v_future = meta.get("v_future", [x for x in range(f.n) if x not in set(v_now)])
        query = RobustnessQuery(dist, v_now, v_future, kappa, mode, meta.get("futures"))
        rep = addition_robustness_audit(query, f, alpha)
    except ConsistSubmodError as exc:
        _fail(exc)
    _report(rep, out)


@audit.command("lemma")
@click.option("--name", type=click.Choice(sorted(acceptance.SUITES)), required=True)
@click.option("--trials", type=int, default=None, help="Trial (or seed) count.")
@seed_option
@click.option("--out", default=None, help="Optional JSON report path.")
def audit_lemma(name, trials, seed, out):
    """Run one property suite."""
    seed = _seed(seed)
    fn = acceptance.SUITES[name]
    kwargs = {"seed": seed}
    if trials is not None:
        kwargs["seeds" if name.startswith("checkpoint") else "trials"] = trials
    if name == "alignment":
        kwargs.pop("trials", None)
    res = fn(**kwargs)
    click.echo(res.line())
    if out:
        rep = AuditReport(kind=f"lemma:{name}", passed=res.passed,
                          worst_case=res.violations[0] if res.violations else {},
                          samples=res.trials, seed=seed, details=res.stats)
        _emit(rep.to_json(), out)
    sys.exit(0 if res.passed else 1)


# ------------------------------------------------------------------ reproduce

def _criterion(args):
    number, seed = args
    return acceptance.run_criterion(number, seed)


@main.command("reproduce")
@seed_option
@click.option("--only", type=click.IntRange(1, len(acceptance.CRITERIA)), multiple=True,
              help="Run only these criteria (repeatable).")
@click.option("--jobs", type=int, default=1, show_default=True,
              help="Worker processes; criteria are independent.")
@click.option("--out", default=None, help="Optional JSON summary path.")
def reproduce(seed, only, jobs, out):
    """Run the full acceptance suite and print one line per criterion."""
    seed = _seed(seed)
    numbers = sorted(only) if only else sorted(acceptance.CRITERIA)
    args = [(n, seed) for n in numbers]
    if jobs > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            results = list(pool.map(_criterion, args))
    else:
        results = [_criterion(a) for a in args]
    for res in results:
        click.echo(f"{res.line()} ({res.seconds:.1f}s)")
    if out:
        payload = [{"name": r.name, "passed": r.passed, "trials": r.trials,
                    "violations": r.violations[:20], "stats": r.stats,
                    "seconds": r.seconds} for r in results]
        _emit(json.dumps(_jsonable(payload), indent=2, default=str), out)
    failed = [r.name for r in results if not r.passed]
    click.echo(f"{len(results) - len(failed)}/{len(results)} criteria passed")
    sys.exit(1 if failed else 0)


if __name__ == "__main__":  # pragma: no cover
    main()
