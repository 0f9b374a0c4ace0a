"""Command-line interface for otcap."""

import json
import logging
import sys
from dataclasses import dataclass, field
from typing import Any, Dict, Optional

import click
import numpy as np
import pandas as pd
from rich.console import Console
from rich.logging import RichHandler

from . import __version__
from .bench import BenchmarkRunner
from .errors import InfeasibleInstanceError, InvalidArgumentError, OTCapError
from .models.config import AppConfig
from .models.instance import TimeExpandedPlan
from .models.measure import CostMatrix, TransportPlan
from .services.capacity import (
    check_instance_feasible,
    minimal_steps_for_unconstrained,
    screen_feasibility,
    solve_capacity,
    solve_general,
    solve_uniform_fast,
)
from .services.generator import InstanceKind, generate_instance
from .services.instance_store import (
    dump_instance,
    load_instance_file,
    to_capacity_instance,
    to_measures,
    to_sparsity_instance,
    write_instance_file,
)
from .services.pipeline import solve_combined
from .services.plan_validator import PlanValidator
from .services.sparse import heuristic_solve, importance, oracle_solve, random_baseline
from .services.transport import solve_kantorovich, wasserstein_distance

logger = logging.getLogger(__name__)

LOG_FORMAT = "%(asctime)s - %(name)s - %(levelname)s - %(message)s"

EXIT_OK = 0
EXIT_ERROR = 1
EXIT_INFEASIBLE = 2

BACKENDS = ["simplex", "highs", "highs-ds", "highs-ipm"]


@dataclass
class CliState:
    """Global options shared by every subcommand."""
    app: AppConfig = field(default_factory=AppConfig)
    output: str = "json"
    seed: int = 0
    repeats: Optional[int] = None
    workers: int = 1


def configure_logging(verbose: bool) -> None:
    """Log to stderr so stdout carries only json/csv."""
    level = logging.DEBUG if verbose else logging.WARNING
    if sys.stderr.isatty():
        handler: logging.Handler = RichHandler(console=Console(stderr=True), show_path=False)
        handler.setFormatter(logging.Formatter("%(message)s"))
    else:
        handler = logging.StreamHandler(sys.stderr)
        handler.setFormatter(logging.Formatter(LOG_FORMAT))
    logging.basicConfig(level=level, handlers=[handler], force=True)


def _json_default(value: Any) -> Any:
    if isinstance(value, np.integer):
        return int(value)
    if isinstance(value, np.floating):
        return float(value)
    if isinstance(value, np.ndarray):
        return value.tolist()
    raise TypeError(f"{type(value).__name__} is not JSON serializable")


def _emit(state: CliState, payload: Dict[str, Any], frame: Optional[pd.DataFrame] = None) -> None:
    """Write the result to stdout as JSON, or as CSV when a table form exists."""
    if state.output == "csv" and frame is not None:
        click.echo(frame.to_csv(index=False, float_format="%.10g"), nl=False)
    else:
        click.echo(json.dumps(payload, indent=2, default=_json_default))


def _plan_frame(plan: TransportPlan, step: Optional[int] = None) -> pd.DataFrame:
    """Long-form plan table with 1-based indices."""
    rows = []
    for (j, k), value in np.ndenumerate(plan.entries):
        row = {"source": j + 1, "sink": k + 1, "value": float(value)}
        if step is not None:
            row = {"step": step, **row}
        rows.append(row)
    return pd.DataFrame(rows)


def _time_expanded_frame(plan: TimeExpandedPlan) -> pd.DataFrame:
    return pd.concat([_plan_frame(g, step=i) for i, g in enumerate(plan.gammas, 1)], ignore_index=True)


def _report_issues(issues) -> list:
    for issue in issues:
        logger.warning(f"{issue.field}: {issue.message}")
    return [issue.to_dict() for issue in issues]


class OTCapGroup(click.Group):
    """Click group that maps otcap errors to exit codes: 2 infeasible, 1 anything else."""

    def main(self, args=None, prog_name=None, complete_var=None, standalone_mode=True, **extra):
        try:
            code = super().main(
                args=args,
                prog_name=prog_name,
                complete_var=complete_var,
                standalone_mode=False,
                **extra,
            )
        except InfeasibleInstanceError as e:
            click.echo(f"infeasible: {e}", err=True)
            report = getattr(e, "report", None)
            if report is not None and not report.is_empty:
                click.echo(json.dumps(report.to_dict()), err=True)
            code = EXIT_INFEASIBLE
        except click.ClickException as e:
            e.show()
            code = EXIT_ERROR
        except click.Abort:
            click.echo("Aborted!", err=True)
            code = EXIT_ERROR
        except OTCapError as e:
            click.echo(f"error: {e}", err=True)
            code = EXIT_ERROR
        except Exception as e:
            logger.exception(f"internal error: {e}")
            click.echo(f"internal error: {e}", err=True)
            code = EXIT_ERROR

        code = code if isinstance(code, int) else EXIT_OK
        if not standalone_mode:
            return code
        sys.exit(code)


@click.group(cls=OTCapGroup)
@click.version_option(__version__, prog_name="otcap")
@click.option("--seed", type=int, default=None, help="Seed for generation and sampling")
@click.option("--tol", type=float, default=None, help="LP feasibility/optimality tolerance")
@click.option("--output", type=click.Choice(["json", "csv"]), default="json", show_default=True)
@click.option("--repeats", type=int, default=None, help="Timing repeats for benchmarks")
@click.option("--backend", type=click.Choice(BACKENDS), default=None, help="LP backend")
@click.option("--config", "config_path", type=click.Path(exists=True, dir_okay=False), default=None,
              help="YAML/JSON config file")
@click.option("--parallel-instances", type=int, default=None, help="Concurrent independent solves")
@click.option("--verbose", "-v", is_flag=True, help="Verbose output")
@click.pass_context
def cli(ctx, seed, tol, output, repeats, backend, config_path, parallel_instances, verbose):
    """Optimal transport under capacity and sparsity constraints."""
    configure_logging(verbose)

    app = AppConfig.from_file(config_path) if config_path else AppConfig()
    solvers = [app.solver, app.sparse.solver, app.pipeline.solver]
    for solver in solvers:
        if tol is not None:
            solver.feas_tol = tol
            solver.opt_tol = tol
        if backend is not None:
            solver.backend = backend
    if seed is not None:
        app.bench.seed = seed
    if repeats is not None:
        app.bench.repeats = repeats
    if parallel_instances is not None:
        if parallel_instances < 1:
            raise click.BadParameter("must be at least 1", param_hint="--parallel-instances")
        app.sparse.parallel_workers = parallel_instances

    ctx.obj = CliState(
        app=app,
        output=output,
        seed=app.bench.seed,
        repeats=repeats,
        workers=app.sparse.parallel_workers,
    )


# -- instances -----------------------------------------------------------------

@cli.command()
@click.option("--n", "n", type=int, required=True, help="Number of sources")
@click.option("--m", "m", type=int, required=True, help="Number of sinks")
@click.option("--steps", "N", type=int, default=1, show_default=True, help="Time steps")
@click.option("--kind", type=click.Choice([k.value for k in InstanceKind]), default="capacity", show_default=True)
@click.option("--sparsity", type=int, default=None, help="Uniform per-source budget")
@click.option("--out", "out_path", type=click.Path(dir_okay=False), default=None, help="Output file (default stdout)")
@click.pass_obj
def gen(state: CliState, n, m, N, kind, sparsity, out_path):
    """Generate a seeded random instance."""
    doc = generate_instance(n, m, N, InstanceKind(kind), seed=state.seed, sparsity=sparsity)
    if out_path:
        write_instance_file(doc, out_path)
    else:
        click.echo(dump_instance(doc), nl=False)


@cli.command()
@click.argument("instance", type=click.Path(exists=True, dir_okay=False))
@click.pass_obj
def check(state: CliState, instance):
    """Screen an instance and decide feasibility exactly."""
    inst = to_capacity_instance(load_instance_file(instance))
    report = screen_feasibility(inst)
    feasible = check_instance_feasible(inst, state.app.solver)
    _emit(state, {"feasible": feasible, "screen": report.to_dict()})
    if not feasible:
        raise InfeasibleInstanceError(f"{instance} is infeasible", report=report)


# -- solves --------------------------------------------------------------------

@cli.command("solve-ot")
@click.argument("instance", type=click.Path(exists=True, dir_okay=False))
@click.option("--step", type=int, default=1, show_default=True, help="Which step's cost matrix (1-based)")
@click.pass_obj
def solve_ot(state: CliState, instance, step):
    """Unconstrained Kantorovich transport."""
    doc = load_instance_file(instance)
    if not 1 <= step <= doc.steps:
        raise click.BadParameter(f"must lie in [1, {doc.steps}]", param_hint="--step")
    a, b = to_measures(doc)
    cost = CostMatrix(np.asarray(doc.cost_stack()[step - 1], dtype=float))
    plan, value = solve_kantorovich(a, b, cost, state.app.solver)

    validator = PlanValidator()
    issues = validator.validate_coupling(plan, a, b) + validator.validate_cost(plan, cost, value)
    _emit(
        state,
        {"cost": value, "plan": plan.to_list(), "issues": _report_issues(issues)},
        _plan_frame(plan),
    )


@cli.command()
@click.argument("instance", type=click.Path(exists=True, dir_okay=False))
@click.option("--p", "p", type=float, default=1.0, show_default=True, help="Order of the distance")
@click.option("--metric", default="euclidean", show_default=True, help="Ground metric (scipy cdist name)")
@click.option("--normalize", is_flag=True, help="Rescale both measures to unit mass first")
@click.pass_obj
def wasserstein(state: CliState, instance, p, metric, normalize):
    """p-Wasserstein distance between the instance's point-supported measures."""
    mu, nu = to_measures(load_instance_file(instance))
    if normalize:
        mu, nu = mu.normalized(), nu.normalized()
    distance = wasserstein_distance(mu, nu, p=p, metric=metric, config=state.app.solver)
    _emit(state, {"p": p, "metric": metric, "distance": distance})


@cli.command("solve-capacity")
@click.argument("instance", type=click.Path(exists=True, dir_okay=False))
@click.option("--fast", "method", flag_value="fast", help="Uniform-plan reformulation (constant C and M)")
@click.option("--general", "method", flag_value="general", help="Full N-step LP")
@click.option("--gammas/--no-gammas", default=False, help="Include every per-step plan in JSON output")
@click.pass_obj
def solve_capacity_cmd(state: CliState, instance, method, gammas):
    """Capacity-constrained transport over N steps."""
    inst = to_capacity_instance(load_instance_file(instance))
    solve = {"fast": solve_uniform_fast, "general": solve_general}.get(method, solve_capacity)
    plan = solve(inst, state.app.solver)

    issues = PlanValidator().validate_time_expanded(plan, inst)
    payload = {
        "cost": plan.cost,
        "method": plan.metadata.get("method"),
        "steps": plan.steps,
        "aggregate": plan.aggregate.to_list(),
        "issues": _report_issues(issues),
    }
    if gammas:
        payload["gammas"] = [g.to_list() for g in plan.gammas]
    _emit(state, payload, _time_expanded_frame(plan))


@cli.command("solve-sparse")
@click.argument("instance", type=click.Path(exists=True, dir_okay=False))
@click.option("--surrogate", type=click.IntRange(1, 4), default=None, help="Importance surrogate 1-4")
@click.option("--oracle", is_flag=True, help="Exhaustive optimum instead of the heuristic")
@click.option("--baseline", type=int, default=0, help="Random patterns to compare against")
@click.option("--sparsity", type=int, default=None, help="Uniform budget overriding the file")
@click.option("--attempts", type=int, default=None, help="Heuristic attempt cap")
@click.option("--lambda", "lambda_", type=float, default=None, help="Weight for surrogate 4")
@click.pass_obj
def solve_sparse(state: CliState, instance, surrogate, oracle, baseline, sparsity, attempts, lambda_):
    """Transport with at most s_j nonzero entries per source."""
    cfg = state.app.sparse
    if surrogate is not None:
        cfg.surrogate_id = surrogate
    if lambda_ is not None:
        cfg.lambda_ = lambda_
    if attempts is not None:
        cfg.attempt_cap = attempts

    inst = to_sparsity_instance(load_instance_file(instance), sparsity=sparsity)
    if oracle:
        result = oracle_solve(inst, cfg)
    else:
        score = importance(inst.a, inst.b, inst.cost, cfg.surrogate_id, cfg.lambda_, cfg.solver)
        result = heuristic_solve(inst, score, config=cfg)

    validator = PlanValidator(zero_tol=cfg.zero_tol)
    issues = (
        validator.validate_coupling(result.plan, inst.a, inst.b)
        + validator.validate_sparse(result.plan, inst.sparsity)
        + validator.validate_cost(result.plan, inst.cost, result.cost)
    )
    payload = result.to_dict()
    payload.pop("wall_time")
    payload["issues"] = _report_issues(issues)

    if baseline > 0:
        samples = random_baseline(inst, baseline, seed=state.seed, config=cfg)
        feasible = [s.cost for s in samples if s.feasible]
        payload["baseline"] = {
            "samples": baseline,
            "feasible": len(feasible),
            "mean_cost": float(np.mean(feasible)) if feasible else None,
            "beat_pct": 100.0 * sum(c > result.cost for c in feasible) / len(feasible) if feasible else None,
        }
    _emit(state, payload, _plan_frame(result.plan))


@cli.command()
@click.argument("instance", type=click.Path(exists=True, dir_okay=False))
@click.option("--surrogate", type=click.IntRange(1, 4), default=None, help="Importance surrogate 1-4")
@click.option("--oracle-fallback", is_flag=True, help="Try the oracle when a step's heuristic gives up")
@click.option("--capacity-in-sparse-step/--no-capacity-in-sparse-step", default=None,
              help="Keep capacity bounds while sparsifying each step")
@click.option("--gammas/--no-gammas", default=False, help="Include every per-step plan in JSON output")
@click.pass_obj
def pipeline(state: CliState, instance, surrogate, oracle_fallback, capacity_in_sparse_step, gammas):
    """Capacity solve, then per-step sparsification."""
    cfg = state.app.pipeline
    if surrogate is not None:
        cfg.surrogate_id = surrogate
    if oracle_fallback:
        cfg.oracle_fallback = True
    if capacity_in_sparse_step is not None:
        cfg.enforce_capacity_in_sparse_step = capacity_in_sparse_step

    doc = load_instance_file(instance)
    sparsity = doc.sparsity_stack()
    if sparsity is None:
        raise InvalidArgumentError(f"{instance} has no sparsity budgets")
    inst = to_capacity_instance(doc)
    plan = solve_combined(inst, sparsity, cfg, workers=state.workers)

    validator = PlanValidator(zero_tol=cfg.zero_tol)
    issues = validator.validate_time_expanded(plan, inst, check_capacity=cfg.enforce_capacity_in_sparse_step)
    for i, (gamma, budget) in enumerate(zip(plan.gammas, sparsity), 1):
        issues += validator.validate_sparse(gamma, budget, field=f"gammas[{i}]")

    payload = {
        "cost": plan.cost,
        "capacity_cost": plan.metadata.get("capacity_cost"),
        "attempts": plan.metadata.get("attempts"),
        "aggregate": plan.aggregate.to_list(),
        "issues": _report_issues(issues),
    }
    if gammas:
        payload["gammas"] = [g.to_list() for g in plan.gammas]
    _emit(state, payload, _time_expanded_frame(plan))


@cli.command("min-steps")
@click.argument("instance", type=click.Path(exists=True, dir_okay=False))
@click.pass_obj
def min_steps(state: CliState, instance):
    """Smallest N at which the first step's capacity stops binding."""
    doc = load_instance_file(instance)
    inst = to_capacity_instance(doc)
    steps = minimal_steps_for_unconstrained(inst.a, inst.b, inst.costs[0], inst.capacities[0], state.app.solver)
    _emit(state, {"steps": steps})


# -- benchmarks ----------------------------------------------------------------

@cli.command("bench-table1")
@click.option("--size", "sizes", type=int, multiple=True, help="n = m; repeatable")
@click.option("--steps", "step_counts", type=int, multiple=True, help="N; repeatable")
@click.option("--backends", "backends", type=click.Choice(BACKENDS), multiple=True,
              help="Backends to compare; repeatable")
@click.option("--no-timings", is_flag=True, help="Leave wall-clock fields out of JSON output")
@click.pass_obj
def bench_table1(state: CliState, sizes, step_counts, backends, no_timings):
    """General vs fast capacity solve timings."""
    runner = BenchmarkRunner(state.app.bench, state.app.solver)
    report = runner.bench_capacity(
        sizes=sizes or None,
        step_counts=step_counts or None,
        repeats=state.repeats,
        backends=backends or None,
    )
    payload = report.to_dict(include_timings=not no_timings)
    if not no_timings:
        payload["aggregates"] = report.aggregates().to_dict(orient="records")
    _emit(state, payload, report.to_dataframe())


@cli.command("bench-table2")
@click.option("--surrogate", "surrogates", type=click.IntRange(1, 4), multiple=True, help="Surrogate; repeatable")
@click.option("--instances", "instance_count", type=int, default=None, help="Random instances")
@click.option("--n", "n", type=int, default=None, help="Sources")
@click.option("--m", "m", type=int, default=None, help="Sinks")
@click.option("--sparsity", type=int, default=None, help="Per-source budget")
@click.option("--baseline", "baseline_samples", type=int, default=None, help="Random patterns per instance")
@click.option("--no-timings", is_flag=True, help="Leave wall-clock fields out of the output")
@click.pass_obj
def bench_table2(state: CliState, surrogates, instance_count, n, m, sparsity, baseline_samples, no_timings):
    """Heuristic vs oracle metric grid."""
    runner = BenchmarkRunner(state.app.bench, state.app.solver)
    report = runner.bench_sparse(
        n=n,
        m=m,
        s=sparsity,
        instance_count=instance_count,
        surrogates=surrogates or None,
        baseline_samples=baseline_samples,
        seed=state.seed,
    )
    payload = report.to_dict(include_timings=not no_timings)
    frame = report.grid_frame()
    if no_timings:
        frame = frame.drop(index="time_saved_pct", errors="ignore")
    _emit(state, payload, frame.reset_index().rename(columns={"index": "metric"}))


def main():
    """Main entry point for the CLI."""
    cli.main(prog_name="otcap")


if __name__ == "__main__":
    main()
