from __future__ import annotations

import multiprocessing
import sys
from collections.abc import Sequence
from pathlib import Path
from typing import Any

import click
import typer
from click.core import ParameterSource
from pydantic import ValidationError

from src.calibration import calibrate_thresholds
from src.config import get_settings
from src.environments import available_environments
from src.exceptions import RadGradError
from src.experiment.artifacts import RunManifest, read_metrics_csv
from src.experiment.config import ExperimentConfig
from src.imitation.heads import LossVariant
from src.nn.training import TrainConfig
from src.orchestrator import SuiteConfig, execute_run, run_suite, summary_row
from src.reporter import print_calibration, print_catalog, print_metrics, print_summary
from src.strategies import available_strategies, resolve_strategy
from src.utils.logging import configure_logging, get_logger

log = get_logger(__name__)

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_RUN_FAILURE = 2
EXIT_INTERRUPTED = 130

app = typer.Typer(help="RadGrad query-gated imitation learning benchmark.", add_completion=False)

# CLI parameter name -> ExperimentConfig field; train settings use "<head>_train.<field>".
_PARAM_FIELDS: dict[str, str] = {
    "env": "env",
    "strategy": "strategy",
    "tau": "tau",
    "epsilon": "epsilon",
    "p_query": "p_query",
    "hybrid_coin": "hybrid_coin",
    "iterations": "iterations",
    "episodes": "episodes_per_iteration",
    "horizon": "horizon",
    "bootstrap_episodes": "bootstrap_episodes",
    "eval_trials": "eval_trials",
    "budget": "query_budget",
    "seed": "seed",
    "out": "out_dir",
    "dropout": "dropout_rate",
    "policy_hidden": "policy_hidden",
    "lossnet_hidden": "lossnet_hidden",
    "match_supervised_budget": "match_supervised_budget",
}
_TRAIN_PARAMS: dict[str, str] = {
    "lr": "learning_rate",
    "batch_size": "batch_size",
    "epochs": "max_epochs",
    "patience": "patience",
    "momentum": "momentum",
}
for _head in ("policy", "lossnet"):
    for _suffix, _field in _TRAIN_PARAMS.items():
        _PARAM_FIELDS[f"{_head}_{_suffix}"] = f"{_head}_train.{_field}"

_FIELD_FLAGS = {field: "--" + param.replace("_", "-") for param, field in _PARAM_FIELDS.items()}

_POSITIVE = click.FloatRange(min=0.0, min_open=True)
_UNIT = click.FloatRange(min=0.0, max=1.0)
_COUNT = click.IntRange(min=1)


def read_config_file(path: Path) -> dict[str, str]:
    """``key = value`` lines, ``#`` comments; keys may use ``-`` or ``_``."""
    values: dict[str, str] = {}
    for number, raw in enumerate(path.read_text(encoding="utf-8").splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        key, sep, value = line.partition("=")
        if not sep or not key.strip():
            raise ValueError(f"{path}:{number}: expected 'key = value', got {raw!r}")
        values[key.strip().replace("-", "_")] = value.strip()
    return values


def _load_config_file(ctx: typer.Context, param: typer.CallbackParam, value: Path | None) -> Path | None:
    if value is None:
        return value
    try:
        defaults = read_config_file(Path(value))
    except (OSError, ValueError) as exc:
        raise typer.BadParameter(str(exc), ctx=ctx, param=param) from exc
    known = {p.name for p in ctx.command.params}
    unknown = sorted(set(defaults) - known)
    if unknown:
        raise typer.BadParameter(f"unknown key(s): {', '.join(unknown)}", ctx=ctx, param=param)
    ctx.default_map = {**(ctx.default_map or {}), **defaults}
    return value


def _parse_hidden(text: str) -> tuple[int, ...]:
    parts = [p.strip() for p in text.split(",") if p.strip()]
    try:
        sizes = tuple(int(p) for p in parts)
    except ValueError as exc:
        raise click.BadParameter(f"expected comma-separated integers, got {text!r}") from exc
    if any(s <= 0 for s in sizes):
        raise click.BadParameter(f"layer sizes must be positive, got {text!r}")
    return sizes


def _hidden_callback(value: str | None) -> str | None:
    if value is not None:
        _parse_hidden(value)
    return value


def _explicit(ctx: click.Context, name: str) -> bool:
    source = ctx.get_parameter_source(name)
    return source is not None and source is not ParameterSource.DEFAULT


def _nest(flat: dict[str, Any]) -> dict[str, Any]:
    nested: dict[str, Any] = {}
    for key, value in flat.items():
        head, _, leaf = key.partition(".")
        if leaf:
            nested.setdefault(head, {})[leaf] = value
        else:
            nested[head] = value
    return nested


def build_experiment_config(ctx: click.Context) -> ExperimentConfig:
    """Turn the parsed ``run`` options into a validated ``ExperimentConfig``."""
    params = ctx.params
    if params.get("manifest") is not None:
        overridden = [
            _FIELD_FLAGS[_PARAM_FIELDS[name]] for name in _PARAM_FIELDS if _explicit(ctx, name)
        ]
        if overridden:
            log.warning("[CLI] flags ignored with --manifest", extra={"flags": overridden})
        try:
            return RunManifest.read(Path(params["manifest"])).config
        except (OSError, ValidationError) as exc:
            raise click.BadParameter(str(exc), ctx=ctx, param_hint="'--manifest'") from exc

    for required in ("env", "strategy"):
        if params.get(required) is None:
            raise click.UsageError(f"Missing option '--{required}'.", ctx=ctx)

    settings = get_settings()
    fallbacks = {
        "iterations": settings.iterations,
        "episodes": settings.episodes_per_iteration,
        "eval_trials": settings.eval_trials,
        "bootstrap_episodes": settings.bootstrap_episodes,
        "p_query": settings.p_query,
        "seed": settings.default_seed,
    }
    flat: dict[str, Any] = {}
    for name, field in _PARAM_FIELDS.items():
        value = params.get(name)
        if value is None:
            value = fallbacks.get(name)
        if value is None:
            continue
        if name in ("policy_hidden", "lossnet_hidden"):
            value = _parse_hidden(value)
        elif name == "out":
            value = Path(value)
        flat[field] = value

    try:
        cfg = ExperimentConfig.model_validate(_nest(flat))
    except ValidationError as exc:
        first = exc.errors()[0]
        path = ".".join(str(part) for part in first["loc"])
        flag = _FIELD_FLAGS.get(path, path)
        raise click.BadParameter(first["msg"], ctx=ctx, param_hint=f"'{flag}'") from exc

    explicit_fields = {_PARAM_FIELDS[n] for n in _PARAM_FIELDS if _explicit(ctx, n)}
    for field in cfg.unused_fields(explicit_fields):
        log.warning(
            "[CLI] flag has no effect for this strategy",
            extra={"flag": _FIELD_FLAGS[field], "strategy": cfg.strategy.value},
        )
    return cfg


def _run_command() -> click.Command:
    group = typer.main.get_command(app)
    if not isinstance(group, click.Group):
        raise TypeError(
            f"expected a click.Group from typer, got {type(group).__module__}.{type(group).__qualname__}"
        )
    return group.commands["run"]


def parse_args(argv: Sequence[str]) -> ExperimentConfig:
    """Parse ``run`` arguments (without the subcommand name) into a config."""
    command = _run_command()
    with command.make_context("run", list(argv)) as ctx:
        return build_experiment_config(ctx)


def _fmt(value: float) -> str:
    return repr(float(value))


def render_args(cfg: ExperimentConfig) -> list[str]:
    """Flags that ``parse_args`` turns back into ``cfg``."""
    args = ["--env", cfg.env, "--strategy", cfg.strategy.value]
    for name, value in (("--tau", cfg.tau), ("--epsilon", cfg.epsilon), ("--budget", cfg.query_budget)):
        if value is not None:
            args += [name, _fmt(value)]
    args += [
        "--p-query", _fmt(cfg.p_query),
        "--hybrid-coin", _fmt(cfg.hybrid_coin),
        "--iterations", str(cfg.iterations),
        "--episodes", str(cfg.episodes_per_iteration),
        "--bootstrap-episodes", str(cfg.bootstrap_episodes),
        "--eval-trials", str(cfg.eval_trials),
        "--seed", str(cfg.seed),
        "--dropout", _fmt(cfg.dropout_rate),
        "--policy-hidden", ",".join(map(str, cfg.policy_hidden)),
        "--lossnet-hidden", ",".join(map(str, cfg.lossnet_hidden)),
    ]  # fmt: skip
    if cfg.horizon is not None:
        args += ["--horizon", str(cfg.horizon)]
    if cfg.out_dir is not None:
        args += ["--out", str(cfg.out_dir)]
    args.append("--match-supervised-budget" if cfg.match_supervised_budget else "--no-match-supervised-budget")
    for head, train_cfg in (("policy", cfg.policy_train), ("lossnet", cfg.lossnet_train)):
        args += [
            f"--{head}-lr", _fmt(train_cfg.learning_rate),
            f"--{head}-batch-size", str(train_cfg.batch_size),
            f"--{head}-epochs", str(train_cfg.max_epochs),
            f"--{head}-patience", str(train_cfg.patience),
            f"--{head}-momentum", _fmt(train_cfg.momentum),
        ]  # fmt: skip
    return args


@app.command()
def info() -> None:
    """
    Show effective settings.
    """
    settings = get_settings()
    typer.echo(
        f"results_dir={settings.results_dir} workers={settings.workers} seed={settings.default_seed} | "
        f"iterations={settings.iterations} episodes={settings.episodes_per_iteration} "
        f"eval_trials={settings.eval_trials} bootstrap={settings.bootstrap_episodes} "
        f"p_query={settings.p_query} | log_level={settings.log_level} json_logs={settings.json_logs}"
    )


@app.command("list")
def list_() -> None:
    """
    List strategies and environments.
    """
    strategies = [
        (name, resolve_strategy(name, tau=1.0, epsilon=1.0).description) for name in available_strategies()
    ]
    print_catalog(strategies, available_environments())


@app.command()
def run(
    ctx: typer.Context,
    config: Path | None = typer.Option(
        None,
        "--config",
        callback=_load_config_file,
        is_eager=True,
        help="File of 'key = value' lines; flags override file values.",
    ),
    manifest: Path | None = typer.Option(None, "--manifest", help="Re-run the config stored in a manifest."),
    env: str | None = typer.Option(None, "--env", click_type=click.Choice(available_environments())),
    strategy: str | None = typer.Option(None, "--strategy", click_type=click.Choice(available_strategies())),
    tau: float | None = typer.Option(None, "--tau", click_type=_POSITIVE, help="Loss threshold (classifier: label threshold)."),
    epsilon: float | None = typer.Option(None, "--epsilon", click_type=_POSITIVE, help="Gradient-norm threshold."),
    p_query: float | None = typer.Option(None, "--p-query", click_type=_UNIT, help="Random query probability."),
    hybrid_coin: float | None = typer.Option(None, "--hybrid-coin", click_type=_UNIT),
    iterations: int | None = typer.Option(None, "--iterations", click_type=_COUNT),
    episodes: int | None = typer.Option(None, "--episodes", click_type=_COUNT, help="Episodes per iteration."),
    horizon: int | None = typer.Option(None, "--horizon", click_type=_COUNT),
    bootstrap_episodes: int | None = typer.Option(None, "--bootstrap-episodes", click_type=_COUNT),
    eval_trials: int | None = typer.Option(None, "--eval-trials", click_type=click.IntRange(min=2)),
    seed: int | None = typer.Option(None, "--seed", click_type=click.IntRange(min=0)),
    budget: float | None = typer.Option(None, "--budget", click_type=_POSITIVE, help="Maximum expert queries."),
    out: Path | None = typer.Option(None, "--out", help="Results directory."),
    dropout: float | None = typer.Option(None, "--dropout", click_type=click.FloatRange(min=0.0, max=1.0, max_open=True)),
    policy_hidden: str | None = typer.Option(None, "--policy-hidden", callback=_hidden_callback),
    lossnet_hidden: str | None = typer.Option(None, "--lossnet-hidden", callback=_hidden_callback),
    match_supervised_budget: bool | None = typer.Option(None, "--match-supervised-budget/--no-match-supervised-budget"),
    policy_lr: float | None = typer.Option(None, "--policy-lr", click_type=_POSITIVE),
    policy_batch_size: int | None = typer.Option(None, "--policy-batch-size", click_type=_COUNT),
    policy_epochs: int | None = typer.Option(None, "--policy-epochs", click_type=_COUNT),
    policy_patience: int | None = typer.Option(None, "--policy-patience", click_type=click.IntRange(min=0)),
    policy_momentum: float | None = typer.Option(None, "--policy-momentum", click_type=click.FloatRange(min=0.0, max=1.0, max_open=True)),
    lossnet_lr: float | None = typer.Option(None, "--lossnet-lr", click_type=_POSITIVE),
    lossnet_batch_size: int | None = typer.Option(None, "--lossnet-batch-size", click_type=_COUNT),
    lossnet_epochs: int | None = typer.Option(None, "--lossnet-epochs", click_type=_COUNT),
    lossnet_patience: int | None = typer.Option(None, "--lossnet-patience", click_type=click.IntRange(min=0)),
    lossnet_momentum: float | None = typer.Option(None, "--lossnet-momentum", click_type=click.FloatRange(min=0.0, max=1.0, max_open=True)),
) -> None:
    """
    Run one experiment and write its artifacts.
    """
    settings = get_settings()
    configure_logging(level=settings.log_level, json_logs=settings.json_logs)
    cfg = build_experiment_config(ctx)
    results_dir = cfg.out_dir or settings.results_dir

    typer.echo(
        f"Running strategy='{cfg.strategy.value}' on env='{cfg.env}' "
        f"(iterations={cfg.iterations}, episodes={cfg.episodes_per_iteration}, seed={cfg.seed})."
    )
    outcome = execute_run(cfg, Path(results_dir))
    print_summary([summary_row(outcome)])
    typer.echo(f"Artifacts: {outcome.run_dir}")
    if outcome.status != "ok":
        raise typer.Exit(EXIT_RUN_FAILURE)


def _split_list(text: str) -> list[str]:
    return [part.strip() for part in text.split(",") if part.strip()]


@app.command()
def suite(
    env: str = typer.Option(..., "--env", click_type=click.Choice(available_environments())),
    strategies: str = typer.Option("all", "--strategies", "-s", help="Comma-separated strategy names, or 'all'."),
    seeds: str = typer.Option("0", "--seeds", help="Comma-separated seeds."),
    tau: float | None = typer.Option(None, "--tau", click_type=_POSITIVE),
    epsilon: float | None = typer.Option(None, "--epsilon", click_type=_POSITIVE),
    p_query: float | None = typer.Option(None, "--p-query", click_type=_UNIT),
    iterations: int | None = typer.Option(None, "--iterations", click_type=_COUNT),
    episodes: int | None = typer.Option(None, "--episodes", click_type=_COUNT),
    horizon: int | None = typer.Option(None, "--horizon", click_type=_COUNT),
    eval_trials: int | None = typer.Option(None, "--eval-trials", click_type=click.IntRange(min=2)),
    budget: float | None = typer.Option(None, "--budget", click_type=_POSITIVE),
    out: Path | None = typer.Option(None, "--out"),
    workers: int | None = typer.Option(None, "--workers", "-w", click_type=_COUNT),
    strict: bool = typer.Option(False, "--strict", help="Abort on the first failing run."),
) -> None:
    """
    Run several strategies and seeds and write a combined summary.
    """
    settings = get_settings()
    configure_logging(level=settings.log_level, json_logs=settings.json_logs)
    names = available_strategies() if strategies == "all" else _split_list(strategies)
    unknown = sorted(set(names) - set(available_strategies()))
    if unknown:
        raise typer.BadParameter(f"unknown strategies: {', '.join(unknown)}", param_hint="'--strategies'")
    try:
        seed_values = [int(s) for s in _split_list(seeds)]
    except ValueError as exc:
        raise typer.BadParameter(f"expected comma-separated integers, got {seeds!r}", param_hint="'--seeds'") from exc

    results_dir = Path(out) if out is not None else settings.results_dir
    try:
        configs = [
            ExperimentConfig(
                env=env,
                strategy=name,
                tau=tau,
                epsilon=epsilon,
                p_query=settings.p_query if p_query is None else p_query,
                iterations=iterations or settings.iterations,
                episodes_per_iteration=episodes or settings.episodes_per_iteration,
                horizon=horizon,
                bootstrap_episodes=settings.bootstrap_episodes,
                eval_trials=eval_trials or settings.eval_trials,
                query_budget=budget,
                seed=seed,
                out_dir=results_dir,
            )
            for seed in seed_values
            for name in names
        ]
    except ValidationError as exc:
        raise typer.BadParameter(str(exc)) from exc

    result = run_suite(
        SuiteConfig(
            configs=configs,
            results_dir=results_dir,
            workers=workers or settings.workers,
            failure_policy="strict" if strict else "tolerant",
            log_level=settings.log_level,
            json_logs=settings.json_logs,
        )
    )
    print_summary(result.rows)
    typer.echo(f"Summary: {result.summary_path}")
    if result.failures:
        raise typer.Exit(EXIT_RUN_FAILURE)


@app.command()
def calibrate(
    env: str = typer.Option(..., "--env", click_type=click.Choice(available_environments())),
    seed: int = typer.Option(0, "--seed", click_type=click.IntRange(min=0)),
    variant: LossVariant = typer.Option(LossVariant.REGRESSION, "--variant", help="Loss network variant."),
    episodes: int = typer.Option(10, "--episodes", click_type=_COUNT),
    bootstrap_episodes: int = typer.Option(5, "--bootstrap-episodes", click_type=_COUNT),
    horizon: int | None = typer.Option(None, "--horizon", click_type=_COUNT),
) -> None:
    """
    Suggest tau and epsilon from on-policy percentiles.
    """
    settings = get_settings()
    configure_logging(level=settings.log_level, json_logs=settings.json_logs)
    report = calibrate_thresholds(
        env,
        seed,
        LossVariant(variant),
        episodes=episodes,
        bootstrap_episodes=bootstrap_episodes,
        horizon=horizon,
        policy_train=TrainConfig(),
        lossnet_train=TrainConfig(),
    )
    print_calibration(report)


@app.command()
def replot(paths: list[Path] = typer.Argument(..., help="metrics.csv files to re-read.")) -> None:
    """
    Re-read metric CSVs and print their per-iteration series.
    """
    for path in paths:
        try:
            metrics = read_metrics_csv(Path(path))
        except (OSError, ValueError) as exc:
            raise typer.BadParameter(str(exc), param_hint="PATHS") from exc
        print_metrics(Path(path), metrics)


def _print_usage() -> None:
    command = typer.main.get_command(app)
    with click.Context(command, info_name="radgrad") as ctx:
        typer.echo(command.get_help(ctx), err=True)


def main(argv: Sequence[str] | None = None) -> int:
    """CLI entry point; returns the process exit code."""
    args = list(sys.argv[1:] if argv is None else argv)
    if not args:
        _print_usage()
        return EXIT_USAGE
    try:
        rv = app(args=args, prog_name="radgrad", standalone_mode=False)
    except click.UsageError as exc:
        exc.show()
        return EXIT_USAGE
    except (KeyboardInterrupt, click.exceptions.Abort):
        typer.echo("Cancelled by user.", err=True)
        return EXIT_INTERRUPTED
    except RadGradError as exc:
        log.error("[CLI] run failed", extra={"error": str(exc), "error_type": exc.__class__.__name__})
        typer.echo(f"Error: {exc}", err=True)
        return EXIT_RUN_FAILURE
    return rv if isinstance(rv, int) else EXIT_OK


if __name__ == "__main__":
    # Required for multiprocessing on Windows (spawn start method)
    # Without this guard, child processes will re-execute main()
    multiprocessing.freeze_support()
    sys.exit(main())
