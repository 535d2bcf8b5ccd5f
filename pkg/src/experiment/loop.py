"""
The query-gated aggregation loop.

    bootstrap expert demonstrations, fit policy_0 and lossnet_0
    for k in 1..M:
        for each of N episodes (T steps or until early termination):
            a_hat = policy(s); verdict = strategy(lossnet, s, a_hat)
            if queried: a* = expert(s); execute a*; aggregate (s, a_hat, a*)
            else: execute a_hat
        refit both heads on the whole dataset; evaluate; snapshot
    return the snapshot with the lowest policy validation loss

Every random choice draws from a named stream of the experiment seed, so a
config reproduces its metrics exactly.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from src.aggregation.dataset import Dataset, DemoRecord, RecordSource, aggregate
from src.aggregation.training import RetrainPlan, Snapshot, bootstrap, retrain, select_best
from src.environments import make_env
from src.environments.abstract import EpisodicEnvironment
from src.environments.rollout import expert_policy
from src.exceptions import ConfigurationError, DivergenceError
from src.experiment.config import ExperimentConfig
from src.experiment.metrics import EvalStats, IterationMetrics, evaluate, loss_vs_expert
from src.imitation.heads import LossNet, Policy, build_lossnet, build_policy, propose_action
from src.strategies import (
    FiredRule,
    QueryDecision,
    QueryStrategy,
    QueryStreams,
    StrategyKind,
    execute_choice,
    lossnet_variant_for,
    resolve_strategy,
    should_query,
)
from src.utils.logging import get_logger
from src.utils.seeding import Stream, make_rng

log = get_logger(__name__)

_BUDGET_HOLD = QueryDecision(query=False, fired_rule=FiredRule.NONE)


@dataclass(frozen=True)
class DecisionLogEntry:
    """One timestep's verdict; the loss net that made it is ``snapshots[iteration - 1]``."""

    iteration: int
    episode: int
    step: int
    observation: np.ndarray
    proposed_action: np.ndarray
    decision: QueryDecision
    budget_hold: bool = False


@dataclass
class ExperimentResult:
    config: ExperimentConfig
    best: Snapshot
    metrics: list[IterationMetrics]
    expert: EvalStats
    dataset: Dataset
    snapshots: list[Snapshot] = field(default_factory=list)
    decisions: list[DecisionLogEntry] = field(default_factory=list)
    budget_exhausted_at: int | None = None

    @property
    def final(self) -> IterationMetrics:
        return self.metrics[-1]


def _initial_heads(cfg: ExperimentConfig, env: EpisodicEnvironment) -> tuple[Policy, LossNet | None]:
    spec = env.spec
    policy = build_policy(
        spec.obs_dim,
        spec.action_dim,
        make_rng(cfg.seed, Stream.POLICY_INIT, 0),
        cfg.policy_hidden,
        cfg.dropout_rate,
    )
    variant = lossnet_variant_for(cfg.strategy)
    if variant is None:
        return policy, None
    assert cfg.tau is not None
    lossnet = build_lossnet(
        spec.obs_dim,
        spec.action_dim,
        variant,
        cfg.tau,
        make_rng(cfg.seed, Stream.LOSSNET_INIT, 0),
        cfg.lossnet_hidden,
        cfg.dropout_rate,
    )
    return policy, lossnet


class _Run:
    """Mutable state of one experiment; ``run_experiment`` is the public entry point."""

    def __init__(self, cfg: ExperimentConfig) -> None:
        missing = cfg.missing_thresholds()
        if missing:
            raise ConfigurationError(
                f"strategy '{cfg.strategy}' needs {', '.join(missing)}; set them or calibrate first"
            )
        self.cfg = cfg
        self.env = make_env(cfg.env, cfg.horizon)
        self.strategy: QueryStrategy = resolve_strategy(
            cfg.strategy, cfg.tau, cfg.epsilon, cfg.p_query, cfg.hybrid_coin
        )
        self.plan = RetrainPlan(cfg.seed, cfg.policy_train, cfg.lossnet_train)
        self.queries = 0
        self.decisions: list[DecisionLogEntry] = []
        self.budget_exhausted_at: int | None = None

    def _bootstrap_episodes(self) -> int:
        cfg = self.cfg
        if cfg.strategy is StrategyKind.SUPERVISED and cfg.match_supervised_budget:
            return cfg.bootstrap_episodes + cfg.iterations * cfg.episodes_per_iteration
        return cfg.bootstrap_episodes

    def _budget_left(self) -> bool:
        budget = self.cfg.query_budget
        return budget is None or self.queries < budget

    def _episode(self, dataset: Dataset, snapshot: Snapshot, iteration: int, episode: int) -> None:
        cfg, env = self.cfg, self.env
        streams = QueryStreams(
            query=make_rng(cfg.seed, Stream.QUERY, iteration, episode),
            coin=make_rng(cfg.seed, Stream.COIN, iteration, episode),
        )
        observation = env.reset(make_rng(cfg.seed, Stream.ROLLOUT, iteration, episode))
        step = 0
        while not env.done:
            proposed = propose_action(snapshot.policy, observation)
            hold = not self._budget_left()
            if hold:
                if self.budget_exhausted_at is None:
                    self.budget_exhausted_at = iteration
                    log.warning(
                        "[BUDGET] exhausted, querying stops",
                        extra={"iteration": iteration, "queries": self.queries},
                    )
                decision = _BUDGET_HOLD
            else:
                decision = should_query(self.strategy, snapshot.lossnet, observation, proposed, streams)
            expert = None
            if decision.query:
                expert = env.expert_action()
                aggregate(
                    dataset,
                    DemoRecord(observation, proposed, expert, iteration, RecordSource.QUERIED),
                )
                self.queries += 1
            self.decisions.append(
                DecisionLogEntry(iteration, episode, step, observation, proposed, decision, hold)
            )
            observation = env.step(execute_choice(decision, proposed, expert)).observation
            step += 1

    def _retrain(self, dataset: Dataset, previous: Snapshot, iteration: int) -> Snapshot:
        try:
            return retrain(dataset, previous.policy, previous.lossnet, self.plan, iteration)
        except DivergenceError as exc:
            raise exc.at_iteration(iteration) from exc

    def run(self) -> ExperimentResult:
        cfg, env = self.cfg, self.env
        log.info(
            "[EXPERIMENT START]",
            extra={"run": cfg.run_name, "iterations": cfg.iterations, "horizon": env.spec.max_steps},
        )
        expert = evaluate(expert_policy(env), env, cfg.eval_trials, make_rng(cfg.seed, Stream.EVAL))

        dataset = bootstrap(
            env, self._bootstrap_episodes(), make_rng(cfg.seed, Stream.BOOTSTRAP), split_seed=cfg.seed
        )
        self.queries = len(dataset)
        if cfg.query_budget is not None and self.queries >= cfg.query_budget:
            log.warning(
                "[BUDGET] bootstrap alone meets the budget",
                extra={"bootstrap": self.queries, "budget": cfg.query_budget},
            )

        policy, lossnet = _initial_heads(cfg, env)
        current = self._retrain(dataset, Snapshot(0, policy, lossnet, None), 0)
        snapshots: list[Snapshot] = [current]
        metrics: list[IterationMetrics] = []

        for iteration in range(1, cfg.iterations + 1):
            before = self.queries
            for episode in range(cfg.episodes_per_iteration):
                self._episode(dataset, current, iteration, episode)
            current = self._retrain(dataset, current, iteration)
            snapshots.append(current)

            agent = evaluate(current.policy, env, cfg.eval_trials, make_rng(cfg.seed, Stream.EVAL))
            metrics.append(
                IterationMetrics(
                    iteration=iteration,
                    mean_loss_vs_expert=loss_vs_expert(agent.mean, expert.mean),
                    loss_std=agent.std,
                    cumulative_queries=self.queries,
                )
            )
            log.info(
                "[ITERATION] evaluated",
                extra={
                    "run": cfg.run_name,
                    "iteration": iteration,
                    "new_queries": self.queries - before,
                    "cumulative_queries": self.queries,
                    "loss": metrics[-1].mean_loss_vs_expert,
                    "loss_std": agent.std,
                },
            )

        best = select_best(snapshots)
        log.info(
            "[EXPERIMENT COMPLETE]",
            extra={"run": cfg.run_name, "best_iteration": best.iteration, "queries": self.queries},
        )
        return ExperimentResult(
            config=cfg,
            best=best,
            metrics=metrics,
            expert=expert,
            dataset=dataset,
            snapshots=snapshots,
            decisions=self.decisions,
            budget_exhausted_at=self.budget_exhausted_at,
        )


def run_experiment(cfg: ExperimentConfig) -> ExperimentResult:
    """Run one configuration end to end; thresholds it needs must already be set."""
    return _Run(cfg).run()


__all__ = ["DecisionLogEntry", "ExperimentResult", "run_experiment"]
