"""
Percentile-based suggestions for the query thresholds tau and epsilon.

Threshold values tuned for one environment's reward and feature scales do not
transfer to another, so they are measured instead: bootstrap, fit, run one
always-query iteration, refit, then roll the refitted policy out and look at
the distribution of ``l_hat`` and of the loss-gradient norm over the states it
visits. The suggestions are the 70th percentiles, which makes each rule fire on
roughly the top 30% riskiest on-policy states.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from src.aggregation.dataset import Dataset, DemoRecord, RecordSource, aggregate
from src.aggregation.training import RetrainPlan, Snapshot, bootstrap, retrain
from src.environments import make_env
from src.environments.abstract import EpisodicEnvironment
from src.exceptions import ConfigurationError
from src.experiment.config import ExperimentConfig
from src.imitation.heads import (
    LOSSNET_HIDDEN,
    POLICY_HIDDEN,
    LossNet,
    LossVariant,
    Policy,
    build_lossnet,
    build_policy,
    loss_estimate,
    propose_action,
    risk_gradient_norm,
)
from src.nn.training import TrainConfig
from src.strategies import lossnet_variant_for
from src.utils.logging import get_logger
from src.utils.seeding import Stream, derive_seed, make_rng

log = get_logger(__name__)

PERCENTILES = (50, 70, 90)
SUGGESTION_PERCENTILE = 70
MIN_THRESHOLD = 1e-6
_PLACEHOLDER_TAU = 1.0


@dataclass(frozen=True)
class CalibrationReport:
    env: str
    seed: int
    variant: LossVariant
    samples: int
    l_hat: dict[int, float]
    grad_norm: dict[int, float]
    discrepancy: dict[int, float] = field(default_factory=dict)
    warnings: tuple[str, ...] = ()

    @property
    def tau(self) -> float:
        """Suggested query threshold on ``l_hat`` (regression loss net)."""
        return self.l_hat[SUGGESTION_PERCENTILE]

    @property
    def epsilon(self) -> float:
        return self.grad_norm[SUGGESTION_PERCENTILE]

    @property
    def label_tau(self) -> float | None:
        """Suggested classifier label threshold on ``||a* - a_hat||``."""
        return self.discrepancy.get(SUGGESTION_PERCENTILE)

    def config_tau(self) -> float:
        """The value ``ExperimentConfig.tau`` should take for this loss-net variant."""
        if self.variant is LossVariant.CLASSIFIER:
            return self.label_tau if self.label_tau is not None else self.tau
        return self.tau


def _percentiles(values: np.ndarray) -> dict[int, float]:
    return {p: float(v) for p, v in zip(PERCENTILES, np.percentile(values, PERCENTILES), strict=True)}


def _query_everywhere(
    env: EpisodicEnvironment, dataset: Dataset, policy: Policy, episodes: int, rng: np.random.Generator
) -> np.ndarray:
    """One always-query iteration; returns the observed ``||a* - a_hat||``."""
    discrepancies = []
    for _ in range(episodes):
        observation = env.reset(rng)
        while not env.done:
            proposed = propose_action(policy, observation)
            expert = env.expert_action()
            aggregate(dataset, DemoRecord(observation, proposed, expert, 1, RecordSource.QUERIED))
            discrepancies.append(float(np.linalg.norm(expert - proposed)))
            observation = env.step(expert).observation
    return np.asarray(discrepancies)


def _fit_heads(
    env: EpisodicEnvironment,
    variant: LossVariant,
    seed: int,
    episodes: int,
    bootstrap_episodes: int,
    policy_hidden: tuple[int, ...],
    lossnet_hidden: tuple[int, ...],
    dropout_rate: float,
    policy_train: TrainConfig,
    lossnet_train: TrainConfig,
) -> tuple[Policy, LossNet, np.ndarray]:
    spec = env.spec
    plan = RetrainPlan(derive_seed(seed, Stream.CALIBRATION), policy_train, lossnet_train)
    dataset = bootstrap(env, bootstrap_episodes, make_rng(seed, Stream.CALIBRATION, 0), split_seed=seed)
    policy = build_policy(
        spec.obs_dim, spec.action_dim, make_rng(seed, Stream.CALIBRATION, 1), policy_hidden, dropout_rate
    )
    first = retrain(dataset, policy, None, plan, 0)
    discrepancies = _query_everywhere(
        env, dataset, first.policy, episodes, make_rng(seed, Stream.CALIBRATION, 2)
    )
    label_tau = float(np.percentile(discrepancies, SUGGESTION_PERCENTILE))
    lossnet = build_lossnet(
        spec.obs_dim,
        spec.action_dim,
        variant,
        max(label_tau, MIN_THRESHOLD),
        make_rng(seed, Stream.CALIBRATION, 3),
        lossnet_hidden,
        dropout_rate,
    )
    second: Snapshot = retrain(dataset, first.policy, lossnet, plan, 1)
    assert second.lossnet is not None
    return second.policy, second.lossnet, discrepancies


def calibrate_thresholds(
    env: str,
    seed: int,
    variant: LossVariant = LossVariant.REGRESSION,
    *,
    episodes: int = 10,
    bootstrap_episodes: int = 5,
    horizon: int | None = None,
    policy_hidden: tuple[int, ...] = POLICY_HIDDEN,
    lossnet_hidden: tuple[int, ...] = LOSSNET_HIDDEN,
    dropout_rate: float = 0.2,
    policy_train: TrainConfig | None = None,
    lossnet_train: TrainConfig | None = None,
    policy: Policy | None = None,
    lossnet: LossNet | None = None,
) -> CalibrationReport:
    """
    Measure ``l_hat`` and gradient-norm percentiles over on-policy states.

    Passing both ``policy`` and ``lossnet`` skips the fitting phase and only
    measures the given heads. Passing just one of them is an error.
    """
    if (policy is None) != (lossnet is None):
        raise ValueError("policy and lossnet must be given together or not at all")
    environment = make_env(env, horizon)
    discrepancy: dict[int, float] = {}
    if policy is None or lossnet is None:
        policy, lossnet, observed = _fit_heads(
            environment,
            variant,
            seed,
            episodes,
            bootstrap_episodes,
            policy_hidden,
            lossnet_hidden,
            dropout_rate,
            policy_train or TrainConfig(),
            lossnet_train or TrainConfig(),
        )
        discrepancy = _percentiles(observed)

    rollout_rng = make_rng(seed, Stream.CALIBRATION, 4)
    l_hats, grads = [], []
    for _ in range(episodes):
        observation = environment.reset(rollout_rng)
        while not environment.done:
            proposed = propose_action(policy, observation)
            l_hats.append(loss_estimate(lossnet, observation, proposed))
            grads.append(risk_gradient_norm(lossnet, observation, proposed))
            observation = environment.step(proposed).observation

    warnings = []
    for name, values in (("l_hat", l_hats), ("grad_norm", grads)):
        if np.ptp(values) == 0.0:
            message = f"{name} is constant ({values[0]!r}) over {len(values)} on-policy states"
            warnings.append(message)
            log.warning("[CALIBRATE] degenerate distribution", extra={"detail": message})

    report = CalibrationReport(
        env=env,
        seed=seed,
        variant=lossnet.variant,
        samples=len(l_hats),
        l_hat=_percentiles(np.asarray(l_hats)),
        grad_norm=_percentiles(np.asarray(grads)),
        discrepancy=discrepancy,
        warnings=tuple(warnings),
    )
    log.info(
        "[CALIBRATE] thresholds suggested",
        extra={"env": env, "seed": seed, "tau": report.tau, "epsilon": report.epsilon, "label_tau": report.label_tau},
    )
    return report


def with_calibrated_thresholds(cfg: ExperimentConfig) -> tuple[ExperimentConfig, list[str]]:
    """Fill the thresholds ``cfg`` needs but lacks; returns the names filled in."""
    missing = cfg.missing_thresholds()
    if not missing:
        return cfg, []
    variant = lossnet_variant_for(cfg.strategy)
    if variant is None:
        raise ConfigurationError(f"strategy '{cfg.strategy}' cannot be calibrated")
    report = calibrate_thresholds(
        cfg.env,
        cfg.seed,
        variant,
        episodes=cfg.episodes_per_iteration,
        bootstrap_episodes=cfg.bootstrap_episodes,
        horizon=cfg.horizon,
        policy_hidden=cfg.policy_hidden,
        lossnet_hidden=cfg.lossnet_hidden,
        dropout_rate=cfg.dropout_rate,
        policy_train=cfg.policy_train,
        lossnet_train=cfg.lossnet_train,
    )
    suggested = {"tau": report.config_tau(), "epsilon": report.epsilon}
    update = {}
    for name in missing:
        value = suggested[name]
        if value < MIN_THRESHOLD:
            log.warning(
                "[CALIBRATE] suggestion below floor, clamped",
                extra={"threshold": name, "suggested": value, "floor": MIN_THRESHOLD},
            )
            value = MIN_THRESHOLD
        update[name] = value
    return cfg.model_copy(update=update), missing


__all__ = [
    "PERCENTILES",
    "SUGGESTION_PERCENTILE",
    "CalibrationReport",
    "calibrate_thresholds",
    "with_calibrated_thresholds",
]
