"""
Minibatch SGD with momentum and validation-based early stopping.

``train`` never mutates the network it is given. It returns the parameter
snapshot with the lowest validation loss (or the last epoch's parameters when
the validation set is empty) together with the per-epoch loss histories.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Literal

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, model_validator

from src.exceptions import DivergenceError, ShapeError
from src.nn.mlp import (
    ActivationCache,
    Mlp,
    OutputActivation,
    _backward_raw,
    _forward_raw,
    forward,
)
from src.utils.logging import get_logger

log = get_logger(__name__)

Objective = Literal["regression", "binary"]
Dataset = tuple[np.ndarray, np.ndarray]

UINT64_MAX = 2**64 - 1


class TrainConfig(BaseModel):
    """Optimizer and stopping settings for one network fit."""

    model_config = ConfigDict(frozen=True, extra="forbid")

    learning_rate: float = Field(1e-3, gt=0)
    batch_size: int = Field(64, gt=0)
    max_epochs: int = Field(200, gt=0)
    patience: int = Field(20, ge=0)
    momentum: float = Field(0.9, ge=0, lt=1)
    seed: int = Field(0, ge=0, le=UINT64_MAX)

    @model_validator(mode="after")
    def _patience_below_epochs(self) -> TrainConfig:
        if self.patience >= self.max_epochs:
            raise ValueError(
                f"patience ({self.patience}) must be smaller than max_epochs ({self.max_epochs})"
            )
        return self


@dataclass
class TrainResult:
    net: Mlp
    val_loss_history: list[float] = field(default_factory=list)
    train_loss_history: list[float] = field(default_factory=list)
    best_epoch: int = 0

    @property
    def best_val_loss(self) -> float | None:
        return min(self.val_loss_history) if self.val_loss_history else None


def _loss_and_pre_grad(
    cache: ActivationCache,
    targets: np.ndarray,
    objective: Objective,
    output_activation: OutputActivation,
) -> tuple[float, np.ndarray]:
    """Mean loss over all output entries and its gradient w.r.t. the output pre-activation."""
    assert cache.output is not None and cache.pre_output is not None
    if objective == "binary":
        z = cache.pre_output
        loss = float(np.mean(np.logaddexp(0.0, z) - targets * z))
        return loss, (cache.output - targets) / z.size
    y = cache.output
    diff = y - targets
    loss = float(np.mean(diff * diff))
    grad = 2.0 * diff / y.size
    if output_activation == "logistic":
        grad = grad * y * (1.0 - y)
    return loss, grad


def evaluate_loss(net: Mlp, inputs: np.ndarray, targets: np.ndarray, objective: Objective) -> float:
    """Evaluation-mode objective value of ``net`` on a dataset."""
    if objective == "binary" and net.output_activation != "logistic":
        raise ValueError("binary objective needs a logistic output head")
    x, y = _check_dataset(net, (inputs, targets), "eval")
    _, cache = forward(net, x, mode="eval")
    loss, _ = _loss_and_pre_grad(cache, y, objective, net.output_activation)
    return loss


def _check_dataset(net: Mlp, data: Dataset, name: str) -> tuple[np.ndarray, np.ndarray]:
    inputs = np.asarray(data[0], dtype=np.float64)
    targets = np.asarray(data[1], dtype=np.float64)
    if inputs.ndim != 2 or inputs.shape[1] != net.input_dim:
        raise ShapeError(f"{name} inputs have shape {inputs.shape}, expected (n, {net.input_dim})", layer=0)
    if targets.ndim == 1 and net.output_dim == 1:
        targets = targets[:, None]
    if targets.shape != (inputs.shape[0], net.output_dim):
        raise ShapeError(
            f"{name} targets have shape {targets.shape}, expected ({inputs.shape[0]}, {net.output_dim})",
            layer=net.n_layers - 1,
        )
    return inputs, targets


def train(
    net: Mlp,
    train_set: Dataset,
    val_set: Dataset | None,
    objective: Objective,
    cfg: TrainConfig,
) -> TrainResult:
    """
    Fit ``net`` on ``train_set`` and keep the best validation snapshot.

    Regression minimizes mean squared error; binary minimizes log-loss and needs
    a logistic head. Raises ``DivergenceError`` on the first non-finite loss.
    """
    if objective == "binary" and net.output_activation != "logistic":
        raise ValueError("binary objective needs a logistic output head")
    if len(train_set[0]) == 0:
        raise ValueError("train_set must not be empty")
    x_train, y_train = _check_dataset(net, train_set, "train")
    n = x_train.shape[0]
    has_val = val_set is not None and len(val_set[0]) > 0
    if has_val:
        assert val_set is not None
        x_val, y_val = _check_dataset(net, val_set, "val")

    rng = np.random.default_rng(cfg.seed)
    weights = [w.copy() for w in net.weights]
    biases = [b.copy() for b in net.biases]
    v_weights = [np.zeros_like(w) for w in weights]
    v_biases = [np.zeros_like(b) for b in biases]
    batch_size = min(cfg.batch_size, n)

    result = TrainResult(net=net)
    best_weights, best_biases = weights, biases
    best_val = np.inf
    stale = 0

    for epoch in range(1, cfg.max_epochs + 1):
        order = rng.permutation(n)
        total = 0.0
        for start in range(0, n, batch_size):
            idx = order[start : start + batch_size]
            cache = _forward_raw(
                weights,
                biases,
                net.layer_sizes,
                net.dropout_rate,
                net.output_activation,
                x_train[idx],
                "train",
                rng,
            )
            loss, grad = _loss_and_pre_grad(
                cache, y_train[idx], objective, net.output_activation
            )
            if not np.isfinite(loss):
                raise DivergenceError(epoch, loss)
            d_weights, d_biases, _ = _backward_raw(weights, cache, grad)
            for k in range(len(weights)):
                v_weights[k] = cfg.momentum * v_weights[k] - cfg.learning_rate * d_weights[k]
                v_biases[k] = cfg.momentum * v_biases[k] - cfg.learning_rate * d_biases[k]
                weights[k] = weights[k] + v_weights[k]
                biases[k] = biases[k] + v_biases[k]
            total += loss * len(idx)
        result.train_loss_history.append(total / n)

        if not has_val:
            continue

        val_cache = _forward_raw(
            weights,
            biases,
            net.layer_sizes,
            net.dropout_rate,
            net.output_activation,
            x_val,
            "eval",
            None,
        )
        val_loss, _ = _loss_and_pre_grad(val_cache, y_val, objective, net.output_activation)
        if not np.isfinite(val_loss):
            raise DivergenceError(epoch, val_loss)
        result.val_loss_history.append(val_loss)
        if val_loss < best_val:
            best_val = val_loss
            best_weights = [w.copy() for w in weights]
            best_biases = [b.copy() for b in biases]
            result.best_epoch = epoch
            stale = 0
        else:
            stale += 1
            if stale > cfg.patience:
                break

    if has_val:
        result.net = net.with_parameters(best_weights, best_biases)
    else:
        result.net = net.with_parameters(weights, biases)
        result.best_epoch = len(result.train_loss_history)

    log.debug(
        "[TRAIN] finished",
        extra={
            "objective": objective,
            "samples": n,
            "epochs": len(result.train_loss_history),
            "best_epoch": result.best_epoch,
            "best_val_loss": result.best_val_loss,
        },
    )
    return result


__all__ = ["Objective", "TrainConfig", "TrainResult", "evaluate_loss", "train"]
