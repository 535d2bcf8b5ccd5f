"""
Feed-forward network with reverse-mode gradients to parameters and inputs.

The network is a plain stack of affine layers with ``tanh`` between them and an
identity (regression) or logistic (probability) output. ``forward`` accepts a
single vector or a ``(batch, dim)`` matrix and returns an ``ActivationCache``
that is enough for both backward passes:

    out, cache = forward(net, x)
    grads = backward_params(net, cache, np.ones_like(out))
    dx = input_gradient(net, x, l2_norm_head).value

Parameters are stored read-only; an ``Mlp`` never changes after construction.
"""

from __future__ import annotations

from collections.abc import Sequence
from dataclasses import dataclass, field
from typing import Literal, NamedTuple, Protocol

import numpy as np

from src.exceptions import ContractError, ShapeError

OutputActivation = Literal["identity", "logistic"]
Mode = Literal["train", "eval"]

FloatArray = np.ndarray


def _frozen(array: np.ndarray) -> np.ndarray:
    out = np.array(array, dtype=np.float64, copy=True)
    out.setflags(write=False)
    return out


def logistic(z: np.ndarray) -> np.ndarray:
    # tanh form avoids overflow in exp for large |z|
    return 0.5 * (1.0 + np.tanh(0.5 * z))


@dataclass(frozen=True)
class Mlp:
    """Weights, biases and dropout of one feed-forward network."""

    layer_sizes: tuple[int, ...]
    weights: tuple[np.ndarray, ...]
    biases: tuple[np.ndarray, ...]
    dropout_rate: float = 0.0
    output_activation: OutputActivation = "identity"

    def __post_init__(self) -> None:
        sizes = tuple(int(s) for s in self.layer_sizes)
        if len(sizes) < 2 or any(s <= 0 for s in sizes):
            raise ShapeError(f"layer_sizes must hold at least two positive ints, got {sizes}")
        if len(self.weights) != len(sizes) - 1 or len(self.biases) != len(sizes) - 1:
            raise ShapeError(
                f"expected {len(sizes) - 1} weight/bias pairs, "
                f"got {len(self.weights)}/{len(self.biases)}"
            )
        if not 0.0 <= self.dropout_rate < 1.0:
            raise ValueError(f"dropout_rate must lie in [0, 1), got {self.dropout_rate}")
        if self.output_activation not in ("identity", "logistic"):
            raise ValueError(f"unknown output activation {self.output_activation!r}")

        weights = tuple(_frozen(w) for w in self.weights)
        biases = tuple(_frozen(b) for b in self.biases)
        for k, (w, b) in enumerate(zip(weights, biases, strict=True)):
            expected = (sizes[k + 1], sizes[k])
            if w.shape != expected:
                raise ShapeError(f"weight shape {w.shape} != {expected}", layer=k)
            if b.shape != (sizes[k + 1],):
                raise ShapeError(f"bias shape {b.shape} != {(sizes[k + 1],)}", layer=k)
        object.__setattr__(self, "layer_sizes", sizes)
        object.__setattr__(self, "weights", weights)
        object.__setattr__(self, "biases", biases)

    @property
    def input_dim(self) -> int:
        return self.layer_sizes[0]

    @property
    def output_dim(self) -> int:
        return self.layer_sizes[-1]

    @property
    def n_layers(self) -> int:
        return len(self.weights)

    def with_parameters(
        self, weights: Sequence[np.ndarray], biases: Sequence[np.ndarray]
    ) -> Mlp:
        return Mlp(
            layer_sizes=self.layer_sizes,
            weights=tuple(weights),
            biases=tuple(biases),
            dropout_rate=self.dropout_rate,
            output_activation=self.output_activation,
        )

    def parameter_count(self) -> int:
        return sum(w.size + b.size for w, b in zip(self.weights, self.biases, strict=True))


def init_mlp(
    layer_sizes: Sequence[int],
    rng: np.random.Generator,
    dropout_rate: float = 0.0,
    output_activation: OutputActivation = "identity",
) -> Mlp:
    """Glorot-uniform weights in +-sqrt(6 / (fan_in + fan_out)), zero biases."""
    sizes = tuple(int(s) for s in layer_sizes)
    weights = []
    biases = []
    for fan_in, fan_out in zip(sizes[:-1], sizes[1:], strict=True):
        limit = np.sqrt(6.0 / (fan_in + fan_out))
        weights.append(rng.uniform(-limit, limit, size=(fan_out, fan_in)))
        biases.append(np.zeros(fan_out))
    return Mlp(sizes, tuple(weights), tuple(biases), dropout_rate, output_activation)


def zeros_mlp(
    layer_sizes: Sequence[int],
    dropout_rate: float = 0.0,
    output_activation: OutputActivation = "identity",
) -> Mlp:
    sizes = tuple(int(s) for s in layer_sizes)
    weights = tuple(np.zeros((o, i)) for i, o in zip(sizes[:-1], sizes[1:], strict=True))
    biases = tuple(np.zeros(o) for o in sizes[1:])
    return Mlp(sizes, weights, biases, dropout_rate, output_activation)


@dataclass
class ActivationCache:
    """Everything the backward passes need from one forward pass (batched)."""

    layer_sizes: tuple[int, ...]
    layer_inputs: list[np.ndarray] = field(default_factory=list)
    hidden: list[np.ndarray] = field(default_factory=list)
    masks: list[np.ndarray | None] = field(default_factory=list)
    pre_output: np.ndarray | None = None
    output: np.ndarray | None = None
    single: bool = False


def _as_batch(net_input: np.ndarray, expected: int) -> tuple[np.ndarray, bool]:
    x = np.asarray(net_input, dtype=np.float64)
    single = x.ndim == 1
    if single:
        x = x[None, :]
    if x.ndim != 2 or x.shape[1] != expected:
        raise ShapeError(f"input has shape {np.shape(net_input)}, expected (..., {expected})", layer=0)
    return x, single


def _forward_raw(
    weights: Sequence[np.ndarray],
    biases: Sequence[np.ndarray],
    layer_sizes: tuple[int, ...],
    dropout_rate: float,
    output_activation: OutputActivation,
    x: np.ndarray,
    mode: Mode,
    rng: np.random.Generator | None,
) -> ActivationCache:
    use_dropout = mode == "train" and dropout_rate > 0.0
    if use_dropout and rng is None:
        raise ContractError("a random stream is required for training-mode dropout")

    cache = ActivationCache(layer_sizes=layer_sizes)
    activation = x
    last = len(weights) - 1
    for k, (w, b) in enumerate(zip(weights, biases, strict=True)):
        cache.layer_inputs.append(activation)
        z = activation @ w.T + b
        if k == last:
            cache.pre_output = z
            cache.output = logistic(z) if output_activation == "logistic" else z
            break
        h = np.tanh(z)
        cache.hidden.append(h)
        if use_dropout:
            assert rng is not None
            keep = rng.random(h.shape) >= dropout_rate
            mask = keep / (1.0 - dropout_rate)
            cache.masks.append(mask)
            activation = h * mask
        else:
            cache.masks.append(None)
            activation = h
    return cache


def forward(
    net: Mlp,
    net_input: np.ndarray,
    mode: Mode = "eval",
    rng: np.random.Generator | None = None,
) -> tuple[np.ndarray, ActivationCache]:
    """
    Run the network on one vector or a batch of row vectors.

    Evaluation mode is a pure function of ``(net, net_input)``; training mode
    applies inverted dropout to hidden activations and needs ``rng`` when the
    dropout rate is positive.
    """
    x, single = _as_batch(net_input, net.input_dim)
    cache = _forward_raw(
        net.weights,
        net.biases,
        net.layer_sizes,
        net.dropout_rate,
        net.output_activation,
        x,
        mode,
        rng,
    )
    cache.single = single
    assert cache.output is not None
    return (cache.output[0] if single else cache.output), cache


class ParameterGradients(NamedTuple):
    weights: list[np.ndarray]
    biases: list[np.ndarray]


def _backward_raw(
    weights: Sequence[np.ndarray],
    cache: ActivationCache,
    grad_pre_output: np.ndarray,
) -> tuple[list[np.ndarray], list[np.ndarray], np.ndarray]:
    """Backpropagate a gradient w.r.t. the output pre-activation (batch summed)."""
    n = len(weights)
    d_weights: list[np.ndarray] = [np.empty(0)] * n
    d_biases: list[np.ndarray] = [np.empty(0)] * n
    g = grad_pre_output
    d_input = g
    for k in range(n - 1, -1, -1):
        d_weights[k] = g.T @ cache.layer_inputs[k]
        d_biases[k] = g.sum(axis=0)
        upstream = g @ weights[k]
        if k == 0:
            d_input = upstream
            break
        mask = cache.masks[k - 1]
        if mask is not None:
            upstream = upstream * mask
        h = cache.hidden[k - 1]
        g = upstream * (1.0 - h * h)
    return d_weights, d_biases, d_input


def _output_to_pre_activation(
    output_activation: OutputActivation, cache: ActivationCache, output_grad: np.ndarray
) -> np.ndarray:
    if output_activation == "logistic":
        assert cache.output is not None
        p = cache.output
        return output_grad * p * (1.0 - p)
    return output_grad


def _check_cache(net: Mlp, cache: ActivationCache) -> None:
    if cache.layer_sizes != net.layer_sizes or len(cache.layer_inputs) != net.n_layers:
        raise ShapeError(
            f"activation cache for layers {cache.layer_sizes} does not match net {net.layer_sizes}"
        )


def backward_params(
    net: Mlp, cache: ActivationCache, output_grad: np.ndarray
) -> ParameterGradients:
    """Gradients of ``sum(output * output_grad)`` w.r.t. every weight and bias."""
    _check_cache(net, cache)
    g = np.asarray(output_grad, dtype=np.float64)
    if cache.single and g.ndim == 1:
        g = g[None, :]
    assert cache.output is not None
    if g.shape != cache.output.shape:
        raise ShapeError(
            f"output gradient shape {np.shape(output_grad)} does not match output "
            f"{cache.output.shape}",
            layer=net.n_layers - 1,
        )
    g = _output_to_pre_activation(net.output_activation, cache, g)
    d_weights, d_biases, _ = _backward_raw(net.weights, cache, g)
    return ParameterGradients(d_weights, d_biases)


class HeadValue(NamedTuple):
    value: float
    grad: np.ndarray | None  # None where the scalarization is not differentiable


class ScalarHead(Protocol):
    """Maps a network output vector to the scalar whose input gradient is taken."""

    def __call__(self, output: np.ndarray) -> HeadValue: ...


def identity_head(output: np.ndarray) -> HeadValue:
    if output.shape != (1,):
        raise ShapeError(f"identity head needs a scalar output, got shape {output.shape}")
    return HeadValue(float(output[0]), np.ones(1))


def l2_norm_head(output: np.ndarray) -> HeadValue:
    norm = float(np.linalg.norm(output))
    if norm == 0.0:
        return HeadValue(0.0, None)
    return HeadValue(norm, output / norm)


class InputGradient(NamedTuple):
    value: np.ndarray
    degenerate: bool  # head undefined at this point; value is the zero vector


def input_gradient(net: Mlp, net_input: np.ndarray, head: ScalarHead) -> InputGradient:
    """``d head(net(x)) / dx`` in evaluation mode, for a single input vector."""
    x = np.asarray(net_input, dtype=np.float64)
    if x.ndim != 1:
        raise ShapeError(f"input_gradient takes one vector, got shape {x.shape}", layer=0)
    output, cache = forward(net, x, mode="eval")
    scalar = head(output)
    if scalar.grad is None:
        return InputGradient(np.zeros_like(x), True)
    g = _output_to_pre_activation(net.output_activation, cache, scalar.grad[None, :])
    _, _, d_input = _backward_raw(net.weights, cache, g)
    return InputGradient(d_input[0], False)


__all__ = [
    "ActivationCache",
    "HeadValue",
    "InputGradient",
    "Mlp",
    "OutputActivation",
    "ParameterGradients",
    "ScalarHead",
    "backward_params",
    "forward",
    "identity_head",
    "init_mlp",
    "input_gradient",
    "l2_norm_head",
    "logistic",
    "zeros_mlp",
]
