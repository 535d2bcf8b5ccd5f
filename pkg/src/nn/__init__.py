"""
Minimal numpy neural-network core: forward/backward passes, input gradients and SGD training.
"""

from src.nn.mlp import (
    ActivationCache,
    InputGradient,
    Mlp,
    ParameterGradients,
    backward_params,
    forward,
    identity_head,
    init_mlp,
    input_gradient,
    l2_norm_head,
    zeros_mlp,
)
from src.nn.training import Objective, TrainConfig, TrainResult, evaluate_loss, train

__all__ = [
    "ActivationCache",
    "InputGradient",
    "Mlp",
    "Objective",
    "ParameterGradients",
    "TrainConfig",
    "TrainResult",
    "backward_params",
    "evaluate_loss",
    "forward",
    "identity_head",
    "init_mlp",
    "input_gradient",
    "l2_norm_head",
    "train",
    "zeros_mlp",
]
