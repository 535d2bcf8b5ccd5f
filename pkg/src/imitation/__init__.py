from src.imitation.heads import (
    CLASSIFIER_QUERY_PROBABILITY,
    LOSSNET_HIDDEN,
    POLICY_HIDDEN,
    LossNet,
    LossVariant,
    Policy,
    build_lossnet,
    build_policy,
    fit_lossnet,
    fit_policy,
    loss_estimate,
    loss_estimates,
    propose_action,
    risk_gradient_norm,
)

__all__ = [
    "CLASSIFIER_QUERY_PROBABILITY",
    "LOSSNET_HIDDEN",
    "POLICY_HIDDEN",
    "LossNet",
    "LossVariant",
    "Policy",
    "build_lossnet",
    "build_policy",
    "fit_lossnet",
    "fit_policy",
    "loss_estimate",
    "loss_estimates",
    "propose_action",
    "risk_gradient_norm",
]
