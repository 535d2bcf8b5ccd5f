"""
Exception hierarchy for the RadGrad benchmark.

Errors subclass the closest builtin (``ValueError`` / ``RuntimeError``) so callers
that only know the standard library still catch them.
"""

from __future__ import annotations


class RadGradError(Exception):
    """Base class for all benchmark errors."""


class ShapeError(RadGradError, ValueError):
    """An array did not match the dimensions a network or environment expects."""

    def __init__(self, message: str, layer: int | None = None) -> None:
        self.layer = layer
        if layer is not None:
            message = f"layer {layer}: {message}"
        super().__init__(message)


class DivergenceError(RadGradError, RuntimeError):
    """Training produced a non-finite loss."""

    def __init__(self, epoch: int, loss: float, iteration: int | None = None) -> None:
        self.epoch = epoch
        self.loss = loss
        self.iteration = iteration
        where = f"epoch {epoch}"
        if iteration is not None:
            where = f"iteration {iteration}, {where}"
        super().__init__(f"Training diverged at {where} (loss={loss!r})")

    def at_iteration(self, iteration: int) -> DivergenceError:
        """Return a copy of this error annotated with the experiment iteration."""
        return DivergenceError(self.epoch, self.loss, iteration=iteration)


class ContractError(RadGradError, RuntimeError):
    """A caller broke an episodic or decision contract (e.g. step after done)."""


class ConfigurationError(RadGradError, ValueError):
    """An experiment or strategy was configured inconsistently."""


__all__ = [
    "ConfigurationError",
    "ContractError",
    "DivergenceError",
    "RadGradError",
    "ShapeError",
]
