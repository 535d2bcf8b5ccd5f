"""
CliffCorridor: drive a point mass forward down a corridor without leaving it.

State ``[lateral_pos, heading, speed, half_width, forward_pos]``. Leaving the
corridor ends the episode immediately with a failure penalty, so small policy
errors compound into lost reward, the same pressure early termination puts on
a hopping robot.
"""

from __future__ import annotations

from dataclasses import replace

import numpy as np

from src.environments.abstract import EnvSpec, EpisodicEnvironment

DT = 0.1
HORIZON = 200
TURN_RATE = 1.5
ACCELERATION = 1.0
DRAG = 0.5
MAX_SPEED = 2.0
CRUISE_SPEED = 1.0
CRUISE_THRUST = DRAG * CRUISE_SPEED / ACCELERATION
FAILURE_PENALTY = 10.0
LATERAL_COST = 0.05
HALF_WIDTH_RANGE = (0.8, 1.2)
START_LATERAL_FRACTION = 0.25
START_HEADING = 0.2
START_SPEED_RANGE = (0.8, 1.2)
CORRIDOR_LENGTH = CRUISE_SPEED * DT * HORIZON

# expert gains
LATERAL_P = 1.5
LATERAL_D = 0.3
MAX_HEADING = 0.6
STEER_GAIN = 2.0
SPEED_GAIN = 1.0

_MAX_STEP_PROGRESS = MAX_SPEED * DT
_MAX_LATERAL = HALF_WIDTH_RANGE[1] + _MAX_STEP_PROGRESS

CLIFF_CORRIDOR_SPEC = EnvSpec(
    name="cliffcorridor",
    obs_dim=6,
    action_dim=2,
    max_steps=HORIZON,
    action_low=(-1.0, -1.0),
    action_high=(1.0, 1.0),
    reward_range=(
        -FAILURE_PENALTY - _MAX_STEP_PROGRESS - LATERAL_COST * _MAX_LATERAL,
        _MAX_STEP_PROGRESS,
    ),
)


class CliffCorridor(EpisodicEnvironment):
    def __init__(self, horizon: int | None = None) -> None:
        spec = CLIFF_CORRIDOR_SPEC
        if horizon is not None:
            spec = replace(spec, max_steps=horizon)
        super().__init__(spec)

    def _sample_initial_state(self, rng: np.random.Generator) -> np.ndarray:
        half_width = rng.uniform(*HALF_WIDTH_RANGE)
        lateral = rng.uniform(-START_LATERAL_FRACTION, START_LATERAL_FRACTION) * half_width
        heading = rng.uniform(-START_HEADING, START_HEADING)
        speed = rng.uniform(*START_SPEED_RANGE)
        return np.array([lateral, heading, speed, half_width, 0.0])

    def _transition(self, state: np.ndarray, action: np.ndarray) -> tuple[np.ndarray, float, bool]:
        lateral, heading, speed, half_width, forward = state
        steer, thrust = action
        heading = heading + DT * TURN_RATE * steer
        speed = float(np.clip(speed + DT * (ACCELERATION * thrust - DRAG * speed), 0.0, MAX_SPEED))
        lateral = lateral + DT * speed * np.sin(heading)
        progress = DT * speed * np.cos(heading)
        reward = progress - LATERAL_COST * abs(lateral)
        failed = bool(abs(lateral) > half_width)
        if failed:
            reward -= FAILURE_PENALTY
        return np.array([lateral, heading, speed, half_width, forward + progress]), float(reward), failed

    def _observe(self, state: np.ndarray) -> np.ndarray:
        lateral, heading, speed, half_width, forward = state
        return np.array(
            [
                lateral,
                speed * np.sin(heading),
                heading,
                speed * np.cos(heading),
                half_width,
                forward / CORRIDOR_LENGTH,
            ]
        )

    def _expert(self, state: np.ndarray) -> np.ndarray:
        lateral, heading, speed, _, _ = state
        lateral_velocity = speed * np.sin(heading)
        heading_target = np.clip(
            -(LATERAL_P * lateral + LATERAL_D * lateral_velocity), -MAX_HEADING, MAX_HEADING
        )
        steer = STEER_GAIN * (heading_target - heading)
        thrust = CRUISE_THRUST + SPEED_GAIN * (CRUISE_SPEED - speed)
        return self.spec.clamp(np.array([steer, thrust]))


__all__ = ["CLIFF_CORRIDOR_SPEC", "CRUISE_THRUST", "CliffCorridor"]
