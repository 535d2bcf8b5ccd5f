"""
Reach2D: a two-link planar arm that must bring its fingertip onto a random target.

State ``[q1, q2, dq1, dq2, target_x, target_y]``; torques act on a damped
double integrator per joint (no gravity, no coupling), integrated with
semi-implicit Euler. The expert is a damped-least-squares inverse-kinematics
velocity controller followed by a proportional velocity tracker.
"""

from __future__ import annotations

from dataclasses import replace

import numpy as np

from src.environments.abstract import EnvSpec, EpisodicEnvironment

LINK_LENGTHS = (0.1, 0.1)
DT = 0.05
HORIZON = 50
TORQUE_GAIN = 10.0
JOINT_DAMPING = 1.0
CONTROL_COST = 0.01
TARGET_MIN_RADIUS = 0.05
TARGET_MAX_RADIUS = 0.2

# expert gains
POSITION_GAIN = 3.0
VELOCITY_GAIN = 5.0
IK_DAMPING = 0.01
MAX_JOINT_SPEED = 4.0

REACH2D_SPEC = EnvSpec(
    name="reach2d",
    obs_dim=8,
    action_dim=2,
    max_steps=HORIZON,
    action_low=(-1.0, -1.0),
    action_high=(1.0, 1.0),
    reward_range=(-(sum(LINK_LENGTHS) + TARGET_MAX_RADIUS) - 2 * CONTROL_COST, 0.0),
)


def fingertip(q: np.ndarray) -> np.ndarray:
    l1, l2 = LINK_LENGTHS
    return np.array(
        [
            l1 * np.cos(q[0]) + l2 * np.cos(q[0] + q[1]),
            l1 * np.sin(q[0]) + l2 * np.sin(q[0] + q[1]),
        ]
    )


def jacobian(q: np.ndarray) -> np.ndarray:
    l1, l2 = LINK_LENGTHS
    s1, c1 = np.sin(q[0]), np.cos(q[0])
    s12, c12 = np.sin(q[0] + q[1]), np.cos(q[0] + q[1])
    return np.array(
        [
            [-l1 * s1 - l2 * s12, -l2 * s12],
            [l1 * c1 + l2 * c12, l2 * c12],
        ]
    )


class Reach2D(EpisodicEnvironment):
    def __init__(self, horizon: int | None = None) -> None:
        spec = REACH2D_SPEC
        if horizon is not None:
            spec = replace(spec, max_steps=horizon)
        super().__init__(spec)

    def _sample_initial_state(self, rng: np.random.Generator) -> np.ndarray:
        q = rng.uniform(-np.pi, np.pi, size=2)
        radius = np.sqrt(rng.uniform(TARGET_MIN_RADIUS**2, TARGET_MAX_RADIUS**2))
        angle = rng.uniform(-np.pi, np.pi)
        target = radius * np.array([np.cos(angle), np.sin(angle)])
        return np.concatenate([q, np.zeros(2), target])

    def _transition(self, state: np.ndarray, action: np.ndarray) -> tuple[np.ndarray, float, bool]:
        q, dq, target = state[0:2], state[2:4], state[4:6]
        ddq = TORQUE_GAIN * action - JOINT_DAMPING * dq
        dq_next = dq + DT * ddq
        q_next = q + DT * dq_next
        distance = float(np.linalg.norm(fingertip(q_next) - target))
        reward = -distance - CONTROL_COST * float(action @ action)
        return np.concatenate([q_next, dq_next, target]), reward, False

    def _observe(self, state: np.ndarray) -> np.ndarray:
        q, dq, target = state[0:2], state[2:4], state[4:6]
        return np.array(
            [np.cos(q[0]), np.sin(q[0]), np.cos(q[1]), np.sin(q[1]), dq[0], dq[1], target[0], target[1]]
        )

    def _expert(self, state: np.ndarray) -> np.ndarray:
        q, dq, target = state[0:2], state[2:4], state[4:6]
        error = target - fingertip(q)
        jac = jacobian(q)
        damped = jac @ jac.T + IK_DAMPING**2 * np.eye(2)
        dq_desired = jac.T @ np.linalg.solve(damped, POSITION_GAIN * error)
        speed = np.linalg.norm(dq_desired)
        if speed > MAX_JOINT_SPEED:
            dq_desired = dq_desired * (MAX_JOINT_SPEED / speed)
        accel = VELOCITY_GAIN * (dq_desired - dq)
        torque = (accel + JOINT_DAMPING * dq) / TORQUE_GAIN
        return self.spec.clamp(torque)


__all__ = ["REACH2D_SPEC", "Reach2D", "fingertip", "jacobian"]
