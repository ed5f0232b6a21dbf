"""Built-in episodic environments: cart-pole balance and a point-mass lander.

Each environment instance owns its mutable episode state: ``reset(seed)``
starts a new seeded episode and returns the initial observation,
``step(action)`` advances one frame and returns a :class:`StepResult`.
Randomness enters only through the seeded reset, so an identical seed plus an
identical action sequence reproduces a trajectory bitwise. Stepping a
finished episode raises ``RuntimeError`` until the next reset.
"""

from __future__ import annotations

import math
from typing import NamedTuple

import numpy as np


class StepResult(NamedTuple):
    observation: np.ndarray
    reward: float
    done: bool


class ActionSpec(NamedTuple):
    kind: str  # "discrete" or "continuous"
    size: int  # number of discrete actions, or action vector length


class Environment:
    """Interface shared by the built-in tasks.

    Subclasses define ``name``, ``state_dim``, ``action_spec`` and
    ``max_steps`` as class attributes so network shapes can be derived
    without instantiating an episode. Instances are single-owner mutable
    state; run distinct instances to parallelise.
    """

    name: str
    state_dim: int
    action_spec: ActionSpec
    max_steps: int

    def __init__(self) -> None:
        self.step_index = 0
        self._done = True  # force reset() before the first step()

    def reset(self, seed: int) -> np.ndarray:
        raise NotImplementedError

    def step(self, action) -> StepResult:
        raise NotImplementedError

    def _require_active(self) -> None:
        if self._done:
            raise RuntimeError("episode is finished; call reset() before step()")


class CartPole(Environment):
    """Cart-pole balance task with the standard classic-control constants.

    Observation: (cart position, cart velocity, pole angle, pole angular
    velocity), each drawn uniformly from [-0.05, 0.05] at reset. Action 0
    pushes the cart left and action 1 right with a 10 N force; dynamics
    advance by explicit Euler steps of 0.02 s, updating positions with the
    pre-step velocities. Reward is +1 per step. The episode ends when the
    cart leaves +/-2.4, the pole tips past +/-12 degrees, or 200 steps
    elapse, so surviving every step scores exactly 200.
    """

    name = "cartpole"
    state_dim = 4
    action_spec = ActionSpec("discrete", 2)
    max_steps = 200

    gravity = 9.8
    cart_mass = 1.0
    pole_mass = 0.1
    half_length = 0.5  # half the pole length
    force_mag = 10.0
    tau = 0.02
    x_threshold = 2.4
    theta_threshold = 12.0 * math.pi / 180.0

    def reset(self, seed: int) -> np.ndarray:
        rng = np.random.default_rng(seed)
        self.x, self.x_dot, self.theta, self.theta_dot = rng.uniform(-0.05, 0.05, size=4)
        self.step_index = 0
        self._done = False
        return self._observation()

    def _observation(self) -> np.ndarray:
        return np.array([self.x, self.x_dot, self.theta, self.theta_dot])

    def step(self, action) -> StepResult:
        self._require_active()
        if action not in (0, 1):
            raise ValueError(f"action must be 0 or 1, got {action!r}")
        force = self.force_mag if action == 1 else -self.force_mag
        total_mass = self.cart_mass + self.pole_mass
        pole_mass_length = self.pole_mass * self.half_length
        cos_theta = math.cos(self.theta)
        sin_theta = math.sin(self.theta)
        temp = (force + pole_mass_length * self.theta_dot**2 * sin_theta) / total_mass
        theta_acc = (self.gravity * sin_theta - cos_theta * temp) / (
            self.half_length * (4.0 / 3.0 - self.pole_mass * cos_theta**2 / total_mass)
        )
        x_acc = temp - pole_mass_length * theta_acc * cos_theta / total_mass
        self.x += self.tau * self.x_dot
        self.theta += self.tau * self.theta_dot
        self.x_dot += self.tau * x_acc
        self.theta_dot += self.tau * theta_acc
        self.step_index += 1
        self._done = (
            abs(self.x) > self.x_threshold
            or abs(self.theta) > self.theta_threshold
            or self.step_index >= self.max_steps
        )
        return StepResult(self._observation(), 1.0, self._done)


class PointMassLander(Environment):
    """Simplified 2D landing task: a point mass descending onto a pad.

    Observation: (x, y, horizontal velocity, vertical velocity, left touch
    flag, right touch flag); both flags flip to 1 on touchdown. Resets place
    the craft at height y = 1 with x uniform in [-1, 1], horizontal velocity
    uniform in [-0.3, 0.3] and vertical velocity uniform in [-0.3, 0], drawn
    in that order. Gravity is 1 (abstract units) and the integrator is
    explicit Euler with a 0.05 s step, positions updated with the pre-step
    velocities.

    The per-step reward is the change in the potential
    -(100 * distance-to-pad + 10 * speed), minus 0.3 per unit of main-engine
    throttle. Touchdown (y <= 0) inside the pad (|x| < 0.25) at a safe
    descent rate (|vy| < 0.5) earns +100; touching down anywhere else or
    drifting out of bounds (|x| > 2 or y > 2) costs -100. Episodes also end
    after 500 steps, without a terminal bonus.
    """

    state_dim = 6
    max_steps = 500

    gravity = 1.0
    tau = 0.05
    main_thrust = 3.0 * gravity  # upward acceleration at full throttle
    lateral_thrust = 0.6 * gravity
    pad_half_width = 0.25
    safe_landing_speed = 0.5
    x_bound = 2.0
    y_bound = 2.0
    main_engine_cost = 0.3
    terminal_bonus = 100.0
    distance_weight = 100.0
    speed_weight = 10.0

    def reset(self, seed: int) -> np.ndarray:
        rng = np.random.default_rng(seed)
        self.x = rng.uniform(-1.0, 1.0)
        self.y = 1.0
        self.vx = rng.uniform(-0.3, 0.3)
        self.vy = rng.uniform(-0.3, 0.0)
        self.touched = False
        self.step_index = 0
        self._done = False
        return self._observation()

    def _observation(self) -> np.ndarray:
        flag = 1.0 if self.touched else 0.0
        return np.array([self.x, self.y, self.vx, self.vy, flag, flag])

    def _potential(self) -> float:
        distance = math.hypot(self.x, self.y)
        speed = math.hypot(self.vx, self.vy)
        return -(self.distance_weight * distance + self.speed_weight * speed)

    def _advance(self, main_throttle: float, lateral_throttle: float) -> StepResult:
        potential_before = self._potential()
        self.x += self.tau * self.vx
        self.y += self.tau * self.vy
        self.vx += self.tau * lateral_throttle * self.lateral_thrust
        self.vy += self.tau * (main_throttle * self.main_thrust - self.gravity)
        self.step_index += 1

        reward = self._potential() - potential_before
        reward -= self.main_engine_cost * main_throttle
        self.touched = self.y <= 0.0
        if self.touched:
            on_pad = abs(self.x) < self.pad_half_width
            gentle = abs(self.vy) < self.safe_landing_speed
            reward += self.terminal_bonus if (on_pad and gentle) else -self.terminal_bonus
            self._done = True
        elif abs(self.x) > self.x_bound or self.y > self.y_bound:
            reward -= self.terminal_bonus
            self._done = True
        elif self.step_index >= self.max_steps:
            self._done = True
        return StepResult(self._observation(), reward, self._done)


class DiscreteLander(PointMassLander):
    """Lander variant with four engine commands: coast, thrust right (+x),
    fire the main engine (+y), thrust left (-x)."""

    name = "lander-discrete"
    action_spec = ActionSpec("discrete", 4)

    # action -> (main throttle, lateral throttle)
    _commands = {0: (0.0, 0.0), 1: (0.0, 1.0), 2: (1.0, 0.0), 3: (0.0, -1.0)}

    def step(self, action) -> StepResult:
        self._require_active()
        if action not in (0, 1, 2, 3):
            raise ValueError(f"action must be one of 0..3, got {action!r}")
        main, lateral = self._commands[int(action)]
        return self._advance(main, lateral)


class ContinuousLander(PointMassLander):
    """Lander variant driven by two throttles in [-1, 1].

    Component 0 is the main engine: positive values apply proportional
    upward thrust, non-positive values none. Component 1 steers laterally
    with a dead zone: it fires only when |value| > 0.5, with thrust
    proportional to |value| and direction given by the sign. Throttles
    {-1, 0, +1} therefore reproduce the discrete commands exactly.
    """

    name = "lander-continuous"
    action_spec = ActionSpec("continuous", 2)
    lateral_dead_zone = 0.5

    def step(self, action) -> StepResult:
        self._require_active()
        action = np.asarray(action, dtype=float)
        if action.shape != (2,):
            raise ValueError(f"action must be a pair of throttles, got shape {action.shape}")
        if not np.all(np.isfinite(action)) or np.any(np.abs(action) > 1.0):
            raise ValueError(f"action components must lie in [-1, 1], got {action}")
        main = float(action[0]) if action[0] > 0.0 else 0.0
        lateral = float(action[1]) if abs(action[1]) > self.lateral_dead_zone else 0.0
        return self._advance(main, lateral)


ENVIRONMENTS: dict[str, type[Environment]] = {
    cls.name: cls for cls in (CartPole, DiscreteLander, ContinuousLander)
}


def make_env(name: str) -> Environment:
    """Instantiate a registered environment by name."""
    try:
        return ENVIRONMENTS[name]()
    except KeyError:
        known = ", ".join(sorted(ENVIRONMENTS))
        raise ValueError(f"unknown environment {name!r}; registered: {known}") from None
