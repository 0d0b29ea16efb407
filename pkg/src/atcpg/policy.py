"""Linear pacing policy with state-dependent exploration.

The weight vector is ``[bias, priority, fatigue, wellbeing, performance,
phase, kappa]``; the bias channel sees a constant feature of 1.
"""

from __future__ import annotations

from dataclasses import dataclass, fields

import numpy as np

FEATURES = ("priority", "fatigue", "wellbeing_delta_prev", "performance", "sin_phase", "kappa")
WEIGHT_NAMES = ("bias", "w_priority", "w_fatigue", "w_wellbeing", "w_performance", "w_phase", "w_kappa")


@dataclass(frozen=True)
class TickContext:
    priority: float = 0.0
    fatigue: float = 0.0
    wellbeing_delta_prev: float = 0.0
    performance: float = 0.0
    sin_phase: float = 0.0
    kappa: float = 0.0

    def as_array(self) -> np.ndarray:
        return np.array([getattr(self, f) for f in FEATURES], dtype=float)

    def augmented(self) -> np.ndarray:
        """Feature vector with the constant bias feature prepended."""
        return np.concatenate([[1.0], self.as_array()])


@dataclass(frozen=True)
class PolicyWeights:
    bias: float = 60.0
    w_priority: float = -20.0
    w_fatigue: float = 30.0
    w_wellbeing: float = 10.0
    w_performance: float = -5.0
    w_phase: float = 5.0
    w_kappa: float = -30.0

    def as_array(self) -> np.ndarray:
        return np.array([getattr(self, f.name) for f in fields(self)], dtype=float)

    @classmethod
    def from_array(cls, a) -> "PolicyWeights":
        a = np.asarray(a, dtype=float)
        if a.shape != (len(WEIGHT_NAMES),):
            raise ValueError(f"expected {len(WEIGHT_NAMES)} weights, got shape {a.shape}")
        return cls(*(float(v) for v in a))

    def to_dict(self) -> dict:
        return dict(zip(WEIGHT_NAMES, self.as_array().tolist()))


@dataclass(frozen=True)
class PolicyConfig:
    dt_min: float = 10.0
    dt_max: float = 300.0
    dt_base: float = 60.0
    alpha: float = 0.1
    epsilon0: float = 0.2
    weight_clip: float = 100.0

    def __post_init__(self):
        if not 0.0 < self.dt_min < self.dt_base < self.dt_max:
            raise ValueError(
                f"need 0 < dt_min < dt_base < dt_max, got {self.dt_min}, {self.dt_base}, {self.dt_max}")
        if not 0.0 <= self.epsilon0 <= 1.0:
            raise ValueError(f"epsilon0 must lie in [0, 1], got {self.epsilon0}")
        if self.weight_clip <= 0:
            raise ValueError("weight_clip must be positive")


def predict_interval(w: PolicyWeights, s: TickContext, cfg: PolicyConfig) -> float:
    raw = float(w.as_array() @ s.augmented())
    return float(np.clip(raw, cfg.dt_min, cfg.dt_max))


def effective_epsilon(s: TickContext, cfg: PolicyConfig) -> float:
    """eps0 * (1 - |dwb_prev|): explore when wellbeing is calm."""
    dwb = min(abs(s.wellbeing_delta_prev), 1.0)
    return max(0.0, cfg.epsilon0 * (1.0 - dwb))


def apply_exploration(interval: float, s: TickContext, cfg: PolicyConfig,
                      rng: np.random.Generator) -> float:
    """With probability eps_eff, scale by Uniform(0.5, 1.5) and re-clamp.

    Two uniforms are drawn on every call so the stream position does not
    depend on the outcome.
    """
    u_gate, u_scale = rng.random(2)
    if u_gate < effective_epsilon(s, cfg):
        interval *= 0.5 + u_scale
        interval = float(np.clip(interval, cfg.dt_min, cfg.dt_max))
    return interval


def _clipped(w: PolicyWeights, step: np.ndarray, cfg: PolicyConfig) -> PolicyWeights:
    return PolicyWeights.from_array(np.clip(w.as_array() + step, -cfg.weight_clip, cfg.weight_clip))


def update_weights(w: PolicyWeights, r_tilde: float, s: TickContext,
                   cfg: PolicyConfig) -> PolicyWeights:
    """theta <- clip(theta + alpha * r * [1, s])."""
    return _clipped(w, cfg.alpha * r_tilde * s.augmented(), cfg)


def update_weights_exact_reinforce(w: PolicyWeights, r_tilde: float, s: TickContext,
                                   chosen_dt: float, predicted_dt: float, sigma: float,
                                   cfg: PolicyConfig) -> PolicyWeights:
    """Gaussian-policy REINFORCE step, with the (dt - dt_hat) / sigma^2 term."""
    if not sigma > 0:
        raise ValueError(f"sigma must be positive, got {sigma}")
    score = (chosen_dt - predicted_dt) / sigma**2
    return _clipped(w, cfg.alpha * r_tilde * score * s.augmented(), cfg)
