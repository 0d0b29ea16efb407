"""Learning signals for the pacing policy."""

from __future__ import annotations

from dataclasses import dataclass


@dataclass(frozen=True)
class RewardCoefficients:
    efficiency: float = 2.0
    spacing: float = 1.5
    spread: float = 1.0


@dataclass(frozen=True)
class RewardBreakdown:
    efficiency_term: float
    spacing_term: float
    spread_term: float
    total: float
    overload_magnitude: float


def interval_aware_reward(dwb: float, kappa: float, dt: float, dt_base: float,
                          coef: RewardCoefficients = RewardCoefficients()) -> RewardBreakdown:
    """Efficiency + spacing bonus + spread brake.

    The spacing bonus pays for long waits only when wellbeing fell; the spread
    brake pays for short waits when predicted futures diverge.
    """
    if dt <= 0 or dt_base <= 0:
        raise ValueError(f"intervals must be positive, got dt={dt}, dt_base={dt_base}")
    overload = max(0.0, -dwb)
    eff = coef.efficiency * dwb / dt
    spacing = coef.spacing * overload * (dt / dt_base)
    brake = coef.spread * kappa / dt
    return RewardBreakdown(eff, spacing, brake, eff + spacing + brake, overload)


def naive_reward(dwb: float, latency_ms: float) -> float:
    """Outcome-only reward 2*dwb + 0.5/d, latency in milliseconds."""
    if latency_ms <= 0:
        raise ValueError(f"latency must be positive, got {latency_ms}")
    return 2.0 * dwb + 0.5 / latency_ms
