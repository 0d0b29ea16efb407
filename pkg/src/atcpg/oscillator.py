"""Internal phase oscillator and Kuramoto-style phase coupling."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

TWO_PI = 2.0 * np.pi
OMEGA_MIN = 0.001
OMEGA_MAX = 0.2


@dataclass(frozen=True)
class OscillatorState:
    phase: float
    omega: float = 0.05

    def __post_init__(self):
        object.__setattr__(self, "phase", float(self.phase) % TWO_PI)
        object.__setattr__(self, "omega", float(np.clip(self.omega, OMEGA_MIN, OMEGA_MAX)))


def advance(state: OscillatorState, r_tilde: float, alpha: float) -> OscillatorState:
    """One tick: phase moves by omega, and reward nudges omega."""
    phase = (state.phase + state.omega) % TWO_PI
    omega = float(np.clip(state.omega + alpha * r_tilde * 0.01, OMEGA_MIN, OMEGA_MAX))
    return OscillatorState(phase, omega)


def kuramoto_step(phases, lam: float, circular: bool = False) -> np.ndarray:
    """Pull every phase a fraction ``lam`` toward the group mean.

    The default mean is the arithmetic mean of the raw phases; ``circular``
    switches to the angle of the mean phasor.
    """
    if not 0.0 <= lam <= 1.0:
        raise ValueError(f"coupling must lie in [0, 1], got {lam}")
    phases = np.asarray(phases, dtype=float)
    if phases.size == 0:
        raise ValueError("need at least one phase")
    if circular:
        mean = np.angle(np.exp(1j * phases).mean()) % TWO_PI
        # move along the shortest arc
        delta = (mean - phases + np.pi) % TWO_PI - np.pi
    else:
        delta = phases.mean() - phases
    return (phases + lam * delta) % TWO_PI


def phase_spread(phases) -> float:
    phases = np.asarray(phases, dtype=float)
    if phases.size == 0:
        raise ValueError("need at least one phase")
    return float(phases.max() - phases.min())
