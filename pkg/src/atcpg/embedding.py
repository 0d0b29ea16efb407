"""Embedding of predicted futures into the Poincaré ball.

``embed_state`` maps a trajectory summary onto the sphere of radius ``scale``;
``embed_joint`` concatenates independently normalised state and position
blocks and re-projects the result to ``joint_r_max``. Two radius-``scale``
blocks concatenate to norm ``scale * sqrt(2)``, so that outer projection is
usually active; at the default radius it keeps joint points off the boundary
shell where every pairwise distance saturates near 20.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

import numpy as np

from .geometry import DEFAULT_R_MAX, project


@dataclass(frozen=True)
class EmbeddingConfig:
    state_dim: int = 6
    position_dim: int = 3
    scale: float = 0.9
    r_max: float = DEFAULT_R_MAX
    joint_r_max: float = 0.9

    def __post_init__(self):
        if not 0.0 < self.scale < 1.0:
            raise ValueError(f"scale must lie in (0, 1), got {self.scale}")
        if self.state_dim < 1:
            raise ValueError("state_dim must be >= 1")
        if self.position_dim < 0:
            raise ValueError("position_dim must be >= 0")
        if not 0.0 < self.r_max < 1.0:
            raise ValueError(f"r_max must lie in (0, 1), got {self.r_max}")
        if not 0.0 < self.joint_r_max <= self.r_max:
            raise ValueError(f"joint_r_max must lie in (0, r_max], got {self.joint_r_max}")


@dataclass(frozen=True)
class FutureSample:
    state: np.ndarray
    position: Optional[np.ndarray] = None

    def __post_init__(self):
        state = np.asarray(self.state, dtype=float)
        if state.ndim != 1 or state.size == 0:
            raise ValueError("state must be a non-empty 1-d vector")
        object.__setattr__(self, "state", state)
        if self.position is not None:
            object.__setattr__(self, "position", np.asarray(self.position, dtype=float))


def pad_or_trim(z, dim: int) -> np.ndarray:
    """Zero-pad or truncate the tail of ``z`` (last axis) to length ``dim``."""
    z = np.asarray(z, dtype=float)
    n = z.shape[-1]
    if n >= dim:
        return z[..., :dim]
    pad = [(0, 0)] * (z.ndim - 1) + [(0, dim - n)]
    return np.pad(z, pad)


def _direction_embed(z, dim, scale, r_max):
    z = pad_or_trim(z, dim)
    norm = np.linalg.norm(z, axis=-1, keepdims=True)
    safe = np.where(norm > 0.0, norm, 1.0)
    out = np.where(norm > 0.0, scale * z / safe, 0.0)
    return project(out, r_max)


def embed_state(z, cfg: EmbeddingConfig | None = None) -> np.ndarray:
    """phi(z): unit direction of pad/trim(z) scaled by ``cfg.scale``.

    Accepts a batch with summaries along the last axis. The zero vector maps
    to the origin.
    """
    cfg = cfg or EmbeddingConfig()
    z = np.asarray(z, dtype=float)
    if z.shape[-1] == 0:
        raise ValueError("state vector must be non-empty")
    return _direction_embed(z, cfg.state_dim, cfg.scale, cfg.r_max)


def embed_joint(sample: FutureSample, cfg: EmbeddingConfig | None = None) -> np.ndarray:
    """psi = proj([phi(z; m_s) || phi(p; m_p)]), or phi(z) when no position."""
    cfg = cfg or EmbeddingConfig()
    if sample.position is None:
        return embed_state(sample.state, cfg)
    return embed_joint_batch(sample.state, sample.position, cfg)


def embed_joint_batch(states, positions, cfg: EmbeddingConfig | None = None) -> np.ndarray:
    """Vectorised :func:`embed_joint` for aligned state/position batches."""
    cfg = cfg or EmbeddingConfig()
    if positions is None:
        return embed_state(states, cfg)
    if cfg.position_dim < 1:
        raise ValueError("position_dim must be >= 1 when positions are given")
    s = _direction_embed(states, cfg.state_dim, cfg.scale, cfg.r_max)
    p = _direction_embed(positions, cfg.position_dim, cfg.scale, cfg.r_max)
    return project(np.concatenate([s, p], axis=-1), cfg.joint_r_max)
