"""Synthetic tick environment on a virtual clock.

Every random draw a run needs is frozen up front in a :class:`SharedTrajectory`
so that different controllers can be replayed against bit-identical
randomness. :class:`Environment` then walks that trajectory, keeping the
agent-dependent state (fatigue, virtual time) and the shared wellbeing
accumulator.
"""

from __future__ import annotations

import json
from dataclasses import asdict, dataclass, field
from pathlib import Path
from typing import Optional

import numpy as np

from .embedding import FutureSample
from .policy import TickContext

TRAJECTORY_SCHEMA = "atcpg.trajectory/1"


@dataclass(frozen=True)
class EnvParams:
    overload_prob: float = 0.3
    d_base_normal: float = 50.0
    d_base_overload: float = 200.0
    d_std: float = 20.0
    d_floor: float = 1.0
    priority_coeff: float = 30.0
    dwb_mean_normal: float = 0.1
    dwb_mean_overload: float = -0.2
    dwb_std: float = 0.05
    wellbeing_init: float = 0.5
    fatigue_gain: float = 0.5
    fatigue_decay: float = 0.3
    fatigue_decay_mode: str = "proportional"
    fatigue_max: float = 5.0
    dt_base: float = 60.0
    performance_window: int = 20
    tc_mean_overload: float = 2.0
    tc_std_overload: float = 0.3
    tc_mean_normal: float = 0.1
    tc_std_normal: float = 0.05
    n_futures: int = 4
    futures_noise_scale: float = 0.05
    futures_fatigue_gain: float = 2.0
    futures_load_gain: float = 5.0
    position_std_overload: float = 3.0
    position_std_normal: float = 0.2

    def __post_init__(self):
        if not 0.0 <= self.overload_prob <= 1.0:
            raise ValueError("overload_prob must lie in [0, 1]")
        for name in ("d_std", "dwb_std", "tc_std_overload", "tc_std_normal",
                     "futures_noise_scale", "position_std_overload", "position_std_normal"):
            if getattr(self, name) < 0:
                raise ValueError(f"{name} must be non-negative")
        if not 0.0 <= self.wellbeing_init <= 1.0:
            raise ValueError("wellbeing_init must lie in [0, 1]")
        if self.n_futures < 2:
            raise ValueError("n_futures must be >= 2")
        if self.d_floor <= 0:
            raise ValueError("d_floor must be positive")
        if self.fatigue_decay_mode not in ("proportional", "absolute"):
            raise ValueError(f"fatigue_decay_mode must be 'proportional' or 'absolute', "
                             f"got {self.fatigue_decay_mode!r}")


@dataclass(frozen=True)
class TickOutcome:
    latency: float
    wellbeing_delta: float
    overload: bool
    success: bool
    priority: float
    fatigue: float
    position: Optional[np.ndarray] = None


def success_rule(overload: bool, priority: float) -> bool:
    return (not overload) or priority > 0.7


def _latency(params: EnvParams, overload: bool, priority: float, z: float) -> float:
    base = params.d_base_overload if overload else params.d_base_normal
    return float(max(params.d_floor, base - params.priority_coeff * priority + params.d_std * z))


def _dwb_raw(params: EnvParams, overload: bool, z: float) -> float:
    mu = params.dwb_mean_overload if overload else params.dwb_mean_normal
    return mu + params.dwb_std * z


def step(params: EnvParams, priority: float, rng: np.random.Generator,
         wellbeing: float | None = None) -> tuple[TickOutcome, float]:
    """Draw one stand-alone tick. Returns the outcome and the new wellbeing."""
    if not 0.0 <= priority <= 1.0:
        raise ValueError(f"priority must lie in [0, 1], got {priority}")
    wb = params.wellbeing_init if wellbeing is None else wellbeing
    overload = bool(rng.random() < params.overload_prob)
    z_d, z_w = rng.standard_normal(2)
    latency = _latency(params, overload, priority, z_d)
    new_wb = float(np.clip(wb + _dwb_raw(params, overload, z_w), 0.0, 1.0))
    out = TickOutcome(latency, new_wb - wb, overload, success_rule(overload, priority),
                      priority, 0.0)
    return out, new_wb


def tc_spread(overload: bool, rng_or_z, params: EnvParams = EnvParams()) -> float:
    """Privileged scalar spread: a Gaussian whose moments depend on the flag.

    ``rng_or_z`` is a generator or an already drawn standard normal.
    """
    z = rng_or_z.standard_normal() if hasattr(rng_or_z, "standard_normal") else float(rng_or_z)
    if overload:
        mu, sd = params.tc_mean_overload, params.tc_std_overload
    else:
        mu, sd = params.tc_mean_normal, params.tc_std_normal
    return max(0.0, mu + sd * z)


def gen_position(overload: bool, rng: np.random.Generator, params: EnvParams = EnvParams(),
                 std_override: float | None = None) -> np.ndarray:
    """Zero-mean 3-d Gaussian, wide under overload."""
    if std_override is not None:
        sd = std_override
    else:
        sd = params.position_std_overload if overload else params.position_std_normal
    return sd * rng.standard_normal(3)


@dataclass(frozen=True)
class SharedTrajectory:
    """Pre-drawn randomness for ``length`` ticks; identical for every consumer."""

    seed: int
    overload: np.ndarray          # (T,) bool
    priority: np.ndarray          # (T,)
    latency_z: np.ndarray         # (T,)
    wellbeing_z: np.ndarray       # (T,)
    tc_z: np.ndarray              # (T,)
    future_z: np.ndarray          # (T, n, 6)
    position_z: Optional[np.ndarray] = None    # (T, n, 3)
    position_gate: Optional[np.ndarray] = None  # (T,) bool, load-independent flag
    anchor: Optional[np.ndarray] = None         # (3,) unit vector

    @property
    def length(self) -> int:
        return int(self.overload.shape[0])

    @property
    def with_positions(self) -> bool:
        return self.position_z is not None

    def to_json(self) -> str:
        doc = {"schema": TRAJECTORY_SCHEMA, "seed": self.seed}
        for name in ("overload", "priority", "latency_z", "wellbeing_z", "tc_z", "future_z",
                     "position_z", "position_gate", "anchor"):
            val = getattr(self, name)
            doc[name] = None if val is None else val.tolist()
        return json.dumps(doc)

    @classmethod
    def from_json(cls, text: str) -> "SharedTrajectory":
        doc = json.loads(text)
        if doc.get("schema") != TRAJECTORY_SCHEMA:
            raise ValueError(f"unsupported trajectory schema {doc.get('schema')!r}")
        kw = {}
        for name in ("overload", "position_gate"):
            kw[name] = None if doc[name] is None else np.array(doc[name], dtype=bool)
        for name in ("priority", "latency_z", "wellbeing_z", "tc_z", "future_z",
                     "position_z", "anchor"):
            kw[name] = None if doc[name] is None else np.array(doc[name], dtype=float)
        return cls(seed=int(doc["seed"]), **kw)

    def save(self, path) -> None:
        Path(path).write_text(self.to_json())

    @classmethod
    def load(cls, path) -> "SharedTrajectory":
        return cls.from_json(Path(path).read_text())


def generate_shared_trajectory(seed: int, length: int, with_positions: bool = False,
                               params: EnvParams = EnvParams()) -> SharedTrajectory:
    if length < 1:
        raise ValueError("trajectory length must be >= 1")
    ss = np.random.SeedSequence(seed)
    core, futures, positions = (np.random.default_rng(s) for s in ss.spawn(3))
    overload = core.random(length) < params.overload_prob
    priority = core.random(length)
    latency_z = core.standard_normal(length)
    wellbeing_z = core.standard_normal(length)
    tc_z = core.standard_normal(length)
    future_z = futures.standard_normal((length, params.n_futures, 6))
    pos = gate = anchor = None
    if with_positions:
        pos = positions.standard_normal((length, params.n_futures, 3))
        gate = positions.random(length) < params.overload_prob
        a = positions.standard_normal(3)
        anchor = a / np.linalg.norm(a)
    arrays = [overload, priority, latency_z, wellbeing_z, tc_z, future_z, pos, gate, anchor]
    for a in arrays:
        if a is not None:
            a.setflags(write=False)
    return SharedTrajectory(seed, *arrays)


def futures_noise_std(context: TickContext, params: EnvParams, load: float = 0.0) -> float:
    """Perturbation scale of imagined futures.

    Grows with observed fatigue and, when ``load`` is given, with the
    upcoming tick's latent load (the world model is an oracle simulator).
    """
    return params.futures_noise_scale * (
        1.0 + params.futures_fatigue_gain * context.fatigue / params.fatigue_max
        + params.futures_load_gain * load)


def _future_states(context: TickContext, std: float, z: np.ndarray) -> np.ndarray:
    base = context.as_array()
    base[-1] = 0.0  # kappa is what the futures are used to compute
    return base + std * z


def blind_futures(context: TickContext, n: int = 4, noise_scale: float | None = None,
                  with_positions: bool = False, pos_params: EnvParams | None = None,
                  rng: np.random.Generator | None = None, overload_hint: bool = False,
                  anchor=None) -> list[FutureSample]:
    """``n`` noisy imagined next states around the observable context.

    ``overload_hint`` only picks the position-noise regime; the state noise
    never sees it.
    """
    if n < 2:
        raise ValueError("need n >= 2 futures")
    params = pos_params or EnvParams()
    if noise_scale is not None:
        params = EnvParams(**{**asdict(params), "futures_noise_scale": noise_scale})
    rng = rng or np.random.default_rng()
    std = futures_noise_std(context, params)
    states = _future_states(context, std, rng.standard_normal((n, 6)))
    if not with_positions:
        return [FutureSample(s) for s in states]
    anchor = np.zeros(3) if anchor is None else np.asarray(anchor, dtype=float)
    pos = anchor + np.stack([gen_position(overload_hint, rng, params) for _ in range(n)])
    return [FutureSample(s, p) for s, p in zip(states, pos)]


@dataclass
class Environment:
    """Walks a shared trajectory on a virtual clock."""

    trajectory: SharedTrajectory
    params: EnvParams = field(default_factory=EnvParams)
    t: int = 0
    clock: float = 0.0
    wellbeing: float = field(init=False)
    fatigue: float = 0.0
    wellbeing_delta_prev: float = 0.0
    _successes: list = field(default_factory=list, repr=False)

    def __post_init__(self):
        self.wellbeing = self.params.wellbeing_init
        self._arrive()

    @property
    def done(self) -> bool:
        return self.t >= self.trajectory.length

    def _arrive(self):
        # load of the upcoming tick builds up before the agent observes it
        if not self.done and self.trajectory.overload[self.t]:
            self.fatigue = min(self.params.fatigue_max, self.fatigue + self.params.fatigue_gain)

    @property
    def priority(self) -> float:
        return float(self.trajectory.priority[self.t])

    @property
    def overload(self) -> bool:
        """The upcoming tick's hidden load flag (privileged)."""
        return bool(self.trajectory.overload[self.t])

    @property
    def performance(self) -> float:
        w = self._successes[-self.params.performance_window:]
        return float(np.mean(w)) if w else 0.5

    def observe(self, sin_phase: float = 0.0, kappa: float = 0.0) -> TickContext:
        return TickContext(self.priority, self.fatigue, self.wellbeing_delta_prev,
                           self.performance, sin_phase, kappa)

    def futures(self, context: TickContext, positions: str = "none") -> tuple[np.ndarray, Optional[np.ndarray]]:
        """Imagined futures for the upcoming tick as (states, positions) arrays.

        ``positions`` is ``"none"``, ``"correlated"`` (position noise follows
        the hidden load), ``"decorrelated"`` (follows an independent flag with
        the same prevalence) or ``"zero"``.
        """
        tr, t, p = self.trajectory, self.t, self.params
        load = 1.0 if tr.overload[t] else 0.0
        states = _future_states(context, futures_noise_std(context, p, load), tr.future_z[t])
        if positions == "none":
            return states, None
        if not tr.with_positions:
            raise ValueError("trajectory was generated without positions")
        if positions == "zero":
            return states, np.zeros((states.shape[0], 3))
        flag = tr.overload[t] if positions == "correlated" else tr.position_gate[t]
        if positions not in ("correlated", "decorrelated"):
            raise ValueError(f"unknown position mode {positions!r}")
        sd = p.position_std_overload if flag else p.position_std_normal
        return states, tr.anchor + sd * tr.position_z[t]

    def tc_kappa(self) -> float:
        return tc_spread(self.overload, self.trajectory.tc_z[self.t], self.params)

    def tick(self, dt: float) -> TickOutcome:
        """Wait ``dt`` virtual seconds, then execute the current tick."""
        if self.done:
            raise RuntimeError("trajectory exhausted")
        tr, t, p = self.trajectory, self.t, self.params
        self.clock += dt
        overload = bool(tr.overload[t])
        prio = float(tr.priority[t])
        latency = _latency(p, overload, prio, tr.latency_z[t])
        new_wb = float(np.clip(self.wellbeing + _dwb_raw(p, overload, tr.wellbeing_z[t]), 0.0, 1.0))
        dwb = new_wb - self.wellbeing
        self.wellbeing = new_wb
        success = success_rule(overload, prio)
        out = TickOutcome(latency, dwb, overload, success, prio, self.fatigue)
        self._successes.append(success)
        self.wellbeing_delta_prev = dwb
        # rest during the wait that follows
        if p.fatigue_decay_mode == "proportional":
            self.fatigue = max(0.0, self.fatigue * (1.0 - p.fatigue_decay * dt / p.dt_base))
        else:
            self.fatigue = max(0.0, self.fatigue - p.fatigue_decay * dt / p.dt_base)
        self.t += 1
        self._arrive()
        return out
