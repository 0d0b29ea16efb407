"""The pacing control loop.

One call to :func:`run_single` executes the full per-tick cycle: spread,
context, interval, exploration, virtual sleep, outcome, reward, weight and
oscillator updates. Controllers differ only in where kappa comes from and
which pieces of the cycle are switched off.
"""

from __future__ import annotations

import enum
import hashlib
from dataclasses import dataclass, field, replace
from typing import Optional

import numpy as np

from .embedding import EmbeddingConfig, embed_joint_batch, embed_state
from .environment import EnvParams, Environment, SharedTrajectory, generate_shared_trajectory
from .geometry import GeometryConfig
from .metrics import RunResult, TickRecord, summarize
from .oscillator import OscillatorState, advance, kuramoto_step, phase_spread
from .policy import (PolicyConfig, PolicyWeights, TickContext, apply_exploration,
                     predict_interval, update_weights)
from .reward import RewardBreakdown, RewardCoefficients, interval_aware_reward, naive_reward
from .spread import predictive_spread


class ControllerKind(str, enum.Enum):
    FIXED = "fixed"
    TC_PRIVILEGED = "tc_privileged"
    ATCPG_STATE_ONLY = "atcpg_so"
    ATCPG_SPATIOTEMPORAL = "atcpg_st"


class Ablation(str, enum.Enum):
    NO_LEARNING = "no_learning"
    NO_SPREAD = "no_spread"
    NAIVE_REWARD = "naive_reward"
    NO_EXPLORATION = "no_exploration"


@dataclass(frozen=True)
class ControllerVariant:
    kind: ControllerKind = ControllerKind.ATCPG_STATE_ONLY
    ablations: frozenset = frozenset()
    positions: str = "correlated"  # only read by the spatio-temporal controller

    def __post_init__(self):
        object.__setattr__(self, "kind", ControllerKind(self.kind))
        object.__setattr__(self, "ablations", frozenset(Ablation(a) for a in self.ablations))
        if self.positions not in ("correlated", "decorrelated", "zero"):
            raise ValueError(f"unknown position mode {self.positions!r}")

    def has(self, ablation: Ablation) -> bool:
        return ablation in self.ablations

    @property
    def learns(self) -> bool:
        return self.kind is not ControllerKind.FIXED and not self.has(Ablation.NO_LEARNING)


@dataclass
class RunTrace:
    records: list = field(default_factory=list)
    final_weights: Optional[PolicyWeights] = None

    def __len__(self):
        return len(self.records)


@dataclass(frozen=True)
class LoopConfig:
    geometry: GeometryConfig = field(default_factory=GeometryConfig)
    embedding: EmbeddingConfig = field(default_factory=EmbeddingConfig)
    policy: PolicyConfig = field(default_factory=PolicyConfig)
    reward: RewardCoefficients = field(default_factory=RewardCoefficients)
    env: EnvParams = field(default_factory=EnvParams)
    initial_weights: PolicyWeights = field(default_factory=PolicyWeights)
    omega0: float = 0.05


def weights_hash(w: PolicyWeights) -> str:
    return hashlib.sha1(w.as_array().tobytes()).hexdigest()[:12]


def geometric_kappa(states, positions, cfg: LoopConfig) -> float:
    if positions is None:
        pts = embed_state(states, cfg.embedding)
    else:
        pts = embed_joint_batch(states, positions, cfg.embedding)
    return predictive_spread(pts, cfg.geometry).kappa


class Agent:
    """Controller state for one pacing loop: weights, oscillator, exploration stream."""

    def __init__(self, variant: ControllerVariant, cfg: LoopConfig, seed: int, index: int = 0):
        self.variant = variant
        self.cfg = cfg
        self.weights = cfg.initial_weights
        ss = np.random.SeedSequence([seed, 7919, index])
        init_rng, self.explore_rng = (np.random.default_rng(s) for s in ss.spawn(2))
        self.osc = OscillatorState(init_rng.uniform(0.0, 2.0 * np.pi), cfg.omega0)

    def spread(self, env: Environment, ctx: TickContext) -> float:
        kind = self.variant.kind
        if kind is ControllerKind.FIXED or self.variant.has(Ablation.NO_SPREAD):
            return 0.0
        if kind is ControllerKind.TC_PRIVILEGED:
            return env.tc_kappa()
        mode = self.variant.positions if kind is ControllerKind.ATCPG_SPATIOTEMPORAL else "none"
        states, positions = env.futures(ctx, mode)
        return geometric_kappa(states, positions, self.cfg)

    def choose(self, ctx: TickContext) -> tuple[float, float]:
        pcfg = self.cfg.policy
        if not self.variant.learns:
            return pcfg.dt_base, pcfg.dt_base
        predicted = predict_interval(self.weights, ctx, pcfg)
        dt = predicted
        if not self.variant.has(Ablation.NO_EXPLORATION):
            dt = apply_exploration(predicted, ctx, pcfg, self.explore_rng)
        return predicted, dt

    def learning_signal(self, outcome, kappa: float, dt: float) -> tuple[RewardBreakdown, float]:
        br = interval_aware_reward(outcome.wellbeing_delta, kappa, dt,
                                   self.cfg.policy.dt_base, self.cfg.reward)
        if self.variant.has(Ablation.NAIVE_REWARD):
            return br, naive_reward(outcome.wellbeing_delta, outcome.latency)
        return br, br.total

    def step(self, env: Environment) -> TickRecord:
        t = env.t
        sin_phase = float(np.sin(self.osc.phase))
        probe = env.observe(sin_phase, 0.0)
        kappa = self.spread(env, probe)
        ctx = replace(probe, kappa=kappa)
        predicted, dt = self.choose(ctx)
        clock = env.clock + dt
        out = env.tick(dt)
        br, r = self.learning_signal(out, kappa, dt)
        if self.variant.learns:
            self.weights = update_weights(self.weights, r, ctx, self.cfg.policy)
            self.osc = advance(self.osc, r, self.cfg.policy.alpha)
        else:
            self.osc = advance(self.osc, 0.0, self.cfg.policy.alpha)
        return TickRecord(
            tick=t, priority=ctx.priority, fatigue=ctx.fatigue,
            wellbeing_delta_prev=ctx.wellbeing_delta_prev, performance=ctx.performance,
            sin_phase=sin_phase, kappa=kappa, predicted_interval=predicted, interval=dt,
            clock=clock, latency=out.latency, wellbeing_delta=out.wellbeing_delta,
            wellbeing=env.wellbeing, overload=out.overload, success=out.success,
            efficiency_term=br.efficiency_term, spacing_term=br.spacing_term,
            spread_term=br.spread_term, reward=r, phase=self.osc.phase, omega=self.osc.omega,
            weights_hash=weights_hash(self.weights),
        )


def _check(variant: ControllerVariant, trajectory: SharedTrajectory):
    if variant.kind is ControllerKind.ATCPG_SPATIOTEMPORAL and not trajectory.with_positions:
        raise ValueError("spatio-temporal controller needs a trajectory with positions")


def run_on_trajectory(variant: ControllerVariant, trajectory: SharedTrajectory,
                      cfg: LoopConfig = LoopConfig(), agent_seed: int | None = None
                      ) -> tuple[RunResult, RunTrace]:
    _check(variant, trajectory)
    env = Environment(trajectory, cfg.env)
    agent = Agent(variant, cfg, trajectory.seed if agent_seed is None else agent_seed)
    trace = RunTrace()
    while not env.done:
        trace.records.append(agent.step(env))
    trace.final_weights = agent.weights
    return summarize(trace), trace


def run_single(variant: ControllerVariant, cfg: LoopConfig = LoopConfig(), seed: int = 0,
               ticks: int = 500) -> tuple[RunResult, RunTrace]:
    """Run one controller for ``ticks`` ticks on a fresh seeded environment."""
    if ticks < 1:
        raise ValueError("ticks must be >= 1")
    with_pos = variant.kind is ControllerKind.ATCPG_SPATIOTEMPORAL
    traj = generate_shared_trajectory(seed, ticks, with_positions=with_pos, params=cfg.env)
    return run_on_trajectory(variant, traj, cfg)


@dataclass(frozen=True)
class ComparisonRow:
    label: str
    result: RunResult


def run_headtohead(seed: int = 42, ticks: int = 500, cfg: LoopConfig = LoopConfig()
                   ) -> dict[str, tuple[RunResult, RunTrace]]:
    """Privileged scalar spread vs blind geometric spread on one trajectory."""
    traj = generate_shared_trajectory(seed, ticks, params=cfg.env)
    return {
        "TC (privileged)": run_on_trajectory(ControllerVariant(ControllerKind.TC_PRIVILEGED), traj, cfg),
        "ATCPG (blind)": run_on_trajectory(ControllerVariant(ControllerKind.ATCPG_STATE_ONLY), traj, cfg),
    }


def run_spatial_ablation(seed: int = 99, ticks: int = 500, cfg: LoopConfig = LoopConfig(),
                         positions: str = "correlated") -> dict[str, tuple[RunResult, RunTrace]]:
    """State-only vs joint spatio-temporal embedding on one trajectory with positions."""
    traj = generate_shared_trajectory(seed, ticks, with_positions=True, params=cfg.env)
    return {
        "ATCPG-SO": run_on_trajectory(ControllerVariant(ControllerKind.ATCPG_STATE_ONLY), traj, cfg),
        "ATCPG-ST": run_on_trajectory(
            ControllerVariant(ControllerKind.ATCPG_SPATIOTEMPORAL, positions=positions), traj, cfg),
    }


@dataclass
class MultiAgentResult:
    spread_coupled: float
    spread_uncoupled: float
    phases_coupled: np.ndarray
    phases_uncoupled: np.ndarray
    results_coupled: list
    results_uncoupled: list

    @property
    def efficiency_coupled(self) -> float:
        return float(np.mean([r.efficiency for r in self.results_coupled]))

    @property
    def efficiency_uncoupled(self) -> float:
        return float(np.mean([r.efficiency for r in self.results_uncoupled]))


def _multi_run(n_agents, lam, ticks, seed, cfg, variant):
    agents, envs, traces = [], [], []
    for i in range(n_agents):
        traj = generate_shared_trajectory(seed * 1000 + i, ticks, params=cfg.env)
        envs.append(Environment(traj, cfg.env))
        agents.append(Agent(variant, cfg, seed, index=i))
        traces.append(RunTrace())
    history = np.empty((ticks + 1, n_agents))
    history[0] = [a.osc.phase for a in agents]
    for t in range(ticks):
        for a, e, tr in zip(agents, envs, traces):
            tr.records.append(a.step(e))
        if lam > 0:
            phases = kuramoto_step([a.osc.phase for a in agents], lam)
            for a, ph in zip(agents, phases):
                a.osc = OscillatorState(ph, a.osc.omega)
        history[t + 1] = [a.osc.phase for a in agents]
    return history, [summarize(tr) for tr in traces]


def run_multi_agent(n_agents: int = 5, lam: float = 0.05, ticks: int = 100, seed: int = 0,
                    cfg: LoopConfig = LoopConfig(),
                    variant: ControllerVariant = ControllerVariant()) -> MultiAgentResult:
    """Coupled and uncoupled teams from identical initial phases and environments.

    Each agent owns an independent environment; coupling runs once per round
    after every agent has advanced.
    """
    if n_agents < 2:
        raise ValueError("need at least two agents")
    hc, rc = _multi_run(n_agents, lam, ticks, seed, cfg, variant)
    hu, ru = _multi_run(n_agents, 0.0, ticks, seed, cfg, variant)
    return MultiAgentResult(phase_spread(hc[-1]), phase_spread(hu[-1]), hc, hu, rc, ru)
