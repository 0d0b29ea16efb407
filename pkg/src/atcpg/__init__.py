"""Adaptive tick pacing driven by predictive spread in the Poincaré ball."""

from .config import ExperimentConfig, validate_config
from .embedding import EmbeddingConfig, FutureSample, embed_joint, embed_state
from .environment import EnvParams, Environment, SharedTrajectory, generate_shared_trajectory
from .geometry import GeometryConfig, PoincarePoint, mobius_add, poincare_distance, project
from .harness import run_suite
from .metrics import RunResult, efficiency, summarize
from .pacing import (Ablation, ControllerKind, ControllerVariant, LoopConfig, run_headtohead,
                     run_multi_agent, run_single, run_spatial_ablation)
from .policy import PolicyConfig, PolicyWeights, TickContext, predict_interval, update_weights
from .reward import RewardCoefficients, interval_aware_reward, naive_reward
from .spread import predictive_spread, run_regime_experiment

__version__ = "0.1.0"
