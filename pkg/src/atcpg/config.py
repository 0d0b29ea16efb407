"""Experiment configuration: YAML file format, defaults and validation.

A config file is a YAML mapping. Every key is optional except
``experiment``; missing values fall back to the defaults of the module
dataclasses. Unknown keys are rejected so a typo never silently runs the
default.
"""

from __future__ import annotations

import dataclasses
from dataclasses import dataclass, field
from pathlib import Path

import yaml

from .embedding import EmbeddingConfig
from .environment import EnvParams
from .geometry import DistanceForm, GeometryConfig
from .pacing import Ablation, ControllerKind, ControllerVariant, LoopConfig
from .policy import PolicyConfig, PolicyWeights
from .reward import RewardCoefficients

EXPERIMENTS = ("ablation", "headtohead", "spatial", "regimes", "multiagent", "single")

DEFAULT_SEEDS = {
    "ablation": (1, 2, 3),
    "headtohead": (42,),
    "spatial": (99,),
    "regimes": tuple(range(10)),
    "multiagent": (0,),
    "single": (0,),
}
DEFAULT_TICKS = {"multiagent": 100}
BASELINE_SEEDS = (1, 2, 3, 4, 5)

# section name -> dataclass holding that section's fields
SECTIONS = {
    "geometry": GeometryConfig,
    "embedding": EmbeddingConfig,
    "policy": PolicyConfig,
    "reward": RewardCoefficients,
    "env": EnvParams,
    "initial_weights": PolicyWeights,
}
TOP_LEVEL = ("experiment", "seeds", "ticks", "output_dir", "variant", "baseline_seeds",
             "multiagent", "regimes", "omega0", *SECTIONS)


class ConfigError(ValueError):
    """Invalid configuration; ``diagnostics`` holds one message per problem."""

    def __init__(self, diagnostics):
        self.diagnostics = list(diagnostics)
        super().__init__("\n".join(self.diagnostics))


@dataclass(frozen=True)
class MultiAgentSettings:
    n_agents: int = 5
    coupling: float = 0.05

    def __post_init__(self):
        if self.n_agents < 2:
            raise ValueError("n_agents must be >= 2")
        if not 0.0 <= self.coupling <= 1.0:
            raise ValueError("coupling must lie in [0, 1]")


@dataclass(frozen=True)
class RegimeSettings:
    n_samples: int = 200
    dropout_rate: float = 0.2
    dim: int = 6

    def __post_init__(self):
        if self.n_samples < 2:
            raise ValueError("n_samples must be >= 2")
        if not 0.0 < self.dropout_rate < 1.0:
            raise ValueError("dropout_rate must lie in (0, 1)")
        if self.dim < 2:
            raise ValueError("dim must be >= 2")


@dataclass(frozen=True)
class ExperimentConfig:
    experiment: str
    seeds: tuple = ()
    ticks: int = 500
    loop: LoopConfig = field(default_factory=LoopConfig)
    variant: ControllerVariant = field(default_factory=ControllerVariant)
    output_dir: str = "results"
    baseline_seeds: tuple = BASELINE_SEEDS
    multiagent: MultiAgentSettings = field(default_factory=MultiAgentSettings)
    regimes: RegimeSettings = field(default_factory=RegimeSettings)

    def __post_init__(self):
        if self.experiment not in EXPERIMENTS:
            raise ValueError(f"unknown experiment {self.experiment!r}; valid: {', '.join(EXPERIMENTS)}")
        seeds = tuple(self.seeds) or DEFAULT_SEEDS[self.experiment]
        object.__setattr__(self, "seeds", tuple(int(s) for s in seeds))
        object.__setattr__(self, "baseline_seeds", tuple(int(s) for s in self.baseline_seeds))
        if self.ticks < 1:
            raise ValueError("ticks must be >= 1")
        if not self.baseline_seeds:
            raise ValueError("baseline_seeds must be non-empty")

    def to_dict(self) -> dict:
        loop = self.loop
        doc = {
            "experiment": self.experiment,
            "seeds": list(self.seeds),
            "ticks": self.ticks,
            "output_dir": self.output_dir,
            "omega0": loop.omega0,
            "variant": {
                "kind": self.variant.kind.value,
                "ablations": sorted(a.value for a in self.variant.ablations),
                "positions": self.variant.positions,
            },
            "baseline_seeds": list(self.baseline_seeds),
            "multiagent": dataclasses.asdict(self.multiagent),
            "regimes": dataclasses.asdict(self.regimes),
        }
        for name in SECTIONS:
            sec = getattr(loop, name)
            doc[name] = {f.name: _plain(getattr(sec, f.name)) for f in dataclasses.fields(sec)}
        return doc

    def to_yaml(self) -> str:
        return yaml.safe_dump(self.to_dict(), sort_keys=False)


def _plain(v):
    return v.value if isinstance(v, DistanceForm) else v


def default_config(experiment: str) -> ExperimentConfig:
    return ExperimentConfig(experiment, ticks=DEFAULT_TICKS.get(experiment, 500))


def _line_index(text: str) -> dict:
    """Map key paths like ('policy', 'dt_min') to 1-based line numbers."""
    lines = {}

    def walk(node, path):
        if isinstance(node, yaml.MappingNode):
            for k, v in node.value:
                key = (*path, str(k.value))
                lines[key] = k.start_mark.line + 1
                walk(v, key)

    try:
        root = yaml.compose(text)
    except yaml.YAMLError:
        return lines
    if root is not None:
        walk(root, ())
    return lines


def _as_int_list(value, name, diag, where):
    if isinstance(value, int) and not isinstance(value, bool):
        value = [value]
    if not isinstance(value, list) or not all(isinstance(s, int) and not isinstance(s, bool)
                                              for s in value):
        diag.append(f"{where(name)}: {name} must be a list of integers")
        return None
    return tuple(value)


def config_from_dict(doc, source: str = "<config>", lines: dict | None = None) -> ExperimentConfig:
    """Build and validate a config; collects every problem before raising."""
    lines = lines or {}
    diag = []

    def where(*path):
        ln = lines.get(tuple(path))
        if ln is None and len(path) > 1:
            ln = lines.get(tuple(path[:1]))
        return f"{source}:{ln}" if ln else source

    if not isinstance(doc, dict):
        raise ConfigError([f"{source}: top level must be a mapping"])
    for key in doc:
        if key not in TOP_LEVEL:
            diag.append(f"{where(key)}: unknown key {key!r}")
    exp = doc.get("experiment")
    if exp is None:
        diag.append(f"{source}: missing required key 'experiment' (one of {', '.join(EXPERIMENTS)})")
    elif exp not in EXPERIMENTS:
        diag.append(f"{where('experiment')}: unknown experiment {exp!r}; valid: {', '.join(EXPERIMENTS)}")

    sections = {}
    for name, cls in SECTIONS.items():
        raw = doc.get(name) or {}
        if not isinstance(raw, dict):
            diag.append(f"{where(name)}: section {name!r} must be a mapping")
            continue
        valid = {f.name for f in dataclasses.fields(cls)}
        bad = [k for k in raw if k not in valid]
        for k in bad:
            diag.append(f"{where(name, k)}: unknown {name} field {k!r}; valid: {', '.join(sorted(valid))}")
        if bad:
            continue
        try:
            sections[name] = cls(**raw)
        except (TypeError, ValueError) as e:
            # point at the field the message names first
            named = sorted((str(e).find(k), k) for k in raw if k in str(e))
            loc = where(name, named[0][1]) if named else where(name)
            diag.append(f"{loc}: invalid {name}: {e}")

    # the policy's base interval also drives the environment's fatigue recovery
    if "policy" in sections and "env" in sections:
        env_raw = doc.get("env") or {}
        dt_base = sections["policy"].dt_base
        if "dt_base" in env_raw and env_raw["dt_base"] != dt_base:
            diag.append(f"{where('env', 'dt_base')}: env.dt_base must equal policy.dt_base ({dt_base})")
        else:
            sections["env"] = dataclasses.replace(sections["env"], dt_base=dt_base)

    variant = None
    raw_v = doc.get("variant") or {}
    if not isinstance(raw_v, dict):
        diag.append(f"{where('variant')}: variant must be a mapping")
    else:
        for k in raw_v:
            if k not in ("kind", "ablations", "positions"):
                diag.append(f"{where('variant', k)}: unknown variant field {k!r}")
        kind = raw_v.get("kind", ControllerKind.ATCPG_STATE_ONLY.value)
        abl = raw_v.get("ablations", []) or []
        valid_kinds = [k.value for k in ControllerKind]
        valid_abl = [a.value for a in Ablation]
        ok = True
        if kind not in valid_kinds:
            diag.append(f"{where('variant', 'kind')}: unknown controller kind {kind!r}; "
                        f"valid: {', '.join(valid_kinds)}")
            ok = False
        if not isinstance(abl, list):
            diag.append(f"{where('variant', 'ablations')}: ablations must be a list")
            ok = False
        else:
            for a in abl:
                if a not in valid_abl:
                    diag.append(f"{where('variant', 'ablations')}: unknown ablation flag {a!r}; "
                                f"valid: {', '.join(valid_abl)}")
                    ok = False
        if ok:
            try:
                variant = ControllerVariant(kind, frozenset(abl), raw_v.get("positions", "correlated"))
            except ValueError as e:
                diag.append(f"{where('variant')}: {e}")

    extras = {}
    for name, cls in (("multiagent", MultiAgentSettings), ("regimes", RegimeSettings)):
        raw = doc.get(name) or {}
        try:
            extras[name] = cls(**raw)
        except (TypeError, ValueError) as e:
            diag.append(f"{where(name)}: invalid {name}: {e}")

    kw = {}
    for name in ("seeds", "baseline_seeds"):
        if name in doc:
            val = _as_int_list(doc[name], name, diag, where)
            if val is not None:
                if not val:
                    diag.append(f"{where(name)}: {name} must be non-empty")
                kw[name] = val
    ticks = doc.get("ticks", DEFAULT_TICKS.get(exp, 500))
    if not isinstance(ticks, int) or isinstance(ticks, bool) or ticks < 1:
        diag.append(f"{where('ticks')}: ticks must be an integer >= 1, got {ticks!r}")
    out = doc.get("output_dir", "results")
    if not isinstance(out, str) or not out:
        diag.append(f"{where('output_dir')}: output_dir must be a non-empty string")
    omega0 = doc.get("omega0", 0.05)
    if not isinstance(omega0, (int, float)) or isinstance(omega0, bool):
        diag.append(f"{where('omega0')}: omega0 must be a number")

    if diag:
        raise ConfigError(diag)
    loop = LoopConfig(omega0=float(omega0), **sections)
    try:
        return ExperimentConfig(exp, ticks=ticks, loop=loop, variant=variant, output_dir=out,
                                **kw, **extras)
    except ValueError as e:
        raise ConfigError([f"{source}: {e}"]) from None


def parse_config(text: str, source: str = "<config>") -> ExperimentConfig:
    try:
        doc = yaml.safe_load(text)
    except yaml.YAMLError as e:
        mark = getattr(e, "problem_mark", None)
        ln = f":{mark.line + 1}" if mark is not None else ""
        raise ConfigError([f"{source}{ln}: YAML parse error: {getattr(e, 'problem', e)}"]) from None
    return config_from_dict(doc, source, _line_index(text))


def validate_config(path) -> ExperimentConfig:
    """Read, parse and validate a config file; raises :class:`ConfigError`."""
    path = Path(path)
    if not path.is_file():
        raise ConfigError([f"{path}: no such config file"])
    return parse_config(path.read_text(), str(path))
