"""Run-level metrics computed from a tick trace."""

from __future__ import annotations

import csv
import io
import math
from dataclasses import asdict, dataclass

import numpy as np

RESULT_SCHEMA = "atcpg.run_result/1"
TRACE_COLUMNS = (
    "tick", "priority", "fatigue", "wellbeing_delta_prev", "performance", "sin_phase",
    "kappa", "predicted_interval", "interval", "clock", "latency", "wellbeing_delta",
    "wellbeing", "overload", "success", "efficiency_term", "spacing_term", "spread_term",
    "reward", "phase", "omega", "weights_hash",
)


@dataclass(frozen=True)
class TickRecord:
    tick: int
    priority: float
    fatigue: float
    wellbeing_delta_prev: float
    performance: float
    sin_phase: float
    kappa: float
    predicted_interval: float
    interval: float
    clock: float
    latency: float
    wellbeing_delta: float
    wellbeing: float
    overload: bool
    success: bool
    efficiency_term: float
    spacing_term: float
    spread_term: float
    reward: float
    phase: float
    omega: float
    weights_hash: str


@dataclass(frozen=True)
class RunResult:
    efficiency: float
    performance_score: float
    wellbeing_std: float
    mean_interval: float
    kappa_mean: float
    kappa_mean_overload: float
    kappa_mean_normal: float
    kappa_discriminability: float
    total_ticks: int

    def to_dict(self) -> dict:
        return {"schema": RESULT_SCHEMA, **asdict(self)}


def efficiency(successes, intervals) -> float:
    """eta = (1/T) * sum(success_t / dt_t)."""
    x = np.asarray(successes, dtype=float)
    dt = np.asarray(intervals, dtype=float)
    if x.shape != dt.shape:
        raise ValueError(f"length mismatch: {x.shape} vs {dt.shape}")
    if x.size == 0:
        raise ValueError("need at least one tick")
    if np.any(dt <= 0):
        raise ValueError("intervals must be positive")
    return float(np.mean(x / dt))


def _mean_or_nan(a) -> float:
    return float(np.mean(a)) if len(a) else math.nan


def summarize(trace) -> RunResult:
    """Aggregate a sequence of :class:`TickRecord` (or a trace with ``.records``)."""
    records = getattr(trace, "records", trace)
    if not records:
        raise ValueError("empty trace")
    succ = np.array([r.success for r in records], dtype=float)
    dt = np.array([r.interval for r in records])
    wb = np.array([r.wellbeing for r in records])
    kap = np.array([r.kappa for r in records])
    ol = np.array([r.overload for r in records], dtype=bool)
    k_ol = _mean_or_nan(kap[ol])
    k_nl = _mean_or_nan(kap[~ol])
    disc = k_ol / k_nl if k_nl > 0 else math.nan
    return RunResult(
        efficiency=efficiency(succ, dt),
        performance_score=float(succ.mean()),
        wellbeing_std=float(wb.std()),
        mean_interval=float(dt.mean()),
        kappa_mean=float(kap.mean()),
        kappa_mean_overload=k_ol,
        kappa_mean_normal=k_nl,
        kappa_discriminability=disc,
        total_ticks=len(records),
    )


def _fmt(v) -> str:
    if isinstance(v, (bool, np.bool_)):
        return "1" if v else "0"
    if isinstance(v, (float, np.floating)):
        return repr(float(v))
    return str(v)


def trace_to_csv(records) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(TRACE_COLUMNS)
    for r in records:
        w.writerow(_fmt(getattr(r, c)) for c in TRACE_COLUMNS)
    return buf.getvalue()


def trace_from_csv(text: str) -> list[TickRecord]:
    """Inverse of :func:`trace_to_csv`; floats round-trip exactly via repr."""
    rows = csv.DictReader(io.StringIO(text))
    if tuple(rows.fieldnames or ()) != TRACE_COLUMNS:
        raise ValueError("unexpected trace columns")
    out = []
    for row in rows:
        kw = {}
        for c in TRACE_COLUMNS:
            v = row[c]
            if c == "tick":
                kw[c] = int(v)
            elif c in ("overload", "success"):
                kw[c] = v == "1"
            elif c == "weights_hash":
                kw[c] = v
            else:
                kw[c] = float(v)
        out.append(TickRecord(**kw))
    return out
