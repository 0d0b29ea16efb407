"""Suite runner: executes one experiment and writes traces plus summaries.

Layout under the output directory::

    <out>/<experiment>/traces/*.csv   one row per tick (or per seed for regimes)
    <out>/<experiment>/summary.csv    table-shaped summary
    <out>/<experiment>/summary.json   the same numbers, machine readable

Every summary number is recomputed from the trace files' contents, and
floats are written with ``repr`` so reruns are byte-identical.
"""

from __future__ import annotations

import csv
import io
import json
from dataclasses import dataclass, field, replace
from pathlib import Path

import numpy as np
import yaml

from .config import ExperimentConfig
from .environment import generate_shared_trajectory
from .metrics import summarize, trace_to_csv
from .pacing import (Ablation, ControllerKind, ControllerVariant, run_multi_agent,
                     run_on_trajectory)
from .spread import run_regime_experiment

SUMMARY_SCHEMA = "atcpg.suite_summary/1"

ABLATION_ROWS = (
    ("Full", ()),
    ("-Learning", (Ablation.NO_LEARNING,)),
    ("-Spread", (Ablation.NO_SPREAD,)),
    ("-IntervalReward", (Ablation.NAIVE_REWARD,)),
    ("-Exploration", (Ablation.NO_EXPLORATION,)),
)


@dataclass
class SuiteOutput:
    experiment: str
    directory: Path
    summary: dict
    files: list = field(default_factory=list)


def _num(v):
    if isinstance(v, (bool, np.bool_)):
        return bool(v)
    if isinstance(v, (int, np.integer)):
        return int(v)
    return float(v)


def _cell(v) -> str:
    if isinstance(v, bool):
        return "1" if v else "0"
    if isinstance(v, (float, np.floating)):
        return repr(float(v))
    return str(v)


def _csv_text(header, rows) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    for r in rows:
        w.writerow(_cell(v) for v in r)
    return buf.getvalue()


def _pct(new: float, ref: float) -> float:
    return 100.0 * (new - ref) / ref if ref else float("nan")


class _Writer:
    def __init__(self, root: Path):
        self.root = root
        self.files = []
        (root / "traces").mkdir(parents=True, exist_ok=True)

    def write(self, rel: str, text: str) -> Path:
        path = self.root / rel
        path.write_text(text)
        self.files.append(path)
        return path

    def trace(self, name: str, trace) -> None:
        self.write(f"traces/{name}.csv", trace_to_csv(trace.records))


def _slug(label: str) -> str:
    return label.strip("-").lower().replace(" ", "_").replace("-", "_") or "full"


def _result_fields(res) -> dict:
    d = res.to_dict()
    d.pop("schema")
    return {k: _num(v) for k, v in d.items()}


def _mean_results(results) -> dict:
    keys = _result_fields(results[0]).keys()
    return {k: float(np.mean([_result_fields(r)[k] for r in results])) for k in keys}


def _run_variant(variant, seeds, cfg: ExperimentConfig, w: _Writer, label: str):
    results = []
    with_pos = variant.kind is ControllerKind.ATCPG_SPATIOTEMPORAL
    for s in seeds:
        traj = generate_shared_trajectory(s, cfg.ticks, with_positions=with_pos, params=cfg.loop.env)
        _, trace = run_on_trajectory(variant, traj, cfg.loop)
        w.trace(f"{_slug(label)}_seed{s}", trace)
        results.append(summarize(trace))
    return results


def _ablation(cfg: ExperimentConfig, w: _Writer):
    base = cfg.variant
    rows, doc = [], {"rows": {}}
    full_eta = None
    for label, extra in ABLATION_ROWS:
        v = replace(base, ablations=frozenset(base.ablations) | frozenset(extra))
        m = _mean_results(_run_variant(v, cfg.seeds, cfg, w, label))
        full_eta = m["efficiency"] if full_eta is None else full_eta
        delta = None if label == "Full" else _pct(m["efficiency"], full_eta)
        rows.append((label, m["efficiency"], "" if delta is None else delta, "none",
                     len(cfg.seeds), m["mean_interval"], m["performance_score"]))
        doc["rows"][label] = {**m, "delta_vs_full_pct": delta, "seeds": list(cfg.seeds)}

    # baseline comparison on its own seed set
    full_b = _mean_results(_run_variant(base, cfg.baseline_seeds, cfg, w, "full_baseline_seeds"))
    fixed = _mean_results(_run_variant(ControllerVariant(ControllerKind.FIXED), cfg.baseline_seeds,
                                       cfg, w, "fixed"))
    adv = _pct(full_b["efficiency"], fixed["efficiency"])
    rows.append(("Fixed-interval baseline", fixed["efficiency"],
                 _pct(fixed["efficiency"], full_b["efficiency"]), "none",
                 len(cfg.baseline_seeds), fixed["mean_interval"], fixed["performance_score"]))
    tc = _mean_results(_run_variant(ControllerVariant(ControllerKind.TC_PRIVILEGED), cfg.seeds,
                                    cfg, w, "tc_privileged"))
    rows.append(("TC (privileged)", tc["efficiency"], _pct(tc["efficiency"], full_eta), "direct o_t",
                 len(cfg.seeds), tc["mean_interval"], tc["performance_score"]))
    doc["rows"]["Fixed-interval baseline"] = {**fixed, "seeds": list(cfg.baseline_seeds)}
    doc["rows"]["TC (privileged)"] = {**tc, "seeds": list(cfg.seeds)}
    doc["baseline_comparison"] = {"full_efficiency": full_b["efficiency"],
                                  "fixed_efficiency": fixed["efficiency"],
                                  "advantage_pct": adv, "seeds": list(cfg.baseline_seeds)}
    header = ("variant", "efficiency", "delta_vs_full_pct", "info_access", "n_seeds",
              "mean_interval", "performance_score")
    return header, rows, doc


H2H_METRICS = (
    ("Efficiency", "efficiency"),
    ("Avg interval (s)", "mean_interval"),
    ("Performance score", "performance_score"),
    ("kappa overload", "kappa_mean_overload"),
    ("kappa normal", "kappa_mean_normal"),
    ("kappa discriminability", "kappa_discriminability"),
)


def _headtohead(cfg: ExperimentConfig, w: _Writer):
    rows, doc = [], {"seeds": {}}
    tc_v = ControllerVariant(ControllerKind.TC_PRIVILEGED)
    at_v = replace(cfg.variant, kind=ControllerKind.ATCPG_STATE_ONLY)
    for s in cfg.seeds:
        traj = generate_shared_trajectory(s, cfg.ticks, params=cfg.loop.env)
        res = {}
        for label, v in (("tc_privileged", tc_v), ("atcpg_blind", at_v)):
            _, trace = run_on_trajectory(v, traj, cfg.loop)
            w.trace(f"{label}_seed{s}", trace)
            res[label] = _result_fields(summarize(trace))
        for name, key in H2H_METRICS:
            rows.append((s, name, res["tc_privileged"][key], res["atcpg_blind"][key]))
        rows.append((s, "Info access to o_t", "direct", "none"))
        gain = _pct(res["atcpg_blind"]["efficiency"], res["tc_privileged"]["efficiency"])
        doc["seeds"][str(s)] = {**res, "efficiency_gain_pct": gain}
    return ("seed", "metric", "tc_privileged", "atcpg_blind"), rows, doc


def _spatial(cfg: ExperimentConfig, w: _Writer):
    rows, doc = [], {"seeds": {}}
    so = replace(cfg.variant, kind=ControllerKind.ATCPG_STATE_ONLY)
    st = replace(cfg.variant, kind=ControllerKind.ATCPG_SPATIOTEMPORAL, positions="correlated")
    st_dec = replace(st, positions="decorrelated")
    for s in cfg.seeds:
        traj = generate_shared_trajectory(s, cfg.ticks, with_positions=True, params=cfg.loop.env)
        res = {}
        for label, v in (("ATCPG-SO", so), ("ATCPG-ST", st), ("ATCPG-ST decorrelated", st_dec)):
            _, trace = run_on_trajectory(v, traj, cfg.loop)
            w.trace(f"{_slug(label)}_seed{s}", trace)
            r = _result_fields(summarize(trace))
            res[label] = r
            rows.append((s, label, r["efficiency"], r["kappa_mean"], r["kappa_discriminability"],
                         r["kappa_mean_overload"], r["kappa_mean_normal"]))
        a, b = res["ATCPG-SO"], res["ATCPG-ST"]
        rows.append((s, "Gain (ST vs SO)", _pct(b["efficiency"], a["efficiency"]),
                     b["kappa_mean"] / a["kappa_mean"], "", "", ""))
        doc["seeds"][str(s)] = {
            **res,
            "efficiency_gain_pct": _pct(b["efficiency"], a["efficiency"]),
            "kappa_ratio": b["kappa_mean"] / a["kappa_mean"],
            "gap_correlated": b["efficiency"] - a["efficiency"],
            "gap_decorrelated": res["ATCPG-ST decorrelated"]["efficiency"] - a["efficiency"],
        }
    header = ("seed", "variant", "efficiency", "mean_kappa", "kappa_discriminability",
              "kappa_overload", "kappa_normal")
    return header, rows, doc


REGIME_CONSTRUCTION = {
    "Conflicted": "opposing dominant features near the boundary",
    "Confident": "stable signal in the ball interior",
    "Noise": "near-zero state in the Euclidean limit",
}


def _regimes(cfg: ExperimentConfig, w: _Writer):
    rs = cfg.regimes
    per_seed = []
    for s in cfg.seeds:
        for row in run_regime_experiment(s, rs.n_samples, rs.dropout_rate, rs.dim, cfg.loop.geometry):
            per_seed.append((s, row.regime.value, row.mean_radius, row.kappa, row.ratio_vs_confident))
    w.write("traces/regimes_per_seed.csv",
            _csv_text(("seed", "regime", "mean_radius", "kappa", "ratio_vs_confident"), per_seed))
    rows, doc = [], {"regimes": {}, "seeds": list(cfg.seeds)}
    names = list(dict.fromkeys(r[1] for r in per_seed))
    means = {n: np.mean([r[2:4] for r in per_seed if r[1] == n], axis=0) for n in names}
    ref = means["Confident"][1]
    for n in names:
        rad, kap = (float(x) for x in means[n])
        rows.append((n, REGIME_CONSTRUCTION[n], rad, kap, kap / ref))
        doc["regimes"][n] = {"mean_radius": rad, "kappa": kap, "ratio_vs_confident": kap / ref}
    return ("regime", "construction", "mean_radius", "kappa", "ratio_vs_confident"), rows, doc


def _multiagent(cfg: ExperimentConfig, w: _Writer):
    ma = cfg.multiagent
    rows, doc = [], {"seeds": {}}
    for s in cfg.seeds:
        res = run_multi_agent(ma.n_agents, ma.coupling, cfg.ticks, s, cfg.loop, cfg.variant)
        n = ma.n_agents
        hist = [(t, cond, i, float(h[i]))
                for cond, hh in (("coupled", res.phases_coupled), ("uncoupled", res.phases_uncoupled))
                for t, h in enumerate(hh) for i in range(n)]
        w.write(f"traces/phases_seed{s}.csv", _csv_text(("round", "condition", "agent", "phase"), hist))
        for cond, hh, results in (("coupled", res.phases_coupled, res.results_coupled),
                                  ("uncoupled", res.phases_uncoupled, res.results_uncoupled)):
            final = hh[-1]
            spread = float(final.max() - final.min())
            eta = float(np.mean([r.efficiency for r in results]))
            rows.append((s, cond, ma.coupling if cond == "coupled" else 0.0, spread, eta))
            doc["seeds"].setdefault(str(s), {})[cond] = {
                "final_phase_spread": spread, "mean_efficiency": eta,
                "agent_efficiency": [float(r.efficiency) for r in results]}
    return ("seed", "condition", "coupling", "final_phase_spread", "mean_efficiency"), rows, doc


def _single(cfg: ExperimentConfig, w: _Writer):
    rows, doc = [], {"variant": {"kind": cfg.variant.kind.value,
                                 "ablations": sorted(a.value for a in cfg.variant.ablations),
                                 "positions": cfg.variant.positions}, "seeds": {}}
    results = _run_variant(cfg.variant, cfg.seeds, cfg, w, "run")
    header = None
    for s, r in zip(cfg.seeds, results):
        d = _result_fields(r)
        header = ("seed", *d.keys())
        rows.append((s, *d.values()))
        doc["seeds"][str(s)] = d
    return header, rows, doc


RUNNERS = {
    "ablation": _ablation,
    "headtohead": _headtohead,
    "spatial": _spatial,
    "regimes": _regimes,
    "multiagent": _multiagent,
    "single": _single,
}


def _json_safe(x):
    if isinstance(x, dict):
        return {k: _json_safe(v) for k, v in x.items()}
    if isinstance(x, (list, tuple)):
        return [_json_safe(v) for v in x]
    if isinstance(x, float) and not np.isfinite(x):
        return None
    return x


def run_suite(cfg: ExperimentConfig, out_dir=None) -> SuiteOutput:
    """Run ``cfg.experiment`` and write its files; returns what was written.

    Raises ``OSError`` when the output directory cannot be written.
    """
    root = Path(out_dir if out_dir is not None else cfg.output_dir) / cfg.experiment
    w = _Writer(root)
    header, rows, doc = RUNNERS[cfg.experiment](cfg, w)
    w.write("summary.csv", _csv_text(header, rows))
    summary = {"schema": SUMMARY_SCHEMA, "experiment": cfg.experiment, "ticks": cfg.ticks,
               "config": cfg.to_dict(), "results": _json_safe(doc)}
    # the output location is not part of the result, so drop it for byte-identity
    summary["config"].pop("output_dir")
    w.write("summary.json", json.dumps(summary, indent=2, sort_keys=True) + "\n")
    w.write("config.yaml", yaml.safe_dump(summary["config"], sort_keys=False))
    return SuiteOutput(cfg.experiment, root, summary, w.files)
