"""Seeded Monte-Carlo campaigns over SNR, receive antennas, power budget and rho."""

from __future__ import annotations

import csv
import json
import logging
import math
import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field, replace
from pathlib import Path

import numpy as np

from . import __version__
from .channel import generate_channel
from .config import SystemConfig, default_system, system_to_dict, validate
from .errors import ConfigurationError, JrcError
from .hybrid import design_hybrid
from .metrics import energy_efficiency, power_consumed, rate
from .radar import DEFAULT_GRID_DEG, build_radar_precoder, ideal_beampattern, precoder_beampattern
from .rfselect import effective_gains, select_rf_chains

log = logging.getLogger(__name__)

EXPERIMENTS = ("ee_rate_vs_snr", "ee_rate_vs_nrx", "rfchain_pmf", "beampattern")

CSV_COLUMNS = (
    "trial", "experiment", "snr_db", "rho", "n_rx", "p_max_w", "l_opt",
    "rate_bps_hz", "power_w", "ee_bits_hz_j",
    "baseline_rate_bps_hz", "baseline_power_w", "baseline_ee_bits_hz_j",
    "converged_rf", "converged_hybrid",
)

# Per-experiment sweep defaults. The swept axis takes a list; the others
# are fixed at their first entry.
DEFAULT_SWEEPS = {
    "ee_rate_vs_snr": {"snr_db": [-30, -25, -20, -15, -10, -5, 0, 5, 10], "rho": [0.4, 0.6, 0.8, 1.0]},
    "ee_rate_vs_nrx": {"snr_db": [-5], "n_rx": [3, 4, 5, 6, 7, 8], "rho": [0.4, 0.6, 0.8, 1.0]},
    "rfchain_pmf": {"snr_db": [0], "p_max": [1.0, 0.25], "rho": [1.0]},
    "beampattern": {"snr_db": [0], "rho": [0.2, 0.4, 0.6]},
}
SWEPT_AXIS = {"ee_rate_vs_snr": "snr_db", "ee_rate_vs_nrx": "n_rx", "rfchain_pmf": "p_max", "beampattern": None}


@dataclass
class ExperimentSpec:
    experiment: str = "ee_rate_vs_snr"
    trials: int = 1000
    master_seed: int = 0
    sweep: dict = field(default_factory=dict)
    system: SystemConfig = field(default_factory=default_system)
    workers: int = 1
    keep_traces: bool = False

    def resolved_sweep(self) -> dict:
        s = {k: list(v) for k, v in DEFAULT_SWEEPS[self.experiment].items()}
        s.update({k: list(v) for k, v in self.sweep.items()})
        return s

    def points(self) -> list[dict]:
        s = self.resolved_sweep()
        base = {
            "snr_db": float(s["snr_db"][0]),
            "n_rx": int(s.get("n_rx", [self.system.channel.n_rx])[0]),
            "p_max_w": float(s.get("p_max", [self.system.p_max])[0]),
        }
        axis = SWEPT_AXIS[self.experiment]
        if axis is None:
            return [base]
        key = {"snr_db": "snr_db", "n_rx": "n_rx", "p_max": "p_max_w"}[axis]
        cast = int if axis == "n_rx" else float
        return [{**base, key: cast(v)} for v in s[axis]]

    def rhos(self) -> list[float]:
        return [float(r) for r in self.resolved_sweep()["rho"]]

    def violations(self) -> list[str]:
        out = []
        if self.experiment not in EXPERIMENTS:
            return [f"unknown experiment {self.experiment!r}; choose from {', '.join(EXPERIMENTS)}"]
        if self.trials < 1:
            out.append("trials must be >= 1")
        if self.master_seed < 0:
            out.append("master_seed must be >= 0")
        unknown = set(self.sweep) - {"snr_db", "rho", "p_max", "n_rx"}
        if unknown:
            out.append(f"unknown sweep keys {sorted(unknown)}")
        s = self.resolved_sweep()
        if any(len(v) == 0 for v in s.values()):
            out.append("sweep lists must be nonempty")
            return out
        rhos = self.rhos()
        for pt in self.points():
            sysc = point_system(self.system, pt)
            for v in validate(sysc, rhos):
                msg = f"{v} (at n_rx={pt['n_rx']}, p_max={pt['p_max_w']})"
                if msg not in out:
                    out.append(msg)
        return out


@dataclass
class ExperimentResult:
    records: list[dict]
    summary: dict
    metadata: dict
    patterns: dict | None = None


def point_system(system: SystemConfig, point: dict) -> SystemConfig:
    s = system
    if point["n_rx"] != s.channel.n_rx:
        s = s.with_n_rx(point["n_rx"])
    if point["p_max_w"] != s.p_max:
        s = s.with_p_max(point["p_max_w"])
    return s


def _hybrid_rng(trial_seed: int, rho: float) -> np.random.Generator:
    return np.random.default_rng([trial_seed, int(round(rho * 1_000_000))])


def evaluate_point(system: SystemConfig, snr_db: float, rhos, trial_seed: int,
                   grid_deg=None, keep_traces: bool = False) -> list[dict]:
    """Run the full pipeline on one channel draw for every rho.

    The channel, chain selection and fully-digital baseline are shared by
    all rho values, so comparisons across rho are paired.
    """
    ch_cfg = system.channel
    pm = system.power
    n_tx = ch_cfg.n_tx
    noise_var = 10.0 ** (-snr_db / 10.0)
    chan = generate_channel(ch_cfg, np.random.default_rng(trial_seed), pm.p_max)

    gains = effective_gains(chan.H, chan.W, n_tx, system.l_avail, beams=system.gain_beams)
    sel = select_rf_chains(gains, noise_var, pm, system.rfselect, n_tx=n_tx)

    ns = ch_cfg.n_streams
    base_rate = rate(chan.H, chan.W, chan.F_DF, np.eye(ns), noise_var)
    base_power = power_consumed(chan.F_DF, np.eye(ns), n_tx, pm, n_tx, n_phase_shifters=0)
    F_RD = build_radar_precoder(system.scene(), ch_cfg.spacing_ratio).F_RD

    out = []
    for rho in rhos:
        rec = {"rho": float(rho), "l_opt": sel.l_opt, "converged_rf": sel.converged,
               "baseline_rate_bps_hz": base_rate, "baseline_power_w": base_power,
               "baseline_ee_bits_hz_j": energy_efficiency(base_rate, base_power),
               "rate_infeasible": sel.rate_infeasible}
        hp = design_hybrid(chan.F_DF, F_RD, system.hybrid_for(rho), sel.l_opt, _hybrid_rng(trial_seed, rho))
        r = rate(chan.H, chan.W, hp.F_RF, hp.F_BB, noise_var)
        p = power_consumed(hp.F_RF, hp.F_BB, hp.l_t, pm, n_tx)
        rec.update(rate_bps_hz=r, power_w=p, ee_bits_hz_j=energy_efficiency(r, p),
                   converged_hybrid=hp.converged, l_t_used=hp.l_t, restarts=hp.restarts)
        if keep_traces:
            rec["nu_trace"] = list(sel.nu_trace)
            rec["g_trace"] = list(sel.g_trace)
            rec["objective_trace"] = list(hp.objective_trace)
        if grid_deg is not None:
            rec["_pattern"] = precoder_beampattern(hp.precoder, np.deg2rad(grid_deg), ch_cfg.spacing_ratio)
        out.append(rec)
    return out


def run_trial(system: SystemConfig, snr_db: float, rho: float, trial_seed: int) -> dict:
    """Single-trial record for one SNR and weighting factor."""
    return evaluate_point(system, snr_db, [rho], trial_seed)[0]


_METRIC_KEYS = ("l_opt", "rate_bps_hz", "power_w", "ee_bits_hz_j", "baseline_rate_bps_hz",
                "baseline_power_w", "baseline_ee_bits_hz_j", "converged_rf", "converged_hybrid")


def _run_one_trial(args) -> list[dict]:
    spec, trial, points, rhos, grid = args
    seed = spec.master_seed + trial
    recs = []
    for ip, pt in enumerate(points):
        sysc = point_system(spec.system, pt)
        head = {"trial": trial, "experiment": spec.experiment, "snr_db": pt["snr_db"],
                "n_rx": pt["n_rx"], "p_max_w": pt["p_max_w"], "point": ip}
        try:
            rows = evaluate_point(sysc, pt["snr_db"], rhos, seed, grid, spec.keep_traces)
        except (JrcError, np.linalg.LinAlgError, FloatingPointError) as exc:
            log.warning("trial %d point %d failed: %s", trial, ip, exc)
            rows = [{"rho": r, **{k: None for k in _METRIC_KEYS}, "error": f"{type(exc).__name__}: {exc}"}
                    for r in rhos]
        for row in rows:
            recs.append({**head, **row})
    return recs


def _check_writable(path: Path):
    parent = path.parent if str(path.parent) else Path(".")
    if not parent.is_dir():
        raise OSError(f"output directory does not exist: {parent}")
    if not os.access(parent, os.W_OK) or (path.exists() and not os.access(path, os.W_OK)):
        raise OSError(f"output path is not writable: {path}")


def run_experiment(spec: ExperimentSpec, out: str | os.PathLike | None = None,
                   fmt: str | None = None) -> ExperimentResult:
    bad = spec.violations()
    if bad:
        raise ConfigurationError(bad)
    if out is not None:
        _check_writable(Path(out))

    points = spec.points()
    rhos = spec.rhos()
    grid = DEFAULT_GRID_DEG if spec.experiment == "beampattern" else None
    tasks = [(spec, t, points, rhos, grid) for t in range(spec.trials)]
    if spec.workers > 1 and spec.trials > 1:
        with ProcessPoolExecutor(max_workers=spec.workers) as ex:
            chunks = list(ex.map(_run_one_trial, tasks, chunksize=max(1, spec.trials // (4 * spec.workers))))
    else:
        chunks = [_run_one_trial(t) for t in tasks]

    records = sorted((r for c in chunks for r in c), key=lambda r: (r["trial"], r["point"], r["rho"]))
    patterns = None
    if grid is not None:
        patterns = _aggregate_patterns(records, rhos, grid, spec.system)
    for r in records:
        r.pop("_pattern", None)
    summary = summarize(records, points, rhos, spec.system)
    if patterns is not None:
        summary["beampattern"] = patterns
    result = ExperimentResult(records=records, summary=summary,
                              metadata=_metadata(spec, points, rhos), patterns=patterns)
    if out is not None:
        emit_results(result, fmt or _format_from_suffix(out), out)
    return result


def _aggregate_patterns(records, rhos, grid, system) -> dict:
    out = {"angles_deg": [float(a) for a in grid]}
    total = np.zeros(len(grid))
    for rho in rhos:
        pats = [r["_pattern"] for r in records if r["rho"] == rho and r.get("_pattern") is not None]
        mean = np.mean(pats, axis=0) if pats else np.full(len(grid), np.nan)
        out[f"rho={rho:g}"] = mean.tolist()
        total += mean
    ideal = ideal_beampattern(system.scene(), np.deg2rad(grid), reference=total / len(rhos),
                              spacing_ratio=system.channel.spacing_ratio)
    out["ideal"] = ideal.tolist()
    return out


def _mean(vals):
    return float(np.mean(vals)) if vals else None


def summarize(records, points, rhos, system: SystemConfig) -> dict:
    rows = []
    pmf = []
    for ip, pt in enumerate(points):
        at_point = [r for r in records if r["point"] == ip]
        for rho in rhos:
            cell = [r for r in at_point if r["rho"] == rho]
            ok = [r for r in cell if r.get("error") is None]
            row = {"point": ip, **pt, "rho": rho, "n": len(ok), "n_failed": len(cell) - len(ok)}
            for k in _METRIC_KEYS:
                row[f"mean_{k}"] = _mean([float(r[k]) for r in ok])
            rows.append(row)
        # one chain count per trial: take the first rho's records
        first = [r for r in at_point if r["rho"] == rhos[0] and r.get("error") is None]
        l_max = point_system(system, pt).l_avail
        counts = {str(l): 0 for l in range(1, l_max + 1)}
        for r in first:
            counts[str(r["l_opt"])] = counts.get(str(r["l_opt"]), 0) + 1
        pmf.append({"point": ip, **pt, "counts": counts, "n": len(first)})
    return {"cells": rows, "l_opt_pmf": pmf}


def _metadata(spec: ExperimentSpec, points, rhos) -> dict:
    return {
        "experiment": spec.experiment,
        "trials": spec.trials,
        "master_seed": spec.master_seed,
        "seed_rule": "channel rng = default_rng(master_seed + trial); "
                     "hybrid init rng = default_rng([master_seed + trial, round(rho * 1e6)])",
        "sweep": spec.resolved_sweep(),
        "points": points,
        "rhos": rhos,
        "system": system_to_dict(spec.system),
        "version": __version__,
        "assumptions": {
            "amplifier_inefficiency_a": spec.system.power.a,
            "path_gain_variance": 1.0,
            "snr_definition": "1 / noise_var, transmit power excluded",
            "baseline_power": "L_T = N_T chains, no phase shifters, radiated power a * P_max",
            "effective_gain_beams": spec.system.gain_beams,
            "sweep_defaults_are_choices": True,
        },
    }


# -- output -------------------------------------------------------------------

def _format_from_suffix(path) -> str:
    return "json" if str(path).lower().endswith(".json") else "csv"


def _cell(v):
    if v is None:
        return ""
    if isinstance(v, (bool, np.bool_)):
        return "true" if v else "false"
    if isinstance(v, float) and math.isnan(v):
        return ""
    return v


def _jsonable(obj):
    if isinstance(obj, dict):
        return {k: _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonable(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return _jsonable(obj.tolist())
    if isinstance(obj, np.generic):
        return obj.item()
    if isinstance(obj, float) and not math.isfinite(obj):
        return None
    return obj


def emit_results(result: ExperimentResult, fmt: str, path) -> list[Path]:
    """Write ``result`` as CSV or JSON; returns the files written."""
    path = Path(path)
    written = []
    try:
        if fmt == "csv":
            with open(path, "w", newline="") as fh:
                w = csv.writer(fh, lineterminator="\n")
                w.writerow(CSV_COLUMNS)
                for r in result.records:
                    w.writerow([_cell(r.get(c)) for c in CSV_COLUMNS])
            written.append(path)
            if result.patterns:
                bp = path.with_name(path.stem + "_beampattern.csv")
                keys = [k for k in result.patterns if k != "angles_deg"]
                with open(bp, "w", newline="") as fh:
                    w = csv.writer(fh, lineterminator="\n")
                    w.writerow(["angle_deg", *keys])
                    for i, a in enumerate(result.patterns["angles_deg"]):
                        w.writerow([a, *(result.patterns[k][i] for k in keys)])
                written.append(bp)
        elif fmt == "json":
            doc = {"metadata": result.metadata, "records": result.records, "summary": result.summary}
            with open(path, "w") as fh:
                json.dump(_jsonable(doc), fh, indent=1, allow_nan=False)
            written.append(path)
        else:
            raise ValueError(f"unknown format {fmt!r}")
    except (OSError, TypeError) as exc:
        raise OSError(f"could not write results to {path}: {exc}") from exc
    return written


def spec_from_dict(d: dict, base: ExperimentSpec | None = None) -> ExperimentSpec:
    from .config import system_from_dict

    base = base or ExperimentSpec()
    known = {"experiment", "trials", "master_seed", "sweep", "system", "workers", "keep_traces"}
    unknown = set(d) - known
    if unknown:
        raise KeyError(f"unknown config keys: {sorted(unknown)}")
    spec = replace(base, **{k: v for k, v in d.items() if k != "system"})
    if "system" in d:
        spec = replace(spec, system=system_from_dict(d["system"], base.system))
    return spec
