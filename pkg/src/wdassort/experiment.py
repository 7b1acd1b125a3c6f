"""Replicated ensemble experiments producing long-format records.

A design maps one swept parameter value and a random source to a set of
metrics. Replicate ``r`` of every cell is seeded with ``base_seed + r``, so any
single replicate can be rerun in isolation.
"""

from __future__ import annotations

import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from .assort import assortativity_profile
from .errors import ConfigError, WdassortError
from .gen import BaConfig, ErConfig, SbmConfig, gen_ba, gen_er, gen_sbm
from .rewire import RewireConfig, StrengthDistribution, run_rewire


@dataclass(frozen=True)
class Record:
    replicate: int
    parameter_name: str
    parameter_value: float
    metric: str
    value: float | str  # str values are "NA:<reason>"

    def row(self):
        return [self.replicate, self.parameter_name, self.parameter_value, self.metric, self.value]


@dataclass(frozen=True)
class Cell:
    parameter_name: str
    parameter_value: float
    settings: dict = field(default_factory=dict)


@dataclass(frozen=True)
class Design:
    name: str
    description: str
    cells: Callable[[dict], list[Cell]]
    run: Callable[[Cell, dict, int], dict]
    defaults: dict


def _profile_metrics(g) -> dict:
    return assortativity_profile(g).as_metrics()


def _grid(params, key, default):
    value = params.get(key)
    return list(default) if value is None else [float(v) for v in value]


def _er_cells(p):
    return [Cell("n", v) for v in _grid(p, "grid", range(10, 151, 10))]


def _er_run(cell, p, seed):
    cfg = ErConfig(int(cell.parameter_value), float(p["p"]), int(p["theta"]))
    return _profile_metrics(gen_er(cfg, np.random.default_rng(seed)))


def _ba_config(p, steps, big_edge=None):
    alpha = float(p["alpha"])
    return BaConfig(steps, alpha, 1.0 - alpha, float(p["delta_in"]), float(p["delta_out"]),
                    int(p["theta"]), big_edge)


def _ba_sweep_cells(p):
    return [Cell("n", v) for v in _grid(p, "grid", [2**k for k in range(4, 13)])]


def _ba_sweep_run(cell, p, seed):
    cfg = _ba_config(p, int(cell.parameter_value) - 2)
    return _profile_metrics(gen_ba(cfg, np.random.default_rng(seed)))


def _ba_big_cells(p):
    return [Cell("t", v) for v in _grid(p, "grid", range(10, 501, 10))]


def _ba_big_run(cell, p, seed):
    cfg = _ba_config(p, int(p["steps"]), (int(cell.parameter_value), float(p["big_weight"])))
    return _profile_metrics(gen_ba(cfg, np.random.default_rng(seed)))


def _sbm_config(p, **kw):
    base = dict(
        community_size=int(p["community_size"]),
        p_within=float(p["p_within"]),
        p_between=float(p["p_between"]),
        weight_range_1=(float(p["wr1_low"]), float(p["wr1_high"])),
        weight_range_2=(float(p["wr2_low"]), float(p["wr2_high"])),
        between_weight=float(p["between_weight"]),
    )
    base.update(kw)
    return SbmConfig(**base)


def _sbm_size_cells(p):
    return [Cell("community_size", v) for v in _grid(p, "grid", range(50, 501, 50))]


def _sbm_size_run(cell, p, seed):
    cfg = _sbm_config(p, community_size=int(cell.parameter_value))
    return _profile_metrics(gen_sbm(cfg, np.random.default_rng(seed)))


def _sbm_sens_cells(p):
    p_values = _grid(p, "grid", [round(0.02 + 0.01 * i, 2) for i in range(9)])
    return [Cell(f"p_between|k={format(k, 'g')}", pb, {"k": k})
            for k in _grid(p, "k_values", [1, 0.5, 0.25, 0.125]) for pb in p_values]


def _sbm_sens_run(cell, p, seed):
    k = cell.settings["k"]
    cfg = _sbm_config(p, p_between=cell.parameter_value, between_weight=float(p["between_weight"]) * k)
    return _profile_metrics(gen_sbm(cfg, np.random.default_rng(seed)))


def _rewire_cells(p):
    return [Cell("xi", v) for v in _grid(p, "grid", [round(0.1 * i, 1) for i in range(1, 10)])]


def _rewire_run(cell, p, seed):
    n = int(p["n"])
    dist = StrengthDistribution.power_law_cutoff(int(p["z_min"]), int(p["z_max"]),
                                                 float(p["exponent"]), float(p["cutoff"]))
    cfg = RewireConfig(n, cell.parameter_value, int(float(p["steps_per_vertex"]) * n), seed,
                       distribution=dist, selection=str(p["selection"]), link_basis=str(p["link_basis"]))
    res = run_rewire(cfg)
    out = {}
    for name, value in (("weighted", res.achieved_weighted), ("unweighted", res.achieved_unweighted)):
        out[name] = value if value is not None else "NA:degenerate-variance"
    out["qp_max_residual"] = max(res.link.residuals().values())
    return out


_BA_DEFAULTS = {"alpha": 0.6, "delta_in": 1.0, "delta_out": 1.0, "theta": 10}
_SBM_DEFAULTS = {"community_size": 500, "p_within": 0.2, "p_between": 0.02, "wr1_low": 0.0, "wr1_high": 5.0,
                 "wr2_low": 5.0, "wr2_high": 10.0, "between_weight": 5.0}

DESIGNS: dict[str, Design] = {
    d.name: d
    for d in (
        Design("er-sweep", "extended ER, n = 10..150", _er_cells, _er_run, {"p": 0.2, "theta": 10}),
        Design("ba-sweep", "strength-driven BA, n = 2^4..2^12", _ba_sweep_cells, _ba_sweep_run, dict(_BA_DEFAULTS)),
        Design("ba-bigedge", "BA with one weight-1000 edge arriving at step t", _ba_big_cells, _ba_big_run,
               {**_BA_DEFAULTS, "steps": 500, "big_weight": 1000.0}),
        Design("sbm-size", "two-community SBM, community size 50..500", _sbm_size_cells, _sbm_size_run,
               dict(_SBM_DEFAULTS)),
        Design("sbm-sensitivity", "SBM between-community density p' and weight 5k", _sbm_sens_cells,
               _sbm_sens_run, dict(_SBM_DEFAULTS)),
        Design("rewire-targets", "rewiring to target assortativity xi", _rewire_cells, _rewire_run,
               {"n": 500, "steps_per_vertex": 1000, "z_min": 10, "z_max": 100, "exponent": 2.5,
                "cutoff": 100.0, "selection": "weight", "link_basis": "empirical"}),
    )
}


def _run_task(args):
    design_name, cell, params, replicate, seed = args
    design = DESIGNS[design_name]
    try:
        metrics = design.run(cell, params, seed + replicate)
    except WdassortError as exc:
        metrics = {"error": f"NA:{type(exc).__name__}"}
    return [Record(replicate, cell.parameter_name, float(cell.parameter_value), m, v)
            for m, v in metrics.items()]


def run_design(name: str, replicates: int, seed: int, params: dict | None = None,
               workers: int = 1) -> list[Record]:
    """Run every cell of a design ``replicates`` times; records come back sorted."""
    if name not in DESIGNS:
        raise ConfigError(f"unknown design {name!r}; choose from {sorted(DESIGNS)}")
    if replicates < 1:
        raise ConfigError(f"replicates must be positive, got {replicates}")
    design = DESIGNS[name]
    merged = dict(design.defaults)
    for key, value in (params or {}).items():
        if key not in merged and key not in ("grid", "k_values"):
            raise ConfigError(f"design {name!r} has no parameter {key!r}; known: {sorted(merged)}")
        merged[key] = value
    tasks = [(name, cell, merged, r, seed) for cell in design.cells(merged) for r in range(replicates)]
    if workers > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            chunks = list(pool.map(_run_task, tasks, chunksize=max(1, len(tasks) // (4 * workers))))
    else:
        chunks = [_run_task(t) for t in tasks]
    records = [rec for chunk in chunks for rec in chunk]
    records.sort(key=lambda r: (r.parameter_name, r.parameter_value, r.replicate, r.metric))
    return records


@dataclass(frozen=True)
class SummaryRow:
    parameter_name: str
    parameter_value: float
    metric: str
    count: int
    missing: int
    mean: float
    sd: float
    min: float
    q1: float
    median: float
    q3: float
    max: float

    def row(self):
        return [self.parameter_name, self.parameter_value, self.metric, self.count, self.missing,
                self.mean, self.sd, self.min, self.q1, self.median, self.q3, self.max]


def summarize(records: list[Record]) -> list[SummaryRow]:
    """Mean, sample sd and quartiles of each (parameter, value, metric) cell."""
    groups: dict[tuple, list] = {}
    for rec in records:
        groups.setdefault((rec.parameter_name, rec.parameter_value, rec.metric), []).append(rec.value)
    rows = []
    for key in sorted(groups):
        vals = groups[key]
        x = np.array([v for v in vals if not isinstance(v, str)], dtype=np.float64)
        missing = len(vals) - x.size
        if x.size:
            q = np.percentile(x, [0, 25, 50, 75, 100])
            sd = float(np.std(x, ddof=1)) if x.size > 1 else math.nan
            rows.append(SummaryRow(*key, x.size, missing, float(np.mean(x)), sd, *map(float, q)))
        else:
            rows.append(SummaryRow(*key, 0, missing, *([math.nan] * 7)))
    return rows


def cell_means(records: list[Record], metric: str) -> dict[tuple[str, float], float]:
    return {(r.parameter_name, r.parameter_value): r.mean for r in summarize(records) if r.metric == metric}
