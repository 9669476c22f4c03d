"""Experiment orchestration for the ACL-generation and diffusion simulations.

Random streams are keyed by stable integers only (see ``condition_key``), so a
condition's network is the same whether it is generated alone, inside ``sim1``
or inside ``sim2``, and grid cells can run in any order or process.
"""

from __future__ import annotations

import csv
import io
import json
import logging
import statistics
import zlib
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from fractions import Fraction
from pathlib import Path
from typing import Callable, Iterable, Sequence

from . import rng as rngmod
from .acl import AclPrediction, predict_acl, save_acl
from .community import CommunityCover, Method, detect, save_cover
from .config import ExperimentConfig
from .diffusion import DiffusionOutcome, run_diffusion
from .graph import AttributedGraph, save_graph
from .netgen import generate_network

log = logging.getLogger(__name__)

SIM1_FIELDS = [
    "masterSeed", "condition", "method", "clusterCount", "aclSize",
    "precision", "recall", "f1", "error",
]
SIM2_FIELDS = [
    "masterSeed", "homophilyConfig", "method", "seedCount", "removalFraction", "replicate",
    "gatekeeperTotal", "gatekeepersRemoved", "infectedTotal", "infectedAclCount", "aclSize",
    "infectedAclFraction", "rounds", "error",
]
SUMMARY_FIELDS = [
    "homophilyConfig", "seedCount", "removalFraction", "n",
    "meanInfectedAclFraction", "stdInfectedAclFraction",
]


def condition_key(name: str) -> int:
    return zlib.crc32(name.encode("utf-8"))


def network_for(cfg: ExperimentConfig, condition: str, master_seed: int | None = None) -> AttributedGraph:
    seed = cfg.master_seed if master_seed is None else master_seed
    gen_cfg = cfg.generator_config(condition, rng_seed=seed)
    return generate_network(gen_cfg, rngmod.stream(seed, rngmod.NETGEN, condition_key(condition)))


def fmt(x: float) -> str:
    return f"{x:.6f}"


# -- simulation 1 --------------------------------------------------------------


@dataclass
class Sim1Result:
    rows: list[dict]
    graphs: dict[str, AttributedGraph]
    covers: dict[tuple[str, Method], CommunityCover]
    predictions: dict[tuple[str, Method], AclPrediction]


def _sim1_condition(cfg: ExperimentConfig, condition: str):
    g = network_for(cfg, condition)
    attr, value, n = cfg.untrusted
    rows, covers, preds = [], {}, {}
    for method in cfg.methods:
        row = {"masterSeed": cfg.master_seed, "condition": condition, "method": method.value}
        try:
            cover = detect(g, method)
            pred = predict_acl(g, cover, attr, value, n)
        except Exception as exc:  # a failing stage only voids its own row
            log.error("sim1 %s/%s failed: %s", condition, method.value, exc)
            row.update(clusterCount="", aclSize="", precision="", recall="", f1="",
                       error=f"{type(exc).__name__}: {exc}")
        else:
            covers[method], preds[method] = cover, pred
            row.update(
                clusterCount=len(cover), aclSize=len(pred.acl), precision=fmt(pred.precision),
                recall=fmt(pred.recall), f1=fmt(pred.f1), error="",
            )
        rows.append(row)
    return condition, g, rows, covers, preds


def _map(fn: Callable, items: Sequence, jobs: int) -> list:
    if jobs <= 1 or len(items) <= 1:
        return [fn(*it) for it in items]
    with ProcessPoolExecutor(max_workers=jobs) as pool:
        return list(pool.map(_star, [(fn, it) for it in items]))


def _star(packed):
    fn, args = packed
    return fn(*args)


def run_simulation1(cfg: ExperimentConfig, jobs: int = 1) -> Sim1Result:
    results = _map(_sim1_condition, [(cfg, c) for c in cfg.conditions], jobs)
    out = Sim1Result([], {}, {}, {})
    for condition, g, rows, covers, preds in results:
        out.graphs[condition] = g
        out.rows.extend(rows)
        for m, c in covers.items():
            out.covers[(condition, m)] = c
        for m, p in preds.items():
            out.predictions[(condition, m)] = p
    return out


# -- simulation 2 --------------------------------------------------------------


def _acl_for(cfg: ExperimentConfig, g: AttributedGraph) -> tuple[CommunityCover, AclPrediction]:
    attr, value, n = cfg.untrusted
    cover = detect(g, cfg.diffusion.acl_method)
    return cover, predict_acl(g, cover, attr, value, n)


def _sim2_cell(cfg: ExperimentConfig, condition: str, g: AttributedGraph, acl: frozenset,
               s: int, frac: Fraction):
    grid = cfg.diffusion
    rows, traces = [], []
    for r in range(grid.replications):
        stream = rngmod.stream(
            cfg.master_seed, rngmod.DIFFUSION, condition_key(condition), s, frac.numerator,
            frac.denominator, r,
        )
        row = {
            "masterSeed": cfg.master_seed, "homophilyConfig": condition,
            "method": grid.acl_method.value, "seedCount": s, "removalFraction": fmt(float(frac)),
            "replicate": r,
        }
        try:
            out = run_diffusion(g, acl, s, frac, grid.beta, stream)
        except Exception as exc:
            log.error("sim2 %s s=%d k=%s r=%d failed: %s", condition, s, frac, r, exc)
            row.update({k: "" for k in SIM2_FIELDS if k not in row})
            row["error"] = f"{type(exc).__name__}: {exc}"
        else:
            row.update(_outcome_fields(out))
            if grid.write_traces:
                traces.append(_trace_record(row, out))
        rows.append(row)
    return rows, traces


def _outcome_fields(out: DiffusionOutcome) -> dict:
    return {
        "gatekeeperTotal": out.gatekeeper_total,
        "gatekeepersRemoved": len(out.removed_gatekeepers),
        "infectedTotal": len(out.infected),
        "infectedAclCount": out.infected_acl_count,
        "aclSize": len(out.acl),
        "infectedAclFraction": fmt(out.infected_acl_fraction),
        "rounds": out.rounds,
        "error": "",
    }


def _trace_record(row: dict, out: DiffusionOutcome) -> dict:
    return {
        "homophilyConfig": row["homophilyConfig"], "seedCount": row["seedCount"],
        "removalFraction": row["removalFraction"], "replicate": row["replicate"],
        "removedGatekeepers": sorted(out.removed_gatekeepers), "seeds": sorted(out.seeds),
        "trace": [list(t) for t in out.trace],
    }


@dataclass
class Sim2Result:
    rows: list[dict]
    summary: list[dict]
    traces: list[dict]
    graphs: dict[str, AttributedGraph]
    acls: dict[str, tuple[CommunityCover, AclPrediction]]


def run_simulation2(cfg: ExperimentConfig, jobs: int = 1,
                    graphs: dict[str, AttributedGraph] | None = None) -> Sim2Result:
    graphs = dict(graphs or {})
    acls = {}
    for condition in cfg.conditions:
        if condition not in graphs:
            graphs[condition] = network_for(cfg, condition)
        acls[condition] = _acl_for(cfg, graphs[condition])
    grid = cfg.diffusion
    cells = [
        (cfg, c, graphs[c], acls[c][1].acl, s, f)
        for c in cfg.conditions
        for s in grid.seed_counts
        for f in grid.removal_fractions
    ]
    rows, traces = [], []
    for cell_rows, cell_traces in _map(_sim2_cell, cells, jobs):
        rows.extend(cell_rows)
        traces.extend(cell_traces)
    return Sim2Result(rows, summarize(rows), traces, graphs, acls)


def summarize(rows: Iterable[dict]) -> list[dict]:
    """Mean and sample std of infectedAclFraction per grid cell, then per factor level.

    Aggregated factors are written as ``*``. Statistics use 12 decimals so they
    reproduce the mean of the 6-decimal replicate values exactly.
    """
    rows = [r for r in rows if not r.get("error")]
    factors = ("homophilyConfig", "seedCount", "removalFraction")
    out = []
    groupings = [factors] + [(f,) for f in factors]
    for keep in groupings:
        groups: dict[tuple, list[float]] = {}
        for r in rows:
            key = tuple(r[f] if f in keep else "*" for f in factors)
            groups.setdefault(key, []).append(float(r["infectedAclFraction"]))
        for key, vals in groups.items():
            out.append({
                "homophilyConfig": key[0], "seedCount": key[1], "removalFraction": key[2],
                "n": len(vals),
                "meanInfectedAclFraction": f"{statistics.fmean(vals):.12f}",
                "stdInfectedAclFraction": f"{statistics.stdev(vals) if len(vals) > 1 else 0.0:.12f}",
            })
    return out


# -- output --------------------------------------------------------------------


def csv_text(rows: Sequence[dict], fields: Sequence[str]) -> str:
    buf = io.StringIO()
    w = csv.DictWriter(buf, fieldnames=list(fields), lineterminator="\n", extrasaction="ignore")
    w.writeheader()
    w.writerows(rows)
    return buf.getvalue()


def write_csv(path: Path, rows: Sequence[dict], fields: Sequence[str]) -> None:
    path.write_text(csv_text(rows, fields), encoding="utf-8", newline="")


def write_sim1(out_dir: Path, res: Sim1Result) -> None:
    out_dir.mkdir(parents=True, exist_ok=True)
    write_csv(out_dir / "sim1.csv", res.rows, SIM1_FIELDS)
    for cond, g in res.graphs.items():
        save_graph(g, out_dir / f"graph_{cond}.json")
    for (cond, m), cover in res.covers.items():
        save_cover(cover, out_dir / f"cover_{cond}_{m.value}.json")
    for (cond, m), pred in res.predictions.items():
        save_acl(pred, out_dir / f"acl_{cond}_{m.value}.json")


def write_sim2(out_dir: Path, res: Sim2Result) -> None:
    out_dir.mkdir(parents=True, exist_ok=True)
    write_csv(out_dir / "sim2.csv", res.rows, SIM2_FIELDS)
    write_csv(out_dir / "summary.csv", res.summary, SUMMARY_FIELDS)
    for cond, g in res.graphs.items():
        save_graph(g, out_dir / f"graph_{cond}.json")
    for cond, (cover, pred) in res.acls.items():
        m = cover.method.value
        save_cover(cover, out_dir / f"cover_{cond}_{m}.json")
        save_acl(pred, out_dir / f"acl_{cond}_{m}.json")
    if res.traces:
        with open(out_dir / "traces_sim2.jsonl", "w", encoding="utf-8", newline="\n") as fh:
            for t in res.traces:
                fh.write(json.dumps(t) + "\n")
    meta = {"rng": rngmod.RNG_ALGORITHM, "streams": "stream(masterSeed, module, crc32(condition), ...)"}
    (out_dir / "sim2_meta.json").write_text(json.dumps(meta, indent=2) + "\n", encoding="utf-8")
