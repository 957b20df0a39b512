"""Seeded Monte Carlo runs persisted under ``<output>/<config-hash>/``."""

from __future__ import annotations

import csv
import io
import time
from collections import Counter
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .. import adversary as adv
from .. import builders as bld
from ..connectivity import is_k_connected
from ..geom import Metric
from ..graph import SubgraphMask, verify_cycle
from ..io import format_certificate, write_graph, write_mask
from ..rgg import hitting_time, rgg_process, sample_rgg, trial_rng
from .config import ExperimentConfig
from .stats import mean, wilson_interval


def trial_seed(master: int, trial: int) -> int:
    return int(trial_rng(master, trial).integers(2 ** 62))


# -- attacks --------------------------------------------------------------------

def run_attack(name: str, g, params: dict, rng):
    p = dict(params)
    seed = int(rng.integers(2 ** 62))
    if name == "strip":
        return adv.strip_cut(g)
    if name == "stiebitz":
        return adv.stiebitz_cut(g, seed=seed)
    if name == "tripartite":
        return adv.tripartite_cut(g, seed=seed)
    if name == "triangle-killer":
        margin = float(p.get("margin", 2 * g.r))
        inner = np.nonzero(np.minimum(g.points, 1 - g.points).min(axis=1) >= margin)[0] \
            if g.metric is Metric.CUBE else np.arange(g.n)
        v = int(rng.choice(inner)) if len(inner) else int(rng.integers(g.n))
        rep = adv.triangle_killer_cut(g, v, float(p.get("eps", 0.02)), margin)
        rep.witness.setdefault("v", v)
        return rep
    if name == "empty-interval":
        return adv.empty_interval_cut(g, float(p.get("eps", 0.1)))
    if name == "annulus":
        ap = adv.solve_annulus_params(float(p.get("C", 1.0)), float(p.get("A", 2.0)), n=g.n)
        return adv.annulus_cut(g, ap)
    if name == "budget":
        return adv.budget_deletion(g, float(p.get("budget", 0.1)), str(p.get("order", "farthest")), seed=seed)
    raise ValueError(f"unknown attack {name!r}")


def _attack_row(cfg: ExperimentConfig, g, rep) -> dict:
    p = cfg.params
    row = {"found": int(rep.found), "achieved_alpha": rep.achieved_alpha,
           "disconnected": int(rep.disconnected), "max_component": rep.max_component}
    ok = rep.found
    if p.get("require_disconnected", False):
        ok = ok and rep.disconnected
    if "min_alpha" in p:
        ok = ok and rep.achieved_alpha >= float(p["min_alpha"])
    if "max_component_rn" in p:
        ok = ok and rep.max_component <= float(p["max_component_rn"]) * g.r * g.n
    if cfg.method == "triangle-killer":
        tri = adv.triangles_through(rep.mask.kept, int(rep.witness["v"]))
        row["triangles"] = tri
        ok = ok and tri == 0
    row["success"] = int(bool(ok))
    return row


# -- builders -------------------------------------------------------------------

def run_builder(name: str, mask: SubgraphMask, params: dict, rng, seed: int):
    """Returns (result, through, length) where result is truthy on success."""
    p = dict(params)
    g = mask.base
    if name == "cell-hamilton":
        return bld.cell_hamilton(mask, float(p.get("eps", 0.05)), float(p.get("delta", 0.25))), None, g.n
    if name == "interval-hamilton":
        return bld.interval_hamilton_1d(mask, float(p.get("eps", 0.05)), float(p.get("delta", 0.25))), None, g.n
    if name == "long-cycle":
        v = int(rng.integers(g.n))
        L = int(p["L"])
        tune = bld.ColourTuning(p.get("blue"), p.get("green"))
        res = bld.long_cycle(mask, v, L, float(p.get("eta", 0.5)), float(p.get("eps", 0.1)),
                             float(p.get("delta", 1.0)), seed=seed, tuning=tune, margin=p.get("margin"),
                             short_odd=int(p.get("short_odd", 9)))
        return res, v, L
    if name == "closure":
        return bld.closure_hamilton(mask.kept), None, g.n
    raise ValueError(f"unknown builder {name!r}")


# -- trials ---------------------------------------------------------------------

def _sample(cfg, seed):
    return sample_rgg(cfg.n, cfg.d, cfg.r, cfg.metric, seed=seed)


def run_trial(cfg: ExperimentConfig, i: int) -> tuple[dict, dict]:
    seed = trial_seed(cfg.seed, i)
    rng = trial_rng(seed, 1)
    row = {"trial": i, "seed": seed}
    art = {}
    kind = cfg.kind
    if kind == "attack-rate":
        g = _sample(cfg, seed)
        rep = run_attack(cfg.method, g, cfg.params, rng)
        row.update(_attack_row(cfg, g, rep))
        art[f"trial-{i}.attack"] = rep.to_text()
        if cfg.save_masks:
            art[f"trial-{i}.mask"] = rep.mask
            art[f"trial-{i}.rgg"] = g
    elif kind == "builder-rate":
        g = _sample(cfg, seed)
        if cfg.method == "sandwich":
            rep = bld.sandwich_check(g, float(cfg.params.get("eps", 0.5)))
            row.update(success=int(rep.holds), verified=int(rep.holds), length=0, step=rep.status)
            return row, art
        mask = SubgraphMask(g)
        if cfg.attack:
            mask = run_attack(cfg.attack, g, cfg.attack_params, rng).mask
        res, through, length = run_builder(cfg.method, mask, cfg.params, rng, seed)
        verified = bool(res) and verify_cycle(mask.kept, res, through=through, length=length)
        row.update(success=int(verified), verified=int(verified), length=len(res.vertices) if res else 0,
                   step="ok" if res else res.step)
        if verified:
            art[f"trial-{i}.cert"] = format_certificate(res)
    elif kind == "hitting-stats":
        tr = rgg_process(cfg.n, cfg.d, seed=seed, cutoff_r=cfg.params.get("cutoff"), metric=cfg.metric)
        con = hitting_time(tr, "connected")
        mdg = hitting_time(tr, "min-degree", delta=int(cfg.params.get("delta", 1)))
        ok = con.index is not None and mdg.index is not None
        row.update(connected_index=con.index if ok else -1, mindeg_index=mdg.index if ok else -1,
                   connected_radius=con.radius if ok else 0.0, mindeg_radius=mdg.radius if ok else 0.0,
                   ratio=con.radius / mdg.radius if ok and mdg.radius > 0 else 0.0,
                   success=int(ok and con.index >= mdg.index))
    elif kind == "certify":
        g = _sample(cfg, seed)
        mask = SubgraphMask(g)
        if cfg.attack:
            mask = run_attack(cfg.attack, g, cfg.attack_params, rng).mask
        c = int(cfg.params.get("c", 1))
        res = bld.certify_connectivity(mask, float(cfg.params.get("delta", 0.3)), c, spot_bound=0)
        issued = bool(res)
        confirmed = bool(is_k_connected(mask.kept, c)) if issued else False
        row.update(issued=int(issued), confirmed=int(confirmed), false_certificate=int(issued and not confirmed),
                   success=int(issued and confirmed), step="ok" if issued else res.step)
    elif kind == "conjecture":
        p = cfg.params
        rep = bld.conjecture_check(int(p["n"]), int(p["k"]), str(p.get("mode", "random")), seed=seed,
                                   trials=int(p.get("samples", 100)))
        row.update(checked=rep.checked, unknown=rep.unknown, counterexample=int(not rep.holds),
                   success=int(rep.holds))
    else:
        raise ValueError(f"unknown kind {kind!r}")
    return row, art


# -- records --------------------------------------------------------------------

_TEXT_COLUMNS = {"trial", "seed", "step", "success"}


def rows_to_csv(rows: list[dict]) -> str:
    buf = io.StringIO()
    cols = list(rows[0].keys()) if rows else ["trial"]
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(cols)
    for r in rows:
        w.writerow([repr(float(r[c])) if isinstance(r[c], float) else r[c] for c in cols])
    return buf.getvalue()


def csv_to_rows(text: str) -> list[dict]:
    return list(csv.DictReader(io.StringIO(text)))


def summarize(rows: list[dict]) -> dict:
    """Summary from rows in their persisted (string) form."""
    rows = csv_to_rows(rows_to_csv(rows))
    n = len(rows)
    k = sum(int(r["success"]) for r in rows)
    lo, hi = wilson_interval(k, n)
    out = {"trials": n, "successes": k, "rate": k / n, "wilson_low": lo, "wilson_high": hi}
    for c in (rows[0].keys() if rows else ()):
        if c in _TEXT_COLUMNS:
            continue
        try:
            out[f"mean_{c}"] = mean(float(r[c]) for r in rows)
        except ValueError:
            pass
    if rows and "step" in rows[0]:
        out["steps"] = dict(sorted(Counter(r["step"] for r in rows).items()))
    if rows and "max_component" in rows[0]:
        out["max_component_histogram"] = dict(sorted(Counter(int(r["max_component"]) for r in rows).items()))
    return out


def format_summary(summary: dict, wall_clock: float | None = None) -> str:
    lines = [f"{k} {v!r}" if isinstance(v, float) else f"{k} {v}" for k, v in summary.items()]
    if wall_clock is not None:
        lines.append(f"wall_clock_s {wall_clock:.3f}")
    return "\n".join(lines) + "\n"


@dataclass
class RunRecord:
    config_hash: str
    rows: list
    summary: dict
    wall_clock: float
    directory: Path | None = None
    artifacts: dict = field(default_factory=dict)


def run_experiment(cfg: ExperimentConfig, write: bool = True) -> RunRecord:
    cfg.validate()
    t0 = time.perf_counter()
    if cfg.workers > 1:
        with ProcessPoolExecutor(cfg.workers) as ex:
            results = list(ex.map(run_trial, [cfg] * cfg.trials, range(cfg.trials)))
    else:
        results = [run_trial(cfg, i) for i in range(cfg.trials)]
    rows = [r for r, _ in results]
    arts = {k: v for _, a in results for k, v in a.items()}
    summary = summarize(rows)
    wall = time.perf_counter() - t0
    rec = RunRecord(cfg.hash(), rows, summary, wall, artifacts=arts)
    if write:
        d = Path(cfg.output) / rec.config_hash
        (d / "artifacts").mkdir(parents=True, exist_ok=True)
        (d / "config").write_text(cfg.canonical())
        (d / "rows.csv").write_text(rows_to_csv(rows))
        (d / "summary").write_text(format_summary(summary, wall))
        for name, obj in arts.items():
            path = d / "artifacts" / name
            if isinstance(obj, str):
                path.write_text(obj)
            elif isinstance(obj, SubgraphMask):
                write_mask(obj, d / "artifacts" / name.replace(".mask", ".rgg"), path)
            else:
                write_graph(obj, path)
        rec.directory = d
    return rec


def load_summary(directory) -> dict:
    """Recompute the summary from a run directory's rows.csv."""
    return summarize(csv_to_rows((Path(directory) / "rows.csv").read_text()))
