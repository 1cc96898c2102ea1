"""Per-instance analysis and batch experiments (CSV rows)."""

from __future__ import annotations

import csv
import io
import logging
import math
import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, fields
from typing import Optional, Sequence

import numpy as np

from . import oracle
from .geometry import RegionFamily
from .helly import certified_deep_bound
from .hypergraph import check_hereditary_linearity, delaunay_graph, dual_hypergraph, friends_pairs
from .instances import InstanceSpec, generate
from .transversal import (
    fractional_transversal,
    greedy_pierce,
    intersecting_pairs,
    packing_number,
    pierce_p2,
    turan_intersection_bound,
)

log = logging.getLogger(__name__)

CSV_HEADER = (
    "seed,n,p,nu_exact,tau_frac,pipeline_size,greedy_size,greedy_iterations,exact_opt,ms_lp,ms_net,ms_greedy"
).split(",")
SLACK = 1e-6


def analyze_family(f: RegionFamily, p: Optional[int] = None, c: float = 3.0, seed: int = 0) -> dict:
    """Packing, LP, Helly and Delaunay statistics for one family."""
    n = len(f)
    nu = packing_number(f, "exact")
    p = nu + 1 if p is None else p
    lp = fractional_transversal(f)
    h = dual_hypergraph(f)
    x_count = len(friends_pairs(h))
    lin = check_hereditary_linearity(h, c, seed=seed)
    return {
        "n": n,
        "p": p,
        "intersecting_pairs": intersecting_pairs(f),
        "turan_bound": turan_intersection_bound(n, p) if p <= n + 1 else 0,
        "nu": nu,
        "tau_frac": lp.tau,
        "lp_gap": lp.gap,
        "lp_converged": lp.converged,
        "friend_count": x_count,
        "friend_density": x_count / math.comb(n, 2) if n >= 2 else 0.0,
        "k_observed": h.max_edge_size,
        "k_certified": certified_deep_bound(n, c, x_count),
        "c": c,
        "delaunay_edges": len(delaunay_graph(h).edges),
        "linearity_mode": lin.mode,
        "linearity_passed": lin.passed,
        "linearity_worst_ratio": lin.worst_ratio,
    }


def analysis_violations(rep: dict) -> list[str]:
    out = []
    if rep["nu"] > rep["tau_frac"] + SLACK:
        out.append("nu > tau*")
    if not rep["lp_converged"]:
        out.append("LP tolerances unmet")
    if rep["nu"] <= rep["p"] - 1 and rep["intersecting_pairs"] < rep["turan_bound"]:
        out.append("intersecting pairs below Turan bound")
    if rep["linearity_passed"] and rep["k_observed"] < rep["k_certified"]:
        out.append("deep edge below certified bound")
    if rep["delaunay_edges"] >= rep["c"] * rep["n"]:
        out.append("Delaunay graph not c-linear")
    if not rep["linearity_passed"]:
        out.append("hereditary linearity check failed")
    return out


def format_analysis(rep: dict) -> str:
    width = max(len(k) for k in rep)
    lines = []
    for k, v in rep.items():
        if isinstance(v, float):
            v = f"{v:.6g}"
        lines.append(f"{k:<{width}}  {v}")
    return "\n".join(lines) + "\n"


# --- experiments -------------------------------------------------------------------


@dataclass
class ExperimentRow:
    seed: int
    n: int
    p: int
    nu_exact: Optional[int] = None
    tau_frac: Optional[float] = None
    pipeline_size: Optional[int] = None
    greedy_size: Optional[int] = None
    greedy_iterations: Optional[int] = None
    exact_opt: Optional[int] = None
    ms_lp: Optional[float] = None
    ms_net: Optional[float] = None
    ms_greedy: Optional[float] = None
    error: Optional[str] = None

    def csv_fields(self) -> list[str]:
        out = []
        for name in CSV_HEADER:
            v = getattr(self, name)
            if v is None:
                out.append("")
            elif isinstance(v, float):
                out.append(f"{v:.10g}" if name == "tau_frac" else f"{v:.3f}")
            else:
                out.append(str(v))
        return out

    @classmethod
    def from_csv(cls, rec: dict) -> ExperimentRow:
        kw = {}
        for f in fields(cls):
            v = rec.get(f.name, "")
            if v in ("", None):
                continue
            kw[f.name] = float(v) if f.name == "tau_frac" or f.name.startswith("ms_") else int(v)
        return cls(**kw)


def row_violations(row: ExperimentRow) -> list[str]:
    """Sandwich orderings nu <= tau* <= OPT <= pipeline, greedy and the greedy iteration bound."""
    out = []
    nu, tau = row.nu_exact, row.tau_frac
    if nu is not None and tau is not None and nu > tau + SLACK:
        out.append("nu > tau*")
    for name in ("pipeline_size", "greedy_size", "exact_opt"):
        v = getattr(row, name)
        if v is not None and tau is not None and tau > v + SLACK:
            out.append(f"tau* > {name}")
    if row.exact_opt is not None:
        for name in ("pipeline_size", "greedy_size"):
            v = getattr(row, name)
            if v is not None and v < row.exact_opt:
                out.append(f"{name} < exact_opt")
    if row.greedy_iterations is not None and nu is not None and row.greedy_iterations > nu:
        out.append("greedy iterations > nu")
    if nu is not None and nu > row.p - 1:
        out.append("family violates (p,2)")
    return out


def instance_seed(base: int, n: int, p: int, trial: int) -> int:
    return int(np.random.SeedSequence([base, n, p, trial]).generate_state(1, dtype=np.uint32)[0])


def p2_spec(n: int, p: int, seed: int, family_class: str = "discs", radius_range=(0.5, 1.5)) -> InstanceSpec:
    """Spec whose rejection sampling targets packing number p-1 without exceeding it."""
    target = p - 1
    # box side giving roughly `target` disjoint regions for mean radius ~1
    side = 1.5 + 2.2 * math.sqrt(target)
    return InstanceSpec(family_class, n, target, tuple(radius_range), seed, side, max_nu=target)


def run_instance(
    f: RegionFamily,
    p: int,
    seed: int,
    timings: bool = False,
    budget: oracle.OracleBudget = oracle.DEFAULT_BUDGET,
) -> ExperimentRow:
    row = ExperimentRow(seed=seed, n=len(f), p=p)
    try:
        row.nu_exact = packing_number(f, "exact")
        pipe = pierce_p2(f, p, seed=seed, assume_p2=True)
        row.tau_frac = pipe.tau_frac
        row.pipeline_size = pipe.size
        greedy = greedy_pierce(f, p, seed=seed, assume_p2=True)
        row.greedy_size = greedy.size
        row.greedy_iterations = greedy.iterations
        try:
            row.exact_opt = len(oracle.min_transversal_exact(f, budget))
        except oracle.BudgetExceeded:
            row.exact_opt = None
        if timings:
            row.ms_lp = pipe.timings_ms["lp"]
            row.ms_net = pipe.timings_ms["net"]
            row.ms_greedy = greedy.timings_ms["greedy"]
    except Exception as e:  # recorded per row; the sweep continues
        row.error = f"{type(e).__name__}: {e}"
    return row


def _sweep_task(args) -> ExperimentRow:
    n, p, trial, base_seed, family_class, timings = args
    seed = instance_seed(base_seed, n, p, trial)
    inst = generate(p2_spec(n, p, seed, family_class))
    p_row = p if inst.nu is not None and inst.nu <= p - 1 else inst.nu + 1
    return run_instance(inst.family, p_row, seed, timings)


def run_sweep(
    ns: Sequence[int],
    ps: Sequence[int],
    trials: int,
    seed: int = 0,
    family_class: str = "discs",
    timings: bool = False,
    workers: Optional[int] = None,
) -> list[ExperimentRow]:
    """One row per generated instance, in (n, p, trial) order regardless of worker count."""
    tasks = [(n, p, t, seed, family_class, timings) for n in ns for p in ps for t in range(trials)]
    if workers is None:
        workers = int(os.environ.get("PIERCING_LAB_THREADS", "1") or 1)
    if workers <= 1:
        return [_sweep_task(t) for t in tasks]
    with ProcessPoolExecutor(max_workers=workers) as ex:
        return list(ex.map(_sweep_task, tasks))


def rows_to_csv(rows: Sequence[ExperimentRow]) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(CSV_HEADER)
    for r in rows:
        w.writerow(r.csv_fields())
    return buf.getvalue()


def rows_from_csv(text: str) -> list[ExperimentRow]:
    return [ExperimentRow.from_csv(rec) for rec in csv.DictReader(io.StringIO(text))]


def summarize(rows: Sequence[ExperimentRow]) -> dict:
    ok = [r for r in rows if r.error is None and r.pipeline_size is not None]
    if not ok:
        return {"rows": len(rows), "ok": 0}
    return {
        "rows": len(rows),
        "ok": len(ok),
        "mean_pipeline_over_p": float(np.mean([r.pipeline_size / r.p for r in ok])),
        "mean_greedy_over_p": float(np.mean([r.greedy_size / r.p for r in ok])),
        "max_pipeline_over_p": float(max(r.pipeline_size / r.p for r in ok)),
        "max_greedy_over_p": float(max(r.greedy_size / r.p for r in ok)),
    }

