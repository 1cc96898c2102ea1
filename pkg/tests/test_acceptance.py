"""Acceptance criteria, one test per criterion, each recording a PASS/FAIL line."""

import math
import time
from itertools import combinations

import numpy as np
import pytest

from piercing_lab import oracle
from piercing_lab.cli import main
from piercing_lab.geometry import intersects, membership_matrix
from piercing_lab.helly import certified_deep_bound, validate_friend_lemma
from piercing_lab.hypergraph import check_hereditary_linearity, dual_hypergraph, friends_pairs
from piercing_lab.instances import generate
from piercing_lab.report import ExperimentRow, p2_spec, rows_from_csv, rows_to_csv
from piercing_lab.transversal import (
    check_p2,
    fractional_transversal,
    greedy_pierce,
    intersecting_pairs,
    packing_number,
    pierce_p2,
    stabs_all,
    turan_intersection_bound,
)

from conftest import random_discs, random_squares, record, triangle_family

FEAS = 1e-9
GAP = 1e-6


def random_disc_family(seed, n_lo, n_hi):
    rng = np.random.default_rng(seed)
    n = int(rng.integers(n_lo, n_hi + 1))
    return random_discs(rng, n, side=float(rng.uniform(2, 10)))


@pytest.fixture(scope="module")
def p2_runs():
    """200 seeded (p,2) disc families, p in [2, 10], n <= 40, with all pipeline outputs."""
    runs = []
    seed = 0
    while len(runs) < 200:
        seed += 1
        rng = np.random.default_rng(seed)
        p = int(rng.integers(2, 11))
        n = int(rng.integers(max(8, p), 41))
        inst = generate(p2_spec(n, p, seed))
        f = inst.family
        if not check_p2(f, p):
            continue
        t0 = time.perf_counter()
        pipe = pierce_p2(f, p, seed=seed)
        pipe_s = time.perf_counter() - t0
        greedy = greedy_pierce(f, p, seed=seed)
        lp = fractional_transversal(f)
        try:
            opt = len(oracle.min_transversal_exact(f))
        except oracle.BudgetExceeded:
            opt = None
        runs.append(
            dict(seed=seed, p=p, f=f, pipe=pipe, pipe_s=pipe_s, greedy=greedy, lp=lp, opt=opt,
                 packing=oracle.max_packing_exact(f))
        )
    return runs


@pytest.fixture(scope="module")
def helly_families():
    return [random_disc_family(10_000 + s, 8, 30) for s in range(500)]


def test_c01_certified_fractional_helly(helly_families):
    t0 = time.perf_counter()
    checked = sound = 0
    modes = {"exhaustive": 0, "sampled": 0}
    for i, f in enumerate(helly_families):
        h = dual_hypergraph(f)
        lin = check_hereditary_linearity(h, 3, "auto", seed=i)
        if not lin.passed:
            continue
        checked += 1
        modes[lin.mode] += 1
        if h.max_edge_size >= certified_deep_bound(len(f), 3, len(friends_pairs(h))):
            sound += 1
    elapsed = time.perf_counter() - t0
    ok = checked >= 500 and sound == checked and elapsed < 300
    record("C1 certified fractional Helly", ok,
           f"{sound}/{checked} sound ({modes['exhaustive']} exhaustive, {modes['sampled']} sampled), {elapsed:.1f}s")
    assert checked >= 500
    assert sound == checked
    assert elapsed < 300


def test_c02_friend_lemma_sandwich():
    failures, total = 0, 0
    for s in range(50):
        f = random_disc_family(20_000 + s, 8, 20)
        h = dual_hypergraph(f)
        assert check_hereditary_linearity(h, 3, "auto", seed=s).passed
        x = 1 / max(h.max_edge_size - 2, 2)
        rep = validate_friend_lemma(h, x, trials=10_000, seed=s, c=3)
        total += 1
        failures += not rep.passed
    ok = failures <= 0.01 * total
    record("C2 friend-lemma sandwich", ok, f"{failures}/{total} instances outside 3 sigma (allowed {0.01 * total:.1f})")
    assert ok


def test_c03_lp_duality(p2_runs):
    worst_p = worst_d = worst_gap = 0.0
    for run in p2_runs:
        lp = run["lp"]
        mem = membership_matrix(run["f"], lp.points).astype(float)
        worst_p = max(worst_p, float(max(0, 1 - (mem @ lp.primal_weights).min())))
        worst_d = max(worst_d, float(max(0, (mem.T @ lp.dual_weights).max() - 1)))
        worst_gap = max(worst_gap, abs(lp.gap))
    tri = fractional_transversal(triangle_family())
    ok = worst_p <= FEAS and worst_d <= FEAS and worst_gap <= GAP and abs(tri.tau - 1.5) <= 1e-6
    record("C3 LP duality", ok,
           f"max residuals {worst_p:.1e}/{worst_d:.1e}, max gap {worst_gap:.1e}, triangle tau*={tri.tau:.9f}")
    assert worst_p <= FEAS and worst_d <= FEAS
    assert worst_gap <= GAP
    assert tri.tau == pytest.approx(1.5, abs=1e-6)


def test_c04_transversal_validity_and_size(p2_runs):
    valid = sum(stabs_all(r["f"], r["pipe"].tau_points) for r in p2_runs)
    small = sum(
        r["pipe"].size <= 8 * r["pipe"].tau_frac * math.log(2 * r["pipe"].tau_frac + 2) for r in p2_runs
    )
    slowest = max(r["pipe_s"] for r in p2_runs)
    n = len(p2_runs)
    ok = n >= 200 and valid == n and small >= 0.95 * n and slowest < 1.0
    record("C4 pipeline transversal", ok,
           f"{valid}/{n} valid, {small}/{n} within 8 tau* ln(2 tau*+2), slowest {slowest * 1e3:.0f} ms")
    assert valid == n
    assert small >= 0.95 * n
    assert slowest < 1.0


def test_c05_greedy_iteration_bound(p2_runs):
    good = 0
    for r in p2_runs:
        g = r["greedy"]
        disjoint = all(not intersects(r["f"][a], r["f"][b]) for a, b in combinations(g.selected, 2))
        if g.iterations <= len(r["packing"]) <= r["p"] - 1 and disjoint and stabs_all(r["f"], g.tau_points):
            good += 1
    ok = good == len(p2_runs)
    record("C5 greedy iterations <= nu <= p-1", ok, f"{good}/{len(p2_runs)} runs")
    assert ok


def _sandwich_ok(row: ExperimentRow) -> bool:
    if row.exact_opt is None:
        return True
    lo = row.nu_exact <= row.tau_frac + 1e-6 <= row.exact_opt + 2e-6
    return lo and row.exact_opt <= row.pipeline_size and row.exact_opt <= row.greedy_size


def test_c06_sandwich_orderings(p2_runs, tmp_path):
    rows = [
        ExperimentRow(
            seed=r["seed"], n=len(r["f"]), p=r["p"], nu_exact=len(r["packing"]), tau_frac=r["pipe"].tau_frac,
            pipeline_size=r["pipe"].size, greedy_size=r["greedy"].size, greedy_iterations=r["greedy"].iterations,
            exact_opt=r["opt"],
        )
        for r in p2_runs
    ]
    parsed = rows_from_csv(rows_to_csv(rows))
    out = tmp_path / "sweep.csv"
    status = main(["experiment", "--n", "12,24,36", "--p", "2,4,6,8,10", "--trials", "2", "--seed", "5", "--out", str(out)])
    parsed += rows_from_csv(out.read_text())
    in_budget = [r for r in parsed if r.exact_opt is not None]
    good = sum(_sandwich_ok(r) for r in in_budget)
    ok = status == 0 and good == len(in_budget) and len(in_budget) > 0
    record("C6 sandwich nu <= tau* <= OPT <= pipeline/greedy", ok,
           f"{good}/{len(in_budget)} CSV rows with OPT in budget (of {len(parsed)}), CLI exit {status}")
    assert status == 0
    assert good == len(in_budget)


def test_c07_turan_bound(p2_runs, helly_families):
    cases = [(r["f"], r["p"]) for r in p2_runs]
    for f in helly_families[:200]:
        nu = packing_number(f)
        cases += [(f, nu + 1), (f, nu + 2)]
    good = 0
    for f, p in cases:
        n = len(f)
        if p > n + 1:
            good += 1
            continue
        measured = intersecting_pairs(f)
        if measured >= n * n / (2 * (p - 1)) - n / 2 and measured >= turan_intersection_bound(n, p):
            good += 1
    ok = good == len(cases)
    record("C7 Turan bound", ok, f"{good}/{len(cases)} (p,2)-verified instances")
    assert ok


def test_c08_three_linearity_of_disc_duals():
    good = 0
    for s in range(100):
        f = random_disc_family(30_000 + s, 4, 12)
        rep = check_hereditary_linearity(dual_hypergraph(f), 3, "exhaustive")
        good += rep.passed and rep.subsets_checked == 2 ** len(f) - 1
    ok = good == 100
    record("C8 hereditary 3-linearity (exhaustive, n <= 12)", ok, f"{good}/100 instances")
    assert ok


def test_c09_candidate_dominance():
    good = total = 0
    for s in range(100):
        rng = np.random.default_rng(40_000 + s)
        n = int(rng.integers(2, 26))
        for f in (random_discs(rng, n, side=float(rng.uniform(2, 8))),
                  random_squares(rng, n, side=float(rng.uniform(1, 6)))):
            total += 1
            good += oracle.signature_grid_check(f, 200).passed
    ok = good == total
    record("C9 candidate dominance (grid 200)", ok, f"{good}/{total} disc and unit-square instances")
    assert ok


def test_c10_determinism(tmp_path):
    same = []
    for cls in ("discs", "unit_squares", "polygons"):
        outs = []
        for k in range(2):
            path = tmp_path / f"{cls}{k}.json"
            main(["generate", "--class", cls, "--n", "20", "--density", "4", "--seed", "77", "--out", str(path)])
            outs.append(path.read_bytes())
        same.append(outs[0] == outs[1])
    csvs = []
    for k in range(2):
        path = tmp_path / f"e{k}.csv"
        main(["experiment", "--n", "10,20", "--p", "3,5", "--trials", "2", "--seed", "8", "--out", str(path)])
        csvs.append(path.read_bytes())
    ok = all(same) and csvs[0] == csvs[1]
    record("C10 determinism", ok, f"instance files identical: {same}, CSV identical: {csvs[0] == csvs[1]}")
    assert ok
