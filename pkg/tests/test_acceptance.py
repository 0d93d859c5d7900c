"""One test per acceptance criterion, at the stated tolerances and time budgets.

Each test records a PASS/FAIL line that is printed in the pytest terminal summary.
"""
import time
from contextlib import contextmanager

import numpy as np
import pytest

from ohmtrace import (
    BaryTree,
    CurrentFlow,
    Exhaustion,
    build_finite,
    collapse_boundary,
    dirichlet_energy,
    doob_transform,
    effective_conductance,
    flow_energy,
    green_function,
    random_network,
    solve_voltage,
    subdivide_edge,
    subdivide_level,
    superlevel_set,
    unit_current_flow,
)
from ohmtrace.experiments import ExperimentConfig, run_experiment
from ohmtrace.walk import expected_crossings_arrays, sample_crossings

import oracles
from conftest import ACCEPTANCE

PATH = [(0, 1, 1.0), (1, 2, 1.0)]
SQUARE = [(0, 1, 1.0), (1, 2, 1.0), (2, 3, 1.0), (0, 3, 1.0)]


@contextmanager
def criterion(num, label, budget):
    info = {"detail": ""}
    t0 = time.perf_counter()
    ok = False
    try:
        yield info
        ok = True
    finally:
        secs = time.perf_counter() - t0
        if ok and secs >= budget:
            ok = False
            info["detail"] = f"over time budget {budget}s " + info["detail"]
        ACCEPTANCE.append((num, label, ok, secs, info["detail"]))
        print(f"criterion {num}: {'PASS' if ok else 'FAIL'} {label} ({secs:.1f}s)")
    assert secs < budget, f"criterion {num} took {secs:.1f}s, budget {budget}s"


def small_networks(count, seed, max_n=12):
    rng = np.random.default_rng(seed)
    out = []
    for _ in range(count):
        n = int(rng.integers(2, max_n + 1))
        net = random_network(n, rng, density=float(rng.uniform(0.1, 0.6)))
        out.append((net, [(x, y, c) for x, y, c in net.edges()], n - 1))
    return out


def test_criterion_1_identity_exact():
    with criterion(1, "E[N] identity, exact form", 1.0) as info:
        net = build_finite(PATH, 0)
        eg, ev, _, _ = expected_crossings_arrays(net, 0, 2)
        ref = oracles.expected_crossings(PATH, 0, 2)
        assert ref == pytest.approx({(0, 1): 3.0, (1, 2): 1.0}, rel=1e-12)
        assert ev.tolist() == pytest.approx([3.0, 1.0], rel=1e-12)
        worst = 0.0
        for net, edges, z in small_networks(20, seed=2024):
            eg, ev, _, _ = expected_crossings_arrays(net, 0, z, rtol=np.inf)
            worst = max(worst, float(np.max(np.abs(eg - ev) / np.abs(ev))))
        info["detail"] = f"max relative gap {worst:.2e}"
        assert worst <= 1e-9


def test_criterion_2_identity_monte_carlo():
    with criterion(2, "E[N] identity, Monte Carlo", 30.0) as info:
        s = sample_crossings(build_finite(PATH, 0), 0, 2, 100_000, seed=20240)
        z01 = (s.mean[0] - 3.0) / s.std_error[0]
        assert abs(z01) <= 4
        rep = run_experiment(ExperimentConfig("crossings", family="b-ary-tree(2)", depths=[6],
                                              trials=10_000, seed=20241))
        frac = [r["mc_mean"] for r in rep.rows if r["kind"] == "summary"][0]
        info["detail"] = f"path z={z01:.2f}, tree within-4SE fraction {frac:.3f}"
        assert frac >= 0.95
        assert rep.status == 0


def test_criterion_3_superlevel_bound():
    with criterion(3, "superlevel-set conductance bound", 60.0) as info:
        rep = run_experiment(ExperimentConfig("superlevel", trials=50, seed=3,
                                              tgrid=[k / 10 for k in range(1, 10)]))
        level = [r for r in rep.rows if r["kind"] == "level"]
        subset = [r for r in rep.rows if r["kind"] == "subset"]
        assert len(level) == 450 and len(subset) == 50
        worst = min(r["slack"] for r in rep.rows)
        info["detail"] = f"min slack {worst:.2e}"
        assert all(r["slack"] >= -1e-9 for r in rep.rows)
        assert rep.status == 0


def test_criterion_4_level_boundary_trend():
    with criterion(4, "level-boundary conductance trend", 120.0) as info:
        rep = run_experiment(ExperimentConfig("level-boundary", family="b-ary-tree(2)",
                                              depths=list(range(4, 17)), tgrid=[0.2, 0.5, 0.8]))
        tails = []
        for t in (0.2, 0.5, 0.8):
            seq = [r for r in rep.rows if r["kind"] == "depth" and r["t"] == t]
            assert [r["depth"] for r in seq] == list(range(4, 17))
            cn = [r["c_new"] for r in seq]
            assert all(b <= a + 1e-9 for a, b in zip(cn, cn[1:])), f"t={t}: not nonincreasing"
            last = seq[-1]
            assert last["c_new"] <= 2.05
            assert last["c_orig"] <= 1.05 / (last["alpha"] * t)
            tails.append(f"t={t}: {last['c_new']:.4f}")
        info["detail"] = ", ".join(tails)
        assert rep.status == 0


def test_criterion_5_ball_growth():
    with criterion(5, "ball conductance witness", 30.0) as info:
        rep = run_experiment(ExperimentConfig("ball-growth", family="b-ary-tree(2)", depths=[20],
                                              params={"m": 5}))
        hits = [r["k"] for r in rep.rows if r["conductance"] > 5]
        info["detail"] = f"witness k = {hits[0] if hits else None}"
        assert hits and rep.status == 0


def test_criterion_6_trace_diagnostics():
    with criterion(6, "trace recurrence diagnostics", 300.0) as info:
        rep = run_experiment(ExperimentConfig("trace", family="lattice(3)", depths=[30], trials=10, seed=6))
        walks = [r for r in rep.rows if r["kind"] == "walk"]
        cps = [r for r in rep.rows if r["kind"] == "checkpoint"]
        assert len(walks) == 10
        assert all(r["kendall_tau"] > 0 for r in walks)
        assert all(r["r_indicator"] >= r["r_counts"] - 1e-9 for r in cps)
        assert all(r["rayleigh_ok"] for r in walks)
        assert all(r["exact"] for r in walks)
        info["detail"] = f"min tau {min(r['kendall_tau'] for r in walks):.3f}, {len(cps)} checkpoints"
        assert rep.status == 0


def test_criterion_7_harmonic_oracles():
    with criterion(7, "harmonic core vs dense oracles", 10.0) as info:
        cases = [(build_finite(PATH, 0), PATH, 2), (build_finite(SQUARE, 0), SQUARE, 2)]
        cases += small_networks(60, seed=77)
        worst = 0.0
        for net, edges, z in cases:
            C = effective_conductance(net, 0, z)
            Cref = oracles.effective_conductance(edges, [0], z)
            g = green_function(net, 0, z)
            gref = oracles.green_row(edges, 0, z)
            i = unit_current_flow(net, 0, z)
            v = solve_voltage(net, 0, z)
            errs = [abs(C - Cref) / Cref,
                    max(abs(g[x] - gref[x]) / max(abs(gref[x]), 1.0) for x in gref),
                    abs(dirichlet_energy(net, v.as_dict()) - Cref) / Cref,
                    abs(flow_energy(net, i) - 1 / Cref) * Cref,
                    abs(flow_energy(net, i) * C - 1.0)]
            worst = max(worst, *errs)
        assert worst <= 1e-8
        assert effective_conductance(build_finite(PATH, 0), 0, 2) == pytest.approx(0.5, abs=1e-12)
        assert effective_conductance(build_finite(SQUARE, 0), 0, 2) == pytest.approx(1.0, abs=1e-12)
        tree, tz = collapse_boundary(Exhaustion(BaryTree(2), 2))
        assert effective_conductance(tree, 0, tz) == pytest.approx(8 / 7, abs=1e-12)
        info["detail"] = f"max relative error {worst:.2e}"


def test_criterion_8_transforms():
    with criterion(8, "transform suite", 60.0) as info:
        rng = np.random.default_rng(88)
        nets = small_networks(100, seed=888)
        n_sub = 0
        for net, _, z in nets:
            v = solve_voltage(net, 0, z)
            t = float(rng.uniform(0.05, 0.95))
            if np.any(np.abs(v.values - t) < 1e-9):
                continue
            new, _ = subdivide_level(net, v, t)
            v2 = solve_voltage(new, 0, z)
            ids = net.vertices.tolist()
            assert max(abs(v2[x] - v[x]) for x in ids) <= 1e-9
            C = effective_conductance(net, 0, z)
            A = superlevel_set(v2, t - 1e-12)
            assert abs(effective_conductance(new, A, z) * t - C) <= 1e-9 * max(C, 1.0)
            # r-parts on every straddling edge
            for x, y, c in net.edges():
                lo, hi = sorted((v[x], v[y]))
                if lo < t < hi:
                    _, rec = subdivide_edge(net, (x, y), v, t)
                    assert abs(rec.r_xw + rec.r_wy - 1 / c) <= 1e-12 * max(1 / c, 1.0)
                    n_sub += 1
            # Doob transition ratios at interior vertices
            d = doob_transform(net, v) if v[0] > 0 and any(v[y] > 0 for y, _ in net.neighbors(0)) else None
            if d is not None:
                for x in d.vertices.tolist():
                    if x in (0, z):
                        continue
                    p, q = net.transition_probabilities(x), d.transition_probabilities(x)
                    for y, pxy in p.items():
                        assert abs(q.get(y, 0.0) - pxy * v[y] / v[x]) <= 1e-12
        # concavity and Rayleigh on 100 random instances each
        for net, _, z in nets:
            m = net.num_edges
            c1, c2 = rng.uniform(0.1, 10, m), rng.uniform(0.1, 10, m)
            mid = effective_conductance(net, 0, z, (c1 + c2) / 2)
            assert mid >= (effective_conductance(net, 0, z, c1) + effective_conductance(net, 0, z, c2)) / 2 - 1e-9
            C = effective_conductance(net, 0, z)
            bump = net.conductances.copy()
            bump[int(rng.integers(m))] *= float(rng.uniform(1, 50))
            assert effective_conductance(net, 0, z, bump) >= C * (1 - 1e-9)
        info["detail"] = f"{n_sub} straddling edges split"


SMALL = {
    "crossings": dict(depths=[3, 4], trials=4000),
    "superlevel": dict(trials=6),
    "level-boundary": dict(depths=[3, 4, 5, 6], tgrid=[0.3, 0.6]),
    "ball-growth": dict(depths=[10]),
    "trace": dict(depths=[8], trials=4),
    "rn-growth": dict(trials=4, params={"cp_min": 3, "cp_max": 9}),
}


def test_criterion_9_reproducibility():
    with criterion(9, "byte-identical reruns, serial and parallel", 600.0) as info:
        for name, kw in SMALL.items():
            a = run_experiment(ExperimentConfig(name, seed=99, **kw)).to_csv()
            b = run_experiment(ExperimentConfig(name, seed=99, **kw)).to_csv()
            c = run_experiment(ExperimentConfig(name, seed=99, workers=4, **kw)).to_csv()
            assert a == b == c, name
        info["detail"] = f"{len(SMALL)} experiments"
