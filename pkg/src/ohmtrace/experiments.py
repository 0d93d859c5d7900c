"""Reproducible experiments over network families, reported as CSV.

Each experiment takes an :class:`ExperimentConfig` and returns an
:class:`ExperimentReport` whose rows depend only on the config, never on the
number of worker processes.
"""
from __future__ import annotations

import io
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field, replace
from typing import Callable, Sequence

import numpy as np
from scipy.sparse.csgraph import shortest_path
from scipy.stats import kendalltau

from . import __version__
from .errors import ConfigError, FormulaMismatch
from .harmonic import (
    current_from_source,
    effective_conductance,
    grounded_solver,
    level_masks,
    solve_voltage,
    superlevel_set,
)
from .network import (
    Exhaustion,
    Network,
    NetworkFamily,
    ball_network,
    collapse_boundary,
    load_network,
    make_family,
    random_network,
    save_network,
)
from .transforms import crossing_network, subdivide_level
from .walk import (
    crossing_counts,
    doubling_checkpoints,
    expected_crossings_arrays,
    log_ratio,
    make_rng,
    max_resistance,
    resistance_profile,
    run_on_family,
    sample_crossings,
    trace_network,
    EXACT_LIMIT,
)

EXIT_OK = 0
EXIT_VIOLATION = 2
EXIT_CONFIG = 3
EXIT_SOFT = 4

#: absolute slack allowed on inequalities that hold exactly in exact arithmetic
INEQ_TOL = 1e-9
IDENTITY_RTOL = 1e-9


@dataclass
class ExperimentConfig:
    experiment: str
    family: str | None = None
    params: dict = field(default_factory=dict)
    depths: list = field(default_factory=list)
    tgrid: list = field(default_factory=list)
    trials: int | None = None
    seed: int = 0
    out: str | None = None
    network: str | None = None
    sink: int | None = None
    workers: int = 1

    def validate(self) -> None:
        if any(b <= a for a, b in zip(self.depths, self.depths[1:])):
            raise ConfigError(f"depths must be strictly increasing, got {self.depths}")
        if any(d < 1 for d in self.depths):
            raise ConfigError("depths must be >= 1")
        if any(not (0.0 < t < 1.0) for t in self.tgrid):
            raise ConfigError(f"t-grid values must lie in (0, 1), got {self.tgrid}")
        if self.trials is not None and self.trials < 1:
            raise ConfigError("trials must be >= 1")
        if self.seed < 0:
            raise ConfigError("seed must be nonnegative")
        if self.workers < 1:
            raise ConfigError("workers must be >= 1")

    def echo(self) -> list[str]:
        """Config lines for the report header; ``out`` and ``workers`` do not affect results and are omitted."""
        lines = [
            f"family = {self.family if self.family is not None else ''}",
            f"network = {self.network if self.network is not None else ''}",
            f"sink = {self.sink if self.sink is not None else ''}",
            f"depths = {','.join(str(d) for d in self.depths)}",
            f"tgrid = {','.join(repr(float(t)) for t in self.tgrid)}",
            f"trials = {self.trials if self.trials is not None else ''}",
            f"seed = {self.seed}",
        ]
        lines += [f"param {k} = {self.params[k]}" for k in sorted(self.params)]
        return lines

    def resolved(self, family=None, depths=None, tgrid=None, trials=None) -> "ExperimentConfig":
        """Copy with unset fields filled from experiment defaults, so the header echoes what actually ran."""
        return replace(
            self,
            family=self.family if self.family or self.network else family,
            depths=list(self.depths) or list(depths or []),
            tgrid=list(self.tgrid) or list(tgrid or []),
            trials=self.trials if self.trials is not None else trials,
        )

    def param(self, key: str, default, cast: Callable = str):
        raw = self.params.get(key, default)
        try:
            return cast(raw)
        except (TypeError, ValueError):
            raise ConfigError(f"bad value for parameter {key!r}: {raw!r}") from None


def _fmt(x) -> str:
    if x is None:
        return ""
    if isinstance(x, (bool, np.bool_)):
        return "true" if x else "false"
    if isinstance(x, (float, np.floating)):
        return repr(float(x))
    if isinstance(x, (int, np.integer)):
        return str(int(x))
    return str(x)


@dataclass
class ExperimentReport:
    experiment: str
    claim: str
    config: ExperimentConfig
    columns: list
    rows: list = field(default_factory=list)
    status: int = EXIT_OK
    notes: list = field(default_factory=list)

    def add(self, **row) -> None:
        missing = set(self.columns) ^ set(row)
        if missing:
            raise KeyError(f"row columns differ from schema: {sorted(missing)}")
        self.rows.append(row)

    def flag(self, code: int, note: str) -> None:
        if code == EXIT_VIOLATION or self.status == EXIT_OK:
            self.status = code
        self.notes.append(note)

    def body(self) -> str:
        buf = io.StringIO()
        buf.write(",".join(self.columns) + "\n")
        for r in self.rows:
            buf.write(",".join(_fmt(r[c]) for c in self.columns) + "\n")
        return buf.getvalue()

    def header(self) -> str:
        lines = [
            f"# experiment: {self.experiment}",
            f"# claim: {self.claim}",
            f"# ohmtrace: {__version__}",
        ]
        lines += [f"# config: {line}" for line in self.config.echo()]
        lines.append(f"# status: {self.status}")
        lines += [f"# note: {n}" for n in self.notes]
        return "\n".join(lines) + "\n"

    def to_csv(self) -> str:
        return self.header() + self.body()

    def write(self, path) -> None:
        with open(path, "w", newline="") as fh:
            fh.write(self.to_csv())

    def column(self, name: str, kind: str | None = None) -> list:
        return [r[name] for r in self.rows if kind is None or r.get("kind") == kind]


def _pmap(fn, items: Sequence, workers: int) -> list:
    if workers > 1 and len(items) > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            return list(pool.map(fn, items))
    return [fn(x) for x in items]


def _family(config: ExperimentConfig, default: str) -> NetworkFamily:
    try:
        return make_family(config.family or default, config.params)
    except ValueError as exc:
        raise ConfigError(str(exc)) from exc


# -- expected crossing identity ------------------------------------------------------


def _instances(config: ExperimentConfig) -> list[tuple[str, Network, int]]:
    if config.network:
        net = load_network(config.network)
        if config.sink is None:
            raise ConfigError("--sink is required with --network")
        if config.sink not in net or config.sink == net.root:
            raise ConfigError(f"sink {config.sink} must be a non-root vertex of the network")
        return [("file", net, config.sink)]
    fam = _family(config, "b-ary-tree(2)")
    out = []
    for d in config.depths:
        net, z = collapse_boundary(Exhaustion(fam, d))
        out.append((str(d), net, z))
    return out


def crossing_identity(config: ExperimentConfig) -> ExperimentReport:
    """Analytic expected crossings by two routes against Monte Carlo means."""
    config.validate()
    config = config.resolved("b-ary-tree(2)", None if config.network else [6], trials=10_000)
    if config.trials < 2:
        raise ConfigError("crossings needs trials >= 2")
    rep = ExperimentReport(
        "crossings",
        "E[N(x,y)] = G(o,x)p(x,y) + G(o,y)p(y,x) = alpha c(x,y) [v(x) + v(y)]",
        config,
        ["kind", "instance", "x", "y", "c", "en_green", "en_voltage", "rel_gap",
         "mc_mean", "mc_se", "z_score", "within_4se"],
    )
    for name, net, z in _instances(config):
        o = net.root
        try:
            eg, ev, alpha, _ = expected_crossings_arrays(net, o, z, rtol=IDENTITY_RTOL)
        except FormulaMismatch as exc:
            rep.flag(EXIT_VIOLATION, f"instance {name}: {exc}")
            eg, ev, alpha, _ = expected_crossings_arrays(net, o, z, rtol=math.inf)
        gap = np.abs(eg - ev) / np.abs(ev)
        mc = sample_crossings(net, o, z, config.trials, config.seed, config.workers)
        diff = mc.mean - ev
        with np.errstate(divide="ignore", invalid="ignore"):
            zs = np.where(mc.std_error > 0, diff / mc.std_error, np.where(np.abs(diff) <= 1e-12, 0.0, np.inf))
        ok = np.abs(zs) <= 4.0
        xs, ys = net.edge_ids
        for k in range(net.num_edges):
            rep.add(kind="edge", instance=name, x=int(xs[k]), y=int(ys[k]), c=float(net.conductances[k]),
                    en_green=float(eg[k]), en_voltage=float(ev[k]), rel_gap=float(gap[k]),
                    mc_mean=float(mc.mean[k]), mc_se=float(mc.std_error[k]), z_score=float(zs[k]),
                    within_4se=bool(ok[k]))
        frac = float(ok.mean())
        rep.add(kind="summary", instance=name, x=None, y=None, c=None, en_green=None, en_voltage=None,
                rel_gap=float(gap.max()), mc_mean=frac, mc_se=None, z_score=float(np.abs(zs).max()),
                within_4se=frac >= 0.95)
        if gap.max() > IDENTITY_RTOL:
            rep.flag(EXIT_VIOLATION, f"instance {name}: formula gap {gap.max():.3e}")
        if mc.unabsorbed:
            rep.flag(EXIT_SOFT, f"instance {name}: {mc.unabsorbed} walks hit the step cap")
        if frac < 0.95:
            rep.flag(EXIT_SOFT, f"instance {name}: only {frac:.3f} of edges within 4 SE")
    return rep


# -- superlevel-set conductance bound ------------------------------------------------


def superlevel_bound(config: ExperimentConfig) -> ExperimentReport:
    """C(A_t, z) <= C(a, z) / t on random networks, plus the arbitrary-set corollary."""
    config.validate()
    config = config.resolved(tgrid=[k / 10 for k in range(1, 10)], trials=50)
    tgrid = config.tgrid
    n = config.param("n", 10, int)
    density = config.param("density", 0.3, float)
    cmin = config.param("cmin", 0.1, float)
    cmax = config.param("cmax", 10.0, float)
    rep = ExperimentReport(
        "superlevel",
        "C(A_t, z) <= C(a, z)/t and C(A, z) <= C(a, z)/min v|A",
        config,
        ["network", "kind", "t", "set_size", "c_set", "bound", "slack", "ok"],
    )
    for k in range(config.trials):
        rng = make_rng(config.seed, k)
        net = random_network(n, rng, density, (cmin, cmax))
        a, z = 0, n - 1
        v = solve_voltage(net, a, z)
        Caz = current_from_source(v)

        def row(kind, t, A, bound):
            C = effective_conductance(net, A, z)
            slack = bound - C
            ok = slack >= -INEQ_TOL
            rep.add(network=k, kind=kind, t=t, set_size=len(A), c_set=C, bound=bound, slack=slack, ok=ok)
            if not ok:
                rep.flag(EXIT_VIOLATION, f"network {k} {kind} t={t!r}: slack {slack:.3e}")

        row("source", 1.0, {a}, Caz)
        for t in tgrid:
            row("level", float(t), superlevel_set(v, t), Caz / t)
        others = [x for x in range(n) if x != z]
        size = int(rng.integers(1, len(others) + 1))
        A = set(rng.choice(others, size=size, replace=False).tolist())
        vmin = min(v[x] for x in A)
        row("subset", float(vmin), A, Caz / vmin if vmin > 0 else math.inf)
    return rep


# -- level-set boundary conductance trend --------------------------------------------


def _level_boundary_depth(args):
    fam, depth, tgrid = args
    net, z = collapse_boundary(Exhaustion(fam, depth))
    new, alpha, v = crossing_network(net, net.root, z)
    out = []
    for t in tgrid:
        below, wall = level_masks(net, v.values, t)
        keep = below | wall
        W = net.vertices[wall].tolist()
        G_c = net.induced(keep, root=z)
        G_new = new.induced(keep, root=z)
        C_orig = effective_conductance(G_c, W, z)
        C_new = effective_conductance(G_new, W, z)
        # same quantity after inserting level-t vertices on straddling edges
        sub, level = subdivide_level(net, v, t)
        sub_new, _, vs2 = crossing_network(sub, sub.root, z)
        below_s = vs2.values < t
        keep_s = below_s.copy()
        keep_s[sub.indices(level)] = True
        C_new_sub = effective_conductance(sub_new.induced(keep_s, root=z), level, z)
        out.append(dict(t=float(t), depth=depth, alpha=alpha, w_size=len(W),
                        w_min_voltage=float(v.values[wall].min()), c_new=C_new, c_new_subdivided=C_new_sub,
                        c_orig=C_orig, orig_bound=1.0 / (alpha * t)))
    return out


def level_boundary_trend(config: ExperimentConfig) -> ExperimentReport:
    """Conductance from W_t toward the collapsed boundary in G_t, with E[N] and original weights."""
    config.validate()
    config = config.resolved("b-ary-tree(2)", list(range(4, 17)), [0.2, 0.5, 0.8])
    fam = _family(config, "b-ary-tree(2)")
    depths, tgrid = config.depths, config.tgrid
    slack = config.param("slack", 0.05, float)
    rep = ExperimentReport(
        "level-boundary",
        "C(W_t, z_n; G_t, E[N]) <= 2 and C(W_t, z_n; G_t, c) <= 1/(alpha t), decreasing toward the limit",
        config,
        ["kind", "t", "depth", "alpha", "w_size", "w_min_voltage", "c_new", "c_new_subdivided",
         "c_orig", "orig_bound", "nonincreasing", "ok"],
    )
    per_depth = _pmap(_level_boundary_depth, [(fam, d, tuple(tgrid)) for d in depths], config.workers)
    for j, t in enumerate(tgrid):
        seq = [per_depth[i][j] for i in range(len(depths))]
        mono = True
        for i, r in enumerate(seq):
            step_ok = i == 0 or r["c_new"] <= seq[i - 1]["c_new"] + INEQ_TOL
            mono = mono and step_ok
            ok = (r["c_new"] <= 2 + INEQ_TOL and r["c_new_subdivided"] <= 2 + INEQ_TOL
                  and r["c_new"] <= r["c_new_subdivided"] + INEQ_TOL and r["c_orig"] <= r["orig_bound"] + INEQ_TOL)
            rep.add(kind="depth", nonincreasing=step_ok, ok=ok, **r)
            if not ok:
                rep.flag(EXIT_VIOLATION, f"t={t!r} depth={r['depth']}: finite-depth bound violated")
        last = seq[-1]
        tail_new = last["c_new"] <= 2 + slack
        tail_orig = last["c_orig"] <= (1 + slack) * last["orig_bound"]
        rep.add(kind="summary", t=float(t), depth=last["depth"], alpha=last["alpha"], w_size=last["w_size"],
                w_min_voltage=last["w_min_voltage"], c_new=last["c_new"],
                c_new_subdivided=last["c_new_subdivided"], c_orig=last["c_orig"],
                orig_bound=last["orig_bound"], nonincreasing=mono, ok=tail_new and tail_orig)
        if not mono:
            rep.flag(EXIT_SOFT, f"t={t!r}: E[N] conductance sequence is not nonincreasing")
        if not (tail_new and tail_orig):
            rep.flag(EXIT_SOFT, f"t={t!r}: tail above 2+{slack} or (1+{slack})/(alpha t)")
    return rep


# -- ball conductance growth -------------------------------------------------------


def ball_growth(config: ExperimentConfig) -> ExperimentReport:
    """Conductance from growing balls B_k to the collapsed boundary of a large ball."""
    config.validate()
    config = config.resolved("b-ary-tree(2)", [20])
    fam = _family(config, "b-ary-tree(2)")
    outer = config.depths[-1]
    m = config.param("m", 5.0, float)
    rep = ExperimentReport(
        "ball-growth",
        "for transient networks C(B_k, infinity) exceeds any m for large k",
        config,
        ["k", "ball_size", "conductance", "exceeds_m"],
    )
    net, z = collapse_boundary(Exhaustion(fam, outer))
    graph = net.laplacian().astype(bool).astype(np.float64)
    dist = shortest_path(graph, method="D", unweighted=True, indices=net.root_index)
    zi = net.index(z)
    ids = net.vertices
    witness = None
    for k in range(outer + 1):
        ball = ids[(dist <= k) & (np.arange(ids.size) != zi)].tolist()
        C = effective_conductance(net, ball, z)
        rep.add(k=k, ball_size=len(ball), conductance=C, exceeds_m=C > m)
        if C > m:
            witness = k
            break
    rep.notes.append(f"witness k = {witness}" if witness is not None else "no witness")
    if witness is None:
        rep.flag(EXIT_SOFT, f"m={m!r} not reached within outer depth {outer}")
    return rep


# -- trace recurrence diagnostics ----------------------------------------------------


def _trace_walk(args):
    fam, radius, seed, w, cap, exact_limit, pairs = args
    path = run_on_family(fam, exit_radius=radius, cap=cap, rng=make_rng(seed, w))
    cps = doubling_checkpoints(path.steps)
    ind = resistance_profile(path, cps, "indicator", exact_limit).entries
    cnt = resistance_profile(path, cps, "counts", exact_limit).entries
    trace = trace_network(crossing_counts(path), "indicator")
    # pairs for the Rayleigh comparison, drawn from this walk's own stream
    rng = make_rng(seed, 2**32 + w)
    n = trace.num_vertices
    chosen = []
    for _ in range(pairs):
        x, y = rng.choice(n, size=2, replace=False).tolist()
        chosen.append((x, y))
    for x in range(1, min(n, pairs + 1)):
        chosen.append((0, n - x))
    trace_r = _pair_resistances(trace, chosen)
    labels = trace.labels if trace.labels is not None else trace.vertices.tolist()
    return path, ind, cnt, labels, chosen, trace_r


def _pair_resistances(net: Network, pairs: list[tuple[int, int]]) -> list[float]:
    """Exact ``R(x, y)`` for index pairs, via one grounded factorization."""
    g = net.root_index
    solver, free = grounded_solver(net, g)
    pos = np.full(net.num_vertices, -1)
    pos[free] = np.arange(free.size)
    out = []
    for x, y in pairs:
        b = np.zeros(free.size)
        if pos[x] >= 0:
            b[pos[x]] += 1.0
        if pos[y] >= 0:
            b[pos[y]] -= 1.0
        sol = solver.solve(b)
        out.append(float(b @ sol))
    return out


def trace_recurrence(config: ExperimentConfig) -> ExperimentReport:
    """R(n) profiles of walk traces with Rayleigh cross-checks against the full ball."""
    config.validate()
    config = config.resolved("lattice(3)", [30], trials=10)
    fam = _family(config, "lattice(3)")
    radius = config.depths[-1]
    cap = config.param("cap", 10_000_000, int)
    exact_limit = config.param("exact_limit", EXACT_LIMIT, int)
    pairs = config.param("pairs", 8, int)
    dump = config.params.get("dump")
    rep = ExperimentReport(
        "trace",
        "traces (G, N) and (G, 1{N>0}) of a transient walk are recurrent: R(n) grows; Rayleigh orderings hold",
        config,
        ["kind", "walk", "n", "r_indicator", "r_counts", "exact", "indicator_ge_counts",
         "kendall_tau", "rayleigh_pairs", "rayleigh_ok"],
    )
    jobs = [(fam, radius, config.seed, w, cap, exact_limit, pairs) for w in range(config.trials)]
    results = _pmap(_trace_walk, jobs, config.workers)
    full = ball_network(fam, radius + 1)
    full_unit = full.with_conductances(np.ones(full.num_edges))
    full_labels = full.labels if full.labels is not None else full.vertices.tolist()
    where = {lab: i for i, lab in enumerate(full_labels)}
    for w, (path, ind, cnt, labels, chosen, trace_r) in enumerate(results):
        steps, absorbed = path.steps, path.absorbed
        for (n, ri, ei), (_, rc, ec) in zip(ind, cnt):
            ge = ri >= rc - INEQ_TOL
            rep.add(kind="checkpoint", walk=w, n=n, r_indicator=ri, r_counts=rc, exact=ei and ec,
                    indicator_ge_counts=ge, kendall_tau=None, rayleigh_pairs=None, rayleigh_ok=None)
            if ei and ec and not ge:
                rep.flag(EXIT_VIOLATION, f"walk {w} n={n}: R_indicator < R_counts")
        full_pairs = [(where[labels[x]], where[labels[y]]) for x, y in chosen]
        full_r = _pair_resistances(full_unit, full_pairs)
        ray = all(a >= b - INEQ_TOL * max(1.0, b) for a, b in zip(trace_r, full_r))
        ns = [e[0] for e in ind]
        rs = [e[1] for e in ind]
        tau = float(kendalltau(ns, rs).statistic) if len(ns) > 1 else math.nan
        rep.add(kind="walk", walk=w, n=steps, r_indicator=rs[-1], r_counts=cnt[-1][1],
                exact=all(e[2] for e in ind + cnt), indicator_ge_counts=all(a[1] >= b[1] - INEQ_TOL for a, b in zip(ind, cnt)),
                kendall_tau=tau, rayleigh_pairs=len(chosen), rayleigh_ok=ray)
        if not ray:
            rep.flag(EXIT_VIOLATION, f"walk {w}: trace resistance below full-graph resistance")
        if not absorbed:
            rep.flag(EXIT_SOFT, f"walk {w}: step cap reached before leaving radius {radius}")
        if not tau > 0:
            rep.flag(EXIT_SOFT, f"walk {w}: Kendall tau {tau!r} is not positive")
        if dump:
            save_network(trace_network(crossing_counts(path), "counts"), f"{dump}/walk_{w}.txt")
    return rep


# -- exploratory R(n) growth ---------------------------------------------------------


def _growth_walk(args):
    fam, seed, w, lo, hi, radius, exact_limit = args
    path = run_on_family(fam, exit_radius=radius, cap=2**hi, rng=make_rng(seed, w))
    cps = [2**k for k in range(lo, hi + 1) if 2**k <= path.steps]
    return resistance_profile(path, cps, "indicator", exact_limit).entries if cps else []


def rn_growth(config: ExperimentConfig) -> ExperimentReport:
    """Exploratory: R(n) against log n and log^2 n at doubling checkpoints. Asserts nothing."""
    config.validate()
    config = config.resolved("lattice(3)", trials=20)
    fam = _family(config, "lattice(3)")
    lo = config.param("cp_min", 6, int)
    hi = config.param("cp_max", 14, int)
    radius = config.param("exit_radius", 10**9, int)
    exact_limit = config.param("exact_limit", EXACT_LIMIT, int)
    if not 0 <= lo <= hi:
        raise ConfigError("need 0 <= cp_min <= cp_max")
    rep = ExperimentReport(
        "rn-growth",
        "EXPLORATORY: growth rate of R(n); no threshold is asserted",
        config,
        ["kind", "walk", "n", "r", "r_over_log2", "r_over_log", "exact", "quantile"],
    )
    jobs = [(fam, config.seed, w, lo, hi, radius, exact_limit) for w in range(config.trials)]
    results = _pmap(_growth_walk, jobs, config.workers)
    by_n: dict[int, list[float]] = {}
    for w, entries in enumerate(results):
        for n, R, exact in entries:
            rep.add(kind="walk", walk=w, n=n, r=R, r_over_log2=log_ratio(R, n, 2), r_over_log=log_ratio(R, n, 1),
                    exact=exact, quantile=None)
            by_n.setdefault(n, []).append(R)
    for n in sorted(by_n):
        for q in (0.1, 0.5, 0.9):
            R = float(np.quantile(by_n[n], q))
            rep.add(kind="quantile", walk=None, n=n, r=R, r_over_log2=log_ratio(R, n, 2),
                    r_over_log=log_ratio(R, n, 1), exact=None, quantile=q)
    return rep


EXPERIMENTS = {
    "crossings": crossing_identity,
    "superlevel": superlevel_bound,
    "level-boundary": level_boundary_trend,
    "ball-growth": ball_growth,
    "trace": trace_recurrence,
    "rn-growth": rn_growth,
}


def run_experiment(config: ExperimentConfig) -> ExperimentReport:
    try:
        fn = EXPERIMENTS[config.experiment]
    except KeyError:
        raise ConfigError(f"unknown experiment {config.experiment!r}; choose from {sorted(EXPERIMENTS)}") from None
    return fn(config)
