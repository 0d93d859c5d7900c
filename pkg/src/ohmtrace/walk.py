"""Seeded network random walks, crossing counts, trace networks and R(n) profiles."""
from __future__ import annotations

import math
from bisect import bisect_right
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Hashable, Sequence

import numpy as np
import scipy.linalg as sla

from .errors import EmptyTrace, FormulaMismatch, IsolatedVertex
from .harmonic import grounded_solver, green_array, solve_voltage
from .network import Network, NetworkFamily

DEFAULT_CAP = 10_000_000
#: traces with at most this many vertices get the exact R(n) maximum
EXACT_LIMIT = 2000
#: candidates checked exactly when R(n) is located heuristically
HEURISTIC_CANDIDATES = 32
_BLOCK = 512
_MAX_ID = 2**62


# -- generators ------------------------------------------------------------


@lru_cache(maxsize=64)
def _philox_key(seed: int) -> tuple[int, int]:
    k = np.random.SeedSequence(seed).generate_state(2, dtype=np.uint64)
    return int(k[0]), int(k[1])


def make_rng(seed: int, stream: int = 0) -> np.random.Generator:
    """Counter-based generator for trial ``stream`` of a run seeded with ``seed``.

    The seed fixes the Philox key; the stream index occupies the top counter
    word, so streams never overlap.
    """
    if seed < 0 or stream < 0:
        raise ValueError("seed and stream must be nonnegative")
    key = np.array(_philox_key(seed & (2**64 - 1)), dtype=np.uint64)
    counter = np.array([0, 0, 0, stream], dtype=np.uint64)
    return np.random.Generator(np.random.Philox(counter=counter, key=key))


class _Uniforms:
    __slots__ = ("rng", "buf", "pos")

    def __init__(self, rng: np.random.Generator):
        self.rng = rng
        self.buf: list[float] = []
        self.pos = 0

    def __call__(self) -> float:
        if self.pos == len(self.buf):
            self.buf = self.rng.random(_BLOCK).tolist()
            self.pos = 0
        u = self.buf[self.pos]
        self.pos += 1
        return u


# -- walking on finite networks ----------------------------------------------


def _rows(net: Network) -> dict:
    rows = net._cache.get("walk")
    if rows is None:
        rows = net._cache["walk"] = {}
    return rows


def _row(net: Network, rows: dict, i: int):
    row = rows.get(i)
    if row is None:
        nb, cc = net.neighbor_slice(i)
        if nb.size == 0:
            raise IsolatedVertex(f"vertex {net.vertices[i]} has no neighbors")
        a, b = net._indptr[i], net._indptr[i + 1]
        row = rows[i] = (nb.tolist(), np.cumsum(cc).tolist(), net._adj_edge[a:b].tolist())
    return row


def _choose(cum: list[float], u: float) -> int:
    k = bisect_right(cum, u * cum[-1])
    return k if k < len(cum) else len(cum) - 1


def step(net: Network, x, rng: np.random.Generator):
    """One step from ``x``: neighbor ``y`` with probability ``c(x, y) / pi(x)``."""
    rows = _rows(net)
    nb, cum, _ = _row(net, rows, net.index(x))
    return int(net.vertices[nb[_choose(cum, rng.random())]])


@dataclass(frozen=True)
class WalkPath:
    """Visited vertices ``X_0 .. X_steps`` and whether the walk was stopped by the absorber."""

    vertices: list
    absorbed: bool
    exit_radius: int | None = None

    @property
    def steps(self) -> int:
        return len(self.vertices) - 1

    @property
    def root(self):
        return self.vertices[0]


def _walk_indices(net: Network, oi: int, zi: int, cap: int, uni: _Uniforms):
    rows = _rows(net)
    path = [oi]
    edges = []
    x = oi
    while x != zi and len(edges) < cap:
        nb, cum, eid = _row(net, rows, x)
        k = _choose(cum, uni())
        edges.append(eid[k])
        x = nb[k]
        path.append(x)
    return path, edges, x == zi


def run_until_absorbed(net: Network, o, z, cap: int = DEFAULT_CAP,
                       rng: np.random.Generator | None = None) -> WalkPath:
    """Walk from ``o`` until it hits ``z`` or has made ``cap`` steps."""
    if o == z:
        raise ValueError("o and z must differ")
    rng = make_rng(0) if rng is None else rng
    path, _, absorbed = _walk_indices(net, net.index(o), net.index(z), cap, _Uniforms(rng))
    ids = net.vertices
    return WalkPath([int(ids[i]) for i in path], absorbed)


def run_on_family(fam: NetworkFamily, o=None, exit_radius: int = 1, cap: int = DEFAULT_CAP,
                  rng: np.random.Generator | None = None) -> WalkPath:
    """Walk on the lazily generated family until it first leaves the ball of ``exit_radius``.

    The exiting vertex is kept as the last vertex of the path; later steps are never simulated.
    """
    if exit_radius < 1:
        raise ValueError("exit_radius must be >= 1")
    rng = make_rng(0) if rng is None else rng
    uni = _Uniforms(rng)
    x = fam.root if o is None else o
    table: dict = {}
    path = [x]
    dist = fam.distance
    absorbed = dist(x) > exit_radius
    while not absorbed and len(path) <= cap:
        row = table.get(x)
        if row is None:
            nbrs = fam.neighbors(x)
            if not nbrs:
                raise IsolatedVertex(f"vertex {x!r} has no neighbors")
            row = table[x] = ([y for y, _ in nbrs], np.cumsum([w for _, w in nbrs]).tolist())
        x = row[0][_choose(row[1], uni())]
        path.append(x)
        absorbed = dist(x) > exit_radius
    return WalkPath(path, absorbed, exit_radius)


# -- crossings and traces ----------------------------------------------------


def _edge_key(a, b):
    return (a, b) if a < b else (b, a)


@dataclass(frozen=True)
class CrossingCounts:
    """Undirected traversal counts ``N(e)`` plus signed net crossings along ``(a, b)``, ``a < b``."""

    root: Hashable
    counts: dict
    net_flow: dict
    order: list = field(repr=False)
    steps: int = 0

    def __getitem__(self, e) -> int:
        return self.counts.get(_edge_key(*e), 0)


def crossing_counts(path: WalkPath, upto: int | None = None) -> CrossingCounts:
    """Count traversals of each edge during the first ``upto`` steps (all steps by default)."""
    vs = path.vertices
    n = path.steps if upto is None else min(upto, path.steps)
    counts: dict = {}
    flow: dict = {}
    seen = {vs[0]: None}
    for i in range(n):
        a, b = vs[i], vs[i + 1]
        if b not in seen:
            seen[b] = None
        if a < b:
            key, s = (a, b), 1
        else:
            key, s = (b, a), -1
        counts[key] = counts.get(key, 0) + 1
        flow[key] = flow.get(key, 0) + s
    return CrossingCounts(vs[0], counts, flow, list(seen), n)


def trace_network(N: CrossingCounts, mode: str = "counts") -> Network:
    """Network on the traversed edges with conductance ``N(e)`` (counts) or 1 (indicator).

    Integer vertex ids that fit in int64 are kept; other labels are renumbered in order of first
    visit, the root becoming 0, and attached as network labels.
    """
    if mode not in ("counts", "indicator"):
        raise ValueError(f"mode must be 'counts' or 'indicator', got {mode!r}")
    if not N.counts:
        raise EmptyTrace("no edge was traversed")
    keys = list(N.counts)
    c = np.array([N.counts[k] for k in keys], dtype=np.float64) if mode == "counts" else np.ones(len(keys))
    if all(isinstance(x, (int, np.integer)) and 0 <= x < _MAX_ID for x in N.order):
        return Network([k[0] for k in keys], [k[1] for k in keys], c, N.root)
    ix = {x: i for i, x in enumerate(N.order)}
    return Network([ix[k[0]] for k in keys], [ix[k[1]] for k in keys], c, 0, N.order)


# -- expected crossings --------------------------------------------------------


def _green_direct(net: Network, oi: int, zi: int) -> np.ndarray:
    # G(o, y) / pi(y) solves the grounded Laplacian system with a unit source at o
    solver, free = grounded_solver(net, zi)
    b = np.zeros(free.size)
    b[np.searchsorted(free, oi)] = 1.0
    g = np.zeros(net.num_vertices)
    g[free] = solver.solve(b)
    return g * net.pi


def expected_crossings_arrays(net: Network, o, z, rtol: float = 1e-9):
    """Per-edge ``E[N]`` (canonical edge order) by both analytic routes.

    Returns ``(via_green, via_voltage, alpha, voltage)``.  The Green-function
    route uses an independent solve; a disagreement beyond ``rtol`` raises
    :class:`FormulaMismatch`.
    """
    oi, zi = net.index(o), net.index(z)
    _, alpha, v = green_array(net, o, z)
    G = _green_direct(net, oi, zi)
    u, t = net.edge_indices
    c, pi = net.conductances, net.pi
    via_green = G[u] * c / pi[u] + G[t] * c / pi[t]
    via_voltage = alpha * c * (v.values[u] + v.values[t])
    gap = np.abs(via_green - via_voltage) / np.maximum(np.abs(via_voltage), np.finfo(float).tiny)
    if gap.size and gap.max() > rtol:
        k = int(gap.argmax())
        raise FormulaMismatch(f"E[N] routes disagree by {gap[k]:.3e} (relative) on edge {k}")
    return via_green, via_voltage, alpha, v


def expected_crossings_analytic(net: Network, o, z) -> dict[tuple[int, int], float]:
    """``E[N(x, y)] = alpha c(x, y)[v(x) + v(y)]`` for every edge, cross-checked against the Green route."""
    _, ev, _, _ = expected_crossings_arrays(net, o, z)
    x, y = net.edge_ids
    return dict(zip(zip(x.tolist(), y.tolist()), ev.tolist()))


def _mc_chunk(args):
    net, oi, zi, cap, seed, start, stop = args
    m = net.num_edges
    total = np.zeros(m, dtype=np.int64)
    total_sq = np.zeros(m, dtype=np.int64)
    unabsorbed = 0
    for trial in range(start, stop):
        _, edges, absorbed = _walk_indices(net, oi, zi, cap, _Uniforms(make_rng(seed, trial)))
        unabsorbed += not absorbed
        k = np.bincount(np.asarray(edges, dtype=np.int64), minlength=m)
        total += k
        total_sq += k * k
    return total, total_sq, unabsorbed


@dataclass(frozen=True)
class CrossingSample:
    """Monte Carlo crossing statistics in canonical edge order."""

    mean: np.ndarray
    std_error: np.ndarray
    trials: int
    unabsorbed: int


def sample_crossings(net: Network, o, z, trials: int, seed: int, workers: int = 1,
                     cap: int = DEFAULT_CAP, chunk: int = 2000) -> CrossingSample:
    """Sample ``trials`` walks from ``o`` to ``z``; trial ``k`` uses stream ``k`` of ``seed``.

    Per-trial counts are summed as integers, so the result does not depend on
    ``workers`` or ``chunk``.
    """
    if trials < 2:
        raise ValueError("need at least two trials for a standard error")
    oi, zi = net.index(o), net.index(z)
    jobs = [(net, oi, zi, cap, seed, s, min(s + chunk, trials)) for s in range(0, trials, chunk)]
    if workers > 1 and len(jobs) > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            parts = list(pool.map(_mc_chunk, jobs))
    else:
        parts = [_mc_chunk(j) for j in jobs]
    total = sum(p[0] for p in parts)
    total_sq = sum(p[1] for p in parts)
    unabsorbed = sum(p[2] for p in parts)
    mean = total / trials
    var = (total_sq - trials * mean * mean) / (trials - 1)
    se = np.sqrt(np.maximum(var, 0.0) / trials)
    return CrossingSample(mean, se, trials, unabsorbed)


def monte_carlo_expected_crossings(net: Network, o, z, trials: int, seed: int,
                                   workers: int = 1) -> dict[tuple[int, int], tuple[float, float]]:
    """Per-edge sample mean and standard error of ``N`` over independent absorbed walks."""
    s = sample_crossings(net, o, z, trials, seed, workers)
    x, y = net.edge_ids
    return {
        (a, b): (m, e)
        for a, b, m, e in zip(x.tolist(), y.tolist(), s.mean.tolist(), s.std_error.tolist())
    }


# -- resistance profiles -------------------------------------------------------


@dataclass(frozen=True)
class ResistanceProfile:
    """Rows ``(n, R(n), exact_mode)`` at increasing step counts."""

    entries: list

    @property
    def steps(self) -> list[int]:
        return [e[0] for e in self.entries]

    @property
    def values(self) -> list[float]:
        return [e[1] for e in self.entries]


def resistances_from_root(net: Network) -> np.ndarray:
    """Exact ``R(root, x)`` for every vertex (index space) via the grounded Laplacian inverse."""
    r = net.root_index
    free = np.delete(np.arange(net.num_vertices), r)
    L = net.laplacian()[free][:, free].toarray()
    chol, info = sla.lapack.dpotrf(L, lower=False)
    if info != 0:
        raise np.linalg.LinAlgError("grounded Laplacian is not positive definite")
    inv, info = sla.lapack.dpotri(chol, lower=False)
    out = np.zeros(net.num_vertices)
    out[free] = np.diag(inv)
    return out


def max_resistance(net: Network, exact_limit: int = EXACT_LIMIT) -> tuple[float, bool]:
    """Largest effective resistance between the root and another vertex.

    Exact up to ``exact_limit`` vertices.  Above it: one voltage solve toward the
    vertex with the largest grounded potential, then exact resistances for the
    lowest-voltage candidates.  Returns ``(R, exact)``.
    """
    if net.num_vertices <= exact_limit:
        return float(resistances_from_root(net).max()), True
    r = net.root_index
    solver, free = grounded_solver(net, r)
    # every vertex injects unit current, all drained at the root
    phi = solver.solve(np.ones(free.size))
    far = int(free[int(np.argmax(phi))])
    ids = net.vertices
    v = solve_voltage(net, int(ids[r]), int(ids[far]))
    vals = v.values.copy()
    vals[r] = np.inf
    cand = np.argsort(vals, kind="stable")[:HEURISTIC_CANDIDATES]
    best = 0.0
    for x in cand:
        b = np.zeros(free.size)
        k = int(np.searchsorted(free, x))
        b[k] = 1.0
        best = max(best, float(solver.solve(b)[k]))
    return best, False


def resistance_profile(path: WalkPath, checkpoints: Sequence[int], mode: str = "indicator",
                       exact_limit: int = EXACT_LIMIT) -> ResistanceProfile:
    """``R(n)`` on the trace of the first ``n`` steps for each checkpoint ``n``.

    ``mode`` picks unit conductances (``indicator``) or crossing counts (``counts``).
    """
    cps = list(checkpoints)
    if any(b <= a for a, b in zip(cps, cps[1:])):
        raise ValueError("checkpoints must be strictly increasing")
    if cps and (cps[0] < 1 or cps[-1] > path.steps):
        raise ValueError(f"checkpoints must lie in [1, {path.steps}]")
    entries = []
    for n in cps:
        net = trace_network(crossing_counts(path, n), mode)
        R, exact = max_resistance(net, exact_limit)
        entries.append((n, R, exact))
    return ResistanceProfile(entries)


def doubling_checkpoints(steps: int, start: int = 1) -> list[int]:
    """``start, 2 start, 4 start, ...`` up to ``steps``, with ``steps`` appended if missing."""
    out = []
    n = start
    while n <= steps:
        out.append(n)
        n *= 2
    if steps >= 1 and (not out or out[-1] != steps):
        out.append(steps)
    return out


def log_ratio(R: float, n: int, power: int) -> float:
    ln = math.log(n)
    return R / ln ** power if ln > 0 else math.nan
