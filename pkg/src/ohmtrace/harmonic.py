"""Exact electrical computations on finite networks.

Everything reduces to one Dirichlet problem: fix the voltage on a boundary set
and make it harmonic elsewhere.  Small systems are factorized directly; large
ones go through Jacobi-preconditioned conjugate gradients.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Mapping

import numpy as np
import scipy.sparse as sp
import scipy.sparse.linalg as spla
from scipy.sparse.csgraph import connected_components

from .errors import (
    FlowOffEdge,
    MissingValue,
    NotACutset,
    OverlappingCutsets,
    SingularSystem,
    TOutOfRange,
    ToleranceNotReached,
    UnknownVertex,
)
from .network import Network

#: normwise backward error every solve must reach
RTOL = 1e-10
#: largest free-vertex count handled by sparse LU; bigger systems use CG
DIRECT_LIMIT = 5000
#: nearly tree-like systems (edges per vertex at most this) factor with little fill at any size
TREELIKE_RATIO = 1.5


def _vertex_set(A) -> frozenset:
    if isinstance(A, (int, np.integer)):
        return frozenset([int(A)])
    return frozenset(int(a) for a in A)


class SPDSolver:
    """Reusable solver for a symmetric positive definite sparse system."""

    def __init__(self, A: sp.spmatrix):
        self.A = A.tocsr()
        self.n = A.shape[0]
        self._lu = None
        self._anorm = float(abs(self.A).sum(axis=1).max()) if self.n else 0.0
        edges = (self.A.nnz - self.n) / 2
        if self.n <= DIRECT_LIMIT or edges <= TREELIKE_RATIO * self.n:
            try:
                self._lu = spla.splu(A.tocsc(), permc_spec="MMD_AT_PLUS_A")
            except RuntimeError as exc:
                raise SingularSystem(str(exc)) from exc
        else:
            self._precond = sp.diags(1.0 / self.A.diagonal())

    def backward_error(self, x: np.ndarray, b: np.ndarray) -> float:
        """Normwise backward error ``|b - Ax| / (|A| |x| + |b|)`` in the infinity norm."""
        r = np.abs(b - self.A @ x).max()
        return float(r / (self._anorm * np.abs(x).max() + np.abs(b).max()))

    def solve(self, b: np.ndarray) -> np.ndarray:
        A = self.A
        if not np.any(b):
            return np.zeros(self.n)
        if self._lu is not None:
            x = self._lu.solve(b)
            for _ in range(3):
                if self.backward_error(x, b) <= RTOL * 1e-2:
                    break
                x += self._lu.solve(b - A @ x)
        else:
            x, info = spla.cg(A, b, rtol=RTOL * 1e-2, maxiter=10 * self.n, M=self._precond)
            if info != 0:
                raise ToleranceNotReached(f"CG stopped after {info} iterations without converging")
        err = self.backward_error(x, b)
        if not np.isfinite(err) or err > RTOL:
            raise ToleranceNotReached(f"backward error {err:.3e} exceeds {RTOL:.0e}")
        return x


def _spd_solve(A: sp.csr_matrix, b: np.ndarray) -> np.ndarray:
    return SPDSolver(A).solve(b)


def grounded_solver(net: Network, ground: int, c: np.ndarray | None = None) -> tuple[SPDSolver, np.ndarray]:
    """Solver for the Laplacian with vertex index ``ground`` removed, plus the free indices."""
    free = np.delete(np.arange(net.num_vertices), ground)
    L = net.laplacian(c)
    return SPDSolver(L[free][:, free]), free


def solve_dirichlet(net: Network, fixed: np.ndarray, fixed_values: np.ndarray,
                    c: np.ndarray | None = None) -> np.ndarray:
    """Harmonic extension of ``fixed_values`` (given at vertex indices ``fixed``).

    ``c`` optionally replaces the network's conductances (same edge order).
    Returns the full voltage vector in index space.
    """
    fixed = np.asarray(fixed, dtype=np.int64)
    fixed_values = np.asarray(fixed_values, dtype=np.float64)
    n = net.num_vertices
    L = net.laplacian(c)
    free_mask = np.ones(n, dtype=bool)
    free_mask[fixed] = False
    free = np.flatnonzero(free_mask)
    x = np.zeros(n)
    x[fixed] = fixed_values
    if free.size == 0:
        return x
    rows = L[free]
    b = -(rows[:, fixed] @ fixed_values)
    x[free] = _spd_solve(rows[:, free].tocsr(), b)
    return x


@dataclass(frozen=True, eq=False)
class VoltageField:
    """Voltage that is 1 on ``source``, 0 at ``sink`` and harmonic elsewhere.

    ``values`` is aligned with ``network.vertices``.
    """

    network: Network
    values: np.ndarray
    source: frozenset
    sink: int

    def __getitem__(self, x) -> float:
        return float(self.values[self.network.index(x)])

    def as_dict(self) -> dict[int, float]:
        return dict(zip(self.network.vertices.tolist(), self.values.tolist()))

    def harmonic_residual(self) -> float:
        """Largest |sum_y c(x,y)[v(x) - v(y)]| over interior vertices."""
        net = self.network
        r = net.laplacian() @ self.values
        interior = np.ones(net.num_vertices, dtype=bool)
        interior[net.indices(self.source)] = False
        interior[net.index(self.sink)] = False
        return float(np.abs(r[interior]).max()) if interior.any() else 0.0


def _check_terminals(net: Network, A, z) -> tuple[frozenset, np.ndarray, int]:
    A = _vertex_set(A)
    if not A:
        raise ValueError("source set must be nonempty")
    if z in A:
        raise ValueError(f"sink {z} lies in the source set")
    return A, net.indices(sorted(A)), net.index(z)


def solve_voltage(net: Network, A, z: int, c: np.ndarray | None = None) -> VoltageField:
    """Solve the Dirichlet problem with unit voltage on ``A`` and zero at ``z``."""
    A, ai, zi = _check_terminals(net, A, z)
    fixed = np.append(ai, zi)
    vals = np.append(np.ones(ai.size), 0.0)
    v = solve_dirichlet(net, fixed, vals, c)
    v.setflags(write=False)
    return VoltageField(net, v, A, int(z))


def current_from_source(v: VoltageField, c: np.ndarray | None = None) -> float:
    """Current leaving the source set, sum over x in A, y not in A of [v(x) - v(y)] c(x, y)."""
    net = v.network
    w = net.conductances if c is None else c
    u, t = net.edge_indices
    src = np.zeros(net.num_vertices, dtype=bool)
    src[net.indices(v.source)] = True
    vals = v.values
    out = src[u] & ~src[t]
    inn = src[t] & ~src[u]
    return float(np.sum(w[out] * (vals[u[out]] - vals[t[out]])) + np.sum(w[inn] * (vals[t[inn]] - vals[u[inn]])))


def effective_conductance(net: Network, A, z: int, c: np.ndarray | None = None) -> float:
    """Effective conductance between the vertex set ``A`` and the vertex ``z``."""
    v = solve_voltage(net, A, z, c)
    return current_from_source(v, c)


def effective_resistance(net: Network, a, z: int) -> float:
    return 1.0 / effective_conductance(net, a, z)


@dataclass(frozen=True)
class HarmonicReport:
    effective_conductance: float
    effective_resistance: float
    alpha: float
    green_root: float


def harmonic_report(net: Network, o: int, z: int) -> HarmonicReport:
    C = effective_conductance(net, o, z)
    alpha = 1.0 / C
    return HarmonicReport(C, alpha, alpha, alpha * net.pi_of(o))


def green_array(net: Network, o: int, z: int) -> tuple[np.ndarray, float, VoltageField]:
    """``G(o, .)`` in index space for the walk killed at ``z``, with alpha and the voltage.

    Uses ``G(o, x) = pi(x) v(x) G(o, o) / pi(o)`` and ``G(o, o) = alpha pi(o)``.
    """
    if o == z:
        raise ValueError("o and z must differ")
    v = solve_voltage(net, o, z)
    alpha = 1.0 / current_from_source(v)
    return alpha * net.pi * v.values, alpha, v


def green_function(net: Network, o: int, z: int) -> dict[int, float]:
    """Expected visits to each vertex before absorption at ``z`` for the walk from ``o``."""
    g, _, _ = green_array(net, o, z)
    return dict(zip(net.vertices.tolist(), g.tolist()))


def _as_vertex_array(net: Network, F) -> np.ndarray:
    if isinstance(F, Mapping):
        try:
            return np.array([F[x] for x in net.vertices.tolist()], dtype=np.float64)
        except KeyError as exc:
            raise MissingValue(f"no value for vertex {exc.args[0]}") from None
    F = np.asarray(F, dtype=np.float64)
    if F.shape != (net.num_vertices,):
        raise MissingValue(f"expected {net.num_vertices} values, got shape {F.shape}")
    return F


def dirichlet_energy(net: Network, F) -> float:
    """(1/2) sum over ordered pairs of c(x,y)[F(x) - F(y)]^2, i.e. once per edge."""
    F = _as_vertex_array(net, F)
    u, v = net.edge_indices
    return float(np.sum(net.conductances * (F[u] - F[v]) ** 2))


@dataclass(frozen=True, eq=False)
class CurrentFlow:
    """Antisymmetric edge flow; ``values[k]`` is ``i(x, y)`` for the k-th edge with ``x < y``."""

    network: Network
    values: np.ndarray

    def __call__(self, x, y) -> float:
        k = self.network.edge_position(x, y)
        if k < 0:
            return 0.0
        return float(self.values[k]) if x < y else -float(self.values[k])

    @classmethod
    def from_mapping(cls, net: Network, flow: Mapping[tuple[int, int], float]) -> "CurrentFlow":
        vals = np.zeros(net.num_edges)
        seen = {}
        for (x, y), f in flow.items():
            k = net.edge_position(x, y) if x in net and y in net else -1
            if k < 0:
                raise FlowOffEdge(f"({x}, {y}) is not an edge")
            f = float(f) if x < y else -float(f)
            if k in seen and seen[k] != f:
                raise ValueError(f"flow on ({x}, {y}) is not antisymmetric")
            seen[k] = f
            vals[k] = f
        return cls(net, vals)

    def as_dict(self) -> dict[tuple[int, int], float]:
        out = {}
        for (x, y, _), f in zip(self.network.edges(), self.values.tolist()):
            out[(x, y)] = f
            out[(y, x)] = -f
        return out

    def divergence_array(self) -> np.ndarray:
        u, v = self.network.edge_indices
        n = self.network.num_vertices
        return np.bincount(u, weights=self.values, minlength=n) - np.bincount(v, weights=self.values, minlength=n)


def unit_current_flow(net: Network, A, z: int) -> CurrentFlow:
    """Unit current from ``A`` to ``z``: ``i(x, y) = c(x, y)[v(x) - v(y)] / C``."""
    v = solve_voltage(net, A, z)
    C = current_from_source(v)
    u, t = net.edge_indices
    vals = net.conductances * (v.values[u] - v.values[t]) / C
    return CurrentFlow(net, vals)


def _flow_on(net: Network, theta: CurrentFlow) -> np.ndarray:
    if theta.network is net:
        return theta.values
    out = np.zeros(net.num_edges)
    for (x, y, _), f in zip(theta.network.edges(), theta.values.tolist()):
        if f == 0.0:
            continue
        k = net.edge_position(x, y) if x in net and y in net else -1
        if k < 0:
            raise FlowOffEdge(f"flow on ({x}, {y}) but no such edge")
        out[k] = f
    return out


def flow_energy(net: Network, theta: CurrentFlow) -> float:
    """(1/2) sum over ordered pairs of theta(x,y)^2 / c(x,y)."""
    f = _flow_on(net, theta)
    return float(np.sum(f * f / net.conductances))


def divergence(net: Network, theta: CurrentFlow, x) -> float:
    """Net flow out of ``x``: sum over y of theta(x, y)."""
    i = net.index(x)
    f = _flow_on(net, theta)
    u, v = net.edge_indices
    return float(f[u == i].sum() - f[v == i].sum())


def nash_williams_bound(net: Network, cutsets: Iterable[Iterable[tuple[int, int]]], z: int,
                        source: int | None = None) -> float:
    """Sum over cutsets of (total cutset conductance)^-1, a lower bound on R(source, z)."""
    source = net.root if source is None else source
    si, zi = net.index(source), net.index(z)
    u, v = net.edge_indices
    n = net.num_vertices
    used: dict[int, int] = {}
    total = 0.0
    for k, cut in enumerate(cutsets):
        pos = []
        for x, y in cut:
            p = net.edge_position(x, y) if x in net and y in net else -1
            if p < 0:
                raise NotACutset(f"cutset {k}: ({x}, {y}) is not an edge")
            if p in used:
                raise OverlappingCutsets(f"edge ({x}, {y}) is in cutsets {used[p]} and {k}")
            used[p] = k
            pos.append(p)
        keep = np.ones(net.num_edges, dtype=bool)
        keep[pos] = False
        g = sp.csr_matrix((np.ones(int(keep.sum())), (u[keep], v[keep])), shape=(n, n))
        _, comp = connected_components(g, directed=False)
        if comp[si] == comp[zi]:
            raise NotACutset(f"cutset {k} does not separate {source} from {z}")
        total += 1.0 / float(net.conductances[pos].sum())
    return total


def _check_t(t: float) -> None:
    if not (0.0 < t < 1.0):
        raise TOutOfRange(f"threshold must lie in (0, 1), got {t!r}")


def superlevel_set(v: VoltageField, t: float) -> frozenset:
    """``{x : v(x) >= t}``."""
    _check_t(t)
    ids = v.network.vertices
    return frozenset(ids[v.values >= t].tolist())


@dataclass(frozen=True, eq=False)
class LevelCut:
    """Sublevel set ``V_t = {v < t}``, its outer boundary ``W_t`` and the induced network ``G_t``.

    ``G_t`` is rooted at the sink of the voltage.
    """

    t: float
    V_t: frozenset
    W_t: frozenset
    G_t: Network


def level_masks(net: Network, values: np.ndarray, t: float) -> tuple[np.ndarray, np.ndarray]:
    """Index masks of ``V_t`` and ``W_t`` for voltage vector ``values``."""
    below = values < t
    u, v = net.edge_indices
    cross = below[u] != below[v]
    boundary = np.zeros(net.num_vertices, dtype=bool)
    boundary[np.where(below[u[cross]], v[cross], u[cross])] = True
    return below, boundary


def level_cut(net: Network, v: VoltageField, t: float) -> LevelCut:
    _check_t(t)
    below, boundary = level_masks(net, v.values, t)
    ids = net.vertices
    G_t = net.induced(below | boundary, root=v.sink)
    return LevelCut(t, frozenset(ids[below].tolist()), frozenset(ids[boundary].tolist()), G_t)
