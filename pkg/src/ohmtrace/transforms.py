"""Network surgery driven by a voltage field: subdivision at a level, reweighting,
Doob transforms and vertex deletion."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.sparse import csr_matrix
from scipy.sparse.csgraph import connected_components

from .errors import (
    AllEdgesVanished,
    DivisionByZeroVoltageGap,
    EdgeSetMismatch,
    NotStraddling,
    RootIsolated,
)
from .harmonic import VoltageField, _check_t
from .network import Network
from .walk import expected_crossings_arrays


@dataclass(frozen=True)
class SubdivisionRecord:
    edge: tuple[int, int]
    w: int
    r_xw: float
    r_wy: float
    t: float


def _split(r: float, vx: float, vy: float, t: float) -> tuple[float, float]:
    gap = vx - vy
    return (vx - t) / gap * r, (t - vy) / gap * r


def subdivide_edge(net: Network, edge: tuple[int, int], v: VoltageField, t: float):
    """Insert a vertex on ``edge`` so that its voltage is exactly ``t``.

    The edge must strictly straddle ``t``.  Returns the new network and a
    :class:`SubdivisionRecord`; ``x`` in the record is the high-voltage end.
    """
    x, y = edge
    vx, vy = v[x], v[y]
    if vx < vy:
        x, y, vx, vy = y, x, vy, vx
    if not (vx > t > vy):
        raise NotStraddling(f"t={t!r} is not strictly between v({y})={vy!r} and v({x})={vx!r}")
    k = net.edge_position(x, y)
    if k < 0:
        raise NotStraddling(f"({x}, {y}) is not an edge")
    r_xw, r_wy = _split(1.0 / float(net.conductances[k]), vx, vy, t)
    w = int(net.vertices[-1]) + 1
    eu, ev = net.edge_ids
    keep = np.ones(net.num_edges, dtype=bool)
    keep[k] = False
    u = np.concatenate([eu[keep], [x, w]])
    vv = np.concatenate([ev[keep], [w, y]])
    c = np.concatenate([net.conductances[keep], [1.0 / r_xw, 1.0 / r_wy]])
    return Network(u, vv, c, net.root), SubdivisionRecord((x, y), w, r_xw, r_wy, t)


def subdivide_level(net: Network, v: VoltageField, t: float) -> tuple[Network, frozenset]:
    """Subdivide every edge strictly straddling ``t``.

    Returns the new network and ``W'_t``: the new vertices plus original
    vertices at voltage exactly ``t`` that border ``{v < t}``.  Edges touching
    a vertex at voltage exactly ``t`` are left alone.
    """
    _check_t(t)
    vals = v.values
    u, w = net.edge_indices
    hi_end = np.where(vals[u] >= vals[w], u, w)
    lo_end = np.where(vals[u] >= vals[w], w, u)
    vh, vl = vals[hi_end], vals[lo_end]
    cross = (vh > t) & (vl < t)
    ids = net.vertices
    exact = np.flatnonzero(vals == t)
    below = vals < t
    nb_below = np.zeros(net.num_vertices, dtype=bool)
    nb_below[u[below[w]]] = True
    nb_below[w[below[u]]] = True
    level = {int(ids[i]) for i in exact if nb_below[i]}
    if not cross.any():
        return net, frozenset(level)
    ks = np.flatnonzero(cross)
    new = int(ids[-1]) + 1 + np.arange(ks.size)
    r = 1.0 / net.conductances[ks]
    gap = vh[ks] - vl[ks]
    r_hw = (vh[ks] - t) / gap * r
    r_wl = (t - vl[ks]) / gap * r
    keep = ~cross
    eu, ev = net.edge_ids
    U = np.concatenate([eu[keep], ids[hi_end[ks]], new])
    V = np.concatenate([ev[keep], new, ids[lo_end[ks]]])
    C = np.concatenate([net.conductances[keep], 1.0 / r_hw, 1.0 / r_wl])
    return Network(U, V, C, net.root), frozenset(level | set(new.tolist()))


def straddle_reweight(net: Network, v: VoltageField, t: float) -> Network:
    """Raise the conductance of each edge with ``v(x) > t >= v(y)`` to ``c [v(x) - v(y)] / [t - v(y)]``.

    This is the conductance between the low end and a vertex inserted at
    voltage ``t``; all other edges are untouched.
    """
    _check_t(t)
    vals = v.values
    u, w = net.edge_indices
    vh = np.maximum(vals[u], vals[w])
    vl = np.minimum(vals[u], vals[w])
    hit = (vh > t) & (vl <= t)
    if np.any(vl[hit] == t):
        k = int(np.flatnonzero(hit & (vl == t))[0])
        x, y = net.vertices[u[k]], net.vertices[w[k]]
        raise DivisionByZeroVoltageGap(f"edge ({x}, {y}) has an endpoint at voltage exactly t={t!r}")
    if not hit.any():
        return net
    c = net.conductances.copy()
    c[hit] = c[hit] * (vh[hit] - vl[hit]) / (t - vl[hit])
    return net.with_conductances(c)


def doob_transform(net: Network, v: VoltageField) -> Network:
    """Conductances ``c'(x, y) = c(x, y) v(x) v(y)``; edges where this vanishes are dropped.

    Wherever ``v`` is harmonic the walk on the result moves from ``x`` to ``y``
    with probability ``p(x, y) v(y) / v(x)``.  Only the component of the root survives; the root is kept when
    its voltage is positive, otherwise the smallest source vertex takes over.
    """
    vals = v.values
    u, w = net.edge_indices
    c = net.conductances * vals[u] * vals[w]
    keep = c > 0
    if not keep.any():
        raise AllEdgesVanished("every edge touches a zero-voltage vertex")
    root = net.root if vals[net.root_index] > 0 else min(v.source)
    eu, ev = net.edge_ids
    return _root_component(eu[keep], ev[keep], c[keep], root)


def _root_component(u, v, c, root) -> Network:
    ids = np.unique(np.concatenate([u, v]))
    a, b = np.searchsorted(ids, u), np.searchsorted(ids, v)
    g = csr_matrix((np.ones(a.size), (a, b)), shape=(ids.size, ids.size))
    _, comp = connected_components(g, directed=False)
    on = comp[a] == comp[int(np.searchsorted(ids, root))]
    return Network(u[on], v[on], c[on], root)


def delete_vertices(net: Network, S) -> Network:
    """Network induced on the complement of ``S``, restricted to the root's component."""
    S = frozenset(int(s) for s in S)
    if net.root in S:
        raise ValueError("cannot delete the root")
    if not S:
        return net
    keep = np.ones(net.num_vertices, dtype=bool)
    present = [s for s in S if s in net]
    keep[net.indices(present)] = False
    ri = net.root_index
    u, w = net.edge_indices
    if not np.any((keep[u] & keep[w]) & ((u == ri) | (w == ri))):
        raise RootIsolated(f"root {net.root} has no edges left")
    return net.induced(keep, root_component=True)


def bounded_factor_check(netA: Network, netB: Network, S=()) -> tuple[float, float]:
    """Min and max of ``c_B / c_A`` over edges with both endpoints outside ``S``."""
    S = frozenset(int(s) for s in S)

    def off(net):
        return {(x, y): c for x, y, c in net.edges() if x not in S and y not in S}

    a, b = off(netA), off(netB)
    if a.keys() != b.keys():
        diff = sorted(a.keys() ^ b.keys())[:3]
        raise EdgeSetMismatch(f"edge sets differ off S, e.g. {diff}")
    if not a:
        raise EdgeSetMismatch("no common edges off S")
    ratios = np.array([b[e] / a[e] for e in a])
    return float(ratios.min()), float(ratios.max())


def crossing_network(net: Network, o, z) -> tuple[Network, float, VoltageField]:
    """``net`` reweighted by the expected crossing counts of the walk from ``o`` absorbed at ``z``."""
    _, ev, alpha, v = expected_crossings_arrays(net, o, z)
    return net.with_conductances(ev), alpha, v
