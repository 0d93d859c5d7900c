"""Brute-force dense oracles.  These work from plain edge lists and never call
into ohmtrace, so agreement with the library is an independent check."""
from __future__ import annotations

import itertools

import numpy as np


def vertex_list(edges):
    return sorted({x for e in edges for x in e[:2]})


def dense_laplacian(edges):
    vs = vertex_list(edges)
    ix = {x: i for i, x in enumerate(vs)}
    L = np.zeros((len(vs), len(vs)))
    for x, y, c in edges:
        i, j = ix[x], ix[y]
        L[i, j] -= c
        L[j, i] -= c
        L[i, i] += c
        L[j, j] += c
    return vs, ix, L


def transition_matrix(edges):
    vs, ix, L = dense_laplacian(edges)
    W = -L.copy()
    np.fill_diagonal(W, 0.0)
    return vs, ix, W / W.sum(axis=1, keepdims=True)


def green_matrix(edges, z):
    """Expected visits before hitting ``z``: ``(I - Q)^-1`` for the chain killed at ``z``."""
    vs, ix, P = transition_matrix(edges)
    keep = [i for i in range(len(vs)) if vs[i] != z]
    Q = P[np.ix_(keep, keep)]
    Ginv = np.linalg.inv(np.eye(len(keep)) - Q)
    G = np.zeros((len(vs), len(vs)))
    G[np.ix_(keep, keep)] = Ginv
    return vs, ix, G, P


def green_row(edges, o, z):
    vs, ix, G, _ = green_matrix(edges, z)
    return {x: float(G[ix[o], ix[x]]) for x in vs}


def expected_crossings(edges, o, z):
    """``E[N(x,y)]`` from directed visit rates, both directions summed."""
    vs, ix, G, P = green_matrix(edges, z)
    i = ix[o]
    out = {}
    for x, y, _ in edges:
        a, b = ix[x], ix[y]
        key = (min(x, y), max(x, y))
        out[key] = float(G[i, a] * P[a, b] + G[i, b] * P[b, a])
    return out


def expected_absorption_time(edges, o, z):
    vs, ix, G, _ = green_matrix(edges, z)
    return float(G[ix[o]].sum())


def dirichlet_voltage(edges, A, z):
    """Dense solve of the Dirichlet problem, 1 on ``A`` and 0 at ``z``."""
    vs, ix, L = dense_laplacian(edges)
    fixed = [ix[a] for a in A] + [ix[z]]
    vals = np.array([1.0] * len(A) + [0.0])
    free = [i for i in range(len(vs)) if i not in fixed]
    v = np.zeros(len(vs))
    v[fixed] = vals
    if free:
        v[free] = np.linalg.solve(L[np.ix_(free, free)], -L[np.ix_(free, fixed)] @ vals)
    return {x: float(v[ix[x]]) for x in vs}


def effective_conductance(edges, A, z):
    """Merge ``A`` into one vertex, then ``1 / R`` with ``R`` from the Laplacian pseudoinverse."""
    A = set(A)
    merged = {}
    for x, y, c in edges:
        x2 = "A" if x in A else x
        y2 = "A" if y in A else y
        if x2 == y2:
            continue
        key = tuple(sorted((x2, y2), key=str))
        merged[key] = merged.get(key, 0.0) + c
    medges = [(x, y, c) for (x, y), c in merged.items()]
    vs = sorted({x for e in medges for x in e[:2]}, key=str)
    ix = {x: i for i, x in enumerate(vs)}
    L = np.zeros((len(vs), len(vs)))
    for x, y, c in medges:
        i, j = ix[x], ix[y]
        L[i, j] -= c
        L[j, i] -= c
        L[i, i] += c
        L[j, j] += c
    e = np.zeros(len(vs))
    e[ix["A"]] = 1.0
    e[ix[z]] = -1.0
    return 1.0 / float(e @ np.linalg.pinv(L) @ e)


def effective_resistance(edges, a, z):
    return 1.0 / effective_conductance(edges, [a], z)


def all_pairs_resistance(edges):
    vs, ix, L = dense_laplacian(edges)
    Lp = np.linalg.pinv(L)
    d = np.diag(Lp)
    return vs, ix, d[:, None] + d[None, :] - 2 * Lp


def energy(edges, F):
    return float(sum(c * (F[x] - F[y]) ** 2 for x, y, c in edges))


def flow_energy(edges, flow):
    return float(sum(flow.get((x, y), 0.0) ** 2 / c for x, y, c in edges))


def series_resistance(rs):
    return float(sum(rs))


def binary_tree_collapse_conductance(radius):
    """Root to the merged sphere at distance ``radius + 1`` in the binary tree: levels in parallel, in series."""
    return 1.0 / sum(1.0 / 2**k for k in range(1, radius + 2))


def path_trace_resistance(walk):
    """Max over visited x of R(walk[0], x) on the unit-conductance trace, brute force."""
    edges = {(min(a, b), max(a, b)) for a, b in itertools.pairwise(walk)}
    el = [(a, b, 1.0) for a, b in edges]
    vs, ix, R = all_pairs_resistance(el)
    return float(R[ix[walk[0]]].max())
