"""Finite weighted networks, lazily generated infinite families and ball exhaustions.

A :class:`Network` is an immutable, connected, undirected graph with strictly
positive conductances and a distinguished root.  Vertex ids are nonnegative
integers; internally every vertex also has a dense *index* (its position in the
sorted id array) and all heavy computations work in index space.
"""
from __future__ import annotations

import math
import re
from collections import defaultdict
from dataclasses import dataclass
from pathlib import Path
from typing import ClassVar, Hashable, Iterable, Iterator, Mapping, Sequence

import numpy as np
import scipy.sparse as sp
from scipy.sparse.csgraph import connected_components

from .errors import (
    DuplicateEdge,
    EmptyInterior,
    NetworkError,
    NetworkIOError,
    NonPositiveConductance,
    ParseError,
    RootDisconnected,
    SelfLoop,
    UnknownVertex,
)

FORMAT_HEADER = "# ohmtrace-network v1 root={root}"
_HEADER_RE = re.compile(r"^#\s*ohmtrace-network\s+v1\s+root=(\d+)\s*$")


def _readonly(a: np.ndarray) -> np.ndarray:
    a.setflags(write=False)
    return a


class Network:
    """Immutable finite network.

    Parameters
    ----------
    u, v : array_like of int
        Edge endpoints (vertex ids). Each unordered pair may appear once.
    c : array_like of float
        Edge conductances, strictly positive and finite.
    root : int
        Start vertex of the walk; must lie on some edge.
    labels : sequence, optional
        Family labels aligned with the sorted vertex ids (``None`` entries allowed).
    """

    __slots__ = (
        "_ids", "_pos", "_u", "_v", "_c", "_root", "_labels",
        "_indptr", "_adj", "_adj_c", "_adj_edge", "_pi", "_contiguous", "_cache",
    )

    def __init__(self, u, v, c, root: int, labels: Sequence | None = None):
        u = np.asarray(u, dtype=np.int64).ravel()
        v = np.asarray(v, dtype=np.int64).ravel()
        c = np.asarray(c, dtype=np.float64).ravel()
        if not (u.shape == v.shape == c.shape):
            raise NetworkError("edge arrays must have equal length")
        if u.size == 0:
            raise RootDisconnected("network has no edges")
        if min(u.min(), v.min()) < 0:
            raise NetworkError("vertex ids must be nonnegative")
        bad = ~(np.isfinite(c) & (c > 0))
        if bad.any():
            k = int(np.flatnonzero(bad)[0])
            raise NonPositiveConductance(f"edge ({u[k]}, {v[k]}) has conductance {c[k]!r}")
        loops = u == v
        if loops.any():
            k = int(np.flatnonzero(loops)[0])
            raise SelfLoop(f"self-loop at vertex {u[k]}")

        lo, hi = np.minimum(u, v), np.maximum(u, v)
        ids = np.unique(np.concatenate([lo, hi]))
        root = int(root)
        r = int(np.searchsorted(ids, root))
        if r >= ids.size or ids[r] != root:
            raise RootDisconnected(f"root {root} does not appear in any edge")
        ui = np.searchsorted(ids, lo)
        vi = np.searchsorted(ids, hi)
        order = np.lexsort((vi, ui))
        ui, vi, c = ui[order], vi[order], c[order]
        if ui.size > 1:
            dup = (ui[1:] == ui[:-1]) & (vi[1:] == vi[:-1])
            if dup.any():
                k = int(np.flatnonzero(dup)[0])
                raise DuplicateEdge(f"edge ({ids[ui[k]]}, {ids[vi[k]]}) appears more than once")

        n, m = ids.size, ui.size
        rows = np.concatenate([ui, vi])
        cols = np.concatenate([vi, ui])
        eidx = np.concatenate([np.arange(m), np.arange(m)])
        adj_order = np.lexsort((cols, rows))
        indptr = np.zeros(n + 1, dtype=np.int64)
        np.cumsum(np.bincount(rows, minlength=n), out=indptr[1:])

        graph = sp.csr_matrix((np.ones(2 * m), (rows, cols)), shape=(n, n))
        ncomp, comp = connected_components(graph, directed=False)
        if ncomp > 1:
            stray = int(np.flatnonzero(comp != comp[r])[0])
            raise RootDisconnected(
                f"vertex {ids[stray]} is not connected to root {root} ({ncomp} components)"
            )

        self._ids = _readonly(ids)
        self._contiguous = bool(ids[0] == 0 and ids[-1] == n - 1)
        self._pos = None
        self._u = _readonly(ui)
        self._v = _readonly(vi)
        self._c = _readonly(c)
        self._root = root
        self._indptr = _readonly(indptr)
        self._adj = _readonly(cols[adj_order])
        self._adj_c = _readonly(np.concatenate([c, c])[adj_order])
        self._adj_edge = _readonly(eidx[adj_order])
        self._pi = _readonly(np.bincount(ui, weights=c, minlength=n) + np.bincount(vi, weights=c, minlength=n))
        if labels is not None:
            labels = tuple(labels)
            if len(labels) != n:
                raise NetworkError("labels must align with the vertex set")
        self._labels = labels
        self._cache: dict = {}

    # -- basic accessors -------------------------------------------------

    @property
    def vertices(self) -> np.ndarray:
        """Sorted vertex ids (read-only array)."""
        return self._ids

    @property
    def root(self) -> int:
        return self._root

    @property
    def root_index(self) -> int:
        return self.index(self._root)

    @property
    def labels(self) -> tuple | None:
        return self._labels

    @property
    def num_vertices(self) -> int:
        return int(self._ids.size)

    @property
    def num_edges(self) -> int:
        return int(self._u.size)

    @property
    def edge_indices(self) -> tuple[np.ndarray, np.ndarray]:
        """Endpoint indices ``(u, v)`` of every edge, ``u < v``, in canonical order."""
        return self._u, self._v

    @property
    def edge_ids(self) -> tuple[np.ndarray, np.ndarray]:
        return self._ids[self._u], self._ids[self._v]

    @property
    def conductances(self) -> np.ndarray:
        return self._c

    @property
    def pi(self) -> np.ndarray:
        """Total conductance at each vertex, aligned with :attr:`vertices`."""
        return self._pi

    def __len__(self) -> int:
        return self.num_vertices

    def __contains__(self, x) -> bool:
        try:
            self.index(x)
        except UnknownVertex:
            return False
        return True

    def __eq__(self, other) -> bool:
        if not isinstance(other, Network):
            return NotImplemented
        return (
            self._root == other._root
            and np.array_equal(self._ids, other._ids)
            and np.array_equal(self._u, other._u)
            and np.array_equal(self._v, other._v)
            and np.array_equal(self._c, other._c)
        )

    __hash__ = None

    def __repr__(self) -> str:
        return f"Network(|V|={self.num_vertices}, |E|={self.num_edges}, root={self._root})"

    # -- lookups ---------------------------------------------------------

    def index(self, x) -> int:
        if self._contiguous:
            try:
                i = int(x)
            except (TypeError, ValueError):
                raise UnknownVertex(f"unknown vertex {x!r}") from None
            if 0 <= i < self._ids.size and i == x:
                return i
            raise UnknownVertex(f"unknown vertex {x!r}")
        if self._pos is None:
            self._pos = dict(zip(self._ids.tolist(), range(self._ids.size)))
        try:
            return self._pos[x]
        except (KeyError, TypeError):
            raise UnknownVertex(f"unknown vertex {x!r}") from None

    def indices(self, xs: Iterable) -> np.ndarray:
        xs = np.fromiter((int(x) for x in xs), dtype=np.int64)
        pos = np.searchsorted(self._ids, xs)
        pos = np.minimum(pos, self._ids.size - 1)
        missing = self._ids[pos] != xs
        if missing.any():
            raise UnknownVertex(f"unknown vertex {int(xs[np.flatnonzero(missing)[0]])}")
        return pos

    def label(self, x):
        """Family label of vertex ``x`` (the id itself when no labels are attached)."""
        i = self.index(x)
        return x if self._labels is None else self._labels[i]

    def neighbor_slice(self, i: int) -> tuple[np.ndarray, np.ndarray]:
        """Neighbor indices and conductances of the vertex with index ``i``, ascending."""
        a, b = self._indptr[i], self._indptr[i + 1]
        return self._adj[a:b], self._adj_c[a:b]

    def neighbors(self, x) -> list[tuple[int, float]]:
        nb, cc = self.neighbor_slice(self.index(x))
        return list(zip(self._ids[nb].tolist(), cc.tolist()))

    def degree(self, x) -> int:
        i = self.index(x)
        return int(self._indptr[i + 1] - self._indptr[i])

    def pi_of(self, x) -> float:
        return float(self._pi[self.index(x)])

    def edge_position(self, x, y) -> int:
        """Position of edge ``{x, y}`` in canonical order, or -1 if absent."""
        i, j = self.index(x), self.index(y)
        a, b = self._indptr[i], self._indptr[i + 1]
        k = a + int(np.searchsorted(self._adj[a:b], j))
        if k < b and self._adj[k] == j:
            return int(self._adj_edge[k])
        return -1

    def conductance(self, x, y) -> float:
        """``c(x, y)``; zero when the pair is not an edge."""
        k = self.edge_position(x, y)
        return 0.0 if k < 0 else float(self._c[k])

    def transition_probabilities(self, x) -> dict[int, float]:
        i = self.index(x)
        nb, cc = self.neighbor_slice(i)
        return {int(self._ids[j]): float(w / self._pi[i]) for j, w in zip(nb, cc)}

    def edges(self) -> Iterator[tuple[int, int, float]]:
        """Yield ``(x, y, c)`` with ``x < y`` in ascending order."""
        ids = self._ids
        yield from zip(ids[self._u].tolist(), ids[self._v].tolist(), self._c.tolist())

    def conductance_map(self) -> dict[tuple[int, int], float]:
        return {(x, y): c for x, y, c in self.edges()}

    # -- linear algebra --------------------------------------------------

    def laplacian(self, c: np.ndarray | None = None) -> sp.csr_matrix:
        """Weighted graph Laplacian in index space (optionally with replacement weights)."""
        w = self._c if c is None else c
        n = self.num_vertices
        rows = np.concatenate([self._u, self._v])
        cols = np.concatenate([self._v, self._u])
        off = sp.csr_matrix((-np.concatenate([w, w]), (rows, cols)), shape=(n, n))
        deg = np.bincount(self._u, weights=w, minlength=n) + np.bincount(self._v, weights=w, minlength=n)
        return (off + sp.diags(deg)).tocsr()

    # -- derived networks ------------------------------------------------

    def with_conductances(self, c) -> "Network":
        c = np.asarray(c, dtype=np.float64)
        if c.shape != self._c.shape:
            raise NetworkError("conductance array must align with the edge list")
        return Network(self._ids[self._u], self._ids[self._v], c, self._root, self._labels)

    def induced(self, keep: np.ndarray, root: int | None = None, root_component: bool = False) -> "Network":
        """Subnetwork induced by the vertices whose index mask ``keep`` is true.

        With ``root_component`` the result is cut down to the component of ``root``.
        """
        keep = np.asarray(keep, dtype=bool)
        root = self._root if root is None else root
        sel = keep[self._u] & keep[self._v]
        u, v, c = self._u[sel], self._v[sel], self._c[sel]
        if root_component and u.size:
            n = self.num_vertices
            g = sp.csr_matrix((np.ones(u.size), (u, v)), shape=(n, n))
            _, comp = connected_components(g, directed=False)
            on = comp[u] == comp[self.index(root)]
            u, v, c = u[on], v[on], c[on]
        labels = None
        if self._labels is not None and u.size:
            used = np.unique(np.concatenate([u, v]))
            labels = [self._labels[i] for i in used]
        return Network(self._ids[u], self._ids[v], c, root, labels)


def build_finite(edge_list: Iterable[tuple[int, int, float]], root: int) -> Network:
    """Build a network from ``(x, y, c)`` triples."""
    edges = list(edge_list)
    if not edges:
        raise RootDisconnected("empty edge list")
    u, v, c = zip(*edges)
    return Network(u, v, c, root)


def random_network(n: int, rng: np.random.Generator, density: float = 0.3,
                   c_range: tuple[float, float] = (0.1, 10.0)) -> Network:
    """Random connected network on vertices ``0..n-1`` rooted at 0.

    A random recursive tree guarantees connectivity; each remaining pair is then
    added independently with probability ``density``.
    """
    if n < 2:
        raise NetworkError("need at least two vertices")
    lo, hi = c_range
    edges = {}
    for k in range(1, n):
        edges[(int(rng.integers(k)), k)] = None
    for x in range(n):
        for y in range(x + 1, n):
            if (x, y) not in edges and rng.random() < density:
                edges[(x, y)] = None
    pairs = sorted(edges)
    c = rng.uniform(lo, hi, size=len(pairs))
    return Network([p[0] for p in pairs], [p[1] for p in pairs], c, 0)


# -- serialization ---------------------------------------------------------


def format_network(net: Network) -> str:
    lines = [FORMAT_HEADER.format(root=net.root)]
    lines += [f"{x} {y} {c!r}" for x, y, c in net.edges()]
    return "\n".join(lines) + "\n"


def parse_network(text: str) -> Network:
    root = None
    u, v, c = [], [], []
    seen: dict[tuple[int, int], int] = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line:
            continue
        if line.startswith("#"):
            m = _HEADER_RE.match(line)
            if m and root is None:
                root = int(m.group(1))
            elif root is None:
                raise ParseError("expected header '# ohmtrace-network v1 root=<id>'", lineno)
            continue
        if root is None:
            raise ParseError("missing header line", lineno)
        parts = line.split()
        if len(parts) != 3:
            raise ParseError(f"expected 'x y c', got {line!r}", lineno)
        try:
            x, y, w = int(parts[0]), int(parts[1]), float(parts[2])
        except ValueError:
            raise ParseError(f"malformed edge {line!r}", lineno) from None
        if x < 0 or y < 0:
            raise ParseError("vertex ids must be nonnegative", lineno)
        if x == y:
            raise ParseError(f"self-loop at vertex {x}", lineno)
        if not (math.isfinite(w) and w > 0):
            raise ParseError(f"conductance must be positive and finite, got {parts[2]}", lineno)
        key = (min(x, y), max(x, y))
        if key in seen:
            raise ParseError(f"duplicate edge {key} (first on line {seen[key]})", lineno)
        seen[key] = lineno
        u.append(x)
        v.append(y)
        c.append(w)
    if root is None:
        raise ParseError("missing header line", 1)
    try:
        return Network(u, v, c, root)
    except NetworkError as exc:
        raise ParseError(str(exc)) from exc


def save_network(net: Network, path) -> None:
    try:
        Path(path).write_text(format_network(net))
    except OSError as exc:
        raise NetworkIOError(str(exc)) from exc


def load_network(path) -> Network:
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise NetworkIOError(str(exc)) from exc
    return parse_network(text)


# -- infinite families -----------------------------------------------------


class NetworkFamily:
    """Intensional infinite network given by a symmetric, locally finite neighbor rule."""

    name: ClassVar[str] = "family"
    unit_conductance: ClassVar[bool] = True

    @property
    def root(self) -> Hashable:
        raise NotImplementedError

    def neighbors(self, x) -> list[tuple[Hashable, float]]:
        raise NotImplementedError

    def distance(self, x) -> int:
        """Graph distance from the root."""
        raise NotImplementedError

    def contains(self, x) -> bool:
        raise NotImplementedError

    def describe(self) -> str:
        raise NotImplementedError

    def ball(self, radius: int):
        return _bfs_ball(self, radius)


@dataclass(frozen=True)
class Lattice(NetworkFamily):
    """The integer lattice Z^d with unit conductances."""

    dim: int = 1
    name: ClassVar[str] = "lattice"

    def __post_init__(self):
        if self.dim < 1:
            raise NetworkError("lattice dimension must be >= 1")

    @property
    def root(self):
        return (0,) * self.dim

    def neighbors(self, x):
        out = []
        for d in range(self.dim):
            for s in (-1, 1):
                y = list(x)
                y[d] += s
                out.append((tuple(y), 1.0))
        return out

    def distance(self, x):
        return sum(abs(a) for a in x)

    def contains(self, x):
        return isinstance(x, tuple) and len(x) == self.dim

    def describe(self):
        return f"lattice({self.dim})"


@dataclass(frozen=True)
class BaryTree(NetworkFamily):
    """Rooted tree where every vertex has ``b`` children, unit conductances.

    Vertices are heap indices: the children of ``x`` are ``b*x + 1 .. b*x + b``.
    """

    b: int = 2
    name: ClassVar[str] = "b-ary-tree"

    def __post_init__(self):
        if self.b < 2:
            raise NetworkError("branching number must be >= 2")

    @property
    def root(self):
        return 0

    def neighbors(self, x):
        out = [((x - 1) // self.b, 1.0)] if x > 0 else []
        out += [(self.b * x + k, 1.0) for k in range(1, self.b + 1)]
        return out

    def distance(self, x):
        d = 0
        while x > 0:
            x = (x - 1) // self.b
            d += 1
        return d

    def contains(self, x):
        return isinstance(x, (int, np.integer)) and x >= 0

    def describe(self):
        return f"b-ary-tree({self.b})"

    def ball(self, radius: int):
        # heap order coincides with the generic BFS order
        if radius < 1:
            raise EmptyInterior("radius must be >= 1")
        b = self.b
        m = (b ** (radius + 1) - 1) // (b - 1)
        child = np.arange(1, m, dtype=np.int64)
        first_leaf = m - b ** radius
        boundary = np.arange(first_leaf, m, dtype=np.int64)
        return _Ball(
            labels=None,
            size=m,
            u=(child - 1) // b,
            v=child,
            c=np.ones(m - 1),
            boundary_index=boundary,
            boundary_c=np.full(boundary.size, float(b)),
        )


@dataclass(frozen=True)
class Wedge(NetworkFamily):
    """Wedge ``{(x, y, z) in Z^3 : x >= 0, |z| <= f(x)}`` with ``f(x) = ceil(x ** exponent)``.

    The default cube-root profile gives a transient wedge (sum of 1/(n f(n)) converges).
    """

    exponent: float = 1.0 / 3.0
    name: ClassVar[str] = "wedge"

    def profile(self, x: int) -> int:
        if x <= 0:
            return 0
        return math.ceil(x ** self.exponent - 1e-9)

    @property
    def root(self):
        return (0, 0, 0)

    def contains(self, p):
        return isinstance(p, tuple) and len(p) == 3 and p[0] >= 0 and abs(p[2]) <= self.profile(p[0])

    def neighbors(self, p):
        x, y, z = p
        cand = ((x - 1, y, z), (x + 1, y, z), (x, y - 1, z), (x, y + 1, z), (x, y, z - 1), (x, y, z + 1))
        return [(q, 1.0) for q in cand if self.contains(q)]

    def distance(self, p):
        # f is nondecreasing, so the monotone path x-then-y-then-z stays inside
        return abs(p[0]) + abs(p[1]) + abs(p[2])

    def describe(self):
        return f"wedge(exponent={self.exponent!r})"


@dataclass(frozen=True)
class BirthDeath(NetworkFamily):
    """Birth-and-death chain on {0, 1, 2, ...} with ``c(k, k+1) = c_k``.

    ``rule`` is ``geometric`` (``ratio**k``), ``power`` (``(k+1)**exponent``) or ``constant``.
    """

    rule: str = "geometric"
    ratio: float = 2.0
    exponent: float = 2.0
    name: ClassVar[str] = "birth-death"

    def __post_init__(self):
        if self.rule not in ("geometric", "power", "constant"):
            raise NetworkError(f"unknown birth-death rule {self.rule!r}")
        if self.rule == "geometric" and self.ratio <= 0:
            raise NetworkError("ratio must be positive")

    @property
    def unit_conductance(self):
        return self.rule == "constant"

    def c(self, k: int) -> float:
        if self.rule == "geometric":
            return float(self.ratio) ** k
        if self.rule == "power":
            return float(k + 1) ** self.exponent
        return 1.0

    @property
    def root(self):
        return 0

    def neighbors(self, k):
        out = [(k - 1, self.c(k - 1))] if k > 0 else []
        out.append((k + 1, self.c(k)))
        return out

    def distance(self, k):
        return k

    def contains(self, k):
        return isinstance(k, (int, np.integer)) and k >= 0

    def describe(self):
        if self.rule == "geometric":
            return f"birth-death(geometric, ratio={self.ratio!r})"
        if self.rule == "power":
            return f"birth-death(power, exponent={self.exponent!r})"
        return "birth-death(constant)"


_FAMILY_ALIASES = {
    "lattice": "lattice", "z": "lattice",
    "tree": "b-ary-tree", "b-ary-tree": "b-ary-tree", "bary-tree": "b-ary-tree",
    "wedge": "wedge",
    "birth-death": "birth-death", "bd": "birth-death",
}
_FAMILY_RE = re.compile(r"^\s*([\w-]+)\s*(?:\(\s*([^)]*)\s*\))?\s*$")


def make_family(spec: str, params: Mapping[str, object] | None = None) -> NetworkFamily:
    """Instantiate a family from a name such as ``lattice(3)`` plus keyword parameters."""
    m = _FAMILY_RE.match(spec)
    if not m:
        raise NetworkError(f"cannot parse family {spec!r}")
    name = _FAMILY_ALIASES.get(m.group(1).lower())
    if name is None:
        raise NetworkError(f"unknown family {m.group(1)!r}")
    p = dict(params or {})
    inline = m.group(2)
    if name == "lattice":
        d = int(inline) if inline else int(p.pop("d", p.pop("dim", 1)))
        return Lattice(d)
    if name == "b-ary-tree":
        b = int(inline) if inline else int(p.pop("b", 2))
        return BaryTree(b)
    if name == "wedge":
        e = float(inline) if inline else float(p.pop("exponent", 1.0 / 3.0))
        return Wedge(e)
    rule = inline or str(p.pop("rule", "geometric"))
    return BirthDeath(rule, float(p.pop("ratio", 2.0)), float(p.pop("exponent", 2.0)))


# -- exhaustions -----------------------------------------------------------


@dataclass(frozen=True)
class _Ball:
    labels: list | None
    size: int
    u: np.ndarray
    v: np.ndarray
    c: np.ndarray
    boundary_index: np.ndarray
    boundary_c: np.ndarray


def _bfs_ball(family: NetworkFamily, radius: int) -> _Ball:
    if radius < 1:
        raise EmptyInterior("radius must be >= 1")
    root = family.root
    labels = [root]
    index = {root: 0}
    dist = [0]
    us, vs, cs = [], [], []
    boundary: dict[int, float] = defaultdict(float)
    i = 0
    while i < len(labels):
        x, dx = labels[i], dist[i]
        for y, w in family.neighbors(x):
            j = index.get(y)
            if j is None:
                if dx >= radius:
                    boundary[i] += w
                    continue
                j = len(labels)
                index[y] = j
                labels.append(y)
                dist.append(dx + 1)
            if j > i:
                us.append(i)
                vs.append(j)
                cs.append(w)
        i += 1
    keys = sorted(boundary)
    return _Ball(
        labels=labels,
        size=len(labels),
        u=np.asarray(us, dtype=np.int64),
        v=np.asarray(vs, dtype=np.int64),
        c=np.asarray(cs, dtype=np.float64),
        boundary_index=np.asarray(keys, dtype=np.int64),
        boundary_c=np.asarray([boundary[k] for k in keys], dtype=np.float64),
    )


@dataclass(frozen=True)
class Exhaustion:
    """Graph-distance ball of ``radius`` around the family root."""

    family: NetworkFamily
    radius: int


def ball_network(family: NetworkFamily, radius: int) -> Network:
    """Induced (uncollapsed) ball of ``radius``; ids are BFS positions, root 0."""
    b = family.ball(radius)
    return Network(b.u, b.v, b.c, 0, b.labels)


def collapse_boundary(ex: Exhaustion) -> tuple[Network, int]:
    """Ball of ``ex.radius`` with every outside vertex identified to one sink ``z``.

    Interior vertices get ids ``0..m-1`` in BFS order (root is 0) and ``z = m``.
    Edges from an interior vertex to several outside vertices merge into one
    edge to ``z`` carrying the summed conductance.
    """
    b = ex.family.ball(ex.radius)
    if b.u.size == 0 and b.boundary_index.size == 0:
        raise EmptyInterior(f"radius {ex.radius} yields no edges")
    if b.boundary_index.size == 0:
        raise EmptyInterior("ball has no outside boundary to collapse")
    z = b.size
    u = np.concatenate([b.u, b.boundary_index])
    v = np.concatenate([b.v, np.full(b.boundary_index.size, z, dtype=np.int64)])
    c = np.concatenate([b.c, b.boundary_c])
    labels = None if b.labels is None else list(b.labels) + [None]
    return Network(u, v, c, 0, labels), z


def check_family_symmetry(family: NetworkFamily, vertices: Iterable) -> list[tuple]:
    """Return ``(x, y, w)`` triples that violate the neighbor-rule symmetry."""
    bad = []
    for x in vertices:
        for y, w in family.neighbors(x):
            back = dict(family.neighbors(y))
            if back.get(x) != w:
                bad.append((x, y, w))
    return bad
