"""Weighted finite graphs with the degree measure mu(x) = sum_y w_xy."""

import hashlib
import json
from collections import deque
from dataclasses import dataclass
from functools import cached_property
from pathlib import Path

import numpy as np

from .errors import (
    DisconnectedGraphError,
    DuplicateEdgeError,
    GraphError,
    IsolatedVertexError,
    NonPositiveWeightError,
    PreconditionError,
    SelfLoopError,
    UnknownVertexError,
)


class WeightedGraph:
    """Connected, undirected, positively weighted finite graph.

    Vertices keep the order in which they were given; every vertex function
    in this package is a float array aligned to that order.  Instances are
    immutable after construction.

    Parameters
    ----------
    vertices : sequence of str
        Distinct vertex labels, in canonical order.
    edges : sequence of (str, str, float)
        Undirected weighted edges.
    """

    def __init__(self, vertices, edges):
        vertices = tuple(str(v) for v in vertices)
        index = {}
        for v in vertices:
            if v in index:
                raise GraphError(f"duplicate vertex label {v!r}", element=v)
            index[v] = len(index)
        n = len(vertices)
        if n < 2:
            raise GraphError("a graph needs at least two vertices", element=None)

        seen = set()
        clean = []
        for edge in edges:
            if len(edge) != 3:
                raise GraphError(f"edge {edge!r} is not an (x, y, w) triple", element=edge)
            a, b, w = str(edge[0]), str(edge[1]), float(edge[2])
            for v in (a, b):
                if v not in index:
                    raise UnknownVertexError(f"edge ({a}, {b}) uses unknown vertex {v!r}", element=v)
            if a == b:
                raise SelfLoopError(f"self-loop at vertex {a!r}", element=(a, b))
            if not np.isfinite(w) or w <= 0.0:
                raise NonPositiveWeightError(
                    f"edge ({a}, {b}) has nonpositive or non-finite weight {w!r}", element=(a, b)
                )
            key = frozenset((a, b))
            if key in seen:
                raise DuplicateEdgeError(f"duplicate edge ({a}, {b})", element=(a, b))
            seen.add(key)
            clean.append((index[a], index[b], w))

        adj = [[] for _ in range(n)]
        for i, j, w in clean:
            adj[i].append((j, w))
            adj[j].append((i, w))
        for i, nb in enumerate(adj):
            if not nb:
                raise IsolatedVertexError(f"vertex {vertices[i]!r} has no edges", element=vertices[i])

        indptr = np.zeros(n + 1, dtype=np.int64)
        indptr[1:] = np.cumsum([len(nb) for nb in adj])
        indices = np.array([j for nb in adj for j, _ in nb], dtype=np.int64)
        weights = np.array([w for nb in adj for _, w in nb], dtype=np.float64)
        mu = np.array([sum(w for _, w in nb) for nb in adj], dtype=np.float64)

        self._vertices = vertices
        self._index = index
        self._edges = tuple((vertices[i], vertices[j], w) for i, j, w in clean)
        self._edge_index = tuple((i, j, w) for i, j, w in clean)
        self.indptr = indptr
        self.indices = indices
        self.weights = weights
        self.mu = mu
        for arr in (indptr, indices, weights, mu):
            arr.setflags(write=False)

        unreached = self._unreached_from(0)
        if unreached:
            raise DisconnectedGraphError(
                f"graph is disconnected: vertex {vertices[unreached[0]]!r} "
                f"is unreachable from {vertices[0]!r}",
                element=vertices[unreached[0]],
            )

    # -- structure -------------------------------------------------------

    @property
    def vertices(self):
        return self._vertices

    @property
    def edges(self):
        return self._edges

    @property
    def n(self):
        return len(self._vertices)

    def __len__(self):
        return self.n

    def __repr__(self):
        return f"WeightedGraph(n={self.n}, edges={len(self._edges)})"

    def index(self, label):
        try:
            return self._index[str(label)]
        except KeyError:
            raise UnknownVertexError(f"unknown vertex {label!r}", element=label) from None

    def neighbors(self, i):
        """CSR slice of neighbour indices and weights for vertex index ``i``."""
        lo, hi = self.indptr[i], self.indptr[i + 1]
        return self.indices[lo:hi], self.weights[lo:hi]

    def _unreached_from(self, start):
        dist = self.distances_from(start)
        return [i for i in range(self.n) if dist[i] < 0]

    def distances_from(self, start):
        """Hop distances from vertex index ``start`` (-1 where unreachable)."""
        dist = np.full(self.n, -1, dtype=np.int64)
        dist[start] = 0
        queue = deque([start])
        while queue:
            x = queue.popleft()
            for y in self.indices[self.indptr[x]:self.indptr[x + 1]]:
                if dist[y] < 0:
                    dist[y] = dist[x] + 1
                    queue.append(y)
        return dist

    def ball(self, i, radius=2):
        """Sorted vertex indices within ``radius`` hops of vertex ``i``."""
        dist = self.distances_from(i)
        return np.flatnonzero((dist >= 0) & (dist <= radius))

    @cached_property
    def weight_matrix(self):
        w = np.zeros((self.n, self.n))
        for i, j, wij in self._edge_index:
            w[i, j] = w[j, i] = wij
        w.setflags(write=False)
        return w

    @cached_property
    def stiffness(self):
        """Matrix L with diagonal mu(x) and off-diagonal -w_xy, so -Delta = M^{-1} L."""
        L = -np.array(self.weight_matrix)
        L[np.diag_indices(self.n)] = self.mu
        L.setflags(write=False)
        return L

    # -- scalar invariants -------------------------------------------------

    def sup_degree_ratio(self):
        """d = max over x and y ~ x of mu(x) / w_xy."""
        src = np.repeat(np.arange(self.n), np.diff(self.indptr))
        return float(np.max(self.mu[src] / self.weights))

    def total_volume(self):
        """|V| = sum_x mu(x)."""
        return float(np.sum(self.mu))

    # -- serialisation -----------------------------------------------------

    def to_dict(self):
        return {
            "vertices": list(self._vertices),
            "edges": [[a, b, w] for a, b, w in self._edges],
        }

    def to_json(self):
        return json.dumps(self.to_dict(), sort_keys=True)

    @cached_property
    def digest(self):
        return hashlib.sha256(self.to_json().encode()).hexdigest()

    @classmethod
    def from_dict(cls, data):
        if not isinstance(data, dict) or "edges" not in data:
            raise GraphError("graph JSON must be an object with an 'edges' list")
        edges = data["edges"]
        vertices = data.get("vertices")
        if vertices is None:
            vertices = _infer_vertices(edges)
        return cls(vertices, edges)


def _infer_vertices(edges):
    order = {}
    for e in edges:
        for v in e[:2]:
            order.setdefault(str(v), None)
    return list(order)


def parse_edge_list(text):
    """Parse ``x y w`` lines (``#`` comments allowed); vertices in first-seen order."""
    edges = []
    for lineno, line in enumerate(text.splitlines(), 1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        parts = line.split()
        if len(parts) != 3:
            raise GraphError(f"line {lineno}: expected 'x y w', got {line!r}", element=lineno)
        try:
            w = float(parts[2])
        except ValueError:
            raise GraphError(f"line {lineno}: weight {parts[2]!r} is not a number", element=lineno) from None
        edges.append((parts[0], parts[1], w))
    return WeightedGraph(_infer_vertices(edges), edges)


def load_graph(source):
    """Load a graph from a path, a JSON-like dict, or an existing graph.

    Paths ending in ``.json`` are read as ``{"vertices": [...], "edges":
    [[x, y, w], ...]}``; anything else is read as a whitespace edge list.
    """
    if isinstance(source, WeightedGraph):
        return source
    if isinstance(source, dict):
        return WeightedGraph.from_dict(source)
    path = Path(source)
    text = path.read_text()
    if path.suffix.lower() == ".json":
        try:
            data = json.loads(text)
        except json.JSONDecodeError as exc:
            raise GraphError(f"{path}: invalid JSON ({exc})") from None
        return WeightedGraph.from_dict(data)
    return parse_edge_list(text)


# -------------------------------------------------------------- functions


def as_vertex_function(g, u, name="u"):
    """Validate ``u`` as a finite float vector aligned to ``g``'s vertices."""
    arr = np.asarray(u, dtype=np.float64)
    if arr.ndim == 0:
        arr = np.full(g.n, float(arr))
    if arr.shape != (g.n,):
        raise PreconditionError(f"{name} has shape {arr.shape}, expected ({g.n},)")
    if not np.all(np.isfinite(arr)):
        bad = int(np.flatnonzero(~np.isfinite(arr))[0])
        raise PreconditionError(f"{name} is not finite at vertex {g.vertices[bad]!r}")
    return arr


def function_from_mapping(g, mapping, default=None):
    """Build a vertex function from ``{label: value}``; missing labels need ``default``."""
    out = np.empty(g.n)
    known = set(g.vertices)
    for label in mapping:
        if str(label) not in known:
            raise UnknownVertexError(f"function names unknown vertex {label!r}", element=label)
    for i, v in enumerate(g.vertices):
        if v in mapping:
            out[i] = float(mapping[v])
        elif default is not None:
            out[i] = float(default)
        else:
            raise PreconditionError(f"function has no value for vertex {v!r}")
    return as_vertex_function(g, out)


def function_to_mapping(g, u):
    return {v: float(x) for v, x in zip(g.vertices, u)}


def load_function(g, path):
    data = json.loads(Path(path).read_text())
    if not isinstance(data, dict):
        raise PreconditionError(f"{path}: vertex function JSON must map label -> value")
    return function_from_mapping(g, data)


@dataclass(frozen=True)
class VertexSubsetProblem:
    """Interior set for a Dirichlet problem; the boundary is derived.

    ``interior`` and ``boundary`` are sorted vertex index arrays.  Functions
    on this problem vanish on every vertex outside the interior.
    """

    graph: WeightedGraph
    interior: tuple
    boundary: tuple

    @classmethod
    def from_labels(cls, g, labels):
        labels = list(labels)
        if not labels:
            raise PreconditionError("Dirichlet interior must be nonempty")
        interior = sorted({g.index(v) for v in labels})
        inside = set(interior)
        boundary = sorted(
            {int(y) for x in interior for y in g.neighbors(x)[0] if int(y) not in inside}
        )
        return cls(g, tuple(interior), tuple(boundary))

    @property
    def mask(self):
        m = np.zeros(self.graph.n, dtype=bool)
        m[list(self.interior)] = True
        return m

    def interior_labels(self):
        return [self.graph.vertices[i] for i in self.interior]

    def boundary_labels(self):
        return [self.graph.vertices[i] for i in self.boundary]
