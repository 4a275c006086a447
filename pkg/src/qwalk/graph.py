"""Weighted graphs, their file formats, and the Hermitian generators built from them.

Every matrix a walk consumes (adjacency, Laplacian, maximal-entropy
adjacency, Hermitian adjacency, symmetrized average) is produced here from a
single :class:`Graph`.  All storage is dense.
"""

from __future__ import annotations

import csv
import io
import json
import math
from collections import deque
from dataclasses import dataclass, field
from enum import Enum

import numpy as np

from .errors import InputError, NumericalError

HERMITIAN_TOL = 1e-12
ALPHA_TOL = 1e-12


def binary_labels(n: int, width: int | None = None) -> tuple[str, ...]:
    """Zero-padded binary labels ``0..n-1``; ``0000..1111`` for 16 nodes."""
    if width is None:
        width = max(1, (n - 1).bit_length())
    return tuple(format(i, f"0{width}b") for i in range(n))


@dataclass(frozen=True, eq=False)
class Graph:
    """A weighted graph on nodes ``0..n-1``.

    ``weights[i, j]`` is the weight of the edge ``i -> j`` and 0 means no edge.
    An undirected graph has an exactly symmetric weight matrix.
    """

    weights: np.ndarray
    directed: bool = False
    labels: tuple[str, ...] = field(default=())

    def __post_init__(self):
        w = np.array(self.weights, dtype=float)
        if w.ndim != 2 or w.shape[0] != w.shape[1]:
            raise InputError("weight matrix must be square")
        if w.shape[0] < 1:
            raise InputError("graph needs at least one node")
        if not np.all(np.isfinite(w)):
            raise InputError("weights must be finite")
        if np.any(w < 0):
            raise InputError("weights must be nonnegative")
        if np.any(np.diag(w) != 0):
            raise InputError("self-loops are not allowed")
        if not self.directed and not np.array_equal(w, w.T):
            raise InputError("undirected graph needs a symmetric weight matrix")
        w.setflags(write=False)
        object.__setattr__(self, "weights", w)
        labels = tuple(self.labels) if self.labels else binary_labels(w.shape[0])
        if len(labels) != w.shape[0]:
            raise InputError(f"expected {w.shape[0]} labels, got {len(labels)}")
        object.__setattr__(self, "labels", labels)

    @property
    def n(self) -> int:
        return self.weights.shape[0]

    node_count = n

    @property
    def symmetric(self) -> bool:
        return bool(np.array_equal(self.weights, self.weights.T))

    def out_degrees(self) -> np.ndarray:
        return self.weights.sum(axis=1)

    def neighbors(self, i: int) -> list[int]:
        return [int(j) for j in np.flatnonzero(self.weights[i] > 0)]

    def is_connected(self) -> bool:
        """Connectivity of the underlying undirected support."""
        support = (self.weights > 0) | (self.weights.T > 0)
        seen = np.zeros(self.n, dtype=bool)
        seen[0] = True
        queue = deque([0])
        while queue:
            i = queue.popleft()
            for j in np.flatnonzero(support[i] & ~seen):
                seen[j] = True
                queue.append(int(j))
        return bool(seen.all())

    def is_strongly_connected(self) -> bool:
        def reach(adj):
            seen = np.zeros(self.n, dtype=bool)
            seen[0] = True
            queue = deque([0])
            while queue:
                i = queue.popleft()
                for j in np.flatnonzero(adj[i] & ~seen):
                    seen[j] = True
                    queue.append(int(j))
            return seen.all()

        support = self.weights > 0
        return bool(reach(support) and reach(support.T))

    def padded_pow2(self) -> Graph:
        """Append isolated nodes until the node count is a power of two."""
        size = 1 << max(0, (self.n - 1).bit_length())
        if size == self.n:
            return self
        w = np.zeros((size, size))
        w[: self.n, : self.n] = self.weights
        extra = binary_labels(size)[self.n :]
        return Graph(w, directed=self.directed, labels=self.labels + extra)

    def __eq__(self, other):
        if not isinstance(other, Graph):
            return NotImplemented
        return (
            self.directed == other.directed
            and self.labels == other.labels
            and np.array_equal(self.weights, other.weights)
        )

    def __hash__(self):
        return hash((self.directed, self.labels, self.weights.tobytes()))


# --------------------------------------------------------------------- I/O


def _parse_index(token: str, lineno: int) -> int:
    try:
        value = int(token)
    except ValueError:
        raise InputError(f"line {lineno}: node index {token!r} is not an integer") from None
    if value < 0:
        raise InputError(f"line {lineno}: negative node index {value}")
    return value


def _parse_weight(token, where: str) -> float:
    try:
        value = float(token)
    except (TypeError, ValueError):
        raise InputError(f"{where}: weight {token!r} is not a number") from None
    if not math.isfinite(value):
        raise InputError(f"{where}: weight must be finite")
    if value < 0:
        raise InputError(f"{where}: negative weight {value}")
    return value


def _looks_numeric(token: str) -> bool:
    try:
        float(token)
    except ValueError:
        return False
    return True


def _assemble(edges, n, directed, labels=None) -> Graph:
    if n is None:
        n = 1 + max((max(i, j) for i, j, _, _ in edges), default=0)
    w = np.zeros((n, n))
    placed: dict[tuple[int, int], float] = {}
    for i, j, weight, where in edges:
        if i >= n or j >= n:
            raise InputError(f"{where}: node index out of range for n={n}")
        if i == j:
            raise InputError(f"{where}: self-loop on node {i}")
        arcs = [(i, j)] if directed else [(i, j), (j, i)]
        for arc in arcs:
            if arc in placed and placed[arc] != weight:
                raise InputError(
                    f"{where}: duplicate edge {arc} with conflicting weight "
                    f"{weight} (already {placed[arc]})"
                )
            placed[arc] = weight
            w[arc] = weight
    return Graph(w, directed=directed, labels=tuple(labels) if labels else ())


def load_graph(
    text: str, format: str = "graph-json", *, directed: bool = False, n: int | None = None
) -> Graph:
    """Parse a graph from ``edge-list-csv`` or ``graph-json`` text.

    For ``edge-list-csv`` the directedness (and optionally the node count,
    to allow trailing isolated nodes) comes from the caller; ``graph-json``
    carries both itself.
    """
    if format == "edge-list-csv":
        edges = []
        rows = csv.reader(io.StringIO(text))
        first = True
        for lineno, row in enumerate(rows, start=1):
            row = [tok.strip() for tok in row]
            if not row or all(not tok for tok in row):
                continue
            if first and not _looks_numeric(row[0]):
                first = False
                continue  # header
            first = False
            if len(row) != 3:
                raise InputError(f"line {lineno}: expected 'src,dst,weight', got {row}")
            i, j = _parse_index(row[0], lineno), _parse_index(row[1], lineno)
            edges.append((i, j, _parse_weight(row[2], f"line {lineno}"), f"line {lineno}"))
        return _assemble(edges, n, directed)

    if format == "graph-json":
        try:
            obj = json.loads(text)
        except json.JSONDecodeError as exc:
            raise InputError(f"invalid graph-json: {exc}") from None
        if not isinstance(obj, dict):
            raise InputError("graph-json must be an object")
        try:
            is_directed = obj["directed"]
            count = obj["n"]
            raw_edges = obj["edges"]
        except KeyError as exc:
            raise InputError(f"graph-json is missing field {exc}") from None
        if not isinstance(is_directed, bool):
            raise InputError("'directed' must be a boolean")
        if not isinstance(count, int) or isinstance(count, bool) or count < 1:
            raise InputError("'n' must be a positive integer")
        edges = []
        for k, item in enumerate(raw_edges):
            if not isinstance(item, list) or len(item) != 3:
                raise InputError(f"edge {k}: expected [src, dst, weight]")
            i, j, weight = item
            if not all(isinstance(v, int) and not isinstance(v, bool) for v in (i, j)):
                raise InputError(f"edge {k}: node indices must be integers")
            if i < 0 or j < 0:
                raise InputError(f"edge {k}: negative node index")
            if isinstance(weight, bool):
                raise InputError(f"edge {k}: weight must be a number")
            edges.append((i, j, _parse_weight(weight, f"edge {k}"), f"edge {k}"))
        labels = obj.get("labels")
        if labels is not None and not all(isinstance(s, str) for s in labels):
            raise InputError("'labels' must be strings")
        return _assemble(edges, count, is_directed, labels)

    raise InputError(f"unknown graph format {format!r}")


def read_graph(path, *, directed: bool = False) -> Graph:
    """Load a graph file, picking the format from the extension."""
    path = str(path)
    with open(path, encoding="utf-8") as fh:
        text = fh.read()
    fmt = "edge-list-csv" if path.endswith((".csv", ".txt")) else "graph-json"
    return load_graph(text, fmt, directed=directed)


def dump_graph(g: Graph) -> str:
    """Serialize to graph-json.  ``load_graph(dump_graph(g)) == g`` exactly."""
    edges = []
    for i, j in zip(*np.nonzero(g.weights)):
        if g.directed or i < j:
            edges.append([int(i), int(j), float(g.weights[i, j])])
    obj = {"directed": g.directed, "n": g.n, "edges": edges, "labels": list(g.labels)}
    return json.dumps(obj) + "\n"


# -------------------------------------------------------------- generators


class Kind(str, Enum):
    ADJACENCY = "adjacency"
    LAPLACIAN = "laplacian"
    MEA = "mea"
    HERMITIAN_ADJACENCY = "hermitian-adjacency"
    SYMMETRIZED = "symmetrized-average"


def validate_alpha(alpha: complex) -> complex:
    alpha = complex(alpha)
    if abs(abs(alpha) - 1.0) > ALPHA_TOL:
        raise InputError(f"alpha must lie on the unit circle, |alpha| = {abs(alpha)!r}")
    if alpha.real < 0:
        raise InputError(f"alpha must have nonnegative real part, got {alpha!r}")
    return alpha


@dataclass(frozen=True)
class GeneratorKind:
    kind: Kind
    alpha: complex | None = None

    def __post_init__(self):
        object.__setattr__(self, "kind", Kind(self.kind))
        if self.kind is Kind.HERMITIAN_ADJACENCY:
            if self.alpha is None:
                raise InputError("hermitian-adjacency needs alpha")
            object.__setattr__(self, "alpha", validate_alpha(self.alpha))
        elif self.alpha is not None:
            raise InputError(f"{self.kind.value} takes no alpha")

    @classmethod
    def hermitian(cls, alpha: complex) -> GeneratorKind:
        return cls(Kind.HERMITIAN_ADJACENCY, alpha)

    @property
    def label(self) -> str:
        if self.alpha is None:
            return self.kind.value
        return f"{self.kind.value}(alpha={self.alpha.real!r}{self.alpha.imag:+}j)"


ADJACENCY = GeneratorKind(Kind.ADJACENCY)
LAPLACIAN = GeneratorKind(Kind.LAPLACIAN)
MEA = GeneratorKind(Kind.MEA)
SYMMETRIZED = GeneratorKind(Kind.SYMMETRIZED)


@dataclass(frozen=True, eq=False)
class GeneratorMatrix:
    """A Hermitian matrix tagged with how it was built from a graph."""

    kind: GeneratorKind
    entries: np.ndarray

    def __post_init__(self):
        m = np.array(self.entries, dtype=complex)
        if m.ndim != 2 or m.shape[0] != m.shape[1]:
            raise InputError("generator must be a square matrix")
        dev = np.max(np.abs(m - m.conj().T)) if m.size else 0.0
        if dev > HERMITIAN_TOL:
            raise InputError(f"generator is not Hermitian (max deviation {dev:.3g})")
        m.setflags(write=False)
        object.__setattr__(self, "entries", m)

    @property
    def n(self) -> int:
        return self.entries.shape[0]


def _require_symmetric(g: Graph, what: str):
    if not g.symmetric:
        raise InputError(f"{what} needs an undirected graph (symmetric weights)")


def laplacian(g: Graph) -> GeneratorMatrix:
    _require_symmetric(g, "laplacian")
    return GeneratorMatrix(LAPLACIAN, np.diag(g.out_degrees()) - g.weights)


def principal_eigenpair(g: Graph) -> tuple[float, np.ndarray]:
    """Largest eigenvalue of A and its unit eigenvector, sign-fixed positive."""
    _require_symmetric(g, "maximal-entropy construction")
    if not g.is_connected():
        raise InputError("maximal-entropy construction needs a connected graph")
    vals, vecs = np.linalg.eigh(g.weights)
    chi = float(vals[-1])
    if g.n > 1 and vals[-1] - vals[-2] <= 1e-10 * max(1.0, abs(chi)):
        raise NumericalError("principal eigenvalue is degenerate; eigenvector is ambiguous")
    xi = vecs[:, -1]
    if xi[np.argmax(np.abs(xi))] < 0:
        xi = -xi
    if g.n > 1 and xi.min() <= 0:
        raise NumericalError("principal eigenvector is not strictly positive")
    return chi, xi


def mea_matrix(g: Graph) -> GeneratorMatrix:
    chi, xi = principal_eigenpair(g)
    return GeneratorMatrix(MEA, xi[:, None] * g.weights * xi[None, :])


def hermitian_adjacency(g: Graph, alpha: complex) -> GeneratorMatrix:
    """Reciprocal pairs keep their weight; others become ``a_ij*alpha + a_ji*conj(alpha)``."""
    kind = GeneratorKind.hermitian(alpha)
    a = g.weights
    mixed = a * kind.alpha + a.T * kind.alpha.conjugate()
    return GeneratorMatrix(kind, np.where(a == a.T, a.astype(complex), mixed))


def symmetrized_average(g: Graph) -> GeneratorMatrix:
    return GeneratorMatrix(SYMMETRIZED, (g.weights + g.weights.T) / 2)


def build_generator(g: Graph, kind: GeneratorKind | Kind | str) -> GeneratorMatrix:
    if not isinstance(kind, GeneratorKind):
        kind = GeneratorKind(Kind(kind))
    if kind.kind is Kind.ADJACENCY:
        if not g.symmetric:
            raise InputError(
                "adjacency generator needs symmetric weights; for a directed graph use "
                "hermitian-adjacency (or the symmetrized average)"
            )
        return GeneratorMatrix(ADJACENCY, g.weights)
    if kind.kind is Kind.LAPLACIAN:
        return laplacian(g)
    if kind.kind is Kind.MEA:
        return mea_matrix(g)
    if kind.kind is Kind.HERMITIAN_ADJACENCY:
        return hermitian_adjacency(g, kind.alpha)
    return symmetrized_average(g)
