"""Weighted networks, extracted structures and their file formats.

Vertices are identified by index internally and by label at I/O boundaries.
The index order is the order in which labels were given.
"""
from __future__ import annotations

import csv
import enum
import io
import json
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, Sequence

import numpy as np

from .errors import ValidationError

SYMMETRY_TOL = 1e-12


class NetworkKind(str, enum.Enum):
    REFERENCE = "reference"
    SAMPLE = "sample"


class StructureKind(str, enum.Enum):
    MST = "MST"
    PMFG = "PMFG"
    MG = "MG"
    MCMW = "MCMW"
    MISMW = "MISMW"

    @property
    def needs_theta(self) -> bool:
        return self in (StructureKind.MG, StructureKind.MCMW, StructureKind.MISMW)

    @property
    def is_vertex_set(self) -> bool:
        return self in (StructureKind.MCMW, StructureKind.MISMW)


@dataclass(frozen=True, eq=False)
class WeightedNetwork:
    """Complete weighted graph on labelled vertices.

    Use :func:`build_network` rather than the constructor; it validates and
    freezes the weight matrix.
    """

    labels: tuple[str, ...]
    weights: np.ndarray
    kind: NetworkKind = NetworkKind.REFERENCE
    correlation: bool = True

    @property
    def n(self) -> int:
        return len(self.labels)

    def weight(self, a, b) -> float:
        """Weight between two vertices given by label or index."""
        return float(self.weights[self._index(a), self._index(b)])

    def index(self, label: str) -> int:
        try:
            return self.labels.index(label)
        except ValueError:
            raise KeyError(label) from None

    def _index(self, v) -> int:
        return v if isinstance(v, (int, np.integer)) else self.index(v)

    def upper_weights(self) -> np.ndarray:
        """Weights of the N(N-1)/2 pairs i < j, row-major."""
        iu = np.triu_indices(self.n, k=1)
        return self.weights[iu]

    def __eq__(self, other):
        if not isinstance(other, WeightedNetwork):
            return NotImplemented
        return (
            self.labels == other.labels
            and self.kind == other.kind
            and self.correlation == other.correlation
            and np.array_equal(self.weights, other.weights)
        )

    __hash__ = None


def build_network(labels: Sequence[str], matrix, kind="reference", *, correlation=True) -> WeightedNetwork:
    """Validate a weight matrix and wrap it as a :class:`WeightedNetwork`.

    Parameters
    ----------
    labels : sequence of str
        Unique vertex identifiers; their order fixes the vertex indices.
    matrix : array_like, shape (N, N)
        Symmetric similarity matrix.
    kind : {"reference", "sample"}
    correlation : bool
        If true the entries must lie in [-1, 1] with a unit diagonal.

    Raises
    ------
    ValidationError
        On dimension mismatch, non-finite or out-of-range entries, duplicate
        labels, or asymmetry larger than 1e-12.
    """
    labels = tuple(str(x) for x in labels)
    kind = NetworkKind(kind)
    w = np.array(matrix, dtype=float)
    if w.ndim != 2 or w.shape[0] != w.shape[1]:
        raise ValidationError(f"weight matrix must be square, got shape {w.shape}")
    if w.shape[0] != len(labels):
        raise ValidationError(f"{len(labels)} labels for a {w.shape[0]}x{w.shape[0]} matrix")
    if len(labels) < 2:
        raise ValidationError("a network needs at least two vertices")
    if len(set(labels)) != len(labels):
        raise ValidationError("labels must be unique")
    if not np.all(np.isfinite(w)):
        raise ValidationError("weight matrix has non-finite entries")
    asym = np.max(np.abs(w - w.T))
    if asym > SYMMETRY_TOL:
        raise ValidationError(f"weight matrix is not symmetric (max |A - A^T| = {asym:.3g})")
    # (A + A^T) / 2 is bit-exactly symmetric because IEEE addition commutes.
    w = (w + w.T) / 2
    if correlation:
        if np.any(np.abs(w) > 1.0):
            i, j = np.argwhere(np.abs(w) > 1.0)[0]
            raise ValidationError(
                f"correlation entry ({labels[i]}, {labels[j]}) = {w[i, j]} outside [-1, 1]"
            )
        if np.any(np.diag(w) != 1.0):
            raise ValidationError("correlation matrix must have a unit diagonal")
    w.setflags(write=False)
    return WeightedNetwork(labels, w, kind, correlation)


def _canonical_edges(edges: Iterable) -> frozenset:
    out = set()
    for e in edges:
        i, j = (int(x) for x in e)
        if i == j:
            raise ValidationError(f"self-loop ({i}, {i}) is not allowed")
        out.add((i, j) if i < j else (j, i))
    return frozenset(out)


@dataclass(frozen=True)
class NetworkStructure:
    """Unweighted subgraph extracted from a network by a filtration.

    For MCMW and MISMW ``vertices`` is the defining clique or independent
    set and ``edges`` holds every pair inside it. For the other kinds
    ``vertices`` is the full vertex set.
    """

    kind: StructureKind
    n_vertices: int
    edges: frozenset
    vertices: frozenset
    theta: float | None = None
    # Set when a lexicographic tie-break among equal-weight optima decided the result.
    tie_broken: bool = field(default=False, compare=False)

    @classmethod
    def from_edges(cls, kind, n_vertices, edges, vertices=None, theta=None, tie_broken=False):
        kind = StructureKind(kind)
        if kind.needs_theta and theta is None:
            raise ValidationError(f"{kind.value} requires a threshold theta")
        if not kind.needs_theta and theta is not None:
            raise ValidationError(f"{kind.value} takes no threshold")
        edges = _canonical_edges(edges)
        verts = frozenset(range(n_vertices)) if vertices is None else frozenset(int(v) for v in vertices)
        for i, j in edges:
            if j >= n_vertices or i < 0:
                raise ValidationError(f"edge ({i}, {j}) out of range for N={n_vertices}")
        return cls(kind, n_vertices, edges, verts, None if theta is None else float(theta), tie_broken)

    @property
    def size(self) -> int:
        return len(self.vertices)

    def sorted_edges(self) -> list[tuple[int, int]]:
        return sorted(self.edges)

    def adjacency(self) -> np.ndarray:
        a = np.zeros((self.n_vertices, self.n_vertices), dtype=bool)
        if self.edges:
            idx = np.array(sorted(self.edges))
            a[idx[:, 0], idx[:, 1]] = True
            a[idx[:, 1], idx[:, 0]] = True
        return a


def degree_vector(structure: NetworkStructure | Iterable, n: int | None = None) -> tuple[int, ...]:
    """Vertex degrees of a structure sorted ascending.

    ``structure`` may also be a bare iterable of edge pairs, in which case
    ``n`` is required.
    """
    if isinstance(structure, NetworkStructure):
        edges = structure.edges
        n = structure.n_vertices if n is None else n
    else:
        edges = _canonical_edges(structure)
        if n is None:
            raise ValidationError("n is required for a bare edge list")
    deg = np.zeros(n, dtype=np.int64)
    for i, j in edges:
        deg[i] += 1
        deg[j] += 1
    return tuple(int(d) for d in np.sort(deg))


# --- I/O -------------------------------------------------------------------


def read_matrix_csv(path, kind="reference", *, correlation=True) -> WeightedNetwork:
    """Read a matrix CSV: a header of labels, then one ``label, w1..wN`` row per vertex.

    A leading empty header cell (the usual corner cell) is accepted.
    """
    text = Path(path).read_text()
    return parse_matrix_csv(text, kind, correlation=correlation)


def parse_matrix_csv(text: str, kind="reference", *, correlation=True) -> WeightedNetwork:
    rows = [r for r in csv.reader(io.StringIO(text)) if any(c.strip() for c in r)]
    if len(rows) < 3:
        raise ValidationError("matrix CSV needs a header and at least two rows")
    header = [c.strip() for c in rows[0]]
    if header and header[0] == "" and len(header) == len(rows):
        header = header[1:]
    n = len(header)
    if len(rows) - 1 != n:
        raise ValidationError(f"header lists {n} labels but there are {len(rows) - 1} data rows")
    matrix = np.empty((n, n))
    for k, row in enumerate(rows[1:]):
        row = [c.strip() for c in row]
        if len(row) != n + 1:
            raise ValidationError(f"row {k + 2}: expected label plus {n} values, got {len(row)} cells")
        if row[0] != header[k]:
            raise ValidationError(f"row {k + 2}: label {row[0]!r} does not match header {header[k]!r}")
        try:
            matrix[k] = [float(c) for c in row[1:]]
        except ValueError as exc:
            raise ValidationError(f"row {k + 2}: {exc}") from None
    return build_network(header, matrix, kind, correlation=correlation)


def format_matrix_csv(network: WeightedNetwork) -> str:
    # repr() gives the shortest string that round-trips the double exactly.
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(network.labels)
    for label, row in zip(network.labels, network.weights):
        writer.writerow([label] + [repr(float(x)) for x in row])
    return buf.getvalue()


def write_matrix_csv(network: WeightedNetwork, path) -> None:
    Path(path).write_text(format_matrix_csv(network))


def structure_to_dict(structure: NetworkStructure, labels: Sequence[str]) -> dict:
    out = {"kind": structure.kind.value}
    if structure.theta is not None:
        out["theta"] = structure.theta
    out["vertices"] = [labels[v] for v in sorted(structure.vertices)]
    out["edges"] = [[labels[i], labels[j]] for i, j in structure.sorted_edges()]
    return out


def structure_from_dict(data: dict, labels: Sequence[str]) -> NetworkStructure:
    index = {lab: k for k, lab in enumerate(labels)}
    try:
        edges = [(index[a], index[b]) for a, b in data["edges"]]
        vertices = [index[v] for v in data["vertices"]]
    except KeyError as exc:
        raise ValidationError(f"unknown label {exc.args[0]!r}") from None
    kind = StructureKind(data["kind"])
    return NetworkStructure.from_edges(
        kind, len(labels), edges,
        vertices=vertices if kind.is_vertex_set else None,
        theta=data.get("theta"),
    )


def structure_to_json(structure: NetworkStructure, labels: Sequence[str]) -> str:
    return json.dumps(structure_to_dict(structure, labels), indent=2) + "\n"
