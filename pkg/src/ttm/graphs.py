"""Graphs with oriented-edge involution, reduced edge paths, turns, languages.

An unoriented edge is stored as a pair of oppositely oriented edges.  Oriented
edges are small integers: the pair for unoriented edge ``k`` is ``2k``
(the positive orientation) and ``2k + 1`` (its reverse), so the involution is
``e ^ 1`` and the positive section is the set of even ids.  Fixing the section
once makes transition-matrix row/column order deterministic everywhere.

Edge paths are plain tuples of oriented edge ids.  Reversal and free reduction
are independent of the ambient graph; adjacency validation is not and lives on
:class:`Graph`.

All objects here are immutable after construction and safe for concurrent
reads.
"""

from __future__ import annotations

from dataclasses import dataclass

from .errors import GraphError, PathError

Path = tuple  # tuple of oriented edge ids
Turn = tuple  # normalised (min, max) pair of oriented edge ids


def inverse(e: int) -> int:
    """The oppositely oriented edge."""
    return e ^ 1


def is_positive(e: int) -> bool:
    return e % 2 == 0


def reverse_path(path: Path) -> Path:
    """The inversely oriented path: entries inverted, order reversed."""
    return tuple(inverse(e) for e in reversed(path))


def is_reduced(path: Path) -> bool:
    """True iff no adjacent pair cancels (e followed by its inverse)."""
    return all(path[i + 1] != inverse(path[i]) for i in range(len(path) - 1))


def reduce_path(path: Path) -> Path:
    """Free reduction: iterated cancellation of adjacent inverse pairs.

    Idempotent, length non-increasing, identity on reduced input.  The result
    may be the empty path.
    """
    stack = []
    for e in path:
        if stack and stack[-1] == inverse(e):
            stack.pop()
        else:
            stack.append(e)
    return tuple(stack)


def make_turn(d1: int, d2: int) -> Turn:
    """Unordered pair of directions, normalised for hashing."""
    return (d1, d2) if d1 <= d2 else (d2, d1)


def is_degenerate(turn: Turn) -> bool:
    return turn[0] == turn[1]


def turns_of(path: Path) -> list:
    """The turns a reduced path crosses: {e_i reversed, e_{i+1}} at each junction.

    Rejects unreduced input, so no returned turn is degenerate.
    """
    if not is_reduced(path):
        raise PathError("turns_of requires a reduced path")
    return [make_turn(inverse(path[i]), path[i + 1]) for i in range(len(path) - 1)]


class Graph:
    """Finite connected graph without valence-1 vertices.

    Parameters
    ----------
    n_vertices:
        Number of vertices; vertex ids are ``0 .. n_vertices - 1``.
    endpoints:
        One ``(initial, terminal)`` vertex pair per unoriented edge; pair ``k``
        describes the positive orientation ``2k``.
    vertex_labels, edge_labels:
        Optional display names (edge labels name the positive orientations).
    """

    def __init__(self, n_vertices, endpoints, vertex_labels=None, edge_labels=None):
        self.n_vertices = int(n_vertices)
        self._endpoints = tuple((int(a), int(b)) for a, b in endpoints)
        self.n_edges = len(self._endpoints)
        if self.n_vertices <= 0:
            raise GraphError("graph needs at least one vertex")
        for a, b in self._endpoints:
            if not (0 <= a < self.n_vertices and 0 <= b < self.n_vertices):
                raise GraphError("edge endpoint out of range")
        self.vertex_labels = tuple(vertex_labels) if vertex_labels else tuple(
            f"v{i}" for i in range(self.n_vertices))
        self.edge_labels = tuple(edge_labels) if edge_labels else tuple(
            f"e{i}" for i in range(self.n_edges))
        if len(self.vertex_labels) != self.n_vertices or len(self.edge_labels) != self.n_edges:
            raise GraphError("label count mismatch")
        # directions[v] = tuple of oriented edges with initial vertex v
        at = [[] for _ in range(self.n_vertices)]
        for k, (a, b) in enumerate(self._endpoints):
            at[a].append(2 * k)
            at[b].append(2 * k + 1)
        self._directions = tuple(tuple(d) for d in at)
        self._check_valence()
        self._check_connected()

    # -- invariant checks ----------------------------------------------------

    def _check_valence(self):
        for v in range(self.n_vertices):
            if self.valence(v) < 2:
                raise GraphError(
                    f"vertex {self.vertex_labels[v]} has valence {self.valence(v)} < 2")

    def _check_connected(self):
        seen = {0}
        stack = [0]
        while stack:
            v = stack.pop()
            for d in self._directions[v]:
                w = self.terminal(d)
                if w not in seen:
                    seen.add(w)
                    stack.append(w)
        if len(seen) != self.n_vertices:
            raise GraphError("graph is not connected")

    # -- basic accessors -------------------------------------------------------

    @property
    def vertices(self):
        return range(self.n_vertices)

    @property
    def positive_edges(self):
        """The stored section Edges+ (one orientation per unoriented edge)."""
        return range(0, 2 * self.n_edges, 2)

    @property
    def oriented_edges(self):
        return range(2 * self.n_edges)

    def terminal(self, e: int) -> int:
        a, b = self._endpoints[e >> 1]
        return b if e % 2 == 0 else a

    def initial(self, e: int) -> int:
        return self.terminal(inverse(e))

    def valence(self, v: int) -> int:
        return len(self._directions[v])

    def directions_at(self, v: int):
        """Oriented edges with initial vertex v."""
        return self._directions[v]

    def turns_at(self, v: int):
        """All non-degenerate unordered turns based at v."""
        ds = self._directions[v]
        return [make_turn(ds[i], ds[j])
                for i in range(len(ds)) for j in range(i + 1, len(ds))]

    def all_turns(self):
        out = []
        for v in self.vertices:
            out.extend(self.turns_at(v))
        return out

    def edge_label(self, e: int) -> str:
        name = self.edge_labels[e >> 1]
        return name if e % 2 == 0 else "~" + name

    def path_label(self, path: Path) -> str:
        return " ".join(self.edge_label(e) for e in path)

    # -- path validation ---------------------------------------------------------

    def is_path(self, path: Path) -> bool:
        if any(not (0 <= e < 2 * self.n_edges) for e in path):
            return False
        return all(self.terminal(path[i]) == self.initial(path[i + 1])
                   for i in range(len(path) - 1))

    def check_path(self, path: Path) -> Path:
        if not self.is_path(path):
            raise PathError(f"not an edge path in this graph: {path!r}")
        return tuple(path)

    def path_initial(self, path: Path) -> int:
        return self.initial(path[0])

    def path_terminal(self, path: Path) -> int:
        return self.terminal(path[-1])

    # -- path enumeration ----------------------------------------------------------

    def reduced_paths(self, max_length: int, start=None):
        """All non-trivial reduced paths of length <= max_length.

        ``start`` restricts the initial vertex.  Intended for desk-scale
        graphs; the count grows exponentially in ``max_length``.
        """
        out = []
        frontier = []
        for e in self.oriented_edges:
            if start is None or self.initial(e) == start:
                frontier.append((e,))
        out.extend(frontier)
        for _ in range(max_length - 1):
            nxt = []
            for p in frontier:
                v = self.terminal(p[-1])
                for d in self._directions[v]:
                    if d != inverse(p[-1]):
                        nxt.append(p + (d,))
            out.extend(nxt)
            frontier = nxt
        return out

    def extensions_left(self, path: Path):
        """Edges e0 with e0 + path reduced."""
        v = self.path_initial(path)
        bad = inverse(path[0])
        return [inverse(d) for d in self._directions[v] if inverse(d) != bad]

    def extensions_right(self, path: Path):
        """Edges e1 with path + e1 reduced."""
        v = self.path_terminal(path)
        bad = inverse(path[-1])
        return [d for d in self._directions[v] if d != bad]

    # -- misc ---------------------------------------------------------------------

    def euler_characteristic(self) -> int:
        return self.n_vertices - self.n_edges

    def rank(self) -> int:
        """Rank of the (free) fundamental group."""
        return self.n_edges - self.n_vertices + 1

    def __repr__(self):
        return f"Graph({self.n_vertices} vertices, {self.n_edges} edges)"


def rose(n_petals: int, edge_labels=None) -> Graph:
    """One-vertex graph with ``n_petals`` loops."""
    return Graph(1, [(0, 0)] * n_petals, vertex_labels=("*",), edge_labels=edge_labels)


@dataclass(frozen=True)
class Language:
    """A finite set of reduced paths, complete up to ``max_length``.

    Languages produced in this package are truncations of laminary languages:
    closed under reversal and subpaths, and every member shorter than the
    bound extends on both sides within the set.
    """

    paths: frozenset
    max_length: int

    def __contains__(self, path):
        return tuple(path) in self.paths

    def up_to(self, length: int):
        if length > self.max_length:
            raise PathError(
                f"language only complete up to {self.max_length}, asked for {length}")
        return Language(frozenset(p for p in self.paths if len(p) <= length), length)

    def of_length(self, length: int):
        return [p for p in self.paths if len(p) == length]

    def laminary_violations(self, graph: Graph):
        """Check closure under reversal/subpaths and bi-extendability.

        Returns a list of human-readable problems (empty = laminary up to the
        bound, in the exact truncated sense).
        """
        problems = []
        for p in self.paths:
            if not p:
                problems.append("contains the empty path")
                continue
            if not is_reduced(p):
                problems.append(f"unreduced member {p}")
            if reverse_path(p) not in self.paths:
                problems.append(f"reversal of {p} missing")
            if len(p) > 1:
                if p[:-1] not in self.paths or p[1:] not in self.paths:
                    problems.append(f"subpath of {p} missing")
            if len(p) < self.max_length:
                if not any(((e0,) + p) in self.paths
                           for e0 in graph.extensions_left(p)):
                    problems.append(f"{p} has no left extension")
                if not any((p + (e1,)) in self.paths
                           for e1 in graph.extensions_right(p)):
                    problems.append(f"{p} has no right extension")
        return problems


def subpaths_up_to(path: Path, max_length: int):
    """All non-empty subpaths of ``path`` with length <= max_length."""
    n = len(path)
    out = set()
    for i in range(n):
        for j in range(i + 1, min(i + max_length, n) + 1):
            out.add(path[i:j])
    return out
