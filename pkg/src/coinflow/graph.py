"""Finite connected graphs used as social networks.

Vertices are dense integers ``0..n-1``.  A graph is immutable after
construction and stores, besides the undirected edge set, a flat array of
all ``2 * |E|`` directed edges so that the simulation loop can draw a
uniform directed edge with a single random integer.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass, field

import numpy as np

from .errors import (
    ConnectivityError,
    EmptyEdgeSetError,
    InvalidSizeError,
    MalformedEdgeError,
)

NAMED_KINDS = ("complete", "path", "cycle", "star")


@dataclass(frozen=True)
class GraphTopology:
    """A validated, connected, simple undirected graph.

    Attributes:
        n: number of vertices.
        edges: sorted tuple of undirected edges ``(u, v)`` with ``u < v``.
        src, dst: endpoint arrays of the ``2 * len(edges)`` directed edges.
    """

    n: int
    edges: tuple[tuple[int, int], ...]
    src: np.ndarray = field(repr=False, compare=False)
    dst: np.ndarray = field(repr=False, compare=False)

    @property
    def num_directed_edges(self) -> int:
        return 2 * len(self.edges)

    def neighbors(self) -> list[list[int]]:
        adj: list[list[int]] = [[] for _ in range(self.n)]
        for u, v in self.edges:
            adj[u].append(v)
            adj[v].append(u)
        return adj


def _validate_and_build(n: int, pairs) -> GraphTopology:
    if n < 2:
        raise InvalidSizeError(f"need at least 2 vertices, got {n}")
    seen = set()
    edges = []
    for u, v in pairs:
        if not (0 <= u < n and 0 <= v < n):
            raise MalformedEdgeError(f"endpoint out of range in edge ({u}, {v})")
        if u == v:
            raise MalformedEdgeError(f"self-loop at vertex {u}")
        key = (min(u, v), max(u, v))
        if key in seen:
            raise MalformedEdgeError(f"duplicate edge {key}")
        seen.add(key)
        edges.append(key)
    if not edges:
        raise EmptyEdgeSetError("graph has no edges; transition probabilities undefined")
    edges.sort()
    src = np.empty(2 * len(edges), dtype=np.int64)
    dst = np.empty(2 * len(edges), dtype=np.int64)
    for i, (u, v) in enumerate(edges):
        src[2 * i], dst[2 * i] = u, v
        src[2 * i + 1], dst[2 * i + 1] = v, u
    src.flags.writeable = False
    dst.flags.writeable = False
    g = GraphTopology(n=n, edges=tuple(edges), src=src, dst=dst)
    if not _is_connected(g):
        raise ConnectivityError("graph is not connected")
    return g


def _is_connected(g: GraphTopology) -> bool:
    adj = g.neighbors()
    seen = [False] * g.n
    seen[0] = True
    queue = deque([0])
    count = 1
    while queue:
        u = queue.popleft()
        for v in adj[u]:
            if not seen[v]:
                seen[v] = True
                count += 1
                queue.append(v)
    return count == g.n


def build_named(kind: str, n: int) -> GraphTopology:
    """Build one of the named topologies on vertices ``0..n-1``.

    ``cycle`` on two vertices degenerates to a single edge (a proper
    2-cycle would be a multigraph).
    """
    if kind not in NAMED_KINDS:
        raise ValueError(f"unknown graph kind {kind!r}; choose from {NAMED_KINDS}")
    if n < 2:
        raise InvalidSizeError(f"need at least 2 vertices, got {n}")
    if kind == "complete":
        pairs = [(u, v) for u in range(n) for v in range(u + 1, n)]
    elif kind == "path":
        pairs = [(i, i + 1) for i in range(n - 1)]
    elif kind == "cycle":
        pairs = [(i, i + 1) for i in range(n - 1)]
        if n > 2:
            pairs.append((n - 1, 0))
    else:  # star
        pairs = [(0, i) for i in range(1, n)]
    return _validate_and_build(n, pairs)


def from_edge_list(n: int, pairs) -> GraphTopology:
    """Build and validate a graph from an explicit list of vertex pairs."""
    return _validate_and_build(n, list(pairs))


def parse_edge_list(text: str) -> GraphTopology:
    """Parse the edge-list text format.

    First non-comment line is ``n``, then one ``u v`` pair per line.
    ``#`` starts a comment, whitespace separated, 0-indexed.
    """
    lines = []
    for raw in text.splitlines():
        line = raw.split("#", 1)[0].strip()
        if line:
            lines.append(line)
    if not lines:
        raise MalformedEdgeError("empty edge-list input")
    try:
        n = int(lines[0])
        pairs = []
        for line in lines[1:]:
            u, v = line.split()
            pairs.append((int(u), int(v)))
    except ValueError as exc:
        raise MalformedEdgeError(f"cannot parse edge list: {exc}") from exc
    return from_edge_list(n, pairs)


def load_edge_list(path) -> GraphTopology:
    with open(path, encoding="utf-8") as fh:
        return parse_edge_list(fh.read())


def sample_directed_edge(g: GraphTopology, rng: np.random.Generator) -> tuple[int, int]:
    """Draw one directed edge uniformly from the ``2 * |E|`` candidates."""
    i = int(rng.integers(0, g.num_directed_edges))
    return int(g.src[i]), int(g.dst[i])


def diameter(g: GraphTopology) -> int:
    """Maximum over vertex pairs of the shortest-path length."""
    adj = g.neighbors()
    best = 0
    for start in range(g.n):
        dist = [-1] * g.n
        dist[start] = 0
        queue = deque([start])
        while queue:
            u = queue.popleft()
            for v in adj[u]:
                if dist[v] < 0:
                    dist[v] = dist[u] + 1
                    queue.append(v)
        best = max(best, max(dist))
    return best
