"""Rendezvous arenas: small labeled graphs with ordered out-edges.

Nodes are labeled ``1..n``.  The out-edges of every node are kept sorted, so
edge ``k`` of node ``v`` always leads to the ``k``-th smallest neighbor (the
self-loop included when the graph is reflexive).  Strategies refer to edges by
these labels.
"""
from __future__ import annotations

import json
import re
from dataclasses import dataclass
from pathlib import Path
from typing import Sequence


class GraphError(ValueError):
    """Raised for malformed graph input."""


@dataclass(frozen=True)
class Graph:
    n: int
    out_edges: tuple[tuple[int, ...], ...]
    reflexive: bool = False
    directed: bool = False
    name: str = ""

    def __post_init__(self):
        if self.n < 1 or len(self.out_edges) != self.n:
            raise GraphError("out_edges must have one row per node")
        for v, row in enumerate(self.out_edges, start=1):
            if not row:
                raise GraphError(f"empty row for node {v}")
            for t in row:
                if not 1 <= t <= self.n:
                    raise GraphError(f"node index out of range: {t} (n={self.n})")
            if any(a >= b for a, b in zip(row, row[1:])):
                raise GraphError(f"out_edges of node {v} must be strictly ascending")
            if self.reflexive and v not in row:
                raise GraphError(f"reflexive graph lacks self-loop at node {v}")
            if not self.reflexive and v in row:
                raise GraphError(f"anti-reflexive graph has self-loop at node {v}")

    @property
    def degrees(self) -> tuple[int, ...]:
        return tuple(len(row) for row in self.out_edges)

    @property
    def is_regular(self) -> bool:
        return len(set(self.degrees)) == 1

    @property
    def degree(self) -> int:
        """Common out-degree R; raises for non-regular graphs."""
        if not self.is_regular:
            raise GraphError("graph is not regular")
        return self.degrees[0]

    def neighbors(self, v: int) -> tuple[int, ...]:
        self._check_node(v)
        return self.out_edges[v - 1]

    def _check_node(self, v: int) -> None:
        if not 1 <= v <= self.n:
            raise GraphError(f"node index out of range: {v} (n={self.n})")

    def with_reflexive(self, reflexive: bool = True) -> "Graph":
        """Copy of the graph with self-loops inserted (or removed) at every node."""
        if reflexive == self.reflexive:
            return self
        rows = []
        for v, row in enumerate(self.out_edges, start=1):
            s = set(row)
            s.add(v) if reflexive else s.discard(v)
            rows.append(tuple(sorted(s)))
        return Graph(self.n, tuple(rows), reflexive, self.directed, self.name)

    def relabel(self, perm: Sequence[int]) -> "Graph":
        """Rename node ``v`` to ``perm[v-1]`` and re-sort every edge list."""
        if sorted(perm) != list(range(1, self.n + 1)):
            raise GraphError("perm must be a permutation of 1..n")
        rows: list[tuple[int, ...]] = [()] * self.n
        for v, row in enumerate(self.out_edges, start=1):
            rows[perm[v - 1] - 1] = tuple(sorted(perm[t - 1] for t in row))
        return Graph(self.n, tuple(rows), self.reflexive, self.directed, self.name)

    def to_dict(self) -> dict:
        return {
            "n": self.n,
            "reflexive": self.reflexive,
            "directed": self.directed,
            "adjacency": [list(r) for r in self.out_edges],
        }


def from_adjacency_list(rows, *, directed: bool = False, name: str = "") -> Graph:
    """Build a graph from 1-indexed neighbor lists.

    Reflexivity is inferred: a graph is reflexive when every node lists itself.
    Lists that self-loop on only some nodes are rejected.
    """
    rows = [list(r) for r in rows]
    if not rows:
        raise GraphError("adjacency list is empty")
    n = len(rows)
    out = []
    for v, row in enumerate(rows, start=1):
        if not row:
            raise GraphError(f"empty row for node {v}")
        for t in row:
            if not isinstance(t, int) or isinstance(t, bool):
                raise GraphError(f"non-integer node label {t!r}")
            if not 1 <= t <= n:
                raise GraphError(f"node index out of range: {t} (n={n})")
        if len(set(row)) != len(row):
            raise GraphError(f"duplicate neighbor in row of node {v}")
        out.append(tuple(sorted(row)))
    loops = [v in out[v - 1] for v in range(1, n + 1)]
    if any(loops) and not all(loops):
        raise GraphError("self-loops must be present at all nodes or at none")
    return Graph(n, tuple(out), all(loops), directed, name)


def build_cycle(n: int, reflexive: bool = False, directed: bool = False) -> Graph:
    if n < 3:
        raise GraphError(f"cycle needs at least 3 nodes, got {n}")
    rows = []
    for v in range(1, n + 1):
        nxt = v % n + 1
        prv = (v - 2) % n + 1
        s = {nxt} if directed else {nxt, prv}
        if reflexive:
            s.add(v)
        rows.append(tuple(sorted(s)))
    kind = "dircycle" if directed else "cycle"
    return Graph(n, tuple(rows), reflexive, directed, f"{kind}-{n}")


def edge_target(g: Graph, v: int, k: int) -> int:
    row = g.neighbors(v)
    if not 1 <= k <= len(row):
        raise GraphError(f"edge index {k} out of range at node {v} (degree {len(row)})")
    return row[k - 1]


def walk(g: Graph, start: int, moves: Sequence[int]) -> list[int]:
    """Positions after each move, starting from ``start``."""
    g._check_node(start)
    pos, out = start, []
    for k in moves:
        pos = edge_target(g, pos, k)
        out.append(pos)
    return out


# Cubic graphs on 6 and 8 nodes; there is no "cubic-1" in the source listing.
CUBIC = {
    "cubic-2": [[2, 3, 4], [1, 3, 5], [1, 2, 6], [1, 5, 6], [2, 4, 6], [3, 4, 5]],
    "cubic-3": [[4, 5, 6], [4, 5, 6], [4, 5, 6], [1, 2, 3], [1, 2, 3], [1, 2, 3]],
    "cubic-4": [[3, 5, 7], [4, 6, 8], [1, 5, 7], [2, 6, 8],
                [1, 3, 7], [2, 4, 8], [1, 3, 5], [2, 4, 6]],
    "cubic-5": [[2, 5, 6], [1, 3, 6], [2, 4, 7], [3, 5, 8],
                [1, 4, 8], [1, 2, 7], [3, 6, 8], [4, 5, 7]],
    "cubic-6": [[2, 3, 4], [1, 3, 6], [1, 2, 8], [1, 5, 7],
                [4, 6, 8], [2, 5, 7], [4, 6, 8], [3, 5, 7]],
    "cubic-7": [[2, 4, 5], [1, 3, 6], [2, 4, 7], [1, 3, 8],
                [1, 6, 8], [2, 5, 7], [3, 6, 8], [4, 5, 7]],
    "cubic-8": [[2, 6, 7], [1, 3, 7], [2, 4, 7], [3, 5, 8],
                [4, 6, 8], [1, 5, 8], [1, 2, 3], [4, 5, 6]],
    "cubic-9": [[2, 5, 8], [1, 3, 6], [2, 4, 7], [3, 5, 8],
                [1, 4, 6], [2, 5, 7], [3, 6, 8], [1, 4, 7]],
}

_CYCLE_RE = re.compile(r"^(cycle|dircycle)-(\d+)$")


def catalog_names() -> list[str]:
    return list(CUBIC) + ["cycle-<n>", "dircycle-<n>"]


def from_catalog(name: str, reflexive: bool = False) -> Graph:
    """Look up ``cubic-2``..``cubic-9``, ``cycle-<n>`` or ``dircycle-<n>``."""
    if name in CUBIC:
        g = from_adjacency_list(CUBIC[name], name=name)
        return g.with_reflexive(reflexive)
    m = _CYCLE_RE.match(name)
    if m:
        return build_cycle(int(m.group(2)), reflexive, m.group(1) == "dircycle")
    raise GraphError(f"unknown graph {name!r}; known: {', '.join(catalog_names())}")


def from_json(data: dict | str | Path) -> Graph:
    """Parse the JSON graph format ``{"n", "reflexive", "directed", "adjacency"}``."""
    if isinstance(data, (str, Path)):
        data = json.loads(Path(data).read_text())
    try:
        n, adj = int(data["n"]), data["adjacency"]
    except (KeyError, TypeError) as e:
        raise GraphError(f"malformed graph JSON: {e}") from None
    if len(adj) != n:
        raise GraphError(f"adjacency has {len(adj)} rows but n={n}")
    g = from_adjacency_list(adj, directed=bool(data.get("directed", False)))
    want = data.get("reflexive")
    if want is not None and bool(want) != g.reflexive:
        raise GraphError("'reflexive' flag disagrees with self-loops in adjacency")
    return g


def load_graph(spec: str, reflexive: bool | None = None) -> Graph:
    """Resolve a catalog name or a path to a JSON graph file."""
    p = Path(spec)
    if p.suffix == ".json" or p.exists():
        g = from_json(p)
        return g if reflexive is None else g.with_reflexive(reflexive)
    return from_catalog(spec, bool(reflexive))
