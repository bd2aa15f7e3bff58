"""Side-observation graphs, maximal cliques and greedy clique covers."""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from functools import cached_property
from pathlib import Path
from typing import Iterable, Sequence

import networkx as nx
import numpy as np

from .errors import InputError, ParseError

__all__ = [
    "SOGraph",
    "Clique",
    "CliqueCover",
    "CoverStats",
    "build_graph",
    "neighborhood",
    "is_clique",
    "maximal_clique_containing",
    "greedy_clique_cover",
    "trivial_cover",
    "cover_from_sets",
    "cover_stats",
    "induced_subgraph",
    "generate_graph",
    "parse_graph_kind",
    "load_edge_list",
    "write_edge_list",
    "write_cover",
]


@dataclass(frozen=True, eq=False)
class SOGraph:
    """Undirected side-observation graph over arms ``0..num_arms-1``.

    ``adjacency[i]`` holds the neighbors of ``i`` and never ``i`` itself.
    Instances are immutable; build them with :func:`build_graph`.
    """

    num_arms: int
    adjacency: tuple[frozenset[int], ...]

    def __eq__(self, other):
        if not isinstance(other, SOGraph):
            return NotImplemented
        return self.num_arms == other.num_arms and self.adjacency == other.adjacency

    def __hash__(self):
        return hash((self.num_arms, self.adjacency))

    def __repr__(self):
        return f"SOGraph(num_arms={self.num_arms}, num_edges={self.num_edges})"

    def degree(self, i: int) -> int:
        return len(self.adjacency[i])

    @property
    def num_edges(self) -> int:
        return sum(len(a) for a in self.adjacency) // 2

    def edges(self) -> list[tuple[int, int]]:
        """Edges ``(u, v)`` with ``u < v`` in lexicographic order."""
        return [(u, v) for u in range(self.num_arms) for v in sorted(self.adjacency[u]) if u < v]

    @cached_property
    def neighborhood_arrays(self) -> tuple[np.ndarray, ...]:
        # sorted N(i) including i, used on the hot path of the simulator
        return tuple(
            np.array(sorted(self.adjacency[i] | {i}), dtype=np.int64)
            for i in range(self.num_arms)
        )

    @cached_property
    def csr(self) -> tuple[np.ndarray, np.ndarray]:
        """``(indptr, indices)`` of the closed neighborhoods, sorted ascending."""
        arrays = self.neighborhood_arrays
        indptr = np.zeros(self.num_arms + 1, dtype=np.int64)
        indptr[1:] = np.cumsum([a.size for a in arrays])
        indices = np.concatenate(arrays) if arrays else np.zeros(0, dtype=np.int64)
        return indptr, indices


@dataclass(frozen=True)
class Clique:
    members: tuple[int, ...]

    def __post_init__(self):
        if not self.members:
            raise InputError("a clique must be nonempty")
        object.__setattr__(self, "members", tuple(sorted(set(self.members))))

    def __len__(self):
        return len(self.members)

    def __iter__(self):
        return iter(self.members)

    def __contains__(self, i):
        return i in self.members


@dataclass(frozen=True)
class CliqueCover:
    """Cliques in selection order together with the set of arms they cover."""

    cliques: tuple[Clique, ...]
    covered: frozenset[int]
    coverage_fraction: float
    num_arms: int

    def __len__(self):
        return len(self.cliques)

    @property
    def is_complete(self) -> bool:
        return len(self.covered) == self.num_arms


@dataclass(frozen=True)
class CoverStats:
    num_cliques: int
    avg_cliques_per_arm: float


def _check_arm(graph: SOGraph, i) -> int:
    if not isinstance(i, (int, np.integer)) or not 0 <= i < graph.num_arms:
        raise InputError(f"arm index {i!r} out of range [0, {graph.num_arms})")
    return int(i)


def build_graph(num_arms: int, edges: Iterable[Sequence[int]]) -> SOGraph:
    """Build a graph from an edge list; duplicates and reversed pairs collapse."""
    if not isinstance(num_arms, (int, np.integer)) or num_arms < 1:
        raise InputError(f"num_arms must be a positive integer, got {num_arms!r}")
    num_arms = int(num_arms)
    adj: list[set[int]] = [set() for _ in range(num_arms)]
    for edge in edges:
        u, v = (int(x) for x in edge)
        if not (0 <= u < num_arms and 0 <= v < num_arms):
            raise InputError(f"edge ({u}, {v}) has an endpoint outside [0, {num_arms})")
        if u == v:
            raise InputError(f"self-loop on arm {u}")
        adj[u].add(v)
        adj[v].add(u)
    return SOGraph(num_arms, tuple(frozenset(a) for a in adj))


def neighborhood(graph: SOGraph, i: int) -> frozenset[int]:
    """Observation set of ``i``: the arm itself plus its neighbors."""
    i = _check_arm(graph, i)
    return graph.adjacency[i] | {i}


def is_clique(graph: SOGraph, members: Iterable[int]) -> bool:
    members = sorted(set(members))
    if not members:
        raise InputError("is_clique needs a nonempty member set")
    for i in members:
        _check_arm(graph, i)
    for a, u in enumerate(members):
        nbrs = graph.adjacency[u]
        for v in members[a + 1:]:
            if v not in nbrs:
                return False
    return True


def maximal_clique_containing(graph: SOGraph, i: int) -> Clique:
    """Greedily grow ``{i}`` into a maximal clique.

    Candidates are the neighbors of ``i`` scanned by descending degree, then
    ascending index; a candidate joins when adjacent to every current member.
    """
    i = _check_arm(graph, i)
    order = sorted(graph.adjacency[i], key=lambda v: (-graph.degree(v), v))
    members = [i]
    common = set(graph.adjacency[i])
    for v in order:
        if v in common:
            members.append(v)
            common &= graph.adjacency[v]
    return Clique(tuple(members))


def _threshold(coverage_fraction: float, num_arms: int) -> int:
    # decimal reading of the fraction so that 0.1 * 10 gives 1, not 2
    return math.ceil(Fraction(repr(float(coverage_fraction))) * num_arms)


def greedy_clique_cover(graph: SOGraph, coverage_fraction: float = 1.0) -> CliqueCover:
    """Greedy set cover over the per-vertex maximal cliques.

    Picks the candidate covering the most uncovered arms; ties go to the
    candidate whose smallest uncovered arm is lowest, then to the lowest
    generating vertex. Stops once ``ceil(coverage_fraction * K)`` arms are
    covered.
    """
    if not 0.0 < coverage_fraction <= 1.0:
        raise InputError(f"coverage_fraction must lie in (0, 1], got {coverage_fraction!r}")
    target = _threshold(coverage_fraction, graph.num_arms)

    candidates: list[Clique] = []
    seen: set[tuple[int, ...]] = set()
    for i in range(graph.num_arms):
        c = maximal_clique_containing(graph, i)
        if c.members not in seen:
            seen.add(c.members)
            candidates.append(c)

    uncovered = [set(c.members) for c in candidates]
    alive = list(range(len(candidates)))
    covered: set[int] = set()
    chosen: list[Clique] = []
    while len(covered) < target:
        best, best_key = -1, None
        for idx in alive:
            rest = uncovered[idx]
            if not rest:
                continue
            key = (-len(rest), min(rest), idx)
            if best_key is None or key < best_key:
                best, best_key = idx, key
        clique = candidates[best]
        chosen.append(clique)
        gained = uncovered[best].copy()
        covered |= gained
        alive = [idx for idx in alive if idx != best]
        for idx in alive:
            uncovered[idx] -= gained
    return CliqueCover(tuple(chosen), frozenset(covered), float(coverage_fraction), graph.num_arms)


def trivial_cover(num_arms: int) -> CliqueCover:
    """The covering by singletons ``{{0}, {1}, ...}``."""
    cliques = tuple(Clique((i,)) for i in range(num_arms))
    return CliqueCover(cliques, frozenset(range(num_arms)), 1.0, num_arms)


def cover_from_sets(graph: SOGraph, sets: Iterable[Iterable[int]]) -> CliqueCover:
    """Wrap explicit member sets as a cover of ``graph``, validating each clique."""
    cliques = []
    for s in sets:
        members = tuple(s)
        if not is_clique(graph, members):
            raise InputError(f"{sorted(members)} is not a clique")
        cliques.append(Clique(members))
    covered = frozenset(i for c in cliques for i in c)
    fraction = len(covered) / graph.num_arms
    return CliqueCover(tuple(cliques), covered, fraction, graph.num_arms)


def cover_stats(cover: CliqueCover) -> CoverStats:
    if not cover.covered:
        return CoverStats(len(cover.cliques), 0.0)
    memberships = sum(len(c) for c in cover.cliques)
    return CoverStats(len(cover.cliques), memberships / len(cover.covered))


def induced_subgraph(graph: SOGraph, vertices: Iterable[int]) -> tuple[SOGraph, list[int]]:
    """Subgraph on ``vertices`` relabelled ``0..n-1`` in ascending original order.

    Returns the subgraph and the list mapping new labels to original arms.
    """
    keep = sorted(set(vertices))
    for v in keep:
        _check_arm(graph, v)
    relabel = {v: k for k, v in enumerate(keep)}
    edges = [(relabel[u], relabel[v]) for u, v in graph.edges() if u in relabel and v in relabel]
    return build_graph(len(keep), edges), keep


def _from_networkx(g: nx.Graph, num_arms: int) -> SOGraph:
    return build_graph(num_arms, g.edges())


def generate_graph(kind: str, num_arms: int, seed: int = 0, *, p: float | None = None,
                   m: int | None = None) -> SOGraph:
    """Synthetic graph of the given kind.

    ``kind`` is one of ``erdos_renyi`` (needs ``p``), ``preferential_attachment``
    (needs ``m``), ``complete``, ``star`` (center 0) or ``path``. Output depends
    only on the arguments; the last three ignore ``seed``.
    """
    if not isinstance(num_arms, (int, np.integer)) or num_arms < 1:
        raise InputError(f"num_arms must be >= 1, got {num_arms!r}")
    if seed < 0:
        raise InputError(f"seed must be unsigned, got {seed}")
    k = int(num_arms)
    if kind == "complete":
        return build_graph(k, ((u, v) for u in range(k) for v in range(u + 1, k)))
    if kind == "star":
        return build_graph(k, ((0, v) for v in range(1, k)))
    if kind == "path":
        return build_graph(k, ((v, v + 1) for v in range(k - 1)))
    if kind == "erdos_renyi":
        if p is None or not 0.0 <= p <= 1.0:
            raise InputError(f"erdos_renyi needs p in [0, 1], got {p!r}")
        return _from_networkx(nx.gnp_random_graph(k, p, seed=int(seed)), k)
    if kind == "preferential_attachment":
        if m is None or int(m) != m or m < 1:
            raise InputError(f"preferential_attachment needs an integer m >= 1, got {m!r}")
        if m >= k:
            raise InputError(f"preferential_attachment needs m < num_arms ({m} >= {k})")
        return _from_networkx(nx.barabasi_albert_graph(k, int(m), seed=int(seed)), k)
    raise InputError(f"unknown graph kind {kind!r}")


_KIND_ALIASES = {
    "er": "erdos_renyi",
    "erdos_renyi": "erdos_renyi",
    "gnp": "erdos_renyi",
    "pa": "preferential_attachment",
    "ba": "preferential_attachment",
    "preferential_attachment": "preferential_attachment",
    "complete": "complete",
    "star": "star",
    "path": "path",
}


def parse_graph_kind(text: str, default_seed: int = 0) -> SOGraph:
    """Parse ``kind:K[:param][:seedS]`` and generate the graph.

    Examples: ``complete:50``, ``er:100:0.1:seed3``, ``pa:200:4``.
    """
    parts = text.split(":")
    kind = _KIND_ALIASES.get(parts[0].lower())
    if kind is None or len(parts) < 2:
        raise InputError(f"bad graph spec {text!r}; expected kind:K[:param][:seedS]")
    seed = default_seed
    if parts[-1].startswith("seed"):
        seed = int(parts.pop()[4:])
    try:
        num_arms = int(parts[1])
        extra = parts[2:]
        if kind == "erdos_renyi":
            (p,) = extra
            return generate_graph(kind, num_arms, seed, p=float(p))
        if kind == "preferential_attachment":
            (m,) = extra
            return generate_graph(kind, num_arms, seed, m=int(m))
        if extra:
            raise ValueError("unexpected parameter")
    except ValueError as exc:
        if isinstance(exc, InputError):
            raise
        raise InputError(f"bad graph spec {text!r}: {exc}") from None
    return generate_graph(kind, num_arms, seed)


def _content_lines(path: Path):
    with open(path, encoding="utf-8") as fh:
        for lineno, raw in enumerate(fh, start=1):
            line = raw.strip()
            if not line or line.startswith("#"):
                continue
            yield lineno, line


def load_edge_list(path) -> SOGraph:
    """Read a ``K M`` header followed by ``M`` lines ``u v`` (0-based)."""
    path = Path(path)
    lines = _content_lines(path)
    header = next(lines, None)
    if header is None:
        raise ParseError("missing 'K M' header", path)
    lineno, text = header
    try:
        num_arms, num_edges = (int(x) for x in text.split(" "))
    except ValueError:
        raise ParseError(f"header must be 'K M', got {text!r}", path, lineno) from None
    if num_arms < 1 or num_edges < 0:
        raise ParseError(f"invalid counts in header {text!r}", path, lineno)

    edges = []
    for lineno, text in lines:
        try:
            u, v = (int(x) for x in text.split(" "))
        except ValueError:
            raise ParseError(f"edge line must be 'u v', got {text!r}", path, lineno) from None
        if not (0 <= u < num_arms and 0 <= v < num_arms):
            raise ParseError(f"edge ({u}, {v}) out of range for K={num_arms}", path, lineno)
        if u == v:
            raise ParseError(f"self-loop on arm {u}", path, lineno)
        if len(edges) == num_edges:
            raise ParseError(f"more edge lines than the header's M={num_edges}", path, lineno)
        edges.append((u, v))
    if len(edges) != num_edges:
        raise ParseError(f"header announces {num_edges} edges, found {len(edges)}", path)
    return build_graph(num_arms, edges)


def write_edge_list(graph: SOGraph, path) -> None:
    edges = graph.edges()
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(f"{graph.num_arms} {len(edges)}\n")
        for u, v in edges:
            fh.write(f"{u} {v}\n")


def write_cover(cover: CliqueCover, path) -> None:
    """One line per clique, sorted members, in selection order."""
    with open(path, "w", encoding="utf-8") as fh:
        for c in cover.cliques:
            fh.write(" ".join(str(i) for i in c.members) + "\n")
