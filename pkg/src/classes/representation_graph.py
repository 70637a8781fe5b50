"""Representation graphs of two-row restrictions and their edge decompositions."""

from collections import defaultdict
from typing import Dict, Iterable, List, Optional, Sequence, Tuple

import networkx as nx

from .base import DomainError, PartitionError, PieceKind
from .domain import FunctionTable

Edge = Tuple[int, int]


class RepresentationGraph:
    """Directed graph on T with one edge (f(l0, r), f(l1, r)) per column r.

    Parallel edges are collapsed; each edge keeps the columns mapping onto it.
    """

    def __init__(self, ell0: int, ell1: int, preimages: Dict[Edge, Sequence[int]]):
        self.rows = (ell0, ell1)
        self.graph = nx.DiGraph()
        for edge in sorted(preimages):
            cols = tuple(sorted(preimages[edge]))
            if not cols:
                raise DomainError(f"edge {edge} has no preimage")
            self.graph.add_edge(edge[0], edge[1], preimages=cols)

    @property
    def ell0(self) -> int:
        return self.rows[0]

    @property
    def ell1(self) -> int:
        return self.rows[1]

    @property
    def vertices(self) -> List[int]:
        return sorted(self.graph.nodes)

    @property
    def edges(self) -> List[Edge]:
        return sorted(self.graph.edges)

    def number_of_edges(self) -> int:
        return self.graph.number_of_edges()

    def preimages(self, edge: Edge) -> Tuple[int, ...]:
        return self.graph.edges[edge]["preimages"]

    def columns(self) -> List[int]:
        return sorted(r for edge in self.graph.edges for r in self.preimages(edge))

    def restricted(self, edges: Iterable[Edge]) -> "RepresentationGraph":
        return RepresentationGraph(self.ell0, self.ell1, {e: self.preimages(e) for e in edges})

    def components(self) -> List["RepresentationGraph"]:
        """Weakly connected components, ordered by their lowest vertex."""
        parts = sorted(nx.weakly_connected_components(self.graph), key=min)
        return [self.restricted(self.graph.subgraph(part).edges) for part in parts]

    def __repr__(self) -> str:
        return f"RepresentationGraph(rows={self.rows}, |V|={len(self.graph)}, |E|={self.number_of_edges()})"


class GraphPiece:
    """A nice subgraph: cycle, path, in-star, out-star or a lone edge."""

    def __init__(self, kind: PieceKind, edges: Sequence[Edge]):
        self.kind = kind
        self.edges = tuple((int(u), int(v)) for u, v in edges)
        if not self.edges:
            raise PartitionError(f"empty {kind.value} piece")
        self.vertices = self._shape()

    def _shape(self) -> List[int]:
        if self.kind in (PieceKind.CYCLE, PieceKind.PATH, PieceKind.SINGLE_EDGE):
            if self.kind is PieceKind.SINGLE_EDGE and len(self.edges) != 1:
                raise PartitionError("a single-edge piece holds exactly one edge")
            walk = [self.edges[0][0]]
            for u, v in self.edges:
                if u != walk[-1]:
                    raise PartitionError(f"{self.kind.value} edges do not form a directed walk: {self.edges}")
                walk.append(v)
            if self.kind is PieceKind.CYCLE:
                if walk[-1] != walk[0]:
                    raise PartitionError(f"cycle does not close: {self.edges}")
                walk.pop()
            if len(set(walk)) != len(walk):
                raise PartitionError(f"{self.kind.value} repeats a vertex: {self.edges}")
            return walk
        if self.kind is PieceKind.OUT_STAR:
            center, leaves = self.edges[0][0], [v for _, v in self.edges]
            if any(u != center for u, _ in self.edges):
                raise PartitionError(f"out-star edges do not share a tail: {self.edges}")
        else:
            center, leaves = self.edges[0][1], [u for u, _ in self.edges]
            if any(v != center for _, v in self.edges):
                raise PartitionError(f"in-star edges do not share a head: {self.edges}")
        if center in leaves or len(set(leaves)) != len(leaves):
            raise PartitionError(f"malformed star: {self.edges}")
        return [center] + leaves

    @property
    def cost(self) -> int:
        return len(self.vertices)

    @property
    def center(self) -> int:
        return self.vertices[0]

    def __eq__(self, other) -> bool:
        return isinstance(other, GraphPiece) and (self.kind, self.edges) == (other.kind, other.edges)

    def __repr__(self) -> str:
        return f"GraphPiece({self.kind.value}, {list(self.edges)})"


def build_representation_graph(f: FunctionTable, ell0: int, ell1: int,
                               cols: Optional[Iterable[int]] = None) -> RepresentationGraph:
    if ell0 == ell1:
        raise DomainError(f"the two rows must differ, got {ell0} twice")
    cols = range(f.size_r) if cols is None else list(cols)
    if not len(cols):
        raise DomainError("the column subset must be non-empty")
    preimages: Dict[Edge, List[int]] = defaultdict(list)
    for r in cols:
        preimages[(f(ell0, r), f(ell1, r))].append(r)
    return RepresentationGraph(ell0, ell1, preimages)


def decompose_cycles(graph: RepresentationGraph) -> Tuple[List[GraphPiece], RepresentationGraph]:
    """Strip loops, then directed cycles (search from the lowest vertex) until acyclic."""
    work = graph.graph.copy()
    cycles = []
    for v in sorted(nx.nodes_with_selfloops(work)):
        cycles.append(GraphPiece(PieceKind.CYCLE, [(v, v)]))
        work.remove_edge(v, v)
    while work.number_of_edges():
        try:
            found = nx.find_cycle(work, source=sorted(work.nodes))
        except nx.NetworkXNoCycle:
            break
        edges = [(e[0], e[1]) for e in found]
        start = edges.index(min(edges))
        edges = edges[start:] + edges[:start]
        cycles.append(GraphPiece(PieceKind.CYCLE, edges))
        work.remove_edges_from(edges)
    return cycles, graph.restricted(work.edges)


def _pair_piece(first: Edge, second: Edge) -> GraphPiece:
    if first[1] == second[0]:
        return GraphPiece(PieceKind.PATH, [first, second])
    if second[1] == first[0]:
        return GraphPiece(PieceKind.PATH, [second, first])
    if first[0] == second[0]:
        return GraphPiece(PieceKind.OUT_STAR, sorted([first, second]))
    if first[1] == second[1]:
        return GraphPiece(PieceKind.IN_STAR, sorted([first, second]))
    raise PartitionError(f"edges {first} and {second} share no endpoint")


def decompose_pairs(component: RepresentationGraph) -> Tuple[List[GraphPiece], Optional[GraphPiece]]:
    """Pair the edges of a connected acyclic component so each pair shares a vertex.

    With |E| odd the tree edge of the deepest BFS leaf is split off first.
    Pairing runs bottom-up over a BFS spanning tree; every vertex passes
    at most its own tree edge towards the root.
    """
    graph = component.graph
    if graph.number_of_edges() == 0:
        return [], None
    if not nx.is_weakly_connected(graph):
        raise DomainError("edge pairing needs a weakly connected component")
    if not nx.is_directed_acyclic_graph(graph):
        raise DomainError("edge pairing needs an acyclic component")

    root = min(graph.nodes)
    order = [root]
    parent: Dict[int, Optional[int]] = {root: None}
    for u, v in nx.bfs_edges(graph.to_undirected(as_view=True), root, sort_neighbors=sorted):
        parent[v] = u
        order.append(v)
    rank = {v: i for i, v in enumerate(order)}

    def up_edge(v: int) -> Edge:
        p = parent[v]
        return (p, v) if graph.has_edge(p, v) else (v, p)

    remaining = set(graph.edges)
    extra = None
    if len(remaining) % 2:
        split = up_edge(order[-1])
        remaining.discard(split)
        extra = GraphPiece(PieceKind.SINGLE_EDGE, [split])

    tree = {up_edge(v) for v in order[1:]}
    pool: Dict[int, List[Edge]] = {v: [] for v in order}
    for u, v in sorted(remaining - tree):
        pool[u if rank[u] < rank[v] else v].append((u, v))

    pairs = []
    for v in reversed(order):
        pending = pool[v]
        up = up_edge(v) if parent[v] is not None else None
        if up is not None and up not in remaining:
            up = None
        while len(pending) >= 2:
            pairs.append(_pair_piece(pending.pop(), pending.pop()))
        if pending:
            if up is None:
                raise PartitionError(f"edge {pending[0]} left unpaired at vertex {v}")
            pairs.append(_pair_piece(pending.pop(), up))
        elif up is not None:
            pool[parent[v]].append(up)
    return pairs, extra


def decompose_outstars(component: RepresentationGraph) -> List[GraphPiece]:
    """One out-star per vertex with out-degree at least one."""
    tails: Dict[int, List[Edge]] = defaultdict(list)
    for edge in component.edges:
        tails[edge[0]].append(edge)
    return [GraphPiece(PieceKind.OUT_STAR, tails[t]) for t in sorted(tails)]


def nice_piece(component: RepresentationGraph) -> Optional[GraphPiece]:
    """The whole component as one piece when it is a path, out-star or in-star."""
    graph = component.graph
    edges = component.edges
    if not edges or not nx.is_weakly_connected(graph) or nx.number_of_selfloops(graph):
        return None
    if all(graph.in_degree(v) <= 1 and graph.out_degree(v) <= 1 for v in graph.nodes):
        sources = [v for v in graph.nodes if graph.in_degree(v) == 0]
        if len(sources) == 1:
            walk, v = [], sources[0]
            while graph.out_degree(v):
                nxt = next(iter(graph.successors(v)))
                walk.append((v, nxt))
                v = nxt
            return GraphPiece(PieceKind.PATH, walk)
    if len({u for u, _ in edges}) == 1:
        return GraphPiece(PieceKind.OUT_STAR, edges)
    if len({v for _, v in edges}) == 1:
        return GraphPiece(PieceKind.IN_STAR, edges)
    return None


def pieces_cost(pieces: Iterable[GraphPiece]) -> int:
    return sum(piece.cost for piece in pieces)
