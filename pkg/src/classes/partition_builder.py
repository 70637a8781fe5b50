"""Cyclic partition construction: two-row graphs, pieces to minors, row pairing."""

import logging
from collections import defaultdict
from typing import Dict, List, Optional, Tuple

from .base import PartitionError, PieceKind, RowPairing, SwapPolicy
from .domain import FunctionTable
from .partition import CyclicMinor, CyclicPartition, partition_cost
from .representation_graph import (
    GraphPiece,
    RepresentationGraph,
    build_representation_graph,
    decompose_cycles,
    decompose_outstars,
    decompose_pairs,
    nice_piece,
    pieces_cost,
)

logger = logging.getLogger(__name__)


def _constant(f: FunctionTable, rows: List[int], cols: List[int], value: int) -> CyclicMinor:
    return CyclicMinor.checked(f, rows, cols, 1, {a: 0 for a in rows}, {b: 0 for b in cols}, [value])


def piece_to_minors(piece: GraphPiece, graph: RepresentationGraph, f: FunctionTable) -> List[CyclicMinor]:
    """Cyclic minors covering both rows over the columns of the piece's edges.

    Cycles and paths give one minor with k = |V|: row l0 -> 0, row l1 -> 1,
    a column on edge (t_i, t_i+1) -> i and class i -> t_i. Stars give 1-cyclic
    minors: the center row as one block plus one block per edge on the other row.
    """
    for edge in piece.edges:
        if not graph.graph.has_edge(*edge):
            raise PartitionError(f"piece edge {edge} is not in the representation graph")
    ell0, ell1 = graph.rows
    if piece.kind in (PieceKind.CYCLE, PieceKind.PATH, PieceKind.SINGLE_EDGE):
        k = piece.cost
        position = {t: i for i, t in enumerate(piece.vertices)}
        sigma_b = {r: position[edge[0]] for edge in piece.edges for r in graph.preimages(edge)}
        return [CyclicMinor.checked(f, [ell0, ell1], sorted(sigma_b), k,
                                    {ell0: 0, ell1: 1 % k}, sigma_b, piece.vertices)]
    center_row, leaf_row = (ell0, ell1) if piece.kind is PieceKind.OUT_STAR else (ell1, ell0)
    all_cols = sorted(r for edge in piece.edges for r in graph.preimages(edge))
    minors = [_constant(f, [center_row], all_cols, piece.center)]
    for edge in piece.edges:
        leaf = edge[1] if piece.kind is PieceKind.OUT_STAR else edge[0]
        minors.append(_constant(f, [leaf_row], list(graph.preimages(edge)), leaf))
    return minors


def decompose_component(component: RepresentationGraph) -> List[GraphPiece]:
    """Cheapest of: the component itself if nice, edge pairs, out-stars."""
    whole = nice_piece(component)
    if whole is not None:
        return [whole]
    pairs, extra = decompose_pairs(component)
    if extra is not None:
        pairs = pairs + [extra]
    stars = decompose_outstars(component)
    pair_cost, star_cost = pieces_cost(pairs), pieces_cost(stars)
    if pair_cost == star_cost:
        vertices, edges = len(component.vertices), component.number_of_edges()
        chosen = pairs if 2 * vertices >= edges + 3 else stars
    else:
        chosen = pairs if pair_cost < star_cost else stars
    logger.debug("component |V|=%d |E|=%d: pairs cost %d, out-stars cost %d",
                 len(component.vertices), component.number_of_edges(), pair_cost, star_cost)
    return chosen


def two_row_decomposition(f: FunctionTable, ell0: int, ell1: int) -> Tuple[RepresentationGraph, List[GraphPiece]]:
    graph = build_representation_graph(f, ell0, ell1)
    cycles, residual = decompose_cycles(graph)
    pieces = list(cycles)
    for component in residual.components():
        pieces.extend(decompose_component(component))
    return graph, pieces


def two_row_partition(f: FunctionTable, ell0: int, ell1: int) -> CyclicPartition:
    """Partition of {l0, l1} x R with cost at most (4|R| + |T|) / 3."""
    graph, pieces = two_row_decomposition(f, ell0, ell1)
    minors = []
    for piece in pieces:
        minors.extend(piece_to_minors(piece, graph, f))
    return CyclicPartition(minors, f.size_l, f.size_r)


def singleton_row_minors(f: FunctionTable, ell: int) -> List[CyclicMinor]:
    """One constant minor per distinct value of the row."""
    by_value: Dict[int, List[int]] = defaultdict(list)
    for r in range(f.size_r):
        by_value[f(ell, r)].append(r)
    return [_constant(f, [ell], cols, t) for t, cols in sorted(by_value.items())]


def _pair_rows(f: FunctionTable, pairing: RowPairing) -> Tuple[List[Tuple[int, int]], Optional[int]]:
    rows = list(range(f.size_l))
    if pairing is RowPairing.CONSECUTIVE:
        pairs = [(rows[i], rows[i + 1]) for i in range(0, len(rows) - 1, 2)]
        return pairs, rows[-1] if len(rows) % 2 else None
    costs = {(a, b): two_row_partition(f, a, b).cost for a in rows for b in rows if a < b}
    unpaired = set(rows)
    pairs = []
    for (a, b), _ in sorted(costs.items(), key=lambda item: (item[1], item[0])):
        if a in unpaired and b in unpaired:
            pairs.append((a, b))
            unpaired -= {a, b}
    return sorted(pairs), (unpaired.pop() if unpaired else None)


def _build_oriented(f: FunctionTable, pairing: RowPairing) -> CyclicPartition:
    pairs, single = _pair_rows(f, pairing)
    minors: List[CyclicMinor] = []
    for ell0, ell1 in pairs:
        minors.extend(two_row_partition(f, ell0, ell1).minors)
    if single is not None:
        minors.extend(singleton_row_minors(f, single))
    return CyclicPartition(minors, f.size_l, f.size_r)


def build_partition(f: FunctionTable, swap_policy: SwapPolicy = SwapPolicy.AUTO,
                    row_pairing: RowPairing = RowPairing.CONSECUTIVE) -> CyclicPartition:
    """Cyclic partition of all of L x R, optionally built on the transpose of f."""
    candidates = []
    if swap_policy in (SwapPolicy.OFF, SwapPolicy.AUTO):
        candidates.append(_build_oriented(f, row_pairing))
    if swap_policy in (SwapPolicy.ON, SwapPolicy.AUTO):
        candidates.append(_build_oriented(f.transpose(), row_pairing).transpose())
    best = min(candidates, key=partition_cost)
    logger.info("partition of %r: cost %d from %d minors (swap=%s)",
                f, best.cost, len(best), swap_policy.value)
    return best
