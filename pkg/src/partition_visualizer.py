#!/usr/bin/env python3
"""
Partition Visualizer Tool
Renders the representation graph of two rows of f as DOT, one colour per piece.
"""

from typing import Dict, List

from classes.base import DomainError, PieceKind
from classes.domain import FunctionTable
from classes.partition_builder import two_row_decomposition

KIND_COLORS: Dict[PieceKind, str] = {
    PieceKind.CYCLE: "red",
    PieceKind.PATH: "blue",
    PieceKind.IN_STAR: "darkgreen",
    PieceKind.OUT_STAR: "orange",
    PieceKind.SINGLE_EDGE: "gray40",
}


def _quote(text: str) -> str:
    return '"' + text.replace("\\", "\\\\").replace('"', '\\"') + '"'


class PartitionVisualizer:
    def __init__(self, f: FunctionTable, ell0: int, ell1: int):
        if f.size_l < 2:
            raise DomainError("a representation graph needs two rows")
        self.f = f
        self.graph, self.pieces = two_row_decomposition(f, ell0, ell1)

    @property
    def cost(self) -> int:
        return sum(piece.cost for piece in self.pieces)

    def describe_pieces(self) -> List[str]:
        """One line per piece: kind, vertices and cost."""
        t = self.f.dom_t.label
        lines = []
        for piece in self.pieces:
            if piece.kind in (PieceKind.IN_STAR, PieceKind.OUT_STAR):
                shape = f"center {t(piece.center)}, leaves {', '.join(t(v) for v in piece.vertices[1:])}"
            else:
                shape = " -> ".join(t(v) for v in piece.vertices)
                if piece.kind is PieceKind.CYCLE:
                    shape += f" -> {t(piece.vertices[0])}"
            lines.append(f"{piece.kind.value:<11} {shape} (cost {piece.cost})")
        return lines

    def to_dot(self) -> str:
        f = self.f
        ell0, ell1 = self.graph.rows
        title = f"rows {f.dom_l.label(ell0)}, {f.dom_l.label(ell1)}: cost {self.cost}"
        lines = ["digraph representation {", f"  label={_quote(title)};", "  node [shape=circle];"]
        for v in self.graph.vertices:
            lines.append(f"  t{v} [label={_quote(f.dom_t.label(v))}];")
        for index, piece in enumerate(self.pieces):
            color = KIND_COLORS[piece.kind]
            for u, v in piece.edges:
                cols = ",".join(f.dom_r.label(r) for r in self.graph.preimages((u, v)))
                lines.append(f"  t{u} -> t{v} [color={color}, label={_quote(cols)}, "
                             f"tooltip={_quote(f'{piece.kind.value} #{index}')}];")
        lines.append("}")
        return "\n".join(lines) + "\n"
