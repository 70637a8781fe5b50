"""Cyclic minors, cyclic partitions, validation and cost bounds."""

from typing import Any, Dict, Iterator, List, Mapping, Optional, Sequence, Tuple

import numpy as np

from .base import DomainError, InputFormatError, PartitionError, SwapPolicy
from .domain import FunctionTable


class CyclicMinor:
    """A rectangle rows x cols on which f(a, b) = sigma_c[(sigma_a[a] + sigma_b[b]) mod k]."""

    def __init__(self, rows: Sequence[int], cols: Sequence[int], k: int,
                 sigma_a: Mapping[int, int], sigma_b: Mapping[int, int], sigma_c: Sequence[int]):
        self.rows = tuple(sorted(int(a) for a in rows))
        self.cols = tuple(sorted(int(b) for b in cols))
        self.k = int(k)
        if not self.rows or not self.cols:
            raise DomainError("a cyclic minor needs non-empty rows and columns")
        if self.k < 1:
            raise DomainError(f"k must be positive, got {k}")
        if set(sigma_a) != set(self.rows) or set(sigma_b) != set(self.cols):
            raise DomainError("relabelings must be defined exactly on the minor's rows and columns")
        if len(sigma_c) != self.k:
            raise DomainError(f"sigma_c must have {self.k} entries, got {len(sigma_c)}")
        if any(not 0 <= q < self.k for q in list(sigma_a.values()) + list(sigma_b.values())):
            raise DomainError(f"relabelings must map into Z_{self.k}")
        self.sigma_a = {int(a): int(q) for a, q in sigma_a.items()}
        self.sigma_b = {int(b): int(q) for b, q in sigma_b.items()}
        self.sigma_c = tuple(int(t) for t in sigma_c)

    @classmethod
    def checked(cls, f: FunctionTable, rows, cols, k, sigma_a, sigma_b, sigma_c) -> "CyclicMinor":
        """Build a minor and verify the k-cyclic identity on its full rectangle."""
        minor = cls(rows, cols, k, sigma_a, sigma_b, sigma_c)
        problems = minor.violations(f)
        if problems:
            raise PartitionError(f"constructed minor is not {minor.k}-cyclic: {problems[0]}")
        return minor

    @classmethod
    def constant(cls, rows: Sequence[int], cols: Sequence[int], value: int) -> "CyclicMinor":
        """A 1-cyclic minor: f is constant on the rectangle."""
        return cls(rows, cols, 1, {a: 0 for a in rows}, {b: 0 for b in cols}, [value])

    def value(self, a: int, b: int) -> int:
        return self.sigma_c[(self.sigma_a[a] + self.sigma_b[b]) % self.k]

    def cells(self) -> Iterator[Tuple[int, int]]:
        for a in self.rows:
            for b in self.cols:
                yield a, b

    def violations(self, f: FunctionTable) -> List[str]:
        problems = []
        for t in self.sigma_c:
            if not 0 <= t < f.size_t:
                problems.append(f"sigma_c value {t} outside T")
                return problems
        for a, b in self.cells():
            if not (0 <= a < f.size_l and 0 <= b < f.size_r):
                problems.append(f"cell ({a},{b}) outside L x R")
                continue
            if f(a, b) != self.value(a, b):
                problems.append(
                    f"k-cyclic identity fails at ({f.dom_l.label(a)},{f.dom_r.label(b)}): "
                    f"f = {f.dom_t.label(f(a, b))}, minor gives {f.dom_t.label(self.value(a, b))}")
        return problems

    def transpose(self) -> "CyclicMinor":
        return CyclicMinor(self.cols, self.rows, self.k, self.sigma_b, self.sigma_a, self.sigma_c)

    def relabel_arrays(self, on_rows: bool, size: int) -> np.ndarray:
        """0/1 matrix of shape (k, size) sending each covered element to its class in Z_k."""
        sigma = self.sigma_a if on_rows else self.sigma_b
        matrix = np.zeros((self.k, size), dtype=np.int64)
        for element, q in sigma.items():
            matrix[q, element] = 1
        return matrix

    def __eq__(self, other) -> bool:
        return (isinstance(other, CyclicMinor) and self.rows == other.rows and self.cols == other.cols
                and self.k == other.k and self.sigma_a == other.sigma_a
                and self.sigma_b == other.sigma_b and self.sigma_c == other.sigma_c)

    def __repr__(self) -> str:
        return f"CyclicMinor(rows={list(self.rows)}, cols={list(self.cols)}, k={self.k})"

    def to_dict(self, f: FunctionTable) -> Dict[str, Any]:
        return {
            "A": [f.dom_l.label(a) for a in self.rows],
            "B": [f.dom_r.label(b) for b in self.cols],
            "k": self.k,
            "sigmaA": {f.dom_l.label(a): q for a, q in self.sigma_a.items()},
            "sigmaB": {f.dom_r.label(b): q for b, q in self.sigma_b.items()},
            "sigmaC": [f.dom_t.label(t) for t in self.sigma_c],
        }

    @classmethod
    def from_dict(cls, data: Any, f: FunctionTable, where: str = "minor") -> "CyclicMinor":
        if not isinstance(data, dict):
            raise InputFormatError(f"field '{where}' must be an object")
        for key in ("A", "B", "k", "sigmaA", "sigmaB", "sigmaC"):
            if key not in data:
                raise InputFormatError(f"field '{where}.{key}' is missing")
        try:
            rows = [f.dom_l.index(a) for a in data["A"]]
            cols = [f.dom_r.index(b) for b in data["B"]]
            sigma_a = {f.dom_l.index(a): q for a, q in data["sigmaA"].items()}
            sigma_b = {f.dom_r.index(b): q for b, q in data["sigmaB"].items()}
            sigma_c = [f.dom_t.index(t) for t in data["sigmaC"]]
            return cls(rows, cols, data["k"], sigma_a, sigma_b, sigma_c)
        except (DomainError, AttributeError, TypeError) as e:
            raise InputFormatError(f"field '{where}': {e}") from None


class CyclicPartition:
    """An ordered list of cyclic minors over an |L| x |R| grid."""

    def __init__(self, minors: Sequence[CyclicMinor], size_l: int, size_r: int):
        self.minors = list(minors)
        self.size_l = size_l
        self.size_r = size_r

    @property
    def cost(self) -> int:
        return partition_cost(self)

    @property
    def ks(self) -> List[int]:
        return [minor.k for minor in self.minors]

    def __len__(self) -> int:
        return len(self.minors)

    def __iter__(self) -> Iterator[CyclicMinor]:
        return iter(self.minors)

    def __getitem__(self, i: int) -> CyclicMinor:
        return self.minors[i]

    def transpose(self) -> "CyclicPartition":
        return CyclicPartition([m.transpose() for m in self.minors], self.size_r, self.size_l)

    def owners(self) -> np.ndarray:
        """|L| x |R| grid of covering minor indices (-1 where uncovered)."""
        grid = np.full((self.size_l, self.size_r), -1, dtype=np.int64)
        for i, minor in enumerate(self.minors):
            grid[np.ix_(minor.rows, minor.cols)] = i
        return grid

    def to_dict(self, f: FunctionTable) -> Dict[str, Any]:
        return {"minors": [m.to_dict(f) for m in self.minors], "cost": self.cost}

    @classmethod
    def from_dict(cls, data: Any, f: FunctionTable) -> "CyclicPartition":
        if not isinstance(data, dict) or not isinstance(data.get("minors"), list):
            raise InputFormatError("partition needs a 'minors' list")
        minors = [CyclicMinor.from_dict(m, f, f"minors[{i}]") for i, m in enumerate(data["minors"])]
        partition = cls(minors, f.size_l, f.size_r)
        if "cost" in data and data["cost"] != partition.cost:
            raise InputFormatError(f"field 'cost' says {data['cost']} but the minors sum to {partition.cost}")
        return partition


def partition_cost(partition: CyclicPartition) -> int:
    return sum(minor.k for minor in partition.minors)


def validate_partition(f: FunctionTable, partition: CyclicPartition,
                       rows: Optional[Sequence[int]] = None) -> List[str]:
    """Check exact cover and the k-cyclic identity; returns every violation found.

    With ``rows`` given, only the cover of those rows is checked.
    """
    problems: List[str] = []
    counts = np.zeros((f.size_l, f.size_r), dtype=np.int64)
    for i, minor in enumerate(partition.minors):
        for problem in minor.violations(f):
            problems.append(f"minor {i}: {problem}")
        for a, b in minor.cells():
            if 0 <= a < f.size_l and 0 <= b < f.size_r:
                counts[a, b] += 1
    checked_rows = range(f.size_l) if rows is None else rows
    for a in checked_rows:
        for b in range(f.size_r):
            if counts[a, b] > 1:
                problems.append(f"duplicate cover at ({f.dom_l.label(a)},{f.dom_r.label(b)})")
            elif counts[a, b] == 0:
                problems.append(f"uncovered cell at ({f.dom_l.label(a)},{f.dom_r.label(b)})")
    if rows is not None:
        outside = set(range(f.size_l)) - set(rows)
        for a in sorted(outside):
            if counts[a].any():
                problems.append(f"row {f.dom_l.label(a)} covered outside the checked rows")
    return problems


def partition_cost_bound(size_l: int, size_r: int, size_t: int) -> int:
    """Floored existence bound for the pair-of-rows construction.

    Even |L|: |L|/2 * (4|R|+|T|)/3. Odd |L|: |R| + (|L|-1)/2 * (4|R|+|T|)/3.
    """
    if size_l % 2 == 0:
        return size_l * (4 * size_r + size_t) // 6
    return size_r + (size_l - 1) * (4 * size_r + size_t) // 6


def policy_cost_bound(policy: SwapPolicy, size_l: int, size_r: int, size_t: int) -> int:
    straight = partition_cost_bound(size_l, size_r, size_t)
    swapped = partition_cost_bound(size_r, size_l, size_t)
    if policy is SwapPolicy.OFF:
        return straight
    if policy is SwapPolicy.ON:
        return swapped
    return min(straight, swapped)
