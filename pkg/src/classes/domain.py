"""Finite domains, function tables, mixed-radix indexing and integer tensors.

All layouts are row-major with coordinate 1 most significant.
"""

from math import prod
from typing import Any, Dict, Iterable, Iterator, List, Mapping, Optional, Sequence, Tuple

import numpy as np

from .base import DigitRangeError, DomainError, InputFormatError, Side

INT64_MAX = int(np.iinfo(np.int64).max)


def dtype_for_bound(bound: int):
    """int64 while every value provably fits, Python integers otherwise."""
    return np.int64 if bound <= INT64_MAX else object


def exact_array(values: Any) -> np.ndarray:
    """Convert to an exact integer array, int64 when possible."""
    raw = np.asarray(values)
    if raw.dtype.kind in "iub":
        return raw.astype(np.int64)
    if raw.dtype.kind == "O":
        flat = raw.reshape(-1)
        for value in flat:
            if not isinstance(value, (int, np.integer)) or isinstance(value, bool):
                raise DomainError(f"non-integer value {value!r}")
        if flat.size == 0 or max(abs(int(v)) for v in flat) <= INT64_MAX:
            return raw.astype(np.int64)
        return raw
    raise DomainError(f"values must be exact integers, got dtype {raw.dtype}")


class FiniteDomain:
    """An ordered set of distinct string labels; element i has index i."""

    def __init__(self, labels: Iterable[Any]):
        labels = tuple(str(label) for label in labels)
        if not labels:
            raise DomainError("a finite domain needs at least one element")
        if any(label == "" for label in labels):
            raise DomainError("domain labels must be non-empty")
        if len(set(labels)) != len(labels):
            raise DomainError(f"domain labels must be distinct: {list(labels)}")
        self.labels = labels
        self._index = {label: i for i, label in enumerate(labels)}

    @classmethod
    def of_size(cls, size: int) -> "FiniteDomain":
        return cls(str(i) for i in range(size))

    def index(self, label: Any) -> int:
        try:
            return self._index[str(label)]
        except KeyError:
            raise DomainError(f"unknown label {label!r}; domain is {list(self.labels)}") from None

    def resolve(self, element: Any) -> int:
        """Accept a label or an index and return the index."""
        if isinstance(element, (int, np.integer)) and not isinstance(element, bool):
            if not 0 <= element < len(self):
                raise DomainError(f"index {element} outside domain of size {len(self)}")
            return int(element)
        return self.index(element)

    def label(self, index: int) -> str:
        return self.labels[index]

    def __len__(self) -> int:
        return len(self.labels)

    def __iter__(self) -> Iterator[str]:
        return iter(self.labels)

    def __eq__(self, other) -> bool:
        return isinstance(other, FiniteDomain) and self.labels == other.labels

    def __hash__(self) -> int:
        return hash(self.labels)

    def __repr__(self) -> str:
        return f"FiniteDomain({list(self.labels)})"


class FunctionTable:
    """f : L x R -> T stored as an |L| x |R| grid of T-indices."""

    def __init__(self, dom_l: FiniteDomain, dom_r: FiniteDomain, dom_t: FiniteDomain, table: Any):
        grid = np.asarray(table)
        if grid.shape != (len(dom_l), len(dom_r)):
            raise DomainError(f"table shape {grid.shape} does not match |L| x |R| = {len(dom_l)} x {len(dom_r)}")
        if grid.dtype.kind not in "iu":
            raise DomainError(f"table entries must be T-indices, got dtype {grid.dtype}")
        grid = grid.astype(np.int64)
        if grid.size and (grid.min() < 0 or grid.max() >= len(dom_t)):
            raise DomainError(f"table entries must lie in [0, {len(dom_t)})")
        grid.setflags(write=False)
        self.dom_l = dom_l
        self.dom_r = dom_r
        self.dom_t = dom_t
        self.table = grid

    @property
    def size_l(self) -> int:
        return len(self.dom_l)

    @property
    def size_r(self) -> int:
        return len(self.dom_r)

    @property
    def size_t(self) -> int:
        return len(self.dom_t)

    def __call__(self, a: int, b: int) -> int:
        return int(self.table[a, b])

    def transpose(self) -> "FunctionTable":
        """f'(r, l) = f(l, r)."""
        return FunctionTable(self.dom_r, self.dom_l, self.dom_t, self.table.T.copy())

    @classmethod
    def from_callable(cls, size_l: int, size_r: int, size_t: int, func) -> "FunctionTable":
        grid = [[func(a, b) for b in range(size_r)] for a in range(size_l)]
        return cls(FiniteDomain.of_size(size_l), FiniteDomain.of_size(size_r),
                   FiniteDomain.of_size(size_t), grid)

    def __eq__(self, other) -> bool:
        return (isinstance(other, FunctionTable) and self.dom_l == other.dom_l
                and self.dom_r == other.dom_r and self.dom_t == other.dom_t
                and np.array_equal(self.table, other.table))

    def __repr__(self) -> str:
        return f"FunctionTable(|L|={self.size_l}, |R|={self.size_r}, |T|={self.size_t})"

    def to_dict(self) -> Dict[str, Any]:
        """Convert to the labelled JSON layout."""
        return {
            "L": list(self.dom_l.labels),
            "R": list(self.dom_r.labels),
            "T": list(self.dom_t.labels),
            "table": [[self.dom_t.label(int(t)) for t in row] for row in self.table],
        }

    @classmethod
    def from_dict(cls, data: Any) -> "FunctionTable":
        """Create from the labelled JSON layout."""
        if not isinstance(data, dict):
            raise InputFormatError("function table must be a JSON object")
        domains = {}
        for key in ("L", "R", "T"):
            if key not in data:
                raise InputFormatError(f"missing field '{key}'")
            if not isinstance(data[key], list):
                raise InputFormatError(f"field '{key}' must be a list of labels")
            try:
                domains[key] = FiniteDomain(data[key])
            except DomainError as e:
                raise InputFormatError(f"field '{key}': {e}") from None
        rows = data.get("table")
        if not isinstance(rows, list) or len(rows) != len(domains["L"]):
            raise InputFormatError(f"field 'table' must have {len(domains['L'])} rows")
        grid = []
        for i, row in enumerate(rows):
            if not isinstance(row, list) or len(row) != len(domains["R"]):
                raise InputFormatError(f"field 'table[{i}]' must have {len(domains['R'])} entries")
            grid_row = []
            for j, label in enumerate(row):
                try:
                    grid_row.append(domains["T"].index(label))
                except DomainError as e:
                    raise InputFormatError(f"field 'table[{i}][{j}]': {e}") from None
            grid.append(grid_row)
        return cls(domains["L"], domains["R"], domains["T"], np.array(grid, dtype=np.int64).reshape(len(rows), -1))


def cyclic_addition(size: int) -> FunctionTable:
    return FunctionTable.from_callable(size, size, size, lambda a, b: (a + b) % size)


def bitwise_table(size: int, operator: str) -> FunctionTable:
    """Bitwise xor/and/or on {0..size-1}; size must be a power of two."""
    if size < 1 or size & (size - 1):
        raise DomainError(f"bitwise functions need a power-of-two domain, got {size}")
    ops = {"xor": lambda a, b: a ^ b, "and": lambda a, b: a & b, "or": lambda a, b: a | b}
    if operator not in ops:
        raise DomainError(f"unknown bitwise operator {operator!r}")
    return FunctionTable.from_callable(size, size, size, ops[operator])


def random_function(rng: np.random.Generator, size_l: int, size_r: Optional[int] = None,
                    size_t: Optional[int] = None) -> FunctionTable:
    size_r = size_l if size_r is None else size_r
    size_t = size_l if size_t is None else size_t
    grid = rng.integers(0, size_t, size=(size_l, size_r))
    return FunctionTable(FiniteDomain.of_size(size_l), FiniteDomain.of_size(size_r),
                         FiniteDomain.of_size(size_t), grid)


def _check_radices(radices: Sequence[int]) -> Tuple[int, ...]:
    radices = tuple(int(r) for r in radices)
    if any(r < 1 for r in radices):
        raise DomainError(f"radices must be positive: {radices}")
    return radices


def flatten(digits: Sequence[int], radices: Sequence[int]) -> int:
    """Horner evaluation of a digit vector, first digit most significant."""
    radices = _check_radices(radices)
    if len(digits) != len(radices):
        raise DomainError(f"{len(digits)} digits for {len(radices)} radices")
    flat = 0
    for position, (digit, radix) in enumerate(zip(digits, radices)):
        if not 0 <= digit < radix:
            raise DigitRangeError(f"digit {digit} at position {position} outside [0, {radix})")
        flat = flat * radix + int(digit)
    return flat


def unflatten(flat: int, radices: Sequence[int]) -> Tuple[int, ...]:
    radices = _check_radices(radices)
    if not 0 <= flat < prod(radices):
        raise DigitRangeError(f"flat index {flat} outside [0, {prod(radices)})")
    digits: List[int] = []
    for radix in reversed(radices):
        flat, digit = divmod(flat, radix)
        digits.append(digit)
    return tuple(reversed(digits))


class MixedRadixIndex:
    """A flat index paired with its radices."""

    def __init__(self, radices: Sequence[int], flat: int = 0):
        self.radices = _check_radices(radices)
        if not 0 <= flat < prod(self.radices):
            raise DigitRangeError(f"flat index {flat} outside [0, {prod(self.radices)})")
        self.flat = int(flat)

    @classmethod
    def from_digits(cls, digits: Sequence[int], radices: Sequence[int]) -> "MixedRadixIndex":
        return cls(radices, flatten(digits, radices))

    @property
    def digits(self) -> Tuple[int, ...]:
        return unflatten(self.flat, self.radices)

    def __int__(self) -> int:
        return self.flat

    def __eq__(self, other) -> bool:
        return isinstance(other, MixedRadixIndex) and (self.radices, self.flat) == (other.radices, other.flat)

    def __repr__(self) -> str:
        return f"MixedRadixIndex({self.radices}, {self.flat})"


def apply_f_coordinatewise(f: FunctionTable, u: Sequence[int], w: Sequence[int]) -> Tuple[int, ...]:
    if len(u) != len(w):
        raise DomainError(f"vector lengths differ: {len(u)} vs {len(w)}")
    for a in u:
        f.dom_l.resolve(a)
    for b in w:
        f.dom_r.resolve(b)
    return tuple(int(f.table[a, b]) for a, b in zip(u, w))


def resolve_vector(f: FunctionTable, v: Sequence[Any]) -> Tuple[int, ...]:
    """T-labels (or T-indices) to a tuple of T-indices."""
    return tuple(f.dom_t.resolve(t) for t in v)


def output_bound(size_l: int, size_r: int, arity: int, max_g: int, max_h: int) -> int:
    """Worst-case |output| of an f-convolution: |L|^n |R|^n Mg Mh."""
    return size_l ** arity * size_r ** arity * max_g * max_h


class TensorFunction:
    """A function domain^n -> Z held as a dense n-dimensional integer array."""

    def __init__(self, domain: FiniteDomain, arity: int, values: Any, side: Optional[Side] = None):
        if arity < 0:
            raise DomainError(f"arity must be non-negative, got {arity}")
        array = exact_array(values)
        shape = (len(domain),) * arity
        if array.size != prod(shape):
            raise DomainError(f"expected {prod(shape)} values for |D|={len(domain)}, n={arity}, got {array.size}")
        array = array.reshape(shape)
        array.setflags(write=False)
        self.domain = domain
        self.arity = arity
        self.side = side
        self.tensor = array
        self.max_abs = int(np.max(np.abs(array))) if array.size else 0

    @classmethod
    def zeros(cls, domain: FiniteDomain, arity: int, side: Optional[Side] = None) -> "TensorFunction":
        return cls(domain, arity, np.zeros((len(domain),) * arity, dtype=np.int64), side)

    @classmethod
    def random(cls, rng: np.random.Generator, domain: FiniteDomain, arity: int, bound: int,
               side: Optional[Side] = None) -> "TensorFunction":
        values = rng.integers(-bound, bound + 1, size=(len(domain),) * arity)
        return cls(domain, arity, values, side)

    @property
    def values(self) -> np.ndarray:
        """Flat row-major view."""
        return self.tensor.reshape(-1)

    def __len__(self) -> int:
        return self.tensor.size

    def __getitem__(self, index: Sequence[int]) -> int:
        return int(self.tensor[tuple(index)])

    def value_at(self, labels: Sequence[Any]) -> int:
        if len(labels) != self.arity:
            raise DomainError(f"expected {self.arity} coordinates, got {len(labels)}")
        return self[tuple(self.domain.resolve(label) for label in labels)]

    def is_zero(self) -> bool:
        return self.max_abs == 0

    def __eq__(self, other) -> bool:
        return (isinstance(other, TensorFunction) and self.domain == other.domain
                and self.arity == other.arity and np.array_equal(self.tensor, other.tensor))

    def __repr__(self) -> str:
        return f"TensorFunction(|D|={len(self.domain)}, n={self.arity}, M={self.max_abs})"

    def to_dict(self, side: Optional[Side] = None) -> Dict[str, Any]:
        """Convert to the dense JSON layout."""
        side = side or self.side or Side.T
        return {"domain": side.value, "n": self.arity, "values": [int(v) for v in self.values]}

    @classmethod
    def from_dict(cls, data: Any, domains: Mapping[str, FiniteDomain]) -> "TensorFunction":
        """Create from the dense or sparse JSON layout; sparse input is densified."""
        if not isinstance(data, dict):
            raise InputFormatError("tensor must be a JSON object")
        key = data.get("domain")
        if key not in domains:
            raise InputFormatError(f"field 'domain' must be one of {sorted(domains)}, got {key!r}")
        arity = data.get("n")
        if not isinstance(arity, int) or isinstance(arity, bool) or arity < 0:
            raise InputFormatError("field 'n' must be a non-negative integer")
        domain = domains[key]
        size = len(domain) ** arity
        if "values" in data:
            values = data["values"]
            if not isinstance(values, list) or len(values) != size:
                raise InputFormatError(f"field 'values' must hold {size} integers")
            for i, value in enumerate(values):
                if not isinstance(value, int) or isinstance(value, bool):
                    raise InputFormatError(f"field 'values[{i}]' is not an integer")
            dense = values
        elif "entries" in data:
            entries = data["entries"]
            if not isinstance(entries, list):
                raise InputFormatError("field 'entries' must be a list")
            dense = [0] * size
            for i, entry in enumerate(entries):
                if not isinstance(entry, dict) or "v" not in entry or "val" not in entry:
                    raise InputFormatError(f"field 'entries[{i}]' needs 'v' and 'val'")
                if not isinstance(entry["v"], list) or len(entry["v"]) != arity:
                    raise InputFormatError(f"field 'entries[{i}].v' must list {arity} labels")
                if not isinstance(entry["val"], int) or isinstance(entry["val"], bool):
                    raise InputFormatError(f"field 'entries[{i}].val' is not an integer")
                try:
                    digits = [domain.index(label) for label in entry["v"]]
                except DomainError as e:
                    raise InputFormatError(f"field 'entries[{i}].v': {e}") from None
                dense[flatten(digits, (len(domain),) * arity)] += entry["val"]
        else:
            raise InputFormatError("tensor needs a 'values' or an 'entries' field")
        array = np.array(dense, dtype=object)
        return cls(domain, arity, array, Side(key))
