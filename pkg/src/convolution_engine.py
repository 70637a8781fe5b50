"""The f-convolution engine: projections, per-type cyclic convolutions, scatter."""

import logging
from collections import Counter, defaultdict
from concurrent.futures import ThreadPoolExecutor
from itertools import product
from math import prod
from typing import Dict, Iterator, List, Optional, Tuple

import numpy as np

from classes.base import CapacityError, DomainError, Side
from classes.domain import INT64_MAX, FunctionTable, TensorFunction, dtype_for_bound, output_bound
from classes.partition import CyclicPartition, validate_partition
from cyclic_convolution import DIRECT_DFT_MAX, PrimePlan, cyclic_convolve

logger = logging.getLogger(__name__)

TypeVector = Tuple[int, ...]


class ProjectionTable:
    """Projections g_p of one tensor, keyed by type vector (0-based minor indices)."""

    def __init__(self, side: Side, ks: List[int], projections: Dict[TypeVector, np.ndarray],
                 layer_state_counts: List[int]):
        self.side = side
        self.ks = ks
        self.projections = projections
        self.layer_state_counts = layer_state_counts
        self.arity = len(layer_state_counts) - 1

    def __getitem__(self, type_vector: TypeVector) -> np.ndarray:
        return self.projections[tuple(type_vector)]

    def __iter__(self) -> Iterator[TypeVector]:
        return iter(self.projections)

    def __len__(self) -> int:
        return len(self.projections)

    def types(self) -> List[TypeVector]:
        return list(enumerate_types(len(self.ks), self.arity))

    def radices(self, type_vector: TypeVector) -> Tuple[int, ...]:
        return tuple(self.ks[i] for i in type_vector)


class ConvolutionEngine:
    """Runs the cyclic-partition algorithm for f-convolution.

    Types are enumerated lexicographically over [m]^n. Types that share a
    radix vector are convolved together as one batch.
    """

    def __init__(self, jobs: int = 1, zero_skip: bool = True, min_prime: int = 0,
                 direct_dft_max: int = DIRECT_DFT_MAX, integer_capacity: int = INT64_MAX):
        self.jobs = max(1, int(jobs))
        self.zero_skip = zero_skip
        self.min_prime = min_prime
        self.direct_dft_max = direct_dft_max
        self.integer_capacity = integer_capacity
        self.plans: Dict[Tuple[int, ...], PrimePlan] = {}
        self.last_run: Dict[str, int] = {}

    @classmethod
    def from_config(cls, config: dict, jobs: Optional[int] = None) -> "ConvolutionEngine":
        return cls(
            jobs=jobs if jobs is not None else config.get("jobs", 1),
            zero_skip=config.get("zero_skip", True),
            min_prime=config.get("min_prime", 0),
            direct_dft_max=config.get("direct_dft_max", DIRECT_DFT_MAX),
            integer_capacity=config.get("integer_capacity", INT64_MAX),
        )

    def project_layers(self, g: TensorFunction, partition: CyclicPartition, side: Side) -> Iterator[Dict[TypeVector, np.ndarray]]:
        """Yield DP layer 0..n; layer l maps type prefixes to tensors over Z-prefix x S^(n-l)."""
        size = partition.size_l if side is Side.L else partition.size_r
        if len(g.domain) != size:
            raise DomainError(f"tensor over a domain of size {len(g.domain)} cannot be projected on side {side.value} of size {size}")
        on_rows = side is Side.L
        relabel = [minor.relabel_arrays(on_rows, size).astype(g.tensor.dtype) for minor in partition]
        layer: Dict[TypeVector, np.ndarray] = {(): np.asarray(g.tensor)}
        yield layer
        for ell in range(g.arity):
            nxt = {}
            for prefix, tensor in layer.items():
                for i, matrix in enumerate(relabel):
                    moved = np.tensordot(matrix, tensor, axes=([1], [ell]))
                    nxt[prefix + (i,)] = np.moveaxis(moved, 0, ell)
            layer = nxt
            yield layer

    def project_all(self, g: TensorFunction, partition: CyclicPartition, side: Side) -> ProjectionTable:
        """g_p(q) = sum of g(u) over u of type p with sigma_p(u) = q, for every type p."""
        counts = []
        layer: Dict[TypeVector, np.ndarray] = {}
        for layer in self.project_layers(g, partition, side):
            counts.append(sum(t.size for t in layer.values()))
        return ProjectionTable(side, partition.ks, layer, counts)

    def _type_bound(self, partition: CyclicPartition, type_vector: TypeVector, max_g: int, max_h: int) -> int:
        rows = prod(len(partition[i].rows) for i in type_vector)
        cols = prod(len(partition[i].cols) for i in type_vector)
        return rows * cols * max_g * max_h

    def _plan(self, radices: Tuple[int, ...], bound: int) -> PrimePlan:
        plan = self.plans.get(radices)
        if plan is None or plan.bound < bound:
            plan = PrimePlan(radices, bound, self.min_prime, self.direct_dft_max)
            self.plans[radices] = plan
        return plan

    def _check(self, f: FunctionTable, partition: CyclicPartition, g: TensorFunction, h: TensorFunction) -> int:
        if g.arity != h.arity:
            raise DomainError(f"arity mismatch: g has n={g.arity}, h has n={h.arity}")
        if len(g.domain) != f.size_l or len(h.domain) != f.size_r:
            raise DomainError("g must live on L^n and h on R^n")
        problems = validate_partition(f, partition)
        if problems:
            raise DomainError(f"invalid partition ({len(problems)} violations): {problems[0]}")
        bound = output_bound(f.size_l, f.size_r, g.arity, g.max_abs, h.max_abs)
        if bound > self.integer_capacity:
            raise CapacityError(f"output bound {bound} exceeds the integer capacity {self.integer_capacity}")
        return bound

    def _batches(self, partition: CyclicPartition, gp: ProjectionTable, hp: ProjectionTable,
                 max_g: int, max_h: int) -> List[Tuple[Tuple[int, ...], List[TypeVector]]]:
        groups: Dict[Tuple[int, ...], List[TypeVector]] = defaultdict(list)
        skipped = 0
        for type_vector in gp.types():
            if self.zero_skip and (not gp[type_vector].any() or not hp[type_vector].any()):
                skipped += 1
                continue
            groups[gp.radices(type_vector)].append(type_vector)
        self.last_run = {"types": len(gp), "skipped": skipped,
                         "work": sum(prod(r) * len(ts) for r, ts in groups.items())}
        logger.debug("%d types in %d batches, %d skipped as zero", len(gp), len(groups), skipped)
        return sorted(groups.items())

    def _convolve_batch(self, partition, gp, hp, radices, types, max_g, max_h) -> np.ndarray:
        bound = max(self._type_bound(partition, t, max_g, max_h) for t in types)
        stack_g = np.stack([gp[t] for t in types])
        stack_h = np.stack([hp[t] for t in types])
        return cyclic_convolve(stack_g, stack_h, bound, batch_axes=1, plan=self._plan(radices, bound))

    def contributions(self, f: FunctionTable, partition: CyclicPartition, g: TensorFunction,
                      h: TensorFunction) -> Iterator[Tuple[TypeVector, np.ndarray, Tuple[np.ndarray, ...]]]:
        """Yield (type, c_p, output index arrays) for every non-skipped type.

        Scatter-adding each c_p at np.ix_(*indices) of a zero |T|^n tensor
        reproduces the full convolution.
        """
        self._check(f, partition, g, h)
        return self._contributions(partition, g, h)

    def _contributions(self, partition: CyclicPartition, g: TensorFunction, h: TensorFunction):
        gp = self.project_all(g, partition, Side.L)
        hp = self.project_all(h, partition, Side.R)
        batches = self._batches(partition, gp, hp, g.max_abs, h.max_abs)
        sigma_c = [np.array(minor.sigma_c, dtype=np.int64) for minor in partition]

        def run(batch):
            radices, types = batch
            return self._convolve_batch(partition, gp, hp, radices, types, g.max_abs, h.max_abs)

        if self.jobs > 1 and len(batches) > 1:
            with ThreadPoolExecutor(max_workers=self.jobs) as pool:
                results = list(pool.map(run, batches))
        else:
            results = [run(batch) for batch in batches]
        for (radices, types), stacked in zip(batches, results):
            for j, type_vector in enumerate(types):
                yield type_vector, stacked[j], tuple(sigma_c[i] for i in type_vector)

    def convolve(self, f: FunctionTable, partition: CyclicPartition, g: TensorFunction,
                 h: TensorFunction) -> TensorFunction:
        """(g *_f h)(v) = sum over u +_f w = v of g(u) h(w), exactly."""
        bound = self._check(f, partition, g, h)
        n = g.arity
        if n == 0:
            return TensorFunction(f.dom_t, 0, np.array(int(g.tensor) * int(h.tensor), dtype=object), Side.T)
        out = np.zeros((f.size_t,) * n, dtype=dtype_for_bound(bound))
        for _, c, indices in self._contributions(partition, g, h):
            np.add.at(out, np.ix_(*indices), c.astype(out.dtype))
        logger.info("convolved n=%d with %d minors (cost %d): %d types, %d skipped",
                    n, len(partition), partition.cost, self.last_run["types"], self.last_run["skipped"])
        return TensorFunction(f.dom_t, n, out, Side.T)


def work_count(partition: CyclicPartition, n: int) -> int:
    """Sum over all types p in [m]^n of prod k_(p_i), one coordinate layer at a time."""
    partial = Counter({1: 1})
    for _ in range(n):
        nxt: Counter = Counter()
        for value, count in partial.items():
            for k in partition.ks:
                nxt[value * k] += count
        partial = nxt
    return sum(value * count for value, count in partial.items())


def enumerate_types(m: int, n: int) -> Iterator[TypeVector]:
    """Lexicographic order over [m]^n."""
    return product(range(m), repeat=n)


_default_engine = ConvolutionEngine()


def project_all(g: TensorFunction, partition: CyclicPartition, side: Side) -> ProjectionTable:
    return _default_engine.project_all(g, partition, side)


def convolve(f: FunctionTable, partition: CyclicPartition, g: TensorFunction, h: TensorFunction) -> TensorFunction:
    return _default_engine.convolve(f, partition, g, h)
