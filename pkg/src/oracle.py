"""Brute-force f-convolution, the reference every fast path is checked against."""

from typing import Any, Iterator, Sequence, Tuple

import numpy as np

from classes.base import DomainError, OracleLimitError, Side
from classes.domain import FunctionTable, TensorFunction, dtype_for_bound, output_bound, resolve_vector

PAIR_LIMIT = 10 ** 8


def _check(f: FunctionTable, g: TensorFunction, h: TensorFunction, pair_limit: int) -> int:
    if g.arity != h.arity:
        raise DomainError(f"arity mismatch: g has n={g.arity}, h has n={h.arity}")
    if len(g.domain) != f.size_l or len(h.domain) != f.size_r:
        raise DomainError("g must live on L^n and h on R^n")
    pairs = naive_pair_count(f, g.arity)
    if pairs > pair_limit:
        raise OracleLimitError(f"{pairs} vector pairs exceed the oracle limit of {pair_limit}")
    return pairs


def naive_pair_count(f: FunctionTable, n: int) -> int:
    return f.size_l ** n * f.size_r ** n


def _targets(f: FunctionTable, n: int) -> Iterator[Tuple[int, np.ndarray]]:
    """For each flat u in L^n, the flat T-index of u +_f w for every w in R^n."""
    strides = [f.size_t ** (n - 1 - i) for i in range(n)]
    for flat_u, u in enumerate(np.ndindex(*((f.size_l,) * n))):
        target = np.zeros((f.size_r,) * n, dtype=np.int64)
        for i, a in enumerate(u):
            shape = [1] * n
            shape[i] = f.size_r
            target = target + (f.table[a] * strides[i]).reshape(shape)
        yield flat_u, target.reshape(-1)


def naive_convolve(f: FunctionTable, g: TensorFunction, h: TensorFunction,
                   pair_limit: int = PAIR_LIMIT) -> TensorFunction:
    """Sum g(u) h(w) into u +_f w over all |L|^n |R|^n pairs."""
    _check(f, g, h, pair_limit)
    n = g.arity
    dtype = dtype_for_bound(output_bound(f.size_l, f.size_r, n, g.max_abs, h.max_abs))
    out = np.zeros(f.size_t ** n, dtype=dtype)
    g_flat = g.values.astype(dtype)
    h_flat = h.values.astype(dtype)
    for flat_u, target in _targets(f, n):
        if g_flat[flat_u]:
            np.add.at(out, target, g_flat[flat_u] * h_flat)
    return TensorFunction(f.dom_t, n, out, Side.T)


def naive_query(f: FunctionTable, g: TensorFunction, h: TensorFunction, v: Sequence[Any],
                pair_limit: int = PAIR_LIMIT) -> int:
    _check(f, g, h, pair_limit)
    n = g.arity
    if len(v) != n:
        raise DomainError(f"query vector has {len(v)} coordinates, expected {n}")
    v = resolve_vector(f, v)
    v_flat = 0
    for t in v:
        v_flat = v_flat * f.size_t + t
    h_flat = h.values.astype(object)
    total = 0
    for flat_u, target in _targets(f, n):
        value = int(g.values[flat_u])
        if value:
            total += value * int(np.sum(h_flat[target == v_flat]))
    return total
