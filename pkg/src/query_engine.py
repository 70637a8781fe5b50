"""Single-entry f-queries as the trace of a product of four transition matrices."""

import logging
from functools import reduce
from typing import Any, Optional, Sequence, Tuple

import numpy as np

from classes.base import CapacityError, DomainError
from classes.domain import INT64_MAX, FunctionTable, TensorFunction, dtype_for_bound, resolve_vector

logger = logging.getLogger(__name__)


def pad_to_even(f: FunctionTable, g: TensorFunction, h: TensorFunction, v: Sequence[Any],
                pad_left: int = 0, pad_right: Optional[int] = None
                ) -> Tuple[TensorFunction, TensorFunction, Tuple[int, ...]]:
    """Append one coordinate fixed to (pad_left, pad_right); the query value is unchanged."""
    if g.arity != h.arity:
        raise DomainError(f"arity mismatch: g has n={g.arity}, h has n={h.arity}")
    if g.arity % 2 == 0:
        raise DomainError(f"padding is only needed for odd n, got n={g.arity}")
    pad_right = pad_left if pad_right is None else pad_right
    pad_left = f.dom_l.resolve(pad_left)
    pad_right = f.dom_r.resolve(pad_right)
    v = resolve_vector(f, v)

    def extend(t: TensorFunction, pad: int) -> TensorFunction:
        grown = np.zeros(t.tensor.shape + (len(t.domain),), dtype=t.tensor.dtype)
        grown[..., pad] = t.tensor
        return TensorFunction(t.domain, t.arity + 1, grown, t.side)

    return extend(g, pad_left), extend(h, pad_right), v + (f(pad_left, pad_right),)


def _indicator_kron(f: FunctionTable, targets: Sequence[int]) -> np.ndarray:
    """Kronecker product of [f(a, b) = t_i] over the coordinates, first coordinate most significant."""
    factors = [(f.table == t).astype(np.int64) for t in targets]
    return reduce(np.kron, factors, np.ones((1, 1), dtype=np.int64))


class TransitionMatrices:
    """W, X, Y, Z with (g *_f h)(v) = tr(W X Y Z).

    W[w][x] = g(w|x), X[x][y] = [x +_f y = v_low], Y[y][z] = h(z|y),
    Z[z][w] = [w +_f z = v_high].
    """

    def __init__(self, W: np.ndarray, X: np.ndarray, Y: np.ndarray, Z: np.ndarray, bound: int):
        self.W = W
        self.X = X
        self.Y = Y
        self.Z = Z
        self.bound = bound

    @property
    def shapes(self):
        return self.W.shape, self.X.shape, self.Y.shape, self.Z.shape

    def trace(self, block: int = 64) -> int:
        dtype = dtype_for_bound(self.bound)
        left = blocked_matmul(self.W.astype(dtype), self.X.astype(dtype), block)
        right = blocked_matmul(self.Y.astype(dtype), self.Z.astype(dtype), block)
        # tr(AB) = sum_ij A_ij B_ji
        return int(np.sum(left * right.T))


def build_transition_matrices(f: FunctionTable, g: TensorFunction, h: TensorFunction,
                              v: Sequence[Any]) -> TransitionMatrices:
    n = g.arity
    if h.arity != n or len(v) != n:
        raise DomainError(f"arity mismatch: g n={g.arity}, h n={h.arity}, |v|={len(v)}")
    if len(g.domain) != f.size_l or len(h.domain) != f.size_r:
        raise DomainError("g must live on L^n and h on R^n")
    if n % 2:
        raise DomainError(f"transition matrices need even n, got n={n}; pad first")
    v = resolve_vector(f, v)
    half = n // 2
    dim_l, dim_r = f.size_l ** half, f.size_r ** half
    W = g.tensor.reshape(dim_l, dim_l)
    X = _indicator_kron(f, v[half:])
    Y = h.tensor.reshape(dim_r, dim_r).T
    Z = _indicator_kron(f, v[:half]).T
    bound = dim_l * dim_l * dim_r * dim_r * g.max_abs * h.max_abs
    return TransitionMatrices(W, X, Y, Z, bound)


def blocked_matmul(a: np.ndarray, b: np.ndarray, block: int = 64) -> np.ndarray:
    """Classical cubic product accumulated tile by tile."""
    rows, inner = a.shape
    inner_b, cols = b.shape
    if inner != inner_b:
        raise DomainError(f"cannot multiply {a.shape} by {b.shape}")
    out = np.zeros((rows, cols), dtype=np.result_type(a.dtype, b.dtype))
    for i0 in range(0, rows, block):
        for k0 in range(0, inner, block):
            tile = a[i0:i0 + block, k0:k0 + block]
            for j0 in range(0, cols, block):
                out[i0:i0 + block, j0:j0 + block] += tile @ b[k0:k0 + block, j0:j0 + block]
    return out


def query(f: FunctionTable, g: TensorFunction, h: TensorFunction, v: Sequence[Any],
          pad_left: int = 0, pad_right: Optional[int] = None, block: int = 64,
          integer_capacity: int = INT64_MAX) -> int:
    """(g *_f h)(v), padding odd n with one extra fixed coordinate."""
    if h.arity != g.arity or len(v) != g.arity:
        raise DomainError(f"arity mismatch: g n={g.arity}, h n={h.arity}, |v|={len(v)}")
    v = resolve_vector(f, v)
    if g.arity % 2:
        g, h, v = pad_to_even(f, g, h, v, pad_left, pad_right)
    matrices = build_transition_matrices(f, g, h, v)
    if matrices.bound > integer_capacity:
        raise CapacityError(f"query bound {matrices.bound} exceeds the integer capacity {integer_capacity}")
    value = matrices.trace(block)
    logger.debug("query n=%d v=%s: matrices %s -> %d", g.arity, v, matrices.shapes, value)
    return value
