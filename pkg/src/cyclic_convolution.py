"""Exact multidimensional cyclic convolution via number-theoretic transforms and CRT.

Each axis of length r is transformed modulo primes p = 1 (mod lcm of the
transform orders). Short axes use a direct DFT matrix, long ones Bluestein's
chirp reduction to a power-of-two NTT.
"""

import logging
from functools import lru_cache
from math import gcd, lcm, prod
from typing import Dict, List, Mapping, Optional, Sequence, Tuple

import numpy as np
from sympy import factorint, isprime, mod_inverse

from classes.base import DomainError, TransformError
from classes.domain import INT64_MAX, exact_array

logger = logging.getLogger(__name__)

DIRECT_DFT_MAX = 64
# Primes below this keep every product and every direct-DFT row sum inside int64.
SAFE_PRIME_LIMIT = 2 ** 26


def _next_power_of_two(x: int) -> int:
    return 1 << max(0, (x - 1).bit_length())


def transform_orders(radices: Sequence[int], direct_max: int = DIRECT_DFT_MAX) -> Tuple[int, ...]:
    """Every root order a transform over these radices needs."""
    orders = set()
    for r in radices:
        if r > 1:
            orders.add(r)
            if r > direct_max:
                orders.add(_next_power_of_two(2 * r - 1))
    return tuple(sorted(orders))


@lru_cache(maxsize=None)
def find_primes(root_modulus: int, bound: int, minimum: int = 0) -> Tuple[int, ...]:
    """Ascending primes p = 1 (mod root_modulus), p >= minimum, with product > 2 * bound."""
    if bound < 0:
        raise DomainError(f"bound must be non-negative, got {bound}")
    if root_modulus < 1:
        raise DomainError(f"root modulus must be positive, got {root_modulus}")
    t = max(1, -(-(max(minimum, 2) - 1) // root_modulus))
    primes: List[int] = []
    product = 1
    while not primes or product <= 2 * bound:
        candidate = 1 + t * root_modulus
        if isprime(candidate):
            primes.append(candidate)
            product *= candidate
        t += 1
    return tuple(primes)


@lru_cache(maxsize=None)
def find_root(p: int, r: int) -> int:
    """Smallest-base element of exact multiplicative order r modulo the prime p."""
    if r < 1 or (p - 1) % r:
        raise DomainError(f"no root of order {r} modulo {p}: {r} does not divide {p - 1}")
    if r == 1:
        return 1
    factors = factorint(r)
    for base in range(2, p):
        omega = pow(base, (p - 1) // r, p)
        if all(pow(omega, r // q, p) != 1 for q in factors):
            return omega
    raise DomainError(f"{p} has no element of order {r}")


def _work_dtype(p: int):
    return np.int64 if p < SAFE_PRIME_LIMIT else object


@lru_cache(maxsize=256)
def _dft_matrix(p: int, r: int, omega: int) -> np.ndarray:
    powers = [pow(omega, e, p) for e in range(r)]
    matrix = np.array([[powers[(i * j) % r] for j in range(r)] for i in range(r)], dtype=_work_dtype(p))
    matrix.setflags(write=False)
    return matrix


@lru_cache(maxsize=64)
def _bit_reversal(length: int) -> np.ndarray:
    bits = length.bit_length() - 1
    return np.array([int(format(i, f"0{bits}b")[::-1], 2) if bits else 0 for i in range(length)])


def _ntt_pow2(a: np.ndarray, p: int, root: int) -> np.ndarray:
    """Iterative radix-2 NTT along the last axis; root has order a.shape[-1]."""
    length = a.shape[-1]
    lead = a.shape[:-1]
    a = a[..., _bit_reversal(length)]
    half = 1
    while half < length:
        step = pow(root, length // (2 * half), p)
        twiddles = np.array([pow(step, j, p) for j in range(half)], dtype=_work_dtype(p))
        blocks = a.reshape(*lead, length // (2 * half), 2, half)
        even = blocks[..., 0, :]
        odd = blocks[..., 1, :] * twiddles % p
        a = np.stack(((even + odd) % p, (even - odd) % p), axis=-2).reshape(*lead, length)
        half *= 2
    return a


def _chirp(p: int, omega: int, count: int, sign: int) -> np.ndarray:
    # exponent C(j, 2) = j (j - 1) / 2, so that jk = C(j+k, 2) - C(j, 2) - C(k, 2)
    base = omega if sign > 0 else mod_inverse(omega, p)
    return np.array([pow(base, j * (j - 1) // 2, p) for j in range(count)], dtype=_work_dtype(p))


def _bluestein(x: np.ndarray, p: int, r: int, omega: int, roots: Mapping[int, int]) -> np.ndarray:
    """DFT of length r along the last axis via a power-of-two cyclic convolution."""
    length = _next_power_of_two(2 * r - 1)
    if length not in roots:
        raise TransformError(f"missing root of order {length} modulo {p}")
    root = roots[length]
    inverse_root = mod_inverse(root, p)
    a = x * _chirp(p, omega, r, -1) % p
    padded = np.zeros(x.shape[:-1] + (length,), dtype=x.dtype)
    padded[..., :r] = a[..., ::-1]
    b = np.zeros(length, dtype=x.dtype)
    b[:2 * r - 1] = _chirp(p, omega, 2 * r - 1, +1)
    spectrum = _ntt_pow2(padded, p, root) * _ntt_pow2(b, p, root) % p
    conv = _ntt_pow2(spectrum, p, inverse_root) * mod_inverse(length, p) % p
    return conv[..., r - 1:2 * r - 1] * _chirp(p, omega, r, -1) % p


def _transform_axis(x: np.ndarray, axis: int, p: int, omega: int, roots: Mapping[int, int],
                    direct_max: int) -> np.ndarray:
    r = x.shape[axis]
    if r == 1:
        return x
    if r <= direct_max:
        out = np.tensordot(x, _dft_matrix(p, r, omega), axes=([axis], [0])) % p
        return np.moveaxis(out, -1, axis)
    moved = np.moveaxis(x, axis, -1)
    return np.moveaxis(_bluestein(moved, p, r, omega, roots), -1, axis)


def _transform(x: np.ndarray, p: int, roots: Mapping[int, int], batch_axes: int,
               inverse: bool, direct_max: int) -> np.ndarray:
    for axis in range(batch_axes, x.ndim):
        r = x.shape[axis]
        if r == 1:
            continue
        if r not in roots:
            raise TransformError(f"missing root of order {r} modulo {p}")
        omega = mod_inverse(roots[r], p) if inverse else roots[r]
        x = _transform_axis(x, axis, p, omega, roots, direct_max)
    return x


def forward_transform(x: np.ndarray, p: int, roots: Mapping[int, int], batch_axes: int = 0,
                      direct_max: int = DIRECT_DFT_MAX) -> np.ndarray:
    return _transform(np.asarray(x, dtype=_work_dtype(p)) % p, p, roots, batch_axes, False, direct_max)


def inverse_transform(x: np.ndarray, p: int, roots: Mapping[int, int], batch_axes: int = 0,
                      direct_max: int = DIRECT_DFT_MAX) -> np.ndarray:
    size = prod(x.shape[batch_axes:])
    out = _transform(np.asarray(x, dtype=_work_dtype(p)) % p, p, roots, batch_axes, True, direct_max)
    return out * mod_inverse(size % p, p) % p


def cyclic_convolve_mod_p(g: np.ndarray, h: np.ndarray, p: int, roots: Mapping[int, int],
                          batch_axes: int = 0, direct_max: int = DIRECT_DFT_MAX) -> np.ndarray:
    """Cyclic convolution modulo p over the trailing axes; leading batch axes are independent."""
    g = np.asarray(g)
    h = np.asarray(h)
    if g.shape != h.shape:
        raise DomainError(f"operands differ in shape: {g.shape} vs {h.shape}")
    spectrum = (forward_transform(g, p, roots, batch_axes, direct_max)
                * forward_transform(h, p, roots, batch_axes, direct_max)) % p
    return inverse_transform(spectrum, p, roots, batch_axes, direct_max)


def crt_combine(residues: Sequence[np.ndarray], primes: Sequence[int]) -> np.ndarray:
    """Centered CRT: the unique s in (-P/2, P/2] per cell, P the product of the primes."""
    if len(residues) != len(primes) or not primes:
        raise DomainError("need one residue tensor per prime")
    for i, p in enumerate(primes):
        for q in primes[i + 1:]:
            if gcd(p, q) != 1:
                raise DomainError(f"moduli {p} and {q} are not coprime")
    shapes = {np.shape(r) for r in residues}
    if len(shapes) != 1:
        raise DomainError(f"residue tensors differ in shape: {sorted(shapes)}")
    modulus = prod(primes)
    total = np.zeros(shapes.pop(), dtype=object)
    for residue, p in zip(residues, primes):
        cofactor = modulus // p
        total = (total + np.asarray(residue).astype(object) % p * (cofactor * mod_inverse(cofactor % p, p))) % modulus
    return np.where(total * 2 > modulus, total - modulus, total)


class PrimePlan:
    """Primes and per-order roots for convolutions over one radix vector."""

    def __init__(self, radices: Sequence[int], bound: int, minimum: int = 0,
                 direct_max: int = DIRECT_DFT_MAX):
        self.radices = tuple(int(r) for r in radices)
        if any(r < 1 for r in self.radices):
            raise DomainError(f"radices must be positive: {self.radices}")
        self.bound = int(bound)
        self.direct_max = direct_max
        self.orders = transform_orders(self.radices, direct_max)
        self.root_modulus = lcm(*self.orders) if self.orders else 1
        self.primes = find_primes(self.root_modulus, self.bound, minimum)
        self.roots: Dict[int, Dict[int, int]] = {
            p: {r: find_root(p, r) for r in self.orders} for p in self.primes
        }
        logger.debug("plan radices=%s bound=%d primes=%s", self.radices, self.bound, self.primes)

    @property
    def size(self) -> int:
        return prod(self.radices)

    def explain(self) -> List[str]:
        lines = [f"radices {list(self.radices)}: root modulus {self.root_modulus}, bound {self.bound}"]
        for p in self.primes:
            roots = ", ".join(f"order {r} -> {w}" for r, w in self.roots[p].items()) or "none needed"
            lines.append(f"  p = {p}: {roots}")
        return lines


def cyclic_convolve(g: np.ndarray, h: np.ndarray, bound: Optional[int] = None, batch_axes: int = 0,
                    minimum: int = 0, direct_max: int = DIRECT_DFT_MAX,
                    plan: Optional[PrimePlan] = None) -> np.ndarray:
    """Exact cyclic convolution of integer tensors; the radices are the trailing shape."""
    g = exact_array(g)
    h = exact_array(h)
    if g.shape != h.shape:
        raise DomainError(f"operands differ in shape: {g.shape} vs {h.shape}")
    radices = g.shape[batch_axes:]
    if bound is None:
        max_g = int(np.max(np.abs(g))) if g.size else 0
        max_h = int(np.max(np.abs(h))) if h.size else 0
        bound = prod(radices) * max_g * max_h
    if plan is None:
        plan = PrimePlan(radices, bound, minimum, direct_max)
    residues = [cyclic_convolve_mod_p(g % p, h % p, p, plan.roots[p], batch_axes, plan.direct_max)
                for p in plan.primes]
    exact = crt_combine(residues, plan.primes)
    return exact.astype(np.int64) if bound <= INT64_MAX else exact
