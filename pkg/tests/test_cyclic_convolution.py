"""Unit tests for exact cyclic convolution: primes, roots, transforms and CRT."""

import unittest
import sys
import os
from math import prod
sys.path.insert(0, os.path.join(os.path.dirname(__file__), '..', 'src'))

import numpy as np
from hypothesis import given, settings, strategies as st

from classes.base import DomainError, TransformError
from cyclic_convolution import (
    PrimePlan,
    crt_combine,
    cyclic_convolve,
    cyclic_convolve_mod_p,
    find_primes,
    find_root,
    forward_transform,
    inverse_transform,
    transform_orders,
)


def schoolbook(g, h):
    """Direct O(N^2) cyclic convolution over every axis."""
    g = np.asarray(g, dtype=object)
    h = np.asarray(h, dtype=object)
    out = np.zeros(g.shape, dtype=object)
    for i in np.ndindex(*g.shape):
        for j in np.ndindex(*h.shape):
            out[tuple((a + b) % r for a, b, r in zip(i, j, g.shape))] += g[i] * h[j]
    return out


@st.composite
def radix_vectors(draw, limit=512):
    """Radix vectors of up to four axes whose product stays within limit."""
    radices = [draw(st.integers(min_value=1, max_value=limit))]
    while len(radices) < 4 and limit // prod(radices) >= 2 and draw(st.booleans()):
        radices.append(draw(st.integers(min_value=2, max_value=limit // prod(radices))))
    return tuple(radices)


class TestPrimesAndRoots(unittest.TestCase):
    def test_find_primes_examples(self):
        """Test prime selection against small known answers."""
        self.assertEqual(find_primes(6, 100), (7, 13, 19))
        self.assertEqual(find_primes(1, 10), (2, 3, 5))
        self.assertEqual(find_primes(4, 100), (5, 13, 17))

    def test_find_primes_respects_minimum(self):
        """Test that every prime is at least the minimum and 1 mod the modulus."""
        primes = find_primes(12, 10 ** 12, 2 ** 20)
        self.assertTrue(all(p >= 2 ** 20 and p % 12 == 1 for p in primes))
        self.assertGreater(int(np.prod(primes, dtype=object)), 2 * 10 ** 12)

    def test_zero_bound_still_gives_a_prime(self):
        """Test that bound 0 selects a single prime."""
        self.assertEqual(len(find_primes(2, 0)), 1)

    def test_find_root_examples(self):
        """Test primitive roots of small orders."""
        self.assertEqual(find_root(7, 6), 3)
        self.assertEqual(find_root(13, 4), 8)
        self.assertEqual(find_root(7, 1), 1)

    def test_root_has_exact_order(self):
        """Test w^r = 1 and w^d != 1 for every proper divisor d of r."""
        for p, r in [(13, 12), (97, 32), (193, 64), (73, 9)]:
            w = find_root(p, r)
            self.assertEqual(pow(w, r, p), 1)
            for d in range(1, r):
                if r % d == 0:
                    self.assertNotEqual(pow(w, d, p), 1, (p, r, d))

    def test_root_needs_divisibility(self):
        """Test that r must divide p - 1."""
        with self.assertRaises(DomainError):
            find_root(7, 4)

    def test_orders_include_bluestein_length(self):
        """Test the power-of-two length for radices above the direct threshold."""
        self.assertEqual(transform_orders([3, 1, 3]), (3,))
        self.assertEqual(transform_orders([65], direct_max=64), (65, 256))


class TestCyclicConvolution(unittest.TestCase):
    def test_mod_p_example(self):
        """Test (1,2) * (3,4) = (4,3) modulo 7."""
        out = cyclic_convolve_mod_p([1, 2], [3, 4], 7, {2: find_root(7, 2)})
        self.assertEqual(out.tolist(), [4, 3])

    def test_missing_root(self):
        """Test that a transform without its root fails loudly."""
        with self.assertRaises(TransformError):
            forward_transform(np.array([1, 2, 3]), 7, {})

    def test_exact_with_negatives(self):
        """Test an exact 2-D convolution with signed values."""
        g = np.array([[1, -2, 3], [0, 4, -5]])
        h = np.array([[-1, 0, 2], [3, -3, 1]])
        self.assertEqual(cyclic_convolve(g, h).tolist(), schoolbook(g, h).tolist())

    def test_round_trip(self):
        """Test inverse(forward(x)) = x modulo p."""
        plan = PrimePlan((4, 3, 5), 10 ** 6)
        x = np.random.default_rng(5).integers(0, 1000, size=(4, 3, 5))
        for p in plan.primes:
            back = inverse_transform(forward_transform(x, p, plan.roots[p]), p, plan.roots[p])
            self.assertEqual(back.tolist(), (x % p).tolist())

    @given(radix_vectors(), st.integers(0, 2 ** 32))
    @settings(max_examples=40, deadline=None, derandomize=True)
    def test_round_trip_across_radix_vectors(self, radices, seed):
        """Test inverse(forward(x)) = x modulo each of at least three primes."""
        plan = PrimePlan(radices, 2 ** 66, minimum=2 ** 20)
        self.assertGreaterEqual(len(plan.primes), 3)
        rng = np.random.default_rng(seed)
        for p in plan.primes[:3]:
            x = rng.integers(0, p, size=radices)
            back = inverse_transform(forward_transform(x, p, plan.roots[p]), p, plan.roots[p])
            self.assertEqual(back.tolist(), x.tolist())

    def test_bluestein_axis(self):
        """Test a radix above the direct-DFT threshold."""
        rng = np.random.default_rng(9)
        g = rng.integers(-20, 21, size=70)
        h = rng.integers(-20, 21, size=70)
        self.assertEqual(cyclic_convolve(g, h, direct_max=64).tolist(), schoolbook(g, h).tolist())
        self.assertEqual(cyclic_convolve(g, h, direct_max=8).tolist(), schoolbook(g, h).tolist())

    def test_batch_axes_are_independent(self):
        """Test that leading batch axes are not convolved."""
        g = np.array([[1, 2, 0], [0, 0, 1]])
        h = np.array([[1, 1, 1], [2, 0, 0]])
        out = cyclic_convolve(g, h, batch_axes=1)
        self.assertEqual(out.tolist(), [schoolbook(g[0], h[0]).tolist(), schoolbook(g[1], h[1]).tolist()])

    def test_large_values_leave_int64(self):
        """Test that a bound past int64 returns exact Python integers."""
        g = np.array([2 ** 40, 1], dtype=object)
        h = np.array([2 ** 40, -1], dtype=object)
        out = cyclic_convolve(g, h)
        self.assertEqual(out.dtype, object)
        self.assertEqual(out.tolist(), [2 ** 80 - 1, 0])

    def test_shape_mismatch(self):
        """Test that operands must agree in shape."""
        with self.assertRaises(DomainError):
            cyclic_convolve(np.zeros(3, dtype=np.int64), np.zeros(4, dtype=np.int64))

    def test_explain_lists_primes(self):
        """Test the plan report."""
        plan = PrimePlan((2, 3), 10)
        lines = plan.explain()
        self.assertIn("root modulus 6", lines[0])
        self.assertEqual(len(lines), 1 + len(plan.primes))

    @given(st.lists(st.integers(min_value=1, max_value=5), min_size=1, max_size=3), st.integers(0, 2 ** 32),
           st.integers(-9, 9))
    @settings(max_examples=60, deadline=None, derandomize=True)
    def test_commutative_bilinear_and_exact(self, radices, seed, alpha):
        """Test g * h = h * g = the schoolbook product, and linearity in g."""
        rng = np.random.default_rng(seed)
        g = rng.integers(-50, 51, size=radices)
        g2 = rng.integers(-50, 51, size=radices)
        h = rng.integers(-50, 51, size=radices)
        expected = schoolbook(g, h)
        self.assertEqual(cyclic_convolve(g, h).tolist(), expected.tolist())
        self.assertEqual(cyclic_convolve(h, g).tolist(), expected.tolist())
        self.assertEqual(cyclic_convolve(alpha * g, h).tolist(), (alpha * expected).tolist())
        self.assertEqual(cyclic_convolve(g + g2, h).tolist(), (expected + schoolbook(g2, h)).tolist())


class TestCrt(unittest.TestCase):
    def test_centered_reconstruction(self):
        """Test 11 and -1 from residues modulo 7 and 13."""
        self.assertEqual(crt_combine([np.array(4), np.array(11)], [7, 13]).tolist(), 11)
        self.assertEqual(crt_combine([np.array(6), np.array(12)], [7, 13]).tolist(), -1)

    def test_many_values(self):
        """Test every value in a symmetric range round-trips through residues."""
        primes = [7, 13, 19, 31]
        values = np.arange(-10000, 10001)
        residues = [values % p for p in primes]
        self.assertEqual(crt_combine(residues, primes).tolist(), values.tolist())

    def test_rejects_shared_factors(self):
        """Test that moduli must be coprime."""
        with self.assertRaises(DomainError):
            crt_combine([np.array(1), np.array(1)], [7, 7])


if __name__ == '__main__':
    unittest.main()
