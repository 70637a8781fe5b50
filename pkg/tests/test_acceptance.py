"""End-to-end checks at desk scale: partitions, engine, transforms, queries and work accounting."""

import unittest
import sys
import os
import itertools
import time
sys.path.insert(0, os.path.join(os.path.dirname(__file__), '..', 'src'))

import numpy as np

from classes.base import Side
from classes.domain import FiniteDomain, FunctionTable, TensorFunction, bitwise_table, random_function
from classes.partition import partition_cost_bound, validate_partition
from classes.partition_builder import build_partition
from convolution_engine import ConvolutionEngine, work_count
from cyclic_convolution import crt_combine, cyclic_convolve, find_primes
from data.data_loader import load_function_table, load_partition
from oracle import naive_convolve
from query_engine import query

DATA_DIR = os.path.join(os.path.dirname(__file__), '..', 'data')
SEED = 20240601


def radix_vectors(limit):
    """Every vector of radices >= 2 with product <= limit, plus the single radices 1..limit."""
    found = {(r,) for r in range(1, limit + 1)}
    frontier = [()]
    while frontier:
        grown = []
        for prefix in frontier:
            size = int(np.prod(prefix, dtype=np.int64)) if prefix else 1
            for r in range(2, limit // size + 1):
                vector = prefix + (r,)
                found.add(vector)
                grown.append(vector)
        frontier = grown
    return sorted(found, key=lambda v: (len(v), v))


def shifted_sum(g, h):
    """Cyclic convolution as a sum of shifted copies of h."""
    out = np.zeros(h.shape, dtype=object)
    for index in np.ndindex(*g.shape):
        if g[index]:
            out = out + int(g[index]) * np.roll(h.astype(object), index, axis=tuple(range(h.ndim)))
    return out


class TestPartitionBounds(unittest.TestCase):
    def check(self, f, bound):
        partition = build_partition(f)
        self.assertEqual(validate_partition(f, partition), [])
        self.assertLessEqual(partition.cost, bound)
        for n in range(7):
            self.assertEqual(work_count(partition, n), partition.cost ** n)

    def exhaustive(self, size, bound):
        domain = FiniteDomain.of_size(size)
        for cells in itertools.product(range(size), repeat=size * size):
            self.check(FunctionTable(domain, domain, domain, np.array(cells, dtype=np.int64).reshape(size, size)),
                       bound)

    def test_every_function_on_two_elements(self):
        """Test all 16 functions on |D| = 2 against the bound 3."""
        self.exhaustive(2, 3)

    def test_every_function_on_three_elements(self):
        """Test all 3^9 functions on |D| = 3 against the bound 8."""
        self.exhaustive(3, 8)

    def test_sampled_larger_domains(self):
        """Test seeded random functions on |D| = 4, 5, 6."""
        rng = np.random.default_rng(SEED)
        for size, count in ((4, 1000), (5, 500), (6, 200)):
            bound = partition_cost_bound(size, size, size)
            self.assertEqual(bound, {4: 13, 5: 21, 6: 30}[size])
            for _ in range(count):
                self.check(random_function(rng, size), bound)

    def test_worked_example_fixture(self):
        """Test the 12-column example builds and validates at cost 14."""
        f = load_function_table(os.path.join(DATA_DIR, 'two_row_example.json'))
        self.assertLessEqual(build_partition(f).cost, 14)
        stored = load_partition(os.path.join(DATA_DIR, 'two_row_example_partition.json'), f)
        self.assertEqual(validate_partition(f, stored), [])
        self.assertEqual(stored.cost, 14)


class TestEngineMatchesOracle(unittest.TestCase):
    def test_random_instances(self):
        """Test 200 seeded signed instances cell by cell."""
        rng = np.random.default_rng(SEED + 1)
        engine = ConvolutionEngine()
        for trial in range(200):
            size = int(rng.integers(2, 5))
            n = int(rng.integers(1, 5))
            bound = int(rng.integers(0, 11))
            f = random_function(rng, size)
            g = TensorFunction.random(rng, f.dom_l, n, bound, Side.L)
            h = TensorFunction.random(rng, f.dom_r, n, bound, Side.R)
            got = engine.convolve(f, build_partition(f), g, h)
            self.assertEqual(got.tensor.tolist(), naive_convolve(f, g, h).tensor.tolist(), trial)


class TestCyclicConvolutionShapes(unittest.TestCase):
    def test_every_small_shape(self):
        """Test every radix vector with at most 64 cells, 20 signed inputs each."""
        rng = np.random.default_rng(SEED + 2)
        shapes = radix_vectors(64)
        self.assertIn((2, 2, 2, 2, 2, 2), shapes)
        for shape in shapes:
            g = rng.integers(-100, 101, size=(20,) + shape)
            h = rng.integers(-100, 101, size=(20,) + shape)
            out = cyclic_convolve(g, h, batch_axes=1)
            for i in range(20):
                self.assertEqual(out[i].tolist(), shifted_sum(g[i], h[i]).tolist(), shape)

    def test_signed_crt_round_trip(self):
        """Test 10^4 random values inside the centered range."""
        rng = np.random.default_rng(SEED + 3)
        primes = find_primes(6, 10 ** 12)
        half = int(np.prod(primes, dtype=object)) // 2
        values = [int(x) for x in rng.integers(-min(half, 2 ** 62), min(half, 2 ** 62), size=10 ** 4)]
        residues = [np.array([v % p for v in values], dtype=np.int64) for p in primes]
        self.assertEqual(crt_combine(residues, primes).tolist(), values)


class TestQueryMatchesEngine(unittest.TestCase):
    def test_random_queries(self):
        """Test 100 seeded queries of both parities against the engine."""
        rng = np.random.default_rng(SEED + 4)
        engine = ConvolutionEngine()
        for trial in range(100):
            size = int(rng.integers(2, 5))
            n = int(rng.integers(1, 5))
            f = random_function(rng, size)
            g = TensorFunction.random(rng, f.dom_l, n, 10, Side.L)
            h = TensorFunction.random(rng, f.dom_r, n, 10, Side.R)
            v = tuple(int(t) for t in rng.integers(0, size, size=n))
            full = engine.convolve(f, build_partition(f), g, h)
            self.assertEqual(query(f, g, h, v), full[v], trial)

    def test_padding_choice_is_irrelevant(self):
        """Test every padding element on 20 odd-n instances."""
        rng = np.random.default_rng(SEED + 5)
        for _ in range(20):
            size = int(rng.integers(2, 5))
            n = int(rng.choice([1, 3]))
            f = random_function(rng, size)
            g = TensorFunction.random(rng, f.dom_l, n, 10, Side.L)
            h = TensorFunction.random(rng, f.dom_r, n, 10, Side.R)
            v = tuple(int(t) for t in rng.integers(0, size, size=n))
            expected = naive_convolve(f, g, h)[v]
            for d in range(size):
                self.assertEqual(query(f, g, h, v, pad_left=d, pad_right=d), expected)


class TestXorBenchmark(unittest.TestCase):
    def test_engine_beats_the_double_loop(self):
        """Test XOR on two elements with n = 12: work 2^12 against 4^12 pairs."""
        rng = np.random.default_rng(SEED + 6)
        f = bitwise_table(2, "xor")
        g = TensorFunction.random(rng, f.dom_l, 12, 10, Side.L)
        h = TensorFunction.random(rng, f.dom_r, 12, 10, Side.R)
        partition = build_partition(f)
        self.assertEqual(work_count(partition, 12), 2 ** 12)
        engine = ConvolutionEngine()
        engine.convolve(f, partition, g, h)
        self.assertEqual(engine.last_run["work"], 2 ** 12)

        start = time.perf_counter()
        fast = engine.convolve(f, partition, g, h)
        engine_time = time.perf_counter() - start
        start = time.perf_counter()
        slow = naive_convolve(f, g, h)
        naive_time = time.perf_counter() - start
        self.assertEqual(fast, slow)
        self.assertLess(engine_time, naive_time / 10)


if __name__ == '__main__':
    unittest.main()
