"""Command processor for the f-convolution toolkit."""

import itertools
import json
import logging
import os
import sys
import time
from typing import Any, Callable, Dict, Optional, Tuple

import numpy as np

from classes.base import DomainError, FConvError, Method, RowPairing, Side, SwapPolicy
from classes.domain import (
    FiniteDomain,
    FunctionTable,
    TensorFunction,
    bitwise_table,
    cyclic_addition,
    random_function,
)
from classes.partition import policy_cost_bound, validate_partition
from classes.partition_builder import build_partition
from classes.run_config import RunConfig
from convolution_engine import ConvolutionEngine, work_count
from data.data_loader import DataProvider, write_json
from oracle import naive_convolve, naive_pair_count
from partition_visualizer import PartitionVisualizer
from query_engine import query

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_FAILURE = 1
EXIT_USAGE = 2
EXHAUSTIVE_LIMIT = 20000


def resolve_jobs(flag: Optional[int], config: Dict[str, Any]) -> int:
    """--jobs, then FCONV_JOBS, then the config file."""
    if flag is not None:
        jobs = flag
    elif os.environ.get("FCONV_JOBS"):
        try:
            jobs = int(os.environ["FCONV_JOBS"])
        except ValueError:
            raise DomainError(f"FCONV_JOBS must be an integer, got {os.environ['FCONV_JOBS']!r}") from None
    else:
        jobs = config.get("jobs", 1)
    if jobs < 1:
        raise DomainError(f"jobs must be at least 1, got {jobs}")
    return jobs


def named_function(name: str, size: int, rng: np.random.Generator) -> FunctionTable:
    if name == "random":
        return random_function(rng, size)
    if name == "add":
        return cyclic_addition(size)
    return bitwise_table(size, name)


class CommandProcessor:
    def __init__(self, config: Dict[str, Any], engine: Optional[ConvolutionEngine] = None,
                 out=None, err=None, data: Optional[DataProvider] = None):
        self.config = config
        self.engine = engine
        self.data = data or DataProvider()
        self.out = out or sys.stdout
        self.err = err or sys.stderr
        self.command_map: Dict[str, Callable[[Any], int]] = {
            'partition': self.partition_command,
            'convolve': self.convolve_command,
            'query': self.query_command,
            'verify': self.verify_command,
            'bench': self.bench_command,
        }

    def _print(self, text: str = ""):
        print(text, file=self.out)

    def _engine(self, args) -> ConvolutionEngine:
        if self.engine is None:
            self.engine = ConvolutionEngine.from_config(self.config, resolve_jobs(getattr(args, "jobs", None), self.config))
        return self.engine

    def _swap_policy(self, args) -> SwapPolicy:
        return SwapPolicy(getattr(args, "swap", None) or self.config["swap_policy"])

    def _row_pairing(self, args) -> RowPairing:
        return RowPairing(getattr(args, "pairing", None) or self.config["row_pairing"])

    def process_command(self, args) -> int:
        """Run the parsed command and return its exit code.

        0 on success, 1 when a check or verification fails, 2 on bad input.
        """
        handler = self.command_map.get(args.command)
        if handler is None:
            print(f"❌ Unknown command: {args.command}", file=self.err)
            return EXIT_USAGE
        logger.info("RUN STARTED: %s", args.command)
        try:
            code = handler(args)
        except DomainError as e:
            print(f"❌ Error: {e}", file=self.err)
            logger.error("%s failed on input: %s", args.command, e)
            return EXIT_USAGE
        except FConvError as e:
            print(f"❌ Internal error: {e}", file=self.err)
            logger.exception("%s failed", args.command)
            return EXIT_FAILURE
        logger.info("RUN FINISHED: %s with exit code %d", args.command, code)
        return code

    def partition_command(self, args) -> int:
        f = self.data.get_function(args.function)
        policy = self._swap_policy(args)
        if args.check:
            partition = self.data.get_partition(args.check, f)
        else:
            partition = build_partition(f, policy, self._row_pairing(args))
        bound = policy_cost_bound(policy, f.size_l, f.size_r, f.size_t)
        violations = validate_partition(f, partition)
        ok = not violations and partition.cost <= bound

        report = partition.to_dict(f)
        report.update({"bound": bound, "valid": not violations, "violations": violations})
        if args.out:
            write_json(args.out, report)
        else:
            self._print(json.dumps(report, indent=2))
        if args.dot:
            rows = self._dot_rows(args, f)
            visualizer = PartitionVisualizer(f, *rows)
            with open(args.dot, "w", encoding="utf-8") as handle:
                handle.write(visualizer.to_dot())
            for line in visualizer.describe_pieces():
                print(f"  {line}", file=self.err)

        for violation in violations:
            print(f"❌ {violation}", file=self.err)
        status = "✅" if ok else "❌"
        print(f"{status} cost {partition.cost}, bound {bound}, {len(partition)} minors, "
              f"{len(violations)} violations", file=self.err)
        return EXIT_OK if ok else EXIT_FAILURE

    def _dot_rows(self, args, f: FunctionTable) -> Tuple[int, int]:
        if not args.rows:
            return 0, 1
        labels = args.rows.split(",")
        if len(labels) != 2:
            raise DomainError(f"--rows needs two comma-separated L labels, got {args.rows!r}")
        return f.dom_l.index(labels[0]), f.dom_l.index(labels[1])

    def convolve_command(self, args) -> int:
        f = self.data.get_function(args.function)
        g = self.data.get_tensor(args.g, f, Side.L)
        h = self.data.get_tensor(args.h, f, Side.R)
        if Method(args.method) is Method.NAIVE:
            result = naive_convolve(f, g, h, self.config["pair_limit"])
        else:
            if args.partition:
                partition = self.data.get_partition(args.partition, f)
            else:
                partition = build_partition(f, self._swap_policy(args), self._row_pairing(args))
            engine = self._engine(args)
            result = engine.convolve(f, partition, g, h)
            if args.explain:
                print(f"partition cost {partition.cost}, {len(partition)} minors, "
                      f"work {engine.last_run.get('work', 0)} of {work_count(partition, g.arity)}", file=self.err)
                for radices in sorted(engine.plans):
                    for line in engine.plans[radices].explain():
                        print(line, file=self.err)
        if args.out:
            write_json(args.out, result.to_dict(Side.T))
            print(f"✅ wrote {len(result)} values to {args.out}", file=self.err)
        else:
            self._print(json.dumps(result.to_dict(Side.T)))
        return EXIT_OK

    def query_command(self, args) -> int:
        f = self.data.get_function(args.function)
        g = self.data.get_tensor(args.g, f, Side.L)
        h = self.data.get_tensor(args.h, f, Side.R)
        vector = [label for label in args.vector.split(",") if label != ""] if args.vector else []
        pad = args.pad_left if args.pad_left is not None else self.config["padding_index"]
        pad_right = args.pad_right if args.pad_right is not None else pad
        value = query(f, g, h, vector, pad_left=f.dom_l.resolve(pad), pad_right=f.dom_r.resolve(pad_right),
                      block=self.config["matmul_block"], integer_capacity=self.config["integer_capacity"])
        self._print(str(value))
        return EXIT_OK

    def _run_config(self, args) -> RunConfig:
        return RunConfig(
            seed=args.seed,
            trials=args.trials,
            domain_sizes=args.D,
            arities=args.n,
            bound=args.M,
            swap_policy=self._swap_policy(args),
            method=Method(args.method) if getattr(args, "method", None) else None,
            row_pairing=self._row_pairing(args),
        )

    def _verify_instance(self, f: FunctionTable, n: int, run: RunConfig, rng: np.random.Generator) -> Tuple[bool, str]:
        g = TensorFunction.random(rng, f.dom_l, n, run.bound, Side.L)
        h = TensorFunction.random(rng, f.dom_r, n, run.bound, Side.R)
        v = tuple(int(t) for t in rng.integers(0, f.size_t, size=n))
        partition = build_partition(f, run.swap_policy, run.row_pairing)
        violations = validate_partition(f, partition)
        bound = policy_cost_bound(run.swap_policy, f.size_l, f.size_r, f.size_t)
        expected = naive_convolve(f, g, h, self.config["pair_limit"])
        problems = list(violations)
        if partition.cost > bound:
            problems.append(f"cost {partition.cost} above bound {bound}")
        if not violations:
            got = self._engine(None).convolve(f, partition, g, h)
            if got != expected:
                wrong = int(np.count_nonzero(got.tensor != expected.tensor))
                problems.append(f"engine differs from oracle in {wrong} cells")
        value = query(f, g, h, v, pad_left=self.config["padding_index"] % f.size_l,
                      pad_right=self.config["padding_index"] % f.size_r,
                      block=self.config["matmul_block"], integer_capacity=self.config["integer_capacity"])
        if value != expected[v]:
            problems.append(f"query at {v} gave {value}, oracle {expected[v]}")
        summary = f"|L|={f.size_l} |T|={f.size_t} n={n} cost={partition.cost}"
        return not problems, summary + ("" if not problems else ": " + "; ".join(problems))

    def _exhaustive_functions(self, size: int):
        count = size ** (size * size)
        if count > EXHAUSTIVE_LIMIT:
            raise DomainError(f"|D|={size} has {count} functions; exhaustive mode stops at {EXHAUSTIVE_LIMIT}")
        domain = FiniteDomain.of_size(size)
        for cells in itertools.product(range(size), repeat=size * size):
            yield FunctionTable(domain, domain, domain, np.array(cells, dtype=np.int64).reshape(size, size))

    def verify_command(self, args) -> int:
        run = self._run_config(args)
        rng = run.rng()
        self.engine = self._engine(args)
        self._print(f"🎲 verify seed {run.seed}: {json.dumps(run.to_dict(), sort_keys=True)}")
        if args.function:
            f = self.data.get_function(args.function)
            instances = ((f, rng.choice(run.arities)) for _ in range(run.trials))
        elif args.exhaustive:
            instances = ((f, n) for size in run.domain_sizes for f in self._exhaustive_functions(size)
                         for n in run.arities for _ in range(run.trials))
        else:
            instances = ((random_function(rng, int(rng.choice(run.domain_sizes))), int(rng.choice(run.arities)))
                         for _ in range(run.trials))
        passed = failed = 0
        for index, (f, n) in enumerate(instances):
            ok, summary = self._verify_instance(f, int(n), run, rng)
            if ok:
                passed += 1
            else:
                failed += 1
                self._print(f"❌ trial {index}: {summary}")
            logger.debug("trial %d %s: %s", index, "ok" if ok else "FAILED", summary)
        status = "✅" if failed == 0 else "❌"
        self._print(f"{status} {passed}/{passed + failed} trials agree with the oracle (seed {run.seed})")
        return EXIT_OK if failed == 0 else EXIT_FAILURE

    def bench_command(self, args) -> int:
        run = self._run_config(args)
        rng = run.rng()
        engine = self._engine(args)
        self._print(f"🎲 bench seed {run.seed}: {json.dumps(run.to_dict(), sort_keys=True)}")
        header = f"{'instance':<22}{'cost':>6}{'work_count':>14}{'naive_pairs':>16}{'engine_s':>11}{'naive_s':>11}"
        self._print(header)
        fixed = self.data.get_function(args.function) if args.function else None
        for size in run.domain_sizes:
            for n in run.arities:
                for trial in range(run.trials):
                    f = fixed or named_function(args.named, size, rng)
                    g = TensorFunction.random(rng, f.dom_l, n, run.bound, Side.L)
                    h = TensorFunction.random(rng, f.dom_r, n, run.bound, Side.R)
                    label = f"{args.named if fixed is None else 'file'} D={f.size_l} n={n}#{trial}"
                    self._print(self._bench_row(label, f, g, h, run, engine))
        return EXIT_OK

    def _bench_row(self, label: str, f: FunctionTable, g: TensorFunction, h: TensorFunction,
                   run: RunConfig, engine: ConvolutionEngine) -> str:
        pairs = naive_pair_count(f, g.arity)
        cost = works = "-"
        engine_time = naive_time = "-"
        if run.method in (Method.PARTITION, Method.BOTH):
            start = time.perf_counter()
            partition = build_partition(f, run.swap_policy, run.row_pairing)
            engine.convolve(f, partition, g, h)
            engine_time = f"{time.perf_counter() - start:.4f}"
            cost, works = partition.cost, work_count(partition, g.arity)
        if run.method in (Method.NAIVE, Method.BOTH):
            if pairs <= self.config["pair_limit"]:
                start = time.perf_counter()
                naive_convolve(f, g, h, self.config["pair_limit"])
                naive_time = f"{time.perf_counter() - start:.4f}"
            else:
                naive_time = "skipped"
        logger.info("bench %s: cost=%s work=%s pairs=%d engine=%s naive=%s",
                    label, cost, works, pairs, engine_time, naive_time)
        return f"{label:<22}{cost!s:>6}{works!s:>14}{pairs:>16}{engine_time:>11}{naive_time:>11}"
