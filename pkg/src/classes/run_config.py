"""Run configuration for the randomized verify and bench commands."""

from typing import Any, Dict, Optional, Sequence

import numpy as np

from .base import DomainError, Method, RowPairing, SwapPolicy

SEED_LIMIT = 2 ** 64


class RunConfig:
    def __init__(self, seed: Optional[int] = None, trials: int = 1, domain_sizes: Sequence[int] = (2,),
                 arities: Sequence[int] = (1,), bound: int = 10, swap_policy: SwapPolicy = SwapPolicy.AUTO,
                 method: Optional[Method] = None, row_pairing: RowPairing = RowPairing.CONSECUTIVE):
        if seed is None:
            seed = int(np.random.SeedSequence().entropy % SEED_LIMIT)
        if not 0 <= seed < SEED_LIMIT:
            raise DomainError(f"seed must be a 64-bit unsigned integer, got {seed}")
        if trials < 1:
            raise DomainError(f"trials must be at least 1, got {trials}")
        if bound < 0:
            raise DomainError(f"value bound M must be non-negative, got {bound}")
        if not domain_sizes or any(d < 1 for d in domain_sizes):
            raise DomainError(f"domain sizes must be positive, got {list(domain_sizes)}")
        if not arities or any(n < 0 for n in arities):
            raise DomainError(f"arities must be non-negative, got {list(arities)}")
        self.seed = seed
        self.trials = trials
        self.domain_sizes = tuple(domain_sizes)
        self.arities = tuple(arities)
        self.bound = bound
        self.swap_policy = swap_policy
        self.method = method
        self.row_pairing = row_pairing

    def rng(self) -> np.random.Generator:
        """The single generator every random choice of a run draws from."""
        return np.random.default_rng(self.seed)

    def to_dict(self) -> Dict[str, Any]:
        """The report header; "method" only for runs that choose one (bench)."""
        header = {
            "seed": self.seed,
            "trials": self.trials,
            "D": list(self.domain_sizes),
            "n": list(self.arities),
            "M": self.bound,
            "swap_policy": self.swap_policy.value,
            "row_pairing": self.row_pairing.value,
        }
        if self.method is not None:
            header["method"] = self.method.value
        return header

    def __repr__(self) -> str:
        return f"RunConfig({self.to_dict()})"
