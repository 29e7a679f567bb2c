"""
Seeded random source for the samplers

Wraps a Mersenne Twister stream with the operations the samplers need:
exactly uniform big integers (rejection on bit strings), bounded draws
and Fisher-Yates shuffles.

Author: PSL2 Subgroups Team
License: MIT
"""

import random
from typing import List, MutableSequence, Optional, TypeVar

T = TypeVar("T")

SEED_MASK = (1 << 64) - 1


class RngState:
    """Deterministic generator: the same seed gives the same sequence"""

    def __init__(self, seed: Optional[int] = None):
        if seed is None:
            seed = random.SystemRandom().getrandbits(64)
        self.seed = seed & SEED_MASK
        self._stream = random.Random(self.seed)
        self.draws = 0

    def randbits(self, k: int) -> int:
        self.draws += 1
        return self._stream.getrandbits(k) if k > 0 else 0

    def uniform_bigint(self, bound: int) -> int:
        """Uniform integer in [1, bound]"""
        if bound < 1:
            raise ValueError(f"empty range [1, {bound}]")
        bits = (bound - 1).bit_length()
        while True:
            x = self.randbits(bits)
            if x < bound:
                return x + 1

    def randbelow(self, bound: int) -> int:
        """Uniform integer in [0, bound)"""
        return self.uniform_bigint(bound) - 1

    def bernoulli(self, numerator: int, denominator: int) -> bool:
        """True with probability numerator/denominator, exactly"""
        return self.uniform_bigint(denominator) <= numerator

    def shuffle(self, items: MutableSequence[T]) -> MutableSequence[T]:
        """Fisher-Yates shuffle in place"""
        for i in range(len(items) - 1, 0, -1):
            j = self.randbelow(i + 1)
            items[i], items[j] = items[j], items[i]
        return items

    def permutation(self, n: int) -> List[int]:
        return list(self.shuffle(list(range(n))))

    def derive(self, index: int) -> "RngState":
        """Independent stream for worker ``index`` (seed xor index)"""
        return RngState(self.seed ^ index)

    def __repr__(self) -> str:
        return f"RngState(seed={self.seed}, draws={self.draws})"
