"""Seeded random stream with a draw counter.

All engine randomness flows through one `Dice` so that a seed fixes the
whole trajectory and replay audits can cross-check how many draws each
step consumed.
"""

from __future__ import annotations

import hashlib
import random
from typing import Sequence, TypeVar

T = TypeVar("T")


class Dice:
    def __init__(self, seed: int) -> None:
        self._rng = random.Random(seed)
        self.draws = 0

    def random(self) -> float:
        self.draws += 1
        return self._rng.random()

    def randint(self, lo: int, hi: int) -> int:
        self.draws += 1
        return self._rng.randint(lo, hi)

    def choice(self, seq: Sequence[T]) -> T:
        self.draws += 1
        return self._rng.choice(seq)

    def shuffle(self, seq: list) -> None:
        self.draws += 1
        self._rng.shuffle(seq)

    def chance(self, p: float) -> bool:
        """True with probability p; p >= 1 short-circuits without a draw."""
        if p >= 1.0:
            return True
        if p <= 0.0:
            return False
        return self.random() < p

    def getstate(self):
        return self._rng.getstate(), self.draws

    def setstate(self, state) -> None:
        inner, draws = state
        self._rng.setstate(inner)
        self.draws = draws

    def state_key(self) -> str:
        """Stable fingerprint of the stream position, for snapshots.

        Built-in hash() varies between processes, so digest the raw state.
        """
        raw = repr(self._rng.getstate()).encode("ascii")
        return f"{hashlib.sha1(raw).hexdigest()[:12]}:{self.draws}"
