"""Seeded i.i.d. sampling of atoms and empirical estimators.

Draws come from SplitMix64 (Steele, Lea & Flood 2014), implemented here so that
any port reproduces the same stream bit for bit:

    state += 0x9E3779B97F4A7C15
    z = state
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9
    z = (z ^ (z >> 27)) * 0x94D049BB133111EB
    return z ^ (z >> 31)                      (all arithmetic mod 2**64)

An atom is drawn by taking the top 53 bits ``k`` of one output and returning
the first atom (in space order) whose cumulative mass ``c`` satisfies
``k < c * 2**53``.  The comparison is exact, so zero-mass atoms are never drawn.
"""

from __future__ import annotations

import math
import os
import tempfile
from bisect import bisect_right
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterator

from .errors import DegenerateSample, MixedSpaces
from .space import FiniteProbabilitySpace
from .variables import RandomVariable

MASK64 = (1 << 64) - 1
GOLDEN_GAMMA = 0x9E3779B97F4A7C15


class SplitMix64:
    def __init__(self, seed: int):
        self.state = seed & MASK64

    def next_u64(self) -> int:
        self.state = (self.state + GOLDEN_GAMMA) & MASK64
        z = self.state
        z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & MASK64
        z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & MASK64
        return z ^ (z >> 31)

    def next_53(self) -> int:
        return self.next_u64() >> 11

    def next_float(self) -> float:
        return self.next_53() / (1 << 53)

    def below(self, n: int) -> int:
        """Uniform integer in ``[0, n)`` by rejection (no modulo bias)."""
        if n <= 0:
            raise ValueError("n must be positive")
        limit = (1 << 64) - ((1 << 64) % n)
        while True:
            r = self.next_u64()
            if r < limit:
                return r % n

    def __iter__(self) -> Iterator[int]:
        while True:
            yield self.next_u64()


def shuffle(items: list, rng: SplitMix64) -> None:
    """In-place Fisher-Yates shuffle driven by ``rng``."""
    for i in range(len(items) - 1, 0, -1):
        j = rng.below(i + 1)
        items[i], items[j] = items[j], items[i]


@dataclass(frozen=True)
class SampleBatch:
    space_id: str
    seed: int
    draws: tuple

    def __len__(self):
        return len(self.draws)


def _thresholds(space: FiniteProbabilitySpace) -> list:
    out = []
    cum = Fraction(0)
    for m in space.masses:
        cum += m
        c = cum * (1 << 53)
        out.append(math.ceil(c))
    return out


def sample_atoms(space: FiniteProbabilitySpace, n: int, seed: int) -> SampleBatch:
    if n < 0:
        raise ValueError("n must be non-negative")
    if not 0 <= seed <= MASK64:
        raise ValueError("seed must be a 64-bit unsigned integer")
    rng = SplitMix64(seed)
    thresholds = _thresholds(space)
    ids = space.ids
    draws = tuple(ids[bisect_right(thresholds, rng.next_53())] for _ in range(n))
    return SampleBatch(space.id, seed, draws)


def _values(batch: SampleBatch, v: RandomVariable) -> list:
    if v.space.id != batch.space_id:
        raise MixedSpaces(f"variable {v.name!r} is not on the batch space {batch.space_id!r}")
    lookup = v.assignment
    try:
        return [lookup[a] for a in batch.draws]
    except KeyError as exc:
        raise MixedSpaces(f"draw {exc.args[0]!r} is not an atom of the space of {v.name!r}") from None


def empirical_aoe(batch: SampleBatch, x: RandomVariable, y: RandomVariable) -> float:
    """Arm-wise sample mean difference ``mean(Y | X=1) - mean(Y | X=0)``."""
    xs = _values(batch, x)
    ys = _values(batch, y)
    sums = {0: 0, 1: 0}
    counts = {0: 0, 1: 0}
    for xv, yv in zip(xs, ys):
        if xv not in (0, 1):
            raise DegenerateSample(f"treatment value {xv} is not binary")
        sums[xv] += yv
        counts[xv] += 1
    for arm in (0, 1):
        if counts[arm] == 0:
            raise DegenerateSample(f"no draws with {x.name}={arm}")
    return sums[1] / counts[1] - sums[0] / counts[0]


def write_batch(batch: SampleBatch, path) -> None:
    """Columnar text: three header lines, a column name, one atom id per line."""
    lines = [
        f"# space-id: {batch.space_id}",
        f"# seed: {batch.seed}",
        f"# n: {len(batch.draws)}",
        "atom",
        *batch.draws,
    ]
    _atomic_write(path, "\n".join(lines) + "\n")


def read_batch(path) -> SampleBatch:
    header = {}
    draws = []
    with open(path, encoding="utf-8") as fh:
        seen_column = False
        for line in fh:
            line = line.rstrip("\n")
            if line.startswith("#"):
                key, _, value = line[1:].partition(":")
                header[key.strip()] = value.strip()
            elif not seen_column:
                if line != "atom":
                    raise ValueError(f"expected column header 'atom', got {line!r}")
                seen_column = True
            elif line:
                draws.append(line)
    batch = SampleBatch(header["space-id"], int(header["seed"]), tuple(draws))
    if int(header["n"]) != len(draws):
        raise ValueError(f"header says n={header['n']} but file has {len(draws)} draws")
    return batch


def _atomic_write(path, text: str) -> None:
    path = os.fspath(path)
    directory = os.path.dirname(os.path.abspath(path))
    fd, tmp = tempfile.mkstemp(dir=directory, prefix=".tmp-", text=True)
    try:
        with os.fdopen(fd, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text)
        mode = os.stat(path).st_mode & 0o777 if os.path.exists(path) else 0o644
        os.chmod(tmp, mode)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise
