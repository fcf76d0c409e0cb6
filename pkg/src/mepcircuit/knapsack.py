"""Subset-sum decision tables and their text file format.

Case ``c`` of an ``n``-input table encodes the member set
``M(c) = {j + 1 : bit j of c is set}``; its output is 1 iff some subset of
``M(c)`` sums to the target.  The membership string ``0100110`` (number 1
first) is therefore case ``0b0110010 = 50``.
"""

from __future__ import annotations

import os
import warnings
from dataclasses import dataclass
from typing import Iterable

from .evaluate import MAX_INPUTS, TruthVector


class ConstantTableWarning(UserWarning):
    pass


@dataclass(frozen=True)
class KnapsackInstance:
    n: int
    k: int

    def __post_init__(self):
        if not 1 <= self.n <= MAX_INPUTS:
            raise ValueError(f"n must be in 1..{MAX_INPUTS}, got {self.n}")
        if self.k < 0:
            raise ValueError(f"target sum must be non-negative, got {self.k}")

    @property
    def max_sum(self) -> int:
        return self.n * (self.n + 1) // 2

    @property
    def is_constant(self) -> bool:
        return self.k == 0 or self.k > self.max_sum


@dataclass(frozen=True)
class TruthTable:
    n: int
    outputs: TruthVector
    label: str = ""

    def __post_init__(self):
        if self.outputs.n != self.n:
            raise ValueError("outputs length must be 2**n")

    @property
    def bits(self) -> int:
        return self.outputs.bits

    def __len__(self) -> int:
        return 1 << self.n


def case_members(c: int) -> frozenset[int]:
    return frozenset(j + 1 for j in range(c.bit_length()) if c >> j & 1)


def case_from_string(s: str) -> int:
    """Map a membership string (position 1 leftmost) to its case index."""
    return int(s[::-1], 2)


def reachable_sums(members: Iterable[int]) -> int:
    """Bitmask with bit s set iff some subset of ``members`` sums to s."""
    sums = 1  # the empty subset
    for m in members:
        sums |= sums << m
    return sums


def subset_sum_oracle(members: Iterable[int], k: int) -> bool:
    members = list(members)
    if k < 0 or any(m <= 0 for m in members):
        raise ValueError("members must be positive and k non-negative")
    return bool(reachable_sums(members) >> k & 1)


def generate_truth_table(inst: KnapsackInstance) -> TruthTable:
    if inst.is_constant:
        warnings.warn(
            f"n={inst.n}, k={inst.k} gives a constant truth table", ConstantTableWarning,
            stacklevel=2,
        )
    size = 1 << inst.n
    # Reachable-sum masks per case, built from the case with its top bit cleared.
    sums = [1] * size
    bits = 1 if inst.k == 0 else 0
    for c in range(1, size):
        top = c.bit_length() - 1
        prev = sums[c ^ (1 << top)]
        s = prev | (prev << (top + 1))
        sums[c] = s
        if s >> inst.k & 1:
            bits |= 1 << c
    return TruthTable(inst.n, TruthVector(bits, inst.n), f"knapsack n={inst.n} k={inst.k}")


def format_table(t: TruthTable) -> str:
    lines = [f"inputs {t.n}"]
    if t.label:
        lines.append(f"label {t.label}")
    lines.append(f"table {t.outputs.to_string()}")
    return "\n".join(lines) + "\n"


def parse_table(text: str) -> TruthTable:
    n = None
    label = ""
    table = None
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line:
            continue
        key, _, value = line.partition(" ")
        value = value.strip()
        if key == "inputs":
            if n is not None or not value.isdigit():
                raise ValueError(f"line {lineno}: malformed header {raw!r}")
            n = int(value)
            if not 1 <= n <= MAX_INPUTS:
                raise ValueError(f"line {lineno}: input count {n} out of range")
        elif key == "label":
            label = value
        elif key == "table":
            if n is None:
                raise ValueError(f"line {lineno}: 'table' before 'inputs' header")
            if len(value) != 1 << n:
                raise ValueError(
                    f"line {lineno}: expected {1 << n} outputs for {n} inputs, got {len(value)}"
                )
            if set(value) - {"0", "1"}:
                raise ValueError(f"line {lineno}: non-binary character in table")
            table = value
        else:
            raise ValueError(f"line {lineno}: unknown record {key!r}")
    if n is None or table is None:
        raise ValueError("missing 'inputs' or 'table' record")
    return TruthTable(n, TruthVector.from_string(table), label)


def save_table(t: TruthTable, destination: str | os.PathLike) -> None:
    with open(destination, "w", encoding="utf-8") as fh:
        fh.write(format_table(t))


def load_table(source: str | os.PathLike) -> TruthTable:
    with open(source, encoding="utf-8") as fh:
        return parse_table(fh.read())
