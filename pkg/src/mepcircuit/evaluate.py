"""Single-pass evaluation of every expression in a chromosome.

Boolean truth vectors are packed into Python ints: bit ``c`` holds the
output for fitness case ``c``, so a single bitwise op evaluates a gate on
all ``2**n`` cases at once.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Sequence

from .genome import Terminal

MAX_INPUTS = 20


@dataclass(frozen=True)
class TruthVector:
    bits: int
    n: int

    def __post_init__(self):
        if not 1 <= self.n <= MAX_INPUTS:
            raise ValueError(f"input count must be in 1..{MAX_INPUTS}")
        if self.bits < 0 or self.bits >> (1 << self.n):
            raise ValueError("bits exceed vector length")

    def __len__(self) -> int:
        return 1 << self.n

    def __getitem__(self, case: int) -> int:
        if not 0 <= case < len(self):
            raise IndexError(case)
        return (self.bits >> case) & 1

    def __str__(self) -> str:
        return self.to_string()

    def to_string(self) -> str:
        """Character ``c`` is the output on case ``c``."""
        return format(self.bits, f"0{len(self)}b")[::-1]

    @classmethod
    def from_string(cls, s: str) -> "TruthVector":
        n = len(s).bit_length() - 1
        if len(s) != 1 << n:
            raise ValueError(f"length {len(s)} is not a power of two")
        if set(s) - {"0", "1"}:
            raise ValueError("non-binary character in truth vector")
        return cls(int(s[::-1], 2), n)

    def count(self) -> int:
        return self.bits.bit_count()


def full_mask(n: int) -> int:
    return (1 << (1 << n)) - 1


def input_bits(j: int, n: int) -> int:
    """Packed column of input ``j``: bit c is bit j of c."""
    if not 0 <= j < n:
        raise ValueError(f"input index {j} out of range for {n} inputs")
    block = ((1 << (1 << j)) - 1) << (1 << j)  # 2^j zeros then 2^j ones
    width = 1 << n
    # Doubling fill: replicate the periodic pattern across the full width.
    bits, filled = block, 1 << (j + 1)
    while filled < width:
        bits |= bits << filled
        filled <<= 1
    return bits


def input_truth_vector(j: int, n: int) -> TruthVector:
    return TruthVector(input_bits(j, n), n)


# Each entry takes (a, b, mask) with a, b packed vectors inside mask.
GATES: tuple[Callable[[int, int, int], int], ...] = (
    lambda a, b, m: a & b,
    lambda a, b, m: a & ~b,
    lambda a, b, m: ~a & b,
    lambda a, b, m: (a | b) ^ m,
    lambda a, b, m: a ^ b,
    lambda a, b, m: a ^ b ^ m,
    lambda a, b, m: a | b,
    lambda a, b, m: a | (b ^ m),
    lambda a, b, m: (a ^ m) | b,
    lambda a, b, m: (a & b) ^ m,
)


def apply_gate(g: int, a: TruthVector, b: TruthVector) -> TruthVector:
    if a.n != b.n:
        raise ValueError("truth vectors differ in length")
    if not (isinstance(g, int) and 0 <= g < len(GATES)):
        raise ValueError(f"unknown gate id {g!r}")
    return TruthVector(GATES[g](a.bits, b.bits, full_mask(a.n)), a.n)


def evaluate_bits(c: Sequence, n: int, gates: Sequence[Callable] = GATES,
                  columns: Sequence[int] | None = None, mask: int | None = None) -> list[int]:
    """Packed truth vector of every gene, computed top-down in one pass.

    ``gates`` can be swapped for an instrumented table in tests; ``columns``
    and ``mask`` let callers reuse precomputed input columns.
    """
    if mask is None:
        mask = full_mask(n)
    if columns is None:
        columns = [input_bits(j, n) for j in range(n)]
    out: list[int] = []
    append = out.append
    for gene in c:
        if type(gene) is Terminal:
            append(columns[gene.var])
        else:
            op, a, b = gene
            append(gates[op](out[a - 1], out[b - 1], mask))
    return out


def evaluate_boolean(c: Sequence, n: int) -> list[TruthVector]:
    for pos, gene in enumerate(c, start=1):
        if isinstance(gene, Terminal):
            if gene.var >= n:
                raise ValueError(f"gene {pos}: terminal x{gene.var} but only {n} inputs")
        elif not (isinstance(gene.op, int) and 0 <= gene.op < len(GATES)):
            raise ValueError(f"gene {pos}: {gene.op!r} is not a gate id")
    return [TruthVector(v, n) for v in evaluate_bits(c, n)]


@dataclass(frozen=True)
class FitnessReport:
    best_fitness: float
    best_gene: int
    per_gene_fitness: tuple

    @classmethod
    def from_per_gene(cls, per_gene: Sequence) -> "FitnessReport":
        per_gene = tuple(per_gene)
        best = min(per_gene)
        # list.index returns the first hit, i.e. ties go to the lowest gene.
        return cls(best, per_gene.index(best) + 1, per_gene)


def hamming_per_gene(c: Sequence, target_bits: int, n: int, columns=None, mask=None) -> list[int]:
    return [(v ^ target_bits).bit_count()
            for v in evaluate_bits(c, n, GATES, columns, mask)]


def fitness_boolean(c: Sequence, target: TruthVector) -> FitnessReport:
    target = getattr(target, "outputs", target)
    if any(type(g) is Terminal and g.var >= target.n for g in c):
        raise ValueError(f"chromosome reads inputs beyond the target's {target.n}")
    return FitnessReport.from_per_gene(hamming_per_gene(c, target.bits, target.n))


@dataclass(frozen=True)
class RegressionCase:
    inputs: tuple
    target: float


ARITH = {
    "+": lambda a, b: a + b,
    "-": lambda a, b: a - b,
    "*": lambda a, b: a * b,
}


def evaluate_regression(c: Sequence, case: RegressionCase) -> list[float]:
    """Value of every gene on one case; non-finite values come back as NaN or inf."""
    values: list[float] = []
    for gene in c:
        if type(gene) is Terminal:
            values.append(float(case.inputs[gene.var]))
        else:
            op, a, b = gene
            try:
                values.append(ARITH[op](values[a - 1], values[b - 1]))
            except OverflowError:
                values.append(math.inf)
    return values


def fitness_regression(c: Sequence, cases: Sequence[RegressionCase]) -> FitnessReport:
    if not cases:
        raise ValueError("need at least one regression case")
    totals = [0.0] * len(c)
    for case in cases:
        for i, v in enumerate(evaluate_regression(c, case)):
            totals[i] += abs(v - case.target)
    per_gene = [t if math.isfinite(t) else math.inf for t in totals]
    return FitnessReport.from_per_gene(per_gene)
