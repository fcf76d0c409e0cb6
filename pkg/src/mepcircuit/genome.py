"""MEP genome: genes, chromosomes and primitive sets.

A chromosome is a tuple of genes. Gene positions are 1-based everywhere in
this package; a Function gene at position ``i`` may only point at genes
``1..i-1``, so every chromosome decodes to an acyclic set of expressions.
"""

from __future__ import annotations

import random
from dataclasses import dataclass
from typing import NamedTuple, Sequence, Union


class Terminal(NamedTuple):
    var: int


class Function(NamedTuple):
    op: object
    arg1: int
    arg2: int


Gene = Union[Terminal, Function]
Chromosome = tuple  # tuple[Gene, ...]


@dataclass(frozen=True)
class Primitive:
    """A binary primitive: identifier, display name, symbol for printing."""

    ident: object
    name: str
    symbol: str
    infix: bool = False


@dataclass(frozen=True)
class PrimitiveSet:
    functions: tuple
    terminals: int
    terminal_names: tuple = ()

    def __post_init__(self):
        if self.terminals < 1:
            raise ValueError("primitive set needs at least one terminal")
        if not self.functions:
            raise ValueError("primitive set needs at least one function")
        idents = [p.ident for p in self.functions]
        if len(set(idents)) != len(idents):
            raise ValueError("duplicate function identifiers")
        if not self.terminal_names:
            object.__setattr__(
                self, "terminal_names", tuple(f"x{j}" for j in range(self.terminals))
            )
        if len(self.terminal_names) != self.terminals:
            raise ValueError("terminal_names length must equal terminals")
        object.__setattr__(self, "_by_ident", {p.ident: p for p in self.functions})
        object.__setattr__(self, "_by_name", {p.name: p for p in self.functions})

    @property
    def op_ids(self) -> tuple:
        return tuple(p.ident for p in self.functions)

    def primitive(self, ident) -> Primitive:
        return self._by_ident[ident]

    def by_name(self, name: str) -> Primitive:
        return self._by_name[name]

    def has_op(self, ident) -> bool:
        return ident in self._by_ident


# Table of the ten two-input gates. Identifiers are the gate numbers 0-9.
GATE_SYMBOLS = (
    "a & b",
    "a & ~b",
    "~a & b",
    "~a & ~b",
    "a ^ b",
    "a ^ ~b",
    "a | b",
    "a | ~b",
    "~a | b",
    "~a | ~b",
)


def gate_set(n_inputs: int) -> PrimitiveSet:
    """Gates 0-9 over ``n_inputs`` terminals named ``x0 .. x{n-1}``."""
    gates = tuple(Primitive(g, f"g{g}", GATE_SYMBOLS[g]) for g in range(10))
    return PrimitiveSet(gates, n_inputs)


def arithmetic_set(n_inputs: int, names: Sequence[str] = ()) -> PrimitiveSet:
    funcs = (
        Primitive("+", "+", "+", infix=True),
        Primitive("-", "-", "-", infix=True),
        Primitive("*", "*", "*", infix=True),
    )
    return PrimitiveSet(funcs, n_inputs, tuple(names))


def random_gene(position: int, pset: PrimitiveSet, rng: random.Random,
                p_function: float = 0.5) -> Gene:
    if position < 1:
        raise ValueError("gene positions are 1-based")
    if position > 1 and rng.random() < p_function:
        op = pset.functions[rng.randrange(len(pset.functions))].ident
        return Function(op, rng.randint(1, position - 1), rng.randint(1, position - 1))
    return Terminal(rng.randrange(pset.terminals))


def random_chromosome(length: int, pset: PrimitiveSet, rng: random.Random,
                      p_function: float = 0.5) -> Chromosome:
    if length < 1:
        raise ValueError("chromosome length must be >= 1")
    return tuple(random_gene(i, pset, rng, p_function) for i in range(1, length + 1))


def validate(c: Sequence, pset: PrimitiveSet) -> list[str]:
    """Return the list of rule violations; an empty list means the chromosome is valid.

    Each message starts with the offending 1-based gene position.
    """
    problems = []
    if len(c) < 1:
        return ["chromosome is empty"]
    for pos, gene in enumerate(c, start=1):
        if isinstance(gene, Terminal):
            if not 0 <= gene.var < pset.terminals:
                problems.append(f"{pos}: terminal index {gene.var} out of range")
        elif isinstance(gene, Function):
            if pos == 1:
                problems.append("1: first gene must be a terminal")
            if not pset.has_op(gene.op):
                problems.append(f"{pos}: unknown function {gene.op!r}")
            for arg in (gene.arg1, gene.arg2):
                if not 1 <= arg < pos:
                    problems.append(
                        f"{pos}: argument {arg} not lower than position (must be in 1..{pos - 1})"
                    )
        else:
            problems.append(f"{pos}: not a gene: {gene!r}")
    return problems


def is_valid(c: Sequence, pset: PrimitiveSet) -> bool:
    return not validate(c, pset)


class Expr(NamedTuple):
    """Expression tree node. ``op`` is None for a terminal leaf."""

    op: object
    var: int | None = None
    left: "Expr | None" = None
    right: "Expr | None" = None


def decode_expression(c: Sequence, i: int) -> Expr:
    """Build the expression tree E_i rooted at gene ``i`` (1-based)."""
    if not 1 <= i <= len(c):
        raise IndexError(f"gene index {i} out of range 1..{len(c)}")
    memo: dict[int, Expr] = {}

    def build(pos: int) -> Expr:
        if pos in memo:
            return memo[pos]
        gene = c[pos - 1]
        if isinstance(gene, Terminal):
            node = Expr(None, gene.var)
        else:
            node = Expr(gene.op, None, build(gene.arg1), build(gene.arg2))
        memo[pos] = node
        return node

    # Iterative warm-up keeps recursion depth bounded by one level per gene.
    for pos in range(1, i + 1):
        build(pos)
    return memo[i]


def expr_to_str(e: Expr, pset: PrimitiveSet, top: bool = True) -> str:
    if e.op is None:
        return pset.terminal_names[e.var]
    prim = pset.primitive(e.op)
    left = expr_to_str(e.left, pset, False)
    right = expr_to_str(e.right, pset, False)
    if not prim.infix:
        return f"{prim.name}({left}, {right})"
    text = f"{left}{prim.symbol}{right}"
    return text if top else f"({text})"


def format_gene(pos: int, gene: Gene, pset: PrimitiveSet) -> str:
    if isinstance(gene, Terminal):
        return f"{pos}: {pset.terminal_names[gene.var]}"
    return f"{pos}: {pset.primitive(gene.op).name} {gene.arg1}, {gene.arg2}"


def format_chromosome(c: Sequence, pset: PrimitiveSet) -> str:
    return "\n".join(format_gene(pos, g, pset) for pos, g in enumerate(c, start=1))


def parse_chromosome(text: str, pset: PrimitiveSet) -> Chromosome:
    """Parse the ``<pos>: <name>`` / ``<pos>: <op> <a>, <b>`` line format."""
    names = {name: j for j, name in enumerate(pset.terminal_names)}
    genes = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        label, sep, body = line.partition(":")
        if not sep or not label.strip().isdigit():
            raise ValueError(f"line {lineno}: expected '<pos>: ...', got {raw!r}")
        if int(label) != len(genes) + 1:
            raise ValueError(f"line {lineno}: expected position {len(genes) + 1}")
        parts = body.split(None, 1)
        if len(parts) == 1 and parts[0] in names:
            genes.append(Terminal(names[parts[0]]))
            continue
        if len(parts) != 2:
            raise ValueError(f"line {lineno}: cannot parse gene {body.strip()!r}")
        try:
            prim = pset.by_name(parts[0])
            a, b = (int(x) for x in parts[1].split(","))
        except (KeyError, ValueError):
            raise ValueError(f"line {lineno}: cannot parse gene {body.strip()!r}") from None
        genes.append(Function(prim.ident, a, b))
    return tuple(genes)
