"""Gate netlists extracted from chromosome genes.

A netlist keeps only the Function genes reachable from the chosen gene,
renumbered 1..G in topological order. Shared sub-circuits stay shared, so
the gate count is the size of the DAG, not of the expanded tree.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import NamedTuple, Sequence, Union

from .evaluate import TruthVector, evaluate_bits
from .genome import GATE_SYMBOLS, Terminal


class InputRef(NamedTuple):
    var: int

    def __str__(self):
        return f"x{self.var}"


class NodeRef(NamedTuple):
    node: int

    def __str__(self):
        return str(self.node)


Source = Union[InputRef, NodeRef]


class Node(NamedTuple):
    id: int
    gate: int
    a: Source
    b: Source


@dataclass(frozen=True)
class Netlist:
    inputs: int
    nodes: tuple
    output: Source

    def __post_init__(self):
        for k, node in enumerate(self.nodes, start=1):
            if node.id != k:
                raise ValueError(f"node ids must be 1..G in order, got {node.id} at {k}")
            for src in (node.a, node.b):
                _check_source(src, k, self.inputs)
            if not 0 <= node.gate <= 9:
                raise ValueError(f"node {k}: unknown gate {node.gate}")
        _check_source(self.output, len(self.nodes) + 1, self.inputs)


def _check_source(src: Source, before: int, inputs: int) -> None:
    if isinstance(src, InputRef):
        if not 0 <= src.var < inputs:
            raise ValueError(f"input x{src.var} out of range for {inputs} inputs")
    elif not 1 <= src.node < before:
        raise ValueError(f"node reference {src.node} must point to an earlier node")


def extract_circuit(c: Sequence, i: int, n: int) -> Netlist:
    """Netlist for the expression rooted at gene ``i`` (1-based) over ``n`` inputs."""
    if not 1 <= i <= len(c):
        raise IndexError(f"gene index {i} out of range 1..{len(c)}")
    live = [False] * (i + 1)
    live[i] = True
    for pos in range(i, 0, -1):
        gene = c[pos - 1]
        if live[pos] and type(gene) is not Terminal:
            live[gene.arg1] = live[gene.arg2] = True

    sources: dict[int, Source] = {}
    nodes: list[Node] = []
    for pos in range(1, i + 1):
        if not live[pos]:
            continue
        gene = c[pos - 1]
        if type(gene) is Terminal:
            sources[pos] = InputRef(gene.var)
        else:
            node = Node(len(nodes) + 1, gene.op, sources[gene.arg1], sources[gene.arg2])
            nodes.append(node)
            sources[pos] = NodeRef(node.id)
    return Netlist(n, tuple(nodes), sources[i])


def gate_count(nl: Netlist) -> int:
    return len(nl.nodes)


def shortest_perfect_circuit(c: Sequence, target) -> Netlist | None:
    """Smallest extracted netlist among genes matching ``target`` exactly.

    ``target`` is a TruthTable or TruthVector. Ties go to the lowest gene.
    """
    outputs = getattr(target, "outputs", target)
    best = None
    for pos, bits in enumerate(evaluate_bits(c, outputs.n), start=1):
        if bits == outputs.bits:
            nl = extract_circuit(c, pos, outputs.n)
            if best is None or gate_count(nl) < gate_count(best):
                best = nl
    return best


# Per-case gate semantics, written out from the formulas independently of the
# packed-int table in ``evaluate`` so the two can cross-check each other.
_GATE_BOOL = (
    lambda a, b: a and b,
    lambda a, b: a and not b,
    lambda a, b: (not a) and b,
    lambda a, b: (not a) and (not b),
    lambda a, b: a != b,
    lambda a, b: a == b,
    lambda a, b: a or b,
    lambda a, b: a or not b,
    lambda a, b: (not a) or b,
    lambda a, b: (not a) or (not b),
)


def evaluate_case(nl: Netlist, case: int) -> bool:
    xs = [bool(case >> j & 1) for j in range(nl.inputs)]
    vals: list[bool] = [False]  # node ids are 1-based

    def value(src: Source) -> bool:
        return xs[src.var] if isinstance(src, InputRef) else vals[src.node]

    for node in nl.nodes:
        vals.append(bool(_GATE_BOOL[node.gate](value(node.a), value(node.b))))
    return value(nl.output)


def output_column(nl: Netlist) -> TruthVector:
    bits = 0
    for case in range(1 << nl.inputs):
        if evaluate_case(nl, case):
            bits |= 1 << case
    return TruthVector(bits, nl.inputs)


def mismatches(nl: Netlist, target) -> list[int]:
    outputs = getattr(target, "outputs", target)
    if nl.inputs != outputs.n:
        raise ValueError(f"netlist has {nl.inputs} inputs, table has {outputs.n}")
    return [c for c in range(1 << nl.inputs) if evaluate_case(nl, c) != bool(outputs[c])]


def verify(nl: Netlist, target) -> bool:
    return not mismatches(nl, target)


def format_netlist(nl: Netlist) -> str:
    lines = [f"inputs {nl.inputs}"]
    lines += [f"{nd.id}: g{nd.gate} {nd.a}, {nd.b}" for nd in nl.nodes]
    lines.append(f"output {nl.output}")
    return "\n".join(lines) + "\n"


def _parse_source(token: str) -> Source:
    token = token.strip()
    if token.startswith("x") and token[1:].isdigit():
        return InputRef(int(token[1:]))
    if token.isdigit():
        return NodeRef(int(token))
    raise ValueError(f"bad source reference {token!r}")


def parse_netlist(text: str) -> Netlist:
    inputs = None
    output = None
    nodes: list[Node] = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        try:
            if line.startswith("inputs "):
                inputs = int(line.split()[1])
            elif line.startswith("output "):
                output = _parse_source(line.split(None, 1)[1])
            else:
                label, _, body = line.partition(":")
                gate, args = body.split(None, 1)
                if not gate.startswith("g"):
                    raise ValueError(gate)
                a, b = args.split(",")
                nodes.append(Node(int(label), int(gate[1:]), _parse_source(a), _parse_source(b)))
        except ValueError:
            raise ValueError(f"line {lineno}: cannot parse {raw!r}") from None
    if inputs is None or output is None:
        raise ValueError("netlist needs 'inputs' and 'output' records")
    return Netlist(inputs, tuple(nodes), output)


def export_dot(nl: Netlist, name: str = "circuit") -> str:
    """Graphviz description: inputs as ellipses, gates as boxes, one output marker."""
    used = sorted({s.var for nd in nl.nodes for s in (nd.a, nd.b) if isinstance(s, InputRef)}
                  | ({nl.output.var} if isinstance(nl.output, InputRef) else set()))

    def dot_id(src: Source) -> str:
        return f"x{src.var}" if isinstance(src, InputRef) else f"g{src.node}"

    out = [f"digraph {name} {{", "  rankdir=LR;"]
    out += [f'  x{j} [shape=ellipse, label="x{j}"];' for j in used]
    for nd in nl.nodes:
        out.append(f'  g{nd.id} [shape=box, label="{GATE_SYMBOLS[nd.gate]}"];')
    for nd in nl.nodes:
        out.append(f'  {dot_id(nd.a)} -> g{nd.id} [label="a"];')
        out.append(f'  {dot_id(nd.b)} -> g{nd.id} [label="b"];')
    out.append('  out [shape=doublecircle, label="out"];')
    out.append(f"  {dot_id(nl.output)} -> out;")
    out.append("}")
    return "\n".join(out) + "\n"
