"""Ordered binary decision diagrams of scenario structure functions.

The analysis pipeline builds a reduced ordered BDD (ROBDD) of the structure
function under a variable order extending the scenario's temporal order:
gates are melded bottom-up with the standard binary apply, a unique table
hash-conses nodes, and no node ever has equal children. The full expansion
(FOBDD, a complete decision tree) and Bryant-style reduction exist as a
testing route: reducing the expansion must reproduce the directly-built
diagram, and analyses over both must agree.

Node references are indices into an append-only store whose entries 0 and 1
are the terminals; internal entries always point at earlier entries, so
ascending reference order is a topological order (children first).
"""

from __future__ import annotations

import sys
from dataclasses import dataclass
from types import MappingProxyType
from typing import Mapping, Sequence

from . import model as _model
from .errors import ResourceLimitError
from .model import Assignment, GateKind, QuantifiedScenario

__all__ = [
    "TERM0",
    "TERM1",
    "DdNode",
    "DecisionDiagram",
    "Robdd",
    "Fobdd",
    "build_robdd",
    "robdd_eval",
    "expand_fobdd",
    "reduce_fobdd",
    "isomorphic",
    "to_dot",
]

TERM0 = 0
TERM1 = 1

#: Default cap on full-expansion size (2^20 leaves).
EXPANSION_LIMIT = 20


@dataclass(frozen=True)
class DdNode:
    """Internal decision node: branch variable (as an order position) and children."""

    pos: int
    lo: int
    hi: int


@dataclass(frozen=True)
class DecisionDiagram:
    """An ordered decision diagram over a variable order.

    Store entries 0 and 1 are the terminals (kept as ``None`` placeholders);
    every internal entry references strictly earlier entries. The store may
    hold nodes that are not reachable from ``root`` (intermediate results of
    construction); reachability-aware accessors ignore them.
    """

    order: tuple[str, ...]
    nodes: tuple[DdNode | None, ...]
    root: int

    def var_of(self, ref: int) -> str:
        node = self.nodes[ref]
        assert node is not None, "terminals carry no variable"
        return self.order[node.pos]

    def reachable_refs(self) -> list[int]:
        """Refs reachable from the root, ascending (children before parents)."""
        seen = {self.root}
        stack = [self.root]
        while stack:
            ref = stack.pop()
            if ref <= 1:
                continue
            node = self.nodes[ref]
            for child in (node.lo, node.hi):  # type: ignore[union-attr]
                if child not in seen:
                    seen.add(child)
                    stack.append(child)
        return sorted(seen)

    def node_count(self) -> int:
        """Reachable nodes, terminals included."""
        return len(self.reachable_refs())

    def depth(self) -> int:
        """Largest number of decisions along any root-terminal path."""
        memo: dict[int, int] = {TERM0: 0, TERM1: 0}
        for ref in self.reachable_refs():
            if ref <= 1:
                continue
            node = self.nodes[ref]
            memo[ref] = 1 + max(memo[node.lo], memo[node.hi])  # type: ignore[union-attr]
        return memo[self.root]

    def evaluate(self, valuation: Mapping[str, bool]) -> bool:
        ref = self.root
        while ref > 1:
            node = self.nodes[ref]
            ref = node.hi if valuation[self.order[node.pos]] else node.lo  # type: ignore[union-attr]
        return ref == TERM1


@dataclass(frozen=True)
class Robdd(DecisionDiagram):
    """A reduced, hash-consed diagram: canonical for its function and order."""

    unique: Mapping[tuple[int, int, int], int] = None  # type: ignore[assignment]


class _Builder:
    """Hash-consing node store with an apply cache."""

    def __init__(self, order: Sequence[str]):
        self.order = tuple(order)
        self.nodes: list[DdNode | None] = [None, None]
        self.unique: dict[tuple[int, int, int], int] = {}
        self.cache: dict[tuple[str, int, int], int] = {}

    def mk(self, pos: int, lo: int, hi: int) -> int:
        if lo == hi:
            return lo
        key = (pos, lo, hi)
        ref = self.unique.get(key)
        if ref is None:
            ref = len(self.nodes)
            self.nodes.append(DdNode(pos, lo, hi))
            self.unique[key] = ref
        return ref

    def _pos(self, ref: int) -> int:
        return sys.maxsize if ref <= 1 else self.nodes[ref].pos  # type: ignore[union-attr]

    def apply(self, op: str, u: int, v: int) -> int:
        if op == "or":
            if u == TERM1 or v == TERM1:
                return TERM1
            if u == TERM0:
                return v
            if v == TERM0:
                return u
        else:
            if u == TERM0 or v == TERM0:
                return TERM0
            if u == TERM1:
                return v
            if v == TERM1:
                return u
        if u == v:
            return u
        if u > v:
            u, v = v, u
        key = (op, u, v)
        cached = self.cache.get(key)
        if cached is not None:
            return cached
        pos = min(self._pos(u), self._pos(v))
        u_lo, u_hi = (self.nodes[u].lo, self.nodes[u].hi) if self._pos(u) == pos else (u, u)  # type: ignore[union-attr]
        v_lo, v_hi = (self.nodes[v].lo, self.nodes[v].hi) if self._pos(v) == pos else (v, v)  # type: ignore[union-attr]
        result = self.mk(pos, self.apply(op, u_lo, v_lo), self.apply(op, u_hi, v_hi))
        self.cache[key] = result
        return result

    def freeze(self, root: int) -> Robdd:
        return Robdd(
            order=self.order,
            nodes=tuple(self.nodes),
            root=root,
            unique=MappingProxyType(dict(self.unique)),
        )


def build_robdd(scenario: QuantifiedScenario, order: Sequence[str] | None = None) -> Robdd:
    """Canonical ROBDD of the scenario's structure function.

    ``order`` must extend the scenario's temporal order (validated); the
    default linearization is used when omitted. Built gate-wise over the
    tree, melding child diagrams with apply; shared subtrees are translated
    once.
    """
    lin = _model.linearize(scenario, order)
    position = {var: i for i, var in enumerate(lin)}
    builder = _Builder(lin)
    aft = scenario.aft
    memo: dict[str, int] = {}
    stack = [aft.root]
    while stack:
        nid = stack[-1]
        if nid in memo:
            stack.pop()
            continue
        node = aft.node(nid)
        if node.kind.is_leaf:
            memo[nid] = builder.mk(position[nid], TERM0, TERM1)
            stack.pop()
            continue
        pending = [c for c in node.children if c not in memo]
        if pending:
            stack.extend(pending)
            continue
        op = "or" if node.kind is GateKind.OR else "and"
        ref = memo[node.children[0]]
        for child in node.children[1:]:
            ref = builder.apply(op, ref, memo[child])
        memo[nid] = ref
        stack.pop()
    return builder.freeze(memo[aft.root])


def robdd_eval(diagram: DecisionDiagram, asg: Assignment | Mapping[str, bool]) -> bool:
    """Walk the diagram under a total valuation; returns the terminal label."""
    if isinstance(asg, Assignment):
        valuation: Mapping[str, bool] = {v: asg.value(v) for v in diagram.order}
    else:
        valuation = asg
    return diagram.evaluate(valuation)


@dataclass(frozen=True)
class Fobdd:
    """The full (unshared, unreduced) decision tree of a structure function.

    ``leaves`` holds the truth table in variable-major order: the first
    variable of ``order`` is the most significant bit of the leaf index.
    """

    order: tuple[str, ...]
    leaves: tuple[int, ...]

    def __post_init__(self) -> None:
        if len(self.leaves) != 1 << len(self.order):
            raise ValueError("leaf word length must be 2^(number of variables)")

    def to_diagram(self) -> DecisionDiagram:
        """The tree as a diagram: every internal tree node is its own entry,
        only the two terminals are shared."""
        nodes: list[DdNode | None] = [None, None]

        def build(depth: int, index: int) -> int:
            if depth == len(self.order):
                return TERM1 if self.leaves[index] else TERM0
            lo = build(depth + 1, 2 * index)
            hi = build(depth + 1, 2 * index + 1)
            nodes.append(DdNode(depth, lo, hi))
            return len(nodes) - 1

        root = build(0, 0)
        return DecisionDiagram(order=self.order, nodes=tuple(nodes), root=root)


def expand_fobdd(
    scenario: QuantifiedScenario,
    order: Sequence[str] | None = None,
    limit: int = EXPANSION_LIMIT,
) -> Fobdd:
    """Exhaustively tabulate the structure function as a complete tree.

    Exponential in the number of leaves; refuses more than ``limit``
    variables.
    """
    lin = _model.linearize(scenario, order)
    n = len(lin)
    if n > limit:
        raise ResourceLimitError(
            f"full expansion over {n} variables exceeds the limit of {limit}",
            count=1 << n,
        )
    aft = scenario.aft
    leaves = []
    for mask in range(1 << n):
        valuation = {var: bool((mask >> (n - 1 - i)) & 1) for i, var in enumerate(lin)}
        leaves.append(1 if _model.eval_structure(aft, valuation) else 0)
    return Fobdd(order=lin, leaves=tuple(leaves))


def reduce_fobdd(tree: Fobdd) -> Robdd:
    """Apply the reduction rules to a fixpoint.

    Merging equal leaves, merging equal-labeled nodes with equal children,
    and bypassing nodes with equal children is exactly what bottom-up
    hash-consing computes; the result is the canonical reduced diagram.
    """
    builder = _Builder(tree.order)
    refs = [TERM1 if bit else TERM0 for bit in tree.leaves]
    for depth in range(len(tree.order) - 1, -1, -1):
        refs = [builder.mk(depth, refs[2 * i], refs[2 * i + 1]) for i in range(len(refs) // 2)]
    return builder.freeze(refs[0])


def isomorphic(a: DecisionDiagram, b: DecisionDiagram) -> bool:
    """Structural equality of the reachable parts, respecting the order."""
    if a.order != b.order:
        return False
    forward: dict[int, int] = {}
    backward: dict[int, int] = {}
    stack = [(a.root, b.root)]
    while stack:
        ra, rb = stack.pop()
        if (ra <= 1) != (rb <= 1):
            return False
        if ra <= 1:
            if ra != rb:
                return False
            continue
        seen = forward.get(ra)
        if seen is not None:
            if seen != rb or backward.get(rb) != ra:
                return False
            continue
        if rb in backward:
            return False
        forward[ra] = rb
        backward[rb] = ra
        na = a.nodes[ra]
        nb = b.nodes[rb]
        if na.pos != nb.pos:  # type: ignore[union-attr]
            return False
        stack.append((na.lo, nb.lo))  # type: ignore[union-attr]
        stack.append((na.hi, nb.hi))  # type: ignore[union-attr]
    return True


def _dot_quote(label: str) -> str:
    return label.replace("\\", "\\\\").replace('"', '\\"')


def to_dot(diagram: DecisionDiagram) -> str:
    """Deterministic DOT rendering: solid edges to the 1-child, dotted to the
    0-child; terminals drawn as boxes."""
    lines = ["digraph decision_diagram {"]
    refs = diagram.reachable_refs()
    for ref in refs:
        if ref <= 1:
            lines.append(f'  n{ref} [shape=box, label="{ref}"];')
        else:
            lines.append(f'  n{ref} [label="{_dot_quote(diagram.var_of(ref))}"];')
    for ref in refs:
        if ref <= 1:
            continue
        node = diagram.nodes[ref]
        lines.append(f"  n{ref} -> n{node.lo} [style=dotted];")  # type: ignore[union-attr]
        lines.append(f"  n{ref} -> n{node.hi};")  # type: ignore[union-attr]
    lines.append("}")
    return "\n".join(lines) + "\n"
