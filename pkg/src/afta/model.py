"""Attack-fault tree models, scenarios, and temporal orders.

An attack-fault tree (AFT) is a rooted DAG of AND/OR gates over two kinds of
leaves: basic component failures (BCFs), which occur randomly with a fixed
probability, and basic attack steps (BASs), which an attacker may trigger at
a cost. The tree induces a monotone Boolean structure function from leaf
states to top-event compromise.

A scenario augments the tree with, per BAS ``a``, the set of BCFs whose
outcome the attacker observes before deciding on ``a``. Observation sets must
form a chain under inclusion; the external format encodes them either through
integer ``block`` indices (everything in an earlier block is observable) or
through explicit ``observes`` lists. From the observation sets we derive a
strict partial "happens-before" order on leaves, and analyses run over total
orders extending it.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from enum import Enum
from types import MappingProxyType
from typing import Iterator, Mapping, Sequence

from .errors import ModelError, OrderConflictError

__all__ = [
    "GateKind",
    "Node",
    "AttackFaultTree",
    "Assignment",
    "QuantifiedScenario",
    "Linearization",
    "parse_model",
    "serialize_model",
    "eval_structure",
    "precedes",
    "linearize",
]

#: A total variable order over the scenario's leaves.
Linearization = tuple[str, ...]


class GateKind(Enum):
    """Node labels: two gate kinds and two leaf kinds."""

    AND = "and"
    OR = "or"
    BAS = "bas"
    BCF = "bcf"

    @property
    def is_leaf(self) -> bool:
        return self in (GateKind.BAS, GateKind.BCF)


@dataclass(frozen=True)
class Node:
    """One AFT node.

    ``prob`` is set on BCF leaves only, ``cost`` on BAS leaves only (it may be
    ``math.inf`` for attacks that are modeled but infeasible). Exactly one of
    the two observation encodings is used per document: ``block`` on every
    leaf, or ``observes`` on every BAS.
    """

    id: str
    kind: GateKind
    children: tuple[str, ...] = ()
    prob: float | None = None
    cost: float | None = None
    block: int | None = None
    observes: frozenset[str] | None = None


def _check_node_fields(node: Node) -> None:
    nid = node.id
    if not isinstance(nid, str) or not nid or any(ch.isspace() for ch in nid):
        raise ModelError(f"invalid node id {nid!r}: ids must be nonempty and contain no whitespace")
    if node.kind.is_leaf:
        if node.children:
            raise ModelError(f"leaf node {nid!r} must not have children")
    else:
        if len(node.children) < 1:
            raise ModelError(f"gate node {nid!r} must have at least one child")
    if node.kind is GateKind.BCF:
        if node.prob is None:
            raise ModelError(f"bcf node {nid!r} is missing its failure probability")
        if isinstance(node.prob, bool) or not isinstance(node.prob, (int, float)):
            raise ModelError(f"bcf node {nid!r} has a non-numeric probability")
        if math.isnan(node.prob) or not 0.0 <= node.prob <= 1.0:
            raise ModelError(f"bcf node {nid!r} has probability {node.prob!r} outside [0, 1]")
    elif node.prob is not None:
        raise ModelError(f"node {nid!r} of kind {node.kind.value} must not carry a probability")
    if node.kind is GateKind.BAS:
        if node.cost is None:
            raise ModelError(f"bas node {nid!r} is missing its attack cost")
        if isinstance(node.cost, bool) or not isinstance(node.cost, (int, float)):
            raise ModelError(f"bas node {nid!r} has a non-numeric cost")
        if math.isnan(node.cost) or node.cost < 0:
            raise ModelError(f"bas node {nid!r} has negative cost {node.cost!r}")
    elif node.cost is not None:
        raise ModelError(f"node {nid!r} of kind {node.kind.value} must not carry a cost")
    if node.block is not None:
        if not node.kind.is_leaf:
            raise ModelError(f"gate node {nid!r} must not carry a block index")
        if isinstance(node.block, bool) or not isinstance(node.block, int):
            raise ModelError(f"node {nid!r} has a non-integer block index")
    if node.observes is not None and node.kind is not GateKind.BAS:
        raise ModelError(f"node {nid!r} of kind {node.kind.value} must not carry an observes list")


@dataclass(frozen=True)
class AttackFaultTree:
    """A validated attack-fault tree: a rooted DAG with typed leaves.

    Construction checks structural invariants (unique ids, known references,
    acyclicity, gate arity, leaf parameters, full reachability from the root)
    and raises :class:`ModelError` on the first violation.
    """

    root: str
    nodes: tuple[Node, ...]

    def __post_init__(self) -> None:
        by_id: dict[str, Node] = {}
        for node in self.nodes:
            _check_node_fields(node)
            if node.id in by_id:
                raise ModelError(f"duplicate node id {node.id!r}")
            by_id[node.id] = node
        if self.root not in by_id:
            raise ModelError(f"root {self.root!r} is not a declared node")
        for node in self.nodes:
            for child in node.children:
                if child not in by_id:
                    raise ModelError(f"node {node.id!r} references unknown node {child!r}")
        self._check_acyclic(by_id)
        reachable = self._reachable(by_id)
        if len(reachable) != len(by_id):
            missing = sorted(set(by_id) - reachable)
            raise ModelError(f"nodes not reachable from root: {missing}")
        object.__setattr__(self, "_by_id", MappingProxyType(by_id))

    def _check_acyclic(self, by_id: Mapping[str, Node]) -> None:
        state: dict[str, int] = {}  # 1 = on stack, 2 = done
        for start in by_id:
            if state.get(start):
                continue
            stack: list[tuple[str, Iterator[str]]] = [(start, iter(by_id[start].children))]
            state[start] = 1
            while stack:
                nid, it = stack[-1]
                child = next(it, None)
                if child is None:
                    state[nid] = 2
                    stack.pop()
                    continue
                mark = state.get(child)
                if mark == 1:
                    raise ModelError(f"cycle detected through node {child!r}")
                if mark is None:
                    state[child] = 1
                    stack.append((child, iter(by_id[child].children)))

    def _reachable(self, by_id: Mapping[str, Node]) -> set[str]:
        seen = {self.root}
        stack = [self.root]
        while stack:
            node = by_id[stack.pop()]
            for child in node.children:
                if child not in seen:
                    seen.add(child)
                    stack.append(child)
        return seen

    def node(self, nid: str) -> Node:
        try:
            return self._by_id[nid]
        except KeyError:
            raise ModelError(f"unknown node {nid!r}") from None

    @property
    def leaves(self) -> tuple[Node, ...]:
        return tuple(n for n in self.nodes if n.kind.is_leaf)

    @property
    def failure_ids(self) -> tuple[str, ...]:
        """BCF leaf ids in document order."""
        return tuple(n.id for n in self.nodes if n.kind is GateKind.BCF)

    @property
    def attack_ids(self) -> tuple[str, ...]:
        """BAS leaf ids in document order."""
        return tuple(n.id for n in self.nodes if n.kind is GateKind.BAS)


@dataclass(frozen=True)
class Assignment:
    """A total valuation of the leaves: which BCFs failed, which BASs fired."""

    failed: Mapping[str, bool]
    attacked: Mapping[str, bool]

    def value(self, leaf: str) -> bool:
        if leaf in self.failed:
            return bool(self.failed[leaf])
        return bool(self.attacked[leaf])


@dataclass(frozen=True)
class QuantifiedScenario:
    """An AFT together with observation sets, probabilities, and costs.

    ``observed[a]`` is the set of BCFs whose outcomes the attacker knows when
    deciding whether to fire ``a``. The family ``{observed[a]}`` is linearly
    ordered by inclusion; this is what makes a consistent temporal reading of
    the scenario possible.
    """

    aft: AttackFaultTree
    failures: tuple[str, ...]
    attacks: tuple[str, ...]
    observed: Mapping[str, frozenset[str]]
    fail_prob: Mapping[str, float]
    attack_cost: Mapping[str, float]

    def __post_init__(self) -> None:
        fail_set = frozenset(self.failures)
        attack_set = frozenset(self.attacks)
        for a in self.attacks:
            extra = self.observed[a] - fail_set
            if extra:
                raise ModelError(f"bas {a!r} observes unknown bcf ids {sorted(extra)}")
        chain = sorted({self.observed[a] for a in self.attacks}, key=len)
        for smaller, larger in zip(chain, chain[1:]):
            if not smaller <= larger:
                raise ModelError(
                    "observation sets are not linearly ordered by inclusion: "
                    f"{sorted(smaller)} vs {sorted(larger)}"
                )
        object.__setattr__(self, "_fail_set", fail_set)
        object.__setattr__(self, "_attack_set", attack_set)
        object.__setattr__(self, "_chain", tuple(chain))

    @classmethod
    def from_tree(cls, aft: AttackFaultTree) -> "QuantifiedScenario":
        """Derive the scenario encoded in a tree's block/observes annotations."""
        failures = aft.failure_ids
        attacks = aft.attack_ids
        bas_nodes = [aft.node(a) for a in attacks]
        with_observes = [n for n in bas_nodes if n.observes is not None]
        observed: dict[str, frozenset[str]]
        if with_observes and len(with_observes) != len(bas_nodes):
            missing = sorted(n.id for n in bas_nodes if n.observes is None)
            raise ModelError(
                f"either every bas carries an observes list or none does; missing on {missing}"
            )
        if with_observes:
            blocked = sorted(n.id for n in aft.leaves if n.block is not None)
            if blocked:
                raise ModelError(
                    f"block indices and observes lists cannot be mixed; blocks on {blocked}"
                )
            observed = {n.id: frozenset(n.observes or ()) for n in bas_nodes}
        else:
            unblocked = sorted(n.id for n in aft.leaves if n.block is None)
            if unblocked:
                raise ModelError(f"leaves missing a block index: {unblocked}")
            fail_blocks = {f: aft.node(f).block for f in failures}
            observed = {
                n.id: frozenset(f for f, b in fail_blocks.items() if b < n.block)  # type: ignore[operator]
                for n in bas_nodes
            }
        fail_prob = {f: float(aft.node(f).prob) for f in failures}  # type: ignore[arg-type]
        attack_cost = {a: float(aft.node(a).cost) for a in attacks}  # type: ignore[arg-type]
        return cls(
            aft=aft,
            failures=failures,
            attacks=attacks,
            observed=MappingProxyType(observed),
            fail_prob=MappingProxyType(fail_prob),
            attack_cost=MappingProxyType(attack_cost),
        )

    @property
    def failure_set(self) -> frozenset[str]:
        return self._fail_set  # type: ignore[attr-defined]

    @property
    def attack_set(self) -> frozenset[str]:
        return self._attack_set  # type: ignore[attr-defined]

    @property
    def observation_chain(self) -> tuple[frozenset[str], ...]:
        """The distinct observation sets, ascending under inclusion."""
        return self._chain  # type: ignore[attr-defined]

    @property
    def uses_blocks(self) -> bool:
        return all(self.aft.node(leaf).block is not None for leaf in self.failures + self.attacks)


def _parse_cost(raw: object, nid: str) -> float:
    if raw == "inf":
        return math.inf
    if isinstance(raw, bool) or not isinstance(raw, (int, float)):
        raise ModelError(f"bas node {nid!r}: cost must be a number or the string \"inf\"")
    return float(raw)


_COMMON_KEYS = {"id", "kind"}
_ALLOWED_KEYS = {
    GateKind.AND: _COMMON_KEYS | {"children"},
    GateKind.OR: _COMMON_KEYS | {"children"},
    GateKind.BCF: _COMMON_KEYS | {"prob", "block"},
    GateKind.BAS: _COMMON_KEYS | {"cost", "block", "observes"},
}


def parse_model(text: str) -> QuantifiedScenario:
    """Parse and validate a JSON model document into a scenario.

    See the package README for the format. Raises :class:`ModelError` on the
    first problem found, with the offending node named in the message.
    """
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ModelError(f"syntax error: {exc}") from None
    if not isinstance(doc, dict):
        raise ModelError("model document must be a JSON object")
    extra = set(doc) - {"root", "nodes"}
    if extra:
        raise ModelError(f"unknown top-level fields: {sorted(extra)}")
    if "root" not in doc or "nodes" not in doc:
        raise ModelError('model document needs "root" and "nodes" fields')
    if not isinstance(doc["root"], str):
        raise ModelError('"root" must be a node id string')
    if not isinstance(doc["nodes"], list):
        raise ModelError('"nodes" must be an array of node objects')

    nodes: list[Node] = []
    for entry in doc["nodes"]:
        if not isinstance(entry, dict):
            raise ModelError("each node must be a JSON object")
        nid = entry.get("id")
        if not isinstance(nid, str):
            raise ModelError(f"node entry without a string id: {entry!r}")
        kind_raw = entry.get("kind")
        try:
            kind = GateKind(kind_raw)
        except ValueError:
            raise ModelError(f"node {nid!r} has unknown kind {kind_raw!r}") from None
        unknown = set(entry) - _ALLOWED_KEYS[kind]
        if unknown:
            raise ModelError(f"node {nid!r} has unknown fields {sorted(unknown)}")

        children: tuple[str, ...] = ()
        if not kind.is_leaf:
            raw_children = entry.get("children")
            if not isinstance(raw_children, list) or not all(isinstance(c, str) for c in raw_children):
                raise ModelError(f"gate node {nid!r} needs a \"children\" array of node ids")
            children = tuple(raw_children)

        observes: frozenset[str] | None = None
        if "observes" in entry:
            raw_obs = entry["observes"]
            if not isinstance(raw_obs, list) or not all(isinstance(f, str) for f in raw_obs):
                raise ModelError(f"bas node {nid!r}: \"observes\" must be an array of bcf ids")
            if len(set(raw_obs)) != len(raw_obs):
                raise ModelError(f"bas node {nid!r}: duplicate entries in \"observes\"")
            observes = frozenset(raw_obs)

        nodes.append(
            Node(
                id=nid,
                kind=kind,
                children=children,
                prob=entry.get("prob"),
                cost=_parse_cost(entry["cost"], nid) if "cost" in entry else None,
                block=entry.get("block"),
                observes=observes,
            )
        )

    aft = AttackFaultTree(root=doc["root"], nodes=tuple(nodes))
    return QuantifiedScenario.from_tree(aft)


def serialize_model(scenario: QuantifiedScenario) -> str:
    """Emit the JSON document for a scenario; inverse of :func:`parse_model`."""
    out_nodes: list[dict[str, object]] = []
    for node in scenario.aft.nodes:
        entry: dict[str, object] = {"id": node.id, "kind": node.kind.value}
        if not node.kind.is_leaf:
            entry["children"] = list(node.children)
        if node.kind is GateKind.BCF:
            entry["prob"] = node.prob
        if node.kind is GateKind.BAS:
            entry["cost"] = "inf" if node.cost == math.inf else node.cost
        if node.block is not None:
            entry["block"] = node.block
        if node.observes is not None:
            entry["observes"] = sorted(node.observes)
        out_nodes.append(entry)
    return json.dumps({"root": scenario.aft.root, "nodes": out_nodes}, indent=2)


def eval_structure(aft: AttackFaultTree, asg: Assignment | Mapping[str, bool]) -> bool:
    """Evaluate the structure function under a total leaf valuation.

    Shared subtrees are evaluated once (the tree may be a DAG).
    """
    if isinstance(asg, Assignment):
        lookup = asg.value
    else:
        lookup = asg.__getitem__
    memo: dict[str, bool] = {}
    stack = [aft.root]
    while stack:
        nid = stack[-1]
        if nid in memo:
            stack.pop()
            continue
        node = aft.node(nid)
        if node.kind.is_leaf:
            memo[nid] = bool(lookup(nid))
            stack.pop()
            continue
        pending = [c for c in node.children if c not in memo]
        if pending:
            stack.extend(pending)
            continue
        values = [memo[c] for c in node.children]
        memo[nid] = any(values) if node.kind is GateKind.OR else all(values)
        stack.pop()
    return memo[aft.root]


def precedes(scenario: QuantifiedScenario, u: str, v: str) -> bool:
    """The strict temporal order on leaves derived from observation sets.

    A BCF precedes a BAS that observes it; a BAS precedes every BCF it does
    not observe; one BAS precedes another if its observation set is a proper
    subset; one BCF precedes another if some BAS observes the first but not
    the second.
    """
    fail_set = scenario.failure_set
    attack_set = scenario.attack_set
    for name in (u, v):
        if name not in fail_set and name not in attack_set:
            raise ModelError(f"unknown leaf {name!r}")
    if u == v:
        return False
    u_fails = u in fail_set
    v_fails = v in fail_set
    if not u_fails and not v_fails:
        return scenario.observed[u] < scenario.observed[v]
    if u_fails and not v_fails:
        return u in scenario.observed[v]
    if not u_fails and v_fails:
        return v not in scenario.observed[u]
    return any(u in q and v not in q for q in scenario.observation_chain)


def _default_order(scenario: QuantifiedScenario) -> Linearization:
    aft = scenario.aft
    if scenario.uses_blocks:
        def key(leaf: str) -> tuple[int, int, str]:
            node = aft.node(leaf)
            return (node.block, 0 if node.kind is GateKind.BAS else 1, leaf)  # type: ignore[return-value]

        return tuple(sorted(scenario.failures + scenario.attacks, key=key))

    # Observation sets were given explicitly: rebuild interleaved pseudo-blocks
    # from the inclusion chain. A BCF first observed at chain rank i sorts just
    # before the BASs of rank i; never-observed BCFs come last.
    chain = scenario.observation_chain
    rank_of = {q: i for i, q in enumerate(chain, start=1)}
    last = 2 * len(chain) + 1

    def first_rank(f: str) -> int:
        for i, q in enumerate(chain, start=1):
            if f in q:
                return 2 * i - 1
        return last

    keyed = [(first_rank(f), f) for f in scenario.failures]
    keyed += [(2 * rank_of[scenario.observed[a]], a) for a in scenario.attacks]
    return tuple(name for _, name in sorted(keyed))


def check_order(scenario: QuantifiedScenario, order: Sequence[str]) -> Linearization:
    """Validate that ``order`` is a permutation of the leaves extending the
    temporal order; return it as a tuple or raise :class:`OrderConflictError`.
    """
    leaves = scenario.failures + scenario.attacks
    if sorted(order) != sorted(leaves):
        raise ModelError("order must be a permutation of the scenario's leaves")
    seq = tuple(order)
    for j, late in enumerate(seq):
        for early in seq[:j]:
            if precedes(scenario, late, early):
                raise OrderConflictError(late, early)
    return seq


def linearize(scenario: QuantifiedScenario, hint: Sequence[str] | None = None) -> Linearization:
    """Produce a total leaf order extending the temporal order.

    Without a hint: ascending block, attack steps before failures within a
    block, alphabetical within those groups (with explicit observation sets,
    equivalent pseudo-blocks are reconstructed from the inclusion chain).
    With a hint: the hint is validated and returned unchanged; the first
    violating pair is reported otherwise.
    """
    if hint is not None:
        return check_order(scenario, hint)
    return _default_order(scenario)
