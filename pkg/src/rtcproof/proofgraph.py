"""Cyclic pre-proofs as finite graphs with bud/companion assignment.

A node is either internal (carries a rule instance whose premises are its
children, in order) or a bud: an open leaf pointing back at a syntactically
equal internal node, its companion.  `validate_structure` checks the graph
invariants plus every rule instance; `trace_relation` computes the
per-edge trace pairs between antecedent rtc formulas.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from .errors import SchemaMismatch
from .kernel import (RuleId, RuleInstance, check_rule_instance, rule_instance,
                     subst_dict)
from .syntax import Formula, Rtc, Sequent, Signature, Var, substitute


@dataclass
class ProofNode:
    sequent: Sequent
    rule: RuleInstance | None = None      # None for buds
    children: tuple[int, ...] = ()
    companion: int | None = None          # set for buds

    @property
    def is_bud(self) -> bool:
        return self.rule is None


@dataclass
class ProofGraph:
    nodes: dict[int, ProofNode]
    root: int

    def node(self, nid: int) -> ProofNode:
        return self.nodes[nid]

    def internal_ids(self) -> list[int]:
        return [i for i in sorted(self.nodes) if not self.nodes[i].is_bud]

    def bud_ids(self) -> list[int]:
        return [i for i in sorted(self.nodes) if self.nodes[i].is_bud]

    def end_sequent(self) -> Sequent:
        return self.nodes[self.root].sequent


@dataclass(frozen=True)
class GraphError:
    kind: str          # BadPremiseLink | BudMismatch | KernelError | UnreachableNode
    node: int
    detail: str

    def __str__(self) -> str:
        return f"{self.kind} at node {self.node}: {self.detail}"


def validate_structure(g: ProofGraph, theory: tuple[Sequent, ...] = (),
                       sig: Signature | None = None) -> list[GraphError]:
    """Empty list iff the graph is a well-formed pre-proof."""
    errors: list[GraphError] = []
    if g.root not in g.nodes:
        return [GraphError("BadPremiseLink", g.root, "root node does not exist")]

    for nid in sorted(g.nodes):
        node = g.nodes[nid]
        if node.is_bud:
            comp = node.companion
            if comp is None or comp not in g.nodes:
                errors.append(GraphError("BudMismatch", nid, "companion missing"))
                continue
            target = g.nodes[comp]
            if target.is_bud:
                errors.append(GraphError("BudMismatch", nid,
                                         f"companion {comp} is itself a bud"))
            elif target.sequent != node.sequent:
                errors.append(GraphError(
                    "BudMismatch", nid,
                    f"bud sequent {node.sequent} differs from companion's {target.sequent}"))
            if node.children:
                errors.append(GraphError("BadPremiseLink", nid, "bud has children"))
            continue
        rule = node.rule
        if rule.conclusion != node.sequent:
            errors.append(GraphError(
                "BadPremiseLink", nid,
                f"stored sequent {node.sequent} differs from rule conclusion {rule.conclusion}"))
        if len(node.children) != len(rule.premises):
            errors.append(GraphError(
                "BadPremiseLink", nid,
                f"{len(rule.premises)} premises but {len(node.children)} children"))
        else:
            for i, (cid, prem) in enumerate(zip(node.children, rule.premises)):
                if cid not in g.nodes:
                    errors.append(GraphError("BadPremiseLink", nid,
                                             f"child {cid} does not exist"))
                elif g.nodes[cid].sequent != prem:
                    errors.append(GraphError(
                        "BadPremiseLink", nid,
                        f"premise {i} is {prem} but child {cid} holds {g.nodes[cid].sequent}"))
        try:
            check_rule_instance(rule, theory, sig)
        except SchemaMismatch as exc:
            errors.append(GraphError("KernelError", nid, str(exc)))
        except Exception as exc:  # freshness, unknown axiom, arity...
            errors.append(GraphError("KernelError", nid, f"{type(exc).__name__}: {exc}"))

    reachable = set()
    stack = [g.root]
    while stack:
        nid = stack.pop()
        if nid in reachable or nid not in g.nodes:
            continue
        reachable.add(nid)
        stack.extend(g.nodes[nid].children)
    for nid in sorted(set(g.nodes) - reachable):
        errors.append(GraphError("UnreachableNode", nid, "not reachable from root"))

    # premise links must form a DAG: cycles are expressed through buds only
    color: dict[int, int] = {}

    def cyclic(nid: int) -> bool:
        state = color.get(nid, 0)
        if state == 1:
            return True
        if state == 2 or nid not in g.nodes:
            return False
        color[nid] = 1
        bad = any(cyclic(c) for c in g.nodes[nid].children)
        color[nid] = 2
        return bad

    if cyclic(g.root):
        errors.append(GraphError("BadPremiseLink", g.root,
                                 "premise links contain a cycle (use buds)"))
    return errors


# ---------------------------------------------------------------------------
# Trace pairs

@dataclass(frozen=True)
class TraceStep:
    """Trace pair across one edge: both formulas are antecedent rtc formulas;
    progressing only from an RtcCase principal to its immediate ancestor."""

    from_formula: Formula
    to_formula: Formula
    progressing: bool


def edge_trace_steps(rule: RuleInstance, premise_index: int) -> tuple[TraceStep, ...]:
    """All trace pairs licensed across premise_index of this rule instance."""
    concl_rtcs = [f for f in rule.conclusion.antecedent if isinstance(f, Rtc)]
    prem_rtcs = [f for f in rule.premises[premise_index].antecedent if isinstance(f, Rtc)]
    steps: list[TraceStep] = []
    if rule.rule is RuleId.Subst:
        theta = subst_dict(rule.params.substitution)
        concl_set = set(concl_rtcs)
        for tp in prem_rtcs:
            inst = substitute(tp, theta)
            if inst in concl_set:
                steps.append(TraceStep(inst, tp, False))
        return tuple(steps)
    if rule.rule is RuleId.RtcCase and premise_index == 1:
        prin = rule.params.principal
        ancestor = Rtc(prin.x, prin.y, prin.body, prin.src, Var(rule.params.eigenvar))
        steps.append(TraceStep(prin, ancestor, True))
    prem_set = set(prem_rtcs)
    for f in concl_rtcs:
        if f in prem_set:
            steps.append(TraceStep(f, f, False))
    return tuple(steps)


TraceRelation = dict[tuple[int, int], tuple[TraceStep, ...]]


def trace_relation(g: ProofGraph) -> TraceRelation:
    """Per (node, premise-index) trace pairs; bud edges carry identity steps."""
    rel: TraceRelation = {}
    for nid in sorted(g.nodes):
        node = g.nodes[nid]
        if node.is_bud:
            steps = tuple(TraceStep(f, f, False)
                          for f in node.sequent.antecedent if isinstance(f, Rtc))
            rel[(nid, 0)] = steps
        else:
            for i in range(len(node.children)):
                rel[(nid, i)] = edge_trace_steps(node.rule, i)
    return rel


# ---------------------------------------------------------------------------
# Construction helper

class GraphBuilder:
    """Incremental graph construction with forward references for companions."""

    def __init__(self):
        self.nodes: dict[int, ProofNode] = {}
        self._next = 0

    def reserve(self) -> int:
        nid = self._next
        self._next += 1
        return nid

    def fill_internal(self, nid: int, rule: RuleInstance, children: tuple[int, ...]) -> int:
        self.nodes[nid] = ProofNode(rule.conclusion, rule, children)
        return nid

    def fill_bud(self, nid: int, seq: Sequent, companion: int) -> int:
        self.nodes[nid] = ProofNode(seq, None, (), companion)
        return nid

    def add_internal(self, rule: RuleInstance, children: tuple[int, ...] = ()) -> int:
        return self.fill_internal(self.reserve(), rule, children)

    def add_bud(self, seq: Sequent, companion: int) -> int:
        return self.fill_bud(self.reserve(), seq, companion)

    def add_axiom_closure(self, seq: Sequent, phi: Formula) -> int:
        """Close Γ, phi |- phi, Δ by the documented macro: Axiom + weakenings."""
        current = Sequent((phi,), (phi,))
        nid = self.add_internal(rule_instance(RuleId.Axiom, current))
        for f in seq.antecedent:
            if f != phi:
                parent = current.with_ant(f)
                nid = self.add_internal(
                    rule_instance(RuleId.WL, parent, principal=f), (nid,))
                current = parent
        for f in seq.succedent:
            if f != phi:
                parent = current.with_succ(f)
                nid = self.add_internal(
                    rule_instance(RuleId.WR, parent, principal=f), (nid,))
                current = parent
        assert current == seq
        return nid

    def add_weakening_chain(self, target: Sequent, child_id: int) -> int:
        """Grow child's sequent up to target with WL/WR; child must be contained."""
        nid = child_id
        current = self.nodes[child_id].sequent
        assert target.contains(current), "weakening chain needs a contained child"
        for f in target.antecedent:
            if f not in set(current.antecedent):
                parent = current.with_ant(f)
                nid = self.add_internal(
                    rule_instance(RuleId.WL, parent, principal=f), (nid,))
                current = parent
        for f in target.succedent:
            if f not in set(current.succedent):
                parent = current.with_succ(f)
                nid = self.add_internal(
                    rule_instance(RuleId.WR, parent, principal=f), (nid,))
                current = parent
        assert current == target
        return nid

    def graph(self, root: int) -> ProofGraph:
        return ProofGraph(dict(self.nodes), root)


def renumber(g: ProofGraph) -> ProofGraph:
    """Renumber nodes into a stable preorder walk from the root (0, 1, ...)."""
    order: list[int] = []
    seen: set[int] = set()

    def walk(nid: int) -> None:
        if nid in seen:
            return
        seen.add(nid)
        order.append(nid)
        for c in g.nodes[nid].children:
            walk(c)

    walk(g.root)
    for nid in sorted(g.nodes):
        walk(nid)
    mapping = {old: new for new, old in enumerate(order)}
    nodes = {}
    for old, node in g.nodes.items():
        nodes[mapping[old]] = ProofNode(
            node.sequent, node.rule,
            tuple(mapping[c] for c in node.children),
            None if node.companion is None else mapping[node.companion])
    return ProofGraph(nodes, mapping[g.root])
