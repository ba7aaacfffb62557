"""Deciding the global trace condition for cyclic pre-proofs.

The primary procedure is a Ramsey-style composition closure over per-edge
trace matrices: the pre-proof is accepted iff every idempotent composed
matrix describing a cycle contains a progressing diagonal pair.  A bounded
ultimately-periodic path enumeration provides an independent cross-check,
and Johnson-style basic-cycle enumeration supports the normality test.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass

import networkx as nx

from .errors import BudgetExceeded
from .proofgraph import ProofGraph, edge_trace_steps


class EdgeMatrix:
    """Relation between antecedent rtc formulas (by canonical key) across an
    edge or path, with a progress flag per pair; composition keeps the
    maximal progress over connecting chains."""

    __slots__ = ("d", "_key")

    def __init__(self, entries: dict[tuple[str, str], bool]):
        self.d = entries
        self._key = frozenset(entries.items())

    def compose(self, other: "EdgeMatrix") -> "EdgeMatrix":
        by_src: dict[str, list[tuple[str, bool]]] = {}
        for (a, b), p in other.d.items():
            by_src.setdefault(a, []).append((b, p))
        out: dict[tuple[str, str], bool] = {}
        for (a, b), p in self.d.items():
            for c, q in by_src.get(b, ()):
                key = (a, c)
                flag = p or q
                if flag or key not in out:
                    out[key] = out.get(key, False) or flag
        return EdgeMatrix(out)

    def is_idempotent(self) -> bool:
        return self.compose(self) == self

    def has_progressing_diagonal(self) -> bool:
        return any(a == b and p for (a, b), p in self.d.items())

    def idempotent_power(self) -> "EdgeMatrix":
        """The unique idempotent in the cyclic semigroup generated by self."""
        powers = [self]
        seen = {self._key: 0}
        cur = self
        while True:
            cur = cur.compose(self)
            k = cur._key
            if k in seen:
                first = seen[k]
                period = len(powers) - first
                exp = first
                while (exp + 1) % period != 0:  # exponents are index+1
                    exp += 1
                return powers[exp]
            seen[k] = len(powers)
            powers.append(cur)

    def __eq__(self, other: object) -> bool:
        return isinstance(other, EdgeMatrix) and self._key == other._key

    def __hash__(self) -> int:
        return hash(self._key)

    def __repr__(self) -> str:
        return f"EdgeMatrix({sorted(self.d.items())!r})"


@dataclass(frozen=True)
class FlowEdge:
    src: int
    dst: int             # buds redirected to their companions
    matrix: EdgeMatrix


@dataclass
class CycleReport:
    verdict: str                              # accepted | rejected | indeterminate
    witness_prefix: tuple[int, ...] = ()
    witness_period: tuple[int, ...] = ()
    witness_edges: tuple[FlowEdge, ...] = ()  # edges realizing the period
    detail: str = ""

    @property
    def accepted(self) -> bool:
        return self.verdict == "accepted"


def flow_edges(g: ProofGraph) -> list[FlowEdge]:
    """Edges of the unfolded graph; a premise landing on a bud continues to
    the bud's companion (the bud-to-companion step is an identity matrix)."""
    out: list[FlowEdge] = []
    for nid in sorted(g.nodes):
        node = g.nodes[nid]
        if node.is_bud:
            continue
        for i, cid in enumerate(node.children):
            steps = edge_trace_steps(node.rule, i)
            entries: dict[tuple[str, str], bool] = {}
            for st in steps:
                key = (st.from_formula.key(), st.to_formula.key())
                entries[key] = entries.get(key, False) or st.progressing
            child = g.nodes[cid]
            dst = child.companion if child.is_bud else cid
            out.append(FlowEdge(nid, dst, EdgeMatrix(entries)))
    return out


def _flow_root(g: ProofGraph) -> int:
    node = g.nodes[g.root]
    return node.companion if node.is_bud else g.root


def _shortest_path(edges: list[FlowEdge], src: int, dst: int) -> tuple[int, ...]:
    if src == dst:
        return (src,)
    succ: dict[int, list[int]] = {}
    for e in edges:
        succ.setdefault(e.src, []).append(e.dst)
    prev: dict[int, int] = {src: src}
    queue = deque([src])
    while queue:
        u = queue.popleft()
        for w in sorted(succ.get(u, ())):
            if w not in prev:
                prev[w] = u
                if w == dst:
                    path = [dst]
                    while path[-1] != src:
                        path.append(prev[path[-1]])
                    return tuple(reversed(path))
                queue.append(w)
    return ()


def check_global_trace_condition(g: ProofGraph, closure_cap: int = 500_000) -> CycleReport:
    """Composition-closure decision of the global trace condition.

    Accepted iff every idempotent path matrix looping at a node has a
    progressing diagonal pair; a violating idempotent yields a rejection
    witness (an ultimately periodic path).  Above closure_cap distinct path
    matrices the verdict is indeterminate.
    """
    edges = flow_edges(g)
    # closure elements: (src, dst, matrix) with a representative edge path
    paths: dict[tuple[int, int, frozenset], tuple[FlowEdge, ...]] = {}
    queue: deque[tuple[int, int, EdgeMatrix]] = deque()

    def add(src: int, dst: int, mat: EdgeMatrix, path: tuple[FlowEdge, ...]) -> bool:
        key = (src, dst, mat._key)
        if key in paths:
            return False
        if len(paths) >= closure_cap:
            raise BudgetExceeded("closure cap reached")
        paths[key] = path
        queue.append((src, dst, mat))
        return True

    try:
        for e in edges:
            add(e.src, e.dst, e.matrix, (e,))
        while queue:
            src, dst, mat = queue.popleft()
            # compose with single edges on the right (left-linear closure is
            # enough: every path is a left fold of its edges)
            for e in edges:
                if e.src == dst:
                    add(src, e.dst, mat.compose(e.matrix),
                        paths[(src, dst, mat._key)] + (e,))
    except BudgetExceeded:
        return CycleReport("indeterminate", detail="closure cap exceeded")

    for (src, dst, mkey), path in sorted(paths.items(),
                                         key=lambda kv: (kv[0][0], len(kv[1]))):
        if src != dst:
            continue
        mat = EdgeMatrix(dict(mkey))
        if mat.is_idempotent() and not mat.has_progressing_diagonal():
            period = (src,) + tuple(e.dst for e in path)
            prefix = _shortest_path(edges, _flow_root(g), src)
            return CycleReport("rejected", prefix, period, path,
                               detail="idempotent cycle without progress")
    return CycleReport("accepted")


def check_by_path_enumeration(g: ProofGraph, max_period: int) -> CycleReport:
    """Bounded independent check: examine every ultimately periodic path with
    period length <= max_period; a period is bad iff the idempotent power of
    its composed matrix lacks a progressing diagonal pair."""
    edges = flow_edges(g)
    succ: dict[int, list[FlowEdge]] = {}
    for e in edges:
        succ.setdefault(e.src, []).append(e)
    for lst in succ.values():
        lst.sort(key=lambda e: e.dst)

    nxg = nx.DiGraph()
    nxg.add_nodes_from(n for n in g.nodes if not g.nodes[n].is_bud)
    nxg.add_edges_from((e.src, e.dst) for e in edges)
    scc_of: dict[int, frozenset[int]] = {}
    for comp in nx.strongly_connected_components(nxg):
        fs = frozenset(comp)
        for n in comp:
            scc_of[n] = fs

    def dist_back(start: int, allowed: frozenset[int]) -> dict[int, int]:
        pred: dict[int, list[int]] = {}
        for e in edges:
            if e.src in allowed and e.dst in allowed:
                pred.setdefault(e.dst, []).append(e.src)
        dist = {start: 0}
        queue = deque([start])
        while queue:
            u = queue.popleft()
            for p in pred.get(u, ()):
                if p not in dist:
                    dist[p] = dist[u] + 1
                    queue.append(p)
        return dist

    for start in sorted(n for n in nxg.nodes):
        comp = scc_of[start]
        if len(comp) == 1 and not any(e.src == start and e.dst == start for e in edges):
            continue
        allowed = frozenset(n for n in comp if n >= start)
        if start not in allowed:
            continue
        back = dist_back(start, allowed)

        # DFS over edge walks start -> ... -> start of length <= max_period,
        # visiting only nodes >= start (each cyclic walk counted once)
        stack: list[tuple[int, tuple[FlowEdge, ...]]] = [(start, ())]
        while stack:
            node, walk = stack.pop()
            for e in succ.get(node, ()):
                if e.dst == start:
                    cyc = walk + (e,)
                    mat = cyc[0].matrix
                    for e2 in cyc[1:]:
                        mat = mat.compose(e2.matrix)
                    if not mat.idempotent_power().has_progressing_diagonal():
                        period = (start,) + tuple(x.dst for x in cyc)
                        prefix = _shortest_path(edges, _flow_root(g), start)
                        return CycleReport("rejected", prefix, period, cyc,
                                           detail="bad period found by enumeration")
                if e.dst in allowed and e.dst != start:
                    needed = back.get(e.dst)
                    if needed is not None and len(walk) + 1 + needed <= max_period:
                        stack.append((e.dst, walk + (e,)))
    return CycleReport("accepted")


def enumerate_basic_cycles(g: ProofGraph, cap: int = 100_000) -> list[tuple[int, ...]]:
    """All basic cycles of the unfolded graph, canonically rotated so the
    smallest node id comes first, in deterministic order."""
    edges = flow_edges(g)
    nxg = nx.DiGraph()
    nxg.add_nodes_from(n for n in g.nodes if not g.nodes[n].is_bud)
    nxg.add_edges_from((e.src, e.dst) for e in edges)
    out: list[tuple[int, ...]] = []
    for cyc in nx.simple_cycles(nxg):
        k = cyc.index(min(cyc))
        out.append(tuple(cyc[k:] + cyc[:k]))
        if len(out) > cap:
            raise BudgetExceeded(f"more than {cap} basic cycles")
    out.sort(key=lambda c: (len(c), c))
    return out


def is_non_overlapping(g: ProofGraph, cap: int = 100_000) -> bool:
    """True iff no two distinct basic cycles share a node."""
    cycles = enumerate_basic_cycles(g, cap)
    seen: set[int] = set()
    for cyc in cycles:
        if seen & set(cyc):
            return False
        seen |= set(cyc)
    return True


def replay_witness(report: CycleReport) -> bool:
    """Recompose the rejection witness and confirm no idempotent power of the
    period matrix has a progressing diagonal pair."""
    if report.verdict != "rejected" or not report.witness_edges:
        return False
    mat = report.witness_edges[0].matrix
    for e in report.witness_edges[1:]:
        mat = mat.compose(e.matrix)
    return not mat.idempotent_power().has_progressing_diagonal()
