"""Versioned, line-oriented text formats for proofs (.tcp) and theories (.tc).

Proof file:

    tcp 1
    sig const a, b ; fn s/1 ; pred p/2 ; pair pair ; pairconst c
    theory arith
    root 0
    node 0 : <sequent> ; rule=RtcCase ; params={principal=(...) ; eigenvar=z} ; premises=[1, 2]
    node 2 : <sequent> ; bud -> 0

Theory file:

    theory arith
    sig const 0 ; fn s/1, add/2
    axiom s(x) = 0 |-
    axiom |- add(x, 0) = x

A `sig` or `theory` value of `-` means empty/none.  Blank lines and lines
starting with `#` are ignored.
"""

from __future__ import annotations

import importlib.resources
import os
from dataclasses import dataclass

from .errors import ParseError, RtcError
from .kernel import (RuleId, RuleInstance, RuleParams, Substitution,
                     subst_dict)
from .proofgraph import ProofGraph, ProofNode
from .syntax import (Formula, Sequent, Signature, Term, _Parser, pretty,
                     pretty_sequent, pretty_term)


@dataclass(frozen=True)
class TheoryFile:
    name: str
    signature: Signature
    axioms: tuple[Sequent, ...]


@dataclass
class ProofFile:
    graph: ProofGraph
    signature: Signature
    theory_name: str | None = None


# ---------------------------------------------------------------------------
# Signature lines

def _parse_sig_line(p: _Parser) -> Signature:
    consts: set[str] = set()
    fns: dict[str, int] = {}
    preds: dict[str, int] = {}
    pair_symbol = pair_constant = None
    if p.peek()[1] == "-":
        return Signature.make()
    while True:
        kind, val, pos = p.peek()
        if val == "const":
            p.next()
            consts.add(p.expect_ident())
            while p.peek()[1] == ",":
                p.next()
                consts.add(p.expect_ident())
        elif val == "fn":
            p.next()
            while True:
                name = p.expect_ident()
                p.expect("/")
                fns[name] = int(p.expect_ident())
                if p.peek()[1] != ",":
                    break
                p.next()
        elif val == "pred":
            p.next()
            while True:
                name = p.expect_ident()
                p.expect("/")
                preds[name] = int(p.expect_ident())
                if p.peek()[1] != ",":
                    break
                p.next()
        elif val == "pair":
            p.next()
            pair_symbol = p.expect_ident()
        elif val == "pairconst":
            p.next()
            pair_constant = p.expect_ident()
        else:
            raise ParseError(pos, f"unknown signature section {val!r}")
        if p.peek()[1] == ";":
            p.next()
            continue
        break
    return Signature.make(consts, fns, preds, pair_symbol, pair_constant)


def _sig_line(sig: Signature) -> str:
    parts = []
    if sig.constants:
        parts.append("const " + ", ".join(sorted(sig.constants)))
    if sig.functions:
        parts.append("fn " + ", ".join(f"{n}/{a}" for n, a in sig.functions))
    if sig.predicates:
        parts.append("pred " + ", ".join(f"{n}/{a}" for n, a in sig.predicates))
    if sig.pair_symbol:
        parts.append(f"pair {sig.pair_symbol}")
    if sig.pair_constant:
        parts.append(f"pairconst {sig.pair_constant}")
    return "sig " + (" ; ".join(parts) if parts else "-")


# ---------------------------------------------------------------------------
# Theory files

def parse_theory(text: str) -> TheoryFile:
    name = None
    sig = Signature.make()
    axioms: list[Sequent] = []
    for raw in text.splitlines():
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        if line.startswith("theory"):
            name = line.split(None, 1)[1].strip()
        elif line.startswith("sig"):
            p = _Parser(line[3:].strip(), Signature.make())
            sig = _parse_sig_line(p)
        elif line.startswith("axiom"):
            p = _Parser(line[5:].strip(), sig)
            seq = p.sequent()
            if not p.at_eof():
                raise ParseError(p.peek()[2], "trailing input after axiom")
            axioms.append(seq)
        else:
            raise RtcError(f"unrecognized theory line: {line!r}")
    if name is None:
        raise RtcError("theory file has no 'theory <name>' line")
    return TheoryFile(name, sig, tuple(axioms))


def serialize_theory(th: TheoryFile) -> str:
    lines = [f"theory {th.name}", _sig_line(th.signature)]
    lines += [f"axiom {pretty_sequent(ax, th.signature)}" for ax in th.axioms]
    return "\n".join(lines) + "\n"


def bundled_theory_path(name: str) -> str | None:
    res = importlib.resources.files("rtcproof") / "theories" / f"{name}.tc"
    return str(res) if res.is_file() else None


def load_theory(name_or_path: str) -> TheoryFile:
    """Load a theory from a path, or by bundled name (e.g. 'arith')."""
    path = name_or_path
    if not os.path.exists(path):
        bundled = bundled_theory_path(name_or_path)
        if bundled is None:
            raise RtcError(f"theory {name_or_path!r}: no such file or bundled theory")
        path = bundled
    with open(path, encoding="utf-8") as fh:
        return parse_theory(fh.read())


# ---------------------------------------------------------------------------
# Rule parameter serialization

def _params_text(params: RuleParams, sig: Signature) -> str:
    out = []
    if params.principal is not None:
        out.append(f"principal=({pretty(params.principal, sig)})")
    if params.witness is not None:
        out.append(f"witness=({pretty_term(params.witness, sig)})")
    if params.eigenvar is not None:
        out.append(f"eigenvar={params.eigenvar}")
    if params.eigenvar2 is not None:
        out.append(f"eigenvar2={params.eigenvar2}")
    if params.template is not None:
        f, x = params.template
        out.append(f"template=(({pretty(f, sig)}), {x})")
    if params.substitution is not None:
        items = ", ".join(f"{v} := {pretty_term(t, sig)}"
                          for v, t in params.substitution)
        out.append(f"subst=[{items}]")
    if params.source is not None:
        out.append(f"source=({pretty_sequent(params.source, sig)})")
    if params.cut_formula is not None:
        out.append(f"cut=({pretty(params.cut_formula, sig)})")
    if params.cut_left is not None:
        out.append(f"cutleft=({pretty_sequent(params.cut_left, sig)})")
    if params.cut_right is not None:
        out.append(f"cutright=({pretty_sequent(params.cut_right, sig)})")
    return "{" + " ; ".join(out) + "}"


def _parse_params(p: _Parser) -> RuleParams:
    kw: dict = {}
    p.expect("{")
    while p.peek()[1] != "}":
        key = p.expect_ident()
        p.expect("=")
        if key in ("eigenvar", "eigenvar2"):
            kw[key] = p.expect_ident()
        elif key in ("principal", "cut"):
            p.expect("(")
            f = p.formula()
            p.expect(")")
            kw["principal" if key == "principal" else "cut_formula"] = f
        elif key == "witness":
            p.expect("(")
            t = p.term()
            p.expect(")")
            kw["witness"] = t
        elif key == "template":
            p.expect("(")
            p.expect("(")
            f = p.formula()
            p.expect(")")
            p.expect(",")
            x = p.expect_ident()
            p.expect(")")
            kw["template"] = (f, x)
        elif key == "subst":
            p.expect("[")
            pairs: list[tuple[str, Term]] = []
            while p.peek()[1] != "]":
                v = p.expect_ident()
                p.expect(":=")
                pairs.append((v, p.term()))
                if p.peek()[1] == ",":
                    p.next()
            p.expect("]")
            kw["substitution"] = tuple(sorted(pairs))
        elif key in ("source", "cutleft", "cutright"):
            p.expect("(")
            seq = p.sequent()
            p.expect(")")
            field = {"source": "source", "cutleft": "cut_left",
                     "cutright": "cut_right"}[key]
            kw[field] = seq
        else:
            raise ParseError(p.peek()[2], f"unknown parameter {key!r}")
        if p.peek()[1] == ";":
            p.next()
    p.expect("}")
    return RuleParams(**kw)


# ---------------------------------------------------------------------------
# Proof files

def serialize_proof(pf: ProofFile) -> str:
    g, sig = pf.graph, pf.signature
    lines = ["tcp 1", _sig_line(sig), f"theory {pf.theory_name or '-'}", f"root {g.root}"]
    for nid in sorted(g.nodes):
        node = g.nodes[nid]
        seq = pretty_sequent(node.sequent, sig)
        if node.is_bud:
            lines.append(f"node {nid} : {seq} ; bud -> {node.companion}")
        else:
            prem = "[" + ", ".join(str(c) for c in node.children) + "]"
            lines.append(f"node {nid} : {seq} ; rule={node.rule.rule.value}"
                         f" ; params={_params_text(node.rule.params, sig)}"
                         f" ; premises={prem}")
    return "\n".join(lines) + "\n"


def parse_proof(text: str) -> ProofFile:
    sig = Signature.make()
    theory_name: str | None = None
    root: int | None = None
    raw_nodes: list[tuple[int, str]] = []
    saw_header = False
    for raw in text.splitlines():
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        if line.startswith("tcp"):
            if line.split() != ["tcp", "1"]:
                raise RtcError(f"unsupported proof format version: {line!r}")
            saw_header = True
        elif line.startswith("sig"):
            p = _Parser(line[3:].strip(), Signature.make())
            sig = _parse_sig_line(p)
        elif line.startswith("theory"):
            val = line.split(None, 1)[1].strip()
            theory_name = None if val == "-" else val
        elif line.startswith("root"):
            root = int(line.split(None, 1)[1].strip())
        elif line.startswith("node"):
            head, rest = line.split(None, 1)[1].split(":", 1)
            raw_nodes.append((int(head.strip()), rest.strip()))
        else:
            raise RtcError(f"unrecognized proof line: {line!r}")
    if not saw_header:
        raise RtcError("missing 'tcp 1' header")
    if root is None:
        raise RtcError("missing 'root' line")

    nodes: dict[int, ProofNode] = {}
    for nid, body in raw_nodes:
        p = _Parser(body, sig)
        seq = p.sequent()
        p.expect(";")
        if p.peek()[1] == "bud":
            p.next()
            p.expect("->")
            comp = int(p.expect_ident())
            nodes[nid] = ProofNode(seq, None, (), comp)
            continue
        kind, val, pos = p.peek()
        if val != "rule":
            raise ParseError(pos, "expected 'rule=' or 'bud ->'")
        p.next()
        p.expect("=")
        rule_name = p.expect_ident()
        try:
            rid = RuleId(rule_name)
        except ValueError:
            raise RtcError(f"unknown rule id {rule_name!r}") from None
        p.expect(";")
        kind, val, pos = p.peek()
        if val != "params":
            raise ParseError(pos, "expected 'params='")
        p.next()
        p.expect("=")
        params = _parse_params(p)
        p.expect(";")
        kind, val, pos = p.peek()
        if val != "premises":
            raise ParseError(pos, "expected 'premises='")
        p.next()
        p.expect("=")
        p.expect("[")
        children: list[int] = []
        while p.peek()[1] != "]":
            children.append(int(p.expect_ident()))
            if p.peek()[1] == ",":
                p.next()
        p.expect("]")
        nodes[nid] = ProofNode(seq, None, tuple(children), None)
        # premises are the children's sequents; resolved in a second pass
        nodes[nid].rule = (rid, params)  # type: ignore[assignment]

    for nid, node in nodes.items():
        if isinstance(node.rule, tuple):
            rid, params = node.rule
            try:
                prems = tuple(nodes[c].sequent for c in node.children)
            except KeyError as exc:
                raise RtcError(f"node {nid}: child {exc.args[0]} missing") from None
            node.rule = RuleInstance(rid, node.sequent, prems, params)
    return ProofFile(ProofGraph(nodes, root), sig, theory_name)
