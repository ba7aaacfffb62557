"""Syntactic translations.

* `derive_induction` builds the cyclic derivation that simulates the
  explicit induction rule: a Subst / RtcCase / Cut / Subst cycle around a
  companion, leaving the induction-step sequent as the single open premise.
* `explicit_to_cyclic` rewrites a finite proof using explicit induction into
  a cyclic proof with one cycle per eliminated induction node.
* `beta_translate` eliminates the transitive-closure operator over the
  arithmetic signature via a beta-function predicate.
* `encode_rtc2` encodes closures of 4-ary relations using ordered pairs.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from .errors import (FreshnessViolation, MissingPairSymbol, NotApplicable,
                     SignatureMismatch, VariableClash)
from .kernel import (RuleId, RuleInstance, RuleParams, make_subst,
                     rule_instance)
from .proofgraph import GraphBuilder, ProofGraph, ProofNode, renumber
from .syntax import (And, App, Const, Eq, Exists, Forall, Formula, Implies,
                     Not, Or, Pred, Rtc, Sequent, Signature, Term, Var,
                     all_names, formula_subterms, free_vars, fresh_name,
                     substitute, term_vars)

ARITH_SIGNATURE = Signature.make(constants={"0"}, functions={"s": 1, "add": 2})


@dataclass
class Fragment:
    """A proof graph with one open premise, to be closed by a subproof."""

    nodes: dict[int, ProofNode]
    root: int
    open_id: int
    open_sequent: Sequent

    def close(self, subproof: ProofGraph) -> ProofGraph:
        """Splice subproof (whose end-sequent must equal the open premise)."""
        if subproof.end_sequent() != self.open_sequent:
            raise NotApplicable(
                f"subproof concludes {subproof.end_sequent()}, "
                f"fragment needs {self.open_sequent}")
        base = max(self.nodes) + 1
        mapping = {}
        for old in sorted(subproof.nodes):
            mapping[old] = self.open_id if old == subproof.root else base + old
        nodes = dict(self.nodes)
        del nodes[self.open_id]
        for old, node in subproof.nodes.items():
            nodes[mapping[old]] = ProofNode(
                node.sequent, node.rule,
                tuple(mapping[c] for c in node.children),
                None if node.companion is None else mapping[node.companion])
        return renumber(ProofGraph(nodes, self.root))


def derive_induction(gamma: tuple[Formula, ...], delta: tuple[Formula, ...],
                     phi: Formula, psi: Formula, x: str, y: str,
                     s: Term, t: Term, v: str | None = None,
                     w: str | None = None, z: str | None = None) -> Fragment:
    """Cyclic simulation of the explicit induction rule.

    Root conclusion: Γ, ψ[s/x], (rtc x y. φ)(s, t) |- Δ, ψ[t/x], with the
    induction-step sequent Γ, ψ, φ |- Δ, ψ[y/x] as the one open premise.
    phi and psi are given with their free variables x (and y for phi).
    """
    ctx = Sequent(gamma, delta)
    ctx_vars = ctx.free_vars()
    if x == y:
        raise FreshnessViolation(y, "induction variables must be distinct")
    if x in ctx_vars:
        raise FreshnessViolation(x, "occurs free in the context")
    if y in ctx_vars | (free_vars(psi) - {x}):
        raise FreshnessViolation(y, "occurs free in the context or template")

    taken = (ctx_vars | free_vars(phi) | free_vars(psi)
             | term_vars(s) | term_vars(t) | {x, y})
    picked: list[str] = []
    for given, hint in ((v, "v"), (w, "w"), (z, "z")):
        if given is None:
            name = hint if hint not in taken and hint not in picked else \
                fresh_name(taken | set(picked), hint=hint)
            picked.append(name)
        else:
            if given in taken or given in picked:
                raise FreshnessViolation(given, "not fresh for this instance")
            picked.append(given)
    v, w, z = picked

    closure = Rtc(x, y, phi, Var(v), Var(w))
    psi_v = substitute(psi, {x: Var(v)})
    psi_w = substitute(psi, {x: Var(w)})
    psi_z = substitute(psi, {x: Var(z)})
    psi_s = substitute(psi, {x: s})
    psi_t = substitute(psi, {x: t})
    phi_zw = substitute(phi, {x: Var(z), y: Var(w)})

    companion_seq = Sequent(gamma + (psi_v, closure), delta + (psi_w,))
    root_seq = Sequent(gamma + (psi_s, Rtc(x, y, phi, s, t)), delta + (psi_t,))
    open_seq = Sequent(gamma + (psi, phi), delta + (substitute(psi, {x: Var(y)}),))

    b = GraphBuilder()
    root = b.reserve()
    companion = b.reserve()

    # left case branch: v = w, close by rewriting psi[v/x] into psi[w/x]
    case = rule_instance(RuleId.RtcCase, companion_seq, principal=closure, eigenvar=z)
    eq_prem = case.premises[0]
    eql = rule_instance(RuleId.EqL1, eq_prem, principal=Eq(Var(v), Var(w)),
                        template=(psi, x))
    ax = b.add_axiom_closure(eql.premises[0], psi_v)
    n_eq = b.add_internal(eql, (ax,))

    # right case branch: cut on psi[z/x]
    step_prem = case.premises[1]
    cut_left = Sequent(gamma + (psi_v, Rtc(x, y, phi, Var(v), Var(z))), delta)
    cut_right = Sequent(gamma + (phi_zw,), delta + (psi_w,))
    cut = rule_instance(RuleId.Cut, step_prem, cut_formula=psi_z,
                        cut_left=cut_left, cut_right=cut_right)

    # cut premise 0: substitute w := z in the companion, then loop back
    sub_back = rule_instance(RuleId.Subst, cut.premises[0],
                             substitution=make_subst({w: Var(z)}),
                             source=companion_seq)
    bud = b.add_bud(companion_seq, companion)
    n_back = b.add_internal(sub_back, (bud,))

    # cut premise 1: substitute x := z, y := w in the open induction step
    sub_step = rule_instance(RuleId.Subst, cut.premises[1],
                             substitution=make_subst({x: Var(z), y: Var(w)}),
                             source=open_seq)
    open_id = b.reserve()
    n_step = b.add_internal(sub_step, (open_id,))

    n_cut = b.add_internal(cut, (n_back, n_step))
    b.fill_internal(companion, case, (n_eq, n_cut))
    root_rule = rule_instance(RuleId.Subst, root_seq,
                              substitution=make_subst({v: s, w: t}),
                              source=companion_seq)
    b.fill_internal(root, root_rule, (companion,))
    b.nodes[open_id] = ProofNode(open_seq, None, (), None)  # placeholder
    return Fragment(b.nodes, root, open_id, open_seq)


def explicit_to_cyclic(p: ProofGraph, sig: Signature | None = None) -> ProofGraph:
    """Replace every explicit-induction node by its cyclic simulation.

    The input must be a finite proof (no buds); the output has the same
    end-sequent, no RtcInd node, and one extra cycle per replaced node.
    """
    if any(node.is_bud for node in p.nodes.values()):
        raise NotApplicable("input proof must be finite (no buds)")

    def rebuild(nid: int) -> ProofGraph:
        node = p.nodes[nid]
        children = [rebuild(c) for c in node.children]
        if node.rule.rule is not RuleId.RtcInd:
            b = GraphBuilder()
            root = b.reserve()
            child_ids = []
            for sub in children:
                base = b._next
                for old in sorted(sub.nodes):
                    b.reserve()
                for old, sn in sub.nodes.items():
                    b.nodes[base + old] = ProofNode(
                        sn.sequent, sn.rule,
                        tuple(base + c for c in sn.children),
                        None if sn.companion is None else base + sn.companion)
                child_ids.append(base + sub.root)
            b.fill_internal(root, node.rule, tuple(child_ids))
            return b.graph(root)
        params = node.rule.params
        prin: Rtc = params.principal
        psi_tmpl, tvar = params.template
        x, y = params.eigenvar, params.eigenvar2
        psi_x = substitute(psi_tmpl, {tvar: Var(x)})
        phi_xy = substitute(prin.body, {prin.x: Var(x), prin.y: Var(y)})
        concl = node.rule.conclusion
        psi_s = substitute(psi_tmpl, {tvar: prin.src})
        psi_t = substitute(psi_tmpl, {tvar: prin.dst})
        gamma = tuple(f for f in concl.antecedent if f not in (psi_s, prin))
        delta = tuple(f for f in concl.succedent if f != psi_t)
        frag = derive_induction(gamma, delta, phi_xy, psi_x, x, y,
                                prin.src, prin.dst)
        return frag.close(children[0])

    return renumber(rebuild(p.root))


# ---------------------------------------------------------------------------
# Beta translation

@dataclass(frozen=True)
class BetaConfig:
    """Template predicate capturing a beta-function: B(c, i, k) holds when
    position i of the sequence coded by c equals k."""

    formula: Formula = field(default_factory=lambda: Pred("beta", (Var("c"), Var("i"), Var("k"))))
    code_var: str = "c"
    index_var: str = "i"
    value_var: str = "k"

    def __post_init__(self):
        want = {self.code_var, self.index_var, self.value_var}
        if free_vars(self.formula) != want:
            raise SignatureMismatch(
                f"beta template must have free variables exactly {sorted(want)}")

    def apply(self, code: Term, index: Term, value: Term) -> Formula:
        return substitute(self.formula, {self.code_var: code,
                                         self.index_var: index,
                                         self.value_var: value})


def _conj(fs: list[Formula]) -> Formula:
    out = fs[0]
    for f in fs[1:]:
        out = And(out, f)
    return out


def _check_arith(f: Formula) -> None:
    for t in formula_subterms(f):
        match t:
            case Const(name) if name != "0":
                raise SignatureMismatch(f"constant {name!r} outside the arithmetic signature")
            case App(fn, args) if (fn, len(args)) not in (("s", 1), ("add", 2)):
                raise SignatureMismatch(f"function {fn!r}/{len(args)} outside "
                                        "the arithmetic signature")
            case _:
                pass


def beta_translate(f: Formula, cfg: BetaConfig | None = None, mode: str = "pa") -> Formula:
    """Eliminate rtc over the arithmetic signature {0, s, add}.

    Homomorphic on everything but rtc; an rtc formula becomes the disjunction
    of endpoint equality with the existence of a beta-coded chain.  The
    bounded quantifier over chain positions is `forall u. u = z \\/ u < z ->`
    with `<` a primitive predicate `lt` in pa mode, or itself expanded
    through the closure encoding of the ordering in tc mode (tc output is
    rtc-free except for those ordering guards).
    """
    if mode not in ("pa", "tc"):
        raise ValueError(f"unknown beta translation mode {mode!r}")
    cfg = cfg or BetaConfig()
    _check_arith(f)

    def tr(g: Formula, avoid: set[str]) -> Formula:
        match g:
            case Eq(_, _) | Pred(_, _):
                return g
            case Not(sub):
                return Not(tr(sub, avoid))
            case And(l, r):
                return And(tr(l, avoid), tr(r, avoid))
            case Or(l, r):
                return Or(tr(l, avoid), tr(r, avoid))
            case Implies(l, r):
                return Implies(tr(l, avoid), tr(r, avoid))
            case Forall(xv, b):
                return Forall(xv, tr(b, avoid | {xv}))
            case Exists(xv, b):
                return Exists(xv, tr(b, avoid | {xv}))
            case Rtc(xv, yv, body, src, dst):
                inner = tr(body, avoid | {xv, yv})
                return _expand_rtc(xv, yv, inner, src, dst, avoid)
        return g  # Top, Bot

    def _expand_rtc(xv: str, yv: str, body: Formula, src: Term, dst: Term,
                    avoid: set[str]) -> Formula:
        used = (avoid | (free_vars(body) - {xv, yv})
                | term_vars(src) | term_vars(dst))
        names: list[str] = []
        for hint in ("z", "c", "u", "v", "w"):
            name = hint if hint not in used and hint not in names else \
                fresh_name(used | set(names), hint=hint)
            names.append(name)
        z, c, u, v, w = names
        B = cfg.apply
        step_body = substitute(body, {xv: Var(v), yv: Var(w)})
        inner_ex = Exists(v, Exists(w, _conj([
            B(Var(c), Var(u), Var(v)),
            B(Var(c), App("s", (Var(u),)), Var(w)),
            step_body])))
        if mode == "pa":
            less = Pred("lt", (Var(u), Var(z)))
        else:
            rb, ru = _two_fresh(used | set(names))
            less = And(Not(Eq(Var(u), Var(z))),
                       Rtc(rb, ru, Eq(App("s", (Var(rb),)), Var(ru)),
                           Var(u), Var(z)))
        guard = Forall(u, Implies(Or(Eq(Var(u), Var(z)), less), inner_ex))
        chain = Exists(z, Exists(c, _conj([
            B(Var(c), Const("0"), src),
            B(Var(c), App("s", (Var(z),)), dst),
            guard])))
        return Or(Eq(src, dst), chain)

    def _two_fresh(used: set[str]) -> tuple[str, str]:
        a = "w" if "w" not in used else fresh_name(used, hint="w")
        b = "u" if "u" not in used and "u" != a else fresh_name(used | {a}, hint="u")
        return a, b

    return tr(f, set())


def encode_rtc2(x1: str, x2: str, y1: str, y2: str, phi: Formula,
                s1: Term, s2: Term, t1: Term, t2: Term,
                sig: Signature) -> Formula:
    """Closure of a 4-ary relation via ordered pairs:
    (rtc x y. exists x1 x2 y1 y2. x = <x1,x2> /\\ y = <y1,y2> /\\ phi)
    applied to (<s1,s2>, <t1,t2>) with x, y fresh."""
    if sig.pair_symbol is None:
        raise MissingPairSymbol("signature has no pair symbol")
    quad = (x1, x2, y1, y2)
    if len(set(quad)) != 4:
        raise VariableClash(f"component variables must be distinct: {quad}")
    pair = sig.pair_symbol
    used = (all_names(phi) | set(quad)
            | term_vars(s1) | term_vars(s2) | term_vars(t1) | term_vars(t2))
    x = fresh_name(used, hint="_p")
    y = fresh_name(used | {x}, hint="_p")
    body: Formula = _conj([Eq(Var(x), App(pair, (Var(x1), Var(x2)))),
                           Eq(Var(y), App(pair, (Var(y1), Var(y2)))),
                           phi])
    for var in reversed(quad):
        body = Exists(var, body)
    return Rtc(x, y, body, App(pair, (s1, s2)), App(pair, (t1, t2)))
