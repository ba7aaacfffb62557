import pytest

from rtcproof.kernel import RuleId, make_subst, rule_instance
from rtcproof.proofgraph import (GraphBuilder, ProofGraph, ProofNode,
                                 edge_trace_steps, renumber, trace_relation,
                                 validate_structure)
from rtcproof.syntax import (Rtc, Signature, Var, parse_formula, parse_sequent)

from conftest import ACCEPTED, REJECTED, load_corpus

SIG = Signature.make(predicates={"p": 2, "q": 1, "r0": 0})


def F(text):
    return parse_formula(text, SIG)


def S(text):
    return parse_sequent(text, SIG)


def tiny_graph():
    """q(a) /\\ q(b) |- q(a) via AndL + axiom closure."""
    b = GraphBuilder()
    goal = S("q(a) /\\ q(b) |- q(a)")
    al = rule_instance(RuleId.AndL, goal, principal=F("q(a) /\\ q(b)"))
    leaf = b.add_axiom_closure(al.premises[0], F("q(a)"))
    root = b.add_internal(al, (leaf,))
    return b.graph(root)


class TestValidate:
    def test_corpus_all_validate(self, corpus_graphs):
        for name in ACCEPTED + REJECTED:
            g, sig, theory = corpus_graphs[name]
            assert validate_structure(g, theory, sig) == [], name

    def test_bud_mismatch(self):
        # bud sequent differs from its companion's by a free variable
        b = GraphBuilder()
        n0 = b.reserve()
        s0 = S("q(a), q(b) |- r0")
        wl = rule_instance(RuleId.WL, s0, principal=F("q(b)"))
        sub = rule_instance(RuleId.Subst, wl.premises[0],
                            substitution=make_subst({"b": Var("a")}), source=s0)
        bud = b.add_bud(s0, n0)
        nsub = b.add_internal(sub, (bud,))
        b.fill_internal(n0, wl, (nsub,))
        g = b.graph(n0)
        assert validate_structure(g) == []
        # now forge the bud's sequent
        g.nodes[bud] = ProofNode(S("q(a), q(w) |- r0"), None, (), n0)
        kinds = {e.kind for e in validate_structure(g)}
        assert "BudMismatch" in kinds

    def test_bad_premise_link(self):
        g = tiny_graph()
        # point the root at the wrong child
        root = g.nodes[g.root]
        leafs = [i for i, n in g.nodes.items() if n.rule and not n.children]
        bad = ProofGraph(dict(g.nodes), g.root)
        bad.nodes[g.root] = ProofNode(root.sequent, root.rule, (g.root + 100,))
        errs = validate_structure(bad)
        assert any(e.kind == "BadPremiseLink" for e in errs)

    def test_child_sequent_disagrees(self):
        g = tiny_graph()
        nodes = dict(g.nodes)
        root = nodes[g.root]
        child = root.children[0]
        old = nodes[child]
        nodes[child] = ProofNode(S("q(b) |- q(a)"), old.rule, old.children)
        errs = validate_structure(ProofGraph(nodes, g.root))
        assert any(e.kind == "BadPremiseLink" for e in errs)

    def test_unreachable(self):
        g = tiny_graph()
        nodes = dict(g.nodes)
        extra = max(nodes) + 1
        nodes[extra] = ProofNode(S("q(a) |- q(a)"),
                                 rule_instance(RuleId.Axiom, S("q(a) |- q(a)")), ())
        errs = validate_structure(ProofGraph(nodes, g.root))
        assert [e.kind for e in errs] == ["UnreachableNode"]
        assert errs[0].node == extra

    def test_kernel_error_reported(self):
        goal = S("q(a) /\\ q(b) |- q(b)")
        al = rule_instance(RuleId.AndL, goal, principal=F("q(a) /\\ q(b)"))
        b = GraphBuilder()
        leaf = b.add_axiom_closure(al.premises[0], F("q(b)"))
        bad_rule = rule_instance(RuleId.AndL, goal, principal=F("q(a) /\\ q(b)"))
        # corrupt: claim OrL instead
        from rtcproof.kernel import RuleInstance
        forged = RuleInstance(RuleId.OrL, bad_rule.conclusion, bad_rule.premises,
                              bad_rule.params)
        root = b.add_internal(forged, (leaf,))
        errs = validate_structure(b.graph(root))
        assert any(e.kind == "KernelError" for e in errs)

    def test_premise_cycle_rejected(self):
        s = S("q(a) |- q(a)")
        ax = rule_instance(RuleId.Axiom, s)
        from rtcproof.kernel import RuleInstance
        loop = RuleInstance(RuleId.WL, s, (s,), ax.params)
        g = ProofGraph({0: ProofNode(s, loop, (0,))}, 0)
        errs = validate_structure(g)
        assert any("cycle" in e.detail for e in errs)


class TestTraceSteps:
    def test_rtccase_progressing(self):
        concl = S("(rtc x y. p(x, y))(a, b), (rtc x y. p(x, y))(d, e0) |- r0")
        prin = F("(rtc x y. p(x, y))(a, b)")
        r = rule_instance(RuleId.RtcCase, concl, principal=prin, eigenvar="z")
        steps1 = edge_trace_steps(r, 1)
        prog = [st for st in steps1 if st.progressing]
        assert len(prog) == 1
        assert prog[0].from_formula == prin
        assert prog[0].to_formula == Rtc("x", "y", F("(rtc x y. p(x, y))(a, b)").body,
                                         Var("a"), Var("z"))
        # context closure formula follows identically
        ident = [st for st in steps1 if not st.progressing]
        assert [st.from_formula for st in ident] == [F("(rtc x y. p(x, y))(d, e0)")]
        # premise 0 carries identity steps only
        assert all(not st.progressing for st in edge_trace_steps(r, 0))

    def test_weakening_identity(self):
        concl = S("(rtc x y. p(x, y))(a, b), q(a) |- r0")
        r = rule_instance(RuleId.WL, concl, principal=F("q(a)"))
        steps = edge_trace_steps(r, 0)
        assert steps == tuple([type(steps[0])(F("(rtc x y. p(x, y))(a, b)"),
                                              F("(rtc x y. p(x, y))(a, b)"), False)])

    def test_subst_theta(self):
        src = S("(rtc u v. p(u, v))(x, w) |- r0")
        theta = make_subst({"x": Var("a")})
        concl = src.substituted(dict(theta))
        r = rule_instance(RuleId.Subst, concl, substitution=theta, source=src)
        steps = edge_trace_steps(r, 0)
        assert len(steps) == 1
        assert steps[0].from_formula == F("(rtc u v. p(u, v))(a, w)")
        assert steps[0].to_formula == parse_formula("(rtc u v. p(u, v))(x, w)", SIG)
        assert not steps[0].progressing

    def test_trace_relation_buds_identity(self, corpus_graphs):
        g, sig, theory = corpus_graphs["transitivity.tcp"]
        rel = trace_relation(g)
        for nid in g.bud_ids():
            steps = rel[(nid, 0)]
            assert steps and all(st.from_formula == st.to_formula
                                 and not st.progressing for st in steps)

    def test_trace_relation_deterministic(self, corpus_graphs):
        g, sig, theory = corpus_graphs["two_loops.tcp"]
        assert trace_relation(g) == trace_relation(g)


class TestRenumber:
    def test_preorder_stable(self, corpus_graphs):
        for name in ACCEPTED:
            g, sig, theory = corpus_graphs[name]
            r = renumber(g)
            assert r.root == 0
            assert sorted(r.nodes) == list(range(len(g.nodes)))
            assert renumber(r).nodes.keys() == r.nodes.keys()
            assert validate_structure(r, theory, sig) == []
