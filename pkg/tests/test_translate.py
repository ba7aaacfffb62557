import itertools

import pytest

from rtcproof.errors import (FreshnessViolation, MissingPairSymbol,
                             SignatureMismatch, VariableClash)
from rtcproof.kernel import RuleId, rule_instance
from rtcproof.proofgraph import GraphBuilder, validate_structure
from rtcproof.prooffile import load_theory
from rtcproof.syntax import (And, App, Const, Eq, Exists, Forall, Implies,
                             Not, Or, Pred, Rtc, Signature, Var, alpha_eq,
                             free_vars, parse_formula, parse_sequent, pretty)
from rtcproof.tracecheck import (check_global_trace_condition,
                                 enumerate_basic_cycles, is_non_overlapping)
from rtcproof.translate import (ARITH_SIGNATURE, BetaConfig, beta_translate,
                                derive_induction, encode_rtc2,
                                explicit_to_cyclic)

from conftest import INDUCTION_PROOFS, load_corpus

SIG = Signature.make(predicates={"E": 2, "p": 1})


def F(text, sig=SIG):
    return parse_formula(text, sig)


class TestDeriveInduction:
    def test_fragment_shape(self):
        frag = derive_induction((), (), F("E(x, y)"), F("p(x)"), "x", "y",
                                Var("a"), Var("b"))
        root = frag.nodes[frag.root]
        assert root.sequent == parse_sequent(
            "p(a), (rtc x y. E(x, y))(a, b) |- p(b)", SIG)
        assert frag.open_sequent == parse_sequent("p(x), E(x, y) |- p(y)", SIG)

    def test_closed_fragment_accepted(self):
        frag = derive_induction((), (), F("E(x, y)"), F("p(x)"), "x", "y",
                                Var("a"), Var("b"))
        step_ax = parse_sequent("p(x), E(x, y) |- p(y)", SIG)
        b = GraphBuilder()
        leaf = b.add_internal(rule_instance(RuleId.TheoryAxiom, frag.open_sequent,
                                            theory=(step_ax,)))
        g = frag.close(b.graph(leaf))
        assert validate_structure(g, (step_ax,), SIG) == []
        assert check_global_trace_condition(g).accepted
        assert len(enumerate_basic_cycles(g)) == 1
        assert is_non_overlapping(g)

    def test_cycle_progresses_once_per_loop(self):
        from rtcproof.tracecheck import flow_edges
        frag = derive_induction((), (), F("E(x, y)"), F("p(x)"), "x", "y",
                                Var("a"), Var("b"))
        step_ax = parse_sequent("p(x), E(x, y) |- p(y)", SIG)
        b = GraphBuilder()
        leaf = b.add_internal(rule_instance(RuleId.TheoryAxiom, frag.open_sequent,
                                            theory=(step_ax,)))
        g = frag.close(b.graph(leaf))
        (cycle,) = enumerate_basic_cycles(g)
        edges = {(e.src, e.dst): e.matrix for e in flow_edges(g)}
        mat = None
        for a, bn in zip(cycle, cycle[1:] + cycle[:1]):
            m = edges[(a, bn)]
            mat = m if mat is None else mat.compose(m)
        assert mat.has_progressing_diagonal()

    def test_freshness_errors(self):
        with pytest.raises(FreshnessViolation):
            derive_induction((), (), F("E(x, y)"), F("p(x)"), "x", "y",
                             Var("a"), Var("b"), v="a")
        with pytest.raises(FreshnessViolation):
            derive_induction((F("p(u)"),), (), F("E(x, y)"), F("p(x)"),
                             "u", "y", Var("a"), Var("b"))


class TestExplicitToCyclic:
    @pytest.mark.parametrize("name", INDUCTION_PROOFS)
    def test_corpus_induction_proofs(self, name, corpus_graphs):
        g, sig, theory = corpus_graphs[name]
        n_ind = sum(1 for nid in g.internal_ids()
                    if g.nodes[nid].rule.rule is RuleId.RtcInd)
        out = explicit_to_cyclic(g, sig)
        assert validate_structure(out, theory, sig) == [], name
        assert all(out.nodes[nid].rule.rule is not RuleId.RtcInd
                   for nid in out.internal_ids())
        assert check_global_trace_condition(out).accepted
        assert is_non_overlapping(out)
        assert len(enumerate_basic_cycles(out)) == n_ind
        assert out.end_sequent() == g.end_sequent()

    def test_ind_free_is_isomorphic(self, corpus_graphs):
        from rtcproof.proofgraph import renumber
        g = corpus_graphs["refl.tcp"][0]
        out = explicit_to_cyclic(g)
        a, b = renumber(g), renumber(out)
        assert a.root == b.root
        assert {i: (n.sequent, n.children, n.companion) for i, n in a.nodes.items()} \
            == {i: (n.sequent, n.children, n.companion) for i, n in b.nodes.items()}

    def test_rejects_buds(self, corpus_graphs):
        g = corpus_graphs["transitivity.tcp"][0]
        from rtcproof.errors import NotApplicable
        with pytest.raises(NotApplicable):
            explicit_to_cyclic(g)


GOLDEN_LEQ = ("a = b \\/ (exists z. exists c. beta(c, 0, a) /\\ beta(c, s(z), b)"
              " /\\ (forall u. u = z \\/ lt(u, z) -> exists v. exists w."
              " beta(c, u, v) /\\ beta(c, s(u), w) /\\ s(v) = w))")


class TestBetaTranslate:
    def test_atomic_unchanged(self):
        f = parse_formula("add(a, 0) = a", ARITH_SIGNATURE)
        assert beta_translate(f) == f

    def test_golden_leq_encoding(self):
        f = parse_formula("(rtc w u. s(w) = u)(a, b)", ARITH_SIGNATURE)
        assert pretty(beta_translate(f)) == GOLDEN_LEQ

    def test_rtc_free_and_fv_preserving(self):
        sig = ARITH_SIGNATURE.merge(Signature.make(predicates={"even": 1}))
        cases = [
            "(rtc w u. s(w) = u)(a, b)",
            "(rtc x y. s(x) = y \\/ s(s(x)) = y)(0, n)",
            "forall n. even(n) -> (rtc x y. s(s(x)) = y)(0, n)",
            "(rtc x y. (rtc w u. s(w) = u)(x, y))(0, n)",
        ]
        for text in cases:
            f = parse_formula(text, sig)
            out = beta_translate(f)
            assert "rtc" not in pretty(out)
            assert free_vars(out) == free_vars(f)

    def test_tc_mode_guard(self):
        f = parse_formula("(rtc w u. s(w) = u)(a, b)", ARITH_SIGNATURE)
        out = pretty(beta_translate(f, mode="tc"))
        assert "lt(" not in out
        assert "(rtc" in out  # ordering guard stays in closure form

    def test_nested_inner_first(self):
        f = parse_formula("(rtc x y. (rtc w u. s(w) = u)(x, y))(0, n)",
                          ARITH_SIGNATURE)
        out = beta_translate(f)
        assert "rtc" not in pretty(out)

    def test_signature_checked(self):
        sig = Signature.make(constants={"k"}, functions={"f": 1})
        f = parse_formula("f(k) = k", sig)
        with pytest.raises(SignatureMismatch):
            beta_translate(f)

    def test_custom_template_validated(self):
        with pytest.raises(SignatureMismatch):
            BetaConfig(parse_formula("beta(c, i, i)",
                                     Signature.make(predicates={"beta": 3})))

    def test_executable_beta_instances(self):
        # bounded semantic check over the naturals with a concrete base-3
        # digit-extraction beta: the translation of the ordering encoding
        # agrees with <= on small instances
        BASE = 3

        def nat_eval(f, v, bounds):
            match f:
                case Pred("beta", (c, i, k)):
                    return (_t(c, v) // BASE ** _t(i, v)) % BASE == _t(k, v)
                case Pred("lt", (a, b)):
                    return _t(a, v) < _t(b, v)
                case Eq(l, r):
                    return _t(l, v) == _t(r, v)
                case Not(s):
                    return not nat_eval(s, v, bounds)
                case And(l, r):
                    return nat_eval(l, v, bounds) and nat_eval(r, v, bounds)
                case Or(l, r):
                    return nat_eval(l, v, bounds) or nat_eval(r, v, bounds)
                case Implies(l, r):
                    return (not nat_eval(l, v, bounds)) or nat_eval(r, v, bounds)
                case Exists(x, b):
                    return any(nat_eval(b, {**v, x: a}, bounds)
                               for a in range(bounds.get(x, bounds["_"])))
                case Forall(x, b):
                    return all(nat_eval(b, {**v, x: a}, bounds)
                               for a in range(bounds.get(x, bounds["_"])))
            raise AssertionError(f"unexpected formula {f}")

        def _t(t, v):
            match t:
                case Var(name):
                    return v[name]
                case Const("0"):
                    return 0
                case App("s", (a,)):
                    return _t(a, v) + 1
                case App("add", (a, b)):
                    return _t(a, v) + _t(b, v)
            raise AssertionError(f"unexpected term {t}")

        leq = parse_formula("(rtc w u. s(w) = u)(a, b)", ARITH_SIGNATURE)
        out = beta_translate(leq)
        # per-variable witness bounds: sequence codes need up to 3^3;
        # positions and chain values stay below 4
        bounds = {"c": BASE ** 3, "_": 4}
        for a, b in itertools.product(range(3), repeat=2):
            expect = a <= b
            assert nat_eval(out, {"a": a, "b": b}, bounds) == expect, (a, b)


class TestEncodeRtc2:
    SIGP = Signature.make(constants={"c"}, functions={"pair": 2},
                          predicates={"q4": 4}, pair_symbol="pair",
                          pair_constant="c")

    def test_displayed_shape(self):
        phi = parse_formula("q4(x1, x2, y1, y2)", self.SIGP)
        out = encode_rtc2("x1", "x2", "y1", "y2", phi,
                          Var("s1"), Var("s2"), Var("t1"), Var("t2"), self.SIGP)
        expected = parse_formula(
            "(rtc x y. exists x1. exists x2. exists y1. exists y2."
            " x = <x1, x2> /\\ y = <y1, y2> /\\ q4(x1, x2, y1, y2))"
            "(<s1, s2>, <t1, t2>)",
            self.SIGP.merge(Signature.make()))
        assert alpha_eq(out, expected)

    def test_free_component_vars_ok(self):
        phi = parse_formula("c = c", self.SIGP)
        out = encode_rtc2("x1", "x2", "y1", "y2", phi,
                          Var("a"), Var("b"), Var("d"), Var("e"), self.SIGP)
        assert isinstance(out, Rtc)
        assert free_vars(out) == {"a", "b", "d", "e"}

    def test_variable_clash(self):
        phi = parse_formula("c = c", self.SIGP)
        with pytest.raises(VariableClash):
            encode_rtc2("x1", "x2", "x1", "y2", phi,
                        Var("a"), Var("b"), Var("d"), Var("e"), self.SIGP)

    def test_missing_pair(self):
        sig = Signature.make(predicates={"q4": 4})
        with pytest.raises(MissingPairSymbol):
            encode_rtc2("x1", "x2", "y1", "y2",
                        parse_formula("q4(x1, x2, y1, y2)", sig),
                        Var("a"), Var("b"), Var("d"), Var("e"), sig)
