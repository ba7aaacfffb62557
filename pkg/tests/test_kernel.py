import pytest

from rtcproof.errors import (FreshnessViolation, NotApplicable, SchemaMismatch,
                             UnknownTheoryAxiom)
from rtcproof.kernel import (PREMISE_COUNT, RuleId, RuleInstance, RuleParams,
                             check_rule_instance, expected_premises, make_subst,
                             match_sequent, rule_instance)
from rtcproof.syntax import (App, Eq, Rtc, Sequent, Signature, Var,
                             parse_formula, parse_sequent)

SIG = Signature.make(constants={"c0", "0"},
                     functions={"s": 1, "pair": 2},
                     predicates={"p": 2, "q": 1, "E": 2, "r0": 0},
                     pair_symbol="pair", pair_constant="c0")


def F(text):
    return parse_formula(text, SIG)


def S(text):
    return parse_sequent(text, SIG)


def ok(rule, concl, theory=(), **params):
    r = rule_instance(rule, concl, theory=theory, sig=SIG, **params)
    check_rule_instance(r, theory, SIG)
    return r


AX = (S("p(x, y), q(x) |- q(y)"),)

# (rule, conclusion, params, theory) for one positive instance per rule
POSITIVE = {
    RuleId.Axiom: ("q(a) |- q(a)", {}, ()),
    RuleId.WL: ("q(a), q(b) |- q(a)", {"principal": "q(b)"}, ()),
    RuleId.WR: ("q(a) |- q(a), q(b)", {"principal": "q(b)"}, ()),
    RuleId.AndL: ("q(a) /\\ q(b) |- q(a)", {"principal": "q(a) /\\ q(b)"}, ()),
    RuleId.AndR: ("q(a), q(b) |- q(a) /\\ q(b)", {"principal": "q(a) /\\ q(b)"}, ()),
    RuleId.OrL: ("q(a) \\/ q(b) |- q(a), q(b)", {"principal": "q(a) \\/ q(b)"}, ()),
    RuleId.OrR: ("q(a) |- q(a) \\/ q(b)", {"principal": "q(a) \\/ q(b)"}, ()),
    RuleId.ImpL: ("q(a), q(a) -> q(b) |- q(b)", {"principal": "q(a) -> q(b)"}, ()),
    RuleId.ImpR: ("|- q(a) -> q(a)", {"principal": "q(a) -> q(a)"}, ()),
    RuleId.NotL: ("~q(a) |- q(b)", {"principal": "~q(a)"}, ()),
    RuleId.NotR: ("q(a) |- ~q(b)", {"principal": "~q(b)"}, ()),
    RuleId.ExL: ("exists x. q(x) |- r0", {"principal": "exists x. q(x)",
                                          "eigenvar": "z"}, ()),
    RuleId.ExR: ("q(a) |- exists x. q(x)", {"principal": "exists x. q(x)",
                                            "witness": Var("a")}, ()),
    RuleId.AllL: ("forall x. q(x) |- q(a)", {"principal": "forall x. q(x)",
                                             "witness": Var("a")}, ()),
    RuleId.AllR: ("r0 |- forall x. q(x)", {"principal": "forall x. q(x)",
                                           "eigenvar": "z"}, ()),
    RuleId.EqL1: ("a = b, q(a) |- q(b)", {"principal": "a = b",
                                          "template": ("q(h)", "h")}, ()),
    RuleId.EqL2: ("a = b, q(b) |- q(a)", {"principal": "a = b",
                                          "template": ("q(h)", "h")}, ()),
    RuleId.EqR: ("|- s(a) = s(a)", {}, ()),
    RuleId.Cut: ("q(a) |- q(b)", {"cut_formula": "q(0)"}, ()),
    RuleId.Subst: (None, None, ()),
    RuleId.RtcRefl: ("|- (rtc x y. p(x, y))(t, t)",
                     {"principal": "(rtc x y. p(x, y))(t, t)"}, ()),
    RuleId.RtcStep: ("|- (rtc x y. E(x, y))(a, c)",
                     {"principal": "(rtc x y. E(x, y))(a, c)",
                      "witness": Var("b")}, ()),
    RuleId.RtcInd: ("q(a), (rtc x y. E(x, y))(a, b) |- q(b)",
                    {"principal": "(rtc x y. E(x, y))(a, b)",
                     "template": ("q(h)", "h"),
                     "eigenvar": "u", "eigenvar2": "v"}, ()),
    RuleId.RtcCase: ("(rtc x y. s(x) = y)(0, n) |- r0",
                     {"principal": "(rtc x y. s(x) = y)(0, n)",
                      "eigenvar": "z"}, ()),
    RuleId.PairInj: ("|- a = u /\\ b = v",
                     {"principal": "a = u /\\ b = v"}, ()),
    RuleId.PairConstAx: ("<a, b> = c0 |- q(a)",
                         {"principal": "<a, b> = c0"}, ()),
    RuleId.TheoryAxiom: ("p(a, s(a)), q(a) |- q(s(a))", {}, AX),
}


def _params(raw):
    out = {}
    for k, v in raw.items():
        if k in ("principal", "cut_formula"):
            out[k] = F(v)
        elif k == "template":
            out[k] = (F(v[0]), v[1])
        else:
            out[k] = v
    return out


def _subst_instance():
    src = S("q(x) |- p(x, x)")
    theta = make_subst({"x": Var("a")})
    return rule_instance(RuleId.Subst, src.substituted(dict(theta)),
                         substitution=theta, source=src)


class TestEveryRule:
    @pytest.mark.parametrize("rule", list(RuleId), ids=lambda r: r.value)
    def test_positive(self, rule):
        if rule is RuleId.Subst:
            r = _subst_instance()
            check_rule_instance(r)
        else:
            concl, raw, theory = POSITIVE[rule]
            r = ok(rule, S(concl), theory=theory, **_params(raw))
        assert len(r.premises) == PREMISE_COUNT[rule]

    @pytest.mark.parametrize("rule", list(RuleId), ids=lambda r: r.value)
    def test_negative_wrong_premises(self, rule):
        theory = ()
        if rule is RuleId.Subst:
            r = _subst_instance()
        else:
            concl, raw, theory = POSITIVE[rule]
            r = rule_instance(rule, S(concl), theory=theory, sig=SIG, **_params(raw))
        # corrupt the instance: add a bogus premise (or, for 0-premise rules,
        # corrupt the conclusion so the schema no longer applies)
        if PREMISE_COUNT[rule] > 0:
            bad = RuleInstance(r.rule, r.conclusion,
                               r.premises[:-1] + (S("|- r0"),), r.params)
            with pytest.raises(SchemaMismatch):
                check_rule_instance(bad, theory, SIG)
        else:
            bad = RuleInstance(r.rule, r.conclusion, (S("|- r0"),), r.params)
            with pytest.raises(SchemaMismatch):
                check_rule_instance(bad, theory, SIG)


class TestFreshness:
    def test_rtccase_fresh_violation(self):
        concl = S("(rtc x y. s(x) = y)(0, n), q(z) |- r0")
        with pytest.raises(FreshnessViolation):
            expected_premises(RuleId.RtcCase, concl,
                              RuleParams(principal=F("(rtc x y. s(x) = y)(0, n)"),
                                         eigenvar="z"))

    def test_exl_fresh_violation(self):
        concl = S("exists x. q(x) |- q(z)")
        with pytest.raises(FreshnessViolation):
            expected_premises(RuleId.ExL, concl,
                              RuleParams(principal=F("exists x. q(x)"), eigenvar="z"))

    def test_rtcind_y_in_template(self):
        concl = S("p(v, a), (rtc x y. E(x, y))(a, b) |- p(v, b)")
        with pytest.raises(FreshnessViolation):
            expected_premises(RuleId.RtcInd, concl,
                              RuleParams(principal=F("(rtc x y. E(x, y))(a, b)"),
                                         template=(F("p(v, h)"), "h"),
                                         eigenvar="u", eigenvar2="v"))

    def test_mutated_eigenvar_always_caught(self):
        concl = S("exists x. q(x), q(w) |- r0")
        # w occurs in the context: never accepted as eigenvariable
        with pytest.raises(FreshnessViolation):
            expected_premises(RuleId.ExL, concl,
                              RuleParams(principal=F("exists x. q(x)"), eigenvar="w"))


class TestRoundTrip:
    def test_expected_equals_premises(self):
        for rule, (concl, raw, theory) in POSITIVE.items():
            if rule is RuleId.Subst:
                continue
            params = _params(raw)
            r = rule_instance(rule, S(concl), theory=theory, sig=SIG, **params)
            check_rule_instance(r, theory, SIG)
            exp = expected_premises(rule, r.conclusion, r.params, theory, SIG)
            assert list(r.premises) == exp


class TestSchemas:
    def test_spec_andr_example(self):
        sig = Signature.make(predicates={"pp": 0, "qq": 0})
        concl = parse_sequent("|- pp /\\ qq", sig)
        prems = expected_premises(RuleId.AndR, concl,
                                  RuleParams(principal=parse_formula("pp /\\ qq", sig)))
        assert [str(x) for x in prems] == ["|- pp", "|- qq"]

    def test_spec_rtcstep_example(self):
        concl = S("|- (rtc x y. E(x, y))(a, c)")
        prems = expected_premises(
            RuleId.RtcStep, concl,
            RuleParams(principal=F("(rtc x y. E(x, y))(a, c)"), witness=Var("b")))
        assert prems == [S("|- (rtc x y. E(x, y))(a, b)"), S("|- E(b, c)")]

    def test_alll_without_witness(self):
        with pytest.raises(NotApplicable):
            expected_premises(RuleId.AllL, S("forall x. q(x) |- q(a)"),
                              RuleParams(principal=F("forall x. q(x)")))

    def test_spec_rtccase_example(self):
        concl = S("(rtc x y. s(x) = y)(0, n) |- r0")
        r = ok(RuleId.RtcCase, concl,
               principal=F("(rtc x y. s(x) = y)(0, n)"), eigenvar="z")
        assert r.premises[0] == S("0 = n |- r0")
        assert r.premises[1] == S("(rtc x y. s(x) = y)(0, z), s(z) = n |- r0")

    def test_theory_axiom_unknown(self):
        with pytest.raises(UnknownTheoryAxiom):
            expected_premises(RuleId.TheoryAxiom, S("q(a) |- q(b)"), RuleParams(),
                              theory=AX)

    def test_pair_inj_direction(self):
        r = ok(RuleId.PairInj, S("|- a = u /\\ b = v"),
               principal=F("a = u /\\ b = v"))
        assert r.premises == (S("|- <a, b> = <u, v>"),)


class TestMatching:
    def test_match_instances(self):
        pat = S("p(x, y), q(x) |- q(y)")
        tgt = S("p(a, s(a)), q(a) |- q(s(a))")
        thetas = list(match_sequent(pat, tgt, exact=True))
        assert len(thetas) == 1
        assert thetas[0] == {"x": Var("a"), "y": App("s", (Var("a"),))}

    def test_match_subset(self):
        pat = S("q(x) |- q(y)")
        tgt = S("q(a), p(a, b) |- q(b), r0")
        assert any(th == {"x": Var("a"), "y": Var("b")}
                   for th in match_sequent(pat, tgt))

    def test_match_respects_binders(self):
        pat = S("forall u. p(u, x) |-")
        tgt = S("forall w. p(w, w) |-")
        # x would have to be the bound w: no capture-escaping match allowed
        assert list(match_sequent(pat, tgt, exact=True)) == []


class TestLocalSoundness:
    def test_premise_validity_implies_conclusion_validity(self):
        # bridge to the semantics oracle over generated instances: in every
        # small model where each premise holds under all valuations, the
        # conclusion holds under all valuations too
        import os
        import sys

        sys.path.insert(0, os.path.dirname(__file__))
        from genrules import generate_instances
        from test_semantics import _models_for, _valuations
        from rtcproof.semantics import _evaluator, sequent_holds

        def valid_in(ev, seq, n):
            fvs = sorted(seq.free_vars())
            return all(sequent_holds(ev, v, seq) for v in _valuations(fvs, n))

        insts = generate_instances(99, 60)
        checked = 0
        for inst in insts:
            for m in _models_for(inst, 2):
                ev = _evaluator(m)
                n = m.domain_size
                if all(valid_in(ev, p, n) for p in inst.premises):
                    assert valid_in(ev, inst.conclusion, n), (
                        f"{inst.rule.value}: premises valid but conclusion "
                        f"fails in {m.dump()}")
                    checked += 1
        assert checked > 100
