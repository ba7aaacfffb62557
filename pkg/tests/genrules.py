"""Seeded random generator of kernel-valid rule instances over small
signatures (at most two predicates and one function), used by the descent
and local-soundness harnesses."""

import random

from rtcproof.kernel import RuleId, make_subst, rule_instance
from rtcproof.syntax import (And, App, Eq, Exists, Forall, Implies, Not, Or,
                             Pred, Rtc, Sequent, Signature, Var, substitute)

SIG = Signature.make(functions={"g": 1}, predicates={"e": 2, "q": 1})

VARS = ("a", "b", "d")

RULES = [
    RuleId.WL, RuleId.WR, RuleId.AndL, RuleId.AndR, RuleId.OrL, RuleId.OrR,
    RuleId.ImpL, RuleId.ImpR, RuleId.NotL, RuleId.NotR, RuleId.ExL,
    RuleId.ExR, RuleId.AllL, RuleId.AllR, RuleId.EqL1, RuleId.EqL2,
    RuleId.Cut, RuleId.Subst, RuleId.RtcStep, RuleId.RtcCase, RuleId.RtcInd,
]


def _term(rng, depth=1):
    if depth > 0 and rng.random() < 0.25:
        return App("g", (_term(rng, depth - 1),))
    return Var(rng.choice(VARS))


def _atom(rng):
    k = rng.randrange(3)
    if k == 0:
        return Pred("e", (_term(rng), _term(rng)))
    if k == 1:
        return Pred("q", (_term(rng),))
    return Eq(_term(rng), _term(rng))


def _rtc(rng):
    body = rng.choice([
        Pred("e", (Var("x"), Var("y"))),
        And(Pred("e", (Var("x"), Var("y"))), Pred("q", (Var("x"),))),
        Or(Pred("e", (Var("x"), Var("y"))), Eq(Var("x"), Var("y"))),
    ])
    return Rtc("x", "y", body, _term(rng), _term(rng))


def _formula(rng, depth=2):
    if depth <= 0:
        return _atom(rng)
    k = rng.randrange(8)
    if k == 0:
        return Not(_formula(rng, depth - 1))
    if k == 1:
        return And(_formula(rng, depth - 1), _formula(rng, depth - 1))
    if k == 2:
        return Or(_formula(rng, depth - 1), _formula(rng, depth - 1))
    if k == 3:
        return Implies(_formula(rng, depth - 1), _formula(rng, depth - 1))
    if k == 4:
        return Forall(rng.choice(VARS), _formula(rng, depth - 1))
    if k == 5:
        return Exists(rng.choice(VARS), _formula(rng, depth - 1))
    if k == 6:
        return _rtc(rng)
    return _atom(rng)


def _context(rng, n):
    return tuple(_formula(rng, rng.randrange(2)) for _ in range(n))


def generate_instance(rng):
    """One kernel-valid rule instance, or None when the draw does not fit."""
    rule = rng.choice(RULES)
    gamma = _context(rng, rng.randrange(2))
    delta = _context(rng, rng.randrange(2))
    try:
        if rule in (RuleId.WL, RuleId.AndL, RuleId.OrL, RuleId.ImpL, RuleId.NotL):
            shape = {RuleId.WL: _formula(rng, 1),
                     RuleId.AndL: And(_formula(rng, 1), _formula(rng, 1)),
                     RuleId.OrL: Or(_formula(rng, 1), _formula(rng, 1)),
                     RuleId.ImpL: Implies(_formula(rng, 1), _formula(rng, 1)),
                     RuleId.NotL: Not(_formula(rng, 1))}[rule]
            concl = Sequent(gamma + (shape,), delta)
            return rule_instance(rule, concl, sig=SIG, principal=shape)
        if rule in (RuleId.WR, RuleId.AndR, RuleId.OrR, RuleId.ImpR, RuleId.NotR):
            shape = {RuleId.WR: _formula(rng, 1),
                     RuleId.AndR: And(_formula(rng, 1), _formula(rng, 1)),
                     RuleId.OrR: Or(_formula(rng, 1), _formula(rng, 1)),
                     RuleId.ImpR: Implies(_formula(rng, 1), _formula(rng, 1)),
                     RuleId.NotR: Not(_formula(rng, 1))}[rule]
            concl = Sequent(gamma, delta + (shape,))
            return rule_instance(rule, concl, sig=SIG, principal=shape)
        if rule in (RuleId.ExL, RuleId.AllR):
            body = _formula(rng, 1)
            prin = Exists("x", body) if rule is RuleId.ExL else Forall("x", body)
            concl = (Sequent(gamma + (prin,), delta) if rule is RuleId.ExL
                     else Sequent(gamma, delta + (prin,)))
            return rule_instance(rule, concl, sig=SIG, principal=prin, eigenvar="z")
        if rule in (RuleId.ExR, RuleId.AllL):
            body = _formula(rng, 1)
            prin = Exists("x", body) if rule is RuleId.ExR else Forall("x", body)
            concl = (Sequent(gamma, delta + (prin,)) if rule is RuleId.ExR
                     else Sequent(gamma + (prin,), delta))
            return rule_instance(rule, concl, sig=SIG, principal=prin,
                                 witness=_term(rng))
        if rule in (RuleId.EqL1, RuleId.EqL2):
            eq = Eq(_term(rng), _term(rng))
            hole = "h"
            tmpl = substitute(_formula(rng, 1), {rng.choice(VARS): Var(hole)})
            shown_side = eq.rhs if rule is RuleId.EqL1 else eq.lhs
            shown = substitute(tmpl, {hole: shown_side})
            concl = Sequent(gamma + (eq,), delta + (shown,))
            return rule_instance(rule, concl, sig=SIG, principal=eq,
                                 template=(tmpl, hole))
        if rule is RuleId.Cut:
            cf = _formula(rng, 1)
            concl = Sequent(gamma, delta)
            return rule_instance(rule, concl, sig=SIG, cut_formula=cf)
        if rule is RuleId.Subst:
            source = Sequent(gamma, delta)
            theta = {v: _term(rng) for v in sorted(source.free_vars())
                     if rng.random() < 0.6}
            concl = source.substituted(theta)
            return rule_instance(rule, concl, sig=SIG,
                                 substitution=make_subst(theta), source=source)
        if rule is RuleId.RtcStep:
            prin = _rtc(rng)
            concl = Sequent(gamma, delta + (prin,))
            return rule_instance(rule, concl, sig=SIG, principal=prin,
                                 witness=_term(rng))
        if rule is RuleId.RtcCase:
            prin = _rtc(rng)
            concl = Sequent(gamma + (prin,), delta)
            return rule_instance(rule, concl, sig=SIG, principal=prin, eigenvar="z")
        if rule is RuleId.RtcInd:
            prin = _rtc(rng)
            psi = rng.choice([Pred("q", (Var("h"),)),
                              Rtc("x", "y", Pred("e", (Var("x"), Var("y"))),
                                  _term(rng), Var("h"))])
            psi_s = substitute(psi, {"h": prin.src})
            psi_t = substitute(psi, {"h": prin.dst})
            concl = Sequent(gamma + (psi_s, prin), delta + (psi_t,))
            return rule_instance(rule, concl, sig=SIG, principal=prin,
                                 template=(psi, "h"), eigenvar="u", eigenvar2="v")
    except Exception:
        return None
    return None


def generate_instances(seed, count):
    """Exactly `count` kernel-valid instances, deterministic per seed."""
    rng = random.Random(seed)
    out = []
    while len(out) < count:
        inst = generate_instance(rng)
        if inst is not None:
            out.append(inst)
    return out
