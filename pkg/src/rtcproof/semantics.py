"""Brute-force evaluation in finite first-order structures.

Provides the truth oracle used to sanity-check the proof systems: formula
evaluation (with rtc handled by graph reachability), the degree of an rtc
formula under a model/valuation, bounded counter-model search, and the
descending-counter-model witness for locally valid rule instances.

Model enumeration order (documented contract): by domain size, then per
size lexicographically over table encodings in the order (function tables,
predicate tables, constant assignments), symbols sorted by name within each
group.  Function tables are flat value lists over argument tuples in
lexicographic order; predicate tables are bitmasks over the same tuple
order, enumerated ascending (so the empty relation comes first).

Counterexample dump format:

    model { size = 2; const a = 0; fn s = [1, 0]; pred E = { (0, 1) }; }
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from typing import Iterator, Mapping

from .errors import (BudgetExceeded, NoCounterexample, NotAnRtcFormula,
                     NotApplicable, SignatureMismatch, UnboundVariable)
from .kernel import RuleId, RuleInstance, subst_dict
from .syntax import (And, App, Bot, Const, Eq, Exists, Forall, Formula,
                     Implies, Not, Or, Pred, Rtc, Sequent, Signature, Term,
                     Top, Var, free_vars, fresh_name, substitute)

Valuation = dict[str, int]


@dataclass
class FiniteModel:
    """Explicit finite structure over domain {0..domain_size-1}."""

    domain_size: int
    const_interp: dict[str, int] = field(default_factory=dict)
    fn_interp: dict[str, dict[tuple[int, ...], int]] = field(default_factory=dict)
    pred_interp: dict[str, frozenset[tuple[int, ...]]] = field(default_factory=dict)

    def dump(self) -> str:
        parts = [f"size = {self.domain_size};"]
        for c in sorted(self.const_interp):
            parts.append(f"const {c} = {self.const_interp[c]};")
        for f in sorted(self.fn_interp):
            table = self.fn_interp[f]
            flat = [str(table[a]) for a in sorted(table)]
            parts.append(f"fn {f} = [{', '.join(flat)}];")
        for p in sorted(self.pred_interp):
            tuples = sorted(self.pred_interp[p])
            shown = ", ".join("(" + ", ".join(map(str, t)) + ")" for t in tuples)
            parts.append(f"pred {p} = {{ {shown} }};" if shown else f"pred {p} = {{ }};")
        return "model { " + " ".join(parts) + " }"


class Evaluator:
    """Evaluates formulas in one model; caches rtc reachability per model."""

    def __init__(self, model: FiniteModel):
        self.model = model
        self._reach: dict[tuple, list[set[int]]] = {}
        self._adj: dict[tuple, list[list[bool]]] = {}

    def term(self, t: Term, v: Valuation) -> int:
        match t:
            case Var(name):
                try:
                    return v[name]
                except KeyError:
                    raise UnboundVariable(f"variable {name!r} has no value") from None
            case Const(name):
                try:
                    return self.model.const_interp[name]
                except KeyError:
                    raise SignatureMismatch(f"constant {name!r} not interpreted") from None
            case App(fn, args):
                table = self.model.fn_interp.get(fn)
                if table is None:
                    raise SignatureMismatch(f"function {fn!r} not interpreted")
                return table[tuple(self.term(a, v) for a in args)]
        raise TypeError(f"not a term: {t!r}")

    def holds(self, f: Formula, v: Valuation) -> bool:
        match f:
            case Eq(l, r):
                return self.term(l, v) == self.term(r, v)
            case Pred(name, args):
                rel = self.model.pred_interp.get(name)
                if rel is None:
                    raise SignatureMismatch(f"predicate {name!r} not interpreted")
                return tuple(self.term(a, v) for a in args) in rel
            case Top():
                return True
            case Bot():
                return False
            case Not(s):
                return not self.holds(s, v)
            case And(l, r):
                return self.holds(l, v) and self.holds(r, v)
            case Or(l, r):
                return self.holds(l, v) or self.holds(r, v)
            case Implies(l, r):
                return (not self.holds(l, v)) or self.holds(r, v)
            case Exists(x, b):
                return any(self.holds(b, {**v, x: a}) for a in range(self.model.domain_size))
            case Forall(x, b):
                return all(self.holds(b, {**v, x: a}) for a in range(self.model.domain_size))
            case Rtc(_, _, _, s, t):
                sv, tv = self.term(s, v), self.term(t, v)
                if sv == tv:
                    return True
                return tv in self.reach(f, v)[sv]
        raise TypeError(f"not a formula: {f!r}")

    def adjacency(self, f: Rtc, v: Valuation) -> list[list[bool]]:
        """Step relation of an rtc formula's body under v."""
        key = self._cache_key(f, v)
        adj = self._adj.get(key)
        if adj is None:
            n = self.model.domain_size
            adj = [[False] * n for _ in range(n)]
            for a in range(n):
                for b in range(n):
                    if self.holds(f.body, {**v, f.x: a, f.y: b}):
                        adj[a][b] = True
            self._adj[key] = adj
        return adj

    def reach(self, f: Rtc, v: Valuation) -> list[set[int]]:
        """reach[a] = elements reachable from a by >= 1 body steps... including
        a itself only when a lies on a cycle; reflexive closure is handled by
        the caller comparing endpoint values."""
        key = self._cache_key(f, v)
        cached = self._reach.get(key)
        if cached is not None:
            return cached
        adj = self.adjacency(f, v)
        n = self.model.domain_size
        out: list[set[int]] = []
        for start in range(n):
            seen: set[int] = set()
            frontier = [b for b in range(n) if adj[start][b]]
            seen.update(frontier)
            while frontier:
                nxt = []
                for u in frontier:
                    for w in range(n):
                        if adj[u][w] and w not in seen:
                            seen.add(w)
                            nxt.append(w)
                frontier = nxt
            out.append(seen)
        self._reach[key] = out
        return out

    def _cache_key(self, f: Rtc, v: Valuation) -> tuple:
        extras = sorted(free_vars(f.body) - {f.x, f.y})
        try:
            vals = tuple(v[e] for e in extras)
        except KeyError as exc:
            raise UnboundVariable(f"variable {exc.args[0]!r} has no value") from None
        return (f.key(), vals)


def _evaluator(m: FiniteModel) -> Evaluator:
    ev = getattr(m, "_evaluator", None)
    if ev is None:
        ev = Evaluator(m)
        m._evaluator = ev
    return ev


def evaluate(m: FiniteModel, v: Valuation, f: Formula) -> bool:
    """Truth of f in m under v; rtc via graph reachability."""
    return _evaluator(m).holds(f, v)


def evaluate_warshall(m: FiniteModel, v: Valuation, f: Formula) -> bool:
    """Independent evaluator: rtc via Floyd-Warshall boolean closure."""
    match f:
        case Eq(l, r):
            return _t(m, v, l) == _t(m, v, r)
        case Pred(name, args):
            rel = m.pred_interp.get(name)
            if rel is None:
                raise SignatureMismatch(f"predicate {name!r} not interpreted")
            return tuple(_t(m, v, a) for a in args) in rel
        case Top():
            return True
        case Bot():
            return False
        case Not(s):
            return not evaluate_warshall(m, v, s)
        case And(l, r):
            return evaluate_warshall(m, v, l) and evaluate_warshall(m, v, r)
        case Or(l, r):
            return evaluate_warshall(m, v, l) or evaluate_warshall(m, v, r)
        case Implies(l, r):
            return (not evaluate_warshall(m, v, l)) or evaluate_warshall(m, v, r)
        case Exists(x, b):
            return any(evaluate_warshall(m, {**v, x: a}, b) for a in range(m.domain_size))
        case Forall(x, b):
            return all(evaluate_warshall(m, {**v, x: a}, b) for a in range(m.domain_size))
        case Rtc(x, y, b, s, t):
            n = m.domain_size
            closure = [[evaluate_warshall(m, {**v, x: i, y: j}, b) for j in range(n)]
                       for i in range(n)]
            for k in range(n):
                ck = closure[k]
                for i in range(n):
                    if closure[i][k]:
                        ci = closure[i]
                        for j in range(n):
                            if ck[j]:
                                ci[j] = True
            sv, tv = _t(m, v, s), _t(m, v, t)
            return sv == tv or closure[sv][tv]
    raise TypeError(f"not a formula: {f!r}")


def _t(m: FiniteModel, v: Valuation, t: Term) -> int:
    match t:
        case Var(name):
            if name not in v:
                raise UnboundVariable(f"variable {name!r} has no value")
            return v[name]
        case Const(name):
            if name not in m.const_interp:
                raise SignatureMismatch(f"constant {name!r} not interpreted")
            return m.const_interp[name]
        case App(fn, args):
            if fn not in m.fn_interp:
                raise SignatureMismatch(f"function {fn!r} not interpreted")
            return m.fn_interp[fn][tuple(_t(m, v, a) for a in args)]
    raise TypeError(f"not a term: {t!r}")


# ---------------------------------------------------------------------------
# Degree and minimal chains

def degree(m: FiniteModel, v: Valuation, f: Formula) -> int | None:
    """Length of a minimal witnessing chain; 0 iff endpoint values coincide;
    None when the rtc formula is unsatisfied."""
    chain = minimal_chain(m, v, f)
    return None if chain is None else len(chain) - 1


def minimal_chain(m: FiniteModel, v: Valuation, f: Formula) -> list[int] | None:
    """The lexicographically least minimal-length witnessing element sequence
    [a_0..a_n], or None if the formula is false.  [a_0] when v(src)=v(dst)."""
    if not isinstance(f, Rtc):
        raise NotAnRtcFormula(f"degree is defined for rtc formulas, not {f}")
    ev = _evaluator(m)
    sv, tv = ev.term(f.src, v), ev.term(f.dst, v)
    if sv == tv:
        return [sv]
    adj = ev.adjacency(f, v)
    n = m.domain_size
    # BFS backwards from tv: dist[b] = fewest steps from b to tv
    dist: list[int | None] = [None] * n
    dist[tv] = 0
    frontier = [tv]
    while frontier:
        nxt = []
        for u in frontier:
            for b in range(n):
                if adj[b][u] and dist[b] is None:
                    dist[b] = dist[u] + 1
                    nxt.append(b)
        frontier = nxt
    if dist[sv] is None:
        return None
    chain = [sv]
    cur, remaining = sv, dist[sv]
    while cur != tv:
        for b in range(n):
            if adj[cur][b] and dist[b] == remaining - 1:
                chain.append(b)
                cur, remaining = b, remaining - 1
                break
        else:
            raise AssertionError("BFS invariant broken")
    return chain


# ---------------------------------------------------------------------------
# Model enumeration and counter-model search

def _replace_consts(f: Formula, mapping: Mapping[str, str]) -> Formula:
    def goterm(t: Term) -> Term:
        match t:
            case Var(_):
                return t
            case Const(name):
                return Var(mapping[name]) if name in mapping else t
            case App(fn, args):
                return App(fn, tuple(goterm(a) for a in args))
        raise TypeError

    match f:
        case Eq(l, r):
            return Eq(goterm(l), goterm(r))
        case Pred(name, args):
            return Pred(name, tuple(goterm(a) for a in args))
        case Top() | Bot():
            return f
        case Not(s):
            return Not(_replace_consts(s, mapping))
        case And(l, r):
            return And(_replace_consts(l, mapping), _replace_consts(r, mapping))
        case Or(l, r):
            return Or(_replace_consts(l, mapping), _replace_consts(r, mapping))
        case Implies(l, r):
            return Implies(_replace_consts(l, mapping), _replace_consts(r, mapping))
        case Forall(x, b):
            return Forall(x, _replace_consts(b, mapping))
        case Exists(x, b):
            return Exists(x, _replace_consts(b, mapping))
        case Rtc(x, y, b, s, t):
            return Rtc(x, y, _replace_consts(b, mapping), goterm(s), goterm(t))
    raise TypeError


def used_signature(sequents: tuple[Sequent, ...], sig: Signature) -> Signature:
    """The sub-signature of symbols actually occurring in the sequents."""
    consts: set[str] = set()
    fns: dict[str, int] = {}
    preds: dict[str, int] = {}

    def scan_term(t: Term) -> None:
        match t:
            case Const(name):
                consts.add(name)
            case App(fn, args):
                fns[fn] = len(args)
                for a in args:
                    scan_term(a)
            case _:
                pass

    def scan(f: Formula) -> None:
        match f:
            case Eq(l, r):
                scan_term(l), scan_term(r)
            case Pred(name, args):
                preds[name] = len(args)
                for a in args:
                    scan_term(a)
            case Not(s):
                scan(s)
            case And(l, r) | Or(l, r) | Implies(l, r):
                scan(l), scan(r)
            case Forall(_, b) | Exists(_, b):
                scan(b)
            case Rtc(_, _, b, s, t):
                scan(b), scan_term(s), scan_term(t)
            case _:
                pass

    for seq in sequents:
        for f in seq.antecedent + seq.succedent:
            scan(f)
    pair = sig.pair_symbol if sig.pair_symbol in fns else None
    pair_const = sig.pair_constant if pair and sig.pair_constant in consts else None
    return Signature.make(consts, fns, preds, pair, pair_const)


def _tuples(n: int, arity: int) -> list[tuple[int, ...]]:
    return list(itertools.product(range(n), repeat=arity))


def _perm_maps(n: int, arity: int) -> list[list[int]]:
    """For each non-identity permutation of the domain, the induced map on
    tuple indices (lexicographic order)."""
    tups = _tuples(n, arity)
    index = {t: i for i, t in enumerate(tups)}
    maps = []
    for perm in itertools.permutations(range(n)):
        if perm == tuple(range(n)):
            continue
        maps.append([index[tuple(perm[x] for x in t)] for t in tups])
    return maps


def iter_skeletons(sig: Signature, n: int, up_to_iso: bool = False
                   ) -> Iterator[tuple[dict, dict]]:
    """(fn_interp, pred_interp) pairs in documented lexicographic order.

    With up_to_iso (only honoured for function-free signatures) predicate
    tables that are not lexicographically minimal under domain permutations
    are skipped; sound for existence queries since constants and valuations
    are enumerated separately.
    """
    fns = sorted(sig.function_map.items())
    preds = sorted(sig.predicate_map.items())
    prune = up_to_iso and not fns and n > 1
    n_perms = 0
    perm_maps: dict[int, list[list[int]]] = {}
    if prune:
        perm_maps = {ar: _perm_maps(n, ar) for _, ar in preds}
        n_perms = next(iter(perm_maps.values()), [])
        n_perms = len(n_perms)
    tuples_of = {ar: _tuples(n, ar) for _, ar in itertools.chain(fns, preds)}

    def fn_tables() -> Iterator[dict]:
        pools = [itertools.product(range(n), repeat=n ** ar) for _, ar in fns]
        for combo in itertools.product(*pools):
            yield {name: dict(zip(tuples_of[ar], flat))
                   for (name, ar), flat in zip(fns, combo)}

    def _canonical(masks: tuple[int, ...]) -> bool:
        arities = [ar for _, ar in preds]
        for pi in range(n_perms):
            mapped = []
            for k, mask in enumerate(masks):
                pm = perm_maps[arities[k]][pi]
                out = 0
                msk, i = mask, 0
                while msk:
                    if msk & 1:
                        out |= 1 << pm[i]
                    msk >>= 1
                    i += 1
                mapped.append(out)
            if tuple(mapped) < tuple(masks):
                return False
        return True

    def pred_tables() -> Iterator[dict]:
        sizes = [2 ** (n ** ar) for _, ar in preds]
        for masks in itertools.product(*(range(sz) for sz in sizes)):
            if prune and preds and not _canonical(masks):
                continue
            yield {name: frozenset(t for i, t in enumerate(tuples_of[ar]) if masks[k] >> i & 1)
                   for k, (name, ar) in enumerate(preds)}

    for fn_i in fn_tables():
        for pred_i in pred_tables():
            yield fn_i, pred_i


def iter_models(sig: Signature, n: int) -> Iterator[FiniteModel]:
    """All models of size n over sig in documented enumeration order."""
    consts = sorted(sig.constants)
    for fn_i, pred_i in iter_skeletons(sig, n):
        for cvals in itertools.product(range(n), repeat=len(consts)):
            yield FiniteModel(n, dict(zip(consts, cvals)), fn_i, pred_i)


def sequent_holds(ev: Evaluator, v: Valuation, s: Sequent) -> bool:
    return (not all(ev.holds(f, v) for f in s.antecedent)
            or any(ev.holds(f, v) for f in s.succedent))


def theory_satisfied(ev: Evaluator, theory: tuple[Sequent, ...], n: int) -> bool:
    """Axioms are schematic: they must hold under all valuations."""
    for ax in theory:
        fvs = sorted(ax.free_vars())
        for vals in itertools.product(range(n), repeat=len(fvs)):
            if not sequent_holds(ev, dict(zip(fvs, vals)), ax):
                return False
    return True


def find_counter_model(s: Sequent, max_size: int, theory: tuple[Sequent, ...] = (),
                       sig: Signature | None = None, budget: int = 2_000_000,
                       up_to_iso: bool = False) -> tuple[FiniteModel, Valuation] | None:
    """First model/valuation (in enumeration order) satisfying the theory and
    every antecedent of s but no succedent; None if none exists within the
    size bound.  Absence is NOT a validity proof.

    Raises BudgetExceeded when more than `budget` candidate models would be
    examined.  With up_to_iso, isomorphic predicate tables are skipped
    (function-free signatures only); the answer's existence is unaffected.
    """
    if sig is None:
        raise SignatureMismatch("find_counter_model requires a signature")
    # symbols absent from goal and theory cannot affect satisfaction; skip
    # their tables so the enumeration stays small
    sig = used_signature((s,) + tuple(theory), sig)
    consts = sorted(sig.constants)
    used = set().union(s.free_vars(), *(ax.free_vars() for ax in theory)) | set(consts)
    cvars = {}
    for c in consts:
        name = fresh_name(used | set(cvars.values()), hint=f"_k{c}_")
        cvars[c] = name
    goal = Sequent(tuple(_replace_consts(f, cvars) for f in s.antecedent),
                   tuple(_replace_consts(f, cvars) for f in s.succedent))
    th = tuple(Sequent(tuple(_replace_consts(f, cvars) for f in ax.antecedent),
                       tuple(_replace_consts(f, cvars) for f in ax.succedent))
               for ax in theory)
    goal_fvs = sorted(s.free_vars())
    count = 0
    for n in range(1, max_size + 1):
        for fn_i, pred_i in iter_skeletons(sig, n, up_to_iso=up_to_iso):
            skeleton = FiniteModel(n, {}, fn_i, pred_i)
            ev = Evaluator(skeleton)
            for cvals in itertools.product(range(n), repeat=len(consts)):
                count += 1
                if count > budget:
                    raise BudgetExceeded(f"counter-model search budget {budget} exhausted")
                base = {cvars[c]: val for c, val in zip(consts, cvals)}
                if th and not _theory_ok(ev, th, base, n):
                    continue
                for vals in itertools.product(range(n), repeat=len(goal_fvs)):
                    v = {**base, **dict(zip(goal_fvs, vals))}
                    if (all(ev.holds(f, v) for f in goal.antecedent)
                            and not any(ev.holds(f, v) for f in goal.succedent)):
                        model = FiniteModel(n, dict(zip(consts, cvals)), fn_i, pred_i)
                        return model, dict(zip(goal_fvs, vals))
    return None


def _theory_ok(ev: Evaluator, theory: tuple[Sequent, ...], base: Valuation, n: int) -> bool:
    for ax in theory:
        fvs = sorted(ax.free_vars() - set(base))
        for vals in itertools.product(range(n), repeat=len(fvs)):
            if not sequent_holds(ev, {**base, **dict(zip(fvs, vals))}, ax):
                return False
    return True


# ---------------------------------------------------------------------------
# Descending counter-models

def invalidates(m: FiniteModel, v: Valuation, s: Sequent) -> bool:
    ev = _evaluator(m)
    return (all(ev.holds(f, v) for f in s.antecedent)
            and not any(ev.holds(f, v) for f in s.succedent))


def descent_witness(r: RuleInstance, m: FiniteModel, v: Valuation
                    ) -> tuple[int, FiniteModel, Valuation]:
    """Given (m, v) invalidating r's conclusion, return (premise_index, m', v')
    invalidating that premise, with degrees non-increasing along trace pairs
    and strictly decreasing along progressing ones."""
    if r.rule is RuleId.RtcRefl:
        raise NotApplicable("the conclusion of reflexivity has no counter-model")
    if not invalidates(m, v, r.conclusion):
        raise NoCounterexample("the given pair does not invalidate the conclusion")
    if not r.premises:
        raise NotApplicable(f"{r.rule.value} has no premises to descend into")
    ev = _evaluator(m)
    p = r.params
    # rule parameters (cut formulas, witness terms) may introduce variables
    # absent from the conclusion; fix them to 0 ahead of premise selection
    needed = set()
    for prem in r.premises:
        needed |= prem.free_vars()
    v = {**{x: 0 for x in sorted(needed - set(v))}, **v}

    def holds(f: Formula) -> bool:
        return ev.holds(f, v)

    idx, v2 = 0, dict(v)
    match r.rule:
        case (RuleId.WL | RuleId.WR | RuleId.AndL | RuleId.OrR | RuleId.ImpR
              | RuleId.NotL | RuleId.NotR | RuleId.AllL | RuleId.ExR
              | RuleId.EqL1 | RuleId.EqL2 | RuleId.PairInj):
            pass

        case RuleId.AndR:
            idx = 0 if not holds(p.principal.left) else 1

        case RuleId.OrL:
            idx = 0 if holds(p.principal.left) else 1

        case RuleId.ImpL:
            idx = 0 if not holds(p.principal.left) else 1

        case RuleId.Cut:
            idx = 0 if not holds(p.cut_formula) else 1

        case RuleId.ExL:
            inst = substitute(p.principal.body, {p.principal.var: Var(p.eigenvar)})
            for a in range(m.domain_size):
                if ev.holds(inst, {**v, p.eigenvar: a}):
                    v2 = {**v, p.eigenvar: a}
                    break
            else:
                raise AssertionError("existential was true but no witness element found")

        case RuleId.AllR:
            inst = substitute(p.principal.body, {p.principal.var: Var(p.eigenvar)})
            for a in range(m.domain_size):
                if not ev.holds(inst, {**v, p.eigenvar: a}):
                    v2 = {**v, p.eigenvar: a}
                    break
            else:
                raise AssertionError("universal was false on every element?")

        case RuleId.Subst:
            theta = subst_dict(p.substitution)
            v2 = {x: ev.term(theta.get(x, Var(x)), v) for x in p.source.free_vars()}

        case RuleId.RtcStep:
            f = p.principal
            mid = Rtc(f.x, f.y, f.body, f.src, p.witness)
            idx = 0 if not holds(mid) else 1

        case RuleId.RtcCase:
            chain = minimal_chain(m, v, p.principal)
            if chain is None:
                raise AssertionError("rtc antecedent was true but has no chain")
            if len(chain) == 1:
                idx = 0
            else:
                # penultimate element of the minimal chain: the principal's
                # degree strictly decreases on the progressing trace pair
                idx, v2 = 1, {**v, p.eigenvar: chain[-2]}

        case RuleId.RtcInd:
            chain = minimal_chain(m, v, p.principal)
            if chain is None:
                raise AssertionError("rtc antecedent was true but has no chain")
            x, y = p.eigenvar, p.eigenvar2
            for i in range(len(chain) - 1):
                cand = {**v, x: chain[i], y: chain[i + 1]}
                if invalidates(m, cand, r.premises[0]):
                    v2 = cand
                    break
            else:
                raise AssertionError("no failing induction step along the minimal chain")

        case _:
            raise NotApplicable(f"descent not defined for {r.rule.value}")

    if not invalidates(m, v2, r.premises[idx]):
        if r.rule is RuleId.PairInj:
            raise NotApplicable("pairing is not injective in this finite model")
        raise AssertionError(
            f"{r.rule.value}: chosen premise {idx} not invalidated; unsound instance?")
    return idx, m, v2
