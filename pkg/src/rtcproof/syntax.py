"""Terms, formulas, sequents: construction, parsing, printing, substitution.

Formulas are identified up to renaming of bound variables throughout the
package: `Formula.__eq__`, `__hash__` and the ordering used inside sequents
all go through a de-Bruijn-style canonical key, so two alpha-equivalent
formulas are interchangeable everywhere.  `canon` additionally rebuilds a
formula with deterministic bound-variable names (idempotent).

Concrete grammar (ASCII):

    term  := ident | ident "(" term ("," term)* ")" | "<" term "," term ">"
    atom  := term "=" term | ident "(" term ("," term)* ")" | ident | "bot" | "top"
    form  := atom | "~" form | form "/\\" form | form "\\/" form | form "->" form
           | "forall" ident "." form | "exists" ident "." form
           | "(" "rtc" ident ident "." form ")" "(" term "," term ")" | "(" form ")"
    sequent := form ("," form)* "|-" form ("," form)*    (either side may be empty)

Precedence: ~ > /\\ > \\/ > -> (right associative); quantifier and rtc
bodies extend maximally to the right.  A bare identifier is an atom only
when it is declared as a zero-ary predicate.  Identifiers may start with a
digit, so arithmetic constants like `0` parse as plain identifiers.
"""

from __future__ import annotations

import itertools
import re
from dataclasses import dataclass, field
from typing import Iterable, Iterator, Mapping

from .errors import ArityMismatch, ParseError, UnknownSymbol

# ---------------------------------------------------------------------------
# Terms

@dataclass(frozen=True)
class Term:
    pass


@dataclass(frozen=True)
class Var(Term):
    name: str


@dataclass(frozen=True)
class Const(Term):
    name: str


@dataclass(frozen=True)
class App(Term):
    fn: str
    args: tuple[Term, ...]


def term_vars(t: Term) -> set[str]:
    match t:
        case Var(name):
            return {name}
        case Const(_):
            return set()
        case App(_, args):
            out: set[str] = set()
            for a in args:
                out |= term_vars(a)
            return out
    raise TypeError(f"not a term: {t!r}")


def subst_term(t: Term, theta: Mapping[str, Term]) -> Term:
    match t:
        case Var(name):
            return theta.get(name, t)
        case Const(_):
            return t
        case App(fn, args):
            return App(fn, tuple(subst_term(a, theta) for a in args))
    raise TypeError(f"not a term: {t!r}")


def term_key(t: Term) -> str:
    """Total-order key for terms; structural."""
    match t:
        case Var(name):
            return f"(v {name})"
        case Const(name):
            return f"(c {name})"
        case App(fn, args):
            return f"(f {fn} {' '.join(term_key(a) for a in args)})"
    raise TypeError(f"not a term: {t!r}")


def subterms(t: Term) -> Iterator[Term]:
    yield t
    if isinstance(t, App):
        for a in t.args:
            yield from subterms(a)


# ---------------------------------------------------------------------------
# Formulas

@dataclass(frozen=True, eq=False)
class Formula:
    def key(self) -> str:
        """Cached de-Bruijn-style canonical print; alpha-invariant."""
        k = self.__dict__.get("_key")
        if k is None:
            k = _formula_key(self, {}, 0)
            object.__setattr__(self, "_key", k)
        return k

    def __eq__(self, other: object) -> bool:
        if self is other:
            return True
        return isinstance(other, Formula) and self.key() == other.key()

    def __hash__(self) -> int:
        return hash(self.key())

    def __str__(self) -> str:
        return pretty(self)


@dataclass(frozen=True, eq=False)
class Eq(Formula):
    lhs: Term
    rhs: Term


@dataclass(frozen=True, eq=False)
class Pred(Formula):
    name: str
    args: tuple[Term, ...]


@dataclass(frozen=True, eq=False)
class Top(Formula):
    pass


@dataclass(frozen=True, eq=False)
class Bot(Formula):
    pass


@dataclass(frozen=True, eq=False)
class Not(Formula):
    sub: Formula


@dataclass(frozen=True, eq=False)
class And(Formula):
    left: Formula
    right: Formula


@dataclass(frozen=True, eq=False)
class Or(Formula):
    left: Formula
    right: Formula


@dataclass(frozen=True, eq=False)
class Implies(Formula):
    left: Formula
    right: Formula


@dataclass(frozen=True, eq=False)
class Forall(Formula):
    var: str
    body: Formula


@dataclass(frozen=True, eq=False)
class Exists(Formula):
    var: str
    body: Formula


@dataclass(frozen=True, eq=False)
class Rtc(Formula):
    """(rtc x y. body)(src, dst): x and y bind inside body only."""

    x: str
    y: str
    body: Formula
    src: Term
    dst: Term


def _term_dbkey(t: Term, env: Mapping[str, int]) -> str:
    match t:
        case Var(name):
            lvl = env.get(name)
            return f"(b {lvl})" if lvl is not None else f"(v {name})"
        case Const(name):
            return f"(c {name})"
        case App(fn, args):
            return f"(f {fn} {' '.join(_term_dbkey(a, env) for a in args)})"
    raise TypeError(f"not a term: {t!r}")


def _formula_key(f: Formula, env: Mapping[str, int], depth: int) -> str:
    match f:
        case Eq(l, r):
            return f"(= {_term_dbkey(l, env)} {_term_dbkey(r, env)})"
        case Pred(name, args):
            return f"(p {name} {' '.join(_term_dbkey(a, env) for a in args)})"
        case Top():
            return "(top)"
        case Bot():
            return "(bot)"
        case Not(s):
            return f"(~ {_formula_key(s, env, depth)})"
        case And(l, r):
            return f"(& {_formula_key(l, env, depth)} {_formula_key(r, env, depth)})"
        case Or(l, r):
            return f"(| {_formula_key(l, env, depth)} {_formula_key(r, env, depth)})"
        case Implies(l, r):
            return f"(> {_formula_key(l, env, depth)} {_formula_key(r, env, depth)})"
        case Forall(x, b):
            return f"(all {_formula_key(b, {**env, x: depth}, depth + 1)})"
        case Exists(x, b):
            return f"(ex {_formula_key(b, {**env, x: depth}, depth + 1)})"
        case Rtc(x, y, b, s, t):
            bk = _formula_key(b, {**env, x: depth, y: depth + 1}, depth + 2)
            return f"(rtc {bk} {_term_dbkey(s, env)} {_term_dbkey(t, env)})"
    raise TypeError(f"not a formula: {f!r}")


def alpha_eq(f: Formula, g: Formula) -> bool:
    """True iff the canonical (de-Bruijn) forms are identical."""
    return f.key() == g.key()


def free_vars(f: Formula) -> set[str]:
    match f:
        case Eq(l, r):
            return term_vars(l) | term_vars(r)
        case Pred(_, args):
            out: set[str] = set()
            for a in args:
                out |= term_vars(a)
            return out
        case Top() | Bot():
            return set()
        case Not(s):
            return free_vars(s)
        case And(l, r) | Or(l, r) | Implies(l, r):
            return free_vars(l) | free_vars(r)
        case Forall(x, b) | Exists(x, b):
            return free_vars(b) - {x}
        case Rtc(x, y, b, s, t):
            return (free_vars(b) - {x, y}) | term_vars(s) | term_vars(t)
    raise TypeError(f"not a formula: {f!r}")


def all_names(f: Formula) -> set[str]:
    """Every variable name occurring in f, bound or free."""
    match f:
        case Eq(l, r):
            return term_vars(l) | term_vars(r)
        case Pred(_, args):
            out: set[str] = set()
            for a in args:
                out |= term_vars(a)
            return out
        case Top() | Bot():
            return set()
        case Not(s):
            return all_names(s)
        case And(l, r) | Or(l, r) | Implies(l, r):
            return all_names(l) | all_names(r)
        case Forall(x, b) | Exists(x, b):
            return all_names(b) | {x}
        case Rtc(x, y, b, s, t):
            return all_names(b) | {x, y} | term_vars(s) | term_vars(t)
    raise TypeError(f"not a formula: {f!r}")


def fresh_name(avoid: set[str], hint: str = "_v") -> str:
    """First name hint0, hint1, ... not in avoid."""
    for i in itertools.count():
        cand = f"{hint}{i}"
        if cand not in avoid:
            return cand
    raise AssertionError("unreachable")


def substitute(f: Formula, theta: Mapping[str, Term]) -> Formula:
    """Simultaneous, capture-avoiding substitution on free occurrences."""
    theta = {v: t for v, t in theta.items() if t != Var(v)}
    if not theta:
        return f

    def go(g: Formula, th: dict[str, Term]) -> Formula:
        if not th:
            return g
        match g:
            case Eq(l, r):
                return Eq(subst_term(l, th), subst_term(r, th))
            case Pred(name, args):
                return Pred(name, tuple(subst_term(a, th) for a in args))
            case Top() | Bot():
                return g
            case Not(s):
                return Not(go(s, th))
            case And(l, r):
                return And(go(l, th), go(r, th))
            case Or(l, r):
                return Or(go(l, th), go(r, th))
            case Implies(l, r):
                return Implies(go(l, th), go(r, th))
            case Forall(x, b):
                (x2,), b2, th2 = _push((x,), b, th)
                return Forall(x2, go(b2, th2))
            case Exists(x, b):
                (x2,), b2, th2 = _push((x,), b, th)
                return Exists(x2, go(b2, th2))
            case Rtc(x, y, b, s, t):
                s2, t2 = subst_term(s, th), subst_term(t, th)
                (x2, y2), b2, th2 = _push((x, y), b, th)
                return Rtc(x2, y2, go(b2, th2), s2, t2)
        raise TypeError(f"not a formula: {g!r}")

    def _push(binders: tuple[str, ...], body: Formula, th: dict[str, Term]):
        """Restrict th to the binder scope, renaming binders that would capture."""
        th2 = {v: u for v, u in th.items() if v not in binders and v in free_vars(body)}
        if not th2:
            return binders, body, {}
        imgs: set[str] = set()
        for u in th2.values():
            imgs |= term_vars(u)
        new_binders = list(binders)
        for i, x in enumerate(new_binders):
            if x in imgs:
                avoid = (all_names(body) | imgs | set(th2)
                         | set(new_binders))
                nx = fresh_name(avoid)
                # nx occurs nowhere in body, so this rename cannot cascade
                body = go(body, {x: Var(nx)})
                new_binders[i] = nx
        return tuple(new_binders), body, th2

    return go(f, theta)


def canon(f: Formula) -> Formula:
    """Rename bound variables to a deterministic `_bN` scheme (idempotent)."""
    free = free_vars(f)
    counter = itertools.count()

    def next_name() -> str:
        while True:
            n = f"_b{next(counter)}"
            if n not in free:
                return n

    def goterm(t: Term, env: Mapping[str, str]) -> Term:
        match t:
            case Var(name):
                return Var(env.get(name, name))
            case Const(_):
                return t
            case App(fn, args):
                return App(fn, tuple(goterm(a, env) for a in args))
        raise TypeError(f"not a term: {t!r}")

    def go(g: Formula, env: Mapping[str, str]) -> Formula:
        match g:
            case Eq(l, r):
                return Eq(goterm(l, env), goterm(r, env))
            case Pred(name, args):
                return Pred(name, tuple(goterm(a, env) for a in args))
            case Top() | Bot():
                return g
            case Not(s):
                return Not(go(s, env))
            case And(l, r):
                return And(go(l, env), go(r, env))
            case Or(l, r):
                return Or(go(l, env), go(r, env))
            case Implies(l, r):
                return Implies(go(l, env), go(r, env))
            case Forall(x, b):
                nx = next_name()
                return Forall(nx, go(b, {**env, x: nx}))
            case Exists(x, b):
                nx = next_name()
                return Exists(nx, go(b, {**env, x: nx}))
            case Rtc(x, y, b, s, t):
                nx, ny = next_name(), next_name()
                return Rtc(nx, ny, go(b, {**env, x: nx, y: ny}),
                           goterm(s, env), goterm(t, env))
        raise TypeError(f"not a formula: {g!r}")

    return go(f, {})


def formula_subterms(f: Formula) -> Iterator[Term]:
    """All term occurrences in f, including inside binders."""
    match f:
        case Eq(l, r):
            yield from subterms(l)
            yield from subterms(r)
        case Pred(_, args):
            for a in args:
                yield from subterms(a)
        case Top() | Bot():
            return
        case Not(s):
            yield from formula_subterms(s)
        case And(l, r) | Or(l, r) | Implies(l, r):
            yield from formula_subterms(l)
            yield from formula_subterms(r)
        case Forall(_, b) | Exists(_, b):
            yield from formula_subterms(b)
        case Rtc(_, _, b, s, t):
            yield from formula_subterms(b)
            yield from subterms(s)
            yield from subterms(t)


# ---------------------------------------------------------------------------
# Signature

@dataclass(frozen=True)
class Signature:
    constants: frozenset[str] = frozenset()
    functions: tuple[tuple[str, int], ...] = ()
    predicates: tuple[tuple[str, int], ...] = ()
    pair_symbol: str | None = None
    pair_constant: str | None = None

    def __post_init__(self):
        if self.pair_symbol is not None and self.fn_arity(self.pair_symbol) != 2:
            raise ArityMismatch(f"pair symbol {self.pair_symbol!r} must be a binary function")
        if self.pair_constant is not None and self.pair_constant not in self.constants:
            raise UnknownSymbol(f"pair constant {self.pair_constant!r} not declared")

    @staticmethod
    def make(constants: Iterable[str] = (), functions: Mapping[str, int] | None = None,
             predicates: Mapping[str, int] | None = None, pair_symbol: str | None = None,
             pair_constant: str | None = None) -> "Signature":
        return Signature(
            constants=frozenset(constants),
            functions=tuple(sorted((functions or {}).items())),
            predicates=tuple(sorted((predicates or {}).items())),
            pair_symbol=pair_symbol,
            pair_constant=pair_constant,
        )

    def fn_arity(self, name: str) -> int | None:
        for n, a in self.functions:
            if n == name:
                return a
        return None

    def pred_arity(self, name: str) -> int | None:
        for n, a in self.predicates:
            if n == name:
                return a
        return None

    @property
    def function_map(self) -> dict[str, int]:
        return dict(self.functions)

    @property
    def predicate_map(self) -> dict[str, int]:
        return dict(self.predicates)

    def merge(self, other: "Signature") -> "Signature":
        fns = dict(self.functions)
        for n, a in other.functions:
            if fns.setdefault(n, a) != a:
                raise ArityMismatch(f"function {n!r} declared with arities {fns[n]} and {a}")
        preds = dict(self.predicates)
        for n, a in other.predicates:
            if preds.setdefault(n, a) != a:
                raise ArityMismatch(f"predicate {n!r} declared with arities {preds[n]} and {a}")
        return Signature.make(
            constants=self.constants | other.constants,
            functions=fns, predicates=preds,
            pair_symbol=self.pair_symbol or other.pair_symbol,
            pair_constant=self.pair_constant or other.pair_constant,
        )


def validate_formula(f: Formula, sig: Signature) -> None:
    """Check arities and declaredness of every symbol in f."""

    def vterm(t: Term) -> None:
        match t:
            case Var(_):
                return
            case Const(name):
                if name not in sig.constants:
                    raise UnknownSymbol(f"constant {name!r} not declared")
            case App(fn, args):
                ar = sig.fn_arity(fn)
                if ar is None:
                    raise UnknownSymbol(f"function {fn!r} not declared")
                if ar != len(args):
                    raise ArityMismatch(f"function {fn!r} expects {ar} args, got {len(args)}")
                for a in args:
                    vterm(a)

    match f:
        case Eq(l, r):
            vterm(l), vterm(r)
        case Pred(name, args):
            ar = sig.pred_arity(name)
            if ar is None:
                raise UnknownSymbol(f"predicate {name!r} not declared")
            if ar != len(args):
                raise ArityMismatch(f"predicate {name!r} expects {ar} args, got {len(args)}")
            for a in args:
                vterm(a)
        case Top() | Bot():
            pass
        case Not(s):
            validate_formula(s, sig)
        case And(l, r) | Or(l, r) | Implies(l, r):
            validate_formula(l, sig), validate_formula(r, sig)
        case Forall(_, b) | Exists(_, b):
            validate_formula(b, sig)
        case Rtc(x, y, b, s, t):
            if x == y:
                raise ParseError(0, "rtc binders must be distinct")
            validate_formula(b, sig)
            vterm(s), vterm(t)


# ---------------------------------------------------------------------------
# Sequents

@dataclass(frozen=True, eq=False)
class Sequent:
    """Finite antecedent/succedent sets, deduped under alpha and kept sorted."""

    antecedent: tuple[Formula, ...]
    succedent: tuple[Formula, ...]

    def __post_init__(self):
        object.__setattr__(self, "antecedent", _normalize(self.antecedent))
        object.__setattr__(self, "succedent", _normalize(self.succedent))

    def __eq__(self, other: object) -> bool:
        return (isinstance(other, Sequent)
                and self.antecedent == other.antecedent
                and self.succedent == other.succedent)

    def __hash__(self) -> int:
        return hash((self.antecedent, self.succedent))

    def key(self) -> str:
        ak = ",".join(f.key() for f in self.antecedent)
        sk = ",".join(f.key() for f in self.succedent)
        return ak + " |- " + sk

    def __str__(self) -> str:
        return pretty_sequent(self)

    def free_vars(self) -> set[str]:
        out: set[str] = set()
        for f in self.antecedent + self.succedent:
            out |= free_vars(f)
        return out

    def with_ant(self, *fs: Formula) -> "Sequent":
        return Sequent(self.antecedent + tuple(fs), self.succedent)

    def with_succ(self, *fs: Formula) -> "Sequent":
        return Sequent(self.antecedent, self.succedent + tuple(fs))

    def without_ant(self, f: Formula) -> "Sequent":
        return Sequent(tuple(g for g in self.antecedent if g != f), self.succedent)

    def without_succ(self, f: Formula) -> "Sequent":
        return Sequent(self.antecedent, tuple(g for g in self.succedent if g != f))

    def substituted(self, theta: Mapping[str, Term]) -> "Sequent":
        return Sequent(tuple(substitute(f, theta) for f in self.antecedent),
                       tuple(substitute(f, theta) for f in self.succedent))

    def contains(self, other: "Sequent") -> bool:
        ant = set(self.antecedent)
        suc = set(self.succedent)
        return all(f in ant for f in other.antecedent) and all(f in suc for f in other.succedent)


def _normalize(fs: Iterable[Formula]) -> tuple[Formula, ...]:
    seen: dict[str, Formula] = {}
    for f in fs:
        seen.setdefault(f.key(), f)
    return tuple(seen[k] for k in sorted(seen))


def sequent(ant: Iterable[Formula], suc: Iterable[Formula]) -> Sequent:
    return Sequent(tuple(ant), tuple(suc))


# ---------------------------------------------------------------------------
# Parsing

_TOKEN_RE = re.compile(r"""
    (?P<ws>\s+)
  | (?P<sym>\|-|->|/\\|\\/|:=|[()\[\]{},.=~<>;/-])
  | (?P<ident>[A-Za-z0-9_][A-Za-z0-9_']*)
""", re.VERBOSE)

_KEYWORDS = {"forall", "exists", "rtc", "bot", "top"}


def tokenize(text: str) -> list[tuple[str, str, int]]:
    """Returns (kind, value, position) triples; kind in {'sym','ident','eof'}."""
    out = []
    pos = 0
    while pos < len(text):
        m = _TOKEN_RE.match(text, pos)
        if m is None:
            raise ParseError(pos, f"unexpected character {text[pos]!r}")
        if m.lastgroup != "ws":
            out.append((m.lastgroup, m.group(), pos))
        pos = m.end()
    out.append(("eof", "", len(text)))
    return out


class _Parser:
    def __init__(self, text: str, sig: Signature, infer: bool = False):
        self.toks = tokenize(text)
        self.i = 0
        self.sig = sig
        self.infer = infer
        self._fns: dict[str, int] = {}
        self._preds: dict[str, int] = {}

    def _fn_arity(self, name: str) -> int | None:
        ar = self.sig.fn_arity(name)
        return self._fns.get(name) if ar is None else ar

    def _pred_arity(self, name: str) -> int | None:
        ar = self.sig.pred_arity(name)
        return self._preds.get(name) if ar is None else ar

    def _after_matching_paren(self) -> str:
        """Token value right after the parenthesized group starting at i+1."""
        j = self.i + 1
        depth = 0
        while j < len(self.toks):
            val = self.toks[j][1]
            if val == "(":
                depth += 1
            elif val == ")":
                depth -= 1
                if depth == 0:
                    return self.toks[j + 1][1] if j + 1 < len(self.toks) else ""
            j += 1
        return ""

    def inferred_signature(self) -> Signature:
        return self.sig.merge(Signature.make(functions=self._fns, predicates=self._preds))

    def peek(self):
        return self.toks[self.i]

    def next(self):
        t = self.toks[self.i]
        self.i += 1
        return t

    def expect(self, value: str):
        kind, val, pos = self.peek()
        if val != value or kind == "eof":
            raise ParseError(pos, f"expected {value!r}, found {val or 'end of input'!r}")
        return self.next()

    def expect_ident(self) -> str:
        kind, val, pos = self.peek()
        if kind != "ident":
            raise ParseError(pos, f"expected identifier, found {val or 'end of input'!r}")
        if val in _KEYWORDS:
            raise ParseError(pos, f"keyword {val!r} cannot be used as an identifier")
        self.next()
        return val

    # -- terms

    def term(self) -> Term:
        kind, val, pos = self.peek()
        if val == "<":
            self.next()
            a = self.term()
            self.expect(",")
            b = self.term()
            self.expect(">")
            if self.sig.pair_symbol is None:
                raise UnknownSymbol("pair syntax used but signature has no pair symbol")
            return App(self.sig.pair_symbol, (a, b))
        if kind != "ident" or val in _KEYWORDS:
            raise ParseError(pos, f"expected term, found {val or 'end of input'!r}")
        name = self.expect_ident()
        if self.peek()[1] == "(":
            self.next()
            args = [self.term()]
            while self.peek()[1] == ",":
                self.next()
                args.append(self.term())
            self.expect(")")
            ar = self._fn_arity(name)
            if ar is None:
                if not self.infer or self._pred_arity(name) is not None:
                    raise UnknownSymbol(f"function {name!r} not declared")
                self._fns[name] = ar = len(args)
            if ar != len(args):
                raise ArityMismatch(f"function {name!r} expects {ar} args, got {len(args)}")
            return App(name, tuple(args))
        if name in self.sig.constants:
            return Const(name)
        return Var(name)

    # -- formulas (precedence climbing)

    def formula(self) -> Formula:
        return self._implies()

    def _implies(self) -> Formula:
        left = self._or()
        if self.peek()[1] == "->":
            self.next()
            return Implies(left, self._implies())
        return left

    def _or(self) -> Formula:
        f = self._and()
        while self.peek()[1] == "\\/":
            self.next()
            f = Or(f, self._and())
        return f

    def _and(self) -> Formula:
        f = self._neg()
        while self.peek()[1] == "/\\":
            self.next()
            f = And(f, self._neg())
        return f

    def _neg(self) -> Formula:
        kind, val, pos = self.peek()
        if val == "~":
            self.next()
            return Not(self._neg())
        if val in ("forall", "exists"):
            self.next()
            x = self.expect_ident()
            self.expect(".")
            body = self.formula()
            return Forall(x, body) if val == "forall" else Exists(x, body)
        return self._atom()

    def _atom(self) -> Formula:
        kind, val, pos = self.peek()
        if val == "(":
            self.next()
            if self.peek()[1] == "rtc":
                self.next()
                x = self.expect_ident()
                y = self.expect_ident()
                if x == y:
                    raise ParseError(pos, "rtc binders must be distinct")
                self.expect(".")
                body = self.formula()
                self.expect(")")
                self.expect("(")
                s = self.term()
                self.expect(",")
                t = self.term()
                self.expect(")")
                return Rtc(x, y, body, s, t)
            f = self.formula()
            self.expect(")")
            # a parenthesized term-in-equality, e.g. "(x) = y", is not in the
            # grammar, so a closing paren always ends a formula here
            return f
        if val == "bot":
            self.next()
            return Bot()
        if val == "top":
            self.next()
            return Top()
        if kind == "ident":
            name = val
            nxt = self.toks[self.i + 1][1]
            if nxt == "(":
                # predicate or function application; decide by signature, or
                # in inference mode by whether an equation follows
                as_pred = self._pred_arity(name) is not None
                if (self.infer and not as_pred and self._fn_arity(name) is None
                        and self._after_matching_paren() != "="):
                    as_pred = True
                if as_pred:
                    self.next()
                    self.next()
                    args = [self.term()]
                    while self.peek()[1] == ",":
                        self.next()
                        args.append(self.term())
                    self.expect(")")
                    ar = self._pred_arity(name)
                    if ar is None:
                        self._preds[name] = ar = len(args)
                    if ar != len(args):
                        raise ArityMismatch(
                            f"predicate {name!r} expects {ar} args, got {len(args)}")
                    return Pred(name, tuple(args))
                return self._equation()
            if self._pred_arity(name) == 0:
                self.next()
                return Pred(name, ())
            return self._equation()
        if val == "<":
            return self._equation()
        raise ParseError(pos, f"expected formula, found {val or 'end of input'!r}")

    def _equation(self) -> Formula:
        lhs = self.term()
        self.expect("=")
        rhs = self.term()
        return Eq(lhs, rhs)

    def sequent(self) -> Sequent:
        ant: list[Formula] = []
        suc: list[Formula] = []
        if self.peek()[1] != "|-":
            ant.append(self.formula())
            while self.peek()[1] == ",":
                self.next()
                ant.append(self.formula())
        self.expect("|-")
        if self.peek()[0] != "eof" and self.peek()[1] not in (";", ")"):
            suc.append(self.formula())
            while self.peek()[1] == ",":
                self.next()
                suc.append(self.formula())
        return Sequent(tuple(ant), tuple(suc))

    def at_eof(self) -> bool:
        return self.peek()[0] == "eof"


def parse_term(text: str, sig: Signature) -> Term:
    p = _Parser(text, sig)
    t = p.term()
    if not p.at_eof():
        raise ParseError(p.peek()[2], "trailing input after term")
    return t


def parse_formula(text: str, sig: Signature) -> Formula:
    p = _Parser(text, sig)
    f = p.formula()
    if not p.at_eof():
        raise ParseError(p.peek()[2], "trailing input after formula")
    validate_formula(f, sig)
    return f


def parse_sequent(text: str, sig: Signature) -> Sequent:
    p = _Parser(text, sig)
    s = p.sequent()
    if not p.at_eof():
        raise ParseError(p.peek()[2], "trailing input after sequent")
    for f in s.antecedent + s.succedent:
        validate_formula(f, sig)
    return s


def parse_sequent_infer(text: str, base: Signature) -> tuple[Sequent, Signature]:
    """Parse a sequent, inferring undeclared applied symbols: an application
    followed by '=' is a function, otherwise a predicate; bare undeclared
    identifiers are variables."""
    p = _Parser(text, base, infer=True)
    s = p.sequent()
    if not p.at_eof():
        raise ParseError(p.peek()[2], "trailing input after sequent")
    sig = p.inferred_signature()
    for f in s.antecedent + s.succedent:
        validate_formula(f, sig)
    return s, sig


def parse_formula_infer(text: str, base: Signature) -> tuple[Formula, Signature]:
    p = _Parser(text, base, infer=True)
    f = p.formula()
    if not p.at_eof():
        raise ParseError(p.peek()[2], "trailing input after formula")
    sig = p.inferred_signature()
    validate_formula(f, sig)
    return f, sig


# ---------------------------------------------------------------------------
# Printing

def pretty_term(t: Term, sig: Signature | None = None) -> str:
    match t:
        case Var(name) | Const(name):
            return name
        case App(fn, args):
            if sig is not None and sig.pair_symbol == fn and len(args) == 2:
                return f"<{pretty_term(args[0], sig)}, {pretty_term(args[1], sig)}>"
            return f"{fn}({', '.join(pretty_term(a, sig) for a in args)})"
    raise TypeError(f"not a term: {t!r}")


_LVL_IMP, _LVL_OR, _LVL_AND, _LVL_NOT, _LVL_ATOM = 1, 2, 3, 4, 5


def pretty(f: Formula, sig: Signature | None = None) -> str:
    def go(g: Formula, minlvl: int) -> str:
        match g:
            case Eq(l, r):
                return f"{pretty_term(l, sig)} = {pretty_term(r, sig)}"
            case Pred(name, args):
                if not args:
                    return name
                return f"{name}({', '.join(pretty_term(a, sig) for a in args)})"
            case Top():
                return "top"
            case Bot():
                return "bot"
            case Not(s):
                return f"~{go(s, _LVL_NOT)}"
            case And(l, r):
                text = f"{go(l, _LVL_AND)} /\\ {go(r, _LVL_AND + 1)}"
                return f"({text})" if minlvl > _LVL_AND else text
            case Or(l, r):
                text = f"{go(l, _LVL_OR)} \\/ {go(r, _LVL_OR + 1)}"
                return f"({text})" if minlvl > _LVL_OR else text
            case Implies(l, r):
                text = f"{go(l, _LVL_IMP + 1)} -> {go(r, _LVL_IMP)}"
                return f"({text})" if minlvl > _LVL_IMP else text
            case Forall(x, b):
                text = f"forall {x}. {go(b, _LVL_IMP)}"
                return f"({text})" if minlvl > _LVL_IMP else text
            case Exists(x, b):
                text = f"exists {x}. {go(b, _LVL_IMP)}"
                return f"({text})" if minlvl > _LVL_IMP else text
            case Rtc(x, y, b, s, t):
                return (f"(rtc {x} {y}. {go(b, _LVL_IMP)})"
                        f"({pretty_term(s, sig)}, {pretty_term(t, sig)})")
        raise TypeError(f"not a formula: {g!r}")

    return go(f, _LVL_IMP)


def pretty_sequent(s: Sequent, sig: Signature | None = None) -> str:
    ant = ", ".join(pretty(f, sig) for f in s.antecedent)
    suc = ", ".join(pretty(f, sig) for f in s.succedent)
    if ant and suc:
        return f"{ant} |- {suc}"
    if ant:
        return f"{ant} |-"
    return f"|- {suc}"
