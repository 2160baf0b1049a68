"""Formula ASTs, parser, printer, and the syntactic transformations.

The language is first order modal logic without function symbols or
equality: predicates over individual variables, true/false, ~, ->, &,
|, forall, exists, and box. Propositional variables (written #p) act as
substitution holes for the fixed point constructions. The connectives
&, | and the quantifier exists are first class AST nodes because the
guarded fragment recognized by is_sigma is defined structurally in
terms of them; <-> and dia are parser sugar and never appear in ASTs.

Domain constants (Const) never come from the surface grammar. They are
injected by the model checking code, which instantiates quantifiers
with elements of a world's domain.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from typing import Iterator, Mapping, Optional, Sequence, Union


class LogicError(Exception):
    """Base class for all errors raised by this package."""

    code = "error"


class ParseError(LogicError):
    code = "parse-error"

    def __init__(self, message: str, position: int = -1):
        super().__init__(message if position < 0 else f"{message} (at position {position})")
        self.position = position


class UnknownPredicateError(ParseError):
    code = "unknown-predicate"


class ArityMismatchError(ParseError):
    code = "arity-mismatch"


class CaptureError(LogicError):
    code = "capture-violation"


class DepthOverflowError(LogicError):
    code = "depth-overflow"


class NotModalizedError(LogicError):
    code = "not-modalized"


class NotNormalizedError(LogicError):
    code = "not-normalized"


class NotSigmaError(LogicError):
    code = "not-sigma"


class NotDecomposableError(LogicError):
    code = "not-decomposable"


@dataclass(frozen=True)
class Var:
    name: str


@dataclass(frozen=True)
class Const:
    name: str


Term = Union[Var, Const]


@dataclass(frozen=True)
class Top:
    pass


@dataclass(frozen=True)
class Bottom:
    pass


@dataclass(frozen=True)
class Atom:
    pred: str
    args: tuple[Term, ...] = ()


@dataclass(frozen=True)
class PropVar:
    name: str


@dataclass(frozen=True)
class Not:
    body: "Formula"


@dataclass(frozen=True)
class Implies:
    left: "Formula"
    right: "Formula"


@dataclass(frozen=True)
class And:
    left: "Formula"
    right: "Formula"


@dataclass(frozen=True)
class Or:
    left: "Formula"
    right: "Formula"


@dataclass(frozen=True)
class Forall:
    var: str
    body: "Formula"


@dataclass(frozen=True)
class Exists:
    var: str
    body: "Formula"


@dataclass(frozen=True)
class Box:
    body: "Formula"


Formula = Union[Top, Bottom, Atom, PropVar, Not, Implies, And, Or, Forall, Exists, Box]

TRUE = Top()
FALSE = Bottom()


@dataclass(frozen=True)
class FixpointTarget:
    """A formula together with the propositional variable treated as the hole."""

    formula: Formula
    hole: str = "p"


def iff(a: Formula, b: Formula) -> Formula:
    """Biconditional, expanded to a conjunction of implications."""
    return And(Implies(a, b), Implies(b, a))


def dia(a: Formula) -> Formula:
    """Possibility, expanded to ~box ~."""
    return Not(Box(Not(a)))


def boxes(n: int, f: Formula) -> Formula:
    """n nested boxes around f."""
    for _ in range(n):
        f = Box(f)
    return f


def boxdot(f: Formula) -> Formula:
    """box f & f, the reflexive strengthening of box."""
    return And(Box(f), f)


# ---------------------------------------------------------------------------
# Parsing

_KEYWORDS = frozenset({"true", "false", "box", "dia", "forall", "exists"})

_TOKEN_RE = re.compile(
    r"""
    (?P<ws>\s+)
  | (?P<arrow2><->)
  | (?P<arrow>->)
  | (?P<punct>[()&|~.,\#])
  | (?P<upper>[A-Z][A-Za-z0-9_]*)
  | (?P<lower>[a-z][a-z0-9_]*)
    """,
    re.VERBOSE,
)


def _tokenize(text: str) -> list[tuple[str, str, int]]:
    tokens = []
    pos = 0
    while pos < len(text):
        m = _TOKEN_RE.match(text, pos)
        if m is None:
            raise ParseError(f"unexpected character {text[pos]!r}", pos)
        kind = m.lastgroup
        if kind != "ws":
            value = m.group()
            if kind == "lower" and value in _KEYWORDS:
                kind = value
            tokens.append((kind, value, pos))
        pos = m.end()
    tokens.append(("end", "", len(text)))
    return tokens


class _Parser:
    def __init__(self, text: str, sig: Optional[Mapping[str, int]]):
        self.tokens = _tokenize(text)
        self.pos = 0
        self.strict = sig is not None
        self.sig: dict[str, int] = dict(sig) if sig else {}

    def peek(self) -> tuple[str, str, int]:
        return self.tokens[self.pos]

    def next(self) -> tuple[str, str, int]:
        tok = self.tokens[self.pos]
        self.pos += 1
        return tok

    def parse(self) -> Formula:
        f = self.iff()
        tok = self.peek()
        if tok[0] != "end":
            raise ParseError(f"unexpected trailing input {tok[1]!r}", tok[2])
        return f

    def iff(self) -> Formula:
        f = self.implies()
        while self.peek()[0] == "arrow2":
            self.next()
            g = self.implies()
            f = iff(f, g)
        return f

    def implies(self) -> Formula:
        f = self.disj()
        if self.peek()[0] == "arrow":
            self.next()
            return Implies(f, self.implies())
        return f

    def disj(self) -> Formula:
        f = self.conj()
        while self.peek()[1] == "|":
            self.next()
            f = Or(f, self.conj())
        return f

    def conj(self) -> Formula:
        f = self.unary()
        while self.peek()[1] == "&":
            self.next()
            f = And(f, self.unary())
        return f

    def unary(self) -> Formula:
        kind, value, pos = self.peek()
        if value == "~":
            self.next()
            return Not(self.unary())
        if kind == "box":
            self.next()
            return Box(self.unary())
        if kind == "dia":
            self.next()
            return dia(self.unary())
        if kind in ("forall", "exists"):
            self.next()
            var = self.variable()
            tok = self.next()
            if tok[1] != ".":
                raise ParseError(f"expected '.', found {tok[1]!r}", tok[2])
            body = self.unary()
            return Forall(var, body) if kind == "forall" else Exists(var, body)
        return self.primary()

    def variable(self) -> str:
        kind, value, pos = self.next()
        if kind != "lower":
            raise ParseError(f"expected variable, found {value!r}", pos)
        return value

    def primary(self) -> Formula:
        kind, value, pos = self.next()
        if kind == "true":
            return TRUE
        if kind == "false":
            return FALSE
        if value == "#":
            name_kind, name, name_pos = self.next()
            if name_kind != "lower":
                raise ParseError(f"expected propositional variable name, found {name!r}", name_pos)
            return PropVar(name)
        if value == "(":
            f = self.iff()
            tok = self.next()
            if tok[1] != ")":
                raise ParseError(f"expected ')', found {tok[1]!r}", tok[2])
            return f
        if kind == "upper":
            return self.atom(value, pos)
        raise ParseError(f"expected formula, found {value!r}", pos)

    def atom(self, pred: str, pos: int) -> Formula:
        args: list[Term] = []
        if self.peek()[1] == "(":
            self.next()
            args.append(Var(self.variable()))
            while self.peek()[1] == ",":
                self.next()
                args.append(Var(self.variable()))
            tok = self.next()
            if tok[1] != ")":
                raise ParseError(f"expected ')', found {tok[1]!r}", tok[2])
        arity = len(args)
        if pred in self.sig:
            if self.sig[pred] != arity:
                raise ArityMismatchError(
                    f"predicate {pred} used with arity {arity}, expected {self.sig[pred]}", pos
                )
        elif self.strict:
            raise UnknownPredicateError(f"unknown predicate {pred}", pos)
        else:
            self.sig[pred] = arity
        return Atom(pred, tuple(args))


def parse(text: str, sig: Optional[Mapping[str, int]] = None) -> Formula:
    """Parse a formula.

    With a signature, atoms are checked against it; without one, arities
    are inferred from first use and later uses must be consistent.
    """
    return _Parser(text, sig).parse()


# ---------------------------------------------------------------------------
# Printing

_PREC_IMPLIES = 1
_PREC_OR = 2
_PREC_AND = 3
_PREC_UNARY = 4


def _fmt(f: Formula, needed: int) -> str:
    if isinstance(f, Top):
        return "true"
    if isinstance(f, Bottom):
        return "false"
    if isinstance(f, PropVar):
        return "#" + f.name
    if isinstance(f, Atom):
        if not f.args:
            return f.pred
        return f.pred + "(" + ", ".join(t.name for t in f.args) + ")"
    if isinstance(f, Not):
        return _wrap("~" + _fmt(f.body, _PREC_UNARY), _PREC_UNARY, needed)
    if isinstance(f, Box):
        return _wrap("box " + _fmt(f.body, _PREC_UNARY), _PREC_UNARY, needed)
    if isinstance(f, Forall):
        return _wrap(f"forall {f.var}. " + _fmt(f.body, _PREC_UNARY), _PREC_UNARY, needed)
    if isinstance(f, Exists):
        return _wrap(f"exists {f.var}. " + _fmt(f.body, _PREC_UNARY), _PREC_UNARY, needed)
    if isinstance(f, And):
        return _wrap(_fmt(f.left, _PREC_AND) + " & " + _fmt(f.right, _PREC_AND + 1), _PREC_AND, needed)
    if isinstance(f, Or):
        return _wrap(_fmt(f.left, _PREC_OR) + " | " + _fmt(f.right, _PREC_OR + 1), _PREC_OR, needed)
    if isinstance(f, Implies):
        return _wrap(
            _fmt(f.left, _PREC_IMPLIES + 1) + " -> " + _fmt(f.right, _PREC_IMPLIES), _PREC_IMPLIES, needed
        )
    raise TypeError(f"not a formula: {f!r}")


def _wrap(text: str, prec: int, needed: int) -> str:
    return text if prec >= needed else "(" + text + ")"


def format_formula(f: Formula) -> str:
    """Render a formula so that parsing the result reproduces it exactly."""
    return _fmt(f, 0)


for _cls in (Top, Bottom, Atom, PropVar, Not, Implies, And, Or, Forall, Exists, Box):
    _cls.__str__ = format_formula  # type: ignore[assignment]


# ---------------------------------------------------------------------------
# Variable bookkeeping

def subformulas(f: Formula) -> Iterator[Formula]:
    """Yield f and every subformula, outermost first, left to right."""
    yield f
    if isinstance(f, (Not, Box)):
        yield from subformulas(f.body)
    elif isinstance(f, (Implies, And, Or)):
        yield from subformulas(f.left)
        yield from subformulas(f.right)
    elif isinstance(f, (Forall, Exists)):
        yield from subformulas(f.body)


def free_individual_vars(f: Formula) -> frozenset[str]:
    def go(f: Formula, scope: frozenset[str]) -> frozenset[str]:
        if isinstance(f, Atom):
            return frozenset(t.name for t in f.args if isinstance(t, Var) and t.name not in scope)
        if isinstance(f, (Not, Box)):
            return go(f.body, scope)
        if isinstance(f, (Implies, And, Or)):
            return go(f.left, scope) | go(f.right, scope)
        if isinstance(f, (Forall, Exists)):
            return go(f.body, scope | {f.var})
        return frozenset()

    return go(f, frozenset())


def bound_individual_vars(f: Formula) -> frozenset[str]:
    out = set()
    for g in subformulas(f):
        if isinstance(g, (Forall, Exists)):
            out.add(g.var)
    return frozenset(out)


def free_and_bound_vars(f: Formula) -> tuple[frozenset[str], frozenset[str]]:
    """Free and bound individual variable names of f."""
    return free_individual_vars(f), bound_individual_vars(f)


def prop_vars(f: Formula) -> frozenset[str]:
    return frozenset(g.name for g in subformulas(f) if isinstance(g, PropVar))


def constants(f: Formula) -> frozenset[str]:
    out = set()
    for g in subformulas(f):
        if isinstance(g, Atom):
            out.update(t.name for t in g.args if isinstance(t, Const))
    return frozenset(out)


def predicates(f: Formula) -> dict[str, int]:
    """Predicate symbols of f with their arities; usage must be consistent."""
    out: dict[str, int] = {}
    for g in subformulas(f):
        if isinstance(g, Atom):
            if g.pred in out and out[g.pred] != len(g.args):
                raise ArityMismatchError(
                    f"predicate {g.pred} used with arities {out[g.pred]} and {len(g.args)}"
                )
            out[g.pred] = len(g.args)
    return out


def universal_closure(f: Formula) -> Formula:
    """Prefix forall binders for every free variable, in sorted name order."""
    for v in sorted(free_individual_vars(f), reverse=True):
        f = Forall(v, f)
    return f


def normalize_variables(target: FixpointTarget) -> FixpointTarget:
    """Rename bound variables that also occur free, making the two sets disjoint.

    Replacement names are u0, u1, ... taking for each offending name the
    lowest index not otherwise in use. Only binders whose name clashes
    with a free occurrence are touched.
    """
    f = target.formula
    free, bound = free_and_bound_vars(f)
    offenders = sorted(free & bound)
    if not offenders:
        return target
    used = set(free | bound)
    renames: dict[str, str] = {}
    counter = 0
    for name in offenders:
        while f"u{counter}" in used:
            counter += 1
        renames[name] = f"u{counter}"
        used.add(f"u{counter}")

    def go(f: Formula, active: Mapping[str, str]) -> Formula:
        if isinstance(f, Atom):
            args = tuple(
                Var(active[t.name]) if isinstance(t, Var) and t.name in active else t for t in f.args
            )
            return Atom(f.pred, args)
        if isinstance(f, Not):
            return Not(go(f.body, active))
        if isinstance(f, Box):
            return Box(go(f.body, active))
        if isinstance(f, Implies):
            return Implies(go(f.left, active), go(f.right, active))
        if isinstance(f, And):
            return And(go(f.left, active), go(f.right, active))
        if isinstance(f, Or):
            return Or(go(f.left, active), go(f.right, active))
        if isinstance(f, (Forall, Exists)):
            if f.var in renames:
                inner = dict(active)
                inner[f.var] = renames[f.var]
                body = go(f.body, inner)
                new_var = renames[f.var]
            else:
                inner = {k: v for k, v in active.items() if k != f.var}
                body = go(f.body, inner)
                new_var = f.var
            return Forall(new_var, body) if isinstance(f, Forall) else Exists(new_var, body)
        return f

    return FixpointTarget(go(f, {}), target.hole)


# ---------------------------------------------------------------------------
# Depth machinery

def occurrence_depths(f: Formula, hole: str) -> list[int]:
    """Box nesting depths of each occurrence of #hole, left to right."""
    out: list[int] = []

    def go(f: Formula, d: int) -> None:
        if isinstance(f, PropVar):
            if f.name == hole:
                out.append(d)
        elif isinstance(f, Not):
            go(f.body, d)
        elif isinstance(f, Box):
            go(f.body, d + 1)
        elif isinstance(f, (Implies, And, Or)):
            go(f.left, d)
            go(f.right, d)
        elif isinstance(f, (Forall, Exists)):
            go(f.body, d)

    go(f, 0)
    return out


def is_modalized(f: Formula, hole: str) -> bool:
    """True when every occurrence of #hole lies under at least one box."""
    return all(d >= 1 for d in occurrence_depths(f, hole))


def truncate(f: Formula, n: int) -> Formula:
    """Replace every box subformula at nesting depth n by true.

    Depth counts the boxes properly containing an occurrence, so the
    result has no boxes deeper than n and no hole occurrences deeper
    than n.
    """
    if n < 0:
        raise ValueError("truncation depth must be >= 0")

    # Untouched subtrees are returned as the same object, so results of
    # repeated transformations share structure with their inputs.
    def go(f: Formula, d: int) -> Formula:
        if isinstance(f, Box):
            if d == n:
                return TRUE
            b = go(f.body, d + 1)
            return f if b is f.body else Box(b)
        if isinstance(f, Not):
            b = go(f.body, d)
            return f if b is f.body else Not(b)
        if isinstance(f, (Implies, And, Or)):
            left, right = go(f.left, d), go(f.right, d)
            return f if left is f.left and right is f.right else type(f)(left, right)
        if isinstance(f, (Forall, Exists)):
            b = go(f.body, d)
            return f if b is f.body else type(f)(f.var, b)
        return f

    return go(f, 0)


def _check_capture(f: Formula, replacements: Sequence[Formula]) -> None:
    bound = bound_individual_vars(f)
    for b in replacements:
        clash = free_individual_vars(b) & bound
        if clash:
            raise CaptureError(
                f"substitution would capture {', '.join(sorted(clash))}; "
                "normalize the target variables first"
            )


def subst_at_depths(f: Formula, hole: str, subs: Sequence[Formula]) -> Formula:
    """Substitute subs[d] for the occurrences of #hole at box depth d.

    Every occurrence of the hole must have depth < len(subs), and no
    substituted formula may have a free variable that is bound in f.
    """
    _check_capture(f, subs)

    def go(f: Formula, d: int) -> Formula:
        if isinstance(f, PropVar):
            if f.name != hole:
                return f
            if d >= len(subs):
                raise DepthOverflowError(
                    f"occurrence of #{hole} at depth {d} but only {len(subs)} substituends given"
                )
            return subs[d]
        if isinstance(f, Box):
            b = go(f.body, d + 1)
            return f if b is f.body else Box(b)
        if isinstance(f, Not):
            b = go(f.body, d)
            return f if b is f.body else Not(b)
        if isinstance(f, (Implies, And, Or)):
            left, right = go(f.left, d), go(f.right, d)
            return f if left is f.left and right is f.right else type(f)(left, right)
        if isinstance(f, (Forall, Exists)):
            b = go(f.body, d)
            return f if b is f.body else type(f)(f.var, b)
        return f

    return go(f, 0)


def subst_prop_map(f: Formula, mapping: Mapping[str, Formula]) -> Formula:
    """Substitute formulas for propositional variables, simultaneously."""
    _check_capture(f, list(mapping.values()))

    def go(f: Formula) -> Formula:
        if isinstance(f, PropVar):
            return mapping.get(f.name, f)
        if isinstance(f, (Box, Not)):
            b = go(f.body)
            return f if b is f.body else type(f)(b)
        if isinstance(f, (Implies, And, Or)):
            left, right = go(f.left), go(f.right)
            return f if left is f.left and right is f.right else type(f)(left, right)
        if isinstance(f, (Forall, Exists)):
            b = go(f.body)
            return f if b is f.body else type(f)(f.var, b)
        return f

    return go(f)


def subst_prop(f: Formula, hole: str, b: Formula) -> Formula:
    """Substitute b for every occurrence of #hole, at any depth."""
    return subst_prop_map(f, {hole: b})


# ---------------------------------------------------------------------------
# The guarded fragment

def is_sigma(f: Formula) -> bool:
    """True for formulas generated from box formulas by &, | and exists."""
    if isinstance(f, Box):
        return True
    if isinstance(f, (And, Or)):
        return is_sigma(f.left) and is_sigma(f.right)
    if isinstance(f, Exists):
        return is_sigma(f.body)
    return False


@dataclass(frozen=True)
class BooleanDecomposition:
    """A formula split as a Boolean skeleton over guarded and hole free parts.

    skeleton is a propositional formula over fresh variables; sigma_vars
    name the maximal guarded subformulas containing the hole (sigmas),
    rest_vars name the maximal hole free subformulas (rest). Substituting
    them back yields the original formula.
    """

    skeleton: Formula
    sigmas: tuple[Formula, ...]
    rest: tuple[Formula, ...]
    sigma_vars: tuple[str, ...]
    rest_vars: tuple[str, ...]

    def recompose(self) -> Formula:
        mapping = dict(zip(self.sigma_vars, self.sigmas))
        mapping.update(zip(self.rest_vars, self.rest))
        return subst_prop_map(self.skeleton, mapping)


def _fresh_prop_names(prefix: str, taken: frozenset[str]) -> Iterator[str]:
    i = 0
    while True:
        name = f"{prefix}{i}"
        if name not in taken:
            yield name
        i += 1


def decompose_boolean_sigma(target: FixpointTarget) -> BooleanDecomposition:
    """Split a formula into a Boolean combination of guarded subformulas
    containing the hole and subformulas free of it.

    Scanning outside in, each guarded subformula containing the hole and
    each hole free subformula is taken maximal and replaced by a fresh
    propositional variable. Identical subformulas share a variable. A
    hole occurrence that is neither inside a guarded subformula nor
    separable by Boolean connectives makes the split fail.
    """
    f, hole = target.formula, target.hole
    taken = prop_vars(f)
    sigma_names = _fresh_prop_names("q", taken)
    rest_names = _fresh_prop_names("r", taken)
    sigmas: list[Formula] = []
    rest: list[Formula] = []
    sigma_vars: list[str] = []
    rest_vars: list[str] = []

    def slot(g: Formula, pool: list[Formula], names: list[str], gen: Iterator[str]) -> Formula:
        if g in pool:
            return PropVar(names[pool.index(g)])
        pool.append(g)
        names.append(next(gen))
        return PropVar(names[-1])

    def go(g: Formula) -> Formula:
        if hole not in prop_vars(g):
            return slot(g, rest, rest_vars, rest_names)
        if is_sigma(g):
            return slot(g, sigmas, sigma_vars, sigma_names)
        if isinstance(g, Not):
            return Not(go(g.body))
        if isinstance(g, Implies):
            return Implies(go(g.left), go(g.right))
        if isinstance(g, And):
            return And(go(g.left), go(g.right))
        if isinstance(g, Or):
            return Or(go(g.left), go(g.right))
        raise NotDecomposableError(
            f"#{hole} occurs in {format_formula(g)}, which is neither guarded "
            "nor a Boolean combination"
        )

    skeleton = go(f)
    return BooleanDecomposition(skeleton, tuple(sigmas), tuple(rest), tuple(sigma_vars), tuple(rest_vars))
