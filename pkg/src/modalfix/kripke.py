"""Finite Kripke models with expanding domains, and their model checker.

A model is a finite set of worlds, an accessibility relation, a domain
of constants per world growing along the relation, and a per world
interpretation of each predicate. Truth follows the usual clauses:
quantifiers at a world range over that world's domain, box quantifies
over accessible worlds. Validity in a model is truth of the universal
closure at every world.

Two evaluators are provided. eval_formula is the plain recursive
reference; valid_in_model routes closed constant free sentences through
a bitmask evaluator that computes truth at all worlds at once, which
the test suite checks against the reference.
"""

from __future__ import annotations

import random
from dataclasses import dataclass, field
from itertools import product
from typing import Iterable, Iterator, Mapping, Optional, Sequence

from .syntax import (
    And,
    Atom,
    Bottom,
    Box,
    Const,
    Exists,
    Forall,
    Formula,
    Implies,
    LogicError,
    Not,
    Or,
    PropVar,
    Top,
    Var,
    constants,
    free_individual_vars,
    universal_closure,
)


class EvalError(LogicError):
    code = "eval-error"


class ModelError(LogicError):
    code = "model-invalid"


class GenError(LogicError):
    code = "unsatisfiable-spec"


class BoundExplosionError(GenError):
    code = "bound-explosion"


@dataclass
class KripkeModel:
    """Immutable by convention; nothing here mutates a model after creation."""

    worlds: tuple[int, ...]
    rel: frozenset[tuple[int, int]]
    domains: dict[int, frozenset[str]]
    interp: dict[tuple[int, str], frozenset[tuple[str, ...]]]
    sig: dict[str, int] = field(default_factory=dict)

    def successors(self, w: int) -> tuple[int, ...]:
        succ = self._successor_table()
        return succ[w]

    def _successor_table(self) -> dict[int, tuple[int, ...]]:
        table = self.__dict__.get("_succ")
        if table is None:
            table = {w: () for w in self.worlds}
            for a, b in sorted(self.rel):
                table[a] = table[a] + (b,)
            self.__dict__["_succ"] = table
        return table

    def domain_sorted(self, w: int) -> tuple[str, ...]:
        table = self.__dict__.get("_dom_sorted")
        if table is None:
            table = {v: tuple(sorted(self.domains[v], key=_const_key)) for v in self.worlds}
            self.__dict__["_dom_sorted"] = table
        return table[w]

    def facts(self, w: int, pred: str) -> frozenset[tuple[str, ...]]:
        return self.interp.get((w, pred), frozenset())


def _const_key(c: str) -> tuple[int, str]:
    return (len(c), c)


def validate_model(m: KripkeModel) -> list[str]:
    """Return a list of violation descriptions; empty means well formed."""
    out: list[str] = []
    if not m.worlds:
        out.append("worlds: model has no worlds")
    if len(set(m.worlds)) != len(m.worlds):
        out.append("worlds: duplicate world ids")
    wset = set(m.worlds)
    for a, b in sorted(m.rel):
        if a not in wset or b not in wset:
            out.append(f"edge: ({a}, {b}) mentions an unknown world")
    for w in m.worlds:
        if w not in m.domains:
            out.append(f"domain: world {w} has no domain")
        elif not m.domains[w]:
            out.append(f"domain: world {w} has an empty domain")
    for w in sorted(set(m.domains) - wset):
        out.append(f"domain: entry for unknown world {w}")
    for a, b in sorted(m.rel):
        if a in m.domains and b in m.domains:
            missing = m.domains[a] - m.domains[b]
            if missing:
                names = ", ".join(sorted(missing, key=_const_key))
                out.append(f"monotonicity: edge ({a}, {b}) loses constants {names}")
    for (w, pred), tuples in sorted(m.interp.items()):
        if w not in wset:
            out.append(f"fact: unknown world {w} for predicate {pred}")
            continue
        if pred not in m.sig:
            out.append(f"fact: undeclared predicate {pred} at world {w}")
            continue
        for tup in sorted(tuples):
            if len(tup) != m.sig[pred]:
                out.append(f"fact: {pred}{tup} at world {w} has arity {len(tup)}, expected {m.sig[pred]}")
            elif w in m.domains and not set(tup) <= m.domains[w]:
                out.append(f"fact: {pred}{tup} at world {w} uses constants outside the domain")
    return out


# ---------------------------------------------------------------------------
# Reference evaluator

def eval_formula(m: KripkeModel, w: int, f: Formula, env: Optional[Mapping[str, str]] = None) -> bool:
    """Truth of f at world w, with env giving values to free variables.

    Formulas must be free of propositional variables. Unbound variables
    and constants outside the world's domain raise EvalError.
    """
    if w not in m.domains:
        raise EvalError(f"unknown world {w}")
    env = dict(env) if env else {}
    for v in sorted(env.values(), key=_const_key):
        if v not in m.domains[w]:
            raise EvalError(f"environment value {v} is outside the domain of world {w}")
    return _eval(m, w, f, env)


def _eval(m: KripkeModel, w: int, f: Formula, env: dict[str, str]) -> bool:
    if isinstance(f, Top):
        return True
    if isinstance(f, Bottom):
        return False
    if isinstance(f, Atom):
        args = []
        dom = m.domains[w]
        for t in f.args:
            if isinstance(t, Var):
                if t.name not in env:
                    raise EvalError(f"unbound variable {t.name}")
                c = env[t.name]
            else:
                c = t.name
            if c not in dom:
                raise EvalError(f"constant {c} is outside the domain of world {w}")
            args.append(c)
        return tuple(args) in m.facts(w, f.pred)
    if isinstance(f, PropVar):
        raise EvalError(f"propositional variable #{f.name} has no truth value in a model")
    if isinstance(f, Not):
        return not _eval(m, w, f.body, env)
    if isinstance(f, Implies):
        return not _eval(m, w, f.left, env) or _eval(m, w, f.right, env)
    if isinstance(f, And):
        return _eval(m, w, f.left, env) and _eval(m, w, f.right, env)
    if isinstance(f, Or):
        return _eval(m, w, f.left, env) or _eval(m, w, f.right, env)
    if isinstance(f, Forall):
        return all(_eval(m, w, f.body, {**env, f.var: c}) for c in m.domain_sorted(w))
    if isinstance(f, Exists):
        return any(_eval(m, w, f.body, {**env, f.var: c}) for c in m.domain_sorted(w))
    if isinstance(f, Box):
        return all(_eval(m, v, f.body, env) for v in m.successors(w))
    raise TypeError(f"not a formula: {f!r}")


# ---------------------------------------------------------------------------
# Bitmask evaluator: truth of a formula at every world at once

class _Tables:
    def __init__(self, m: KripkeModel):
        self.n = len(m.worlds)
        self.index = {w: i for i, w in enumerate(m.worlds)}
        self.all_mask = (1 << self.n) - 1
        self.succ_masks = []
        for w in m.worlds:
            mask = 0
            for v in m.successors(w):
                mask |= 1 << self.index[v]
            self.succ_masks.append(mask)
        pool: set[str] = set()
        for w in m.worlds:
            pool |= m.domains[w]
        self.pool = sorted(pool, key=_const_key)
        self.const_masks = {}
        for c in self.pool:
            mask = 0
            for i, w in enumerate(m.worlds):
                if c in m.domains[w]:
                    mask |= 1 << i
            self.const_masks[c] = mask

    def fact_mask(self, m: KripkeModel, pred: str, args: tuple[str, ...]) -> int:
        mask = 0
        for i, w in enumerate(m.worlds):
            if args in m.facts(w, pred):
                mask |= 1 << i
        return mask


def _tables(m: KripkeModel) -> _Tables:
    t = m.__dict__.get("_mask_tables")
    if t is None:
        t = _Tables(m)
        m.__dict__["_mask_tables"] = t
    return t


class _MaskEvaluator:
    def __init__(self, m: KripkeModel):
        self.m = m
        self.t = _tables(m)
        self.memo: dict[tuple[int, tuple[tuple[str, str], ...]], int] = {}
        self.fv: dict[int, frozenset[str]] = {}

    def freevars(self, f: Formula) -> frozenset[str]:
        # Bottom-up, so a formula tree is walked once per evaluator
        # rather than once per node.
        key = id(f)
        got = self.fv.get(key)
        if got is not None:
            return got
        if isinstance(f, Atom):
            out = frozenset(t.name for t in f.args if isinstance(t, Var))
        elif isinstance(f, (Top, Bottom, PropVar)):
            out = frozenset()
        elif isinstance(f, (Not, Box)):
            out = self.freevars(f.body)
        elif isinstance(f, (Implies, And, Or)):
            out = self.freevars(f.left) | self.freevars(f.right)
        elif isinstance(f, (Forall, Exists)):
            out = self.freevars(f.body) - {f.var}
        else:
            out = free_individual_vars(f)
        self.fv[key] = out
        return out

    def mask(self, f: Formula, env: dict[str, str]) -> int:
        fv = self.freevars(f)
        key = (id(f), tuple((v, env[v]) for v in sorted(fv)))
        got = self.memo.get(key)
        if got is None:
            got = self._mask(f, env)
            self.memo[key] = got
        return got

    def _mask(self, f: Formula, env: dict[str, str]) -> int:
        t = self.t
        if isinstance(f, Top):
            return t.all_mask
        if isinstance(f, Bottom):
            return 0
        if isinstance(f, Atom):
            args = []
            guard = t.all_mask
            for term in f.args:
                if isinstance(term, Var):
                    if term.name not in env:
                        raise EvalError(f"unbound variable {term.name}")
                    c = env[term.name]
                else:
                    c = term.name
                args.append(c)
                guard &= t.const_masks.get(c, 0)
            return t.fact_mask(self.m, f.pred, tuple(args)) & guard
        if isinstance(f, PropVar):
            raise EvalError(f"propositional variable #{f.name} has no truth value in a model")
        if isinstance(f, Not):
            return ~self.mask(f.body, env) & t.all_mask
        if isinstance(f, Implies):
            return (~self.mask(f.left, env) | self.mask(f.right, env)) & t.all_mask
        if isinstance(f, And):
            return self.mask(f.left, env) & self.mask(f.right, env)
        if isinstance(f, Or):
            return self.mask(f.left, env) | self.mask(f.right, env)
        if isinstance(f, Forall):
            acc = t.all_mask
            for c in t.pool:
                inner = self.mask(f.body, {**env, f.var: c})
                acc &= inner | ~t.const_masks[c]
                if not acc:
                    break
            return acc & t.all_mask
        if isinstance(f, Exists):
            acc = 0
            for c in t.pool:
                acc |= self.mask(f.body, {**env, f.var: c}) & t.const_masks[c]
                if acc == t.all_mask:
                    break
            return acc
        if isinstance(f, Box):
            inner = self.mask(f.body, env)
            missing = ~inner
            acc = 0
            for i in range(t.n):
                if not (t.succ_masks[i] & missing):
                    acc |= 1 << i
            return acc
        raise TypeError(f"not a formula: {f!r}")


def truth_mask(m: KripkeModel, f: Formula) -> int:
    """Bitmask of worlds (by position in m.worlds) where the sentence f holds."""
    return _MaskEvaluator(m).mask(f, {})


def batch_truth_masks(m: KripkeModel, formulas: Sequence[Formula]) -> list[int]:
    """Truth masks of several sentences over one shared evaluation cache.

    Equivalent to [truth_mask(m, f) for f in formulas], but subformula
    objects shared between the inputs are evaluated once, which is what
    verification sweeps over families of related formulas want.
    """
    ev = _MaskEvaluator(m)
    return [ev.mask(f, {}) for f in formulas]


def valid_in_model(m: KripkeModel, f: Formula) -> bool:
    """Truth of the universal closure of f at every world of m."""
    closed = universal_closure(f)
    if constants(closed):
        # No short-circuit: a constant missing from some world's domain is
        # an error even when an earlier world already falsified the sentence.
        return all([eval_formula(m, w, closed) for w in m.worlds])
    return truth_mask(m, closed) == _tables(m).all_mask


def first_failing_world(m: KripkeModel, f: Formula) -> Optional[int]:
    """Least world where the universal closure of f fails, or None."""
    closed = universal_closure(f)
    for w in sorted(m.worlds):
        if not eval_formula(m, w, closed):
            return w
    return None


# ---------------------------------------------------------------------------
# Frame analysis

def _heights(worlds: Sequence[int], succ: Mapping[int, tuple[int, ...]]) -> Optional[dict[int, int]]:
    color: dict[int, int] = {}
    heights: dict[int, int] = {}

    def visit(w: int) -> bool:
        color[w] = 1
        h = 0
        for v in succ[w]:
            if color.get(v) == 1:
                return False
            if v not in heights and not visit(v):
                return False
            h = max(h, heights[v] + 1)
        color[w] = 2
        heights[w] = h
        return True

    for w in worlds:
        if w not in heights and not visit(w):
            return None
    return heights


@dataclass(frozen=True)
class FrameReport:
    transitive: bool
    irreflexive: bool
    conversely_well_founded: bool
    heights: Optional[dict[int, int]]
    frame_height: Optional[int]
    classes: tuple[str, ...]


def frame_report(m: KripkeModel) -> FrameReport:
    """Frame properties of the model: order conditions, heights, classes.

    classes is drawn from FI (finite, transitive, irreflexive), FIFD (FI
    with finite domains), and FH (transitive with every world of finite
    height). A cyclic frame has no heights and lies in none of them.
    """
    succ = {w: m.successors(w) for w in m.worlds}
    transitive = all((a, c) in m.rel for a, b in m.rel for c in succ.get(b, ()))
    irreflexive = all((w, w) not in m.rel for w in m.worlds)
    heights = _heights(m.worlds, succ)
    cwf = heights is not None
    frame_height = max(heights.values()) if heights else None
    classes = []
    if transitive and irreflexive:
        classes.append("FI")
        classes.append("FIFD")  # domains of finite models are always finite
    if transitive and cwf:
        classes.append("FH")
    return FrameReport(transitive, irreflexive, cwf, heights, frame_height, tuple(classes))


def generated_submodel(m: KripkeModel, w: int) -> KripkeModel:
    """Restriction of m to w and the worlds reachable from it."""
    reachable = {w}
    frontier = [w]
    succ = {v: m.successors(v) for v in m.worlds}
    while frontier:
        v = frontier.pop()
        for u in succ[v]:
            if u not in reachable:
                reachable.add(u)
                frontier.append(u)
    worlds = tuple(v for v in m.worlds if v in reachable)
    return KripkeModel(
        worlds=worlds,
        rel=frozenset((a, b) for a, b in m.rel if a in reachable and b in reachable),
        domains={v: m.domains[v] for v in worlds},
        interp={(v, p): ts for (v, p), ts in m.interp.items() if v in reachable},
        sig=dict(m.sig),
    )


# ---------------------------------------------------------------------------
# Model generation

_REQUIREMENTS = frozenset({"transitive", "irreflexive"})


@dataclass(frozen=True)
class ModelGenSpec:
    """Parameters for seeded random model generation.

    world_count, domain_base_size and domain_growth are inclusive
    (low, high) ranges. height_bound caps the length of accessibility
    chains, so generated frames are acyclic by construction.
    """

    world_count: tuple[int, int]
    height_bound: int
    signature: Mapping[str, int]
    domain_base_size: tuple[int, int] = (1, 2)
    domain_growth: tuple[int, int] = (0, 1)
    truth_density: float = 0.5
    require: frozenset[str] = frozenset()
    seed: int = 0


def _check_range(name: str, r: tuple[int, int], low: int) -> None:
    if r[0] > r[1] or r[0] < low:
        raise GenError(f"{name} range {r} is empty or below {low}")


def random_model(spec: ModelGenSpec) -> KripkeModel:
    """Deterministic model for a given spec; the seed fixes everything."""
    _check_range("world_count", spec.world_count, 1)
    _check_range("domain_base_size", spec.domain_base_size, 1)
    _check_range("domain_growth", spec.domain_growth, 0)
    if spec.height_bound < 0:
        raise GenError("height_bound must be >= 0")
    if not 0.0 <= spec.truth_density <= 1.0:
        raise GenError("truth_density must lie in [0, 1]")
    if not set(spec.require) <= _REQUIREMENTS:
        raise GenError(f"unknown requirement in {sorted(spec.require)}")

    rng = random.Random(spec.seed)
    n = rng.randint(*spec.world_count)
    worlds = tuple(range(n))
    levels = [rng.randint(0, spec.height_bound) for _ in worlds]
    rel = set()
    for a in worlds:
        for b in worlds:
            if levels[a] > levels[b] and rng.random() < 0.5:
                rel.add((a, b))
    if "transitive" in spec.require:
        changed = True
        while changed:
            changed = False
            for a, b in list(rel):
                for c, d in list(rel):
                    if b == c and (a, d) not in rel:
                        rel.add((a, d))
                        changed = True

    sizes: dict[int, int] = {}
    order = sorted(worlds, key=lambda w: (-levels[w], w))
    for w in order:
        base = rng.randint(*spec.domain_base_size)
        inbound = [sizes[v] for v in worlds if (v, w) in rel and v in sizes]
        growth = rng.randint(*spec.domain_growth) if inbound else 0
        sizes[w] = max([base] + inbound) + growth
    domains = {w: frozenset(f"c{i}" for i in range(sizes[w])) for w in worlds}

    interp: dict[tuple[int, str], frozenset[tuple[str, ...]]] = {}
    for w in worlds:
        dom = sorted(domains[w], key=_const_key)
        for pred in sorted(spec.signature):
            arity = spec.signature[pred]
            tuples = [t for t in product(dom, repeat=arity) if rng.random() < spec.truth_density]
            if tuples:
                interp[(w, pred)] = frozenset(tuples)
    return KripkeModel(worlds, frozenset(rel), domains, interp, dict(spec.signature))


def _nonempty_subsets(pool: Sequence[str]) -> list[frozenset[str]]:
    out = []
    for bits in range(1, 1 << len(pool)):
        out.append(frozenset(pool[i] for i in range(len(pool)) if bits >> i & 1))
    out.sort(key=lambda s: (len(s), sorted(s)))
    return out


def enumerate_models(
    max_worlds: int,
    max_domain: int,
    sig: Mapping[str, int],
    require: Iterable[str] = (),
    max_height: Optional[int] = None,
) -> Iterator[KripkeModel]:
    """Yield every model with 1..max_worlds worlds and domains drawn from a
    fixed pool of max_domain constants, once each, in a deterministic order.

    require may contain "transitive" and "irreflexive"; max_height
    additionally keeps only acyclic frames of at most that height. The
    estimated number of candidates must stay at or below 10**7.
    """
    require = frozenset(require)
    if not require <= _REQUIREMENTS:
        raise GenError(f"unknown requirement in {sorted(require)}")
    if max_worlds < 1 or max_domain < 1:
        raise GenError("bounds must be at least 1")

    budget = 10**7
    if any(2 ** (k * k) > budget for k in range(1, max_worlds + 1)):
        raise BoundExplosionError("relation candidates alone exceed 10^7")
    estimate = 0
    for k in range(1, max_worlds + 1):
        rels = _candidate_rels(k, require, max_height)
        per_world_interp = 2 ** sum(max_domain ** a for a in sig.values())
        estimate += len(rels) * (2**max_domain - 1) ** k * per_world_interp**k
        if estimate > budget:
            raise BoundExplosionError(f"estimated model count exceeds 10^7 at {k} worlds")

    pool = [f"c{i}" for i in range(max_domain)]
    subsets = _nonempty_subsets(pool)
    for k in range(1, max_worlds + 1):
        worlds = tuple(range(k))
        for rel in _candidate_rels(k, require, max_height):
            edges = sorted(rel)
            for combo in product(subsets, repeat=k):
                if any(not combo[a] <= combo[b] for a, b in edges):
                    continue
                domains = {w: combo[w] for w in worlds}
                slots: list[tuple[int, str, list[tuple[str, ...]]]] = []
                for w in worlds:
                    dom = sorted(domains[w], key=_const_key)
                    for pred in sorted(sig):
                        slots.append((w, pred, list(product(dom, repeat=sig[pred]))))
                choice_lists = []
                for w, pred, tuples in slots:
                    options = []
                    for bits in range(1 << len(tuples)):
                        options.append(
                            frozenset(tuples[i] for i in range(len(tuples)) if bits >> i & 1)
                        )
                    choice_lists.append(options)
                for choices in product(*choice_lists):
                    interp = {
                        (w, pred): chosen
                        for (w, pred, _), chosen in zip(slots, choices)
                        if chosen
                    }
                    yield KripkeModel(worlds, rel, dict(domains), interp, dict(sig))


def _candidate_rels(
    k: int, require: frozenset[str], max_height: Optional[int]
) -> list[frozenset[tuple[int, int]]]:
    pairs = [(a, b) for a in range(k) for b in range(k)]
    out = []
    for bits in range(1 << len(pairs)):
        rel = frozenset(pairs[i] for i in range(len(pairs)) if bits >> i & 1)
        if "irreflexive" in require and any(a == b for a, b in rel):
            continue
        if "transitive" in require:
            succ: dict[int, list[int]] = {w: [] for w in range(k)}
            for a, b in rel:
                succ[a].append(b)
            if any((a, c) not in rel for a, b in rel for c in succ[b]):
                continue
        if max_height is not None:
            succ2 = {w: tuple(b for a, b in rel if a == w) for w in range(k)}
            heights = _heights(range(k), succ2)
            if heights is None or max(heights.values()) > max_height:
                continue
        out.append(rel)
    return out


# ---------------------------------------------------------------------------
# Model file format

def format_model(m: KripkeModel) -> str:
    """Serialize a model to the line format understood by parse_model."""
    if tuple(m.worlds) != tuple(range(len(m.worlds))):
        raise ModelError("only models with worlds numbered 0..n-1 can be serialized")
    lines = [f"worlds: {len(m.worlds)}"]
    for a, b in sorted(m.rel):
        lines.append(f"edge: {a} {b}")
    for w in m.worlds:
        doms = " ".join(sorted(m.domains[w], key=_const_key))
        lines.append(f"domain: {w} {doms}")
    for (w, pred) in sorted(m.interp, key=lambda k: (k[0], k[1])):
        for tup in sorted(m.interp[(w, pred)]):
            lines.append(f"fact: {w} {pred} {' '.join(tup)}")
    return "\n".join(lines) + "\n"


def parse_model(text: str) -> KripkeModel:
    """Parse the model file format; the result must validate cleanly.

    Lines: "worlds: n", "edge: w v", "domain: w c1 c2 ...",
    "fact: w P c1 ... ck". Blank lines and lines starting with # are
    ignored. Tuples not listed as facts are false.
    """
    n_worlds = None
    rel = set()
    domains: dict[int, frozenset[str]] = {}
    interp: dict[tuple[int, str], set[tuple[str, ...]]] = {}
    sig: dict[str, int] = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        key, _, rest = line.partition(":")
        fields = rest.split()
        try:
            if key == "worlds":
                (n,) = fields
                n_worlds = int(n)
            elif key == "edge":
                a, b = fields
                rel.add((int(a), int(b)))
            elif key == "domain":
                w = int(fields[0])
                if w in domains:
                    raise ModelError(f"line {lineno}: duplicate domain for world {w}")
                domains[w] = frozenset(fields[1:])
            elif key == "fact":
                w = int(fields[0])
                pred = fields[1]
                tup = tuple(fields[2:])
                if pred in sig and sig[pred] != len(tup):
                    raise ModelError(
                        f"line {lineno}: predicate {pred} used with arities {sig[pred]} and {len(tup)}"
                    )
                sig.setdefault(pred, len(tup))
                interp.setdefault((w, pred), set()).add(tup)
            else:
                raise ModelError(f"line {lineno}: unknown directive {key!r}")
        except (ValueError, IndexError):
            raise ModelError(f"line {lineno}: malformed {key!r} line: {raw!r}") from None
    if n_worlds is None:
        raise ModelError("missing worlds: header")
    m = KripkeModel(
        worlds=tuple(range(n_worlds)),
        rel=frozenset(rel),
        domains=domains,
        interp={k: frozenset(v) for k, v in interp.items()},
        sig=sig,
    )
    violations = validate_model(m)
    if violations:
        raise ModelError("; ".join(violations))
    return m
