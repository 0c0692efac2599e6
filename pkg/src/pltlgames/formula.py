"""Parametric LTL formulas in negation normal form.

Formulas are immutable trees.  Negation is only ever stored on atoms; the
parser pushes ``!`` down using the U/R and F<=/G<= dualities, and the
derived operators ``F``, ``G`` and ``->`` are desugared on the way in.
"""
from __future__ import annotations

import re
from dataclasses import dataclass, field
from enum import Enum
from functools import reduce
from typing import Iterable, Iterator, Mapping, Sequence

__all__ = [
    "Formula", "TT", "FF", "Atom", "NegAtom", "And", "Or", "Next", "Until",
    "Release", "BoundedF", "BoundedG", "FormulaClass", "FormulaError",
    "LassoWord", "parse_formula", "negate_nnf", "expand_valuation",
    "eval_lasso", "strip_always", "project_variable", "unify_variables",
    "alternating_color_rewrite", "closure_and_consistent_sets",
    "subformulae", "atoms", "variables", "f_variables", "g_variables",
    "classify", "size", "eventually", "always", "implies", "conj", "disj",
    "is_parametric", "is_choice_point", "expand_choice_points", "has_choice_points",
]


class FormulaError(ValueError):
    """Raised for syntax errors and ill-formed formulas."""


class Formula:
    """Base class of all formula nodes."""

    __slots__ = ()

    def children(self) -> tuple["Formula", ...]:
        return ()

    def __and__(self, other: "Formula") -> "Formula":
        return And(self, other)

    def __or__(self, other: "Formula") -> "Formula":
        return Or(self, other)

    def __invert__(self) -> "Formula":
        return negate_nnf(self)


def _node(cls):
    # Hash is cached: formulas are used as dict keys all over the automata code.
    cls = dataclass(frozen=True, repr=False)(cls)
    plain_init = cls.__init__

    def __init__(self, *args, **kwargs):
        plain_init(self, *args, **kwargs)
        object.__setattr__(self, "_h", hash((cls.__name__,) + tuple(
            getattr(self, f) for f in cls.__dataclass_fields__ if f != "_h")))

    cls.__init__ = __init__
    cls.__hash__ = lambda self: self._h
    cls.__repr__ = lambda self: f"Formula({to_string(self)!r})"
    cls.__str__ = lambda self: to_string(self)
    return cls


@_node
class _Const(Formula):
    value: bool
    _h: int = field(default=0, compare=False, init=False)


TT = _Const(True)
FF = _Const(False)


@_node
class Atom(Formula):
    name: str
    _h: int = field(default=0, compare=False, init=False)


@_node
class NegAtom(Formula):
    name: str
    _h: int = field(default=0, compare=False, init=False)


@_node
class And(Formula):
    left: Formula
    right: Formula
    _h: int = field(default=0, compare=False, init=False)

    def children(self):
        return (self.left, self.right)


@_node
class Or(Formula):
    left: Formula
    right: Formula
    _h: int = field(default=0, compare=False, init=False)

    def children(self):
        return (self.left, self.right)


@_node
class Next(Formula):
    arg: Formula
    _h: int = field(default=0, compare=False, init=False)

    def children(self):
        return (self.arg,)


@_node
class Until(Formula):
    left: Formula
    right: Formula
    _h: int = field(default=0, compare=False, init=False)

    def children(self):
        return (self.left, self.right)


@_node
class Release(Formula):
    left: Formula
    right: Formula
    _h: int = field(default=0, compare=False, init=False)

    def children(self):
        return (self.left, self.right)


@_node
class BoundedF(Formula):
    """``F<=var arg``: ``arg`` holds within ``alpha(var)`` steps."""
    var: str
    arg: Formula
    _h: int = field(default=0, compare=False, init=False)

    def children(self):
        return (self.arg,)


@_node
class BoundedG(Formula):
    """``G<=var arg``: ``arg`` holds for the next ``alpha(var)`` steps."""
    var: str
    arg: Formula
    _h: int = field(default=0, compare=False, init=False)

    def children(self):
        return (self.arg,)


# -- derived operators -------------------------------------------------------

def eventually(phi: Formula) -> Formula:
    return Until(TT, phi)


def always(phi: Formula) -> Formula:
    return Release(FF, phi)


def implies(a: Formula, b: Formula) -> Formula:
    return Or(negate_nnf(a), b)


def conj(parts: Iterable[Formula]) -> Formula:
    parts = list(parts)
    return reduce(And, parts) if parts else TT


def disj(parts: Iterable[Formula]) -> Formula:
    parts = list(parts)
    return reduce(Or, parts) if parts else FF


# -- printing ----------------------------------------------------------------

_PREC = {Or: 1, And: 2, Until: 3, Release: 3}


def to_string(phi: Formula) -> str:
    """Concrete syntax accepted back by :func:`parse_formula`."""
    if isinstance(phi, _Const):
        return "tt" if phi.value else "ff"
    if isinstance(phi, Atom):
        return phi.name
    if isinstance(phi, NegAtom):
        return "!" + phi.name
    if isinstance(phi, Next):
        return "X " + _wrap(phi.arg, 4)
    if isinstance(phi, BoundedF):
        return f"F<={phi.var} " + _wrap(phi.arg, 4)
    if isinstance(phi, BoundedG):
        return f"G<={phi.var} " + _wrap(phi.arg, 4)
    op = {And: "&", Or: "|", Until: "U", Release: "R"}[type(phi)]
    prec = _PREC[type(phi)]
    # & and | are left-associative, U and R right-associative.
    if type(phi) in (And, Or):
        left, right = _wrap(phi.left, prec), _wrap(phi.right, prec + 1)
    else:
        left, right = _wrap(phi.left, prec + 1), _wrap(phi.right, prec)
    return f"{left} {op} {right}"


def _wrap(phi: Formula, min_prec: int) -> str:
    prec = _PREC.get(type(phi), 5)
    text = to_string(phi)
    return f"({text})" if prec < min_prec else text


# -- parsing -----------------------------------------------------------------

_TOKEN = re.compile(r"\s*(?:(->)|([FG])\s*<=|([!&|()])|([A-Za-z_][A-Za-z0-9_]*))")
_KEYWORDS = {"X", "F", "G", "U", "R", "tt", "ff"}


def _tokenize(text: str) -> list[tuple[str, str, int]]:
    tokens, pos = [], 0
    while pos < len(text):
        if text[pos:].strip() == "":
            break
        m = _TOKEN.match(text, pos)
        if not m:
            raise FormulaError(f"unexpected character {text[pos:].lstrip()[0]!r} "
                               f"at position {pos + len(text[pos:]) - len(text[pos:].lstrip())}")
        start = m.start(0) + len(m.group(0)) - len(m.group(0).lstrip())
        if m.group(1):
            tokens.append(("op", "->", start))
        elif m.group(2):
            tokens.append(("bound", m.group(2) + "<=", start))
        elif m.group(3):
            tokens.append(("op", m.group(3), start))
        else:
            word = m.group(4)
            tokens.append(("kw" if word in _KEYWORDS else "ident", word, start))
        pos = m.end()
    tokens.append(("eof", "", len(text)))
    return tokens


class _Parser:
    # Binary levels from loosest to tightest; True marks right-associativity.
    LEVELS = [(("->",), True), (("|",), False), (("&",), False), (("U", "R"), True)]

    def __init__(self, text: str):
        self.tokens = _tokenize(text)
        self.i = 0

    def peek(self):
        return self.tokens[self.i]

    def take(self):
        tok = self.tokens[self.i]
        self.i += 1
        return tok

    def expect(self, value: str):
        kind, val, pos = self.take()
        if val != value or kind == "eof":
            raise FormulaError(f"expected {value!r} at position {pos}, got {val or 'end of input'!r}")

    def parse(self) -> Formula:
        phi = self.binary(0)
        kind, val, pos = self.peek()
        if kind != "eof":
            raise FormulaError(f"unexpected {val!r} at position {pos}")
        return phi

    def binary(self, level: int) -> Formula:
        if level == len(self.LEVELS):
            return self.unary()
        ops, right_assoc = self.LEVELS[level]
        left = self.binary(level + 1)
        if right_assoc:
            kind, val, _ = self.peek()
            if kind in ("op", "kw") and val in ops:
                self.take()
                return self._combine(val, left, self.binary(level))
            return left
        while True:
            kind, val, _ = self.peek()
            if kind in ("op", "kw") and val in ops:
                self.take()
                left = self._combine(val, left, self.binary(level + 1))
            else:
                return left

    @staticmethod
    def _combine(op: str, a: Formula, b: Formula) -> Formula:
        if op == "->":
            return implies(a, b)
        return {"|": Or, "&": And, "U": Until, "R": Release}[op](a, b)

    def unary(self) -> Formula:
        kind, val, pos = self.peek()
        if kind == "op" and val == "!":
            self.take()
            return negate_nnf(self.unary())
        if kind == "kw" and val in ("X", "F", "G"):
            self.take()
            arg = self.unary()
            return {"X": Next, "F": eventually, "G": always}[val](arg)
        if kind == "bound":
            self.take()
            vkind, var, vpos = self.take()
            if vkind != "ident":
                raise FormulaError(f"expected a parameter name after {val!r} at position {vpos}")
            arg = self.unary()
            return BoundedF(var, arg) if val == "F<=" else BoundedG(var, arg)
        return self.atom()

    def atom(self) -> Formula:
        kind, val, pos = self.take()
        if kind == "ident":
            return Atom(val)
        if kind == "kw" and val in ("tt", "ff"):
            return TT if val == "tt" else FF
        if kind == "op" and val == "(":
            phi = self.binary(0)
            self.expect(")")
            return phi
        raise FormulaError(f"unexpected {val or 'end of input'!r} at position {pos}")


def parse_formula(text: str) -> Formula:
    """Parse concrete syntax into an NNF formula.

    >>> parse_formula("!(F<=x p)")
    Formula('G<=x !p')
    """
    phi = _Parser(text).parse()
    check_sorts(phi)
    return phi


def check_sorts(phi: Formula) -> None:
    clash = f_variables(phi) & g_variables(phi)
    if clash:
        raise FormulaError(
            f"parameter(s) {', '.join(sorted(clash))} used under both F<= and G<=")


# -- structural queries ------------------------------------------------------

def subformulae(phi: Formula) -> set[Formula]:
    seen: set[Formula] = set()
    stack = [phi]
    while stack:
        f = stack.pop()
        if f not in seen:
            seen.add(f)
            stack.extend(f.children())
    return seen


def size(phi: Formula) -> int:
    """Number of distinct subformulae."""
    return len(subformulae(phi))


def atoms(phi: Formula) -> frozenset[str]:
    return frozenset(f.name for f in subformulae(phi) if isinstance(f, (Atom, NegAtom)))


def f_variables(phi: Formula) -> frozenset[str]:
    return frozenset(f.var for f in subformulae(phi) if isinstance(f, BoundedF))


def g_variables(phi: Formula) -> frozenset[str]:
    return frozenset(f.var for f in subformulae(phi) if isinstance(f, BoundedG))


def variables(phi: Formula) -> frozenset[str]:
    return f_variables(phi) | g_variables(phi)


class FormulaClass(Enum):
    LTL = "LTL"
    PROMPT = "PROMPT"
    PLTL_F = "PLTL_F"
    PLTL_G = "PLTL_G"
    PLTL = "PLTL"


def classify(phi: Formula) -> FormulaClass:
    """Most specific fragment the formula belongs to."""
    fv, gv = f_variables(phi), g_variables(phi)
    if not fv and not gv:
        return FormulaClass.LTL
    if not gv:
        return FormulaClass.PROMPT if len(fv) == 1 else FormulaClass.PLTL_F
    if not fv:
        return FormulaClass.PLTL_G
    return FormulaClass.PLTL


def is_pltl_f(phi: Formula) -> bool:
    return not g_variables(phi)


def is_pltl_g(phi: Formula) -> bool:
    return not f_variables(phi)


# -- rewrites ----------------------------------------------------------------

def _map(phi: Formula, fn) -> Formula:
    """Rebuild ``phi`` bottom-up, applying ``fn`` to each rebuilt node."""
    cache: dict[Formula, Formula] = {}

    def go(f: Formula) -> Formula:
        if f in cache:
            return cache[f]
        if isinstance(f, (And, Or, Until, Release)):
            g = type(f)(go(f.left), go(f.right))
        elif isinstance(f, Next):
            g = Next(go(f.arg))
        elif isinstance(f, (BoundedF, BoundedG)):
            g = type(f)(f.var, go(f.arg))
        else:
            g = f
        cache[f] = out = fn(g)
        return out

    return go(phi)


def negate_nnf(phi: Formula) -> Formula:
    """NNF of the negation of ``phi``."""
    def flip(f: Formula) -> Formula:
        if isinstance(f, _Const):
            return FF if f.value else TT
        if isinstance(f, Atom):
            return NegAtom(f.name)
        if isinstance(f, NegAtom):
            return Atom(f.name)
        if isinstance(f, And):
            return Or(f.left, f.right)
        if isinstance(f, Or):
            return And(f.left, f.right)
        if isinstance(f, Until):
            return Release(f.left, f.right)
        if isinstance(f, Release):
            return Until(f.left, f.right)
        if isinstance(f, BoundedF):
            return BoundedG(f.var, f.arg)
        if isinstance(f, BoundedG):
            return BoundedF(f.var, f.arg)
        return f  # Next: children already negated
    return _map(phi, flip)


def expand_valuation(phi: Formula, alpha: Mapping[str, int]) -> Formula:
    """LTL formula equivalent to ``phi`` under the fixed valuation ``alpha``."""
    missing = variables(phi) - set(alpha)
    if missing:
        raise FormulaError(f"valuation does not bind {', '.join(sorted(missing))}")

    def unroll(f: Formula) -> Formula:
        if isinstance(f, (BoundedF, BoundedG)):
            steps, g = [f.arg], f.arg
            for _ in range(alpha[f.var]):
                g = Next(g)
                steps.append(g)
            return disj(steps) if isinstance(f, BoundedF) else conj(steps)
        return f
    return _map(phi, unroll)


def strip_always(phi: Formula) -> Formula:
    """Replace every ``G<=y psi`` by ``psi``."""
    return _map(phi, lambda f: f.arg if isinstance(f, BoundedG) else f)


def project_variable(phi: Formula, y: str) -> Formula:
    """Keep only the G<= operators on ``y``; the others become their argument."""
    if y not in variables(phi):
        raise FormulaError(f"{y!r} does not occur in {phi}")
    return _map(phi, lambda f: f.arg if isinstance(f, BoundedG) and f.var != y else f)


def unify_variables(phi: Formula, target: str) -> Formula:
    """Rename every parameter of a unipolar formula to ``target``."""
    if f_variables(phi) and g_variables(phi):
        raise FormulaError("unify_variables needs a unipolar formula")

    def rename(f: Formula) -> Formula:
        if isinstance(f, (BoundedF, BoundedG)):
            return type(f)(target, f.arg)
        return f
    return _map(phi, rename)


def alternating_color_rewrite(phi: Formula, keep: Iterable[str], color: str) -> Formula:
    """Replace unkept F<= operators by "within one color change" and add the
    requirement that the color changes infinitely often."""
    keep = frozenset(keep)
    if g_variables(phi):
        raise FormulaError("alternating-color rewrite needs a PLTL_F formula")
    if color in atoms(phi):
        raise FormulaError(f"color proposition {color!r} already occurs in the formula")
    if not keep <= variables(phi):
        raise FormulaError("kept variables must occur in the formula")
    c, nc = Atom(color), NegAtom(color)

    def replace(f: Formula) -> Formula:
        if isinstance(f, BoundedF) and f.var not in keep:
            return And(implies(c, Until(c, Until(nc, f.arg))),
                       implies(nc, Until(nc, Until(c, f.arg))))
        return f
    alt = And(always(eventually(c)), always(eventually(nc)))
    return And(_map(phi, replace), alt)


# -- closure and consistent sets ---------------------------------------------

def _node_count(phi: Formula) -> int:
    return 1 + sum(_node_count(c) for c in phi.children())


def closure(phi: Formula) -> list[Formula]:
    """Subformulae plus both literals of every atom, children before parents."""
    cl = subformulae(phi)
    for p in atoms(phi):
        cl |= {Atom(p), NegAtom(p)}
    return sorted(cl, key=lambda f: (_node_count(f), to_string(f)))


def consistent_masks(cl: Sequence[Formula]) -> list[int]:
    """Enumerate consistent subsets of ``cl`` as bitmasks over its order.

    Only consistent sets are generated: each closure member is either forced
    by the consistency rules or branched on.
    """
    index = {f: i for i, f in enumerate(cl)}
    partial = [0]
    for i, f in enumerate(cl):
        bit = 1 << i
        nxt = []
        for m in partial:
            def has(g):
                return bool(m >> index[g] & 1)
            if isinstance(f, _Const):
                options = (f.value,)
            elif isinstance(f, NegAtom):
                options = (not has(Atom(f.name)),) if index[Atom(f.name)] < i else (False, True)
            elif isinstance(f, Atom):
                options = (not has(NegAtom(f.name)),) if index[NegAtom(f.name)] < i else (False, True)
            elif isinstance(f, And):
                options = (has(f.left) and has(f.right),)
            elif isinstance(f, Or):
                options = (has(f.left) or has(f.right),)
            elif isinstance(f, Until):
                options = (True,) if has(f.right) else (False, True)
            elif isinstance(f, Release):
                options = (True,) if has(f.left) and has(f.right) else (False, True)
            elif isinstance(f, BoundedF):
                options = (True,) if has(f.arg) else (False, True)
            elif isinstance(f, Next):
                options = (False, True)
            else:
                raise FormulaError("consistent sets are defined for PLTL_F formulas only")
            for o in options:
                nxt.append(m | bit if o else m)
        partial = nxt
    return partial


def closure_and_consistent_sets(phi: Formula) -> tuple[frozenset[Formula], list[frozenset[Formula]]]:
    if g_variables(phi):
        raise FormulaError("consistent sets are defined for PLTL_F formulas only")
    cl = closure(phi)
    sets = [frozenset(f for i, f in enumerate(cl) if m >> i & 1) for m in consistent_masks(cl)]
    return frozenset(cl), sets


# -- semantics on lassos -----------------------------------------------------

@dataclass(frozen=True)
class LassoWord:
    """The omega-word ``prefix . cycle^omega``; letters are proposition sets."""
    prefix: tuple[frozenset[str], ...]
    cycle: tuple[frozenset[str], ...]

    def __post_init__(self):
        object.__setattr__(self, "prefix", tuple(frozenset(a) for a in self.prefix))
        object.__setattr__(self, "cycle", tuple(frozenset(a) for a in self.cycle))
        if not self.cycle:
            raise ValueError("lasso cycle must be non-empty")

    def normalize(self, i: int) -> int:
        u = len(self.prefix)
        return i if i < u else u + (i - u) % len(self.cycle)

    def __getitem__(self, i: int) -> frozenset[str]:
        j = self.normalize(i)
        u = len(self.prefix)
        return self.prefix[j] if j < u else self.cycle[j - u]

    def __len__(self) -> int:
        """Number of distinct positions."""
        return len(self.prefix) + len(self.cycle)

    def successor(self, i: int) -> int:
        return self.normalize(i + 1)


def eval_lasso(phi: Formula, alpha: Mapping[str, int], w: LassoWord, pos: int = 0) -> bool:
    """Decide ``(w, pos, alpha) |= phi`` by direct recursive evaluation."""
    missing = variables(phi) - set(alpha)
    if missing:
        raise FormulaError(f"valuation does not bind {', '.join(sorted(missing))}")
    # Truth values are periodic past the prefix, so this window is exhaustive.
    window = len(w.prefix) + (size(phi) + sum(alpha[z] for z in variables(phi)) + 1) * len(w.cycle)
    memo: dict[tuple[Formula, int], bool] = {}

    def ev(f: Formula, i: int) -> bool:
        i = w.normalize(i)
        key = (f, i)
        if key in memo:
            return memo[key]
        if isinstance(f, _Const):
            r = f.value
        elif isinstance(f, Atom):
            r = f.name in w[i]
        elif isinstance(f, NegAtom):
            r = f.name not in w[i]
        elif isinstance(f, And):
            r = ev(f.left, i) and ev(f.right, i)
        elif isinstance(f, Or):
            r = ev(f.left, i) or ev(f.right, i)
        elif isinstance(f, Next):
            r = ev(f.arg, i + 1)
        elif isinstance(f, Until):
            r = False
            for j in range(window):
                if ev(f.right, i + j):
                    r = True
                    break
                if not ev(f.left, i + j):
                    break
        elif isinstance(f, Release):
            r = True
            for j in range(window):
                if not ev(f.right, i + j):
                    r = False
                    break
                if ev(f.left, i + j):
                    break
        elif isinstance(f, BoundedF):
            r = any(ev(f.arg, i + j) for j in range(alpha[f.var] + 1))
        elif isinstance(f, BoundedG):
            r = all(ev(f.arg, i + j) for j in range(alpha[f.var] + 1))
        else:
            raise TypeError(f"not a formula: {f!r}")
        memo[key] = r
        return r

    return ev(phi, pos)


def iter_nodes(phi: Formula) -> Iterator[Formula]:
    """Pre-order traversal (with repetitions)."""
    yield phi
    for c in phi.children():
        yield from iter_nodes(c)


# -- parametric structure ------------------------------------------------------

def is_parametric(phi: Formula) -> bool:
    """Does ``phi`` contain a bounded operator?"""
    return any(isinstance(f, (BoundedF, BoundedG)) for f in subformulae(phi))


def is_choice_point(phi: Formula) -> bool:
    """Would tracking the bounded obligations below ``phi`` need a guess?

    Obligations are deterministic when every disjunction, until and release
    has its parametric part on one side only (left of U, right of R) and
    bounded eventualities have parameter-free arguments.
    """
    if isinstance(phi, Or):
        return is_parametric(phi.left) and is_parametric(phi.right)
    if isinstance(phi, Until):
        return is_parametric(phi.right)
    if isinstance(phi, Release):
        return is_parametric(phi.left)
    if isinstance(phi, (BoundedF, BoundedG)):
        return is_parametric(phi.arg)
    return False


def expand_choice_points(phi: Formula, alpha: Mapping[str, int]) -> Formula:
    """Unroll (under ``alpha``) exactly the subformulae that are choice points."""
    return _map(phi, lambda f: expand_valuation(f, alpha) if is_choice_point(f) else f)


def has_choice_points(phi: Formula) -> bool:
    return any(is_choice_point(f) for f in subformulae(phi))
