"""First-order syntax: signatures, terms, formulas, a parser and a printer.

Formulas use a small ASCII concrete syntax::

    exists z1 . x E z1 & z1 E y
    forall z1 . f(z1) = x & R(x, y)
    !(x = y) | f(x) = c

Quantifier scope extends as far to the right as possible, ``&`` binds
tighter than ``|`` and ``!`` binds tightest.  Element parameters (names for
individual elements of a structure) are written ``@name``.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from typing import Iterator, Union

VARIABLE_RE = re.compile(r"^[uvwxyz][0-9]*$")
X, Y = "x", "y"


class FormulaError(ValueError):
    """Raised for malformed formulas (syntax, undeclared symbols, arity)."""

    def __init__(self, message: str, position: int | None = None):
        if position is not None:
            message = f"{message} (at position {position})"
        super().__init__(message)
        self.position = position


@dataclass(frozen=True)
class Signature:
    relations: tuple[tuple[str, int], ...] = ()
    functions: tuple[tuple[str, int], ...] = ()
    constants: tuple[str, ...] = ()

    def __post_init__(self):
        rel = [n for n, _ in self.relations]
        fun = [n for n, _ in self.functions]
        names = rel + fun + list(self.constants)
        if len(set(names)) != len(names):
            raise FormulaError(f"symbol names must be pairwise distinct: {names}")
        for name, arity in self.relations + self.functions:
            if not isinstance(arity, int) or arity < 1:
                raise FormulaError(f"arity of {name!r} must be a positive integer")
        for name in names:
            if VARIABLE_RE.match(name):
                raise FormulaError(f"symbol {name!r} clashes with the variable pool")

    @property
    def relation_arity(self) -> dict[str, int]:
        return dict(self.relations)

    @property
    def function_arity(self) -> dict[str, int]:
        return dict(self.functions)

    def is_graph(self) -> bool:
        return self.relations == (("E", 2),) and not self.functions and not self.constants


EMPTY_SIGNATURE = Signature()
GRAPH_SIGNATURE = Signature(relations=(("E", 2),))


# -- terms -----------------------------------------------------------------


@dataclass(frozen=True)
class Var:
    name: str

    def __str__(self):
        return self.name


@dataclass(frozen=True)
class Const:
    """A constant symbol, or an element parameter when ``name`` starts with ``@``."""

    name: str

    @property
    def is_parameter(self) -> bool:
        return self.name.startswith("@")

    def __str__(self):
        return self.name


@dataclass(frozen=True)
class App:
    fn: str
    args: tuple

    def __str__(self):
        return f"{self.fn}({', '.join(map(str, self.args))})"


Term = Union[Var, Const, App]


def term_variables(t: Term) -> set[str]:
    if isinstance(t, Var):
        return {t.name}
    if isinstance(t, App):
        out: set[str] = set()
        for a in t.args:
            out |= term_variables(a)
        return out
    return set()


def term_depth(t: Term) -> int:
    if isinstance(t, App):
        return 1 + max(term_depth(a) for a in t.args)
    return 0


def term_constants(t: Term) -> set[str]:
    if isinstance(t, Const):
        return {t.name}
    if isinstance(t, App):
        out: set[str] = set()
        for a in t.args:
            out |= term_constants(a)
        return out
    return set()


def is_c_term(t: Term) -> bool:
    """A c-term contains both distinguished variables."""
    return {X, Y} <= term_variables(t)


# -- formulas --------------------------------------------------------------


@dataclass(frozen=True)
class Eq:
    left: Term
    right: Term


@dataclass(frozen=True)
class Rel:
    name: str
    args: tuple


@dataclass(frozen=True)
class And:
    left: "Formula"
    right: "Formula"


@dataclass(frozen=True)
class Or:
    left: "Formula"
    right: "Formula"


@dataclass(frozen=True)
class Not:
    body: "Formula"


@dataclass(frozen=True)
class Exists:
    var: str
    body: "Formula"


@dataclass(frozen=True)
class Forall:
    var: str
    body: "Formula"


Formula = Union[Eq, Rel, And, Or, Not, Exists, Forall]
ATOMS = (Eq, Rel)
QUANTIFIERS = (Exists, Forall)


def atoms(f: Formula) -> Iterator[Formula]:
    if isinstance(f, ATOMS):
        yield f
    elif isinstance(f, (And, Or)):
        yield from atoms(f.left)
        yield from atoms(f.right)
    else:
        yield from atoms(f.body)


def atom_terms(atom: Formula) -> tuple:
    return (atom.left, atom.right) if isinstance(atom, Eq) else atom.args


def atom_variables(atom: Formula) -> set[str]:
    out: set[str] = set()
    for t in atom_terms(atom):
        out |= term_variables(t)
    return out


def conjunction(parts) -> Formula:
    parts = list(parts)
    if not parts:
        raise FormulaError("empty conjunction")
    out = parts[0]
    for p in parts[1:]:
        out = And(out, p)
    return out


def free_variables(f: Formula) -> set[str]:
    if isinstance(f, ATOMS):
        return atom_variables(f)
    if isinstance(f, (And, Or)):
        return free_variables(f.left) | free_variables(f.right)
    if isinstance(f, Not):
        return free_variables(f.body)
    return free_variables(f.body) - {f.var}


def rank(f: Formula) -> int:
    return len(free_variables(f))


def bound_variables(f: Formula) -> list[str]:
    """Quantified variables in binding order (duplicates preserved)."""
    if isinstance(f, ATOMS):
        return []
    if isinstance(f, (And, Or)):
        return bound_variables(f.left) + bound_variables(f.right)
    if isinstance(f, Not):
        return bound_variables(f.body)
    return [f.var] + bound_variables(f.body)


def all_variables(f: Formula) -> set[str]:
    """Every variable occurring in ``f``, binders included."""
    out = set(bound_variables(f))
    for a in atoms(f):
        out |= atom_variables(a)
    return out


def is_conjunctive(f: Formula) -> bool:
    if isinstance(f, ATOMS):
        return True
    if isinstance(f, (Or, Not)):
        return False
    if isinstance(f, And):
        return is_conjunctive(f.left) and is_conjunctive(f.right)
    return is_conjunctive(f.body)


def check_well_formed(f: Formula) -> None:
    bound = bound_variables(f)
    if len(set(bound)) != len(bound):
        raise FormulaError("quantified variables must be pairwise distinct")
    clash = set(bound) & free_variables(f)
    if clash:
        raise FormulaError(f"variables both free and bound: {sorted(clash)}")


@dataclass(frozen=True)
class DependencyGraph:
    vertices: frozenset
    edges: frozenset  # of frozensets, singletons are not recorded

    def components(self) -> list[set[str]]:
        adj: dict[str, set[str]] = {v: set() for v in self.vertices}
        for e in self.edges:
            u, w = tuple(e)
            adj[u].add(w)
            adj[w].add(u)
        seen: set[str] = set()
        comps = []
        for v in sorted(self.vertices):
            if v in seen:
                continue
            comp, stack = set(), [v]
            while stack:
                u = stack.pop()
                if u in comp:
                    continue
                comp.add(u)
                stack.extend(adj[u] - comp)
            seen |= comp
            comps.append(comp)
        return comps

    def is_connected(self) -> bool:
        return len(self.components()) <= 1


def dependency_graph(f: Formula, include_constants: bool = False) -> DependencyGraph:
    """Variables of ``f`` joined whenever they share an atomic subformula.

    With ``include_constants`` constant symbols become vertices as well.
    """
    if not is_conjunctive(f):
        raise FormulaError("dependency graphs are defined for conjunctive formulas only")
    vertices = set(all_variables(f))
    edges = set()
    for a in atoms(f):
        names = set(atom_variables(a))
        if include_constants:
            for t in atom_terms(a):
                names |= term_constants(t)
        vertices |= names
        ordered = sorted(names)
        for i, u in enumerate(ordered):
            for w in ordered[i + 1:]:
                edges.add(frozenset((u, w)))
    return DependencyGraph(frozenset(vertices), frozenset(edges))


def is_connected_formula(f: Formula, include_constants: bool = False) -> bool:
    if not is_conjunctive(f):
        return False
    if free_variables(f) != {X, Y}:
        return False
    return dependency_graph(f, include_constants).is_connected()


# -- printing --------------------------------------------------------------

_PREC = {Or: 1, And: 2}


def format_formula(f: Formula, infix=None) -> str:
    """Render ``f`` in the concrete syntax.

    ``infix`` names the binary relations printed as ``t1 R t2``; by default
    every binary relation with a one-character name.
    """
    if isinstance(f, Eq):
        return f"{f.left} = {f.right}"
    if isinstance(f, Rel):
        if len(f.args) == 2 and (f.name in infix if infix is not None else len(f.name) == 1):
            return f"{f.args[0]} {f.name} {f.args[1]}"
        return f"{f.name}({', '.join(map(str, f.args))})"
    if isinstance(f, Not):
        inner = format_formula(f.body, infix)
        if isinstance(f.body, ATOMS + (Not,)):
            return f"!{inner}"
        return f"!({inner})"
    if isinstance(f, QUANTIFIERS):
        kw = "exists" if isinstance(f, Exists) else "forall"
        return f"{kw} {f.var} . {format_formula(f.body, infix)}"
    op = " & " if isinstance(f, And) else " | "
    p = _PREC[type(f)]

    def side(g, right):
        s = format_formula(g, infix)
        if isinstance(g, QUANTIFIERS):
            return f"({s})"
        if type(g) in _PREC and (_PREC[type(g)] < p or (right and _PREC[type(g)] == p)):
            return f"({s})"
        return s

    return side(f.left, False) + op + side(f.right, True)


# -- parsing ---------------------------------------------------------------

_TOKEN_RE = re.compile(
    r"\s*(?:(?P<num>\d+)|(?P<param>@[A-Za-z0-9_]+)|(?P<name>[A-Za-z_][A-Za-z0-9_]*)"
    r"|(?P<op>!=|[=&|!().,]))"
)


def _tokenize(text: str) -> list[tuple[str, str, int]]:
    tokens = []
    pos = 0
    while pos < len(text):
        if text[pos:].strip() == "":
            break
        m = _TOKEN_RE.match(text, pos)
        if not m or m.end() == pos:
            raise FormulaError(f"unexpected character {text[pos:].lstrip()[:1]!r}", pos)
        kind = m.lastgroup
        start = m.start(kind)
        tokens.append((kind, m.group(kind), start))
        pos = m.end()
    tokens.append(("eof", "", len(text)))
    return tokens


@dataclass
class _Parser:
    tokens: list
    sig: Signature
    i: int = 0
    rel: dict = field(default_factory=dict)
    fun: dict = field(default_factory=dict)

    def peek(self, k: int = 0):
        return self.tokens[min(self.i + k, len(self.tokens) - 1)]

    def take(self):
        tok = self.tokens[self.i]
        self.i += 1
        return tok

    def expect(self, value: str):
        kind, val, pos = self.take()
        if val != value:
            raise FormulaError(f"expected {value!r}, found {val or 'end of input'!r}", pos)

    def formula(self):
        left = self.conj()
        while self.peek()[1] == "|":
            self.take()
            left = Or(left, self.conj())
        return left

    def conj(self):
        left = self.unary()
        while self.peek()[1] == "&":
            self.take()
            left = And(left, self.unary())
        return left

    def unary(self):
        kind, val, pos = self.peek()
        if val == "!":
            self.take()
            return Not(self.unary())
        if kind == "name" and val in ("exists", "forall"):
            self.take()
            vkind, var, vpos = self.take()
            if vkind != "name" or not VARIABLE_RE.match(var):
                raise FormulaError(f"expected a variable after {val}, found {var!r}", vpos)
            self.expect(".")
            body = self.formula()
            return Exists(var, body) if val == "exists" else Forall(var, body)
        if val == "(":
            self.take()
            inner = self.formula()
            self.expect(")")
            return inner
        return self.atom()

    def atom(self):
        kind, val, pos = self.peek()
        if kind == "name" and val in self.rel and self.peek(1)[1] == "(":
            self.take()
            args = self.arguments(val, self.rel[val], pos)
            return Rel(val, args)
        left = self.term()
        kind, val, pos = self.peek()
        if val == "=":
            self.take()
            return Eq(left, self.term())
        if kind == "name" and val in self.rel:
            if self.rel[val] != 2:
                raise FormulaError(f"infix use of non-binary relation {val!r}", pos)
            self.take()
            return Rel(val, (left, self.term()))
        if kind == "name" and val not in ("exists", "forall"):
            raise FormulaError(f"undeclared symbol {val!r}", pos)
        raise FormulaError(f"expected '=' or a relation, found {val or 'end of input'!r}", pos)

    def arguments(self, name, arity, pos):
        self.expect("(")
        args = [self.term()]
        while self.peek()[1] == ",":
            self.take()
            args.append(self.term())
        self.expect(")")
        if len(args) != arity:
            raise FormulaError(f"{name!r} expects {arity} arguments, got {len(args)}", pos)
        return tuple(args)

    def term(self):
        kind, val, pos = self.take()
        if kind == "param":
            return Const(val)
        if kind == "num":
            raise FormulaError(f"bare number {val!r}; write element parameters as @{val}", pos)
        if kind != "name":
            raise FormulaError(f"expected a term, found {val or 'end of input'!r}", pos)
        if self.peek()[1] == "(":
            if val not in self.fun:
                raise FormulaError(f"undeclared symbol {val!r}", pos)
            return App(val, self.arguments(val, self.fun[val], pos))
        if val in self.fun:
            raise FormulaError(f"{val!r} expects {self.fun[val]} arguments, got 0", pos)
        if val in self.sig.constants:
            return Const(val)
        if VARIABLE_RE.match(val):
            return Var(val)
        raise FormulaError(f"undeclared symbol {val!r}", pos)


def parse_formula(text: str, sig: Signature = EMPTY_SIGNATURE) -> Formula:
    parser = _Parser(_tokenize(text), sig, rel=sig.relation_arity, fun=sig.function_arity)
    f = parser.formula()
    kind, val, pos = parser.peek()
    if kind != "eof":
        raise FormulaError(f"unexpected {val!r}", pos)
    check_well_formed(f)
    return f


def parse_term(text: str, sig: Signature = EMPTY_SIGNATURE) -> Term:
    parser = _Parser(_tokenize(text), sig, rel=sig.relation_arity, fun=sig.function_arity)
    t = parser.term()
    kind, val, pos = parser.peek()
    if kind != "eof":
        raise FormulaError(f"unexpected {val!r}", pos)
    return t
