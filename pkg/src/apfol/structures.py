"""Finite L-structures, satisfaction, extensions and isomorphism search."""

from __future__ import annotations

import itertools
import re
from dataclasses import dataclass, field

import numpy as np

from .syntax import (
    App,
    Const,
    Eq,
    Exists,
    Forall,
    Formula,
    FormulaError,
    Not,
    Or,
    And,
    Rel,
    Signature,
    Term,
    Var,
    X,
    Y,
    free_variables,
)


class StructureError(ValueError):
    """Raised for ill-formed structures and structure files."""


class UnknownElement(KeyError):
    pass


@dataclass(frozen=True, eq=False)
class FiniteStructure:
    """A finite structure over ``signature``.

    Elements are named by strings and interned as indices ``0..n-1`` in
    universe order.  Function tables map index tuples to indices.
    Instances hash by identity, so they can key caches.
    """

    signature: Signature
    universe: tuple
    functions: dict = field(default_factory=dict)
    relations: dict = field(default_factory=dict)
    constants: dict = field(default_factory=dict)
    name: str = ""
    graph: bool = False

    def __post_init__(self):
        if not self.universe:
            raise StructureError("the universe must be non-empty")
        if len(set(self.universe)) != len(self.universe):
            raise StructureError("duplicate elements in the universe")
        n = len(self.universe)
        for fname, arity in self.signature.functions:
            table = self.functions.get(fname)
            if table is None:
                raise StructureError(f"missing table for function {fname!r}")
            for args in itertools.product(range(n), repeat=arity):
                out = table.get(args)
                if out is None:
                    raise StructureError(f"function {fname!r} undefined at {self.names(args)}")
                if not 0 <= out < n:
                    raise StructureError(f"function {fname!r} leaves the universe")
        for rname, arity in self.signature.relations:
            for tup in self.relations.get(rname, frozenset()):
                if len(tup) != arity or not all(0 <= i < n for i in tup):
                    raise StructureError(f"bad tuple {tup} for relation {rname!r}")
        for cname in self.signature.constants:
            if cname not in self.constants:
                raise StructureError(f"constant {cname!r} is not interpreted")
        object.__setattr__(self, "_index", {e: i for i, e in enumerate(self.universe)})
        arrays = {}
        for fname, arity in self.signature.functions:
            arr = np.zeros((n,) * arity, dtype=np.int64)
            for args, out in self.functions[fname].items():
                arr[args] = out
            arrays[fname] = arr
        object.__setattr__(self, "_function_arrays", arrays)
        rel_arrays = {}
        for rname, arity in self.signature.relations:
            arr = np.zeros((n,) * arity, dtype=bool)
            for tup in self.relations.get(rname, ()):
                arr[tup] = True
            rel_arrays[rname] = arr
        object.__setattr__(self, "_relation_arrays", rel_arrays)

    @classmethod
    def build(cls, universe, functions=None, relations=None, constants=None,
              name: str = "", graph: bool = False) -> "FiniteStructure":
        """Construct from element names.

        ``functions`` maps a symbol to ``(arity, {args: value})`` where unary
        arguments may be given bare; ``relations`` maps a symbol to
        ``(arity, iterable of tuples)``; ``constants`` maps a symbol to an
        element.  With ``graph`` the relation ``E`` is symmetrized.
        """
        universe = tuple(str(e) for e in universe)
        idx = {e: i for i, e in enumerate(universe)}

        def look(e):
            try:
                return idx[str(e)]
            except KeyError:
                raise StructureError(f"unknown element {e!r}") from None

        funs, fsig = {}, []
        for fname, (arity, table) in (functions or {}).items():
            conv = {}
            for args, out in table.items():
                if not isinstance(args, tuple):
                    args = (args,)
                conv[tuple(look(a) for a in args)] = look(out)
            funs[fname] = conv
            fsig.append((fname, arity))
        rels, rsig = {}, []
        for rname, (arity, tuples) in (relations or {}).items():
            conv = set()
            for tup in tuples:
                if not isinstance(tup, tuple):
                    tup = (tup,)
                t = tuple(look(a) for a in tup)
                conv.add(t)
                if graph and rname == "E":
                    conv.add(t[::-1])
            rels[rname] = frozenset(conv)
            rsig.append((rname, arity))
        consts = {c: look(e) for c, e in (constants or {}).items()}
        sig = Signature(relations=tuple(sorted(rsig)), functions=tuple(sorted(fsig)),
                        constants=tuple(sorted(consts)))
        return cls(sig, universe, funs, rels, consts, name=name, graph=graph)

    @property
    def size(self) -> int:
        return len(self.universe)

    def index(self, element) -> int:
        try:
            return self._index[str(element)]
        except KeyError:
            raise UnknownElement(f"{element!r} is not an element of {self.name or 'the structure'}") from None

    def names(self, indices) -> tuple:
        return tuple(self.universe[i] for i in indices)

    def apply(self, fname: str, *args: int) -> int:
        return self.functions[fname][tuple(args)]

    def holds(self, rname: str, *args: int) -> bool:
        return tuple(args) in self.relations.get(rname, ())

    def function_array(self, fname: str) -> np.ndarray:
        return self._function_arrays[fname]

    def relation_array(self, rname: str) -> np.ndarray:
        return self._relation_arrays[rname]

    def constant_index(self, name: str) -> int:
        if name.startswith("@"):
            return self.index(name[1:])
        try:
            return self.constants[name]
        except KeyError:
            raise FormulaError(f"unknown constant {name!r}") from None

    def __repr__(self):
        return f"FiniteStructure({self.name or '?'}, |A|={self.size})"


# -- satisfaction ----------------------------------------------------------


def _eval(S: FiniteStructure, t: Term, env: dict) -> int:
    if isinstance(t, Var):
        try:
            return env[t.name]
        except KeyError:
            raise FormulaError(f"unassigned variable {t.name!r}") from None
    if isinstance(t, Const):
        return S.constant_index(t.name)
    table = S.functions.get(t.fn)
    if table is None:
        raise FormulaError(f"unknown function symbol {t.fn!r}")
    return table[tuple(_eval(S, a, env) for a in t.args)]


def _sat(S: FiniteStructure, f: Formula, env: dict) -> bool:
    if isinstance(f, Eq):
        return _eval(S, f.left, env) == _eval(S, f.right, env)
    if isinstance(f, Rel):
        if f.name not in S.signature.relation_arity:
            raise FormulaError(f"unknown relation symbol {f.name!r}")
        return tuple(_eval(S, a, env) for a in f.args) in S.relations.get(f.name, ())
    if isinstance(f, And):
        return _sat(S, f.left, env) and _sat(S, f.right, env)
    if isinstance(f, Or):
        return _sat(S, f.left, env) or _sat(S, f.right, env)
    if isinstance(f, Not):
        return not _sat(S, f.body, env)
    saved = env.get(f.var)
    want_any = isinstance(f, Exists)
    result = not want_any
    for e in range(S.size):
        env[f.var] = e
        if _sat(S, f.body, env) == want_any:
            result = want_any
            break
    if saved is None:
        env.pop(f.var, None)
    else:
        env[f.var] = saved
    return result


def _index_assignment(S: FiniteStructure, sigma: dict) -> dict:
    return {v: S.index(e) for v, e in (sigma or {}).items()}


def evaluate_term(S: FiniteStructure, t: Term, sigma: dict | None = None):
    """Value (an element name) of ``t`` under the assignment ``sigma``."""
    return S.universe[_eval(S, t, _index_assignment(S, sigma))]


def satisfies(S: FiniteStructure, f: Formula, sigma: dict | None = None) -> bool:
    env = _index_assignment(S, sigma)
    missing = free_variables(f) - set(env)
    if missing:
        raise FormulaError(f"unassigned variables {sorted(missing)}")
    return _sat(S, f, env)


class Extension:
    """A set of element pairs of an ``n``-element structure as a bit vector.

    Pair ``(a, b)`` (indices) is bit ``a + n*b``.
    """

    __slots__ = ("bits", "n")

    def __init__(self, bits: int, n: int):
        self.bits = bits
        self.n = n

    @classmethod
    def full(cls, n: int) -> "Extension":
        return cls((1 << (n * n)) - 1, n)

    def __contains__(self, pair) -> bool:
        a, b = pair
        return bool(self.bits >> (a + self.n * b) & 1)

    def __iter__(self):
        n, bits = self.n, self.bits
        for b in range(n):
            for a in range(n):
                if bits >> (a + n * b) & 1:
                    yield (a, b)

    def __len__(self):
        return bin(self.bits).count("1")

    def __eq__(self, other):
        return isinstance(other, Extension) and (self.bits, self.n) == (other.bits, other.n)

    def __hash__(self):
        return hash((self.bits, self.n))

    def is_full(self) -> bool:
        return self.bits == (1 << (self.n * self.n)) - 1

    def __repr__(self):
        return f"Extension({sorted(self)}, n={self.n})"


def pair_bit(a: int, b: int, n: int) -> int:
    return a + n * b


def extension(S: FiniteStructure, f: Formula) -> Extension:
    """Pairs (a, b) with S |= f(a, b), evaluated pair by pair."""
    fv = free_variables(f)
    if not fv <= {X, Y} or len(fv) != 2:
        raise FormulaError(f"expected a formula with free variables x, y; got {sorted(fv)}")
    n = S.size
    bits = 0
    env: dict = {}
    for b in range(n):
        for a in range(n):
            env[X], env[Y] = a, b
            if _sat(S, f, env):
                bits |= 1 << (a + n * b)
    return Extension(bits, n)


# -- isomorphisms ----------------------------------------------------------


def _invariants(S: FiniteStructure) -> list[tuple]:
    n = S.size
    inv = [[] for _ in range(n)]
    for fname, arity in S.signature.functions:
        indeg = [0] * n
        fixed = [False] * n
        for args, out in S.functions[fname].items():
            indeg[out] += 1
            if arity == 1 and args[0] == out:
                fixed[out] = True
        for e in range(n):
            inv[e].extend((indeg[e], fixed[e]))
    for rname, arity in S.signature.relations:
        counts = [[0] * arity for _ in range(n)]
        for tup in S.relations.get(rname, ()):
            for pos, e in enumerate(tup):
                counts[e][pos] += 1
        for e in range(n):
            inv[e].extend(counts[e])
    for cname in S.signature.constants:
        c = S.constants[cname]
        for e in range(n):
            inv[e].append(e == c)
    return [tuple(v) for v in inv]


def find_isomorphisms(A: FiniteStructure, B: FiniteStructure) -> list[dict]:
    """All isomorphisms A -> B as dicts of element names, in a fixed order."""
    if A.signature != B.signature:
        raise StructureError("isomorphism search needs a shared signature")
    n = A.size
    if B.size != n:
        return []
    inv_a, inv_b = _invariants(A), _invariants(B)
    if sorted(inv_a) != sorted(inv_b):
        return []
    funcs = A.signature.functions
    rels = A.signature.relations
    # tuples to check once every member has been assigned, keyed by the
    # position in the assignment order at which they become complete
    order = list(range(n))
    complete_at: list[list] = [[] for _ in range(n)]
    for fname, arity in funcs:
        for args, out in A.functions[fname].items():
            last = max(args + (out,))
            complete_at[last].append(("f", fname, args, out))
    for rname, arity in rels:
        for args in itertools.product(range(n), repeat=arity):
            complete_at[max(args)].append(("r", rname, args, args in A.relations.get(rname, ())))
    results = []
    h = [-1] * n
    used = [False] * n

    def consistent(k: int) -> bool:
        for kind, name, args, extra in complete_at[k]:
            img = tuple(h[i] for i in args)
            if kind == "f":
                if B.functions[name][img] != h[extra]:
                    return False
            elif (img in B.relations.get(name, ())) != extra:
                return False
        return True

    def search(k: int):
        if k == n:
            results.append({A.universe[i]: B.universe[h[i]] for i in range(n)})
            return
        for cand in range(n):
            if used[cand] or inv_b[cand] != inv_a[order[k]]:
                continue
            h[k] = cand
            used[cand] = True
            if consistent(k):
                search(k + 1)
            used[cand] = False
            h[k] = -1

    search(0)
    return results


def is_isomorphism(H: dict, A: FiniteStructure, B: FiniteStructure) -> bool:
    """Direct check of the homomorphism and bijectivity conditions."""
    if sorted(H) != sorted(A.universe) or sorted(H.values()) != sorted(B.universe):
        return False
    m = {A.index(a): B.index(b) for a, b in H.items()}
    for fname, arity in A.signature.functions:
        for args, out in A.functions[fname].items():
            if B.functions[fname][tuple(m[i] for i in args)] != m[out]:
                return False
    for rname, arity in A.signature.relations:
        for args in itertools.product(range(A.size), repeat=arity):
            img = tuple(m[i] for i in args)
            if (args in A.relations.get(rname, ())) != (img in B.relations.get(rname, ())):
                return False
    return all(m[A.constants[c]] == B.constants[c] for c in A.signature.constants)


def respects(H: dict, A: FiniteStructure, B: FiniteStructure, f: Formula) -> bool:
    """Whether A |= f(s) iff B |= f(H o s) for every assignment s over A."""
    fv = sorted(free_variables(f))
    m = {A.index(a): B.index(b) for a, b in H.items()}
    for values in itertools.product(range(A.size), repeat=len(fv)):
        env_a = dict(zip(fv, values))
        env_b = {v: m[e] for v, e in env_a.items()}
        if _sat(A, f, env_a) != _sat(B, f, env_b):
            return False
    return True


def apply_bijection(H: dict, A: FiniteStructure, name: str = "") -> FiniteStructure:
    """The isomorphic copy of ``A`` obtained by renaming elements along ``H``."""
    m = {A.index(a): b for a, b in H.items()}
    universe = [H[a] for a in A.universe]
    functions = {
        f: (arity, {tuple(m[i] for i in args): m[out] for args, out in A.functions[f].items()})
        for f, arity in A.signature.functions
    }
    relations = {
        r: (arity, [tuple(m[i] for i in t) for t in A.relations.get(r, ())])
        for r, arity in A.signature.relations
    }
    constants = {c: m[A.constants[c]] for c in A.signature.constants}
    return FiniteStructure.build(universe, functions, relations, constants, name=name, graph=A.graph)


# -- structure files -------------------------------------------------------

_STRUCT_TOKEN = re.compile(r"\s*(?:(->)|([A-Za-z0-9_+*\-']+)|([{}():,=/]))")
_KEYWORDS = {"universe", "function", "relation", "constant", "structure", "graph"}


def _tokens(text: str):
    text = re.sub(r"#[^\n]*", "", text)
    pos = 0
    out = []
    while pos < len(text):
        if not text[pos:].strip():
            break
        m = _STRUCT_TOKEN.match(text, pos)
        if not m:
            line = text.count("\n", 0, pos) + 1
            raise StructureError(f"line {line}: unexpected {text[pos:].lstrip()[:10]!r}")
        out.append((m.group(m.lastindex), text.count("\n", 0, m.start(m.lastindex)) + 1))
        pos = m.end()
    return out


class _Reader:
    def __init__(self, text: str):
        self.toks = _tokens(text)
        self.i = 0

    def peek(self):
        return self.toks[self.i][0] if self.i < len(self.toks) else None

    def take(self):
        if self.i >= len(self.toks):
            raise StructureError("unexpected end of input")
        tok = self.toks[self.i]
        self.i += 1
        return tok[0]

    def line(self):
        return self.toks[min(self.i, len(self.toks) - 1)][1] if self.toks else 0

    def expect(self, value):
        line = self.line()
        tok = self.take()
        if tok != value:
            raise StructureError(f"line {line}: expected {value!r}, found {tok!r}")

    def name(self):
        line = self.line()
        tok = self.take()
        if not re.match(r"[A-Za-z0-9_+*\-']+$", tok) or tok in _KEYWORDS:
            raise StructureError(f"line {line}: expected a name, found {tok!r}")
        return tok

    def tuple_(self):
        self.expect("(")
        items = [self.name()]
        while self.peek() == ",":
            self.take()
            items.append(self.name())
        self.expect(")")
        return tuple(items)


def parse_structures(text: str) -> dict[str, FiniteStructure]:
    """Parse every ``structure``/``graph`` block of a structure file."""
    r = _Reader(text)
    out: dict[str, FiniteStructure] = {}
    while r.peek() is not None:
        line = r.line()
        head = r.take()
        if head not in ("structure", "graph"):
            raise StructureError(f"line {line}: expected 'structure' or 'graph', found {head!r}")
        graph = head == "graph"
        sname = r.name()
        if r.peek() == "graph":
            r.take()
            graph = True
        r.expect("{")
        universe: list = []
        functions: dict = {}
        relations: dict = {}
        constants: dict = {}
        while r.peek() != "}":
            line = r.line()
            kw = r.take()
            if kw == "universe":
                r.expect(":")
                while r.peek() not in _KEYWORDS | {"}", None}:
                    universe.append(r.name())
            elif kw in ("function", "relation"):
                sym = r.name()
                r.expect("/")
                arity = int(r.name())
                r.expect("{")
                entries = {} if kw == "function" else []
                while r.peek() != "}":
                    tup = r.tuple_()
                    if len(tup) != arity:
                        raise StructureError(f"line {r.line()}: {sym}/{arity} given {len(tup)} arguments")
                    if kw == "function":
                        r.expect("->")
                        entries[tup] = r.name()
                    else:
                        entries.append(tup)
                    if r.peek() == ",":
                        r.take()
                r.expect("}")
                if sym in functions or sym in relations:
                    raise StructureError(f"line {line}: symbol {sym!r} declared twice")
                (functions if kw == "function" else relations)[sym] = (arity, entries)
            elif kw == "constant":
                cname = r.name()
                r.expect("=")
                constants[cname] = r.name()
            else:
                raise StructureError(f"line {line}: unexpected {kw!r}")
        r.expect("}")
        if graph and "E" not in relations:
            relations["E"] = (2, [])
        if sname in out:
            raise StructureError(f"structure {sname!r} defined twice")
        try:
            out[sname] = FiniteStructure.build(universe, functions, relations, constants,
                                               name=sname, graph=graph)
        except FormulaError as exc:
            raise StructureError(str(exc)) from None
    return out


def load_structures(path) -> dict[str, FiniteStructure]:
    with open(path) as fh:
        return parse_structures(fh.read())


def format_structure(S: FiniteStructure) -> str:
    lines = [f"{'graph' if S.graph else 'structure'} {S.name or 'S'} {{"]
    lines.append("  universe: " + " ".join(S.universe))
    for fname, arity in S.signature.functions:
        items = ", ".join(
            f"({', '.join(S.names(args))}) -> {S.universe[out]}"
            for args, out in sorted(S.functions[fname].items())
        )
        lines.append(f"  function {fname}/{arity} {{ {items} }}")
    for rname, arity in S.signature.relations:
        tuples = sorted(S.relations.get(rname, ()))
        if S.graph and rname == "E":
            tuples = [t for t in tuples if t[0] <= t[1]]
        items = ", ".join(f"({', '.join(S.names(t))})" for t in tuples)
        lines.append(f"  relation {rname}/{arity} {{ {items} }}")
    for cname in S.signature.constants:
        lines.append(f"  constant {cname} = {S.universe[S.constants[cname]]}")
    lines.append("}")
    return "\n".join(lines) + "\n"
