"""Bounded enumeration of connected formulas and justification indices.

The engine never works with the full (infinite) set of connected formulas.
It works with the prenex conjunctive formulas

    Q1 z1 ... Qm zm . (A1 & ... & Ak)

within a :class:`Bounds` budget.  Two routes build the same index:

* the syntactic route lists every such formula (one representative per
  renaming / conjunct order) and evaluates each one;
* the semantic route (default) deduplicates terms, atoms and partial
  conjunctions on their extensions while tracking the connectivity of the
  dependency graph, then keeps one representative formula per distinct pair
  of extensions.

Both routes yield the same set of (extension in A, extension in B) pairs.
"""

from __future__ import annotations

import functools
import itertools
from dataclasses import dataclass, field, replace

import numpy as np

from . import kernels
from .structures import FiniteStructure, StructureError
from .syntax import (
    App,
    Const,
    Eq,
    Exists,
    Forall,
    Formula,
    Rel,
    Signature,
    Var,
    X,
    Y,
    atom_terms,
    atom_variables,
    atoms,
    conjunction,
    format_formula,
    is_connected_formula,
    term_constants,
    term_depth,
    term_variables,
)

KINDS = ("exists", "forall")


@dataclass(frozen=True)
class Bounds:
    max_atoms: int = 2
    max_term_depth: int = 2
    max_quantifiers: int = 1
    quantifier_kinds: tuple = KINDS
    allow_constants: bool = True
    # names for every element (``@e``); only meaningful when A is B
    element_parameters: bool = False

    def __post_init__(self):
        for name in ("max_atoms", "max_term_depth", "max_quantifiers"):
            if getattr(self, name) < 0:
                raise ValueError(f"{name} must be non-negative")
        kinds = tuple(k for k in KINDS if k in self.quantifier_kinds)
        if set(self.quantifier_kinds) - set(KINDS):
            raise ValueError(f"unknown quantifier kinds {self.quantifier_kinds}")
        object.__setattr__(self, "quantifier_kinds", kinds)

    def label(self) -> str:
        kinds = "".join(k[0].upper() for k in self.quantifier_kinds) or "-"
        extra = "+params" if self.element_parameters else ""
        consts = "" if self.allow_constants else ",noconst"
        return (f"atoms<={self.max_atoms},depth<={self.max_term_depth},"
                f"q<={self.max_quantifiers}[{kinds}]{consts}{extra}")

    def as_dict(self) -> dict:
        return {
            "max_atoms": self.max_atoms,
            "max_term_depth": self.max_term_depth,
            "max_quantifiers": self.max_quantifiers,
            "quantifier_kinds": list(self.quantifier_kinds),
            "allow_constants": self.allow_constants,
            "element_parameters": self.element_parameters,
        }


DEFAULT_BOUNDS = Bounds()


@dataclass(frozen=True)
class FragmentSpec:
    """Which justifications are admitted.

    ``kind`` is ``"cformula"`` (bounded connected formulas), ``"equational"``
    (single equations ``s = t``) or ``"path"`` (the path formulas
    ``pi_0 .. pi_max_path_length`` over graphs).
    """

    kind: str = "cformula"
    bounds: Bounds = DEFAULT_BOUNDS
    semantic_collapse: bool = True
    constant_vertices: bool = False
    max_path_length: int | None = None

    def __post_init__(self):
        if self.kind not in ("cformula", "equational", "path"):
            raise ValueError(f"unknown fragment kind {self.kind!r}")
        if self.kind == "equational":
            b = self.bounds
            if b.max_atoms != 1 or b.max_quantifiers != 0:
                object.__setattr__(self, "bounds", replace(b, max_atoms=1, max_quantifiers=0))

    def label(self) -> str:
        if self.kind == "path":
            return f"path<={self.max_path_length if self.max_path_length is not None else 'auto'}"
        return f"{self.kind}({self.bounds.label()})"


def cformula(**kw) -> FragmentSpec:
    return FragmentSpec("cformula", Bounds(**kw))


# -- syntactic enumeration -------------------------------------------------


def bound_names(m: int) -> list[str]:
    return [f"z{i}" for i in range(1, m + 1)]


def generate_terms(sig: Signature, variables, depth: int, constants=()) -> list:
    """All terms up to ``depth`` over ``variables`` and ``constants``,
    ordered by depth and then by construction."""
    levels = [[Var(v) for v in variables] + [Const(c) for c in constants]]
    pool = list(levels[0])
    for d in range(1, depth + 1):
        new = []
        older = len(pool) - len(levels[-1])
        for fname, arity in sig.functions:
            for args in itertools.product(range(len(pool)), repeat=arity):
                if max(args) < older:
                    continue
                new.append(App(fname, tuple(pool[i] for i in args)))
        levels.append(new)
        pool.extend(new)
    return pool


def _var_rank(t) -> float:
    vs = term_variables(t)
    if not vs:
        return float("inf")
    order = {X: 0, Y: 1}
    return min(order.get(v, 2 + int(v[1:] or 0)) for v in vs)


def _term_key(t):
    if isinstance(t, Var):
        return (0, t.name)
    if isinstance(t, Const):
        return (1, t.name)
    return (2, t.fn, tuple(_term_key(a) for a in t.args))


def make_eq(s, t) -> Eq:
    """Equation with a fixed orientation: the side mentioning the earlier
    variable first, then the shallower side."""
    ks = (_var_rank(s), term_depth(s), _term_key(s))
    kt = (_var_rank(t), term_depth(t), _term_key(t))
    return Eq(s, t) if ks <= kt else Eq(t, s)


def atom_key(a) -> tuple:
    if isinstance(a, Eq):
        return (0,) + tuple(sorted((_term_key(a.left), _term_key(a.right))))
    return (1, a.name, tuple(_term_key(t) for t in a.args))


def _rename_term(t, mapping):
    if isinstance(t, Var):
        return Var(mapping.get(t.name, t.name))
    if isinstance(t, App):
        return App(t.fn, tuple(_rename_term(a, mapping) for a in t.args))
    return t


def _rename_atom(a, mapping):
    if isinstance(a, Eq):
        return Eq(_rename_term(a.left, mapping), _rename_term(a.right, mapping))
    return Rel(a.name, tuple(_rename_term(t, mapping) for t in a.args))


def _run_permutations(prefix):
    """Renamings of z1..zm that only permute adjacent same-kind binders."""
    runs, start = [], 0
    for i in range(1, len(prefix) + 1):
        if i == len(prefix) or prefix[i] != prefix[start]:
            runs.append(list(range(start, i)))
            start = i
    for choice in itertools.product(*(itertools.permutations(r) for r in runs)):
        perm = [p for block in choice for p in block]
        yield {f"z{i + 1}": f"z{perm[i] + 1}" for i in range(len(prefix))}


def canonical_form(prefix, atom_list) -> tuple:
    """Canonical key of a prenex conjunction: quantifier kinds plus the
    smallest sorted atom multiset over admissible bound-variable renamings."""
    best = None
    for mapping in _run_permutations(prefix):
        key = tuple(sorted(atom_key(_rename_atom(a, mapping)) for a in atom_list))
        if best is None or key < best:
            best = key
    return (tuple(prefix), best)


def prenex(prefix, atom_list) -> Formula:
    body = conjunction(atom_list)
    for i in range(len(prefix), 0, -1):
        q = Exists if prefix[i - 1] == "exists" else Forall
        body = q(f"z{i}", body)
    return body


def _connected(vertex_sets, required: int) -> bool:
    parent = {}

    def find(u):
        while parent.setdefault(u, u) != u:
            parent[u] = parent[parent[u]]
            u = parent[u]
        return u

    present = 0
    for vs in vertex_sets:
        present |= vs
        bits = [i for i in range(vs.bit_length()) if vs >> i & 1]
        for b in bits:
            find(b)
        for b in bits[1:]:
            parent[find(b)] = find(bits[0])
    if present & required != required:
        return False
    roots = {find(i) for i in range(present.bit_length()) if present >> i & 1}
    return len(roots) == 1


def _atom_vertices(a, names: dict, constant_vertices: bool) -> int:
    bits = 0
    for v in atom_variables(a):
        bits |= 1 << names[v]
    if constant_vertices:
        for t in atom_terms(a):
            for c in term_constants(t):
                bits |= 1 << names.setdefault(c, len(names))
    return bits


def _constants_for(sig: Signature, bounds: Bounds, parameters=()) -> list[str]:
    out = list(sig.constants) if bounds.allow_constants else []
    if bounds.element_parameters:
        out += [f"@{e}" for e in parameters]
    return out


def _candidate_atoms(sig, variables, bounds, parameters, equational):
    terms = generate_terms(sig, variables, bounds.max_term_depth,
                           _constants_for(sig, bounds, parameters))
    out = []
    for i, s in enumerate(terms):
        for t in terms[i + 1:]:
            out.append(make_eq(s, t))
    if not equational:
        for rname, arity in sig.relations:
            for args in itertools.product(terms, repeat=arity):
                out.append(Rel(rname, args))
    return out


def enumerate_cformulas(sig: Signature, bounds: Bounds = DEFAULT_BOUNDS,
                        constant_vertices: bool = False, parameters=(),
                        equational: bool = False) -> list:
    """Every bounded prenex connected formula, one per canonical form.

    Order: number of quantifiers, then number of atoms, then atom
    combination order, then quantifier prefix.
    """
    out = []
    for m in range(bounds.max_quantifiers + 1):
        if m and not bounds.quantifier_kinds:
            break
        variables = [X, Y] + bound_names(m)
        names = {v: i for i, v in enumerate(variables)}
        required = (1 << len(variables)) - 1
        cands = _candidate_atoms(sig, variables, bounds, parameters, equational)
        vsets = [_atom_vertices(a, dict(names), constant_vertices) for a in cands]
        if constant_vertices:
            shared = dict(names)
            vsets = [_atom_vertices(a, shared, True) for a in cands]
        for k in range(1, bounds.max_atoms + 1):
            for combo in itertools.combinations(range(len(cands)), k):
                if not _connected([vsets[i] for i in combo], required):
                    continue
                chosen = [cands[i] for i in combo]
                for prefix in itertools.product(bounds.quantifier_kinds, repeat=m):
                    own = (tuple(prefix), tuple(sorted(atom_key(a) for a in chosen)))
                    if m > 1 and canonical_form(prefix, chosen) != own:
                        continue
                    out.append(prenex(prefix, chosen))
    return out


# -- extensions of prenex formulas (direct numpy route) ---------------------


def _split_prenex(f: Formula):
    prefix, names = [], []
    while isinstance(f, (Exists, Forall)):
        prefix.append(isinstance(f, Exists))
        names.append(f.var)
        f = f.body
    return prefix, names, list(atoms(f))


def prenex_extension(S: FiniteStructure, f: Formula) -> int:
    """Extension bits of a prenex conjunctive 2-formula, via numpy arrays
    indexed by the variables ``x, y, z1, ...``."""
    prefix, names, atom_list = _split_prenex(f)
    variables = [X, Y] + names
    v, n = len(variables), S.size
    grids = np.indices((n,) * v)
    env = {name: grids[i] for i, name in enumerate(variables)}

    def value(t):
        if isinstance(t, Var):
            return env[t.name]
        if isinstance(t, Const):
            return np.full((n,) * v, S.constant_index(t.name))
        return S.function_array(t.fn)[tuple(value(a) for a in t.args)]

    acc = np.ones((n,) * v, dtype=bool)
    for a in atom_list:
        if isinstance(a, Eq):
            acc &= value(a.left) == value(a.right)
        else:
            acc &= S.relation_array(a.name)[tuple(value(t) for t in a.args)]
    for axis in range(v - 1, 1, -1):
        acc = acc.any(axis=axis) if prefix[axis - 2] else acc.all(axis=axis)
    return _pack(acc.flatten(order="F"))


def _pack(arr) -> int:
    return int.from_bytes(np.packbits(np.asarray(arr, dtype=bool), bitorder="little").tobytes(), "little")


# -- semantic route --------------------------------------------------------


class _TermPool:
    """Terms over ``v`` variables deduplicated on (vertices, table in A,
    table in B).  Dropped duplicates of a kept term with several vertices
    are remembered as tautological equations."""

    def __init__(self, structs, v, constant_vertex_ids):
        self.structs = structs
        self.v = v
        self.cv = constant_vertex_ids
        self.terms, self.tables, self.vertices = [], [], []
        self.keys = {}
        self.tautologies = []

    def add(self, term, tables, vertices):
        key = (vertices,) + tuple(t.tobytes() for t in tables)
        kept = self.keys.get(key)
        if kept is not None:
            if bin(vertices).count("1") >= 2:
                self.tautologies.append((make_eq(self.terms[kept], term), vertices))
            return False
        self.keys[key] = len(self.terms)
        self.terms.append(term)
        self.tables.append(tables)
        self.vertices.append(vertices)
        return True


def _partition_merge(part: tuple, bits: int) -> tuple:
    if not bits:
        return part
    touched = bits
    rest = []
    for comp in part:
        if comp & bits:
            touched |= comp
        else:
            rest.append(comp)
    return tuple(sorted(rest + [touched]))


def _partition_table(classes):
    """Partitions reachable from the empty one by adding vertex classes,
    with the transition table ``trans[p][c]``."""
    ids = {(): 0}
    order = [()]
    trans = []
    i = 0
    while i < len(order):
        part = order[i]
        row = []
        for bits in classes:
            nxt = _partition_merge(part, bits)
            if nxt not in ids:
                ids[nxt] = len(order)
                order.append(nxt)
            row.append(ids[nxt])
        trans.append(row)
        i += 1
    return order, trans


def _semantic_entries(A, B, sig, bounds, constant_vertices, equational, backend):
    structs = (A, B)
    params = A.universe if bounds.element_parameters else ()
    constants = _constants_for(sig, bounds, params)
    results = []  # (formula, ext_a, ext_b)
    seen = set()
    for m in range(bounds.max_quantifiers + 1):
        if m and not bounds.quantifier_kinds:
            break
        v = 2 + m
        variables = [X, Y] + bound_names(m)
        cids = {c: v + i for i, c in enumerate(constants)} if constant_vertices else {}
        pool = _TermPool(structs, v, cids)
        grids = [np.indices((S.size,) * v).reshape(v, -1, order="F") for S in structs]
        for i, name in enumerate(variables):
            pool.add(Var(name), tuple(g[i] for g in grids), 1 << i)
        for c in constants:
            tabs = tuple(np.full(S.size ** v, S.constant_index(c)) for S in structs)
            pool.add(Const(c), tabs, (1 << cids[c]) if c in cids else 0)
        level_start = 0
        for _ in range(bounds.max_term_depth):
            size = len(pool.terms)
            for fname, arity in sig.functions:
                for args in itertools.product(range(size), repeat=arity):
                    if max(args) < level_start:
                        continue
                    tabs = tuple(S.function_array(fname)[tuple(pool.tables[i][k] for i in args)]
                                 for k, S in enumerate(structs))
                    vert = 0
                    for i in args:
                        vert |= pool.vertices[i]
                    pool.add(App(fname, tuple(pool.terms[i] for i in args)), tabs, vert)
            level_start = size
        atom_rows = []  # (atom, vertices, mask_a, mask_b)
        atom_keys = {}

        def add_atom(atom, vert, ma, mb):
            key = (vert, ma, mb)
            if key not in atom_keys:
                atom_keys[key] = len(atom_rows)
                atom_rows.append((atom, vert, ma, mb))

        full = [(1 << S.size ** v) - 1 for S in structs]
        T = len(pool.terms)
        for i in range(T):
            for j in range(i + 1, T):
                ma = _pack(pool.tables[i][0] == pool.tables[j][0])
                mb = _pack(pool.tables[i][1] == pool.tables[j][1])
                add_atom(make_eq(pool.terms[i], pool.terms[j]),
                         pool.vertices[i] | pool.vertices[j], ma, mb)
        for atom, vert in pool.tautologies:
            add_atom(atom, vert, full[0], full[1])
        if not equational:
            for rname, arity in sig.relations:
                arrs = [S.relation_array(rname) for S in structs]
                for args in itertools.product(range(T), repeat=arity):
                    vert = 0
                    for i in args:
                        vert |= pool.vertices[i]
                    ma = _pack(arrs[0][tuple(pool.tables[i][0] for i in args)])
                    mb = _pack(arrs[1][tuple(pool.tables[i][1] for i in args)])
                    add_atom(Rel(rname, tuple(pool.terms[i] for i in args)), vert, ma, mb)
        if not atom_rows:
            continue
        classes = sorted({row[1] for row in atom_rows})
        class_id = {c: i for i, c in enumerate(classes)}
        parts, trans = _partition_table(classes)
        masks_a, masks_b, state_parts, reps = backend.closure(
            [r[2] for r in atom_rows], [r[3] for r in atom_rows],
            [class_id[r[1]] for r in atom_rows], trans, 0, bounds.max_atoms)
        var_mask = (1 << v) - 1
        accept = {i for i, p in enumerate(parts)
                  if len(p) == 1 and p[0] & var_mask == var_mask}
        selected = [s for s, p in enumerate(state_parts) if p in accept]
        prefixes = list(itertools.product(bounds.quantifier_kinds, repeat=m))
        flags = [tuple(k == "exists" for k in p) for p in prefixes]
        projected = backend.project_states(masks_a, masks_b, selected,
                                           A.size, B.size, v, flags)
        # order by state discovery (fewer atoms first), then prefix
        projected.sort(key=lambda r: (r[1], r[0]))
        for pid, s, ea, eb in projected:
            if (ea, eb) in seen:
                continue
            seen.add((ea, eb))
            formula = prenex(prefixes[pid], [atom_rows[j][0] for j in reps[s]])
            results.append((formula, ea, eb))
    return results


def _path_entries(A, B, max_len):
    for S in (A, B):
        if not S.signature.is_graph():
            raise StructureError("path formulas need graph structures (a single relation E/2)")
    if max_len is None:
        max_len = 2 * max(A.size, B.size) + 2
    out = []
    seen = set()
    reach = [np.eye(S.size, dtype=bool) for S in (A, B)]
    adj = [S.relation_array("E") for S in (A, B)]
    for k in range(max_len + 1):
        if k:
            reach = [(r.astype(np.int64) @ e.astype(np.int64)) > 0 for r, e in zip(reach, adj)]
        ea, eb = (_pack(r.flatten(order="F")) for r in reach)
        if (ea, eb) not in seen:
            seen.add((ea, eb))
            out.append((path_formula(k), ea, eb))
    return out


def path_formula(n: int) -> Formula:
    """The formula stating that a walk of length ``n`` joins x and y."""
    E = lambda s, t: Rel("E", (Var(s), Var(t)))  # noqa: E731
    if n == 0:
        return Eq(Var(X), Var(Y))
    if n == 1:
        return E(X, Y)
    zs = bound_names(n - 1)
    chain = [X] + zs + [Y]
    body = conjunction(E(chain[i], chain[i + 1]) for i in range(n))
    for z in reversed(zs):
        body = Exists(z, body)
    return body


# -- the index -------------------------------------------------------------


class JustificationIndex:
    """Candidate justifications with their extensions in A and in B.

    ``type_bits(side, a, b)`` is the set of formulas (as a bit set over
    formula indices) satisfied by the pair; ``nontrivial`` masks out the
    formulas satisfied by every pair of both structures.
    """

    def __init__(self, A, B, fragment, formulas, ext_a, ext_b):
        self.A, self.B = A, B
        self.fragment = fragment
        self.formulas = list(formulas)
        self.ext_a = list(ext_a)
        self.ext_b = list(ext_b)
        full_a = (1 << A.size ** 2) - 1
        full_b = (1 << B.size ** 2) - 1
        self.trivial = [ea == full_a and eb == full_b for ea, eb in zip(self.ext_a, self.ext_b)]
        self.nontrivial = sum(1 << i for i, t in enumerate(self.trivial) if not t)
        self._types_a = _pair_types(self.ext_a, A.size)
        self._types_b = _pair_types(self.ext_b, B.size)

    @property
    def bounds(self):
        return self.fragment.bounds if self.fragment.kind != "path" else None

    def __len__(self):
        return len(self.formulas)

    def structure(self, side: str) -> FiniteStructure:
        return self.A if side == "A" else self.B

    def type_bits(self, side: str, a, b) -> int:
        S = self.structure(side)
        i, j = S.index(a), S.index(b)
        types = self._types_a if side == "A" else self._types_b
        return types[i + S.size * j]

    def justification_type(self, side: str, a, b) -> set[int]:
        return bits_to_set(self.type_bits(side, a, b))

    def swapped(self) -> "JustificationIndex":
        other = object.__new__(JustificationIndex)
        other.A, other.B = self.B, self.A
        other.fragment = self.fragment
        other.formulas = self.formulas
        other.ext_a, other.ext_b = self.ext_b, self.ext_a
        other.trivial = self.trivial
        other.nontrivial = self.nontrivial
        other._types_a, other._types_b = self._types_b, self._types_a
        return other

    def text(self, i: int) -> str:
        return format_formula(self.formulas[i])

    def __repr__(self):
        return (f"JustificationIndex({self.A.name or 'A'}, {self.B.name or 'B'}, "
                f"{self.fragment.label()}, {len(self)} formulas)")


def bits_to_set(bits: int) -> set[int]:
    out = set()
    i = 0
    while bits:
        if bits & 1:
            out.add(i)
        bits >>= 1
        i += 1
    return out


def _pair_types(exts, n) -> list[int]:
    pairs = n * n
    if not exts:
        return [0] * pairs
    nbytes = (pairs + 7) // 8
    raw = b"".join(e.to_bytes(nbytes, "little") for e in exts)
    mat = np.unpackbits(np.frombuffer(raw, dtype=np.uint8).reshape(len(exts), nbytes),
                        axis=1, bitorder="little")[:, :pairs]
    return [_pack(mat[:, p]) for p in range(pairs)]


def _check_pair(A, B, frag):
    if A.signature != B.signature:
        raise StructureError("the two structures must share a signature")
    if frag.bounds.element_parameters and A is not B and frag.kind != "path":
        raise StructureError("element parameters are only legal when both structures coincide")


@functools.lru_cache(maxsize=256)
def _cached_index(A, B, frag, backend_name):
    _check_pair(A, B, frag)
    if frag.kind == "path":
        entries = _path_entries(A, B, frag.max_path_length)
    elif frag.semantic_collapse:
        entries = _semantic_entries(A, B, A.signature, frag.bounds, frag.constant_vertices,
                                    frag.kind == "equational", kernels.load(backend_name))
    else:
        formulas = enumerate_cformulas(A.signature, frag.bounds, frag.constant_vertices,
                                       A.universe, frag.kind == "equational")
        entries = [(f, prenex_extension(A, f), prenex_extension(B, f)) for f in formulas]
    return JustificationIndex(A, B, frag, [e[0] for e in entries],
                              [e[1] for e in entries], [e[2] for e in entries])


def build_index(A: FiniteStructure, B: FiniteStructure | None = None,
                frag: FragmentSpec | None = None, backend: str | None = None) -> JustificationIndex:
    """Index of candidate justifications for the pair of structures (A, B)."""
    B = A if B is None else B
    frag = frag or FragmentSpec()
    return _cached_index(A, B, frag, backend or kernels.BACKEND)


def index_from_formulas(A, B, formulas, fragment=None) -> JustificationIndex:
    """An index over an explicit list of 2-formulas (evaluated directly)."""
    from .structures import extension

    fragment = fragment or FragmentSpec()
    return JustificationIndex(A, B, fragment, formulas,
                              [extension(A, f).bits for f in formulas],
                              [extension(B, f).bits for f in formulas])


def justification_type(idx: JustificationIndex, side: str, a, b) -> set[int]:
    return idx.justification_type(side, a, b)


def is_valid_cformula(f: Formula, bounds: Bounds, constant_vertices: bool = False) -> bool:
    """Every emitted formula must pass this (used by the test-suite)."""
    prefix, names, atom_list = _split_prenex(f)
    if len(prefix) > bounds.max_quantifiers or len(atom_list) > bounds.max_atoms:
        return False
    for a in atom_list:
        if any(term_depth(t) > bounds.max_term_depth for t in atom_terms(a)):
            return False
    return is_connected_formula(f, constant_vertices)
