"""Independent reference implementations used only by the tests.

Nothing here imports the decision code under test: evaluation works on
element names and Python sets, walks are found by layered reachability,
and arrow proportions are decided by set comprehension over explicit
formula lists.
"""

import itertools

from apfol.syntax import And, Const, Eq, Exists, Forall, Not, Or, Rel, Var


def naive_value(S, t, env):
    if isinstance(t, Var):
        return env[t.name]
    if isinstance(t, Const):
        if t.name.startswith("@"):
            return t.name[1:]
        return S.universe[S.constants[t.name]]
    args = tuple(naive_value(S, a, env) for a in t.args)
    table = {tuple(S.universe[i] for i in k): S.universe[v] for k, v in S.functions[t.fn].items()}
    return table[args]


def naive_sat(S, f, env):
    if isinstance(f, Eq):
        return naive_value(S, f.left, env) == naive_value(S, f.right, env)
    if isinstance(f, Rel):
        tuples = {tuple(S.universe[i] for i in t) for t in S.relations.get(f.name, ())}
        return tuple(naive_value(S, a, env) for a in f.args) in tuples
    if isinstance(f, And):
        return naive_sat(S, f.left, env) and naive_sat(S, f.right, env)
    if isinstance(f, Or):
        return naive_sat(S, f.left, env) or naive_sat(S, f.right, env)
    if isinstance(f, Not):
        return not naive_sat(S, f.body, env)
    if isinstance(f, Exists):
        return any(naive_sat(S, f.body, {**env, f.var: e}) for e in S.universe)
    if isinstance(f, Forall):
        return all(naive_sat(S, f.body, {**env, f.var: e}) for e in S.universe)
    raise TypeError(f)


def naive_extension(S, f):
    return {(a, b) for a in S.universe for b in S.universe if naive_sat(S, f, {"x": a, "y": b})}


def walks_upto(vertices, edges, a, b, upto):
    """Lengths n <= upto of walks a -> b, by layered reachability."""
    nbrs = {v: set() for v in vertices}
    for e in edges:
        u, w = (tuple(e) * 2)[:2]
        nbrs[u].add(w)
        nbrs[w].add(u)
    layer, out = {a}, set()
    for n in range(upto + 1):
        if b in layer:
            out.add(n)
        layer = set().union(*(nbrs[v] for v in layer)) if layer else set()
    return out


def set_arrow(type_a, type_b, trivial, c, d, universe_b):
    """Arrow decision over explicit justification sets.

    ``type_a`` is the set of formulas true of (a, b) in A, ``type_b(c, e)``
    returns the set true of (c, e) in B, ``trivial`` the trivial formulas.
    """
    left = type_a - trivial
    right = type_b(c, d) - trivial
    if not (left | right):
        return True
    shared = left & right
    if not shared:
        return False
    for e in universe_b:
        other = left & (type_b(c, e) - trivial)
        if shared <= other and not other <= shared:
            return False
    return True


class SetOracle:
    """``a:b::c:d`` by the four-arrow definition over an explicit formula list."""

    def __init__(self, A, B, formulas):
        self.A, self.B = A, B
        self.ext = [(naive_extension(A, f), naive_extension(B, f)) for f in formulas]
        full_a = set(itertools.product(A.universe, repeat=2))
        full_b = set(itertools.product(B.universe, repeat=2))
        self.trivial = {i for i, (ea, eb) in enumerate(self.ext) if ea == full_a and eb == full_b}

    def typ(self, side, p, q):
        return {i for i, e in enumerate(self.ext) if (p, q) in e[side]}

    def arrow(self, s1, p, q, r, t):
        s2 = 1 - s1
        universe = (self.A, self.B)[s2].universe
        return set_arrow(self.typ(s1, p, q), lambda u, v: self.typ(s2, u, v), self.trivial,
                         r, t, universe)

    def proportion(self, a, b, c, d):
        return (self.arrow(0, a, b, c, d) and self.arrow(0, b, a, d, c)
                and self.arrow(1, c, d, a, b) and self.arrow(1, d, c, b, a))


def hand_single_atoms(functions, depth):
    """All single equations between terms over unary ``functions`` up to
    ``depth`` whose two sides together mention x and y, as strings."""
    def terms(var):
        out = [var]
        layer = [var]
        for _ in range(depth):
            layer = [f"{f}({t})" for f in functions for t in layer]
            out += layer
        return out

    xs, ys = terms("x"), terms("y")
    return {f"{s} = {t}" for s in xs for t in ys}


def empty_signature_closed_form(a, b, c, d):
    return (a == b) == (c == d)
