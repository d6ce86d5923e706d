import itertools
import os
import random

import pytest
from hypothesis import HealthCheck, settings
from hypothesis import strategies as st

from apfol.graphs import UndirectedGraph
from apfol.structures import FiniteStructure
from apfol.syntax import And, App, Const, Eq, Exists, Forall, Not, Or, Rel, Signature, Var

settings.register_profile("default", max_examples=60, deadline=None,
                          suppress_health_check=[HealthCheck.too_slow])
settings.register_profile("thorough", max_examples=400, deadline=None,
                          suppress_health_check=[HealthCheck.too_slow])
settings.load_profile(os.environ.get("HYPOTHESIS_PROFILE", "default"))

SIG = Signature(relations=(("P", 1), ("R", 2)), functions=(("f", 1), ("g", 2)), constants=("c",))


@st.composite
def structures(draw, max_size=4, sig=SIG):
    n = draw(st.integers(1, max_size))
    u = [f"e{i}" for i in range(n)]
    pick = st.sampled_from(u)
    functions = {}
    for name, arity in sig.functions:
        keys = [tuple(k) for k in itertools.product(u, repeat=arity)]
        functions[name] = (arity, {k: draw(pick) for k in keys})
    relations = {}
    for name, arity in sig.relations:
        keys = [tuple(k) for k in itertools.product(u, repeat=arity)]
        relations[name] = (arity, [k for k in keys if draw(st.booleans())])
    constants = {c: draw(pick) for c in sig.constants}
    return FiniteStructure.build(u, functions, relations, constants, name="H")


def terms(variables, depth):
    leaves = st.sampled_from([Var(v) for v in variables] + [Const("c")])
    if depth == 0:
        return leaves
    sub = terms(variables, depth - 1)
    return st.one_of(leaves,
                     st.builds(lambda a: App("f", (a,)), sub),
                     st.builds(lambda a, b: App("g", (a, b)), sub, sub))


@st.composite
def formulas(draw, depth=3, free=("x", "y"), conjunctive=False, counter=None):
    """Well-formed formulas over SIG: quantified variables are fresh."""
    counter = counter if counter is not None else [0]
    scope = list(free)

    def go(d, scope):
        kinds = ["eq", "rel1", "rel2"]
        if d > 0:
            kinds += ["and", "exists", "forall"] + ([] if conjunctive else ["or", "not"])
        kind = draw(st.sampled_from(kinds))
        t = terms(scope, 1)
        if kind == "eq":
            return Eq(draw(t), draw(t))
        if kind == "rel1":
            return Rel("P", (draw(t),))
        if kind == "rel2":
            return Rel("R", (draw(t), draw(t)))
        if kind in ("and", "or"):
            cls = And if kind == "and" else Or
            return cls(go(d - 1, scope), go(d - 1, scope))
        if kind == "not":
            return Not(go(d - 1, scope))
        counter[0] += 1
        z = f"z{counter[0]}"
        cls = Exists if kind == "exists" else Forall
        return cls(z, go(d - 1, scope + [z]))

    return go(depth, scope)


@st.composite
def graphs(draw, max_vertices=6, loops=True):
    n = draw(st.integers(1, max_vertices))
    vs = [str(i) for i in range(n)]
    edges = [(vs[i], vs[j]) for i in range(n) for j in range(i if loops else i + 1, n)
             if draw(st.booleans())]
    return UndirectedGraph.build(vs, edges, name="G")


@pytest.fixture
def rng():
    return random.Random(12345)
