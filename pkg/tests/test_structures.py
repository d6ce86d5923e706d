import itertools

import pytest
from hypothesis import given
from hypothesis import strategies as st

from apfol.enumeration import Bounds, enumerate_cformulas, path_formula
from apfol.graphs import UndirectedGraph
from apfol.structures import (
    FiniteStructure, StructureError, UnknownElement, apply_bijection, evaluate_term, extension,
    find_isomorphisms, format_structure, is_isomorphism, parse_structures, respects, satisfies,
)
from apfol.syntax import FormulaError, Signature, parse_formula, parse_term

from conftest import SIG, formulas, structures
from oracles import naive_extension, naive_sat

F1 = Signature(functions=(("f", 1),))
PC = FiniteStructure.build("ab", {"f": (1, {"a": "b", "b": "b"})}, name="PC")
SWAP = FiniteStructure.build("cd", {"f": (1, {"c": "d", "d": "c"})}, name="Swap")


def test_evaluate_term_examples():
    assert evaluate_term(PC, parse_term("f(x)", F1), {"x": "a"}) == "b"
    C = FiniteStructure.build("ab", constants={"c": "a"})
    assert evaluate_term(C, parse_term("c", C.signature)) == "a"
    succ = FiniteStructure.build(range(6), {"S": (1, {i: min(i + 1, 5) for i in range(6)})})
    assert evaluate_term(succ, parse_term("S(S(x))", succ.signature), {"x": "1"}) == "3"


def test_satisfies_examples():
    assert satisfies(PC, parse_formula("f(x) = y", F1), {"x": "a", "y": "b"})
    three = FiniteStructure.build("123")
    assert not satisfies(three, parse_formula("x = y"), {"x": "1", "y": "2"})
    square = UndirectedGraph.build("1234", [("1", "2"), ("2", "3"), ("3", "4"), ("4", "1")]).to_structure()
    assert satisfies(square, path_formula(2), {"x": "1", "y": "3"})


def test_unassigned_variable():
    with pytest.raises(FormulaError):
        satisfies(PC, parse_formula("f(x) = y", F1), {"x": "a"})


def test_extension_examples():
    three = FiniteStructure.build("123")
    assert sorted(extension(three, parse_formula("x = y"))) == [(0, 0), (1, 1), (2, 2)]
    assert sorted(extension(PC, parse_formula("f(x) = y", F1))) == [(0, 1), (1, 1)]
    edgeless = UndirectedGraph.build("ab").to_structure()
    assert len(extension(edgeless, path_formula(1))) == 0


def test_extension_rank_error():
    with pytest.raises(FormulaError):
        extension(PC, parse_formula("forall z . x = z", F1))


def test_isomorphism_examples():
    assert len(find_isomorphisms(SWAP, SWAP)) == 2
    assert find_isomorphisms(PC, PC) == [{"a": "a", "b": "b"}]
    G0 = UndirectedGraph.build("pq").to_structure()
    G1 = UndirectedGraph.build("pq", [("p", "q")]).to_structure()
    assert find_isomorphisms(G0, G1) == []


def test_isomorphism_signature_mismatch():
    with pytest.raises(StructureError):
        find_isomorphisms(PC, FiniteStructure.build("ab"))


def test_respects_examples():
    f = parse_formula("f(x) = y", F1)
    assert respects({"a": "a", "b": "b"}, PC, PC, f)
    assert not respects({"a": "b", "b": "a"}, PC, PC, f)


def test_unknown_element():
    with pytest.raises(UnknownElement):
        PC.index("z")


def test_dsl_round_trip():
    text = """
    # comment
    structure A { universe: a b c
      function f/1 { (a) -> b, (b) -> b, (c) -> b }
      relation E/2 { (a,b), (b,c) }
      constant e = a }
    graph G { universe: p q
      relation E/2 { (p,q), (q,q) } }
    """
    found = parse_structures(text)
    assert set(found) == {"A", "G"}
    G = found["G"]
    assert G.graph and G.holds("E", 1, 0)
    again = parse_structures("".join(format_structure(S) for S in found.values()))
    for name, S in found.items():
        T = again[name]
        assert (T.universe, T.functions, T.relations, T.constants) == \
            (S.universe, S.functions, S.relations, S.constants)


@pytest.mark.parametrize("text", [
    "structure A { universe: }",
    "structure A { universe: a b function f/1 { (a) -> b } }",
    "structure A { universe: a relation E/2 { (a,z) } }",
    "structure A { universe: a function f/1 { (a) -> q } }",
])
def test_dsl_rejects_ill_formed(text):
    with pytest.raises(StructureError):
        parse_structures(text)


@given(structures(), formulas(depth=3))
def test_satisfies_matches_naive_evaluator(S, f):
    from apfol.syntax import free_variables
    fv = sorted(free_variables(f))
    for values in itertools.product(S.universe, repeat=len(fv)):
        env = dict(zip(fv, values))
        assert satisfies(S, f, env) == naive_sat(S, f, env)


@given(structures(max_size=5), formulas(depth=2))
def test_extension_pointwise(S, f):
    from apfol.syntax import free_variables
    if free_variables(f) != {"x", "y"}:
        return
    got = {(S.universe[a], S.universe[b]) for a, b in extension(S, f)}
    assert got == naive_extension(S, f)


@given(structures(sig=Signature(relations=(("R", 2),), functions=(("f", 1),))))
def test_identity_is_an_automorphism(S):
    isos = find_isomorphisms(S, S)
    assert {e: e for e in S.universe} in isos
    assert all(is_isomorphism(H, S, S) for H in isos)


@given(structures(max_size=4, sig=Signature(functions=(("f", 1),), relations=(("R", 2),))),
       st.randoms(use_true_random=False))
def test_isomorphisms_respect_cformulas(S, rnd):
    images = [f"p{i}" for i in range(S.size)]
    rnd.shuffle(images)
    B = apply_bijection(dict(zip(S.universe, images)), S)
    isos = find_isomorphisms(S, B)
    assert isos
    for f in enumerate_cformulas(S.signature, Bounds(2, 1, 1)):
        assert all(respects(H, S, B, f) for H in isos[:2])


def test_brute_force_isomorphism_count():
    # cross-check against trying every bijection
    S = FiniteStructure.build("abcd", {"f": (1, {"a": "b", "b": "a", "c": "d", "d": "c"})})
    brute = [dict(zip(S.universe, p)) for p in itertools.permutations(S.universe)
             if is_isomorphism(dict(zip(S.universe, p)), S, S)]
    assert sorted(map(sorted, (h.items() for h in find_isomorphisms(S, S)))) == \
        sorted(map(sorted, (h.items() for h in brute)))
    assert len(brute) == 8


def test_structure_invariants():
    with pytest.raises(StructureError):
        FiniteStructure.build([])
    with pytest.raises(StructureError):
        FiniteStructure.build("ab", {"f": (1, {"a": "b"})})  # not total


def test_signature_of_sig_fixture():
    assert SIG.function_arity == {"f": 1, "g": 2}
