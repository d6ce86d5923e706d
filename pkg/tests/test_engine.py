import itertools
import json

import pytest
from hypothesis import given, settings

from apfol.engine import (
    ALL_TRIVIAL, BLOCKED, MAXIMAL, arrow_holds, ept_check, ept_full_check, is_characteristic,
    proportion_holds, swap_xy,
)
from apfol.enumeration import Bounds, FragmentSpec, build_index, enumerate_cformulas
from apfol.structures import FiniteStructure
from apfol.suites import cyclic_group
from apfol.syntax import App, FormulaError, Signature, Var, parse_term

from conftest import structures
from oracles import SetOracle, empty_signature_closed_form

F1 = Signature(functions=(("f", 1),))
F2 = Signature(functions=(("f", 1), ("g", 1)))
PC = FiniteStructure.build("ab", {"f": (1, {"a": "b", "b": "b"})}, name="PC")
THREE = FiniteStructure.build("123", name="Three")
Z5 = cyclic_group(5)
PLUS = App("add", (Var("x"), Var("y")))


def test_arrow_examples():
    idx = build_index(THREE, THREE)
    v = arrow_holds(idx, "1", "2", "2", "3")
    assert v.holds and v.mode == ALL_TRIVIAL
    v = arrow_holds(idx, "1", "1", "2", "3")
    assert not v.holds and v.mode == BLOCKED
    assert v.blocking[0] is None and idx.text(v.blocking[1]) == "x = y"
    for S in (THREE, PC):
        idx = build_index(S, S)
        for a, c in itertools.product(S.universe, repeat=2):
            v = arrow_holds(idx, a, a, c, c)
            assert v.holds
            if v.mode == MAXIMAL:
                assert "x = y" in v.shared_formulas()


def test_proportion_examples():
    assert proportion_holds(THREE, THREE, "1", "2", "2", "3").holds
    assert not proportion_holds(THREE, THREE, "1", "1", "2", "3").holds
    v = proportion_holds(PC, PC, "a", "b", "b", "a")
    assert not v.holds and v.mode == BLOCKED


def test_verdict_json_shape():
    v = proportion_holds(PC, PC, "a", "b", "b", "a")
    data = json.loads(json.dumps(v.to_json()))
    assert set(data) >= {"holds", "mode", "bounds", "shared", "blocking"}
    assert data["blocking"] == {"dPrime": None, "formula": "x = f(y)"}
    assert data["bounds"]["max_atoms"] == 2


def test_is_characteristic_examples():
    idx = build_index(THREE, THREE)
    eq = {next(i for i in range(len(idx)) if idx.text(i) == "x = y")}
    assert is_characteristic(idx, eq, "1", "1", "2", "2")
    assert not is_characteristic(idx, eq, "1", "1", "2", "3")
    assert not is_characteristic(idx, set(), "1", "2", "2", "3")


def test_ept_examples():
    assert ept_check(Z5, PLUS, "1", "2", "3", "0")
    assert not ept_check(Z5, PLUS, "1", "2", "3", "1")
    const = App("f", (Var("x"), Var("y")))
    K = FiniteStructure.build("01", {"f": (2, {(a, b): "0" for a in "01" for b in "01"})})
    assert not ept_check(K, const, "0", "1", "1", "0")


def test_ept_requires_c_term():
    with pytest.raises(FormulaError):
        ept_check(Z5, App("add", (Var("x"), Var("x"))), "1", "2", "3", "0")


def test_ept_full_examples():
    assert ept_full_check(Z5, PLUS, PLUS, PLUS, PLUS, "1", "2", "3", "0")
    frag = FragmentSpec("cformula", Bounds(1, 1, 0, element_parameters=True))
    assert proportion_holds(Z5, Z5, "1", "2", "3", "0", frag).holds
    assert not ept_full_check(Z5, PLUS, PLUS, PLUS, PLUS, "1", "2", "3", "1")
    assert ept_full_check(Z5, PLUS, PLUS, PLUS, PLUS, "2", "2", "2", "2")


def test_parameters_are_needed_for_z5():
    # without element names no single-atom formula separates 0 from the rest
    assert not proportion_holds(Z5, Z5, "1", "2", "3", "0", FragmentSpec("cformula", Bounds(1, 1, 0))).holds


def test_swap_xy():
    sig = Signature(functions=(("g", 2),))
    assert swap_xy(parse_term("g(x, g(y, x))", sig)) == parse_term("g(y, g(x, y))", sig)


def test_empty_signature_closed_form_exhaustive():
    for n in range(1, 5):
        A = FiniteStructure.build([str(i) for i in range(n)])
        for t in itertools.product(A.universe, repeat=4):
            assert proportion_holds(A, A, *t).holds == empty_signature_closed_form(*t)


@given(structures(max_size=3, sig=F1), structures(max_size=3, sig=F1))
def test_engine_matches_set_oracle(A, B):
    bounds = Bounds(2, 1, 1)
    formulas = enumerate_cformulas(F1, bounds)
    frag = FragmentSpec("cformula", bounds)
    oracle = SetOracle(A, B, formulas)
    for t in itertools.product(A.universe, A.universe, B.universe, B.universe):
        assert proportion_holds(A, B, *t, frag).holds == oracle.proportion(*t)


@given(structures(max_size=4, sig=F2))
def test_verdict_invariants(S):
    idx = build_index(S, S)
    for t in itertools.product(S.universe, repeat=4):
        v = arrow_holds(idx, *t)
        if v.mode == ALL_TRIVIAL:
            assert v.holds and not v.shared
        elif v.mode == BLOCKED:
            assert not v.holds and v.blocking is not None
        else:
            assert v.holds and v.shared


@given(structures(max_size=4, sig=F2), structures(max_size=3, sig=F2))
def test_positive_properties(A, B):
    U, V = A.universe, B.universe
    for a, b, c, d in itertools.product(U, U, V, V):
        v = proportion_holds(A, B, a, b, c, d).holds
        assert v == proportion_holds(B, A, c, d, a, b).holds
        assert v == proportion_holds(A, B, b, a, d, c).holds
    for a, c in itertools.product(U, V):
        assert proportion_holds(A, B, a, a, c, c).holds
    for a, b in itertools.product(U, U):
        assert proportion_holds(A, A, a, b, a, b).holds
    for a, d in itertools.product(U, U):
        assert proportion_holds(A, A, a, a, a, d).holds == (a == d)


@settings(max_examples=30)
@given(structures(max_size=3, sig=Signature(functions=(("add", 2),))))
def test_ept_soundness_random_algebras(S):
    frag = FragmentSpec("cformula", Bounds(1, 1, 0, element_parameters=True))
    idx = build_index(S, S, frag)
    for t in itertools.product(S.universe, repeat=4):
        if ept_check(S, PLUS, *t):
            assert arrow_holds(idx, *t).holds
        if ept_full_check(S, PLUS, PLUS, PLUS, PLUS, *t):
            assert proportion_holds(S, S, *t, frag).holds


def test_backends_agree_on_verdicts():
    from apfol import kernels
    if "cython" not in kernels.available():
        pytest.skip("compiled kernels not built")
    S = FiniteStructure.build("abc", {"f": (1, {"a": "b", "b": "c", "c": "c"}),
                                      "g": (1, {"a": "a", "b": "a", "c": "b"})})
    for t in itertools.product(S.universe, repeat=4):
        assert (proportion_holds(S, S, *t, backend="python").to_json()
                == proportion_holds(S, S, *t, backend="cython").to_json())
