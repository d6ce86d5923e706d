import pytest
from hypothesis import given

from apfol.enumeration import path_formula
from apfol.syntax import (
    GRAPH_SIGNATURE, And, App, Eq, Exists, FormulaError, Rel, Signature, Var, dependency_graph,
    format_formula, free_variables, is_c_term, is_conjunctive, is_connected_formula,
    parse_formula, parse_term, rank,
)

from conftest import SIG, formulas

PRED = Signature(relations=(("P", 1), ("R", 1)))


def test_parse_path_formula():
    f = parse_formula("exists z1 . x E z1 & z1 E y", GRAPH_SIGNATURE)
    edge = lambda s, t: Rel("E", (Var(s), Var(t)))  # noqa: E731
    assert f == Exists("z1", And(edge("x", "z1"), edge("z1", "y")))
    assert f == path_formula(2)


def test_parse_equality():
    f = parse_formula("x = y")
    assert f == Eq(Var("x"), Var("y"))
    assert free_variables(f) == {"x", "y"}


def test_duplicate_quantified_variable_rejected():
    with pytest.raises(FormulaError, match="distinct"):
        parse_formula("forall x . P(x) & exists x . R(x)", PRED)


def test_quantified_variable_must_not_be_free():
    with pytest.raises(FormulaError):
        parse_formula("x = y & exists x . P(x)", PRED)


@pytest.mark.parametrize("text, message", [
    ("x = ", "position"),
    ("f(x) = y", "undeclared"),
    ("R(x, y)", "expects"),
])
def test_parse_errors(text, message):
    with pytest.raises(FormulaError, match=message):
        parse_formula(text, PRED)


def test_free_variables_examples():
    assert free_variables(parse_formula("x = y")) == {"x", "y"}
    assert free_variables(path_formula(2)) == {"x", "y"}
    assert free_variables(parse_formula("forall z . x = z")) == {"x"}
    assert rank(parse_formula("forall z . x = z")) == 1


def test_is_conjunctive_examples():
    assert is_conjunctive(path_formula(2))
    assert not is_conjunctive(parse_formula("x = y | x = x"))
    assert not is_conjunctive(parse_formula("!(x = y)"))


def test_dependency_graph_examples():
    g = dependency_graph(parse_formula("exists w . exists z . x = y & w = z"))
    assert sorted(map(sorted, g.components())) == [["w", "z"], ["x", "y"]]
    sig = Signature(functions=(("f", 1),))
    g = dependency_graph(parse_formula("f(x) = f(y)", sig))
    assert g.edges == {frozenset({"x", "y"})}
    g = dependency_graph(path_formula(2))
    assert g.edges == {frozenset({"x", "z1"}), frozenset({"z1", "y"})}


def test_dependency_graph_rejects_disjunction():
    with pytest.raises(FormulaError):
        dependency_graph(parse_formula("x = y | x = x"))


def test_connectedness_examples():
    sig = Signature(constants=("c",))
    assert not is_connected_formula(parse_formula("exists w . exists z . x = y & w = z"))
    assert is_connected_formula(parse_formula("x = y"))
    assert not is_connected_formula(parse_formula("x = c & y = c", sig))
    # constants as vertices (experimental flag) do connect the two atoms
    assert is_connected_formula(parse_formula("x = c & y = c", sig), include_constants=True)


def test_c_terms():
    sig = Signature(functions=(("g", 2),))
    assert is_c_term(parse_term("g(x, y)", sig))
    assert not is_c_term(parse_term("g(x, x)", sig))


def test_element_parameters_parse():
    sig = Signature(functions=(("add", 2),))
    f = parse_formula("add(x, y) = @3", sig)
    assert f.right.name == "@3"


def test_signature_invariants():
    with pytest.raises(FormulaError):
        Signature(relations=(("f", 1),), functions=(("f", 1),))
    with pytest.raises(FormulaError):
        Signature(functions=(("f", 0),))


@given(formulas())
def test_round_trip(f):
    assert parse_formula(format_formula(f), SIG) == f


@given(formulas(conjunctive=True))
def test_connected_implies_conjunctive_with_xy(f):
    if is_connected_formula(f):
        assert is_conjunctive(f)
        assert {"x", "y"} <= free_variables(f)


@given(formulas(conjunctive=True))
def test_dependency_vertices_are_the_variables(f):
    from apfol.syntax import all_variables
    assert dependency_graph(f).vertices == all_variables(f)


@pytest.mark.parametrize("n", range(7))
def test_path_formulas_are_connected(n):
    assert is_connected_formula(path_formula(n))


def test_app_arity_in_parser():
    sig = Signature(functions=(("g", 2),))
    assert parse_term("g(x, g(y, x))", sig) == App("g", (Var("x"), App("g", (Var("y"), Var("x")))))
