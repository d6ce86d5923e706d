"""Arrow proportions, analogical proportions and characteristic justifications.

All decisions work on a :class:`JustificationIndex`; formula sets are int
bit sets over the index, so subset tests are ``s & ~t == 0``.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from .enumeration import Bounds, FragmentSpec, JustificationIndex, build_index, index_from_formulas
from .structures import FiniteStructure, evaluate_term
from .syntax import App, Const, Eq, FormulaError, Var, X, Y, format_formula, is_c_term

ALL_TRIVIAL, MAXIMAL, BLOCKED = "allTrivial", "maximal", "blocked"


def _lowest(bits: int) -> int:
    return (bits & -bits).bit_length() - 1


def _indices(bits: int) -> tuple[int, ...]:
    out = []
    while bits:
        low = bits & -bits
        out.append(low.bit_length() - 1)
        bits ^= low
    return tuple(out)


@dataclass(frozen=True)
class Verdict:
    """Outcome of one arrow proportion ``a -> b :. c -> d``.

    ``blocking`` is ``(d_prime, formula_index)``: a target ``d_prime`` whose
    shared set strictly contains ours, with a formula it gains.  When no
    non-trivial justification is shared at all, ``d_prime`` is ``None`` and
    the formula is a non-trivial member of one side's type.
    """

    holds: bool
    mode: str
    shared: tuple[int, ...]
    blocking: tuple | None
    arrow: tuple
    index: JustificationIndex = field(repr=False, compare=False)

    @property
    def bounds(self) -> Bounds | None:
        return self.index.bounds

    def shared_formulas(self) -> list[str]:
        return [self.index.text(i) for i in self.shared]

    def to_json(self) -> dict:
        blocking = None
        if self.blocking is not None:
            d_prime, i = self.blocking
            blocking = {"dPrime": d_prime, "formula": self.index.text(i)}
        a, b, c, d = self.arrow
        return {
            "arrow": f"{a}->{b} :. {c}->{d}",
            "structures": [self.index.A.name or "A", self.index.B.name or "B"],
            "holds": self.holds,
            "mode": self.mode,
            "bounds": _bounds_json(self.index),
            "shared": self.shared_formulas(),
            "blocking": blocking,
        }


@dataclass(frozen=True)
class ProportionVerdict:
    """Conjunction of the four arrow verdicts of ``a:b::c:d``."""

    arrows: tuple[Verdict, ...]

    @property
    def holds(self) -> bool:
        return all(v.holds for v in self.arrows)

    @property
    def failing(self) -> Verdict | None:
        return next((v for v in self.arrows if not v.holds), None)

    @property
    def mode(self) -> str:
        bad = self.failing
        if bad is not None:
            return bad.mode
        return ALL_TRIVIAL if all(v.mode == ALL_TRIVIAL for v in self.arrows) else MAXIMAL

    @property
    def bounds(self):
        return self.arrows[0].bounds

    def __bool__(self):
        return self.holds

    def to_json(self) -> dict:
        first = self.arrows[0]
        bad = self.failing
        return {
            "holds": self.holds,
            "mode": self.mode,
            "bounds": _bounds_json(first.index),
            "shared": first.shared_formulas(),
            "blocking": bad.to_json()["blocking"] if bad else None,
            "arrows": [v.to_json() for v in self.arrows],
        }


def _bounds_json(idx: JustificationIndex) -> dict:
    frag = idx.fragment
    if frag.kind == "path":
        return {"fragment": "path", "max_path_length": frag.max_path_length}
    return {"fragment": frag.kind, **frag.bounds.as_dict()}


def arrow_holds(idx: JustificationIndex, a, b, c, d) -> Verdict:
    """Decide ``(A, B) |= a -> b :. c -> d`` over the index."""
    nt = idx.nontrivial
    left = idx.type_bits("A", a, b) & nt
    right = idx.type_bits("B", c, d) & nt
    arrow = (a, b, c, d)
    if not (left | right):
        return Verdict(True, ALL_TRIVIAL, (), None, arrow, idx)
    shared = left & right
    if not shared:
        return Verdict(False, BLOCKED, (), (None, _lowest(left | right)), arrow, idx)
    for d_prime in idx.B.universe:
        other = left & idx.type_bits("B", c, d_prime)
        if shared & ~other == 0 and other & ~shared:
            return Verdict(False, BLOCKED, _indices(shared),
                           (d_prime, _lowest(other & ~shared)), arrow, idx)
    return Verdict(True, MAXIMAL, _indices(shared), None, arrow, idx)


def proportion_holds(A: FiniteStructure, B: FiniteStructure | None, a, b, c, d,
                     frag: FragmentSpec | None = None, backend: str | None = None) -> ProportionVerdict:
    """Decide ``(A, B) |= a : b :: c : d`` as the conjunction of four arrows."""
    B = A if B is None else B
    idx = build_index(A, B, frag, backend)
    rev = idx.swapped()
    return ProportionVerdict((
        arrow_holds(idx, a, b, c, d),
        arrow_holds(idx, b, a, d, c),
        arrow_holds(rev, c, d, a, b),
        arrow_holds(rev, d, c, b, a),
    ))


def is_characteristic(idx: JustificationIndex, J, a, b, c, d) -> bool:
    """Whether the formula set ``J`` justifies the arrow and pins ``d``."""
    bits = sum(1 << i for i in J)
    left = idx.type_bits("A", a, b)
    if bits & ~(left & idx.type_bits("B", c, d)):
        return False
    for d_prime in idx.B.universe:
        if d_prime != d and bits & ~(left & idx.type_bits("B", c, d_prime)) == 0:
            return False
    return True


def swap_xy(t):
    """The term with the variables x and y exchanged."""
    if isinstance(t, Var):
        return Var({X: Y, Y: X}.get(t.name, t.name))
    if isinstance(t, App):
        return App(t.fn, tuple(swap_xy(s) for s in t.args))
    return t


def ept_check(A: FiniteStructure, t, a, b, c, d) -> bool:
    """Hypotheses of the first item of the equational proportion theorem.

    True iff ``t(a,b) = t(c,d)`` and ``t(c,d')`` differs for every other
    ``d'``.  In that case the parameter formula ``t(x,y) = @v`` is checked
    to be a characteristic justification.
    """
    if not is_c_term(t):
        raise FormulaError(f"{t} is not a term in both x and y")
    value = evaluate_term(A, t, {X: a, Y: b})
    if evaluate_term(A, t, {X: c, Y: d}) != value:
        return False
    for d_prime in A.universe:
        if d_prime != d and evaluate_term(A, t, {X: c, Y: d_prime}) == value:
            return False
    alpha = Eq(t, Const(f"@{value}"))
    idx = index_from_formulas(A, A, [alpha])
    if not is_characteristic(idx, {0}, a, b, c, d):
        raise RuntimeError(f"{format_formula(alpha)} should pin {d} but does not")
    return True


def ept_full_check(A: FiniteStructure, t_a, t_b, t_c, t_d, a, b, c, d) -> bool:
    """The four hypothesis lines of the second item, one per element.

    Each line is the first item applied to one of the four arrows of
    ``a:b::c:d`` (terms with swapped arguments for the reversed arrows).
    """
    return (ept_check(A, swap_xy(t_a), d, c, b, a)
            and ept_check(A, t_b, c, d, a, b)
            and ept_check(A, swap_xy(t_c), b, a, d, c)
            and ept_check(A, t_d, a, b, c, d))
