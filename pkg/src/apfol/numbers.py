"""Equational justifications in the successor structure (N, S).

Every equation between c-terms has the shape ``S^k(x) = S^l(y)``, which
holds of ``(a, b)`` iff ``a + k = b + l``.  The set of such equations true of
an arrow ``a -> b`` therefore depends only on ``delta = b - a``.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import NamedTuple


@dataclass(frozen=True)
class EJustDescriptor:
    """All ``S^k(x) = S^l(y)`` with ``k - l = delta``."""

    delta: int

    def witness(self, m: int = 0) -> tuple[int, int]:
        """The ``m``-th member as ``(k, l)``."""
        if m < 0:
            raise ValueError("m must be non-negative")
        return (self.delta + m, m) if self.delta >= 0 else (m, m - self.delta)

    def formula(self, m: int = 0) -> str:
        k, l = self.witness(m)
        return f"{_power(k, 'x')} = {_power(l, 'y')}"

    def __contains__(self, kl) -> bool:
        return e_member(self, *kl)


def _power(k: int, v: str) -> str:
    return f"S^{k}({v})" if k > 1 else ("S(" + v + ")" if k == 1 else v)


def _check(*xs):
    for x in xs:
        if x < 0:
            raise ValueError(f"{x} is not a natural number")


def e_type(a: int, b: int) -> EJustDescriptor:
    _check(a, b)
    return EJustDescriptor(b - a)


def e_member(desc: EJustDescriptor, k: int, l: int) -> bool:
    _check(k, l)
    return k - l == desc.delta


def e_shared(a: int, b: int, c: int, d: int) -> EJustDescriptor | None:
    """Equations justifying both ``a -> b`` and ``c -> d`` (``None`` if none)."""
    _check(a, b, c, d)
    # types are equal iff their deltas are
    return EJustDescriptor(b - a) if b - a == d - c else None


class EArrowVerdict(NamedTuple):
    holds: bool
    shared: EJustDescriptor | None
    arrow: tuple

    def to_json(self) -> dict:
        a, b, c, d = self.arrow
        return {
            "arrow": f"{a}->{b} :. {c}->{d}",
            "holds": self.holds,
            "mode": "maximal" if self.holds else "blocked",
            "shared": None if self.shared is None else
            {"delta": self.shared.delta, "family": [self.shared.formula(m) for m in range(3)]},
        }


def e_arrow(a: int, b: int, c: int, d: int) -> EArrowVerdict:
    """Decide the arrow by the maximality condition on descriptors.

    No equation holds of every pair, so nothing is trivial, and every type is
    non-empty, so the arrow needs a shared equation.  A shared equation
    ``S^k(x) = S^l(y)`` holds of ``(c, d')`` only for ``d' = c + k - l = d``,
    so a non-empty shared set is always maximal.
    """
    shared = e_shared(a, b, c, d)
    return EArrowVerdict(shared is not None, shared, (a, b, c, d))


def e_proportion_verdict(a: int, b: int, c: int, d: int) -> tuple[EArrowVerdict, ...]:
    return (e_arrow(a, b, c, d), e_arrow(b, a, d, c), e_arrow(c, d, a, b), e_arrow(d, c, b, a))


def e_proportion(a: int, b: int, c: int, d: int) -> bool:
    """``(N, S) |=_e a:b::c:d``, i.e. the difference proportion."""
    _check(a, b, c, d)
    return a - b == c - d


def unique_target(c: int, k: int, l: int) -> int | None:
    """The only ``d'`` with ``c + k = l + d'`` (``None`` if negative)."""
    d = c + k - l
    return d if d >= 0 else None
