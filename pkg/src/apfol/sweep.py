"""Search the bounds grid for the budgets at which catalog claims reproduce."""

from __future__ import annotations

import itertools
from dataclasses import dataclass

from .catalog import GENERAL, CatalogEntry, check_entry
from .enumeration import Bounds

ATOMS = (1, 2, 3)
DEPTHS = (1, 2)
QUANTIFIERS = (0, 1, 2)


def grid(atoms=ATOMS, depths=DEPTHS, quantifiers=QUANTIFIERS) -> list[Bounds]:
    """Bounds ordered by total budget, then quantifiers, atoms, depth."""
    out = [Bounds(a, d, q) for a, d, q in itertools.product(atoms, depths, quantifiers)]
    return sorted(out, key=lambda b: (b.max_atoms + b.max_term_depth + b.max_quantifiers,
                                      b.max_quantifiers, b.max_atoms, b.max_term_depth))


@dataclass(frozen=True)
class SweepRow:
    entry: str
    bounds: Bounds
    per_claim: tuple  # booleans, one per claim

    @property
    def reproduces(self) -> bool:
        return all(self.per_claim)


def sweep_entry(entry: CatalogEntry, bounds_list=None) -> list[SweepRow]:
    rows = []
    for b in bounds_list or grid():
        rows.append(SweepRow(entry.name, b, tuple(ok for _, ok in check_entry(entry, b))))
    return rows


def minimal_bounds(rows: list[SweepRow]) -> Bounds | None:
    return next((r.bounds for r in rows if r.reproduces), None)


def sweep(entries=GENERAL, bounds_list=None) -> dict[str, list[SweepRow]]:
    return {e.name: sweep_entry(e, bounds_list) for e in entries if e.kind == "cformula"}


def format_sweep(result: dict[str, list[SweepRow]]) -> str:
    lines = []
    for name, rows in result.items():
        best = minimal_bounds(rows)
        lines.append(f"{name}: minimal {best.label() if best else 'none in grid'}")
        for r in rows:
            marks = "".join("+" if ok else "-" for ok in r.per_claim)
            lines.append(f"  {r.bounds.label():40s} {marks}")
    return "\n".join(lines)
