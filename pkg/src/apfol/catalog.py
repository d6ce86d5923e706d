"""Counterexample structures for the properties that fail in general.

Each entry carries the claims that together refute one property (the
premises that hold and the conclusion that fails) and, for the c-formula
entries, the bounds at which all of them were found to reproduce by
:mod:`apfol.sweep`.
"""

from __future__ import annotations

import functools
from dataclasses import dataclass

from .engine import proportion_holds
from .enumeration import Bounds, FragmentSpec
from .graphs import UndirectedGraph, path_proportion_holds
from .structures import parse_structures

GENERAL_TEXT = """
# a -> a under f, c <-> d
structure SIR { universe: a c d
  function f/1 { (a) -> a, (c) -> d, (d) -> c } }

# single edge a - c, read as a relational structure
structure CP graph { universe: a b c d
  relation E/2 { (a,c) } }

structure SPR { universe: a b d }

structure PC { universe: a b
  function f/1 { (a) -> b, (b) -> b } }

structure PT { universe: a b c d e f
  function g/1 { (a) -> b, (b) -> b, (c) -> d, (d) -> d, (e) -> e, (f) -> f }
  function h/1 { (a) -> a, (b) -> b, (c) -> d, (d) -> d, (e) -> f, (f) -> f } }

structure IPT { universe: a b c d e f
  function g/1 { (a) -> e, (b) -> b, (c) -> c, (d) -> d, (e) -> e, (f) -> f } }

structure CPT { universe: a b c d
  function g/1 { (a) -> b, (b) -> c, (c) -> c, (d) -> d }
  function h/1 { (a) -> a, (b) -> c, (c) -> d, (d) -> d } }
"""

GRAPH_TEXT = """
graph G_CP { universe: a b c d
  relation E/2 { (a,c) } }

graph G_SIR { universe: a c d
  relation E/2 { (a,a), (c,d) } }

graph G_SPR { universe: a b d }

# s and t are the unnamed apexes of the two triangles / paths
graph G_PT { universe: a b c s d e t f
  relation E/2 { (a,b), (c,s), (s,d), (d,c), (e,t), (t,f) } }

graph G_IPT { universe: a b e c d f
  relation E/2 { (a,e) } }

graph G_CPT { universe: a b s c t d
  relation E/2 { (a,b), (b,s), (s,c), (c,b), (c,t), (t,d) } }

graph G_PM_F { universe: a b c d }

graph G_PM_G { universe: a b c d
  relation E/2 { (a,b) } }
"""


@dataclass(frozen=True)
class Claim:
    structures: tuple  # (A, B) structure names
    args: tuple  # (a, b, c, d)
    expected: bool

    def label(self) -> str:
        a, b, c, d = self.args
        rel = "::" if self.expected else "!::"
        pair = self.structures[0] if self.structures[0] == self.structures[1] else "/".join(self.structures)
        return f"{pair} |= {a}:{b} {rel} {c}:{d}"


@dataclass(frozen=True)
class CatalogEntry:
    name: str
    prop: str
    kind: str  # "cformula" or "path"
    claims: tuple
    bounds: Bounds | None = None
    source: str = ""
    note: str = ""


def _c(structure, args, expected, other=None):
    return Claim((structure, other or structure), tuple(args.split()), expected)


# Frozen by the bounds sweep (atoms 1..3, depth 1..2, quantifiers 0..2).  Entries
# that reproduce nowhere in the grid keep the default bounds and say why.
GENERAL = (
    CatalogEntry("general/strong-inner-p-reflexivity", "strong inner p-reflexivity", "cformula",
                 (_c("SIR", "a a c d", True),), Bounds(1, 1, 0), "general"),
    CatalogEntry("general/central-permutation", "central permutation", "cformula",
                 (_c("CP", "a b c d", True), _c("CP", "a c b d", False)), Bounds(1, 1, 0), "general"),
    CatalogEntry("general/strong-p-reflexivity", "strong p-reflexivity", "cformula",
                 (_c("SPR", "a b a d", True),), Bounds(1, 1, 0), "general"),
    CatalogEntry("general/p-commutativity", "p-commutativity", "cformula",
                 (_c("PC", "a b b a", False),), Bounds(1, 1, 0), "general"),
    CatalogEntry("general/p-transitivity", "p-transitivity", "cformula",
                 (_c("PT", "a b c d", True), _c("PT", "c d e f", True), _c("PT", "a b e f", False)),
                 Bounds(), "general",
                 "premises fail everywhere in the grid: (b,b) satisfies every equation, so "
                 "b->a :. d->c loses to d->c :. b->b"),
    CatalogEntry("general/inner-p-transitivity", "inner p-transitivity", "cformula",
                 (_c("IPT", "a b c d", True), _c("IPT", "b e d f", True), _c("IPT", "a e c f", False)),
                 Bounds(1, 1, 0), "general"),
    CatalogEntry("general/central-p-transitivity", "central p-transitivity", "cformula",
                 (_c("CPT", "a b b c", True), _c("CPT", "b c c d", True), _c("CPT", "a b c d", False)),
                 Bounds(), "general",
                 "b:c::c:d fails below atoms<=3,depth<=2,q<=2; there a:b::c:d holds as well"),
)

GRAPHS = (
    CatalogEntry("graphs/central-permutation", "central permutation", "path",
                 (_c("G_CP", "a b c d", True), _c("G_CP", "a c b d", False)), source="graphs"),
    CatalogEntry("graphs/strong-inner-p-reflexivity", "strong inner p-reflexivity", "path",
                 (_c("G_SIR", "a a c d", True),), source="graphs"),
    CatalogEntry("graphs/strong-p-reflexivity", "strong p-reflexivity", "path",
                 (_c("G_SPR", "a b a d", True),), source="graphs"),
    CatalogEntry("graphs/p-transitivity", "p-transitivity", "path",
                 (_c("G_PT", "a b c d", True), _c("G_PT", "c d e f", True), _c("G_PT", "a b e f", False)),
                 source="graphs"),
    CatalogEntry("graphs/inner-p-transitivity", "inner p-transitivity", "path",
                 (_c("G_IPT", "a b c d", True), _c("G_IPT", "b e d f", True), _c("G_IPT", "a e c f", False)),
                 source="graphs"),
    CatalogEntry("graphs/central-p-transitivity", "central p-transitivity", "path",
                 (_c("G_CPT", "a b b c", True), _c("G_CPT", "b c c d", True), _c("G_CPT", "a b c d", False)),
                 source="graphs",
                 note="b:c::c:d fails: the closed walk c-b-s-c makes c -- c beat c -- d"),
    CatalogEntry("graphs/p-monotonicity", "p-monotonicity", "path",
                 (_c("G_PM_F", "a b c d", True), _c("G_PM_G", "a b c d", False)), source="graphs"),
)

ENTRIES = GENERAL + GRAPHS


@functools.cache
def structures() -> dict:
    out = parse_structures(GENERAL_TEXT)
    out.update(parse_structures(GRAPH_TEXT))
    return out


def structure(name: str):
    return structures()[name]


def graph(name: str) -> UndirectedGraph:
    return UndirectedGraph.from_structure(structure(name))


def evaluate_claim(entry: CatalogEntry, claim: Claim, bounds: Bounds | None = None):
    """The engine's verdict for one claim (at ``bounds`` or the frozen ones)."""
    A, B = claim.structures
    if entry.kind == "path":
        return path_proportion_holds(graph(A), graph(B), *claim.args)
    frag = FragmentSpec("cformula", bounds or entry.bounds)
    return proportion_holds(structure(A), structure(B), *claim.args, frag)


def check_entry(entry: CatalogEntry, bounds: Bounds | None = None) -> list[tuple[Claim, bool]]:
    """``(claim, reproduced)`` for every claim of the entry."""
    return [(c, evaluate_claim(entry, c, bounds).holds == c.expected) for c in entry.claims]


def find(name: str) -> CatalogEntry:
    for e in ENTRIES:
        if e.name == name or e.name.endswith("/" + name):
            return e
    raise KeyError(name)
