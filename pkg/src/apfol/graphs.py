"""Path justifications over undirected graphs.

The path type of a pair of vertices is identified with its set of walk
lengths.  Positive walk lengths are closed under adding 2 (walk back and
forth over the last edge), so each set is described by three numbers; see
:class:`WalkLengthSet`.  Everything here is exact, including the infinite ray
graph ``G_N`` on the natural numbers, which is handled symbolically.
"""

from __future__ import annotations

import functools
import math
from collections import deque
from dataclasses import dataclass

import numpy as np

from .structures import FiniteStructure, StructureError, UnknownElement

INF = math.inf

BOTH_DISCONNECTED, MAXIMAL, BLOCKED = "bothDisconnected", "maximal", "blocked"


# -- graphs ----------------------------------------------------------------


@dataclass(frozen=True)
class UndirectedGraph:
    vertices: tuple
    edges: frozenset  # of frozensets with one (loop) or two vertices
    name: str = ""

    def __post_init__(self):
        vs = set(self.vertices)
        if len(vs) != len(self.vertices):
            raise StructureError("duplicate vertex")
        for e in self.edges:
            if not 1 <= len(e) <= 2 or not e <= vs:
                raise StructureError(f"bad edge {set(e)}")

    @classmethod
    def build(cls, vertices, edges=(), name: str = "") -> "UndirectedGraph":
        vertices = tuple(str(v) for v in vertices)
        return cls(vertices, frozenset(frozenset(map(str, e)) for e in edges), name)

    @classmethod
    def from_structure(cls, S: FiniteStructure) -> "UndirectedGraph":
        if not S.signature.is_graph():
            raise StructureError(f"{S.name or 'structure'} is not a graph")
        edges = {frozenset((S.universe[i], S.universe[j])) for i, j in S.relations["E"]}
        return cls(S.universe, frozenset(edges), S.name)

    def to_structure(self) -> FiniteStructure:
        pairs = [tuple(e) * (2 if len(e) == 1 else 1) for e in self.edges]
        return FiniteStructure.build(self.vertices, relations={"E": (2, pairs)},
                                     name=self.name, graph=True)

    @functools.cached_property
    def _index(self) -> dict:
        return {v: i for i, v in enumerate(self.vertices)}

    def index(self, v) -> int:
        try:
            return self._index[str(v)]
        except KeyError:
            raise UnknownElement(f"unknown vertex {v!r}") from None

    @functools.cached_property
    def neighbours(self) -> tuple:
        out = [[] for _ in self.vertices]
        for e in self.edges:
            u, w = (tuple(e) * 2)[:2]
            i, j = self.index(u), self.index(w)
            out[i].append(j)
            if i != j:
                out[j].append(i)
        return tuple(tuple(sorted(n)) for n in out)

    def adjacency(self) -> np.ndarray:
        n = len(self.vertices)
        adj = np.zeros((n, n), dtype=bool)
        for i, ns in enumerate(self.neighbours):
            adj[i, list(ns)] = True
        return adj


# -- walk-length sets -------------------------------------------------------


@dataclass(frozen=True)
class WalkLengthSet:
    """``{0 if self_zero} | {even n >= min_even} | {odd n >= min_odd}``.

    ``min_even`` counts positive lengths only and is even or ``inf``;
    ``min_odd`` is odd or ``inf``.
    """

    self_zero: bool
    min_even: float = INF
    min_odd: float = INF

    def __post_init__(self):
        if self.min_even != INF and (self.min_even < 2 or self.min_even % 2):
            raise ValueError(f"min_even must be a positive even number, got {self.min_even}")
        if self.min_odd != INF and self.min_odd % 2 != 1:
            raise ValueError(f"min_odd must be odd, got {self.min_odd}")

    def __contains__(self, n: int) -> bool:
        if n == 0:
            return self.self_zero
        return n >= (self.min_odd if n % 2 else self.min_even)

    def is_empty(self) -> bool:
        return not self.self_zero and self.min_even == INF and self.min_odd == INF

    def members(self, upto: int) -> list[int]:
        return [n for n in range(upto + 1) if n in self]

    def minimum(self) -> float:
        if self.self_zero:
            return 0
        return min(self.min_even, self.min_odd)

    def positive(self) -> "WalkLengthSet":
        return WalkLengthSet(False, self.min_even, self.min_odd)

    def to_json(self) -> dict:
        def num(v):
            return None if v == INF else int(v)
        return {"zero": self.self_zero, "minEven": num(self.min_even), "minOdd": num(self.min_odd)}

    def __str__(self):
        parts = ["0"] if self.self_zero else []
        if self.min_even != INF:
            parts.append(f"even>={int(self.min_even)}")
        if self.min_odd != INF:
            parts.append(f"odd>={int(self.min_odd)}")
        return "{" + ", ".join(parts) + "}"


EMPTY = WalkLengthSet(False)
EVERYTHING = WalkLengthSet(True, 2, 1)


def wls_intersect(s1: WalkLengthSet, s2: WalkLengthSet) -> WalkLengthSet:
    return WalkLengthSet(s1.self_zero and s2.self_zero,
                         max(s1.min_even, s2.min_even), max(s1.min_odd, s2.min_odd))


def wls_union(s1: WalkLengthSet, s2: WalkLengthSet) -> WalkLengthSet:
    return WalkLengthSet(s1.self_zero or s2.self_zero,
                         min(s1.min_even, s2.min_even), min(s1.min_odd, s2.min_odd))


def wls_subset(s1: WalkLengthSet, s2: WalkLengthSet) -> bool:
    return ((not s1.self_zero or s2.self_zero)
            and s2.min_even <= s1.min_even and s2.min_odd <= s1.min_odd)


def wls_least_outside(s1: WalkLengthSet, s2: WalkLengthSet) -> int | None:
    """Smallest member of ``s1`` missing from ``s2``."""
    found = []
    if s1.self_zero and not s2.self_zero:
        found.append(0)
    if s1.min_even < s2.min_even:
        found.append(s1.min_even)
    if s1.min_odd < s2.min_odd:
        found.append(s1.min_odd)
    return int(min(found)) if found else None


def _parity_distances(G: UndirectedGraph, src: int) -> list[list[float]]:
    """Shortest walk length from ``src`` to each vertex, per parity."""
    dist = [[INF, INF] for _ in G.vertices]
    dist[src][0] = 0
    queue = deque([(src, 0)])
    while queue:
        v, p = queue.popleft()
        for w in G.neighbours[v]:
            if dist[w][1 - p] == INF:
                dist[w][1 - p] = dist[v][p] + 1
                queue.append((w, 1 - p))
    return dist


def walk_length_set(G: UndirectedGraph, a, b) -> WalkLengthSet:
    i, j = G.index(a), G.index(b)
    return _walk_sets(G)[i][j]


@functools.lru_cache(maxsize=512)
def _walk_sets(G: UndirectedGraph) -> tuple:
    rows = []
    for i in range(len(G.vertices)):
        dist = _parity_distances(G, i)
        row = []
        for j in range(len(G.vertices)):
            even, odd = dist[j]
            if i == j:
                even = 2 if G.neighbours[i] else INF
            row.append(WalkLengthSet(i == j, even, odd))
        rows.append(tuple(row))
    return tuple(rows)


@functools.lru_cache(maxsize=512)
def _graph_trivial(G: UndirectedGraph) -> WalkLengthSet:
    acc = EVERYTHING
    for row in _walk_sets(G):
        for s in row:
            acc = wls_intersect(acc, s)
    return acc


def path_trivial_set(G: UndirectedGraph, H: UndirectedGraph) -> WalkLengthSet:
    """Walk lengths shared by every pair of vertices of both graphs."""
    return wls_intersect(_graph_trivial(G), _graph_trivial(H))


# -- decisions -------------------------------------------------------------


@dataclass(frozen=True)
class PathVerdict:
    holds: bool
    case: str
    shared: WalkLengthSet
    blocking: object = None  # the competing target d'
    separating: int | None = None  # a length justifying d' but not d
    arrow: tuple = ()

    @property
    def mode(self) -> str:
        return self.case

    def to_json(self) -> dict:
        a, b, c, d = self.arrow
        return {
            "arrow": f"{a}-{b} :. {c}-{d}",
            "holds": self.holds,
            "mode": self.case,
            "shared": self.shared.to_json(),
            "blocking": None if self.case != BLOCKED else
            {"dPrime": self.blocking, "length": self.separating},
        }


@dataclass(frozen=True)
class PathProportionVerdict:
    arrows: tuple

    @property
    def holds(self) -> bool:
        return all(v.holds for v in self.arrows)

    @property
    def failing(self):
        return next((v for v in self.arrows if not v.holds), None)

    @property
    def mode(self) -> str:
        bad = self.failing
        if bad is not None:
            return bad.case
        if all(v.case == BOTH_DISCONNECTED for v in self.arrows):
            return BOTH_DISCONNECTED
        return MAXIMAL

    case = mode

    def __bool__(self):
        return self.holds

    def to_json(self) -> dict:
        bad = self.failing
        return {
            "holds": self.holds,
            "mode": self.mode,
            "bounds": {"fragment": "path"},
            "shared": self.arrows[0].shared.to_json(),
            "blocking": bad.to_json()["blocking"] if bad else None,
            "arrows": [v.to_json() for v in self.arrows],
        }


def decide_arrow(left: WalkLengthSet, right: WalkLengthSet, alternatives,
                 trivial: WalkLengthSet = EMPTY, arrow: tuple = ()) -> PathVerdict:
    """Arrow decision from walk-length sets.

    ``alternatives`` yields ``(d', set of c -- d')`` for every competing
    target.  Non-trivial parts are compared by testing ``X <= Y | trivial``.
    """
    shared = wls_intersect(left, right)
    if wls_subset(wls_union(left, right), trivial):
        return PathVerdict(True, BOTH_DISCONNECTED, shared, arrow=arrow)
    if wls_subset(shared, trivial):
        return PathVerdict(False, BLOCKED, shared, None,
                           wls_least_outside(wls_union(left, right), trivial), arrow)
    padded = wls_union(shared, trivial)
    for d_prime, other_right in alternatives:
        other = wls_intersect(left, other_right)
        if wls_subset(shared, wls_union(other, trivial)) and not wls_subset(other, padded):
            return PathVerdict(False, BLOCKED, shared, d_prime,
                               wls_least_outside(other, padded), arrow)
    return PathVerdict(True, MAXIMAL, shared, arrow=arrow)


def path_arrow_holds(G: UndirectedGraph, H: UndirectedGraph, a, b, c, d) -> PathVerdict:
    left = walk_length_set(G, a, b)
    right = walk_length_set(H, c, d)
    alternatives = ((v, walk_length_set(H, c, v)) for v in H.vertices)
    return decide_arrow(left, right, alternatives, path_trivial_set(G, H), (a, b, c, d))


def path_proportion_holds(G: UndirectedGraph, H: UndirectedGraph | None, a, b, c, d) -> PathProportionVerdict:
    """``a:b::c:d`` over path justifications; the two reversed arrows are
    redundant in undirected graphs, so only two arrows are decided."""
    H = G if H is None else H
    return PathProportionVerdict((path_arrow_holds(G, H, a, b, c, d),
                                  path_arrow_holds(H, G, c, d, a, b)))


def path_proportion_four_arrows(G: UndirectedGraph, H: UndirectedGraph | None,
                                a, b, c, d) -> PathProportionVerdict:
    """``a:b::c:d`` with all four arrows decided.

    Reversing both pairs keeps the shared walk lengths but changes the
    competitors (``d -> c'`` instead of ``c -> d'``), so this can differ
    from :func:`path_proportion_holds`.
    """
    H = G if H is None else H
    return PathProportionVerdict((path_arrow_holds(G, H, a, b, c, d),
                                  path_arrow_holds(G, H, b, a, d, c),
                                  path_arrow_holds(H, G, c, d, a, b),
                                  path_arrow_holds(H, G, d, c, b, a)))


# -- two-case characterization of path arrows when nothing is trivial --------


def connectivity_literal(G, H, a, b, c, d) -> bool:
    """The two-case characterization exactly as stated: connectivity via
    walks of any length, comparisons over lengths ``n >= 1``."""
    wab, wcd = walk_length_set(G, a, b), walk_length_set(H, c, d)
    if wab.is_empty() and wcd.is_empty():
        return True
    if wab.is_empty() or wcd.is_empty():
        return False
    pos_ab = wab.positive()
    for d_prime in H.vertices:
        if d_prime == str(d):
            continue
        wcd2 = walk_length_set(H, c, d_prime)
        cond_a = wls_subset(wls_intersect(pos_ab, wcd), wcd2)
        cond_b = not wls_subset(wls_intersect(pos_ab, wcd2), wcd)
        if cond_a and cond_b:
            return False
    return True


def connectivity_repaired(G, H, a, b, c, d) -> bool:
    """The characterization with lengths ``n >= 0`` and a shared length
    required in the connected case."""
    wab, wcd = walk_length_set(G, a, b), walk_length_set(H, c, d)
    if wab.is_empty() and wcd.is_empty():
        return True
    shared = wls_intersect(wab, wcd)
    if shared.is_empty():
        return False
    for d_prime in H.vertices:
        if d_prime == str(d):
            continue
        wcd2 = walk_length_set(H, c, d_prime)
        if wls_subset(shared, wcd2) and not wls_subset(wls_intersect(wab, wcd2), wcd):
            return False
    return True


# -- the ray graph G_N ---------------------------------------------------------


def gn_walk_set(a: int, b: int) -> WalkLengthSet:
    """Walk lengths between ``a`` and ``b`` on the ray 0 - 1 - 2 - ..."""
    if a < 0 or b < 0:
        raise ValueError("ray vertices are natural numbers")
    k = abs(a - b)
    if k % 2:
        return WalkLengthSet(False, INF, k)
    return WalkLengthSet(k == 0, max(k, 2), INF)


def _ray_alternatives(c: int, k: int):
    """Competing targets ``d'`` on the ray; distances above ``k + 1`` give
    sets contained in those at distance two less, so they never block first."""
    targets = sorted({c + j for j in range(k + 2)} | {c - j for j in range(k + 2) if c - j >= 0})
    return ((t, gn_walk_set(c, t)) for t in targets)


def gn_target_rhs(a: int, b: int, H: UndirectedGraph, c, d) -> bool:
    """Whether ``H`` has a walk of length ``|a-b|`` from ``c`` to ``d``."""
    return abs(a - b) in walk_length_set(H, c, d)


def gn_target_proportion(a: int, b: int, H: UndirectedGraph, c, d) -> PathProportionVerdict:
    """``(G_N, H) |= a:b::c:d`` decided by the maximality machinery."""
    k = abs(a - b)
    source = gn_walk_set(a, b)
    target = walk_length_set(H, c, d)
    # G_N has pairs at every distance, so no length is trivial
    forward = decide_arrow(source, target,
                           ((v, walk_length_set(H, c, v)) for v in H.vertices),
                           EMPTY, (a, b, c, d))
    backward = decide_arrow(target, source, _ray_alternatives(a, k), EMPTY, (c, d, a, b))
    return PathProportionVerdict((forward, backward))


def gn_target_closed_form(a: int, b: int, H: UndirectedGraph, c, d) -> bool:
    """Closed form of the machinery's verdict: ``c`` reaches ``d`` by a walk
    of length ``|a-b|`` and by no shorter walk of the same parity."""
    k = abs(a - b)
    w = walk_length_set(H, c, d)
    if k not in w:
        return False
    shorter = [n for n in range(k % 2, k, 2) if n in w]
    return not shorter


def gn_proportion(a: int, b: int, c: int, d: int) -> bool:
    """``G_N |= a:b::c:d`` in closed form."""
    return abs(a - b) == abs(c - d)


def gn_proportion_machinery(a: int, b: int, c: int, d: int) -> PathProportionVerdict:
    """``G_N |= a:b::c:d`` decided by the maximality machinery on symbolic sets."""
    k_ab, k_cd = abs(a - b), abs(c - d)
    forward = decide_arrow(gn_walk_set(a, b), gn_walk_set(c, d),
                           _ray_alternatives(c, k_cd), EMPTY, (a, b, c, d))
    backward = decide_arrow(gn_walk_set(c, d), gn_walk_set(a, b),
                            _ray_alternatives(a, k_ab), EMPTY, (c, d, a, b))
    return PathProportionVerdict((forward, backward))


def ray_graph(length: int) -> UndirectedGraph:
    """The truncated ray 0 - 1 - ... - length (for oracles only)."""
    return UndirectedGraph.build(range(length + 1), [(i, i + 1) for i in range(length)],
                                 name=f"ray{length}")


def walks_by_matrix_powers(G: UndirectedGraph, upto: int) -> np.ndarray:
    """``out[n, i, j]``: a walk of length ``n`` joins vertex ``i`` and ``j``."""
    adj = G.adjacency().astype(np.int64)
    n = len(G.vertices)
    out = np.zeros((upto + 1, n, n), dtype=bool)
    reach = np.eye(n, dtype=np.int64)
    for k in range(upto + 1):
        out[k] = reach > 0
        reach = np.minimum(reach @ adj, 1)
    return out
