"""Property suites: randomized and exhaustive checks with JSON/text reports."""

from __future__ import annotations

import itertools
import json
import random
import time
from dataclasses import dataclass, field, replace

from . import catalog, graphs, numbers
from .engine import arrow_holds, ept_check, ept_full_check, proportion_holds
from .enumeration import Bounds, FragmentSpec, build_index
from .structures import FiniteStructure, apply_bijection, find_isomorphisms
from .syntax import App, Var, X, Y, format_formula, is_c_term, term_depth

MAX_STORED_FAILURES = 50


@dataclass(frozen=True)
class SuiteConfig:
    seed: int = 20240101
    bounds: Bounds = Bounds()
    trials: int | None = None  # overrides the suite's default trial count
    densities: tuple = (0.3, 0.5)


@dataclass
class SuiteReport:
    suite: str
    trials: int = 0
    failures: list = field(default_factory=list)
    failure_count: int = 0
    bounds: object = None
    wall_time: float = 0.0
    notes: list = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return self.failure_count == 0

    def fail(self, structure: str, inputs, expected, got, what: str = "") -> None:
        self.failure_count += 1
        if len(self.failures) < MAX_STORED_FAILURES:
            self.failures.append({"structure": structure, "input": list(inputs),
                                  "expected": expected, "got": got, "check": what})

    def check(self, ok: bool, structure: str, inputs, expected, got, what: str = "") -> None:
        self.trials += 1
        if not ok:
            self.fail(structure, inputs, expected, got, what)

    def to_json(self) -> dict:
        bounds = self.bounds.as_dict() if isinstance(self.bounds, Bounds) else self.bounds
        return {"suite": self.suite, "passed": self.passed, "trials": self.trials,
                "failureCount": self.failure_count, "failures": self.failures,
                "bounds": bounds, "wallTime": round(self.wall_time, 3), "notes": self.notes}

    def to_text(self) -> str:
        head = "PASS" if self.passed else "FAIL"
        lines = [f"{head} {self.suite}: {self.trials} checks, {self.failure_count} failures "
                 f"({self.wall_time:.2f}s)"]
        if isinstance(self.bounds, Bounds):
            lines.append(f"  bounds: {self.bounds.label()}")
        lines += [f"  note: {n}" for n in self.notes]
        for f in self.failures[:10]:
            lines.append(f"  {f['check']} {f['structure']} {f['input']}: expected {f['expected']}, got {f['got']}")
        return "\n".join(lines)


# -- random generation -------------------------------------------------------


def random_structure(rng: random.Random, size: int, n_functions: int = 2,
                     relation_density: float | None = None, name: str = "") -> FiniteStructure:
    universe = [str(i) for i in range(size)]
    functions = {f: (1, {(u,): rng.choice(universe) for u in universe})
                 for f in "fg"[:n_functions]}
    relations = {}
    if relation_density is not None:
        relations["R"] = (2, [p for p in itertools.product(universe, repeat=2)
                              if rng.random() < relation_density])
    return FiniteStructure.build(universe, functions, relations, name=name)


def random_graph(rng: random.Random, size: int, density: float, loops: bool = True,
                 name: str = "") -> graphs.UndirectedGraph:
    vs = [str(i) for i in range(size)]
    pairs = itertools.combinations_with_replacement(vs, 2) if loops else itertools.combinations(vs, 2)
    return graphs.UndirectedGraph.build(vs, [p for p in pairs if rng.random() < density], name)


def random_c_term(rng: random.Random, fn: str, depth: int):
    """A random term over a binary symbol containing both x and y."""
    while True:
        t = _random_term(rng, fn, depth)
        if is_c_term(t):
            return t


def _random_term(rng, fn, depth):
    if depth == 0 or rng.random() < 0.3:
        return Var(rng.choice((X, Y)))
    return App(fn, (_random_term(rng, fn, depth - 1), _random_term(rng, fn, depth - 1)))


def cyclic_group(n: int) -> FiniteStructure:
    u = [str(i) for i in range(n)]
    table = {(str(i), str(j)): str((i + j) % n) for i in range(n) for j in range(n)}
    return FiniteStructure.build(u, {"add": (2, table)}, name=f"Z{n}")


# -- suites -------------------------------------------------------------------


def _general_positive(report, A, B, frag, label):
    U, V = A.universe, B.universe
    for a, b, c, d in itertools.product(U, U, V, V):
        v = proportion_holds(A, B, a, b, c, d, frag).holds
        sym = proportion_holds(B, A, c, d, a, b, frag).holds
        report.check(v == sym, label, (a, b, c, d), v, sym, "p-symmetry")
        inner = proportion_holds(A, B, b, a, d, c, frag).holds
        report.check(v == inner, label, (a, b, c, d), v, inner, "inner p-symmetry")
    for a, c in itertools.product(U, V):
        got = proportion_holds(A, B, a, a, c, c, frag).holds
        report.check(got, label, (a, a, c, c), True, got, "inner p-reflexivity")
    if A is B:
        for a, b in itertools.product(U, U):
            got = proportion_holds(A, A, a, b, a, b, frag).holds
            report.check(got, label, (a, b, a, b), True, got, "p-reflexivity")
        for a, d in itertools.product(U, U):
            got = proportion_holds(A, A, a, a, a, d, frag).holds
            report.check(got == (a == d), label, (a, a, a, d), a == d, got, "p-determinism")


def suite_properties_general(cfg: SuiteConfig, report: SuiteReport) -> None:
    rng = random.Random(cfg.seed)
    frag = FragmentSpec("cformula", cfg.bounds)
    for t in range(cfg.trials or 200):
        size = rng.randint(1, 4)
        nf = rng.randint(1, 2)
        A = random_structure(rng, size, nf, name=f"A{t}")
        _general_positive(report, A, A, frag, A.name)
        if t % 4 == 0:
            B = random_structure(rng, rng.randint(1, 4), nf, name=f"B{t}")
            _general_positive(report, A, B, frag, f"{A.name}/{B.name}")


def _graph_positive(report, G, H, label, decide):
    U, V = G.vertices, H.vertices
    for a, b, c, d in itertools.product(U, U, V, V):
        v = decide(G, H, a, b, c, d).holds
        sym = decide(H, G, c, d, a, b).holds
        report.check(v == sym, label, (a, b, c, d), v, sym, "p-symmetry")
        inner = decide(G, H, b, a, d, c).holds
        report.check(v == inner, label, (a, b, c, d), v, inner, "inner p-symmetry")
    for a, c in itertools.product(U, V):
        got = decide(G, H, a, a, c, c).holds
        report.check(got, label, (a, a, c, c), True, got, "inner p-reflexivity")
    if G is H:
        for a, b in itertools.product(U, U):
            got = decide(G, G, a, b, a, b).holds
            report.check(got, label, (a, b, a, b), True, got, "p-reflexivity")
            got = decide(G, G, a, b, b, a).holds
            report.check(got, label, (a, b, b, a), True, got, "p-commutativity")
        for a, d in itertools.product(U, U):
            got = decide(G, G, a, a, a, d).holds
            report.check(got == (a == d), label, (a, a, a, d), a == d, got, "p-determinism")


def _properties_graphs(cfg, report, decide):
    rng = random.Random(cfg.seed)
    for t in range(cfg.trials or 200):
        G = random_graph(rng, rng.randint(1, 6), rng.choice(cfg.densities), name=f"G{t}")
        _graph_positive(report, G, G, G.name, decide)
        if t % 4 == 0:
            H = random_graph(rng, rng.randint(1, 6), rng.choice(cfg.densities), name=f"H{t}")
            _graph_positive(report, G, H, f"{G.name}/{H.name}", decide)


def suite_properties_graphs(cfg, report):
    _properties_graphs(cfg, report, graphs.path_proportion_holds)


def suite_properties_graphs_four_arrows(cfg, report):
    report.notes.append("all four arrows decided instead of the two-arrow simplification")
    _properties_graphs(cfg, report, graphs.path_proportion_four_arrows)


def suite_iso_theorems(cfg: SuiteConfig, report: SuiteReport) -> None:
    rng = random.Random(cfg.seed)
    frag = FragmentSpec("cformula", cfg.bounds)
    for t in range(cfg.trials or 100):
        size = rng.randint(1, 5)
        density = rng.choice((None,) + tuple(cfg.densities))
        A = random_structure(rng, size, rng.randint(1, 2), density, name=f"A{t}")
        if t % 3 == 0:
            B, label = A, A.name  # automorphisms
        else:
            images = [f"p{i}" for i in range(size)]
            rng.shuffle(images)
            B = apply_bijection(dict(zip(A.universe, images)), A, name=f"B{t}")
            label = f"{A.name}/{B.name}"
        isos = find_isomorphisms(A, B)
        report.check(bool(isos), label, (), "isomorphic", "none found", "isomorphism search")
        idx = build_index(A, B, frag)
        U = A.universe
        for H in isos[:3]:
            for a, b in itertools.product(U, U):
                ta = idx.justification_type("A", a, b)
                tb = idx.justification_type("B", H[a], H[b])
                report.check(ta == tb, label, (a, b), sorted(ta), sorted(tb), "isomorphism lemma")
                got = proportion_holds(A, B, a, b, H[a], H[b], frag).holds
                report.check(got, label, (a, b, H[a], H[b]), True, got, "first isomorphism theorem")
        H = isos[0] if isos else None
        if H is None:
            continue
        for a, b, c, d in itertools.product(U, repeat=4):
            left = proportion_holds(A, A, a, b, c, d, frag).holds
            right = proportion_holds(B, B, H[a], H[b], H[c], H[d], frag).holds
            report.check(left == right, label, (a, b, c, d), left, right, "second isomorphism theorem")


def suite_empty_signature(cfg: SuiteConfig, report: SuiteReport) -> None:
    frag = FragmentSpec("cformula", cfg.bounds)
    for n in range(1, 6):
        A = FiniteStructure.build([str(i) for i in range(1, n + 1)], name=f"set{n}")
        for a, b, c, d in itertools.product(A.universe, repeat=4):
            expected = (a == b) == (c == d)
            got = proportion_holds(A, A, a, b, c, d, frag).holds
            report.check(got == expected, A.name, (a, b, c, d), expected, got, "closed form")


def suite_ept(cfg: SuiteConfig, report: SuiteReport) -> None:
    Z5 = cyclic_group(5)
    t = App("add", (Var(X), Var(Y)))
    frag = FragmentSpec("cformula", Bounds(1, 1, 0, element_parameters=True))
    report.notes.append("fragment with element parameters: " + frag.bounds.label())
    for a, b, c, d in itertools.product(Z5.universe, repeat=4):
        if (int(a) + int(b)) % 5 != (int(c) + int(d)) % 5:
            continue
        full = ept_full_check(Z5, t, t, t, t, a, b, c, d)
        report.check(full, Z5.name, (a, b, c, d), True, full, "four-line hypothesis")
        got = proportion_holds(Z5, Z5, a, b, c, d, frag).holds
        report.check(got, Z5.name, (a, b, c, d), True, got, "a+b=c+d implies a:b::c:d")
    rng = random.Random(cfg.seed)
    for k in range(cfg.trials or 60):
        u = ["0", "1", "2"]
        table = {(p, q): rng.choice(u) for p in u for q in u}
        A = FiniteStructure.build(u, {"add": (2, table)}, name=f"M{k}")
        term = random_c_term(rng, "add", 2)
        frag_t = FragmentSpec("cformula", Bounds(1, max(1, term_depth(term)), 0, element_parameters=True))
        idx = build_index(A, A, frag_t)
        for a, b, c, d in itertools.product(u, repeat=4):
            if ept_check(A, term, a, b, c, d):
                got = arrow_holds(idx, a, b, c, d).holds
                report.check(got, f"{A.name}:{format_formula_term(term)}", (a, b, c, d), True, got,
                             "ept arrow")
            if ept_full_check(A, term, term, term, term, a, b, c, d):
                got = proportion_holds(A, A, a, b, c, d, frag_t).holds
                report.check(got, f"{A.name}:{format_formula_term(term)}", (a, b, c, d), True, got,
                             "ept proportion")


def format_formula_term(t) -> str:
    from .syntax import Eq
    return format_formula(Eq(t, t)).split(" = ")[0]


def suite_nat_s_dpt(cfg: SuiteConfig, report: SuiteReport) -> None:
    for a, b, c, d in itertools.product(range(31), repeat=4):
        expected = a - b == c - d
        closed = numbers.e_proportion(a, b, c, d)
        machine = all(v.holds for v in numbers.e_proportion_verdict(a, b, c, d))
        report.check(closed == expected and machine == expected, "(N,S)", (a, b, c, d),
                     expected, (closed, machine), "difference proportion")
    for a, b, k, l in itertools.product(range(11), repeat=4):
        got = numbers.e_member(numbers.e_type(a, b), k, l)
        report.check(got == (k + a == l + b), "(N,S)", (a, b, k, l), k + a == l + b, got, "e_member")


def suite_graph_dpt(cfg: SuiteConfig, report: SuiteReport) -> None:
    for a, b, c, d in itertools.product(range(21), repeat=4):
        expected = abs(a - b) == abs(c - d)
        got = graphs.gn_proportion_machinery(a, b, c, d).holds
        closed = graphs.gn_proportion(a, b, c, d)
        report.check(got == expected and closed == expected, "G_N", (a, b, c, d),
                     expected, (closed, got), "|a-b|=|c-d|")


def _gn_graphs(cfg):
    rng = random.Random(cfg.seed)
    return [random_graph(rng, rng.randint(1, 8), rng.choice(cfg.densities), name=f"H{t}")
            for t in range(cfg.trials or 50)]


def _walk_oracle(H, upto):
    return graphs.walks_by_matrix_powers(H, upto)


def suite_gn_target(cfg: SuiteConfig, report: SuiteReport) -> None:
    """Machinery verdict against the stated right-hand side, by brute force."""
    for H in _gn_graphs(cfg):
        walks = _walk_oracle(H, 10)
        for a, b in itertools.product(range(11), repeat=2):
            k = abs(a - b)
            for (i, c), (j, d) in itertools.product(enumerate(H.vertices), repeat=2):
                expected = bool(walks[k, i, j])
                got = graphs.gn_target_proportion(a, b, H, c, d).holds
                report.check(got == expected, H.name, (a, b, c, d), expected, got, "c --|a-b|-- d")


def suite_gn_target_corrected(cfg: SuiteConfig, report: SuiteReport) -> None:
    """Machinery verdict against: a walk of length |a-b| and no shorter one of
    the same parity, by brute force."""
    for H in _gn_graphs(cfg):
        walks = _walk_oracle(H, 10)
        for a, b in itertools.product(range(11), repeat=2):
            k = abs(a - b)
            for (i, c), (j, d) in itertools.product(enumerate(H.vertices), repeat=2):
                expected = bool(walks[k, i, j]) and not any(walks[m, i, j] for m in range(k % 2, k, 2))
                got = graphs.gn_target_proportion(a, b, H, c, d).holds
                report.check(got == expected, H.name, (a, b, c, d), expected, got, "shortest of its parity")


def suite_walk_sets(cfg: SuiteConfig, report: SuiteReport) -> None:
    rng = random.Random(cfg.seed)
    for t in range(cfg.trials or 300):
        G = random_graph(rng, rng.randint(1, 7), rng.choice((0.2, 0.5)), name=f"G{t}")
        walks = _walk_oracle(G, 12)
        for (i, a), (j, b) in itertools.product(enumerate(G.vertices), repeat=2):
            s = graphs.walk_length_set(G, a, b)
            got = [n in s for n in range(13)]
            expected = [bool(walks[n, i, j]) for n in range(13)]
            report.check(got == expected, G.name, (a, b), expected, got, "walk lengths")


def _all_graphs(n: int):
    vs = [str(i) for i in range(n)]
    pairs = list(itertools.combinations_with_replacement(vs, 2))
    for mask in range(1 << len(pairs)):
        yield graphs.UndirectedGraph.build(vs, [p for k, p in enumerate(pairs) if mask >> k & 1])


def _connectivity(cfg, report, direct, label):
    """Exhaustive over graphs with at most 3 vertices (loops allowed) and
    randomized over graphs with 4 or 5 vertices."""
    small = [g for n in range(1, 4) for g in _all_graphs(n)]
    rng = random.Random(cfg.seed)
    sampled = [random_graph(rng, rng.randint(4, 5), rng.choice(cfg.densities)) for _ in range(cfg.trials or 60)]
    pool = small + sampled
    pairs = [(G, H) for G in small for H in small]
    pairs += [(rng.choice(pool), rng.choice(pool)) for _ in range(cfg.trials or 400)]
    skipped = 0
    for G, H in pairs:
        if not graphs.path_trivial_set(G, H).is_empty():
            skipped += 1
            continue
        name = f"V={len(G.vertices)},E={sorted(map(sorted, G.edges))} | V={len(H.vertices)},E={sorted(map(sorted, H.edges))}"
        for a, b, c, d in itertools.product(G.vertices, G.vertices, H.vertices, H.vertices):
            engine = graphs.path_arrow_holds(G, H, a, b, c, d).holds
            got = direct(G, H, a, b, c, d)
            report.check(engine == got, name, (a, b, c, d), engine, got, label)
    report.notes.append(f"{len(pairs) - skipped} graph pairs with no trivial length ({skipped} skipped)")


def suite_connectivity(cfg, report):
    _connectivity(cfg, report, graphs.connectivity_literal, "two-case characterization")


def suite_connectivity_repaired(cfg, report):
    report.notes.append("lengths n >= 0 and a shared length required in the connected case")
    _connectivity(cfg, report, graphs.connectivity_repaired, "repaired characterization")


def suite_catalog(cfg: SuiteConfig, report: SuiteReport) -> None:
    for entry in catalog.ENTRIES:
        for claim, ok in catalog.check_entry(entry):
            report.check(ok, entry.name, claim.args, claim.expected, not claim.expected if not ok
                         else claim.expected, claim.label())
        if entry.note:
            report.notes.append(f"{entry.name}: {entry.note}")


SUITES = {
    "properties-general": suite_properties_general,
    "properties-graphs": suite_properties_graphs,
    "properties-graphs-four-arrows": suite_properties_graphs_four_arrows,
    "iso-theorems": suite_iso_theorems,
    "empty-signature": suite_empty_signature,
    "ept": suite_ept,
    "nat-s-dpt": suite_nat_s_dpt,
    "graph-dpt": suite_graph_dpt,
    "gn-target": suite_gn_target,
    "gn-target-corrected": suite_gn_target_corrected,
    "walk-sets": suite_walk_sets,
    "connectivity": suite_connectivity,
    "connectivity-repaired": suite_connectivity_repaired,
    "catalog": suite_catalog,
}


def run_suite(name: str, config: SuiteConfig | None = None) -> SuiteReport:
    if name not in SUITES:
        raise KeyError(f"unknown suite {name!r}; choose from {', '.join(SUITES)}")
    cfg = config or SuiteConfig()
    report = SuiteReport(name, bounds=cfg.bounds)
    start = time.perf_counter()
    SUITES[name](cfg, report)
    report.wall_time = time.perf_counter() - start
    return report


def report_json(report: SuiteReport, with_time: bool = True) -> str:
    data = report.to_json()
    if not with_time:
        data.pop("wallTime")
    return json.dumps(data, indent=2, sort_keys=True)
