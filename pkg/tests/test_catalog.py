import pytest

from apfol import catalog, sweep
from apfol.enumeration import Bounds

# claims the engine does not reproduce, by entry; see the entry notes
UNREPRODUCED = {
    "general/p-transitivity": {0, 1},
    "general/central-p-transitivity": {1},
    "graphs/central-p-transitivity": {1},
}


@pytest.mark.parametrize("entry", catalog.ENTRIES, ids=lambda e: e.name)
def test_entry_claims(entry):
    got = {i for i, (_, ok) in enumerate(catalog.check_entry(entry)) if not ok}
    assert got == UNREPRODUCED.get(entry.name, set())
    if got:
        assert entry.note


def test_entries_cover_both_fragments():
    assert len(catalog.GENERAL) == 7 and len(catalog.GRAPHS) == 7
    assert {e.kind for e in catalog.GENERAL} == {"cformula"}
    assert {e.kind for e in catalog.GRAPHS} == {"path"}


def test_every_refuting_conclusion_is_negative():
    for entry in catalog.ENTRIES:
        if entry.prop.startswith("strong"):
            assert all(c.expected for c in entry.claims)
        else:
            assert not entry.claims[-1].expected


def test_frozen_bounds_are_sweep_minima():
    for entry in catalog.GENERAL:
        best = sweep.minimal_bounds(sweep.sweep_entry(entry))
        if entry.name in UNREPRODUCED:
            assert best is None and entry.bounds == Bounds()
        else:
            assert best == entry.bounds


def test_central_p_transitivity_premise_only_reappears_at_the_largest_bounds():
    rows = sweep.sweep_entry(catalog.find("general/central-p-transitivity"))
    top = rows[-1]
    assert top.bounds == Bounds(3, 2, 2) and top.per_claim == (True, True, False)
    assert all(r.per_claim == (True, False, True) for r in rows[:-1])


def test_sweep_grid_order_and_format():
    g = sweep.grid()
    assert len(g) == 18 and g[0] == Bounds(1, 1, 0) and g[-1] == Bounds(3, 2, 2)
    out = sweep.format_sweep(sweep.sweep(catalog.GENERAL[:1], g[:2]))
    assert out.splitlines()[0] == "general/strong-inner-p-reflexivity: minimal atoms<=1,depth<=1,q<=0[EF]"


def test_claim_label():
    assert catalog.find("p-commutativity").claims[0].label() == "PC |= a:b !:: b:a"
    with pytest.raises(KeyError):
        catalog.find("nope")
