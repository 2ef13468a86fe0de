import pytest

from cdfan import linalg
from cdfan.graded import FreeGradedModule, MonomialMap, MultiDegree, extract_free_basis, verification_box
from cdfan.poset import barycentric, cube_fan, polygon_fan, simplex_fan
from cdfan.sheaves import (SheafData, boundary_exact, cellular_complex, check_minimally_flabby, direct_sum,
                           global_sections, hilbert_table, indecomposable_stalks, sheaf_A, sheaf_B)

from conftest import fan


def test_sheaf_B_stalks():
    bd = barycentric(simplex_fan(3))
    B = sheaf_B(bd)
    full = bd.maximal[0]
    assert B.stalks[full].variables == (1, 2, 3)
    two = next(x for x in bd.chains if len(x) == 1 and bd.base.rank[x[0]] == 2)
    assert B.stalks[two].variables == (2,)
    assert B.stalks[()].variables == ()


def test_sheaf_A_is_rank_one():
    A = sheaf_A(cube_fan(3))
    assert all(m.rank == 1 for m in A.stalks.values())
    assert not A.composition_failures()


def test_sections_of_B_on_line_fan():
    sp = global_sections(sheaf_B(barycentric(simplex_fan(1))))
    # component dimensions; the new generator counts are 1 and 1
    assert sp.dims[MultiDegree()] == 1
    assert sp.dims[MultiDegree.of([1])] == 2
    free, _ = extract_free_basis(sp)
    assert sorted(free.degrees, key=len) == [frozenset(), frozenset({1})]


def test_indecomposable_stalks():
    p = cube_fan(3)
    L = indecomposable_stalks(p)
    assert L.stalks[p.zero].rank == 1 and L.stalks[p.zero].degrees == [frozenset()]
    two = p.by_rank[2][0]
    assert sorted(L.stalks[two].degrees, key=len) == [frozenset(), frozenset({1})]
    square = p.by_rank[3][0]
    degs = L.stalks[square].degrees
    assert len(degs) == 8
    assert [sum(1 for d in degs if d == s) for s in (frozenset(), {1}, {2}, {1, 2})] == [1, 3, 3, 1]


@pytest.mark.parametrize("name", ["polygon:5", "cube:3", "crosspoly:3"])
def test_L_agrees_with_pushforward(name):
    p = fan(name).poset
    assert hilbert_table(indecomposable_stalks(p)) == hilbert_table(fan(name).push.sheaf)


def test_L_is_minimally_flabby_with_trivial_G():
    f = fan("polygon:4")
    rep = check_minimally_flabby(indecomposable_stalks(f.poset), f.orient, 1)
    assert rep["ok"] and rep["max_G"] == 1 and not rep["decomposable"]


def test_double_of_L_is_flagged_decomposable():
    f = fan("polygon:4")
    L = indecomposable_stalks(f.poset)
    rep = check_minimally_flabby(direct_sum(L, L), f.orient, 1)
    assert rep["ok"] and rep["max_G"] == 2 and rep["decomposable"]


def test_global_complex_on_square_fan():
    f = fan("polygon:4")
    L = indecomposable_stalks(f.poset)
    for d in verification_box((1, 2)):
        h = cellular_complex(L, f.orient, d).cohomology()
        assert h[0] == f.push.root.module.dim(d) and not any(h[1:])


def test_line_fan_complex():
    f = fan("simplex:1")
    L = indecomposable_stalks(f.poset)
    h0 = [cellular_complex(L, f.orient, MultiDegree.of(s)).cohomology()[0] for s in ((), (1,))]
    assert h0 == [1, 2]  # components of a free module on generators of degree () and (1)
    cx = cellular_complex(L, f.orient, MultiDegree())
    assert cx.dims == [2, 1]


def test_zero_sheaf_gives_zero_complex():
    p = polygon_fan(4)
    f = fan("polygon:4")
    stalks = {e: FreeGradedModule(tuple(range(1, p.rank[e] + 1)), ()) for e in p.ids}
    res = {(s, t): MonomialMap.zero(stalks[s], stalks[t]) for s in p.ids for t in p.down[s]}
    zero = SheafData("0", (1, 2), dict(p.rank), {e: list(p.down[e]) for e in p.ids}, stalks, res)
    cx = cellular_complex(zero, f.orient, MultiDegree.of([1]))
    assert set(cx.dims) == {0} and set(cx.cohomology()) == {0}


@pytest.mark.parametrize("name", ["polygon:4", "cube:3"])
def test_boundary_sequences_end_at_the_zero_cone(name):
    f = fan(name)
    L = indecomposable_stalks(f.poset)
    for sigma in f.poset.ids:
        if f.poset.rank[sigma] >= 1:
            rep = boundary_exact(L, f.orient, sigma, 0)
            assert rep["exact"] and rep["complex"] and not rep["G"]


def test_restrictions_compose():
    assert not fan("cube:3").push.sheaf.composition_failures()
    assert not indecomposable_stalks(cube_fan(3)).composition_failures()


def test_corrupted_restriction_is_detected():
    p = cube_fan(3)
    L = indecomposable_stalks(p)
    sigma = p.by_rank[3][0]
    tau = p.down[sigma][0]
    f = L.res[sigma, tau]
    L.res[sigma, tau] = MonomialMap(f.source, f.target, f.shift, f.entries * 2)
    assert L.composition_failures()
    assert linalg.rank(f.entries) > 0
