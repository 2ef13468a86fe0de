import pytest

from cdfan import linalg
from cdfan.flag import SquarefreePoly
from cdfan.graded import (ComponentwiseModule, FreeGradedModule, MonomialMap, MultiDegree, NotFree,
                          component_basis, extract_free_basis, hilbert_squarefree, map_component,
                          solve_preimage)

from conftest import fan

D = MultiDegree.of


def line() -> FreeGradedModule:
    return FreeGradedModule.over(1, 1, [("g0", ()), ("g1", (1,))])


def test_component_basis():
    assert component_basis(line(), D([1])) == [0, 1]
    assert component_basis(line(), D()) == [0]
    square = FreeGradedModule.over(1, 2, [("a", ()), ("b", (1,)), ("c", (2,)), ("e", (1, 2))])
    assert len(component_basis(square, D([1, 2]))) == 4


def test_map_component():
    m = line()
    assert map_component(MonomialMap.identity(m), D([1])) == linalg.identity(2)
    rank1 = FreeGradedModule.over(1, 1, [("g", ())])
    assert map_component(MonomialMap.variable(rank1, 1), D()) == linalg.from_rows([[1]])
    ent = linalg.zeros(2, 2)
    ent[1, 0] = 2
    L = MonomialMap(m, m, MultiDegree.unit(1), ent)
    assert L.is_homogeneous()
    assert linalg.take(map_component(L, D()), [1], [0]) == linalg.from_rows([[2]])


def test_solve_preimage():
    m = line()
    two = MonomialMap(m, m, MultiDegree(), linalg.identity(2) * 2)
    assert solve_preimage(two, [3, 4], D([1])) == [linalg.to_fmpq("3/2"), 2]
    rank1 = FreeGradedModule.over(1, 1, [("g", ())])
    assert solve_preimage(MonomialMap.variable(rank1, 1), [1], D()) is None


def test_solve_preimage_random_block():
    m = FreeGradedModule.over(1, 1, [("a", ()), ("b", ()), ("c", ())])
    a = linalg.from_rows([[2, 1, 0], [0, 3, -1], [1, 0, 1]])
    f = MonomialMap(m, m, MultiDegree(), a)
    x = solve_preimage(f, [1, 2, 3], D())
    assert f.apply(x, D()) == [1, 2, 3]


def _truncated_line(action: int) -> ComponentwiseModule:
    d0, d1, d2 = D(), D([1]), D({1: 2})
    act = linalg.from_rows([[action]])
    return ComponentwiseModule((1,), {d0: 1, d1: 1, d2: 1}, {(d0, 1): act, (d1, 1): linalg.from_rows([[1]])})


def test_extract_free_basis():
    free, _ = extract_free_basis(_truncated_line(1))
    assert free.degrees == [frozenset()]
    with pytest.raises(NotFree):
        extract_free_basis(_truncated_line(0))


def test_sections_of_line_fan_are_free_on_two_generators():
    assert sorted(fan("simplex:1").push.root.module.degrees, key=len) == [frozenset(), frozenset({1})]


def test_hilbert():
    assert hilbert_squarefree(line()) == SquarefreePoly.from_terms({(): 1, (1,): 1})
    assert hilbert_squarefree(FreeGradedModule.over(1, 2, [])) == SquarefreePoly()
    want = SquarefreePoly.from_terms({(): 1, (1,): 3, (2,): 3, (1, 2): 1})
    assert fan("polygon:4").push.root.module.hilbert() == want


def test_multidegree_arithmetic():
    a = D([1, 2]) + MultiDegree.unit(1)
    assert a[1] == 2 and not a.is_squarefree
    assert a - D([1]) == D([1, 2])
    with pytest.raises(ValueError):
        D([1]) - D([2])
