from fractions import Fraction

import pytest

from cdfan.flag import (CdPolynomial, FlagVector, LengthMismatch, NotInCdSpan, SquarefreePoly, cd_index,
                        cd_index_from_flag_h, cd_words, flag_f, flag_h, linear, phi, phi_expand, simplicial_h,
                        subsets)
from cdfan.poset import cube_fan, polygon_fan, simplex_fan


def test_flag_f_examples():
    assert flag_f(cube_fan(3))[{1, 3}] == 24
    assert flag_f(simplex_fan(3))[{1, 2, 3}] == 24
    assert flag_f(polygon_fan(5))[()] == 1


def test_flag_h_examples():
    h = flag_h(cube_fan(3))
    assert h[{2}] == 11 and h[{1, 2}] == 5 and h[()] == 1


@pytest.mark.parametrize("m", range(3, 9))
def test_polygon_h1(m):
    assert flag_h(polygon_fan(m))[{1}] == m - 1


@pytest.mark.parametrize("f,h", [((1, 4, 6, 4), [1, 1, 1, 1]), ((1, 2), [1, 1]), ((1, 6, 12, 8), [1, 3, 3, 1])])
def test_simplicial_h(f, h):
    assert simplicial_h(f) == h


def test_simplicial_h_length_mismatch():
    with pytest.raises(LengthMismatch):
        simplicial_h([1, 4, 6], n=3)


def test_simplicial_h_sums_to_maximal_cones():
    for p in (simplex_fan(3), polygon_fan(6), simplex_fan(4)):
        f = p.face_counts()
        h = simplicial_h(f)
        assert sum(h) == f[-1] and h == h[::-1]


def test_phi_small_words():
    assert phi_expand("") == SquarefreePoly.one()
    assert phi_expand("dd") == linear(1, 2) * linear(3, 4)
    assert phi_expand("c", start=3) == linear(3, const=1)
    with pytest.raises(ValueError):
        phi_expand("cx")


def test_cd_index_from_h():
    assert str(cd_index_from_flag_h(flag_h(cube_fan(3)))) == "c^3 + 4cd + 6dc"
    assert str(cd_index_from_flag_h(flag_h(simplex_fan(1)))) == "c"


def test_not_in_cd_span():
    h = FlagVector(2, {frozenset(): 1, frozenset({1}): 2, frozenset({2}): 5, frozenset({1, 2}): 1})
    with pytest.raises(NotInCdSpan):
        cd_index_from_flag_h(h)


def test_phi_of_cd_index_is_flag_h():
    p = cube_fan(3)
    poly = phi(cd_index(p))
    h = flag_h(p)
    assert all(poly[s] == h[s] for s in subsets([1, 2, 3]))


def test_cd_polynomial_text_and_json():
    cd = CdPolynomial.parse("c^4 + 6c^2d + 16cdc + 14dc^2 + 20d^2")
    assert cd.coeff("ccd") == 6 and cd.coeff("dd") == 20
    assert str(cd) == "c^4 + 6c^2d + 16cdc + 14dc^2 + 20d^2"
    assert CdPolynomial.from_json(cd.to_json()) == cd


def test_cd_words_are_fibonacci():
    assert [len(cd_words(n)) for n in range(1, 8)] == [1, 2, 3, 5, 8, 13, 21]


def test_squarefree_poly_rejects_overlap():
    with pytest.raises(ValueError):
        linear(1) * linear(1)
    assert linear(1, const=1).evaluate({1: Fraction(2)}) == 3
