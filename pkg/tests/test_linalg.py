from fractions import Fraction

from cdfan import linalg


def test_pivots_agree_with_exact_rref():
    m = linalg.from_rows([[1, 2, 3], [2, 4, 6], [0, 1, 1]])
    assert linalg.pivot_columns(m) == linalg.rref(m)[1] == [0, 1]


def test_complement_columns():
    span = linalg.from_columns([[1, 1, 0]], 3)
    extra = linalg.complement_columns(span, linalg.identity(3))
    assert len(extra) == 2
    assert linalg.rank(linalg.hstack([span, linalg.take(linalg.identity(3), range(3), extra)], 3)) == 3


def test_solve_inconsistent():
    a = linalg.from_rows([[1, 1], [2, 2]])
    assert linalg.solve_vector(a, [1, 3]) is None
    assert linalg.solve_vector(a, [1, 2]) is not None


def test_rational_round_trip():
    x = linalg.to_fmpq(Fraction(-7, 3))
    assert linalg.to_fraction(x) == Fraction(-7, 3)
    assert linalg.fmt(x) == "-7/3"


def test_tsv_and_lists():
    m = linalg.from_rows([[1, Fraction(1, 2)], [0, -2]])
    assert linalg.to_tsv(m).splitlines() == ["1\t1/2", "0\t-2"]
    assert linalg.to_lists(m) == [[1, Fraction(1, 2)], [0, -2]]


def test_inverse_and_symmetry():
    m = linalg.from_rows([[2, 1], [1, 1]])
    assert linalg.inverse(m) * m == linalg.identity(2)
    assert linalg.is_symmetric(m) and not linalg.is_symmetric(linalg.from_rows([[0, 1], [2, 0]]))
