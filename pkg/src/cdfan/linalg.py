"""Exact rational matrix helpers on top of FLINT's ``fmpq_mat``.

Everything here is deterministic: kernels, complements and particular
solutions depend only on the input matrix.
"""

from __future__ import annotations

from fractions import Fraction
from typing import Iterable, Sequence

from flint import fmpq, fmpq_mat, nmod_mat

Matrix = fmpq_mat


def to_fmpq(x) -> fmpq:
    if isinstance(x, fmpq):
        return x
    if isinstance(x, Fraction):
        return fmpq(x.numerator, x.denominator)
    return fmpq(x)


def to_fraction(x) -> Fraction:
    x = to_fmpq(x)
    return Fraction(int(x.p), int(x.q))


def zeros(rows: int, cols: int) -> Matrix:
    return fmpq_mat(rows, cols)


def identity(n: int) -> Matrix:
    m = fmpq_mat(n, n)
    for i in range(n):
        m[i, i] = 1
    return m


def from_rows(rows: Sequence[Sequence], ncols: int | None = None) -> Matrix:
    nrows = len(rows)
    if ncols is None:
        ncols = len(rows[0]) if nrows else 0
    flat = [to_fmpq(v) for row in rows for v in row]
    return fmpq_mat(nrows, ncols, flat)


def from_columns(cols: Sequence[Sequence], nrows: int) -> Matrix:
    m = fmpq_mat(nrows, len(cols))
    for j, col in enumerate(cols):
        for i, v in enumerate(col):
            if v:
                m[i, j] = to_fmpq(v)
    return m


def column(m: Matrix, j: int) -> list:
    return [m[i, j] for i in range(m.nrows())]


def columns(m: Matrix) -> list[list]:
    return [column(m, j) for j in range(m.ncols())]


def take(m: Matrix, rows: Sequence[int], cols: Sequence[int]) -> Matrix:
    out = fmpq_mat(len(rows), len(cols))
    for a, i in enumerate(rows):
        for b, j in enumerate(cols):
            v = m[i, j]
            if v:
                out[a, b] = v
    return out


def hstack(blocks: Iterable[Matrix], nrows: int) -> Matrix:
    blocks = list(blocks)
    ncols = sum(b.ncols() for b in blocks)
    out = fmpq_mat(nrows, ncols)
    off = 0
    for b in blocks:
        if b.nrows() != nrows:
            raise ValueError("row count mismatch in hstack")
        for i in range(nrows):
            for j in range(b.ncols()):
                v = b[i, j]
                if v:
                    out[i, off + j] = v
        off += b.ncols()
    return out


def vstack(blocks: Iterable[Matrix], ncols: int) -> Matrix:
    blocks = list(blocks)
    nrows = sum(b.nrows() for b in blocks)
    out = fmpq_mat(nrows, ncols)
    off = 0
    for b in blocks:
        if b.ncols() != ncols:
            raise ValueError("column count mismatch in vstack")
        for i in range(b.nrows()):
            for j in range(ncols):
                v = b[i, j]
                if v:
                    out[off + i, j] = v
        off += b.nrows()
    return out


def is_zero(m: Matrix) -> bool:
    return all(not m[i, j] for i in range(m.nrows()) for j in range(m.ncols()))


def rank(m: Matrix) -> int:
    if m.nrows() == 0 or m.ncols() == 0:
        return 0
    return m.rank()


def rref(m: Matrix) -> tuple[Matrix, list[int]]:
    """Reduced row echelon form and the pivot columns (leftmost first)."""
    if m.nrows() == 0 or m.ncols() == 0:
        return fmpq_mat(m.nrows(), m.ncols()), []
    r, rk = m.rref()
    pivots = []
    for i in range(rk):
        for j in range(r.ncols()):
            if r[i, j]:
                pivots.append(j)
                break
    return r, pivots


_PRIME = 2**61 - 1


def _pivots_mod_p(m: Matrix) -> list[int]:
    numer, _ = m.numer_denom()
    r, rk = nmod_mat(numer, _PRIME).rref()
    pivots = []
    j = 0
    for i in range(rk):
        while not int(r[i, j]):
            j += 1
        pivots.append(j)
    return pivots


def pivot_columns(m: Matrix) -> list[int]:
    """A maximal set of independent columns, lex-first modulo a large prime.

    The modular choice is certified by exact ranks; exact elimination (which
    blows up on wide matrices with large entries) is only the fallback."""
    if m.nrows() == 0 or m.ncols() == 0:
        return []
    piv = _pivots_mod_p(m)
    if rank(take(m, range(m.nrows()), piv)) == len(piv) == rank(m):
        return piv
    return rref(m)[1]


def nullspace(m: Matrix) -> Matrix:
    """Columns form a basis of ``{x : m x = 0}``; one basis vector per free column."""
    n = m.ncols()
    r, pivots = rref(m)
    pivset = set(pivots)
    free = [j for j in range(n) if j not in pivset]
    out = fmpq_mat(n, len(free))
    for k, f in enumerate(free):
        out[f, k] = 1
        for i, p in enumerate(pivots):
            v = r[i, f]
            if v:
                out[p, k] = -v
    return out


def solve(a: Matrix, b: Matrix) -> Matrix | None:
    """Particular solution of ``a x = b`` (free variables set to 0), or None."""
    rows, n = a.nrows(), a.ncols()
    k = b.ncols()
    if rows == 0:
        return fmpq_mat(n, k)
    aug = hstack([a, b], rows)
    r, pivots = rref(aug)
    if any(p >= n for p in pivots):
        return None
    x = fmpq_mat(n, k)
    for i, p in enumerate(pivots):
        for j in range(k):
            v = r[i, n + j]
            if v:
                x[p, j] = v
    return x


def solve_vector(a: Matrix, b: Sequence) -> list | None:
    x = solve(a, from_columns([b], a.nrows()))
    return None if x is None else column(x, 0)


def complement_columns(span: Matrix, candidates: Matrix) -> list[int]:
    """Indices of candidate columns chosen greedily, independent modulo ``span``."""
    nrows = span.nrows()
    aug = hstack([span, candidates], nrows)
    base = span.ncols()
    piv = pivot_columns(aug)
    if sum(1 for p in piv if p < base) != rank(span):
        piv = rref(aug)[1]
    return [p - base for p in piv if p >= base]


def unit_complement(span: Matrix) -> list[int]:
    """Coordinates whose unit vectors complement the column span of ``span``."""
    n = span.nrows()
    if n == 0:
        return []
    aug = hstack([span, identity(n)], n)
    base = span.ncols()
    piv = _pivots_mod_p(aug)
    own = [p for p in piv if p < base]
    if len(piv) == n and rank(take(span, range(n), own)) == len(own) == rank(span) \
            and rank(take(aug, range(n), piv)) == n:
        return [p - base for p in piv if p >= base]
    return [p - base for p in rref(aug)[1] if p >= base]


def inverse(m: Matrix) -> Matrix:
    if m.nrows() == 0:
        return fmpq_mat(0, 0)
    return m.inv()


def is_invertible(m: Matrix) -> bool:
    return m.nrows() == m.ncols() and rank(m) == m.nrows()


def is_symmetric(m: Matrix) -> bool:
    if m.nrows() != m.ncols():
        return False
    n = m.nrows()
    return all(m[i, j] == m[j, i] for i in range(n) for j in range(i + 1, n))


def to_lists(m: Matrix) -> list[list[Fraction]]:
    return [[to_fraction(m[i, j]) for j in range(m.ncols())] for i in range(m.nrows())]


def fmt(x) -> str:
    x = to_fmpq(x)
    return str(int(x.p)) if x.q == 1 else f"{int(x.p)}/{int(x.q)}"


def to_tsv(m: Matrix) -> str:
    return "\n".join(
        "\t".join(fmt(m[i, j]) for j in range(m.ncols())) for i in range(m.nrows())
    )
