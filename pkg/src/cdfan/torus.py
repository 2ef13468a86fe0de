"""Transversality witnesses: given V = (+) V_i with nondegenerate symmetric
forms and an isotropic K, find self-adjoint L = (+) L_i with K^perp and L(K)
meeting only in 0."""

from __future__ import annotations

import random
from dataclasses import dataclass

from . import linalg
from .linalg import Matrix
from .pairing import DegeneratePairing

WITNESS_MODES = ("per-coordinate", "per-block-constant")
DEFAULT_WITNESS_BOUND = 2**16


class PreconditionViolated(ValueError):
    pass


@dataclass
class TransversalityInstance:
    blocks: list[Matrix]  # Gram matrices of the V_i
    K: Matrix             # columns span K inside V

    @property
    def dims(self) -> list[int]:
        return [b.nrows() for b in self.blocks]

    @property
    def dim(self) -> int:
        return sum(self.dims)

    def offsets(self) -> list[int]:
        out, acc = [], 0
        for d in self.dims:
            out.append(acc)
            acc += d
        return out

    def gram(self) -> Matrix:
        return block_diag(self.blocks)

    def k_perp(self) -> Matrix:
        if self.K.ncols() == 0:
            return linalg.identity(self.dim)
        return linalg.nullspace(self.K.transpose() * self.gram())

    def is_isotropic(self) -> bool:
        return linalg.is_zero(self.K.transpose() * self.gram() * self.K)

    def projects_onto_blocks(self) -> bool:
        rows = range(self.K.ncols())
        for off, d in zip(self.offsets(), self.dims):
            if linalg.rank(linalg.take(self.K, range(off, off + d), rows)) != d:
                return False
        return True

    def to_json(self) -> dict:
        return {"blocks": [linalg.to_lists(b) for b in self.blocks], "K": linalg.to_lists(self.K)}


@dataclass
class Witness:
    t: list[int]
    attempts: int
    L: Matrix


def block_diag(blocks: list[Matrix]) -> Matrix:
    n = sum(b.nrows() for b in blocks)
    out = linalg.zeros(n, n)
    off = 0
    for b in blocks:
        for i in range(b.nrows()):
            for j in range(b.ncols()):
                if b[i, j]:
                    out[off + i, off + j] = b[i, j]
        off += b.nrows()
    return out


def orthogonal_basis(gram: Matrix) -> Matrix:
    """Columns O with O^T G O diagonal and invertible.

    Pivot on an anisotropic vector of the current complement; if every
    vector there is isotropic, use u + w for a pair with <u, w> != 0."""
    n = gram.nrows()

    def form(u: Matrix, w: Matrix):
        return (u.transpose() * gram * w)[0, 0]

    work = [linalg.from_columns([[1 if i == j else 0 for i in range(n)]], n) for j in range(n)]
    out: list[Matrix] = []
    while work:
        pivot = next((k for k, v in enumerate(work) if form(v, v)), None)
        drop = pivot
        if pivot is None:
            pair = next(((a, b) for a in range(len(work)) for b in range(a + 1, len(work))
                         if form(work[a], work[b])), None)
            if pair is None:
                raise DegeneratePairing("form vanishes on a nonzero subspace")
            a, b = pair
            v = work[a] + work[b]
            drop = a
        else:
            v = work[pivot]
        vv = form(v, v)
        out.append(v)
        work = [w - v * (form(w, v) / vv) for k, w in enumerate(work) if k != drop]
    return linalg.hstack(out, n)


def _operator(inst: TransversalityInstance, bases: list[Matrix], t: list[int], mode: str) -> Matrix:
    parts = []
    k = 0
    for o in bases:
        d = o.nrows()
        if mode == "per-coordinate":
            diag = linalg.zeros(d, d)
            for i in range(d):
                diag[i, i] = t[k + i]
            parts.append(o * diag * linalg.inverse(o))
            k += d
        else:
            parts.append(linalg.identity(d) * t[k])
            k += 1
    return block_diag(parts)


def transverse(inst: TransversalityInstance, L: Matrix, perp: Matrix | None = None) -> bool:
    perp = inst.k_perp() if perp is None else perp
    lk = L * inst.K
    both = linalg.hstack([perp, lk], inst.dim)
    return linalg.rank(both) == perp.ncols() + inst.K.ncols()


def torus_transverse_witness(inst: TransversalityInstance, rng: random.Random, mode: str = "per-coordinate",
                             bound: int = DEFAULT_WITNESS_BOUND, retries: int = 8) -> Witness | None:
    """Sample torus scalars until K^perp and t(K) meet only in 0; None after
    ``retries`` failed samples."""
    if mode not in WITNESS_MODES:
        raise ValueError(f"unknown witness mode {mode!r}")
    if not inst.is_isotropic():
        raise PreconditionViolated("K is not contained in its orthogonal complement")
    if mode == "per-block-constant" and not inst.projects_onto_blocks():
        raise PreconditionViolated("K does not map onto every block")
    bases = [orthogonal_basis(b) for b in inst.blocks] if mode == "per-coordinate" else \
        [linalg.identity(d) for d in inst.dims]
    count = inst.dim if mode == "per-coordinate" else len(inst.blocks)
    perp = inst.k_perp()
    for attempt in range(1, retries + 1):
        t = [rng.randint(-bound, bound) for _ in range(count)]
        L = _operator(inst, bases, t, mode)
        if transverse(inst, L, perp):
            return Witness(t, attempt, L)
    return None


# ---------------------------------------------------------------------------
# random instances


def _conjugate(rng: random.Random, blocks: list[list[int]],
               pairs: list[tuple[int, int, int]]) -> TransversalityInstance:
    """Diagonal +-1 blocks with K spanned by e_p + s e_q (p, q of opposite
    sign), then a random integral change of basis in each block."""
    n = sum(len(b) for b in blocks)
    kcols = []
    for p, q, s in pairs:
        col = [0] * n
        col[p] = 1
        col[q] = s
        kcols.append(col)
    K = linalg.from_columns(kcols, n)
    grams, inv = [], []
    for signs in blocks:
        d = len(signs)
        a = linalg.identity(d)
        for i in range(d):
            for j in range(d):
                if i != j and rng.random() < 0.5:
                    a[i, j] = rng.randint(-3, 3)
        while not linalg.is_invertible(a):
            a[rng.randrange(d), rng.randrange(d)] += 1
        diag = linalg.zeros(d, d)
        for i, s in enumerate(signs):
            diag[i, i] = s
        grams.append(a.transpose() * diag * a)
        inv.append(linalg.inverse(a))
    K = block_diag(inv) * K
    # hide the pair structure with a random change of basis of K
    m = len(pairs)
    if m:
        mix = linalg.identity(m)
        for i in range(m):
            for j in range(i + 1, m):
                mix[i, j] = rng.randint(-2, 2)
        K = K * mix
    return TransversalityInstance(grams, K)


def random_instance(rng: random.Random, max_dim: int = 12) -> TransversalityInstance:
    """K = K^perp: a random perfect matching of + and - coordinates, spread
    over 1 to 4 blocks."""
    half = rng.randint(1, max_dim // 2)
    signs = [1] * half + [-1] * half
    rng.shuffle(signs)
    nblocks = rng.randint(1, min(4, 2 * half))
    cuts = sorted(rng.sample(range(1, 2 * half), nblocks - 1))
    bounds = [0] + cuts + [2 * half]
    blocks = [signs[a:b] for a, b in zip(bounds, bounds[1:])]
    plus = [i for i, s in enumerate(signs) if s > 0]
    minus = [i for i, s in enumerate(signs) if s < 0]
    rng.shuffle(minus)
    pairs = [(p, q, rng.choice((1, -1))) for p, q in zip(plus, minus)]
    return _conjugate(rng, blocks, pairs)


def random_constant_instance(rng: random.Random, max_dim: int = 12, nblocks: int | None = None) -> TransversalityInstance:
    """Isotropic pairs always join coordinates of two different blocks, so K
    maps onto every block."""
    nblocks = nblocks or rng.randint(2, 4)
    half = rng.randint(1, max_dim // 2)
    coords: list[list[tuple[int, int]]] = [[] for _ in range(nblocks)]  # per block: (pair id, sign)
    for k in range(half):
        i, j = rng.sample(range(nblocks), 2)
        coords[i].append((k, 1))
        coords[j].append((k, -1))
    coords = [c for c in coords if c]
    blocks, where, off = [], {}, 0
    for c in coords:
        blocks.append([s for _, s in c])
        for r, (k, s) in enumerate(c):
            where[k, s] = off + r
        off += len(c)
    pairs = [(where[k, 1], where[k, -1], rng.choice((1, -1))) for k in range(half)]
    return _conjugate(rng, blocks, pairs)
