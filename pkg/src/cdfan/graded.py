"""Multigraded free modules over A = Q[x_l, ..., x_m] with squarefree
generator degrees, degree-homogeneous maps between them, and modules
given degree by degree.

A homogeneous map only stores scalars: the monomial attached to an
entry is forced by the degrees of its source and target generators.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, Mapping, Sequence

from . import linalg
from .flag import SquarefreePoly, subsets
from .linalg import Matrix


class NotFree(Exception):
    pass


@dataclass(frozen=True, order=True)
class MultiDegree:
    exps: tuple[tuple[int, int], ...] = ()

    @classmethod
    def of(cls, data: Mapping[int, int] | Iterable[int] | "MultiDegree" = ()) -> "MultiDegree":
        if isinstance(data, MultiDegree):
            return data
        if isinstance(data, Mapping):
            items = data.items()
        else:
            items = ((i, 1) for i in data)
        acc: dict[int, int] = {}
        for i, e in items:
            if e < 0:
                raise ValueError("negative exponent")
            if e:
                acc[i] = acc.get(i, 0) + e
        return cls(tuple(sorted(acc.items())))

    @classmethod
    def unit(cls, i: int) -> "MultiDegree":
        return cls(((i, 1),))

    def as_dict(self) -> dict[int, int]:
        return dict(self.exps)

    @property
    def support(self) -> frozenset[int]:
        return frozenset(i for i, _ in self.exps)

    def __getitem__(self, i: int) -> int:
        return self.as_dict().get(i, 0)

    def __add__(self, other) -> "MultiDegree":
        other = MultiDegree.of(other)
        acc = self.as_dict()
        for i, e in other.exps:
            acc[i] = acc.get(i, 0) + e
        return MultiDegree.of(acc)

    def __sub__(self, other) -> "MultiDegree":
        other = MultiDegree.of(other)
        acc = self.as_dict()
        for i, e in other.exps:
            acc[i] = acc.get(i, 0) - e
        if any(v < 0 for v in acc.values()):
            raise ValueError("degree difference is not effective")
        return MultiDegree.of(acc)

    def dominates(self, other) -> bool:
        """Componentwise ``self >= other``."""
        mine = self.as_dict()
        return all(mine.get(i, 0) >= e for i, e in MultiDegree.of(other).exps)

    @property
    def is_squarefree(self) -> bool:
        return all(e == 1 for _, e in self.exps)

    def __str__(self) -> str:
        return "(" + ",".join(f"{i}" if e == 1 else f"{i}^{e}" for i, e in self.exps) + ")"


def as_degree(d) -> MultiDegree:
    return MultiDegree.of(d)


def verification_box(variables: Sequence[int]) -> list[MultiDegree]:
    """All squarefree degrees on ``variables`` plus every one-coordinate bump to 2."""
    out = []
    for s in subsets(variables):
        out.append(MultiDegree.of(s))
    for s in subsets(variables):
        for i in sorted(s):
            out.append(MultiDegree.of(s) + MultiDegree.unit(i))
    return out


def var_range(lo: int, hi: int) -> tuple[int, ...]:
    return tuple(range(lo, hi + 1))


@dataclass(frozen=True)
class FreeGradedModule:
    variables: tuple[int, ...]
    gens: tuple[tuple[str, frozenset[int]], ...]

    def __post_init__(self):
        vs = set(self.variables)
        for gid, deg in self.gens:
            if not deg <= vs:
                raise ValueError(f"generator {gid} has degree outside the variables")

    @classmethod
    def over(cls, lo: int, hi: int, gens: Iterable[tuple[str, Iterable[int]]]) -> "FreeGradedModule":
        return cls(var_range(lo, hi), tuple((g, frozenset(d)) for g, d in gens))

    @property
    def rank(self) -> int:
        return len(self.gens)

    @property
    def degrees(self) -> list[frozenset[int]]:
        return [d for _, d in self.gens]

    @property
    def ids(self) -> list[str]:
        return [g for g, _ in self.gens]

    @property
    def lo(self) -> int:
        return self.variables[0] if self.variables else 0

    @property
    def hi(self) -> int:
        return self.variables[-1] if self.variables else -1

    def component_basis(self, d) -> list[int]:
        d = as_degree(d)
        supp = d.support
        if not supp <= set(self.variables):
            return []
        return [k for k, (_, g) in enumerate(self.gens) if g <= supp]

    def dim(self, d) -> int:
        return len(self.component_basis(d))

    def indices_with_degree(self, s: Iterable[int]) -> list[int]:
        s = frozenset(s)
        return [k for k, (_, g) in enumerate(self.gens) if g == s]

    def hilbert(self) -> SquarefreePoly:
        return hilbert_squarefree(self)

    def sub(self, indices: Sequence[int], variables: Sequence[int] | None = None,
            prefix: str | None = None, drop: Iterable[int] = ()) -> "FreeGradedModule":
        """New free module on the chosen generators, optionally over other
        variables and with some coordinates removed from the degrees."""
        drop = frozenset(drop)
        vars_ = tuple(self.variables if variables is None else variables)
        gens = []
        for n, k in enumerate(indices):
            gid, deg = self.gens[k]
            gens.append((gid if prefix is None else f"{prefix}{n}", deg - drop))
        return FreeGradedModule(vars_, tuple(gens))


def component_basis(m: FreeGradedModule, d) -> list[int]:
    return m.component_basis(d)


def hilbert_squarefree(m: FreeGradedModule) -> SquarefreePoly:
    """sum over generators of t^deg; for squarefree degrees this is the
    numerator of the Hilbert series over prod (1 - t_i)."""
    acc: dict[frozenset[int], int] = {}
    for d in m.degrees:
        acc[d] = acc.get(d, 0) + 1
    return SquarefreePoly.from_terms(acc)


@dataclass(frozen=True)
class MonomialMap:
    source: FreeGradedModule
    target: FreeGradedModule
    shift: MultiDegree
    entries: Matrix  # target.rank x source.rank

    @classmethod
    def zero(cls, source, target, shift=()) -> "MonomialMap":
        return cls(source, target, as_degree(shift), linalg.zeros(target.rank, source.rank))

    @classmethod
    def identity(cls, m: FreeGradedModule) -> "MonomialMap":
        return cls(m, m, MultiDegree(), linalg.identity(m.rank))

    @classmethod
    def variable(cls, m: FreeGradedModule, i: int) -> "MonomialMap":
        """Multiplication by x_i."""
        return cls(m, m, MultiDegree.unit(i), linalg.identity(m.rank))

    def allowed(self, t: int, s: int) -> bool:
        """Whether deg(s) + shift - deg(t) is effective."""
        extra = self.shift.support
        return self.target.gens[t][1] <= (self.source.gens[s][1] | extra)

    def violations(self) -> list[tuple[int, int]]:
        e = self.entries
        return [(t, s) for t in range(e.nrows()) for s in range(e.ncols())
                if e[t, s] and not self.allowed(t, s)]

    def is_homogeneous(self) -> bool:
        return not self.violations()

    def component(self, d) -> Matrix:
        d = as_degree(d)
        rows = self.target.component_basis(d + self.shift)
        cols = self.source.component_basis(d)
        return linalg.take(self.entries, rows, cols)

    def compose(self, inner: "MonomialMap") -> "MonomialMap":
        """``self o inner``."""
        out = MonomialMap(inner.source, self.target, inner.shift + self.shift,
                          self.entries * inner.entries)
        return out.reduced()

    def reduced(self) -> "MonomialMap":
        """Drop entries whose monomial uses a variable the target ring lacks
        (such an entry is zero once the target forgets that variable)."""
        vs = set(self.target.variables)
        extra = self.shift.support
        ent = linalg.zeros(self.entries.nrows(), self.entries.ncols())
        for t in range(ent.nrows()):
            dt = self.target.gens[t][1]
            for s in range(ent.ncols()):
                v = self.entries[t, s]
                if v and ((self.source.gens[s][1] | extra) - dt) <= vs:
                    ent[t, s] = v
        return MonomialMap(self.source, self.target, self.shift, ent)

    def apply(self, vec: Sequence, d) -> list:
        """Image of an element of degree d given by coordinates on source.component_basis(d)."""
        m = self.component(d)
        return linalg.column(m * linalg.from_columns([vec], m.ncols()), 0)


def map_component(f: MonomialMap, d) -> Matrix:
    return f.component(d)


def solve_preimage(f: MonomialMap, target_vec: Sequence, target_degree) -> list | None:
    """An element p with f(p) = target_vec, where the target has the given
    degree; None when the target is outside the image (including when the
    degree is not reachable through the shift)."""
    try:
        d = as_degree(target_degree) - f.shift
    except ValueError:
        return None
    m = f.component(d)
    if m.nrows() != len(target_vec):
        raise ValueError("target vector does not match the component dimension")
    if m.ncols() == 0:
        return [] if all(not v for v in target_vec) else None
    return linalg.solve_vector(m, list(target_vec))


# ---------------------------------------------------------------------------
# modules given componentwise


@dataclass
class ComponentwiseModule:
    """Finite-dimensional components on a set of degrees plus the actions
    X_i: M_d -> M_{d+e_i}; ``ambient`` optionally records a basis of every
    component inside some ambient coordinate space."""

    variables: tuple[int, ...]
    dims: dict[MultiDegree, int]
    actions: dict[tuple[MultiDegree, int], Matrix] = field(default_factory=dict)
    ambient: dict[MultiDegree, Matrix] | None = None

    def action(self, d: MultiDegree, i: int) -> Matrix:
        return self.actions[d, i]

    def commutation_failures(self) -> list[tuple[MultiDegree, int, int]]:
        bad = []
        for (d, i), xi in self.actions.items():
            for j in self.variables:
                if j <= i:
                    continue
                di, dj = d + MultiDegree.unit(i), d + MultiDegree.unit(j)
                if (d, j) not in self.actions or (di, j) not in self.actions or (dj, i) not in self.actions:
                    continue
                if self.actions[di, j] * xi != self.actions[dj, i] * self.actions[d, j]:
                    bad.append((d, i, j))
        return bad


@dataclass
class FreeWitness:
    module: FreeGradedModule
    gen_vectors: list[list]  # generator k as coordinates in component deg(k)
    iso: dict[MultiDegree, Matrix]  # free basis of degree d -> component d

    def coords(self, d, vec: Sequence) -> list:
        """Express a component element in the free basis (component_basis(d) order)."""
        d = as_degree(d)
        x = linalg.solve_vector(self.iso[d], list(vec))
        if x is None:
            raise NotFree(f"vector outside component {d}")
        return x


def _pushed(S: ComponentwiseModule, start: MultiDegree, end: MultiDegree, sel: list[int],
            memo: dict) -> Matrix:
    """Images at ``end`` of the unit vectors ``sel`` of component ``start``."""
    key = (start, end)
    if key in memo:
        return memo[key]
    if start == end:
        m = linalg.zeros(S.dims[start], len(sel))
        for c, j in enumerate(sel):
            m[j, c] = 1
    else:
        diff = (end - start).as_dict()
        i = max(diff)
        prev = end - MultiDegree.unit(i)
        m = S.actions[prev, i] * _pushed(S, start, prev, sel, memo)
    memo[key] = m
    return m


def extract_free_basis(S: ComponentwiseModule) -> tuple[FreeGradedModule, FreeWitness]:
    """Choose generators greedily (ascending support size, then lex) and
    verify that the resulting free module matches S on the verification box."""
    if S.commutation_failures():
        raise NotFree("actions do not commute")
    gens: list[tuple[str, frozenset[int]]] = []
    vecs: list[list] = []
    for s in subsets(S.variables):
        d = MultiDegree.of(s)
        n = S.dims.get(d, 0)
        if n == 0:
            continue
        images = []
        for i in sorted(s):
            lower = d - MultiDegree.unit(i)
            if S.dims.get(lower, 0):
                images.append(S.actions[lower, i])
        span = linalg.hstack(images, n) if images else linalg.zeros(n, 0)
        chosen = linalg.complement_columns(span, linalg.identity(n))
        for j in chosen:
            e = [0] * n
            e[j] = 1
            gens.append((f"g{len(gens)}", frozenset(s)))
            vecs.append(e)
    module = FreeGradedModule(tuple(S.variables), tuple(gens))
    by_start: dict[MultiDegree, list[int]] = {}
    for k, (_, deg) in enumerate(gens):
        by_start.setdefault(MultiDegree.of(deg), []).append(k)
    memo: dict = {}
    iso: dict[MultiDegree, Matrix] = {}
    for d in verification_box(S.variables):
        if d not in S.dims:
            continue
        n = S.dims[d]
        basis = module.component_basis(d)
        if len(basis) != n:
            raise NotFree(f"component {d}: dimension {n} but {len(basis)} free generators")
        m = linalg.zeros(n, n)
        col = {k: c for c, k in enumerate(basis)}
        for start, ks in by_start.items():
            if not d.dominates(start) or not start.support <= d.support:
                continue
            sel = [vecs[k].index(1) for k in ks]
            block = _pushed(S, start, d, sel, memo)
            for b, k in enumerate(ks):
                for a in range(n):
                    v = block[a, b]
                    if v:
                        m[a, col[k]] = v
        if linalg.rank(m) != n:
            raise NotFree(f"component {d}: generator images are dependent")
        iso[d] = m
    return module, FreeWitness(module, vecs, iso)
