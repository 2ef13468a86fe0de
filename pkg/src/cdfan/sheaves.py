"""Sheaves of A-modules on a fan poset and on its chain poset.

Stalks are free graded modules, restrictions are homogeneous maps of
degree 0 stored only along covers. Sections are computed degree by degree
from the maximal elements and the codimension-one compatibility conditions.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import cached_property
from typing import Hashable, Iterable, Sequence

from . import linalg
from .graded import (
    ComponentwiseModule,
    FreeGradedModule,
    FreeWitness,
    MonomialMap,
    MultiDegree,
    as_degree,
    extract_free_basis,
    var_range,
    verification_box,
)
from .linalg import Matrix
from .poset import TOP, ChainPoset, GradedPoset, OrientationData, maximal_flags


class InvalidSheaf(Exception):
    pass


Elem = Hashable


@dataclass
class SheafData:
    name: str
    variables: tuple[int, ...]
    rank: dict[Elem, int]
    lower: dict[Elem, list[Elem]]  # covered elements inside the carrier
    stalks: dict[Elem, FreeGradedModule]
    res: dict[tuple[Elem, Elem], MonomialMap] = field(default_factory=dict)

    @cached_property
    def elements(self) -> list[Elem]:
        return sorted(self.rank, key=lambda e: (self.rank[e], str(e)))

    @cached_property
    def upper(self) -> dict[Elem, list[Elem]]:
        out: dict[Elem, list[Elem]] = {e: [] for e in self.rank}
        for e in self.elements:
            for f in self.lower[e]:
                out[f].append(e)
        return out

    @cached_property
    def maximal(self) -> list[Elem]:
        return [e for e in self.elements if not self.upper[e]]

    def of_rank(self, r: int) -> list[Elem]:
        return [e for e in self.elements if self.rank[e] == r]

    def restriction(self, upper: Elem, lower: Elem) -> MonomialMap:
        if upper == lower:
            return MonomialMap.identity(self.stalks[upper])
        if (upper, lower) in self.res:
            return self.res[upper, lower]
        for mid in self.lower[upper]:
            if self._below(lower, mid):
                return self.restriction(mid, lower).compose(self.res[upper, mid])
        raise KeyError(f"{lower} is not below {upper}")

    def _below(self, a: Elem, b: Elem) -> bool:
        if a == b:
            return True
        return any(self._below(a, c) for c in self.lower[b])

    def restricted(self, keep: Iterable[Elem], variables: Sequence[int] | None = None,
                   name: str | None = None) -> "SheafData":
        keep = set(keep)
        return SheafData(
            name or self.name,
            tuple(self.variables if variables is None else variables),
            {e: r for e, r in self.rank.items() if e in keep},
            {e: [f for f in self.lower[e] if f in keep] for e in self.rank if e in keep},
            {e: m for e, m in self.stalks.items() if e in keep},
            {k: v for k, v in self.res.items() if k[0] in keep and k[1] in keep},
        )

    def composition_failures(self) -> list[tuple[Elem, Elem]]:
        """Length-two intervals where the two restriction paths disagree."""
        bad = []
        for s in self.elements:
            seen: dict[Elem, Matrix] = {}
            for t in self.lower[s]:
                for r in self.lower[t]:
                    m = self.res[t, r].compose(self.res[s, t]).entries
                    if r in seen and seen[r] != m:
                        bad.append((s, r))
                    seen.setdefault(r, m)
        return bad


def direct_sum(a: SheafData, b: SheafData) -> SheafData:
    stalks, res = {}, {}
    for e in a.rank:
        ma, mb = a.stalks[e], b.stalks[e]
        stalks[e] = FreeGradedModule(ma.variables, tuple(
            [(f"a{g}", d) for g, d in ma.gens] + [(f"b{g}", d) for g, d in mb.gens]))
    for (s, t), fa in a.res.items():
        fb = b.res[s, t]
        top = linalg.hstack([fa.entries, linalg.zeros(fa.entries.nrows(), fb.entries.ncols())], fa.entries.nrows())
        bot = linalg.hstack([linalg.zeros(fb.entries.nrows(), fa.entries.ncols()), fb.entries], fb.entries.nrows())
        res[s, t] = MonomialMap(stalks[s], stalks[t], fa.shift, linalg.vstack([top, bot], top.ncols()))
    return SheafData(f"{a.name}+{b.name}", a.variables, dict(a.rank), dict(a.lower), stalks, res)


# ---------------------------------------------------------------------------
# structure sheaves


def _rank_one(variables: Iterable[int]) -> FreeGradedModule:
    return FreeGradedModule(tuple(sorted(variables)), (("1", frozenset()),))


def _projection(src: FreeGradedModule, dst: FreeGradedModule) -> MonomialMap:
    return MonomialMap(src, dst, MultiDegree(), linalg.identity(1))


def sheaf_A(p: GradedPoset) -> SheafData:
    """Stalk at a cone of dimension d is A_{1,d}; restrictions are projections."""
    rank = {e: p.rank[e] for e in p.ids}
    stalks = {e: _rank_one(range(1, rank[e] + 1)) for e in p.ids}
    res = {(s, t): _projection(stalks[s], stalks[t]) for s in p.ids for t in p.down[s]}
    return SheafData(f"A({p.name})", var_range(1, p.rank_n), rank,
                     {e: list(p.down[e]) for e in p.ids}, stalks, res)


def _chain_sheaf(p: GradedPoset, chains: Iterable[tuple[str, ...]], variables: tuple[int, ...],
                 name: str) -> SheafData:
    chains = list(chains)
    present = set(chains)
    rank = {x: len(x) for x in chains}
    lower = {x: [x[:i] + x[i + 1:] for i in range(len(x)) if x[:i] + x[i + 1:] in present] for x in chains}
    stalks = {x: _rank_one(p.rank[s] for s in x) for x in chains}
    res = {(x, y): _projection(stalks[x], stalks[y]) for x in chains for y in lower[x]}
    return SheafData(name, variables, rank, lower, stalks, res)


def sheaf_B(bd: ChainPoset) -> SheafData:
    """Stalk at a chain x is the polynomial ring on the ranks occurring in x."""
    p = bd.base
    return _chain_sheaf(p, bd.chains, var_range(1, p.rank_n), f"B({p.name})")


def flag_sheaf(p: GradedPoset, top: str = TOP) -> SheafData:
    """The part of the sheaf B on chains below ``top`` that sections depend on:
    full flags and the chains missing exactly one element."""
    k = p.rank_of(top) - 1
    flags = maximal_flags(p, top) if k > 0 else [()]
    sub = {f[:i] + f[i + 1:] for f in flags for i in range(len(f))}
    return _chain_sheaf(p, list(flags) + sorted(sub), var_range(1, max(k, 0)), f"B({p.name}|{top})")


# ---------------------------------------------------------------------------
# sections


@dataclass
class SectionSpace(ComponentwiseModule):
    """Global sections per degree; ``ambient[d]`` has the section basis as
    columns in the coordinates listed by ``layout[d]``."""

    layout: dict[MultiDegree, list[tuple[Elem, int]]] = field(default_factory=dict)


def _ambient_layout(sh: SheafData, d: MultiDegree) -> list[tuple[Elem, int]]:
    return [(x, k) for x in sh.maximal for k in range(sh.stalks[x].dim(d))]


def global_sections(sh: SheafData, degrees: Iterable[MultiDegree] | None = None) -> SectionSpace:
    degrees = list(verification_box(sh.variables) if degrees is None else degrees)
    maximal = sh.maximal
    pos = {x: i for i, x in enumerate(maximal)}
    # codimension-one elements and the maximal elements above them
    ridges: dict[Elem, list[Elem]] = {}
    for x in maximal:
        for y in sh.lower[x]:
            ridges.setdefault(y, []).append(x)
    layouts, kernels, dims = {}, {}, {}
    partitions: dict[MultiDegree, list[int]] = {}
    for d in degrees:
        layout = _ambient_layout(sh, d)
        offs, acc = {}, 0
        for x in maximal:
            offs[x] = acc
            acc += sh.stalks[x].dim(d)
        pieces = []
        nrows = 0
        for y, xs in ridges.items():
            ny = sh.stalks[y].dim(d)
            if ny == 0 or len(xs) < 2:
                continue
            xs = sorted(xs, key=pos.get)
            first = sh.res[xs[0], y].component(d)
            for x in xs[1:]:
                pieces.append((nrows, offs[xs[0]], first, 1))
                pieces.append((nrows, offs[x], sh.res[x, y].component(d), -1))
                nrows += ny
        if all(m.nrows() == 1 and m.ncols() == 1 and m[0, 0] == 1 for _, _, m, _ in pieces):
            # every condition equates two coordinates: the kernel is spanned
            # by indicator vectors of connected classes
            part = _classes(acc, [(pieces[t][1], pieces[t + 1][1]) for t in range(0, len(pieces), 2)])
            k = linalg.zeros(acc, max(part, default=-1) + 1)
            for j, c in enumerate(part):
                k[j, c] = 1
            partitions[d] = part
        else:
            cons = linalg.zeros(nrows, acc)
            for r0, c0, m, sgn in pieces:
                for i in range(m.nrows()):
                    for j in range(m.ncols()):
                        v = m[i, j]
                        if v:
                            cons[r0 + i, c0 + j] += sgn * v
            k = linalg.nullspace(cons) if acc else linalg.zeros(0, 0)
        layouts[d], kernels[d], dims[d] = layout, k, k.ncols()
    actions = {}
    for d in degrees:
        for i in sh.variables:
            e = d + MultiDegree.unit(i)
            if e not in kernels:
                continue
            if (d in partitions and e in partitions and layouts[d] == layouts[e]
                    and all(i in sh.stalks[x].variables for x in maximal)):
                x = linalg.zeros(dims[e], dims[d])
                for a, b in zip(partitions[e], partitions[d]):
                    x[a, b] = 1
                actions[d, i] = x
                continue
            amb = _ambient_action(sh, d, i, layouts[d], layouts[e])
            img = amb * kernels[d] if kernels[d].ncols() else linalg.zeros(len(layouts[e]), 0)
            if kernels[e].ncols() == 0:
                if not linalg.is_zero(img):
                    raise InvalidSheaf(f"x_{i} leaves the sections at {d}")
                actions[d, i] = linalg.zeros(0, dims[d])
                continue
            x = linalg.solve(kernels[e], img)
            if x is None:
                raise InvalidSheaf(f"x_{i} leaves the sections at {d}")
            actions[d, i] = x
    return SectionSpace(tuple(sh.variables), dims, actions, kernels, layouts)


def _classes(n: int, pairs: list[tuple[int, int]]) -> list[int]:
    """Class index of each of n points under the equivalence generated by
    ``pairs``; classes are numbered by their smallest member."""
    parent = list(range(n))

    def find(a: int) -> int:
        while parent[a] != a:
            parent[a] = parent[parent[a]]
            a = parent[a]
        return a

    for a, b in pairs:
        ra, rb = find(a), find(b)
        if ra != rb:
            parent[max(ra, rb)] = min(ra, rb)
    label: dict[int, int] = {}
    out = []
    for j in range(n):
        r = find(j)
        if r not in label:
            label[r] = len(label)
        out.append(label[r])
    return out


def _ambient_action(sh: SheafData, d: MultiDegree, i: int, src_layout, dst_layout) -> Matrix:
    out = linalg.zeros(len(dst_layout), len(src_layout))
    r0 = c0 = 0
    for x in sh.maximal:
        m = MonomialMap.variable(sh.stalks[x], i).component(d)
        for a in range(m.nrows()):
            for b in range(m.ncols()):
                if m[a, b]:
                    out[r0 + a, c0 + b] = m[a, b]
        r0 += m.nrows()
        c0 += m.ncols()
    return out


@dataclass
class Sections:
    """Section module with a free basis and explicit representatives."""

    sheaf: SheafData
    space: SectionSpace
    free: FreeGradedModule
    witness: FreeWitness

    def degree_of(self, k: int) -> MultiDegree:
        return MultiDegree.of(self.free.gens[k][1])

    def ambient_vector(self, k: int) -> list:
        d = self.degree_of(k)
        vec = linalg.from_columns([self.witness.gen_vectors[k]], self.space.dims[d])
        return linalg.column(self.space.ambient[d] * vec, 0)

    def rep(self, k: int) -> dict[Elem, list]:
        d = self.degree_of(k)
        out: dict[Elem, list] = {}
        for (x, _), v in zip(self.space.layout[d], self.ambient_vector(k)):
            out.setdefault(x, []).append(v)
        return out

    def value_matrix(self) -> Matrix:
        """Rows: maximal elements; columns: generators. Only meaningful when
        every maximal stalk is one-dimensional in every degree (sheaf B)."""
        cols = [self.ambient_vector(k) for k in range(self.free.rank)]
        return linalg.from_columns(cols, len(self.sheaf.maximal))

    def coords_batch(self, d, vecs: Matrix) -> Matrix | None:
        """Free-basis coordinates (columns) of ambient vectors of degree d."""
        d = as_degree(d)
        c = linalg.solve(self.space.ambient[d], vecs)
        if c is None:
            return None
        if self.space.ambient[d].ncols() and linalg.rank(self.space.ambient[d] * c - vecs) != 0:
            return None
        return linalg.solve(self.witness.iso[d], c)

    def coords(self, d, vec: Sequence) -> list | None:
        n = len(vec)
        out = self.coords_batch(d, linalg.from_columns([vec], n))
        return None if out is None else linalg.column(out, 0)


def sections(sh: SheafData) -> Sections:
    space = global_sections(sh)
    free, witness = extract_free_basis(space)
    return Sections(sh, space, free, witness)


# ---------------------------------------------------------------------------
# pushforward of B and the indecomposable sheaf


def _chain_sign(orient: OrientationData, flag: tuple[str, ...], top: str) -> int:
    return orient.eps(flag, TOP) if top == TOP else _below_sign(orient, flag, top)


def _below_sign(orient: OrientationData, flag: tuple[str, ...], top: str) -> int:
    s, prev = 1, orient.poset.zero
    for f in flag + (top,):
        s *= orient.sign[f, prev]
        prev = f
    return s


@dataclass
class BStalk:
    """Sections of B over the flags of the boundary of ``cone`` (the whole fan
    for TOP); this is the stalk of the pushforward of B modulo x_d."""

    cone: str
    dim: int
    sections: Sections
    flags: list[tuple[str, ...]]

    @property
    def module(self) -> FreeGradedModule:
        return self.sections.free

    def eps(self, orient: OrientationData) -> list[int]:
        if self.dim == 0:
            return [1]
        return [_chain_sign(orient, f, self.cone) for f in self.flags]


def b_stalk(p: GradedPoset, cone: str = TOP) -> BStalk:
    sh = flag_sheaf(p, cone)
    sec = sections(sh)
    return BStalk(cone, p.rank_of(cone), sec, list(sh.maximal))


def root_sections(p: GradedPoset) -> BStalk:
    return b_stalk(p, TOP)


def _restrict_b(p: GradedPoset, big: BStalk, small: BStalk) -> Matrix:
    """Matrix of the restriction from the stalk at ``big.cone`` to the facet
    ``small.cone`` in the free bases."""
    src, dst = big.module, small.module
    out = linalg.zeros(dst.rank, src.rank)
    if small.dim == 0:
        for k, (_, deg) in enumerate(src.gens):
            if not deg:
                out[0, k] = big.sections.ambient_vector(k)[0]
        return out
    index = {f: i for i, f in enumerate(big.flags)}
    rows = [index[f + (small.cone,)] for f in small.flags]
    top_var = big.dim - 1
    for k, (_, deg) in enumerate(src.gens):
        vals = big.sections.ambient_vector(k)
        sub = [vals[r] for r in rows]
        d = MultiDegree.of(deg - {top_var})
        c = small.sections.coords(d, sub)
        if c is None:
            raise InvalidSheaf(f"restriction {big.cone}->{small.cone} is not a section")
        for t, v in zip(dst.component_basis(d), c):
            out[t, k] = v
    return out


@dataclass
class Pushforward:
    """The pushforward of B to the fan: one BStalk per cone plus TOP."""

    poset: GradedPoset
    stalks: dict[str, BStalk]
    sheaf: SheafData  # stalks over A_{1,dim}, restrictions along covers

    @property
    def root(self) -> BStalk:
        return self.stalks[TOP]


def pushforward(p: GradedPoset) -> Pushforward:
    cones = list(p.ids)
    bst = {c: b_stalk(p, c) for c in cones}
    bst[TOP] = b_stalk(p, TOP)
    stalks = {c: FreeGradedModule(var_range(1, p.rank[c]), bst[c].module.gens) for c in cones}
    res = {}
    for s in cones:
        for t in p.down[s]:
            res[s, t] = MonomialMap(stalks[s], stalks[t], MultiDegree(), _restrict_b(p, bst[s], bst[t]))
    sh = SheafData(f"piB({p.name})", var_range(1, p.rank_n), dict(p.rank),
                   {e: list(p.down[e]) for e in cones}, stalks, res)
    return Pushforward(p, bst, sh)


def restrict_top(p: GradedPoset, push: Pushforward, facet: str) -> Matrix:
    """Restriction from the global sections to a maximal cone."""
    return _restrict_b(p, push.root, push.stalks[facet])


def indecomposable_stalks(p: GradedPoset) -> SheafData:
    """The sheaf L built by the boundary recursion: L_0 is the base field and
    L_sigma is the free lift of the sections over the boundary of sigma."""
    rank = dict(p.rank)
    lower = {e: list(p.down[e]) for e in p.ids}
    stalks: dict[str, FreeGradedModule] = {p.zero: FreeGradedModule((), (("g0", frozenset()),))}
    res: dict[tuple[str, str], MonomialMap] = {}
    sh = SheafData(f"L({p.name})", var_range(1, p.rank_n), rank, lower, stalks, res)
    for sigma in p.ids:
        d = rank[sigma]
        if d == 0:
            continue
        below = p.below[sigma]
        part = SheafData(f"L(d{sigma})", var_range(1, d - 1),
                         {e: rank[e] for e in below},
                         {e: [f for f in lower[e] if f in below] for e in below},
                         {e: stalks[e] for e in below},
                         {k: v for k, v in res.items() if k[0] in below and k[1] in below})
        sec = sections(part)
        stalks[sigma] = FreeGradedModule(var_range(1, d), sec.free.gens)
        for tau in p.down[sigma]:
            ent = linalg.zeros(stalks[tau].rank, sec.free.rank)
            for k in range(sec.free.rank):
                deg = sec.degree_of(k)
                vec = sec.rep(k).get(tau, [])
                for t, v in zip(stalks[tau].component_basis(deg), vec):
                    ent[t, k] = v
            res[sigma, tau] = MonomialMap(stalks[sigma], stalks[tau], MultiDegree(), ent)
    return sh


def global_L(p: GradedPoset, L: SheafData | None = None) -> Sections:
    return sections(L if L is not None else indecomposable_stalks(p))


# ---------------------------------------------------------------------------
# cellular complexes


@dataclass
class CellularComplex:
    degree: MultiDegree
    labels: list[list[Elem]]  # the elements contributing to each term
    dims: list[int]
    maps: list[Matrix]  # maps[i]: term i -> term i+1
    augmented: bool = False

    def is_complex(self) -> bool:
        return all(linalg.is_zero(b * a) for a, b in zip(self.maps, self.maps[1:])
                   if a.ncols() and b.nrows())

    def ranks(self) -> list[int]:
        return [linalg.rank(m) for m in self.maps]

    def cohomology(self) -> list[int]:
        r = self.ranks()
        out = []
        for i, n in enumerate(self.dims):
            into = r[i - 1] if i > 0 else 0
            out_of = r[i] if i < len(r) else 0
            out.append(n - out_of - into)
        return out

    @property
    def augmentation_dim(self) -> int:
        """Cokernel of the last map (the whole last term if there is no map)."""
        if not self.dims:
            return 0
        return self.dims[-1] - (linalg.rank(self.maps[-1]) if self.maps else 0)


def _term_block(sh: SheafData, orient: OrientationData, d: MultiDegree,
                src: list[Elem], dst: list[Elem], top_sign: dict[Elem, int] | None = None) -> Matrix:
    rdim = [sh.stalks[t].dim(d) for t in dst]
    cdim = [sh.stalks[s].dim(d) for s in src]
    out = linalg.zeros(sum(rdim), sum(cdim))
    c0 = 0
    dpos = {}
    acc = 0
    for t, n in zip(dst, rdim):
        dpos[t] = acc
        acc += n
    for s, n in zip(src, cdim):
        for t in sh.lower[s]:
            if t not in dpos:
                continue
            sgn = orient.sign[s, t]
            m = sh.res[s, t].component(d)
            r0 = dpos[t]
            for a in range(m.nrows()):
                for b in range(m.ncols()):
                    if m[a, b]:
                        out[r0 + a, c0 + b] = sgn * m[a, b]
        c0 += n
    return out


def cellular_complex(sh: SheafData, orient: OrientationData, d, scope: str = TOP,
                     min_dim: int = 0) -> CellularComplex:
    """Cellular complex at degree d. With ``scope = TOP`` the terms run over
    all cones of the carrier (largest dimension first). With a cone sigma the
    complex is the augmented one: the stalk at sigma modulo x_dim, then the
    cones of its boundary of dimension >= ``min_dim``."""
    d = as_degree(d)
    if scope == TOP:
        top = max(sh.rank.values(), default=-1)
        labels = [[e for e in sh.of_rank(r)] for r in range(top, min_dim - 1, -1)]
        augmented = False
    else:
        below = set()
        stack = list(sh.lower[scope])
        while stack:
            e = stack.pop()
            if e not in below:
                below.add(e)
                stack += sh.lower[e]
        k = sh.rank[scope]
        labels = [[scope]] + [[e for e in sh.of_rank(r) if e in below] for r in range(k - 1, min_dim - 1, -1)]
        augmented = True
    dims = [sum(sh.stalks[e].dim(d) for e in lab) for lab in labels]
    maps = [_term_block(sh, orient, d, a, b) for a, b in zip(labels, labels[1:])]
    return CellularComplex(d, labels, dims, maps, augmented)


def boundary_exact(sh: SheafData, orient: OrientationData, sigma: Elem, min_dim: int = 0,
                   degrees: Iterable[MultiDegree] | None = None) -> dict:
    """Exactness of the augmented complex at sigma in every degree of the box
    on x_min..x_{d-1}; returns per-degree cohomology and augmentation."""
    k = sh.rank[sigma]
    degs = list(verification_box(var_range(max(min_dim, 1), k - 1)) if degrees is None else degrees)
    out = {"exact": True, "G": {}, "complex": True}
    for d in degs:
        cx = cellular_complex(sh, orient, d, sigma, min_dim)
        if not cx.is_complex():
            out["complex"] = False
        h = cx.cohomology()
        # the last term's cohomology is the augmentation; everything else must vanish
        if any(h[:-1]) if len(h) > 1 else False:
            out["exact"] = False
        g = cx.augmentation_dim
        if g:
            out["G"][d] = g
    return out


def check_minimally_flabby(sh: SheafData, orient: OrientationData, m: int) -> dict:
    """Report on minimal flabbiness of ``sh`` restricted to cones of dimension >= m."""
    report: dict = {"min_dim": m, "cones": {}, "ok": True}
    for sigma in sh.elements:
        k = sh.rank[sigma]
        if k < m:
            continue
        entry: dict = {}
        surj = True
        for t in sh.lower[sigma]:
            if sh.rank[t] < m:
                continue
            f = sh.res[sigma, t]
            for d in verification_box(var_range(m, k - 1)):
                c = f.component(d)
                if linalg.rank(c) != c.nrows():
                    surj = False
        entry["surjective"] = surj
        aug = boundary_exact(sh, orient, sigma, m)
        entry["exact"] = aug["exact"] and aug["complex"]
        entry["G"] = {str(d): v for d, v in aug["G"].items()}
        entry["G_vector_space"] = _augmentation_is_trivial_module(sh, orient, sigma, m)
        entry["G_total"] = sum(v for d, v in aug["G"].items() if d.is_squarefree)
        report["cones"][str(sigma)] = entry
        if not (surj and entry["exact"] and entry["G_vector_space"]):
            report["ok"] = False
    totals = [e["G_total"] for e in report["cones"].values()]
    report["max_G"] = max(totals, default=0)
    report["decomposable"] = report["max_G"] > 1
    return report


def _augmentation_is_trivial_module(sh: SheafData, orient: OrientationData, sigma: Elem, m: int) -> bool:
    """x_i maps every G component into zero, i.e. the image of x_i on the
    last term lands inside the image of the last differential."""
    k = sh.rank[sigma]
    variables = var_range(max(m, 1), k - 1)
    for d in verification_box(variables):
        if not d.is_squarefree:
            continue
        for i in variables:
            e = d + MultiDegree.unit(i)
            lo = cellular_complex(sh, orient, d, sigma, m)
            hi = cellular_complex(sh, orient, e, sigma, m)
            if not lo.dims[-1]:
                continue
            last = lo.labels[-1]
            act = _stalk_action(sh, last, d, i)
            img = act
            span = hi.maps[-1] if hi.maps else linalg.zeros(hi.dims[-1], 0)
            if linalg.rank(linalg.hstack([span, img], hi.dims[-1])) != linalg.rank(span):
                return False
    return True


def _stalk_action(sh: SheafData, elems: list[Elem], d: MultiDegree, i: int) -> Matrix:
    blocks = [MonomialMap.variable(sh.stalks[e], i).component(d) for e in elems]
    rows = sum(b.nrows() for b in blocks)
    cols = sum(b.ncols() for b in blocks)
    out = linalg.zeros(rows, cols)
    r0 = c0 = 0
    for b in blocks:
        for a in range(b.nrows()):
            for c in range(b.ncols()):
                if b[a, c]:
                    out[r0 + a, c0 + c] = b[a, c]
        r0 += b.nrows()
        c0 += b.ncols()
    return out


def hilbert_table(sh: SheafData) -> dict[str, dict[str, int]]:
    from .flag import set_key

    out = {}
    for e in sh.elements:
        h: dict[str, int] = {}
        for _, deg in sh.stalks[e].gens:
            key = set_key(deg)
            h[key] = h.get(key, 0) + 1
        out[str(e)] = dict(sorted(h.items()))
    return out
