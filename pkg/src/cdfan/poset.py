"""Graded face posets of complete fans, their barycentric subdivisions
and incidence orientations.

A fan is handled purely combinatorially: a finite graded poset with a
unique rank-0 element (the zero cone) whose maximal elements all have
rank ``n``.  The top element of rank ``n + 1`` is never stored; it is
added on the fly under the id :data:`TOP`.
"""

from __future__ import annotations

import itertools
import json
from collections import deque
from dataclasses import dataclass, field
from functools import cached_property
from pathlib import Path
from typing import Iterable, Iterator

TOP = "^1"
DEFAULT_DIM_CAP = 6


class PosetError(Exception):
    pass


class UnsupportedSize(PosetError):
    pass


class InvalidPoset(PosetError):
    pass


class NoOrientation(PosetError):
    pass


class ParseError(PosetError):
    def __init__(self, msg: str, line: int | None = None):
        self.line = line
        super().__init__(f"line {line}: {msg}" if line is not None else msg)


class SchemaError(PosetError):
    def __init__(self, msg: str, field: str | None = None):
        self.field = field
        super().__init__(f"{field}: {msg}" if field else msg)


@dataclass(frozen=True)
class GradedPoset:
    name: str
    rank_n: int
    elements: tuple[tuple[str, int], ...]
    covers: tuple[tuple[str, str], ...]

    @classmethod
    def make(cls, name: str, rank_n: int, elements: Iterable[tuple[str, int]],
             covers: Iterable[tuple[str, str]]) -> "GradedPoset":
        elems = tuple(sorted(set(elements), key=lambda e: (e[1], e[0])))
        return cls(name, rank_n, elems, tuple(sorted(set(covers))))

    # --- lookups -------------------------------------------------------

    @cached_property
    def rank(self) -> dict[str, int]:
        return dict(self.elements)

    @cached_property
    def ids(self) -> list[str]:
        return [e for e, _ in self.elements]

    @cached_property
    def by_rank(self) -> dict[int, list[str]]:
        out: dict[int, list[str]] = {}
        for e, r in self.elements:
            out.setdefault(r, []).append(e)
        return out

    @cached_property
    def down(self) -> dict[str, list[str]]:
        out: dict[str, list[str]] = {e: [] for e in self.ids}
        for lo, up in self.covers:
            out[up].append(lo)
        return {k: sorted(v) for k, v in out.items()}

    @cached_property
    def up(self) -> dict[str, list[str]]:
        out: dict[str, list[str]] = {e: [] for e in self.ids}
        for lo, up in self.covers:
            out[lo].append(up)
        return {k: sorted(v) for k, v in out.items()}

    @property
    def zero(self) -> str:
        zs = self.by_rank.get(0, [])
        if len(zs) != 1:
            raise InvalidPoset("poset must have exactly one rank-0 element")
        return zs[0]

    @cached_property
    def maximal(self) -> list[str]:
        return [e for e in self.ids if not self.up[e]]

    def rank_of(self, e: str) -> int:
        return self.rank_n + 1 if e == TOP else self.rank[e]

    def facets_of(self, e: str) -> list[str]:
        """Elements covered by ``e``; the virtual top covers the maximal cones."""
        return self.maximal if e == TOP else self.down[e]

    def cofacets_of(self, e: str) -> list[str]:
        ups = self.up[e]
        return ups if ups else [TOP]

    @cached_property
    def below(self) -> dict[str, frozenset[str]]:
        """Strict down-sets."""
        out: dict[str, frozenset[str]] = {}
        for e in self.ids:
            acc: set[str] = set()
            for f in self.down[e]:
                acc.add(f)
                acc |= out[f]
            out[e] = frozenset(acc)
        return out

    def leq(self, a: str, b: str) -> bool:
        if b == TOP or a == b:
            return True
        if a == TOP:
            return False
        return a in self.below[b]

    def faces(self, sigma: str) -> list[str]:
        """Elements ``<= sigma`` sorted by (rank, id)."""
        if sigma == TOP:
            return list(self.ids)
        keep = self.below[sigma] | {sigma}
        return [e for e in self.ids if e in keep]

    def boundary(self, sigma: str) -> "GradedPoset":
        """The boundary fan of ``sigma`` as a poset of rank ``dim sigma - 1``."""
        if sigma == TOP:
            return self
        keep = self.below[sigma]
        return GradedPoset.make(
            f"{self.name}/d[{sigma}]",
            self.rank[sigma] - 1,
            [(e, self.rank[e]) for e in keep],
            [(a, b) for a, b in self.covers if a in keep and b in keep],
        )

    def without(self, elem: str) -> "GradedPoset":
        return GradedPoset.make(
            f"{self.name}-{elem}",
            self.rank_n,
            [(e, r) for e, r in self.elements if e != elem],
            [(a, b) for a, b in self.covers if elem not in (a, b)],
        )

    def face_counts(self) -> list[int]:
        return [len(self.by_rank.get(r, [])) for r in range(self.rank_n + 1)]

    def check_dim_cap(self, cap: int = DEFAULT_DIM_CAP) -> None:
        if self.rank_n > cap:
            raise UnsupportedSize(f"dimension {self.rank_n} exceeds cap {cap}")


# ---------------------------------------------------------------------------
# built-in families


def _subset_id(prefix: str, s: Iterable) -> str:
    s = list(s)
    return "0" if not s else prefix + ".".join(str(v) for v in s)


def simplex_fan(n: int) -> GradedPoset:
    verts = range(n + 1)
    elems, covers = [], []
    for k in range(n + 1):
        for s in itertools.combinations(verts, k):
            elems.append((_subset_id("v", s), k))
            for drop in s:
                covers.append((_subset_id("v", [v for v in s if v != drop]), _subset_id("v", s)))
    return GradedPoset.make(f"simplex_fan({n})", n, elems, covers)


def cube_fan(n: int) -> GradedPoset:
    # proper faces of [0,1]^n as words over {0,1,*}; the cone over a k-face has rank k+1
    elems, covers = [("0", 0)], []
    for word in itertools.product("01*", repeat=n):
        k = word.count("*")
        if k == n:
            continue
        w = "".join(word)
        elems.append(("q" + w, k + 1))
        if k == 0:
            covers.append(("0", "q" + w))
        for i, ch in enumerate(word):
            if ch == "*":
                for b in "01":
                    covers.append(("q" + w[:i] + b + w[i + 1:], "q" + w))
    return GradedPoset.make(f"cube_fan({n})", n, elems, covers)


def crosspoly_fan(n: int) -> GradedPoset:
    # simplicial faces of the cross-polytope: sign vectors over a coordinate subset
    elems, covers = [], []
    for k in range(n + 1):
        for coords in itertools.combinations(range(1, n + 1), k):
            for signs in itertools.product("+-", repeat=k):
                face = list(zip(signs, coords))
                fid = "0" if not face else "x" + "".join(f"{s}{c}" for s, c in face)
                elems.append((fid, k))
                for i in range(k):
                    sub = face[:i] + face[i + 1:]
                    sid = "0" if not sub else "x" + "".join(f"{s}{c}" for s, c in sub)
                    covers.append((sid, fid))
    return GradedPoset.make(f"crosspoly_fan({n})", n, elems, covers)


def polygon_fan(m: int) -> GradedPoset:
    elems = [("0", 0)]
    covers = []
    for i in range(m):
        elems.append((f"r{i}", 1))
        elems.append((f"c{i}", 2))
        covers.append(("0", f"r{i}"))
        covers.append((f"r{i}", f"c{i}"))
        covers.append((f"r{(i + 1) % m}", f"c{i}"))
    return GradedPoset.make(f"polygon_fan({m})", 2, elems, covers)


FAMILIES = {
    "simplex_fan": simplex_fan,
    "cube_fan": cube_fan,
    "crosspoly_fan": crosspoly_fan,
    "polygon_fan": polygon_fan,
}


def build_named(family: str, size: int, dim_cap: int = DEFAULT_DIM_CAP) -> GradedPoset:
    family = family if family in FAMILIES else f"{family}_fan"
    if family not in FAMILIES:
        raise UnsupportedSize(f"unknown family {family!r}")
    if family == "polygon_fan":
        if size < 3:
            raise UnsupportedSize("a polygon fan needs at least 3 rays")
    elif size < 1 or size > dim_cap:
        raise UnsupportedSize(f"{family} dimension must be in 1..{dim_cap}, got {size}")
    return FAMILIES[family](size)


# ---------------------------------------------------------------------------
# validation


@dataclass
class ValidationReport:
    checks: dict[str, tuple[bool, str]] = field(default_factory=dict)

    def add(self, name: str, ok: bool, msg: str = "") -> None:
        self.checks[name] = (ok, msg)

    @property
    def ok(self) -> bool:
        return all(ok for ok, _ in self.checks.values())

    def failures(self) -> dict[str, str]:
        return {k: m for k, (ok, m) in self.checks.items() if not ok}

    def to_json(self) -> dict:
        return {k: {"ok": ok, "detail": m} for k, (ok, m) in self.checks.items()}


def _completed(p: GradedPoset) -> tuple[list[str], dict[str, int], dict[str, list[str]]]:
    elems = list(p.ids) + [TOP]
    rank = dict(p.rank)
    rank[TOP] = p.rank_n + 1
    up = {e: list(p.up.get(e, [])) for e in p.ids}
    for m in p.maximal:
        up[m].append(TOP)
    up[TOP] = []
    return elems, rank, up


def _upsets(elems, up) -> dict[str, int]:
    """Bitmask of the closed up-set of every element (index order = ``elems``)."""
    index = {e: i for i, e in enumerate(elems)}
    memo: dict[str, int] = {}

    def go(e: str) -> int:
        if e not in memo:
            mask = 1 << index[e]
            for u in up[e]:
                mask |= go(u)
            memo[e] = mask
        return memo[e]

    for e in reversed(elems):
        go(e)
    return memo


def is_eulerian(p: GradedPoset) -> tuple[bool, str]:
    """Parity check: every interval [a, b], a < b, of the completed poset has
    as many odd-rank as even-rank elements."""
    elems, rank, up = _completed(p)
    ups = _upsets(elems, up)
    downs = {e: 0 for e in elems}
    for i, e in enumerate(elems):
        m = ups[e]
        for j, f in enumerate(elems):
            if m >> j & 1:
                downs[f] |= 1 << i
    odd = sum(1 << i for i, e in enumerate(elems) if rank[e] % 2)
    for a in elems:
        ua = ups[a]
        for j, b in enumerate(elems):
            if b == a or not (ua >> j & 1):
                continue
            iv = ua & downs[b]
            n_odd = bin(iv & odd).count("1")
            if 2 * n_odd != bin(iv).count("1"):
                return False, f"interval [{a}, {b}] is unbalanced"
    return True, ""


def mobius(p: GradedPoset) -> dict[tuple[str, str], int]:
    """Mobius function of the completed poset on all comparable pairs."""
    elems, rank, up = _completed(p)
    ups = _upsets(elems, up)
    index = {e: i for i, e in enumerate(elems)}
    order = sorted(elems, key=lambda e: (rank[e], e))
    mu: dict[tuple[str, str], int] = {}
    for a in elems:
        above = [b for b in order if ups[a] >> index[b] & 1]
        for b in above:
            if b == a:
                mu[a, b] = 1
                continue
            s = 0
            for c in above:
                if c == b or rank[c] >= rank[b]:
                    continue
                if ups[c] >> index[b] & 1:
                    s += mu[a, c]
            mu[a, b] = -s
    return mu


def is_eulerian_mobius(p: GradedPoset) -> bool:
    elems, rank, _ = _completed(p)
    return all(v == (-1) ** (rank[b] - rank[a]) for (a, b), v in mobius(p).items())


def validate(p: GradedPoset) -> ValidationReport:
    rep = ValidationReport()
    ids = [e for e, _ in p.elements]
    rep.add("unique_ids", len(ids) == len(set(ids)), "duplicate element ids" if len(ids) != len(set(ids)) else "")
    known = set(ids)
    bad = [c for c in p.covers if c[0] not in known or c[1] not in known]
    rep.add("covers_known", not bad, f"unknown ids in covers: {bad[:3]}" if bad else "")
    if bad:
        return rep
    zeros = p.by_rank.get(0, [])
    rep.add("unique_zero", len(zeros) == 1, f"{len(zeros)} elements of rank 0")
    ranks_ok = all(0 <= r <= p.rank_n for _, r in p.elements)
    rep.add("rank_range", ranks_ok, "" if ranks_ok else "rank outside 0..n")
    gaps = [(a, b) for a, b in p.covers if p.rank[b] != p.rank[a] + 1]
    rep.add("consecutive_covers", not gaps, f"non-consecutive covers {gaps[:3]}" if gaps else "")
    impure = [e for e in p.maximal if p.rank[e] != p.rank_n]
    rep.add("pure", not impure, f"maximal elements of wrong rank: {impure[:3]}" if impure else "")
    if len(zeros) == 1:
        unreachable = [e for e in ids if e != zeros[0] and not p.down[e]]
        rep.add("graded_from_zero", not unreachable, f"elements without lower covers: {unreachable[:3]}" if unreachable else "")
    if not rep.ok:
        return rep
    elems, rank, up = _completed(p)
    broken = []
    for a in elems:
        mids: dict[str, int] = {}
        for b in up[a]:
            for c in up[b]:
                mids[c] = mids.get(c, 0) + 1
        broken += [(a, c, k) for c, k in mids.items() if k != 2]
    rep.add("diamond", not broken,
            f"length-2 intervals without exactly two middles: {broken[:3]}" if broken else "")
    ok, msg = is_eulerian(p)
    rep.add("eulerian", ok, msg)
    return rep


def require_valid(p: GradedPoset) -> None:
    rep = validate(p)
    if not rep.ok:
        raise InvalidPoset("; ".join(f"{k}: {m}" for k, m in rep.failures().items()))


# ---------------------------------------------------------------------------
# barycentric subdivision


@dataclass(frozen=True)
class ChainPoset:
    """Chains ``0 < s_1 < ... < s_m`` of nonzero cones, ordered by containment."""

    base: GradedPoset
    chains: tuple[tuple[str, ...], ...]

    @cached_property
    def label(self) -> dict[tuple[str, ...], frozenset[int]]:
        return {x: frozenset(self.base.rank[s] for s in x) for x in self.chains}

    @cached_property
    def maximal(self) -> list[tuple[str, ...]]:
        n = self.base.rank_n
        return [x for x in self.chains if len(x) == n]

    def pi(self, x: tuple[str, ...]) -> str:
        return x[-1] if x else self.base.zero

    def rank(self, x: tuple[str, ...]) -> int:
        return len(x)

    def leq(self, x: tuple[str, ...], y: tuple[str, ...]) -> bool:
        return set(x) <= set(y)


def iter_chains(p: GradedPoset, top: str = TOP) -> Iterator[tuple[str, ...]]:
    """All chains of nonzero cones strictly below ``top`` (including the empty chain)."""
    zero = p.zero
    cand = [e for e in p.faces(top) if e != zero and e != top]

    def ext(chain: tuple[str, ...], start: int) -> Iterator[tuple[str, ...]]:
        yield chain
        for i in range(start, len(cand)):
            e = cand[i]
            if not chain or p.leq(chain[-1], e) and chain[-1] != e:
                yield from ext(chain + (e,), i + 1)

    yield from ext((), 0)


def maximal_flags(p: GradedPoset, top: str = TOP) -> list[tuple[str, ...]]:
    """Full flags ``s_1 < ... < s_k`` with rank s_i = i below ``top``,
    where k = rank(top) - 1; sorted lexicographically."""
    k = p.rank_of(top) - 1
    out: list[tuple[str, ...]] = []

    def go(chain: tuple[str, ...], cur: str) -> None:
        if len(chain) == k:
            out.append(chain)
            return
        for f in p.facets_of(cur):
            go((f,) + chain, f)

    if k == 0:
        return [()]
    go((), top)
    return sorted(out)


def barycentric(p: GradedPoset) -> ChainPoset:
    require_valid(p)
    chains = sorted(iter_chains(p), key=lambda x: (len(x), x))
    return ChainPoset(p, tuple(chains))


# ---------------------------------------------------------------------------
# orientations


@dataclass(frozen=True)
class OrientationData:
    poset: GradedPoset
    sign: dict[tuple[str, str], int]  # (upper, lower) -> +-1, includes (TOP, maximal)

    def sign_of(self, upper: str, lower: str) -> int:
        return self.sign[upper, lower]

    def eps(self, flag: tuple[str, ...], top: str = TOP) -> int:
        """Product of incidence signs along ``0 < flag[0] < ... < flag[-1] < top``."""
        zero = self.poset.zero
        s = 1
        prev = zero
        for f in flag:
            s *= self.sign[f, prev]
            prev = f
        return s * self.sign[top, prev]

    @cached_property
    def eps_max(self) -> dict[tuple[str, ...], int]:
        return {x: self.eps(x) for x in maximal_flags(self.poset)}

    def with_sign(self, upper: str, lower: str, value: int) -> "OrientationData":
        s = dict(self.sign)
        s[upper, lower] = value
        return OrientationData(self.poset, s)

    def violations(self) -> list[tuple[str, str]]:
        """Length-2 intervals [rho, sigma] where the two sign products do not cancel."""
        p = self.poset
        bad = []
        for sigma in p.ids + [TOP]:
            if p.rank_of(sigma) < 2:
                continue
            acc: dict[str, int] = {}
            for tau in p.facets_of(sigma):
                for rho in p.facets_of(tau):
                    acc[rho] = acc.get(rho, 0) + self.sign[sigma, tau] * self.sign[tau, rho]
            bad += [(rho, sigma) for rho, v in acc.items() if v != 0]
        return bad


def incidence_orientation(p: GradedPoset) -> OrientationData:
    """Signs or(sigma, tau) with every length-2 interval cancelling.

    Solved element by element in increasing rank: with the signs below
    ``sigma`` fixed, the facets of ``sigma`` form a graph (two facets are
    joined through each ridge) and each edge fixes the parity of the two
    unknown signs.  The lexicographically first facet of every connected
    component gets sign +1.
    """
    rep = validate(p)
    if not rep.checks.get("diamond", (False,))[0]:
        raise NoOrientation("poset fails the diamond property")
    sign: dict[tuple[str, str], int] = {}
    order = sorted(p.ids, key=lambda e: (p.rank[e], e)) + [TOP]
    for sigma in order:
        if sigma != TOP and p.rank[sigma] == 0:
            continue
        facets = p.facets_of(sigma)
        if p.rank_of(sigma) == 1:
            for t in facets:
                sign[sigma, t] = 1
            continue
        # edges: ridge rho shared by facets t1, t2 requires s1*s(t1,rho) = -s2*s(t2,rho)
        adj: dict[str, list[tuple[str, int]]] = {t: [] for t in facets}
        ridge_home: dict[str, list[str]] = {}
        for t in facets:
            for rho in p.facets_of(t):
                ridge_home.setdefault(rho, []).append(t)
        for rho, ts in ridge_home.items():
            if len(ts) != 2:
                raise NoOrientation(f"ridge {rho} of {sigma} lies in {len(ts)} facets")
            t1, t2 = ts
            rel = -sign[t1, rho] * sign[t2, rho]  # s2 = rel * s1
            adj[t1].append((t2, rel))
            adj[t2].append((t1, rel))
        val: dict[str, int] = {}
        for start in facets:
            if start in val:
                continue
            val[start] = 1
            queue = deque([start])
            while queue:
                t = queue.popleft()
                for u, rel in adj[t]:
                    want = rel * val[t]
                    if u not in val:
                        val[u] = want
                        queue.append(u)
                    elif val[u] != want:
                        raise NoOrientation(f"inconsistent incidence signs below {sigma}")
        for t in facets:
            sign[sigma, t] = val[t]
    return OrientationData(p, sign)


def restrict_orientation(orient: OrientationData, sigma: str) -> OrientationData:
    """Orientation of the boundary fan of ``sigma`` with ``sigma`` as its top."""
    if sigma == TOP:
        return orient
    sub = orient.poset.boundary(sigma)
    keep = set(sub.ids)
    sign = {(a, b): v for (a, b), v in orient.sign.items() if a in keep and b in keep}
    for t in orient.poset.down[sigma]:
        sign[TOP, t] = orient.sign[sigma, t]
    return OrientationData(sub, sign)


# ---------------------------------------------------------------------------
# JSON


def to_json(p: GradedPoset) -> dict:
    return {
        "name": p.name,
        "rank": p.rank_n,
        "elements": [{"id": e, "rank": r} for e, r in sorted(p.elements, key=lambda e: (e[1], e[0]))],
        "covers": [list(c) for c in sorted(p.covers)],
    }


def serialize(p: GradedPoset, path: str | Path | None = None) -> str:
    text = json.dumps(to_json(p), indent=1, sort_keys=True) + "\n"
    if path is not None:
        Path(path).write_text(text)
    return text


def from_json(data) -> GradedPoset:
    if not isinstance(data, dict):
        raise SchemaError("top level must be an object")
    for key, typ in (("name", str), ("rank", int), ("elements", list), ("covers", list)):
        if key not in data:
            raise SchemaError("missing required field", key)
        if not isinstance(data[key], typ) or isinstance(data[key], bool):
            raise SchemaError(f"expected {typ.__name__}", key)
    n = data["rank"]
    if n < 1:
        raise SchemaError("rank must be >= 1", "rank")
    seen: set[str] = set()
    elems = []
    for i, el in enumerate(data["elements"]):
        where = f"elements[{i}]"
        if not isinstance(el, dict) or "id" not in el or "rank" not in el:
            raise SchemaError("element needs 'id' and 'rank'", where)
        eid, r = el["id"], el["rank"]
        if not isinstance(eid, str) or not isinstance(r, int) or isinstance(r, bool):
            raise SchemaError("id must be a string and rank an integer", where)
        if eid in seen:
            raise SchemaError(f"duplicate id {eid!r}", where + ".id")
        if eid == TOP:
            raise SchemaError(f"id {TOP!r} is reserved", where + ".id")
        if not 0 <= r <= n:
            raise SchemaError(f"rank {r} outside 0..{n}", where + ".rank")
        seen.add(eid)
        elems.append((eid, r))
    present = {r for _, r in elems}
    missing = [r for r in range(n + 1) if r not in present]
    if missing:
        raise SchemaError(f"rank gap: no elements of rank {missing}", "elements")
    if sum(1 for _, r in elems if r == 0) != 1:
        raise SchemaError("exactly one rank-0 element is required", "elements")
    rank = dict(elems)
    covers = []
    for i, c in enumerate(data["covers"]):
        where = f"covers[{i}]"
        if not (isinstance(c, list) and len(c) == 2 and all(isinstance(v, str) for v in c)):
            raise SchemaError("cover must be a [lowId, upId] pair", where)
        lo, up = c
        for v in (lo, up):
            if v not in rank:
                raise SchemaError(f"unknown id {v!r}", where)
        if rank[up] != rank[lo] + 1:
            raise SchemaError(f"rank gap between {lo!r} and {up!r}", where)
        covers.append((lo, up))
    return GradedPoset.make(data["name"], n, elems, covers)


def ingest(path: str | Path) -> GradedPoset:
    text = Path(path).read_text()
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ParseError(exc.msg, exc.lineno) from exc
    return from_json(data)
