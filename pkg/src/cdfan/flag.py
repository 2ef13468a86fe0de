"""Flag f- and h-vectors, the phi embedding of cd-words into squarefree
t-polynomials, and cd-index extraction."""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from fractions import Fraction
from math import comb
from typing import Iterable, Mapping

from . import linalg
from .poset import GradedPoset, require_valid


class NotInCdSpan(ValueError):
    def __init__(self, msg: str, residual: dict | None = None):
        self.residual = residual or {}
        super().__init__(msg)


class LengthMismatch(ValueError):
    pass


def subsets(ground: Iterable[int]) -> list[frozenset[int]]:
    """All subsets ordered by size, then lexicographically."""
    ground = sorted(ground)
    return [frozenset(c) for k in range(len(ground) + 1) for c in itertools.combinations(ground, k)]


def set_key(s: Iterable[int]) -> str:
    return ",".join(str(i) for i in sorted(s))


@dataclass
class FlagVector:
    n: int
    entries: dict[frozenset[int], int]

    def __getitem__(self, s) -> int:
        return self.entries.get(frozenset(s), 0)

    def to_json(self) -> dict[str, int]:
        return {set_key(s): v for s, v in sorted(self.entries.items(), key=lambda kv: (len(kv[0]), sorted(kv[0])))}


@dataclass
class SquarefreePoly:
    """sum_S a_S prod_{i in S} t_i with exact rational coefficients."""

    coeffs: dict[frozenset[int], Fraction] = field(default_factory=dict)

    @classmethod
    def one(cls) -> "SquarefreePoly":
        return cls({frozenset(): Fraction(1)})

    @classmethod
    def from_terms(cls, terms: Mapping) -> "SquarefreePoly":
        out: dict[frozenset[int], Fraction] = {}
        for s, c in terms.items():
            s = frozenset(s)
            out[s] = out.get(s, Fraction(0)) + Fraction(c)
        return cls({s: c for s, c in out.items() if c})

    def variables(self) -> set[int]:
        return set().union(*self.coeffs) if self.coeffs else set()

    def __add__(self, other: "SquarefreePoly") -> "SquarefreePoly":
        out = dict(self.coeffs)
        for s, c in other.coeffs.items():
            out[s] = out.get(s, Fraction(0)) + c
        return SquarefreePoly({s: c for s, c in out.items() if c})

    def scale(self, k) -> "SquarefreePoly":
        k = Fraction(k)
        return SquarefreePoly({s: c * k for s, c in self.coeffs.items() if c * k})

    def __mul__(self, other: "SquarefreePoly") -> "SquarefreePoly":
        out: dict[frozenset[int], Fraction] = {}
        for s, a in self.coeffs.items():
            for t, b in other.coeffs.items():
                if s & t:
                    raise ValueError("product leaves the squarefree range")
                u = s | t
                out[u] = out.get(u, Fraction(0)) + a * b
        return SquarefreePoly({s: c for s, c in out.items() if c})

    def __eq__(self, other) -> bool:
        if not isinstance(other, SquarefreePoly):
            return NotImplemented
        return self.coeffs == other.coeffs

    def __getitem__(self, s) -> Fraction:
        return self.coeffs.get(frozenset(s), Fraction(0))

    def evaluate(self, point: Mapping[int, Fraction]) -> Fraction:
        total = Fraction(0)
        for s, c in self.coeffs.items():
            term = c
            for i in s:
                term *= point[i]
            total += term
        return total

    def to_json(self) -> dict[str, str]:
        items = sorted(self.coeffs.items(), key=lambda kv: (len(kv[0]), sorted(kv[0])))
        return {set_key(s): str(c) for s, c in items}

    def __repr__(self) -> str:
        if not self.coeffs:
            return "0"
        parts = []
        for s, c in sorted(self.coeffs.items(), key=lambda kv: (len(kv[0]), sorted(kv[0]))):
            mono = "*".join(f"t{i}" for i in sorted(s))
            parts.append(f"{c}" if not mono else (mono if c == 1 else f"{c}*{mono}"))
        return " + ".join(parts)


def linear(*idx: int, const: int = 0) -> SquarefreePoly:
    terms = {frozenset([i]): 1 for i in idx}
    if const:
        terms[frozenset()] = const
    return SquarefreePoly.from_terms(terms)


# ---------------------------------------------------------------------------
# cd-words


def word_degree(w: str) -> int:
    return sum(1 if ch == "c" else 2 for ch in w)


def cd_words(n: int) -> list[str]:
    """All cd-words of degree n, lexicographic with c < d."""
    if n < 0:
        return []
    if n == 0:
        return [""]
    out = ["c" + w for w in cd_words(n - 1)]
    if n >= 2:
        out += ["d" + w for w in cd_words(n - 2)]
    return sorted(out)


def pretty_word(w: str) -> str:
    if not w:
        return "1"
    out = []
    for ch, grp in itertools.groupby(w):
        k = len(list(grp))
        out.append(ch if k == 1 else f"{ch}^{k}")
    return "".join(out)


@dataclass
class CdPolynomial:
    degree: int
    terms: dict[str, int]

    def coeff(self, w: str) -> int:
        return self.terms.get(w, 0)

    def nonzero(self) -> dict[str, int]:
        return {w: c for w, c in self.terms.items() if c}

    def __eq__(self, other) -> bool:
        if not isinstance(other, CdPolynomial):
            return NotImplemented
        return self.degree == other.degree and self.nonzero() == other.nonzero()

    def to_json(self) -> dict:
        return {"cd_index": [{"word": w, "coeff": self.coeff(w)} for w in cd_words(self.degree)]}

    @classmethod
    def from_json(cls, data: dict) -> "CdPolynomial":
        terms = {t["word"]: int(t["coeff"]) for t in data["cd_index"]}
        deg = {word_degree(w) for w in terms} or {0}
        if len(deg) != 1:
            raise ValueError("cd-index words of mixed degree")
        return cls(deg.pop(), terms)

    @classmethod
    def parse(cls, text: str) -> "CdPolynomial":
        """Parse strings such as ``"c^3 + 4cd + 6dc"``."""
        terms: dict[str, int] = {}
        for part in text.replace(" ", "").split("+"):
            i = 0
            while i < len(part) and part[i].isdigit():
                i += 1
            k = int(part[:i]) if i else 1
            rest, word = part[i:], ""
            j = 0
            while j < len(rest):
                ch = rest[j]
                j += 1
                rep = 1
                if j < len(rest) and rest[j] == "^":
                    m = j + 1
                    while m < len(rest) and rest[m].isdigit():
                        m += 1
                    rep = int(rest[j + 1:m])
                    j = m
                word += ch * rep
            terms[word] = terms.get(word, 0) + k
        degs = {word_degree(w) for w in terms}
        return cls(degs.pop(), terms)

    def __str__(self) -> str:
        parts = []
        for w in cd_words(self.degree):
            c = self.coeff(w)
            if c:
                parts.append(pretty_word(w) if c == 1 else f"{c}{pretty_word(w)}")
        return " + ".join(parts) if parts else "0"

    def is_nonnegative_integral(self) -> bool:
        return all(isinstance(c, int) and c >= 0 for c in self.terms.values())


def phi_expand(w: str, start: int = 1) -> SquarefreePoly:
    """phi(w) in the variables t_start, t_start+1, ...; the leftmost letter
    uses the lowest variables."""
    out = SquarefreePoly.one()
    k = start
    for ch in w:
        if ch == "c":
            out = out * linear(k, const=1)
            k += 1
        elif ch == "d":
            out = out * linear(k, k + 1)
            k += 2
        else:
            raise ValueError(f"not a cd-word: {w!r}")
    return out


def phi(poly: CdPolynomial, start: int = 1) -> SquarefreePoly:
    acc = SquarefreePoly()
    for w, c in poly.terms.items():
        if c:
            acc = acc + phi_expand(w, start).scale(c)
    return acc


# ---------------------------------------------------------------------------
# flag numbers


def flag_f(p: GradedPoset) -> FlagVector:
    """f_S = number of chains of nonzero cones with rank set exactly S."""
    require_valid(p)
    n = p.rank_n
    zero = p.zero
    ends: dict[str, dict[frozenset[int], int]] = {}
    for e in p.ids:
        if e == zero:
            continue
        r = p.rank[e]
        acc = {frozenset([r]): 1}
        for f in p.below[e]:
            if f == zero:
                continue
            for s, k in ends[f].items():
                key = s | {r}
                acc[key] = acc.get(key, 0) + k
        ends[e] = acc
    entries = {s: 0 for s in subsets(range(1, n + 1))}
    entries[frozenset()] = 1
    for acc in ends.values():
        for s, k in acc.items():
            entries[s] += k
    return FlagVector(n, entries)


def flag_h(p: GradedPoset) -> FlagVector:
    f = flag_f(p)
    return h_from_f(f)


def h_from_f(f: FlagVector) -> FlagVector:
    entries = {}
    for s in subsets(range(1, f.n + 1)):
        entries[s] = sum((-1) ** (len(s) - len(t)) * f[t] for t in subsets(s))
    return FlagVector(f.n, entries)


def h_poly(h: FlagVector) -> SquarefreePoly:
    return SquarefreePoly.from_terms({s: v for s, v in h.entries.items() if v})


def simplicial_h(f: Iterable[int], n: int | None = None) -> list[int]:
    """h from face numbers via sum_i f_{n-i}(t-1)^i = sum_k h_{n-k} t^k."""
    f = list(f)
    if not f:
        raise LengthMismatch("empty face vector")
    if n is None:
        n = len(f) - 1
    if len(f) != n + 1:
        raise LengthMismatch(f"expected {n + 1} face numbers, got {len(f)}")
    if f[0] != 1:
        raise ValueError("f_0 must be 1 (the zero cone)")
    coeff = [0] * (n + 1)  # coefficient of t^k
    for i in range(n + 1):
        for k in range(i + 1):
            coeff[k] += f[n - i] * comb(i, k) * (-1) ** (i - k)
    return [coeff[n - j] for j in range(n + 1)]


def phi_matrix(n: int, start: int = 1) -> tuple[list[frozenset[int]], list[str], linalg.Matrix]:
    rows = subsets(range(start, start + n))
    words = cd_words(n)
    cols = [phi_expand(w, start) for w in words]
    m = linalg.from_columns([[c[s] for s in rows] for c in cols], len(rows))
    return rows, words, m


def cd_index_from_poly(poly: SquarefreePoly, n: int, start: int = 1) -> CdPolynomial:
    rows, words, m = phi_matrix(n, start)
    outside = [s for s in poly.coeffs if not s <= set(range(start, start + n))]
    if outside:
        raise NotInCdSpan(f"terms outside t_{start}..t_{start + n - 1}: {outside[:3]}")
    rhs = linalg.from_columns([[poly[s] for s in rows]], len(rows))
    sol = linalg.solve(m, rhs)
    if sol is None:
        # residual against the exact least-squares fit (phi images are independent)
        mt = m.transpose()
        fit = m * linalg.solve(mt * m, mt * rhs)
        residual = {set_key(s): str(linalg.to_fraction(rhs[i, 0] - fit[i, 0]))
                    for i, s in enumerate(rows) if rhs[i, 0] != fit[i, 0]}
        raise NotInCdSpan("h-polynomial is not in the span of the phi images", residual)
    sol = linalg.column(sol, 0)
    terms = {}
    for w, v in zip(words, sol):
        q = linalg.to_fraction(v)
        if q.denominator != 1:
            raise NotInCdSpan(f"non-integral coefficient {q} for {w}")
        terms[w] = int(q)
    return CdPolynomial(n, terms)


def cd_index_from_flag_h(h: FlagVector) -> CdPolynomial:
    if h[()] != 1:
        raise NotInCdSpan("h_empty must be 1")
    return cd_index_from_poly(h_poly(h), h.n)


def cd_index(p: GradedPoset) -> CdPolynomial:
    return cd_index_from_flag_h(flag_h(p))
