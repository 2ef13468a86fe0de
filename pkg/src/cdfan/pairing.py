"""Evaluation map and Poincare pairings.

A pairing on a free module M over A_{l,m} with squarefree generator
degrees is stored as one scalar per generator pair: <g_i, g_j> equals
that scalar times x^(deg i + deg j), which must lie in the ideal
(x_l ... x_m).
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Mapping, Sequence

from . import linalg
from .flag import set_key, subsets
from .graded import FreeGradedModule, MultiDegree
from .linalg import Matrix
from .poset import TOP, GradedPoset, OrientationData
from .sheaves import BStalk, Pushforward, restrict_top


class DivisibilityViolation(ArithmeticError):
    pass


class DegeneratePairing(ArithmeticError):
    pass


@dataclass(frozen=True)
class OmegaElement:
    """coeff * x^degree, with degree covering every variable of the range."""

    coeff: Fraction
    degree: MultiDegree

    def to_json(self) -> dict:
        return {"coeff": str(self.coeff), "degree": str(self.degree)}


def evaluate(values: Sequence, eps: Sequence[int], degree, variables: Sequence[int]) -> OmegaElement:
    """sum_x eps_x f_x for a homogeneous section given by its values on the
    maximal chains; the result must be divisible by the product of the variables."""
    degree = MultiDegree.of(degree)
    total = sum((linalg.to_fraction(v) * e for v, e in zip(values, eps)), Fraction(0))
    if not set(variables) <= degree.support and total != 0:
        raise DivisibilityViolation(f"evaluation in degree {degree} is {total}, not divisible")
    return OmegaElement(total, degree)


@dataclass
class PairingForm:
    module: FreeGradedModule
    matrix: Matrix  # rank x rank

    @property
    def variables(self) -> tuple[int, ...]:
        return self.module.variables

    def value(self, i: int, j: int) -> Fraction:
        return linalg.to_fraction(self.matrix[i, j])

    def is_symmetric(self) -> bool:
        return linalg.is_symmetric(self.matrix)

    def pattern_violations(self) -> list[tuple[int, int]]:
        """Nonzero entries whose degree does not cover the variable range."""
        full = set(self.variables)
        degs = self.module.degrees
        n = self.module.rank
        return [(i, j) for i in range(n) for j in range(n)
                if self.matrix[i, j] and not full <= (degs[i] | degs[j])]

    def block(self, s) -> tuple[list[int], list[int], Matrix]:
        s = frozenset(s)
        comp = frozenset(self.variables) - s
        rows = self.module.indices_with_degree(s)
        cols = self.module.indices_with_degree(comp)
        return rows, cols, linalg.take(self.matrix, rows, cols)

    def complementary_blocks(self) -> list[tuple[frozenset[int], Matrix]]:
        return [(s, self.block(s)[2]) for s in subsets(self.variables)]

    def degenerate_blocks(self) -> list[frozenset[int]]:
        return [s for s, b in self.complementary_blocks() if not linalg.is_invertible(b)]

    def is_nondegenerate(self) -> bool:
        return not self.degenerate_blocks()

    def require_nondegenerate(self) -> None:
        bad = self.degenerate_blocks()
        if bad:
            raise DegeneratePairing(f"singular complementary blocks at {[set_key(s) for s in bad]}")

    def to_json(self) -> dict:
        return {
            "variables": list(self.variables),
            "blocks": {set_key(s): [[linalg.fmt(b[i, j]) for j in range(b.ncols())] for i in range(b.nrows())]
                       for s, b in self.complementary_blocks()},
        }


def pairing_on_sections(stalk: BStalk, orient: OrientationData, check: bool = True) -> PairingForm:
    """<f, g> = evaluate(f g) on the free generators of the sections of B
    over the boundary of ``stalk.cone``."""
    sec = stalk.sections
    vals = sec.value_matrix()
    eps = stalk.eps(orient)
    weighted = linalg.zeros(vals.nrows(), vals.ncols())
    for r, e in enumerate(eps):
        for c in range(vals.ncols()):
            v = vals[r, c]
            if v:
                weighted[r, c] = e * v
    mat = vals.transpose() * weighted
    form = PairingForm(stalk.module, mat)
    if check:
        bad = form.pattern_violations()
        if bad:
            i, j = bad[0]
            raise DivisibilityViolation(
                f"<g{i}, g{j}> = {form.value(i, j)} in a degree that does not cover the range")
    return form


def stalk_pairing(push: Pushforward, sigma: str, orient: OrientationData) -> PairingForm:
    """Pairing on L_sigma / x_d L_sigma, realized on sections of B over the
    boundary of sigma with signs taken relative to sigma."""
    return pairing_on_sections(push.stalks[sigma], orient)


def _restriction_matrix(push: Pushforward, sigma: str, tau: str) -> Matrix:
    if sigma == TOP:
        return restrict_top(push.poset, push, tau)
    return push.sheaf.res[sigma, tau].entries


def compatibility_check(push: Pushforward, sigma: str, orient: OrientationData,
                        pairings: Mapping[str, PairingForm]) -> dict:
    """Compare <f,g>_sigma with sum_tau or(sigma,tau) <res f, res g>_tau on
    all generator pairs; ``pairings`` holds precomputed forms for sigma and
    its facets, ``orient`` supplies the incidence signs."""
    p = push.poset
    facets = p.facets_of(sigma)
    lhs = pairings[sigma].matrix
    n = lhs.nrows()
    report = {"cone": sigma, "pairs": n * n, "ok": True, "mismatches": 0}
    if n == 0:
        return report
    rhs = linalg.zeros(n, n)
    for tau in facets:
        r = _restriction_matrix(push, sigma, tau)
        rhs += orient.sign[sigma, tau] * (r.transpose() * pairings[tau].matrix * r)
    diff = lhs - rhs
    bad = sum(1 for i in range(n) for j in range(n) if diff[i, j])
    report["mismatches"] = bad
    report["ok"] = bad == 0
    return report


def all_pairings(push: Pushforward, orient: OrientationData) -> dict[str, PairingForm]:
    out = {c: stalk_pairing(push, c, orient) for c in push.poset.ids}
    out[TOP] = stalk_pairing(push, TOP, orient)
    return out


def pairing_suite(p: GradedPoset, orient: OrientationData, push: Pushforward | None = None) -> dict:
    """Divisibility, nondegeneracy and compatibility on every cone and on the
    global sections."""
    from .sheaves import pushforward

    push = push or pushforward(p)
    forms = all_pairings(push, orient)
    report = {"nondegenerate": {}, "compatible": {}, "symmetric": True}
    for c, f in forms.items():
        report["nondegenerate"][c] = f.is_nondegenerate()
        report["symmetric"] &= f.is_symmetric()
    for c in list(p.ids) + [TOP]:
        if p.rank_of(c) < 1:
            continue
        report["compatible"][c] = compatibility_check(push, c, orient, forms)["ok"]
    report["ok"] = (report["symmetric"] and all(report["nondegenerate"].values())
                    and all(report["compatible"].values()))
    return report
