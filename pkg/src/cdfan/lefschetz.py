"""The main construction on free modules with a Poincare pairing, the
samplers for degree-e_l operators, and the recursion that reads off the
cd-index from the ranks of its leaves.

Modules are free over A_{l,m} with squarefree generator degrees; a pairing
is a symmetric scalar matrix on the generators (see ``pairing``). Only the
part M^0 -> M^1 of an operator L modulo x_l matters, so operators are kept
as |M^1| x |M^0| matrices ``lbar``.
"""

from __future__ import annotations

import hashlib
import random
from dataclasses import dataclass, field
from typing import Callable

from . import linalg
from .flag import CdPolynomial, SquarefreePoly, cd_words, linear, phi_expand, set_key, subsets
from .graded import FreeGradedModule, MonomialMap, MultiDegree, var_range
from .linalg import Matrix
from .pairing import DegeneratePairing, PairingForm

MODES = ("generic", "multiplication", "torus")
DEFAULT_RETRIES = 8
DEFAULT_ENTRY_BOUND = 10**4


class AssumptionFailed(Exception):
    """A sampled operator violates a hypothesis of the main construction;
    ``kind`` is one of injectivity, annihilation, bijectivity, self_adjoint, descent."""

    def __init__(self, kind: str, detail: str = ""):
        self.kind = kind
        self.detail = detail
        super().__init__(f"{kind}: {detail}" if detail else kind)


class ExhaustedRetries(Exception):
    def __init__(self, prefix: str, failures: list[str]):
        self.prefix = prefix
        self.failures = failures
        super().__init__(f"no admissible operator at prefix {prefix!r} after {len(failures)} attempts: "
                         + "; ".join(failures))


class NoCandidate(Exception):
    pass


class InternalBreach(Exception):
    """A consequence of the theory failed; never a sampling accident."""


def rng_for(seed: int, prefix: str, attempt: int) -> random.Random:
    digest = hashlib.sha256(f"{seed}:{prefix}:{attempt}".encode()).digest()
    return random.Random(int.from_bytes(digest[:8], "big"))


# ---------------------------------------------------------------------------
# nodes


@dataclass
class Node:
    """A free module over A_{l,m} with its pairing and, in multiplication mode,
    the operators x_j-degree maps ``ops[j]`` (entries on generators, valid modulo x_l)."""

    module: FreeGradedModule
    pairing: Matrix
    lo: int
    hi: int
    ops: dict[int, Matrix] | None = None

    @property
    def rank(self) -> int:
        return self.module.rank

    def form(self) -> PairingForm:
        return PairingForm(self.module, self.pairing)


def split_mod_xl(module: FreeGradedModule, l: int) -> tuple[list[int], list[int], FreeGradedModule, FreeGradedModule]:
    """Generator indices of M^0 (l not in degree) and M^1, and the two
    pieces as modules over A_{l+1,m} (M^1 with l removed from its degrees)."""
    i0 = [k for k, (_, d) in enumerate(module.gens) if l not in d]
    i1 = [k for k, (_, d) in enumerate(module.gens) if l in d]
    rest = tuple(v for v in module.variables if v != l)
    return i0, i1, module.sub(i0, rest), module.sub(i1, rest, drop={l})


def _pattern(module: FreeGradedModule, l: int, i0: list[int], i1: list[int]) -> list[tuple[int, int]]:
    """Positions (row in M^1, column in M^0) where a degree-e_l map may be nonzero."""
    degs = module.degrees
    return [(a, b) for a, h in enumerate(i1) for b, g in enumerate(i0) if degs[h] - {l} <= degs[g]]


def _p01(node: Node, i0: list[int], i1: list[int]) -> Matrix:
    p01 = linalg.take(node.pairing, i0, i1)
    if not linalg.is_invertible(p01):
        raise DegeneratePairing("pairing between M^0 and M^1 is singular")
    return p01


def adjoint_and_check(lbar: Matrix, node: Node) -> tuple[Matrix, bool]:
    """Adjoint of lbar: M^0 -> M^1 for the pairing of ``node``; self-adjoint
    iff P[M^0, M^1] lbar is symmetric."""
    i0, i1, _, _ = split_mod_xl(node.module, node.lo)
    p01 = _p01(node, i0, i1)
    star = linalg.inverse(p01) * lbar.transpose() * p01.transpose()
    return star, star == lbar


def as_monomial_map(lbar: Matrix, node: Node) -> MonomialMap:
    """The operator as a degree-e_l endomorphism of the node module."""
    i0, i1, _, _ = split_mod_xl(node.module, node.lo)
    ent = linalg.zeros(node.rank, node.rank)
    for a, h in enumerate(i1):
        for b, g in enumerate(i0):
            if lbar[a, b]:
                ent[h, g] = lbar[a, b]
    return MonomialMap(node.module, node.module, MultiDegree.unit(node.lo), ent)


def symmetrize(lbar: Matrix, node: Node) -> Matrix:
    star, _ = adjoint_and_check(lbar, node)
    out = (lbar + star) / 2
    i0, i1, _, _ = split_mod_xl(node.module, node.lo)
    allowed = set(_pattern(node.module, node.lo, i0, i1))
    for a in range(out.nrows()):
        for b in range(out.ncols()):
            if out[a, b] and (a, b) not in allowed:
                raise InternalBreach("adjoint of a homogeneous operator is not homogeneous")
    return out


def sample_generic(node: Node, rng: random.Random, bound: int) -> Matrix:
    i0, i1, _, _ = split_mod_xl(node.module, node.lo)
    lbar = linalg.zeros(len(i1), len(i0))
    for a, b in _pattern(node.module, node.lo, i0, i1):
        lbar[a, b] = rng.randint(-bound, bound)
    return symmetrize(lbar, node)


def lbar_from_ops(node: Node) -> Matrix:
    if not node.ops or node.lo not in node.ops:
        raise NoCandidate("module carries no multiplication operators")
    i0, i1, _, _ = split_mod_xl(node.module, node.lo)
    return linalg.take(node.ops[node.lo], i1, i0)


def sample_L(node: Node, mode: str, rng: random.Random, bound: int = DEFAULT_ENTRY_BOUND) -> Matrix:
    """A self-adjoint candidate. Multiplication (and torus at the root) read
    the operator from ``node.ops``, which the caller samples."""
    if mode == "generic":
        return sample_generic(node, rng, bound)
    if mode in ("multiplication", "torus"):
        return lbar_from_ops(node)
    raise ValueError(f"unknown mode {mode!r}")


# ---------------------------------------------------------------------------
# main construction


@dataclass
class Step:
    lo: int
    hi: int
    dims: dict[str, int]
    c_node: Node
    q_node: Node | None
    hilbert_identity: bool
    exact: bool
    q_gens: list[int] = field(default_factory=list)  # generator indices of M^1 (in M numbering)
    c_gens: list[int] = field(default_factory=list)  # generator indices of M^0 (in M numbering)

    def summary(self, prefix: str) -> dict:
        return {"prefix": prefix, "range": [self.lo, self.hi], "dims": dict(self.dims),
                "hilbert_identity": self.hilbert_identity, "exact": self.exact}


def _coord_solve(basis: Matrix, vec: Matrix) -> Matrix:
    x = linalg.solve(basis, vec)
    if x is None:
        raise InternalBreach("vector outside the expected span")
    return x


def main_construction(node: Node, lbar: Matrix, check_self_adjoint: bool = True) -> Step:
    l, m = node.lo, node.hi
    mod = node.module
    degs = mod.degrees
    i0, i1, _, _ = split_mod_xl(mod, l)
    if len(i0) != len(i1):
        raise DegeneratePairing(f"|M^0| = {len(i0)} but |M^1| = {len(i1)}")
    p01 = _p01(node, i0, i1)
    bmat = p01 * lbar
    if check_self_adjoint and not linalg.is_symmetric(bmat):
        raise AssumptionFailed("self_adjoint", f"operator at x_{l} is not self-adjoint")
    d0 = {b: degs[g] for b, g in enumerate(i0)}
    d1 = {a: degs[h] - {l} for a, h in enumerate(i1)}
    upper = var_range(l + 1, m)

    def rows_of(u) -> list[int]:
        return [a for a in d1 if d1[a] <= u]

    def cols_of(u) -> list[int]:
        return [b for b in d0 if d0[b] <= u]

    comp: dict[frozenset[int], tuple[list[int], list[int], Matrix]] = {}
    for u in subsets(upper):
        rows, cols = rows_of(u), cols_of(u)
        a = linalg.take(lbar, rows, cols)
        r = linalg.rank(a)
        if r != len(cols):
            raise AssumptionFailed("injectivity", f"L is not injective in degree {{{set_key(u)}}}")
        if (l + 1) in u and r != len(rows):
            raise AssumptionFailed("annihilation", f"x_{l + 1} Q != 0 in degree {{{set_key(u)}}}")
        comp[u] = (rows, cols, a)

    if l == m:
        a = comp[frozenset()][2]
        if not linalg.is_invertible(a):
            raise AssumptionFailed("bijectivity", f"L is not bijective at the last variable x_{l}")
        c_mod = FreeGradedModule((), tuple((f"c{k}", frozenset()) for k in range(len(i0))))
        c_pair = linalg.take(bmat, list(range(len(i0))), list(range(len(i0))))
        ok = mod.hilbert() == linear(l, const=1) * c_mod.hilbert()
        if not ok:
            raise InternalBreach("Hilbert identity fails at the last variable")
        c_node = Node(c_mod, c_pair, l + 1, m, {} if node.ops is not None else None)
        if not linalg.is_invertible(c_pair) and len(i0):
            raise DegeneratePairing("induced pairing on C is singular")
        return Step(l, m, {"M0": len(i0), "M1": len(i1), "Q": 0, "C": len(i0)}, c_node, None,
                    ok, True, [], list(i0))

    # --- Q: generators chosen among M^1 generators of degree U + e_l, U in [l+2, m]
    q_list: list[tuple[int, frozenset[int]]] = []  # (row index into i1, U)
    for u in subsets(var_range(l + 2, m)):
        rows, cols, a = comp[u]
        cand = [k for k, r in enumerate(rows) if d1[r] == u]
        for k in _unit_complement(a, cand):
            q_list.append((rows[k], u))
    for u in subsets(var_range(l + 2, m)):
        rows, cols, _ = comp[u]
        if sum(1 for _, v in q_list if v <= u) != len(rows) - len(cols):
            raise InternalBreach(f"Q is not free in degree {{{set_key(u)}}}")

    # alpha(q) = L^{-1}(x_{l+1} q), an element of M^0 in degree U + e_{l+1}
    alphas: list[tuple[list[int], list]] = []
    for r, u in q_list:
        v = u | {l + 1}
        rows, cols, a = comp[v]
        target = _unit(len(rows), rows.index(r))
        p = linalg.solve_vector(a, target)
        if p is None:
            raise InternalBreach("x_{l+1} q is not in the image of L")
        alphas.append((cols, p))

    nq = len(q_list)
    amat = linalg.zeros(len(i0), nq)
    for s, (cols, p) in enumerate(alphas):
        for b, coef in zip(cols, p):
            if coef:
                amat[b, s] = coef
    q_pair = amat.transpose() * linalg.take(p01, list(range(len(i0))), [r for r, _ in q_list])
    if not linalg.is_symmetric(q_pair):
        raise InternalBreach("induced pairing on Q is not symmetric")

    # --- C = (M^0 / x_{l+1}) / alpha(Q)
    def c_basis(v: frozenset[int]) -> list[int]:
        inside = (l + 1) in v
        return [b for b in d0 if d0[b] <= v and (((l + 1) in d0[b]) == inside)]

    def alpha_block(v: frozenset[int], basis: list[int]) -> Matrix:
        if (l + 1) not in v:
            return linalg.zeros(len(basis), 0)
        pos = {b: k for k, b in enumerate(basis)}
        cols = []
        for (r, u), (acols, p) in zip(q_list, alphas):
            if u <= v - {l + 1}:
                vec = [0] * len(basis)
                for b, coef in zip(acols, p):
                    if (l + 1) in d0[b]:
                        vec[pos[b]] = coef
                cols.append(vec)
        return linalg.from_columns(cols, len(basis))

    c_list: list[int] = []  # indices into i0
    exact = True
    for v in subsets(upper):
        basis = c_basis(v)
        al = alpha_block(v, basis)
        cand = [k for k, b in enumerate(basis) if d0[b] == v]
        c_list += [basis[k] for k in _unit_complement(al, cand)]
        # exactness of 0 -> Q[e_l - e_{l+1}] -> M^0/x -> M^1/x -> Q -> 0 in degree v
        rows1 = [a for a in d1 if d1[a] <= v and (((l + 1) in d1[a]) == ((l + 1) in v))]
        lmod = linalg.take(lbar, rows1, basis)
        rk = linalg.rank(lmod)
        q_shift = al.ncols()
        q_here = 0 if (l + 1) in v else sum(1 for _, u in q_list if u <= v)
        if linalg.rank(al) != q_shift or (q_shift and not linalg.is_zero(lmod * al)):
            exact = False
        if len(basis) - rk != q_shift or len(rows1) - rk != q_here:
            exact = False
        c_here = sum(1 for b in c_list if d0[b] <= v and (((l + 1) in d0[b]) == ((l + 1) in v)))
        if c_here != len(basis) - q_shift:
            exact = False
    if not exact:
        raise InternalBreach("sequences of the main construction are not exact")

    nc = len(c_list)
    c_pair = linalg.take(bmat, c_list, c_list)
    for s in range(nc):
        for t in range(nc):
            if (l + 1) in d0[c_list[s]] and (l + 1) in d0[c_list[t]]:
                c_pair[s, t] = 0

    c_mod = FreeGradedModule(upper, tuple((f"c{k}", d0[b]) for k, b in enumerate(c_list)))
    q_mod = FreeGradedModule(var_range(l + 2, m), tuple((f"q{k}", u) for k, (_, u) in enumerate(q_list)))
    c_form, q_form = PairingForm(c_mod, c_pair), PairingForm(q_mod, q_pair)
    c_form.require_nondegenerate()
    q_form.require_nondegenerate()

    lhs = mod.hilbert()
    rhs = linear(l, const=1) * c_mod.hilbert() + linear(l, l + 1) * q_mod.hilbert()
    ok = lhs == rhs
    if not ok:
        raise InternalBreach("Hilbert identity fails")

    c_ops = q_ops = None
    if node.ops is not None:
        c_ops, q_ops = _induced_ops(node, lbar, i0, i1, d0, d1, comp, q_list, alphas, c_list, c_basis, alpha_block)
    c_node = Node(c_mod, c_pair, l + 1, m, c_ops)
    q_node = Node(q_mod, q_pair, l + 2, m, q_ops)
    dims = {"M0": len(i0), "M1": len(i1), "Q": nq, "C": nc}
    return Step(l, m, dims, c_node, q_node, ok, exact,
                [i1[r] for r, _ in q_list], [i0[b] for b in c_list])


def _unit_complement(span: Matrix, cand: list[int]) -> list[int]:
    """Greedy choice of coordinates in ``cand`` whose unit vectors complement
    span(span, e_t for t not in cand); works in the quotient by the other units."""
    if not cand:
        return []
    reduced = linalg.take(span, cand, list(range(span.ncols())))
    picked = linalg.unit_complement(reduced)
    return [cand[k] for k in picked]


def _unit(n: int, k: int) -> list[int]:
    v = [0] * n
    v[k] = 1
    return v


def _in_span(span: Matrix, vecs: Matrix) -> bool:
    if vecs.ncols() == 0:
        return True
    if span.ncols() == 0:
        return linalg.is_zero(vecs)
    return linalg.rank(linalg.hstack([span, vecs], span.nrows())) == linalg.rank(span)


def _induced_ops(node, lbar, i0, i1, d0, d1, comp, q_list, alphas, c_list, c_basis, alpha_block):
    """Descend the multiplication operators to Q (modulo the image of L) and to
    C (modulo x_{l+1} and alpha(Q)); raise AssumptionFailed('descent') if an
    operator does not preserve the subspace it must preserve."""
    l, m = node.lo, node.hi
    ops = node.ops

    q_ops: dict[int, Matrix] = {}
    for j in range(l + 2, m + 1):
        op = ops[j]
        out = linalg.zeros(len(q_list), len(q_list))
        for u in subsets(var_range(l + 2, m)):
            w = u | {j}
            rows_u, cols_u, a_u = comp[u]
            rows_w, cols_w, a_w = comp[w]
            act = linalg.take(op, [i1[r] for r in rows_w], [i1[r] for r in rows_u])
            if not _in_span(a_w, act * a_u):
                raise AssumptionFailed("descent", f"x_{j}-operator does not preserve the image of L")
            qs_w = [k for k, (_, v) in enumerate(q_list) if v <= w]
            pos_w = {r: k for k, r in enumerate(rows_w)}
            basis = linalg.hstack([linalg.from_columns([_unit(len(rows_w), pos_w[q_list[k][0]]) for k in qs_w], len(rows_w)), a_w], len(rows_w))
            for k, (r, v) in enumerate(q_list):
                if v != u:
                    continue
                vec = linalg.take(op, [i1[x] for x in rows_w], [i1[r]])
                x = _coord_solve(basis, vec)
                for t, kk in enumerate(qs_w):
                    if x[t, 0]:
                        out[kk, k] = x[t, 0]
        q_ops[j] = out

    c_ops: dict[int, Matrix] = {}
    cpos = {b: k for k, b in enumerate(c_list)}
    for j in range(l + 1, m + 1):
        op = ops[j]
        out = linalg.zeros(len(c_list), len(c_list))
        for v in subsets(var_range(l + 1, m)):
            if j == l + 1 and (l + 1) in v:
                continue
            w = v | {j}
            src = c_basis(v)
            dst = c_basis(w)
            act = linalg.take(op, [i0[b] for b in dst], [i0[b] for b in src])
            al_v, al_w = alpha_block(v, src), alpha_block(w, dst)
            if not _in_span(al_w, act * al_v):
                raise AssumptionFailed("descent", f"x_{j}-operator does not preserve alpha(Q)")
            cs_w = [b for b in c_list if b in set(dst)]
            dpos = {b: k for k, b in enumerate(dst)}
            basis = linalg.hstack([linalg.from_columns([_unit(len(dst), dpos[b]) for b in cs_w], len(dst)), al_w], len(dst))
            for b in c_list:
                if d0[b] != v:
                    continue
                vec = linalg.take(op, [i0[x] for x in dst], [i0[b]])
                x = _coord_solve(basis, vec)
                for t, bb in enumerate(cs_w):
                    if x[t, 0]:
                        out[cpos[bb], cpos[b]] = x[t, 0]
        c_ops[j] = out
    return c_ops, q_ops


# ---------------------------------------------------------------------------
# recursion


@dataclass
class SamplerConfig:
    mode: str = "generic"
    retries: int = DEFAULT_RETRIES
    entry_bound: int = DEFAULT_ENTRY_BOUND


@dataclass
class LefschetzCertificate:
    seed: int
    mode: str
    root_hilbert: SquarefreePoly
    root_range: tuple[int, int]
    steps: list[dict]
    leaves: dict[str, int]
    attempts: dict[str, int]
    cd: CdPolynomial

    def identity_holds(self) -> bool:
        acc = SquarefreePoly()
        for w, k in self.leaves.items():
            if k:
                acc = acc + phi_expand(w, self.root_range[0]).scale(k)
        return acc == self.root_hilbert

    def to_json(self) -> dict:
        return {
            "seed": self.seed,
            "mode": self.mode,
            "range": list(self.root_range),
            "root_hilbert": self.root_hilbert.to_json(),
            "steps": self.steps,
            "leaves": dict(sorted(self.leaves.items())),
            "attempts": dict(sorted(self.attempts.items())),
            "certificate_identity": self.identity_holds(),
            **self.cd.to_json(),
        }


OpsSampler = Callable[[random.Random], dict[int, Matrix]]


def lefschetz_recursion(root: Node, config: SamplerConfig | None = None, seed: int = 0,
                        ops_sampler: OpsSampler | None = None) -> tuple[CdPolynomial, LefschetzCertificate]:
    """Run the main construction recursively. Generic mode retries locally at
    each node; multiplication mode restarts from the root with fresh
    operators; torus mode samples the root operator from ``ops_sampler``
    (restricted to x_l) and continues generically."""
    config = config or SamplerConfig()
    if config.mode not in MODES:
        raise ValueError(f"unknown mode {config.mode!r}")
    if config.mode in ("multiplication", "torus") and ops_sampler is None:
        raise NoCandidate(f"{config.mode} mode needs section representatives")
    n = root.hi - root.lo + 1
    if config.mode == "multiplication":
        failures = []
        for attempt in range(config.retries):
            rng = rng_for(seed, "", attempt)
            node = Node(root.module, root.pairing, root.lo, root.hi, ops_sampler(rng))
            try:
                steps, leaves, attempts = _run(node, config, seed, fixed_ops=True)
            except AssumptionFailed as exc:
                failures.append(str(exc))
                continue
            attempts[""] = attempt + 1
            break
        else:
            raise ExhaustedRetries("", failures)
    else:
        steps, leaves, attempts = _run(root, config, seed, fixed_ops=False, ops_sampler=ops_sampler)
    words = cd_words(n)
    cd = CdPolynomial(n, {w: leaves.get(w, 0) for w in words})
    for w in leaves:
        if w not in cd.terms:
            raise InternalBreach(f"leaf word {w} has the wrong degree")
    cert = LefschetzCertificate(seed, config.mode, root.module.hilbert(), (root.lo, root.hi),
                                steps, leaves, attempts, cd)
    if not cert.identity_holds():
        raise InternalBreach("certificate identity fails")
    return cd, cert


def _run(root: Node, config: SamplerConfig, seed: int, fixed_ops: bool,
         ops_sampler: OpsSampler | None = None):
    steps: list[dict] = []
    leaves: dict[str, int] = {}
    attempts: dict[str, int] = {}

    def visit(node: Node, prefix: str) -> None:
        if node.rank == 0:
            return
        if node.lo > node.hi:
            leaves[prefix] = leaves.get(prefix, 0) + node.rank
            return
        if fixed_ops:
            step = main_construction(node, lbar_from_ops(node))
            attempts[prefix] = 1
        else:
            failures = []
            step = None
            for attempt in range(config.retries):
                rng = rng_for(seed, prefix, attempt)
                try:
                    if config.mode == "torus" and prefix == "":
                        node = Node(node.module, node.pairing, node.lo, node.hi, ops_sampler(rng))
                        lbar = lbar_from_ops(node)
                        node = Node(node.module, node.pairing, node.lo, node.hi, None)
                    else:
                        lbar = sample_generic(node, rng, config.entry_bound)
                    step = main_construction(node, lbar)
                except AssumptionFailed as exc:
                    failures.append(str(exc))
                    continue
                attempts[prefix] = attempt + 1
                break
            if step is None:
                raise ExhaustedRetries(prefix, failures)
        steps.append(step.summary(prefix))
        visit(step.c_node, prefix + "c")
        if step.q_node is not None:
            visit(step.q_node, prefix + "d")

    visit(root, "")
    return steps, leaves, attempts


# ---------------------------------------------------------------------------
# roots built from fans


def root_node(stalk, orient) -> Node:
    """Node for the sections of B over the boundary of ``stalk.cone`` (the
    global sections when the cone is TOP), with the evaluation pairing."""
    from .pairing import pairing_on_sections

    form = pairing_on_sections(stalk, orient)
    form.require_nondegenerate()
    k = stalk.dim - 1
    return Node(stalk.module, form.matrix, 1, k)


def multiplication_matrix(stalk, j: int, value: dict[str, int]) -> Matrix:
    """Multiplication by the degree-e_j section of B whose value on a flag is
    ``value`` of its rank-j cone, in the free basis of the stalk sections."""
    sec = stalk.sections
    flags = stalk.flags
    n = sec.free.rank
    vals = sec.value_matrix()
    weight = [value[f[j - 1]] for f in flags]
    degs = [MultiDegree.of(d) for d in sec.free.degrees]
    ent = linalg.zeros(n, n)
    groups: dict[MultiDegree, list[int]] = {}
    for g in range(n):
        groups.setdefault(degs[g] + MultiDegree.unit(j), []).append(g)
    for d, gs in groups.items():
        prod = linalg.zeros(len(flags), len(gs))
        for c, g in enumerate(gs):
            for r in range(len(flags)):
                v = vals[r, g]
                if v:
                    prod[r, c] = v * weight[r]
        coords = sec.coords_batch(d, prod)
        if coords is None:
            raise InternalBreach("product of sections is not a section")
        for c, g in enumerate(gs):
            for t, row in enumerate(sec.free.component_basis(d)):
                if coords[t, c]:
                    ent[row, g] = coords[t, c]
    return ent


def multiplication_sampler(stalk, bound: int = DEFAULT_ENTRY_BOUND, only: tuple[int, ...] | None = None) -> OpsSampler:
    """Operators given by multiplication with random sections of degree e_j;
    such a section is a function of the rank-j cone of the flag."""
    k = stalk.dim - 1

    def sample(rng: random.Random) -> dict[int, Matrix]:
        ops: dict[int, Matrix] = {}
        for j in (only or var_range(1, k)):
            cones = sorted({f[j - 1] for f in stalk.flags})
            ops[j] = multiplication_matrix(stalk, j, {c: rng.randint(-bound, bound) for c in cones})
        return ops

    return sample
