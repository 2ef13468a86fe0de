"""Stalkwise checks of the sheaf-level construction.

Two things are exercised here: the module-level recursion run on each
stalk L_sigma / x_d L_sigma (whose output must be the cd-index of the
boundary of sigma), and the quotient lemma for a morphism F^0 -> F^1
induced by multiplication with a ray function.
"""

from __future__ import annotations

from . import linalg
from .flag import cd_index_from_poly, subsets
from .graded import FreeGradedModule, MonomialMap, MultiDegree, var_range
from .lefschetz import (DEFAULT_ENTRY_BOUND, InternalBreach, SamplerConfig, lefschetz_recursion,
                        multiplication_matrix, rng_for, root_node)
from .poset import GradedPoset, OrientationData
from .sheaves import Pushforward, SheafData, check_minimally_flabby, pushforward


def stalk_recursion(push: Pushforward, orient: OrientationData, sigma: str, seed: int = 0,
                    config: SamplerConfig | None = None) -> dict:
    """Main construction recursion on the stalk at sigma; compares its leaves
    with the cd-index read off the stalk's Hilbert polynomial."""
    stalk = push.stalks[sigma]
    node = root_node(stalk, orient)
    cd, cert = lefschetz_recursion(node, config or SamplerConfig(), seed)
    expected = cd_index_from_poly(node.module.hilbert(), stalk.dim - 1)
    return {"cone": sigma, "dim": stalk.dim, "cd_index": str(cd), "expected": str(expected),
            "ok": cd == expected and cert.identity_holds()}


def stalk_suite(p: GradedPoset, orient: OrientationData, max_dim: int = 4, seed: int = 0,
                push: Pushforward | None = None) -> dict:
    push = push or pushforward(p)
    rows = [stalk_recursion(push, orient, c, seed) for c in p.ids if 1 <= p.rank[c] <= max_dim]
    return {"cones": rows, "ok": all(r["ok"] for r in rows)}


# ---------------------------------------------------------------------------
# quotient lemma


def _split(module: FreeGradedModule) -> tuple[list[int], list[int]]:
    i0 = [k for k, d in enumerate(module.degrees) if 1 not in d]
    i1 = [k for k, d in enumerate(module.degrees) if 1 in d]
    return i0, i1


def quotient_lemma_check(p: GradedPoset, orient: OrientationData, seed: int = 0,
                         bound: int = DEFAULT_ENTRY_BOUND, push: Pushforward | None = None,
                         ray_values: dict[str, int] | None = None) -> dict:
    """F = pi_* B on cones of dimension >= 1, split modulo x_1 into F^0, F^1
    on cones of dimension >= 2, with L: F^0 -> F^1 multiplication by a random
    ray function. Checks: L is an isomorphism on 2-cones and injective on all
    cones, its cokernel Q is killed by x_2, free over A_{3,d}, and minimally
    flabby on cones of dimension >= 3 with the induced restrictions."""
    push = push or pushforward(p)
    rng = rng_for(seed, "quot", 0)
    rays = sorted(p.by_rank[1])
    ell = ray_values or {r: rng.randint(-bound, bound) for r in rays}
    cones = [c for c in p.ids if p.rank[c] >= 2]
    report = {"iso_on_2_cones": True, "injective": True, "killed_by_x2": True, "free": True}

    data: dict[str, dict] = {}
    for sigma in cones:
        d = p.rank[sigma]
        stalk = push.stalks[sigma]
        mod = stalk.module
        i0, i1 = _split(mod)
        lbar = linalg.take(multiplication_matrix(stalk, 1, ell), i1, i0)
        deg0 = {b: mod.degrees[g] for b, g in enumerate(i0)}
        deg1 = {a: mod.degrees[h] - {1} for a, h in enumerate(i1)}
        comp = {}
        for u in subsets(var_range(2, d - 1)):
            rows = [a for a in deg1 if deg1[a] <= u]
            cols = [b for b in deg0 if deg0[b] <= u]
            a = linalg.take(lbar, rows, cols)
            r = linalg.rank(a)
            if r != len(cols):
                report["injective"] = False
            if 2 in u and r != len(rows):
                report["killed_by_x2"] = False
            if d == 2 and (len(rows) != len(cols) or r != len(rows)):
                report["iso_on_2_cones"] = False
            comp[u] = (rows, cols, a)
        # free generators of Q over A_{3,d}, chosen modulo the image and lower units
        q_gens: list[tuple[int, frozenset[int]]] = []
        for u in subsets(var_range(3, d - 1)):
            rows, cols, a = comp[u]
            cand = [k for k, r in enumerate(rows) if deg1[r] == u]
            if cand:
                reduced = linalg.take(a, cand, list(range(a.ncols())))
                q_gens += [(rows[cand[k]], u) for k in linalg.unit_complement(reduced)]
        for u in subsets(var_range(3, d - 1)):
            rows, cols, _ = comp[u]
            if sum(1 for _, v in q_gens if v <= u) != len(rows) - len(cols):
                report["free"] = False
        data[sigma] = {"i1": i1, "deg1": deg1, "comp": comp, "q": q_gens}

    if not all(report.values()):
        report["minimally_flabby"] = False
        report["ok"] = False
        return report

    # the cokernel sheaf on cones of dimension >= 3
    upper = [c for c in cones if p.rank[c] >= 3]
    stalks = {c: FreeGradedModule(var_range(3, p.rank[c]), tuple((f"q{k}", u) for k, (_, u) in enumerate(data[c]["q"])))
              for c in upper}
    res = {}
    for sigma in upper:
        ds = data[sigma]
        for tau in p.down[sigma]:
            if p.rank[tau] < 3:
                continue
            dt = data[tau]
            full = push.sheaf.res[sigma, tau].entries
            ent = linalg.zeros(len(dt["q"]), len(ds["q"]))
            for k, (r, u) in enumerate(ds["q"]):
                u_t = u - {p.rank[sigma] - 1}
                rows_t, _, a_t = dt["comp"][u_t]
                vec = linalg.from_columns([[full[dt["i1"][x], ds["i1"][r]] for x in rows_t]], len(rows_t))
                q_here = [j for j, (_, v) in enumerate(dt["q"]) if v <= u_t]
                pos = {x: n for n, x in enumerate(rows_t)}
                basis = linalg.hstack([linalg.from_columns([_unit(len(rows_t), pos[dt["q"][j][0]]) for j in q_here],
                                                           len(rows_t)), a_t], len(rows_t))
                x = linalg.solve(basis, vec)
                if x is None:
                    raise InternalBreach("restriction of Q leaves the expected span")
                for n, j in enumerate(q_here):
                    if x[n, 0]:
                        ent[j, k] = x[n, 0]
            res[sigma, tau] = MonomialMap(stalks[sigma], stalks[tau], MultiDegree(), ent)
    qsheaf = SheafData(f"Q({p.name})", var_range(3, p.rank_n), {c: p.rank[c] for c in upper},
                       {c: [t for t in p.down[c] if p.rank[t] >= 3] for c in upper}, stalks, res)
    flabby = check_minimally_flabby(qsheaf, orient, 3)
    report["restrictions_compose"] = not qsheaf.composition_failures()
    report["minimally_flabby"] = flabby["ok"]
    report["G_total"] = {c: e["G_total"] for c, e in flabby["cones"].items()}
    report["ok"] = all(v for k, v in report.items() if isinstance(v, bool))
    return report


def _unit(n: int, k: int) -> list[int]:
    v = [0] * n
    v[k] = 1
    return v
