"""Fan-level entry points shared by the CLI and the tests: the recursion on
global sections and the full invariant suite."""

from __future__ import annotations

from .flag import cd_index, flag_h, h_poly, subsets
from .graded import verification_box, var_range
from .lefschetz import (CdPolynomial, LefschetzCertificate, SamplerConfig, lefschetz_recursion,
                        multiplication_sampler, root_node)
from .pairing import pairing_suite
from .poset import GradedPoset, OrientationData, incidence_orientation, is_eulerian_mobius, validate
from .sheafified import quotient_lemma_check, stalk_suite
from .sheaves import (Pushforward, SheafData, boundary_exact, cellular_complex, check_minimally_flabby,
                      global_L, hilbert_table, indecomposable_stalks, pushforward)


def fan_recursion(p: GradedPoset, config: SamplerConfig | None = None, seed: int = 0,
                  orient: OrientationData | None = None,
                  push: Pushforward | None = None) -> tuple[CdPolynomial, LefschetzCertificate]:
    """Lefschetz recursion on the global sections of B over the barycentric subdivision."""
    config = config or SamplerConfig()
    orient = orient or incidence_orientation(p)
    push = push or pushforward(p)
    root = root_node(push.root, orient)
    sampler = None
    if config.mode == "multiplication":
        sampler = multiplication_sampler(push.root, config.entry_bound)
    elif config.mode == "torus":
        sampler = multiplication_sampler(push.root, config.entry_bound, only=(1,))
    return lefschetz_recursion(root, config, seed, sampler)


def cellular_suite(p: GradedPoset, orient: OrientationData, L: SheafData | None = None) -> dict:
    """Global complex of L: H^0 equals the global sections, nothing above.
    Boundary complexes: exact down to the zero cone, in every degree."""
    L = L or indecomposable_stalks(p)
    gamma = global_L(p, L).free
    glob = True
    h0 = True
    for d in verification_box(var_range(1, p.rank_n)):
        cx = cellular_complex(L, orient, d)
        h = cx.cohomology()
        if any(h[1:]) or not cx.is_complex():
            glob = False
        if h[0] != gamma.dim(d):
            h0 = False
    bound = True
    for sigma in p.ids:
        if p.rank[sigma] < 1:
            continue
        rep = boundary_exact(L, orient, sigma, 0)
        if not (rep["exact"] and rep["complex"]) or rep["G"]:
            bound = False
    return {"global_higher_vanish": glob, "h0_is_sections": h0, "boundary_exact": bound,
            "ok": glob and h0 and bound}


def duality_suite(p: GradedPoset, push: Pushforward) -> dict:
    h = flag_h(p)
    full = frozenset(range(1, p.rank_n + 1))
    dual = all(h[s] == h[full - s] for s in subsets(full))
    gamma = push.root.module.hilbert()
    dims = gamma == h_poly(h)
    return {"h_duality": dual, "sections_match_h": dims, "ok": dual and dims}


def verify_suite(p: GradedPoset, seed: int = 0, config: SamplerConfig | None = None,
                 max_stalk_dim: int = 4) -> dict:
    """Every invariant the library can check on one fan, as a JSON-ready report."""
    rep = validate(p)
    out: dict = {"validation": rep.to_json(), "valid": rep.ok}
    if not rep.ok:
        out["ok"] = False
        return out
    out["eulerian_mobius_agrees"] = is_eulerian_mobius(p) == rep.checks["eulerian"][0]
    orient = incidence_orientation(p)
    push = pushforward(p)
    L = indecomposable_stalks(p)
    out["duality"] = duality_suite(p, push)
    out["L_matches_pushforward"] = hilbert_table(L) == hilbert_table(push.sheaf)
    flabby = check_minimally_flabby(L, orient, 1)
    out["minimally_flabby"] = {"ok": flabby["ok"], "max_G": flabby["max_G"]}
    out["cellular"] = cellular_suite(p, orient, L)
    pairs = pairing_suite(p, orient, push)
    out["pairing"] = {"ok": pairs["ok"], "symmetric": pairs["symmetric"],
                      "nondegenerate": all(pairs["nondegenerate"].values()),
                      "compatible": all(pairs["compatible"].values())}
    out["stalk_recursion"] = {"ok": stalk_suite(p, orient, max_stalk_dim, seed, push)["ok"]}
    quot = quotient_lemma_check(p, orient, seed, push=push)
    out["quotient_lemma"] = {k: v for k, v in quot.items() if isinstance(v, bool)}
    expected = cd_index(p)
    cd, cert = fan_recursion(p, config, seed, orient, push)
    out["cd_index"] = {"flag": str(expected), "lefschetz": str(cd), "agree": cd == expected,
                       "nonnegative": cd.is_nonnegative_integral(),
                       "certificate_identity": cert.identity_holds()}
    out["ok"] = all([
        out["eulerian_mobius_agrees"], out["duality"]["ok"], out["L_matches_pushforward"],
        flabby["ok"], flabby["max_G"] == 1, out["cellular"]["ok"], pairs["ok"],
        out["stalk_recursion"]["ok"], quot["ok"], cd == expected, cd.is_nonnegative_integral(),
        cert.identity_holds(),
    ])
    return out


__all__ = ["fan_recursion", "verify_suite", "cellular_suite", "duality_suite"]
