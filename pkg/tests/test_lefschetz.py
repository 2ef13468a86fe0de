import random

import pytest

from cdfan import linalg
from cdfan.flag import SquarefreePoly
from cdfan.graded import FreeGradedModule
from cdfan.lefschetz import (AssumptionFailed, ExhaustedRetries, NoCandidate, Node, SamplerConfig,
                             adjoint_and_check, as_monomial_map, lefschetz_recursion, main_construction,
                             multiplication_sampler, rng_for, root_node, sample_L, split_mod_xl, symmetrize)
from cdfan.pipeline import fan_recursion

from conftest import fan


def root(name: str) -> Node:
    f = fan(name)
    return root_node(f.push.root, f.orient)


def test_split_mod_xl():
    m = FreeGradedModule.over(1, 2, [("a", ()), ("b", (1,)), ("c", (2,)), ("e", (1, 2))])
    i0, i1, m0, m1 = split_mod_xl(m, 1)
    assert (i0, i1) == ([0, 2], [1, 3])
    assert m0.degrees == [frozenset(), frozenset({2})] == m1.degrees
    assert m0.variables == (2,)


def test_split_of_zero_module():
    i0, i1, m0, m1 = split_mod_xl(FreeGradedModule.over(1, 2, []), 1)
    assert i0 == i1 == [] and m0.rank == m1.rank == 0


def test_split_of_cube_sections():
    i0, _, _, _ = split_mod_xl(root("cube:3").module, 1)
    assert len(i0) == 24


def test_multiplication_operator_is_self_adjoint():
    node = root("cube:3")
    ops = multiplication_sampler(fan("cube:3").push.root)(random.Random(5))
    lbar = sample_L(Node(node.module, node.pairing, 1, 3, ops), "multiplication", random.Random(0))
    assert adjoint_and_check(lbar, node)[1]
    assert as_monomial_map(lbar, node).is_homogeneous()


def test_zero_operator_is_self_adjoint():
    node = root("polygon:4")
    i0, i1, _, _ = split_mod_xl(node.module, 1)
    assert adjoint_and_check(linalg.zeros(len(i1), len(i0)), node)[1]


def test_asymmetric_entry_is_detected():
    node = root("cube:3")
    lbar = sample_L(node, "generic", random.Random(3))
    assert adjoint_and_check(lbar, node)[1]
    bumped = linalg.zeros(lbar.nrows(), lbar.ncols()) + lbar
    a, b = next((a, b) for a in range(lbar.nrows()) for b in range(lbar.ncols()) if lbar[a, b])
    bumped[a, b] += 1
    assert not adjoint_and_check(bumped, node)[1]
    assert adjoint_and_check(symmetrize(bumped, node), node)[1]


def test_line_fan_step():
    node = root("simplex:1")
    step = main_construction(node, sample_L(node, "generic", random.Random(1)))
    assert step.dims["Q"] == 0 and step.dims["C"] == 1
    assert step.hilbert_identity and step.q_node is None


@pytest.mark.parametrize("m", [3, 4, 6])
def test_polygon_step(m):
    node = root(f"polygon:{m}")
    step = main_construction(node, sample_L(node, "generic", random.Random(m)))
    assert step.dims["Q"] == m - 2
    assert step.c_node.module.hilbert() == SquarefreePoly.from_terms({(): 1, (2,): 1})
    assert step.hilbert_identity and step.exact


def test_zero_operator_fails_injectivity():
    node = root("polygon:4")
    i0, i1, _, _ = split_mod_xl(node.module, 1)
    with pytest.raises(AssumptionFailed) as info:
        main_construction(node, linalg.zeros(len(i1), len(i0)))
    assert info.value.kind == "injectivity"


def test_zero_entries_exhaust_retries():
    with pytest.raises(ExhaustedRetries) as info:
        lefschetz_recursion(root("polygon:4"), SamplerConfig("generic", retries=3, entry_bound=0))
    assert len(info.value.failures) == 3


def test_mode_guards():
    with pytest.raises(NoCandidate):
        lefschetz_recursion(root("polygon:4"), SamplerConfig("multiplication"))
    with pytest.raises(ValueError):
        lefschetz_recursion(root("polygon:4"), SamplerConfig("quantum"))


@pytest.mark.parametrize("mode", ["generic", "multiplication", "torus"])
@pytest.mark.parametrize("name,want", [("simplex:1", "c"), ("polygon:5", "c^2 + 3d"),
                                       ("simplex:3", "c^3 + 2cd + 2dc"), ("cube:3", "c^3 + 4cd + 6dc")])
def test_recursion_modes(mode, name, want):
    f = fan(name)
    cd, cert = fan_recursion(f.poset, SamplerConfig(mode), 3, f.orient, f.push)
    assert str(cd) == want and cert.identity_holds()


def test_certificate_json():
    f = fan("polygon:4")
    _, cert = fan_recursion(f.poset, SamplerConfig(), 0, f.orient, f.push)
    doc = cert.to_json()
    assert {"seed", "mode", "root_hilbert", "steps", "leaves", "cd_index", "certificate_identity"} <= set(doc)
    assert doc["leaves"] == {"cc": 1, "d": 2}


def test_rng_streams_are_keyed():
    assert rng_for(1, "cd", 0).random() == rng_for(1, "cd", 0).random()
    assert rng_for(1, "cd", 0).random() != rng_for(1, "cd", 1).random()
    assert rng_for(1, "c", 0).random() != rng_for(2, "c", 0).random()
