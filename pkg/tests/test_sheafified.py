import pytest

from cdfan.pipeline import cellular_suite, duality_suite, verify_suite
from cdfan.sheafified import quotient_lemma_check, stalk_recursion, stalk_suite

from conftest import fan


@pytest.mark.parametrize("name", ["polygon:5", "cube:3", "crosspoly:3", "simplex:4"])
def test_stalk_recursion_on_every_cone(name):
    f = fan(name)
    assert stalk_suite(f.poset, f.orient, 4, seed=2, push=f.push)["ok"]


def test_square_cone_stalk_gives_square_cd_index():
    f = fan("cube:3")
    row = stalk_recursion(f.push, f.orient, f.poset.by_rank[3][0], seed=0)
    assert row["cd_index"] == "c^2 + 2d" and row["ok"]


@pytest.mark.parametrize("name", ["polygon:6", "cube:3", "crosspoly:3", "cube:4"])
def test_quotient_lemma(name):
    f = fan(name)
    rep = quotient_lemma_check(f.poset, f.orient, seed=1, push=f.push)
    assert rep["ok"], rep
    assert rep["minimally_flabby"] and rep["restrictions_compose"]


def test_quotient_lemma_negative_control():
    # a ray function that vanishes everywhere is not injective
    f = fan("cube:3")
    rays = f.poset.by_rank[1]
    rep = quotient_lemma_check(f.poset, f.orient, push=f.push, ray_values={r: 0 for r in rays})
    assert not rep["ok"] and not rep["injective"]


def test_suites_on_small_fan():
    f = fan("crosspoly:3")
    assert duality_suite(f.poset, f.push)["ok"]
    assert cellular_suite(f.poset, f.orient)["ok"]


def test_verify_suite_cube():
    rep = verify_suite(fan("cube:3").poset, seed=4)
    assert rep["ok"] and rep["cd_index"]["agree"]
