"""Property tests on randomly generated inputs."""

import random

from hypothesis import given, settings
from hypothesis import strategies as st

from cdfan import linalg
from cdfan.flag import CdPolynomial, cd_index_from_poly, cd_words, phi
from cdfan.graded import MultiDegree
from cdfan.lefschetz import Node, SamplerConfig, adjoint_and_check, main_construction, root_node, split_mod_xl, symmetrize
from cdfan.pipeline import fan_recursion
from cdfan.poset import from_json, polygon_fan, to_json
from cdfan.torus import orthogonal_basis

from conftest import fan

small_ints = st.integers(-6, 6)


@st.composite
def cd_polys(draw):
    n = draw(st.integers(1, 5))
    return CdPolynomial(n, {w: draw(st.integers(0, 9)) for w in cd_words(n)})


@given(cd_polys())
def test_phi_is_injective_on_cd_words(cd):
    assert cd_index_from_poly(phi(cd), cd.degree) == cd


@st.composite
def int_matrices(draw, max_dim=5):
    r = draw(st.integers(1, max_dim))
    c = draw(st.integers(1, max_dim))
    return linalg.from_rows([[draw(small_ints) for _ in range(c)] for _ in range(r)])


@given(int_matrices())
def test_rank_nullity(m):
    assert linalg.rank(m) + linalg.nullspace(m).ncols() == m.ncols()
    assert linalg.is_zero(m * linalg.nullspace(m))


@given(int_matrices(), st.data())
def test_solve_consistent_systems(a, data):
    x = linalg.from_columns([[data.draw(small_ints) for _ in range(a.ncols())]], a.ncols())
    b = a * x
    y = linalg.solve(a, b)
    assert y is not None and a * y == b


@given(int_matrices())
def test_unit_complement_completes_a_basis(m):
    extra = linalg.unit_complement(m)
    units = linalg.zeros(m.nrows(), len(extra))
    for c, k in enumerate(extra):
        units[k, c] = 1
    both = linalg.hstack([m, units], m.nrows())
    assert linalg.rank(both) == m.nrows() == linalg.rank(m) + len(extra)


@st.composite
def nondegenerate_symmetric(draw):
    n = draw(st.integers(1, 5))
    rows = [[0] * n for _ in range(n)]
    for i in range(n):
        for j in range(i, n):
            rows[i][j] = rows[j][i] = draw(small_ints)
    m = linalg.from_rows(rows)
    return m if linalg.is_invertible(m) else linalg.identity(n)


@given(nondegenerate_symmetric())
def test_orthogonal_basis_diagonalizes(g):
    o = orthogonal_basis(g)
    d = o.transpose() * g * o
    n = g.nrows()
    assert linalg.is_invertible(o)
    assert all(d[i, j] == 0 for i in range(n) for j in range(n) if i != j)


@settings(max_examples=30, deadline=None)
@given(st.sampled_from(["polygon:4", "simplex:3", "cube:3"]), st.integers(0, 2**32))
def test_symmetrize_is_self_adjoint(name, seed):
    f = fan(name)
    node = root_node(f.push.root, f.orient)
    i0, i1, _, _ = split_mod_xl(node.module, 1)
    rng = random.Random(seed)
    lbar = linalg.from_rows([[rng.randint(-9, 9) for _ in i0] for _ in i1], len(i0))
    # keep only entries a degree-e_1 map may have
    degs = node.module.degrees
    for a, h in enumerate(i1):
        for b, g in enumerate(i0):
            if not degs[h] - {1} <= degs[g]:
                lbar[a, b] = 0
    assert adjoint_and_check(symmetrize(lbar, node), node)[1]


@settings(max_examples=15, deadline=None)
@given(st.sampled_from(["polygon:3", "polygon:7", "simplex:3", "crosspoly:3"]), st.integers(0, 10**6),
       st.sampled_from(["generic", "multiplication", "torus"]))
def test_recursion_matches_flag_oracle(name, seed, mode):
    from cdfan.flag import cd_index

    f = fan(name)
    cd, cert = fan_recursion(f.poset, SamplerConfig(mode), seed, f.orient, f.push)
    assert cd == cd_index(f.poset) and cert.identity_holds()
    assert all(s["hilbert_identity"] for s in cert.steps)


@given(st.dictionaries(st.integers(1, 6), st.integers(0, 3)), st.dictionaries(st.integers(1, 6), st.integers(0, 3)))
def test_multidegree_add_sub(a, b):
    da, db = MultiDegree.of(a), MultiDegree.of(b)
    assert (da + db) - db == da
    assert (da + db).dominates(da)


@given(st.integers(3, 12))
def test_poset_json_round_trip(m):
    p = polygon_fan(m)
    assert from_json(to_json(p)) == p


@settings(max_examples=10, deadline=None)
@given(st.integers(0, 10**6))
def test_step_ranks_add_up(seed):
    f = fan("cube:3")
    node = root_node(f.push.root, f.orient)
    from cdfan.lefschetz import sample_generic

    step = main_construction(node, sample_generic(node, random.Random(seed), 10**4))
    assert step.dims["C"] + step.dims["Q"] == step.dims["M0"]
    assert isinstance(step.c_node, Node)
