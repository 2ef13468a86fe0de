import random

import pytest

from cdfan import linalg
from cdfan.torus import (PreconditionViolated, TransversalityInstance, block_diag, orthogonal_basis,
                         random_constant_instance, random_instance, torus_transverse_witness, transverse)


def hyperbolic_line() -> TransversalityInstance:
    return TransversalityInstance([linalg.from_rows([[1, 0], [0, -1]])], linalg.from_columns([[1, 1]], 2))


def test_zero_K_accepts_anything():
    inst = TransversalityInstance([linalg.identity(3)], linalg.zeros(3, 0))
    w = torus_transverse_witness(inst, random.Random(0))
    assert w is not None and w.attempts == 1


@pytest.mark.parametrize("t1,t2,ok", [(1, 2, True), (5, 5, False), (-3, 7, True), (0, 0, False)])
def test_hyperbolic_line_needs_distinct_scalars(t1, t2, ok):
    inst = hyperbolic_line()
    L = linalg.from_rows([[t1, 0], [0, t2]])
    assert transverse(inst, L) is ok


def test_hyperbolic_line_witness():
    w = torus_transverse_witness(hyperbolic_line(), random.Random(1))
    assert w.t[0] != w.t[1]


def test_preconditions():
    anisotropic = TransversalityInstance([linalg.identity(2)], linalg.from_columns([[1, 0]], 2))
    with pytest.raises(PreconditionViolated):
        torus_transverse_witness(anisotropic, random.Random(0))
    blocks = [linalg.from_rows([[1, 0], [0, -1]]), linalg.identity(1)]
    K = linalg.from_columns([[1, 1, 0]], 3)
    inst = TransversalityInstance(blocks, K)
    assert inst.is_isotropic() and not inst.projects_onto_blocks()
    with pytest.raises(PreconditionViolated):
        torus_transverse_witness(inst, random.Random(0), "per-block-constant")
    with pytest.raises(ValueError):
        torus_transverse_witness(inst, random.Random(0), "sideways")


def test_orthogonal_basis_of_hyperbolic_plane():
    g = linalg.from_rows([[0, 1], [1, 0]])
    o = orthogonal_basis(g)
    d = o.transpose() * g * o
    assert d[0, 1] == 0 and d[1, 0] == 0 and linalg.is_invertible(d)


def test_random_instances_are_lagrangian():
    rng = random.Random(9)
    for _ in range(20):
        inst = random_instance(rng)
        assert inst.dim <= 12 and inst.is_isotropic()
        assert 2 * inst.K.ncols() == inst.dim == inst.gram().nrows()
        assert linalg.rank(inst.K) == inst.K.ncols()


def test_constant_instances_map_onto_blocks():
    rng = random.Random(4)
    for _ in range(20):
        inst = random_constant_instance(rng)
        assert inst.is_isotropic() and inst.projects_onto_blocks()


def test_block_diag():
    m = block_diag([linalg.identity(1) * 2, linalg.from_rows([[0, 1], [1, 0]])])
    assert m == linalg.from_rows([[2, 0, 0], [0, 0, 1], [0, 1, 0]])


def test_witness_is_self_adjoint():
    rng = random.Random(2)
    inst = random_instance(rng)
    w = torus_transverse_witness(inst, rng)
    g = inst.gram()
    assert linalg.is_symmetric(g * w.L)
