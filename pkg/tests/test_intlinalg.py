import random

import pytest
import sympy
from sympy.matrices.normalforms import smith_normal_form as sympy_snf

from coarsetop.intlinalg import (
    IntegerMatrix,
    LatticeSolver,
    kernel_of_columns,
    smith_normal_form,
    verify_smith,
)


def dense(A):
    out = [[0] * A.cols for _ in range(A.rows)]
    for (r, c), v in A.entries.items():
        out[r][c] = v
    return out


def from_dense(rows):
    nr = len(rows)
    nc = len(rows[0]) if rows else 0
    return IntegerMatrix(nr, nc, {(r, c): rows[r][c] for r in range(nr) for c in range(nc)})


def sympy_diag(rows):
    if not rows or not rows[0]:
        return []
    M = sympy.Matrix(rows)
    D = sympy_snf(M)
    ds = [abs(D[i, i]) for i in range(min(D.shape))]
    return sorted(d for d in ds if d != 0)


def test_snf_diag_2_3():
    sf = smith_normal_form(from_dense([[2, 0], [0, 3]]))
    assert sf.diagonal == [1, 6]


def test_snf_identity():
    sf = smith_normal_form(from_dense([[1, 0], [0, 1]]))
    assert sf.diagonal == [1, 1]


def test_snf_zero_matrix():
    sf = smith_normal_form(IntegerMatrix(3, 4))
    assert sf.rank == 0
    assert sf.diagonal == []


def test_snf_transforms_certify():
    A = from_dense([[2, 4, 4], [-6, 6, 12], [10, 4, 16]])
    sf = smith_normal_form(A)
    assert verify_smith(A, sf)
    assert sf.diagonal == sympy_diag(dense(A))


@pytest.mark.parametrize("seed", range(12))
def test_snf_random_against_sympy(seed):
    rng = random.Random(seed)
    nr = rng.randint(1, 6)
    nc = rng.randint(1, 6)
    rows = [[rng.randint(-9, 9) for _ in range(nc)] for _ in range(nr)]
    A = from_dense(rows)
    sf = smith_normal_form(A)
    assert verify_smith(A, sf)
    got = sorted(sf.diagonal)
    assert got == sympy_diag(rows)
    # divisibility chain
    ds = sf.diagonal
    for a, b in zip(ds, ds[1:]):
        assert b % a == 0


def test_solve_and_membership():
    A = from_dense([[2, 0], [0, 3]])
    sf = smith_normal_form(A)
    assert sf.solve({0: 4, 1: 9}) == {0: 2, 1: 3}
    assert sf.solve({0: 1}) is None  # 1 not divisible by 2


def test_solve_underdetermined():
    A = from_dense([[1, 1, 1]])
    sf = smith_normal_form(A)
    x = sf.solve({0: 7})
    assert x is not None
    assert sum(x.values()) == 7


def test_kernel_basis():
    A = from_dense([[1, 1, 1], [0, 1, 1]])
    sf = smith_normal_form(A)
    kb = sf.kernel_basis()
    assert len(kb) == 1
    v = kb[0]
    assert A.matvec(v) == {}
    # kernel of boundary of a triangle's edge set
    cols = [{0: 1, 1: -1}, {0: 1, 2: -1}, {1: 1, 2: -1}]
    kb2 = kernel_of_columns(3, cols)
    assert len(kb2) == 1


def test_lattice_solver():
    gen = [{0: 2}, {1: 2}, {0: 1, 1: 1}]
    lat = LatticeSolver(2, gen)
    assert lat.contains({0: 1, 1: 1})
    assert lat.contains({0: 3, 1: 1})
    assert not lat.contains({0: 1})


def test_torsion_detected():
    # boundary matrix presentation of Z/2 x Z/4
    A = from_dense([[2, 0], [0, 4]])
    sf = smith_normal_form(A)
    assert sf.diagonal == [2, 4]
    assert sf.torsion == [2, 4]


def test_matmul_and_transpose():
    A = from_dense([[1, 2], [3, 4]])
    B = from_dense([[0, 1], [1, 0]])
    assert dense(A.matmul(B)) == [[2, 1], [4, 3]]
    assert dense(A.transpose()) == [[1, 3], [2, 4]]
