from hypothesis import given, strategies as st
import pytest

from catcohom.linalg import (
    AbelianGroupStructure,
    IntMatrix,
    cokernel_structure,
    determinant,
    kernel_basis,
    smith_normal_form,
    solve_integer,
    subquotient_structure,
    unimodular_inverse,
)
from oracles import box_solutions, invariant_factors

small = st.integers(min_value=-6, max_value=6)


@st.composite
def matrices(draw, max_rows=4, max_cols=4):
    r = draw(st.integers(1, max_rows))
    c = draw(st.integers(1, max_cols))
    return IntMatrix([[draw(small) for _ in range(c)] for _ in range(r)], c)


def test_snf_small_example():
    d = smith_normal_form(IntMatrix([[2, 4], [6, 8]]))
    assert d.S == IntMatrix([[2, 0], [0, 4]])
    assert d.U @ IntMatrix([[2, 4], [6, 8]]) @ d.V == d.S
    assert abs(determinant(d.U)) == 1 and abs(determinant(d.V)) == 1


def test_cokernel_is_z6():
    g = cokernel_structure(IntMatrix([[2, 0], [0, 3]]))
    assert g.free_rank == 0 and g.torsion == (6,)
    assert str(g) == "Z/6"


def test_solve_example():
    x = solve_integer(IntMatrix([[1, 1], [0, 2]]), [1, 2])
    assert tuple(x) == (0, 1)


def test_solve_infeasible_over_z():
    assert solve_integer(IntMatrix([[2]]), [1]) is None


def test_kernel_example():
    (v,) = kernel_basis(IntMatrix([[1, 2], [2, 4]]))
    assert tuple(v) in {(2, -1), (-2, 1)}


def test_zero_and_empty_shapes():
    d = smith_normal_form(IntMatrix.zeros(2, 3))
    assert d.rank == 0
    assert len(kernel_basis(IntMatrix.zeros(2, 3))) == 3
    assert cokernel_structure(IntMatrix.zeros(2, 0)).free_rank == 2


def test_solve_length_mismatch():
    with pytest.raises(ValueError):
        solve_integer(IntMatrix([[1, 0]]), [1, 2])


def test_subquotient_rejects_outside_boundary():
    with pytest.raises(ValueError):
        subquotient_structure([(2, 0)], [(1, 0)], 2)


def test_group_from_orders_canonical():
    g = AbelianGroupStructure.from_orders([2, 3, 0])
    assert g.torsion == (6,) and g.free_rank == 1


@given(matrices())
def test_snf_factorization(m):
    d = smith_normal_form(m)
    assert d.U @ m @ d.V == d.S
    assert abs(determinant(d.U)) == 1 and abs(determinant(d.V)) == 1
    diag = d.diagonal
    assert all(x > 0 for x in diag)
    assert all(diag[i + 1] % diag[i] == 0 for i in range(len(diag) - 1))
    for i in range(m.rows):
        for j in range(m.cols):
            if i != j or i >= d.rank:
                assert d.S.data[i][j] == 0


@given(matrices())
def test_snf_matches_sympy(m):
    assert smith_normal_form(m).diagonal == invariant_factors(m.tolist(), m.cols)


@given(matrices())
def test_snf_deterministic(m):
    assert smith_normal_form(m) == smith_normal_form(m.copy())


@given(matrices())
def test_kernel_vectors_are_kernel(m):
    basis = kernel_basis(m)
    assert len(basis) == m.cols - smith_normal_form(m).rank
    for v in basis:
        assert not any(m.apply(v))


@given(matrices(max_rows=3, max_cols=3), st.lists(small, min_size=3, max_size=3))
def test_solve_agrees_with_box_search(m, rhs):
    b = rhs[: m.rows]
    x = solve_integer(m, b)
    if x is not None:
        assert list(m.apply(x)) == list(b)
    else:
        assert not box_solutions(m.tolist(), b, radius=4)


@given(matrices(), st.data())
def test_cokernel_invariant_under_unimodular_ops(m, data):
    ops = data.draw(st.lists(st.tuples(st.booleans(), st.integers(0, 3), st.integers(0, 3), small), max_size=6))
    a = m.tolist()
    for on_rows, i, j, k in ops:
        if on_rows:
            i, j = i % m.rows, j % m.rows
            if i != j:
                a[i] = [x + k * y for x, y in zip(a[i], a[j])]
        else:
            i, j = i % m.cols, j % m.cols
            if i != j:
                for row in a:
                    row[i] += k * row[j]
    assert cokernel_structure(IntMatrix(a, m.cols)) == cokernel_structure(m)


@given(matrices())
def test_unimodular_inverse(m):
    u = smith_normal_form(m).U
    assert unimodular_inverse(u) @ u == IntMatrix.identity(u.rows)
