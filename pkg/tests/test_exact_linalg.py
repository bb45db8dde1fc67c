from fractions import Fraction
from itertools import combinations, permutations

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from noethertower.exact_linalg import (
    Echelon,
    Subspace,
    as_matrix,
    identity,
    kernel,
    matrices_equal,
    parse_rat,
    quotient,
    rank,
    rat_str,
    rref,
    solve,
    span,
    subspace_ops,
    zeros,
)

small = st.integers(-2, 2)


def matrices(max_rows=5, max_cols=5):
    return st.integers(1, max_rows).flatmap(
        lambda r: st.integers(1, max_cols).flatmap(
            lambda c: st.lists(st.lists(small, min_size=c, max_size=c), min_size=r, max_size=r)
        )
    )


def det(rows):
    # Leibniz expansion; only used as an oracle on tiny matrices
    n = len(rows)
    total = Fraction(0)
    for perm in permutations(range(n)):
        inv = sum(1 for a, b in combinations(range(n), 2) if perm[a] > perm[b])
        term = Fraction(-1 if inv % 2 else 1)
        for i, j in enumerate(perm):
            term *= rows[i][j]
        total += term
    return total


def minor_rank(rows):
    r, c = len(rows), len(rows[0])
    for k in range(min(r, c), 0, -1):
        for ri in combinations(range(r), k):
            for ci in combinations(range(c), k):
                if det([[rows[i][j] for j in ci] for i in ri]):
                    return k
    return 0


def test_rref_identity():
    m, r = rref(identity(2))
    assert r == 2 and matrices_equal(m, identity(2))


def test_rref_dependent_rows():
    m, r = rref(as_matrix([[1, 2], [2, 4]]))
    assert r == 1
    assert matrices_equal(m, as_matrix([[1, 2]]))


def test_kernel_trivial_cases():
    assert kernel(identity(3)).dim == 0
    assert kernel(zeros(2, 3)) == Subspace.full(3)


def test_kernel_substitute_back():
    m = as_matrix([[1, 1, 0]])
    ker = kernel(m)
    assert ker.dim == 2
    for v in ker.basis:
        assert not any(m @ np.asarray(v, dtype=object))


def test_floats_rejected():
    with pytest.raises(TypeError):
        as_matrix([[0.5]])


def test_parse_rat():
    assert parse_rat("3/4") == Fraction(3, 4)
    assert parse_rat(" -2 ") == -2
    assert rat_str(Fraction(6, 4)) == "3/2" and rat_str(3) == "3"
    for bad in ("", "0.5", "1/0", "x"):
        with pytest.raises(ValueError):
            parse_rat(bad)


@given(matrices())
def test_rank_matches_minor_oracle(rows):
    assert rank(as_matrix(rows)) == minor_rank(rows)


@given(matrices())
def test_rref_idempotent_and_transpose_rank(rows):
    m = as_matrix(rows)
    r1, k = rref(m)
    r2, k2 = rref(r1)
    assert k == k2 and matrices_equal(r1, r2)
    assert rank(m.T) == k


@given(matrices())
def test_rank_nullity(rows):
    m = as_matrix(rows)
    ker = kernel(m)
    assert ker.dim + rank(m) == m.shape[1]
    for v in ker.basis:
        assert not any(m @ np.asarray(v, dtype=object))


@given(matrices(), st.data())
def test_solve_substitute_back(rows, data):
    a = as_matrix(rows)
    x0 = data.draw(st.lists(small, min_size=a.shape[1], max_size=a.shape[1]))
    b = a @ np.asarray(x0, dtype=object)
    x = solve(a, b)
    assert x is not None
    assert list(a @ x) == list(b)


def test_solve_inconsistent():
    assert solve(as_matrix([[1, 1], [1, 1]]), [1, 2]) is None


def test_subspace_ops_trivial():
    e1, e2 = span(2, [[1, 0]]), span(2, [[0, 1]])
    ops = subspace_ops(e1, e2)
    assert ops["sum"] == Subspace.full(2)
    assert ops["intersection"].dim == 0
    same = subspace_ops(e1, e1)
    assert same["contains"] and not same["proper"]


vectors4 = st.lists(st.lists(small, min_size=4, max_size=4), max_size=4)


@given(vectors4, vectors4)
def test_dimension_formula(u, w):
    a, b = span(4, u), span(4, w)
    ops = subspace_ops(a, b)
    assert ops["sum"].dim + ops["intersection"].dim == a.dim + b.dim
    inter = ops["intersection"]
    assert a.contains(inter) and b.contains(inter)
    assert ops["sum"].contains(a) and ops["sum"].contains(b)
    # oracle: sum dimension via rank of stacked rows
    assert ops["sum"].dim == (rank(as_matrix(u + w)) if u + w else 0)


@given(vectors4)
def test_canonical_form(u):
    a = span(4, u)
    assert span(4, list(reversed(u))) == a
    assert span(4, a.basis) == a
    for v in u:
        coords = a.coordinates(v)
        assert coords is not None
        assert list(np.asarray(coords, dtype=object) @ a.matrix) == v if a.dim else not any(v)


def test_echelon_incremental():
    e = Echelon(3)
    assert e.add([1, 1, 0]) and e.add([0, 1, 1])
    assert not e.add([1, 2, 1])
    assert e.contains([2, 3, 1]) and not e.contains([0, 0, 1])
    assert e.subspace() == span(3, [[1, 1, 0], [0, 1, 1]])


def test_quotient_trivial():
    q = quotient(3, Subspace.zero(3))
    assert q.dim == 3 and matrices_equal(q.project, identity(3))
    assert quotient(3, Subspace.full(3)).dim == 0


def test_quotient_kills_relation():
    q = quotient(3, span(3, [[1, -1, 0]]))
    assert q.dim == 2
    assert not any(q.project_vector([1, -1, 0]))


@given(vectors4)
def test_quotient_properties(u):
    rel = span(4, u)
    q = quotient(4, rel)
    assert q.dim == 4 - rel.dim
    assert matrices_equal(q.project @ q.section, identity(q.dim))
    assert kernel(q.project) == rel if q.dim else rel == Subspace.full(4)
