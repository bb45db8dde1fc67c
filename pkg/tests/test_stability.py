from itertools import product

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from noethertower.algebra import build_algebra, embed
from noethertower.diagrams import Family, parse_diagram
from noethertower.exact_linalg import matrices_equal, span, zeros
from noethertower.stability import (
    build_Mm,
    ca_hom,
    certify_tower,
    claim_a1_check,
    criterion_certificate,
    f_prime,
    hypotheses_hold_from,
    nu_prime,
    shift_embedding,
)
from noethertower.tower import (
    F,
    HypothesisError,
    full_submodule,
    sample_submodule,
    validate_tower,
    zero_submodule,
)

TL1 = build_Mm(Family.TL, 3, 1, 5)


def rng(seed):
    return np.random.Generator(np.random.PCG64(seed))


def test_ca_hom_edge_cases():
    for fam in Family:
        for n in range(4 if fam is not Family.PARTITION else 3):
            assert ca_hom(fam, 3, n, n).dim == build_algebra(fam, n, 3).dim
            assert ca_hom(fam, 3, 0, n).dim == 1
    assert ca_hom("tl", 3, 3, 2).dim == 0


def test_ca_hom_tl_1_3():
    h = ca_hom("tl", 3, 1, 3)
    assert h.dim == 3
    A = build_algebra("tl", 3, 3)
    e1 = A.index(parse_diagram("{1,2}{3,3'}{1',2'}", 3, "tl"))
    e2 = A.index(parse_diagram("{1,1'}{2,3}{2',3'}", 3, "tl"))
    e1e2, coef = A.mul(e1, e2)
    expected = span(A.dim, [[1 if k == e2 else 0 for k in range(5)],
                            [coef if k == e1e2 else 0 for k in range(5)]])
    assert h.relations == expected


def _multiply(alg, v, b, side):
    out = [0] * alg.dim
    for c, x in enumerate(v):
        if x:
            y, coef = alg.mul(b, c) if side == "left" else alg.mul(c, b)
            out[y] += coef * x
    return out


def test_relations_form_a_left_ideal():
    for fam, i, j in (("tl", 1, 3), ("brauer", 1, 3), ("partition", 1, 2)):
        h = ca_hom(fam, 3, i, j)
        A = h.algebra
        for v in h.relations.basis:
            for b in range(A.dim):
                assert h.relations.contains_vector(_multiply(A, v, b, "left"))
    # not a right ideal: e_2 e_1 leaves span{e_2, e_1 e_2}
    h = ca_hom("tl", 3, 1, 3)
    A = h.algebra
    e1 = A.index(parse_diagram("{1,2}{3,3'}{1',2'}", 3, "tl"))
    assert any(not h.relations.contains_vector(_multiply(A, v, e1, "right"))
               for v in h.relations.basis)


def test_shift_embedding_multiplicative():
    for fam, n in (("tl", 3), ("brauer", 2), ("partition", 2)):
        small, big = build_algebra(fam, n, 3), build_algebra(fam, n + 1, 3)
        iota = shift_embedding(small, big)
        assert iota[small.unit] == big.unit and len(set(iota)) == small.dim
        for a, b in product(range(small.dim), repeat=2):
            c, coef = small.mul(a, b)
            assert big.mul(iota[a], iota[b]) == (iota[c], coef)
    small, big = build_algebra("tl", 2, 3), build_algebra("tl", 3, 3)
    e = small.index(parse_diagram("{1,2}{1',2'}", 2, "tl"))
    assert big.label(shift_embedding(small, big)[e]) == "{1,2}{3,3'}{1',2'}"


def test_shift_commutes_with_subalgebra():
    # the first-strand copy of A_i and the last-strand copy of A_1 commute in A_{i+1}
    big = build_algebra("brauer", 3, 3)
    first = shift_embedding(build_algebra("brauer", 2, 3), big)
    last = embed(build_algebra("brauer", 1, 3), big)
    for a in first:
        for b in last:
            assert big.mul(a, b) == big.mul(b, a)


def test_build_M0():
    M = build_Mm("tl", 3, 0, 5)
    assert M.dims == [1] * 6
    assert all(any(phi.reshape(-1)) for phi in M.shifts)
    full = full_submodule(M)
    for i in range(5):
        nu = nu_prime(M, i, full)
        assert nu.shape == (1, 1) and nu[0, 0] != 0


def test_build_Mm_levels_match_ca_hom():
    M = build_Mm("tl", 3, 1, 4)
    assert validate_tower(M, exhaustive=True).ok
    assert M.dims == [0] + [ca_hom("tl", 3, 1, i).dim for i in range(1, 5)]
    assert M.dims == [0, 1, 2, 3, 4]
    B = build_Mm("brauer", 3, 1, 3)
    assert validate_tower(B).ok


def test_build_rejects_bad_range():
    with pytest.raises(ValueError):
        build_Mm("tl", 3, 3, 2)


def test_f_prime_edge_cases():
    full, zero = full_submodule(TL1), zero_submodule(TL1)
    # at i = m the subalgebra is A_0 = k
    assert f_prime(TL1, 1, full).dim == TL1.dims[1]
    for i in range(1, 6):
        assert f_prime(TL1, i, zero).dim == 0
    assert f_prime(TL1, 3, full).dim == F(TL1, 3, full).dim
    with pytest.raises(ValueError):
        f_prime(TL1, 0, full)


def test_nu_prime_zero():
    zero = zero_submodule(TL1)
    for i in range(1, 5):
        assert nu_prime(TL1, i, zero).shape == (0, 0)


def _inclusion_map(M, i, N):
    """F'_i(N) -> F'_i(M) induced by N_i <= M_i."""
    small, big = f_prime(M, i, N), f_prime(M, i, full_submodule(M))
    if small.dim == 0:
        return zeros(big.dim, 0)
    vecs = small.space.matrix.T @ small.quotient.section  # M_i coordinates
    return big.quotient.project @ vecs


@settings(max_examples=15)
@given(st.integers(0, 2**32 - 1))
def test_nu_prime_naturality(seed):
    M = TL1
    N = sample_submodule(M, rng(seed))
    full = full_submodule(M)
    for i in range(1, M.T):
        lhs = nu_prime(M, i, full) @ _inclusion_map(M, i, N)
        rhs = _inclusion_map(M, i + 1, N) @ nu_prime(M, i, N)
        assert matrices_equal(lhs, rhs)


def test_hom_equals_coinvariants_full():
    full = full_submodule(TL1)
    for i in range(1, 5):
        assert claim_a1_check(TL1, i, full)
    bad = build_Mm("tl", 0, 1, 2)
    with pytest.raises(HypothesisError):
        claim_a1_check(bad, 2, full_submodule(bad))


@settings(max_examples=10)
@given(st.integers(0, 2**32 - 1))
def test_hom_equals_coinvariants_sampled(seed):
    N = sample_submodule(TL1, rng(seed))
    for i in range(1, 6):
        assert claim_a1_check(TL1, i, N)


def test_certificate_negative_control():
    cert = criterion_certificate("tl", 0, 1, 3)
    assert cert.status == "failed" and cert.stabilization_d is None
    assert [r["radical_dim"] for r in cert.levels] == [0, 0, 1]


def test_certificate_tl_m0():
    cert = criterion_certificate("tl", 3, 0, 5)
    assert cert.certified and cert.stabilization_d <= 5
    assert all(r["nu_bijective"] for r in cert.levels)
    assert all(r["Fprime_dim"] == 1 for r in cert.levels)


def test_certificate_tl_m1_consistent():
    M = build_Mm("tl", 3, 1, 5)
    cert = certify_tower(M, "tl", "3")
    assert cert.certified
    d = cert.stabilization_d
    full = full_submodule(M)
    for r in cert.levels:
        if r["i"] >= 1:
            assert r["Fprime_dim"] == F(M, r["i"], full).dim
    assert hypotheses_hold_from(M, d) == []
    if d > 0:
        assert hypotheses_hold_from(M, d - 1)
    assert list(cert.to_json()) == ["family", "delta", "m", "T", "levels",
                                    "stabilization_d", "status"]


def test_certificate_brauer():
    cert = criterion_certificate("brauer", 3, 1, 4)
    assert cert.certified and cert.stabilization_d == 2
