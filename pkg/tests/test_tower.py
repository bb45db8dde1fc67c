import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from noethertower.algebra import FDModule, build_algebra, hom_space, isotypic_trivial, trivial_character
from noethertower.diagrams import Family
from noethertower.exact_linalg import Subspace, identity, span, zeros
from noethertower.fi import build_fi_Mm
from noethertower.stability import build_Mm
from noethertower.tower import (
    F,
    HypothesisError,
    InternalContradiction,
    Tower,
    full_submodule,
    generated_by_degrees,
    generated_in_degrees,
    lemma_a_witness,
    proof_replay,
    sample_proper_pair,
    sample_submodule,
    submodule_closure,
    validate_tower,
    zero_submodule,
)

FI1 = build_fi_Mm(1, 4)
FI1_6 = build_fi_Mm(1, 6)
TL1 = build_Mm(Family.TL, 3, 1, 4)


def rng(seed):
    return np.random.Generator(np.random.PCG64(seed))


def naive_closure(M, E):
    """Fixed point of 'span, act by every basis element, shift', iterated to stability."""
    spaces = [Subspace.zero(d) for d in M.dims]
    for i, v in E:
        spaces[i] = spaces[i] + span(M.dims[i], [v])
    while True:
        new = list(spaces)
        for i, s in enumerate(spaces):
            imgs = [M.levels[i].action(b) @ np.asarray(v, dtype=object)
                    for b in range(M.algebras[i].dim) for v in s.basis]
            new[i] = new[i] + span(M.dims[i], imgs)
            if i < M.T:
                new[i + 1] = new[i + 1] + span(M.dims[i + 1], [M.shift(i, v) for v in s.basis])
        if new == spaces:
            return spaces
        spaces = new


def test_zero_tower_valid():
    k = build_algebra("tl", 0, 1)
    zero = FDModule(k, 0, lambda b: zeros(0, 0))
    M = Tower([k, k], [zero, zero], [zeros(0, 0)])
    assert validate_tower(M).ok


def test_fi_tower_valid():
    assert validate_tower(FI1, exhaustive=True).ok


def test_corrupted_level_reported():
    A = FI1.algebras[3]
    good = FI1.levels[3]
    bad = FDModule(A, good.dim, lambda b: good.action(b) if b == A.unit else identity(good.dim) * 2)
    levels = list(FI1.levels)
    levels[3] = bad
    report = validate_tower(Tower(FI1.algebras, levels, FI1.shifts))
    assert [r["i"] for r in report.levels if not r["ok"]] == [3]


def test_closure_trivial_cases():
    assert submodule_closure(FI1, []).is_zero()
    M0 = build_fi_Mm(0, 4)
    N = submodule_closure(M0, [(0, [1])])
    assert N.spaces == full_submodule(M0).spaces


def test_closure_rejects_bad_input():
    with pytest.raises(ValueError):
        submodule_closure(FI1, [(7, [1])])
    with pytest.raises(ValueError):
        submodule_closure(FI1, [(2, [1])])


@settings(max_examples=30)
@given(st.integers(0, 2**32 - 1), st.sampled_from(["fi", "tl"]))
def test_closure_matches_naive_fixed_point(seed, which):
    M = FI1 if which == "fi" else TL1
    g = rng(seed)
    i = int(g.integers(1, M.T + 1))
    v = [int(x) for x in g.integers(-2, 3, size=M.dims[i])]
    N = submodule_closure(M, [(i, v)])
    assert list(N.spaces) == naive_closure(M, [(i, v)])
    assert N.check_invariance() == []
    # idempotent, and minimal among submodules containing the generator
    assert submodule_closure(M, [(j, w) for j in range(M.T + 1) for w in N.spaces[j].basis]) == N
    assert N.spaces[i].contains_vector(v)


@settings(max_examples=20)
@given(st.integers(0, 2**32 - 1))
def test_closure_monotone(seed):
    g = rng(seed)
    N1 = sample_submodule(FI1, g)
    N2 = sample_submodule(FI1, g)
    E1 = [(i, v) for i in range(FI1.T + 1) for v in N1.spaces[i].basis]
    E2 = [(i, v) for i in range(FI1.T + 1) for v in N2.spaces[i].basis]
    both = submodule_closure(FI1, E1 + E2)
    assert both.contains(N1) and both.contains(N2)


def test_generated_in_degrees():
    assert generated_in_degrees(FI1, zero_submodule(FI1)) == 0
    for M in (FI1, TL1, build_fi_Mm(2, 4)):
        assert generated_in_degrees(M, full_submodule(M)) == M.m
    g = rng(3)
    for _ in range(5):
        fixed = isotypic_trivial(FI1.levels[2], trivial_character(FI1.algebras[2]))
        v = fixed.basis[0]
        N = submodule_closure(FI1, [(2, v)])
        assert generated_in_degrees(FI1, N) <= 2
        N = sample_submodule(FI1, g, levels=[2])
        assert generated_in_degrees(FI1, N) <= 2


def test_generated_by_degrees_chain():
    N = full_submodule(TL1)
    prev = zero_submodule(TL1)
    for ell in range(TL1.T + 1):
        cur = generated_by_degrees(N, ell)
        assert cur.contains(prev) and N.contains(cur)
        prev = cur


def test_F_basic():
    M = FI1
    full, zero = full_submodule(M), zero_submodule(M)
    for i in range(M.T + 1):
        assert F(M, i, full).dim == hom_space(M.levels[i], M.levels[i]).dim
        assert F(M, i, zero).dim == 0
    # kC(1,2) is the permutation module of S_2: trivial plus sign
    assert F(M, 2, full).dim == 2


@settings(max_examples=15)
@given(st.integers(0, 2**32 - 1))
def test_F_monotone(seed):
    Nsub, N, i = sample_proper_pair(TL1, rng(seed), levels=range(1, TL1.T + 1))
    for j in range(TL1.T + 1):
        small, big = F(TL1, j, Nsub), F(TL1, j, N)
        assert big.space.contains(small.space)


def test_witness_for_zero_submodule():
    M = FI1
    h = lemma_a_witness(M, 3, full_submodule(M), zero_submodule(M))
    assert (h == identity(M.dims[3])).all()


def test_witness_trivial_isotypic():
    M = FI1
    v = isotypic_trivial(M.levels[2], trivial_character(M.algebras[2])).basis[0]
    Nsub = submodule_closure(M, [(2, v)])
    N = full_submodule(M)
    h = lemma_a_witness(M, 2, N, Nsub)
    assert F(M, 2, Nsub).dim < F(M, 2, N).dim
    assert F(M, 2, N).contains_matrix(h) and not F(M, 2, Nsub).contains_matrix(h)


def test_witness_preconditions():
    M = FI1
    with pytest.raises(HypothesisError):
        lemma_a_witness(M, 2, zero_submodule(M), full_submodule(M))
    with pytest.raises(HypothesisError):
        lemma_a_witness(M, 2, full_submodule(M), full_submodule(M))
    bad = build_Mm(Family.TL, 0, 0, 2)
    with pytest.raises(HypothesisError, match="semisimple"):
        lemma_a_witness(bad, 2, full_submodule(bad), zero_submodule(bad))


def test_replay_full_and_zero():
    M = FI1_6
    report = proof_replay(M, full_submodule(M), 2)
    assert report.halted_reason == "chain-stabilized"
    assert report.ell == [2] and report.dims == [2] == [report.bound]
    empty = proof_replay(M, zero_submodule(M), 2)
    assert empty.ell == [] and empty.dims == []


def test_replay_sampled_chain_bound():
    M = FI1_6
    for seed in range(10):
        r = proof_replay(M, sample_submodule(M, rng(seed)), 2)
        assert len(r.ell) <= r.bound + 1 and all(x <= 2 for x in r.dims)
        for step in r.steps:
            before, after = step["strict_growth"]
            assert before < after <= r.bound


def test_replay_rejects_bad_hypotheses():
    bad = build_Mm(Family.TL, 0, 1, 3)
    with pytest.raises(HypothesisError):
        proof_replay(bad, full_submodule(bad), 1)
    with pytest.raises(ValueError):
        proof_replay(FI1, full_submodule(FI1), 9)


def _corrupt(M, d):
    levels = list(M.levels)
    for i in range(d + 1, M.T + 1):
        A, dim = M.algebras[i], M.dims[i]
        eps = trivial_character(A)
        levels[i] = FDModule(A, dim, lambda b, eps=eps, dim=dim: eps(b) * identity(dim))
    return Tower(M.algebras, levels, M.shifts, m=M.m)


def test_replay_detects_corruption():
    C = _corrupt(FI1_6, 2)
    assert validate_tower(C).ok
    with pytest.raises(InternalContradiction):
        proof_replay(C, full_submodule(C), 2, check_hypotheses=False)
    r = proof_replay(C, full_submodule(C), 2, strict=False, check_hypotheses=False)
    assert r.halted_reason == "bound-would-be-violated"


def test_submodule_json():
    N = submodule_closure(FI1, [(1, [1])])
    data = N.to_json()
    assert [lvl["dim"] for lvl in data["levels"]] == [0, 1, 2, 3, 4]
    assert data["levels"][1]["basis_rref"] == [["1"]]
