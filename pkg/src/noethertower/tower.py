"""Towers of modules with linear shift maps, truncated at a finite level.

A :class:`Tower` is a list of modules ``M_0, ..., M_T`` over algebras
``A_0, ..., A_T`` together with linear maps ``phi_i: M_i -> M_{i+1}``.  The
shifts are plain linear maps; no equivariance is asked of them.

Everything here is a statement "up to level T": submodules, generation
degrees and the replay of the noetherian argument are computed on the
truncation and never extrapolated past it.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Sequence

import numpy as np

from .algebra import (
    BasisAlgebra,
    FDModule,
    HomSpace,
    equivariant_projection,
    hom_space,
    isotypic_trivial,
    radical,
    submodule_module,
    trivial_character,
)
from .exact_linalg import Echelon, Subspace, rat_str, zeros

__all__ = [
    "Tower",
    "TowerReport",
    "TruncSubmodule",
    "HypothesisError",
    "InternalContradiction",
    "validate_tower",
    "submodule_closure",
    "zero_submodule",
    "full_submodule",
    "generated_by_degrees",
    "generated_in_degrees",
    "F",
    "lemma_a_witness",
    "ProofReplayReport",
    "proof_replay",
    "sample_submodule",
    "sample_proper_pair",
]


class HypothesisError(ValueError):
    """A hypothesis of the requested construction does not hold."""


class InternalContradiction(RuntimeError):
    """A quantity the noetherian argument bounds was exceeded.

    Under verified hypotheses this cannot happen, so it always signals a bug
    or a deliberately corrupted tower.
    """


@dataclass
class Tower:
    """``levels[i]`` is an ``algebras[i]``-module; ``shifts[i]`` maps level i to i+1.

    Towers built as representable modules ``M(m)`` also carry, for every
    ``i >= m``, the subalgebra ``A_{i-m}`` and its basis embedding into
    ``A_i`` (``restrictions[i]``); coinvariant functors are taken along it.
    """

    algebras: list[BasisAlgebra]
    levels: list[FDModule]
    shifts: list[np.ndarray]
    m: int | None = None
    restrictions: dict[int, tuple[BasisAlgebra, tuple[int, ...]]] = field(default_factory=dict)
    meta: dict = field(default_factory=dict)

    def __post_init__(self):
        if len(self.algebras) != len(self.levels) or len(self.shifts) != len(self.levels) - 1:
            raise ValueError("a tower needs T+1 algebras and levels and T shifts")
        self._F_cache: dict[tuple[int, Subspace], HomSpace] = {}

    @property
    def T(self) -> int:
        return len(self.levels) - 1

    @property
    def dims(self) -> list[int]:
        return [M.dim for M in self.levels]

    def shift(self, i: int, v) -> np.ndarray:
        return self.shifts[i] @ np.asarray(v, dtype=object)


@dataclass
class TowerReport:
    levels: list[dict]

    @property
    def ok(self) -> bool:
        return all(rec["ok"] for rec in self.levels)


def validate_tower(M: Tower, exhaustive: bool = False) -> TowerReport:
    """Module axioms at every level and shape consistency of the shifts."""
    recs = []
    for i, (A, Mi) in enumerate(zip(M.algebras, M.levels)):
        errors = []
        if Mi.algebra is not A:
            errors.append("level module is over a different algebra")
        else:
            errors.extend(Mi.check_axioms(exhaustive=exhaustive))
        if i < M.T:
            want = (M.levels[i + 1].dim, Mi.dim)
            if M.shifts[i].shape != want:
                errors.append(f"shift {i} has shape {M.shifts[i].shape}, expected {want}")
        recs.append({"i": i, "ok": not errors, "errors": errors})
    return TowerReport(recs)


@dataclass(frozen=True)
class TruncSubmodule:
    """Per-level invariant subspaces ``S_0, ..., S_T`` with ``phi_i(S_i) <= S_{i+1}``."""

    parent: Tower = field(compare=False, repr=False)
    spaces: tuple[Subspace, ...]

    @property
    def dims(self) -> list[int]:
        return [s.dim for s in self.spaces]

    def __getitem__(self, i: int) -> Subspace:
        return self.spaces[i]

    def is_zero(self) -> bool:
        return all(s.dim == 0 for s in self.spaces)

    def contains(self, other: "TruncSubmodule") -> bool:
        return all(a.contains(b) for a, b in zip(self.spaces, other.spaces))

    def check_invariance(self) -> list[str]:
        """Re-check closure under the level actions and the shifts."""
        M = self.parent
        errors = []
        for i, s in enumerate(self.spaces):
            if not M.levels[i].is_invariant(s):
                errors.append(f"level {i} is not invariant under A_{i}")
            if i < M.T and s.dim:
                target = self.spaces[i + 1]
                for v in s.basis:
                    if not target.contains_vector(M.shift(i, v)):
                        errors.append(f"shift {i} leaves the submodule")
                        break
        return errors

    def to_json(self) -> dict:
        return {
            "levels": [
                {"i": i, "dim": s.dim, "basis_rref": [[rat_str(x) for x in r] for r in s.basis]}
                for i, s in enumerate(self.spaces)
            ]
        }


def zero_submodule(M: Tower) -> TruncSubmodule:
    return TruncSubmodule(M, tuple(Subspace.zero(d) for d in M.dims))


def full_submodule(M: Tower) -> TruncSubmodule:
    return TruncSubmodule(M, tuple(Subspace.full(d) for d in M.dims))


def submodule_closure(M: Tower, E: Iterable[tuple[int, Sequence]]) -> TruncSubmodule:
    """Smallest truncated submodule containing the (level, vector) pairs in E."""
    ech = [Echelon(d) for d in M.dims]
    pending: list[list[np.ndarray]] = [[] for _ in M.levels]

    def push(i, v):
        v = np.asarray(v, dtype=object)
        if ech[i].add(v):
            pending[i].append(v)

    for i, v in E:
        if not 0 <= i <= M.T:
            raise ValueError(f"level {i} outside 0..{M.T}")
        if len(v) != M.dims[i]:
            raise ValueError(f"vector at level {i} has length {len(v)}, expected {M.dims[i]}")
        push(i, v)
    for i, Mi in enumerate(M.levels):
        spanning = []
        queue = pending[i]
        while queue:
            v = queue.pop()
            spanning.append(v)
            for g in Mi.generators:
                push(i, Mi.action(g) @ v)
        if i < M.T:
            for v in spanning:
                push(i + 1, M.shift(i, v))
    return TruncSubmodule(M, tuple(e.subspace() for e in ech))


def generated_by_degrees(N: TruncSubmodule, ell: int) -> TruncSubmodule:
    """``N^(ell)``: the submodule generated by ``N_0, ..., N_ell``."""
    M = N.parent
    gens = [(i, v) for i in range(min(ell, M.T) + 1) for v in N.spaces[i].basis]
    return submodule_closure(M, gens)


def generated_in_degrees(M: Tower, N: TruncSubmodule) -> int | None:
    """Least g with ``N^(g) == N`` up to level T, or None if there is none."""
    for g in range(M.T + 1):
        if generated_by_degrees(N, g).spaces == N.spaces:
            return g
    return None


def F(M: Tower, i: int, N: TruncSubmodule) -> HomSpace:
    """``Hom_{A_i}(M_i, N_i)``, as intertwiners ``M_i -> M_i`` with image in ``N_i``.

    Using the ambient ``End(M_i)`` makes ``N' <= N`` give ``F(i, N') <= F(i, N)``
    as an honest inclusion of subspaces.
    """
    if not 0 <= i <= M.T:
        raise ValueError(f"level {i} outside 0..{M.T}")
    Ni = N.spaces[i]
    key = (i, Ni)
    hit = M._F_cache.get(key)
    if hit is not None:
        return hit
    Mi = M.levels[i]
    d = Mi.dim
    if Ni.dim == 0:
        out = HomSpace(Mi, Mi, Subspace.zero(d * d))
    else:
        homs = hom_space(Mi, submodule_module(Mi, Ni))
        incl = Ni.matrix.T
        out = HomSpace(Mi, Mi, Subspace.from_rows(d * d, [(incl @ x).reshape(-1) for x in homs.basis]))
    M._F_cache[key] = out
    return out


def _require_semisimple(M: Tower, i: int) -> None:
    if radical(M.algebras[i]).dim:
        raise HypothesisError(f"A_{i} is not semisimple (nonzero radical)")


def lemma_a_witness(M: Tower, i: int, N: TruncSubmodule, Nsub: TruncSubmodule) -> np.ndarray:
    """Projection ``h`` onto ``N_i`` along an invariant complement, with
    ``h`` in ``F(i, N)`` but not in ``F(i, Nsub)``."""
    if not N.contains(Nsub):
        raise HypothesisError("the smaller submodule is not contained in the larger one")
    if N.spaces[i] == Nsub.spaces[i]:
        raise HypothesisError(f"inclusion is not proper at level {i}")
    _require_semisimple(M, i)
    h = equivariant_projection(M.levels[i], N.spaces[i])
    big, small = F(M, i, N), F(M, i, Nsub)
    if not big.contains_matrix(h):
        raise InternalContradiction("projection is not a homomorphism into N_i")
    if small.contains_matrix(h):
        raise InternalContradiction("projection factors through the smaller submodule")
    return h


# -- replay of the noetherian argument ------------------------------------------

HALT_REASONS = ("chain-stabilized", "bound-would-be-violated", "truncation-reached")


@dataclass
class ProofReplayReport:
    d: int
    ell: list[int]
    dims: list[int]
    bound: int
    halted_reason: str
    steps: list[dict] = field(default_factory=list)
    seed: int | None = None

    def to_json(self) -> dict:
        return {
            "d": self.d,
            "ell": list(self.ell),
            "dims": list(self.dims),
            "bound": self.bound,
            "halted_reason": self.halted_reason,
            "steps": self.steps,
            "seed": self.seed,
        }


def proof_replay(M: Tower, N: TruncSubmodule, d: int, *, strict: bool = True,
                 check_hypotheses: bool = True) -> ProofReplayReport:
    """Replay the chain ``ell_0 = d``, ``ell_{k+1} = d_{ell_k}`` on a truncated submodule.

    ``d_ell`` is the least level above ``ell`` where ``N^(ell)`` is strictly
    smaller than ``N``.  Each step checks the strict growth of
    ``dim F(ell_{k+1}, .)``, that the step from ``ell_k`` to ``ell_{k+1}``
    does not lose dimension, and the bound ``dim F(d, M)``.  A failed check is
    an :class:`InternalContradiction` (or, with ``strict=False``, stops the
    chain with ``halted_reason = "bound-would-be-violated"``).
    """
    if not 0 <= d <= M.T:
        raise ValueError(f"d={d} outside 0..{M.T}")
    if check_hypotheses:
        from .stability import hypotheses_hold_from

        bad = hypotheses_hold_from(M, d)
        if bad:
            raise HypothesisError("; ".join(bad))
    bound = F(M, d, full_submodule(M)).dim
    if N.is_zero():
        return ProofReplayReport(d, [], [], bound, "chain-stabilized")

    ell = [d]
    dims = [F(M, d, N).dim]
    if dims[0] > bound:
        raise InternalContradiction(f"dim F_{d}(N) = {dims[0]} exceeds bound {bound}")
    steps: list[dict] = []
    sub = generated_by_degrees(N, d)
    while True:
        cur = ell[-1]
        if cur == M.T:
            reason = "truncation-reached"
            break
        nxt = next((j for j in range(cur + 1, M.T + 1) if sub.spaces[j] != N.spaces[j]), None)
        if nxt is None:
            reason = "chain-stabilized"
            break
        nxt_sub = generated_by_degrees(N, nxt)
        before = F(M, nxt, sub).dim
        after = F(M, nxt, nxt_sub).dim
        step = {
            "from": cur,
            "to": nxt,
            "strict_growth": [before, after],
            "no_loss": [dims[-1], before],
            "within_bound": [after, bound],
        }
        steps.append(step)
        failures = []
        if not before < after:
            failures.append(f"dim F_{nxt}(N^({cur})) = {before} is not < {after}")
        if not dims[-1] <= before:
            failures.append(f"dim dropped from {dims[-1]} to {before} between levels {cur} and {nxt}")
        if after > bound:
            failures.append(f"dim F_{nxt}(N^({nxt})) = {after} exceeds bound {bound}")
        if failures:
            if strict:
                raise InternalContradiction("; ".join(failures))
            reason = "bound-would-be-violated"
            break
        ell.append(nxt)
        dims.append(after)
        sub = nxt_sub
    return ProofReplayReport(d, ell, dims, bound, reason, steps)


# -- seeded sampling ---------------------------------------------------------------

def _random_vector(rng: np.random.Generator, M: Tower, i: int) -> np.ndarray:
    Mi = M.levels[i]
    mode = int(rng.integers(3))
    if mode == 1:
        # trivial-isotypic vectors give small submodules
        fixed = isotypic_trivial(Mi, trivial_character(Mi.algebra))
        if fixed.dim:
            coeffs = rng.integers(-2, 3, size=fixed.dim)
            if any(coeffs):
                return np.asarray([Fraction(int(c)) for c in coeffs], dtype=object) @ fixed.matrix
    if mode == 2:
        v = zeros(1, Mi.dim)[0]
        a, b = (int(x) for x in rng.integers(Mi.dim, size=2))
        v[a] += 1
        if a != b:
            v[b] -= 1
        return v
    v = np.asarray([Fraction(int(c)) for c in rng.integers(-2, 3, size=Mi.dim)], dtype=object)
    if not any(v):
        v[int(rng.integers(Mi.dim))] = Fraction(1)
    return v


def sample_submodule(M: Tower, rng: np.random.Generator, max_generators: int = 2,
                     levels: Sequence[int] | None = None) -> TruncSubmodule:
    """Closure of 1..max_generators pseudo-random vectors at random levels."""
    cands = [i for i in (levels if levels is not None else range(M.T + 1)) if M.dims[i]]
    if not cands:
        return zero_submodule(M)
    k = int(rng.integers(1, max_generators + 1))
    E = []
    for _ in range(k):
        i = cands[int(rng.integers(len(cands)))]
        E.append((i, _random_vector(rng, M, i)))
    return submodule_closure(M, E)


def sample_proper_pair(M: Tower, rng: np.random.Generator, levels: Sequence[int],
                       attempts: int = 50) -> tuple[TruncSubmodule, TruncSubmodule, int]:
    """A pair ``Nsub <= N`` and a level in ``levels`` where the inclusion is proper."""
    for _ in range(attempts):
        N = sample_submodule(M, rng)
        proper = [i for i in levels if N.spaces[i].dim]
        if not proper:
            continue
        # smaller submodule: closure of a random vector of N, or zero
        E = []
        if int(rng.integers(4)):
            j = int(rng.integers(M.T + 1))
            Nj = N.spaces[j]
            if Nj.dim:
                coeffs = [Fraction(int(c)) for c in rng.integers(-2, 3, size=Nj.dim)]
                if any(coeffs):
                    E.append((j, np.asarray(coeffs, dtype=object) @ Nj.matrix))
        Nsub = submodule_closure(M, E)
        proper = [i for i in levels if Nsub.spaces[i] != N.spaces[i]]
        if proper:
            return Nsub, N, proper[int(rng.integers(len(proper)))]
    raise RuntimeError("could not sample a proper pair of submodules")
