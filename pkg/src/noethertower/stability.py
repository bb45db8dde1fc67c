"""Stability categories of diagram algebras and the criterion certificate.

The hom space ``C_A(i, j) = A_j (x)_{A_{j-i}} k`` is realised as the quotient
of ``A_j`` by the left ideal generated by ``iota(b) - eps(b) 1`` for ``b`` in
``A_{j-i}``, where ``iota`` places ``A_{j-i}`` on the last ``j - i`` strands and
``eps`` is the trivial character.  The representable tower ``M(m)`` has
``M(m)_i = C_A(m, i)``; its shift is post-composition with ``1 (x) 1`` in
``C_A(i, i+1)``, i.e. ``A_i`` placed on the first ``i`` strands of ``A_{i+1}``
(the complement of the ``A_1`` that is tensored away).
"""
from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from .algebra import (
    BasisAlgebra,
    DiagramAlgebra,
    FDModule,
    build_algebra,
    coinvariants,
    embed,
    radical,
    restrict,
    submodule_module,
    trivial_character,
)
from .diagrams import Diagram, Family
from .exact_linalg import Echelon, Quotient, Subspace, parse_rat, quotient, rank, rat_str, zeros
from .tower import (
    F,
    HypothesisError,
    Tower,
    TruncSubmodule,
    full_submodule,
    validate_tower,
)

__all__ = [
    "StabHom",
    "ca_hom",
    "build_Mm",
    "WellDefinednessError",
    "FPrime",
    "f_prime",
    "nu_prime",
    "claim_a1_check",
    "hypotheses_hold_from",
    "CriterionCertificate",
    "certify_tower",
    "criterion_certificate",
]


class WellDefinednessError(RuntimeError):
    """A map that should descend to a quotient does not."""


@dataclass(frozen=True)
class StabHom:
    i: int
    j: int
    algebra: BasisAlgebra | None
    quotient: Quotient

    @property
    def dim(self) -> int:
        return self.quotient.dim

    @property
    def relations(self) -> Subspace:
        return self.quotient.rel


def _left_ideal(alg: BasisAlgebra, seeds) -> Subspace:
    e = Echelon(alg.dim)
    queue = []
    for v in seeds:
        if e.add(v):
            queue.append(dict(v))
    while queue:
        v = queue.pop()
        for g in alg.generators:
            w: dict[int, Fraction] = {}
            for c, x in v.items():
                gc, coef = alg.mul(g, c)
                if coef:
                    w[gc] = w.get(gc, 0) + coef * x
            w = {k: x for k, x in w.items() if x}
            if w and e.add(w):
                queue.append(w)
    return e.subspace()


def ca_hom(family, delta, i: int, j: int) -> StabHom:
    """``C_A(i, j)`` as a quotient of ``A_j``; zero when ``i > j``."""
    if i > j:
        return StabHom(i, j, None, quotient(0, Subspace.zero(0)))
    big = build_algebra(family, j, delta)
    small = build_algebra(family, j - i, delta)
    emb = embed(small, big)
    eps = trivial_character(small)
    seeds = []
    for b in range(small.dim):
        v = {emb[b]: Fraction(1)}
        v[big.unit] = v.get(big.unit, 0) - eps(b)
        seeds.append({k: x for k, x in v.items() if x})
    rel = _left_ideal(big, seeds)
    return StabHom(i, j, big, quotient(big.dim, rel))


def _quotient_module(h: StabHom) -> FDModule:
    alg, q = h.algebra, h.quotient

    def act(b):
        m = zeros(q.dim, q.dim)
        for t, c in enumerate(q.free_columns):
            y, coef = alg.mul(b, c)
            if coef:
                m[:, t] = coef * q.project[:, y]
        return m

    return FDModule(alg, q.dim, act, name=f"C_A({h.i},{h.j})")


def shift_embedding(small: DiagramAlgebra, big: DiagramAlgebra) -> tuple[int, ...]:
    """``A_i -> A_{i+1}`` on the first strands, the new strand added on the right."""
    off = big.n - small.n
    out = []
    for d in small.basis:
        blocks = [(small.n + k, big.n + small.n + k) for k in range(off)]
        for b in d.blocks:
            blocks.append(tuple(p if p < small.n else p - small.n + big.n for p in b))
        out.append(big.index(Diagram.make(big.n, blocks, big.family)))
    return tuple(out)


def _zero_module(alg: BasisAlgebra) -> FDModule:
    return FDModule(alg, 0, lambda b: zeros(0, 0), name="zero")


def build_Mm(family, delta, m: int, T: int) -> Tower:
    """The tower ``M(m)`` truncated at ``T``.

    Raises :class:`WellDefinednessError` if the shift does not descend to the
    quotients, which would mean the embedding conventions are inconsistent.
    """
    if not 0 <= m <= T:
        raise ValueError(f"need 0 <= m <= T, got m={m}, T={T}")
    family = Family.parse(family)
    delta = parse_rat(delta)
    algebras = [build_algebra(family, i, delta) for i in range(T + 1)]
    homs: list[StabHom | None] = [None] * (T + 1)
    levels = []
    for i, A in enumerate(algebras):
        if i < m:
            levels.append(_zero_module(A))
        else:
            homs[i] = ca_hom(family, delta, m, i)
            levels.append(_quotient_module(homs[i]))
    shifts = []
    for i in range(T):
        lo, hi = homs[i], homs[i + 1]
        if lo is None:
            shifts.append(zeros(levels[i + 1].dim, 0))
            continue
        iota = shift_embedding(algebras[i], algebras[i + 1])
        phi = zeros(hi.dim, lo.dim)
        for t, c in enumerate(lo.quotient.free_columns):
            phi[:, t] = hi.quotient.project[:, iota[c]]
        for r in lo.relations.basis:
            img = zeros(1, algebras[i + 1].dim)[0]
            for c, x in enumerate(r):
                if x:
                    img[iota[c]] += x
            if any(hi.quotient.project_vector(img)):
                raise WellDefinednessError(
                    f"shift {i} -> {i + 1} does not preserve the relation spaces"
                )
        shifts.append(phi)
    restrictions = {}
    for i in range(m, T + 1):
        sub = build_algebra(family, i - m, delta)
        restrictions[i] = (sub, embed(sub, algebras[i]))
    tower = Tower(algebras, levels, shifts, m=m, restrictions=restrictions,
                  meta={"family": family.value, "delta": rat_str(delta), "m": m})
    report = validate_tower(tower)
    if not report.ok:
        raise WellDefinednessError(f"M({m}) fails the module axioms: {report.levels}")
    return tower


# -- coinvariant functor and its shift -------------------------------------------

@dataclass(frozen=True)
class FPrime:
    """``k (x)_{A_{i-m}} N_i``, in the coordinates of the RREF basis of ``N_i``."""

    i: int
    space: Subspace
    quotient: Quotient

    @property
    def dim(self) -> int:
        return self.quotient.dim


def f_prime(M: Tower, i: int, N: TruncSubmodule) -> FPrime:
    if M.m is None or i not in M.restrictions:
        raise ValueError(f"no coinvariant data at level {i} (need m <= i <= T)")
    sub, emb = M.restrictions[i]
    Ni = N.spaces[i]
    module = restrict(submodule_module(M.levels[i], Ni), sub, emb)
    return FPrime(i, Ni, coinvariants(module, trivial_character(sub)))


def nu_prime(M: Tower, i: int, N: TruncSubmodule) -> np.ndarray:
    """Matrix of the map ``F'_i(N) -> F'_{i+1}(N)`` induced by the shift."""
    if i + 1 > M.T:
        raise ValueError("nu' needs level i+1 within the truncation")
    lo, hi = f_prime(M, i, N), f_prime(M, i + 1, N)
    src = lo.space.matrix  # rows: basis of N_i in M_i

    def carry(coords):
        # N_i coordinates -> N_{i+1} coordinates
        v = np.asarray(coords, dtype=object) @ src if lo.space.dim else zeros(1, M.dims[i])[0]
        w = M.shift(i, v)
        c = hi.space.coordinates(w)
        if c is None:
            raise WellDefinednessError(f"shift {i} leaves the submodule")
        return np.asarray(c, dtype=object) if c else zeros(1, 0)[0]

    for r in lo.quotient.rel.basis:
        if any(hi.quotient.project_vector(carry(r))):
            raise WellDefinednessError(f"nu'_{i} does not descend to coinvariants")
    out = zeros(hi.dim, lo.dim)
    for t in range(lo.dim):
        out[:, t] = hi.quotient.project_vector(carry(lo.quotient.section[:, t]))
    return out


def _bijective(m: np.ndarray) -> bool:
    r, c = m.shape
    return r == c and (r == 0 or rank(m) == r)


def claim_a1_check(M: Tower, i: int, N: TruncSubmodule) -> bool:
    """``dim Hom_{A_i}(M_i, N_i) == dim k (x)_{A_{i-m}} N_i`` at a semisimple level."""
    if radical(M.algebras[i]).dim:
        raise HypothesisError(f"A_{i} is not semisimple")
    return F(M, i, N).dim == f_prime(M, i, N).dim


def hypotheses_hold_from(M: Tower, d: int) -> list[str]:
    """Failures of the noetherian hypotheses on levels ``d..T`` (empty if none).

    Semisimplicity is certified through ``radical(A_i) = 0``; bijectivity of
    ``nu_i`` through ``nu'_i(M)``, which needs the coinvariant data of ``M(m)``.
    """
    bad = []
    full = full_submodule(M)
    for i in range(d, M.T + 1):
        if radical(M.algebras[i]).dim:
            bad.append(f"A_{i} has nonzero radical")
    if M.m is None:
        bad.append("tower carries no coinvariant data for nu'")
        return bad
    for i in range(d, M.T):
        if not _nu_bijective(M, i, full):
            bad.append(f"nu'_{i}(M) is not bijective")
    return bad


def _fprime_dim(M: Tower, i: int, N: TruncSubmodule) -> int:
    return f_prime(M, i, N).dim if i >= M.m else 0


def _nu_bijective(M: Tower, i: int, N: TruncSubmodule) -> bool:
    if i >= M.m:
        return _bijective(nu_prime(M, i, N))
    # zero source; bijective only onto a zero target
    return _fprime_dim(M, i + 1, N) == 0


# -- certificate --------------------------------------------------------------------

CERTIFIED = "certified-at-truncation"
FAILED = "failed"


@dataclass
class CriterionCertificate:
    family: str
    delta: str | None
    m: int
    T: int
    levels: list[dict]
    stabilization_d: int | None
    status: str
    extras: dict = field(default_factory=dict)

    @property
    def certified(self) -> bool:
        return self.status == CERTIFIED

    @property
    def stable_fprime_dim(self) -> int | None:
        if self.stabilization_d is None:
            return None
        return self.levels[self.stabilization_d]["Fprime_dim"]

    def to_json(self) -> dict:
        return {
            "family": self.family,
            "delta": self.delta,
            "m": self.m,
            "T": self.T,
            "levels": [
                {k: rec[k] for k in ("i", "algebra_dim", "radical_dim", "level_dim",
                                      "Fprime_dim", "nu_bijective")}
                for rec in self.levels
            ],
            "stabilization_d": self.stabilization_d,
            "status": self.status,
        }


def certify_tower(M: Tower, family: str, delta: str | None) -> CriterionCertificate:
    """Per-level hypothesis records on ``0..T-1`` and the stabilization index.

    ``stabilization_d`` is the least ``d < T`` such that every level in
    ``[d, T)`` has a semisimple algebra and a bijective ``nu'_i(M)``.
    """
    if M.m is None:
        raise ValueError("certificates need a representable tower M(m)")
    full = full_submodule(M)
    records = []
    for i in range(M.T):
        records.append({
            "i": i,
            "algebra_dim": M.algebras[i].dim,
            "radical_dim": radical(M.algebras[i]).dim,
            "level_dim": M.dims[i],
            "Fprime_dim": _fprime_dim(M, i, full),
            "nu_bijective": _nu_bijective(M, i, full),
        })
    good = [r["radical_dim"] == 0 and r["nu_bijective"] for r in records]
    d = None
    for start in range(M.T - 1, -1, -1):
        if not good[start]:
            break
        d = start
    status = CERTIFIED if d is not None else FAILED
    return CriterionCertificate(family, delta, M.m, M.T, records, d, status)


def criterion_certificate(family, delta, m: int, T: int) -> CriterionCertificate:
    family = Family.parse(family)
    delta = parse_rat(delta)
    M = build_Mm(family, delta, m, T)
    return certify_tower(M, family.value, rat_str(delta))
