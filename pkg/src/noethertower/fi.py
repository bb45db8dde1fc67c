"""EI categories, shipped for FI (finite sets and injections).

Morphisms ``C(i, j)`` are injections ``{1..i} -> {1..j}`` written as value
lists; ``G_i = C(i, i)`` is the symmetric group.  The chosen morphism
``alpha_i`` is the standard inclusion ``{1..i} -> {1..i+1}``, so the
stabilizer ``H_{i,j}`` of ``alpha_{j-1} ... alpha_i`` is the group of
permutations fixing ``1..i`` pointwise, a copy of ``S_{j-i}`` on the last
``j - i`` points.
"""
from __future__ import annotations

import abc
import itertools
from dataclasses import dataclass
from functools import lru_cache

from .algebra import BasisAlgebra, FDModule, embed
from .exact_linalg import zeros
from .stability import CriterionCertificate, FPrime, certify_tower, f_prime
from .tower import Tower, TruncSubmodule, validate_tower

__all__ = [
    "Injection",
    "EIInstance",
    "FI",
    "fi_hom",
    "fi_compose",
    "alpha",
    "alpha_chain",
    "fi_axioms_check",
    "stabilizer",
    "claim_b1_witness",
    "orbits",
    "MuMap",
    "mu",
    "SymmetricGroupAlgebra",
    "group_algebra",
    "GROUP_CAP",
    "build_fi_Mm",
    "fi_f_prime",
    "fi_certificate",
]

GROUP_CAP = 6


@dataclass(frozen=True, order=True)
class Injection:
    """An injection ``{1..i} -> {1..j}``; ``values[k]`` is the image of ``k+1``."""

    j: int
    values: tuple[int, ...]

    def __post_init__(self):
        if len(set(self.values)) != len(self.values):
            raise ValueError(f"values are not distinct: {self.values}")
        if any(not 1 <= v <= self.j for v in self.values):
            raise ValueError(f"values must lie in 1..{self.j}: {self.values}")

    @property
    def i(self) -> int:
        return len(self.values)

    def __call__(self, x: int) -> int:
        return self.values[x - 1]

    def __str__(self) -> str:
        return str(list(self.values))

    def to_json(self) -> list[int]:
        return list(self.values)


def fi_compose(beta: Injection, alpha_: Injection) -> Injection:
    """``beta o alpha``: first ``alpha``, then ``beta``."""
    if alpha_.j != beta.i:
        raise ValueError(f"cannot compose {beta} after {alpha_}")
    return Injection(beta.j, tuple(beta(v) for v in alpha_.values))


def fi_hom(i: int, j: int) -> list[Injection]:
    """All injections ``{1..i} -> {1..j}`` in lexicographic order."""
    if i > j:
        return []
    return [Injection(j, p) for p in itertools.permutations(range(1, j + 1), i)]


def alpha(i: int) -> Injection:
    return Injection(i + 1, tuple(range(1, i + 1)))


def alpha_chain(i: int, j: int) -> Injection:
    """``alpha_{j-1} o ... o alpha_i``, the standard inclusion ``{1..i} -> {1..j}``."""
    if i > j:
        raise ValueError("need i <= j")
    return Injection(j, tuple(range(1, i + 1)))


class EIInstance(abc.ABC):
    """An EI category with objects 0, 1, 2, ... and a chosen ``alpha_i`` per object."""

    @abc.abstractmethod
    def hom(self, i: int, j: int) -> list: ...

    @abc.abstractmethod
    def compose(self, beta, alpha_): ...

    @abc.abstractmethod
    def alpha(self, i: int): ...

    def group(self, i: int) -> list:
        return self.hom(i, i)

    def identity(self, i: int):
        return next(g for g in self.group(i)
                    if all(self.compose(g, f) == f for f in self.hom(i, i)))


class FI(EIInstance):
    def hom(self, i, j):
        return fi_hom(i, j)

    def compose(self, beta, alpha_):
        return fi_compose(beta, alpha_)

    def alpha(self, i):
        return alpha(i)

    def identity(self, i):
        return Injection(i, tuple(range(1, i + 1)))


def fi_axioms_check(T: int, cat: EIInstance | None = None) -> dict:
    """Exhaustive check of the EI-category axioms on objects ``0..T``."""
    cat = cat or FI()
    failures = []
    nonempty = all(bool(cat.hom(i, j)) == (i <= j) for i in range(T + 1) for j in range(T + 1))
    if not nonempty:
        failures.append("C(i,j) nonempty iff i <= j")
    surjective = True
    for i, j, l in itertools.combinations(range(T + 1), 3):
        image = {cat.compose(b, a) for a in cat.hom(i, j) for b in cat.hom(j, l)}
        if image != set(cat.hom(i, l)):
            surjective = False
            failures.append(f"composition C({i},{j}) x C({j},{l}) -> C({i},{l}) not surjective")
    ei = True
    for i in range(T + 1):
        ident = cat.identity(i)
        for g in cat.group(i):
            if not any(cat.compose(h, g) == ident and cat.compose(g, h) == ident
                       for h in cat.group(i)):
                ei = False
                failures.append(f"{g} in C({i},{i}) is not invertible")
    transitive = True
    for i in range(T):
        targets = set(cat.hom(i, i + 1))
        orbit = {cat.compose(g, cat.alpha(i)) for g in cat.group(i + 1)}
        if orbit != targets:
            transitive = False
            failures.append(f"G_{i + 1} is not transitive on C({i},{i + 1})")
    return {
        "T": T,
        "nonempty_iff_leq": nonempty,
        "composition_surjective": surjective,
        "endomorphisms_invertible": ei,
        "transitive": transitive,
        "ok": not failures,
        "failures": failures,
    }


def stabilizer(i: int, j: int) -> list[Injection]:
    """``H_{i,j}``: the elements ``g`` of ``S_j`` with ``g o alpha_chain(i, j) = alpha_chain(i, j)``."""
    a = alpha_chain(i, j)
    return [g for g in fi_hom(j, j) if fi_compose(g, a) == a]


def claim_b1_witness(h: Injection, i: int) -> Injection:
    """For ``h`` in ``H_{i,j}``, a ``g`` in ``H_{i,j+1}`` with ``alpha_j h = g alpha_j``."""
    j = h.j
    if h.i != j:
        raise ValueError("h must be a permutation")
    if i > j or any(h(x) != x for x in range(1, i + 1)):
        raise ValueError(f"h = {h} does not fix 1..{i}")
    g = Injection(j + 1, h.values + (j + 1,))
    if fi_compose(g, alpha(j)) != fi_compose(alpha(j), h):
        raise RuntimeError("witness equation alpha_j h = g alpha_j fails")
    chain = alpha_chain(i, j + 1)
    if fi_compose(g, chain) != chain:
        raise RuntimeError("witness does not stabilize alpha_j ... alpha_i")
    return g


def orbits(group: list[Injection], elements: list[Injection]) -> list[list[Injection]]:
    """Orbits of ``group`` acting by post-composition, in order of first element."""
    seen: set[Injection] = set()
    out = []
    for x in elements:
        if x in seen:
            continue
        orb = sorted({fi_compose(g, x) for g in group})
        seen.update(orb)
        out.append(orb)
    return out


@dataclass
class MuMap:
    """``mu_{i,j}``: ``H_{i,j}``-orbits on ``C(i,j)`` to ``H_{i,j+1}``-orbits on ``C(i,j+1)``."""

    i: int
    j: int
    source: list[list[Injection]]
    target: list[list[Injection]]
    mapping: list[int]
    well_defined: bool

    @property
    def bijective(self) -> bool:
        return (self.well_defined and len(self.source) == len(self.target)
                and sorted(self.mapping) == list(range(len(self.target))))

    def to_json(self) -> dict:
        return {
            "i": self.i,
            "j": self.j,
            "source_orbits": [[x.to_json() for x in o] for o in self.source],
            "target_orbits": [[x.to_json() for x in o] for o in self.target],
            "mapping": list(self.mapping),
            "well_defined": self.well_defined,
            "bijective": self.bijective,
        }


def mu(i: int, j: int) -> MuMap:
    src = orbits(stabilizer(i, j), fi_hom(i, j))
    tgt = orbits(stabilizer(i, j + 1), fi_hom(i, j + 1))
    where = {x: k for k, o in enumerate(tgt) for x in o}
    a = alpha(j)
    mapping = []
    well_defined = True
    for o in src:
        images = {where[fi_compose(a, beta)] for beta in o}
        if len(images) != 1:
            well_defined = False
        mapping.append(min(images))
    return MuMap(i, j, src, tgt, mapping, well_defined)


# -- group algebras and the towers kC(m, -) -----------------------------------------

class SymmetricGroupAlgebra(BasisAlgebra):
    """The group algebra ``Q S_n`` in the permutation basis."""

    family = None

    def __init__(self, n: int):
        self.n = n
        self.basis = fi_hom(n, n)
        self.unit = self.basis.index(Injection(n, tuple(range(1, n + 1))))
        super().__init__()

    def __repr__(self) -> str:
        return f"SymmetricGroupAlgebra(n={self.n})"

    def _product(self, a, b):
        return self._index[fi_compose(self.basis[a], self.basis[b])], 1

    def is_permutation(self, b):
        return True

    def _generator_candidates(self):
        out = []
        for k in range(1, self.n):
            v = list(range(1, self.n + 1))
            v[k - 1], v[k] = v[k], v[k - 1]
            out.append(self._index[Injection(self.n, tuple(v))])
        return out

    def embedding_label(self, p: Injection) -> Injection:
        """``p`` acting on the last ``p.j`` points, fixing the first ``n - p.j``."""
        off = self.n - p.j
        return Injection(self.n, tuple(range(1, off + 1)) + tuple(v + off for v in p.values))


@lru_cache(maxsize=None)
def group_algebra(n: int, cap: int = GROUP_CAP) -> SymmetricGroupAlgebra:
    if n > cap:
        raise ValueError(f"group algebra of S_{n} exceeds cap {cap}")
    return SymmetricGroupAlgebra(n)


def _fi_level(m: int, i: int, alg: SymmetricGroupAlgebra) -> FDModule:
    basis = fi_hom(m, i)
    index = {b: k for k, b in enumerate(basis)}

    def act(g):
        mat = zeros(len(basis), len(basis))
        perm = alg.basis[g]
        for k, beta in enumerate(basis):
            mat[index[fi_compose(perm, beta)], k] = 1
        return mat

    return FDModule(alg, len(basis), act, name=f"kC({m},{i})")


def build_fi_Mm(m: int, T: int, cap: int = GROUP_CAP) -> Tower:
    """``M(m) = kC(m, -)`` over the group algebras ``Q S_i``, truncated at ``T``."""
    if not 0 <= m <= T:
        raise ValueError(f"need 0 <= m <= T, got m={m}, T={T}")
    if T > cap:
        raise ValueError(f"T={T} exceeds the group algebra cap {cap}")
    algebras = [group_algebra(i, cap) for i in range(T + 1)]
    levels = [_fi_level(m, i, A) for i, A in enumerate(algebras)]
    shifts = []
    for i in range(T):
        src, dst = fi_hom(m, i), fi_hom(m, i + 1)
        index = {b: k for k, b in enumerate(dst)}
        phi = zeros(len(dst), len(src))
        for k, beta in enumerate(src):
            phi[index[fi_compose(alpha(i), beta)], k] = 1
        shifts.append(phi)
    restrictions = {}
    for i in range(m, T + 1):
        sub = algebras[i - m]
        restrictions[i] = (sub, embed(sub, algebras[i]))
    tower = Tower(algebras, levels, shifts, m=m, restrictions=restrictions,
                  meta={"family": "fi", "delta": None, "m": m})
    report = validate_tower(tower)
    if not report.ok:
        raise RuntimeError(f"FI tower fails the module axioms: {report.levels}")
    return tower


def fi_f_prime(M: Tower, i: int, N: TruncSubmodule) -> FPrime:
    """``k (x)_{H_{m,i}} N_i``; ``H_{m,i}`` is the embedded ``S_{i-m}``."""
    return f_prime(M, i, N)


def fi_certificate(m: int, T: int, cap: int = GROUP_CAP) -> CriterionCertificate:
    """Certificate for ``kC(m, -)``; also checks ``nu'_i(M)`` against ``mu_{m,i}``."""
    M = build_fi_Mm(m, T, cap)
    cert = certify_tower(M, "fi", None)
    table = {}
    for rec in cert.levels:
        i = rec["i"]
        if i < m:
            continue
        mp = mu(m, i)
        table[i] = {"orbits": len(mp.source), "mu_bijective": mp.bijective}
        if len(mp.source) != rec["Fprime_dim"]:
            raise RuntimeError(f"level {i}: dim F' = {rec['Fprime_dim']} but {len(mp.source)} orbits")
        if mp.bijective != rec["nu_bijective"]:
            raise RuntimeError(f"level {i}: mu and nu' disagree on bijectivity")
    cert.extras["mu"] = table
    return cert
