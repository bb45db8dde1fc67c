"""Finite-dimensional algebras with a twisted-monoid basis, and their modules.

Every algebra here has a basis ``b_0, ..., b_{d-1}`` in which the product of
two basis elements is a scalar multiple of a single basis element,
``b_a * b_b = coef * b_c``.  Diagram algebras (coefficient ``delta**loops``)
and group algebras (coefficient 1) are both of this shape.

Modules are given by action matrices on column vectors: ``action(b) @ v`` is
``b . v``.  Anything that must hold "for every algebra element" is checked on
the algebra's generating set; generation is verified when the generators are
chosen, so this is equivalent to checking every basis element.
"""
from __future__ import annotations

import json
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from pathlib import Path
from typing import Callable, Sequence

import numpy as np

from .diagrams import (
    Diagram,
    Family,
    classify,
    compose,
    enumerate_diagrams,
    expected_count,
    format_diagram,
    identity_diagram,
    parse_diagram,
)
from .exact_linalg import (
    Echelon,
    Quotient,
    Subspace,
    exact,
    identity,
    kernel,
    matrices_equal,
    parse_rat,
    quotient,
    rat_str,
    solve,
    zeros,
)

__all__ = [
    "BasisAlgebra",
    "DiagramAlgebra",
    "build_algebra",
    "Element",
    "Character",
    "CharacterError",
    "trivial_character",
    "radical",
    "is_semisimple",
    "check_associativity",
    "embed",
    "verify_embedding",
    "FDModule",
    "regular_module",
    "character_module",
    "submodule_module",
    "restrict",
    "HomSpace",
    "hom_space",
    "isotypic_trivial",
    "coinvariants",
    "equivariant_projection",
    "NoEquivariantComplement",
    "save_structure",
    "load_structure",
]


class CharacterError(RuntimeError):
    """The candidate trivial character is not multiplicative."""


class NoEquivariantComplement(RuntimeError):
    """An invariant subspace has no invariant complement."""


class BasisAlgebra:
    """Base class: subclasses provide ``basis``, ``unit``, ``_product`` and
    ``_generator_candidates``."""

    basis: Sequence
    unit: int
    delta: Fraction = Fraction(1)

    def __init__(self):
        self._index = {b: i for i, b in enumerate(self.basis)}
        self._mul_cache: dict[tuple[int, int], tuple[int, Fraction]] = {}
        self._generators: tuple[int, ...] | None = None

    @property
    def dim(self) -> int:
        return len(self.basis)

    def index(self, label) -> int:
        return self._index[label]

    def mul(self, a: int, b: int) -> tuple[int, Fraction]:
        """``b_a * b_b = coef * b_c``; returns ``(c, coef)``."""
        key = (a, b)
        hit = self._mul_cache.get(key)
        if hit is None:
            hit = self._product(a, b)
            self._mul_cache[key] = hit
        return hit

    def _product(self, a: int, b: int) -> tuple[int, Fraction]:
        raise NotImplementedError

    def _generator_candidates(self) -> list[int]:
        return [i for i in range(self.dim) if i != self.unit]

    def is_permutation(self, b: int) -> bool:
        raise NotImplementedError

    def label(self, b: int) -> str:
        return str(self.basis[b])

    @property
    def generators(self) -> tuple[int, ...]:
        """Basis indices generating the algebra together with the unit."""
        if self._generators is None:
            cand = sorted(set(self._generator_candidates()) - {self.unit})
            if not _generates(self, cand):
                cand = [i for i in range(self.dim) if i != self.unit]
            self._generators = tuple(cand)
        return self._generators

    def structure(self) -> list[tuple[int, int, int, Fraction]]:
        return [(a, b, *self.mul(a, b)) for a in range(self.dim) for b in range(self.dim)]


def _generates(alg: BasisAlgebra, gens: Sequence[int]) -> bool:
    # left multiples of the unit by words in gens, dropping zero products
    seen = {alg.unit}
    frontier = [alg.unit]
    while frontier:
        nxt = []
        for x in frontier:
            for g in gens:
                c, coef = alg.mul(g, x)
                if coef and c not in seen:
                    seen.add(c)
                    nxt.append(c)
        frontier = nxt
    return len(seen) == alg.dim


class DiagramAlgebra(BasisAlgebra):
    """TL_n, Br_n or P_n over Q with loop parameter ``delta``."""

    def __init__(self, family, n: int, delta, cap: int | None = None):
        self.family = Family.parse(family)
        self.n = n
        self.delta = parse_rat(delta)
        self.basis = enumerate_diagrams(self.family, n, cap=cap)
        self.unit = self.basis.index(identity_diagram(n, self.family))
        self._loops: dict[tuple[int, int], int] = {}
        super().__init__()

    def __repr__(self) -> str:
        return f"DiagramAlgebra({self.family.value}, n={self.n}, delta={rat_str(self.delta)})"

    def _product(self, a, b):
        d, loops = compose(self.basis[a], self.basis[b])
        self._loops[(a, b)] = loops
        return self._index[d], exact(self.delta**loops)

    def loops(self, a: int, b: int) -> int:
        self.mul(a, b)
        return self._loops[(a, b)]

    def is_permutation(self, b: int) -> bool:
        return classify(self.basis[b])["is_permutation"]

    def label(self, b: int) -> str:
        return format_diagram(self.basis[b])

    def _generator_candidates(self):
        n = self.n
        out = []

        def vertical(skip):
            return [(k, n + k) for k in range(n) if k not in skip]

        for i in range(n - 1):
            j = i + 1
            cands = [
                vertical({i, j}) + [(i, j), (n + i, n + j)],  # e_i
            ]
            if self.family is not Family.TL:
                cands.append(vertical({i, j}) + [(i, n + j), (j, n + i)])  # s_i
            if self.family is Family.PARTITION:
                cands.append(vertical({i, j}) + [(i, j, n + i, n + j)])  # b_i
            for blocks in cands:
                out.append(Diagram.make(n, blocks, self.family))
        if self.family is Family.PARTITION:
            for i in range(n):
                out.append(Diagram.make(n, vertical({i}) + [(i,), (n + i,)], self.family))  # p_i
        return [self._index[d] for d in out]

    def embedding_label(self, d: Diagram) -> Diagram:
        """Place ``d`` on the last strands, identity on the first ``n - d.n``."""
        s, off = d.n, self.n - d.n
        blocks = [(k, self.n + k) for k in range(off)]
        for b in d.blocks:
            blocks.append(tuple(p + off if p < s else p - s + self.n + off for p in b))
        return Diagram.make(self.n, blocks, self.family)

    def structure_table(self) -> list[list[int]]:
        return [[a, b, self.mul(a, b)[0], self.loops(a, b)]
                for a in range(self.dim) for b in range(self.dim)]


@lru_cache(maxsize=None)
def _build_cached(family: Family, n: int, delta: Fraction, cap) -> DiagramAlgebra:
    return DiagramAlgebra(family, n, delta, cap=cap)


def build_algebra(family, n: int, delta, cap: int | None = None) -> DiagramAlgebra:
    """Diagram algebra of ``family`` on ``n`` strands (cached per arguments)."""
    return _build_cached(Family.parse(family), n, parse_rat(delta), cap)


def check_associativity(alg: BasisAlgebra) -> list[tuple[int, int, int]]:
    """Exhaustive associativity sweep; returns the failing triples."""
    bad = []
    r = range(alg.dim)
    for a in r:
        for b in r:
            ab, c1 = alg.mul(a, b)
            for c in r:
                left, c2 = alg.mul(ab, c)
                bc, c3 = alg.mul(b, c)
                right, c4 = alg.mul(a, bc)
                if c1 * c2 != c3 * c4 or (c1 * c2 and left != right):
                    bad.append((a, b, c))
    return bad


@dataclass(frozen=True)
class Element:
    """A linear combination of basis elements (no zero coefficients stored)."""

    algebra: BasisAlgebra
    coeffs: tuple[tuple[int, Fraction], ...]

    @classmethod
    def from_dict(cls, alg: BasisAlgebra, coeffs: dict) -> "Element":
        return cls(alg, tuple(sorted((i, Fraction(x)) for i, x in coeffs.items() if x)))

    @classmethod
    def basis_element(cls, alg: BasisAlgebra, i: int) -> "Element":
        return cls(alg, ((i, Fraction(1)),))

    def as_dict(self) -> dict[int, Fraction]:
        return dict(self.coeffs)

    def vector(self) -> list[Fraction]:
        v = [Fraction(0)] * self.algebra.dim
        for i, x in self.coeffs:
            v[i] = x
        return v

    def __add__(self, other: "Element") -> "Element":
        d = self.as_dict()
        for i, x in other.coeffs:
            d[i] = d.get(i, 0) + x
        return Element.from_dict(self.algebra, d)

    def __sub__(self, other: "Element") -> "Element":
        return self + other.scale(-1)

    def scale(self, c) -> "Element":
        return Element.from_dict(self.algebra, {i: c * x for i, x in self.coeffs})

    def __mul__(self, other: "Element") -> "Element":
        d: dict[int, Fraction] = {}
        for a, x in self.coeffs:
            for b, y in other.coeffs:
                c, coef = self.algebra.mul(a, b)
                if coef:
                    d[c] = d.get(c, 0) + coef * x * y
        return Element.from_dict(self.algebra, d)


@dataclass(frozen=True)
class Character:
    """A one-dimensional representation, given by its value on each basis element."""

    algebra: BasisAlgebra
    values: tuple[Fraction, ...]

    def __call__(self, b: int) -> Fraction:
        return self.values[b]


def _check_multiplicative(alg: BasisAlgebra, values) -> list[tuple[int, int]]:
    bad = []
    for a in range(alg.dim):
        for b in range(alg.dim):
            c, coef = alg.mul(a, b)
            if values[a] * values[b] != coef * values[c]:
                bad.append((a, b))
    return bad


_CHARACTERS: dict[int, Character] = {}


def trivial_character(alg: BasisAlgebra) -> Character:
    """1 on permutation basis elements, 0 elsewhere, verified on all pairs."""
    cached = _CHARACTERS.get(id(alg))
    if cached is not None and cached.algebra is alg:
        return cached
    values = tuple(1 if alg.is_permutation(b) else 0 for b in range(alg.dim))
    if values[alg.unit] != 1:
        raise CharacterError("trivial character does not send the unit to 1")
    bad = _check_multiplicative(alg, values)
    if bad:
        a, b = bad[0]
        raise CharacterError(
            f"trivial character is not multiplicative on {alg!r}: "
            f"({alg.label(a)}, {alg.label(b)}) and {len(bad) - 1} more"
        )
    chi = Character(alg, values)
    _CHARACTERS[id(alg)] = chi
    return chi


def radical(alg: BasisAlgebra) -> Subspace:
    """Jacobson radical as the kernel of the trace form of the regular
    representation (valid in characteristic zero)."""
    cached = getattr(alg, "_radical", None)
    if cached is not None:
        return cached
    d = alg.dim
    traces = []
    for x in range(d):
        t = Fraction(0)
        for c in range(d):
            y, coef = alg.mul(x, c)
            if y == c:
                t += coef
        traces.append(t)
    gram = zeros(d, d)
    for a in range(d):
        for b in range(d):
            c, coef = alg.mul(a, b)
            if coef and traces[c]:
                gram[a, b] = coef * traces[c]
    alg._radical = kernel(gram)
    return alg._radical


def is_semisimple(alg: BasisAlgebra) -> bool:
    return radical(alg).dim == 0


# -- subalgebra embeddings ------------------------------------------------------

def embed(small: BasisAlgebra, big: BasisAlgebra) -> tuple[int, ...]:
    """Basis map of the embedding of ``small`` on the last strands of ``big``."""
    if type(small) is not type(big):
        raise ValueError("cannot embed algebras of different kinds")
    if getattr(small, "family", None) != getattr(big, "family", None):
        raise ValueError("family mismatch")
    if small.delta != big.delta:
        raise ValueError("delta mismatch")
    if small.n > big.n:
        raise ValueError(f"cannot embed n={small.n} into n={big.n}")
    return tuple(big.index(big.embedding_label(b)) for b in small.basis)


def verify_embedding(small: BasisAlgebra, big: BasisAlgebra, emb: Sequence[int],
                     exhaustive: bool = False) -> bool:
    if emb[small.unit] != big.unit or len(set(emb)) != len(emb):
        return False
    lefts = range(small.dim) if exhaustive else small.generators
    for a in lefts:
        for b in range(small.dim):
            c, coef = small.mul(a, b)
            c2, coef2 = big.mul(emb[a], emb[b])
            if coef != coef2 or (coef and emb[c] != c2):
                return False
    return True


# -- modules -----------------------------------------------------------------

class FDModule:
    """A finite-dimensional left module given by lazily computed action matrices."""

    def __init__(self, algebra: BasisAlgebra, dim: int, act: Callable[[int], np.ndarray],
                 name: str = ""):
        self.algebra = algebra
        self.dim = dim
        self._act = act
        self._cache: dict[int, np.ndarray] = {}
        self.name = name

    def __repr__(self) -> str:
        return f"FDModule({self.name or self.algebra!r}, dim={self.dim})"

    def action(self, b: int) -> np.ndarray:
        m = self._cache.get(b)
        if m is None:
            m = self._act(b)
            if m.shape != (self.dim, self.dim):
                raise ValueError(f"action matrix of {b} has shape {m.shape}")
            self._cache[b] = m
        return m

    @property
    def generators(self) -> tuple[int, ...]:
        return self.algebra.generators

    def check_axioms(self, exhaustive: bool = False) -> list[str]:
        """Module axioms; returns a list of failures (empty when valid).

        Checking ``rho(g) rho(b) = coef rho(gb)`` for generators ``g`` and all
        basis ``b`` is equivalent to the full check once ``rho(1) = 1``.
        """
        alg = self.algebra
        errors = []
        if not matrices_equal(self.action(alg.unit), identity(self.dim)):
            errors.append("unit does not act as the identity")
        lefts = range(alg.dim) if exhaustive else self.generators
        for a in lefts:
            ra = self.action(a)
            for b in range(alg.dim):
                c, coef = alg.mul(a, b)
                lhs = ra @ self.action(b)
                rhs = self.action(c) * coef if coef else zeros(self.dim, self.dim)
                if not matrices_equal(lhs, rhs):
                    errors.append(f"rho({alg.label(a)}) rho({alg.label(b)}) != rho(product)")
        return errors

    def is_invariant(self, s: Subspace) -> bool:
        if s.ambient_dim != self.dim:
            raise ValueError("subspace lives in a different space")
        if s.dim == 0:
            return True
        e = s.echelon()
        basis = s.matrix
        for g in self.generators:
            for w in (self.action(g) @ basis.T).T:
                if not e.contains(w):
                    return False
        return True


def regular_module(alg: BasisAlgebra) -> FDModule:
    def act(b):
        m = zeros(alg.dim, alg.dim)
        for c in range(alg.dim):
            y, coef = alg.mul(b, c)
            if coef:
                m[y, c] += coef
        return m

    return FDModule(alg, alg.dim, act, name="regular")


def character_module(chi: Character) -> FDModule:
    def act(b):
        m = zeros(1, 1)
        m[0, 0] = chi(b)
        return m

    return FDModule(chi.algebra, 1, act, name="character")


def submodule_module(module: FDModule, s: Subspace) -> FDModule:
    """The invariant subspace ``s`` as a module, in the coordinates of its RREF basis."""
    basis = s.matrix
    piv = list(s.pivots)

    def act(b):
        if s.dim == 0:
            return zeros(0, 0)
        images = module.action(b) @ basis.T
        return images[piv, :]

    return FDModule(module.algebra, s.dim, act, name=f"sub({module.name})")


def restrict(module: FDModule, sub: BasisAlgebra, emb: Sequence[int]) -> FDModule:
    """Restriction of ``module`` along the basis embedding ``emb: sub -> module.algebra``."""
    return FDModule(sub, module.dim, lambda b: module.action(emb[b]),
                    name=f"res({module.name})")


# -- Hom spaces and isotypic data ---------------------------------------------

def _sparse_cols(m: np.ndarray) -> list[list[tuple[int, Fraction]]]:
    return [[(k, m[k, c]) for k in range(m.shape[0]) if m[k, c]] for c in range(m.shape[1])]


def _sparse_rows_of(m: np.ndarray) -> list[list[tuple[int, Fraction]]]:
    return [[(k, m[r, k]) for k in range(m.shape[1]) if m[r, k]] for r in range(m.shape[0])]


@dataclass(frozen=True)
class HomSpace:
    """Intertwiners ``X: source -> target`` (``X`` is ``target.dim x source.dim``),
    stored as a subspace of the row-major flattened matrices."""

    source: FDModule
    target: FDModule
    space: Subspace

    @property
    def dim(self) -> int:
        return self.space.dim

    @property
    def basis(self) -> list[np.ndarray]:
        shape = (self.target.dim, self.source.dim)
        return [np.asarray(r, dtype=object).reshape(shape) for r in self.space.basis]

    def contains_matrix(self, x: np.ndarray) -> bool:
        return self.space.contains_vector(np.asarray(x, dtype=object).reshape(-1))


def _intertwiner_equations(src: FDModule, tgt: FDModule, gens) -> list[dict[int, Fraction]]:
    ds, dt = src.dim, tgt.dim
    eqs = []
    for g in gens:
        cols = _sparse_cols(src.action(g))
        rows = _sparse_rows_of(tgt.action(g))
        for r in range(dt):
            for c in range(ds):
                eq: dict[int, Fraction] = {}
                for k, x in cols[c]:
                    eq[r * ds + k] = eq.get(r * ds + k, 0) + x
                for k, x in rows[r]:
                    eq[k * ds + c] = eq.get(k * ds + c, 0) - x
                eq = {j: x for j, x in eq.items() if x}
                if eq:
                    eqs.append(eq)
    return eqs


def _kernel_of_sparse(eqs: list[dict[int, Fraction]], nvars: int) -> Subspace:
    e = Echelon(nvars)
    for eq in eqs:
        e.add(eq)
    pivots = set(e._rows)
    basis = []
    for f in range(nvars):
        if f in pivots:
            continue
        v = {f: Fraction(1)}
        for p, row in e._rows.items():
            x = row.get(f)
            if x:
                v[p] = -x
        basis.append(v)
    return Subspace.from_rows(nvars, basis)


def hom_space(src: FDModule, tgt: FDModule) -> HomSpace:
    """Solve ``X rho_src(b) = rho_tgt(b) X`` for all ``b`` (via generators)."""
    if src.algebra is not tgt.algebra:
        raise ValueError("modules over different algebras")
    eqs = _intertwiner_equations(src, tgt, src.generators)
    return HomSpace(src, tgt, _kernel_of_sparse(eqs, src.dim * tgt.dim))


def isotypic_trivial(module: FDModule, chi: Character) -> Subspace:
    """``{v : rho(b) v = chi(b) v for every b}``."""
    if chi.algebra is not module.algebra:
        raise ValueError("character of a different algebra")
    eqs = []
    for g in module.generators:
        m = module.action(g)
        for r in range(module.dim):
            eq = {k: m[r, k] for k in range(module.dim) if m[r, k]}
            eq[r] = eq.get(r, 0) - chi(g)
            eq = {k: x for k, x in eq.items() if x}
            if eq:
                eqs.append(eq)
    return _kernel_of_sparse(eqs, module.dim)


def coinvariants(module: FDModule, chi: Character) -> Quotient:
    """``module / span{rho(b) v - chi(b) v}``.

    Over a module the span is already generated by the generators of the
    algebra, since ``(gx - chi(gx)) v = (g - chi(g)) x v + chi(g) (x - chi(x)) v``.
    """
    if chi.algebra is not module.algebra:
        raise ValueError("character of a different algebra")
    e = Echelon(module.dim)
    for g in module.generators:
        m = module.action(g)
        for c in range(module.dim):
            col = {k: m[k, c] for k in range(module.dim) if m[k, c]}
            col[c] = col.get(c, 0) - chi(g)
            e.add(col)
    return quotient(module.dim, e.subspace())


def equivariant_projection(module: FDModule, n: Subspace) -> np.ndarray:
    """An idempotent ``h`` in ``End_A(module)`` with image ``n`` fixing ``n`` pointwise.

    Raises :class:`NoEquivariantComplement` when ``n`` has no invariant complement.
    """
    if not module.is_invariant(n):
        raise ValueError("subspace is not invariant")
    d = module.dim
    if n.dim == 0:
        return zeros(d, d)
    incl = n.matrix.T  # d x k
    homs = hom_space(module, submodule_module(module, n))
    # candidates h = incl @ X; need h @ incl = incl
    cands = [incl @ x for x in homs.basis]
    if not cands:
        raise NoEquivariantComplement("no nonzero equivariant map onto the subspace")
    lhs = np.stack([(h @ incl).reshape(-1) for h in cands], axis=1)
    coeffs = solve(lhs, incl.reshape(-1))
    if coeffs is None:
        raise NoEquivariantComplement("the subspace has no invariant complement")
    h = zeros(d, d)
    for c, x in zip(coeffs, cands):
        if c:
            h = h + c * x
    return h


# -- structure-table cache ---------------------------------------------------

def save_structure(alg: DiagramAlgebra, path) -> None:
    payload = {
        "family": alg.family.value,
        "n": alg.n,
        "delta": rat_str(alg.delta),
        "basis": [alg.label(b) for b in range(alg.dim)],
        "products": alg.structure_table(),
    }
    Path(path).write_text(json.dumps(payload) + "\n", encoding="utf-8")


def load_structure(path, seed: int = 0) -> DiagramAlgebra:
    """Load a cached structure table, revalidating the unit and a 1% sample of
    associativity triples."""
    payload = json.loads(Path(path).read_text(encoding="utf-8"))
    family = Family.parse(payload["family"])
    n = int(payload["n"])
    alg = DiagramAlgebra.__new__(DiagramAlgebra)
    alg.family, alg.n, alg.delta = family, n, parse_rat(payload["delta"])
    alg.basis = [parse_diagram(t, n, family) for t in payload["basis"]]
    if len(alg.basis) != expected_count(family, n) or len(set(alg.basis)) != len(alg.basis):
        raise ValueError("cached basis does not match the family count")
    alg.unit = alg.basis.index(identity_diagram(n, family))
    alg._loops = {}
    BasisAlgebra.__init__(alg)
    for a, b, c, loops in payload["products"]:
        alg._loops[(a, b)] = loops
        alg._mul_cache[(a, b)] = (c, exact(alg.delta**loops))
    if len(alg._mul_cache) != alg.dim**2:
        raise ValueError("cached structure table is not total")
    for b in range(alg.dim):
        if alg.mul(alg.unit, b) != (b, 1) or alg.mul(b, alg.unit) != (b, 1):
            raise ValueError("cached table: unit check failed")
    rng = np.random.Generator(np.random.PCG64(seed))
    triples = max(1, alg.dim**3 // 100)
    for a, b, c in rng.integers(alg.dim, size=(triples, 3)).tolist():
        ab, x1 = alg.mul(a, b)
        l, x2 = alg.mul(ab, c)
        bc, x3 = alg.mul(b, c)
        r, x4 = alg.mul(a, bc)
        if l != r or alg.loops(a, b) + alg.loops(ab, c) != alg.loops(b, c) + alg.loops(a, bc):
            raise ValueError(f"cached table fails associativity at {(a, b, c)}")
    return alg
