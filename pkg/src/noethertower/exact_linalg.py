"""Exact rational linear algebra.

Scalars are :class:`fractions.Fraction` (plain ``int`` is accepted wherever a
rational is expected).  Dense matrices are numpy arrays of ``dtype=object``
holding exact rationals; numpy is used for shape handling and ``@`` only, never
for floating point arithmetic.

Row reduction works on sparse row dictionaries, which keeps the many
permutation-like and diagram-action matrices of this package cheap to reduce.
"""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable

import numpy as np

Rat = Fraction

__all__ = [
    "Rat",
    "exact",
    "parse_rat",
    "rat_str",
    "as_matrix",
    "zeros",
    "identity",
    "matrices_equal",
    "rref",
    "rank",
    "kernel",
    "solve",
    "Echelon",
    "Subspace",
    "span",
    "subspace_ops",
    "Quotient",
    "quotient",
]


def exact(x):
    """Normalize an exact rational: ``int`` when integral, else ``Fraction``."""
    if type(x) is int:
        return x
    x = Fraction(x)
    return x.numerator if x.denominator == 1 else x


def parse_rat(text: str | int | Fraction) -> Fraction:
    """Parse ``"p/q"`` (or ``"p"``) into an exact rational."""
    if isinstance(text, (int, Fraction)):
        return Fraction(text)
    text = text.strip()
    if not text:
        raise ValueError("empty rational")
    try:
        value = Fraction(text)
    except (ValueError, ZeroDivisionError) as exc:
        raise ValueError(f"not a rational number: {text!r}") from exc
    if "." in text or "e" in text.lower():
        raise ValueError(f"rationals must be written as p/q, got {text!r}")
    return value


def rat_str(x) -> str:
    """Serialize a rational as ``"p/q"``, omitting ``q`` when it is 1."""
    return str(Fraction(x))


def as_matrix(rows, cols: int | None = None) -> np.ndarray:
    """Build an object matrix of exact rationals from nested sequences."""
    rows = [list(r) for r in rows]
    if cols is None:
        cols = len(rows[0]) if rows else 0
    out = np.empty((len(rows), cols), dtype=object)
    for i, r in enumerate(rows):
        if len(r) != cols:
            raise ValueError("ragged matrix")
        for j, x in enumerate(r):
            if isinstance(x, float):
                raise TypeError("floating point entries are not allowed")
            out[i, j] = exact(x)
    return out


def zeros(rows: int, cols: int) -> np.ndarray:
    out = np.empty((rows, cols), dtype=object)
    out.fill(0)
    return out


def identity(n: int) -> np.ndarray:
    out = zeros(n, n)
    for i in range(n):
        out[i, i] = 1
    return out


def matrices_equal(a: np.ndarray, b: np.ndarray) -> bool:
    if a.shape != b.shape:
        return False
    if a.size == 0:
        return True
    return bool(np.all(a == b))


# -- sparse row machinery ---------------------------------------------------

def _sparse_rows(m) -> list[dict[int, Fraction]]:
    rows = []
    for r in m:
        row = {}
        for j, x in enumerate(r):
            if x:
                row[j] = Fraction(x)
        rows.append(row)
    return rows


def _dense(row: dict[int, Fraction], n: int) -> tuple:
    out = [0] * n
    for j, x in row.items():
        out[j] = exact(x)
    return tuple(out)


def _rref_sparse(rows: list[dict[int, Fraction]]) -> tuple[list[dict[int, Fraction]], list[int]]:
    """Gauss-Jordan elimination on sparse rows; returns (nonzero rows, pivots)."""
    rows = [dict(r) for r in rows if r]
    pivots: list[int] = []
    done: list[dict[int, Fraction]] = []
    while rows:
        col = min(min(r) for r in rows)
        k = next(i for i, r in enumerate(rows) if col in r)
        prow = rows.pop(k)
        inv = 1 / prow[col]
        prow = {j: x * inv for j, x in prow.items()}
        remaining = []
        for r in rows:
            f = r.get(col)
            if f:
                for j, x in prow.items():
                    y = r.get(j, 0) - f * x
                    if y:
                        r[j] = y
                    else:
                        r.pop(j, None)
            if r:
                remaining.append(r)
        rows = remaining
        for r in done:
            f = r.get(col)
            if f:
                for j, x in prow.items():
                    y = r.get(j, 0) - f * x
                    if y:
                        r[j] = y
                    else:
                        r.pop(j, None)
        done.append(prow)
        pivots.append(col)
    return done, pivots


def rref(m) -> tuple[np.ndarray, int]:
    """Reduced row echelon form of ``m`` (zero rows dropped) and its rank."""
    m = np.asarray(m, dtype=object)
    if m.ndim != 2:
        raise ValueError("rref expects a 2-d matrix")
    ncols = m.shape[1]
    rows, pivots = _rref_sparse(_sparse_rows(m))
    out = zeros(len(rows), ncols)
    for i, r in enumerate(rows):
        for j, x in r.items():
            out[i, j] = exact(x)
    return out, len(pivots)


def rank(m) -> int:
    return rref(m)[1]


def kernel(m) -> "Subspace":
    """The null space ``{x : m x = 0}`` as a :class:`Subspace`."""
    m = np.asarray(m, dtype=object)
    ncols = m.shape[1]
    rows, pivots = _rref_sparse(_sparse_rows(m))
    free = [j for j in range(ncols) if j not in set(pivots)]
    basis = []
    for f in free:
        v = {f: Fraction(1)}
        for p, r in zip(pivots, rows):
            x = r.get(f)
            if x:
                v[p] = -x
        basis.append(v)
    return Subspace.from_rows(ncols, basis)


def solve(a, b) -> np.ndarray | None:
    """One exact solution of ``a x = b`` (free variables set to 0), or None."""
    a = np.asarray(a, dtype=object)
    b = list(b)
    nrows, ncols = a.shape
    if len(b) != nrows:
        raise ValueError("right-hand side has the wrong length")
    aug = _sparse_rows(a)
    for r, x in zip(aug, b):
        if x:
            r[ncols] = Fraction(x)
    rows, pivots = _rref_sparse(aug)
    if ncols in pivots:
        return None
    x = np.empty(ncols, dtype=object)
    x.fill(0)
    for p, r in zip(pivots, rows):
        x[p] = exact(r.get(ncols, 0))
    return x


class Echelon:
    """Incrementally maintained RREF basis of a growing subspace."""

    def __init__(self, ambient_dim: int):
        self.ambient_dim = ambient_dim
        self._rows: dict[int, dict[int, Fraction]] = {}

    @property
    def dim(self) -> int:
        return len(self._rows)

    def reduce(self, v) -> dict[int, Fraction]:
        if isinstance(v, dict):
            r = {j: Fraction(x) for j, x in v.items() if x}
        else:
            r = {j: Fraction(x) for j, x in enumerate(v) if x}
        for p, prow in self._rows.items():
            f = r.get(p)
            if f:
                for j, x in prow.items():
                    y = r.get(j, 0) - f * x
                    if y:
                        r[j] = y
                    else:
                        r.pop(j, None)
        return r

    def add(self, v) -> bool:
        """Insert ``v``; return True iff it enlarged the span."""
        r = self.reduce(v)
        if not r:
            return False
        p = min(r)
        inv = 1 / r[p]
        r = {j: x * inv for j, x in r.items()}
        for prow in self._rows.values():
            f = prow.get(p)
            if f:
                for j, x in r.items():
                    y = prow.get(j, 0) - f * x
                    if y:
                        prow[j] = y
                    else:
                        prow.pop(j, None)
        self._rows[p] = r
        return True

    def contains(self, v) -> bool:
        return not self.reduce(v)

    def subspace(self) -> "Subspace":
        return Subspace.from_rows(self.ambient_dim, self._rows.values())


@dataclass(frozen=True)
class Subspace:
    """A subspace of ``k^ambient_dim`` stored by its unique RREF basis.

    Two subspaces compare equal exactly when their RREF bases coincide.
    """

    ambient_dim: int
    basis: tuple[tuple[Fraction, ...], ...]

    @classmethod
    def from_rows(cls, ambient_dim: int, rows: Iterable) -> "Subspace":
        sparse = []
        for r in rows:
            if isinstance(r, dict):
                sparse.append({j: Fraction(x) for j, x in r.items() if x})
            else:
                r = list(r)
                if len(r) != ambient_dim:
                    raise ValueError("vector length does not match ambient dimension")
                sparse.append({j: Fraction(x) for j, x in enumerate(r) if x})
        done, pivots = _rref_sparse(sparse)
        order = sorted(range(len(done)), key=lambda i: pivots[i])
        return cls(ambient_dim, tuple(_dense(done[i], ambient_dim) for i in order))

    @classmethod
    def zero(cls, ambient_dim: int) -> "Subspace":
        return cls(ambient_dim, ())

    @classmethod
    def full(cls, ambient_dim: int) -> "Subspace":
        return cls(ambient_dim, tuple(tuple(x) for x in identity(ambient_dim)))

    @property
    def dim(self) -> int:
        return len(self.basis)

    @property
    def pivots(self) -> tuple[int, ...]:
        return tuple(next(j for j, x in enumerate(r) if x) for r in self.basis)

    @property
    def matrix(self) -> np.ndarray:
        """Basis as a ``dim x ambient_dim`` matrix (rows are basis vectors)."""
        if not self.basis:
            return zeros(0, self.ambient_dim)
        return as_matrix(self.basis, self.ambient_dim)

    def echelon(self) -> Echelon:
        e = Echelon(self.ambient_dim)
        for r in self.basis:
            e.add(r)
        return e

    def contains_vector(self, v) -> bool:
        return self.coordinates(v) is not None

    def coordinates(self, v) -> list | None:
        """Coordinates of ``v`` in the RREF basis, or None if ``v`` is outside."""
        v = [exact(x) for x in v]
        if len(v) != self.ambient_dim:
            raise ValueError("vector length does not match ambient dimension")
        coords = [v[p] for p in self.pivots]
        residual = list(v)
        for c, r in zip(coords, self.basis):
            if c:
                for j, x in enumerate(r):
                    if x:
                        residual[j] -= c * x
        if any(residual):
            return None
        return [exact(c) for c in coords]

    def contains(self, other: "Subspace") -> bool:
        _check_ambient(self, other)
        return all(self.contains_vector(r) for r in other.basis)

    def __add__(self, other: "Subspace") -> "Subspace":
        _check_ambient(self, other)
        return Subspace.from_rows(self.ambient_dim, self.basis + other.basis)

    def intersection(self, other: "Subspace") -> "Subspace":
        _check_ambient(self, other)
        n = self.ambient_dim
        if self.dim == 0 or other.dim == 0:
            return Subspace.zero(n)
        # x = sum a_i u_i = sum b_j w_j  <=>  [U^T | -W^T] (a, b) = 0
        u, w = self.matrix, other.matrix
        system = np.concatenate([u.T, -w.T], axis=1)
        ker = kernel(system)
        vecs = [np.asarray(r[: self.dim], dtype=object) @ u for r in ker.basis]
        return Subspace.from_rows(n, vecs)

    def __repr__(self) -> str:
        return f"Subspace(ambient_dim={self.ambient_dim}, dim={self.dim})"


def _check_ambient(a: Subspace, b: Subspace) -> None:
    if a.ambient_dim != b.ambient_dim:
        raise ValueError(
            f"ambient dimension mismatch: {a.ambient_dim} != {b.ambient_dim}"
        )


def span(ambient_dim: int, vectors: Iterable) -> Subspace:
    return Subspace.from_rows(ambient_dim, vectors)


def subspace_ops(a: Subspace, b: Subspace) -> dict:
    """Sum, intersection and inclusion tests for two subspaces.

    ``contains`` is true iff ``b`` lies in ``a``; ``proper`` additionally
    requires ``b != a``.
    """
    _check_ambient(a, b)
    contains = a.contains(b)
    return {
        "sum": a + b,
        "intersection": a.intersection(b),
        "contains": contains,
        "proper": contains and a != b,
    }


@dataclass(frozen=True)
class Quotient:
    """``k^ambient_dim / rel`` with coordinates on the non-pivot columns of rel.

    ``project`` is ``dim x ambient_dim`` and ``section`` is ``ambient_dim x dim``;
    ``project @ section`` is the identity and ``kernel(project) == rel``.
    """

    ambient_dim: int
    rel: Subspace
    free_columns: tuple[int, ...]
    project: np.ndarray
    section: np.ndarray

    @property
    def dim(self) -> int:
        return len(self.free_columns)

    def project_vector(self, v) -> np.ndarray:
        return self.project @ np.asarray(v, dtype=object)


def quotient(ambient_dim: int, rel: Subspace) -> Quotient:
    if rel.ambient_dim != ambient_dim:
        raise ValueError("relation subspace lives in a different ambient space")
    pivots = rel.pivots
    pset = set(pivots)
    free = tuple(j for j in range(ambient_dim) if j not in pset)
    project = zeros(len(free), ambient_dim)
    section = zeros(ambient_dim, len(free))
    for t, c in enumerate(free):
        project[t, c] = 1
        section[c, t] = 1
        for p, r in zip(pivots, rel.basis):
            if r[c]:
                project[t, p] = -r[c]
    return Quotient(ambient_dim, rel, free, project, section)
