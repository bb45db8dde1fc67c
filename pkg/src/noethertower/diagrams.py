"""Temperley-Lieb, Brauer and partition diagrams.

A diagram on ``n`` strands is a set partition of ``2n`` points.  Internally the
bottom points ``1..n`` are ``0..n-1`` and the top points ``1'..n'`` are
``n..2n-1``; this is also the canonical point order, so a diagram in canonical
form has each block sorted and the blocks sorted by their minimal element.

Composition ``compose(d1, d2)`` stacks ``d1`` above ``d2``: the top row of
``d2`` is glued to the bottom row of ``d1``.  Closed components that live
entirely in the glued middle row are counted as loops.
"""
from __future__ import annotations

import enum
import re
from dataclasses import dataclass
from functools import lru_cache
from math import comb, factorial

__all__ = [
    "Family",
    "Diagram",
    "DEFAULT_CAPS",
    "CapExceeded",
    "expected_count",
    "enumerate_diagrams",
    "compose",
    "classify",
    "identity_diagram",
    "parse_diagram",
]


class Family(str, enum.Enum):
    TL = "tl"
    BRAUER = "brauer"
    PARTITION = "partition"

    @classmethod
    def parse(cls, value) -> "Family":
        if isinstance(value, Family):
            return value
        key = str(value).strip().lower()
        aliases = {"temperley-lieb": "tl", "br": "brauer", "p": "partition"}
        try:
            return cls(aliases.get(key, key))
        except ValueError:
            raise ValueError(f"unknown diagram family {value!r}") from None


DEFAULT_CAPS = {Family.TL: 8, Family.BRAUER: 6, Family.PARTITION: 4}


class CapExceeded(ValueError):
    """Raised when an enumeration would exceed the configured size cap."""


class DiagramError(ValueError):
    pass


@dataclass(frozen=True, slots=True)
class Diagram:
    n: int
    blocks: tuple[tuple[int, ...], ...]
    family: Family

    def __post_init__(self):
        pts = sorted(p for b in self.blocks for p in b)
        if pts != list(range(2 * self.n)):
            raise DiagramError("blocks must partition the 2n points")
        if _canonical(self.blocks) != self.blocks:
            raise DiagramError("blocks are not in canonical form")
        if self.family is not Family.PARTITION:
            if any(len(b) != 2 for b in self.blocks):
                raise DiagramError(f"{self.family.value} diagrams are perfect matchings")
            if self.family is Family.TL and not _planar(self.n, self.blocks):
                raise DiagramError("Temperley-Lieb diagrams must be planar")

    @classmethod
    def make(cls, n: int, blocks, family) -> "Diagram":
        return cls(n, _canonical(blocks), Family.parse(family))

    def __str__(self) -> str:
        return format_diagram(self)


def _canonical(blocks) -> tuple[tuple[int, ...], ...]:
    return tuple(sorted(tuple(sorted(b)) for b in blocks if b))


def _position(n: int, p: int) -> int:
    # cyclic order: bottom left->right, then top right->left
    return p if p < n else 3 * n - 1 - p


def _planar(n: int, blocks) -> bool:
    """Noncrossing test for a perfect matching in the rectangle picture."""
    arcs = [tuple(sorted(_position(n, p) for p in b)) for b in blocks]
    for i, (a, b) in enumerate(arcs):
        for c, d in arcs[i + 1:]:
            if a < c < b < d or c < a < d < b:
                return False
    return True


def format_diagram(d: Diagram) -> str:
    def label(p):
        return str(p + 1) if p < d.n else f"{p - d.n + 1}'"

    return "".join("{" + ",".join(label(p) for p in b) + "}" for b in d.blocks)


_BLOCK = re.compile(r"\{([^{}]*)\}")


def parse_diagram(text: str, n: int, family) -> Diagram:
    """Parse the text form, e.g. ``"{1,2}{1',2'}"``."""
    blocks = []
    consumed = "".join(m.group(0) for m in _BLOCK.finditer(text))
    if consumed != text.replace(" ", ""):
        raise DiagramError(f"malformed diagram text {text!r}")
    for m in _BLOCK.finditer(text):
        block = []
        for tok in m.group(1).split(","):
            tok = tok.strip()
            if tok.endswith("'"):
                block.append(n + int(tok[:-1]) - 1)
            else:
                block.append(int(tok) - 1)
        blocks.append(block)
    return Diagram.make(n, blocks, family)


def identity_diagram(n: int, family) -> Diagram:
    return Diagram.make(n, [(i, n + i) for i in range(n)], family)


# -- counting and enumeration ------------------------------------------------

def _bell(k: int) -> int:
    row = [1]
    for _ in range(k):
        nxt = [row[-1]]
        for x in row:
            nxt.append(nxt[-1] + x)
        row = nxt
    return row[0]


def expected_count(family, n: int) -> int:
    family = Family.parse(family)
    if family is Family.TL:
        return comb(2 * n, n) // (n + 1)
    if family is Family.BRAUER:
        return factorial(2 * n) // (2**n * factorial(n))
    return _bell(2 * n)


def _perfect_matchings(points: list[int]):
    if not points:
        yield []
        return
    first, rest = points[0], points[1:]
    for k, partner in enumerate(rest):
        for m in _perfect_matchings(rest[:k] + rest[k + 1:]):
            yield [(first, partner)] + m


def _noncrossing_matchings(positions: list[int]):
    # positions are consecutive around the circle; pair the first with an
    # odd-offset partner so both sides have even size
    if not positions:
        yield []
        return
    first = positions[0]
    for k in range(1, len(positions), 2):
        inside, outside = positions[1:k], positions[k + 1:]
        for a in _noncrossing_matchings(inside):
            for b in _noncrossing_matchings(outside):
                yield [(first, positions[k])] + a + b


def _set_partitions(k: int):
    # restricted growth strings
    if k == 0:
        yield []
        return
    labels = [0] * k

    def rec(i, top):
        if i == k:
            yield list(labels)
            return
        for v in range(top + 2):
            labels[i] = v
            yield from rec(i + 1, max(top, v))

    labels[0] = 0
    yield from rec(1, 0)


def enumerate_diagrams(family, n: int, cap: int | None = None) -> list[Diagram]:
    """All diagrams of ``family`` on ``n`` strands, sorted canonically."""
    family = Family.parse(family)
    if n < 0:
        raise ValueError("n must be nonnegative")
    limit = DEFAULT_CAPS[family] if cap is None else cap
    if n > limit:
        raise CapExceeded(
            f"{family.value} n={n} exceeds cap {limit} "
            f"({expected_count(family, n)} diagrams)"
        )
    return list(_enumerate_cached(family, n))


@lru_cache(maxsize=None)
def _enumerate_cached(family: Family, n: int) -> tuple[Diagram, ...]:
    out = []
    if family is Family.TL:
        by_pos = {_position(n, p): p for p in range(2 * n)}
        for m in _noncrossing_matchings(list(range(2 * n))):
            out.append(Diagram(n, _canonical([(by_pos[a], by_pos[b]) for a, b in m]), family))
    elif family is Family.BRAUER:
        for m in _perfect_matchings(list(range(2 * n))):
            out.append(Diagram(n, _canonical(m), family))
    else:
        for labels in _set_partitions(2 * n):
            blocks: dict[int, list[int]] = {}
            for p, lab in enumerate(labels):
                blocks.setdefault(lab, []).append(p)
            out.append(Diagram(n, _canonical(blocks.values()), family))
    out.sort(key=lambda d: d.blocks)
    return tuple(out)


# -- composition ---------------------------------------------------------------

def _find(parent: list[int], x: int) -> int:
    while parent[x] != x:
        parent[x] = parent[parent[x]]
        x = parent[x]
    return x


def compose(d1: Diagram, d2: Diagram) -> tuple[Diagram, int]:
    """Stack ``d1`` above ``d2``; return the product diagram and the loop count."""
    if d1.n != d2.n:
        raise DiagramError(f"strand count mismatch: {d1.n} != {d2.n}")
    if d1.family is not d2.family:
        raise DiagramError(f"family mismatch: {d1.family.value} vs {d2.family.value}")
    n = d1.n
    # layer 0: bottom of d2, layer 1: middle row, layer 2: top of d1
    parent = list(range(3 * n))

    def union(a, b):
        ra, rb = _find(parent, a), _find(parent, b)
        if ra != rb:
            parent[ra] = rb

    for b in d2.blocks:
        for p in b[1:]:
            union(b[0], p)
    for b in d1.blocks:
        pts = [p + n for p in b]
        for p in pts[1:]:
            union(pts[0], p)
    groups: dict[int, list[int]] = {}
    for p in range(3 * n):
        groups.setdefault(_find(parent, p), []).append(p)
    blocks = []
    loops = 0
    for pts in groups.values():
        outer = [p if p < n else p - n for p in pts if p < n or p >= 2 * n]
        if outer:
            blocks.append(outer)
        else:
            loops += 1
    return Diagram(n, _canonical(blocks), d1.family), loops


def classify(d: Diagram) -> dict[str, bool]:
    """``is_permutation``: every block joins one bottom and one top point.
    ``is_planar``: the diagram is a perfect matching with no crossing pair.
    """
    n = d.n
    is_perm = all(len(b) == 2 and b[0] < n <= b[1] for b in d.blocks)
    is_matching = all(len(b) == 2 for b in d.blocks)
    return {
        "is_permutation": is_perm,
        "is_planar": is_matching and _planar(n, d.blocks),
    }
