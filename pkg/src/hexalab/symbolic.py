"""Base-6 words, the gluing relation and point addresses on the hexacarpet.

A finite word is a plain ``tuple`` of ints in ``0..5``.  A point of K is
addressed by a :class:`PointRep`: a finite prefix followed by a constant
tail ``0^inf`` or ``5^inf``.  Two infinite words denote the same point iff
they are equal or one is the :func:`twin` of the other.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from itertools import product
from typing import Iterable, Iterator, Optional, Sequence

Word = tuple  # tuple[int, ...]

SYMBOLS = (0, 1, 2, 3, 4, 5)
TAILS = (0, 5)


@dataclass(frozen=True, order=False)
class PointRep:
    """Infinite word ``prefix + tail^inf`` in normal form.

    The constructor absorbs trailing copies of ``tail`` into the tail, so two
    equal infinite words always have equal representations.
    """

    prefix: Word
    tail: int

    def __post_init__(self):
        if self.tail not in TAILS:
            raise ValueError(f"tail must be 0 or 5, got {self.tail!r}")
        pre = tuple(self.prefix)
        for s in pre:
            if s not in SYMBOLS:
                raise ValueError(f"symbol out of range: {s!r}")
        end = len(pre)
        while end and pre[end - 1] == self.tail:
            end -= 1
        object.__setattr__(self, "prefix", pre[:end])

    def expansion(self, length: int) -> Word:
        """First ``length`` symbols of the infinite word."""
        pre = self.prefix
        if length <= len(pre):
            return pre[:length]
        return pre + (self.tail,) * (length - len(pre))

    def __lt__(self, other: "PointRep") -> bool:
        n = max(len(self.prefix), len(other.prefix)) + 1
        return self.expansion(n) < other.expansion(n)

    def __le__(self, other: "PointRep") -> bool:
        return self == other or self < other

    def __str__(self) -> str:
        return format_point(self)


# A PointRep that is the lexicographic minimum of its class.
CanonicalPoint = PointRep


@dataclass(frozen=True)
class FaceRef:
    """Face ``{w i v : v in {0,5}^inf}`` of the cell ``K_w``."""

    cell: Word
    side: int


def word(s: str | Iterable[int]) -> Word:
    """Parse ``"012"`` (or any iterable of ints) into a word tuple."""
    if isinstance(s, str):
        out = tuple(int(ch) for ch in s)
    else:
        out = tuple(int(ch) for ch in s)
    for ch in out:
        if ch not in SYMBOLS:
            raise ValueError(f"not a base-6 word: {s!r}")
    return out


def fmt_word(w: Sequence[int]) -> str:
    return "".join(str(s) for s in w) or "e"


def parse_point(literal: str) -> PointRep:
    """Parse the ``<digits>:<t>`` literal, e.g. ``"010:0"`` or ``":5"``."""
    digits, sep, tail = literal.strip().partition(":")
    if not sep or tail not in ("0", "5") or not all(c in "012345" for c in digits):
        raise ValueError(f"bad point literal {literal!r}; expected <digits>:<0|5>")
    return PointRep(word(digits), int(tail))


def format_point(p: PointRep) -> str:
    return "".join(str(s) for s in p.prefix) + ":" + str(p.tail)


def first_divergence(p: PointRep, q: PointRep) -> float:
    """``s(p, q)``: 1-based index of the first differing symbol, ``inf`` if equal."""
    n = max(len(p.prefix), len(q.prefix)) + 1
    a, b = p.expansion(n), q.expansion(n)
    for i, (x, y) in enumerate(zip(a, b)):
        if x != y:
            return i + 1
    return math.inf


def delta_r(p: PointRep, q: PointRep, r: float) -> float:
    """Ultrametric ``r ** s(p, q)`` on infinite words."""
    if not 0 < r < 1:
        raise ValueError("r must lie in (0, 1)")
    s = first_divergence(p, q)
    return 0.0 if s == math.inf else r**s


def partner(a: int, c: int) -> int:
    """Symbol glued to ``a`` when the next symbol is ``c`` (``c`` in 1..4)."""
    if c in (1, 2):
        return a + 1 if a % 2 == 0 else a - 1
    if c in (3, 4):
        return (a + 1) % 6 if a % 2 == 1 else (a - 1) % 6
    raise ValueError(f"{c} is not a glue symbol")


def glue_set(a: int, b: int) -> tuple:
    """Glue symbols shared by the cyclically adjacent top cells ``a`` and ``b``."""
    if (a + 1) % 6 == b:
        lo = a
    elif (b + 1) % 6 == a:
        lo = b
    else:
        return ()
    return (1, 2) if lo % 2 == 0 else (3, 4)


def _last_glue_index(pre: Word) -> int:
    for i in range(len(pre) - 1, -1, -1):
        if pre[i] not in TAILS:
            return i
    return -1


def twin(p: PointRep) -> Optional[PointRep]:
    """The other infinite word of the same point, or ``None``."""
    pre = p.prefix
    m = _last_glue_index(pre)
    if m < 1:
        return None
    b = partner(pre[m - 1], pre[m])
    return PointRep(pre[: m - 1] + (b,) + pre[m:], p.tail)


def representatives(p: PointRep) -> tuple:
    t = twin(p)
    return (p,) if t is None else (p, t)


def canonical(p: PointRep) -> CanonicalPoint:
    t = twin(p)
    if t is None:
        return p
    return t if t < p else p


def points_equal(p: PointRep, q: PointRep) -> bool:
    return canonical(p) == canonical(q)


def point_in_cell(p: PointRep, w: Sequence[int]) -> bool:
    w = tuple(w)
    return any(r.expansion(len(w)) == w for r in representatives(p))


def point_on_face(p: PointRep, f: FaceRef) -> bool:
    head = tuple(f.cell) + (f.side,)
    n = len(head)
    for r in representatives(p):
        if r.expansion(n) == head and all(s in TAILS for s in r.prefix[n:]):
            return True
    return False


def cells_containing(p: PointRep, max_len: int) -> set:
    """All words of length ``<= max_len`` whose cell contains ``p``."""
    out = set()
    for r in representatives(p):
        e = r.expansion(max_len)
        for k in range(max_len + 1):
            out.add(e[:k])
    return out


def cell_intersects(u: Sequence[int], v: Sequence[int]) -> bool:
    """Whether ``K_u`` and ``K_v`` share a point (containment counts)."""
    u, v = tuple(u), tuple(v)
    n = min(len(u), len(v))
    k = 0
    while k < n and u[k] == v[k]:
        k += 1
    if k == n:
        return True
    a, b = u[k], v[k]
    gs = glue_set(a, b)
    if not gs:
        return False
    q1, q2 = u[k + 1 :], v[k + 1 :]
    longer, shorter = (q1, q2) if len(q1) >= len(q2) else (q2, q1)
    if longer[: len(shorter)] != shorter:
        return False
    if not longer:
        return True
    return longer[0] in gs and all(s in TAILS for s in longer[1:])


def same_level_neighbors(w: Sequence[int]) -> set:
    """Words ``v != w`` of the same length with ``K_v`` meeting ``K_w``."""
    w = tuple(w)
    if not w:
        raise ValueError("the empty word has no same-level neighbours")
    head, a = w[:-1], w[-1]
    out = {head + ((a + 1) % 6,), head + ((a - 1) % 6,)}
    m = _last_glue_index(w)
    if m >= 1:
        out.add(w[: m - 1] + (partner(w[m - 1], w[m]),) + w[m:])
    return out


def face_vertices(f: FaceRef, k: int) -> set:
    """Canonical points ``w i t j^inf`` with ``|w i t| = k`` and ``t, j`` in {0,5}."""
    w = tuple(f.cell)
    r = k - len(w) - 1
    if r < 0:
        raise ValueError("k must be at least |cell| + 1")
    head = w + (f.side,)
    return {canonical(PointRep(head + t, j)) for t in product(TAILS, repeat=r) for j in TAILS}


def shift(i: int, p: PointRep) -> PointRep:
    """Prepend the symbol ``i`` (the symbolic contraction ``sigma_i``)."""
    return PointRep((i,) + p.prefix, p.tail)


def cell_vertices(w: Sequence[int]) -> list:
    """The 12 canonical vertex points ``w i j^inf`` of the cell ``K_w``."""
    w = tuple(w)
    return [canonical(PointRep(w + (i,), j)) for i in SYMBOLS for j in TAILS]


def words(n: int) -> Iterator[Word]:
    """All words of length ``n`` in lexicographic order."""
    return product(SYMBOLS, repeat=n)


def sort_key(p: PointRep, length: int) -> Word:
    return p.expansion(length)


def sorted_points(points: Iterable[PointRep]) -> list:
    pts = list(points)
    if not pts:
        return pts
    n = max(len(p.prefix) for p in pts) + 1
    return sorted(pts, key=lambda p: p.expansion(n))
