"""Bit-packed linear algebra over GF(2).

Vectors are stored as Python integers: bit ``i`` is coordinate ``i``.  XOR of two
integers is word-parallel, so elimination is a loop over rows rather than over
bits.  The pivot of a row is its *lowest* set bit.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, Sequence

import numpy as np

__all__ = [
    "Gf2Vector",
    "Gf2Matrix",
    "EchelonBasis",
    "DimensionError",
    "reduce",
    "in_rowspace",
    "nullspace",
    "intersect",
    "span_sum",
    "coset_min_weight",
    "coset_max_weight",
    "lex_less",
    "bits_of",
]


class DimensionError(ValueError):
    """Raised when operands live in different ambient spaces."""


def bits_of(x: int) -> list[int]:
    """Sorted positions of the set bits of ``x``."""
    out = []
    while x:
        low = x & -x
        out.append(low.bit_length() - 1)
        x ^= low
    return out


def lex_less(a: int, b: int) -> bool:
    """True iff support(a) precedes support(b) lexicographically.

    Only meaningful for equal weights, where the first differing support
    element decides: the vector owning the lowest bit of ``a ^ b`` is smaller.
    """
    d = a ^ b
    return bool(d) and bool(a & d & -d)


@dataclass(frozen=True)
class Gf2Vector:
    length: int
    bits: int = 0

    def __post_init__(self):
        if self.length < 0:
            raise ValueError("negative length")
        if self.bits < 0 or self.bits >> self.length:
            raise ValueError("support outside [0, length)")

    @classmethod
    def from_support(cls, length: int, support: Iterable[int]) -> "Gf2Vector":
        bits = 0
        for i in support:
            bits ^= 1 << i
        return cls(length, bits)

    @classmethod
    def zeros(cls, length: int) -> "Gf2Vector":
        return cls(length, 0)

    @classmethod
    def ones(cls, length: int) -> "Gf2Vector":
        return cls(length, (1 << length) - 1)

    @property
    def support(self) -> tuple[int, ...]:
        return tuple(bits_of(self.bits))

    @property
    def weight(self) -> int:
        return self.bits.bit_count()

    def __add__(self, other: "Gf2Vector") -> "Gf2Vector":
        _check_len(self.length, other.length)
        return Gf2Vector(self.length, self.bits ^ other.bits)

    __xor__ = __add__

    def dot(self, other: "Gf2Vector") -> int:
        """Standard inner product: parity of the overlap."""
        _check_len(self.length, other.length)
        return (self.bits & other.bits).bit_count() & 1

    def __str__(self) -> str:
        return "".join("1" if (self.bits >> i) & 1 else "0" for i in range(self.length))

    @classmethod
    def from_string(cls, s: str) -> "Gf2Vector":
        """Parse ``"110"`` as coordinates 0, 1 set (left to right)."""
        return cls.from_support(len(s), (i for i, c in enumerate(s) if c == "1"))


@dataclass(frozen=True)
class Gf2Matrix:
    ambient: int
    rows: tuple[Gf2Vector, ...] = ()

    def __post_init__(self):
        for r in self.rows:
            if r.length != self.ambient:
                raise DimensionError(f"row length {r.length} != ambient {self.ambient}")

    @classmethod
    def from_strings(cls, rows: Sequence[str], ambient: int | None = None) -> "Gf2Matrix":
        if ambient is None:
            ambient = len(rows[0]) if rows else 0
        return cls(ambient, tuple(Gf2Vector.from_string(r) for r in rows))

    @classmethod
    def from_bits(cls, ambient: int, rows: Iterable[int]) -> "Gf2Matrix":
        return cls(ambient, tuple(Gf2Vector(ambient, r) for r in rows))


@dataclass(frozen=True)
class EchelonBasis:
    """Reduced row-echelon basis.

    ``rows[i]`` is a bitmask whose lowest set bit is ``pivots[i]``; pivots are
    strictly increasing and every pivot column is zero in all other rows.
    """

    ambient: int
    rows: tuple[int, ...] = ()
    pivots: tuple[int, ...] = ()
    _index: dict = field(default=None, compare=False, repr=False)
    _mask: int = field(default=0, compare=False, repr=False)

    def __post_init__(self):
        object.__setattr__(self, "_index", dict(zip(self.pivots, self.rows)))
        m = 0
        for c in self.pivots:
            m |= 1 << c
        object.__setattr__(self, "_mask", m)

    @property
    def rank(self) -> int:
        return len(self.rows)

    dim = rank

    def vectors(self) -> list[Gf2Vector]:
        return [Gf2Vector(self.ambient, r) for r in self.rows]

    def reduce_bits(self, x: int) -> int:
        """Residue of ``x`` after clearing every pivot coordinate."""
        idx = self._index
        y = x
        for c in bits_of(x & self.pivot_mask):
            y ^= idx[c]
        return y

    @property
    def pivot_mask(self) -> int:
        return self._mask

    def contains_bits(self, x: int) -> bool:
        return self.reduce_bits(x) == 0


def _check_len(a: int, b: int) -> None:
    if a != b:
        raise DimensionError(f"dimension mismatch: {a} vs {b}")


def _echelonize(rows: Iterable[int]) -> dict[int, int]:
    """Insert rows into a pivot table (pivot = lowest bit). Not back-substituted."""
    piv: dict[int, int] = {}
    for x in rows:
        while x:
            low = (x & -x).bit_length() - 1
            r = piv.get(low)
            if r is None:
                piv[low] = x
                break
            x ^= r
    return piv


def _to_rref(ambient: int, piv: dict[int, int]) -> EchelonBasis:
    cols = sorted(piv)
    mask_above = 0
    for c in reversed(cols):
        r = piv[c]
        for b in bits_of(r & mask_above):
            r ^= piv[b]
        piv[c] = r
        mask_above |= 1 << c
    return EchelonBasis(ambient, tuple(piv[c] for c in cols), tuple(cols))


def reduce_bits(ambient: int, rows: Iterable[int]) -> EchelonBasis:
    return _to_rref(ambient, _echelonize(rows))


def reduce(M: Gf2Matrix) -> EchelonBasis:
    """Row-reduce ``M``; the result spans the same row space."""
    return reduce_bits(M.ambient, (r.bits for r in M.rows))


def in_rowspace(B: EchelonBasis, v: Gf2Vector) -> bool:
    _check_len(B.ambient, v.length)
    return B.contains_bits(v.bits)


def nullspace(B: EchelonBasis) -> EchelonBasis:
    """Orthogonal complement of ``rowspace(B)`` under <J,K> = |J & K| mod 2."""
    pivset = set(B.pivots)
    out = []
    for f in range(B.ambient):
        if f in pivset:
            continue
        x = 1 << f
        for c, r in zip(B.pivots, B.rows):
            if (r >> f) & 1:
                x |= 1 << c
        out.append(x)
    return reduce_bits(B.ambient, out)


def span_sum(A: EchelonBasis, B: EchelonBasis) -> EchelonBasis:
    _check_len(A.ambient, B.ambient)
    return reduce_bits(A.ambient, list(A.rows) + list(B.rows))


def intersect(A: EchelonBasis, B: EchelonBasis) -> EchelonBasis:
    """``rowspace(A) & rowspace(B)``, computed as ``(A^perp + B^perp)^perp``."""
    _check_len(A.ambient, B.ambient)
    return nullspace(span_sum(nullspace(A), nullspace(B)))


# ---------------------------------------------------------------------------
# Minimum / maximum weight coset members
# ---------------------------------------------------------------------------

_PY_ENUM_MAX = 12
_TABLE_BITS = 14


def _better(cand: int, best: int | None) -> bool:
    if best is None:
        return True
    wc, wb = cand.bit_count(), best.bit_count()
    return wc < wb or (wc == wb and lex_less(cand, best))


def _int_to_words(x: int, nwords: int) -> np.ndarray:
    return np.frombuffer(x.to_bytes(8 * nwords, "little"), dtype="<u8").copy()


def _words_to_int(w: np.ndarray) -> int:
    return int.from_bytes(np.ascontiguousarray(w, dtype="<u8").tobytes(), "little")


def _exact_min(ambient: int, rows: Sequence[int], v: int) -> int:
    """Exhaustive search of ``v + span(rows)``; lex tie-break."""
    k = len(rows)
    if k <= _PY_ENUM_MAX:
        cur = v
        best = v
        for i in range(1, 1 << k):
            cur ^= rows[(i & -i).bit_length() - 1]
            if _better(cur, best):
                best = cur
        return best

    nwords = max(1, (ambient + 63) // 64)
    k1 = min(k, _TABLE_BITS)
    table = np.zeros((1, nwords), dtype=np.uint64)
    for r in rows[:k1]:
        table = np.concatenate([table, table ^ _int_to_words(r, nwords)])
    high = rows[k1:]
    cur = v
    best = None
    for i in range(1 << len(high)):
        if i:
            cur ^= high[(i & -i).bit_length() - 1]
        block = table ^ _int_to_words(cur, nwords)
        wts = np.bitwise_count(block).sum(axis=1)
        wmin = int(wts.min())
        if best is not None and wmin > best.bit_count():
            continue
        for j in np.flatnonzero(wts == wmin):
            cand = _words_to_int(block[j])
            if _better(cand, best):
                best = cand
    return best


def _isd_min(B: EchelonBasis, v: int, restarts: int, seed: int) -> int:
    """Randomised information-set search for a light member of ``v + rowspace(B)``."""
    rng = np.random.default_rng(seed)
    m = B.ambient
    best = B.reduce_bits(v)
    for _ in range(restarts):
        perm = rng.permutation(m)
        rows = list(B.rows)
        acc = 0
        for r in rows:
            acc |= r
        piv: list[tuple[int, int]] = []
        for c in perm:
            if not rows:
                break
            c = int(c)
            if not (acc >> c) & 1:
                continue
            j = next(i for i, r in enumerate(rows) if (r >> c) & 1)
            pr = rows.pop(j)
            rows = [r ^ pr if (r >> c) & 1 else r for r in rows]
            piv = [(pc, r ^ pr if (r >> c) & 1 else r) for pc, r in piv]
            piv.append((c, pr))
            acc = 0
            for r in rows:
                acc |= r
        x = v
        for c, r in piv:
            if (x >> c) & 1:
                x ^= r
        # Lee-Brickell with one extra row, then greedy descent
        cands = [x] + [x ^ r for _, r in piv]
        for cnd in cands:
            if _better(cnd, best):
                best = cnd
        improved = True
        while improved:
            improved = False
            for _, r in piv:
                y = best ^ r
                if _better(y, best):
                    best, improved = y, True
    return best


def coset_min_weight(
    S: EchelonBasis,
    v: Gf2Vector,
    exact_dim_cap: int = 24,
    restarts: int = 64,
    seed: int = 0,
) -> tuple[Gf2Vector, bool]:
    """Lightest member of ``v + rowspace(S)``.

    Exhaustive (and certified) when ``dim S <= exact_dim_cap``; among minimisers
    the one with lexicographically least support is returned.  Above the cap
    the best of ``restarts`` information-set restarts is returned uncertified.
    """
    _check_len(S.ambient, v.length)
    if S.rank <= exact_dim_cap:
        return Gf2Vector(S.ambient, _exact_min(S.ambient, S.rows, v.bits)), True
    return Gf2Vector(S.ambient, _isd_min(S, v.bits, restarts, seed)), False


def coset_max_weight(
    S: EchelonBasis,
    v: Gf2Vector,
    exact_dim_cap: int = 24,
    restarts: int = 64,
    seed: int = 0,
) -> tuple[Gf2Vector, bool]:
    """Heaviest member of ``v + rowspace(S)`` via the complemented minimum."""
    ones = Gf2Vector.ones(S.ambient)
    lo, cert = coset_min_weight(S, v + ones, exact_dim_cap, restarts, seed)
    return lo + ones, cert

