"""Exact integer-lattice primitives.

Points and jump vectors are plain tuples of Python ints (``IntVec``).  Nothing
in here touches floating point: gcds are integer gcds and ranks are computed
over the rationals with :class:`fractions.Fraction`.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Optional, Sequence, Tuple

import numpy as np

IntVec = Tuple[int, ...]


def as_intvec(v: Iterable) -> IntVec:
    """Coerce an iterable of integral values to an ``IntVec``.

    Floats are accepted only when they are integral (``2.0``), anything else
    raises ``ValueError`` so that rounding can never slip in silently.
    """
    out = []
    for c in v:
        if isinstance(c, (bool, np.bool_)):
            raise ValueError(f"boolean coordinate in {v!r}")
        if isinstance(c, (int, np.integer)):
            out.append(int(c))
        elif isinstance(c, (float, Fraction)) and c == int(c):
            out.append(int(c))
        else:
            raise ValueError(f"non-integer coordinate {c!r}")
    return tuple(out)


def vadd(x: Sequence[int], y: Sequence[int]) -> IntVec:
    return tuple(a + b for a, b in zip(x, y))


def vsub(x: Sequence[int], y: Sequence[int]) -> IntVec:
    return tuple(a - b for a, b in zip(x, y))


def vscale(k: int, x: Sequence[int]) -> IntVec:
    return tuple(k * a for a in x)


def vneg(x: Sequence[int]) -> IntVec:
    return tuple(-a for a in x)


def geq(x: Sequence[int], y: Sequence[int]) -> bool:
    """Coordinate-wise ``x >= y``."""
    return all(a >= b for a, b in zip(x, y))


def nonneg(x: Sequence[int]) -> bool:
    return all(a >= 0 for a in x)


def vmax(x: Sequence[int], y: Sequence[int]) -> IntVec:
    return tuple(max(a, b) for a, b in zip(x, y))


def is_zero(x: Sequence[int]) -> bool:
    return all(a == 0 for a in x)


def first_nonzero(x: Sequence[int]) -> int:
    for a in x:
        if a:
            return a
    return 0


def ratio(y: Sequence[int], x: Sequence[int]) -> Optional[Fraction]:
    """Return the scalar ``a`` with ``y == a * x`` if it exists, else ``None``."""
    if is_zero(x):
        raise ValueError("ratio by the zero vector")
    a: Optional[Fraction] = None
    for yi, xi in zip(y, x):
        if xi == 0:
            if yi != 0:
                return None
            continue
        q = Fraction(yi, xi)
        if a is None:
            a = q
        elif q != a:
            return None
    return a


def int_ratio(y: Sequence[int], x: Sequence[int]) -> Optional[int]:
    """``y / x`` when it is an integer, else ``None``."""
    a = ratio(y, x)
    if a is None or a.denominator != 1:
        return None
    return int(a)


def coord_gcd(v: Sequence[int]) -> int:
    """Gcd of the absolute values of the coordinates of a non-zero vector."""
    if is_zero(v):
        raise ValueError("coord_gcd of the zero vector")
    return math.gcd(*(abs(a) for a in v))


def primitive(v: Sequence[int]) -> IntVec:
    """Primitive integer vector on the ray through ``v``, sign-normalised so
    that its first non-zero coordinate is positive."""
    g = coord_gcd(v)
    p = tuple(a // g for a in v)
    return vneg(p) if first_nonzero(p) < 0 else p


def vec_gcd(A: Iterable[Sequence[int]]) -> Optional[IntVec]:
    """Greatest common divisor of a finite set of non-zero integer vectors.

    Exists exactly when the vectors are collinear.  The result is normalised
    so that its first non-zero coordinate is positive.  Returns ``None`` when
    the span has dimension other than one.
    """
    vecs = [as_intvec(a) for a in A]
    if not vecs:
        raise ValueError("vec_gcd of an empty set")
    if any(is_zero(a) for a in vecs):
        raise ValueError("vec_gcd: zero vector in input")
    p = primitive(vecs[0])
    ks = []
    for b in vecs:
        k = int_ratio(b, p)
        if k is None:
            return None
        ks.append(abs(k))
    return vscale(math.gcd(*ks), p)


def span_dim(A: Iterable[Sequence[int]]) -> int:
    """Rank over the rationals of the matrix whose rows are ``A``."""
    rows = [[Fraction(c) for c in a] for a in A]
    if not rows:
        return 0
    ncols = len(rows[0])
    rank = 0
    for col in range(ncols):
        pivot = next((r for r in range(rank, len(rows)) if rows[r][col] != 0), None)
        if pivot is None:
            continue
        rows[rank], rows[pivot] = rows[pivot], rows[rank]
        pv = rows[rank][col]
        for r in range(len(rows)):
            if r != rank and rows[r][col] != 0:
                f = rows[r][col] / pv
                rows[r] = [a - f * b for a, b in zip(rows[r], rows[rank])]
        rank += 1
        if rank == len(rows):
            break
    return rank


@dataclass(frozen=True)
class Antichain:
    """A finite set of pairwise incomparable points of the non-negative lattice.

    Elements are stored sorted, so equality and hashing are structural.
    Construct through :func:`minimal_set` unless the input is known to be an
    antichain already.
    """

    elements: Tuple[IntVec, ...]

    def __post_init__(self):
        els = tuple(sorted(set(as_intvec(e) for e in self.elements)))
        if not els:
            raise ValueError("an Antichain must be non-empty")
        d = len(els[0])
        for e in els:
            if len(e) != d:
                raise ValueError("mixed dimensions in Antichain")
            if not nonneg(e):
                raise ValueError(f"negative coordinate in {e}")
        for i, e in enumerate(els):
            for f in els[i + 1:]:
                if geq(e, f) or geq(f, e):
                    raise ValueError(f"{e} and {f} are comparable")
        object.__setattr__(self, "elements", els)

    @property
    def dim(self) -> int:
        return len(self.elements[0])

    def __iter__(self):
        return iter(self.elements)

    def __len__(self):
        return len(self.elements)

    def __contains__(self, x) -> bool:
        return tuple(x) in self.elements

    def covers(self, x: Sequence[int]) -> bool:
        """True iff ``x`` lies in the upward closure."""
        return in_up_closure(x, self)

    def as_array(self) -> np.ndarray:
        return np.asarray(self.elements, dtype=np.int64).reshape(len(self), self.dim)

    def tolist(self):
        return [list(e) for e in self.elements]


def minimal_set(B: Iterable[Sequence[int]]) -> Antichain:
    """Minimal elements of a finite non-empty subset of the non-negative lattice."""
    pts = sorted(set(as_intvec(b) for b in B))
    if not pts:
        raise ValueError("minimal_set of an empty set")
    keep = [
        p for p in pts
        if not any(q != p and geq(p, q) for q in pts)
    ]
    return Antichain(tuple(keep))


def in_up_closure(x: Sequence[int], A: Iterable[Sequence[int]]) -> bool:
    return any(geq(x, a) for a in A)


def up_closure_mask(X: np.ndarray, A: Iterable[Sequence[int]]) -> np.ndarray:
    """Vectorised :func:`in_up_closure` over the rows of ``X``."""
    X = np.asarray(X)
    mask = np.zeros(X.shape[0], dtype=bool)
    for a in A:
        mask |= np.all(X >= np.asarray(a, dtype=X.dtype), axis=1)
    return mask


def _xgcd(a: int, b: int) -> Tuple[int, int, int]:
    x0, x1, y0, y1 = 1, 0, 0, 1
    while b:
        q, a, b = a // b, b, a % b
        x0, x1 = x1, x0 - q * x1
        y0, y1 = y1, y0 - q * y1
    return a, x0, y0


class IntegerLattice:
    """The additive subgroup of Z^d generated by finitely many integer vectors.

    Kept in row-echelon (Hermite-style) form so membership is a forward
    substitution.
    """

    def __init__(self, generators: Iterable[Sequence[int]], dim: int):
        self.dim = dim
        rows = [list(as_intvec(g)) for g in generators if not is_zero(g)]
        basis = []
        col = 0
        while rows and col < dim:
            nz = [r for r in rows if r[col] != 0]
            if not nz:
                col += 1
                continue
            zr = [r for r in rows if r[col] == 0]
            piv = nz[0]
            for r in nz[1:]:
                g, s, t = _xgcd(piv[col], r[col])
                a, b = piv[col] // g, r[col] // g
                new_piv = [s * u + t * v for u, v in zip(piv, r)]
                rest = [b * u - a * v for u, v in zip(piv, r)]
                piv = new_piv
                if any(rest):
                    zr.append(rest)
            if piv[col] < 0:
                piv = [-u for u in piv]
            basis.append(piv)
            rows = [r for r in zr if any(r)]
            col += 1
        self.basis = [tuple(b) for b in basis]

    @property
    def rank(self) -> int:
        return len(self.basis)

    def __contains__(self, v: Sequence[int]) -> bool:
        r = list(as_intvec(v))
        for b in self.basis:
            col = next(i for i, c in enumerate(b) if c)
            if r[col] % b[col]:
                return False
            q = r[col] // b[col]
            r = [u - q * w for u, w in zip(r, b)]
        return not any(r)

    def contains_rows(self, X: np.ndarray) -> np.ndarray:
        """Row-wise membership for an int64 array."""
        R = np.array(X, dtype=np.int64, copy=True)
        ok = np.ones(R.shape[0], dtype=bool)
        for b in self.basis:
            col = next(i for i, c in enumerate(b) if c)
            ok &= (R[:, col] % b[col]) == 0
            q = R[:, col] // b[col]
            R -= q[:, None] * np.asarray(b, dtype=np.int64)[None, :]
        return ok & np.all(R == 0, axis=1)
