"""Exact linear programming over the rationals.

A small two-phase simplex on :class:`fractions.Fraction` with Bland's rule, so
it terminates and every answer is exact.  Problem sizes here are tiny (one
column per jump vector), which is why a dense tableau is fine.
"""

from __future__ import annotations

import math
from fractions import Fraction
from typing import List, Optional, Sequence, Tuple

from .lattice import IntVec


def _pivot(T: List[List[Fraction]], basis: List[int], r: int, c: int) -> None:
    pv = T[r][c]
    T[r] = [v / pv for v in T[r]]
    for i in range(len(T)):
        if i != r and T[i][c] != 0:
            f = T[i][c]
            T[i] = [a - f * b for a, b in zip(T[i], T[r])]
    basis[r] = c


def _simplex(T, basis, ncols, allowed) -> bool:
    """Minimise the objective in the last row of ``T``.  Returns False when unbounded."""
    obj = len(T) - 1
    while True:
        col = next((j for j in range(ncols) if allowed[j] and T[obj][j] < 0), None)
        if col is None:
            return True
        best, row = None, None
        for i in range(obj):
            if T[i][col] > 0:
                q = T[i][-1] / T[i][col]
                if best is None or q < best or (q == best and basis[i] < basis[row]):
                    best, row = q, i
        if row is None:
            return False
        _pivot(T, basis, row, col)


def solve_lp(
    A: Sequence[Sequence[Fraction]],
    b: Sequence[Fraction],
    c: Sequence[Fraction],
) -> Tuple[str, Optional[List[Fraction]], Optional[Fraction]]:
    """Minimise ``c.x`` subject to ``A x = b``, ``x >= 0``.

    Returns ``(status, x, value)`` where status is ``"optimal"``,
    ``"infeasible"`` or ``"unbounded"``.
    """
    m, n = len(A), len(c)
    A = [[Fraction(v) for v in row] for row in A]
    b = [Fraction(v) for v in b]
    for i in range(m):
        if b[i] < 0:
            A[i] = [-v for v in A[i]]
            b[i] = -b[i]
    # columns: n originals, m artificials, rhs
    T = [A[i] + [Fraction(int(i == k)) for k in range(m)] + [b[i]] for i in range(m)]
    basis = [n + i for i in range(m)]
    phase1 = [Fraction(0)] * n + [Fraction(1)] * m + [Fraction(0)]
    for i in range(m):
        phase1 = [p - t for p, t in zip(phase1, T[i])]
    T.append(phase1)
    _simplex(T, basis, n + m, [True] * (n + m))
    if T[-1][-1] != 0:
        return "infeasible", None, None
    # drive remaining artificials out of the basis where possible
    for r in range(m):
        if basis[r] >= n:
            col = next((j for j in range(n) if T[r][j] != 0), None)
            if col is not None:
                _pivot(T, basis, r, col)
    keep = [r for r in range(m) if basis[r] < n]
    T = [T[r] for r in keep]
    basis = [basis[r] for r in keep]
    obj = [Fraction(v) for v in c] + [Fraction(0)] * m + [Fraction(0)]
    for i, bv in enumerate(basis):
        if obj[bv] != 0:
            f = obj[bv]
            obj = [o - f * t for o, t in zip(obj, T[i])]
    T.append(obj)
    allowed = [True] * n + [False] * m
    if not _simplex(T, basis, n + m, allowed):
        return "unbounded", None, None
    x = [Fraction(0)] * n
    for i, bv in enumerate(basis):
        if bv < n:
            x[bv] = T[i][-1]
    value = sum((ci * xi for ci, xi in zip(c, x)), Fraction(0))
    return "optimal", x, value


def _feasible_leq(rows: Sequence[Sequence[int]], rhs: Sequence[int], nfree: int):
    """Find ``y`` (free, length ``nfree``) with ``rows . y >= rhs`` if one exists.

    Free variables are split as ``y = p - q`` and surplus columns are added.
    """
    m = len(rows)
    A = []
    for i, r in enumerate(rows):
        A.append(
            [Fraction(v) for v in r]
            + [Fraction(-v) for v in r]
            + [Fraction(-int(i == k)) for k in range(m)]
        )
    c = [Fraction(0)] * (2 * nfree + m)
    status, x, _ = solve_lp(A, [Fraction(v) for v in rhs], c)
    if status != "optimal":
        return None
    return [x[j] - x[nfree + j] for j in range(nfree)]


def positive_dependence(T: Sequence[IntVec]) -> Tuple[bool, object]:
    """Decide whether ``sum c_w w = 0`` has a solution with ``c >= 0`` not all zero.

    On success the certificate is the coefficient list ``c`` (normalised to
    sum to one).  Otherwise the certificate is a vector ``y`` with
    ``y . w >= 1`` for every jump, which rules out any such combination.
    """
    T = [tuple(w) for w in T]
    if not T:
        raise ValueError("empty jump set")
    d = len(T[0])
    A = [[Fraction(w[k]) for w in T] for k in range(d)]
    A.append([Fraction(1)] * len(T))
    b = [Fraction(0)] * d + [Fraction(1)]
    status, x, _ = solve_lp(A, b, [Fraction(0)] * len(T))
    if status == "optimal":
        return True, x
    y = _feasible_leq(T, [1] * len(T), d)
    if y is None:  # cannot happen by Farkas' lemma
        raise ArithmeticError("LP dual certificate not found")
    return False, y


def conservation_vector(T: Sequence[IntVec]) -> Optional[IntVec]:
    """A strictly positive integer vector orthogonal to every jump, or ``None``.

    Among all such vectors the LP picks one minimising the coordinate sum
    subject to every entry being at least one, then scales it to a primitive
    integer vector.
    """
    T = [tuple(w) for w in T]
    if not T:
        raise ValueError("empty jump set")
    d = len(T[0])
    # nu = 1 + u with u >= 0: sum_k w_k u_k = -sum_k w_k
    A = [[Fraction(w[k]) for k in range(d)] for w in T]
    b = [Fraction(-sum(w)) for w in T]
    status, u, _ = solve_lp(A, b, [Fraction(1)] * d)
    if status != "optimal":
        return None
    nu = [1 + v for v in u]
    den = 1
    for v in nu:
        den = den * v.denominator // math.gcd(den, v.denominator)
    ints = [int(v * den) for v in nu]
    g = math.gcd(*ints)
    return tuple(v // g for v in ints)
