"""Exact classification on one-dimensional invariant lines.

When all jumps are multiples of one vector ``omega_star`` the chain started at
``c`` stays on the line ``c + Z * step`` (``step = omega_star / g`` with ``g``
the gcd of the coordinates of ``omega_star``).  Points on a line are indexed
by ``t >= 0`` from its lowest point.  States only communicate within one
residue class of ``t`` mod ``g``.

If ``step`` is non-negative, closure membership along the line is monotone.
The four first-hit indices (any input, positive-jump input, any output,
negative-jump output) then determine every set in closed form.  If ``step``
has mixed signs, the line is finite and is classified by enumerating it.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np

from .exceptions import InputError, NotApplicableError
from .lattice import (
    Antichain, IntVec, as_intvec, coord_gcd, in_up_closure, int_ratio, nonneg,
    span_dim, vadd, vec_gcd, vscale,
)
from .network import JumpStructure, check_a2, closure_generators, reduce_jumps
from .oracle import ESCAPING, NEUTRAL, TRAPPING, explicit_reachability


def omega_star(js: JumpStructure) -> IntVec:
    if span_dim(js.omegas) != 1:
        raise NotApplicableError("jump vectors do not span a line")
    return vec_gcd(js.omegas)


def b_threshold(js: JumpStructure) -> IntVec:
    """Offset beyond which the interval structure of the line is guaranteed.

    Computed on the reduced jump set: ``b_j = M |w*_j| + max_j`` where ``M``
    exceeds the largest jump multiplier and ``max_j`` is the largest j-th
    coordinate among minimal inputs and outputs.  Zero when ``w*`` is
    non-negative.
    """
    star = omega_star(js)
    if nonneg(star):
        return (0,) * js.dim
    red = reduce_jumps(js)
    M = max(abs(int_ratio(w, star)) for w in red.omegas) + 1
    pts = red.input_points() + red.output_points()
    return tuple(M * abs(star[j]) + max(p[j] for p in pts) for j in range(js.dim))


@dataclass(frozen=True)
class LineGeometry:
    """The line through ``c``: points ``base + t * step`` for ``t`` in ``[0, length)``."""

    c: IntVec
    step: IntVec
    base: IntVec
    length: Optional[int]  # None: infinite
    c_index: int

    def point(self, t: int) -> IntVec:
        return vadd(self.base, vscale(t, self.step))

    def index(self, x: Sequence[int]) -> Optional[int]:
        x = as_intvec(x)
        diff = tuple(a - b for a, b in zip(x, self.base))
        if all(v == 0 for v in diff):
            return 0
        k = int_ratio(diff, self.step)
        if k is None or k < 0 or (self.length is not None and k >= self.length):
            return None
        return k

    def points(self, limit: Optional[int] = None) -> List[IntVec]:
        n = self.length if self.length is not None else limit
        if n is None:
            raise InputError("an infinite line needs a range limit")
        if limit is not None:
            n = min(n, limit)
        return [self.point(t) for t in range(n)]


def line_geometry(js: JumpStructure, c: Sequence[int]) -> LineGeometry:
    c = as_intvec(c)
    if len(c) != js.dim or not nonneg(c):
        raise InputError("the line representative must be a non-negative state")
    star = omega_star(js)
    step = tuple(a // coord_gcd(star) for a in star)
    lo, hi = -math.inf, math.inf
    for ck, pk in zip(c, step):
        if pk > 0:
            lo = max(lo, -(ck // pk))
        elif pk < 0:
            hi = min(hi, ck // (-pk))
    lo = int(lo)
    base = vadd(c, vscale(lo, step))
    length = None if hi == math.inf else int(hi) - lo + 1
    return LineGeometry(c, step, base, length, -lo)


def line_points(js: JumpStructure, c: Sequence[int], range_limit: Optional[int] = None) -> List[IntVec]:
    """Points of the line in increasing order, truncated at ``range_limit`` when infinite."""
    g = line_geometry(js, c)
    if g.length is None and range_limit is None:
        raise InputError("an infinite line needs a range limit")
    return g.points(range_limit)


def first_hit(g: LineGeometry, A: Optional[Antichain]) -> Optional[int]:
    """Smallest line index inside the upward closure of ``A`` (monotone lines only)."""
    if A is None:
        return None
    best = None
    for a in A:
        t = 0
        ok = True
        for bk, pk, ak in zip(g.base, g.step, a):
            if pk == 0:
                if bk < ak:
                    ok = False
                    break
            else:
                t = max(t, -((bk - ak) // pk))
        if ok and (best is None or t < best):
            best = t
    return best


@dataclass(frozen=True)
class LineComponent:
    """A non-singleton class on the line.

    Infinite components are ``start + n * stride`` for ``n >= 0``; finite
    ones list their ``members``.
    """

    k: int
    tag: str
    start: IntVec
    stride: IntVec
    members: Optional[Tuple[IntVec, ...]] = None

    def contains(self, x: Sequence[int]) -> bool:
        x = as_intvec(x)
        if self.members is not None:
            return x in self.members
        if x == self.start:
            return True
        n = int_ratio(tuple(a - b for a, b in zip(x, self.start)), self.stride)
        return n is not None and n >= 0

    def first(self, n: int) -> List[IntVec]:
        if self.members is not None:
            return list(self.members[:n])
        return [vadd(self.start, vscale(j, self.stride)) for j in range(n)]

    def to_dict(self) -> dict:
        d = {"k": self.k, "tag": self.tag, "start": list(self.start), "stride": list(self.stride)}
        d["members"] = None if self.members is None else [list(m) for m in self.members]
        return d


@dataclass(frozen=True)
class LineClassification:
    c: IntVec
    omega_star: IntVec
    omega_star_star: int
    regime: str  # "monotone" or "finite"
    geometry: LineGeometry
    thresholds: Dict[str, Optional[IntVec]]
    neutral: Tuple[IntVec, ...]
    trapping: Tuple[IntVec, ...]
    escaping: Tuple[IntVec, ...]
    tail: Optional[Tuple[str, IntVec]]  # label of every point from the given one onward
    components: Tuple[LineComponent, ...]
    sigma_plus: Tuple[int, ...]
    sigma_minus: Tuple[int, ...]
    closure_core: Tuple[IntVec, ...] = ()
    b_threshold: Optional[IntVec] = None
    notes: str = ""

    def residue(self, x: Sequence[int]) -> int:
        t = self.geometry.index(x)
        if t is None:
            raise InputError(f"{tuple(x)} is not on this line")
        return 1 + (t - self.geometry.c_index) % self.omega_star_star

    def label(self, x: Sequence[int]) -> str:
        x = as_intvec(x)
        if self.geometry.index(x) is None:
            raise InputError(f"{x} is not on this line")
        if x in self.neutral:
            return "Neutral"
        if x in self.trapping:
            return "Trapping"
        if x in self.escaping:
            return "Escaping"
        for comp in self.components:
            if comp.contains(x):
                return comp.tag
        if self.tail is not None:
            t0 = self.geometry.index(self.tail[1])
            if self.geometry.index(x) >= t0:
                return self.tail[0]
        raise AssertionError(f"{x} not covered by the line classification")

    def component_of(self, x: Sequence[int]) -> Optional[LineComponent]:
        for comp in self.components:
            if comp.contains(x):
                return comp
        return None

    def to_dict(self) -> dict:
        pts = lambda seq: [list(p) for p in seq]
        return {
            "c": list(self.c),
            "omega_star": list(self.omega_star),
            "omega_star_star": self.omega_star_star,
            "regime": self.regime,
            "lowest_point": list(self.geometry.base),
            "step": list(self.geometry.step),
            "length": self.geometry.length,
            "thresholds": {k: (None if v is None else list(v)) for k, v in self.thresholds.items()},
            "neutral": pts(self.neutral),
            "trapping": pts(self.trapping),
            "escaping": pts(self.escaping),
            "tail": None if self.tail is None else {"label": self.tail[0], "from": list(self.tail[1])},
            "components": [comp.to_dict() for comp in self.components],
            "sigma_plus": list(self.sigma_plus),
            "sigma_minus": list(self.sigma_minus),
            "closure_core": pts(self.closure_core),
            "b_threshold": None if self.b_threshold is None else list(self.b_threshold),
            "notes": self.notes,
        }


def _core_mask(js: JumpStructure, pts: np.ndarray, gens) -> np.ndarray:
    from .lattice import up_closure_mask

    def cl(key):
        return up_closure_mask(pts, gens[key]) if key in gens else np.zeros(len(pts), bool)

    return (cl("I+") & cl("O-")) | (cl("I-") & cl("O+"))


def classify_line(js: JumpStructure, c: Sequence[int]) -> LineClassification:
    """Classify every state of the invariant line through ``c``."""
    star = omega_star(js)
    gstar = coord_gcd(star)
    g = line_geometry(js, c)
    axis = check_a2(js).a2_coordinate
    if g.length is None:
        return _classify_monotone(js, g, star, gstar, axis)
    return _classify_finite(js, g, star, gstar, axis)


def _classify_monotone(js, g: LineGeometry, star, gstar, axis) -> LineClassification:
    gens = closure_generators(js, axis if axis is not None else 0)
    s_i = first_hit(g, gens.get("I"))
    s_ip = first_hit(g, gens.get("I+")) if axis is not None else None
    s_o = first_hit(g, gens.get("O"))
    s_om = first_hit(g, gens.get("O-")) if axis is not None else None
    run = lambda a, b: tuple(g.point(t) for t in range(a, b))
    everything = tuple(range(1, gstar + 1))

    def result(neutral, trapping, escaping, tail, comps=(), plus=(), c_lo=None, notes=""):
        minus = tuple(k for k in everything if k not in plus)
        return LineClassification(
            g.c, star, gstar, "monotone", g, _thr(g, s_i, s_ip, s_o, s_om, c_lo),
            neutral, trapping, escaping, tail, tuple(comps), tuple(plus), minus,
            b_threshold=(0,) * js.dim, notes=notes,
        )

    if s_i is None:
        if s_o is None:
            return result((), (), (), ("Neutral", g.base), notes="the line meets no input or output closure")
        return result(run(0, s_o), (), (), ("Trapping", g.point(s_o)),
                      notes="no jump is active on this line")
    n_end = s_i if s_o is None else min(s_i, s_o)
    neutral = run(0, n_end)
    trapping = run(s_o, s_i) if s_o is not None and s_o < s_i else ()
    if s_ip is None or s_om is None:
        return result(neutral, trapping, (), ("Escaping", g.point(s_i)),
                      notes="jumps of only one sign act on this line, so active states escape")
    c_lo = max(s_ip, s_om)
    escaping = run(s_i, c_lo)
    plus = sorted({1 + (t - g.c_index) % gstar for t in range(s_o, s_i)}) if s_o < s_i else []
    comps = []
    for k in everything:
        r = g.c_index + (k - 1)
        t0 = r + gstar * (-((r - c_lo) // gstar))
        comps.append(
            LineComponent(k, "QIC" if k in plus else "PIC", g.point(t0), vscale(gstar, g.step))
        )
    return result(neutral, trapping, escaping, None, comps, tuple(plus), c_lo)


def _thr(g, s_i, s_ip, s_o, s_om, c_lo) -> Dict[str, Optional[IntVec]]:
    p = lambda t: None if t is None else g.point(t)
    return {
        "first_input": p(s_i),
        "first_positive_input": p(s_ip),
        "first_output": p(s_o),
        "first_negative_output": p(s_om),
        "cycle_start": p(c_lo),
    }


def _classify_finite(js, g: LineGeometry, star, gstar, axis) -> LineClassification:
    pts = g.points()
    arr = np.asarray(pts, dtype=np.int64).reshape(len(pts), js.dim)
    v = explicit_reachability(js, arr)
    order = [v.graph.space.index_of(p) for p in pts]
    gens = closure_generators(js, axis if axis is not None else 0)
    neutral, trapping, escaping = [], [], []
    comp_members: Dict[int, List[IntVec]] = {}
    for t, (p, idx) in enumerate(zip(pts, order)):
        lab = v.labels[idx]
        if lab == NEUTRAL:
            neutral.append(p)
        elif lab == TRAPPING:
            trapping.append(p)
        elif lab == ESCAPING:
            escaping.append(p)
        else:
            comp_members.setdefault(int(v.class_of[idx]), []).append(p)
    comps = []
    plus = set()
    for cid in sorted(comp_members, key=lambda i: comp_members[i][0]):
        cl = v.classes[cid]
        members = tuple(comp_members[cid])
        ks = {1 + (g.index(m) - g.c_index) % gstar for m in members}
        assert len(ks) == 1, "class mixes residues"
        k = ks.pop()
        tag = "PIC" if cl.status == "closed" else "QIC"
        if tag == "QIC":
            plus.add(k)
        comps.append(LineComponent(k, tag, members[0], vscale(gstar, g.step), members))

    def first(key):
        if key not in gens:
            return None
        for p in pts:
            if in_up_closure(p, gens[key]):
                return p
        return None

    core = tuple(p for p, m in zip(pts, _core_mask(js, arr, gens)) if m)
    thresholds = {
        "first_input": first("I"),
        "first_positive_input": first("I+"),
        "first_output": first("O"),
        "first_negative_output": first("O-"),
        "cycle_start": core[0] if core else None,
    }
    b = b_threshold(js)
    above = all(ci >= bi for ci, bi in zip(g.base, b))
    return LineClassification(
        g.c, star, gstar, "finite", g, thresholds,
        tuple(neutral), tuple(trapping), tuple(escaping), None, tuple(comps),
        tuple(sorted(plus)), tuple(k for k in range(1, gstar + 1) if k not in plus),
        closure_core=core,
        b_threshold=b,
        notes="finite line classified by exhaustive enumeration"
        + ("" if above else "; line lies below the interval-structure offset"),
    )


def gamma_component(js: JumpStructure, c: Sequence[int], k: int) -> LineComponent:
    """The non-singleton class of residue ``k`` (1-based) on the line through ``c``."""
    lc = classify_line(js, c)
    if not 1 <= k <= lc.omega_star_star:
        raise InputError(f"residue index must lie in 1..{lc.omega_star_star}")
    for comp in lc.components:
        if comp.k == k:
            return comp
    raise NotApplicableError(f"no non-singleton class with residue {k} on this line")
