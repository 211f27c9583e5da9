"""Brute-force reachability on finite pieces of the lattice.

Everything here is ground truth for a finite box (or an explicit, usually
invariant, set of states).  Verdicts about the infinite chain are only drawn
where the box argument is sound: a forward set that never leaves the box is
exact, and a "no path" answer is certified by exhibiting a jump-closed set
that contains the start and misses the target.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np
from scipy.sparse import csr_matrix
from scipy.sparse.csgraph import breadth_first_order, connected_components

from .exceptions import BudgetExceededError, InputError
from .lattice import IntVec, IntegerLattice, as_intvec, nonneg, up_closure_mask, vadd
from .network import JumpStructure

DEFAULT_BUDGET = 5_000_000
CONE_VOLUME_LIMIT = 2_000_000

NEUTRAL, TRAPPING, ESCAPING, CYCLE = 0, 1, 2, 3
LABEL_NAMES = {NEUTRAL: "Neutral", TRAPPING: "Trapping", ESCAPING: "Escaping", CYCLE: "Cycle"}


@dataclass(frozen=True)
class Window:
    """Reported region ``[lower, upper]``; the graph is built on ``[lower, upper + margin]``."""

    lower: IntVec
    upper: IntVec
    margin: int = 0

    def __post_init__(self):
        lo, hi = as_intvec(self.lower), as_intvec(self.upper)
        if len(lo) != len(hi):
            raise InputError("window bounds have different dimensions")
        if not nonneg(lo) or any(a > b for a, b in zip(lo, hi)):
            raise InputError("window needs 0 <= lower <= upper")
        if self.margin < 0:
            raise InputError("margin must be non-negative")
        object.__setattr__(self, "lower", lo)
        object.__setattr__(self, "upper", hi)

    @property
    def box_upper(self) -> IntVec:
        return tuple(u + self.margin for u in self.upper)

    @property
    def volume(self) -> int:
        return math.prod(u - l + 1 for l, u in zip(self.lower, self.box_upper))

    def to_dict(self) -> dict:
        return {"lower": list(self.lower), "upper": list(self.upper), "margin": self.margin}


class StateSpace:
    """A finite set of lattice states with vectorised index lookup.

    States are kept in lexicographic order, so index order is a stable,
    deterministic order on states.
    """

    def __init__(self, states: np.ndarray):
        S = np.unique(np.asarray(states, dtype=np.int64).reshape(len(states), -1), axis=0)
        if S.shape[0] == 0:
            raise InputError("empty state set")
        self.states = S
        self.lo = S.min(axis=0)
        self.extent = S.max(axis=0) - self.lo + 1
        # last coordinate fastest, so keys increase with lexicographic order
        self.strides = np.ones(S.shape[1], dtype=np.int64)
        for k in range(S.shape[1] - 2, -1, -1):
            self.strides[k] = self.strides[k + 1] * self.extent[k + 1]
        self.keys = (S - self.lo) @ self.strides
        self._dense = bool(len(self.keys) == int(np.prod(self.extent)))

    @classmethod
    def box(cls, lower: Sequence[int], upper: Sequence[int]) -> "StateSpace":
        axes = [np.arange(l, u + 1, dtype=np.int64) for l, u in zip(lower, upper)]
        grid = np.stack(np.meshgrid(*axes, indexing="ij"), axis=-1).reshape(-1, len(axes))
        return cls(grid)

    def __len__(self):
        return self.states.shape[0]

    @property
    def dim(self) -> int:
        return self.states.shape[1]

    def index(self, X: np.ndarray) -> np.ndarray:
        """Index of each row of ``X`` in the space, ``-1`` when absent."""
        X = np.asarray(X, dtype=np.int64).reshape(-1, self.dim)
        Y = X - self.lo
        inside = np.all((Y >= 0) & (Y < self.extent), axis=1)
        keys = Y @ self.strides
        out = np.full(X.shape[0], -1, dtype=np.int64)
        if self._dense:
            out[inside] = keys[inside]
            return out
        pos = np.searchsorted(self.keys, keys[inside])
        pos = np.minimum(pos, len(self.keys) - 1)
        hit = self.keys[pos] == keys[inside]
        idx = np.flatnonzero(inside)
        out[idx[hit]] = pos[hit]
        return out

    def index_of(self, x: Sequence[int]) -> int:
        return int(self.index(np.asarray([x]))[0])


class TransitionGraph:
    """Directed jump graph on a :class:`StateSpace`.

    Edges leaving the space are not stored; their sources are marked in
    ``escape``.
    """

    def __init__(self, js: JumpStructure, space: StateSpace):
        if space.dim != js.dim:
            raise InputError("state dimension does not match the jump structure")
        self.js = js
        self.space = space
        S = space.states
        n = len(space)
        src, dst = [], []
        self.escape = np.zeros(n, dtype=bool)
        self.active_any = np.zeros(n, dtype=bool)
        self.has_pred = np.zeros(n, dtype=bool)
        for w, I in js.jumps:
            wv = np.asarray(w, dtype=np.int64)
            act = up_closure_mask(S, I) & np.all(S + wv >= 0, axis=1)
            self.active_any |= act
            ai = np.flatnonzero(act)
            tgt = space.index(S[ai] + wv)
            ok = tgt >= 0
            src.append(ai[ok])
            dst.append(tgt[ok])
            self.escape[ai[~ok]] = True
            P = S - wv
            self.has_pred |= np.all(P >= 0, axis=1) & up_closure_mask(P, I)
        src = np.concatenate(src) if src else np.zeros(0, np.int64)
        dst = np.concatenate(dst) if dst else np.zeros(0, np.int64)
        self.adj = csr_matrix(
            (np.ones(len(src), dtype=np.int8), (src, dst)), shape=(n, n)
        )

    def __len__(self):
        return len(self.space)

    def strong_components(self) -> np.ndarray:
        """SCC labels, numbered by the first (lexicographically smallest) member."""
        _, lab = connected_components(self.adj, directed=True, connection="strong")
        first = np.full(lab.max() + 1, len(lab), dtype=np.int64)
        np.minimum.at(first, lab, np.arange(len(lab)))
        order = np.argsort(first)
        rank = np.empty_like(order)
        rank[order] = np.arange(len(order))
        return rank[lab]

    def reaches_escape(self) -> np.ndarray:
        """States from which some path leaves the space."""
        n = len(self)
        rev = self.adj.T.tocsr()
        sources = np.flatnonzero(self.escape)
        out = np.zeros(n, dtype=bool)
        if sources.size == 0:
            return out
        # super-node n points at every escape source in the reversed graph
        extra = csr_matrix(
            (np.ones(len(sources), dtype=np.int8), (np.full(len(sources), n), sources)),
            shape=(n + 1, n + 1),
        )
        big = rev.copy()
        big.resize((n + 1, n + 1))
        big = (big + extra).tocsr()
        seen = breadth_first_order(big, n, directed=True, return_predecessors=False)
        out[seen[seen < n]] = True
        return out


@dataclass
class CycleClass:
    """A non-singleton strongly connected component of the explored graph."""

    id: int
    members: np.ndarray
    exits_in_space: bool
    boundary_unstable: bool
    reaches_escape: bool
    open_certain: bool

    @property
    def size(self) -> int:
        return int(len(self.members))

    @property
    def closed_certain(self) -> bool:
        return not self.reaches_escape and not self.exits_in_space

    @property
    def status(self) -> str:
        if self.closed_certain:
            return "closed"
        if self.open_certain:
            return "open"
        return "unknown"


@dataclass
class OracleVerdict:
    """Per-state classes on an explored state set.

    ``labels`` holds one of NEUTRAL / TRAPPING / ESCAPING / CYCLE per state,
    ``class_of`` the CycleClass id (``-1`` otherwise), and ``reported`` masks
    the states the verdict is meant for (the inner window).
    ``escaping_certain`` marks escaping states whose singleton class is
    guaranteed in the infinite chain too.
    """

    graph: TransitionGraph
    labels: np.ndarray
    class_of: np.ndarray
    classes: List[CycleClass]
    reported: np.ndarray
    escaping_certain: np.ndarray
    window: Optional[Window] = None

    @property
    def states(self) -> np.ndarray:
        return self.graph.space.states

    def index_of(self, x: Sequence[int]) -> int:
        i = self.graph.space.index_of(x)
        if i < 0:
            raise KeyError(tuple(x))
        return i

    def label(self, x: Sequence[int]):
        i = self.index_of(x)
        lab = int(self.labels[i])
        if lab == CYCLE:
            return ("Cycle", int(self.class_of[i]))
        return LABEL_NAMES[lab]

    def states_with(self, label: int, reported_only: bool = True) -> List[IntVec]:
        mask = self.labels == label
        if reported_only:
            mask &= self.reported
        return [tuple(int(c) for c in r) for r in self.states[mask]]

    def class_members(self, cid: int, reported_only: bool = False) -> List[IntVec]:
        m = self.classes[cid].members
        if reported_only:
            m = m[self.reported[m]]
        return [tuple(int(c) for c in self.states[i]) for i in m]

    def reported_classes(self) -> List[CycleClass]:
        return [c for c in self.classes if self.reported[c.members].any()]


def _build_verdict(graph: TransitionGraph, reported: np.ndarray, window=None) -> OracleVerdict:
    n = len(graph)
    comp = graph.strong_components()
    sizes = np.bincount(comp)
    labels = np.full(n, ESCAPING, dtype=np.int8)
    labels[~graph.active_any & ~graph.has_pred] = NEUTRAL
    labels[~graph.active_any & graph.has_pred] = TRAPPING
    in_cycle = sizes[comp] >= 2
    labels[in_cycle] = CYCLE
    reach = graph.reaches_escape()

    coo = graph.adj.tocoo()
    exit_edge = comp[coo.row] != comp[coo.col]
    # an exit edge into a state whose whole forward set is explored cannot come back
    sure_exit = exit_edge & ~reach[coo.col]
    exits = np.zeros(len(sizes), dtype=bool)
    exits[comp[coo.row[exit_edge]]] = True
    sure = np.zeros(len(sizes), dtype=bool)
    sure[comp[coo.row[sure_exit]]] = True
    esc = np.zeros(len(sizes), dtype=bool)
    esc[comp[graph.escape]] = True
    reach_c = np.zeros(len(sizes), dtype=bool)
    reach_c[comp[reach]] = True

    cyc_ids = np.flatnonzero(sizes >= 2)
    new_id = np.full(len(sizes), -1, dtype=np.int64)
    new_id[cyc_ids] = np.arange(len(cyc_ids))
    order = np.argsort(comp, kind="stable")
    bounds = np.searchsorted(comp[order], cyc_ids)
    classes = []
    for k, c in enumerate(cyc_ids):
        members = order[bounds[k]: bounds[k] + sizes[c]]
        classes.append(
            CycleClass(
                id=k,
                members=np.sort(members),
                exits_in_space=bool(exits[c]),
                boundary_unstable=bool(esc[c]),
                reaches_escape=bool(reach_c[c]),
                open_certain=bool(sure[c]),
            )
        )
    class_of = np.where(in_cycle, new_id[comp], -1)
    escaping_certain = (labels == ESCAPING) & (~graph.has_pred | ~reach)
    return OracleVerdict(graph, labels, class_of, classes, reported, escaping_certain, window)


def _check_budget(volume: int, budget: Optional[int]):
    budget = DEFAULT_BUDGET if budget is None else budget
    if volume > budget:
        raise BudgetExceededError(volume, budget)


def window_reachability(js: JumpStructure, w: Window, budget: Optional[int] = None) -> OracleVerdict:
    """Classify every state of ``w`` from the jump graph on its exploration box."""
    if len(w.lower) != js.dim:
        raise InputError("window dimension does not match the jump structure")
    _check_budget(w.volume, budget)
    space = StateSpace.box(w.lower, w.box_upper)
    graph = TransitionGraph(js, space)
    S = space.states
    reported = np.all(S <= np.asarray(w.upper), axis=1)
    return _build_verdict(graph, reported, w)


def explicit_reachability(
    js: JumpStructure, states: np.ndarray, budget: Optional[int] = None
) -> OracleVerdict:
    """Same as :func:`window_reachability` on an explicit state set (all reported)."""
    _check_budget(len(states), budget)
    space = StateSpace(states)
    graph = TransitionGraph(js, space)
    return _build_verdict(graph, np.ones(len(space), dtype=bool))


def level_set(nu: Sequence[int], level: int) -> np.ndarray:
    """All ``x >= 0`` with ``nu . x == level`` (``nu`` strictly positive)."""
    nu = [int(v) for v in nu]
    if any(v <= 0 for v in nu):
        raise InputError("level sets need a strictly positive vector")
    out: List[Tuple[int, ...]] = []

    def rec(k, rest, prefix):
        if k == len(nu) - 1:
            if rest % nu[k] == 0:
                out.append(prefix + (rest // nu[k],))
            return
        for v in range(rest // nu[k] + 1):
            rec(k + 1, rest - v * nu[k], prefix + (v,))

    rec(0, level, ())
    return np.asarray(out, dtype=np.int64).reshape(len(out), len(nu))


def active_jumps(js: JumpStructure, x: Sequence[int]) -> List[IntVec]:
    x = as_intvec(x)
    if not nonneg(x):
        raise InputError("states must be non-negative")
    return [w for w in js.omegas if js.is_active(w, x)]


def coprime_cycle(m1: int, m2: int) -> List[int]:
    """Explicit cycle with jumps ``+m2`` and ``-m1`` through every residue mod ``m2``.

    Starting at 0, for ``j = 1..m2`` climb by ``+m2`` to the peak
    ``ceil(j*m1/m2)*m2 - (j-1)*m1`` and then take one ``-m1`` step.  The list
    holds every visited state and ends back at 0.
    """
    if m1 < 1 or m2 < 1:
        raise InputError("coprime_cycle needs positive integers")
    if math.gcd(m1, m2) != 1:
        raise InputError(f"{m1} and {m2} are not coprime")
    path = [0]
    v = 0
    for j in range(1, m2 + 1):
        peak = -(-j * m1 // m2) * m2 - (j - 1) * m1
        while v < peak:
            v += m2
            path.append(v)
        v -= m1
        path.append(v)
    return path


# --------------------------------------------------------------------------
# path queries

YES, NO_CERTIFIED, NO_WITHIN_BUDGET, UNKNOWN = "Yes", "No-with-certificate", "No-within-budget", "Unknown"


@dataclass
class PathResult:
    status: str
    path: Optional[List[IntVec]] = None
    certificate: Optional[str] = None
    explored: int = 0

    def __bool__(self):
        return self.status == YES


def auto_box(js: JumpStructure, *points: Sequence[int], pad: int = 10) -> IntVec:
    """Upper corner of the default search box (lower corner is 0)."""
    big = max(abs(c) for w in js.omegas for c in w)
    top = [0] * js.dim
    for p in list(points) + js.input_points():
        top = [max(a, b) for a, b in zip(top, p)]
    return tuple(t + pad * big for t in top)


def _bfs(graph: TransitionGraph, s: int, t: int, max_steps: Optional[int]):
    n = len(graph)
    parent = np.full(n, -2, dtype=np.int64)
    parent[s] = -1
    frontier = np.asarray([s], dtype=np.int64)
    depth = 0
    while frontier.size and (max_steps is None or depth < max_steps) and parent[t] == -2:
        sub = graph.adj[frontier].tocoo()
        cand, par = sub.col.astype(np.int64), frontier[sub.row]
        fresh = parent[cand] == -2
        cand, par = cand[fresh], par[fresh]
        cand, first = np.unique(cand, return_index=True)
        parent[cand] = par[first]
        frontier = cand
        depth += 1
    return parent, frontier.size == 0


def _cone_certificate(graph: TransitionGraph, reached: np.ndarray, origin: Sequence[int]) -> bool:
    """Try to extend the reached set by upward cones to a jump-closed set.

    A cone is ``{x : x_k = a_k off S, x_k >= a_k on S}`` for a subset S of
    the coordinates.  Cones are only used where the box shows every state of
    the cone (on the lattice coset of ``origin``) as reached, so the target,
    which lies in the box and was not reached, is never covered.
    """
    js, space = graph.js, graph.space
    d = js.dim
    lo = space.lo
    shape = tuple(int(e) for e in space.extent)
    if len(space) > CONE_VOLUME_LIMIT or not space._dense:
        return False
    lat = IntegerLattice(js.omegas, d)
    off = ~lat.contains_rows(space.states - np.asarray(origin, dtype=np.int64))
    base = (reached | off).reshape(shape)
    subsets = [
        S for r in range(1, d + 1) for S in itertools.combinations(range(d), r)
    ] if d <= 5 else [tuple(range(d))]
    subsets = [()] + subsets
    grids: Dict[Tuple[int, ...], np.ndarray] = {}
    for S in subsets:
        g = base
        for k in S:
            g = np.flip(np.logical_and.accumulate(np.flip(g, axis=k), axis=k), axis=k)
        grids[S] = g
    upper = lo + np.asarray(shape) - 1

    def cone_ok(Y: np.ndarray, S: Tuple[int, ...]) -> np.ndarray:
        ok = np.zeros(Y.shape[0], dtype=bool)
        for S2 in subsets:
            if not set(S) <= set(S2):
                continue
            fixed = [k for k in range(d) if k not in S2]
            inside = np.all(Y[:, fixed] <= upper[fixed], axis=1) & np.all(Y >= lo, axis=1)
            C = np.minimum(Y, upper)
            idx = tuple((C - lo).T)
            hit = np.zeros(Y.shape[0], dtype=bool)
            if inside.any():
                sel = tuple(a[inside] for a in idx)
                hit[inside] = grids[S2][sel]
            ok |= hit
        return ok

    # successors of reached states that leave the box
    S_all = space.states
    for w, I in js.jumps:
        wv = np.asarray(w, dtype=np.int64)
        R = S_all[reached & up_closure_mask(S_all, I) & np.all(S_all + wv >= 0, axis=1)]
        Y = R + wv
        outside = ~np.all(Y <= upper, axis=1)
        if outside.any() and not cone_ok(Y[outside], ()).all():
            return False
    # every minimal cone must map into the union under every active jump
    for S in subsets[1:]:
        g = grids[S]
        minimal = g.copy()
        for k in S:
            sl = [slice(None)] * d
            sl[k] = slice(1, None)
            prev = [slice(None)] * d
            prev[k] = slice(None, -1)
            minimal[tuple(sl)] &= ~g[tuple(prev)]
        A = np.argwhere(minimal) + lo
        if A.size == 0:
            continue
        fixed = [k for k in range(d) if k not in S]
        Sl = list(S)
        for w, I in js.jumps:
            wv = np.asarray(w, dtype=np.int64)
            for i in I:
                iv = np.asarray(i, dtype=np.int64)
                live = np.all(A[:, fixed] >= iv[fixed], axis=1)
                if not live.any():
                    continue
                M = A[live].copy()
                M[:, Sl] = np.maximum(M[:, Sl], iv[Sl])
                if not cone_ok(M + wv, S).all():
                    return False
    return True


def _path_from(graph: TransitionGraph, parent: np.ndarray, t: int) -> List[IntVec]:
    seq = []
    v = t
    while v != -1:
        seq.append(tuple(int(c) for c in graph.space.states[v]))
        v = int(parent[v])
    return seq[::-1]


def _sparse_search(js, x, y, step_budget, upper, cap, allow_unknown) -> PathResult:
    """Frontier search keeping only visited states; used when the box is too big to enumerate."""
    up = np.asarray(upper, dtype=np.int64)
    parent: Dict[IntVec, Optional[IntVec]] = {x: None}
    frontier = np.asarray([x], dtype=np.int64)
    left_box = False
    depth = 0
    while frontier.size and (step_budget is None or depth < step_budget):
        nxt = []
        for w, I in js.jumps:
            wv = np.asarray(w, dtype=np.int64)
            F = frontier[up_closure_mask(frontier, I) & np.all(frontier + wv >= 0, axis=1)]
            if F.size == 0:
                continue
            Y = F + wv
            inside = np.all(Y <= up, axis=1)
            left_box |= bool((~inside).any())
            for src, dst in zip(F[inside].tolist(), Y[inside].tolist()):
                dst = tuple(dst)
                if dst not in parent:
                    parent[dst] = tuple(src)
                    nxt.append(dst)
        if y in parent:
            seq = [y]
            while parent[seq[-1]] is not None:
                seq.append(parent[seq[-1]])
            return PathResult(YES, path=seq[::-1], explored=len(parent))
        if len(parent) > cap:
            raise BudgetExceededError(len(parent), cap)
        frontier = np.asarray(nxt, dtype=np.int64).reshape(len(nxt), js.dim)
        depth += 1
    n = len(parent)
    if frontier.size == 0 and not left_box:
        return PathResult(NO_CERTIFIED, certificate=f"forward set closed with {n} states", explored=n)
    return PathResult(UNKNOWN if allow_unknown else NO_WITHIN_BUDGET, explored=n)


def _search(js, x, y, step_budget, box_upper, budget, allow_unknown: bool) -> PathResult:
    x, y = as_intvec(x), as_intvec(y)
    if not (nonneg(x) and nonneg(y)):
        raise InputError("states must be non-negative")
    lattice = IntegerLattice(js.omegas, js.dim)
    if tuple(a - b for a, b in zip(y, x)) not in lattice:
        return PathResult(NO_CERTIFIED, certificate="target lies in a different coset of the jump lattice")
    if x == y:
        return PathResult(YES, path=[x])
    upper = box_upper if box_upper is not None else auto_box(js, x, y)
    upper = tuple(max(u, a, b) for u, a, b in zip(upper, x, y))
    vol = math.prod(u + 1 for u in upper)
    cap = DEFAULT_BUDGET if budget is None else budget
    if vol > cap:
        return _sparse_search(js, x, y, step_budget, upper, cap, allow_unknown)
    space = StateSpace.box((0,) * js.dim, upper)
    graph = TransitionGraph(js, space)
    s, t = space.index_of(x), space.index_of(y)
    parent, exhausted = _bfs(graph, s, t, step_budget)
    reached = parent != -2
    if reached[t]:
        return PathResult(YES, path=_path_from(graph, parent, t), explored=int(reached.sum()))
    n = int(reached.sum())
    if exhausted and not graph.escape[reached].any():
        return PathResult(NO_CERTIFIED, certificate=f"forward set closed with {n} states", explored=n)
    if exhausted and _cone_certificate(graph, reached, x):
        return PathResult(
            NO_CERTIFIED,
            certificate=f"reached set of {n} box states plus upward cones is jump-closed",
            explored=n,
        )
    return PathResult(UNKNOWN if allow_unknown else NO_WITHIN_BUDGET, explored=n)


def is_path(
    js: JumpStructure,
    x: Sequence[int],
    y: Sequence[int],
    step_budget: Optional[int] = None,
    box_upper: Optional[Sequence[int]] = None,
    budget: Optional[int] = None,
) -> PathResult:
    """Search for a path from ``x`` to ``y`` inside a box anchored at the origin."""
    return _search(js, x, y, step_budget, box_upper, budget, allow_unknown=False)


def self_reachable(
    js: JumpStructure,
    x: Sequence[int],
    w: Sequence[int],
    step_budget: Optional[int] = None,
    box_upper: Optional[Sequence[int]] = None,
    budget: Optional[int] = None,
) -> PathResult:
    """Decide whether ``x + w`` leads back to ``x``."""
    x, w = as_intvec(x), as_intvec(w)
    if w not in js.omegas or not js.is_active(w, x):
        raise InputError(f"jump {w} is not active at {x}")
    return _search(js, vadd(x, w), x, step_budget, box_upper, budget, allow_unknown=True)
