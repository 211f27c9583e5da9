"""Structural equivalence: identical reachability relations on the lattice.

:func:`check_equivalence_theorem` applies a sufficient criterion that merges
jumps which are multiples of a kept jump.  :func:`check_equivalence_window`
compares the two reachability relations on a finite box and either finds a
certified witness pair or reports agreement on that window.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional, Tuple

import numpy as np
from scipy.sparse.csgraph import breadth_first_order

from .exceptions import InputError
from .lattice import IntVec, in_up_closure, int_ratio, nonneg, vadd, vscale
from .network import JumpStructure
from .oracle import (
    NO_CERTIFIED, StateSpace, TransitionGraph, Window, _check_budget, is_path,
)

EQUIVALENT_BY_THEOREM = "EquivalentByTheorem"
EQUIVALENT_ON_WINDOW = "EquivalentOnWindow"
INEQUIVALENT = "InequivalentWithWitness"
UNKNOWN = "Unknown"
MAX_WITNESS_TRIALS = 50


@dataclass(frozen=True)
class EquivalenceVerdict:
    status: str
    direction: Optional[str] = None
    witness: Optional[Tuple[IntVec, IntVec]] = None
    detail: str = ""

    def to_dict(self) -> dict:
        return {
            "status": self.status,
            "direction": self.direction,
            "witness": None if self.witness is None else [list(self.witness[0]), list(self.witness[1])],
            "detail": self.detail,
        }


def _merge_criterion(big: JumpStructure, small: JumpStructure) -> Tuple[bool, str]:
    """Can every jump of ``big`` be replaced by repeated jumps of ``small``?"""
    small_map = small.as_dict()
    if not set(small_map) <= set(big.omegas):
        return False, "jump set is not contained in the other"
    for w, I in big.jumps:
        if w in small_map:
            if small_map[w] != I:
                return False, f"minimal sets of jump {list(w)} differ"
            continue
        divisors = sorted(
            (k, v) for v in small_map
            for k in [int_ratio(w, v)] if k is not None and k >= 2
        )
        found = False
        for k, v in divisors:
            if all(
                nonneg(vadd(i, vscale(j, v))) and in_up_closure(vadd(i, vscale(j, v)), small_map[v])
                for i in I for j in range(k)
            ):
                found = True
                break
        if not found:
            return False, f"jump {list(w)} has no divisor that stays active along its steps"
    return True, ""


def check_equivalence_theorem(js: JumpStructure, js_tilde: JumpStructure) -> EquivalenceVerdict:
    """Sufficient test, tried in both orientations; ``Unknown`` when it does not apply."""
    if js.dim != js_tilde.dim:
        raise InputError("structures have different dimensions")
    ok, why1 = _merge_criterion(js, js_tilde)
    if ok:
        return EquivalenceVerdict(EQUIVALENT_BY_THEOREM, "second jump set inside first")
    ok, why2 = _merge_criterion(js_tilde, js)
    if ok:
        return EquivalenceVerdict(EQUIVALENT_BY_THEOREM, "first jump set inside second")
    return EquivalenceVerdict(UNKNOWN, None, None, f"first inside second: {why2}; second inside first: {why1}")


def reachability_matrix(js: JumpStructure, w: Window, budget: Optional[int] = None):
    """Box-restricted reachability among the reported states of ``w``.

    Returns ``(states, R, closed)``: ``R[a, b]`` is True when a path from
    state ``a`` to state ``b`` stays inside the exploration box, and
    ``closed[a]`` says whether the forward set of ``a`` never leaves the box.
    """
    _check_budget(w.volume, budget)
    space = StateSpace.box(w.lower, w.box_upper)
    g = TransitionGraph(js, space)
    reach_esc = g.reaches_escape()
    rep = np.flatnonzero(np.all(space.states <= np.asarray(w.upper), axis=1))
    pos = np.full(len(space), -1, dtype=np.int64)
    pos[rep] = np.arange(len(rep))
    R = np.zeros((len(rep), len(rep)), dtype=bool)
    for a, s in enumerate(rep):
        seen = breadth_first_order(g.adj, int(s), directed=True, return_predecessors=False)
        p = pos[seen]
        R[a, p[p >= 0]] = True
    return space.states[rep], R, ~reach_esc[rep]


def check_equivalence_window(
    js: JumpStructure, js_tilde: JumpStructure, w: Window, budget: Optional[int] = None
) -> EquivalenceVerdict:
    """Compare reachability on a window; witnesses are certified before being reported."""
    if js.dim != js_tilde.dim:
        raise InputError("structures have different dimensions")
    states, R1, closed1 = reachability_matrix(js, w, budget)
    _, R2, closed2 = reachability_matrix(js_tilde, w, budget)
    diff = np.argwhere(R1 != R2)
    for a, b in diff[:MAX_WITNESS_TRIALS]:
        x = tuple(int(c) for c in states[a])
        y = tuple(int(c) for c in states[b])
        yes, other = (js, js_tilde) if R1[a, b] else (js_tilde, js)
        r_other = is_path(other, x, y, budget=budget)
        if r_other.status == NO_CERTIFIED:
            which = "first" if yes is js else "second"
            return EquivalenceVerdict(
                INEQUIVALENT, None, (x, y),
                f"path exists only for the {which} structure; other side: {r_other.certificate}",
            )
    if len(diff):
        return EquivalenceVerdict(
            UNKNOWN, None, None,
            f"{len(diff)} pairs differ inside the box but none could be certified",
        )
    all_closed = bool(closed1.all() and closed2.all())
    caveat = (
        "all forward sets closed inside the box"
        if all_closed
        else "relations agree for paths inside the box; some forward sets leave it"
    )
    return EquivalenceVerdict(EQUIVALENT_ON_WINDOW, None, None, f"window {list(w.lower)}:{list(w.upper)}; {caveat}")
