"""Global state classification.

The neutral and trapping sets, and the emptiness and finiteness of the
extinction set, follow exactly from the minimal input and output sets.
Telling escaping states from open and closed cycle classes needs
reachability, so that part runs the window oracle and reports ``Unknown``
wherever the box cannot settle the answer.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np

from .lattice import IntVec, as_intvec, in_up_closure, nonneg, up_closure_mask, vadd, vneg
from .network import JumpStructure, conservation_vector
from . import oracle
from .oracle import (
    CYCLE, NEUTRAL, TRAPPING, NO_CERTIFIED, YES,
    OracleVerdict, Window, self_reachable, window_reachability,
)
from .exceptions import InputError

ACTIVE = "Active"
PIC, QIC, UNKNOWN = "PIC", "QIC", "Unknown"


def classify_state_exact(js: JumpStructure, x: Sequence[int]) -> str:
    """``Neutral``, ``Trapping`` or ``Active`` for a single state."""
    x = as_intvec(x)
    if not nonneg(x):
        raise InputError("states must be non-negative")
    if in_up_closure(x, js.input_points()):
        return ACTIVE
    if in_up_closure(x, js.output_points()):
        return "Trapping"
    return "Neutral"


def classify_states_exact(js: JumpStructure, X: np.ndarray) -> np.ndarray:
    """Vectorised :func:`classify_state_exact` with oracle label codes (Active -> -1)."""
    X = np.asarray(X, dtype=np.int64)
    act = up_closure_mask(X, js.input_points())
    out_ = up_closure_mask(X, js.output_points())
    codes = np.full(X.shape[0], NEUTRAL, dtype=np.int8)
    codes[out_ & ~act] = TRAPPING
    codes[act] = -1
    return codes


def extinction_empty(js: JumpStructure) -> Tuple[bool, Optional[IntVec]]:
    """The extinction set is empty iff every minimal output dominates some minimal input."""
    inputs = js.input_points()
    for x in js.output_points():
        if not in_up_closure(x, inputs):
            return False, x
    return True, None


@dataclass(frozen=True)
class ExtinctionReport:
    empty: bool
    finite: bool
    coordinate_minima_condition: bool
    method: str
    empty_witness: Optional[IntVec] = None
    finite_witness: Optional[Tuple[int, IntVec]] = None
    minima_witness: Optional[int] = None
    notes: str = ""

    def to_dict(self) -> dict:
        return {
            "empty": self.empty,
            "finite": self.finite,
            "coordinate_minima_condition": self.coordinate_minima_condition,
            "method": self.method,
            "empty_witness": None if self.empty_witness is None else list(self.empty_witness),
            "finite_witness": None if self.finite_witness is None else {
                "coordinate": self.finite_witness[0], "output": list(self.finite_witness[1])
            },
            "minima_witness": self.minima_witness,
            "notes": self.notes,
        }


def _drop(x: Sequence[int], j: int) -> IntVec:
    return tuple(x[:j]) + tuple(x[j + 1:])


def projected_domination(js: JumpStructure) -> Tuple[bool, Optional[Tuple[int, IntVec]]]:
    """Finiteness test: with any one coordinate deleted, every minimal output
    must dominate some minimal input."""
    inputs, outputs = js.input_points(), js.output_points()
    for j in range(js.dim):
        proj = [_drop(y, j) for y in inputs]
        for x in outputs:
            if not in_up_closure(_drop(x, j), proj):
                return False, (j, x)
    return True, None


def coordinate_minima(js: JumpStructure) -> Tuple[bool, Optional[int]]:
    """Necessary condition for finiteness: per coordinate, the smallest output
    value is at least the smallest input value."""
    inputs, outputs = js.input_points(), js.output_points()
    for j in range(js.dim):
        if min(x[j] for x in outputs) < min(y[j] for y in inputs):
            return False, j
    return True, None


def extinction_finite(js: JumpStructure) -> ExtinctionReport:
    empty, ew = extinction_empty(js)
    gen, fw = projected_domination(js)
    mins, mw = coordinate_minima(js)
    notes = ""
    if empty:
        method = "output-domination"
        finite = True
    elif js.dim == 2:
        method = "coordinate-minima"
        finite = mins
        if mins != gen:  # the two tests coincide in two dimensions
            raise ArithmeticError("finiteness tests disagree in dimension two")
    else:
        method = "projected-domination"
        finite = gen
    if js.dim == 1:
        notes = "in one dimension the extinction set is always finite"
    elif finite and not mins:
        raise ArithmeticError("finite extinction set violating the coordinate-minima condition")
    elif mins and not finite:
        notes = "coordinate-minima condition holds but is not sufficient here"
    return ExtinctionReport(
        empty=empty,
        finite=finite,
        coordinate_minima_condition=mins,
        method=method,
        empty_witness=ew,
        finite_witness=None if finite else fw,
        minima_witness=mw,
        notes=notes,
    )


def all_classes_finite(js: JumpStructure) -> bool:
    """Sufficient test only: a strictly positive conserved quantity exists."""
    return conservation_vector(js) is not None


# --------------------------------------------------------------------------
# window-assisted refinement


@dataclass
class Resolution:
    """Per-state refinement of a window.

    ``kinds`` maps every reported state to Neutral / Trapping / Escaping /
    PIC / QIC / Unknown.  ``class_of`` gives the oracle cycle id for PIC and
    QIC states, ``reasons`` explains each Unknown.
    """

    verdict: OracleVerdict
    kinds: Dict[IntVec, str]
    class_of: Dict[IntVec, int]
    reasons: Dict[IntVec, str] = field(default_factory=dict)

    def states_of(self, kind: str) -> List[IntVec]:
        return sorted(x for x, k in self.kinds.items() if k == kind)

    def classes_of(self, kind: str) -> List[List[IntVec]]:
        groups: Dict[int, List[IntVec]] = {}
        for x, k in self.kinds.items():
            if k == kind:
                groups.setdefault(self.class_of[x], []).append(x)
        return [sorted(v) for _, v in sorted(groups.items())]

    def counts(self) -> Dict[str, int]:
        out = {k: 0 for k in ("Neutral", "Trapping", "Escaping", PIC, QIC, UNKNOWN)}
        for k in self.kinds.values():
            out[k] += 1
        return out

    def single_cycle_type(self) -> bool:
        """True when exactly one cycle class covers every cycle state of the window."""
        ids = {c for x, c in self.class_of.items()}
        return len(ids) == 1


def pq_resolution(
    js: JumpStructure,
    w: Window,
    budget: Optional[int] = None,
    verdict: Optional[OracleVerdict] = None,
    certify_escaping: bool = True,
) -> Resolution:
    """Refine the active states of a window into Escaping / PIC / QIC / Unknown."""
    v = verdict if verdict is not None else window_reachability(js, w, budget)
    S = v.states
    exact = classify_states_exact(js, S)
    out_closure = up_closure_mask(S, js.output_points())
    kinds: Dict[IntVec, str] = {}
    class_of: Dict[IntVec, int] = {}
    reasons: Dict[IntVec, str] = {}
    for idx in np.flatnonzero(v.reported):
        x = tuple(int(c) for c in S[idx])
        e = exact[idx]
        if e == NEUTRAL:
            kinds[x] = "Neutral"
            continue
        if e == TRAPPING:
            kinds[x] = "Trapping"
            continue
        if not out_closure[idx]:
            kinds[x] = "Escaping"  # nothing can jump into it
            continue
        lab = v.labels[idx]
        if lab == CYCLE:
            c = v.classes[v.class_of[idx]]
            if c.status == "closed":
                kinds[x] = PIC
            elif c.status == "open":
                kinds[x] = QIC
            else:
                kinds[x] = UNKNOWN
                reasons[x] = "cycle class reaches the exploration boundary"
            if kinds[x] != UNKNOWN:
                class_of[x] = int(c.id)
            continue
        if v.escaping_certain[idx]:
            kinds[x] = "Escaping"
            continue
        if not certify_escaping:
            kinds[x] = UNKNOWN
            reasons[x] = "singleton in the box but its forward set leaves the box"
            continue
        outcome = "Escaping"
        for om in oracle.active_jumps(js, x):
            r = self_reachable(js, x, om, budget=budget)
            if r.status == YES:
                outcome = UNKNOWN
                reasons[x] = f"returns through states outside the box via jump {om}"
                break
            if r.status != NO_CERTIFIED:
                outcome = UNKNOWN
                reasons[x] = f"return after jump {om} not settled within the search box"
                break
        kinds[x] = outcome
    return Resolution(v, kinds, class_of, reasons)


# --------------------------------------------------------------------------
# essentiality

ESSENTIAL, NOT_ESSENTIAL, UNKNOWN_WITHIN_BOUND = "Essential", "NotEssential", "UnknownWithinBound"


@dataclass(frozen=True)
class EssentialityVerdict:
    status: str
    certificate: str

    def to_dict(self) -> dict:
        return {"status": self.status, "certificate": self.certificate}


def essential_check(js: JumpStructure, bound: Optional[int] = None) -> EssentialityVerdict:
    """Decide whether every state lies in a closed class.

    A jump from a minimal state ``i`` is harmless when the chain can come
    back: either the opposite jump is active at ``i + w``, or a return path
    from ``i + w`` to ``i`` exists.  Both lift to every state above ``i``
    because activity sets are upward closed, so checking minimal states is
    enough.  ``bound`` caps the oracle box volume.
    """
    empty, witness = extinction_empty(js)
    if not empty:
        return EssentialityVerdict(NOT_ESSENTIAL, f"trapping state {list(witness)}")
    omegas = set(js.omegas)
    unknown = []
    used_paths = False
    for w, I in js.jumps:
        back = vneg(w)
        for i in I:
            if back in omegas and in_up_closure(vadd(i, w), js.minimal(back)):
                continue
            r = self_reachable(js, i, w, budget=bound)
            if r.status == YES:
                used_paths = True
                continue
            if r.status == NO_CERTIFIED:
                return EssentialityVerdict(
                    NOT_ESSENTIAL,
                    f"no return from {list(vadd(i, w))} to {list(i)}: {r.certificate}",
                )
            unknown.append((w, i))
    if unknown:
        w, i = unknown[0]
        return EssentialityVerdict(
            UNKNOWN_WITHIN_BOUND, f"return after jump {list(w)} from {list(i)} not settled"
        )
    if used_paths:
        return EssentialityVerdict(ESSENTIAL, "return path from i+w to i for every jump w and minimal state i")
    return EssentialityVerdict(ESSENTIAL, "reverse-jump certificate for every jump")
