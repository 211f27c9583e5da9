"""Reaction networks, jump structures, and the structural checks on them.

A :class:`JumpStructure` is the pair (jump vectors, minimal activity sets)
that every analysis in this package works from.  It can be derived from a
mass-action :class:`ReactionNetwork` or loaded directly from a JSON document.
"""

from __future__ import annotations

import json
import logging
import math
import re
import warnings
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Dict, Iterable, List, Mapping, Optional, Sequence, Tuple

from . import lp
from .exceptions import InputError, ParseError
from .lattice import (
    Antichain,
    IntVec,
    as_intvec,
    in_up_closure,
    int_ratio,
    is_zero,
    minimal_set,
    nonneg,
    span_dim,
    vadd,
    vec_gcd,
    vsub,
)

log = logging.getLogger(__name__)


class StructureWarning(UserWarning):
    """Input was accepted after a normalisation (summed duplicates, minimised sets)."""


@dataclass(frozen=True)
class Reaction:
    reactant: IntVec
    product: IntVec
    rate_constant: Fraction = Fraction(1)

    def __post_init__(self):
        if len(self.reactant) != len(self.product):
            raise InputError("reactant and product have different dimensions")
        if not (nonneg(self.reactant) and nonneg(self.product)):
            raise InputError("complexes must have non-negative coefficients")
        if self.reactant == self.product:
            raise InputError("reaction with identical reactant and product")
        if self.rate_constant <= 0:
            raise InputError("rate constants must be positive")

    @property
    def jump(self) -> IntVec:
        return vsub(self.product, self.reactant)


@dataclass(frozen=True)
class ReactionNetwork:
    species_names: Tuple[str, ...]
    reactions: Tuple[Reaction, ...]
    warnings: Tuple[str, ...] = field(default=(), compare=False)

    def __post_init__(self):
        if len(set(self.species_names)) != len(self.species_names):
            raise InputError("duplicate species names")
        d = len(self.species_names)
        for r in self.reactions:
            if len(r.reactant) != d:
                raise InputError("complex dimension does not match species count")

    @property
    def dim(self) -> int:
        return len(self.species_names)


@dataclass(frozen=True)
class JumpStructure:
    """Finite jump set with a minimal activity antichain per jump.

    ``jumps`` is stored as a tuple of ``(omega, antichain)`` pairs sorted by
    ``omega``, so two structures with the same content compare equal.
    """

    dim: int
    jumps: Tuple[Tuple[IntVec, Antichain], ...]

    def __post_init__(self):
        if self.dim < 1:
            raise InputError("dimension must be at least 1")
        items = sorted((as_intvec(w), I) for w, I in self.jumps)
        seen = set()
        for w, I in items:
            if len(w) != self.dim or I.dim != self.dim:
                raise InputError(f"dimension mismatch in jump {w}")
            if is_zero(w):
                raise InputError("zero jump vector")
            if w in seen:
                raise InputError(f"duplicate jump vector {w}")
            seen.add(w)
            for i in I:
                if not nonneg(vadd(i, w)):
                    raise InputError(
                        f"jump {w} from minimal state {i} leaves the non-negative lattice"
                    )
        object.__setattr__(self, "jumps", tuple(items))

    @classmethod
    def from_mapping(cls, mapping: Mapping[Sequence[int], Iterable[Sequence[int]]]) -> "JumpStructure":
        """Build from ``{omega: minimal states}``; sets are minimised silently."""
        items = tuple((as_intvec(w), minimal_set(I)) for w, I in mapping.items())
        if not items:
            raise InputError("a jump structure needs at least one jump")
        return cls(len(items[0][0]), items)

    # access -------------------------------------------------------------
    @property
    def omegas(self) -> Tuple[IntVec, ...]:
        return tuple(w for w, _ in self.jumps)

    def minimal(self, w: Sequence[int]) -> Antichain:
        w = tuple(w)
        for v, I in self.jumps:
            if v == w:
                return I
        raise KeyError(w)

    def as_dict(self) -> Dict[IntVec, Antichain]:
        return dict(self.jumps)

    def outputs(self, w: Sequence[int]) -> Tuple[IntVec, ...]:
        return tuple(vadd(i, w) for i in self.minimal(w))

    def input_points(self, ws: Optional[Iterable[IntVec]] = None) -> List[IntVec]:
        ws = self.omegas if ws is None else ws
        return sorted({i for w in ws for i in self.minimal(w)})

    def output_points(self, ws: Optional[Iterable[IntVec]] = None) -> List[IntVec]:
        ws = self.omegas if ws is None else ws
        return sorted({o for w in ws for o in self.outputs(w)})

    @property
    def inputs_min(self) -> Antichain:
        """Minimal set of the union of all activity sets."""
        return minimal_set(self.input_points())

    @property
    def outputs_min(self) -> Antichain:
        return minimal_set(self.output_points())

    def is_active(self, w: Sequence[int], x: Sequence[int]) -> bool:
        return nonneg(vadd(x, w)) and in_up_closure(x, self.minimal(w))

    def signed(self, axis: int, sign: int) -> Tuple[IntVec, ...]:
        return tuple(w for w in self.omegas if (w[axis] > 0 if sign > 0 else w[axis] < 0))

    def to_document(self) -> dict:
        return {
            "dim": self.dim,
            "jumps": [{"omega": list(w), "minimal_set": I.tolist()} for w, I in self.jumps],
        }

    def to_json(self) -> str:
        return json.dumps(self.to_document(), sort_keys=True)

    def __repr__(self):
        body = ", ".join(f"{w}: {list(I)}" for w, I in self.jumps)
        return f"JumpStructure(dim={self.dim}, {{{body}}})"


@dataclass(frozen=True)
class AssumptionReport:
    a1_holds: bool
    a2_coordinate: Optional[int]
    span_dim: int
    notes: str = ""

    def to_dict(self) -> dict:
        return {
            "a1_holds": self.a1_holds,
            "a2_coordinate": self.a2_coordinate,
            "span_dim": self.span_dim,
            "notes": self.notes,
        }


# --------------------------------------------------------------------------
# reaction text parsing

_IDENT = r"[A-Za-z_][A-Za-z0-9_]*"
_TERM = re.compile(rf"\s*(\d+)?\s*({_IDENT})\s*$")
_SPECIES_HEADER = re.compile(r"\s*species\s*:(.*)$", re.IGNORECASE)


def _parse_rate(text: str, line: int, col: int) -> Fraction:
    try:
        k = Fraction(text.strip())
    except (ValueError, ZeroDivisionError):
        raise ParseError(f"invalid rate constant {text.strip()!r}", line, col) from None
    if k <= 0:
        raise ParseError(f"rate constant must be positive, got {text.strip()}", line, col)
    return k


def _parse_complex(text: str, line: int, col: int) -> List[Tuple[str, int]]:
    if not text.strip():
        raise ParseError("empty complex (write 0 for the empty complex)", line, col)
    if text.strip() == "0":
        return []
    terms = []
    offset = 0
    for part in text.split("+"):
        m = _TERM.match(part)
        if not m:
            lead = len(part) - len(part.lstrip())
            raise ParseError(f"cannot read term {part.strip()!r}", line, col + offset + lead)
        coef = int(m.group(1)) if m.group(1) is not None else 1
        if coef == 0:
            raise ParseError("zero stoichiometric coefficient", line, col + offset)
        terms.append((m.group(2), coef))
        offset += len(part) + 1
    return terms


def parse_network(text: str) -> ReactionNetwork:
    """Parse the line-oriented reaction format.

    Each line is ``complex -> complex @ rate`` (or ``A <-> B @ k1, k2``).
    ``#`` starts a comment and an optional ``species: S1 S2 ...`` line fixes
    the coordinate order; otherwise species are numbered by first appearance.
    """
    declared: Optional[List[str]] = None
    raw: List[Tuple[List[Tuple[str, int]], List[Tuple[str, int]], Fraction, int]] = []
    order: List[str] = []

    def note(name: str, line: int, col: int):
        if declared is not None:
            if name not in declared:
                raise ParseError(f"undeclared species {name!r}", line, col)
        elif name not in order:
            order.append(name)

    for ln, full in enumerate(text.splitlines(), start=1):
        body = full.split("#", 1)[0].rstrip()
        if not body.strip():
            continue
        m = _SPECIES_HEADER.match(body)
        if m:
            if declared is not None or raw:
                raise ParseError("species header must come first and only once", ln, 1)
            names = m.group(1).replace(",", " ").split()
            for name in names:
                if not re.fullmatch(_IDENT, name):
                    raise ParseError(f"invalid species name {name!r}", ln, body.find(name) + 1)
            if len(set(names)) != len(names):
                raise ParseError("duplicate species in header", ln, 1)
            declared = names
            continue
        if "@" not in body:
            raise ParseError("missing '@ rate'", ln, len(body) + 1)
        at = body.index("@")
        lhs_rhs, rates = body[:at], body[at + 1:]
        if "<->" in lhs_rhs:
            arrow, reversible = "<->", True
        elif "->" in lhs_rhs:
            arrow, reversible = "->", False
        else:
            raise ParseError("missing reaction arrow", ln, 1)
        a = lhs_rhs.index(arrow)
        left, right = lhs_rhs[:a], lhs_rhs[a + len(arrow):]
        if arrow in right:
            raise ParseError("more than one arrow", ln, a + len(arrow) + right.index(arrow) + 1)
        lc = _parse_complex(left, ln, 1)
        rc = _parse_complex(right, ln, a + len(arrow) + 1)
        for name, _ in lc + rc:
            note(name, ln, body.find(name) + 1)
        rate_parts = rates.split(",")
        rate_col = at + 2
        if reversible:
            if len(rate_parts) != 2:
                raise ParseError("reversible reaction needs two rate constants", ln, rate_col)
            k1 = _parse_rate(rate_parts[0], ln, rate_col)
            k2 = _parse_rate(rate_parts[1], ln, rate_col + len(rate_parts[0]) + 1)
            raw.append((lc, rc, k1, ln))
            raw.append((rc, lc, k2, ln))
        else:
            if len(rate_parts) != 1:
                raise ParseError("irreversible reaction takes one rate constant", ln, rate_col)
            raw.append((lc, rc, _parse_rate(rates, ln, rate_col), ln))

    species = tuple(declared if declared is not None else order)
    if not raw:
        raise ParseError("no reactions found", 1, 1)
    index = {s: k for k, s in enumerate(species)}
    merged: Dict[Tuple[IntVec, IntVec], Fraction] = {}
    first_line: Dict[Tuple[IntVec, IntVec], int] = {}
    notes: List[str] = []
    for lc, rc, k, ln in raw:
        y = [0] * len(species)
        yp = [0] * len(species)
        for name, c in lc:
            y[index[name]] += c
        for name, c in rc:
            yp[index[name]] += c
        key = (tuple(y), tuple(yp))
        if key[0] == key[1]:
            raise ParseError("reactant and product are identical", ln, 1)
        if key in merged:
            msg = f"line {ln}: duplicate of the reaction on line {first_line[key]}, rate constants summed"
            notes.append(msg)
            warnings.warn(msg, StructureWarning, stacklevel=2)
            merged[key] += k
        else:
            merged[key] = k
            first_line[key] = ln
    reactions = tuple(Reaction(y, yp, k) for (y, yp), k in merged.items())
    return ReactionNetwork(species, reactions, tuple(notes))


def format_network(net: ReactionNetwork) -> str:
    """Inverse of :func:`parse_network` (one irreversible reaction per line)."""

    def cplx(v):
        terms = [
            (f"{c} " if c != 1 else "") + s for s, c in zip(net.species_names, v) if c
        ]
        return " + ".join(terms) if terms else "0"

    lines = ["species: " + " ".join(net.species_names)]
    for r in net.reactions:
        lines.append(f"{cplx(r.reactant)} -> {cplx(r.product)} @ {r.rate_constant}")
    return "\n".join(lines) + "\n"


def derive_jumps(net: ReactionNetwork) -> JumpStructure:
    """Jump structure of a mass-action network.

    The rate of jump w is positive exactly on the union of the upward
    closures of the reactant complexes of reactions with that jump.
    """
    if not net.reactions:
        raise InputError("network has no reactions")
    groups: Dict[IntVec, List[IntVec]] = {}
    for r in net.reactions:
        groups.setdefault(r.jump, []).append(r.reactant)
    return JumpStructure(
        net.dim, tuple((w, minimal_set(ys)) for w, ys in groups.items())
    )


def load_jump_structure(text: str) -> JumpStructure:
    """Read the JSON jump-structure document, minimising activity sets if needed."""
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as e:
        raise ParseError(e.msg, e.lineno, e.colno) from None
    if not isinstance(doc, dict) or "dim" not in doc or "jumps" not in doc:
        raise InputError("jump-structure document needs 'dim' and 'jumps'")
    d = doc["dim"]
    if not isinstance(d, int) or isinstance(d, bool) or d < 1:
        raise InputError("'dim' must be a positive integer")
    items = []
    for n, entry in enumerate(doc["jumps"]):
        try:
            w = as_intvec(entry["omega"])
            pts = [as_intvec(p) for p in entry["minimal_set"]]
        except (KeyError, TypeError, ValueError) as e:
            raise InputError(f"jump entry {n}: {e}") from None
        if not pts:
            raise InputError(f"jump entry {n}: empty minimal_set")
        if any(len(p) != d for p in pts) or len(w) != d:
            raise InputError(f"jump entry {n}: wrong dimension")
        if any(not nonneg(p) for p in pts):
            raise InputError(f"jump entry {n}: negative coordinate in minimal_set")
        I = minimal_set(pts)
        if len(I) != len(set(pts)):
            msg = f"minimal_set of jump {list(w)} was not an antichain and has been minimised"
            warnings.warn(msg, StructureWarning, stacklevel=2)
            log.warning(msg)
        items.append((w, I))
    if not items:
        raise InputError("a jump structure needs at least one jump")
    return JumpStructure(d, tuple(items))


# --------------------------------------------------------------------------
# structural checks


def check_a2(js: JumpStructure) -> AssumptionReport:
    """Find the first coordinate on which jumps of both signs occur.

    Coordinates are reported 0-based.
    """
    j = next(
        (
            k for k in range(js.dim)
            if any(w[k] > 0 for w in js.omegas) and any(w[k] < 0 for w in js.omegas)
        ),
        None,
    )
    notes = "activity sets are upward closures of antichains by construction"
    if j is not None:
        notes += f"; coordinate {j} (0-based) carries jumps of both signs"
    else:
        notes += "; no coordinate carries jumps of both signs"
    return AssumptionReport(True, j, span_dim(js.omegas), notes)


def conservation_vector(js: JumpStructure) -> Optional[IntVec]:
    return lp.conservation_vector(js.omegas)


def positive_dependence(js: JumpStructure) -> bool:
    return lp.positive_dependence(js.omegas)[0]


def _sign_axis(js: JumpStructure) -> int:
    j = check_a2(js).a2_coordinate
    return 0 if j is None else j


def closure_generators(js: JumpStructure, axis: Optional[int] = None) -> Dict[str, Antichain]:
    """Minimal sets of the six closures used by the one-dimensional analysis.

    Keys: ``I+``, ``I-``, ``I``, ``O+``, ``O-``, ``O``; absent when empty.
    """
    axis = _sign_axis(js) if axis is None else axis
    pos, neg = js.signed(axis, 1), js.signed(axis, -1)
    out = {}
    for key, ws, outputs in (
        ("I+", pos, False), ("I-", neg, False), ("I", js.omegas, False),
        ("O+", pos, True), ("O-", neg, True), ("O", js.omegas, True),
    ):
        pts = js.output_points(ws) if outputs else js.input_points(ws)
        if pts:
            out[key] = minimal_set(pts)
    return out


def _multiplier(w: IntVec, base: IntVec) -> int:
    k = int_ratio(w, base)
    assert k is not None
    return k


def reduce_jumps(js: JumpStructure) -> JumpStructure:
    """Drop jumps that contribute nothing to the six input/output closures.

    A jump is kept when it is the lexicographically smallest jump supplying
    some minimal element of one of the closures.  For span-one structures a
    coprime pair of opposite jumps is added back if the kept set lacks one;
    if the original set has no such pair, jumps are added in order of size
    until the gcd of the original set is recovered.
    """
    axis = _sign_axis(js)
    pos, neg = js.signed(axis, 1), js.signed(axis, -1)
    keep = set()
    for ws, outputs in ((pos, False), (neg, False), (js.omegas, False),
                        (pos, True), (neg, True), (js.omegas, True)):
        if not ws:
            continue
        contrib: Dict[IntVec, IntVec] = {}
        for w in sorted(ws):
            for p in (js.outputs(w) if outputs else js.minimal(w)):
                contrib.setdefault(p, w)
        for p in minimal_set(contrib):
            keep.add(contrib[p])

    star = vec_gcd(js.omegas) if span_dim(js.omegas) == 1 else None
    if star is not None:
        mult = {w: _multiplier(w, star) for w in js.omegas}

        def has_pair(ws):
            ks = [mult[w] for w in ws]
            return any(a > 0 and b < 0 and math.gcd(a, -b) == 1 for a in ks for b in ks)

        if not has_pair(keep):
            pairs = sorted(
                (mult[a] - mult[b], mult[a], a, b)
                for a in js.omegas for b in js.omegas
                if mult[a] > 0 and mult[b] < 0 and math.gcd(mult[a], -mult[b]) == 1
            )
            if pairs:
                keep.update(pairs[0][2:])
            else:
                g = math.gcd(*(abs(mult[w]) for w in keep))
                for w in sorted(js.omegas, key=lambda w: (abs(mult[w]), w)):
                    if g == 1:
                        break
                    g2 = math.gcd(g, abs(mult[w]))
                    if g2 < g:
                        keep.add(w)
                        g = g2
    return JumpStructure(js.dim, tuple((w, I) for w, I in js.jumps if w in keep))
