"""Shared builders and cross-checks for the test suite."""

from __future__ import annotations

import math
import random

import numpy as np

from ctmcstruct.classify import classify_states_exact
from ctmcstruct.lattice import int_ratio, minimal_set, vec_gcd
from ctmcstruct.network import JumpStructure
from ctmcstruct.onedim import classify_line
from ctmcstruct.oracle import CYCLE, ESCAPING, NEUTRAL, TRAPPING, Window, window_reachability


def random_structure(rng: random.Random, dim: int, max_jumps: int = 4, coord: int = 3) -> JumpStructure:
    """Random structure with jump coordinates in [-coord, coord] and minimal states in [0, coord]."""
    njumps = rng.randint(1, max_jumps)
    jumps = {}
    while len(jumps) < njumps:
        w = tuple(rng.randint(-coord, coord) for _ in range(dim))
        if all(c == 0 for c in w) or w in jumps:
            continue
        pts = []
        for _ in range(rng.randint(1, 2)):
            i = tuple(max(rng.randint(0, coord), -c) for c in w)
            pts.append(i)
        jumps[w] = minimal_set(pts)
    return JumpStructure(dim, tuple(jumps.items()))


def random_line_structure(rng: random.Random, scale: int = 1, max_jumps: int = 4,
                          max_mult: int = 3, max_entry: int = 8) -> JumpStructure:
    """Random one-species structure with jumps of both signs, all multiples of ``scale``."""
    while True:
        ks = set()
        ks.add(rng.randint(1, max_mult))
        ks.add(-rng.randint(1, max_mult))
        while len(ks) < rng.randint(2, max_jumps):
            k = rng.randint(-max_mult, max_mult)
            if k:
                ks.add(k)
        if math.gcd(*ks) == 1:
            break
    jumps = {}
    for k in ks:
        w = k * scale
        jumps[(w,)] = minimal_set([(max(rng.randint(0, max_entry), -w),)])
    return JumpStructure(1, tuple(jumps.items()))


def exact_vs_window(js: JumpStructure, upper: int = 8, margin: int = 4) -> int:
    """Number of reported window states where the exact formulas and the oracle disagree."""
    w = Window((0,) * js.dim, (upper,) * js.dim, margin)
    v = window_reachability(js, w)
    exact = classify_states_exact(js, v.states)
    oracle = v.labels.copy()
    oracle[(oracle == ESCAPING) | (oracle == CYCLE)] = -1
    return int(np.sum((exact != oracle) & v.reported))


def multipliers(js: JumpStructure):
    star = vec_gcd(js.omegas)
    return [int_ratio(w, star) for w in js.omegas]


def line_vs_oracle(js: JumpStructure, n_points: int = None):
    """Compare the closed-form line classification with the oracle on ``[0, n_points)``.

    Returns a list of disagreement descriptions (empty when everything matches).
    """
    ks = multipliers(js)
    m1 = max([k for k in ks if k > 0], default=0)
    m2 = -min([k for k in ks if k < 0], default=0)
    star = vec_gcd(js.omegas)[0]
    if n_points is None:
        n_points = 10 * (m1 + m2) * star
    top = max(p[0] for p in js.input_points() + js.output_points())
    margin = 10 * (m1 + m2) * star + top
    lc = classify_line(js, (0,))
    v = window_reachability(js, Window((0,), (n_points - 1,), margin))
    bad = []
    comp_to_oracle = {}
    for x in range(n_points):
        lab = lc.label((x,))
        o = v.labels[x]
        if lab == "Neutral":
            ok = o == NEUTRAL
        elif lab == "Trapping":
            ok = o == TRAPPING
        elif lab == "Escaping":
            ok = o == ESCAPING
        else:
            ok = o == CYCLE
            if ok:
                cls = v.classes[v.class_of[x]]
                ok = cls.open_certain if lab == "QIC" else not cls.exits_in_space
                comp = lc.component_of((x,)).k
                prev = comp_to_oracle.setdefault(comp, cls.id)
                ok = ok and prev == cls.id
        if not ok:
            bad.append((x, lab, int(o)))
    return bad
