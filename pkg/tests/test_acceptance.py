"""Acceptance suite: one test per criterion, summarised at the end of the run."""

import io
import json
import math
import random
import time
from contextlib import redirect_stdout

import numpy as np
import pytest

from ctmcstruct.classify import ESSENTIAL, essential_check, extinction_finite
from ctmcstruct.cli import load_input, run
from ctmcstruct.equivalence import (
    EQUIVALENT_BY_THEOREM, EQUIVALENT_ON_WINDOW, check_equivalence_theorem, check_equivalence_window,
)
from ctmcstruct.network import JumpStructure
from ctmcstruct.onedim import classify_line
from ctmcstruct.oracle import (
    CYCLE, ESCAPING, NEUTRAL, TRAPPING, Window, coprime_cycle, explicit_reachability, level_set,
    window_reachability,
)

from helpers import exact_vs_window, line_vs_oracle, multipliers, random_line_structure, random_structure


def crit(n, title):
    return pytest.mark.criterion(n, title)


@crit(1, "Lotka-Volterra window [0,12]^2, margin 6, under 5 s")
def test_lotka_volterra(network_path):
    t0 = time.perf_counter()
    buf = io.StringIO()
    with redirect_stdout(buf):
        code = run(["analyze", network_path("lotka.rxn"), "--window", "0:12", "--margin", "6",
                    "--format", "json", "--threads", "1"])
    elapsed = time.perf_counter() - t0
    assert code == 0
    rep = json.loads(buf.getvalue())
    win = rep["windows"][0]
    axes = sorted([[a, 0] for a in range(1, 13)] + [[0, b] for b in range(1, 13)])
    interior = sorted([a, b] for a in range(1, 13) for b in range(1, 13))
    assert win["trapping"] == [[0, 0]]
    assert sorted(win["escaping"]) == axes
    assert win["neutral"] == []
    assert win["unknown"] == []
    assert [c["tag"] for c in win["classes"]] == ["QIC"]
    assert sorted(win["classes"][0]["members"]) == interior
    assert win["counts"]["PIC"] == 0
    assert rep["assumptions"]["positive_dependence"] is True
    assert rep["assumptions"]["conservation_vector"] is None
    assert elapsed < 5.0


@crit(2, "EnvZ-OmpR level sets up to 6, under 30 s")
def test_envz(network_path):
    t0 = time.perf_counter()
    js, _ = load_input(network_path("envz.rxn"))
    nu = (1, 1, 1, 1, 1, 2, 1, 2, 2)
    states = np.vstack([level_set(nu, L) for L in range(7)])
    v = explicit_reachability(js, states)
    elapsed = time.perf_counter() - t0

    def combos(a, b, i_min):
        out = set()
        for i in range(i_min, 7):
            for j in range(7):
                x = [0] * 9
                x[a], x[b] = i, j
                if np.dot(nu, x) <= 6:
                    out.add(tuple(x))
        return out

    # 0-based: e4 -> 3, e5 -> 4, e7 -> 6
    assert set(v.states_with(TRAPPING)) == combos(3, 6, 1)
    assert set(v.states_with(NEUTRAL)) == combos(4, 6, 0)
    assert v.states_with(ESCAPING) == []
    assert v.classes
    for c in v.classes:
        assert c.status == "open"
        assert not c.boundary_unstable
    assert elapsed < 30.0


@crit(3, "branching-like line {-2,-1,1}: closed form and oracle on [0,60]")
def test_branching_line(network_path):
    js, _ = load_input(network_path("branching.json"))
    lc = classify_line(js, (0,))
    assert lc.trapping == ((0,), (1,))
    assert lc.escaping == ((2,), (3,), (4,))
    assert lc.neutral == ()
    assert len(lc.components) == 1
    comp = lc.components[0]
    assert comp.tag == "QIC" and comp.start == (5,) and comp.stride == (1,)
    assert line_vs_oracle(js, 61) == []


@crit(4, "two-species line example: trapping, escaping and closure core sets")
def test_line_core_example(network_path):
    js, _ = load_input(network_path("ex5.json"))
    v = window_reachability(js, Window((0, 0), (8, 8), 4))
    line7 = [(a, 7 - a) for a in range(8)]
    line8 = [(a, 8 - a) for a in range(9)]
    lab = {x: v.label(x) for x in line7 + line8}
    assert [x for x in line7 if lab[x] == "Trapping"] == [(6, 1)]
    # (4,3) is escaping: nothing jumps back into it
    assert [x for x in line7 if lab[x] == "Escaping"] == [x for x in line7 if x != (6, 1)]
    assert classify_line(js, (7, 0)).closure_core == ((4, 3),)

    lc8 = classify_line(js, (8, 0))
    assert lc8.closure_core == tuple((a, 8 - a) for a in range(2, 8) if a != 3)
    cyc = {lab[x] for x in line8 if x[0] in range(2, 8)}
    assert len(cyc) == 1 and next(iter(cyc))[0] == "Cycle"
    assert [x for x in line8 if lab[x] == "Escaping"] == [(0, 8), (1, 7), (8, 0)]


def _progression(start, stop_first, step):
    return tuple((a, start[0] + start[1] - a) for a in range(start[0], stop_first + 1, step))


@crit(5, "PIC/QIC progressions on even/odd antidiagonals and on diagonal lines")
def test_coexisting_classes(network_path):
    anti, _ = load_input(network_path("ex3_antidiagonal.json"))
    for k in range(5, 15):
        lc = classify_line(anti, (0, k))
        assert lc.trapping == ((0, k), (k, 0))
        assert lc.neutral == () and lc.escaping == ()
        odd_first = _progression((1, k - 1), k - 1, 2)
        even_first = _progression((2, k - 2), k - 1, 2)
        by_tag = sorted((c.tag, c.members) for c in lc.components)
        if k % 2 == 0:
            assert by_tag == [("PIC", odd_first), ("QIC", even_first)]
            assert lc.sigma_plus == (1,) and lc.sigma_minus == (2,)
        else:
            assert by_tag == sorted([("QIC", odd_first), ("QIC", even_first)])
            assert lc.sigma_plus == (1, 2) and lc.sigma_minus == ()

    diag, _ = load_input(network_path("ex3_diagonal.json"))
    for k in range(0, 10):
        lc = classify_line(diag, (k, 0))
        assert lc.neutral == ((k, 0),)
        assert lc.trapping == () and lc.escaping == () and lc.tail is None
        assert lc.sigma_plus == () and lc.sigma_minus == (1, 2)
        comps = {c.k: c for c in lc.components}
        assert {c.tag for c in comps.values()} == {"PIC"}
        assert comps[1].start == (k + 2, 2) and comps[1].stride == (2, 2)
        assert comps[2].start == (k + 1, 1) and comps[2].stride == (2, 2)


@crit(6, "intro triple: equivalent by the merge criterion, essential, equal on [0,60]")
def test_intro_triple(network_path):
    a, _ = load_input(network_path("intro_a.rxn"))
    b, _ = load_input(network_path("intro_b.rxn"))
    c, _ = load_input(network_path("intro_c.rxn"))
    assert check_equivalence_theorem(a, b).status == EQUIVALENT_BY_THEOREM
    assert check_equivalence_theorem(c, b).status == EQUIVALENT_BY_THEOREM
    for js in (a, b, c):
        assert essential_check(js).status == ESSENTIAL
    w = Window((0,), (60,), 12)
    assert check_equivalence_window(a, b, w).status == EQUIVALENT_ON_WINDOW
    assert check_equivalence_window(c, b, w).status == EQUIVALENT_ON_WINDOW


@crit(7, "extinction set: two-species example and the three-species counterexample")
def test_extinction(network_path):
    two, _ = load_input(network_path("twospecies.rxn"))
    r = extinction_finite(two)
    assert r.empty is False and r.finite is False
    assert r.empty_witness == (0, 2)
    assert r.coordinate_minima_condition is False and r.minima_witness == 0
    assert min(p[0] for p in two.output_points()) < min(p[0] for p in two.input_points())

    cube, _ = load_input(network_path("cube_counterexample.json"))
    r = extinction_finite(cube)
    assert r.finite is False
    assert r.coordinate_minima_condition is True


@crit(8, "1000 random structures: exact formulas and line classifier agree with the oracle, under 120 s")
def test_random_agreement():
    rng = random.Random(20240801)
    t0 = time.perf_counter()
    disagreements = 0
    line_cases = 0
    for _ in range(1000):
        dim = rng.choice((1, 2))
        js = random_structure(rng, dim)
        disagreements += exact_vs_window(js)
        if dim == 1:
            ks = multipliers(js)
            if ks and min(ks) < 0 < max(ks):
                line_cases += 1
                disagreements += len(line_vs_oracle(js))
    elapsed = time.perf_counter() - t0
    assert line_cases > 0
    assert disagreements == 0
    assert elapsed < 120.0


@crit(9, "coprime cycles for m1+m2 <= 30 and oracle communicability of the interval")
def test_coprime_cycles():
    for total in range(2, 31):
        for m1 in range(1, total):
            m2 = total - m1
            if math.gcd(m1, m2) != 1:
                continue
            path = coprime_cycle(m1, m2)
            assert path[0] == 0 and path[-1] == 0
            assert all(b - a in (m2, -m1) for a, b in zip(path, path[1:]))
            assert {p % m2 for p in path} == set(range(m2))
            assert all(0 <= p <= m1 + m2 - 1 for p in path)

            js = JumpStructure.from_mapping({(m2,): [(0,)], (-m1,): [(m1,)]})
            v = explicit_reachability(js, np.arange(m1 + m2).reshape(-1, 1))
            assert (v.labels == CYCLE).all()
            assert len(set(v.class_of.tolist())) == 1


@crit(10, "300 random scaled one-species structures: open class count formula")
def test_open_class_count():
    rng = random.Random(424242)
    nonempty = 0
    for _ in range(300):
        g = rng.randint(2, 4)
        js = random_line_structure(rng, scale=g)
        lc = classify_line(js, (0,))
        th = lc.thresholds
        s_i, s_o = th["first_input"][0], th["first_output"][0]
        formula = min(g, max(0, s_i - s_o))
        assert len(lc.sigma_plus) == formula

        spread = 2 * g * max(abs(k) for k in multipliers(js))
        top = max(p[0] for p in js.input_points() + js.output_points())
        n = th["cycle_start"][0] + 6 * spread
        v = window_reachability(js, Window((0,), (n,), n + top))
        ids = {int(v.class_of[i]) for i in np.flatnonzero(v.reported & (v.labels == CYCLE))
               if v.classes[v.class_of[i]].open_certain}
        assert len(ids) == formula
        if lc.sigma_plus:
            nonempty += 1
            assert lc.trapping
    assert nonempty > 0
