import numpy as np

from ctmcstruct.classify import (
    ESSENTIAL, NOT_ESSENTIAL, PIC, QIC, UNKNOWN, all_classes_finite, classify_state_exact,
    classify_states_exact, coordinate_minima, essential_check, extinction_empty, extinction_finite,
    pq_resolution, projected_domination,
)
from ctmcstruct.cli import load_input
from ctmcstruct.network import JumpStructure
from ctmcstruct.oracle import Window

LV = JumpStructure.from_mapping({(1, 0): [(1, 0)], (-1, 1): [(1, 1)], (0, -1): [(0, 1)]})
CLOSED_LINE = JumpStructure.from_mapping({(1, -1): [(0, 1)], (-1, 1): [(1, 0)]})


def test_exact_labels():
    js = JumpStructure.from_mapping({(1,): [(2,)], (-1,): [(3,)]})
    assert [classify_state_exact(js, (x,)) for x in range(5)] == [
        "Neutral", "Neutral", "Active", "Active", "Active"]
    js = JumpStructure.from_mapping({(-1,): [(2,)]})
    assert [classify_state_exact(js, (x,)) for x in range(3)] == ["Neutral", "Trapping", "Active"]
    codes = classify_states_exact(js, np.array([[0], [1], [2]]))
    assert codes.tolist() == [0, 1, -1]


def test_extinction_empty_and_witness():
    assert extinction_empty(CLOSED_LINE) == (True, None)
    assert extinction_empty(LV) == (False, (0, 0))


def test_extinction_reports():
    r = extinction_finite(LV)
    assert not r.empty and r.finite and r.method == "coordinate-minima"
    js = JumpStructure.from_mapping({(-1,): [(3,)]})
    r = extinction_finite(js)
    assert r.finite and "one dimension" in r.notes
    assert extinction_finite(CLOSED_LINE).method == "output-domination"


def test_projected_domination_and_minima():
    js = JumpStructure.from_mapping({(-1, 1): [(1, 1)], (1, 1): [(2, 1)]})
    ok, witness = projected_domination(js)
    assert not ok and witness[0] in (0, 1)
    ok, coord = coordinate_minima(js)
    assert not ok and coord == 0


def test_one_dimensional_finiteness_without_minima_condition():
    js = JumpStructure.from_mapping({(-2,): [(3,)]})
    r = extinction_finite(js)
    assert r.finite and not r.coordinate_minima_condition


def test_all_classes_finite():
    assert all_classes_finite(CLOSED_LINE)
    assert not all_classes_finite(LV)


def test_pq_resolution_lotka_volterra():
    res = pq_resolution(LV, Window((0, 0), (5, 5), 6))
    counts = res.counts()
    assert counts == {"Neutral": 0, "Trapping": 1, "Escaping": 10, PIC: 0, QIC: 25, UNKNOWN: 0}
    assert res.single_cycle_type()


def test_pq_resolution_closed_classes():
    res = pq_resolution(CLOSED_LINE, Window((0, 0), (4, 4), 4))
    assert res.counts()["Neutral"] == 1
    assert res.counts()[PIC] == 24
    assert len(res.classes_of(PIC)) == 8


def test_pq_resolution_without_certification_leaves_unknowns():
    # births carry (a, 0) out of the box, so only a return-path search settles them
    res = pq_resolution(LV, Window((0, 0), (5, 5), 6), certify_escaping=False)
    assert res.states_of(UNKNOWN) == [(a, 0) for a in range(1, 6)]
    assert all(res.kinds[(0, b)] == "Escaping" for b in range(1, 6))


def test_infinite_closed_class_is_not_guessed():
    js = JumpStructure.from_mapping({(1,): [(1,)], (-1,): [(3,)]})
    res = pq_resolution(js, Window((0,), (6,), 3))
    assert res.kinds[(0,)] == "Neutral"
    assert res.kinds[(1,)] == "Escaping"
    assert all(res.kinds[(x,)] == UNKNOWN for x in range(2, 7))
    assert "boundary" in res.reasons[(4,)]


def test_essential_check():
    assert essential_check(LV).status == NOT_ESSENTIAL
    assert essential_check(CLOSED_LINE).status == ESSENTIAL
    js = JumpStructure.from_mapping({(1,): [(1,)], (-2,): [(3,)]})
    assert essential_check(js).status == ESSENTIAL
    js = JumpStructure.from_mapping({(1,): [(1,)], (-1,): [(3,)]})
    v = essential_check(js)
    assert v.status == NOT_ESSENTIAL


def test_essential_envz(network_path):
    js, _ = load_input(network_path("envz.rxn"))
    v = essential_check(js)
    assert v.status == NOT_ESSENTIAL
    assert "trapping state" in v.certificate


def test_pq_resolution_coexisting_classes(network_path):
    js, _ = load_input(network_path("ex3_antidiagonal.json"))
    res = pq_resolution(js, Window((0, 0), (6, 6), 2))
    assert [(1, 5), (3, 3), (5, 1)] in res.classes_of(PIC)
    assert [(2, 4), (4, 2)] in res.classes_of(QIC)
    assert res.kinds[(0, 6)] == "Trapping"


def test_pq_resolution_envz_level_three(network_path):
    js, _ = load_input(network_path("envz.rxn"))
    res = pq_resolution(js, Window((0,) * 9, (3,) * 9, 0))
    nu = np.array((1, 1, 1, 1, 1, 2, 1, 2, 2))
    kinds = {k for x, k in res.kinds.items() if int(nu @ np.array(x)) == 3}
    assert kinds == {"Neutral", "Trapping", QIC}
