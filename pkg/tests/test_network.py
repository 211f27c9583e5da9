import json

import pytest

from ctmcstruct.exceptions import InputError, ParseError
from ctmcstruct.lattice import minimal_set
from ctmcstruct.network import (
    JumpStructure, StructureWarning, check_a2, closure_generators, derive_jumps, format_network,
    load_jump_structure, parse_network, reduce_jumps,
)

LV = """
species: A B
A -> 2 A @ 1
A + B -> 2 B @ 1/2
B -> 0 @ 1.5
"""


def test_parse_lotka_volterra():
    net = parse_network(LV)
    assert net.species_names == ("A", "B")
    js = derive_jumps(net)
    assert js.as_dict() == {
        (-1, 1): minimal_set([(1, 1)]),
        (0, -1): minimal_set([(0, 1)]),
        (1, 0): minimal_set([(1, 0)]),
    }


def test_species_order_without_header():
    net = parse_network("B -> A @ 1\nA -> 0 @ 2")
    assert net.species_names == ("B", "A")


def test_reversible_reaction_gives_two_reactions():
    net = parse_network("X <-> 2 Y @ 1, 3")
    assert {(r.reactant, r.product) for r in net.reactions} == {((1, 0), (0, 2)), ((0, 2), (1, 0))}


def test_duplicate_reactions_are_merged_with_warning():
    with pytest.warns(StructureWarning, match="rate constants summed"):
        net = parse_network("A -> 0 @ 1\nA -> 0 @ 2")
    assert len(net.reactions) == 1
    assert net.reactions[0].rate_constant == 3


@pytest.mark.parametrize("text, line, column", [
    ("A -> B", 1, 7),
    ("A B @ 1", 1, 1),
    ("A -> B @ -1", 1, 9),
    ("A -> B @ x", 1, 9),
    ("A -> B\n", 1, 7),
    ("# c\nA -> 2 $ @ 1", 2, 6),
    ("species: A\nA -> C @ 1", 2, 6),
    ("A -> A @ 1", 1, 1),
    ("A <-> B @ 1", 1, 10),
])
def test_parse_errors_carry_position(text, line, column):
    with pytest.raises(ParseError) as e:
        parse_network(text)
    assert (e.value.line, e.value.column) == (line, column)


def test_empty_input_is_an_error():
    with pytest.raises(ParseError):
        parse_network("# nothing here\n")


def test_format_network_roundtrip():
    net = parse_network(LV)
    again = parse_network(format_network(net))
    assert again.species_names == net.species_names
    assert set(again.reactions) == set(net.reactions)


def test_jump_structure_validation():
    with pytest.raises(InputError):
        JumpStructure.from_mapping({(-2,): [(1,)]})
    with pytest.raises(InputError):
        JumpStructure.from_mapping({(0, 0): [(1, 1)]})


def test_json_loader_minimises_with_warning():
    doc = {"dim": 1, "jumps": [{"omega": [1], "minimal_set": [[2], [3]]}, {"omega": [-1], "minimal_set": [[1]]}]}
    with pytest.warns(StructureWarning):
        js = load_jump_structure(json.dumps(doc))
    assert js.minimal((1,)).tolist() == [[2]]


@pytest.mark.parametrize("doc", [
    "{",
    json.dumps({"dim": 0, "jumps": []}),
    json.dumps({"dim": 1, "jumps": []}),
    json.dumps({"dim": 1, "jumps": [{"omega": [1], "minimal_set": []}]}),
    json.dumps({"dim": 2, "jumps": [{"omega": [1], "minimal_set": [[0]]}]}),
    json.dumps({"dim": 1, "jumps": [{"omega": [1], "minimal_set": [[-1]]}]}),
])
def test_json_loader_rejects_bad_documents(doc):
    with pytest.raises((InputError, ParseError)):
        load_jump_structure(doc)


def test_document_roundtrip():
    js = derive_jumps(parse_network(LV))
    assert load_jump_structure(js.to_json()) == js


def test_check_a2_reports_first_mixed_coordinate():
    js = JumpStructure.from_mapping({(1, 1): [(0, 0)], (0, -1): [(0, 1)]})
    assert check_a2(js).a2_coordinate == 1
    js = JumpStructure.from_mapping({(1, 1): [(0, 0)]})
    assert check_a2(js).a2_coordinate is None


def test_reduce_drops_redundant_multiples():
    js = JumpStructure.from_mapping({(1,): [(1,)], (2,): [(1,)], (-1,): [(1,)], (-2,): [(4,)]})
    red = reduce_jumps(js)
    assert set(red.omegas) <= set(js.omegas)
    # +2 and -2 add no minimal input or output point
    assert red.omegas == ((-1,), (1,))
    assert reduce_jumps(red) == red


def test_reduce_keeps_closures():
    js = JumpStructure.from_mapping({
        (1, -1): [(1, 2)], (2, -2): [(0, 4)], (-3, 3): [(7, 0)], (-4, 4): [(6, 2)],
        (3, -3): [(5, 5)],
    })
    red = reduce_jumps(js)
    a, b = closure_generators(js), closure_generators(red)
    assert a.keys() == b.keys()
    for k in a:
        assert a[k] == b[k]
    assert (3, -3) not in red.omegas


def test_reduce_restores_a_coprime_pair():
    js = JumpStructure.from_mapping({(2,): [(0,)], (-3,): [(3,)], (-2,): [(2,)]})
    red = reduce_jumps(js)
    assert (2,) in red.omegas and (-3,) in red.omegas


def test_reduce_drops_a_jump_whose_output_is_covered():
    js = JumpStructure.from_mapping({(1,): [(0,)], (2,): [(3,)]})
    assert reduce_jumps(js).omegas == ((1,),)


def test_reduce_keeps_every_contributing_jump():
    js = JumpStructure.from_mapping({(1, -1): [(1, 2)], (2, -2): [(0, 4)], (-3, 3): [(7, 0)], (-4, 4): [(6, 2)]})
    assert reduce_jumps(js) == js
