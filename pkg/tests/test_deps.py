import pytest

from oneway import corpus
from oneway.deps import (
    BadMediatorAngle,
    Gf2Matrix,
    NotAFlow,
    NotNormalForm,
    check_dependencies,
    dependency_matrices,
    measurement_order,
    predicted_normal_form,
    test_dependencies,
)
from oneway.flow import FlowProblem, find_mod_star_decomp
from oneway.pattern_core import Geometry, Measure, Pattern, geometry_of
from oneway.construct import phi
from oneway.stable_index import Gate, from_gates_free

CHAIN_F = {"v": "w", "w": "x"}


def chain_geometry():
    return Geometry.build("vwx", [("v", "w"), ("w", "x")], {"v"}, {"x"})


def test_chain_matrices():
    g = chain_geometry()
    angles = {"v": ("XY", -1), "w": ("XY", -1)}
    m = dependency_matrices(g, CHAIN_F, angles)
    assert m.F.pairs() == {("v", "w"), ("w", "x")}
    assert m.T.pairs() == {("v", "x")}


def test_pauli_target_has_no_sign_row():
    g = chain_geometry()
    m = dependency_matrices(g, CHAIN_F, {"v": ("XY", 1), "w": ("XY", 0)})
    assert ("v", "w") not in m.F.pairs()


def test_pauli_y_target_feeds_t():
    g = chain_geometry()
    m = dependency_matrices(g, CHAIN_F, {"v": ("XY", 1), "w": ("XY", 2)})
    assert ("v", "w") in m.T.pairs()


def test_walk_sum_inverts_i_minus_t():
    labels = ("a", "b", "c")
    t = Gf2Matrix.from_pairs(labels, [("a", "b"), ("b", "c")])
    inv = t.walk_sum()
    assert ((Gf2Matrix.identity(labels) - t) @ inv).pairs() == Gf2Matrix.identity(labels).pairs()


def test_walk_sum_needs_nilpotent():
    labels = ("a", "b")
    with pytest.raises(ValueError):
        Gf2Matrix.from_pairs(labels, [("a", "b"), ("b", "a")]).walk_sum()


def test_predicted_chain_matches_fixture():
    g = chain_geometry()
    p = predicted_normal_form(g, CHAIN_F, {"v": ("XY", -1), "w": ("XY", -1)})
    assert p == corpus.chain()
    assert test_dependencies(p, CHAIN_F)


@pytest.mark.parametrize("name", ["fJ", "fZz", "chain", "extremal", "reversal_augmented"])
def test_fixtures_consistent(name):
    p = corpus.patterns()[name]
    g, angles = geometry_of(p)
    flow = find_mod_star_decomp(FlowProblem(g, frozenset(v for v, (_, a) in angles.items() if a == 2)))
    assert check_dependencies(p, flow.f)


def test_missing_sign_is_reported():
    p = corpus.chain()
    cmds = list(p.commands)
    cmds[5] = Measure("w", -1)
    rep = check_dependencies(Pattern(tuple(cmds), p.inputs), CHAIN_F)
    assert not rep and (rep.qubit, rep.kind) == ("w", "sign")


def test_extra_z_is_reported():
    p = corpus.chain()
    cmds = list(p.commands)
    cmds[7] = type(cmds[7])("x", {"v", "w"})
    rep = check_dependencies(Pattern(tuple(cmds), p.inputs), CHAIN_F)
    assert (rep.qubit, rep.kind) == ("x", "Z")


def test_wrong_domain():
    assert check_dependencies(corpus.chain(), {"v": "w"}).kind == "flow-domain"


def test_needs_normal_form():
    raw = phi(from_gates_free([Gate("J", ("v",), 1), Gate("J", ("v",), 1)]))
    with pytest.raises(NotNormalForm):
        check_dependencies(raw, {"v.0": "v.1", "v.1": "v.2"})


def test_predicted_rejects_non_flow():
    g = Geometry.build("abcd", [("a", "c"), ("b", "d"), ("a", "d"), ("b", "c")], {"a", "b"}, {"c", "d"})
    with pytest.raises(NotAFlow):
        predicted_normal_form(g, {"a": "c", "b": "d"}, {"a": ("XY", 1), "b": ("XY", 1)})


def test_mediator_angle_checked():
    g, _ = corpus.geometry("fZz")
    with pytest.raises(BadMediatorAngle):
        predicted_normal_form(g, {"a": "a"}, {"a": ("XY", 1)})


def test_measurement_order_is_linear_extension():
    g = chain_geometry()
    assert measurement_order(g, CHAIN_F) == ["v", "w"]
