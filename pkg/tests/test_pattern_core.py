import pytest

from oneway.pattern_core import (
    YZ,
    CorrectX,
    Entangle,
    Geometry,
    Measure,
    NotComposable,
    Pattern,
    PatternError,
    Prepare,
    Shift,
    canon,
    compose_geometry,
    compose_pattern,
    geometry_of,
    is_pauli_x,
    is_pauli_y,
    validate_pattern,
)
from oneway.corpus import fj


@pytest.mark.parametrize("raw, want", [(0, 0), (9, 1), (-4, 4), (4, 4), (5, -3), (-11, -3), (16, 0)])
def test_canon_range(raw, want):
    assert canon(raw) == want


def test_pauli_predicates():
    assert [a for a in range(-3, 5) if is_pauli_x(a)] == [0, 4]
    assert [a for a in range(-3, 5) if is_pauli_y(a)] == [-2, 2]


def test_measure_canonicalises_angle():
    assert Measure("v", 9).angle == 1


def test_entangle_rejects_self_loop():
    with pytest.raises(PatternError):
        Entangle("v", "v")


def test_fj_geometry():
    g, angles = geometry_of(fj(1))
    assert g.inputs == {"v"} and g.outputs == {"w"}
    assert g.edge_list() == [("v", "w")]
    assert angles == {"v": ("XY", -1)}


@pytest.mark.parametrize(
    "cmds, inputs, kind",
    [
        ((Prepare("v"), Prepare("v")), (), "DuplicatePrepare"),
        ((Entangle("v", "w"),), ("v",), "UsedBeforePrepare"),
        ((Measure("v", 0), CorrectX("v", {"v"})), ("v",), "UsedAfterMeasure"),
        ((Prepare("w"), CorrectX("w", {"v"}), Measure("v", 0)), ("v",), "ForwardSignalReference"),
        ((Measure("v", 0), Prepare("w"), CorrectX("w", {"v"}), Shift("v", set())), ("v",), "LateShift"),
    ],
)
def test_validation_kinds(cmds, inputs, kind):
    report = validate_pattern(Pattern(cmds, inputs))
    assert not report
    assert report.violations[0].kind == kind


def test_geometry_of_rejects_ill_formed():
    with pytest.raises(PatternError):
        geometry_of(Pattern((Measure("v", 0), Measure("v", 0)), ("v",)))


def test_double_entangle_cancels():
    p = Pattern((Prepare("w"), Entangle("v", "w"), Entangle("w", "v")), ("v",))
    assert geometry_of(p)[0].edges == frozenset()


def test_compose_geometry_chains_wires():
    g1 = Geometry.build("vw", [("v", "w")], {"v"}, {"w"})
    g2 = Geometry.build("wx", [("w", "x")], {"w"}, {"x"})
    g = compose_geometry(g2, g1)
    assert g.inputs == {"v"} and g.outputs == {"x"}
    assert len(g.edges) == 2


def test_compose_geometry_needs_interface():
    g1 = Geometry.build("vw", [("v", "w")], {"v"}, {"w"})
    g2 = Geometry.build("vx", [("v", "x")], {"v"}, {"x"})
    with pytest.raises(NotComposable):
        compose_geometry(g2, g1)


def test_compose_pattern_renames_internal_clash():
    p = compose_pattern(fj(1, "w", "x"), fj(2, "v", "w"))
    g, angles = geometry_of(p)
    assert g.inputs == {"v"} and g.outputs == {"x"}
    assert set(angles) == {"v", "w"}


def test_yz_measure_plane_kept():
    m = Measure("a", 1, YZ)
    assert m.plane == YZ
