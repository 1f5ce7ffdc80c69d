import pytest

from golden_orientability import GOLDEN

from orientcalc.errors import AdmissibilityError, ShapeError
from orientcalc.index import OperatorDescriptor
from orientcalc.orientability import (
    RULES,
    Family,
    GroupDescriptor,
    Status,
    Verdict,
    _evaluate,
    evaluate,
    standard_orientation_deps,
)
from orientcalc.topology import build_model


def _run(model, op, group, **kw):
    M = build_model(model)
    return evaluate(M, OperatorDescriptor(op, M, **kw), GroupDescriptor.parse(group))


@pytest.mark.parametrize("model, op, group, status, trail, choices", GOLDEN, ids=lambda v: str(v))
def test_golden_verdicts(model, op, group, status, trail, choices):
    v = _run(model, op, group)
    assert v.status.value == status
    assert v.rule_ids == trail
    assert v.required_choices == choices
    for rid, statement in v.trail:
        assert RULES[rid].statement == statement


def test_symplectic_route_when_special_unitary_excluded():
    M = build_model("S^5")
    op = OperatorDescriptor("HaydysWitten", M)
    v = _evaluate(M, op, GroupDescriptor.parse("U(2)"), frozenset({Family.SU}))
    assert v.status is Status.CANONICAL
    assert v.rule_ids == ("haydys-witten-simply-connected", "unitary-from-symplectic")


def test_transfer_does_not_run_backwards_into_symplectic():
    # U(m) -> Sp(m) transfers orientations, not the converse: Sp has no source rule
    M = build_model("T^4")
    v = evaluate(M, OperatorDescriptor("Signature", M), GroupDescriptor.parse("Sp(1)"))
    assert v.status is Status.UNKNOWN


def test_split_flag_gives_canonical():
    v = _run("T^4", "Signature", "U(2)", split=True)
    assert v.rule_ids == ("self-adjoint-split",)


def test_asserted_complex_symbol():
    v = _run("T^4", "Signature", "U(2)", complex_symbol=True)
    assert v.status is Status.CANONICAL and v.rule_ids == ("complex-symbol",)


def test_asserted_complex_symbol_with_odd_index_rejected():
    with pytest.raises(AdmissibilityError):
        _run("S^4", "Signature", "U(2)", complex_symbol=True)


def test_orthogonal_rule_needs_even_rank():
    v = _run("S^4", "ASD4", "O(3)")
    assert v.status is not Status.NOT_ORIENTABLE


def test_standard_orientation_dependencies():
    assert standard_orientation_deps(3, 1) == (True, True)
    assert standard_orientation_deps(4, 1) == (False, True)
    assert standard_orientation_deps(1, 0) == (True, False)
    assert standard_orientation_deps(8, 2) == (False, False)


def test_group_descriptor_validation():
    assert GroupDescriptor.parse("su(3)").dim_g == 8
    assert GroupDescriptor.parse("Sp(2)").dim_g == 10
    assert GroupDescriptor.parse("U(1)").is_abelian
    assert not GroupDescriptor.parse("SO(3)").is_abelian
    with pytest.raises(ShapeError):
        GroupDescriptor.parse("G2")
    with pytest.raises(ShapeError):
        GroupDescriptor.of(Family.U, 2, simply_connected=True)
    with pytest.raises(ShapeError):
        GroupDescriptor.of(Family.O, 2, connected=True)
    with pytest.raises(ShapeError):
        GroupDescriptor(Family.SU, 2, True, True, dim_g=4)
    with pytest.raises(ShapeError):
        GroupDescriptor.of(Family.U, 0)


def test_verdict_validation():
    with pytest.raises(ShapeError):
        Verdict(Status.ORIENTABLE)
    with pytest.raises(ShapeError):
        Verdict(Status.ORIENTABLE, (("made-up", "x"),))


def test_operator_on_other_model_rejected():
    M, N = build_model("S^4"), build_model("S^4")
    with pytest.raises(ShapeError):
        evaluate(M, OperatorDescriptor("Signature", N), GroupDescriptor.parse("U(2)"))
