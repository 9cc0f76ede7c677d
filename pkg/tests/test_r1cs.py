import pytest

from zkucb.utils import CompileError, SynthesisError, FormatError
from zkucb.r1cs import (P, felt, signed, LinearCombination, Variable, ConstraintSystem, ConstraintBuilder,
                        WitnessAssignment, is_satisfied, first_unsatisfied)


def product_program(cb, x=3, y=4):
    z = cb.alloc_public('z', x*y)
    a = cb.alloc(x, name='x')
    b = cb.alloc(y, name='y')
    cb.enforce(a, b, z)
    cb.enforce(a+b, cb.one, x+y)
    return z


def build(program):
    shape = ConstraintBuilder()
    program(shape)
    wb = ConstraintBuilder(witness=True)
    program(wb)
    return shape.system(), wb.assignment()


def test_field_helpers():
    assert felt(-1) == P-1
    assert signed(P-1) == -1
    assert signed(5) == 5


def test_linear_combination_arithmetic():
    x, y = Variable(1), Variable(2)
    lc = x*3 + y - 2
    assert lc.items() == ((0, P-2), (1, 3), (2, 1))
    assert (lc - lc).items() == ()
    assert (2 - x).items() == ((0, 2), (1, P-1))
    assert LinearCombination.constant(7).is_constant()
    assert not lc.is_constant()


def test_linear_combination_rejects_variable_products():
    with pytest.raises(TypeError):
        Variable(1)*Variable(2)


def test_builder_counts_match():
    shape = ConstraintBuilder()
    product_program(shape)
    wb = ConstraintBuilder(witness=True)
    product_program(wb)
    count = ConstraintBuilder(record=False)
    product_program(count)
    assert shape.num_vars == wb.num_vars == count.num_vars == 4
    assert shape.num_constraints == wb.num_constraints == count.num_constraints == 2
    assert count.constraints == []
    assert wb.constraints == []


def test_public_after_private_rejected():
    cb = ConstraintBuilder()
    cb.alloc()
    with pytest.raises(CompileError):
        cb.alloc_public('late')


def test_missing_hint():
    cb = ConstraintBuilder(witness=True)
    with pytest.raises(SynthesisError):
        cb.alloc(None, name='orphan')


def test_satisfaction():
    cs, w = build(product_program)
    assert cs.num_public == 1
    assert cs.layout == {'z': 1, 'x': 2, 'y': 3}
    assert is_satisfied(cs, w)
    bad = WitnessAssignment(list(w.values))
    bad.values[3] = 5
    assert first_unsatisfied(cs, bad) == 0


def test_constant_slot_must_be_one():
    cs, w = build(product_program)
    w.values[0] = 2
    assert first_unsatisfied(cs, w) == -1
    assert not is_satisfied(cs, w)


def test_length_mismatch():
    cs, w = build(product_program)
    with pytest.raises(SynthesisError):
        is_satisfied(cs, WitnessAssignment(w.values[:-1]))


def test_r1cs_json_roundtrip():
    cs, _ = build(product_program)
    text = cs.to_json()
    again = ConstraintSystem.from_json(text)
    assert again.to_json() == text
    assert again.shape_hash() == cs.shape_hash()
    assert len(bytes.fromhex(cs.shape_hash())) == 32


def test_shape_hash_sensitive_to_constraints():
    cs1, _ = build(product_program)
    cs2, _ = build(lambda cb: product_program(cb, 5, 4))
    assert cs1.shape_hash() != cs2.shape_hash()


def test_r1cs_json_rejects_other_field():
    cs, _ = build(product_program)
    text = cs.to_json().replace(str(P), str(P+2), 1)
    with pytest.raises(FormatError):
        ConstraintSystem.from_json(text)


def test_validate_out_of_range_variable():
    cs, _ = build(product_program)
    cs.num_vars = 2
    with pytest.raises(CompileError):
        cs.validate()


def test_witness_json_roundtrip():
    _, w = build(product_program)
    assert WitnessAssignment.from_json(w.to_json()) == w
    with pytest.raises(FormatError):
        WitnessAssignment.from_json('["'+str(P)+'"]')
