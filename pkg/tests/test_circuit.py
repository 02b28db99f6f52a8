import pytest
from hypothesis import given
from hypothesis import strategies as st

from qrb.backends import demo12, heavy_hex27, line_backend
from qrb.circuit import (
    BackendModel,
    Circuit,
    Instruction,
    Kind,
    Layout,
    barrier,
    circuit_depth,
    compose_layout,
    cx,
    h,
    measure,
    rz,
    validate_circuit,
)
from qrb.errors import (
    ArityMismatch,
    DisconnectedBackend,
    DuplicateQubit,
    IndexOutOfRange,
    LengthMismatch,
    ParamMismatch,
)


def perms(n_min=1, n_max=9):
    return st.integers(n_min, n_max).flatmap(lambda n: st.permutations(range(n)).map(Layout))


def test_validate_accepts_bell():
    validate_circuit(Circuit(2, 2, (h(0), cx(0, 1), measure(0, 0), measure(1, 1))))


@pytest.mark.parametrize(
    "ins, error",
    [
        (h(2), IndexOutOfRange),
        (cx(0, 0), DuplicateQubit),
        (Instruction(Kind.CX, (0,)), ArityMismatch),
        (Instruction(Kind.RZ, (0,)), ParamMismatch),
        (Instruction(Kind.H, (0,), (1.0,)), ParamMismatch),
        (measure(0, 5), IndexOutOfRange),
        (Instruction(Kind.DELAY, (0,)), ParamMismatch),
    ],
)
def test_validate_rejects(ins, error):
    with pytest.raises(error) as exc:
        validate_circuit(Circuit(2, 1, (h(0), ins)))
    assert exc.value.position == 1


def test_depth_ignores_barriers_but_syncs():
    c = Circuit(3, 0, (h(0), h(0), barrier(0, 1, 2), h(2)))
    assert circuit_depth(c) == 3
    assert circuit_depth(Circuit(2, 0, (h(0), h(1)))) == 1


def test_active_qubits_first_use_order():
    c = Circuit(4, 0, (h(3), cx(1, 3), rz(0.1, 0)))
    assert c.active_qubits() == [3, 1, 0]


def test_layout_must_be_permutation():
    with pytest.raises(ValueError):
        Layout((0, 0, 1))


@given(perms())
def test_layout_inverse_roundtrip(p):
    assert compose_layout(p, p.inverse()) == Layout.identity(len(p))
    assert compose_layout(p.inverse(), p) == Layout.identity(len(p))
    assert p.inverse().inverse() == p


@given(st.integers(1, 8).flatmap(lambda n: st.tuples(*[st.permutations(range(n)).map(Layout)] * 3)))
def test_layout_composition_associative(abc):
    a, b, c = abc
    assert compose_layout(compose_layout(a, b), c) == compose_layout(a, compose_layout(b, c))


def test_compose_length_mismatch():
    with pytest.raises(LengthMismatch):
        compose_layout(Layout.identity(2), Layout.identity(3))


def test_compose_is_apply_a_then_b():
    a, b = Layout((1, 2, 0)), Layout((2, 0, 1))
    assert compose_layout(a, b).map == (0, 1, 2)


def test_demo12_line():
    b = demo12()
    assert b.num_qubits == 12
    assert b.neighbors(0) == (1,)
    assert b.neighbors(5) == (4, 6)
    assert b.shortest_path(2, 6) == [2, 3, 4, 5, 6]
    assert b.is_connected()


def test_hex27_shape():
    b = heavy_hex27()
    assert len(b.coupling_map) == 28
    assert max(len(b.neighbors(q)) for q in range(27)) == 3
    assert b.is_connected()


def test_duration_lookup_falls_back_to_wildcard():
    b = demo12()
    assert b.duration(Kind.CZ, (3, 4)) == 640
    assert b.error(Kind.CZ, (5, 4)) == b.error(Kind.CZ, (4, 5)) == 0.006


def test_disconnected_backend_path():
    b = BackendModel("split", 4, frozenset({(0, 1), (2, 3)}), frozenset({Kind.CZ}), {(Kind.CZ, None): 1})
    assert not b.is_connected()
    with pytest.raises(DisconnectedBackend):
        b.shortest_path(0, 3)


def test_backend_requires_durations_for_basis():
    with pytest.raises(ValueError):
        BackendModel("x", 2, frozenset({(0, 1)}), frozenset({Kind.CZ, Kind.X}), {(Kind.CZ, None): 1})


def test_backend_error_rate_range():
    with pytest.raises(ValueError):
        line_backend(3, cz_errors=[0.1, 1.5])
