import math
import random

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from qrb.circuit import Circuit, Kind, Layout, cx, cz, h, measure, reset, rz, sx, x
from qrb.errors import TooManyQubits, UnsupportedKind
from qrb.sim import (
    apply_gate,
    equivalent_up_to_global_phase,
    hellinger_fidelity,
    normalize_counts,
    sample,
    simulate,
    statevector,
    tvd,
    unitary,
)
from qrb.tamper import ghz_circuit

from helpers import density_matrix_distribution, random_circuit


def test_hadamard_coin():
    assert simulate(Circuit(1, 1, (h(0), measure(0, 0)))) == pytest.approx({"0": 0.5, "1": 0.5}, abs=1e-12)


def test_ghz7():
    dist = simulate(ghz_circuit(7))
    assert dist.keys() == {"00", "11"}
    assert all(abs(p - 0.5) < 1e-12 for p in dist.values())


@given(st.floats(-100, 100, allow_nan=False))
def test_rz_is_diagonal(theta):
    assert simulate(Circuit(1, 1, (rz(theta, 0), measure(0, 0)))) == {"0": pytest.approx(1.0, abs=1e-12)}


def test_unmeasured_clbit_reads_zero():
    assert simulate(Circuit(1, 2, (x(0), measure(0, 1)))) == {"01": pytest.approx(1.0)}


def test_remeasure_overwrites_clbit():
    c = Circuit(1, 1, (x(0), measure(0, 0), x(0), measure(0, 0)))
    assert simulate(c) == {"0": pytest.approx(1.0)}


def test_reset_after_entanglement():
    c = Circuit(2, 2, (h(0), cx(0, 1), reset(1), measure(0, 0), measure(1, 1)))
    assert simulate(c) == pytest.approx({"00": 0.5, "10": 0.5}, abs=1e-12)


def test_sx_squared_is_x():
    u = unitary(Circuit(1, 0, (sx(0), sx(0))))
    assert np.allclose(u, [[0, 1], [1, 0]])


def test_inactive_qubits_are_skipped():
    # 100-qubit register but only two active qubits
    c = Circuit(100, 2, (h(40), cx(40, 99), measure(40, 0), measure(99, 1)), is_physical=True)
    assert simulate(c) == pytest.approx({"00": 0.5, "11": 0.5})


def test_too_many_active_qubits():
    c = Circuit(21, 0, tuple(h(q) for q in range(21)))
    with pytest.raises(TooManyQubits):
        simulate(c)


def test_statevector_rejects_measurement():
    with pytest.raises(UnsupportedKind):
        statevector(Circuit(1, 1, (measure(0, 0),)))


@given(st.randoms(use_true_random=False), st.integers(1, 5))
def test_normalization_after_every_gate(rng, n):
    state = np.zeros((2,) * n, dtype=complex)
    state[(0,) * n] = 1
    c = random_circuit(rng, n, 20)
    from qrb.sim import gate_matrix
    for ins in c.instructions:
        if ins.kind is Kind.MEASURE:
            continue
        state = apply_gate(state, gate_matrix(ins), ins.qubits)
        assert abs(np.vdot(state, state).real - 1) < 1e-10


@given(st.randoms(use_true_random=False), st.integers(1, 4))
def test_matches_density_matrix_oracle(rng, n):
    c = random_circuit(rng, n, 15, resets=True, mid_measure=True)
    p, q = simulate(c), density_matrix_distribution(c)
    for k in set(p) | set(q):
        assert abs(p.get(k, 0) - q.get(k, 0)) < 1e-9
    assert abs(sum(p.values()) - 1) < 1e-10


def test_sample_zero_shots():
    assert sample(ghz_circuit(3), 0, 1) == {}


def test_sample_ghz7_binomial_bound():
    counts = sample(ghz_circuit(7), 100_000, seed=7)
    assert counts == sample(ghz_circuit(7), 100_000, seed=7)
    sigma = math.sqrt(100_000 * 0.25)
    assert abs(counts["00"] - 50_000) < 4 * sigma
    assert counts != sample(ghz_circuit(7), 100_000, seed=8)


@pytest.mark.parametrize("seed", range(5))
def test_sampling_converges(seed):
    c = random_circuit(random.Random(seed), 3, 12, resets=True)
    emp = normalize_counts(sample(c, 1_000_000, seed))
    assert tvd(emp, simulate(c)) < 5e-3


def test_fidelity_examples():
    p = {"00": 0.5, "11": 0.5}
    assert hellinger_fidelity(p, p) == pytest.approx(1.0)
    assert hellinger_fidelity(p, {"00": 0.5, "10": 0.5}) == pytest.approx(0.25)
    assert tvd(p, {"00": 0.5, "10": 0.5}) == pytest.approx(0.5)
    assert tvd(p, p) == 0


def test_equivalence_examples():
    hc = Circuit(1, 0, (h(0),))
    assert equivalent_up_to_global_phase(hc, hc)
    assert equivalent_up_to_global_phase(hc, Circuit(1, 0, (rz(math.pi / 2, 0), sx(0), rz(math.pi / 2, 0))))
    assert not equivalent_up_to_global_phase(hc, Circuit(1, 0, (x(0),)))


def test_equivalence_with_layout():
    src = Circuit(2, 0, (h(0), cx(0, 1)))
    moved = Circuit(2, 0, (h(1), cx(1, 0)), is_physical=True)
    assert equivalent_up_to_global_phase(src, moved, Layout((1, 0)))
    assert not equivalent_up_to_global_phase(src, moved)


def test_cz_symmetric():
    assert np.allclose(unitary(Circuit(2, 0, (cz(0, 1),))), unitary(Circuit(2, 0, (cz(1, 0),))))
