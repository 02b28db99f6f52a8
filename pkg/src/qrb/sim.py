"""Exact statevector simulation for desk-scale circuits.

Measurements and resets are handled by branch splitting rather than by
sampling: each branch carries its probability weight, its classical record
and a normalized state, so the returned distribution is exact. Qubits that no
instruction touches stay in |0> and are left out of the state, which lets a
physical circuit on a 27- or 127-qubit backend be simulated as long as at
most 20 of its qubits are active.

Outcome strings list the classical register as ``c[0] c[1] ... c[k-1]``
from left to right.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .circuit import Circuit, Instruction, Kind, Layout
from .errors import TooManyQubits, UnsupportedKind

MAX_QUBITS = 20
MAX_UNITARY_QUBITS = 10

# Branches below this weight are discarded.
_BRANCH_EPS = 1e-15

_S2 = 1 / math.sqrt(2)
H_MATRIX = np.array([[_S2, _S2], [_S2, -_S2]], dtype=complex)
X_MATRIX = np.array([[0, 1], [1, 0]], dtype=complex)
SX_MATRIX = 0.5 * np.array([[1 + 1j, 1 - 1j], [1 - 1j, 1 + 1j]], dtype=complex)
CX_MATRIX = np.array([[1, 0, 0, 0], [0, 1, 0, 0], [0, 0, 0, 1], [0, 0, 1, 0]], dtype=complex)
CZ_MATRIX = np.diag([1, 1, 1, -1]).astype(complex)
SWAP_MATRIX = np.array([[1, 0, 0, 0], [0, 0, 1, 0], [0, 1, 0, 0], [0, 0, 0, 1]], dtype=complex)
CCX_MATRIX = np.eye(8, dtype=complex)[[0, 1, 2, 3, 4, 5, 7, 6]]
CCZ_MATRIX = np.diag([1, 1, 1, 1, 1, 1, 1, -1]).astype(complex)

_FIXED = {
    Kind.H: H_MATRIX, Kind.X: X_MATRIX, Kind.SX: SX_MATRIX,
    Kind.CX: CX_MATRIX, Kind.CZ: CZ_MATRIX, Kind.SWAP: SWAP_MATRIX,
    Kind.CCX: CCX_MATRIX, Kind.CCZ: CCZ_MATRIX,
}
_IDLE = (Kind.BARRIER, Kind.DELAY)


def rz_matrix(theta: float) -> np.ndarray:
    return np.diag([np.exp(-0.5j * theta), np.exp(0.5j * theta)])


def gate_matrix(ins: Instruction) -> np.ndarray:
    if ins.kind is Kind.RZ:
        return rz_matrix(ins.angle)
    try:
        return _FIXED[ins.kind]
    except KeyError:
        raise UnsupportedKind(f"{ins.kind} has no unitary") from None


def apply_gate(state: np.ndarray, matrix: np.ndarray, axes: tuple[int, ...]) -> np.ndarray:
    """Apply a ``2^k x 2^k`` matrix to the given tensor axes of ``state``.

    ``state`` has one length-2 axis per qubit and may carry trailing batch
    axes. The first listed axis is the most significant bit of the matrix.
    """
    k = len(axes)
    u = matrix.reshape((2,) * (2 * k))
    out = np.tensordot(u, state, axes=(list(range(k, 2 * k)), list(axes)))
    return np.moveaxis(out, list(range(k)), list(axes))


def _compact(c: Circuit) -> tuple[dict[int, int], int]:
    active = sorted(c.active_qubits())
    if len(active) > MAX_QUBITS:
        raise TooManyQubits(f"{len(active)} active qubits exceed the simulator limit of {MAX_QUBITS}")
    return {q: i for i, q in enumerate(active)}, max(len(active), 1)


@dataclass
class _Branch:
    weight: float
    state: np.ndarray
    record: tuple[int, ...]


def _project(state: np.ndarray, axis: int, bit: int) -> tuple[float, np.ndarray]:
    idx = [slice(None)] * state.ndim
    idx[axis] = 1 - bit
    out = state.copy()
    out[tuple(idx)] = 0
    p = float(np.vdot(out, out).real)
    return p, out


def _merge(branches: list[_Branch]) -> list[_Branch]:
    """Merge branches whose records and states agree up to a global phase."""
    merged: list[_Branch] = []
    for br in branches:
        for other in merged:
            if other.record == br.record and abs(abs(np.vdot(other.state, br.state)) - 1.0) < 1e-12:
                other.weight += br.weight
                break
        else:
            merged.append(br)
    return merged


def final_branches(c: Circuit) -> list[tuple[float, np.ndarray, tuple[int, ...]]]:
    """Run ``c`` and return ``(weight, state, record)`` for every surviving branch."""
    index, k = _compact(c)
    state = np.zeros((2,) * k, dtype=complex)
    state[(0,) * k] = 1.0
    branches = [_Branch(1.0, state, (0,) * c.num_clbits)]
    for ins in c.instructions:
        if ins.kind in _IDLE:
            continue
        axes = tuple(index[q] for q in ins.qubits)
        if ins.kind in (Kind.MEASURE, Kind.RESET):
            nxt = []
            for br in branches:
                for bit in (0, 1):
                    p, proj = _project(br.state, axes[0], bit)
                    if p * br.weight <= _BRANCH_EPS:
                        continue
                    proj /= math.sqrt(p)
                    record = br.record
                    if ins.kind is Kind.MEASURE:
                        record = record[: ins.clbits[0]] + (bit,) + record[ins.clbits[0] + 1:]
                    elif bit:
                        proj = apply_gate(proj, X_MATRIX, axes)
                    nxt.append(_Branch(br.weight * p, proj, record))
            branches = _merge(nxt)
        else:
            m = gate_matrix(ins)
            for br in branches:
                br.state = apply_gate(br.state, m, axes)
    return [(br.weight, br.state, br.record) for br in branches]


def simulate(c: Circuit) -> dict[str, float]:
    """Exact outcome distribution over the classical register of ``c``."""
    dist: dict[str, float] = {}
    for weight, _, record in final_branches(c):
        key = "".join(map(str, record))
        dist[key] = dist.get(key, 0.0) + weight
    total = sum(dist.values())
    return {k: v / total for k, v in sorted(dist.items())}


def statevector(c: Circuit) -> np.ndarray:
    """Flat final state of a measurement-free circuit over all its qubits.

    Qubit 0 is the most significant bit of the index.
    """
    if c.num_qubits > MAX_QUBITS:
        raise TooManyQubits(f"{c.num_qubits} qubits exceed the simulator limit of {MAX_QUBITS}")
    state = np.zeros((2,) * c.num_qubits, dtype=complex)
    state[(0,) * c.num_qubits] = 1.0
    for ins in c.instructions:
        if ins.kind in _IDLE:
            continue
        if ins.kind in (Kind.MEASURE, Kind.RESET):
            raise UnsupportedKind(f"statevector() needs a measurement-free circuit, found {ins.kind}")
        state = apply_gate(state, gate_matrix(ins), ins.qubits)
    return state.reshape(-1)


def sample(c: Circuit, shots: int, seed: int) -> dict[str, int]:
    """Multinomial draw of ``shots`` outcomes from :func:`simulate`."""
    if shots == 0:
        return {}
    dist = simulate(c)
    keys = sorted(dist)
    p = np.array([dist[k] for k in keys])
    counts = np.random.default_rng(seed).multinomial(shots, p / p.sum())
    return {k: int(n) for k, n in zip(keys, counts) if n}


def normalize_counts(counts: dict[str, int]) -> dict[str, float]:
    total = sum(counts.values())
    return {k: v / total for k, v in counts.items()} if total else {}


def tvd(p: dict[str, float], q: dict[str, float]) -> float:
    """Total-variation distance; missing outcomes count as probability 0."""
    return 0.5 * sum(abs(p.get(k, 0.0) - q.get(k, 0.0)) for k in set(p) | set(q))


def hellinger_fidelity(p: dict[str, float], q: dict[str, float]) -> float:
    bc = sum(math.sqrt(p[k] * q[k]) for k in set(p) & set(q))
    return min(1.0, bc * bc)


def unitary(c: Circuit) -> np.ndarray:
    """Full ``2^n x 2^n`` unitary of a measurement-free circuit (n <= 10)."""
    n = c.num_qubits
    if n > MAX_UNITARY_QUBITS:
        raise TooManyQubits(f"unitary of {n} qubits exceeds the limit of {MAX_UNITARY_QUBITS}")
    return _apply_batched(c, np.eye(2**n, dtype=complex).reshape((2,) * n + (2**n,))).reshape(2**n, 2**n)


def _apply_batched(c: Circuit, batch: np.ndarray) -> np.ndarray:
    for ins in c.instructions:
        if ins.kind in _IDLE:
            continue
        if ins.kind in (Kind.MEASURE, Kind.RESET):
            raise UnsupportedKind(f"unitary needs a measurement-free circuit, found {ins.kind}")
        batch = apply_gate(batch, gate_matrix(ins), ins.qubits)
    return batch


def _to_physical(batch: np.ndarray, layout: Layout) -> np.ndarray:
    # virtual axis v lands on physical axis layout[v]
    n = len(layout)
    src = list(range(n))
    dst = list(layout.map)
    return np.moveaxis(batch, src, dst)


def equivalent_up_to_global_phase(c1: Circuit, c2: Circuit, layout_map=None, atol: float = 1e-9) -> bool:
    """True iff ``c2`` implements ``c1`` up to one global phase.

    ``layout_map`` relates the virtual qubits of ``c1`` to the physical qubits
    of ``c2``. It may be ``None`` (identity), a :class:`Layout` used at both
    ends, or an ``(initial, final)`` pair of layouts when routing moved the
    qubits during the circuit. ``c1`` is padded with idle qubits to the width
    of ``c2``.
    """
    n = c2.num_qubits
    if c1.num_qubits > n:
        raise ValueError("c1 is wider than c2")
    if n > MAX_UNITARY_QUBITS:
        raise TooManyQubits(f"equivalence check limited to {MAX_UNITARY_QUBITS} qubits")
    if layout_map is None:
        initial = final = Layout.identity(n)
    elif isinstance(layout_map, Layout):
        initial = final = layout_map
    else:
        initial, final = layout_map
    dim = 2**n
    eye = np.eye(dim, dtype=complex).reshape((2,) * n + (dim,))
    padded = Circuit(n, c1.num_clbits, c1.instructions)
    u1 = _apply_batched(padded, eye)
    out = _apply_batched(c2, _to_physical(eye, initial))
    # undo the final placement: physical axis final[v] back to virtual axis v
    u2 = np.moveaxis(out, list(final.map), list(range(n)))
    u1 = u1.reshape(dim, dim)
    u2 = u2.reshape(dim, dim)
    i, j = np.unravel_index(np.argmax(np.abs(u1)), u1.shape)
    if abs(u2[i, j]) < 1e-12:
        return False
    phase = u2[i, j] / u1[i, j]
    phase /= abs(phase)
    return bool(np.max(np.abs(u2 - phase * u1)) <= atol)
