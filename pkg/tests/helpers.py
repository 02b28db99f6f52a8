"""Shared test helpers: random circuit generators and an independent
density-matrix reference simulator."""

from __future__ import annotations

import math
import random

import numpy as np

from qrb.circuit import Circuit, Instruction, Kind, ccx, ccz, cx, cz, h, measure, reset, rz, swap, sx, x
from qrb.qasm import emit_source
from qrb.tamper import ghz_circuit, grover3_circuit

ONE_QUBIT = ("h", "x", "sx", "rz")
TWO_QUBIT = ("cx", "cz", "swap")
THREE_QUBIT = ("ccx", "ccz")


def random_circuit(rng: random.Random, n: int, size: int, resets: bool = False,
                   mid_measure: bool = False) -> Circuit:
    """Random circuit over the source gate set, measuring every qubit at the end."""
    ops: list[Instruction] = []
    pool = list(ONE_QUBIT) + (list(TWO_QUBIT) if n >= 2 else []) + (list(THREE_QUBIT) if n >= 3 else [])
    for _ in range(size):
        name = rng.choice(pool)
        if resets and rng.random() < 0.08:
            ops.append(reset(rng.randrange(n)))
            continue
        if mid_measure and rng.random() < 0.05:
            q = rng.randrange(n)
            ops.append(measure(q, q))
            continue
        if name == "rz":
            ops.append(rz(rng.uniform(-math.pi, math.pi), rng.randrange(n)))
        elif name in ONE_QUBIT:
            ops.append({"h": h, "x": x, "sx": sx}[name](rng.randrange(n)))
        elif name in TWO_QUBIT:
            a, b = rng.sample(range(n), 2)
            ops.append({"cx": cx, "cz": cz, "swap": swap}[name](a, b))
        else:
            a, b, c = rng.sample(range(n), 3)
            ops.append({"ccx": ccx, "ccz": ccz}[name](a, b, c))
    ops += [measure(q, q) for q in range(n)]
    return Circuit(n, n, tuple(ops), name=f"rand{n}x{size}")


def corpus(count: int = 50, seed: int = 2024) -> list[tuple[str, str]]:
    """``(name, source)`` pairs: GHZ-2..8, Grover-3 and random circuits up to 8 qubits."""
    items = [(f"ghz{n}", emit_source(ghz_circuit(n))) for n in range(2, 9)]
    items.append(("grover3", emit_source(grover3_circuit())))
    rng = random.Random(seed)
    while len(items) < count:
        n = rng.randint(1, 8)
        c = random_circuit(rng, n, rng.randint(1, 30), resets=rng.random() < 0.3)
        items.append((f"rand{len(items)}", emit_source(c)))
    return items


# -- density-matrix reference --------------------------------------------------
#
# Built from full 2^n x 2^n operators assembled column by column, with the
# classical record tracked as a dict of unnormalized density matrices. It
# shares no code with qrb.sim.

_1Q = {
    Kind.H: np.array([[1, 1], [1, -1]]) / math.sqrt(2),
    Kind.X: np.array([[0, 1], [1, 0]]),
    Kind.SX: np.array([[1 + 1j, 1 - 1j], [1 - 1j, 1 + 1j]]) / 2,
}


def _bit(index: int, q: int, n: int) -> int:
    return (index >> (n - 1 - q)) & 1


def _flip(index: int, q: int, n: int) -> int:
    return index ^ (1 << (n - 1 - q))


def full_operator(ins: Instruction, n: int) -> np.ndarray:
    dim = 2**n
    u = np.zeros((dim, dim), dtype=complex)
    qs = ins.qubits
    for col in range(dim):
        if ins.kind in _1Q or ins.kind is Kind.RZ:
            (q,) = qs
            m = _1Q[ins.kind] if ins.kind in _1Q else np.diag([np.exp(-0.5j * ins.angle), np.exp(0.5j * ins.angle)])
            b = _bit(col, q, n)
            for nb in (0, 1):
                row = col if nb == b else _flip(col, q, n)
                u[row, col] += m[nb, b]
        elif ins.kind is Kind.CX:
            c_, t = qs
            u[_flip(col, t, n) if _bit(col, c_, n) else col, col] = 1
        elif ins.kind is Kind.CCX:
            a, b_, t = qs
            u[_flip(col, t, n) if _bit(col, a, n) and _bit(col, b_, n) else col, col] = 1
        elif ins.kind is Kind.CZ:
            u[col, col] = -1 if all(_bit(col, q, n) for q in qs) else 1
        elif ins.kind is Kind.CCZ:
            u[col, col] = -1 if all(_bit(col, q, n) for q in qs) else 1
        elif ins.kind is Kind.SWAP:
            a, b_ = qs
            row = col
            if _bit(col, a, n) != _bit(col, b_, n):
                row = _flip(_flip(col, a, n), b_, n)
            u[row, col] = 1
        else:
            raise ValueError(ins.kind)
    return u


def _projector(q: int, bit: int, n: int) -> np.ndarray:
    return np.diag([1.0 if _bit(i, q, n) == bit else 0.0 for i in range(2**n)])


def density_matrix_distribution(c: Circuit) -> dict[str, float]:
    n = c.num_qubits
    rho = np.zeros((2**n, 2**n), dtype=complex)
    rho[0, 0] = 1
    records: dict[tuple[int, ...], np.ndarray] = {(0,) * c.num_clbits: rho}
    for ins in c.instructions:
        if ins.kind in (Kind.BARRIER, Kind.DELAY):
            continue
        if ins.kind is Kind.MEASURE:
            (q,), (k,) = ins.qubits, ins.clbits
            nxt: dict = {}
            for rec, r in records.items():
                for bit in (0, 1):
                    p = _projector(q, bit, n)
                    key = rec[:k] + (bit,) + rec[k + 1:]
                    nxt[key] = nxt.get(key, 0) + p @ r @ p
            records = nxt
        elif ins.kind is Kind.RESET:
            (q,) = ins.qubits
            p0, p1 = _projector(q, 0, n), _projector(q, 1, n)
            xq = full_operator(Instruction(Kind.X, (q,)), n)
            records = {rec: p0 @ r @ p0 + xq @ p1 @ r @ p1 @ xq for rec, r in records.items()}
        else:
            u = full_operator(ins, n)
            records = {rec: u @ r @ u.conj().T for rec, r in records.items()}
    out = {"".join(map(str, rec)): float(np.trace(r).real) for rec, r in records.items()}
    return {k: v for k, v in sorted(out.items()) if v > 1e-15}


def compact(c: Circuit) -> Circuit:
    """Relabel the active qubits of ``c`` to 0..k-1 (so small oracles can run it)."""
    active = sorted(c.active_qubits())
    index = {q: i for i, q in enumerate(active)}
    ins = [i.with_qubits([index[q] for q in i.qubits]) for i in c.instructions]
    return Circuit(len(active), c.num_clbits, tuple(ins))


def grover_oracle_cz(backend, seed: int = 42) -> int:
    """Artifact position of the CZ that implements the oracle's CZ(q0, q2)."""
    from qrb.transpile.pipeline import PipelineConfig, build, transpile

    g = grover3_circuit()
    cfg = PipelineConfig.default(backend, seed)
    prefix = transpile(Circuit(3, 3, g.instructions[:5]), cfg).circuit
    k = prefix.count(Kind.CZ)
    artifact, _, _ = build(emit_source(g), cfg)
    czs = [i for i, ins in enumerate(artifact.circuit.instructions) if ins.kind is Kind.CZ]
    return czs[k - 1]
