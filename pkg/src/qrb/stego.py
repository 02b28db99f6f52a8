"""Covert channels through three transpiler stages, and their decoders.

Each channel is a drop-in replacement for an honest stage:

* layout: the payload, read as one big integer, picks the layout permutation
  through the factorial number system (Lehmer code);
* init: 6-byte blocks become integer-valued RZ angles on an extra ancilla,
  fenced by RESETs so later passes leave them alone;
* scheduling: payload bytes overwrite the low bytes of existing RZ angles.

Payloads are framed as a 2-byte big-endian length followed by the data. The
decoders only look at the artifact bytes, which is all an observer of the
submitted job gets.
"""

from __future__ import annotations

import math
import struct
from dataclasses import dataclass
from typing import Sequence

from . import __version__
from .artifact import Artifact
from .circuit import BackendModel, Circuit, Instruction, Kind, Layout, reset, rz
from .errors import (
    FrameError,
    InsufficientRZGates,
    NoFreeQubit,
    NonIntegerAngle,
    PayloadTooLarge,
    ValueTooLarge,
)
from .transpile.pipeline import StagePlugin
from .transpile.stages import apply_layout, stage_init, stage_scheduling

MAX_PAYLOAD = 0xFFFF
INIT_BLOCK = 6
INIT_LIMIT = 2**48
STEALTH_LEVELS = (2, 4, 6)


# -- framing and integer codec ---------------------------------------------------


def frame(payload: bytes) -> bytes:
    if len(payload) > MAX_PAYLOAD:
        raise PayloadTooLarge(f"payload of {len(payload)} bytes exceeds {MAX_PAYLOAD}")
    return len(payload).to_bytes(2, "big") + bytes(payload)


def unframe(data: bytes) -> bytes:
    """Strip the length prefix; trailing bytes beyond the frame are ignored."""
    if len(data) < 2:
        raise FrameError("fewer than two bytes, no length prefix")
    n = int.from_bytes(data[:2], "big")
    if n > len(data) - 2:
        raise FrameError(f"length prefix {n} exceeds the {len(data) - 2} bytes available")
    return bytes(data[2:2 + n])


def bytes_to_int(framed: bytes) -> int:
    return int.from_bytes(framed, "big")


def int_to_bytes(k: int, length: int) -> bytes:
    return k.to_bytes(length, "big")


def unframe_int(k: int) -> bytes:
    """Recover a payload from the integer of its frame.

    The integer drops leading zero bytes, so the frame length is found by
    looking for the ``L`` with ``k >> 8L == L``.
    """
    for n in range(0, max(0, (k.bit_length() + 7) // 8 - 1) + 1):
        if k >> (8 * n) == n:
            return int_to_bytes(k & ((1 << (8 * n)) - 1), n)
    raise FrameError("integer does not encode a length-prefixed frame")


# -- Lehmer code ---------------------------------------------------------------


def int_to_permutation(k: int, n: int) -> Layout:
    """The ``k``-th permutation of ``0..n-1`` in lexicographic order."""
    if k < 0:
        raise ValueError("k must be nonnegative")
    if k >= math.factorial(n):
        raise ValueTooLarge(f"{k} >= {n}!")
    pool = list(range(n))
    out = []
    for i in range(n, 0, -1):
        digit, k = divmod(k, math.factorial(i - 1))
        out.append(pool.pop(digit))
    return Layout(tuple(out))


def permutation_to_int(perm: Layout | Sequence[int]) -> int:
    seq = list(perm.map if isinstance(perm, Layout) else perm)
    n = len(seq)
    pool = sorted(seq)
    k = 0
    for i, v in enumerate(seq):
        j = pool.index(v)
        k += j * math.factorial(n - 1 - i)
        pool.pop(j)
    return k


def layout_capacity_bits(n: int) -> int:
    """``floor(log2 n!)``, computed exactly from the bit length of ``n!``."""
    return math.factorial(n).bit_length() - 1


def layout_capacity_bytes(n: int) -> int:
    return layout_capacity_bits(n) // 8


# -- layout channel ------------------------------------------------------------


def leaky_layout(payload: bytes, n: int) -> Layout:
    framed = frame(payload)
    if len(framed) * 8 > layout_capacity_bits(n):
        raise PayloadTooLarge(
            f"{len(payload)}-byte payload ({len(framed)} framed) exceeds the "
            f"{layout_capacity_bytes(n)}-byte layout capacity of {n} qubits"
        )
    return int_to_permutation(bytes_to_int(framed), n)


def leaky_layout_stage(c: Circuit, b: BackendModel, payload: bytes) -> tuple[Circuit, Layout]:
    layout = leaky_layout(payload, b.num_qubits)
    return apply_layout(c, layout), layout


def decode_layout(artifact: Artifact) -> bytes:
    return unframe_int(permutation_to_int(artifact.layout))


# -- init channel --------------------------------------------------------------


def init_blocks(payload: bytes) -> list[int]:
    """Framed payload as integers in ``[0, 2**48)``; the last block is zero-padded."""
    framed = frame(payload)
    framed += bytes(-len(framed) % INIT_BLOCK)
    return [int.from_bytes(framed[i:i + INIT_BLOCK], "big") for i in range(0, len(framed), INIT_BLOCK)]


def leaky_init_stage(c: Circuit, b: BackendModel, payload: bytes) -> Circuit:
    """Honest init, then one extra qubit carrying RESET-fenced RZ(block) gates."""
    if c.num_qubits >= b.num_qubits:
        raise NoFreeQubit(f"circuit uses all {b.num_qubits} qubits of {b.name}; no room for an ancilla")
    c = stage_init(c)
    anc = c.num_qubits
    extra: list[Instruction] = [reset(anc)]
    for v in init_blocks(payload):
        extra += [rz(float(v), anc), reset(anc)]
    return Circuit(c.num_qubits + 1, c.num_clbits, c.instructions + tuple(extra), name=c.name)


def _ancilla_runs(c: Circuit) -> dict[int, list[float]]:
    """Per qubit, the angles of a trailing RESET (RZ RESET)+ run, if any."""
    per_qubit: dict[int, list[Instruction]] = {}
    for ins in c.instructions:
        if ins.kind in (Kind.DELAY, Kind.BARRIER):
            continue
        for q in ins.qubits:
            per_qubit.setdefault(q, []).append(ins)
    runs = {}
    for q, seq in per_qubit.items():
        angles: list[float] = []
        i = len(seq) - 1
        if i < 0 or seq[i].kind is not Kind.RESET:
            continue
        while i >= 2 and seq[i - 1].kind is Kind.RZ and seq[i - 2].kind is Kind.RESET:
            angles.append(seq[i - 1].angle)
            i -= 2
        if angles:
            runs[q] = angles[::-1]
    return runs


def decode_init(artifact: Artifact) -> bytes:
    runs = _ancilla_runs(artifact.circuit)
    if not runs:
        raise FrameError("no RESET-fenced rotation run found")
    q = max(runs, key=lambda q: (len(runs[q]), -q))
    data = bytearray()
    for angle in runs[q]:
        if not (angle.is_integer() and 0 <= angle < INIT_LIMIT):
            raise NonIntegerAngle(f"angle {angle!r} on qubit {q} is not an integer in [0, 2^48)")
        data += int(angle).to_bytes(INIT_BLOCK, "big")
    return unframe(bytes(data))


# -- scheduling channel --------------------------------------------------------


def _check_stealth(stealth: int) -> None:
    if stealth not in STEALTH_LEVELS:
        raise ValueError(f"stealth must be one of {STEALTH_LEVELS}, got {stealth}")


def rz_order(c: Circuit) -> list[int]:
    """Positions of RZ gates sorted by (qubit, start time, position)."""
    idx = [i for i, ins in enumerate(c.instructions) if ins.kind is Kind.RZ]
    return sorted(idx, key=lambda i: (c.instructions[i].qubits[0], c.instructions[i].start_dt or 0, i))


def replace_low_bytes(angle: float, block: bytes) -> float:
    """Overwrite the lowest ``len(block)`` bytes of the binary64 pattern."""
    bits = struct.unpack(">Q", struct.pack(">d", angle))[0]
    width = 8 * len(block)
    bits = (bits >> width << width) | int.from_bytes(block, "big")
    return struct.unpack(">d", struct.pack(">Q", bits))[0]


def low_bytes(angle: float, count: int) -> bytes:
    return struct.pack(">d", angle)[8 - count:]


def embed_in_angles(c: Circuit, payload: bytes, stealth: int) -> Circuit:
    _check_stealth(stealth)
    framed = frame(payload)
    order = rz_order(c)
    if len(framed) > stealth * len(order):
        raise InsufficientRZGates(
            f"{len(framed)} framed bytes need {math.ceil(len(framed) / stealth)} RZ gates "
            f"at {stealth} bytes each; circuit has {len(order)}"
        )
    instrs = list(c.instructions)
    for n, pos in enumerate(order[: math.ceil(len(framed) / stealth)]):
        block = framed[n * stealth:(n + 1) * stealth].ljust(stealth, b"\0")
        ins = instrs[pos]
        instrs[pos] = Instruction(ins.kind, ins.qubits, (replace_low_bytes(ins.angle, block),),
                                  ins.clbits, ins.duration_dt, ins.start_dt)
    return c.with_instructions(instrs)


def leaky_scheduling_stage(c: Circuit, b: BackendModel, payload: bytes, stealth: int = 6) -> Circuit:
    """Honest ASAP scheduling followed by angle low-byte replacement."""
    return embed_in_angles(stage_scheduling(c, b), payload, stealth)


def decode_scheduling(artifact: Artifact, stealth: int = 6) -> bytes:
    _check_stealth(stealth)
    c = artifact.circuit
    data = b"".join(low_bytes(c.instructions[i].angle, stealth) for i in rz_order(c))
    return unframe(data)


# -- capacity ------------------------------------------------------------------


@dataclass(frozen=True)
class CapacityRow:
    stage: str
    max_bits: int | None
    max_bytes: int | None
    limitation: str

    @property
    def unbounded(self) -> bool:
        return self.max_bytes is None

    def describe(self) -> str:
        return "unbounded" if self.unbounded else f"{self.max_bytes} bytes"


def capacity_table(b: BackendModel, c: Circuit) -> list[CapacityRow]:
    """Channel capacities for backend ``b`` and the optimized circuit ``c``."""
    bits = layout_capacity_bits(b.num_qubits)
    n_rz = c.count(Kind.RZ)
    return [
        CapacityRow("layout", bits, bits // 8, "changes the computation's qubit placement"),
        CapacityRow("init", None, None, "needs at least one unused qubit"),
        CapacityRow("scheduling", 8 * 6 * n_rz, 6 * n_rz, "perturbs rotation angles"),
    ]


# -- plugins -------------------------------------------------------------------


def leaky_plugin(stage: str, payload: bytes, stealth: int = 6) -> StagePlugin:
    """A malicious stage plugin that smuggles ``payload`` into the artifact."""
    payload = bytes(payload)
    if stage == "layout":
        def run(c, layout, b, seed, opts):
            return leaky_layout_stage(c, b, payload)
    elif stage == "init":
        def run(c, layout, b, seed, opts):
            return leaky_init_stage(c, b, payload), layout
    elif stage == "scheduling":
        _check_stealth(stealth)

        def run(c, layout, b, seed, opts):
            return leaky_scheduling_stage(c, b, payload, stealth), layout
    else:
        raise ValueError(f"no covert channel in the {stage} stage")
    return StagePlugin(stage, "leaky", __version__, run)


CHANNELS = ("layout", "init", "scheduling")


def decode(channel: str, artifact: Artifact, stealth: int = 6) -> bytes:
    if channel == "layout":
        return decode_layout(artifact)
    if channel == "init":
        return decode_init(artifact)
    if channel == "scheduling":
        return decode_scheduling(artifact, stealth)
    raise ValueError(f"unknown channel {channel!r}")
