"""Circuit intermediate representation, backend model and qubit layouts.

Everything here is an immutable value. Stages build new circuits instead of
mutating old ones, which is what makes a pipeline run a pure function of its
inputs.
"""

from __future__ import annotations

import enum
from collections import deque
from dataclasses import dataclass, field, replace
from typing import Iterable, Mapping, Sequence

from .errors import (
    ArityMismatch,
    DisconnectedBackend,
    DuplicateQubit,
    IndexOutOfRange,
    LengthMismatch,
    ParamMismatch,
)


class Kind(str, enum.Enum):
    H = "h"
    X = "x"
    SX = "sx"
    RZ = "rz"
    CX = "cx"
    CZ = "cz"
    SWAP = "swap"
    CCX = "ccx"
    CCZ = "ccz"
    MEASURE = "measure"
    RESET = "reset"
    BARRIER = "barrier"
    DELAY = "delay"

    def __str__(self) -> str:
        return self.value


ARITY = {
    Kind.H: 1, Kind.X: 1, Kind.SX: 1, Kind.RZ: 1,
    Kind.MEASURE: 1, Kind.RESET: 1, Kind.DELAY: 1,
    Kind.CX: 2, Kind.CZ: 2, Kind.SWAP: 2,
    Kind.CCX: 3, Kind.CCZ: 3,
}  # BARRIER takes any number >= 1

SELF_INVERSE = frozenset({Kind.H, Kind.X, Kind.CX, Kind.CZ, Kind.SWAP, Kind.CCX, Kind.CCZ})


@dataclass(frozen=True)
class Instruction:
    kind: Kind
    qubits: tuple[int, ...]
    params: tuple[float, ...] = ()
    clbits: tuple[int, ...] = ()
    duration_dt: int | None = None
    start_dt: int | None = None

    def __post_init__(self):
        object.__setattr__(self, "kind", Kind(self.kind))
        object.__setattr__(self, "qubits", tuple(self.qubits))
        object.__setattr__(self, "params", tuple(self.params))
        object.__setattr__(self, "clbits", tuple(self.clbits))

    @property
    def angle(self) -> float:
        return self.params[0]

    def with_qubits(self, qubits: Sequence[int]) -> Instruction:
        return replace(self, qubits=tuple(qubits))

    def unscheduled(self) -> Instruction:
        """Copy with timing stripped (DELAY keeps its duration)."""
        dur = self.duration_dt if self.kind is Kind.DELAY else None
        return replace(self, start_dt=None, duration_dt=dur)


# Small constructors; these read better in circuit builders than the
# dataclass signature does.


def h(q: int) -> Instruction:
    return Instruction(Kind.H, (q,))


def x(q: int) -> Instruction:
    return Instruction(Kind.X, (q,))


def sx(q: int) -> Instruction:
    return Instruction(Kind.SX, (q,))


def rz(theta: float, q: int) -> Instruction:
    return Instruction(Kind.RZ, (q,), (float(theta),))


def cx(c: int, t: int) -> Instruction:
    return Instruction(Kind.CX, (c, t))


def cz(a: int, b: int) -> Instruction:
    return Instruction(Kind.CZ, (a, b))


def swap(a: int, b: int) -> Instruction:
    return Instruction(Kind.SWAP, (a, b))


def ccx(a: int, b: int, t: int) -> Instruction:
    return Instruction(Kind.CCX, (a, b, t))


def ccz(a: int, b: int, c: int) -> Instruction:
    return Instruction(Kind.CCZ, (a, b, c))


def measure(q: int, c: int) -> Instruction:
    return Instruction(Kind.MEASURE, (q,), clbits=(c,))


def reset(q: int) -> Instruction:
    return Instruction(Kind.RESET, (q,))


def barrier(*qubits: int) -> Instruction:
    return Instruction(Kind.BARRIER, qubits)


def delay(duration: int, q: int) -> Instruction:
    return Instruction(Kind.DELAY, (q,), duration_dt=int(duration))


@dataclass(frozen=True)
class Circuit:
    num_qubits: int
    num_clbits: int = 0
    instructions: tuple[Instruction, ...] = ()
    name: str = field(default="circuit", compare=False)
    is_physical: bool = False

    def __post_init__(self):
        object.__setattr__(self, "instructions", tuple(self.instructions))

    def __len__(self) -> int:
        return len(self.instructions)

    def __iter__(self):
        return iter(self.instructions)

    def with_instructions(self, instructions: Iterable[Instruction]) -> Circuit:
        return replace(self, instructions=tuple(instructions))

    def count(self, kind: Kind) -> int:
        return sum(1 for ins in self.instructions if ins.kind is kind)

    def active_qubits(self) -> list[int]:
        """Qubits touched by at least one instruction, in order of first use."""
        seen: dict[int, None] = {}
        for ins in self.instructions:
            for q in ins.qubits:
                seen.setdefault(q, None)
        return list(seen)

    @property
    def is_scheduled(self) -> bool:
        return all(ins.start_dt is not None and ins.duration_dt is not None for ins in self.instructions)


def validate_circuit(c: Circuit) -> None:
    """Raise a :class:`~qrb.errors.CircuitError` subclass if ``c`` is malformed."""
    if c.num_qubits < 1:
        raise IndexOutOfRange("circuit must have at least one qubit")
    if c.num_clbits < 0:
        raise IndexOutOfRange("negative classical register width")
    for pos, ins in enumerate(c.instructions):
        n = len(ins.qubits)
        want = ARITY.get(ins.kind)
        if (want is not None and n != want) or n == 0:
            raise ArityMismatch(f"{ins.kind} expects {want or '>=1'} qubits, got {n}", pos)
        if len(set(ins.qubits)) != n:
            raise DuplicateQubit(f"{ins.kind} repeats a qubit in {ins.qubits}", pos)
        for q in ins.qubits:
            if not 0 <= q < c.num_qubits:
                raise IndexOutOfRange(f"qubit {q} outside [0, {c.num_qubits})", pos)
        if len(ins.params) != (1 if ins.kind is Kind.RZ else 0):
            raise ParamMismatch(f"{ins.kind} has {len(ins.params)} params", pos)
        if ins.kind is Kind.MEASURE:
            if len(ins.clbits) != 1:
                raise ArityMismatch("measure needs exactly one classical bit", pos)
        elif ins.clbits:
            raise ArityMismatch(f"{ins.kind} takes no classical bits", pos)
        for b in ins.clbits:
            if not 0 <= b < c.num_clbits:
                raise IndexOutOfRange(f"clbit {b} outside [0, {c.num_clbits})", pos)
        if ins.kind is Kind.DELAY and (ins.duration_dt is None or ins.duration_dt < 0):
            raise ParamMismatch("delay needs a nonnegative duration", pos)
        if ins.duration_dt is not None and ins.duration_dt < 0:
            raise ParamMismatch("negative duration", pos)
        if ins.start_dt is not None and ins.start_dt < 0:
            raise ParamMismatch("negative start time", pos)


def circuit_depth(c: Circuit) -> int:
    """Length of the longest chain of instructions that share qubits.

    A barrier adds nothing to the depth but synchronizes the qubits it spans.
    """
    level = [0] * c.num_qubits
    for ins in c.instructions:
        top = max(level[q] for q in ins.qubits)
        if ins.kind is not Kind.BARRIER:
            top += 1
        for q in ins.qubits:
            level[q] = top
    return max(level, default=0)


@dataclass(frozen=True)
class Layout:
    """Virtual-to-physical permutation: ``map[v]`` is the physical qubit of ``v``."""

    map: tuple[int, ...]

    def __post_init__(self):
        object.__setattr__(self, "map", tuple(int(p) for p in self.map))
        if sorted(self.map) != list(range(len(self.map))):
            raise ValueError(f"layout is not a permutation: {self.map}")

    @classmethod
    def identity(cls, n: int) -> Layout:
        return cls(tuple(range(n)))

    def __len__(self) -> int:
        return len(self.map)

    def __getitem__(self, v: int) -> int:
        return self.map[v]

    def inverse(self) -> Layout:
        inv = [0] * len(self.map)
        for v, p in enumerate(self.map):
            inv[p] = v
        return Layout(tuple(inv))


def compose_layout(a: Layout, b: Layout) -> Layout:
    """Apply ``a`` then ``b``: ``result[v] = b[a[v]]``."""
    if len(a) != len(b):
        raise LengthMismatch(f"cannot compose layouts of size {len(a)} and {len(b)}")
    return Layout(tuple(b.map[p] for p in a.map))


def inverse(p: Layout) -> Layout:
    return p.inverse()


def _edge(a: int, b: int) -> tuple[int, int]:
    return (a, b) if a < b else (b, a)


@dataclass(frozen=True)
class BackendModel:
    """Transpilation target.

    ``durations_dt`` and ``error_rates`` are keyed by ``(kind, qubits)`` where
    ``qubits`` is a tuple of physical qubits (two-qubit keys in low-high
    order) or ``None`` for the wildcard entry of that kind.
    """

    name: str
    num_qubits: int
    coupling_map: frozenset[tuple[int, int]]
    basis_gates: frozenset[Kind]
    durations_dt: Mapping[tuple[Kind, tuple[int, ...] | None], int]
    error_rates: Mapping[tuple[Kind, tuple[int, ...] | None], float] = field(default_factory=dict)

    def __post_init__(self):
        object.__setattr__(self, "coupling_map", frozenset(_edge(a, b) for a, b in self.coupling_map))
        object.__setattr__(self, "basis_gates", frozenset(Kind(k) for k in self.basis_gates))
        object.__setattr__(self, "durations_dt", dict(self.durations_dt))
        object.__setattr__(self, "error_rates", dict(self.error_rates))
        adj: dict[int, list[int]] = {q: [] for q in range(self.num_qubits)}
        for a, b in self.coupling_map:
            if not (0 <= a < self.num_qubits and 0 <= b < self.num_qubits) or a == b:
                raise ValueError(f"bad coupling pair {(a, b)} for {self.num_qubits} qubits")
            adj[a].append(b)
            adj[b].append(a)
        object.__setattr__(self, "_adj", {q: tuple(sorted(ns)) for q, ns in adj.items()})
        for kind in self.basis_gates:
            if not any(k == kind for k, _ in self.durations_dt):
                raise ValueError(f"basis gate {kind} has no duration entry")
        for key, err in self.error_rates.items():
            if not 0.0 <= err <= 1.0:
                raise ValueError(f"error rate {err} for {key} outside [0, 1]")

    def __hash__(self) -> int:
        return hash((self.name, self.num_qubits, self.coupling_map))

    def neighbors(self, p: int) -> tuple[int, ...]:
        return self._adj[p]

    def is_coupled(self, a: int, b: int) -> bool:
        return _edge(a, b) in self.coupling_map

    def is_connected(self) -> bool:
        seen = {0}
        todo = deque([0])
        while todo:
            for nb in self._adj[todo.popleft()]:
                if nb not in seen:
                    seen.add(nb)
                    todo.append(nb)
        return len(seen) == self.num_qubits

    def shortest_path(self, src: int, dst: int) -> list[int]:
        """BFS path from ``src`` to ``dst``; lower-indexed neighbors are explored first."""
        prev = {src: src}
        todo = deque([src])
        while todo:
            cur = todo.popleft()
            if cur == dst:
                break
            for nb in self._adj[cur]:
                if nb not in prev:
                    prev[nb] = cur
                    todo.append(nb)
        if dst not in prev:
            raise DisconnectedBackend(f"no path between physical qubits {src} and {dst}")
        path = [dst]
        while path[-1] != src:
            path.append(prev[path[-1]])
        return path[::-1]

    def _lookup(self, table: Mapping, kind: Kind, qubits: Sequence[int]):
        key = tuple(qubits)
        for k in (key, tuple(sorted(key))):
            if (kind, k) in table:
                return table[(kind, k)]
        return table.get((kind, None))

    def duration(self, kind: Kind, qubits: Sequence[int]) -> int | None:
        return self._lookup(self.durations_dt, kind, qubits)

    def error(self, kind: Kind, qubits: Sequence[int]) -> float | None:
        return self._lookup(self.error_rates, kind, qubits)

