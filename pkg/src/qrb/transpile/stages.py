"""The honest implementations of the six transpiler stages.

Stage order: init, layout, routing, translation, optimization, scheduling.
Every function here is deterministic; the only randomness (the seeded-random
layout) comes from an explicit seed argument.
"""

from __future__ import annotations

import math
import random
from typing import Sequence

from ..circuit import (
    BackendModel,
    Circuit,
    Instruction,
    Kind,
    Layout,
    compose_layout,
    cx,
    cz,
    h,
    rz,
    swap,
    sx,
)
from ..errors import CircuitTooLarge, DisconnectedBackend, MissingDuration, UntranslatableGate

QUARTER = math.pi / 4
HALF = math.pi / 2

# Angles below this magnitude are identity rotations and get dropped.
ZERO_ANGLE = 1e-12
MAX_SWEEPS = 100


# -- init ----------------------------------------------------------------------


def decompose_ccz(a: int, b: int, c: int) -> list[Instruction]:
    """CCZ as 6 CX and 7 RZ(+-pi/4); exact up to global phase."""
    return [
        cx(b, c), rz(-QUARTER, c), cx(a, c), rz(QUARTER, c),
        cx(b, c), rz(-QUARTER, c), cx(a, c), rz(QUARTER, b), rz(QUARTER, c),
        cx(a, b), rz(QUARTER, a), rz(-QUARTER, b), cx(a, b),
    ]


def stage_init(c: Circuit) -> Circuit:
    """Break every gate on three or more qubits into one- and two-qubit gates."""
    out: list[Instruction] = []
    for ins in c.instructions:
        if ins.kind is Kind.CCZ:
            out.extend(decompose_ccz(*ins.qubits))
        elif ins.kind is Kind.CCX:
            a, b, t = ins.qubits
            out.append(h(t))
            out.extend(decompose_ccz(a, b, t))
            out.append(h(t))
        else:
            out.append(ins)
    return c.with_instructions(out)


# -- layout --------------------------------------------------------------------


def apply_layout(c: Circuit, layout: Layout) -> Circuit:
    """Re-index a virtual circuit onto physical qubits."""
    n = len(layout)
    if c.num_qubits > n:
        raise CircuitTooLarge(f"circuit has {c.num_qubits} qubits, backend only {n}")
    out = [ins.with_qubits([layout[q] for q in ins.qubits]) for ins in c.instructions]
    return Circuit(n, c.num_clbits, tuple(out), name=c.name, is_physical=True)


def _check_fits(c: Circuit, b: BackendModel) -> None:
    if c.num_qubits > b.num_qubits:
        raise CircuitTooLarge(f"circuit has {c.num_qubits} qubits, backend {b.name} only {b.num_qubits}")


def _mean_two_qubit_error(b: BackendModel, p: int) -> float:
    errs = [b.error(Kind.CZ, (p, nb)) or 0.0 for nb in b.neighbors(p)]
    return sum(errs) / len(errs) if errs else math.inf


def greedy_layout(c: Circuit, b: BackendModel) -> Layout:
    """Grow a connected region from the qubit with the lowest mean CZ error.

    Active virtual qubits are placed in order of first use along the BFS order
    of the region; everything else fills the remaining physical qubits in
    ascending order.
    """
    _check_fits(c, b)
    n = b.num_qubits
    active = c.active_qubits()
    start = min(range(n), key=lambda p: (_mean_two_qubit_error(b, p), p))
    order = [start]
    seen = {start}
    i = 0
    while len(order) < len(active) and i < len(order):
        for nb in b.neighbors(order[i]):
            if nb not in seen:
                seen.add(nb)
                order.append(nb)
        i += 1
    if len(order) < len(active):
        raise DisconnectedBackend(f"no connected region of {len(active)} qubits on {b.name}")
    mapping: dict[int, int] = dict(zip(active, order))
    free = iter(sorted(set(range(n)) - set(mapping.values())))
    for v in range(n):
        if v not in mapping:
            mapping[v] = next(free)
    return Layout(tuple(mapping[v] for v in range(n)))


def trivial_layout(c: Circuit, b: BackendModel) -> Layout:
    _check_fits(c, b)
    return Layout.identity(b.num_qubits)


def random_layout(c: Circuit, b: BackendModel, seed: int) -> Layout:
    _check_fits(c, b)
    perm = list(range(b.num_qubits))
    random.Random(seed).shuffle(perm)
    return Layout(tuple(perm))


def stage_layout(c: Circuit, b: BackendModel, seed: int = 0, method: str = "greedy") -> tuple[Circuit, Layout]:
    if method == "greedy":
        layout = greedy_layout(c, b)
    elif method == "trivial":
        layout = trivial_layout(c, b)
    elif method == "random":
        layout = random_layout(c, b, seed)
    else:
        raise ValueError(f"unknown layout method {method!r}")
    return apply_layout(c, layout), layout


# -- routing -------------------------------------------------------------------


def stage_routing(c: Circuit, layout: Layout, b: BackendModel, seed: int = 0) -> tuple[Circuit, Layout]:
    """Insert SWAPs along BFS shortest paths until every 2-qubit gate is coupled.

    Returns the routed circuit and the final layout, i.e. ``layout`` followed
    by the permutation induced by all inserted SWAPs.
    """
    if not b.is_connected():
        raise DisconnectedBackend(f"coupling map of {b.name} is not connected")
    n = b.num_qubits
    where = list(range(n))  # where[p0]: current location of what started on p0
    held = list(range(n))   # held[p]: which starting position is now on p
    out: list[Instruction] = []
    for ins in c.instructions:
        qs = [where[q] for q in ins.qubits]
        if len(qs) > 2 and ins.kind is not Kind.BARRIER:
            raise UntranslatableGate(f"{ins.kind} must be decomposed before routing")
        if len(qs) == 2 and ins.kind is not Kind.BARRIER and not b.is_coupled(*qs):
            path = b.shortest_path(qs[0], qs[1])
            for u, v in zip(path[:-2], path[1:-1]):
                out.append(swap(u, v))
                held[u], held[v] = held[v], held[u]
                where[held[u]] = u
                where[held[v]] = v
            qs = [where[q] for q in ins.qubits]
        out.append(ins.with_qubits(qs))
    moved = Layout(tuple(where))
    return c.with_instructions(out), compose_layout(layout, moved)


# -- translation ---------------------------------------------------------------


def _need(b: BackendModel, *kinds: Kind) -> None:
    for kind in kinds:
        if kind not in b.basis_gates:
            raise UntranslatableGate(f"backend {b.name} lacks {kind} in its basis")


def _translate(ins: Instruction, b: BackendModel) -> list[Instruction]:
    kind = ins.kind
    if kind in b.basis_gates or kind in (Kind.BARRIER, Kind.DELAY):
        return [ins]
    if kind is Kind.H:
        _need(b, Kind.RZ, Kind.SX)
        (q,) = ins.qubits
        return [rz(HALF, q), sx(q), rz(HALF, q)]
    if kind is Kind.X:
        _need(b, Kind.SX)
        (q,) = ins.qubits
        return [sx(q), sx(q)]
    if kind is Kind.CX:
        _need(b, Kind.CZ)
        c_, t = ins.qubits
        return [*_translate(h(t), b), cz(c_, t), *_translate(h(t), b)]
    if kind is Kind.SWAP:
        a, c_ = ins.qubits
        return [g for pair in ((a, c_), (c_, a), (a, c_)) for g in _translate(cx(*pair), b)]
    raise UntranslatableGate(f"no rule to express {kind} in the basis of {b.name}")


def stage_translation(c: Circuit, b: BackendModel) -> Circuit:
    """Rewrite every instruction into the backend's basis gates."""
    out: list[Instruction] = []
    for ins in c.instructions:
        out.extend(_translate(ins, b))
    return c.with_instructions(out)


# -- optimization --------------------------------------------------------------


def _merge_rotations(ins_list: list[Instruction]) -> list[Instruction]:
    out: list[Instruction | None] = []
    last: dict[int, int] = {}
    for ins in ins_list:
        if ins.kind is Kind.RZ:
            (q,) = ins.qubits
            j = last.get(q)
            if j is not None and out[j].kind is Kind.RZ:
                out[j] = rz(out[j].angle + ins.angle, q)
                continue
        for q in ins.qubits:
            last[q] = len(out)
        out.append(ins)
    return out


def _drop_zero_rotations(ins_list: list[Instruction]) -> list[Instruction]:
    # An RZ sandwiched between two RESETs on its wire is left alone.
    prev_kind: list[Kind | None] = []
    last: dict[int, Kind] = {}
    for ins in ins_list:
        prev_kind.append(last.get(ins.qubits[0]) if ins.kind is Kind.RZ else None)
        for q in ins.qubits:
            last[q] = ins.kind
    next_kind: list[Kind | None] = [None] * len(ins_list)
    last.clear()
    for i in range(len(ins_list) - 1, -1, -1):
        ins = ins_list[i]
        if ins.kind is Kind.RZ:
            next_kind[i] = last.get(ins.qubits[0])
        for q in ins.qubits:
            last[q] = ins.kind
    out = []
    for i, ins in enumerate(ins_list):
        if (
            ins.kind is Kind.RZ
            and abs(ins.angle) < ZERO_ANGLE
            and not (prev_kind[i] is Kind.RESET and next_kind[i] is Kind.RESET)
        ):
            continue
        out.append(ins)
    return out


def _cancels(a: Instruction, b: Instruction) -> bool:
    if a.kind is not b.kind:
        return False
    if a.kind is Kind.X:
        return a.qubits == b.qubits
    if a.kind is Kind.CZ:
        return set(a.qubits) == set(b.qubits)
    if a.kind is Kind.CX:
        return a.qubits == b.qubits
    return False


def _cancel_pairs(ins_list: list[Instruction]) -> list[Instruction]:
    out: list[Instruction | None] = []
    stacks: dict[int, list[int]] = {}
    for ins in ins_list:
        if ins.kind in (Kind.X, Kind.CZ, Kind.CX):
            tops = {stacks[q][-1] if stacks.get(q) else None for q in ins.qubits}
            if len(tops) == 1:
                (j,) = tops
                if j is not None and _cancels(out[j], ins):
                    out[j] = None
                    for q in ins.qubits:
                        stacks[q].pop()
                    continue
        for q in ins.qubits:
            stacks.setdefault(q, []).append(len(out))
        out.append(ins)
    return [ins for ins in out if ins is not None]


OPTIMIZATION_PASSES = (_merge_rotations, _drop_zero_rotations, _cancel_pairs)


def stage_optimization(c: Circuit, level: int = 1) -> Circuit:
    """Run the peephole passes to a fixpoint (at most ``MAX_SWEEPS`` sweeps).

    RZ merging uses plain binary64 addition with no reduction modulo 2*pi.
    Level 0 leaves the circuit untouched.
    """
    if level <= 0:
        return c
    current = list(c.instructions)
    for _ in range(MAX_SWEEPS):
        nxt = current
        for step in OPTIMIZATION_PASSES:
            nxt = step(nxt)
        if nxt == current:
            break
        current = nxt
    return c.with_instructions(current)


# -- scheduling ----------------------------------------------------------------


def instruction_duration(ins: Instruction, b: BackendModel) -> int:
    if ins.kind is Kind.BARRIER:
        return 0
    if ins.kind is Kind.DELAY:
        return int(ins.duration_dt)
    dur = b.duration(ins.kind, ins.qubits)
    if dur is None:
        raise MissingDuration(f"backend {b.name} has no duration for {ins.kind} on {ins.qubits}")
    return int(dur)


def stage_scheduling(c: Circuit, b: BackendModel) -> Circuit:
    """As-soon-as-possible schedule with explicit idle DELAYs.

    Each instruction starts when all of its qubits are free. A DELAY fills
    any gap between two consecutive instructions on the same qubit; a qubit
    waiting for its first instruction gets no delay.
    """
    end = [0] * c.num_qubits
    used = [False] * c.num_qubits
    out: list[Instruction] = []
    for ins in c.instructions:
        dur = instruction_duration(ins, b)
        start = max(end[q] for q in ins.qubits)
        for q in ins.qubits:
            if used[q] and end[q] < start:
                out.append(Instruction(Kind.DELAY, (q,), duration_dt=start - end[q], start_dt=end[q]))
        out.append(Instruction(ins.kind, ins.qubits, ins.params, ins.clbits, dur, start))
        for q in ins.qubits:
            end[q] = start + dur
            used[q] = True
    return c.with_instructions(out)


def unschedule(c: Circuit) -> Circuit:
    """Strip timing and the idle DELAYs a scheduler inserted."""
    return c.with_instructions(ins.unscheduled() for ins in c.instructions if ins.kind is not Kind.DELAY)


def two_qubit_pairs(c: Circuit) -> Sequence[tuple[int, ...]]:
    return [ins.qubits for ins in c.instructions if len(ins.qubits) == 2 and ins.kind is not Kind.BARRIER]
