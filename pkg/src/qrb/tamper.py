"""Integrity attacks: benchmark circuits and single-instruction edits to artifacts."""

from __future__ import annotations

import enum
import re
from dataclasses import dataclass, field

from .artifact import Artifact, backend_sha256, serialize_artifact
from .circuit import (
    BackendModel,
    Circuit,
    Instruction,
    Kind,
    ccz,
    cx,
    cz,
    h,
    measure,
    reset,
    x,
)
from .errors import InvalidPosition, InvalidRetarget
from .sim import hellinger_fidelity, normalize_counts, sample, simulate, tvd
from .transpile.stages import stage_scheduling, unschedule


def ghz_circuit(n: int) -> Circuit:
    """n-qubit GHZ preparation measuring only the first and last qubit."""
    if n < 2:
        raise ValueError("GHZ needs at least two qubits")
    ins = [h(0)] + [cx(i, i + 1) for i in range(n - 1)] + [measure(0, 0), measure(n - 1, 1)]
    return Circuit(n, 2, tuple(ins), name=f"ghz{n}")


def grover3_circuit() -> Circuit:
    """One Grover iteration over 3 bits marking ``101`` and ``110``.

    The oracle is CZ(q0, q2) conjugated by CX(q1, q2), which flips the sign
    exactly when q0 = 1 and q1 != q2.
    """
    qs = (0, 1, 2)
    ins = [h(q) for q in qs]
    ins += [cx(1, 2), cz(0, 2), cx(1, 2)]
    ins += [h(q) for q in qs] + [x(q) for q in qs] + [ccz(0, 1, 2)] + [x(q) for q in qs] + [h(q) for q in qs]
    ins += [measure(q, q) for q in qs]
    return Circuit(3, 3, tuple(ins), name="grover3")


class TamperKind(str, enum.Enum):
    INSERT_RESET = "reset"
    RETARGET_GATE = "retarget"


_SPEC = re.compile(r"^(reset|retarget)@([A-Za-z0-9_-]+)(?::(\d+),(\d+))?$")


@dataclass(frozen=True)
class TamperSpec:
    """One minimal edit.

    ``position`` is an instruction index into the artifact circuit, or one of
    the symbolic anchors ``last-measure`` / ``last-cz`` which are resolved
    against the artifact. For ``INSERT_RESET`` the reset goes in front of the
    instruction at ``position`` on its first qubit (or ``new_qubits[0]``).
    """

    kind: TamperKind
    position: int | str
    new_qubits: tuple[int, ...] | None = field(default=None)

    @classmethod
    def parse(cls, text: str) -> TamperSpec:
        """Read ``reset@<idx>`` or ``retarget@<idx>:<q1>,<q2>``."""
        m = _SPEC.match(text.strip())
        if not m:
            raise ValueError(f"bad tamper spec {text!r}; expected reset@<idx> or retarget@<idx>:<q1>,<q2>")
        kind = TamperKind(m.group(1))
        pos: int | str = int(m.group(2)) if m.group(2).isdigit() else m.group(2)
        qubits = (int(m.group(3)), int(m.group(4))) if m.group(3) is not None else None
        return cls(kind, pos, qubits)

    def __str__(self) -> str:
        text = f"{self.kind.value}@{self.position}"
        if self.new_qubits is not None and self.kind is TamperKind.RETARGET_GATE:
            text += ":" + ",".join(map(str, self.new_qubits))
        return text

    def resolve(self, c: Circuit, backend: BackendModel | None = None) -> TamperSpec:
        """Concrete copy with a numeric position (and retarget qubits when omitted)."""
        pos = self.position
        if isinstance(pos, str):
            wanted = {"last-measure": Kind.MEASURE, "last-cz": Kind.CZ}.get(pos)
            if wanted is None:
                raise InvalidPosition(f"unknown anchor {pos!r}")
            hits = [i for i, ins in enumerate(c.instructions) if ins.kind is wanted]
            if not hits:
                raise InvalidPosition(f"artifact has no {wanted} instruction")
            pos = hits[-1]
        qubits = self.new_qubits
        if self.kind is TamperKind.RETARGET_GATE and qubits is None:
            if backend is None:
                raise InvalidRetarget("choosing retarget qubits automatically needs the backend")
            qubits = default_retarget(c.instructions[pos], backend)
        return TamperSpec(self.kind, pos, qubits)


def default_retarget(ins: Instruction, backend: BackendModel) -> tuple[int, int]:
    """Keep the first qubit and move the second to its lowest-index other neighbor."""
    if len(ins.qubits) != 2:
        raise InvalidRetarget(f"{ins.kind} is not a two-qubit gate")
    a, b = ins.qubits
    for keep, old in ((a, b), (b, a)):
        for nb in backend.neighbors(keep):
            if nb != old:
                return (keep, nb) if keep == a else (nb, keep)
    raise InvalidRetarget(f"no alternative coupled pair for {ins.qubits}")


def tampered_circuit(c: Circuit, spec: TamperSpec, backend: BackendModel) -> Circuit:
    spec = spec.resolve(c, backend)
    instrs = list(c.instructions)
    pos = spec.position
    if spec.kind is TamperKind.INSERT_RESET:
        if not 0 <= pos <= len(instrs):
            raise InvalidPosition(f"position {pos} outside [0, {len(instrs)}]")
        if spec.new_qubits:
            q = spec.new_qubits[0]
        elif pos < len(instrs):
            q = instrs[pos].qubits[0]
        else:
            raise InvalidPosition("appending a reset needs an explicit qubit")
        if not 0 <= q < c.num_qubits:
            raise InvalidPosition(f"qubit {q} outside the circuit")
        instrs.insert(pos, reset(q))
    else:
        if not 0 <= pos < len(instrs):
            raise InvalidPosition(f"position {pos} outside [0, {len(instrs)})")
        old = instrs[pos]
        new = tuple(spec.new_qubits)
        if old.kind is Kind.BARRIER or len(new) != len(old.qubits):
            raise InvalidRetarget(f"cannot retarget {old.kind} on {old.qubits} to {new}")
        if len(set(new)) != len(new) or not all(0 <= q < c.num_qubits for q in new):
            raise InvalidRetarget(f"invalid qubits {new}")
        if len(new) == 2 and not backend.is_coupled(*new):
            raise InvalidRetarget(f"qubits {new} are not coupled on {backend.name}")
        instrs[pos] = old.with_qubits(new)
    return stage_scheduling(unschedule(c.with_instructions(instrs)), backend)


def apply_tamper(artifact: Artifact, spec: TamperSpec, backend: BackendModel) -> Artifact:
    """Apply one edit and re-serialize with freshly computed start times."""
    if backend_sha256(backend) != artifact.backend_sha256:
        raise ValueError("backend does not match the artifact's backend hash")
    circuit = tampered_circuit(artifact.circuit, spec, backend)
    return serialize_artifact(circuit, artifact.layout, artifact.backend_sha256)


@dataclass(frozen=True)
class DeltaReport:
    genuine: dict[str, float]
    tampered: dict[str, float]
    tvd: float
    fidelity: float
    top_genuine: tuple[str, ...]
    top_tampered: tuple[str, ...]
    counts_genuine: dict[str, int] | None = None
    counts_tampered: dict[str, int] | None = None

    def as_dict(self) -> dict:
        return {
            "genuine": self.genuine,
            "tampered": self.tampered,
            "tvd": self.tvd,
            "hellinger_fidelity": self.fidelity,
            "top_genuine": list(self.top_genuine),
            "top_tampered": list(self.top_tampered),
            "counts_genuine": self.counts_genuine,
            "counts_tampered": self.counts_tampered,
        }


def top_outcomes(dist: dict[str, float], k: int = 2) -> tuple[str, ...]:
    return tuple(sorted(dist, key=lambda s: (-dist[s], s))[:k])


def distribution_delta(genuine: Artifact, tampered: Artifact, shots: int | None = None,
                       seed: int = 0, k: int = 2) -> DeltaReport:
    """Compare the ideal outcome distributions of two artifacts.

    With ``shots`` the comparison uses sampled histograms as well; TVD and
    fidelity are then reported on the sampled frequencies.
    """
    p = simulate(genuine.circuit)
    q = simulate(tampered.circuit)
    counts_p = counts_q = None
    if shots:
        counts_p = sample(genuine.circuit, shots, seed)
        counts_q = sample(tampered.circuit, shots, seed + 1)
        fp, fq = normalize_counts(counts_p), normalize_counts(counts_q)
        dist_tvd, fid = tvd(fp, fq), hellinger_fidelity(fp, fq)
    else:
        dist_tvd, fid = tvd(p, q), hellinger_fidelity(p, q)
    return DeltaReport(p, q, dist_tvd, fid, top_outcomes(p, k), top_outcomes(q, k), counts_p, counts_q)
