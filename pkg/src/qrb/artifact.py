"""Canonical byte formats: transpiled artifacts, buildinfo files, backend models.

All three formats are UTF-8 text with LF line endings, no trailing
whitespace and a final LF. Angles never pass through decimal: an RZ angle is
written as the 16 lowercase hex digits of its big-endian binary64 pattern.

Artifact grammar::

    QRBART 1
    backend <sha256hex>
    layout <p0> <p1> ... <p{n-1}>
    <kind> q<i>[,q<j>...] [@<hex16>] t=<start_dt> d=<dur_dt>[ -> c<k>]
    ...
"""

from __future__ import annotations

import hashlib
import re
import struct
from dataclasses import dataclass, field
from typing import Mapping, Sequence

from .circuit import BackendModel, Circuit, Instruction, Kind, Layout, validate_circuit
from .errors import CircuitError, FormatError, UnscheduledCircuit

ARTIFACT_MAGIC = "QRBART 1"
BUILDINFO_SCHEMA = 1


def sha256_hex(data: bytes) -> str:
    return hashlib.sha256(data).hexdigest()


def float_to_hex(value: float) -> str:
    return struct.pack(">d", value).hex()


def hex_to_float(text: str) -> float:
    return struct.unpack(">d", bytes.fromhex(text))[0]


# -- backend model files ------------------------------------------------------


def _qubit_key(qubits: Sequence[int] | None) -> str:
    if qubits is None:
        return ""
    return "." + "-".join(str(q) for q in qubits)


def serialize_backend(b: BackendModel) -> bytes:
    entries = {
        "name": b.name,
        "num_qubits": str(b.num_qubits),
        "coupling": ",".join(f"{a}-{c}" for a, c in sorted(b.coupling_map)),
        "basis": ",".join(sorted(k.value for k in b.basis_gates)),
    }
    for (kind, qubits), dur in b.durations_dt.items():
        entries[f"duration.{kind.value}{_qubit_key(qubits)}"] = str(int(dur))
    for (kind, qubits), err in b.error_rates.items():
        entries[f"error.{kind.value}{_qubit_key(qubits)}"] = repr(float(err))
    return "".join(f"{k} = {entries[k]}\n" for k in sorted(entries)).encode()


def _key_value_lines(data: bytes) -> list[tuple[str, str, int]]:
    try:
        text = data.decode("utf-8")
    except UnicodeDecodeError as exc:
        raise FormatError("not UTF-8", exc.start) from None
    out = []
    offset = 0
    for raw in text.splitlines(keepends=True):
        line = raw.rstrip("\r\n")
        stripped = line.strip()
        if stripped and not stripped.startswith("#"):
            if " = " not in line:
                raise FormatError(f"expected 'key = value', got {line!r}", offset)
            key, value = line.split(" = ", 1)
            out.append((key.strip(), value.strip(), offset))
        offset += len(raw.encode())
    return out


def parse_backend(data: bytes) -> BackendModel:
    """Read a backend model file (comments and blank lines allowed)."""
    fields: dict[str, str] = {}
    durations: dict = {}
    errors: dict = {}
    for key, value, offset in _key_value_lines(data):
        try:
            if key.startswith(("duration.", "error.")):
                table, _, rest = key.partition(".")
                kind_name, _, qpart = rest.partition(".")
                qubits = tuple(int(q) for q in qpart.split("-")) if qpart else None
                kind = Kind(kind_name)
                if table == "duration":
                    durations[(kind, qubits)] = int(value)
                else:
                    errors[(kind, qubits)] = float(value)
            else:
                fields[key] = value
        except ValueError as exc:
            raise FormatError(f"bad entry {key!r}: {exc}", offset) from None
    try:
        coupling = []
        for pair in filter(None, fields.get("coupling", "").split(",")):
            a, b = pair.split("-")
            coupling.append((int(a), int(b)))
        return BackendModel(
            name=fields["name"],
            num_qubits=int(fields["num_qubits"]),
            coupling_map=frozenset(coupling),
            basis_gates=frozenset(Kind(k) for k in fields["basis"].split(",")),
            durations_dt=durations,
            error_rates=errors,
        )
    except KeyError as exc:
        raise FormatError(f"missing field {exc.args[0]!r}") from None
    except ValueError as exc:
        raise FormatError(str(exc)) from None


def backend_sha256(b: BackendModel) -> str:
    return sha256_hex(serialize_backend(b))


# -- artifacts ----------------------------------------------------------------


@dataclass(frozen=True)
class Artifact:
    data: bytes
    circuit: Circuit = field(repr=False)
    layout: Layout = field(repr=False)

    @classmethod
    def from_bytes(cls, data: bytes) -> Artifact:
        circuit, layout = parse_artifact(data)
        return cls(bytes(data), circuit, layout)

    @property
    def sha256(self) -> str:
        return sha256_hex(self.data)

    @property
    def backend_sha256(self) -> str:
        return self.data.split(b"\n", 2)[1].decode().split(" ", 1)[1]

    def lines(self) -> list[str]:
        return self.data.decode().splitlines()


def _instruction_line(ins: Instruction) -> str:
    parts = [ins.kind.value, ",".join(f"q{q}" for q in ins.qubits)]
    if ins.kind is Kind.RZ:
        parts.append("@" + float_to_hex(ins.angle))
    parts.append(f"t={ins.start_dt}")
    parts.append(f"d={ins.duration_dt}")
    if ins.kind is Kind.MEASURE:
        parts.append(f"-> c{ins.clbits[0]}")
    return " ".join(parts)


def serialize_artifact(c: Circuit, layout: Layout, backend: BackendModel | str) -> Artifact:
    """Canonical artifact for a scheduled physical circuit.

    ``backend`` may be the model itself or its precomputed SHA-256.
    """
    if not c.is_physical:
        raise UnscheduledCircuit("artifact circuits must be physical (post-layout)")
    for pos, ins in enumerate(c.instructions):
        if ins.start_dt is None or ins.duration_dt is None:
            raise UnscheduledCircuit(f"instruction {pos} ({ins.kind}) has no start time")
    if len(layout) != c.num_qubits:
        raise UnscheduledCircuit(f"layout size {len(layout)} != circuit width {c.num_qubits}")
    digest = backend if isinstance(backend, str) else backend_sha256(backend)
    lines = [ARTIFACT_MAGIC, f"backend {digest}", "layout " + " ".join(map(str, layout.map))]
    lines.extend(_instruction_line(ins) for ins in c.instructions)
    data = ("\n".join(lines) + "\n").encode()
    return Artifact(data, c, layout)


_UINT = r"(0|[1-9][0-9]*)"
_INSTR = re.compile(
    rf"^(?P<kind>[a-z]+) (?P<qubits>q{_UINT}(?:,q{_UINT})*)"
    rf"(?: @(?P<angle>[0-9a-f]{{16}}))? t=(?P<start>{_UINT}) d=(?P<dur>{_UINT})(?: -> c(?P<clbit>{_UINT}))?$"
)
_LAYOUT = re.compile(rf"^layout {_UINT}(?: {_UINT})*$")
_BACKEND = re.compile(r"^backend [0-9a-f]{64}$")


def parse_artifact(data: bytes) -> tuple[Circuit, Layout]:
    """Inverse of :func:`serialize_artifact`; rejects anything non-canonical."""
    if not data.endswith(b"\n"):
        raise FormatError("artifact must end with LF (truncated?)", len(data))
    try:
        text = data.decode("utf-8")
    except UnicodeDecodeError as exc:
        raise FormatError("not UTF-8", exc.start) from None
    lines = text[:-1].split("\n")
    offsets = [0]
    for line in lines[:-1]:
        offsets.append(offsets[-1] + len(line.encode()) + 1)
    if len(lines) < 3:
        raise FormatError("missing header, backend or layout line", len(data))
    if lines[0] != ARTIFACT_MAGIC:
        raise FormatError(f"bad header {lines[0]!r}", 0)
    if not _BACKEND.match(lines[1]):
        raise FormatError("bad backend line", offsets[1])
    if not _LAYOUT.match(lines[2]):
        raise FormatError("bad layout line", offsets[2])
    try:
        layout = Layout(tuple(int(p) for p in lines[2].split()[1:]))
    except ValueError as exc:
        raise FormatError(str(exc), offsets[2]) from None
    n = len(layout)
    instructions = []
    max_clbit = -1
    for line, offset in zip(lines[3:], offsets[3:]):
        m = _INSTR.match(line)
        if not m:
            raise FormatError(f"bad instruction line {line!r}", offset)
        try:
            kind = Kind(m.group("kind"))
        except ValueError:
            raise FormatError(f"unknown instruction kind {m.group('kind')!r}", offset) from None
        if (m.group("angle") is not None) != (kind is Kind.RZ):
            raise FormatError("angle present iff rz", offset)
        if (m.group("clbit") is not None) != (kind is Kind.MEASURE):
            raise FormatError("classical target present iff measure", offset)
        qubits = tuple(int(q) for q in m.group("qubits")[1:].split(",q"))
        start, dur = int(m.group("start")), int(m.group("dur"))
        params = (hex_to_float(m.group("angle")),) if kind is Kind.RZ else ()
        clbits = (int(m.group("clbit")),) if kind is Kind.MEASURE else ()
        if clbits:
            max_clbit = max(max_clbit, clbits[0])
        instructions.append(Instruction(kind, qubits, params, clbits, dur, start))
    circuit = Circuit(n, max_clbit + 1, tuple(instructions), name="artifact", is_physical=True)
    try:
        validate_circuit(circuit)
    except CircuitError as exc:
        pos = exc.position
        raise FormatError(str(exc), offsets[3 + pos] if pos is not None else 0) from None
    return circuit, layout


# -- buildinfo ----------------------------------------------------------------


@dataclass(frozen=True)
class BuildInfo:
    tool_version: str
    source_sha256: str
    backend_sha256: str
    master_seed: int
    stage_plugins: tuple[tuple[str, str, str], ...]
    options: Mapping[str, str]
    artifact_sha256: str
    schema_version: int = BUILDINFO_SCHEMA

    def __post_init__(self):
        object.__setattr__(self, "stage_plugins", tuple(tuple(p) for p in self.stage_plugins))
        object.__setattr__(self, "options", dict(sorted(self.options.items())))
        if len(self.stage_plugins) != 6:
            raise ValueError("buildinfo needs exactly six stage plugins")
        if not 0 <= self.master_seed < 2**64:
            raise ValueError("master_seed must be a 64-bit unsigned integer")

    def to_bytes(self) -> bytes:
        entries = {
            "schema_version": str(self.schema_version),
            "tool_version": self.tool_version,
            "source_sha256": self.source_sha256,
            "backend_sha256": self.backend_sha256,
            "master_seed": str(self.master_seed),
            "artifact_sha256": self.artifact_sha256,
        }
        for i, (stage, plugin_id, version) in enumerate(self.stage_plugins, start=1):
            entries[f"stage.{i}.{stage}"] = f"{plugin_id} {version}"
        for key, value in self.options.items():
            entries[f"option.{key}"] = value
        for key, value in entries.items():
            if "\n" in value or value != value.strip():
                raise ValueError(f"buildinfo value for {key!r} is not a single trimmed line")
        return "".join(f"{k} = {entries[k]}\n" for k in sorted(entries)).encode()

    @classmethod
    def from_bytes(cls, data: bytes) -> BuildInfo:
        fields: dict[str, str] = {}
        stages: dict[int, tuple[str, str, str]] = {}
        options: dict[str, str] = {}
        for key, value, offset in _key_value_lines(data):
            if key.startswith("stage."):
                try:
                    _, idx, stage = key.split(".", 2)
                    plugin_id, version = value.split(" ")
                    stages[int(idx)] = (stage, plugin_id, version)
                except ValueError:
                    raise FormatError(f"bad stage entry {key!r}", offset) from None
            elif key.startswith("option."):
                options[key[len("option."):]] = value
            else:
                fields[key] = value
        try:
            return cls(
                tool_version=fields["tool_version"],
                source_sha256=fields["source_sha256"],
                backend_sha256=fields["backend_sha256"],
                master_seed=int(fields["master_seed"]),
                stage_plugins=tuple(stages[i] for i in sorted(stages)),
                options=options,
                artifact_sha256=fields["artifact_sha256"],
                schema_version=int(fields["schema_version"]),
            )
        except KeyError as exc:
            raise FormatError(f"missing buildinfo field {exc.args[0]!r}") from None
        except ValueError as exc:
            raise FormatError(str(exc)) from None


def emit_buildinfo(config, source_sha256: str, backend_digest: str, artifact_sha256: str) -> bytes:
    """Canonical buildinfo bytes for a pipeline ``config`` and the build's hashes."""
    return make_buildinfo(config, source_sha256, backend_digest, artifact_sha256).to_bytes()


def make_buildinfo(config, source_sha256: str, backend_digest: str, artifact_sha256: str) -> BuildInfo:
    from . import __version__

    return BuildInfo(
        tool_version=__version__,
        source_sha256=source_sha256,
        backend_sha256=backend_digest,
        master_seed=config.master_seed,
        stage_plugins=tuple((p.stage, p.plugin_id, p.version) for p in config.plugins),
        options=config.options,
        artifact_sha256=artifact_sha256,
    )
