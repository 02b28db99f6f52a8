"""Rebuild-and-compare verification of artifacts against their buildinfo."""

from __future__ import annotations

import difflib
import enum
import re
from dataclasses import dataclass, field
from typing import Mapping

from .artifact import BuildInfo, backend_sha256
from .backends import BUILTIN, builtin_backend
from .circuit import BackendModel
from .errors import QrbError
from .transpile.pipeline import HONEST_PLUGINS, StagePlugin, build, config_from_buildinfo


class Status(str, enum.Enum):
    REPRODUCIBLE = "REPRODUCIBLE"
    NON_REPRODUCIBLE = "NON_REPRODUCIBLE"
    BUILD_ERROR = "BUILD_ERROR"

    @property
    def exit_code(self) -> int:
        return {"REPRODUCIBLE": 0, "BUILD_ERROR": 1, "NON_REPRODUCIBLE": 2}[self.value]


@dataclass(frozen=True)
class DiffLine:
    """One differing line; ``expected`` is None for an insertion, ``actual`` for a deletion."""

    line: int
    expected: str | None
    actual: str | None


@dataclass(frozen=True)
class Verdict:
    status: Status
    first_diff_offset: int | None = None
    diff_lines: tuple[DiffLine, ...] = ()
    message: str = ""
    rebuilt_sha256: str | None = field(default=None, compare=False)

    @property
    def exit_code(self) -> int:
        return self.status.exit_code

    def as_dict(self) -> dict:
        return {
            "status": self.status.value,
            "first_diff_offset": self.first_diff_offset,
            "diff_lines": [[d.line, d.expected, d.actual] for d in self.diff_lines],
            "message": self.message,
            "rebuilt_sha256": self.rebuilt_sha256,
        }


def first_diff_offset(a: bytes, b: bytes) -> int | None:
    if a == b:
        return None
    for i, (x, y) in enumerate(zip(a, b)):
        if x != y:
            return i
    return min(len(a), len(b))


def diff_lines(expected: bytes, actual: bytes) -> list[DiffLine]:
    """Line-level differences; line numbers are 1-based in ``expected``
    (or in ``actual`` for lines only it has)."""
    a = expected.decode("utf-8", "replace").splitlines()
    b = actual.decode("utf-8", "replace").splitlines()
    out: list[DiffLine] = []
    for tag, i1, i2, j1, j2 in difflib.SequenceMatcher(None, a, b, autojunk=False).get_opcodes():
        if tag == "equal":
            continue
        common = min(i2 - i1, j2 - j1)
        for k in range(common):
            out.append(DiffLine(i1 + k + 1, a[i1 + k], b[j1 + k]))
        for k in range(i1 + common, i2):
            out.append(DiffLine(k + 1, a[k], None))
        for k in range(j1 + common, j2):
            out.append(DiffLine(k + 1, None, b[k]))
    return out


_TIMING = re.compile(r" t=\d+ d=\d+")


def strip_timing(line: str | None) -> str | None:
    return None if line is None else _TIMING.sub("", line)


def structural_diff(expected: bytes, actual: bytes) -> list[DiffLine]:
    """Differences once start times and durations are ignored.

    Idle DELAY lines are scheduling by-products and are dropped as well.
    """
    def clean(data: bytes) -> bytes:
        lines = [strip_timing(ln) for ln in data.decode("utf-8", "replace").splitlines()]
        return "\n".join(ln for ln in lines if not ln.startswith("delay ")).encode()

    return diff_lines(clean(expected), clean(actual))


def compare(expected: bytes, actual: bytes) -> Verdict:
    if expected == actual:
        return Verdict(Status.REPRODUCIBLE)
    return Verdict(Status.NON_REPRODUCIBLE, first_diff_offset(expected, actual), tuple(diff_lines(expected, actual)))


def find_backend(digest: str) -> BackendModel | None:
    for name in BUILTIN:
        model = builtin_backend(name)
        if backend_sha256(model) == digest:
            return model
    return None


def verify_build(source: str, buildinfo: bytes | BuildInfo, artifact: bytes,
                 backend: BackendModel | None = None,
                 registry: Mapping[tuple[str, str], StagePlugin] = HONEST_PLUGINS) -> Verdict:
    """Rebuild ``source`` as ``buildinfo`` describes and byte-compare with ``artifact``.

    Only plugins in ``registry`` (the honest ones by default) may be used; a
    buildinfo naming anything else is a build error rather than a silent
    substitution.
    """
    from .artifact import sha256_hex

    try:
        info = buildinfo if isinstance(buildinfo, BuildInfo) else BuildInfo.from_bytes(buildinfo)
    except QrbError as exc:
        return Verdict(Status.BUILD_ERROR, message=f"unreadable buildinfo: {exc}")
    if backend is None:
        backend = find_backend(info.backend_sha256)
        if backend is None:
            return Verdict(Status.BUILD_ERROR, message=f"no backend model with hash {info.backend_sha256}")
    elif backend_sha256(backend) != info.backend_sha256:
        return Verdict(Status.BUILD_ERROR, message="backend model does not match buildinfo backend_sha256")
    if sha256_hex(source.encode()) != info.source_sha256:
        return Verdict(Status.BUILD_ERROR, message="source does not match buildinfo source_sha256")
    try:
        config = config_from_buildinfo(info, backend, registry)
        rebuilt, rebuilt_info, _ = build(source, config)
    except QrbError as exc:
        return Verdict(Status.BUILD_ERROR, message=f"rebuild failed: {exc}")
    verdict = compare(rebuilt.data, artifact)
    notes = []
    if rebuilt_info.to_bytes() != info.to_bytes():
        notes.append("buildinfo differs from the rebuild's buildinfo")
    if verdict.status is Status.NON_REPRODUCIBLE:
        notes.insert(0, f"artifact differs from rebuild at byte {verdict.first_diff_offset}")
    return Verdict(verdict.status, verdict.first_diff_offset, verdict.diff_lines, "; ".join(notes), rebuilt.sha256)
