"""Exception hierarchy shared by every stage of the toolchain."""

from __future__ import annotations


class QrbError(Exception):
    """Base class for all toolchain errors."""


# circuit-core


class CircuitError(QrbError, ValueError):
    """An instruction or circuit violates a structural invariant.

    ``position`` is the index of the offending instruction, or ``None`` when
    the problem is with the circuit as a whole.
    """

    def __init__(self, message: str, position: int | None = None):
        if position is not None:
            message = f"instruction {position}: {message}"
        super().__init__(message)
        self.position = position


class IndexOutOfRange(CircuitError):
    pass


class ArityMismatch(CircuitError):
    pass


class DuplicateQubit(ArityMismatch):
    pass


class ParamMismatch(CircuitError):
    pass


class LengthMismatch(QrbError, ValueError):
    pass


# qasm-io


class QasmSyntaxError(QrbError, ValueError):
    def __init__(self, line: int, column: int, message: str):
        super().__init__(f"{line}:{column}: {message}")
        self.line = line
        self.column = column
        self.message = message


class UnsupportedFeature(QrbError, ValueError):
    def __init__(self, name: str, line: int | None = None):
        where = f" (line {line})" if line is not None else ""
        super().__init__(f"unsupported feature: {name}{where}")
        self.name = name
        self.line = line


class FormatError(QrbError, ValueError):
    """Malformed artifact, buildinfo or backend file; ``offset`` is a byte index."""

    def __init__(self, message: str, offset: int = 0):
        super().__init__(f"byte {offset}: {message}")
        self.offset = offset


class UnscheduledCircuit(QrbError, ValueError):
    pass


# transpile


class CircuitTooLarge(QrbError, ValueError):
    pass


class DisconnectedBackend(QrbError, ValueError):
    pass


class UntranslatableGate(QrbError, ValueError):
    pass


class MissingDuration(QrbError, KeyError):
    pass


class UnknownPlugin(QrbError, KeyError):
    pass


# stego


class PayloadTooLarge(QrbError, ValueError):
    pass


class ValueTooLarge(QrbError, ValueError):
    pass


class FrameError(QrbError, ValueError):
    pass


class NoFreeQubit(QrbError, ValueError):
    pass


class NonIntegerAngle(QrbError, ValueError):
    pass


class InsufficientRZGates(QrbError, ValueError):
    pass


# tamper


class InvalidPosition(QrbError, IndexError):
    pass


class InvalidRetarget(QrbError, ValueError):
    pass


# sim


class TooManyQubits(QrbError, ValueError):
    pass


class UnsupportedKind(QrbError, ValueError):
    pass
