"""Reader and writer for circuit source in a small OpenQASM 2 subset.

Supported statements: ``OPENQASM 2.0;``, ``include "...";``, ``qreg``,
``creg``, the gates ``h x sx rz cx cz swap ccx ccz``, ``measure``, ``reset``,
``barrier`` and ``delay(<dt>)``. Gate arguments may be whole registers, in
which case the statement is broadcast over the register.
"""

from __future__ import annotations

import ast
import math
import operator
import re

from .circuit import ARITY, Circuit, Instruction, Kind, validate_circuit
from .errors import CircuitError, QasmSyntaxError, UnsupportedFeature

_GATES = {
    "h": Kind.H, "x": Kind.X, "sx": Kind.SX, "rz": Kind.RZ,
    "cx": Kind.CX, "CX": Kind.CX, "cz": Kind.CZ, "swap": Kind.SWAP,
    "ccx": Kind.CCX, "ccz": Kind.CCZ,
}

# Recognised OpenQASM keywords that this subset deliberately rejects.
_UNSUPPORTED = {
    "if", "gate", "opaque", "u", "u1", "u2", "u3", "U", "y", "z", "s", "sdg",
    "t", "tdg", "rx", "ry", "cy", "ch", "crz", "cu1", "cu3", "rxx", "rzz", "id",
    "for", "while", "def", "defcal", "box", "qubit", "bit", "input", "output",
}

_IDENT = r"[A-Za-z_][A-Za-z0-9_]*"
_ARG = re.compile(rf"^\s*({_IDENT})\s*(?:\[\s*(\d+)\s*\])?\s*$")
_DECL = re.compile(rf"^(qreg|creg)\s+({_IDENT})\s*\[\s*(\d+)\s*\]$")
_MEASURE = re.compile(r"^measure\s+(.+?)\s*->\s*(.+)$")
_GATE = re.compile(rf"^({_IDENT})\s*(?:\((.*)\))?\s*(.*)$", re.S)

_BINOPS = {ast.Add: operator.add, ast.Sub: operator.sub, ast.Mult: operator.mul, ast.Div: operator.truediv,
           ast.Pow: operator.pow}
_UNOPS = {ast.USub: operator.neg, ast.UAdd: operator.pos}


def _eval_angle(expr: str) -> float:
    """Evaluate a numeric angle expression (literals, ``pi``, + - * / **)."""

    def walk(node):
        if isinstance(node, ast.Expression):
            return walk(node.body)
        if isinstance(node, ast.Constant) and isinstance(node.value, (int, float)) and not isinstance(node.value, bool):
            return float(node.value)
        if isinstance(node, ast.Name) and node.id in ("pi", "π"):
            return math.pi
        if isinstance(node, ast.BinOp) and type(node.op) in _BINOPS:
            return _BINOPS[type(node.op)](walk(node.left), walk(node.right))
        if isinstance(node, ast.UnaryOp) and type(node.op) in _UNOPS:
            return _UNOPS[type(node.op)](walk(node.operand))
        raise ValueError(f"unsupported expression {expr!r}")

    return float(walk(ast.parse(expr.strip(), mode="eval")))


def _statements(text: str):
    """Yield ``(statement, line, column)`` with comments removed."""
    clean = re.sub(r"//[^\n]*", lambda m: " " * len(m.group()), text)
    start = 0
    for m in re.finditer(";", clean):
        chunk = clean[start:m.start()]
        stripped = chunk.strip()
        if stripped:
            offset = start + (len(chunk) - len(chunk.lstrip()))
            line = clean.count("\n", 0, offset) + 1
            col = offset - (clean.rfind("\n", 0, offset) + 1) + 1
            yield " ".join(stripped.split()), line, col
        start = m.end()
    tail = clean[start:]
    if tail.strip():
        offset = start + (len(tail) - len(tail.lstrip()))
        line = clean.count("\n", 0, offset) + 1
        col = offset - (clean.rfind("\n", 0, offset) + 1) + 1
        raise QasmSyntaxError(line, col, "missing ';' after final statement")


def parse_source(text: str, name: str = "circuit") -> Circuit:
    """Parse source text into a virtual :class:`Circuit`."""
    qregs: dict[str, tuple[int, int]] = {}
    cregs: dict[str, tuple[int, int]] = {}
    nq = nc = 0
    out: list[Instruction] = []

    def resolve(arg: str, regs, what: str, line: int, col: int) -> list[int]:
        m = _ARG.match(arg)
        if not m:
            raise QasmSyntaxError(line, col, f"bad {what} argument {arg.strip()!r}")
        reg, idx = m.group(1), m.group(2)
        if reg not in regs:
            raise QasmSyntaxError(line, col, f"undeclared {what} register {reg!r}")
        base, size = regs[reg]
        if idx is None:
            return list(range(base, base + size))
        if int(idx) >= size:
            raise QasmSyntaxError(line, col, f"index {idx} out of range for {reg}[{size}]")
        return [base + int(idx)]

    for stmt, line, col in _statements(text):
        head = re.match(rf"{_IDENT}", stmt)
        word = head.group() if head else ""
        if word == "OPENQASM":
            if not re.fullmatch(r"OPENQASM\s+2(\.0)?", stmt):
                raise UnsupportedFeature(stmt, line)
            continue
        if word == "include":
            continue
        if word in ("qreg", "creg"):
            m = _DECL.match(stmt)
            if not m:
                raise QasmSyntaxError(line, col, f"bad declaration {stmt!r}")
            kind, reg, size = m.group(1), m.group(2), int(m.group(3))
            if reg in qregs or reg in cregs:
                raise QasmSyntaxError(line, col, f"register {reg!r} redeclared")
            if kind == "qreg":
                qregs[reg] = (nq, size)
                nq += size
            else:
                cregs[reg] = (nc, size)
                nc += size
            continue
        if word in _UNSUPPORTED:
            raise UnsupportedFeature(word or stmt, line)
        if word == "measure":
            m = _MEASURE.match(stmt)
            if not m:
                raise QasmSyntaxError(line, col, "expected 'measure <qubit> -> <bit>'")
            qs = resolve(m.group(1), qregs, "quantum", line, col)
            cs = resolve(m.group(2), cregs, "classical", line, col)
            if len(qs) != len(cs):
                raise QasmSyntaxError(line, col, "measure register sizes differ")
            out.extend(Instruction(Kind.MEASURE, (q,), clbits=(c,)) for q, c in zip(qs, cs))
            continue
        m = _GATE.match(stmt)
        if not m or not m.group(3).strip():
            raise QasmSyntaxError(line, col, f"cannot parse statement {stmt!r}")
        gname, paren, rest = m.group(1), m.group(2), m.group(3)
        args = [resolve(a, qregs, "quantum", line, col) for a in rest.split(",")]
        if gname == "reset":
            if len(args) != 1 or paren is not None:
                raise QasmSyntaxError(line, col, "reset takes one argument")
            out.extend(Instruction(Kind.RESET, (q,)) for q in args[0])
            continue
        if gname == "barrier":
            qs = [q for a in args for q in a]
            out.append(Instruction(Kind.BARRIER, tuple(qs)))
            continue
        if gname == "delay":
            try:
                dur = int(paren)
            except (TypeError, ValueError):
                raise QasmSyntaxError(line, col, "delay needs an integer duration in dt") from None
            out.extend(Instruction(Kind.DELAY, (q,), duration_dt=dur) for a in args for q in a)
            continue
        if gname not in _GATES:
            raise UnsupportedFeature(gname, line)
        kind = _GATES[gname]
        params: tuple[float, ...] = ()
        if kind is Kind.RZ:
            if paren is None:
                raise QasmSyntaxError(line, col, "rz needs an angle")
            try:
                params = (_eval_angle(paren),)
            except (ValueError, SyntaxError, ZeroDivisionError) as exc:
                raise QasmSyntaxError(line, col, str(exc)) from None
        elif paren is not None:
            raise QasmSyntaxError(line, col, f"{gname} takes no parameters")
        if len(args) != ARITY[kind]:
            raise QasmSyntaxError(line, col, f"{gname} takes {ARITY[kind]} arguments, got {len(args)}")
        width = {len(a) for a in args if len(a) > 1}
        if len(width) > 1:
            raise QasmSyntaxError(line, col, "broadcast registers have different sizes")
        reps = width.pop() if width else 1
        for i in range(reps):
            qs = tuple(a[i] if len(a) > 1 else a[0] for a in args)
            out.append(Instruction(kind, qs, params))

    if nq == 0:
        raise QasmSyntaxError(1, 1, "no qreg declared")
    circ = Circuit(nq, nc, tuple(out), name=name)
    try:
        validate_circuit(circ)
    except CircuitError as exc:
        raise QasmSyntaxError(0, 0, str(exc)) from None
    return circ


def emit_source(c: Circuit) -> str:
    """Write ``c`` as source text that :func:`parse_source` reads back exactly.

    Angles use ``repr``, which is the shortest decimal that round-trips the
    binary64 value.
    """
    lines = ["OPENQASM 2.0;", f"qreg q[{c.num_qubits}];"]
    if c.num_clbits:
        lines.append(f"creg c[{c.num_clbits}];")
    for ins in c.instructions:
        qs = ",".join(f"q[{q}]" for q in ins.qubits)
        if ins.kind is Kind.MEASURE:
            lines.append(f"measure {qs} -> c[{ins.clbits[0]}];")
        elif ins.kind is Kind.RZ:
            lines.append(f"rz({ins.angle!r}) {qs};")
        elif ins.kind is Kind.DELAY:
            lines.append(f"delay({ins.duration_dt}) {qs};")
        else:
            lines.append(f"{ins.kind.value} {qs};")
    return "\n".join(lines) + "\n"
