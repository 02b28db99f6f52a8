"""``qrb`` command line: build, verify, diff, stego, demo, simulate.

Exit codes: 0 success or reproducible, 1 operational error, 2 non-reproducible
(or, for ``diff``, different).
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from . import __version__
from .artifact import Artifact
from .backends import load_backend
from .errors import QrbError
from .qasm import emit_source, parse_source
from .sim import normalize_counts, sample, simulate
from .stego import CHANNELS, STEALTH_LEVELS, decode, leaky_plugin
from .tamper import TamperSpec, apply_tamper, distribution_delta, ghz_circuit, grover3_circuit
from .transpile.pipeline import STAGES, PipelineConfig, build
from .verify import diff_lines, structural_diff, verify_build

OK, ERROR, DIFFERENT = 0, 1, 2


class CliError(Exception):
    pass


def _read_bytes(path: str) -> bytes:
    if path == "-":
        return sys.stdin.buffer.read()
    try:
        return Path(path).read_bytes()
    except OSError as exc:
        raise CliError(f"cannot read {path}: {exc.strerror}") from None


def _read_text(path: str) -> str:
    try:
        return _read_bytes(path).decode("utf-8")
    except UnicodeDecodeError:
        raise CliError(f"{path} is not UTF-8") from None


def _backend(spec: str):
    try:
        return load_backend(spec)
    except FileNotFoundError:
        raise CliError(f"backend {spec!r} not found (give a file or one of the built-in names)") from None


def _seed(text: str) -> int:
    value = int(text, 0)
    if not 0 <= value < 2**64:
        raise argparse.ArgumentTypeError("seed must be an unsigned 64-bit integer")
    return value


def _write(out: Path, name: str, data: bytes) -> Path:
    out.mkdir(parents=True, exist_ok=True)
    path = out / name
    path.write_bytes(data)
    return path


def _config(args, backend, payload: bytes | None) -> PipelineConfig:
    overrides = {}
    for stage in STAGES:
        plugin_id = getattr(args, f"{stage}_plugin")
        if plugin_id is None:
            continue
        if plugin_id == "leaky":
            if payload is None:
                raise CliError(f"--{stage}-plugin leaky needs --payload")
            overrides[stage] = leaky_plugin(stage, payload, args.stealth)
        else:
            overrides[stage] = plugin_id
    return PipelineConfig.default(backend, args.seed, **overrides)


def _emit(args, report: dict, text: str) -> None:
    if getattr(args, "report", None) == "json":
        print(json.dumps(report, indent=2, sort_keys=True))
    else:
        print(text)


# -- commands ------------------------------------------------------------------


def cmd_build(args) -> int:
    source = _read_text(args.source)
    backend = _backend(args.backend)
    payload = _read_bytes(args.payload) if args.payload else None
    artifact, info, _ = build(source, _config(args, backend, payload))
    stem = Path(args.source).stem if args.source != "-" else "circuit"
    out = Path(args.out)
    art_path = _write(out, f"{stem}.qrbart", artifact.data)
    info_path = _write(out, f"{stem}.buildinfo", info.to_bytes())
    _emit(args, {"artifact": str(art_path), "buildinfo": str(info_path), "sha256": artifact.sha256},
          f"{artifact.sha256}  {art_path}")
    return OK


def cmd_verify(args) -> int:
    source = _read_text(args.source)
    backend = _backend(args.backend) if args.backend else None
    verdict = verify_build(source, _read_bytes(args.buildinfo), _read_bytes(args.artifact), backend)
    lines = [verdict.status.value]
    if verdict.message:
        lines.append(verdict.message)
    for d in verdict.diff_lines[: args.max_lines]:
        lines.append(f"  line {d.line}: expected {d.expected!r} got {d.actual!r}")
    _emit(args, verdict.as_dict(), "\n".join(lines))
    return verdict.exit_code


def cmd_diff(args) -> int:
    a, b = _read_bytes(args.a), _read_bytes(args.b)
    diffs = structural_diff(a, b) if args.ignore_timing else diff_lines(a, b)
    same = a == b if not args.ignore_timing else not diffs
    report = {"identical": same, "diff_lines": [[d.line, d.expected, d.actual] for d in diffs]}
    text = []
    for d in diffs:
        if d.expected is not None:
            text.append(f"-{d.line}: {d.expected}")
        if d.actual is not None:
            text.append(f"+{d.line}: {d.actual}")
    _emit(args, report, "\n".join(text) if text else "identical")
    return OK if same else DIFFERENT


def cmd_stego_encode(args) -> int:
    """Build twice, honestly and with the leaky plugin; keep the honest buildinfo.

    That is what an attacker would publish: a buildinfo that names only honest
    plugins next to an artifact that carries the payload.
    """
    source = _read_text(args.source)
    backend = _backend(args.backend)
    payload = _read_bytes(args.payload)
    honest = PipelineConfig.default(backend, args.seed)
    _, info, _ = build(source, honest)
    artifact, _, _ = build(source, honest.replace_plugin(leaky_plugin(args.channel, payload, args.stealth)))
    stem = Path(args.source).stem
    out = Path(args.out)
    art_path = _write(out, f"{stem}.qrbart", artifact.data)
    _write(out, f"{stem}.buildinfo", info.to_bytes())
    _emit(args, {"artifact": str(art_path), "sha256": artifact.sha256, "channel": args.channel,
                 "payload_bytes": len(payload)}, f"{artifact.sha256}  {art_path}")
    return OK


def cmd_stego_decode(args) -> int:
    payload = decode(args.channel, Artifact.from_bytes(_read_bytes(args.artifact)), args.stealth)
    if args.out:
        Path(args.out).write_bytes(payload)
    else:
        sys.stdout.buffer.write(payload)
        sys.stdout.flush()
    return OK


DEMO_SOURCES = {"ghz": lambda: ghz_circuit(7), "grover": grover3_circuit}


def cmd_demo(args) -> int:
    backend = _backend(args.backend)
    source = emit_source(DEMO_SOURCES[args.circuit]())
    config = PipelineConfig.default(backend, args.seed)
    genuine, info, _ = build(source, config)
    honest_verdict = verify_build(source, info, genuine.data, backend)
    report: dict = {
        "circuit": args.circuit,
        "backend": backend.name,
        "seed": args.seed,
        "genuine_sha256": genuine.sha256,
        "genuine": simulate(genuine.circuit),
        "genuine_verdict": honest_verdict.status.value,
    }
    text = [f"genuine  {report['genuine']}  verdict {honest_verdict.status.value}"]
    out = Path(args.out) if args.out else None
    if out:
        _write(out, f"{args.circuit}.qrbart", genuine.data)
        _write(out, f"{args.circuit}.buildinfo", info.to_bytes())
    if args.tamper:
        spec = TamperSpec.parse(args.tamper).resolve(genuine.circuit, backend)
        tampered = apply_tamper(genuine, spec, backend)
        verdict = verify_build(source, info, tampered.data, backend)
        delta = distribution_delta(genuine, tampered, shots=args.shots, seed=args.seed)
        report.update({
            "tamper": str(spec),
            "tampered_sha256": tampered.sha256,
            "tampered_verdict": verdict.status.value,
            "first_diff_offset": verdict.first_diff_offset,
            "changed_lines": [[d.line, d.expected, d.actual] for d in structural_diff(genuine.data, tampered.data)],
            **delta.as_dict(),
        })
        text += [
            f"tampered {delta.tampered}  verdict {verdict.status.value}  ({spec})",
            f"TVD {delta.tvd:.6f}  Hellinger fidelity {delta.fidelity:.6f}",
            f"top outcomes {list(delta.top_genuine)} -> {list(delta.top_tampered)}",
        ]
        if out:
            _write(out, f"{args.circuit}.tampered.qrbart", tampered.data)
    if out:
        _write(out, "report.json", (json.dumps(report, indent=2, sort_keys=True) + "\n").encode())
    _emit(args, report, "\n".join(text))
    return OK


def cmd_simulate(args) -> int:
    data = _read_bytes(args.file)
    if data.startswith(b"QRBART"):
        circuit = Artifact.from_bytes(data).circuit
    else:
        circuit = parse_source(data.decode("utf-8"))
    if args.shots:
        dist: dict = sample(circuit, args.shots, args.seed)
        report = {"counts": dist, "frequencies": normalize_counts(dist)}
    else:
        dist = simulate(circuit)
        report = {"distribution": dist}
    _emit(args, report, "\n".join(f"{k} {v}" for k, v in dist.items()))
    return OK


# -- parser --------------------------------------------------------------------


def _common(p: argparse.ArgumentParser, backend_required: bool = True) -> None:
    if backend_required:
        p.add_argument("--backend", default="demo12", help="backend file or built-in name (demo12, hex27)")
    p.add_argument("--seed", type=_seed, default=0, help="master seed (unsigned 64-bit)")
    p.add_argument("--report", choices=["json"], help="machine-readable output on stdout")


def make_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="qrb", description="Reproducible quantum circuit builds.")
    parser.add_argument("--version", action="version", version=f"qrb {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("build", help="transpile a source file into an artifact and buildinfo")
    p.add_argument("source")
    _common(p)
    for stage in STAGES:
        p.add_argument(f"--{stage}-plugin", dest=f"{stage}_plugin", metavar="ID")
    p.add_argument("--payload", help="payload file for a leaky plugin ('-' for stdin)")
    p.add_argument("--stealth", type=int, choices=STEALTH_LEVELS, default=6)
    p.add_argument("--out", default=".")
    p.set_defaults(func=cmd_build)

    p = sub.add_parser("verify", help="rebuild from buildinfo and byte-compare the artifact")
    p.add_argument("source")
    p.add_argument("buildinfo")
    p.add_argument("artifact")
    p.add_argument("--backend", help="backend file; default: match the built-ins by hash")
    p.add_argument("--report", choices=["json"])
    p.add_argument("--max-lines", type=int, default=20, help="diff lines to print")
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("diff", help="line-level diff of two artifacts")
    p.add_argument("a")
    p.add_argument("b")
    p.add_argument("--ignore-timing", action="store_true", help="ignore t=/d= fields and delay lines")
    p.add_argument("--report", choices=["json"])
    p.set_defaults(func=cmd_diff)

    p = sub.add_parser("stego", help="covert-channel encoder and decoder")
    ssub = p.add_subparsers(dest="action", required=True)
    e = ssub.add_parser("encode", help="build with a leaky stage; writes artifact and honest buildinfo")
    e.add_argument("source")
    e.add_argument("--channel", choices=CHANNELS, required=True)
    e.add_argument("--payload", required=True, help="payload file ('-' for stdin)")
    e.add_argument("--stealth", type=int, choices=STEALTH_LEVELS, default=6)
    e.add_argument("--out", default=".")
    _common(e)
    e.set_defaults(func=cmd_stego_encode)
    d = ssub.add_parser("decode", help="extract a payload from an artifact")
    d.add_argument("artifact")
    d.add_argument("--channel", choices=CHANNELS, required=True)
    d.add_argument("--stealth", type=int, choices=STEALTH_LEVELS, default=6)
    d.add_argument("--out", help="write payload here instead of stdout")
    d.set_defaults(func=cmd_stego_decode)

    p = sub.add_parser("demo", help="GHZ-7 / Grover-3 integrity demo with optional tampering")
    p.add_argument("circuit", choices=sorted(DEMO_SOURCES))
    p.add_argument("--tamper", help="reset@<idx> or retarget@<idx>:<q1>,<q2> (anchors: last-measure, last-cz)")
    p.add_argument("--shots", type=int, help="also sample this many shots")
    p.add_argument("--out", help="directory for artifacts and report.json")
    _common(p)
    p.set_defaults(func=cmd_demo, seed=42)

    p = sub.add_parser("simulate", help="ideal outcome distribution of an artifact or source")
    p.add_argument("file")
    p.add_argument("--shots", type=int, help="sample instead of exact probabilities")
    _common(p, backend_required=False)
    p.set_defaults(func=cmd_simulate)
    return parser


def main(argv: list[str] | None = None) -> int:
    args = make_parser().parse_args(argv)
    try:
        return args.func(args)
    except (QrbError, CliError, ValueError, KeyError, OSError) as exc:
        print(f"qrb: error: {exc}", file=sys.stderr)
        return ERROR


if __name__ == "__main__":
    sys.exit(main())
