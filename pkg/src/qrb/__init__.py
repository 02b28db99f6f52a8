"""Reproducible quantum builds: a deterministic transpiler, covert-channel and
tampering demonstrations, and a rebuild-and-compare verifier."""

__version__ = "0.1.0"

from .artifact import Artifact, BuildInfo, backend_sha256, parse_artifact, serialize_artifact  # noqa: E402
from .backends import builtin_backend, demo12, heavy_hex27, load_backend  # noqa: E402
from .circuit import BackendModel, Circuit, Instruction, Kind, Layout, compose_layout  # noqa: E402
from .qasm import emit_source, parse_source  # noqa: E402
from .sim import hellinger_fidelity, sample, simulate, tvd  # noqa: E402
from .tamper import TamperSpec, apply_tamper, distribution_delta, ghz_circuit, grover3_circuit  # noqa: E402
from .transpile import PipelineConfig, build, run_pipeline, transpile  # noqa: E402
from .verify import Status, Verdict, verify_build  # noqa: E402

__all__ = [
    "Artifact", "BackendModel", "BuildInfo", "Circuit", "Instruction", "Kind", "Layout",
    "PipelineConfig", "Status", "TamperSpec", "Verdict",
    "apply_tamper", "backend_sha256", "build", "builtin_backend", "compose_layout", "demo12",
    "distribution_delta", "emit_source", "ghz_circuit", "grover3_circuit", "hellinger_fidelity",
    "heavy_hex27", "load_backend", "parse_artifact", "parse_source", "run_pipeline", "sample",
    "serialize_artifact", "simulate", "transpile", "tvd", "verify_build",
]
