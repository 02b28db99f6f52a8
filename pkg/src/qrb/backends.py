"""Shipped backend models and small generators for synthetic ones."""

from __future__ import annotations

from importlib import resources
from pathlib import Path

from .artifact import parse_backend, serialize_backend
from .circuit import BackendModel, Kind

BASIS = frozenset({Kind.X, Kind.SX, Kind.RZ, Kind.CZ, Kind.MEASURE, Kind.RESET, Kind.DELAY})

DEFAULT_DURATIONS = {
    (Kind.X, None): 160,
    (Kind.SX, None): 160,
    (Kind.RZ, None): 8,
    (Kind.CZ, None): 640,
    (Kind.MEASURE, None): 4000,
    (Kind.RESET, None): 2000,
    (Kind.DELAY, None): 1,
}

_ONE_QUBIT_ERRORS = {
    (Kind.X, None): 2.5e-4,
    (Kind.SX, None): 2.5e-4,
    (Kind.RZ, None): 0.0,
    (Kind.MEASURE, None): 0.015,
    (Kind.RESET, None): 0.01,
}

# Edge errors for the 12-qubit line; qubit 5 has the lowest mean CZ error.
_DEMO12_CZ_ERRORS = [0.012, 0.011, 0.009, 0.008, 0.006, 0.007, 0.010, 0.013, 0.009, 0.011, 0.014]

# Coupling map of a 27-qubit heavy-hex device.
HEAVY_HEX_27 = (
    (0, 1), (1, 2), (1, 4), (2, 3), (3, 5), (4, 7), (5, 8), (6, 7), (7, 10),
    (8, 9), (8, 11), (10, 12), (11, 14), (12, 13), (12, 15), (13, 14), (14, 16),
    (15, 18), (16, 19), (17, 18), (18, 21), (19, 20), (19, 22), (21, 23),
    (22, 25), (23, 24), (24, 25), (25, 26),
)


def line_backend(n: int, name: str | None = None, cz_errors=None) -> BackendModel:
    """Linear chain 0-1-...-(n-1) with the default basis and durations."""
    edges = [(i, i + 1) for i in range(n - 1)]
    errors = dict(_ONE_QUBIT_ERRORS)
    if cz_errors is None:
        errors[(Kind.CZ, None)] = 0.01
    else:
        errors.update({(Kind.CZ, e): err for e, err in zip(edges, cz_errors)})
    return BackendModel(
        name=name or f"line{n}",
        num_qubits=n,
        coupling_map=frozenset(edges),
        basis_gates=BASIS,
        durations_dt=DEFAULT_DURATIONS,
        error_rates=errors,
    )


def demo12() -> BackendModel:
    return line_backend(12, "demo12", _DEMO12_CZ_ERRORS)


def heavy_hex27() -> BackendModel:
    errors = dict(_ONE_QUBIT_ERRORS)
    for a, b in HEAVY_HEX_27:
        errors[(Kind.CZ, (a, b))] = round(0.006 + 0.001 * ((7 * a + 3 * b) % 9), 6)
    return BackendModel(
        name="hex27",
        num_qubits=27,
        coupling_map=frozenset(HEAVY_HEX_27),
        basis_gates=BASIS,
        durations_dt=DEFAULT_DURATIONS,
        error_rates=errors,
    )


BUILTIN = ("demo12", "hex27")


def builtin_backend(name: str) -> BackendModel:
    if name not in BUILTIN:
        raise KeyError(f"no built-in backend {name!r}; choose from {', '.join(BUILTIN)}")
    data = resources.files("qrb.data").joinpath(f"{name}.backend").read_bytes()
    return parse_backend(data)


def load_backend(spec: str | Path) -> BackendModel:
    """Load a backend from a file path, falling back to a built-in name."""
    path = Path(spec)
    if path.is_file():
        return parse_backend(path.read_bytes())
    if str(spec) in BUILTIN:
        return builtin_backend(str(spec))
    raise FileNotFoundError(f"backend file not found: {spec}")


def write_fixtures(directory: Path) -> None:
    """Regenerate the shipped ``.backend`` files from the generators above."""
    for model in (demo12(), heavy_hex27()):
        (directory / f"{model.name}.backend").write_bytes(serialize_backend(model))
