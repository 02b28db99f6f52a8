"""Stage plugins, pipeline configuration and the end-to-end build."""

from __future__ import annotations

import hashlib
from dataclasses import dataclass, field
from typing import Callable, Mapping

from .. import __version__
from ..artifact import Artifact, BuildInfo, backend_sha256, make_buildinfo, serialize_artifact, sha256_hex
from ..circuit import BackendModel, Circuit, Layout, validate_circuit
from ..errors import UnknownPlugin
from ..qasm import parse_source
from . import stages

STAGES = ("init", "layout", "routing", "translation", "optimization", "scheduling")

DEFAULT_OPTIONS = {"optimization_level": "1"}

# run(circuit, layout, backend, seed, options) -> (circuit, layout)
StageFn = Callable[[Circuit, "Layout | None", BackendModel, int, Mapping[str, str]], "tuple[Circuit, Layout | None]"]


@dataclass(frozen=True)
class StagePlugin:
    stage: str
    plugin_id: str
    version: str
    run: StageFn = field(compare=False, repr=False)

    def __post_init__(self):
        if self.stage not in STAGES:
            raise ValueError(f"unknown stage {self.stage!r}")

    @property
    def key(self) -> tuple[str, str, str]:
        return (self.stage, self.plugin_id, self.version)


def derive_stage_seed(master_seed: int, stage_name: str) -> int:
    """First 8 bytes (big-endian) of SHA-256(master_seed as u64 BE || stage name)."""
    digest = hashlib.sha256(master_seed.to_bytes(8, "big") + stage_name.encode()).digest()
    return int.from_bytes(digest[:8], "big")


def _init(c, layout, b, seed, opts):
    return stages.stage_init(c), layout


def _layout(method):
    def run(c, layout, b, seed, opts):
        return stages.stage_layout(c, b, seed, method)

    return run


def _routing(c, layout, b, seed, opts):
    return stages.stage_routing(c, layout, b, seed)


def _translation(c, layout, b, seed, opts):
    return stages.stage_translation(c, b), layout


def _optimization(c, layout, b, seed, opts):
    return stages.stage_optimization(c, int(opts.get("optimization_level", "1"))), layout


def _scheduling(c, layout, b, seed, opts):
    return stages.stage_scheduling(c, b), layout


HONEST_PLUGINS: dict[tuple[str, str], StagePlugin] = {
    (p.stage, p.plugin_id): p
    for p in (
        StagePlugin("init", "default", __version__, _init),
        StagePlugin("layout", "greedy", __version__, _layout("greedy")),
        StagePlugin("layout", "trivial", __version__, _layout("trivial")),
        StagePlugin("layout", "random", __version__, _layout("random")),
        StagePlugin("routing", "bfs", __version__, _routing),
        StagePlugin("translation", "default", __version__, _translation),
        StagePlugin("optimization", "default", __version__, _optimization),
        StagePlugin("scheduling", "asap", __version__, _scheduling),
    )
}

DEFAULT_PLUGIN_IDS = {
    "init": "default",
    "layout": "greedy",
    "routing": "bfs",
    "translation": "default",
    "optimization": "default",
    "scheduling": "asap",
}


def honest_plugin(stage: str, plugin_id: str | None = None) -> StagePlugin:
    plugin_id = plugin_id or DEFAULT_PLUGIN_IDS[stage]
    try:
        return HONEST_PLUGINS[(stage, plugin_id)]
    except KeyError:
        raise UnknownPlugin(f"no honest {stage} plugin named {plugin_id!r}") from None


@dataclass(frozen=True)
class PipelineConfig:
    backend: BackendModel
    master_seed: int
    plugins: tuple[StagePlugin, ...]
    options: Mapping[str, str] = field(default_factory=lambda: dict(DEFAULT_OPTIONS))

    def __post_init__(self):
        object.__setattr__(self, "plugins", tuple(self.plugins))
        object.__setattr__(self, "options", dict(sorted(self.options.items())))
        if tuple(p.stage for p in self.plugins) != STAGES:
            raise ValueError(f"plugins must cover the stages in order {STAGES}")
        if not 0 <= self.master_seed < 2**64:
            raise ValueError("master_seed must fit in 64 unsigned bits")

    @classmethod
    def default(cls, backend: BackendModel, master_seed: int = 0, options: Mapping[str, str] | None = None,
                **overrides: StagePlugin | str) -> PipelineConfig:
        """Honest configuration; keyword overrides replace a stage by plugin or by id."""
        plugins = []
        for stage in STAGES:
            choice = overrides.pop(stage, None)
            plugins.append(choice if isinstance(choice, StagePlugin) else honest_plugin(stage, choice))
        if overrides:
            raise TypeError(f"unknown stages: {', '.join(overrides)}")
        opts = dict(DEFAULT_OPTIONS)
        opts.update(options or {})
        return cls(backend, master_seed, tuple(plugins), opts)

    def replace_plugin(self, plugin: StagePlugin) -> PipelineConfig:
        plugins = tuple(plugin if p.stage == plugin.stage else p for p in self.plugins)
        return PipelineConfig(self.backend, self.master_seed, plugins, self.options)


@dataclass(frozen=True)
class TranspileResult:
    circuit: Circuit
    initial_layout: Layout
    final_layout: Layout
    history: tuple[tuple[str, Circuit], ...] = field(default=(), repr=False, compare=False)


def transpile(c: Circuit, config: PipelineConfig, keep_history: bool = False) -> TranspileResult:
    """Run the six stages on an in-memory virtual circuit."""
    validate_circuit(c)
    layout: Layout | None = None
    initial: Layout | None = None
    history = []
    for plugin in config.plugins:
        seed = derive_stage_seed(config.master_seed, plugin.stage)
        c, layout = plugin.run(c, layout, config.backend, seed, config.options)
        if plugin.stage == "layout":
            initial = layout
        if keep_history:
            history.append((plugin.stage, c))
    validate_circuit(c)
    return TranspileResult(c, initial, layout, tuple(history))


def build(source: str, config: PipelineConfig) -> tuple[Artifact, BuildInfo, TranspileResult]:
    circuit = parse_source(source)
    result = transpile(circuit, config)
    backend_digest = backend_sha256(config.backend)
    artifact = serialize_artifact(result.circuit, result.initial_layout, backend_digest)
    info = make_buildinfo(config, sha256_hex(source.encode()), backend_digest, artifact.sha256)
    return artifact, info, result


def run_pipeline(source: str, config: PipelineConfig) -> tuple[Artifact, BuildInfo]:
    """Source text to ``(artifact, buildinfo)``; a pure function of its inputs."""
    artifact, info, _ = build(source, config)
    return artifact, info


def config_from_buildinfo(info: BuildInfo, backend: BackendModel,
                          registry: Mapping[tuple[str, str], StagePlugin] = HONEST_PLUGINS) -> PipelineConfig:
    """Reconstruct the pipeline a buildinfo describes, using only ``registry`` plugins.

    Raises :class:`~qrb.errors.UnknownPlugin` when the buildinfo names a
    plugin (or plugin version) that is not available locally.
    """
    plugins = []
    for stage, plugin_id, version in info.stage_plugins:
        plugin = registry.get((stage, plugin_id))
        if plugin is None or plugin.version != version:
            raise UnknownPlugin(f"{stage} plugin {plugin_id} {version} is not available")
        plugins.append(plugin)
    return PipelineConfig(backend, info.master_seed, tuple(plugins), info.options)
