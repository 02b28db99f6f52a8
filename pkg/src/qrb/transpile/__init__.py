from .pipeline import (
    DEFAULT_OPTIONS,
    DEFAULT_PLUGIN_IDS,
    HONEST_PLUGINS,
    STAGES,
    PipelineConfig,
    StagePlugin,
    TranspileResult,
    build,
    config_from_buildinfo,
    derive_stage_seed,
    honest_plugin,
    run_pipeline,
    transpile,
)
from .stages import (
    apply_layout,
    decompose_ccz,
    greedy_layout,
    random_layout,
    stage_init,
    stage_layout,
    stage_optimization,
    stage_routing,
    stage_scheduling,
    stage_translation,
    trivial_layout,
    unschedule,
)

__all__ = [
    "DEFAULT_OPTIONS", "DEFAULT_PLUGIN_IDS", "HONEST_PLUGINS", "STAGES",
    "PipelineConfig", "StagePlugin", "TranspileResult",
    "apply_layout", "build", "config_from_buildinfo", "decompose_ccz", "derive_stage_seed",
    "greedy_layout", "honest_plugin", "random_layout", "run_pipeline",
    "stage_init", "stage_layout", "stage_optimization", "stage_routing", "stage_scheduling",
    "stage_translation", "transpile", "trivial_layout", "unschedule",
]
