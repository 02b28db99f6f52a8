"""
Reproducible builds of a GHZ circuit
====================================

Transpile the same source twice, check the artifacts are byte-identical,
then let a verifier rebuild from the buildinfo alone.
"""

from qrb import PipelineConfig, build, demo12, emit_source, ghz_circuit, simulate, verify_build

backend = demo12()
source = emit_source(ghz_circuit(7))
print(source)

# two independent builds with the same seed
config = PipelineConfig.default(backend, master_seed=42)
first, info, _ = build(source, config)
second, _, _ = build(source, config)
print("artifact sha256 :", first.sha256)
print("identical       :", first.data == second.data)

# the buildinfo records everything needed to rebuild
print(info.to_bytes().decode())

# a verifier only needs the source, the buildinfo and the artifact
verdict = verify_build(source, info.to_bytes(), first.data)
print("verdict         :", verdict.status.value)

# the physical circuit still prepares GHZ on the measured ends
print("distribution    :", simulate(first.circuit))
