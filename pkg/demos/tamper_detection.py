"""
Tampering with a compiled artifact
==================================

A single inserted reset or a retargeted CZ changes what the hardware
computes. Rebuild-and-compare catches both; the simulator shows the damage.
"""

from qrb import (
    PipelineConfig,
    TamperSpec,
    apply_tamper,
    build,
    demo12,
    distribution_delta,
    emit_source,
    ghz_circuit,
    grover3_circuit,
    verify_build,
)

backend = demo12()
config = PipelineConfig.default(backend, master_seed=42)

# GHZ-7 with a reset slipped in before the last measurement
source = emit_source(ghz_circuit(7))
genuine, info, _ = build(source, config)
tampered = apply_tamper(genuine, TamperSpec.parse("reset@last-measure"), backend)
delta = distribution_delta(genuine, tampered)
print("GHZ genuine  :", delta.genuine)
print("GHZ tampered :", delta.tampered)
print("TVD          :", round(delta.tvd, 6))

verdict = verify_build(source, info.to_bytes(), tampered.data)
print("verdict      :", verdict.status.value, "at byte", verdict.first_diff_offset)
for line in verdict.diff_lines[:4]:
    print("   ", line.line, line.expected, "->", line.actual)

# Grover over 3 bits; move the oracle CZ onto a neighbouring qubit
source = emit_source(grover3_circuit())
genuine, info, _ = build(source, config)
tampered = apply_tamper(genuine, TamperSpec.parse("retarget@60:5,4"), backend)
delta = distribution_delta(genuine, tampered, shots=4000, seed=1)
print("Grover top-2 :", delta.top_genuine, "->", delta.top_tampered)
print("fidelity     :", round(delta.fidelity, 4))
print("verdict      :", verify_build(source, info.to_bytes(), tampered.data).status.value)
