"""
Smuggling bytes through a transpiler
====================================

Each leaky plugin replaces one honest stage and hides a payload in the
artifact. Decoding needs nothing but the artifact bytes.
"""

from qrb import PipelineConfig, build, demo12, emit_source, ghz_circuit, hellinger_fidelity, simulate
from qrb.backends import line_backend
from qrb.stego import capacity_table, decode, layout_capacity_bytes, leaky_plugin

source = emit_source(ghz_circuit(4))

# capacity of the layout channel grows like log2(n!)
for n in (12, 27, 127):
    print(f"{n:4d} qubits -> {layout_capacity_bytes(n)} bytes in the layout")

# layout channel: the permutation itself is the message
backend = line_backend(127)
honest = PipelineConfig.default(backend, master_seed=7)
leaky = honest.replace_plugin(leaky_plugin("layout", b"Hello World"))
artifact, _, _ = build(source, leaky)
print("layout  :", decode("layout", artifact))

# init channel: integer RZ angles on a spare qubit, fenced by resets
backend = demo12()
honest = PipelineConfig.default(backend, master_seed=7)
secret = bytes(range(40))
artifact, _, _ = build(source, honest.replace_plugin(leaky_plugin("init", secret)))
print("init    :", decode("init", artifact) == secret)

# scheduling channel: low bytes of existing rotation angles
genuine, _, result = build(source, honest)
for row in capacity_table(backend, result.circuit):
    print(f"  {row.stage:<11}{row.describe():<12}{row.limitation}")

reference = simulate(genuine.circuit)
for stealth in (2, 4, 6):
    plugin = leaky_plugin("scheduling", b"key", stealth=stealth)
    artifact, _, _ = build(source, honest.replace_plugin(plugin))
    fidelity = hellinger_fidelity(reference, simulate(artifact.circuit))
    print(f"stealth {stealth}: {decode('scheduling', artifact, stealth)!r}, fidelity {fidelity:.12f}")
