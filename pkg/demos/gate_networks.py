# The same protocols at gate level
#
# An entangled-basis measurement can be done as a small network followed by
# a computational readout. For the GHZ carrier, CNOT(1->3), H(1) and H(2)
# are enough.

from teleportkit import circuits as cc
from teleportkit import teleport as tp
from teleportkit.statevector import basis_ket, ket_sum

a, b = 0.6, 0.8
net = cc.fig2_network()
print("network:", net)
run = cc.run_circuit(net, cc.fig2_input(ket_sum({"0": a, "1": b})))
for g, step in zip(net.gates, run.steps):
    print(f"after {g}: {step}")

# Eight readouts, four correction classes.

proto = cc.builtin_networks()["fig2"]
for bits, corr in tp.correction_map(proto).items():
    print(bits, "->", corr.word)

# Sampling uses a seeded generator, so the counts are reproducible.

print(cc.sample(net, cc.fig2_input(ket_sum({"0": a, "1": b})), seed=7, shots=8000))

# Preparation circuits for the carriers, checked against the direct
# constructions.

for label in ("ghz", "varphi3.1", "eq21.1", "eq25.1"):
    c = cc.prepare(label)
    out = cc.run_circuit(c, basis_ket("0" * c.n_qubits)).state
    print(f"{label:10s} {c}  ->  {out}")
