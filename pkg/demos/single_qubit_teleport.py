# Teleporting one qubit through a GHZ state
#
# Alice holds an unknown qubit a|0> + b|1> on wire 1 and two thirds of a
# GHZ state on wires 2 and 3; Bob holds wire 4. We compare two choices of
# measurement basis for Alice's three qubits.

from teleportkit import teleport as tp
from teleportkit.statevector import ket_sum

a, b = 0.6, 0.8j
unknown = ket_sum({"0": a, "1": b})

# The chi basis pairs a Bell state on (12) with a single qubit on 3.

chi_protocol = tp.builtin_protocols()["ghz_chi"]
joint = tp.compose(unknown, chi_protocol)
print("joint state:", joint)

# Project Alice's qubits onto each chi member. Every outcome has
# probability 1/8 and leaves Bob with a Pauli-rotated copy of the input.

for rec in tp.decompose(joint, chi_protocol.measurement_basis, chi_protocol.alice_qubits):
    print(f"{rec.outcome_label:6s} p={rec.probability:.4f}  bob={rec.bob_state}")

# The corrections are found by searching Pauli words, not looked up.

report = tp.run(chi_protocol, unknown)
print()
print(report.to_text())
print("all outcomes recovered:", report.success)

# Now let Alice project onto GHZ states instead. Half of the basis never
# fires for any input, so those branches carry no information at all.

ghz_protocol = tp.ghz_projection_protocol()
fa = tp.failure_analysis(ghz_protocol, n_samples=100, seed=0)
print("null outcomes:", fa.null_count, fa.null_labels)

# The same holds for random inputs, drawn with a fixed seed.

summary = tp.run_random(chi_protocol, n_inputs=100, seed=1, keep_reports=False)
print(f"chi basis over 100 random inputs: min fidelity {summary.min_fidelity:.12f}")
print(f"largest deviation from p = 1/8: {summary.max_probability_deviation:.2e}")
