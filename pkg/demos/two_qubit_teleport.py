# Teleporting two qubits with single-qubit corrections
#
# A four-qubit carrier on (3456) and a sixteen-member basis on (1234) move an
# arbitrary two-qubit state to Bob's wires 5 and 6. Each correction turns out
# to be a product of single-qubit Paulis.

import numpy as np

from teleportkit import bases
from teleportkit import teleport as tp

rng = np.random.default_rng(0)

for name in ("eq21_two_qubit", "eq25_two_qubit"):
    p = tp.builtin_protocols()[name]
    print(p.description)
    for label, corr in tp.correction_map(p).items():
        print(f"  {label:8s} -> {corr.describe(p.bob_qubits)}")
    s = tp.run_random(p, n_inputs=50, seed=2, keep_reports=False)
    print(f"  min fidelity over 50 inputs: {s.min_fidelity:.12f}")

# The second set has two presentations, one built from GHZ triples and one
# from Bell pairs on (24). They are the same sixteen states, relabelled and
# with some signs flipped.

pm = bases.phase_map(bases.four_particle_set("eq25"), bases.four_particle_set("eq27"))
for la, lb, phase in pm[:6]:
    print(f"{la:8s} = {phase.real:+.0f} * {lb}")

# The recursive construction continues to six qubits. Its first member
# sandwiches the first two four-qubit states between outer qubits 1 and 6.

gen3 = bases.generalized_basis(3)
print(len(gen3), "states, orthonormal:", gen3.is_orthonormal())
p = tp.all_protocols()["gen3_three_qubit"]
s = tp.run_random(p, n_inputs=10, seed=3, keep_reports=False)
print("three-qubit teleport through gen3.1, min fidelity:", round(s.min_fidelity, 12))
