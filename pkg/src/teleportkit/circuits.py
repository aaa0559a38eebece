"""Gate-level circuits, computational-basis measurement and sampling.

Entangled-basis measurements are realized the usual way: a basis-change
network on Alice's qubits followed by a computational-basis readout.
Feeding such a network into :class:`teleportkit.teleport.Protocol` (with
the computational basis as the measurement basis) gives the per-bitstring
corrections with the same machinery used for the projective protocols.
"""
from __future__ import annotations

import json
from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np

from . import bases as _bases
from .bases import BasisSet
from .statevector import (
    GATES,
    StateVector,
    apply_unitary,
    basis_ket,
    is_unitary,
    permute_qubits,
    tensor,
)

NAMED_ARITY = {"H": 1, "X": 1, "Y": 1, "Z": 1, "CNOT": 2, "CZ": 2, "SWAP": 2}
PROB_FLOOR = 1e-12


@dataclass(frozen=True)
class Gate:
    """A named gate or a custom unitary on ``targets`` (1-based, control first)."""

    kind: str
    targets: tuple
    matrix: Optional[np.ndarray] = field(default=None, compare=False)

    def __post_init__(self):
        object.__setattr__(self, "targets", tuple(int(t) for t in self.targets))
        if len(set(self.targets)) != len(self.targets):
            raise ValueError(f"{self.kind}: repeated target in {self.targets}")
        if self.kind in NAMED_ARITY:
            if len(self.targets) != NAMED_ARITY[self.kind]:
                raise ValueError(f"{self.kind} acts on {NAMED_ARITY[self.kind]} qubit(s)")
        elif self.kind in ("custom-1q", "custom-2q"):
            k = 1 if self.kind == "custom-1q" else 2
            m = np.asarray(self.matrix, dtype=complex)
            if len(self.targets) != k or m.shape != (1 << k, 1 << k):
                raise ValueError(f"{self.kind} needs {k} target(s) and a {1 << k}x{1 << k} matrix")
            if not is_unitary(m):
                raise ValueError(f"{self.kind} matrix is not unitary")
            object.__setattr__(self, "matrix", m)
        else:
            raise ValueError(f"unknown gate kind {self.kind!r}")

    def unitary(self) -> np.ndarray:
        return self.matrix if self.matrix is not None else GATES[self.kind]

    def inverse(self) -> "Gate":
        if self.matrix is None:
            return self  # every named gate is self-inverse
        return Gate(self.kind, self.targets, self.unitary().conj().T)

    def shifted(self, offset: int) -> "Gate":
        return Gate(self.kind, tuple(t + offset for t in self.targets), self.matrix)

    def to_dict(self) -> dict:
        d = {"gate": self.kind, "targets": list(self.targets)}
        if self.matrix is not None:
            d["matrix"] = [[[z.real, z.imag] for z in row] for row in self.matrix]
        return d

    def __str__(self):
        return f"{self.kind}({','.join(map(str, self.targets))})"


def H(q): return Gate("H", (q,))
def X(q): return Gate("X", (q,))
def Z(q): return Gate("Z", (q,))
def CNOT(c, t): return Gate("CNOT", (c, t))
def CZ(a, b): return Gate("CZ", (a, b))


@dataclass
class Circuit:
    n_qubits: int
    gates: list = field(default_factory=list)
    measure: Optional[tuple] = None      # qubits read out in the computational basis
    name: str = ""

    def __post_init__(self):
        for g in self.gates:
            if not all(1 <= t <= self.n_qubits for t in g.targets):
                raise ValueError(f"{g} is outside a {self.n_qubits}-qubit register")
        if self.measure is not None:
            self.measure = tuple(self.measure)
            if not all(1 <= q <= self.n_qubits for q in self.measure):
                raise ValueError("measured qubit outside the register")

    def then(self, *gates: Gate) -> "Circuit":
        return Circuit(self.n_qubits, self.gates + list(gates), self.measure, self.name)

    def inverse(self) -> "Circuit":
        return Circuit(self.n_qubits, [g.inverse() for g in reversed(self.gates)], None,
                       f"{self.name}^-1" if self.name else "")

    def unitary(self) -> np.ndarray:
        """Full 2^n x 2^n matrix (columns are images of basis kets)."""
        dim = 1 << self.n_qubits
        return np.array([run_circuit(self, StateVector(np.eye(dim)[i])).state.amplitudes
                         for i in range(dim)]).T

    def to_dict(self) -> dict:
        d = {"n_qubits": self.n_qubits, "gates": [g.to_dict() for g in self.gates]}
        if self.measure is not None:
            d["measure"] = list(self.measure)
        return d

    def __str__(self):
        return " -> ".join(map(str, self.gates)) or "(empty)"


def embed(c: Circuit, n_qubits: int, offset: int = 0) -> list:
    """``c``'s gates moved onto wires ``offset+1 .. offset+c.n_qubits``."""
    if offset + c.n_qubits > n_qubits:
        raise ValueError("circuit does not fit")
    return [g.shifted(offset) for g in c.gates]


@dataclass
class BitstringOutcome:
    bits: str
    probability: float
    bob_state: Optional[StateVector]   # state of the unmeasured qubits, None if p = 0


@dataclass
class CircuitRun:
    state: StateVector                  # pre-measurement state
    steps: list                         # state after each gate
    outcomes: Optional[list] = None     # BitstringOutcomes when the circuit measures


def run_circuit(c: Circuit, input_state: StateVector) -> CircuitRun:
    if input_state.n_qubits != c.n_qubits:
        raise ValueError(f"input has {input_state.n_qubits} qubits, circuit has {c.n_qubits}")
    s = input_state
    steps = []
    for g in c.gates:
        s = apply_unitary(s, g.unitary(), g.targets, check=False)
        steps.append(s)
    outcomes = _outcomes(s, c.measure) if c.measure is not None else None
    return CircuitRun(s, steps, outcomes)


def _outcomes(s: StateVector, measured: Sequence[int]) -> list:
    rest = [q for q in range(1, s.n_qubits + 1) if q not in measured]
    m = permute_qubits(s, list(measured) + rest).amplitudes.reshape(1 << len(measured), -1)
    out = []
    for i, row in enumerate(m):
        p = float(np.vdot(row, row).real)
        bob = StateVector(row / np.sqrt(p)) if rest and p >= PROB_FLOOR else None
        out.append(BitstringOutcome(format(i, f"0{len(measured)}b"), p, bob))
    return out


def measure_outcomes(c: Circuit, input_state: StateVector,
                     alice_qubits: Sequence[int] = None) -> list:
    """Distribution over readouts of ``alice_qubits`` (default: ``c.measure``, else all)."""
    qubits = alice_qubits or c.measure or tuple(range(1, c.n_qubits + 1))
    return _outcomes(run_circuit(c, input_state).state, qubits)


def sample(c: Circuit, input_state: StateVector, seed: int, shots: int,
           alice_qubits: Sequence[int] = None) -> dict:
    """Multinomial readout counts, keyed by bitstring, zero-count outcomes omitted.

    The stream is ``numpy.random.default_rng(seed)`` (PCG64 seeded through
    SeedSequence) followed by a single ``multinomial(shots, p)`` call over
    bitstrings in ascending order, so a given seed always yields the same counts.
    """
    if shots < 1:
        raise ValueError("shots must be at least 1")
    outs = measure_outcomes(c, input_state, alice_qubits)
    p = np.array([o.probability for o in outs])
    p[p < PROB_FLOOR] = 0.0
    p /= p.sum()
    counts = np.random.default_rng(seed).multinomial(shots, p)
    return {o.bits: int(n) for o, n in zip(outs, counts) if n}


# -- builtin networks--------------------------------------------------------

def ghz_prep() -> Circuit:
    return Circuit(3, [H(1), CNOT(1, 2), CNOT(2, 3)], name="ghz_prep")


def varphi_prep() -> Circuit:
    """GHZ preparation followed by H on the first qubit."""
    return Circuit(3, ghz_prep().gates + [H(1)], name="varphi_prep")


def eq21_prep() -> Circuit:
    """Maps each computational ket onto an eq21 member (up to sign)."""
    return Circuit(4, [H(1), H(2), CNOT(1, 4), CNOT(2, 3), CZ(1, 2)], name="eq21_prep")


def eq25_prep() -> Circuit:
    """Maps each computational ket onto an eq25 member (up to sign)."""
    return Circuit(4, [H(1), H(2), CNOT(2, 4), CNOT(1, 3), CNOT(1, 4)], name="eq25_prep")


_PREP = {"ghz": ghz_prep, "varphi3": varphi_prep, "eq21": eq21_prep, "eq25": eq25_prep}


def _prep_input(fam: str, member: int) -> str:
    """Computational input that the family's prep circuit sends to ``member``."""
    c = _PREP[fam]()
    target = _bases.family(fam)[member]
    for i in range(1 << c.n_qubits):
        bits = format(i, f"0{c.n_qubits}b")
        out = run_circuit(c, basis_ket(bits)).state
        if abs(abs(np.vdot(target.amplitudes, out.amplitudes)) - 1) < 1e-10:
            return bits
    raise ValueError(f"{fam}.{member} is not reachable from a computational input")


def prepare(label: str) -> Circuit:
    """Circuit taking |0...0> to the catalog state ``label`` (up to global phase).

    Accepts ``ghz`` / ``ghz.1``, ``varphi3.1`` and any ``eq21.k`` or
    ``eq25.k``; members other than the first are reached by X gates on the
    input before the preparation network.
    """
    fam, _, idx = label.partition(".")
    if fam not in _PREP or (idx and not idx.isdigit()):
        raise ValueError(f"no preparation circuit for {label!r}")
    member = int(idx) if idx else 1
    if fam in ("ghz", "varphi3") and member != 1:
        raise ValueError(f"no preparation circuit for {label!r}")
    base = _PREP[fam]()
    bits = _prep_input(fam, member)
    flips = [X(q + 1) for q, b in enumerate(bits) if b == "1"]
    return Circuit(base.n_qubits, flips + base.gates, name=f"prepare {label}")


def fig2_network() -> Circuit:
    """Single qubit on 1, GHZ on (234): CNOT(1->3), H(1), H(2), read 1-3."""
    return Circuit(4, [CNOT(1, 3), H(1), H(2)], measure=(1, 2, 3), name="fig2")


def fig3_network() -> Circuit:
    """Two-qubit input on (12), GHZ on (345); same gates, read 1-3."""
    return Circuit(5, [CNOT(1, 3), H(1), H(2)], measure=(1, 2, 3), name="fig3")


def fig5_network() -> Circuit:
    """Single qubit on 1, varphi3.1 on (234): CNOT(1->3), H(1), read 1-3.

    The carrier already equals H(2) applied to GHZ(234), so this network
    lands on exactly the state the single-qubit GHZ network (fig2) produces.
    """
    return Circuit(4, [CNOT(1, 3), H(1)], measure=(1, 2, 3), name="fig5")


def two_qubit_network(family: str) -> Circuit:
    """Alice's side for two-qubit teleportation through ``family``.1 on (3456):
    undo the family's preparation on (1234), then read 1-4."""
    prep = _PREP[family]()
    return Circuit(6, embed(prep.inverse(), 6), measure=(1, 2, 3, 4), name=f"{family}_network")


def two_qubit_full_circuit(family: str) -> Circuit:
    """Carrier preparation on (3456) from |0000> followed by Alice's network."""
    return Circuit(6, embed(_PREP[family](), 6, offset=2) + two_qubit_network(family).gates,
                   measure=(1, 2, 3, 4), name=f"{family}_full")


def computational_basis(n: int) -> BasisSet:
    return BasisSet(f"computational{n}",
                    [(format(i, f"0{n}b"), basis_ket(format(i, f"0{n}b"))) for i in range(1 << n)])


def network_protocol(c: Circuit, unknown_arity: int, carrier: StateVector,
                     bob: Sequence[int], input_subspace=None):
    """View a gate network plus readout as a projective protocol."""
    from .teleport import Protocol
    from .statevector import QubitWiring

    alice_carrier = tuple(q for q in c.measure if q > unknown_arity)
    wiring = QubitWiring({"alice_unknown": tuple(range(1, unknown_arity + 1)),
                          "alice_carrier": alice_carrier, "bob_carrier": tuple(bob)})
    ops = [(g.unitary(), g.targets) for g in c.gates]
    return Protocol(c.name or "network", unknown_arity, carrier, wiring,
                    computational_basis(len(c.measure)), ops, input_subspace)


def builtin_networks() -> dict:
    """The gate-level teleportation protocols: fig2, fig3, fig5 and the two-qubit networks."""
    ghz = _bases.ghz_state()
    return {
        "fig2": network_protocol(fig2_network(), 1, ghz, (4,)),
        "fig3": network_protocol(fig3_network(), 2, ghz, (4, 5), ("01", "10")),
        "fig5": network_protocol(fig5_network(), 1, _bases.varphi_basis()[1], (4,)),
        "eq21_network": network_protocol(two_qubit_network("eq21"), 2,
                                         _bases.four_particle_set("eq21")[1], (5, 6)),
        "eq25_network": network_protocol(two_qubit_network("eq25"), 2,
                                         _bases.four_particle_set("eq25")[1], (5, 6)),
    }


def fig2_input(unknown: StateVector) -> StateVector:
    return tensor(unknown, _bases.ghz_state())


def fig3_input(unknown: StateVector) -> StateVector:
    return tensor(unknown, _bases.ghz_state())


def fig5_input(unknown: StateVector) -> StateVector:
    return tensor(unknown, _bases.varphi_basis()[1])


# -- files ------------------------------------------------------------------

def _matrix(raw) -> np.ndarray:
    a = np.array(raw, dtype=float)
    if a.ndim == 3 and a.shape[-1] == 2:
        a = a[..., 0] + 1j * a[..., 1]
    return a.astype(complex)


def circuit_from_dict(data) -> Circuit:
    """Accepts ``{"n_qubits", "gates", "measure"}`` or a bare gate list."""
    if isinstance(data, list):
        data = {"gates": data}
    gates = []
    for i, g in enumerate(data.get("gates", [])):
        try:
            m = _matrix(g["matrix"]) if "matrix" in g else None
            gates.append(Gate(g["gate"], tuple(g["targets"]), m))
        except (KeyError, TypeError, ValueError) as e:
            raise ValueError(f"gates[{i}]: {e}") from None
    n = data.get("n_qubits") or max((max(g.targets) for g in gates), default=1)
    return Circuit(int(n), gates, data.get("measure"), data.get("name", ""))


def load_circuit(text: str) -> Circuit:
    return circuit_from_dict(json.loads(text))
