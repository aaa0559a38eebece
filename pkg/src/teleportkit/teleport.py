"""Teleportation protocol engine.

A protocol is: unknown state on qubits ``1..k``, carrier on ``k+1..n``,
optional unitaries on Alice's side, then a projective measurement of
Alice's qubits onto a basis. For each outcome the engine extracts Bob's
conditional state and searches Pauli words for the correction.

Corrections are found from the outcome's linear map (unknown -> Bob), not
from one sample input, so a correction is valid for every input in the
protocol's input space or it is rejected.
"""
from __future__ import annotations

import itertools
import json
from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np

from . import bases as _bases
from .bases import BasisSet
from .formatting import dumps_json
from .statevector import (
    GATES,
    PAULI,
    QubitWiring,
    StateVector,
    apply_unitary,
    basis_ket,
    fidelity,
    is_unitary,
    kron_all,
    permute_qubits,
    tensor,
)

FIDELITY_TOL = 1e-10
NULL_THRESHOLD = 1e-12
PAULI_ORDER = "IXYZ"


class NoLocalCorrection(Exception):
    """No Pauli word maps Bob's conditional state back onto the target."""


class ProtocolSchemaError(ValueError):
    def __init__(self, field_name: str, message: str):
        super().__init__(f"{field_name}: {message}")
        self.field = field_name


@dataclass(frozen=True)
class CorrectionOp:
    factors: tuple          # one of I/X/Y/Z per Bob qubit
    global_phase: complex = 1.0

    @property
    def word(self) -> str:
        return "".join(self.factors)

    def matrix(self) -> np.ndarray:
        return kron_all([PAULI[c] for c in self.factors])

    def apply(self, s: StateVector) -> StateVector:
        return StateVector(self.matrix() @ s.amplitudes)

    def describe(self, qubits: Sequence[int]) -> str:
        return " ".join(f"{c}{q}" for c, q in zip(self.factors, qubits))


def pauli_words(k: int):
    """All 4^k words in lexicographic I < X < Y < Z order."""
    return ("".join(w) for w in itertools.product(PAULI_ORDER, repeat=k))


def find_correction(bob_state: StateVector, target: StateVector,
                    tol: float = FIDELITY_TOL) -> CorrectionOp:
    """First Pauli word W (lexicographic) with |<target|W|bob>|^2 = 1."""
    if bob_state.dim != target.dim:
        raise ValueError("bob_state and target differ in dimension")
    k = target.n_qubits
    for w in pauli_words(k):
        op = kron_all([PAULI[c] for c in w])
        ov = np.vdot(target.amplitudes, op @ bob_state.amplitudes)
        if abs(abs(ov) ** 2 - 1) < tol:
            return CorrectionOp(tuple(w), complex(ov / abs(ov)))
    raise NoLocalCorrection(f"no Pauli word restores the target on {k} qubits")


def _operator_correction(lmap: np.ndarray, embed: np.ndarray, tol: float = FIDELITY_TOL):
    """Pauli word W with W @ lmap proportional to ``embed`` (input -> Bob kets).

    Returns ``(CorrectionOp, scale)`` where ``scale`` is the complex factor,
    or ``None`` when no word works.
    """
    k = int(np.log2(lmap.shape[0]))
    norm_e = np.vdot(embed, embed).real
    for w in pauli_words(k):
        op = kron_all([PAULI[c] for c in w])
        m = op @ lmap
        c = np.vdot(embed, m) / norm_e
        if abs(c) > 0 and np.linalg.norm(m - c * embed) <= tol * max(1.0, abs(c)):
            return CorrectionOp(tuple(w), complex(c / abs(c))), c
    return None


@dataclass
class Protocol:
    """Scenario data for one teleportation scheme.

    ``wiring`` roles: ``alice_unknown`` (always ``1..k``), ``alice_carrier``
    and ``bob_carrier``; Alice measures ``alice_unknown + alice_carrier`` in
    ``measurement_basis`` (member qubit order = that role order). Bob's
    target is the unknown state on ``bob_carrier`` in listed order.

    ``input_subspace`` restricts the unknown to the span of the listed
    computational kets (e.g. ``("01", "10")`` for ``a|01> + b|10>``).
    """

    name: str
    unknown_arity: int
    carrier: StateVector
    wiring: QubitWiring
    measurement_basis: BasisSet
    pre_measurement_ops: list = field(default_factory=list)
    input_subspace: Optional[tuple] = None
    expect_failure: bool = False
    description: str = ""
    _cache: dict = field(default_factory=dict, repr=False, compare=False)

    def __post_init__(self):
        k = self.unknown_arity
        if k not in (1, 2, 3):
            raise ProtocolSchemaError("unknown_arity", f"must be 1, 2 or 3, got {k}")
        w = self.wiring
        for role in ("alice_unknown", "alice_carrier", "bob_carrier"):
            try:
                w[role]
            except KeyError:
                raise ProtocolSchemaError("wiring", f"missing role {role!r}") from None
        if tuple(w["alice_unknown"]) != tuple(range(1, k + 1)):
            raise ProtocolSchemaError("wiring", "alice_unknown must be qubits 1..unknown_arity")
        if w.n_qubits != k + self.carrier.n_qubits:
            raise ProtocolSchemaError(
                "wiring", f"covers {w.n_qubits} qubits but unknown + carrier have "
                          f"{k + self.carrier.n_qubits}")
        if len(self.bob_qubits) != k:
            raise ProtocolSchemaError("wiring", "Bob must hold as many qubits as are teleported")
        if self.measurement_basis.n_qubits != len(self.alice_qubits):
            raise ProtocolSchemaError(
                "measurement_basis", f"acts on {self.measurement_basis.n_qubits} qubits, "
                                     f"Alice holds {len(self.alice_qubits)}")
        for i, (u, targets) in enumerate(self.pre_measurement_ops):
            if not is_unitary(u):
                raise ProtocolSchemaError(f"pre_ops[{i}]", "matrix is not unitary")
            for q in targets:
                if q not in self.alice_qubits:
                    raise ProtocolSchemaError(f"pre_ops[{i}]", f"qubit {q} is not Alice's")
        if self.input_subspace is not None:
            self.input_subspace = tuple(self.input_subspace)
            for bits in self.input_subspace:
                if len(bits) != k:
                    raise ProtocolSchemaError("input_subspace", f"{bits!r} is not {k} bits")

    @property
    def alice_qubits(self) -> tuple:
        return tuple(self.wiring["alice_unknown"]) + tuple(self.wiring["alice_carrier"])

    @property
    def bob_qubits(self) -> tuple:
        return tuple(self.wiring["bob_carrier"])

    @property
    def n_qubits(self) -> int:
        return self.wiring.n_qubits

    def input_kets(self) -> list:
        """Computational kets spanning the allowed unknown states."""
        k = self.unknown_arity
        bits = self.input_subspace or [format(i, f"0{k}b") for i in range(1 << k)]
        return [basis_ket(b) for b in bits]

    def random_unknown(self, rng: np.random.Generator) -> StateVector:
        kets = self.input_kets()
        c = rng.standard_normal(len(kets)) + 1j * rng.standard_normal(len(kets))
        c /= np.linalg.norm(c)
        return StateVector(sum(ci * kt.amplitudes for ci, kt in zip(c, kets)))


def compose(unknown: StateVector, protocol: Protocol) -> StateVector:
    """unknown (x) carrier, then Alice's pre-measurement unitaries in order."""
    if unknown.n_qubits != protocol.unknown_arity:
        raise ValueError(f"unknown has {unknown.n_qubits} qubits, protocol expects "
                         f"{protocol.unknown_arity}")
    joint = tensor(unknown, protocol.carrier)
    for u, targets in protocol.pre_measurement_ops:
        joint = apply_unitary(joint, u, targets)
    return joint


@dataclass
class OutcomeRecord:
    outcome_label: str
    probability: float
    bob_state: Optional[StateVector]          # normalized; None for a null outcome
    correction: Optional[CorrectionOp] = None
    post_fidelity: float = float("nan")

    @property
    def is_null(self) -> bool:
        return self.bob_state is None


def _split(joint: StateVector, alice_qubits: Sequence[int]) -> tuple:
    """Return (matrix with rows = Alice index, columns = Bob index, bob qubits)."""
    n = joint.n_qubits
    alice = list(alice_qubits)
    bob = [q for q in range(1, n + 1) if q not in alice]
    m = permute_qubits(joint, alice + bob).amplitudes.reshape(1 << len(alice), -1)
    return m, tuple(bob)


def decompose(joint: StateVector, basis: BasisSet, alice_qubits: Sequence[int],
              null_threshold: float = NULL_THRESHOLD) -> list:
    """Project Alice's qubits onto each basis member; corrections left unset."""
    if basis.n_qubits != len(alice_qubits):
        raise ValueError("basis size does not match Alice's qubits")
    if not (basis.complete and basis.is_orthonormal()):
        raise ValueError(f"basis {basis.name!r} is not a complete orthonormal basis")
    m, _ = _split(joint, alice_qubits)
    out = []
    for label, member in basis:
        v = member.amplitudes.conj() @ m
        p = float(np.vdot(v, v).real)
        bob = StateVector(v / np.sqrt(p)) if p >= null_threshold else None
        out.append(OutcomeRecord(label, p, bob))
    return out


@dataclass
class OutcomeMap:
    """Input-independent view of one outcome: unknown -> Bob linear map."""

    label: str
    lmap: np.ndarray
    probability_operator: np.ndarray
    correction: Optional[CorrectionOp]
    is_null: bool

    @property
    def uniform_probability(self) -> Optional[float]:
        """p if the outcome probability is p for every input, else None."""
        g = self.probability_operator
        p = g[0, 0].real
        ok = np.allclose(g, p * np.eye(g.shape[0]), rtol=0, atol=FIDELITY_TOL)
        return float(p) if ok else None


def outcome_maps(protocol: Protocol) -> list:
    """Linear maps from the input space to Bob's unnormalized state, per outcome."""
    if "maps" in protocol._cache:
        return protocol._cache["maps"]
    kets = protocol.input_kets()
    cols = [_split(compose(kt, protocol), protocol.alice_qubits) for kt in kets]
    bob_order = cols[0][1]
    perm = [bob_order.index(q) + 1 for q in protocol.bob_qubits]
    # target: each input ket placed on Bob's qubits in Bob's order
    embed = np.array([kt.amplitudes for kt in kets]).T
    maps = []
    for i, (label, member) in enumerate(protocol.measurement_basis):
        lm = np.array([member.amplitudes.conj() @ m for m, _ in cols]).T
        if perm != list(range(1, len(perm) + 1)):
            lm = np.array([permute_qubits(StateVector(c), perm).amplitudes
                           if np.any(c) else c for c in lm.T]).T
        gram = lm.conj().T @ lm
        null = float(np.abs(gram).max()) < NULL_THRESHOLD
        corr = None
        if not null:
            found = _operator_correction(lm, embed)
            corr = found[0] if found else None
        maps.append(OutcomeMap(label, lm, gram, corr, null))
    protocol._cache["maps"] = maps
    return maps


def correction_map(protocol: Protocol) -> dict:
    """outcome label -> CorrectionOp (None for null or uncorrectable outcomes)."""
    return {om.label: om.correction for om in outcome_maps(protocol)}


def correction_equivalent(protocol: Protocol, label: str, word: str,
                          tol: float = FIDELITY_TOL) -> bool:
    """Does Pauli ``word`` restore the unknown for outcome ``label``, for every input?

    This is the right notion of "same correction up to phase" when Bob's
    conditional states live in a subspace, where distinct words can act
    identically.
    """
    om = next(o for o in outcome_maps(protocol) if o.label == label)
    if om.is_null:
        return False
    embed = np.array([kt.amplitudes for kt in protocol.input_kets()]).T
    op = kron_all([PAULI[c] for c in word.upper()])
    m = op @ om.lmap
    c = np.vdot(embed, m) / np.vdot(embed, embed).real
    return abs(c) > 0 and np.linalg.norm(m - c * embed) <= tol * max(1.0, abs(c))


@dataclass
class ProtocolReport:
    protocol: str
    outcomes: list
    bob_qubits: tuple
    seed: Optional[int] = None
    errors: list = field(default_factory=list)

    @property
    def null_outcome_count(self) -> int:
        return sum(o.is_null for o in self.outcomes)

    @property
    def success(self) -> bool:
        live = [o for o in self.outcomes if not o.is_null]
        return bool(live) and all(
            o.correction is not None and abs(o.post_fidelity - 1) < FIDELITY_TOL for o in live)

    @property
    def distinct_correction_count(self) -> int:
        return len({o.correction.word for o in self.outcomes if o.correction is not None})

    @property
    def total_probability(self) -> float:
        return float(sum(o.probability for o in self.outcomes))

    @property
    def min_fidelity(self) -> float:
        live = [o.post_fidelity for o in self.outcomes if not o.is_null]
        return float(min(live)) if live else float("nan")

    def to_dict(self) -> dict:
        return {
            "protocol": self.protocol,
            "seed": self.seed,
            "bob_qubits": list(self.bob_qubits),
            "success": self.success,
            "null_outcome_count": self.null_outcome_count,
            "distinct_correction_count": self.distinct_correction_count,
            "total_probability": self.total_probability,
            "outcomes": [
                {
                    "outcome": o.outcome_label,
                    "probability": o.probability,
                    "null": o.is_null,
                    "correction": o.correction.word if o.correction else None,
                    "post_fidelity": None if o.is_null else o.post_fidelity,
                }
                for o in self.outcomes
            ],
            "errors": list(self.errors),
        }

    def to_json(self) -> str:
        return dumps_json(self.to_dict())

    def to_text(self) -> str:
        return correction_table_text(self.outcomes, self.bob_qubits)


def correction_table_text(outcomes: Sequence[OutcomeRecord], bob_qubits: Sequence[int]) -> str:
    """Two-column layout: outcomes sharing a correction on one line."""
    return grouped_corrections_text(
        [(o.outcome_label, o.correction, o.is_null) for o in outcomes], bob_qubits)


def grouped_corrections_text(items, bob_qubits: Sequence[int]) -> str:
    """``items`` are ``(label, CorrectionOp or None, is_null)`` triples."""
    groups = {}
    for label, corr, null in items:
        key = "(null outcome)" if null else (
            corr.describe(bob_qubits) if corr else "(no local correction)")
        groups.setdefault(key, []).append(label)
    rows = [(", ".join(v), k) for k, v in groups.items()]
    w = max(len("Measurement outcome"), *(len(r[0]) for r in rows))
    lines = [f"{'Measurement outcome':<{w}} | Unitary transformation", "-" * (w + 26)]
    lines += [f"{a:<{w}} | {b}" for a, b in rows]
    return "\n".join(lines) + "\n"


def run(protocol: Protocol, unknown: StateVector, seed: Optional[int] = None) -> ProtocolReport:
    """Decompose, correct with the input-independent Pauli map, certify fidelity."""
    joint = compose(unknown, protocol)
    records = decompose(joint, protocol.measurement_basis, protocol.alice_qubits)
    maps = {om.label: om for om in outcome_maps(protocol)}
    _, bob_order = _split(joint, protocol.alice_qubits)
    perm = [bob_order.index(q) + 1 for q in protocol.bob_qubits]
    report = ProtocolReport(protocol.name, records, protocol.bob_qubits, seed)
    for rec in records:
        if rec.is_null:
            continue
        rec.bob_state = permute_qubits(rec.bob_state, perm)
        corr = maps[rec.outcome_label].correction
        if corr is None:
            report.errors.append(f"{rec.outcome_label}: no local Pauli correction")
            try:
                # a correction may still exist for this particular input
                rec.correction = find_correction(rec.bob_state, unknown)
            except NoLocalCorrection:
                rec.post_fidelity = 0.0
                continue
        else:
            rec.correction = corr
        rec.post_fidelity = fidelity(unknown, rec.correction.apply(rec.bob_state))
    return report


@dataclass
class RandomRunSummary:
    protocol: str
    seed: int
    n_inputs: int
    min_fidelity: float
    max_probability_deviation: float   # from 1/len(basis), over all outcomes and inputs
    max_total_probability_error: float
    null_outcome_count: int
    all_success: bool
    reports: list = field(repr=False, default_factory=list)

    def to_dict(self) -> dict:
        d = {k: getattr(self, k) for k in (
            "protocol", "seed", "n_inputs", "min_fidelity", "max_probability_deviation",
            "max_total_probability_error", "null_outcome_count", "all_success")}
        d["runs"] = [r.to_dict() for r in self.reports]
        return d


def run_random(protocol: Protocol, n_inputs: int = 100, seed: int = 0,
               keep_reports: bool = True) -> RandomRunSummary:
    """Run ``n_inputs`` Haar-random unknowns drawn from ``default_rng(seed)``."""
    rng = np.random.default_rng(seed)
    uniform = 1.0 / len(protocol.measurement_basis)
    min_f, max_dev, max_tot, nulls, ok = 1.0, 0.0, 0.0, 0, True
    reports = []
    for _ in range(n_inputs):
        rep = run(protocol, protocol.random_unknown(rng), seed)
        live = [o for o in rep.outcomes if not o.is_null]
        min_f = min(min_f, rep.min_fidelity)
        max_dev = max(max_dev, max(abs(o.probability - uniform) for o in rep.outcomes))
        max_tot = max(max_tot, abs(rep.total_probability - 1))
        nulls = max(nulls, rep.null_outcome_count)
        ok = ok and rep.success and bool(live)
        if keep_reports:
            reports.append(rep)
    return RandomRunSummary(protocol.name, seed, n_inputs, float(min_f), float(max_dev),
                            float(max_tot), nulls, ok, reports)


@dataclass
class FailureAnalysis:
    null_count: int
    null_labels: list
    success_probability: float
    n_samples: int
    seed: int


def failure_analysis(protocol: Protocol, n_samples: int = 100, seed: int = 0) -> FailureAnalysis:
    """Count outcomes that never fire, sampled over random unknown inputs.

    An outcome is null when its probability stays below 1e-12 for every
    sample. Success probability is the mean weight of outcomes whose
    correction restores the input.
    """
    rng = np.random.default_rng(seed)
    labels = protocol.measurement_basis.labels
    ever = np.zeros(len(labels), dtype=bool)
    success = []
    for _ in range(n_samples):
        rep = run(protocol, protocol.random_unknown(rng), seed)
        ever |= np.array([o.probability >= NULL_THRESHOLD for o in rep.outcomes])
        success.append(sum(o.probability for o in rep.outcomes
                           if not o.is_null and abs(o.post_fidelity - 1) < FIDELITY_TOL))
    null_labels = [lab for lab, e in zip(labels, ever) if not e]
    return FailureAnalysis(len(null_labels), null_labels, float(np.mean(success)), n_samples, seed)


# -- catalog ----------------------------------------------------------------

def _wiring(k: int, alice_carrier: Sequence[int], bob: Sequence[int]) -> QubitWiring:
    return QubitWiring({
        "alice_unknown": tuple(range(1, k + 1)),
        "alice_carrier": tuple(alice_carrier),
        "bob_carrier": tuple(bob),
    })


def builtin_protocols() -> dict:
    """The six schemes whose corrections are tabulated or worked out in full."""
    ghz = _bases.ghz_state()
    cnot = GATES["CNOT"]
    return {
        "ghz_chi": Protocol(
            "ghz_chi", 1, ghz, _wiring(1, (2, 3), (4,)), _bases.chi_basis(),
            description="one qubit through GHZ(234); Alice projects (123) on the chi basis"),
        "ghz_varphi_cnots": Protocol(
            "ghz_varphi_cnots", 1, ghz, _wiring(1, (2, 3), (4,)), _bases.varphi_basis(),
            pre_measurement_ops=[(cnot, (2, 3)), (cnot, (1, 2))],
            description="one qubit through GHZ(234); Alice applies U23 then U12 and "
                        "projects on the varphi basis"),
        "epr_ghz_varphi": Protocol(
            "epr_ghz_varphi", 2, ghz, _wiring(2, (3,), (4, 5)), _bases.varphi_basis(),
            input_subspace=("01", "10"),
            description="a|01> + b|10> through GHZ(345); Alice projects (123) on varphi"),
        "varphi_carrier_ghz": Protocol(
            "varphi_carrier_ghz", 1, _bases.varphi_basis()["varphi3.1"],
            _wiring(1, (2, 3), (4,)), _bases.ghz_basis(),
            description="one qubit through varphi3.1 on (234); Alice projects on GHZ states"),
        "eq21_two_qubit": Protocol(
            "eq21_two_qubit", 2, _bases.four_particle_set("eq21")[1],
            _wiring(2, (3, 4), (5, 6)), _bases.four_particle_set("eq21"),
            description="two qubits through eq21.1 on (3456); Alice projects (1234) on eq21"),
        "eq25_two_qubit": Protocol(
            "eq25_two_qubit", 2, _bases.four_particle_set("eq25")[1],
            _wiring(2, (3, 4), (5, 6)), _bases.four_particle_set("eq25"),
            description="two qubits through eq25.1 on (3456); Alice projects (1234) on eq25"),
    }


def ghz_projection_protocol() -> Protocol:
    """GHZ state as both carrier and projection basis: half the outcomes vanish."""
    return Protocol(
        "ghz_ghz_projection", 1, _bases.ghz_state(), _wiring(1, (2, 3), (4,)),
        _bases.ghz_basis(), expect_failure=True,
        description="one qubit through GHZ(234) with Alice projecting on GHZ states")


def extra_protocols() -> dict:
    """Further schemes the same machinery handles."""
    ghz = _bases.ghz_state()
    eq31 = _bases.four_particle_set("eq31")
    eq20 = _bases.four_particle_set("eq20_family")
    gen3 = _bases.generalized_basis(3)
    return {
        "epr_phi_ghz_varphi": Protocol(
            "epr_phi_ghz_varphi", 2, ghz, _wiring(2, (3,), (4, 5)), _bases.varphi_basis(),
            input_subspace=("00", "11"),
            description="a|00> + b|11> through GHZ(345), corrections found by search"),
        "eq31_two_qubit": Protocol(
            "eq31_two_qubit", 2, eq31[1], _wiring(2, (3, 4), (5, 6)), eq31,
            description="two qubits through eq31.1 on (3456)"),
        "eq20_two_qubit": Protocol(
            "eq20_two_qubit", 2, eq20[1], _wiring(2, (3, 4), (5, 6)), eq20,
            description="two qubits through the product carrier eq20.1"),
        "gen3_two_qubit": Protocol(
            "gen3_two_qubit", 3, gen3[1], _wiring(3, (4, 5, 6), (7, 8, 9)), gen3,
            input_subspace=("000", "010", "100", "110"),
            description="a two-qubit state padded with |0> on qubit 3, through gen3.1"),
        "gen3_three_qubit": Protocol(
            "gen3_three_qubit", 3, gen3[1], _wiring(3, (4, 5, 6), (7, 8, 9)), gen3,
            description="three qubits through gen3.1 on (4..9); Alice projects 6 qubits on gen3"),
    }


def all_protocols() -> dict:
    out = dict(builtin_protocols())
    out["ghz_ghz_projection"] = ghz_projection_protocol()
    out.update(extra_protocols())
    return out


# -- protocol files ---------------------------------------------------------

def _parse_matrix(raw, where: str) -> np.ndarray:
    try:
        arr = np.array(raw, dtype=float)
    except (TypeError, ValueError):
        raise ProtocolSchemaError(where, "matrix entries must be numbers or [re, im] pairs") from None
    if arr.ndim == 3 and arr.shape[-1] == 2:
        arr = arr[..., 0] + 1j * arr[..., 1]
    if arr.ndim != 2:
        raise ProtocolSchemaError(where, "matrix must be two-dimensional")
    return arr.astype(complex)


def protocol_from_dict(data: dict) -> Protocol:
    """Build a protocol from the JSON schema.

    Required keys: ``carrier_family``, ``carrier_member``, ``wiring``,
    ``basis_family``, ``unknown_arity``. Optional: ``pre_ops`` (list of
    ``{"gate": "CNOT", "targets": [2, 3]}`` or ``{"matrix": ..., "targets": ...}``),
    ``name``, ``input_subspace``, ``expect_failure``.
    """
    if not isinstance(data, dict):
        raise ProtocolSchemaError("<root>", "expected a JSON object")
    for key in ("carrier_family", "carrier_member", "wiring", "basis_family", "unknown_arity"):
        if key not in data:
            raise ProtocolSchemaError(key, "missing required field")
    try:
        fam = _bases.family(str(data["carrier_family"]))
    except ValueError as e:
        raise ProtocolSchemaError("carrier_family", str(e)) from None
    member = data["carrier_member"]
    try:
        carrier = fam[int(member)] if str(member).isdigit() else fam[str(member)]
    except (KeyError, IndexError):
        raise ProtocolSchemaError("carrier_member", f"{member!r} not in {fam.name}") from None
    try:
        basis = _bases.family(str(data["basis_family"]))
    except ValueError as e:
        raise ProtocolSchemaError("basis_family", str(e)) from None
    wiring_raw = data["wiring"]
    if not isinstance(wiring_raw, dict):
        raise ProtocolSchemaError("wiring", "expected an object of role -> qubit list")
    try:
        wiring = QubitWiring(wiring_raw)
    except (TypeError, ValueError) as e:
        raise ProtocolSchemaError("wiring", str(e)) from None
    pre = []
    for i, op in enumerate(data.get("pre_ops") or []):
        where = f"pre_ops[{i}]"
        if not isinstance(op, dict) or "targets" not in op:
            raise ProtocolSchemaError(where, "expected an object with 'targets'")
        if "gate" in op:
            if op["gate"] not in GATES:
                raise ProtocolSchemaError(where, f"unknown gate {op['gate']!r}")
            u = GATES[op["gate"]]
        elif "matrix" in op:
            u = _parse_matrix(op["matrix"], where)
        else:
            raise ProtocolSchemaError(where, "needs 'gate' or 'matrix'")
        targets = tuple(int(q) for q in op["targets"])
        if u.shape != (1 << len(targets),) * 2:
            raise ProtocolSchemaError(where, "matrix size does not match targets")
        pre.append((u, targets))
    try:
        arity = int(data["unknown_arity"])
    except (TypeError, ValueError):
        raise ProtocolSchemaError("unknown_arity", "must be an integer") from None
    return Protocol(
        name=str(data.get("name", "protocol")),
        unknown_arity=arity,
        carrier=carrier,
        wiring=wiring,
        measurement_basis=basis,
        pre_measurement_ops=pre,
        input_subspace=tuple(data["input_subspace"]) if data.get("input_subspace") else None,
        expect_failure=bool(data.get("expect_failure", False)),
    )


def load_protocol(text: str) -> Protocol:
    try:
        data = json.loads(text)
    except json.JSONDecodeError as e:
        raise ProtocolSchemaError(f"line {e.lineno}", e.msg) from None
    return protocol_from_dict(data)


def protocol_files() -> dict:
    """JSON descriptions of the catalog protocols (name -> dict)."""
    w1 = {"alice_unknown": [1], "alice_carrier": [2, 3], "bob_carrier": [4]}
    w2 = {"alice_unknown": [1, 2], "alice_carrier": [3, 4], "bob_carrier": [5, 6]}
    return {
        "ghz_chi": {"name": "ghz_chi", "carrier_family": "ghz", "carrier_member": 1,
                    "wiring": w1, "basis_family": "chi", "pre_ops": [], "unknown_arity": 1},
        "ghz_varphi_cnots": {
            "name": "ghz_varphi_cnots", "carrier_family": "ghz", "carrier_member": 1,
            "wiring": w1, "basis_family": "varphi3",
            "pre_ops": [{"gate": "CNOT", "targets": [2, 3]}, {"gate": "CNOT", "targets": [1, 2]}],
            "unknown_arity": 1},
        "epr_ghz_varphi": {
            "name": "epr_ghz_varphi", "carrier_family": "ghz", "carrier_member": 1,
            "wiring": {"alice_unknown": [1, 2], "alice_carrier": [3], "bob_carrier": [4, 5]},
            "basis_family": "varphi3", "pre_ops": [], "unknown_arity": 2,
            "input_subspace": ["01", "10"]},
        "varphi_carrier_ghz": {
            "name": "varphi_carrier_ghz", "carrier_family": "varphi3", "carrier_member": 1,
            "wiring": w1, "basis_family": "ghz", "pre_ops": [], "unknown_arity": 1},
        "eq21_two_qubit": {
            "name": "eq21_two_qubit", "carrier_family": "eq21", "carrier_member": 1,
            "wiring": w2, "basis_family": "eq21", "pre_ops": [], "unknown_arity": 2},
        "eq25_two_qubit": {
            "name": "eq25_two_qubit", "carrier_family": "eq25", "carrier_member": 1,
            "wiring": w2, "basis_family": "eq25", "pre_ops": [], "unknown_arity": 2},
        "ghz_ghz_projection": {
            "name": "ghz_ghz_projection", "carrier_family": "ghz", "carrier_member": 1,
            "wiring": w1, "basis_family": "ghz", "pre_ops": [], "unknown_arity": 1,
            "expect_failure": True},
    }
