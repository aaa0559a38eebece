import json

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from teleportkit import bases
from teleportkit import circuits as cc
from teleportkit import teleport as tp
from teleportkit.statevector import GATES, PAULI, StateVector, basis_ket, fidelity, ket_sum

A, B = 0.6, 0.8j
S2 = np.sqrt(2)


def ket(d, scale):
    return ket_sum(d, scale).amplitudes


def same_ray(u, v, atol=1e-10):
    return abs(abs(np.vdot(u, v)) - 1) < atol


def test_gate_identities():
    h, cnot = GATES["H"], GATES["CNOT"]
    np.testing.assert_allclose(h @ h, np.eye(2), atol=1e-12)
    np.testing.assert_allclose(cnot @ cnot, np.eye(4), atol=1e-12)
    # X applied first, then Z
    np.testing.assert_allclose(PAULI["Z"] @ PAULI["X"], 1j * PAULI["Y"], atol=1e-12)
    np.testing.assert_allclose(PAULI["X"] @ PAULI["Z"], -1j * PAULI["Y"], atol=1e-12)
    xz = cc.Circuit(1, [cc.X(1), cc.Z(1)]).unitary()
    np.testing.assert_allclose(xz, 1j * PAULI["Y"], atol=1e-12)


def test_gate_validation():
    with pytest.raises(ValueError):
        cc.Gate("CNOT", (1,))
    with pytest.raises(ValueError):
        cc.Gate("CNOT", (2, 2))
    with pytest.raises(ValueError):
        cc.Gate("custom-1q", (1,), np.array([[1, 1], [0, 1]]))
    with pytest.raises(ValueError):
        cc.Gate("T", (1,))
    with pytest.raises(ValueError):
        cc.Circuit(2, [cc.H(3)])


def test_empty_circuit_is_identity():
    s = basis_ket("010")
    r = cc.run_circuit(cc.Circuit(3, []), s)
    np.testing.assert_array_equal(r.state.amplitudes, s.amplitudes)
    assert r.steps == [] and r.outcomes is None
    out = cc.measure_outcomes(cc.Circuit(3, []), basis_ket("000"))
    assert [o.bits for o in out if o.probability > 0] == ["000"]
    assert out[0].probability == 1


def test_circuit_inverse():
    c = cc.Circuit(3, [cc.H(1), cc.CNOT(1, 2), cc.Gate("custom-1q", (3,), np.diag([1, 1j]))])
    np.testing.assert_allclose(c.inverse().unitary() @ c.unitary(), np.eye(8), atol=1e-12)


FIG2 = [
    {"0000": A, "0111": A, "1010": B, "1101": B},
    {"0000": A, "1000": A, "0111": A, "1111": A,
     "0010": B, "1010": -B, "0101": B, "1101": -B},
    {"0000": A, "0100": A, "1000": A, "1100": A,
     "0011": A, "0111": -A, "1011": A, "1111": -A,
     "0010": B, "0110": B, "1010": -B, "1110": -B,
     "0001": B, "0101": -B, "1001": -B, "1101": B},
]


def test_fig2_intermediate_states():
    run = cc.run_circuit(cc.fig2_network(), cc.fig2_input(ket_sum({"0": A, "1": B})))
    for step, want, scale in zip(run.steps, FIG2, (1 / S2, 0.5, 1 / (2 * S2))):
        np.testing.assert_allclose(step.amplitudes, ket(want, scale), atol=1e-12)


FIG3 = [
    {"01000": A, "01111": A, "10100": B, "10011": B},
    {"01000": A, "11000": A, "01111": A, "11111": A,
     "00100": B, "10100": -B, "00011": B, "10011": -B},
    {"00000": A, "01000": -A, "10000": A, "11000": -A,
     "00111": A, "01111": -A, "10111": A, "11111": -A,
     "00100": B, "01100": B, "10100": -B, "11100": -B,
     "00011": B, "01011": B, "10011": -B, "11011": -B},
]


def test_fig3_intermediate_states():
    run = cc.run_circuit(cc.fig3_network(), cc.fig3_input(ket_sum({"01": A, "10": B})))
    for step, want, scale in zip(run.steps, FIG3, (1 / S2, 0.5, 1 / (2 * S2))):
        np.testing.assert_allclose(step.amplitudes, ket(want, scale), atol=1e-12)


FIG2_BOB = {"000": (A, B), "001": (B, A), "010": (A, -B), "011": (B, -A),
            "110": (A, B), "101": (-B, A), "100": (A, -B), "111": (-B, -A)}
FIG3_BOB = {"000": {"00": A, "11": B}, "010": {"00": -A, "11": B},
            "100": {"00": A, "11": -B}, "110": {"00": -A, "11": -B},
            "001": {"11": A, "00": B}, "011": {"11": -A, "00": B},
            "101": {"11": A, "00": -B}, "111": {"11": -A, "00": -B}}


@pytest.mark.parametrize("net,inp", [(cc.fig2_network, cc.fig2_input),
                                     (cc.fig5_network, cc.fig5_input)])
def test_single_qubit_readout_brackets(net, inp):
    """Unnormalized Bob amplitudes (times 2 sqrt2) after each readout."""
    run = cc.run_circuit(net(), inp(ket_sum({"0": A, "1": B})))
    m = run.state.amplitudes.reshape(8, 2) * 2 * S2
    for bits, (c0, c1) in FIG2_BOB.items():
        np.testing.assert_allclose(m[int(bits, 2)], [c0, c1], atol=1e-12)


def test_fig3_readout_brackets():
    run = cc.run_circuit(cc.fig3_network(), cc.fig3_input(ket_sum({"01": A, "10": B})))
    m = run.state.amplitudes.reshape(8, 4) * 2 * S2
    for bits, d in FIG3_BOB.items():
        np.testing.assert_allclose(m[int(bits, 2)], ket(d, 1.0), atol=1e-12)


def test_fig2_outcomes_uniform():
    outs = cc.run_circuit(cc.fig2_network(), cc.fig2_input(ket_sum({"0": A, "1": B}))).outcomes
    assert len(outs) == 8
    for o in outs:
        assert o.probability == pytest.approx(1 / 8, abs=1e-12)
        assert o.bob_state.norm() == pytest.approx(1)


def _classes(protocol):
    groups = {}
    for lab, c in tp.correction_map(protocol).items():
        groups.setdefault(c.word, set()).add(lab)
    return groups


def test_fig2_correction_classes():
    g = _classes(cc.builtin_networks()["fig2"])
    assert g == {"I": {"000", "110"}, "X": {"001", "111"}, "Z": {"010", "100"},
                 "Y": {"011", "101"}}


def test_fig3_correction_classes():
    p = cc.builtin_networks()["fig3"]
    g = _classes(p)
    assert sorted(map(sorted, g.values())) == [["000", "110"], ["001", "111"],
                                              ["010", "100"], ["011", "101"]]
    # the printed I4 X5 for readouts 000 and 110
    for lab in ("000", "110"):
        assert tp.correction_equivalent(p, lab, "IX")


@pytest.mark.parametrize("name", ["fig2", "fig3", "fig5", "eq21_network", "eq25_network"])
def test_networks_teleport(name):
    s = tp.run_random(cc.builtin_networks()[name], n_inputs=10, seed=4, keep_reports=False)
    assert s.all_success and s.min_fidelity > 1 - 1e-10
    assert s.max_probability_deviation < 1e-10


def test_fig5_needs_identity_twice():
    words = [c.word for c in tp.correction_map(cc.builtin_networks()["fig5"]).values()]
    assert words.count("I") == 2


def test_gate_pipeline_matches_projective_engine():
    """Bob's conditional states from the chi measurement equal the fig2 network ones, as a set."""
    rng = np.random.default_rng(100)
    proj = tp.builtin_protocols()["ghz_chi"]
    for _ in range(100):
        u = proj.random_unknown(rng)
        gate = cc.run_circuit(cc.fig2_network(), cc.fig2_input(u)).outcomes
        recs = tp.decompose(tp.compose(u, proj), proj.measurement_basis, proj.alice_qubits)
        gate_states = [o.bob_state.amplitudes for o in gate]
        for r in recs:
            assert any(same_ray(r.bob_state.amplitudes, g) for g in gate_states)


@pytest.mark.parametrize("label,want", [
    ("ghz", {"000": 1, "111": 1}),
    ("varphi3.1", {"000": 1, "100": 1, "011": 1, "111": -1}),
])
def test_prepare_three_qubit(label, want):
    c = cc.prepare(label)
    out = cc.run_circuit(c, basis_ket("0" * c.n_qubits)).state
    scale = 1 / S2 if len(want) == 2 else 0.5
    assert same_ray(out.amplitudes, ket(want, scale), atol=1e-12)


@pytest.mark.parametrize("fam", ["eq21", "eq25"])
def test_prepare_every_four_qubit_member(fam):
    for k in range(1, 17):
        c = cc.prepare(f"{fam}.{k}")
        out = cc.run_circuit(c, basis_ket("0000")).state
        assert fidelity(out, bases.four_particle_set(fam)[k]) > 1 - 1e-10


def test_prepare_rejects_unknown():
    for bad in ("chi.1", "ghz.3", "eq21.x"):
        with pytest.raises(ValueError):
            cc.prepare(bad)


def test_full_two_qubit_circuit_teleports():
    c = cc.two_qubit_full_circuit("eq21")
    rng = np.random.default_rng(8)
    psi = tp.builtin_protocols()["eq21_two_qubit"].random_unknown(rng)
    start = StateVector(np.kron(psi.amplitudes, basis_ket("0000").amplitudes))
    outs = cc.run_circuit(c, start).outcomes
    assert sum(o.probability for o in outs) == pytest.approx(1)
    assert all(o.probability == pytest.approx(1 / 16) for o in outs)


def test_sample_statistics():
    counts = cc.sample(cc.fig2_network(), cc.fig2_input(ket_sum({"0": A, "1": B})),
                       seed=2024, shots=8000)
    assert sum(counts.values()) == 8000 and len(counts) == 8
    sigma = np.sqrt(8000 * (1 / 8) * (7 / 8))
    for n in counts.values():
        assert abs(n - 1000) < 5 * sigma


def test_sample_is_reproducible_and_single_shot():
    c, s = cc.fig2_network(), cc.fig2_input(ket_sum({"0": A, "1": B}))
    assert cc.sample(c, s, seed=1, shots=500) == cc.sample(c, s, seed=1, shots=500)
    one = cc.sample(c, s, seed=3, shots=1)
    assert sum(one.values()) == 1
    with pytest.raises(ValueError):
        cc.sample(c, s, seed=0, shots=0)


def test_zero_probability_outcomes_never_sampled():
    # GHZ readout: only 000 and 111 carry weight
    counts = cc.sample(cc.ghz_prep(), basis_ket("000"), seed=5, shots=1_000_000)
    assert set(counts) == {"000", "111"}
    assert sum(counts.values()) == 1_000_000


@settings(max_examples=25, deadline=None)
@given(st.integers(0, 2 ** 32 - 1))
def test_measure_distribution_matches_amplitudes(seed):
    rng = np.random.default_rng(seed)
    psi = tp.builtin_protocols()["ghz_chi"].random_unknown(rng)
    run = cc.run_circuit(cc.fig2_network(), cc.fig2_input(psi))
    probs = np.abs(run.state.amplitudes.reshape(8, 2)) ** 2
    np.testing.assert_allclose([o.probability for o in run.outcomes], probs.sum(1), atol=1e-12)


def test_circuit_file_roundtrip():
    c = cc.fig3_network()
    back = cc.load_circuit(json.dumps(c.to_dict()))
    np.testing.assert_allclose(back.unitary(), c.unitary())
    assert back.measure == (1, 2, 3)
    bare = cc.circuit_from_dict([{"gate": "H", "targets": [2]}])
    assert bare.n_qubits == 2
    custom = cc.Circuit(1, [cc.Gate("custom-1q", (1,), np.diag([1, 1j]))])
    np.testing.assert_allclose(cc.load_circuit(json.dumps(custom.to_dict())).unitary(),
                               np.diag([1, 1j]))
    with pytest.raises(ValueError, match=r"gates\[0\]"):
        cc.circuit_from_dict({"gates": [{"gate": "CNOT", "targets": [1]}]})
