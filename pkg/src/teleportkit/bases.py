"""Named entangled state families and their orthonormality checks.

Every family is built from its defining tensor structure (Bell pairs,
single-qubit kets, GHZ triples), never from hand-typed amplitude tables, so
the expansions quoted in docstrings are checked rather than assumed.
Members of each ``+/-`` pair are listed ``+`` first.
"""
from __future__ import annotations

import json
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .statevector import (
    ATOL,
    PAULI,
    StateVector,
    apply_unitary,
    basis_ket,
    inner,
    ket_sum,
    place,
    tensor,
)

SQRT2 = np.sqrt(2.0)

_BELL_KETS = {
    "phi+": {"00": 1, "11": 1},
    "phi-": {"00": 1, "11": -1},
    "psi+": {"01": 1, "10": 1},
    "psi-": {"01": 1, "10": -1},
}
_BELL_ALIASES = {"φ+": "phi+", "φ-": "phi-", "ψ+": "psi+", "ψ-": "psi-",
                 "φ⁺": "phi+", "φ⁻": "phi-", "ψ⁺": "psi+", "ψ⁻": "psi-"}


@dataclass
class BasisSet:
    """Named, ordered family of states on ``particles`` (1-based wire labels)."""

    name: str
    members: list
    particles: tuple = None
    notes: dict = field(default_factory=dict)

    def __post_init__(self):
        n = self.members[0][1].n_qubits
        if any(s.n_qubits != n for _, s in self.members):
            raise ValueError("members act on different numbers of qubits")
        if self.particles is None:
            self.particles = tuple(range(1, n + 1))
        self.particles = tuple(self.particles)
        if len(self.particles) != n:
            raise ValueError("particle labels do not match member size")

    @property
    def n_qubits(self) -> int:
        return self.members[0][1].n_qubits

    @property
    def labels(self) -> list:
        return [lab for lab, _ in self.members]

    @property
    def states(self) -> list:
        return [s for _, s in self.members]

    def __len__(self):
        return len(self.members)

    def __iter__(self):
        return iter(self.members)

    def __getitem__(self, key) -> StateVector:
        """Look up by label, or by 1-based position for integers."""
        if isinstance(key, int):
            if not 1 <= key <= len(self.members):
                raise IndexError(key)
            return self.members[key - 1][1]
        for lab, s in self.members:
            if lab == key:
                return s
        raise KeyError(key)

    def matrix(self) -> np.ndarray:
        """Rows are members."""
        return np.array([s.amplitudes for s in self.states])

    def gram(self) -> np.ndarray:
        m = self.matrix()
        return m.conj() @ m.T

    def is_orthonormal(self, atol: float = ATOL) -> bool:
        return np.allclose(self.gram(), np.eye(len(self)), rtol=0, atol=atol)

    @property
    def complete(self) -> bool:
        return len(self) == 1 << self.n_qubits

    def resolves_identity(self, atol: float = 1e-10) -> bool:
        m = self.matrix()
        return self.complete and np.allclose(m.T @ m.conj(), np.eye(m.shape[1]), rtol=0, atol=atol)

    def relabel(self, particles: Sequence[int]) -> "BasisSet":
        """Same states, attached to different wires (labels are bookkeeping only)."""
        return BasisSet(self.name, list(self.members), tuple(particles), dict(self.notes))


def _bell(kind: str) -> StateVector:
    kind = _BELL_ALIASES.get(kind, kind)
    if kind not in _BELL_KETS:
        raise ValueError(f"unknown Bell state {kind!r}")
    return ket_sum(_BELL_KETS[kind], 1 / SQRT2)


def bell_pair(kind: str, particles: Sequence[int] = (1, 2)) -> StateVector:
    """Bell state ``phi+``, ``phi-``, ``psi+`` or ``psi-`` on two particles.

    The returned state is two qubits wide; ``particles`` names the wires it
    is meant for and is validated here. Use :func:`teleportkit.statevector.place`
    to embed it in a larger register.
    """
    if len(particles) != 2 or particles[0] == particles[1]:
        raise ValueError(f"a Bell pair needs two distinct particles, got {particles}")
    return _bell(kind)


def bell_basis() -> BasisSet:
    return BasisSet("bell", [(k, _bell(k)) for k in ("phi+", "phi-", "psi+", "psi-")])


def _k(bit) -> StateVector:
    return basis_ket(str(bit))


def _pm_pairs(name: str, pairs) -> list:
    """Expand ``[(A, B), ...]`` into members ``(A+B)/sqrt2, (A-B)/sqrt2, ...``."""
    out = []
    for a, b in pairs:
        out.append((f"{name}.{len(out) + 1}", (a + b) / SQRT2))
        out.append((f"{name}.{len(out) + 1}", (a - b) / SQRT2))
    return out


def ghz_basis(particles: Sequence[int] = (1, 2, 3)) -> BasisSet:
    """The eight GHZ states in the order 000+-111, 010+-101, 011+-100, 001+-110."""
    if len(set(particles)) != 3 or len(particles) != 3:
        raise ValueError(f"GHZ basis needs three distinct particles, got {particles}")
    pairs = [("000", "111"), ("010", "101"), ("011", "100"), ("001", "110")]
    members = _pm_pairs("ghz", [(basis_ket(a), basis_ket(b)) for a, b in pairs])
    return BasisSet("ghz", members, tuple(particles))


def ghz_state(sign: int = 1) -> StateVector:
    return (basis_ket("000") + sign * basis_ket("111")) / SQRT2


def chi_basis() -> BasisSet:
    """Bell(12) x single(3): (B+ |s> +- B- |1-s>)/sqrt2 for B in phi, psi and s = 0, 1.

    ``chi.1`` expands to (|000> + |110> + |001> - |111>)/2.
    """
    pairs = []
    for b in ("phi", "psi"):
        for s in (0, 1):
            pairs.append((tensor(_bell(b + "+"), _k(s)), tensor(_bell(b + "-"), _k(1 - s))))
    return BasisSet("chi", _pm_pairs("chi", pairs))


def varphi_basis() -> BasisSet:
    """single(1) x Bell(23): (|s> B+ +- |1-s> B-)/sqrt2.

    ``varphi3.1`` expands to (|000> + |011> + |100> - |111>)/2.
    """
    pairs = []
    for b in ("phi", "psi"):
        for s in (0, 1):
            pairs.append((tensor(_k(s), _bell(b + "+")), tensor(_k(1 - s), _bell(b + "-"))))
    return BasisSet("varphi3", _pm_pairs("varphi3", pairs))


def chi_prime_basis() -> BasisSet:
    """Bell(13) x single(2), otherwise laid out like :func:`chi_basis`."""
    pairs = []
    for b in ("phi", "psi"):
        for s in (0, 1):
            pairs.append((
                place([(_bell(b + "+"), (1, 3)), (_k(s), (2,))]),
                place([(_bell(b + "-"), (1, 3)), (_k(1 - s), (2,))]),
            ))
    return BasisSet("chi_prime", _pm_pairs("chi_prime", pairs))


def _eq21() -> BasisSet:
    # outer bit o1 slowest, then Bell type, then outer bit o4
    pairs = []
    for o1 in (0, 1):
        for b in ("phi", "psi"):
            for o4 in (0, 1):
                pairs.append((
                    tensor(_k(o1), _bell(b + "+"), _k(o4)),
                    tensor(_k(1 - o1), _bell(b + "-"), _k(1 - o4)),
                ))
    return BasisSet("eq21", _pm_pairs("eq21", pairs))


def _ghz_by_index() -> list:
    return ghz_basis().states


def _eq25() -> BasisSet:
    g = _ghz_by_index()
    layout = [(1, 3, 0), (2, 4, 0), (1, 3, 1), (2, 4, 1),
              (5, 7, 0), (6, 8, 0), (5, 7, 1), (6, 8, 1)]
    pairs = [(tensor(g[p - 1], _k(s)), tensor(g[q - 1], _k(1 - s))) for p, q, s in layout]
    return BasisSet("eq25", _pm_pairs("eq25", pairs))


def _eq27() -> BasisSet:
    # single(1) x Bell(24) x single(3): phi on the first branch, psi on the second
    pairs = []
    for o1 in (0, 1):
        for sgn in "+-":
            for o3 in (0, 1):
                pairs.append((
                    place([(_k(o1), (1,)), (_bell("phi" + sgn), (2, 4)), (_k(o3), (3,))]),
                    place([(_k(1 - o1), (1,)), (_bell("psi" + sgn), (2, 4)), (_k(1 - o3), (3,))]),
                ))
    return BasisSet("eq27", _pm_pairs("eq27", pairs))


def _eq31() -> BasisSet:
    g = _ghz_by_index()
    layout = [((1, 0), (4, 1)), ((3, 1), (2, 0)), ((1, 1), (4, 0)), ((3, 0), (2, 1)),
              ((5, 0), (8, 1)), ((7, 1), (6, 0)), ((5, 1), (8, 0)), ((7, 0), (6, 1))]
    pairs = [(tensor(g[p - 1], _k(s)), tensor(g[q - 1], _k(t))) for (p, s), (q, t) in layout]
    return BasisSet("eq31", _pm_pairs("eq31", pairs))


def _eq20() -> BasisSet:
    """Products Bell(14) x Bell(23); member 1 is (|0000>+|1001>+|0110>+|1111>)/2."""
    kinds = ("phi+", "phi-", "psi+", "psi-")
    members = []
    for a in kinds:
        for b in kinds:
            members.append((f"eq20.{len(members) + 1}",
                            place([(_bell(a), (1, 4)), (_bell(b), (2, 3))])))
    return BasisSet("eq20", members, notes={"factors": "Bell(14) x Bell(23)"})


def yeo_chua_generator() -> StateVector:
    zeta0 = ket_sum({"0000": 1, "0011": -1, "0101": -1, "0110": 1}, 0.5)
    zeta1 = ket_sum({"1001": 1, "1010": 1, "1100": 1, "1111": 1}, 0.5)
    return (zeta0 + zeta1) / SQRT2


def _yeo_chua() -> BasisSet:
    """chi00 and its images under sigma^1 x sigma^2, rows ordered I, x, y, z per qubit."""
    g = yeo_chua_generator()
    members, notes = [], {}
    for p1 in "IXYZ":
        for p2 in "IXYZ":
            u = np.kron(PAULI[p1], PAULI[p2])
            lab = f"yeo_chua.{len(members) + 1}"
            members.append((lab, apply_unitary(g, u, (1, 2))))
            notes[lab] = f"{p1}1 {p2}2"
    return BasisSet("yeo_chua", members, notes=notes)


FOUR_PARTICLE_SETS = {
    "eq21": _eq21,
    "eq25": _eq25,
    "eq27": _eq27,
    "eq31": _eq31,
    "eq20_family": _eq20,
    "yeo_chua": _yeo_chua,
}


def four_particle_set(which: str) -> BasisSet:
    try:
        return FOUR_PARTICLE_SETS[which]()
    except KeyError:
        raise ValueError(f"unknown four-particle set {which!r}; "
                         f"choose from {sorted(FOUR_PARTICLE_SETS)}") from None


@dataclass
class SeparableExample:
    label: str
    state: StateVector
    factors: list  # (StateVector, wire labels) pairs whose placement equals ``state``

    def product(self) -> StateVector:
        return place(self.factors)


def separable_examples() -> list:
    plus = (basis_ket("0") + basis_ket("1")) / SQRT2
    eq5 = ket_sum({"000": 1, "110": 1, "001": 1, "111": 1}, 0.5)
    eq20 = ket_sum({"0000": 1, "1001": 1, "0110": 1, "1111": 1}, 0.5)
    return [
        SeparableExample("eq5", eq5, [(_bell("phi+"), (1, 2)), (plus, (3,))]),
        SeparableExample("eq20", eq20, [(_bell("phi+"), (1, 4)), (_bell("phi+"), (2, 3))]),
    ]


MAX_GENERALIZED_N = 6


def _generalized_vectors(n_pairs: int) -> np.ndarray:
    """Rows of the 2N-qubit family, built by wrapping the (2N-2)-qubit one."""
    if n_pairs == 1:
        return bell_basis().matrix()
    inner_rows = _generalized_vectors(n_pairs - 1)
    d_in = inner_rows.shape[1]
    odd, even = inner_rows[0::2], inner_rows[1::2]
    e = np.eye(2)
    rows = []
    for o1 in (0, 1):
        for k in range(len(odd)):
            for o_last in (0, 1):
                a = np.kron(np.kron(e[o1], odd[k]), e[o_last])
                b = np.kron(np.kron(e[1 - o1], even[k]), e[1 - o_last])
                rows.append((a + b) / SQRT2)
                rows.append((a - b) / SQRT2)
    out = np.array(rows, dtype=complex)
    assert out.shape == (4 * d_in, 4 * d_in)
    return out


def generalized_basis(n_pairs: int) -> BasisSet:
    """2N-qubit family: (|o> chi_odd |o'> +- |1-o> chi_even |1-o'>)/sqrt2.

    The inner members come from the (2N-2)-qubit family, paired (1,2),
    (3,4), ...; the outer bits ``o`` (qubit 1) and ``o'`` (qubit 2N) run
    independently. For N = 2 this is the ``eq21`` family in the same order.
    """
    if not 2 <= n_pairs <= MAX_GENERALIZED_N:
        raise ValueError(f"N must be in 2..{MAX_GENERALIZED_N}, got {n_pairs}")
    rows = _generalized_vectors(n_pairs)
    name = f"gen{n_pairs}"
    return BasisSet(name, [(f"{name}.{i + 1}", StateVector(r)) for i, r in enumerate(rows)])


FAMILIES = {
    "bell": bell_basis,
    "ghz": ghz_basis,
    "chi": chi_basis,
    "varphi3": varphi_basis,
    "chi_prime": chi_prime_basis,
    **FOUR_PARTICLE_SETS,
}


def family(name: str) -> BasisSet:
    if name in FAMILIES:
        return FAMILIES[name]()
    if name.startswith("gen") and name[3:].isdigit():
        return generalized_basis(int(name[3:]))
    raise ValueError(f"unknown family {name!r}")


def catalog_state(label: str) -> StateVector:
    """Resolve labels such as ``chi.1``, ``eq21.7``, ``phi+``, ``ghz.3`` or ``eq5``."""
    for ex in separable_examples():
        if ex.label == label:
            return ex.state
    if label in _BELL_KETS or label in _BELL_ALIASES:
        return _bell(label)
    fam, _, idx = label.rpartition(".")
    if fam == "eq20":
        fam = "eq20_family"
    if fam and idx.isdigit():
        return family(fam)[int(idx)]
    raise KeyError(f"unknown state label {label!r}")


def phase_map(a: BasisSet, b: BasisSet, atol: float = 1e-10) -> list:
    """Match members of ``a`` to members of ``b`` equal up to a global phase.

    Returns ``(label_a, label_b, phase)`` with ``a_member == phase * b_member``.
    Raises ``ValueError`` if some member of ``a`` has no partner in ``b``.
    """
    out = []
    for la, sa in a:
        for lb, sb in b:
            ov = inner(sb, sa)
            if abs(abs(ov) - 1) < atol:
                out.append((la, lb, ov))
                break
        else:
            raise ValueError(f"{la} has no phase-equivalent partner in {b.name}")
    return out


# -- golden file format -----------------------------------------------------
# amplitude = (re + i*im) / sqrt2**k with integer re, im and the smallest k

def _exact(c: complex, max_pow: int, tol: float = 1e-9):
    for k in range(max_pow + 1):
        scaled = c * SQRT2 ** k
        re, im = round(scaled.real), round(scaled.imag)
        if abs(scaled.real - re) < tol and abs(scaled.imag - im) < tol:
            return re, im, k
    raise ValueError(f"amplitude {c} is not a Gaussian integer over a power of sqrt2")


def encode_state(s: StateVector) -> list:
    n = s.n_qubits
    out = []
    for i in np.flatnonzero(np.abs(s.amplitudes) > 1e-12):
        re, im, k = _exact(complex(s.amplitudes[i]), 2 * n + 2)
        out.append({"bits": format(i, f"0{n}b"), "num": [re, im], "sqrt2_pow": k})
    return out


def decode_state(entries: list, n_qubits: int) -> StateVector:
    a = np.zeros(1 << n_qubits, dtype=complex)
    for e in entries:
        re, im = e["num"]
        a[int(e["bits"], 2)] = complex(re, im) / SQRT2 ** e["sqrt2_pow"]
    return StateVector(a)


def to_golden(basis: BasisSet) -> str:
    from .formatting import dumps_json

    payload = {
        "family": basis.name,
        "n_qubits": basis.n_qubits,
        "particles": list(basis.particles),
        "members": [{"label": lab, "amplitudes": encode_state(s)} for lab, s in basis],
    }
    return dumps_json(payload)


def from_golden(text: str) -> BasisSet:
    data = json.loads(text)
    n = int(data["n_qubits"])
    members = [(m["label"], decode_state(m["amplitudes"], n)) for m in data["members"]]
    return BasisSet(data["family"], members, tuple(data.get("particles") or range(1, n + 1)))


@dataclass
class GoldenCheck:
    family: str
    n_members: int
    normalized: bool
    orthonormal: bool
    complete: bool
    max_offdiag: float

    @property
    def ok(self) -> bool:
        return self.normalized and self.orthonormal


def check_golden(text: str) -> GoldenCheck:
    b = from_golden(text)
    g = b.gram()
    off = g - np.diag(np.diag(g))
    return GoldenCheck(
        family=b.name,
        n_members=len(b),
        normalized=bool(np.allclose(np.diag(g), 1, rtol=0, atol=ATOL)),
        orthonormal=b.is_orthonormal(),
        complete=b.complete,
        max_offdiag=float(np.abs(off).max()) if len(b) > 1 else 0.0,
    )
