"""Dense state-vector kernel for small qubit registers.

Qubits are addressed by 1-based labels, matching the left-to-right order in
which particles are written inside a ket: label ``k`` is the ``k``-th
character of the bitstring, i.e. amplitude index ``int(bits, 2)`` is
big-endian with qubit 1 as the most significant bit.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Mapping, Sequence, Union

import numpy as np

MAX_QUBITS = 16
ATOL = 1e-12
EIG_ATOL = 1e-10

PAULI = {
    "I": np.eye(2, dtype=complex),
    "X": np.array([[0, 1], [1, 0]], dtype=complex),
    "Y": np.array([[0, -1j], [1j, 0]], dtype=complex),
    "Z": np.array([[1, 0], [0, -1]], dtype=complex),
}

_H = np.array([[1, 1], [1, -1]], dtype=complex) / np.sqrt(2)
_CNOT = np.array([[1, 0, 0, 0], [0, 1, 0, 0], [0, 0, 0, 1], [0, 0, 1, 0]], dtype=complex)

# fixed-size gates; two-qubit matrices act on (first, second) listed target
GATES = {
    "I": PAULI["I"],
    "X": PAULI["X"],
    "Y": PAULI["Y"],
    "Z": PAULI["Z"],
    "H": _H,
    "CNOT": _CNOT,
    "CZ": np.diag([1, 1, 1, -1]).astype(complex),
    "SWAP": np.eye(4, dtype=complex)[[0, 2, 1, 3]],
}


def _frozen(a: np.ndarray) -> np.ndarray:
    a = np.array(a, dtype=complex)
    a.setflags(write=False)
    return a


def _n_from_dim(dim: int) -> int:
    n = dim.bit_length() - 1
    if dim < 2 or 1 << n != dim:
        raise ValueError(f"dimension {dim} is not a power of two >= 2")
    if n > MAX_QUBITS:
        raise ValueError(f"{n} qubits exceeds the dense cap of {MAX_QUBITS}")
    return n


@dataclass(frozen=True, eq=False)
class StateVector:
    """Pure state of ``n_qubits`` qubits; ``amplitudes`` is read-only."""

    amplitudes: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "amplitudes", _frozen(np.ravel(self.amplitudes)))
        _n_from_dim(self.amplitudes.size)

    @property
    def n_qubits(self) -> int:
        return self.amplitudes.size.bit_length() - 1

    @property
    def dim(self) -> int:
        return self.amplitudes.size

    def norm(self) -> float:
        return float(np.linalg.norm(self.amplitudes))

    def normalize(self) -> "StateVector":
        nrm = self.norm()
        if nrm == 0:
            raise ValueError("cannot normalize the zero vector")
        return StateVector(self.amplitudes / nrm)

    def __add__(self, other: "StateVector") -> "StateVector":
        return StateVector(self.amplitudes + other.amplitudes)

    def __sub__(self, other: "StateVector") -> "StateVector":
        return StateVector(self.amplitudes - other.amplitudes)

    def __mul__(self, c) -> "StateVector":
        return StateVector(self.amplitudes * c)

    __rmul__ = __mul__

    def __truediv__(self, c) -> "StateVector":
        return StateVector(self.amplitudes / c)

    def __neg__(self) -> "StateVector":
        return StateVector(-self.amplitudes)

    def allclose(self, other: "StateVector", atol: float = ATOL) -> bool:
        """Raw amplitude comparison; global phase matters."""
        return self.dim == other.dim and np.allclose(
            self.amplitudes, other.amplitudes, rtol=0, atol=atol
        )

    def equal_up_to_phase(self, other: "StateVector", atol: float = 1e-10) -> bool:
        return self.dim == other.dim and abs(abs(inner(self, other)) - 1) < atol

    def to_ket(self, atol: float = 1e-12, digits: int = 6) -> str:
        """Readable ket expansion, e.g. ``0.707107|00> + 0.707107|11>``."""
        terms = []
        for i in np.flatnonzero(np.abs(self.amplitudes) > atol):
            c = self.amplitudes[i]
            c = c.real if abs(c.imag) < atol else c
            bits = format(i, f"0{self.n_qubits}b")
            terms.append(f"{np.round(c, digits)}|{bits}>")
        return " + ".join(terms) if terms else "0"

    def __repr__(self) -> str:
        return f"StateVector({self.to_ket()})"


@dataclass(frozen=True, eq=False)
class DensityMatrix:
    entries: np.ndarray

    def __post_init__(self):
        m = _frozen(self.entries)
        if m.ndim != 2 or m.shape[0] != m.shape[1]:
            raise ValueError("density matrix must be square")
        _n_from_dim(m.shape[0])
        object.__setattr__(self, "entries", m)

    @property
    def n_qubits(self) -> int:
        return self.entries.shape[0].bit_length() - 1

    @property
    def dim(self) -> int:
        return self.entries.shape[0]

    def is_valid(self, atol: float = ATOL, eig_atol: float = EIG_ATOL) -> bool:
        m = self.entries
        if not np.allclose(m, m.conj().T, rtol=0, atol=atol):
            return False
        if abs(np.trace(m) - 1) > atol:
            return False
        return bool(np.linalg.eigvalsh(m).min() >= -eig_atol)

    @classmethod
    def from_state(cls, s: StateVector) -> "DensityMatrix":
        a = s.amplitudes
        return cls(np.outer(a, a.conj()))


StateLike = Union[StateVector, DensityMatrix]


class PauliWord:
    """Per-qubit Pauli assignment; qubits not mentioned carry the identity.

    Accepts either a mapping ``{label: "X"}`` or a string such as ``"xIz"``
    read left to right as qubits 1, 2, 3.
    """

    __slots__ = ("assignment",)

    def __init__(self, assignment: Union[str, Mapping[int, str]]):
        if isinstance(assignment, str):
            assignment = {k + 1: c for k, c in enumerate(assignment)}
        clean = {}
        for q, c in assignment.items():
            c = c.upper()
            if c not in PAULI:
                raise ValueError(f"unknown Pauli {c!r}")
            if int(q) < 1:
                raise ValueError(f"qubit label {q} must be >= 1")
            if c != "I":
                clean[int(q)] = c
        self.assignment = dict(sorted(clean.items()))

    def max_label(self) -> int:
        return max(self.assignment, default=0)

    def as_string(self, n_qubits: int) -> str:
        return "".join(self.assignment.get(q, "I") for q in range(1, n_qubits + 1))

    def matrix(self, n_qubits: int) -> np.ndarray:
        return kron_all([PAULI[c] for c in self.as_string(n_qubits)])

    def __eq__(self, other):
        return isinstance(other, PauliWord) and self.assignment == other.assignment

    def __hash__(self):
        return hash(tuple(self.assignment.items()))

    def __repr__(self):
        return f"PauliWord({self.assignment})"


@dataclass(frozen=True)
class QubitWiring:
    """Maps protocol roles to global qubit labels.

    ``roles`` is an ordered mapping such as
    ``{"alice_unknown": (1,), "alice_carrier": (2, 3), "bob_carrier": (4,)}``;
    the union of all labels must be a permutation of ``1..n``.
    """

    roles: tuple  # tuple of (role, labels) pairs, kept hashable

    def __init__(self, roles):
        items = tuple((str(r), tuple(int(q) for q in qs)) for r, qs in dict(roles).items())
        object.__setattr__(self, "roles", items)
        labels = [q for _, qs in items for q in qs]
        if sorted(labels) != list(range(1, len(labels) + 1)):
            raise ValueError(f"wiring labels {labels} are not a permutation of 1..{len(labels)}")

    def __getitem__(self, role: str) -> tuple:
        for r, qs in self.roles:
            if r == role:
                return qs
        raise KeyError(role)

    @property
    def n_qubits(self) -> int:
        return sum(len(qs) for _, qs in self.roles)

    def as_dict(self) -> dict:
        return {r: list(qs) for r, qs in self.roles}


def kron_all(mats: Sequence[np.ndarray]) -> np.ndarray:
    out = np.ones((1,) * np.ndim(mats[0]), dtype=complex) if mats else np.ones(1)
    for m in mats:
        out = np.kron(out, m)
    return out


def basis_ket(bits: str) -> StateVector:
    if not bits or set(bits) - {"0", "1"}:
        raise ValueError(f"bad bitstring {bits!r}")
    a = np.zeros(1 << len(bits), dtype=complex)
    a[int(bits, 2)] = 1
    return StateVector(a)


def ket_sum(terms: Mapping[str, complex], scale: complex = 1) -> StateVector:
    """Build ``scale * sum(c |bits>)`` from a ``{bits: c}`` mapping."""
    n = {len(b) for b in terms}
    if len(n) != 1:
        raise ValueError("all bitstrings must have the same length")
    a = np.zeros(1 << n.pop(), dtype=complex)
    for bits, c in terms.items():
        a[int(bits, 2)] += c
    return StateVector(a * scale)


def tensor(*states: StateVector) -> StateVector:
    """Kronecker product; earlier factors take the lower labels."""
    return StateVector(kron_all([s.amplitudes for s in states]))


def _check_labels(labels: Sequence[int], n: int) -> list:
    labels = [int(q) for q in labels]
    if len(set(labels)) != len(labels):
        raise ValueError(f"repeated qubit labels in {labels}")
    for q in labels:
        if not 1 <= q <= n:
            raise ValueError(f"qubit label {q} out of range 1..{n}")
    return labels


def permute_qubits(s: StateVector, order: Sequence[int]) -> StateVector:
    """Return the state whose qubit ``j`` is the input's qubit ``order[j-1]``."""
    n = s.n_qubits
    order = _check_labels(order, n)
    if len(order) != n:
        raise ValueError("order must list every qubit")
    t = s.amplitudes.reshape((2,) * n).transpose([q - 1 for q in order])
    return StateVector(t.reshape(-1))


def place(parts: Sequence[tuple]) -> StateVector:
    """Assemble a joint state from ``(state, labels)`` factors.

    ``place([(bell, (1, 3)), (ket0, (2,))])`` puts the Bell pair on qubits
    1 and 3. The labels across all factors must cover ``1..n`` exactly.
    """
    joint = tensor(*[p[0] for p in parts])
    labels = [int(q) for _, qs in parts for q in qs]
    for st, qs in parts:
        if st.n_qubits != len(qs):
            raise ValueError("factor size does not match its labels")
    n = len(labels)
    _check_labels(labels, n)
    # joint qubit j currently sits on labels[j-1]; invert that map
    order = [labels.index(q) + 1 for q in range(1, n + 1)]
    return permute_qubits(joint, order)


def is_unitary(u: np.ndarray, atol: float = ATOL) -> bool:
    u = np.asarray(u)
    return u.ndim == 2 and u.shape[0] == u.shape[1] and np.allclose(
        u.conj().T @ u, np.eye(u.shape[0]), rtol=0, atol=atol
    )


def apply_unitary(s: StateVector, u: np.ndarray, targets: Sequence[int], check: bool = True) -> StateVector:
    """Apply ``u`` to the listed qubits (in the listed order) of ``s``."""
    n = s.n_qubits
    targets = _check_labels(targets, n)
    u = np.asarray(u, dtype=complex)
    k = len(targets)
    if u.shape != (1 << k, 1 << k):
        raise ValueError(f"matrix shape {u.shape} does not act on {k} qubits")
    if check and not is_unitary(u):
        raise ValueError("matrix is not unitary within 1e-12")
    axes = [q - 1 for q in targets]
    t = s.amplitudes.reshape((2,) * n)
    rest = [i for i in range(n) if i not in axes]
    t = t.transpose(axes + rest).reshape(1 << k, -1)
    t = (u @ t).reshape((2,) * n)
    t = t.transpose(np.argsort(axes + rest))
    return StateVector(t.reshape(-1))


def apply_pauli(s: StateVector, word: PauliWord) -> StateVector:
    """Apply a Pauli word by bit manipulation, without building matrices."""
    return StateVector(_pauli_action(s.amplitudes, word, s.n_qubits))


def _pauli_action(a: np.ndarray, word: PauliWord, n: int) -> np.ndarray:
    if word.max_label() > n:
        raise ValueError(f"Pauli word touches qubit {word.max_label()} of a {n}-qubit state")
    idx = np.arange(a.size)
    flip = 0
    phase = np.ones(a.size, dtype=complex)
    for q, c in word.assignment.items():
        bit = n - q
        b = (idx >> bit) & 1
        if c in "XY":
            flip |= 1 << bit
        if c == "Z":
            phase *= 1 - 2 * b
        elif c == "Y":
            phase *= 1j * (1 - 2 * b)
    out = np.empty_like(a)
    out[idx ^ flip] = phase * a
    return out


def inner(a: StateVector, b: StateVector) -> complex:
    """<a|b>, conjugate-linear in ``a``."""
    if a.dim != b.dim:
        raise ValueError(f"dimension mismatch: {a.dim} vs {b.dim}")
    return complex(np.vdot(a.amplitudes, b.amplitudes))


def expectation(s: StateLike, w: Union[PauliWord, str, Mapping[int, str]]) -> float:
    if not isinstance(w, PauliWord):
        w = PauliWord(w)
    if isinstance(s, DensityMatrix):
        val = np.trace(s.entries @ w.matrix(s.n_qubits))
    else:
        val = np.vdot(s.amplitudes, _pauli_action(s.amplitudes, w, s.n_qubits))
    return float(val.real)


def partial_trace(s: StateLike, keep: Sequence[int]) -> DensityMatrix:
    """Reduced density matrix on ``keep`` (returned in ascending label order)."""
    n = s.n_qubits
    if not keep:
        raise ValueError("keep list is empty")
    keep = sorted(_check_labels(keep, n))
    k = len(keep)
    gone = [q for q in range(1, n + 1) if q not in keep]
    kept_ax = [q - 1 for q in keep]
    gone_ax = [q - 1 for q in gone]
    if isinstance(s, StateVector):
        t = s.amplitudes.reshape((2,) * n).transpose(kept_ax + gone_ax).reshape(1 << k, -1)
        return DensityMatrix(t @ t.conj().T)
    t = s.entries.reshape((2,) * (2 * n))
    perm = kept_ax + gone_ax + [n + i for i in kept_ax] + [n + i for i in gone_ax]
    t = t.transpose(perm).reshape(1 << k, 1 << (n - k), 1 << k, 1 << (n - k))
    return DensityMatrix(np.einsum("ajbj->ab", t))


def fidelity(target: StateVector, got: StateLike) -> float:
    if target.dim != got.dim:
        raise ValueError(f"dimension mismatch: {target.dim} vs {got.dim}")
    t = target.amplitudes
    if isinstance(got, DensityMatrix):
        return float(np.real(np.vdot(t, got.entries @ t)))
    return float(abs(np.vdot(t, got.amplitudes)) ** 2)


def random_state(n_qubits: int, rng: np.random.Generator) -> StateVector:
    """Haar-random pure state from normalized complex Gaussian amplitudes."""
    d = 1 << n_qubits
    a = rng.standard_normal(d) + 1j * rng.standard_normal(d)
    return StateVector(a / np.linalg.norm(a))
