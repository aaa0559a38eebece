"""Ursell-Mayer correlation coefficients (joint cumulants of Pauli spins).

The two-, three- and four-particle coefficients are written out term by
term; ``cumulant_n`` computes the same quantity for any N as a Moebius sum
over set partitions and doubles as an independent cross-check.
"""
from __future__ import annotations

import csv
import io
import itertools
import json
import math
from dataclasses import dataclass, field
from typing import Iterator, Sequence

import numpy as np

from .statevector import (
    DensityMatrix,
    PauliWord,
    StateLike,
    StateVector,
    expectation,
    partial_trace,
)

ZERO_THRESHOLD = 1e-9
MAX_PARTICLES = 8
AXES = "xyz"


@dataclass(frozen=True)
class CorrelationSpec:
    """Which particles carry which spin axis, e.g. ``((1, 2, 3), "xxz")``."""

    particles: tuple
    axes: str

    def __init__(self, particles: Sequence[int], axes: Sequence[str]):
        particles = tuple(int(p) for p in particles)
        axes = "".join(axes).lower()
        if len(particles) != len(axes):
            raise ValueError("particles and axes differ in length")
        if len(set(particles)) != len(particles):
            raise ValueError(f"repeated particle labels in {particles}")
        if set(axes) - set(AXES):
            raise ValueError(f"axes must be drawn from x, y, z; got {axes!r}")
        object.__setattr__(self, "particles", particles)
        object.__setattr__(self, "axes", axes)

    def __len__(self):
        return len(self.particles)

    def word(self, subset: Sequence[int] = None) -> PauliWord:
        """Pauli word for the positions in ``subset`` (0-based into the spec)."""
        if subset is None:
            subset = range(len(self.particles))
        return PauliWord({self.particles[i]: self.axes[i] for i in subset})


def _as_spec(spec, arity: int = None) -> CorrelationSpec:
    if not isinstance(spec, CorrelationSpec):
        spec = CorrelationSpec(*spec)
    if arity is not None and len(spec) != arity:
        raise ValueError(f"expected a {arity}-particle spec, got {len(spec)}")
    return spec


def _mean(s: StateLike, spec: CorrelationSpec, cache: dict = None):
    """Return ``m(i, j, ...)`` = <product of the chosen spins>.

    ``cache`` maps sorted ``(particle, axis)`` tuples to expectations and may
    be shared between calls on the same state (a full 3^N scan touches at
    most 4^N words).
    """
    if cache is None:
        cache = {}
    parts, axes = spec.particles, spec.axes

    def m(*idx):
        key = tuple(sorted((parts[i], axes[i]) for i in idx))
        v = cache.get(key)
        if v is None:
            v = cache[key] = expectation(s, spec.word(idx))
        return v

    return m


def corr2(s: StateLike, spec, cache: dict = None) -> float:
    spec = _as_spec(spec, 2)
    m = _mean(s, spec, cache)
    return m(0, 1) - m(0) * m(1)


def corr3(s: StateLike, spec, cache: dict = None) -> float:
    spec = _as_spec(spec, 3)
    m = _mean(s, spec, cache)
    i, j, k = m(0), m(1), m(2)
    return m(0, 1, 2) - i * m(1, 2) - j * m(0, 2) - k * m(0, 1) + 2 * i * j * k


def corr4(s: StateLike, spec, cache: dict = None) -> float:
    spec = _as_spec(spec, 4)
    m = _mean(s, spec, cache)
    a, b, c, d = m(0), m(1), m(2), m(3)
    ab, ac, ad, bc, bd, cd = m(0, 1), m(0, 2), m(0, 3), m(1, 2), m(1, 3), m(2, 3)
    return (
        m(0, 1, 2, 3)
        - a * m(1, 2, 3)
        - b * m(0, 2, 3)
        - c * m(0, 1, 3)
        - d * m(0, 1, 2)
        + 2 * a * b * cd
        + 2 * a * c * bd
        + 2 * a * d * bc
        + 2 * b * c * ad
        + 2 * b * d * ac
        + 2 * c * d * ab
        - ab * cd
        - ac * bd
        - ad * bc
        - 6 * a * b * c * d
    )


def set_partitions(n: int) -> Iterator[list]:
    """All set partitions of ``range(n)`` via restricted growth strings.

    A restricted growth string ``a`` has ``a[0] == 0`` and
    ``a[i] <= 1 + max(a[:i])``; block ``b`` collects the positions with
    ``a[i] == b``.
    """
    if n == 0:
        yield []
        return
    a = [0] * n

    def rec(i, top):
        if i == n:
            blocks = [[] for _ in range(top + 1)]
            for pos, b in enumerate(a):
                blocks[b].append(pos)
            yield blocks
            return
        for b in range(top + 2):
            a[i] = b
            yield from rec(i + 1, max(top, b))

    yield from rec(1, 0)


def cumulant_n(s: StateLike, spec, cache: dict = None) -> float:
    """Joint cumulant: sum over partitions P of (-1)^(|P|-1) (|P|-1)! prod <block>."""
    spec = _as_spec(spec)
    n = len(spec)
    if not 1 <= n <= MAX_PARTICLES:
        raise ValueError(f"N must be in 1..{MAX_PARTICLES}")
    if max(spec.particles) > s.n_qubits:
        raise ValueError("spec refers to a particle beyond the register")
    m = _mean(s, spec, cache)
    total = 0.0
    for blocks in set_partitions(n):
        k = len(blocks)
        term = (-1) ** (k - 1) * math.factorial(k - 1)
        for blk in blocks:
            term *= m(*blk)
        total += term
    return total


_CLOSED_FORMS = {2: corr2, 3: corr3, 4: corr4}


def correlation(s: StateLike, spec, cache: dict = None) -> float:
    """Closed form for N <= 4, partition sum beyond."""
    spec = _as_spec(spec)
    f = _CLOSED_FORMS.get(len(spec), cumulant_n)
    return f(s, spec, cache)


@dataclass(frozen=True)
class CorrelationRow:
    state_label: str
    particles: tuple
    axes: str
    value: float
    is_nonzero: bool


@dataclass
class CorrelationTable:
    rows: list = field(default_factory=list)
    threshold: float = ZERO_THRESHOLD

    def add(self, state_label: str, spec: CorrelationSpec, value: float):
        self.rows.append(
            CorrelationRow(state_label, spec.particles, spec.axes, float(value),
                           abs(value) >= self.threshold)
        )

    def nonzero(self, state_label: str = None) -> dict:
        """``{axes: value}`` for the non-zero rows (of one state if given)."""
        return {
            r.axes: r.value
            for r in self.rows
            if r.is_nonzero and (state_label is None or r.state_label == state_label)
        }

    def extend(self, other: "CorrelationTable"):
        self.rows.extend(other.rows)

    def to_records(self) -> list:
        return [
            {
                "state_label": r.state_label,
                "particles": ",".join(map(str, r.particles)),
                "axes": r.axes,
                "value": r.value,
                "is_nonzero": r.is_nonzero,
            }
            for r in self.rows
        ]

    def to_csv(self) -> str:
        from .formatting import fmt_csv_float

        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["state_label", "particles", "axes", "value", "is_nonzero"])
        for rec in self.to_records():
            w.writerow([rec["state_label"], rec["particles"], rec["axes"],
                        fmt_csv_float(rec["value"]), str(rec["is_nonzero"]).lower()])
        return buf.getvalue()

    def to_json(self) -> str:
        from .formatting import dumps_json

        return dumps_json({"threshold": self.threshold, "rows": self.to_records()})

    @classmethod
    def from_json(cls, text: str) -> "CorrelationTable":
        data = json.loads(text)
        t = cls(threshold=float(data.get("threshold", ZERO_THRESHOLD)))
        for r in data["rows"]:
            parts = tuple(int(p) for p in str(r["particles"]).split(","))
            t.rows.append(CorrelationRow(r["state_label"], parts, r["axes"],
                                         float(r["value"]), bool(r["is_nonzero"])))
        return t


def nonzero_scan(s: StateLike, particles: Sequence[int] = None, label: str = "state",
                 threshold: float = ZERO_THRESHOLD, keep_zeros: bool = False) -> CorrelationTable:
    """Evaluate all 3^N axis words over ``particles`` (default: every qubit).

    Only entries with ``|value| >= threshold`` are stored unless
    ``keep_zeros`` is set, in which case the full scan is recorded.
    """
    if particles is None:
        particles = range(1, s.n_qubits + 1)
    particles = tuple(particles)
    table = CorrelationTable(threshold=threshold)
    cache = {}
    for axes in itertools.product(AXES, repeat=len(particles)):
        spec = CorrelationSpec(particles, axes)
        v = correlation(s, spec, cache)
        if keep_zeros or abs(v) >= threshold:
            table.add(label, spec, v)
    return table


_SIGMA_Y_SIGMA_Y = np.kron([[0, -1j], [1j, 0]], [[0, -1j], [1j, 0]])


def concurrence(rho: StateLike) -> float:
    """Wootters concurrence of a two-qubit state.

    The lambdas (square roots of the spectrum of rho * spin-flipped rho) are
    taken as singular values of ``W^T (Y x Y) W`` with ``rho = W W^dagger``.
    That avoids square-rooting rounding noise in the zero eigenvalues, which
    would otherwise leave errors near 1e-8 for rank-deficient inputs.
    Eigenvalues of rho below 1e-14 are treated as exact zeros.
    """
    if isinstance(rho, StateVector):
        rho = DensityMatrix.from_state(rho)
    if rho.dim != 4:
        raise ValueError("concurrence needs a two-qubit density matrix")
    p, u = np.linalg.eigh(rho.entries)
    keep = p > 1e-14
    w = u[:, keep] * np.sqrt(p[keep])
    lam = np.zeros(4)
    sv = np.linalg.svd(w.T @ _SIGMA_Y_SIGMA_Y @ w, compute_uv=False)
    lam[: len(sv)] = np.sort(sv)[::-1]
    return float(max(0.0, lam[0] - lam[1] - lam[2] - lam[3]))


@dataclass
class TracingEntry:
    state_label: str
    traced: tuple
    kept: tuple
    concurrence: float = None          # two-qubit remainders
    pairwise_concurrence: dict = None  # three-qubit remainders
    remainder_signature: dict = None   # non-zero coefficients of the remainder
    claim: str = ""
    claim_holds: bool = None

    def describe(self) -> str:
        what = f"{self.state_label}: trace {self.traced} -> keep {self.kept}"
        if self.concurrence is not None:
            what += f", concurrence {self.concurrence:.6g}"
        if self.pairwise_concurrence:
            pcs = ", ".join(f"{k}:{v:.3g}" for k, v in self.pairwise_concurrence.items())
            what += f", pairwise concurrences {{{pcs}}}"
        if self.remainder_signature is not None:
            what += f", {len(self.remainder_signature)} non-zero coefficients"
        if self.claim:
            flag = {True: "consistent", False: "DISCREPANCY", None: "undetermined"}[self.claim_holds]
            what += f" [{flag}: claim '{self.claim}']"
        return what


def trace_remainder(s: StateVector, traced: Sequence[int], label: str = "state",
                    claim: str = "", threshold: float = ZERO_THRESHOLD) -> TracingEntry:
    """Trace out ``traced`` and characterise what is left.

    Two-qubit remainders get a concurrence. Three-qubit remainders get the
    non-zero coefficient signature plus the concurrences of their two-qubit
    reductions; no mixed three-party measure is attempted. ``claim_holds``
    records whether entanglement survived: for two qubits, concurrence above
    threshold; for three, True if some pair is entangled and None otherwise,
    since vanishing pairwise concurrence does not rule out entanglement.
    """
    n = s.n_qubits
    kept = tuple(q for q in range(1, n + 1) if q not in set(traced))
    rho = partial_trace(s, kept)
    entry = TracingEntry(label, tuple(traced), kept, claim=claim)
    if len(kept) == 2:
        entry.concurrence = concurrence(rho)
        entry.claim_holds = entry.concurrence > threshold
    else:
        entry.remainder_signature = nonzero_scan(rho, threshold=threshold).nonzero()
        entry.pairwise_concurrence = {}
        for i, j in itertools.combinations(range(1, len(kept) + 1), 2):
            c = concurrence(partial_trace(rho, (i, j)))
            entry.pairwise_concurrence[f"{kept[i - 1]}{kept[j - 1]}"] = c
        entry.claim_holds = True if max(entry.pairwise_concurrence.values()) > threshold else None
    return entry
