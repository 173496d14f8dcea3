"""Quantum-node readout of a real block's full complex spectrum.

A real block of length ``N = 2**n_q`` is amplitude-encoded on the data
register, an ancilla is put into ``(|0> + |1>)/sqrt(2)`` and the transform
circuit runs controlled on it, producing ``(|0>|X> + |1>|Y>)/sqrt(2)``.
Projecting the data register on

* ``|0>`` and ``|N/2>`` (the two self-conjugate indices), and
* ``(|k> + |N-k>)/sqrt(2)``, ``(|k> - |N-k>)/sqrt(2)`` for ``k < N/2``

leaves an ancilla residual ``(a|0> + b|1>)/sqrt(2)`` whose ``|1>`` component
carries, respectively, a self-conjugate coefficient, ``sqrt(2)`` times the
real part, or ``i*sqrt(2)`` times the imaginary part of coefficient ``k``.
Each projector gets two measurement entries: a *magnitude* entry (ancilla
``|1>``) fixing ``|b|``, and a *reference* entry (ancilla
``(|0> + e^{i*phi}|1>)/sqrt(2)``, ``phi = pi/2`` for the minus projectors)
whose value depends on the sign of ``b`` relative to the classically known
``a``.  The sign is then recovered by nearest-hypothesis selection, and the
conjugate coefficient comes for free, so the output is Hermitian-symmetric
by construction.

All stored values are joint probabilities of (projection, ancilla outcome).
When the classical reference ``a`` is too small to separate the two sign
hypotheses, that single coefficient is computed classically instead and the
fallback is charged to the ledger.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .core import (
    MeasurementEffect,
    StateVector,
    apply_controlled_circuit,
    apply_gate,
    build_qft_circuit,
    effect_probability,
    Hadamard,
    sample_effect,
    shift_gates,
)
from .costs import CostLedger

__all__ = [
    "BlockVector",
    "ScheduleEntry",
    "ReadoutSchedule",
    "ReadoutRecord",
    "SpectrumEstimate",
    "prepare_block_state",
    "build_schedule",
    "execute_schedule",
    "rebuild_phases",
    "rescale_to_dft",
    "EPS_REF_EXACT",
]

_INV_SQRT2 = 1.0 / math.sqrt(2.0)

EPS_REF_EXACT = 1e-9

ROLE_MAGNITUDE = "magnitude"
ROLE_REFERENCE = "reference"


@dataclass(eq=False)
class BlockVector:
    """Real vector of length ``2**n_q`` with its Euclidean norm recorded."""

    values: np.ndarray
    norm: float

    @classmethod
    def from_values(cls, values) -> "BlockVector":
        vals = np.asarray(values, dtype=float)
        if vals.ndim != 1 or vals.size < 1 or vals.size & (vals.size - 1):
            raise ValueError(f"block length must be a power of two, got {vals.shape}")
        return cls(vals, float(np.linalg.norm(vals)))

    @property
    def n_q(self) -> int:
        return int(self.values.size).bit_length() - 1

    @property
    def size(self) -> int:
        return int(self.values.size)


@dataclass(frozen=True, eq=False)
class ScheduleEntry:
    projector_index: int
    data_projector: MeasurementEffect
    ancilla_phase: float
    role: str
    target: str


@dataclass(frozen=True, eq=False)
class ReadoutSchedule:
    """Ordered projection/measurement plan: two entries per data projector."""

    n_q: int
    projectors: tuple[MeasurementEffect, ...]
    entries: tuple[ScheduleEntry, ...]


@dataclass(eq=False)
class ReadoutRecord:
    """Measured joint probabilities keyed by (projector index, role)."""

    schedule: ReadoutSchedule
    measurements: dict
    mode: str
    shots: int
    seed: int


@dataclass(eq=False)
class SpectrumEstimate:
    """Reconstructed coefficients at amplitude level plus the factor that
    restores the unnormalized transform values."""

    coefficients: np.ndarray
    scale: float
    ambiguous: frozenset
    classical_fallbacks: int
    stderr: np.ndarray | None = None


def prepare_block_state(block: BlockVector, ledger: CostLedger | None = None) -> StateVector:
    """Amplitude-encode a block on the data register.

    Charges ``n_q**2 * 2**n_q`` state-prep units; a zero block cannot be
    normalized and must be short-circuited by the caller.
    """
    if block.norm == 0.0:
        raise ValueError("zero block cannot be amplitude-encoded")
    n_q = block.n_q
    if n_q < 1:
        raise ValueError("block must span at least one qubit")
    if ledger is not None:
        ledger.state_prep_units += n_q**2 * 2**n_q
    return StateVector(n_q, block.values / block.norm)


def build_schedule(n_q: int) -> ReadoutSchedule:
    """Projection/measurement schedule for a ``2**n_q``-point readout.

    Exactly ``N`` pairwise orthogonal data projectors with two entries each:
    the self-conjugate indices 0 and N/2 plus a conjugate pair (+, -) per
    index below N/2.
    """
    if n_q < 1:
        raise ValueError(f"n_q must be >= 1, got {n_q}")
    N = 2**n_q
    specs: list[tuple[MeasurementEffect, float, str]] = [
        (MeasurementEffect.basis(n_q, 0), 0.0, "k0"),
        (MeasurementEffect.basis(n_q, N // 2), 0.0, f"k{N // 2}"),
    ]
    for k in range(1, N // 2):
        plus = MeasurementEffect.superposition(n_q, [(k, _INV_SQRT2), (N - k, _INV_SQRT2)])
        minus = MeasurementEffect.superposition(n_q, [(k, _INV_SQRT2), (N - k, -_INV_SQRT2)])
        specs.append((plus, 0.0, f"k{k}_re"))
        specs.append((minus, math.pi / 2, f"k{k}_im"))
    entries = []
    for pi, (projector, phase, target) in enumerate(specs):
        entries.append(ScheduleEntry(pi, projector, phase, ROLE_MAGNITUDE, target))
        entries.append(ScheduleEntry(pi, projector, phase, ROLE_REFERENCE, target))
    return ReadoutSchedule(n_q, tuple(s[0] for s in specs), tuple(entries))


_ANCILLA_ONE = MeasurementEffect.basis(1, 1)


def _ancilla_reference(phase: float) -> MeasurementEffect:
    return MeasurementEffect.superposition(
        1, [(0, _INV_SQRT2), (1, complex(math.cos(phase), math.sin(phase)) * _INV_SQRT2)]
    )


def _entry_effect(entry: ScheduleEntry) -> MeasurementEffect:
    if entry.role == ROLE_MAGNITUDE:
        return _ANCILLA_ONE
    return _ancilla_reference(entry.ancilla_phase)


def execute_schedule(
    block: BlockVector,
    schedule: ReadoutSchedule,
    mode: str = "exact",
    shots: int = 0,
    seed: int = 0,
    ledger: CostLedger | None = None,
) -> ReadoutRecord:
    """Run the readout circuit on a block and fill every schedule entry.

    Builds ancilla tensor block state, applies the ancilla Hadamard and the
    controlled transform, then evaluates each (projector, role) joint
    probability: exactly via inner products, or as seeded binomial estimates
    in sampled mode.
    """
    if block.n_q != schedule.n_q:
        raise ValueError(
            f"schedule built for n_q={schedule.n_q}, block has n_q={block.n_q}"
        )
    if mode not in ("exact", "sampled"):
        raise ValueError(f"unknown mode {mode!r}")
    if mode == "sampled" and shots < 1:
        raise ValueError("sampled mode needs shots >= 1")
    n_q = schedule.n_q
    N = 2**n_q

    data = prepare_block_state(block, ledger)
    joint = np.zeros(2 * N, dtype=complex)
    joint[:N] = data.amplitudes  # ancilla |0> branch; ancilla is qubit 0
    state = StateVector(n_q + 1, joint)
    state = apply_gate(state, Hadamard(0))
    state = apply_controlled_circuit(state, 0, shift_gates(build_qft_circuit(n_q), 1))

    if ledger is not None:
        ledger.quantum_gate_units += n_q * (n_q + 1) // 2 + n_q // 2
        ledger.measurement_units += 2 * N

    rng = np.random.default_rng(seed) if mode == "sampled" else None
    measurements = {}
    for entry in schedule.entries:
        key = (entry.projector_index, entry.role)
        if mode == "exact":
            measurements[key] = effect_probability(state, entry.data_projector, _entry_effect(entry))
        else:
            entry_seed = int(rng.integers(0, 2**63))
            _, estimate = sample_effect(
                state, entry.data_projector, _entry_effect(entry), shots, entry_seed
            )
            measurements[key] = estimate
    return ReadoutRecord(schedule, measurements, mode, shots if mode == "sampled" else 0, seed)


def _classical_coefficient(normalized: np.ndarray, k: int) -> complex:
    """One amplitude-level coefficient computed classically, 2**n_q ops."""
    N = normalized.size
    phases = np.exp(2j * np.pi * k * np.arange(N) / N)
    return complex(np.sum(normalized * phases) / math.sqrt(N))


def _select_sign(a: float, b_abs: float, reference: float) -> int:
    """Pick the sign making (a + s|b|)**2 / 4 closest to the reference."""
    plus = (a + b_abs) ** 2 / 4.0
    minus = (a - b_abs) ** 2 / 4.0
    return 1 if abs(reference - plus) <= abs(reference - minus) else -1


def rebuild_phases(
    record: ReadoutRecord,
    block: BlockVector,
    ledger: CostLedger | None = None,
    eps_ref: float | None = None,
) -> SpectrumEstimate:
    """Turn a readout record into signed complex coefficients.

    For each projector the magnitude entry fixes ``|b| = sqrt(2*m)`` and the
    sign comes from whichever hypothesis ``(a + s|b|)**2 / 4`` lies nearest
    the reference entry.  When ``|a| < eps_ref`` the hypotheses coincide;
    the coefficient is flagged ambiguous and evaluated classically instead,
    charging ``2**n_q`` classical ops to the fallback counter.
    """
    schedule = record.schedule
    n_q = schedule.n_q
    N = 2**n_q
    if block.n_q != n_q:
        raise ValueError("record and block sizes differ")
    for entry in schedule.entries:
        if (entry.projector_index, entry.role) not in record.measurements:
            raise ValueError(
                f"record is missing entry {(entry.projector_index, entry.role)}"
            )
    if eps_ref is None:
        eps_ref = EPS_REF_EXACT if record.mode == "exact" else 3.0 / math.sqrt(record.shots)

    normalized = block.values / block.norm
    sampled = record.mode == "sampled"
    shots = record.shots

    coefficients = np.zeros(N, dtype=complex)
    variances = np.zeros(N, dtype=float) if sampled else None
    ambiguous: set[int] = set()
    fallbacks = 0

    def resolve(pi: int, a: float, pair: bool, k: int, imag_part: bool) -> tuple[float, float]:
        """One signed real part value plus its variance estimate.

        ``pair`` distinguishes the conjugate-pair projectors, whose part
        value is |b|/sqrt(2), from the self-conjugate ones where it is |b|.
        """
        nonlocal fallbacks
        mag = max(record.measurements[(pi, ROLE_MAGNITUDE)], 0.0)
        reference = record.measurements[(pi, ROLE_REFERENCE)]
        b_abs = math.sqrt(2.0 * mag)
        if abs(a) < eps_ref and b_abs >= eps_ref:
            ambiguous.add(k)
            fallbacks += 1
            if ledger is not None:
                ledger.fallback_ops += N
                ledger.classical_fallbacks += 1
            c = _classical_coefficient(normalized, k)
            return (c.imag if imag_part else c.real), 0.0
        sign = _select_sign(a, b_abs, reference)
        value = sign * (b_abs * _INV_SQRT2 if pair else b_abs)
        if not sampled:
            return value, 0.0
        spread = max(1.0 - mag, 0.0) / shots
        variance = spread / 4.0 if pair else spread / 2.0
        return value, variance

    # Self-conjugate indices 0 and N/2: projector order fixed by build_schedule.
    v0, var0 = resolve(0, float(normalized[0]), False, 0, False)
    coefficients[0] = v0
    vh, varh = resolve(1, float(normalized[N // 2]), False, N // 2, False)
    coefficients[N // 2] = vh
    if sampled:
        variances[0] = var0
        variances[N // 2] = varh

    pi = 2
    for k in range(1, N // 2):
        a_plus = float((normalized[k] + normalized[N - k]) * _INV_SQRT2)
        a_minus = float((normalized[k] - normalized[N - k]) * _INV_SQRT2)
        re, var_re = resolve(pi, a_plus, True, k, False)
        im, var_im = resolve(pi + 1, a_minus, True, k, True)
        coefficients[k] = complex(re, im)
        coefficients[N - k] = complex(re, -im)
        if sampled:
            variances[k] = var_re + var_im
            variances[N - k] = variances[k]
        pi += 2

    stderr = np.sqrt(variances) if sampled else None
    return SpectrumEstimate(
        coefficients=coefficients,
        scale=block.norm * math.sqrt(N),
        ambiguous=frozenset(ambiguous),
        classical_fallbacks=fallbacks,
        stderr=stderr,
    )


def rescale_to_dft(estimate: SpectrumEstimate) -> np.ndarray:
    """Undo the two normalizations: returns the unnormalized transform of
    the original block values."""
    return estimate.scale * estimate.coefficients
