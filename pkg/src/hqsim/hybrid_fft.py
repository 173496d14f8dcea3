"""Hybrid transform: quantum-node leaves plus classical butterfly levels.

A length-``2**n`` real signal is decimated in time down to ``2**(n-n_q)``
leaves of size ``2**n_q``.  Each nonzero leaf is evaluated on a simulated
quantum node (encode, controlled transform, readout, sign rebuild) and the
results are recombined through ``n - n_q`` classical butterfly levels.  With
``n_q = 0`` the whole computation is the plain radix-2 FFT; with
``n_q = n`` it is a single node evaluation.  The sign convention is
``y_k = sum_j x_j exp(+2*pi*i*k*j/N)`` throughout.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .costs import CostLedger, merge_ledgers
from .readout import (
    BlockVector,
    build_schedule,
    execute_schedule,
    rebuild_phases,
    rescale_to_dft,
)

__all__ = [
    "RealSignal",
    "SpectrumVector",
    "TwiddleTable",
    "FftPlan",
    "direct_dft",
    "classical_fft",
    "decimate_leaves",
    "butterfly_combine",
    "hybrid_dft",
]


@dataclass(eq=False)
class RealSignal:
    """Real samples, length ``2**n``."""

    values: np.ndarray
    n: int

    @classmethod
    def from_values(cls, values) -> "RealSignal":
        vals = np.asarray(values, dtype=float)
        if vals.ndim != 1 or vals.size < 1 or vals.size & (vals.size - 1):
            raise ValueError(f"signal length must be a power of two, got {vals.shape}")
        return cls(vals, int(vals.size).bit_length() - 1)

    @property
    def size(self) -> int:
        return int(self.values.size)


@dataclass(eq=False)
class SpectrumVector:
    """Complex spectrum; ``stderr`` carries per-coefficient statistical
    error estimates in sampled mode, None otherwise."""

    values: np.ndarray
    stderr: np.ndarray | None = None

    @property
    def size(self) -> int:
        return int(self.values.size)


@dataclass(frozen=True, eq=False)
class TwiddleTable:
    """The ``N`` complex roots of unity ``exp(+2*pi*i*k/N)``."""

    size: int
    roots: np.ndarray

    @classmethod
    def for_size(cls, size: int) -> "TwiddleTable":
        if size < 1 or size & (size - 1):
            raise ValueError(f"twiddle size must be a power of two, got {size}")
        cached = _TWIDDLE_CACHE.get(size)
        if cached is None:
            roots = np.exp(2j * np.pi * np.arange(size) / size)
            cached = cls(size, roots)
            _TWIDDLE_CACHE[size] = cached
        return cached


_TWIDDLE_CACHE: dict[int, TwiddleTable] = {}


@dataclass(frozen=True)
class FftPlan:
    """How to run the transform: node size, probability mode, seeding."""

    n: int
    n_q: int
    mode: str = "exact"
    shots: int = 0
    master_seed: int = 0
    n_precision: int = 64
    charge_decimation: bool = False

    def __post_init__(self) -> None:
        if not 0 <= self.n_q <= self.n:
            raise ValueError(f"n_q={self.n_q} out of range for n={self.n}")
        if self.mode not in ("exact", "sampled"):
            raise ValueError(f"unknown mode {self.mode!r}")
        if self.mode == "sampled" and self.shots < 1:
            raise ValueError("sampled mode needs shots >= 1")


_DFT_MATRIX_CACHE: dict[int, np.ndarray] = {}


def _dft_matrix(N: int) -> np.ndarray:
    m = _DFT_MATRIX_CACHE.get(N)
    if m is None:
        k = np.arange(N)
        m = np.exp(2j * np.pi * np.outer(k, k) / N)
        _DFT_MATRIX_CACHE[N] = m
    return m


def direct_dft(signal: RealSignal) -> SpectrumVector:
    """O(N**2) reference transform straight from the definition."""
    return SpectrumVector(_dft_matrix(signal.size) @ signal.values.astype(complex))


def bit_reverse(value: int, bits: int) -> int:
    out = 0
    for _ in range(bits):
        out = (out << 1) | (value & 1)
        value >>= 1
    return out


def decimate_leaves(signal: RealSignal, n_q: int) -> list[BlockVector]:
    """Split a signal into ``2**(n-n_q)`` decimation-in-time leaves.

    Leaf ``r`` holds the samples whose index is congruent to the
    bit-reversed value of ``r`` modulo ``2**(n-n_q)``, in increasing order,
    so adjacent leaves are even/odd partners at every combine level.
    """
    if not 0 <= n_q <= signal.n:
        raise ValueError(f"n_q={n_q} out of range for n={signal.n}")
    levels = signal.n - n_q
    stride = 2**levels
    return [
        BlockVector.from_values(signal.values[bit_reverse(r, levels)::stride])
        for r in range(stride)
    ]


def butterfly_combine(
    even: SpectrumVector,
    odd: SpectrumVector,
    twiddles: TwiddleTable,
    ledger: CostLedger | None = None,
) -> SpectrumVector:
    """One radix-2 combine: ``y_k = even[k % h] + w**k * odd[k % h]``.

    Charges one classical op per output coefficient.
    """
    h = even.size
    if odd.size != h:
        raise ValueError(f"half sizes differ: {h} vs {odd.size}")
    N = 2 * h
    if twiddles.size != N:
        raise ValueError(f"twiddle table of size {twiddles.size}, expected {N}")
    doubled_even = np.concatenate([even.values, even.values])
    doubled_odd = np.concatenate([odd.values, odd.values])
    values = doubled_even + twiddles.roots * doubled_odd
    stderr = None
    if even.stderr is not None and odd.stderr is not None:
        var = np.concatenate([even.stderr, even.stderr]) ** 2
        var = var + np.concatenate([odd.stderr, odd.stderr]) ** 2
        stderr = np.sqrt(var)
    if ledger is not None:
        ledger.classical_ops += N
    return SpectrumVector(values, stderr)


def _combine_levels(spectra: list[SpectrumVector], ledger: CostLedger | None) -> SpectrumVector:
    while len(spectra) > 1:
        twiddles = TwiddleTable.for_size(2 * spectra[0].size)
        spectra = [
            butterfly_combine(spectra[i], spectra[i + 1], twiddles, ledger)
            for i in range(0, len(spectra), 2)
        ]
    return spectra[0]


def classical_fft(signal: RealSignal, ledger: CostLedger | None = None) -> SpectrumVector:
    """Radix-2 decimation-in-time FFT; charges ``n * 2**n`` classical ops."""
    leaves = decimate_leaves(signal, 0)
    spectra = [SpectrumVector(block.values.astype(complex)) for block in leaves]
    return _combine_levels(spectra, ledger)


def _leaf_seed(master_seed: int, leaf_index: int) -> int:
    return int(np.random.SeedSequence([master_seed, leaf_index]).generate_state(1)[0])


def _node_spectrum(block: BlockVector, schedule, plan: FftPlan, seed: int, ledger: CostLedger) -> SpectrumVector:
    record = execute_schedule(block, schedule, plan.mode, plan.shots, seed, ledger)
    estimate = rebuild_phases(record, block, ledger)
    values = rescale_to_dft(estimate)
    stderr = None
    if estimate.stderr is not None:
        stderr = estimate.stderr * estimate.scale
    ledger.node_accesses += 1
    return SpectrumVector(values, stderr)


def hybrid_dft(signal: RealSignal, plan: FftPlan) -> tuple[SpectrumVector, CostLedger]:
    """Run the transform with ``2**n_q``-point quantum leaves.

    Zero leaves short-circuit to zero spectra without touching the node.
    With ``n_q = 0`` the quantum stage is skipped entirely and the plain FFT
    path runs.  Per-leaf ledgers are merged at the end, and leaf seeds
    derive from (master seed, leaf index), so results are independent of
    leaf execution order.
    """
    if plan.n != signal.n:
        raise ValueError(f"plan built for n={plan.n}, signal has n={signal.n}")
    ledgers: list[CostLedger] = []
    top = CostLedger()
    if plan.n_q == 0:
        spectrum = classical_fft(signal, top)
        if plan.mode == "sampled":
            spectrum.stderr = np.zeros(signal.size)
    else:
        schedule = build_schedule(plan.n_q)
        if plan.charge_decimation:
            top.decimation_ops += (plan.n - plan.n_q) * 2**plan.n
        spectra = []
        for idx, block in enumerate(decimate_leaves(signal, plan.n_q)):
            led = CostLedger()
            if block.norm == 0.0:
                zeros = np.zeros(block.size, dtype=complex)
                stderr = np.zeros(block.size) if plan.mode == "sampled" else None
                spectra.append(SpectrumVector(zeros, stderr))
            else:
                seed = _leaf_seed(plan.master_seed, idx)
                spectra.append(_node_spectrum(block, schedule, plan, seed, led))
            ledgers.append(led)
        spectrum = _combine_levels(spectra, top)
    ledger = merge_ledgers([top, *ledgers])
    ledger.classical_bits = 2**plan.n * plan.n_precision
    ledger.qubit_count = plan.n_q + 1
    return spectrum, ledger
