"""Exact complex state-vector engine for small registers of labeled qubits.

Qubit labels are 1-based and qubit 1 is the most significant bit of the
basis index: |b1 b2 ... bn> sits at index sum_k b_k * 2**(n-k).  Every
operation is a pure function returning a fresh state; amplitudes are
frozen at construction, so StateVector values can be shared freely
between concurrent workers.  The only stateful input anywhere is the
numpy Generator passed to the sampling operations.
"""
from __future__ import annotations

import math
from typing import TYPE_CHECKING

import numpy as np

if TYPE_CHECKING:  # annotation only; canon imports this module at runtime
    from .canon import PauliOp

MAX_QUBITS = 16
NORM_TOL = 1e-9
AMP_TOL = 1e-12
DEGENERATE_PROB = 1e-12  # branches below this probability are never sampled


class CapacityError(ValueError):
    """Register would exceed the supported qubit count."""


class StateVector:
    """Normalized complex amplitudes over ``n_qubits`` labeled qubits.

    Instances are value-semantic: the amplitude array is copied in and
    marked read-only, and all operations below return new states.
    """

    __slots__ = ("n_qubits", "amps")

    def __init__(self, n_qubits: int, amps) -> None:
        if n_qubits < 1:
            raise ValueError(f"register needs at least 1 qubit, got {n_qubits}")
        if n_qubits > MAX_QUBITS:
            raise CapacityError(f"register capped at {MAX_QUBITS} qubits, got {n_qubits}")
        arr = np.array(amps, dtype=np.complex128)
        if arr.shape != (1 << n_qubits,):
            raise ValueError(f"expected {1 << n_qubits} amplitudes, got shape {arr.shape}")
        if not np.all(np.isfinite(arr.view(np.float64))):
            raise ValueError("amplitudes must be finite")
        nrm = float(np.linalg.norm(arr))
        if abs(nrm - 1.0) > NORM_TOL:
            raise ValueError(f"state is not normalized: |amps| = {nrm}")
        arr.flags.writeable = False
        self.n_qubits = n_qubits
        self.amps = arr

    def norm(self) -> float:
        return float(np.linalg.norm(self.amps))

    def probability(self, index: int) -> float:
        return float(abs(self.amps[index]) ** 2)

    def __repr__(self) -> str:
        n = self.n_qubits
        terms = " + ".join(
            f"({a:.4g})|{i:0{n}b}>" for i, a in enumerate(self.amps) if abs(a) > 1e-9
        )
        return f"StateVector({n}: {terms})"


def _check_qubit(s: StateVector, q: int) -> None:
    if not 1 <= q <= s.n_qubits:
        raise ValueError(f"qubit label {q} outside register [1, {s.n_qubits}]")


def basis_state(n: int, bits) -> StateVector:
    """Computational basis state |b1 b2 ... bn> for the given bit list."""
    bits = list(bits)
    if len(bits) != n:
        raise ValueError(f"expected {n} bits, got {len(bits)}")
    if any(b not in (0, 1) for b in bits):
        raise ValueError(f"bits must be 0 or 1: {bits}")
    if n < 1:
        raise ValueError(f"register needs at least 1 qubit, got {n}")
    if n > MAX_QUBITS:
        raise CapacityError(f"register capped at {MAX_QUBITS} qubits, got {n}")
    index = 0
    for b in bits:
        index = (index << 1) | b
    amps = np.zeros(1 << n, dtype=np.complex128)
    amps[index] = 1.0
    return StateVector(n, amps)


def tensor(a: StateVector, b: StateVector) -> StateVector:
    """Tensor product; qubits of ``b`` are appended after those of ``a``."""
    n = a.n_qubits + b.n_qubits
    if n > MAX_QUBITS:
        raise CapacityError(f"tensor product needs {n} qubits, cap is {MAX_QUBITS}")
    return StateVector(n, np.kron(a.amps, b.amps))


def apply_one_qubit(s: StateVector, q: int, matrix) -> StateVector:
    """Apply a 2x2 matrix to qubit ``q``."""
    _check_qubit(s, q)
    m = np.asarray(matrix, dtype=np.complex128)
    if m.shape != (2, 2):
        raise ValueError(f"expected a 2x2 matrix, got {m.shape}")
    psi = s.amps.reshape((2,) * s.n_qubits)
    axis = q - 1
    psi = np.moveaxis(np.tensordot(m, psi, axes=([1], [axis])), 0, axis)
    return StateVector(s.n_qubits, psi.reshape(-1))


def apply_pauli(s: StateVector, q: int, op: "PauliOp") -> StateVector:
    """Apply one of the four encoding operations to qubit ``q``."""
    return apply_one_qubit(s, q, op.matrix)


def apply_cnot(s: StateVector, control: int, target: int) -> StateVector:
    """Flip ``target`` wherever ``control`` is 1 (used for ancilla couplings)."""
    _check_qubit(s, control)
    _check_qubit(s, target)
    if control == target:
        raise ValueError("control and target must differ")
    n = s.n_qubits
    idx = np.arange(1 << n)
    cmask = 1 << (n - control)
    tmask = 1 << (n - target)
    perm = np.where(idx & cmask, idx ^ tmask, idx)
    return StateVector(n, s.amps[perm])


def measure_computational(s: StateVector, q: int, rng: np.random.Generator) -> tuple[int, StateVector]:
    """Measure qubit ``q`` in the computational basis.

    Returns the sampled bit and the renormalized post-measurement state
    (same register size; qubit ``q`` collapses to |bit>).  A branch with
    probability below ``DEGENERATE_PROB`` is never returned.
    """
    _check_qubit(s, q)
    psi = s.amps.reshape((2,) * s.n_qubits)
    axis = q - 1
    p1 = float(np.sum(np.abs(np.take(psi, 1, axis=axis)) ** 2))
    p0 = float(np.sum(np.abs(np.take(psi, 0, axis=axis)) ** 2))
    if p1 < DEGENERATE_PROB:
        bit = 0
    elif p0 < DEGENERATE_PROB:
        bit = 1
    else:
        bit = 0 if rng.random() < p0 else 1
    keep = psi.copy()
    sel = [slice(None)] * s.n_qubits
    sel[axis] = 1 - bit
    keep[tuple(sel)] = 0.0
    prob = p0 if bit == 0 else p1
    return bit, StateVector(s.n_qubits, (keep / math.sqrt(prob)).reshape(-1))


def inner_product(a: StateVector, b: StateVector) -> complex:
    """<a|b>, conjugate-linear in the first argument."""
    if a.n_qubits != b.n_qubits:
        raise ValueError(f"size mismatch: {a.n_qubits} vs {b.n_qubits} qubits")
    return complex(np.vdot(a.amps, b.amps))


def fidelity(a: StateVector, b: StateVector) -> float:
    return abs(inner_product(a, b))


def states_equal(a: StateVector, b: StateVector, tol: float = AMP_TOL, up_to_phase: bool = True) -> bool:
    """State equality; by default up to a global phase (|<a|b>| = 1)."""
    if a.n_qubits != b.n_qubits:
        return False
    if up_to_phase:
        return abs(fidelity(a, b) - 1.0) < tol
    return bool(np.max(np.abs(a.amps - b.amps)) < tol)
