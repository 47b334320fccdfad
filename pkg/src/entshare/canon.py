"""Canonical entangled states and the four-operation encoding alphabet."""
from __future__ import annotations

import math
from enum import Enum
from typing import NamedTuple

import numpy as np

from .qstate import StateVector

_INV_SQRT2 = 1.0 / math.sqrt(2.0)


class PauliOp(Enum):
    """Local encoding operations; each carries two classical bits."""

    I = "I"
    X = "X"
    IY = "iY"
    Z = "Z"

    @property
    def matrix(self) -> np.ndarray:
        return _MATRICES[self]

    def __repr__(self) -> str:
        return f"PauliOp.{self.name}"


_MATRICES = {
    PauliOp.I: np.array([[1, 0], [0, 1]], dtype=np.complex128),
    PauliOp.X: np.array([[0, 1], [1, 0]], dtype=np.complex128),
    # i * sigma_y: real matrix, squares to -identity
    PauliOp.IY: np.array([[0, 1], [-1, 0]], dtype=np.complex128),
    PauliOp.Z: np.array([[1, 0], [0, -1]], dtype=np.complex128),
}
for _m in _MATRICES.values():
    _m.flags.writeable = False


class CbitPair(NamedTuple):
    hi: int
    lo: int

    def as_int(self) -> int:
        return (self.hi << 1) | self.lo


# Fixed bijection: hi = phase-flip bit, lo = amplitude-flip bit.
_OP_TO_CBITS = {
    PauliOp.I: CbitPair(0, 0),
    PauliOp.X: CbitPair(0, 1),
    PauliOp.IY: CbitPair(1, 0),
    PauliOp.Z: CbitPair(1, 1),
}
_CBITS_TO_OP = {v: k for k, v in _OP_TO_CBITS.items()}


def pauli_to_cbits(op: PauliOp) -> CbitPair:
    return _OP_TO_CBITS[op]


def cbits_to_pauli(c: CbitPair) -> PauliOp:
    return _CBITS_TO_OP[CbitPair(c[0], c[1])]


class BellOutcome(Enum):
    """The four two-qubit Bell states, in the fixed report order."""

    PHI_PLUS = "Phi+"
    PHI_MINUS = "Phi-"
    PSI_PLUS = "Psi+"
    PSI_MINUS = "Psi-"

    @property
    def is_psi(self) -> bool:
        """True for the amplitude-flipped (|01>/|10>) pair type."""
        return self in (BellOutcome.PSI_PLUS, BellOutcome.PSI_MINUS)

    @property
    def sign(self) -> int:
        return 1 if self in (BellOutcome.PHI_PLUS, BellOutcome.PSI_PLUS) else -1

    @property
    def order(self) -> int:
        """Sort index: Phi+ < Phi- < Psi+ < Psi-."""
        return _BELL_ORDER[self]

    def __repr__(self) -> str:
        return f"BellOutcome({self.value})"


_BELL_ORDER = {k: i for i, k in enumerate(BellOutcome)}

_BELL_AMPS = {
    BellOutcome.PHI_PLUS: np.array([_INV_SQRT2, 0, 0, _INV_SQRT2]),
    BellOutcome.PHI_MINUS: np.array([_INV_SQRT2, 0, 0, -_INV_SQRT2]),
    BellOutcome.PSI_PLUS: np.array([0, _INV_SQRT2, _INV_SQRT2, 0]),
    BellOutcome.PSI_MINUS: np.array([0, _INV_SQRT2, -_INV_SQRT2, 0]),
}


def bell_state(k: BellOutcome) -> StateVector:
    """The named Bell state on a fresh two-qubit register."""
    return StateVector(2, _BELL_AMPS[k])


def ghz3() -> StateVector:
    """(|000> + |111>) / sqrt(2)."""
    amps = np.zeros(8, dtype=np.complex128)
    amps[0] = amps[7] = _INV_SQRT2
    return StateVector(3, amps)


def w3() -> StateVector:
    """(|001> + |010> + |100>) / sqrt(3)."""
    return w_n(3)


def w_n(m: int) -> StateVector:
    """Equal superposition of the m single-excitation basis states.

    Used as the shared channel for the multi-user version of the dense
    coding protocol: m = number of users + 1.
    """
    if not 3 <= m <= 12:
        raise ValueError(f"w_n supports 3..12 qubits, got {m}")
    amps = np.zeros(1 << m, dtype=np.complex128)
    c = 1.0 / math.sqrt(m)
    for k in range(1, m + 1):
        amps[1 << (m - k)] = c
    return StateVector(m, amps)
