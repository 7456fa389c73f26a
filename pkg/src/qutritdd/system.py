"""Qutrit basis states, decoupling pulse operators, target gate, error generators.

Basis ordering is fixed globally as (|0>, |1>, |e>) -> indices (0, 1, 2),
with the two ground states first and the excited state last.  Multi-qutrit
kets compose left to right, |ab> = |a> (x) |b>, so |ab> sits at index 3a+b.
Every other module and every golden file relies on this convention.
"""

from __future__ import annotations

import enum
import functools
from dataclasses import dataclass

import numpy as np

from .linalg import Operator, identity, kron

LEVELS = ("0", "1", "e")
_LEVEL_INDEX = {"0": 0, "1": 1, "e": 2}

STATE_NORM_TOL = 1e-12


@dataclass(frozen=True)
class QutritState:
    """Pure state of one or more qutrits, kept normalized.

    ``amplitudes`` is a complex vector of length 3**n in the fixed basis
    ordering.  Construction rejects vectors whose 2-norm deviates from 1
    by more than 1e-12; use :meth:`from_unnormalized` to build
    superpositions from raw sums of kets.
    """

    amplitudes: np.ndarray
    dims: tuple[int, ...] = ()

    def __post_init__(self):
        vec = np.asarray(self.amplitudes, dtype=np.complex128).copy()
        if vec.ndim != 1:
            raise ValueError("state amplitudes must be a 1-D vector")
        dims = self.dims
        if not dims:
            n = int(round(np.log(vec.size) / np.log(3)))
            if 3**n != vec.size:
                raise ValueError(f"cannot infer qutrit count from length {vec.size}")
            dims = (3,) * n
        if int(np.prod(dims)) != vec.size:
            raise ValueError(f"dims {dims} inconsistent with vector length {vec.size}")
        norm = np.linalg.norm(vec)
        if abs(norm - 1.0) > STATE_NORM_TOL:
            raise ValueError(f"state vector norm {norm!r} deviates from 1 beyond tolerance")
        vec.setflags(write=False)
        object.__setattr__(self, "amplitudes", vec)
        object.__setattr__(self, "dims", tuple(int(d) for d in dims))

    @classmethod
    def from_unnormalized(cls, vec) -> QutritState:
        vec = np.asarray(vec, dtype=np.complex128)
        norm = np.linalg.norm(vec)
        if norm == 0:
            raise ValueError("cannot normalize the zero vector")
        return cls(vec / norm)

    def apply(self, op: Operator) -> QutritState:
        if op.dims != self.dims:
            raise ValueError(f"dimension mismatch: {op.dims} vs {self.dims}")
        return QutritState(op.mat @ self.amplitudes, self.dims)

    def inner(self, other: QutritState) -> complex:
        return complex(np.vdot(self.amplitudes, other.amplitudes))

    def density(self) -> Operator:
        return Operator(self.dims, np.outer(self.amplitudes, self.amplitudes.conj()))


def ket(labels: str) -> QutritState:
    """Basis ket from a label string over {0, 1, e}, e.g. ket("0") or ket("11")."""
    if not labels or any(c not in _LEVEL_INDEX for c in labels):
        raise ValueError(f"invalid ket label {labels!r}; use characters from 0/1/e")
    index = 0
    for c in labels:
        index = 3 * index + _LEVEL_INDEX[c]
    vec = np.zeros(3 ** len(labels), dtype=np.complex128)
    vec[index] = 1.0
    return QutritState(vec)


def _outer(a: str, b: str) -> np.ndarray:
    return np.outer(ket(a).amplitudes, ket(b).amplitudes.conj())


# The four decoupling operators.  p1 swaps the ground states, p2 and p3 swap
# one ground state with |e>, p4 flips the sign of both ground states.  All
# four are Hermitian, unitary and involutory.
_DD_MATRICES = {
    1: np.array([[0, 1, 0], [1, 0, 0], [0, 0, 1]], dtype=np.complex128),
    2: np.array([[0, 0, 1], [0, 1, 0], [1, 0, 0]], dtype=np.complex128),
    3: np.array([[1, 0, 0], [0, 0, 1], [0, 1, 0]], dtype=np.complex128),
    4: np.diag([-1.0, -1.0, 1.0]).astype(np.complex128),
}


def dd_operator(k: int) -> Operator:
    """The k-th decoupling pulse operator (k in 1..4) on a single qutrit."""
    if k not in _DD_MATRICES:
        raise ValueError(f"decoupling operator index must be in 1..4, got {k}")
    return Operator((3,), _DD_MATRICES[k])


def dd_operator_tensor(k: int, num_qutrits: int) -> Operator:
    """p_k applied simultaneously to every qutrit, i.e. p_k^{(x)n}."""
    op = dd_operator(k)
    out = op
    for _ in range(num_qutrits - 1):
        out = kron(out, op)
    return out


def target_gate() -> Operator:
    """Two-qutrit controlled-phase gate: -1 on |11>, +1 elsewhere.

    The action on basis states containing |e> is taken as the identity; the
    protected evolution returns all population to the computational
    subspace, so fidelity is only ever evaluated on computational inputs.
    """
    mat = np.eye(9, dtype=np.complex128)
    mat[4, 4] = -1.0  # |11><11|
    return Operator((3, 3), mat)


class ErrorAxis(enum.Enum):
    """Single-qutrit error channels on the directly coupled levels.

    Z-type errors dephase |e> against one ground state, X/Y-type errors
    drive population exchange with it.  The ground states themselves are
    never coupled to each other.
    """

    Z0 = ("Z", "0")
    Z1 = ("Z", "1")
    X0 = ("X", "0")
    X1 = ("X", "1")
    Y0 = ("Y", "0")
    Y1 = ("Y", "1")

    @property
    def kind(self) -> str:
        return self.value[0]

    @property
    def ground(self) -> str:
        return self.value[1]


def _single_qutrit_error(axis: ErrorAxis) -> np.ndarray:
    g = axis.ground
    if axis.kind == "Z":
        return _outer("e", "e") - _outer(g, g)
    if axis.kind == "X":
        return _outer("e", g) + _outer(g, "e")
    return -1j * _outer("e", g) + 1j * _outer(g, "e")


def error_generator(axis: ErrorAxis, qutrit_index: int, num_qutrits: int) -> Operator:
    """Error operator for one axis on one qutrit, identity-padded elsewhere."""
    if not 0 <= qutrit_index < num_qutrits:
        raise ValueError(f"qutrit index {qutrit_index} out of range for {num_qutrits} qutrits")
    mat = np.ones((1, 1), dtype=np.complex128)
    for slot in range(num_qutrits):
        block = _single_qutrit_error(axis) if slot == qutrit_index else np.eye(3)
        mat = np.kron(mat, block)
    return Operator((3,) * num_qutrits, mat)


@functools.lru_cache(maxsize=4)
def error_generator_sum(num_qutrits: int) -> Operator:
    """Sum of all six error generators over every qutrit (equal weights)."""
    total = np.zeros((3**num_qutrits,) * 2, dtype=np.complex128)
    for q in range(num_qutrits):
        for axis in ErrorAxis:
            total = total + error_generator(axis, q, num_qutrits).mat
    return Operator((3,) * num_qutrits, total)
