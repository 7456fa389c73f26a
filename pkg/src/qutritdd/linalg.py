"""Dense complex linear algebra for small multi-subsystem operators."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

# Tolerance for exact algebraic identities (hermiticity/unitarity checks).
ALG_TOL = 1e-10


def _as_square_complex(entries) -> np.ndarray:
    mat = np.asarray(entries, dtype=np.complex128)
    if mat.ndim != 2 or mat.shape[0] != mat.shape[1]:
        raise ValueError(f"operator entries must form a square matrix, got shape {mat.shape}")
    return mat


@dataclass(frozen=True)
class Operator:
    """Square complex matrix on a tensor product of subsystems.

    ``dims`` lists the subsystem dimensions, e.g. ``(3,)`` for one qutrit,
    ``(3, 3)`` for two, ``(3, d_E)`` for a qutrit coupled to a bath of
    dimension ``d_E``.  The matrix is dense, row-major, with total side
    equal to ``prod(dims)``.  Instances are immutable.
    """

    dims: tuple[int, ...]
    mat: np.ndarray

    def __post_init__(self):
        dims = tuple(int(d) for d in self.dims)
        if not dims or any(d < 1 for d in dims):
            raise ValueError(f"invalid subsystem dimensions {dims}")
        mat = _as_square_complex(self.mat).copy()
        if mat.shape[0] != int(np.prod(dims)):
            raise ValueError(
                f"dims {dims} imply total dimension {int(np.prod(dims))}, "
                f"matrix side is {mat.shape[0]}"
            )
        mat.setflags(write=False)
        object.__setattr__(self, "dims", dims)
        object.__setattr__(self, "mat", mat)

    @property
    def dim(self) -> int:
        return self.mat.shape[0]

    def dag(self) -> Operator:
        return Operator(self.dims, self.mat.conj().T)

    def is_hermitian(self, tol: float = ALG_TOL) -> bool:
        return bool(np.max(np.abs(self.mat - self.mat.conj().T)) <= tol)

    def is_unitary(self, tol: float = ALG_TOL) -> bool:
        delta = self.mat.conj().T @ self.mat - np.eye(self.dim)
        return bool(np.linalg.norm(delta) <= tol)

    def _binary_dims(self, other: Operator) -> tuple[int, ...]:
        if self.dims != other.dims:
            raise ValueError(f"dimension mismatch: {self.dims} vs {other.dims}")
        return self.dims

    def __matmul__(self, other: Operator) -> Operator:
        return Operator(self._binary_dims(other), self.mat @ other.mat)

    def __add__(self, other: Operator) -> Operator:
        return Operator(self._binary_dims(other), self.mat + other.mat)

    def __sub__(self, other: Operator) -> Operator:
        return Operator(self._binary_dims(other), self.mat - other.mat)

    def __neg__(self) -> Operator:
        return Operator(self.dims, -self.mat)

    def __mul__(self, scalar) -> Operator:
        return Operator(self.dims, self.mat * complex(scalar))

    __rmul__ = __mul__


def identity(dims) -> Operator:
    dims = tuple(int(d) for d in dims)
    return Operator(dims, np.eye(int(np.prod(dims))))


def zero(dims) -> Operator:
    dims = tuple(int(d) for d in dims)
    n = int(np.prod(dims))
    return Operator(dims, np.zeros((n, n)))


def kron(a: Operator, b: Operator) -> Operator:
    """Tensor product; subsystem dims concatenate."""
    return Operator(a.dims + b.dims, np.kron(a.mat, b.mat))


def commutator(a: Operator, b: Operator) -> Operator:
    if a.dims != b.dims:
        raise ValueError(f"dimension mismatch: {a.dims} vs {b.dims}")
    return Operator(a.dims, a.mat @ b.mat - b.mat @ a.mat)


def frobenius_norm(a: Operator) -> float:
    return float(np.linalg.norm(a.mat))


def spectral_norm(a: Operator) -> float:
    return float(np.linalg.norm(a.mat, 2))


def expm_hermitian(mat: np.ndarray, scale: float) -> np.ndarray:
    """exp(-1j * scale * mat) for Hermitian ``mat`` via eigendecomposition.

    Raw-ndarray fast path used by the propagators; the eigenbasis
    reconstruction keeps the result unitary to machine precision.
    """
    w, v = np.linalg.eigh(mat)
    return (v * np.exp(-1j * scale * w)) @ v.conj().T


def expm_propagator(h: Operator, duration: float) -> Operator:
    """Unitary propagator exp(-i h duration) for a constant Hermitian generator.

    Rejects generators that are not Hermitian within ALG_TOL.
    """
    if not h.is_hermitian(ALG_TOL):
        raise ValueError("generator is not Hermitian within tolerance")
    return Operator(h.dims, expm_hermitian(h.mat, float(duration)))
