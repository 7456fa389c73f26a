"""Noise models: a finite-dimensional quantum bath and a classical drift.

Two representations are used side by side.  The quantum bath couples a
qutrit to bath operators B0, B1 (transverse dephasing of |e> against each
ground state) and E0, E1 (longitudinal relaxation between |e> and the
ground states), with its own Hamiltonian H_env; it exists to verify the
decoupling conditions order by order.  The classical model is a
deterministic drift kappa(t) multiplying the sum of all six single-qutrit
error generators on every qutrit; it drives the gate-fidelity sweeps.

Units: time in milliseconds, angular frequencies in rad/ms.  The classical
spectral density is S(w) = w for w below the cutoff (default pi/2 rad/ms)
and zero above it, which puts the noise correlation time on the same
millisecond scale as the gate duration.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .linalg import Operator, commutator, identity, kron, spectral_norm
from .system import error_generator_sum, ket

_BATH_HERM_TOL = 1e-12

DEFAULT_CUTOFF = math.pi / 2  # rad/ms


def _proj(a: str, b: str) -> np.ndarray:
    va, vb = ket(a).amplitudes, ket(b).amplitudes
    return np.outer(va, vb.conj())


def random_hermitian(dim: int, norm: float, rng: np.random.Generator) -> Operator:
    """Random Hermitian matrix scaled to the given spectral norm."""
    raw = rng.standard_normal((dim, dim)) + 1j * rng.standard_normal((dim, dim))
    herm = (raw + raw.conj().T) / 2
    current = np.linalg.norm(herm, 2)
    if current > 0 and norm > 0:
        herm = herm * (norm / current)
    elif norm == 0:
        herm = np.zeros_like(herm)
    return Operator((dim,), herm)


@dataclass(frozen=True)
class QuantumBath:
    """Finite-dimensional environment coupled to each qutrit.

    All five bath operators must be Hermitian; the coupling operators are
    bounded in spectral norm by ``coupling_scale``.
    """

    dim_e: int
    b0: Operator
    b1: Operator
    e0: Operator
    e1: Operator
    h_env: Operator
    phi0: float = 0.0
    phi1: float = 0.0
    coupling_scale: float = 1.0

    def __post_init__(self):
        for name in ("b0", "b1", "e0", "e1", "h_env"):
            op = getattr(self, name)
            if op.dims != (self.dim_e,):
                raise ValueError(f"bath operator {name} has dims {op.dims}, expected ({self.dim_e},)")
            if not op.is_hermitian(_BATH_HERM_TOL):
                raise ValueError(f"bath operator {name} is not Hermitian within tolerance")
        slop = 1e-9 * max(1.0, self.coupling_scale)
        for name in ("b0", "b1", "e0", "e1"):
            if spectral_norm(getattr(self, name)) > self.coupling_scale + slop:
                raise ValueError(f"bath operator {name} exceeds coupling_scale in norm")

    @classmethod
    def random(cls, dim_e: int, coupling_scale: float, seed: int,
               phi0: float = 0.0, phi1: float = 0.0) -> QuantumBath:
        """Seeded random bath; every operator is scaled to ``coupling_scale``.

        The bath self-Hamiltonian is scaled along with the coupling
        operators so that Magnus terms of order n scale uniformly as
        (coupling_scale * time)^n.
        """
        rng = np.random.default_rng(seed)
        ops = [random_hermitian(dim_e, coupling_scale, rng) for _ in range(5)]
        return cls(dim_e, *ops, phi0=phi0, phi1=phi1, coupling_scale=coupling_scale)

    def scaled(self, coupling_scale: float) -> QuantumBath:
        """Same bath with every operator rescaled to the new coupling scale."""
        if self.coupling_scale == 0:
            raise ValueError("cannot rescale a zero-coupling bath")
        factor = coupling_scale / self.coupling_scale
        return QuantumBath(
            self.dim_e,
            factor * self.b0, factor * self.b1,
            factor * self.e0, factor * self.e1,
            factor * self.h_env,
            phi0=self.phi0, phi1=self.phi1,
            coupling_scale=coupling_scale,
        )


def build_hip(bath: QuantumBath) -> Operator:
    """Transverse dephasing coupling on dims (3, dim_e).

    (|e><e| - |0><0|) (x) B0 + (|e><e| - |1><1|) (x) B1.
    """
    z0 = Operator((3,), _proj("e", "e") - _proj("0", "0"))
    z1 = Operator((3,), _proj("e", "e") - _proj("1", "1"))
    return kron(z0, bath.b0) + kron(z1, bath.b1)


def build_hil(bath: QuantumBath) -> Operator:
    """Longitudinal relaxation coupling on dims (3, dim_e).

    (e^{-i phi0}|0><e| + h.c.) (x) E0 + (e^{-i phi1}|1><e| + h.c.) (x) E1.
    """
    x0 = np.exp(-1j * bath.phi0) * _proj("0", "e")
    x1 = np.exp(-1j * bath.phi1) * _proj("1", "e")
    s0 = Operator((3,), x0 + x0.conj().T)
    s1 = Operator((3,), x1 + x1.conj().T)
    return kron(s0, bath.e0) + kron(s1, bath.e1)


def commutator_hip_hil(bath: QuantumBath) -> Operator:
    """[H_IP, H_IL], computed directly from the assembled couplings."""
    return commutator(build_hip(bath), build_hil(bath))


def commutator_hip_hil_expanded(bath: QuantumBath) -> Operator:
    """[H_IP, H_IL] assembled term by term from its closed form.

    The diagonal-bath products enter as anticommutators {B_g, E_g} on the
    antisymmetric system combination e^{i phi_g}|e><g| - h.c., plus the
    mixed B_{1-g} E_g cross terms.  Agrees entrywise with the direct
    commutator; both evaluations are kept as a dual-path check.
    """
    b0, b1, e0, e1 = bath.b0.mat, bath.b1.mat, bath.e0.mat, bath.e1.mat
    up0 = np.exp(1j * bath.phi0) * _proj("e", "0")
    up1 = np.exp(1j * bath.phi1) * _proj("e", "1")
    total = (
        np.kron(up0 - up0.conj().T, b0 @ e0 + e0 @ b0)
        + np.kron(up1 - up1.conj().T, b1 @ e1 + e1 @ b1)
        + np.kron(up0, b1 @ e0) - np.kron(up0.conj().T, e0 @ b1)
        + np.kron(up1, b0 @ e1) - np.kron(up1.conj().T, e1 @ b0)
    )
    return Operator((3, bath.dim_e), total)


def commutators_he(bath: QuantumBath) -> tuple[Operator, Operator]:
    """([H_env, H_IP], [H_env, H_IL]) from the assembled operators."""
    h_env = kron(identity((3,)), bath.h_env)
    return (
        commutator(h_env, build_hip(bath)),
        commutator(h_env, build_hil(bath)),
    )


def commutators_he_expanded(bath: QuantumBath) -> tuple[Operator, Operator]:
    """Same pair assembled from bath-side commutators [H_env, B], [H_env, E].

    The system factors are untouched by the environment Hamiltonian, so
    both commutators retain the structure of the couplings themselves.
    """
    def via_bath_commutators(system_parts, bath_ops):
        total = np.zeros((3 * bath.dim_e,) * 2, dtype=np.complex128)
        for sys_part, bath_op in zip(system_parts, bath_ops):
            comm = bath.h_env.mat @ bath_op.mat - bath_op.mat @ bath.h_env.mat
            total = total + np.kron(sys_part, comm)
        return Operator((3, bath.dim_e), total)

    z_parts = (_proj("e", "e") - _proj("0", "0"), _proj("e", "e") - _proj("1", "1"))
    x0 = np.exp(-1j * bath.phi0) * _proj("0", "e")
    x1 = np.exp(-1j * bath.phi1) * _proj("1", "e")
    l_parts = (x0 + x0.conj().T, x1 + x1.conj().T)
    return (
        via_bath_commutators(z_parts, (bath.b0, bath.b1)),
        via_bath_commutators(l_parts, (bath.e0, bath.e1)),
    )


def _embed_system_bath(sys_bath: np.ndarray, slot: int, num_qutrits: int, dim_e: int) -> np.ndarray:
    """Embed an operator on (one qutrit, bath) at qutrit ``slot`` of an n-qutrit register.

    The bath factor always sits last, so the (qutrit, bath) operator is
    split into system blocks and each block is padded with identities on
    the other qutrits: index order (pre qutrits, slot, post qutrits, bath).
    """
    n_total = 3**num_qutrits * dim_e
    full = np.zeros((n_total, n_total), dtype=np.complex128)
    m = sys_bath.reshape(3, dim_e, 3, dim_e)
    eye_pre = np.eye(3**slot)
    eye_post = np.eye(3 ** (num_qutrits - 1 - slot))
    for i in range(3):
        for j in range(3):
            sys_block = np.zeros((3, 3))
            sys_block[i, j] = 1.0
            full += np.kron(
                np.kron(np.kron(eye_pre, sys_block), eye_post), m[i, :, j, :]
            )
    return full


def bath_interaction(bath: QuantumBath, num_qutrits: int = 1) -> Operator:
    """Full coupling of every qutrit to the shared bath, dims (3,)*n + (dim_e,)."""
    hip_hil = (build_hip(bath) + build_hil(bath)).mat
    total = np.zeros((3**num_qutrits * bath.dim_e,) * 2, dtype=np.complex128)
    for q in range(num_qutrits):
        total += _embed_system_bath(hip_hil, q, num_qutrits, bath.dim_e)
    return Operator((3,) * num_qutrits + (bath.dim_e,), total)


def bath_hamiltonian(bath: QuantumBath, num_qutrits: int = 1) -> Operator:
    """Interaction plus bath self-energy, dims (3,)*n + (dim_e,)."""
    n_sys = 3**num_qutrits
    env = np.kron(np.eye(n_sys), bath.h_env.mat)
    return bath_interaction(bath, num_qutrits) + Operator(
        (3,) * num_qutrits + (bath.dim_e,), env
    )


@dataclass(frozen=True)
class ClassicalNoise:
    """Deterministic drift amplitude for the classical error Hamiltonian.

    ``epsilon`` is the amplitude in rad/ms (sweeps specify it as a fraction
    of the gate Rabi frequency and convert); ``cutoff`` is the spectral
    cutoff in rad/ms.
    """

    epsilon: float
    cutoff: float = DEFAULT_CUTOFF

    def __post_init__(self):
        if self.epsilon < 0:
            raise ValueError("noise amplitude must be nonnegative")
        if self.cutoff <= 0:
            raise ValueError("spectral cutoff must be positive")


def kappa(t, noise: ClassicalNoise):
    """Drift kappa(t) = eps/pi * integral_0^a  w cos(w t) dw, a = cutoff.

    Closed form eps/pi * [a sin(a t)/t + (cos(a t) - 1)/t^2], with a series
    expansion below |a t| = 0.1 to avoid catastrophic cancellation; the
    t -> 0 limit is eps * a^2 / (2 pi).

    Accepts a scalar or an ndarray of times (t >= 0).
    """
    a = noise.cutoff
    eps = noise.epsilon
    t_arr = np.asarray(t, dtype=float)
    scalar = t_arr.ndim == 0
    t_arr = np.atleast_1d(t_arr)
    out = np.empty_like(t_arr)

    small = np.abs(a * t_arr) < 0.1
    if np.any(small):
        ts = t_arr[small]
        # sum_k (-1)^k t^{2k} a^{2k+2} / ((2k+2) (2k)!)
        acc = np.zeros_like(ts)
        for k in range(6):
            term = (-1.0) ** k * ts ** (2 * k) * a ** (2 * k + 2)
            term /= (2 * k + 2) * math.factorial(2 * k)
            acc += term
        out[small] = acc
    if np.any(~small):
        tl = t_arr[~small]
        out[~small] = a * np.sin(a * tl) / tl + (np.cos(a * tl) - 1.0) / tl**2
    out *= eps / math.pi
    return float(out[0]) if scalar else out


def classical_error_hamiltonian(t: float, noise: ClassicalNoise, num_qutrits: int) -> Operator:
    """kappa(t) times the sum of all error generators on every qutrit."""
    if num_qutrits not in (1, 2):
        raise ValueError("classical error Hamiltonian supports 1 or 2 qutrits")
    return float(kappa(t, noise)) * error_generator_sum(num_qutrits)
