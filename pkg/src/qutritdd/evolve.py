"""Time-ordered propagation of schedules and Magnus-order diagnostics.

Propagation multiplies segment propagators in time order, applying any
instantaneous boundary pulses between them.  Segments whose total
generator is constant are exponentiated exactly (PiecewiseExact); segments
made time dependent by classical noise are integrated with midpoint
exponential steps, a second-order scheme whose only error comes from the
slow drift of the noise amplitude across one step.

The toggling-frame and Magnus diagnostics operate on instant-mode
schedules, where the control frame is piecewise constant and the first
and second order averages reduce to exact (double) sums over segments.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .linalg import Operator, expm_hermitian, identity
from .noise import ClassicalNoise, QuantumBath, bath_hamiltonian, kappa
from .sequence import PULSE_MODE_INSTANT, Schedule
from .system import error_generator_sum

METHOD_PIECEWISE_EXACT = "piecewise_exact"
METHOD_MIDPOINT = "midpoint"


@dataclass(frozen=True)
class IntegratorConfig:
    """Step size (ms), stepping method, and target local tolerance."""

    dt: float = 1e-4
    method: str = METHOD_PIECEWISE_EXACT
    tolerance: float = 1e-9

    def __post_init__(self):
        if self.dt <= 0:
            raise ValueError("integrator step must be positive")
        if self.method not in (METHOD_PIECEWISE_EXACT, METHOD_MIDPOINT):
            raise ValueError(f"unknown integrator method {self.method!r}")


def _extend_to(mat: np.ndarray, extra_dim: int) -> np.ndarray:
    if extra_dim == 1:
        return mat
    return np.kron(mat, np.eye(extra_dim))


def propagate(
    schedule: Schedule,
    noise: QuantumBath | ClassicalNoise | None = None,
    cfg: IntegratorConfig | None = None,
) -> Operator:
    """Total propagator of a schedule under the given noise model.

    With a quantum bath the returned operator lives on the extended space
    dims + (dim_e,), includes the bath self-Hamiltonian, and every segment
    is exponentiated exactly.  With classical noise the drift kappa(t) is
    tracked through global time (pulse segments included) and integrated
    by midpoint steps.  The result is checked to be unitary within
    10 * cfg.tolerance.
    """
    cfg = cfg or IntegratorConfig()
    dims = schedule.dims
    num_qutrits = len(dims)

    extra_dim = 1
    static_extra = None  # constant addition on the extended space
    noise_gen = None  # classical: matrix multiplied by kappa(t)
    if isinstance(noise, QuantumBath):
        extra_dim = noise.dim_e
        static_extra = bath_hamiltonian(noise, num_qutrits).mat
    elif isinstance(noise, ClassicalNoise):
        if noise.epsilon != 0.0:
            noise_gen = error_generator_sum(num_qutrits).mat

    dim_total = int(np.prod(dims)) * extra_dim
    unitary = np.eye(dim_total, dtype=np.complex128)

    stepped = [
        seg for seg in schedule.segments
        if seg.duration > 0 and (noise_gen is not None or cfg.method == METHOD_MIDPOINT)
    ]
    if stepped and cfg.dt > min(seg.duration for seg in stepped):
        raise ValueError("integrator step exceeds the shortest integrated segment")

    t_global = 0.0
    n_segs = len(schedule.segments)
    for i in range(n_segs + 1):
        for pulse in schedule.boundary_pulses[i]:
            unitary = _extend_to(pulse.op.mat, extra_dim) @ unitary
        if i == n_segs:
            break
        seg = schedule.segments[i]
        if seg.duration == 0:
            continue
        base = _extend_to(seg.generator.mat, extra_dim)
        if static_extra is not None:
            base = base + static_extra
        if noise_gen is None and cfg.method == METHOD_PIECEWISE_EXACT:
            unitary = expm_hermitian(base, seg.duration) @ unitary
        else:
            n_steps = max(1, math.ceil(seg.duration / cfg.dt - 1e-12))
            dt = seg.duration / n_steps
            for s in range(n_steps):
                h = base
                if noise_gen is not None:
                    t_mid = t_global + (s + 0.5) * dt
                    h = base + float(kappa(t_mid, noise)) * noise_gen
                unitary = expm_hermitian(h, dt) @ unitary
        t_global += seg.duration

    defect = np.linalg.norm(unitary.conj().T @ unitary - np.eye(dim_total))
    if defect > 10.0 * cfg.tolerance:
        raise RuntimeError(f"propagator lost unitarity: defect {defect:.3e}")
    out_dims = dims + ((extra_dim,) if extra_dim > 1 else ())
    return Operator(out_dims, unitary)


# ---------------------------------------------------------------------------
# toggling frame and Magnus averages (instant mode)

def _require_instant(schedule: Schedule):
    if schedule.pulse_mode != PULSE_MODE_INSTANT:
        raise ValueError("frame diagnostics require an instant-pulse schedule")


def _cumulative_frames(schedule: Schedule) -> list[Operator]:
    """Pulse product after each boundary; entry i is the frame of segment i."""
    frames = []
    frame = identity(schedule.dims)
    for group in schedule.boundary_pulses:
        for pulse in group:
            frame = pulse.op @ frame
        frames.append(frame)
    return frames


def control_frames(schedule: Schedule) -> list[Operator]:
    """Accumulated pulse product in effect during each segment."""
    _require_instant(schedule)
    return _cumulative_frames(schedule)[: len(schedule.segments)]


def toggling_hamiltonian(schedule: Schedule, h_i: Operator, t: float) -> Operator:
    """Interaction toggled into the control frame at time t.

    Returns U_C(t)^dag h_i U_C(t) with U_C the piecewise-constant pulse
    product; pulses sitting exactly at time t count as already applied.
    ``h_i`` may carry extra trailing subsystems (a bath); the frame is
    identity-extended onto them.
    """
    _require_instant(schedule)
    if not 0.0 <= t <= schedule.total_duration:
        raise ValueError(f"time {t} outside the schedule duration")
    frames = _cumulative_frames(schedule)
    index = len(schedule.segments)  # t at the very end: all pulses applied
    elapsed = 0.0
    for i, seg in enumerate(schedule.segments):
        if t < elapsed + seg.duration:
            index = i
            break
        elapsed += seg.duration
    return _conjugate_extended(frames[index], h_i)


def _conjugate_extended(frame: Operator, h: Operator) -> Operator:
    extra = int(np.prod(h.dims)) // int(np.prod(frame.dims))
    if int(np.prod(frame.dims)) * extra != int(np.prod(h.dims)):
        raise ValueError(f"cannot extend frame dims {frame.dims} onto {h.dims}")
    f = _extend_to(frame.mat, extra)
    return Operator(h.dims, f.conj().T @ h.mat @ f)


def magnus1(schedule: Schedule, h_i: Operator) -> Operator:
    """First-order average: sum of duration-weighted toggled interactions."""
    _require_instant(schedule)
    frames = control_frames(schedule)
    total = None
    for frame, seg in zip(frames, schedule.segments):
        term = seg.duration * _conjugate_extended(frame, h_i)
        total = term if total is None else total + term
    if total is None:
        raise ValueError("schedule has no segments")
    return total


def magnus2(schedule: Schedule, h_i: Operator, h_e: Operator | None = None) -> Operator:
    """Second-order Magnus term of the toggled interaction plus bath energy.

    For a piecewise-constant toggled Hamiltonian H_j on segments of
    duration d_j the double time-ordered integral collapses to
    -(i/2) * sum_{j>i} [H_j d_j, H_i d_i]; same-segment contributions
    vanish.  ``h_e`` is the bath self-Hamiltonian, either already on the
    dims of ``h_i`` or on the trailing bath factor alone.
    """
    _require_instant(schedule)
    frames = control_frames(schedule)
    extra = None
    if h_e is not None:
        if h_e.dims == h_i.dims:
            extra = h_e.mat
        else:
            pad = int(np.prod(h_i.dims)) // int(np.prod(h_e.dims))
            if pad * int(np.prod(h_e.dims)) != int(np.prod(h_i.dims)):
                raise ValueError("bath Hamiltonian dims incompatible with interaction dims")
            extra = np.kron(np.eye(pad), h_e.mat)

    toggled = []
    for frame, seg in zip(frames, schedule.segments):
        h = _conjugate_extended(frame, h_i).mat
        if extra is not None:
            h = h + extra
        toggled.append(seg.duration * h)

    dim = toggled[0].shape[0] if toggled else int(np.prod(h_i.dims))
    acc = np.zeros((dim, dim), dtype=np.complex128)
    running = np.zeros_like(acc)  # sum of earlier duration-weighted terms
    for h in toggled:
        acc += h @ running - running @ h
        running += h
    return Operator(h_i.dims, -0.5j * acc)
