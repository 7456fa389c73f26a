"""Pulse schedules: decoupling sequences for memories and the protected gate.

A schedule is an ordered list of timed segments, each with a constant
Hermitian generator, plus optional instantaneous pulses at the segment
boundaries.  Schedules are written in TIME order (earliest first), which is
the reverse of operator-product notation: the product p4 f p4 f acts with
the rightmost f first, so as a schedule it reads [free][p4][free][p4].

Two pulse modes exist.  In "instant" mode the decoupling operators are
ideal zero-duration unitaries attached to boundaries; this is the mode the
averaging diagnostics (toggling frame, Magnus terms) operate on.  In
"finite" mode every pulse is replaced by its physical realization as one
or two driven segments with Rabi frequency omega_dd, and boundary pulses
are empty; noise then acts during the pulses as well.

Adjacent identical pulses at an interior boundary (e.g. ...p1][p1...) are
kept as two separate applications; the pulse count and, in finite mode,
the pulse exposure time are physical.  ``merge_boundary_pulses`` collapses
them when an idealized sequence is wanted.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field

import numpy as np

from .linalg import ALG_TOL, Operator, frobenius_norm, kron, zero
from .system import dd_operator, dd_operator_tensor, ket

PULSE_MODE_INSTANT = "instant"
PULSE_MODE_FINITE = "finite"

DEFAULT_OMEGA_DD = 2 * math.pi * 100.0  # rad/ms, i.e. 2pi x 100 kHz

_UNITARY_TOL = 1e-10


@dataclass(frozen=True)
class Pulse:
    """Named instantaneous unitary applied at a segment boundary."""

    name: str
    op: Operator

    def __post_init__(self):
        if not self.op.is_unitary(_UNITARY_TOL):
            raise ValueError(f"boundary pulse {self.name!r} is not unitary within tolerance")


@dataclass(frozen=True)
class Segment:
    """Timed evolution window with a constant Hermitian generator."""

    duration: float
    generator: Operator
    label: str = ""

    def __post_init__(self):
        if self.duration < 0:
            raise ValueError("segment duration must be nonnegative")
        if not self.generator.is_hermitian(ALG_TOL):
            raise ValueError(f"segment generator {self.label!r} is not Hermitian")


@dataclass(frozen=True)
class Schedule:
    """Ordered segments with per-boundary pulse lists (time order).

    ``boundary_pulses`` has one entry per boundary, i.e. len(segments)+1
    entries; entry i is applied before segment i (the last entry after the
    final segment).  Pulses within one boundary are applied in list order.
    In finite mode all boundaries must be empty.
    """

    segments: tuple[Segment, ...]
    boundary_pulses: tuple[tuple[Pulse, ...], ...]
    pulse_mode: str = PULSE_MODE_INSTANT
    dims: tuple[int, ...] = ()

    def __post_init__(self):
        if self.pulse_mode not in (PULSE_MODE_INSTANT, PULSE_MODE_FINITE):
            raise ValueError(f"unknown pulse mode {self.pulse_mode!r}")
        segments = tuple(self.segments)
        boundaries = tuple(tuple(b) for b in self.boundary_pulses)
        if len(boundaries) != len(segments) + 1:
            raise ValueError("need exactly one boundary pulse list per segment boundary")
        dims = self.dims
        if not dims:
            if not segments:
                raise ValueError("empty schedule needs explicit dims")
            dims = segments[0].generator.dims
        for seg in segments:
            if seg.generator.dims != dims:
                raise ValueError("all segment generators must share the schedule dims")
        for group in boundaries:
            for pulse in group:
                if pulse.op.dims != dims:
                    raise ValueError("boundary pulse dims must match the schedule dims")
        if self.pulse_mode == PULSE_MODE_FINITE and any(boundaries):
            raise ValueError("finite-pulse schedules carry pulses as segments, not boundaries")
        object.__setattr__(self, "segments", segments)
        object.__setattr__(self, "boundary_pulses", boundaries)
        object.__setattr__(self, "dims", tuple(int(d) for d in dims))

    @property
    def total_duration(self) -> float:
        return float(sum(seg.duration for seg in self.segments))

    @property
    def num_pulses(self) -> int:
        return sum(len(group) for group in self.boundary_pulses)

    @classmethod
    def empty(cls, dims, pulse_mode: str = PULSE_MODE_INSTANT) -> Schedule:
        return cls((), ((),), pulse_mode=pulse_mode, dims=tuple(dims))


def control_cycle_product(schedule: Schedule) -> Operator:
    """Ordered product of all boundary pulses with free evolution removed.

    For a valid decoupling cycle this is the identity up to a global phase.
    """
    from .linalg import identity

    out = identity(schedule.dims)
    for group in schedule.boundary_pulses:
        for pulse in group:
            out = pulse.op @ out
    return out


def merge_boundary_pulses(schedule: Schedule) -> Schedule:
    """Collapse each boundary's pulse list into a single product pulse.

    Optimization pass only; the default sequences keep every application.
    """
    merged = []
    for group in schedule.boundary_pulses:
        if len(group) <= 1:
            merged.append(tuple(group))
            continue
        op = group[0].op
        for pulse in group[1:]:
            op = pulse.op @ op
        merged.append((Pulse("*".join(p.name for p in group), op),))
    return Schedule(schedule.segments, tuple(merged), schedule.pulse_mode, schedule.dims)


# ---------------------------------------------------------------------------
# internal block algebra: (segments, boundaries) fragments composed in
# time order, then frozen into a Schedule

@dataclass
class _Block:
    segments: list = field(default_factory=list)
    boundaries: list = field(default_factory=lambda: [[]])

    def copy(self) -> "_Block":
        return _Block([*self.segments], [list(b) for b in self.boundaries])


def _free(tau: float, dims) -> _Block:
    return _Block([Segment(tau, zero(dims), "free")], [[], []])


def _concat(*blocks: _Block) -> _Block:
    out = blocks[0].copy()
    for blk in blocks[1:]:
        out.boundaries[-1] = out.boundaries[-1] + list(blk.boundaries[0])
        out.segments += blk.segments
        out.boundaries += [list(b) for b in blk.boundaries[1:]]
    return out


def _wrap(pulse: Pulse, block: _Block) -> _Block:
    out = block.copy()
    out.boundaries[0] = [pulse] + out.boundaries[0]
    out.boundaries[-1] = out.boundaries[-1] + [pulse]
    return out


def _dd_pulse(k: int, num_qutrits: int) -> Pulse:
    return Pulse(f"p{k}", dd_operator_tensor(k, num_qutrits))


# ---------------------------------------------------------------------------
# finite-time pulse realizations

def _transition(a: str, b: str) -> np.ndarray:
    return np.outer(ket(a).amplitudes, ket(b).amplitudes.conj())


def _pulse_generator_segments(k: int, omega_dd: float) -> list[tuple[float, np.ndarray, str]]:
    """Single-qutrit driven segments realizing p_k up to a global phase.

    t_pi below is the duration of a pi pulse on one two-level transition,
    i.e. (pi/2)/omega_dd; this is the elementary decoupling-operation time
    tau_DD swept in the pulse-duration experiment.

    p1: one drive on both transitions at strength omega_dd/sqrt(2) for
        2 t_pi (realizes -p1).
    p2: pi pulse on |0><->|e| plus a compensating phase window on |1|
        (realizes -i p2); p3 likewise with the roles of |0| and |1| swapped.
    p4: two sequential 2pi pulses on |0><->|e| then |1><->|e| (exactly p4).
    """
    t_pi = 0.5 * math.pi / omega_dd
    x0e = _transition("e", "0") + _transition("0", "e")
    x1e = _transition("e", "1") + _transition("1", "e")
    if k == 1:
        both = (x0e + x1e) / math.sqrt(2)
        return [(2 * t_pi, omega_dd * both, "p1:drive")]
    if k == 2:
        return [
            (t_pi, omega_dd * x0e, "p2:pi"),
            (t_pi, omega_dd * _transition("1", "1").real, "p2:phase"),
        ]
    if k == 3:
        return [
            (t_pi, omega_dd * x1e, "p3:pi"),
            (t_pi, omega_dd * _transition("0", "0").real, "p3:phase"),
        ]
    if k == 4:
        return [
            (2 * t_pi, omega_dd * x0e, "p4:2pi:0e"),
            (2 * t_pi, omega_dd * x1e, "p4:2pi:1e"),
        ]
    raise ValueError(f"decoupling operator index must be in 1..4, got {k}")


def _finite_pulse_segments(k: int, omega_dd: float, num_qutrits: int) -> list[Segment]:
    if omega_dd <= 0:
        raise ValueError("pulse drive strength must be positive")
    segs = []
    for duration, gen, label in _pulse_generator_segments(k, omega_dd):
        if num_qutrits == 2:
            gen = np.kron(gen, np.eye(3)) + np.kron(np.eye(3), gen)
        segs.append(Segment(duration, Operator((3,) * num_qutrits, gen), label))
    return segs


def pulse_duration(k: int, omega_dd: float) -> float:
    """Total duration of the finite-time realization of p_k."""
    return sum(d for d, _, _ in _pulse_generator_segments(k, omega_dd))


def tau_dd(omega_dd: float) -> float:
    """Elementary decoupling-operation time (one pi pulse) in ms."""
    return 0.5 * math.pi / omega_dd


def omega_dd_for_tau(tau_dd_ms: float) -> float:
    """Drive strength that makes one pi pulse last tau_dd_ms."""
    if tau_dd_ms <= 0:
        raise ValueError("pulse duration must be positive")
    return 0.5 * math.pi / tau_dd_ms


def pulse_realization(k: int, omega_dd: float) -> Schedule:
    """Finite-time single-qutrit schedule whose propagator is p_k up to phase."""
    segs = _finite_pulse_segments(k, omega_dd, num_qutrits=1)
    return Schedule(tuple(segs), ((),) * (len(segs) + 1), PULSE_MODE_FINITE)


def _to_finite(block: _Block, omega_dd: float, num_qutrits: int) -> _Block:
    """Replace every boundary pulse with its driven-segment realization."""
    parts: list[_Block] = []
    for i, group in enumerate(block.boundaries):
        for pulse in group:
            k = int(pulse.name[1])
            segs = _finite_pulse_segments(k, omega_dd, num_qutrits)
            parts.append(_Block(segs, [[] for _ in range(len(segs) + 1)]))
        if i < len(block.segments):
            parts.append(_Block([block.segments[i]], [[], []]))
    return _concat(*parts) if parts else _Block([], [[]])


def _freeze(block: _Block, pulse_mode: str, dims) -> Schedule:
    return Schedule(
        tuple(block.segments),
        tuple(tuple(b) for b in block.boundaries),
        pulse_mode,
        tuple(dims),
    )


# ---------------------------------------------------------------------------
# memory sequences

def _nested_cycle(inner: _Block, num_qutrits: int) -> _Block:
    """(p3 X p3)(p2 X p2)(p1 X p1) in time order: the p1 block comes first."""
    return _concat(*[_wrap(_dd_pulse(k, num_qutrits), inner) for k in (1, 2, 3)])


def _relaxation_layer(tau: float, dims, num_qutrits: int) -> _Block:
    """p4 f p4 f with f a free window of length tau: [f][p4][f][p4] in time."""
    p4 = _dd_pulse(4, num_qutrits)
    return _Block(
        [Segment(tau, zero(dims), "free"), Segment(tau, zero(dims), "free")],
        [[], [p4], [p4]],
    )


def memory_dd_first_order(
    tau: float,
    pulse_mode: str = PULSE_MODE_INSTANT,
    omega_dd: float = DEFAULT_OMEGA_DD,
    num_qutrits: int = 1,
) -> Schedule:
    """First-order memory protection: six free windows, twelve pulses.

    Inner layer p4 f p4 f cancels the relaxation coupling; the outer
    (p3 . p3)(p2 . p2)(p1 . p1) layer cancels the dephasing coupling, so
    the first-order average of the toggled interaction vanishes for both.
    """
    if tau <= 0:
        raise ValueError("free-evolution window must be positive")
    dims = (3,) * num_qutrits
    cycle = _nested_cycle(_relaxation_layer(tau, dims, num_qutrits), num_qutrits)
    if pulse_mode == PULSE_MODE_FINITE:
        cycle = _to_finite(cycle, omega_dd, num_qutrits)
    return _freeze(cycle, pulse_mode, dims)


def memory_dd_second_order(
    tau: float,
    pulse_mode: str = PULSE_MODE_INSTANT,
    omega_dd: float = DEFAULT_OMEGA_DD,
    num_qutrits: int = 1,
) -> Schedule:
    """Second-order (concatenated) memory protection, 36 free windows.

    The first-order cycle C is nested into another ground-state layer,
    W = (p3 C p3)(p2 C p2)(p1 C p1), and the result is repeated once bare
    and once conjugated by p4: in time order [W][p4 W p4].  This removes
    the system-nontrivial part of the second-order average as well.
    """
    if tau <= 0:
        raise ValueError("free-evolution window must be positive")
    dims = (3,) * num_qutrits
    first = _nested_cycle(_relaxation_layer(tau, dims, num_qutrits), num_qutrits)
    w = _nested_cycle(first, num_qutrits)
    cycle = _concat(w, _wrap(_dd_pulse(4, num_qutrits), w))
    if pulse_mode == PULSE_MODE_FINITE:
        cycle = _to_finite(cycle, omega_dd, num_qutrits)
    return _freeze(cycle, pulse_mode, dims)


# ---------------------------------------------------------------------------
# protected two-qutrit gate

def _drive(bra_ket_pairs, amplitude: float) -> Operator:
    mat = np.zeros((9, 9), dtype=np.complex128)
    for a, b in bra_ket_pairs:
        term = np.outer(ket(a).amplitudes, ket(b).amplitudes.conj())
        mat += term + term.conj().T
    return Operator((3, 3), amplitude * mat)


def resolve_gate_timing(tau: float | None, omega: float | None) -> tuple[float, float]:
    """Fix (tau, omega) from either one via the pulse-area condition.

    The drive is active in four of the six windows and must accumulate
    area pi, so omega * 4 tau = pi for a constant envelope.
    """
    if tau is None and omega is None:
        raise ValueError("need tau or omega")
    if tau is None:
        tau = math.pi / (4.0 * omega)
    elif omega is None:
        omega = math.pi / (4.0 * tau)
    if tau <= 0 or omega <= 0:
        raise ValueError("gate timing parameters must be positive")
    if abs(omega * 4.0 * tau - math.pi) > 1e-9 * math.pi:
        raise ValueError(
            f"inconsistent gate timing: omega*4*tau = {omega * 4 * tau!r}, expected pi"
        )
    return float(tau), float(omega)


def gate_protection_schedule(
    tau: float | None = None,
    omega: float | None = None,
    pulse_mode: str = PULSE_MODE_INSTANT,
    omega_dd: float = DEFAULT_OMEGA_DD,
) -> Schedule:
    """Decoupling-protected controlled-phase gate on two qutrits.

    Six drive windows of length tau carry the engineered Hamiltonians
    (|ee><00| drive, |ee><00| drive, idle, idle, |11><ee| drive,
    |11><ee| drive) and are interleaved with the first-order memory pulse
    pattern applied as p_k (x) p_k.  In the toggled frame all four active
    windows drive |11> <-> |ee> and the accumulated area pi imprints the
    -1 phase on |11> while the noise average vanishes to first order.
    """
    tau, omega = resolve_gate_timing(tau, omega)
    dims = (3, 3)
    drive_a = _drive([("ee", "00")], omega)
    drive_b = _drive([("11", "ee")], omega)
    window_gens = [drive_a, drive_a, zero(dims), zero(dims), drive_b, drive_b]
    labels = ["drive:ee-00", "drive:ee-00", "idle", "idle", "drive:11-ee", "drive:11-ee"]

    blocks = []
    for m, k in enumerate((1, 2, 3)):
        seg1 = Segment(tau, window_gens[2 * m], labels[2 * m])
        seg2 = Segment(tau, window_gens[2 * m + 1], labels[2 * m + 1])
        p4 = _dd_pulse(4, 2)
        inner = _Block([seg1, seg2], [[], [p4], [p4]])
        blocks.append(_wrap(_dd_pulse(k, 2), inner))
    cycle = _concat(*blocks)
    if pulse_mode == PULSE_MODE_FINITE:
        cycle = _to_finite(cycle, omega_dd, num_qutrits=2)
    return _freeze(cycle, pulse_mode, dims)


def bare_gate_schedule(tau: float | None = None, omega: float | None = None) -> Schedule:
    """Unprotected reference gate with the same timing as the protected one.

    The drive is applied directly on |11> <-> |ee| during the four active
    windows (what the toggled frame realizes), with the same idle windows
    and no pulses, so the two schedules differ only by the decoupling.
    """
    tau, omega = resolve_gate_timing(tau, omega)
    dims = (3, 3)
    drive = _drive([("ee", "11")], omega)
    segs = [
        Segment(tau, drive, "drive:ee-11"),
        Segment(tau, drive, "drive:ee-11"),
        Segment(tau, zero(dims), "idle"),
        Segment(tau, zero(dims), "idle"),
        Segment(tau, drive, "drive:ee-11"),
        Segment(tau, drive, "drive:ee-11"),
    ]
    return Schedule(tuple(segs), ((),) * 7, PULSE_MODE_INSTANT, dims)


# ---------------------------------------------------------------------------
# effective two-ion coupling

def ms_effective_rabi(
    eta: float,
    omega1: float,
    omega2: float,
    delta: float,
    n_vib: int = 0,
) -> float:
    """Effective |00> <-> |ee> coupling 2 eta^2 omega1 omega2 / delta.

    Bichromatic sideband drives with single-ion Rabi frequencies omega1,
    omega2 and common detuning delta produce the two-ion transition in the
    far-detuned, Lamb-Dicke regime.  Warns when delta is less than ten
    times the sideband couplings or when eta^2 (n_vib + 1) is not small.
    """
    if delta == 0:
        raise ValueError("sideband detuning must be nonzero")
    sideband = max(abs(eta * omega1), abs(eta * omega2))
    if sideband > 0 and abs(delta) < 10.0 * sideband:
        warnings.warn(
            "detuning is not large compared with the sideband coupling; "
            "the effective two-ion reduction is unreliable",
            stacklevel=2,
        )
    if eta**2 * (n_vib + 1) >= 0.1:
        warnings.warn("outside the Lamb-Dicke regime", stacklevel=2)
    return 2.0 * eta**2 * omega1 * omega2 / delta


# ---------------------------------------------------------------------------
# serialization

def schedule_to_text(schedule: Schedule) -> str:
    """Line-oriented dump: `duration_ms | tag | params | label` per entry.

    Boundary pulses appear as zero-duration `pulse` lines in their time
    position; segment generators are summarized by their Frobenius norm.
    """
    lines = [f"# pulse_mode={schedule.pulse_mode} dims={','.join(map(str, schedule.dims))}"]
    n = len(schedule.segments)
    for i in range(n + 1):
        for pulse in schedule.boundary_pulses[i]:
            lines.append(f"0 | pulse | name={pulse.name} | {pulse.name}")
        if i < n:
            seg = schedule.segments[i]
            norm = frobenius_norm(seg.generator)
            tag = "zero" if norm == 0 else "const"
            lines.append(f"{seg.duration:.12g} | {tag} | fnorm={norm:.12g} | {seg.label}")
    return "\n".join(lines) + "\n"
