"""Exact propagation under constant and piecewise-constant Hamiltonians."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .basis import Basis, CursorState
from .hamiltonian import HermitianOperator, control_flip

NORM_DRIFT_TOL = 1e-9
TIME_TOL = 1e-12


@dataclass(frozen=True)
class EvolutionResult:
    """Sampled states; ``amplitudes[i]`` is the state at ``times[i]``."""

    times: np.ndarray = field(repr=False)
    amplitudes: np.ndarray = field(repr=False)
    basis: Basis
    method: str
    max_norm_drift: float

    def __len__(self):
        return len(self.times)

    @property
    def states(self) -> list[CursorState]:
        return [CursorState(a, self.basis) for a in self.amplitudes]

    def state(self, i: int) -> CursorState:
        return CursorState(self.amplitudes[i], self.basis)

    def probabilities(self) -> np.ndarray:
        return np.abs(self.amplitudes) ** 2

    def probability(self, mask: np.ndarray) -> np.ndarray:
        """Probability of the labels selected by a flat boolean mask, per sample."""
        return self.probabilities()[:, mask].sum(axis=1)


def _as_times(times) -> np.ndarray:
    ts = np.atleast_1d(np.asarray(times, dtype=float))
    if ts.ndim != 1:
        raise ValueError("times must be one-dimensional")
    if np.any(np.diff(ts) < 0):
        raise ValueError("times must be sorted")
    return ts


def _propagate(H: HermitianOperator, psi: np.ndarray, dts: np.ndarray) -> np.ndarray:
    w, v = H.eigh
    coeff = v.conj().T @ psi
    out = (v @ (np.exp(-1j * np.outer(w, dts)) * coeff[:, None])).T
    out[dts == 0] = psi
    return out


def _norm_drift(amps: np.ndarray) -> float:
    if amps.size == 0:
        return 0.0
    return float(np.abs(np.linalg.norm(amps, axis=1) - 1.0).max())


def _finish(ts, amps, basis, method="eigendecomposition") -> EvolutionResult:
    drift = _norm_drift(amps)
    if drift > NORM_DRIFT_TOL:
        raise FloatingPointError(f"norm drift {drift:.3e} exceeds {NORM_DRIFT_TOL}")
    amps.setflags(write=False)
    ts.setflags(write=False)
    return EvolutionResult(ts, amps, basis, method, drift)


def evolve_const(H: HermitianOperator, psi0: CursorState, times: Sequence[float],
                 method: str = "eigendecomposition") -> EvolutionResult:
    """States exp(-i H t) psi0 for each t in ``times``."""
    if method != "eigendecomposition":
        raise ValueError(f"unsupported method {method!r}")
    if H.basis != psi0.basis:
        raise ValueError(f"dimension mismatch: H on {H.basis}, state on {psi0.basis}")
    ts = _as_times(times)
    if np.any(ts < 0):
        raise ValueError("times must be >= 0")
    amps = _propagate(H, psi0.amplitudes, ts)
    return _finish(ts, amps, psi0.basis, method)


@dataclass(frozen=True)
class Segment:
    t_start: float
    t_end: float
    hamiltonian: HermitianOperator

    @property
    def duration(self) -> float:
        return self.t_end - self.t_start


class PulseSchedule:
    """Contiguous sequence of constant-Hamiltonian segments."""

    def __init__(self, segments: Sequence[Segment | tuple]):
        segs = tuple(s if isinstance(s, Segment) else Segment(*s) for s in segments)
        if not segs:
            raise ValueError("schedule needs at least one segment")
        for seg in segs:
            if not seg.t_end > seg.t_start:
                raise ValueError(f"segment [{seg.t_start}, {seg.t_end}] has non-positive length")
            if seg.hamiltonian.basis != segs[0].hamiltonian.basis:
                raise ValueError("segments act on different bases")
        for a, b in zip(segs, segs[1:]):
            if abs(b.t_start - a.t_end) > TIME_TOL:
                raise ValueError(f"segments not contiguous at t={a.t_end} / {b.t_start}")
        self.segments = segs

    @property
    def t_start(self) -> float:
        return self.segments[0].t_start

    @property
    def t_end(self) -> float:
        return self.segments[-1].t_end

    @property
    def basis(self) -> Basis:
        return self.segments[0].hamiltonian.basis

    def __len__(self):
        return len(self.segments)

    def __iter__(self):
        return iter(self.segments)


def evolve_schedule(schedule: PulseSchedule, psi0: CursorState,
                    times: Sequence[float]) -> EvolutionResult:
    """Evolve ``psi0`` (given at ``schedule.t_start``) through each segment exactly.

    A sample on a segment boundary is taken from the earlier segment, which
    is the same state.
    """
    if schedule.basis != psi0.basis:
        raise ValueError("schedule and state act on different bases")
    ts = _as_times(times)
    if ts.size and (ts[0] < schedule.t_start - TIME_TOL or ts[-1] > schedule.t_end + TIME_TOL):
        raise ValueError(f"times outside schedule span [{schedule.t_start}, {schedule.t_end}]")
    amps = np.empty((ts.size, psi0.basis.dim), dtype=complex)
    psi = psi0.amplitudes
    lo = 0
    for k, seg in enumerate(schedule.segments):
        last = k == len(schedule.segments) - 1
        hi = ts.size if last else int(np.searchsorted(ts, seg.t_end, side="right"))
        if hi > lo:
            dts = np.clip(ts[lo:hi] - seg.t_start, 0.0, None)
            amps[lo:hi] = _propagate(seg.hamiltonian, psi, dts)
        lo = hi
        if not last:
            psi = _propagate(seg.hamiltonian, psi, np.array([seg.duration]))[0]
    return _finish(ts, amps, psi0.basis)


def pi_pulse_operator(basis: Basis) -> HermitianOperator:
    """(1/2) B rho_1 with B = pi."""
    return control_flip(basis).scaled(np.pi / 2)


def make_pi_pulse_schedule(H0: HermitianOperator, t0: float, t_final: float,
                           width: float = 1.0) -> PulseSchedule:
    """H0, then H0 + (pi/2) rho_1 on [t0 - width/2, t0 + width/2], then H0."""
    if not H0.basis.has_control:
        raise ValueError("pi pulse needs a program line with a control q-bit")
    half = width / 2
    if t0 < half:
        raise ValueError(f"t0 must be >= {half}")
    if not t_final > t0 + half:
        raise ValueError("t_final must lie after the pulse window")
    pulsed = H0 + pi_pulse_operator(H0.basis).scaled(1.0 / width)
    return PulseSchedule([
        Segment(0.0, t0 - half, H0),
        Segment(t0 - half, t0 + half, pulsed),
        Segment(t0 + half, t_final, H0),
    ]) if t0 > half else PulseSchedule([
        Segment(0.0, t0 + half, pulsed),
        Segment(t0 + half, t_final, H0),
    ])
