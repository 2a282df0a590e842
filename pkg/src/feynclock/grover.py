"""Grover iterations clocked by a sequential program line.

Register spins are indexed in the sigma_3 basis with spin i mapped to bit
``mu - i`` of the register index (bit 0 means sigma_3 = +1).  The start state
|1_1> (all sigma_1 = +1) is the uniform superposition.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .amplitudes import site_probabilities
from .basis import ProgramLineSpec, initial_state
from .hamiltonian import build_sequential
from .propagator import evolve_const

MAX_DENSE_MU = 10
MAX_LINE_MU = 8


@dataclass(frozen=True)
class GroverSpec:
    mu: int
    target: tuple[int, ...] | None = None
    s: int | None = None

    def __post_init__(self):
        if self.mu < 1:
            raise ValueError("mu must be >= 1")
        target = tuple(int(a) for a in (self.target or (1,) * self.mu))
        if len(target) != self.mu or any(a not in (-1, 1) for a in target):
            raise ValueError("target must be a +-1 vector of length mu")
        object.__setattr__(self, "target", target)
        s = 2 ** (self.mu + 1) + 1 if self.s is None else int(self.s)
        if s < 1 or s % 2 == 0:
            raise ValueError(f"s must be odd, got {s}")
        object.__setattr__(self, "s", s)

    @property
    def dim(self) -> int:
        return 2 ** self.mu

    @property
    def g(self) -> int:
        return (self.s - 1) // 2

    @property
    def theta(self) -> float:
        return float(np.arcsin(2.0 ** (-self.mu / 2)))

    @property
    def n_optimal(self) -> float:
        """Large-mu estimate (pi/4) 2^(mu/2) of the best iteration count."""
        return np.pi / 4 * 2.0 ** (self.mu / 2)

    @property
    def target_index(self) -> int:
        return int("".join("0" if a == 1 else "1" for a in self.target), 2)

    def target_state(self) -> np.ndarray:
        v = np.zeros(self.dim, dtype=complex)
        v[self.target_index] = 1.0
        return v

    def uniform_state(self) -> np.ndarray:
        return np.full(self.dim, 2.0 ** (-self.mu / 2), dtype=complex)


def grover_operators(spec: GroverSpec) -> tuple[np.ndarray, np.ndarray]:
    """Oracle A = 1 - 2 P_a and inversion B = 1 - 2 |1_1><1_1|."""
    if spec.mu > MAX_DENSE_MU:
        raise ValueError(f"dense Grover operators limited to mu <= {MAX_DENSE_MU}")
    eye = np.eye(spec.dim, dtype=complex)
    a, u = spec.target_state(), spec.uniform_state()
    return eye - 2 * np.outer(a, a.conj()), eye - 2 * np.outer(u, u.conj())


def machine_time_overlap(spec: GroverSpec, n) -> np.ndarray | float:
    """sin^2((2n+1) theta): target overlap after n applications of B A."""
    n = np.asarray(n)
    if np.any(n < 0):
        raise ValueError("n must be >= 0")
    out = np.sin((2 * n + 1) * spec.theta) ** 2
    return float(out) if out.ndim == 0 else out


def x_odd(x):
    """Largest odd integer not larger than x (x >= 1)."""
    x = np.asarray(x)
    return np.where(x % 2 == 1, x, x - 1)


def damped_overlap(spec: GroverSpec, t) -> np.ndarray | float:
    """<psi(t)| P_a |psi(t)> as a mixture over cursor positions."""
    t = np.asarray(t, dtype=float)
    if np.any(t < 0):
        raise ValueError("t must be >= 0")
    x = np.arange(1, spec.s + 1)
    weights = np.sin(spec.theta * x_odd(x)) ** 2
    out = site_probabilities(t, spec.s) @ weights
    return float(out) if out.ndim == 0 else out


def peak_overlap(spec: GroverSpec) -> float:
    """max over n <= g of sin^2((2n+1) theta), the undamped envelope."""
    return float(np.max(machine_time_overlap(spec, np.arange(spec.g + 1))))


def build_grover_line(spec: GroverSpec) -> ProgramLineSpec:
    """Sequential line with A_j = A for odd j and B for even j."""
    if spec.mu > MAX_LINE_MU:
        raise ValueError(f"full Grover line limited to mu <= {MAX_LINE_MU}")
    a, b = grover_operators(spec)
    unitaries = tuple(a if j % 2 == 1 else b for j in range(1, spec.s))
    return ProgramLineSpec(s=spec.s, topology="sequential", d_reg=spec.dim,
                           register_unitaries=unitaries)


def simulate(spec: GroverSpec, times):
    """Full sector evolution from |1_1> (x) |Q=1>; returns (line, result)."""
    line = build_grover_line(spec)
    psi0 = initial_state(line, spec.uniform_state())
    return line, evolve_const(build_sequential(line), psi0, times)


def simulated_overlap(spec: GroverSpec, times) -> np.ndarray:
    line, result = simulate(spec, times)
    return result.probability(line.basis.mask(register_index=spec.target_index))
