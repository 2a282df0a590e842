"""Closed-form cursor amplitudes on a sequential program line.

With the hopping Hamiltonian H = -(1/2) sum (|j+1><j| + h.c.) the modes are
sin(k theta_n) with energies -cos(theta_n), theta_n = n pi / (s + 1), so

    c(t, k; s) = (2 / (s+1)) sum_n exp(i t cos theta_n) sin(theta_n) sin(k theta_n)

is exactly ``(exp(-i H t) e_1)_k``.  The amplitudes do not depend on the
register unitaries.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np


@dataclass(frozen=True)
class ChainMode:
    n: int
    s: int

    @property
    def theta(self) -> float:
        return theta(self.n, self.s)

    @property
    def energy(self) -> float:
        return float(np.cos(self.theta))


def theta(n: int, s: int) -> float:
    if not 1 <= n <= s:
        raise ValueError(f"mode index n={n} outside 1..{s}")
    return n * np.pi / (s + 1)


def _sin_multiple(m: np.ndarray, s: int) -> np.ndarray:
    # sin(m pi / (s+1)) with m reduced mod 2(s+1) so the argument stays small
    return np.sin((np.asarray(m) % (2 * (s + 1))) * (np.pi / (s + 1)))


def _mode_weights(s: int) -> np.ndarray:
    """Matrix W[k-1, n-1] = (2/(s+1)) sin(theta_n) sin(k theta_n)."""
    n = np.arange(1, s + 1)
    k = np.arange(1, s + 1)
    return (2.0 / (s + 1)) * _sin_multiple(n, s)[None, :] * _sin_multiple(np.outer(k, n), s)


def _mode_energies(s: int) -> np.ndarray:
    n = np.arange(1, s + 1)
    return np.cos(n * np.pi / (s + 1))


def closed_form_amplitude(t: float, k: int, s: int) -> complex:
    if not 1 <= k <= s:
        raise ValueError(f"site k={k} outside 1..{s}")
    n = np.arange(1, s + 1)
    w = (2.0 / (s + 1)) * _sin_multiple(n, s) * _sin_multiple(k * n, s)
    return complex(np.sum(w * np.exp(1j * t * _mode_energies(s))))


def amplitude_profile(t, s: int) -> np.ndarray:
    """Amplitudes c(t, k; s) for k = 1..s.

    Scalar ``t`` gives shape ``(s,)``; an array of times gives ``(len(t), s)``.
    """
    if s < 1:
        raise ValueError("s must be >= 1")
    ts = np.asarray(t, dtype=float)
    phases = np.exp(1j * np.multiply.outer(ts, _mode_energies(s)))
    return phases @ _mode_weights(s).T


def site_probabilities(t, s: int) -> np.ndarray:
    return np.abs(amplitude_profile(t, s)) ** 2
