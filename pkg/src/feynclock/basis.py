"""Single-excitation state space of a clocked program line.

Basis states are products ``|register r> (x) |control c> (x) |Q = site>``
with exactly one program-line spin up.  Sites are 1-based in every public
function; flat indices are 0-based and ordered register-major::

    index = r * (n_control * n_sites) + control_index * n_sites + (site - 1)

Control ordering is fixed: ``PLUS`` (rho_3 = +1) is index 0, ``MINUS``
(rho_3 = -1) is index 1.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field
from typing import Iterator, Sequence

import numpy as np

NORM_TOL = 1e-10
INPUT_NORM_TOL = 1e-8
UNITARY_TOL = 1e-12

TOPOLOGIES = ("sequential", "telomeric", "double_trap")


class Control(enum.Enum):
    PLUS = 0
    MINUS = 1
    NONE = -1

    @classmethod
    def parse(cls, value: "Control | str") -> "Control":
        if isinstance(value, Control):
            return value
        return cls[str(value).upper()]


@dataclass(frozen=True)
class BasisLabel:
    register_index: int
    control: Control
    site: int


@dataclass(frozen=True)
class Basis:
    """Enumeration of the N3 = 1 sector for given register/control/site sizes."""

    d_reg: int
    n_control: int
    n_sites: int

    def __post_init__(self):
        if self.d_reg < 1 or self.n_sites < 1:
            raise ValueError("d_reg and n_sites must be positive")
        if self.n_control not in (1, 2):
            raise ValueError("n_control must be 1 or 2")

    @property
    def dim(self) -> int:
        return self.d_reg * self.n_control * self.n_sites

    @property
    def has_control(self) -> bool:
        return self.n_control == 2

    def index(self, label: BasisLabel) -> int:
        if not 0 <= label.register_index < self.d_reg:
            raise IndexError(f"register index {label.register_index} out of range")
        if not 1 <= label.site <= self.n_sites:
            raise IndexError(f"site {label.site} out of range 1..{self.n_sites}")
        if self.has_control:
            if label.control is Control.NONE:
                raise ValueError("basis has a control q-bit; control=NONE is invalid")
            c = label.control.value
        else:
            if label.control is not Control.NONE:
                raise ValueError("basis has no control q-bit")
            c = 0
        return (label.register_index * self.n_control + c) * self.n_sites + label.site - 1

    def label(self, index: int) -> BasisLabel:
        if not 0 <= index < self.dim:
            raise IndexError(f"flat index {index} out of range")
        rc, site0 = divmod(index, self.n_sites)
        r, c = divmod(rc, self.n_control)
        control = Control(c) if self.has_control else Control.NONE
        return BasisLabel(r, control, site0 + 1)

    def labels(self) -> Iterator[BasisLabel]:
        for i in range(self.dim):
            yield self.label(i)

    def controls(self) -> tuple[Control, ...]:
        return (Control.PLUS, Control.MINUS) if self.has_control else (Control.NONE,)

    def mask(self, sites: tuple[int, int] | None = None, control=None,
             register_index: int | None = None) -> np.ndarray:
        """Boolean mask over flat indices selecting the given labels."""
        grid = np.ones((self.d_reg, self.n_control, self.n_sites), dtype=bool)
        if sites is not None:
            a, b = sites
            if not (1 <= a <= b <= self.n_sites):
                raise ValueError(f"invalid site range [{a}, {b}] for {self.n_sites} sites")
            sel = np.zeros(self.n_sites, dtype=bool)
            sel[a - 1:b] = True
            grid &= sel[None, None, :]
        if control is not None:
            control = Control.parse(control)
            if not self.has_control:
                raise ValueError("control filter given but basis has no control q-bit")
            if control is Control.NONE:
                raise ValueError("control filter must be PLUS or MINUS")
            sel = np.zeros(self.n_control, dtype=bool)
            sel[control.value] = True
            grid &= sel[None, :, None]
        if register_index is not None:
            sel = np.zeros(self.d_reg, dtype=bool)
            sel[register_index] = True
            grid &= sel[:, None, None]
        return grid.reshape(-1)


@dataclass(frozen=True)
class ProgramLineSpec:
    """Declarative description of a program line.

    ``s`` is the active length, ``delta`` the telomere length (allocated twice
    for the double trap).  ``register_unitaries`` holds A_1..A_{s-1}; ``None``
    means identity everywhere.
    """

    s: int
    delta: int = 0
    topology: str = "sequential"
    d_reg: int = 1
    register_unitaries: tuple[np.ndarray, ...] | None = field(default=None, repr=False)

    def __post_init__(self):
        if self.s < 1:
            raise ValueError("s must be >= 1")
        if self.delta < 0:
            raise ValueError("delta must be >= 0")
        if self.d_reg < 1:
            raise ValueError("d_reg must be >= 1")
        if self.topology not in TOPOLOGIES:
            raise ValueError(f"unknown topology {self.topology!r}")
        if self.topology != "sequential" and self.delta < 1:
            raise ValueError(f"{self.topology} topology requires delta >= 1")
        if self.register_unitaries is not None:
            mats = tuple(np.asarray(a, dtype=complex) for a in self.register_unitaries)
            if len(mats) != self.s - 1:
                raise ValueError(f"expected {self.s - 1} register unitaries, got {len(mats)}")
            eye = np.eye(self.d_reg)
            for j, a in enumerate(mats, start=1):
                if a.shape != (self.d_reg, self.d_reg):
                    raise ValueError(f"A_{j} has shape {a.shape}, expected {(self.d_reg,) * 2}")
                if np.abs(a.conj().T @ a - eye).max() > UNITARY_TOL:
                    raise ValueError(f"A_{j} is not unitary")
                a.setflags(write=False)
            object.__setattr__(self, "register_unitaries", mats)

    @property
    def has_control(self) -> bool:
        return self.topology != "sequential"

    @property
    def n_sites(self) -> int:
        if self.topology == "sequential":
            return self.s
        if self.topology == "telomeric":
            return self.s + self.delta
        return self.s + 2 * self.delta

    @property
    def basis(self) -> Basis:
        return Basis(self.d_reg, 2 if self.has_control else 1, self.n_sites)

    def unitary(self, j: int) -> np.ndarray:
        """Register operator A_j applied on the hop j -> j+1 (1 <= j < s)."""
        if not 1 <= j < self.s:
            raise IndexError(f"A_{j} undefined for s={self.s}")
        if self.register_unitaries is None:
            return np.eye(self.d_reg, dtype=complex)
        return self.register_unitaries[j - 1]


@dataclass(frozen=True, eq=False)
class CursorState:
    amplitudes: np.ndarray
    basis: Basis

    def __post_init__(self):
        amps = np.array(self.amplitudes, dtype=complex)
        if amps.shape != (self.basis.dim,):
            raise ValueError(f"amplitude vector has shape {amps.shape}, basis dim is {self.basis.dim}")
        norm = np.linalg.norm(amps)
        if abs(norm - 1.0) > NORM_TOL:
            raise ValueError(f"state norm {norm!r} differs from 1 by more than {NORM_TOL}")
        amps.setflags(write=False)
        object.__setattr__(self, "amplitudes", amps)

    def probabilities(self) -> np.ndarray:
        return np.abs(self.amplitudes) ** 2

    def register_state(self, site: int, control=None) -> np.ndarray:
        """Unnormalised register amplitudes with the cursor at ``site``."""
        grid = self.amplitudes.reshape(self.basis.d_reg, self.basis.n_control, self.basis.n_sites)
        if not 1 <= site <= self.basis.n_sites:
            raise ValueError(f"site {site} out of range")
        if control is None:
            if self.basis.has_control:
                raise ValueError("control must be given when the basis has a control q-bit")
            c = 0
        else:
            c = Control.parse(control).value
        return grid[:, c, site - 1].copy()


def _control_vector(control0) -> np.ndarray | None:
    if control0 is None or control0 is Control.NONE or (
            isinstance(control0, str) and control0.lower() == "none"):
        return None
    if isinstance(control0, (Control, str)):
        c = Control.parse(control0)
        vec = np.zeros(2, dtype=complex)
        vec[c.value] = 1.0
        return vec
    vec = np.asarray(control0, dtype=complex)
    if vec.shape != (2,):
        raise ValueError("control superposition must be a pair (alpha, beta)")
    return vec


def superposition(alpha: complex, beta: complex) -> np.ndarray:
    """Control state alpha|plus> + beta|minus>."""
    return np.array([alpha, beta], dtype=complex)


def initial_state(spec: ProgramLineSpec, register0: Sequence[complex] | np.ndarray,
                  control0=None) -> CursorState:
    """Product state ``|register0> (x) |control0> (x) |Q=1>``.

    ``control0`` is a :class:`Control`, its name, a pair ``(alpha, beta)``
    from :func:`superposition`, or ``None`` for lines without a control q-bit.
    """
    reg = np.asarray(register0, dtype=complex).reshape(-1)
    if reg.shape != (spec.d_reg,):
        raise ValueError(f"register0 has length {reg.size}, expected {spec.d_reg}")
    rn = np.linalg.norm(reg)
    if abs(rn - 1.0) > INPUT_NORM_TOL:
        raise ValueError(f"register0 not normalised (norm {rn})")
    ctrl = _control_vector(control0)
    if spec.has_control and ctrl is None:
        raise ValueError(f"{spec.topology} line needs a control initial state")
    if not spec.has_control and ctrl is not None:
        raise ValueError("sequential line has no control q-bit")
    if ctrl is None:
        ctrl = np.ones(1, dtype=complex)
    else:
        cn = np.linalg.norm(ctrl)
        if abs(cn - 1.0) > INPUT_NORM_TOL:
            raise ValueError(f"control state not normalised (norm {cn})")
        ctrl = ctrl / cn
    site = np.zeros(spec.n_sites, dtype=complex)
    site[0] = 1.0
    amps = np.kron(np.kron(reg / rn, ctrl), site)
    return CursorState(amps, spec.basis)


def prob_of(state: CursorState, site_range: tuple[int, int], control_filter=None) -> float:
    """Born probability that Q lies in ``site_range`` (inclusive, 1-based)."""
    mask = state.basis.mask(sites=tuple(site_range), control=control_filter)
    return float(np.sum(np.abs(state.amplitudes[mask]) ** 2))
