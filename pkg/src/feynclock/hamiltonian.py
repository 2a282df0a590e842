"""Program-line Hamiltonians restricted to the single-excitation sector.

Spin conventions, used everywhere in the package: local spin basis is
ordered (up, down); tau_+ = |up><down| and tau_- = |down><up|, i.e.
tau_pm = (tau_1 pm i tau_2) / 2.  The control q-bit rho uses the same
matrices with PLUS = up = rho_3 eigenvalue +1.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property
from pathlib import Path

import numpy as np
import scipy.sparse as sp

from .basis import Basis, BasisLabel, Control, ProgramLineSpec

HOP = -0.5
MAX_ORACLE_SITES = 12


class HermitianOperator:
    """Sparse Hermitian matrix on a sector basis.

    Only the upper triangle and the (real) diagonal are stored; the lower
    triangle is the exact conjugate mirror, so the hermiticity residual is
    identically zero.
    """

    def __init__(self, basis: Basis, upper: dict[tuple[int, int], complex] | None = None,
                 diagonal: np.ndarray | None = None):
        self.basis = basis
        n = basis.dim
        self._upper = {}
        for (i, j), v in (upper or {}).items():
            if not (0 <= i < j < n):
                raise ValueError(f"upper entry ({i}, {j}) not strictly upper triangular")
            if v != 0:
                self._upper[(i, j)] = complex(v)
        diag = np.zeros(n) if diagonal is None else np.asarray(diagonal)
        if diag.shape != (n,):
            raise ValueError("diagonal has wrong length")
        if np.iscomplexobj(diag):
            if np.any(diag.imag != 0):
                raise ValueError("diagonal of a Hermitian operator must be real")
            diag = diag.real
        self._diag = diag.astype(float)
        self._diag.setflags(write=False)

    @classmethod
    def from_transitions(cls, basis: Basis, transitions) -> "HermitianOperator":
        """Build from ``(source, target, amplitude)`` meaning <target|H|source>.

        The Hermitian-conjugate transition is implied and must not be listed.
        """
        upper: dict[tuple[int, int], complex] = {}
        diag = np.zeros(basis.dim)
        for src, dst, amp in transitions:
            a = basis.index(src) if isinstance(src, BasisLabel) else int(src)
            b = basis.index(dst) if isinstance(dst, BasisLabel) else int(dst)
            if a == b:
                raise ValueError("diagonal terms are not transitions")
            if b < a:
                key, val = (b, a), complex(amp)
            else:
                key, val = (a, b), complex(amp).conjugate()
            upper[key] = upper.get(key, 0) + val
        return cls(basis, upper, diag)

    @property
    def dimension(self) -> int:
        return self.basis.dim

    @property
    def diagonal(self) -> np.ndarray:
        return self._diag

    @property
    def upper_entries(self) -> dict[tuple[int, int], complex]:
        return dict(self._upper)

    def entry(self, row, col) -> complex:
        """Matrix element <row|H|col>; labels or flat indices."""
        i = self.basis.index(row) if isinstance(row, BasisLabel) else int(row)
        j = self.basis.index(col) if isinstance(col, BasisLabel) else int(col)
        if i == j:
            return complex(self._diag[i])
        if i < j:
            return self._upper.get((i, j), 0j)
        return self._upper.get((j, i), 0j).conjugate()

    @cached_property
    def matrix(self) -> sp.csr_matrix:
        n = self.dimension
        if self._upper:
            rows, cols = np.array(list(self._upper), dtype=int).T
            vals = np.fromiter(self._upper.values(), dtype=complex, count=len(self._upper))
        else:
            rows = cols = np.zeros(0, dtype=int)
            vals = np.zeros(0, dtype=complex)
        up = sp.coo_matrix((vals, (rows, cols)), shape=(n, n))
        m = up + up.conj().T + sp.diags(self._diag.astype(complex), format="coo")
        return sp.csr_matrix(m)

    def to_dense(self) -> np.ndarray:
        return self.matrix.toarray()

    def hermiticity_residual(self) -> float:
        m = self.matrix
        diff = m - m.conj().T
        return float(np.abs(diff.data).max()) if diff.nnz else 0.0

    @cached_property
    def eigh(self) -> tuple[np.ndarray, np.ndarray]:
        """Cached dense eigendecomposition (eigenvalues, eigenvectors)."""
        w, v = np.linalg.eigh(self.to_dense())
        w.setflags(write=False)
        v.setflags(write=False)
        return w, v

    def _check_compatible(self, other: "HermitianOperator"):
        if other.basis != self.basis:
            raise ValueError("operators act on different bases")

    def __add__(self, other: "HermitianOperator") -> "HermitianOperator":
        self._check_compatible(other)
        upper = dict(self._upper)
        for k, v in other._upper.items():
            upper[k] = upper.get(k, 0) + v
        return HermitianOperator(self.basis, upper, self._diag + other._diag)

    def scaled(self, factor: float) -> "HermitianOperator":
        factor = float(factor)
        return HermitianOperator(self.basis, {k: factor * v for k, v in self._upper.items()},
                                 factor * self._diag)

    def __eq__(self, other):
        if not isinstance(other, HermitianOperator):
            return NotImplemented
        return (self.basis == other.basis and self._upper == other._upper
                and np.array_equal(self._diag, other._diag))

    __hash__ = object.__hash__

    def __repr__(self):
        return f"HermitianOperator(dim={self.dimension}, nnz_upper={len(self._upper)})"

    def export_coo(self, path) -> None:
        """Write every nonzero entry as ``row col re im``, one per line.

        Indices are 0-based flat indices; both triangles are written.
        """
        m = sp.coo_matrix(self.matrix)
        order = np.lexsort((m.col, m.row))
        with open(path, "w") as fh:
            fh.write(f"# dim {self.dimension} d_reg {self.basis.d_reg} "
                     f"n_control {self.basis.n_control} n_sites {self.basis.n_sites}\n")
            for k in order:
                v = m.data[k]
                fh.write(f"{m.row[k]} {m.col[k]} {v.real:.17g} {v.imag:.17g}\n")

    @classmethod
    def load_coo(cls, path) -> "HermitianOperator":
        lines = Path(path).read_text().splitlines()
        head = lines[0].lstrip("#").split()
        meta = dict(zip(head[::2], map(int, head[1::2])))
        basis = Basis(meta["d_reg"], meta["n_control"], meta["n_sites"])
        upper, diag = {}, np.zeros(basis.dim)
        for line in lines[1:]:
            if not line.strip() or line.startswith("#"):
                continue
            i, j, re, im = line.split()
            i, j, v = int(i), int(j), complex(float(re), float(im))
            if i == j:
                diag[i] = v.real
            elif i < j:
                upper[(i, j)] = v
        return cls(basis, upper, diag)


def _register_hops(spec: ProgramLineSpec, j: int, control: Control, target_site: int | None = None):
    """Transitions for the hop j -> target (default j+1) carrying A_j."""
    a = spec.unitary(j)
    dst_site = j + 1 if target_site is None else target_site
    for r in range(spec.d_reg):
        for r2 in np.flatnonzero(a[:, r]):
            yield (BasisLabel(r, control, j), BasisLabel(int(r2), control, dst_site),
                   HOP * a[r2, r])


def _plain_hops(spec: ProgramLineSpec, first: int, last: int, control: Control):
    """Register-diagonal hops j -> j+1 for first <= j < last."""
    for j in range(first, last):
        for r in range(spec.d_reg):
            yield BasisLabel(r, control, j), BasisLabel(r, control, j + 1), HOP


def _active_hops(spec: ProgramLineSpec):
    for c in spec.basis.controls():
        for j in range(1, spec.s):
            yield from _register_hops(spec, j, c)


def _controlled_jump(spec: ProgramLineSpec, src_control: Control, dst_control: Control,
                     dst_site: int):
    for r in range(spec.d_reg):
        yield (BasisLabel(r, src_control, spec.s), BasisLabel(r, dst_control, dst_site), HOP)


def build_sequential(spec: ProgramLineSpec) -> HermitianOperator:
    if spec.topology != "sequential":
        raise ValueError("build_sequential needs a sequential program line")
    return HermitianOperator.from_transitions(spec.basis, _active_hops(spec))


def build_telomeric(spec: ProgramLineSpec) -> HermitianOperator:
    """Active chain plus a telomere reachable only through rho_- at s -> s+1."""
    if spec.topology != "telomeric":
        raise ValueError("build_telomeric needs a telomeric program line")
    s, d = spec.s, spec.delta

    def transitions():
        yield from _active_hops(spec)
        yield from _controlled_jump(spec, Control.PLUS, Control.MINUS, s + 1)
        for c in spec.basis.controls():
            yield from _plain_hops(spec, s + 1, s + d, c)

    return HermitianOperator.from_transitions(spec.basis, transitions())


def build_double_trap(spec: ProgramLineSpec) -> HermitianOperator:
    """Fork at site s: PLUS enters branch 1 (s+1..s+d), MINUS enters branch 2."""
    if spec.topology != "double_trap":
        raise ValueError("build_double_trap needs a double_trap program line")
    s, d = spec.s, spec.delta

    def transitions():
        yield from _active_hops(spec)
        yield from _controlled_jump(spec, Control.PLUS, Control.MINUS, s + 1)
        yield from _controlled_jump(spec, Control.MINUS, Control.PLUS, s + d + 1)
        for c in spec.basis.controls():
            yield from _plain_hops(spec, s + 1, s + d, c)
            yield from _plain_hops(spec, s + d + 1, s + 2 * d, c)

    return HermitianOperator.from_transitions(spec.basis, transitions())


BUILDERS = {
    "sequential": build_sequential,
    "telomeric": build_telomeric,
    "double_trap": build_double_trap,
}


def build(spec: ProgramLineSpec) -> HermitianOperator:
    return BUILDERS[spec.topology](spec)


def control_flip(basis: Basis) -> HermitianOperator:
    """rho_1 acting on the control factor, identity elsewhere."""
    if not basis.has_control:
        raise ValueError("basis has no control q-bit")
    transitions = (
        (BasisLabel(r, Control.PLUS, k), BasisLabel(r, Control.MINUS, k), 1.0)
        for r in range(basis.d_reg) for k in range(1, basis.n_sites + 1)
    )
    return HermitianOperator.from_transitions(basis, transitions)


# ---------------------------------------------------------------------------
# full spin-space oracle

_RAISE = sp.csr_matrix(np.array([[0, 1], [0, 0]], dtype=complex))
_LOWER = sp.csr_matrix(np.array([[0, 0], [1, 0]], dtype=complex))
_NUP = sp.csr_matrix(np.array([[1, 0], [0, 0]], dtype=complex))


@dataclass(frozen=True)
class SpinOracle:
    """Hamiltonian on register (x) control (x) 2^n_sites spins.

    ``isometry`` maps sector flat indices (in ``basis`` order) to full-space
    vectors, so ``isometry.H @ hamiltonian @ isometry`` is the sector block.
    """

    hamiltonian: sp.csr_matrix
    number_operator: sp.csr_matrix
    isometry: sp.csr_matrix
    basis: Basis

    @property
    def projector(self) -> sp.csr_matrix:
        return sp.csr_matrix(self.isometry @ self.isometry.conj().T)

    def restricted(self) -> np.ndarray:
        v = self.isometry
        return (v.conj().T @ self.hamiltonian @ v).toarray()

    def commutator_norm(self) -> float:
        c = self.hamiltonian @ self.number_operator - self.number_operator @ self.hamiltonian
        c = sp.csr_matrix(c)
        c.eliminate_zeros()
        return float(np.abs(c.data).max()) if c.nnz else 0.0


def full_spin_oracle(spec: ProgramLineSpec) -> SpinOracle:
    """Build H from raw tau_pm / rho_pm on the full tensor-product space."""
    n = spec.n_sites
    if n > MAX_ORACLE_SITES:
        raise ValueError(f"full spin oracle limited to {MAX_ORACLE_SITES} sites, got {n}")
    basis = spec.basis
    d, nc = spec.d_reg, basis.n_control
    eye2 = sp.identity(2, dtype=complex, format="csr")

    def embed(register=None, control=None, sites=None):
        factors = [sp.csr_matrix(register) if register is not None
                   else sp.identity(d, dtype=complex, format="csr")]
        if nc == 2:
            factors.append(control if control is not None else eye2)
        for k in range(1, n + 1):
            factors.append((sites or {}).get(k, eye2))
        out = factors[0]
        for f in factors[1:]:
            out = sp.kron(out, f, format="csr")
        return out

    def hop(j, k, register=None, control=None):
        # tau_+(k) X tau_-(j) + h.c.
        term = embed(register=register, control=control, sites={k: _RAISE, j: _LOWER})
        return term + term.conj().T

    h = None

    def add(term):
        nonlocal h
        h = term if h is None else h + term

    for j in range(1, spec.s):
        add(HOP * hop(j, j + 1, register=spec.unitary(j)))
    s, dl = spec.s, spec.delta
    if spec.topology in ("telomeric", "double_trap"):
        add(HOP * hop(s, s + 1, control=_LOWER))
        for j in range(s + 1, s + dl):
            add(HOP * hop(j, j + 1))
    if spec.topology == "double_trap":
        add(HOP * hop(s, s + dl + 1, control=_RAISE))
        for j in range(s + dl + 1, s + 2 * dl):
            add(HOP * hop(j, j + 1))
    full_dim = d * nc * 2 ** n
    if h is None:
        h = sp.csr_matrix((full_dim, full_dim), dtype=complex)

    n3 = None
    for k in range(1, n + 1):
        term = embed(sites={k: _NUP})
        n3 = term if n3 is None else n3 + term

    rows = []
    all_down = 2 ** n - 1
    for i in range(basis.dim):
        lab = basis.label(i)
        c = lab.control.value if basis.has_control else 0
        spins = all_down - 2 ** (n - lab.site)
        rows.append((lab.register_index * nc + c) * 2 ** n + spins)
    iso = sp.csr_matrix((np.ones(basis.dim, dtype=complex), (rows, np.arange(basis.dim))),
                        shape=(full_dim, basis.dim))
    return SpinOracle(sp.csr_matrix(h), sp.csr_matrix(n3), iso, basis)
