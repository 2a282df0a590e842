import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from scipy.stats import unitary_group

from feynclock.basis import BasisLabel, Control, ProgramLineSpec, initial_state
from feynclock.hamiltonian import (HermitianOperator, build, build_double_trap, build_sequential,
                                   build_telomeric, control_flip, full_spin_oracle)
from feynclock.propagator import evolve_const

P, M, N = Control.PLUS, Control.MINUS, Control.NONE
X = np.array([[0, 1], [1, 0]], dtype=complex)


def test_two_site_matrix():
    np.testing.assert_array_equal(build_sequential(ProgramLineSpec(2)).to_dense(),
                                  [[0, -0.5], [-0.5, 0]])


def test_three_site_tridiagonal():
    h = build_sequential(ProgramLineSpec(3)).to_dense()
    np.testing.assert_array_equal(h, -0.5 * (np.eye(3, k=1) + np.eye(3, k=-1)))


def test_register_unitary_on_hop():
    spec = ProgramLineSpec(3, d_reg=2, register_unitaries=[X, np.eye(2)])
    H = build_sequential(spec)
    b = spec.basis
    for r in range(2):
        v = np.zeros(6, dtype=complex)
        v[b.index(BasisLabel(r, N, 1))] = 1
        out = H.matrix @ v
        expected = np.zeros(6, dtype=complex)
        expected[b.index(BasisLabel(1 - r, N, 2))] = -0.5
        np.testing.assert_array_equal(out, expected)


def test_telomeric_elements():
    spec = ProgramLineSpec(20, 10, "telomeric")
    H = build_telomeric(spec)
    assert H.entry(BasisLabel(0, M, 21), BasisLabel(0, P, 20)) == -0.5
    assert H.entry(BasisLabel(0, P, 21), BasisLabel(0, P, 20)) == 0
    assert H.entry(BasisLabel(0, P, 20), BasisLabel(0, M, 21)) == -0.5
    assert H.entry(BasisLabel(0, M, 21), BasisLabel(0, M, 20)) == 0
    assert H.hermiticity_residual() == 0.0


def test_telomeric_support():
    spec = ProgramLineSpec(20, 10, "telomeric")
    H = build_telomeric(spec)
    times = np.arange(0, 120, 0.5)
    res = evolve_const(H, initial_state(spec, [1], "minus"), times)
    assert res.probability(spec.basis.mask(sites=(21, 30))).max() == 0.0
    res = evolve_const(H, initial_state(spec, [1], "plus"), times)
    assert res.probability(spec.basis.mask(sites=(21, 30))).max() > 0.5


def test_double_trap_elements():
    s, d = 6, 3
    H = build_double_trap(ProgramLineSpec(s, d, "double_trap"))
    assert H.entry(BasisLabel(0, M, s + 1), BasisLabel(0, P, s)) == -0.5
    assert H.entry(BasisLabel(0, P, s + d + 1), BasisLabel(0, M, s)) == -0.5
    assert H.entry(BasisLabel(0, P, s + d + 1), BasisLabel(0, P, s)) == 0
    for c1 in (P, M):
        for c2 in (P, M):
            assert H.entry(BasisLabel(0, c1, s + d), BasisLabel(0, c2, s + d + 1)) == 0


def test_double_trap_branch2_unreachable_from_plus():
    spec = ProgramLineSpec(20, 10, "double_trap")
    res = evolve_const(build(spec), initial_state(spec, [1], "plus"), np.arange(0, 160, 0.25))
    assert res.probability(spec.basis.mask(sites=(31, 40))).max() < 1e-20


@pytest.mark.parametrize("spec", [
    ProgramLineSpec(1),
    ProgramLineSpec(9),
    ProgramLineSpec(4, 3, "telomeric", d_reg=2),
    ProgramLineSpec(4, 2, "double_trap", d_reg=3),
])
def test_hermitian_zero_residual(spec):
    H = build(spec)
    assert H.hermiticity_residual() == 0.0
    dense = H.to_dense()
    assert np.array_equal(dense, dense.conj().T)


@pytest.mark.parametrize("s", [1, 2, 5, 20, 33])
def test_spectrum_matches_modes(s):
    w = np.linalg.eigvalsh(build_sequential(ProgramLineSpec(s)).to_dense())
    expected = np.sort(-np.cos(np.arange(1, s + 1) * np.pi / (s + 1)))
    np.testing.assert_allclose(w, expected, atol=1e-10)


@settings(max_examples=25, deadline=None)
@given(st.integers(1, 6), st.integers(1, 4), st.sampled_from(["sequential", "telomeric", "double_trap"]),
       st.integers(1, 3), st.integers(0, 2 ** 31))
def test_row_sparsity(s, delta, topology, d_reg, seed):
    unitaries = [unitary_group.rvs(d_reg, random_state=seed + j) if d_reg > 1 else np.eye(1)
                 for j in range(s - 1)]
    spec = ProgramLineSpec(s, delta if topology != "sequential" else 0, topology, d_reg, unitaries)
    H = build(spec)
    assert H.hermiticity_residual() == 0.0
    counts = np.diff(H.matrix.indptr)
    limit = 3 * d_reg if topology == "double_trap" else 2 * d_reg
    assert counts.max(initial=0) <= limit


def test_non_unitary_rejected():
    with pytest.raises(ValueError):
        ProgramLineSpec(2, d_reg=2, register_unitaries=[np.ones((2, 2))])


def test_builder_topology_mismatch():
    with pytest.raises(ValueError):
        build_sequential(ProgramLineSpec(3, 2, "telomeric"))
    with pytest.raises(ValueError):
        build_telomeric(ProgramLineSpec(3))
    with pytest.raises(ValueError):
        build_double_trap(ProgramLineSpec(3, 2, "telomeric"))


def test_control_flip_is_pauli_x_on_control():
    spec = ProgramLineSpec(2, 1, "telomeric")
    F = control_flip(spec.basis).to_dense()
    np.testing.assert_array_equal(F @ F, np.eye(6))
    assert F[spec.basis.index(BasisLabel(0, M, 2)), spec.basis.index(BasisLabel(0, P, 2))] == 1
    with pytest.raises(ValueError):
        control_flip(ProgramLineSpec(3).basis)


def test_operator_arithmetic():
    spec = ProgramLineSpec(3, 1, "telomeric")
    H = build(spec)
    F = control_flip(spec.basis)
    np.testing.assert_array_equal((H + F.scaled(2.0)).to_dense(), H.to_dense() + 2 * F.to_dense())
    assert H == build(spec)
    with pytest.raises(ValueError):
        H + build_sequential(ProgramLineSpec(3))
    with pytest.raises(ValueError):
        HermitianOperator(spec.basis, diagonal=np.full(spec.basis.dim, 1j))


def test_coo_roundtrip(tmp_path):
    spec = ProgramLineSpec(3, 2, "double_trap", d_reg=2,
                           register_unitaries=[X, np.diag([1, 1j])])
    H = build(spec)
    path = tmp_path / "h.coo"
    H.export_coo(path)
    lines = path.read_text().splitlines()
    assert lines[0].startswith("#")
    assert len(lines) - 1 == H.matrix.nnz
    assert all(len(line.split()) == 4 for line in lines[1:])
    assert HermitianOperator.load_coo(path) == H


# full spin-space oracle


@pytest.mark.parametrize("s", [1, 2, 3, 4])
def test_oracle_sequential(s):
    spec = ProgramLineSpec(s)
    oracle = full_spin_oracle(spec)
    assert oracle.commutator_norm() == 0.0
    np.testing.assert_array_equal(oracle.restricted(), build_sequential(spec).to_dense())


def test_oracle_telomeric():
    spec = ProgramLineSpec(3, 2, "telomeric")
    oracle = full_spin_oracle(spec)
    assert oracle.hamiltonian.shape == (2 ** 5 * 2, 2 ** 5 * 2)
    assert oracle.commutator_norm() == 0.0
    np.testing.assert_array_equal(oracle.restricted(), build_telomeric(spec).to_dense())


def test_oracle_double_trap_with_register():
    spec = ProgramLineSpec(3, 2, "double_trap", d_reg=2,
                           register_unitaries=[X, unitary_group.rvs(2, random_state=3)])
    oracle = full_spin_oracle(spec)
    assert oracle.commutator_norm() == 0.0
    np.testing.assert_array_equal(oracle.restricted(), build_double_trap(spec).to_dense())


def test_oracle_projector_is_sector():
    spec = ProgramLineSpec(4)
    oracle = full_spin_oracle(spec)
    proj = oracle.projector.toarray()
    np.testing.assert_array_equal(proj @ proj, proj)
    n3 = oracle.number_operator.toarray()
    np.testing.assert_array_equal(n3 @ proj, proj)
    assert np.trace(proj).real == 4


def test_oracle_size_limit():
    with pytest.raises(ValueError):
        full_spin_oracle(ProgramLineSpec(13))
