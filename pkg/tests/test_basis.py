import numpy as np
import pytest
from hypothesis import given, strategies as st

from feynclock.basis import (Basis, BasisLabel, Control, CursorState, ProgramLineSpec,
                             initial_state, prob_of, superposition)

bases = st.builds(Basis, st.integers(1, 4), st.sampled_from([1, 2]), st.integers(1, 9))


@given(bases, st.data())
def test_label_index_roundtrip(basis, data):
    i = data.draw(st.integers(0, basis.dim - 1))
    lab = basis.label(i)
    assert basis.index(lab) == i
    assert 1 <= lab.site <= basis.n_sites


def test_flat_index_layout():
    b = Basis(d_reg=3, n_control=2, n_sites=5)
    assert b.index(BasisLabel(2, Control.MINUS, 4)) == 2 * 10 + 1 * 5 + 3
    assert b.label(0) == BasisLabel(0, Control.PLUS, 1)
    assert Basis(1, 1, 4).label(3) == BasisLabel(0, Control.NONE, 4)


def test_index_rejects_bad_labels():
    b = Basis(1, 2, 3)
    with pytest.raises(IndexError):
        b.index(BasisLabel(0, Control.PLUS, 0))
    with pytest.raises(ValueError):
        b.index(BasisLabel(0, Control.NONE, 1))
    with pytest.raises(ValueError):
        Basis(1, 1, 3).index(BasisLabel(0, Control.PLUS, 1))


def test_spec_sizes():
    assert ProgramLineSpec(20).n_sites == 20
    assert ProgramLineSpec(20, 10, "telomeric").basis.dim == 60
    assert ProgramLineSpec(20, 10, "double_trap").n_sites == 40


@pytest.mark.parametrize("kwargs", [
    dict(s=0),
    dict(s=3, delta=-1),
    dict(s=3, topology="telomeric"),
    dict(s=3, delta=0, topology="double_trap"),
    dict(s=3, topology="ring"),
])
def test_spec_rejects_invalid(kwargs):
    with pytest.raises(ValueError):
        ProgramLineSpec(**kwargs)


def test_spec_rejects_non_unitary():
    with pytest.raises(ValueError, match="unitary"):
        ProgramLineSpec(3, d_reg=2, register_unitaries=[np.eye(2), np.diag([1, 1.001])])
    with pytest.raises(ValueError):
        ProgramLineSpec(3, d_reg=2, register_unitaries=[np.eye(2)])


def test_initial_state_sequential():
    psi = initial_state(ProgramLineSpec(20), [1])
    expected = np.zeros(20)
    expected[0] = 1
    np.testing.assert_array_equal(psi.amplitudes, expected)


def test_initial_state_fig2_plus():
    spec = ProgramLineSpec(20, 10, "telomeric")
    psi = initial_state(spec, [1], Control.PLUS)
    i = spec.basis.index(BasisLabel(0, Control.PLUS, 1))
    assert psi.amplitudes[i] == 1
    assert np.count_nonzero(psi.amplitudes) == 1


def test_initial_state_superposition_norm():
    spec = ProgramLineSpec(5, 2, "double_trap", d_reg=2)
    psi = initial_state(spec, [0.6, 0.8j], superposition(2 ** -0.5, 2 ** -0.5))
    assert abs(np.linalg.norm(psi.amplitudes) - 1) < 1e-12
    assert prob_of(psi, (1, 1), Control.PLUS) == pytest.approx(0.5, abs=1e-12)


def test_initial_state_errors():
    spec = ProgramLineSpec(5, 2, "telomeric")
    with pytest.raises(ValueError):
        initial_state(spec, [1, 0], "plus")
    with pytest.raises(ValueError):
        initial_state(spec, [1])
    with pytest.raises(ValueError):
        initial_state(ProgramLineSpec(5), [1], "plus")
    with pytest.raises(ValueError):
        initial_state(ProgramLineSpec(5), [1.01])
    with pytest.raises(ValueError):
        initial_state(spec, [1], (1, 1))


def test_cursor_state_requires_unit_norm():
    with pytest.raises(ValueError):
        CursorState(np.array([1, 1e-4]), Basis(1, 1, 2))
    psi = CursorState(np.array([0.6, 0.8]), Basis(1, 1, 2))
    with pytest.raises(ValueError):
        psi.amplitudes[0] = 0


def test_prob_of_initial():
    spec = ProgramLineSpec(7, 3, "telomeric")
    psi = initial_state(spec, [1], "minus")
    assert prob_of(psi, (1, 1)) == 1.0
    assert prob_of(psi, (2, 10)) == 0.0
    assert prob_of(psi, (1, 1), "plus") == 0.0
    with pytest.raises(ValueError):
        prob_of(psi, (3, 2))
    with pytest.raises(ValueError):
        prob_of(psi, (0, 4))


@given(st.integers(1, 3), st.integers(1, 8), st.booleans(), st.integers(0, 2 ** 32 - 1))
def test_full_range_probability_is_one(d_reg, n_sites, control, seed):
    basis = Basis(d_reg, 2 if control else 1, n_sites)
    rng = np.random.default_rng(seed)
    v = rng.normal(size=basis.dim) + 1j * rng.normal(size=basis.dim)
    psi = CursorState(v / np.linalg.norm(v), basis)
    assert abs(prob_of(psi, (1, n_sites)) - 1) <= 1e-12


def test_register_state_slice():
    spec = ProgramLineSpec(3, d_reg=2)
    psi = initial_state(spec, [0.6, 0.8])
    np.testing.assert_allclose(psi.register_state(1), [0.6, 0.8])
    np.testing.assert_allclose(psi.register_state(2), [0, 0])
