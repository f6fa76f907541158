import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from chshbound.bell import (
    BlochVector,
    MeasurementSetting,
    NotUnitVector,
    bell_operator,
    canonical_eigensystem,
    canonical_settings,
    canonical_W,
    chsh_value,
    commutator_term,
    max_violating_state,
    random_setting,
    random_vertical_setting,
    tsirelson_rhs,
)
from chshbound.linalg import I4, herm_eig, projector
from chshbound.states import PureState, lambda_state, maximally_mixed, random_density, random_separable

SQ2 = math.sqrt(2)
seeds = st.integers(min_value=0, max_value=2**32 - 1)


def test_canonical_settings_are_vertical():
    s = canonical_settings()
    assert s.is_vertical()
    assert np.max(np.abs(bell_operator(s) - canonical_W())) < 1e-12


def test_canonical_W_entries():
    w = canonical_W()
    expected = SQ2 * np.array([[-1, 0, 0, -1], [0, 1, -1, 0], [0, -1, 1, 0], [-1, 0, 0, -1]])
    assert np.allclose(w, expected, atol=1e-15)
    assert np.allclose(w, w.conj().T)


def test_canonical_eigensystem_pairs():
    eig = canonical_eigensystem()
    w = canonical_W()
    for val, vec in zip(eig.eigenvalues, eig.vectors):
        assert np.max(np.abs(w @ vec - val * vec)) < 1e-12
    gram = np.array([[np.vdot(u, v) for v in eig.vectors] for u in eig.vectors])
    assert np.allclose(gram, I4, atol=1e-12)


def test_eigenvectors_match_by_projector():
    # eigenvectors are compared through projectors, so sign and phase do not matter
    eig = canonical_eigensystem()
    pairs = herm_eig(canonical_W())
    p_low = projector(pairs[0][1])
    p_high = projector(pairs[-1][1])
    assert np.max(np.abs(p_low - projector(eig.eta1))) < 1e-9
    assert np.max(np.abs(p_high - projector(eig.eta3))) < 1e-9
    kernel = projector(pairs[1][1]) + projector(pairs[2][1])
    assert np.max(np.abs(kernel - projector(eig.eta2) - projector(eig.eta4))) < 1e-9


def test_chsh_examples():
    s = canonical_settings()
    eig = canonical_eigensystem()
    assert chsh_value(s, PureState(eig.eta1)) == pytest.approx(-2 * SQ2, abs=1e-12)
    assert chsh_value(s, PureState(eig.eta3)) == pytest.approx(2 * SQ2, abs=1e-12)
    assert chsh_value(s, maximally_mixed()) == pytest.approx(0.0, abs=1e-15)
    # the lambda state sits on the negative side of the canonical operator
    assert chsh_value(s, lambda_state(4.0)) == pytest.approx(-SQ2 / 9, abs=1e-12)


def test_bloch_vector_validation():
    with pytest.raises(NotUnitVector):
        BlochVector(1.0, 1.0, 0.0)
    with pytest.raises(NotUnitVector):
        BlochVector(float("nan"), 0.0, 0.0)
    assert BlochVector.normalized(3.0, 0.0, 4.0).z == pytest.approx(0.8)


def test_tsirelson_rhs_examples():
    s = canonical_settings()
    assert tsirelson_rhs(s, PureState(canonical_eigensystem().eta1)) == pytest.approx(2 * SQ2, abs=1e-12)
    assert tsirelson_rhs(s, maximally_mixed()) == pytest.approx(2.0, abs=1e-12)
    parallel = MeasurementSetting(*(BlochVector(0.0, 0.0, 1.0),) * 4)
    assert np.allclose(commutator_term(parallel), 0)


def test_W_squared_identity(rng):
    for _ in range(50):
        s = random_setting(rng)
        w = bell_operator(s)
        assert np.max(np.abs(w @ w - (4 * I4 - commutator_term(s)))) < 1e-12


@given(seeds)
def test_tsirelson_inequality(seed):
    r = np.random.default_rng(seed)
    s = random_setting(r)
    rho = random_density(r)
    rhs = tsirelson_rhs(s, rho)
    assert abs(chsh_value(s, rho)) <= rhs + 1e-10
    assert 2.0 - 1e-12 <= rhs <= 2 * SQ2 + 1e-12


def test_separable_states_respect_classical_bound(rng):
    worst = 0.0
    for _ in range(300):
        worst = max(worst, abs(chsh_value(random_setting(rng), random_separable(rng))))
    assert worst <= 2.0 + 1e-8


def test_max_violating_examples():
    psi, w = max_violating_state(canonical_settings())
    assert w == pytest.approx(2 * SQ2, abs=1e-9)
    # positive eigenvalue wins the tie, eta3 up to the chosen phase
    assert abs(abs(np.vdot(canonical_eigensystem().eta3, psi.amplitudes)) - 1.0) < 1e-9
    first = next(z for z in psi.amplitudes if abs(z) > 1e-10)
    assert abs(first.imag) < 1e-12 and first.real > 0


def test_max_violating_parallel_setting():
    z = BlochVector(0.0, 0.0, 1.0)
    psi, w = max_violating_state(MeasurementSetting(z, z, z, z))
    assert w == pytest.approx(2.0, abs=1e-9)


def test_max_violating_is_tight(rng):
    for _ in range(50):
        s = random_setting(rng)
        psi, w = max_violating_state(s)
        assert abs(chsh_value(s, psi)) == pytest.approx(w, abs=1e-9)
        assert tsirelson_rhs(s, psi) == pytest.approx(w, abs=1e-6)


def test_vertical_settings_reach_tsirelson(rng):
    for _ in range(50):
        s = random_vertical_setting(rng)
        assert s.is_vertical()
        assert max_violating_state(s)[1] == pytest.approx(2 * SQ2, abs=1e-9)
