import json
import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from chshbound.states import (
    DensityMatrix,
    InvalidState,
    LambdaFamily,
    LambdaOutOfRange,
    PureState,
    SchmidtForm,
    lambda_state,
    load_state,
    pure_to_density,
    random_density,
    random_product_state,
    random_pure,
    save_state,
    schmidt_angle,
    schmidt_to_pure,
    state_from_dict,
    state_to_dict,
)

seeds = st.integers(min_value=0, max_value=2**32 - 1)
R = 1 / math.sqrt(2)


def test_schmidt_to_pure_examples():
    assert np.allclose(schmidt_to_pure(SchmidtForm(0.0, 0.0)).amplitudes, [0, 1, 0, 0])
    assert np.allclose(schmidt_to_pure(SchmidtForm(math.pi / 2)).amplitudes, [0, R, R, 0])
    assert np.allclose(schmidt_to_pure(SchmidtForm(math.pi / 2, math.pi)).amplitudes, [0, R, -R, 0])


def test_schmidt_angle_examples():
    assert schmidt_angle(PureState(np.array([1, 0, 0, 0]))).theta == pytest.approx(0.0, abs=1e-12)
    assert schmidt_angle(PureState(np.array([0, R, R, 0]))).theta == pytest.approx(math.pi / 2, abs=1e-12)
    psi = PureState(np.array([0, math.cos(0.3), np.exp(1.2j) * math.sin(0.3), 0]))
    out = schmidt_angle(psi)
    assert out.theta == pytest.approx(0.6, abs=1e-12)
    assert out.chi == 0.0


@given(st.floats(0.0, math.pi), st.floats(0.0, 2 * math.pi))
def test_schmidt_round_trip(theta, chi):
    back = schmidt_angle(schmidt_to_pure(SchmidtForm(theta, chi))).theta
    assert back == pytest.approx(min(theta, math.pi - theta), abs=1e-9)


@given(seeds)
def test_schmidt_angle_global_phase(seed):
    r = np.random.default_rng(seed)
    p = random_pure(r)
    phase = np.exp(1j * r.uniform(0, 2 * math.pi))
    assert schmidt_angle(PureState(p.amplitudes * phase)).theta == pytest.approx(
        schmidt_angle(p).theta, abs=1e-9
    )


def test_product_states_have_zero_angle(rng):
    for _ in range(200):
        assert schmidt_angle(random_product_state(rng)).theta <= 1e-6


def test_schmidt_angle_matches_svd(rng):
    # independent route: singular values from LAPACK
    for _ in range(100):
        p = random_pure(rng)
        s = np.linalg.svd(p.as_matrix(), compute_uv=False)
        assert schmidt_angle(p).theta == pytest.approx(2 * math.atan2(s[1], s[0]), abs=1e-9)


def test_lambda_state_examples():
    assert np.allclose(lambda_state(0).matrix, np.diag([1, 4, 4, 0]) / 9)
    # (4 +- lambda)/9 from the middle block
    ev = np.linalg.eigvalsh(lambda_state(4).matrix)
    assert np.allclose(sorted(ev), [0, 0, 1 / 9, 8 / 9], atol=1e-12)
    with pytest.raises(LambdaOutOfRange):
        lambda_state(5)
    with pytest.raises(LambdaOutOfRange):
        LambdaFamily(-0.1)


def test_lambda_state_valid_on_grid():
    for lam in np.linspace(0, 4, 400):
        lambda_state(float(lam))


def test_pure_to_density_examples():
    assert np.allclose(pure_to_density(PureState(np.array([1, 0, 0, 0]))).matrix, np.diag([1, 0, 0, 0]))
    eta1 = np.array([1, 0, 0, 1]) * R
    m = pure_to_density(PureState(eta1)).matrix
    expected = np.zeros((4, 4))
    expected[np.ix_([0, 3], [0, 3])] = 0.5
    assert np.allclose(m, expected)


@given(seeds)
def test_pure_to_density_is_projector(seed):
    rho = pure_to_density(random_pure(seed))
    assert np.trace(rho.matrix).real == pytest.approx(1.0, abs=1e-12)
    assert rho.purity == pytest.approx(1.0, abs=1e-10)
    assert rho.is_pure()


def test_generators_deterministic():
    assert np.array_equal(random_pure(7).amplitudes, random_pure(7).amplitudes)
    assert np.array_equal(random_density(7).matrix, random_density(7).matrix)
    assert not np.array_equal(random_density(7).matrix, random_density(8).matrix)


def test_random_density_psd_1000():
    for s in range(1000):
        assert np.linalg.eigvalsh(random_density(s).matrix).min() >= -1e-10


@pytest.mark.parametrize(
    "matrix, invariant",
    [
        (np.diag([1, 0, 0, 0.5]), "trace"),
        (np.diag([1.5, -0.5, 0, 0]), "positive-semidefinite"),
        (np.array([[0.5, 0.1, 0, 0], [0.3, 0.5, 0, 0], [0, 0, 0, 0], [0, 0, 0, 0]]), "hermitian"),
        (np.eye(3) / 3, "shape"),
    ],
)
def test_density_validation_names_invariant(matrix, invariant):
    with pytest.raises(InvalidState) as err:
        DensityMatrix(matrix)
    assert err.value.invariant == invariant


def test_pure_validation():
    with pytest.raises(InvalidState) as err:
        PureState(np.array([1, 1, 0, 0]))
    assert err.value.invariant == "normalization"
    with pytest.raises(InvalidState):
        PureState(np.array([1, 0, 0]))


def test_state_file_round_trip(tmp_path, rng):
    for state in (random_pure(rng), random_density(rng)):
        path = tmp_path / "s.json"
        save_state(state, path)
        back = load_state(path)
        a = getattr(state, "amplitudes", None)
        if a is not None:
            assert np.array_equal(back.amplitudes, a)
        else:
            assert np.array_equal(back.matrix, state.matrix)


def test_state_file_accepts_nested_density():
    doc = {"kind": "density", "data": [[[1 / 4, 0] if i == j else [0, 0] for j in range(4)] for i in range(4)]}
    assert np.allclose(state_from_dict(doc).matrix, np.eye(4) / 4)


def test_state_file_flat_layout():
    doc = state_to_dict(lambda_state(2.0))
    assert doc["kind"] == "density"
    assert len(doc["data"]) == 16
    assert doc["data"][6] == [2 / 9, 0.0]


@pytest.mark.parametrize(
    "doc, invariant",
    [
        ({"kind": "mixed", "data": []}, "format"),
        ({"kind": "pure", "data": [[1, 0], [0, 0]]}, "shape"),
        ({"kind": "pure", "data": [[1, 0, 0], [0, 0], [0, 0], [0, 0]]}, "format"),
        ({"kind": "pure", "data": [[1, 0], [1, 0], [0, 0], [0, 0]]}, "normalization"),
        ({"kind": "density", "data": [[0.5, 0]] * 16}, "trace"),
        ([1, 2], "format"),
    ],
)
def test_state_file_errors(doc, invariant):
    with pytest.raises(InvalidState) as err:
        state_from_dict(doc)
    assert err.value.invariant == invariant


def test_load_state_bad_json(tmp_path):
    p = tmp_path / "bad.json"
    p.write_text('{"kind": "pure",')
    with pytest.raises(InvalidState) as err:
        load_state(p)
    assert err.value.invariant == "json"


def test_states_are_immutable():
    p = random_pure(0)
    with pytest.raises(ValueError):
        p.amplitudes[0] = 1.0
    json.dumps(state_to_dict(p))
