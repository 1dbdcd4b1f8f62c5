import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from nogolab.errors import DegenerateOutcome, DimensionMismatch, InvalidState, NotProjector, NotUnitary
from nogolab.qcore import (
    DensityMatrix,
    OperatorMatrix,
    PureState,
    Pvm,
    apply,
    apply_on,
    fidelity,
    get_tol,
    is_unitary,
    measure,
    measurement_distribution,
    operator_norm,
    partial_trace,
    random_density,
    random_state,
    random_unitary,
    tensor,
    tolerance,
)

X = OperatorMatrix(np.array([[0, 1], [1, 0]]), "unitary")
PLUS = PureState(np.array([1, 1]) / math.sqrt(2))
seeds = st.integers(0, 2**32 - 1)
dims = st.integers(2, 8)


def test_tensor_basis_product():
    out = tensor(PureState.basis(2, 0), PureState.basis(2, 1))
    assert np.allclose(out.amplitudes, PureState.basis(4, 1).amplitudes)


def test_tensor_identities():
    assert np.allclose(tensor(OperatorMatrix.identity(2), OperatorMatrix.identity(2)).matrix, np.eye(4))


def test_tensor_linearity():
    out = tensor(PLUS, PureState.basis(2, 0))
    assert np.allclose(out.amplitudes, np.array([1, 0, 1, 0]) / math.sqrt(2))


def test_apply_identity_and_flip():
    psi = random_state(3, np.random.default_rng(0))
    assert np.allclose(apply(OperatorMatrix.identity(3), psi).amplitudes, psi.amplitudes)
    assert np.allclose(apply(X, PureState.basis(2, 0)).amplitudes, [0, 1])


def test_apply_dimension_mismatch():
    with pytest.raises(DimensionMismatch):
        apply(X, PureState.basis(3, 0))


def test_fidelity_examples():
    psi = random_state(4, np.random.default_rng(1))
    assert fidelity(psi.to_density(), psi) == pytest.approx(1.0)
    assert fidelity(PureState.basis(2, 0).to_density(), PureState.basis(2, 1)) == pytest.approx(0.0)
    assert fidelity(DensityMatrix.maximally_mixed(4), psi) == pytest.approx(0.25)


def test_measure_basis_state_is_certain(rng):
    k, post = measure(Pvm.computational(2), PureState.basis(2, 0), rng)
    assert k == 0


def test_exact_distribution_of_plus():
    assert np.allclose(measurement_distribution(Pvm.computational(2), PLUS), [0.5, 0.5])


def test_measure_frequencies_within_five_sigma():
    rng = np.random.default_rng(7)
    psi = random_state(4, rng)
    pvm = Pvm.computational(4)
    p = measurement_distribution(pvm, psi)
    n = 10_000
    counts = np.bincount([measure(pvm, psi, rng)[0] for _ in range(n)], minlength=4)
    sigma = np.sqrt(n * p * (1 - p))
    assert np.all(np.abs(counts - n * p) <= 5 * sigma + 1e-9)


def test_measure_post_state_is_projected(rng):
    k, post = measure(Pvm.computational(2), PLUS, rng)
    assert np.allclose(np.abs(post.amplitudes), np.eye(2)[k])


def test_measure_guards_degenerate_outcomes():
    pvm = Pvm.computational(2)
    # A stream that always picks outcome 1 lands on the zero-probability branch.
    class Stuck:
        def choice(self, *a, **k):
            return 1

    with pytest.raises(DegenerateOutcome):
        measure(pvm, PureState.basis(2, 0), Stuck())


def test_operator_norm_examples():
    assert operator_norm(OperatorMatrix.identity(3)) == pytest.approx(1.0)
    assert operator_norm(np.zeros((3, 3))) == 0.0


@pytest.mark.parametrize("theta,expected", [(math.pi / 3, 1.0), (math.pi / 6, 0.51764)])
def test_operator_norm_phase_gap(theta, expected):
    a = np.diag([1, np.exp(1j * theta)]) - np.eye(2)
    assert operator_norm(a) == pytest.approx(math.sqrt(2 * (1 - math.cos(theta))), abs=1e-12)
    assert operator_norm(a) == pytest.approx(expected, abs=1e-5)


def test_validation_errors():
    with pytest.raises(InvalidState):
        PureState(np.array([1.0, 1.0]))
    with pytest.raises(InvalidState):
        DensityMatrix(np.diag([0.7, 0.7]))
    with pytest.raises(NotUnitary):
        OperatorMatrix(np.diag([1.0, 2.0]), "unitary")
    with pytest.raises(NotProjector):
        OperatorMatrix(np.diag([1.0, 0.5]), "projector")


def test_values_are_immutable():
    psi = PureState.basis(2, 0)
    with pytest.raises(ValueError):
        psi.amplitudes[0] = 0.5


def test_tolerance_context_restores():
    before = get_tol()
    with tolerance(1e-3):
        assert get_tol() == 1e-3
    assert get_tol() == before


def test_partial_trace_of_product():
    rng = np.random.default_rng(3)
    a, b = random_density(2, rng), random_density(3, rng)
    joint = DensityMatrix(np.kron(a.matrix, b.matrix))
    assert np.allclose(partial_trace(joint, (2, 3), (0,)).matrix, a.matrix)
    assert np.allclose(partial_trace(joint, (2, 3), (1,)).matrix, b.matrix)


def test_apply_on_matches_kron():
    rng = np.random.default_rng(4)
    u = random_unitary(3, rng)
    v = random_state(12, rng).amplitudes
    assert np.allclose(apply_on(u, v, (2, 3, 2), (1,)), np.kron(np.kron(np.eye(2), u), np.eye(2)) @ v)


@given(seeds, dims)
def test_unitaries_preserve_norm(seed, d):
    rng = np.random.default_rng(seed)
    u = OperatorMatrix(random_unitary(d, rng), "unitary")
    out = apply(u, random_state(d, rng))
    assert abs(np.linalg.norm(out.amplitudes) - 1) <= 1e-9
    assert is_unitary(u.matrix)
    assert abs(operator_norm(u) - 1) <= 1e-9


@given(seeds, dims)
def test_apply_preserves_trace(seed, d):
    rng = np.random.default_rng(seed)
    u = OperatorMatrix(random_unitary(d, rng), "unitary")
    assert abs(np.trace(apply(u, random_density(d, rng)).matrix) - 1) <= 1e-9


@given(seeds, dims)
def test_fidelity_in_unit_interval(seed, d):
    rng = np.random.default_rng(seed)
    f = fidelity(random_density(d, rng), random_state(d, rng))
    assert -1e-9 <= f <= 1 + 1e-9


@given(seeds)
def test_tensor_associative(seed):
    rng = np.random.default_rng(seed)
    a, b, c = (random_state(d, rng) for d in (2, 3, 2))
    left = tensor(tensor(a, b), c).amplitudes
    right = tensor(a, tensor(b, c)).amplitudes
    assert np.max(np.abs(left - right)) <= 1e-12


@given(seeds, dims)
def test_distribution_sums_to_one(seed, d):
    rng = np.random.default_rng(seed)
    p = measurement_distribution(Pvm.computational(d), random_density(d, rng))
    assert abs(p.sum() - 1) <= 1e-9
