import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from nogolab.errors import MessageTooLong, NoMessageObserved, NotOrthogonal
from nogolab.harness.experiments import nonorthogonal_set, orthogonal_set
from nogolab.nogo import tasks
from nogolab.qcore import DensityMatrix, PureState, fidelity
from nogolab.scheme import bottom_state, preimage_set, preimage_state, sample_random_function

seeds = st.integers(0, 2**32 - 1)
K0, K1 = PureState.basis(2, 0), PureState.basis(2, 1)
PLUS = PureState(np.array([1, 1]) / math.sqrt(2))


def two_copy(rho, psi):
    v = np.kron(psi.amplitudes, psi.amplitudes)
    return float(np.vdot(v, rho.matrix @ v).real)


def scheme_protocol(seed=0):
    f = sample_random_function(2, 1, np.random.default_rng(seed))
    return f, tasks.perfect_telegraph_for_orthogonal(preimage_set(f))


def test_predicate_examples():
    assert tasks.is_orthogonal_with_duplication([K0, K1])
    assert not tasks.is_orthogonal_with_duplication([K0, PLUS])
    assert tasks.is_orthogonal_with_duplication([K0, PureState(1j * K0.amplitudes)])


def test_perfect_protocol_round_trips(rng):
    p = tasks.perfect_telegraph_for_orthogonal([K0, K1])
    for s in (K0, K1):
        assert fidelity(p.receive(p.transmit(s, rng), rng), s) == pytest.approx(1.0)


def test_duplicates_share_an_index(rng):
    dup = PureState(np.exp(0.7j) * K1.amplitudes)
    p = tasks.perfect_telegraph_for_orthogonal([K0, K1, dup])
    assert p.transmit(K1, rng) == p.transmit(dup, rng)
    assert fidelity(p.receive(p.transmit(dup, rng), rng), dup) == pytest.approx(1.0)


def test_non_orthogonal_protocol_rejected():
    with pytest.raises(NotOrthogonal):
        tasks.perfect_telegraph_for_orthogonal([K0, PLUS])


def test_message_budget_enforced(rng):
    p = tasks.TelegraphProtocol(lambda psi, r: "0101", lambda c, r: K0.to_density(), 2)
    with pytest.raises(MessageTooLong):
        p.transmit(K0, rng)


def test_clone_via_perfect_protocol(rng):
    f, p = scheme_protocol()
    for psi in preimage_set(f):
        assert two_copy(tasks.clone_via_telegraph(p, psi, rng), psi) == pytest.approx(1.0)


def test_noised_clone_meets_bound(rng):
    f, p = scheme_protocol()
    psi = preimage_state(f, f.image()[0])
    for mode in ("receiver", "sender"):
        noisy = tasks.noised_protocol(p, 0.5, bottom_state(f.m), mode)
        samples = tasks.clone_fidelity_samples(noisy, psi, rng, 10_000)
        sigma = samples.std(ddof=1) / math.sqrt(samples.size)
        assert samples.mean() >= tasks.clone_bound(0.5) - 3 * sigma
        assert tasks.clone_bound(0.5) == pytest.approx(0.0185, abs=1e-4)


def test_zero_success_gives_zero(rng):
    f, p = scheme_protocol()
    psi = preimage_state(f, f.image()[0])
    noisy = tasks.noised_protocol(p, 0.0, bottom_state(f.m))
    assert two_copy(tasks.clone_via_telegraph(noisy, psi, rng, trials=5), psi) == pytest.approx(0.0)


def test_failing_protocol_counts_as_zero(rng):
    def send(psi, r):
        raise RuntimeError("channel down")

    p = tasks.TelegraphProtocol(send, lambda c, r: K0.to_density(), 1)
    assert two_copy(tasks.clone_via_telegraph(p, K0, rng, trials=3), K0) == 0.0


def test_reconstructor_from_deterministic_protocol(rng):
    p = tasks.perfect_telegraph_for_orthogonal([K0, K1])
    advice, fid = tasks.reconstructor_via_telegraph(p, K1, 20, rng)
    assert advice == "1" and fid == pytest.approx(1.0)


def test_reconstructor_picks_good_message(rng):
    def send(psi, r):
        return "g" if r.random() < 0.5 else "b"

    def receive(c, r):
        return (K0 if c == "g" else K1).to_density()

    advice, fid = tasks.reconstructor_via_telegraph(tasks.TelegraphProtocol(send, receive, 1), K0, 50, rng)
    assert (advice, fid) == ("g", 1.0)


def test_reconstructor_meets_average(rng):
    f, p = scheme_protocol(3)
    psi = preimage_state(f, f.image()[0])
    noisy = tasks.noised_protocol(p, 0.5, bottom_state(f.m), "sender")
    single = tasks.telegraph_fidelity_samples(noisy, psi, rng, 10_000)
    _, fid = tasks.reconstructor_via_telegraph(noisy, psi, 10_000, rng)
    assert fid >= 0.5 - 3 * single.std(ddof=1) / math.sqrt(single.size)


def test_reconstructor_needs_samples(rng):
    with pytest.raises(NoMessageObserved):
        tasks.reconstructor_via_telegraph(tasks.perfect_telegraph_for_orthogonal([K0]), K0, 0, rng)


def test_reconstructor_wrapper_enforces_budget(rng):
    r = tasks.reconstructor_from_advice(tasks.perfect_telegraph_for_orthogonal([K0, K1]))
    assert fidelity(r("1", rng), K1) == pytest.approx(1.0)
    with pytest.raises(MessageTooLong):
        r("10", rng)


def test_receiver_noise_is_exact_mixture(rng):
    f, p = scheme_protocol()
    psi = preimage_state(f, f.image()[0])
    noisy = tasks.noised_protocol(p, 0.25, bottom_state(f.m))
    assert fidelity(noisy.receive(noisy.transmit(psi, rng), rng), psi) == pytest.approx(0.25)


def test_constraint_examples():
    assert tasks.required_ancilla_overlap(0) is None
    assert tasks.required_ancilla_overlap(0.5) == 2.0
    assert tasks.constraint_satisfiable(0.0)
    assert tasks.constraint_satisfiable(1.0)
    assert not tasks.constraint_satisfiable(1 / math.sqrt(2))
    assert tasks.constraint_violations([K0, PLUS])[0][:2] == (0, 1)


@given(seeds)
def test_orthogonal_sets_telegraph_and_clone(seed):
    rng = np.random.default_rng(seed)
    states = orthogonal_set(rng)
    assert tasks.is_orthogonal_with_duplication(states)
    assert not tasks.constraint_violations(states)
    p = tasks.perfect_telegraph_for_orthogonal(states)
    for s in states:
        assert abs(tasks.telegraph_fidelity_samples(p, s, rng, 1)[0] - 1) <= 1e-9
        assert abs(two_copy(tasks.clone_via_telegraph(p, s, rng), s) - 1) <= 1e-9


@given(seeds)
def test_non_orthogonal_sets_violate_constraint(seed):
    states = nonorthogonal_set(np.random.default_rng(seed))
    assert not tasks.is_orthogonal_with_duplication(states)
    violations = tasks.constraint_violations(states)
    assert violations and all(v[2] > 1 for v in violations)


@given(seeds, st.floats(0.05, 1.0))
def test_clone_output_is_state(seed, eta):
    rng = np.random.default_rng(seed)
    f, p = scheme_protocol(seed % 100)
    psi = preimage_state(f, f.image()[0])
    rho = tasks.clone_via_telegraph(tasks.noised_protocol(p, eta, bottom_state(f.m)), psi, rng, trials=3)
    assert isinstance(rho, DensityMatrix)
    assert abs(np.trace(rho.matrix) - 1) <= 1e-9
