import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from nogolab import complexity as cx
from nogolab.errors import DimensionMismatch, OutOfRange
from nogolab.harness.experiments import random_composition_pair
from nogolab.harness.sweep import classical_witness_sweep
from nogolab.nogo.lemma import lemma_bound
from nogolab.qcore import OperatorMatrix, PureState, random_vector
from nogolab.scheme import bottom_state

seeds = st.integers(0, 2**32 - 1)


def yes(seed=0, m=3, n=1):
    return cx.generate_rohc(m, n, "YES", np.random.default_rng(seed))


def no(seed=0, m=3, n=1):
    return cx.generate_rohc(m, n, "NO", np.random.default_rng(seed))


def orthogonal_witness(inst, rng):
    psi = inst.witness().amplitudes
    w = random_vector(inst.dim, rng)
    w[-1] = 0
    w -= np.vdot(psi, w) * psi
    return PureState.normalized(w)


def test_instances():
    assert np.array_equal(no().c.matrix, np.eye(81))
    inst = yes()
    psi, bot = inst.witness().amplitudes, bottom_state(3).amplitudes
    C = inst.c.matrix
    assert np.allclose(C @ np.kron(psi, bot), np.kron(psi, psi))
    assert np.allclose(C @ C, np.eye(81))


def test_no_instance_has_no_witness():
    with pytest.raises(ValueError):
        no().witness()


def test_verify_examples(rng):
    inst = yes()
    assert cx.rohc_verify(inst, inst.witness()) == pytest.approx(1.0)
    assert cx.rohc_verify(no(), inst.witness()) == 0.0
    assert cx.rohc_verify(inst, orthogonal_witness(inst, rng)) == pytest.approx(0.0)
    with pytest.raises(DimensionMismatch):
        cx.rohc_verify(inst, PureState.basis(4, 0))


def test_clone_examples(rng):
    inst = yes()
    psi = inst.witness()
    out = cx.rohc_clone(inst, psi)
    assert cx.two_copy_fidelity(out, psi) == pytest.approx(1.0)
    phi = orthogonal_witness(inst, rng)
    expect = np.kron(phi.amplitudes, bottom_state(3).amplitudes)
    for case in (inst, no()):
        got = cx.rohc_clone(case, phi).matrix
        assert np.allclose(got, np.outer(expect, expect.conj()))


def test_acceptance_operator_examples():
    assert np.linalg.norm(cx.acceptance_operator(no()).matrix, 2) <= 1e-9
    inst = yes()
    M = cx.acceptance_operator(inst).matrix
    vals, vecs = np.linalg.eigh(M)
    assert vals[-1] == pytest.approx(1.0)
    assert abs(np.vdot(vecs[:, -1], inst.witness().amplitudes)) == pytest.approx(1.0)
    assert np.trace(M).real == pytest.approx(1.0)
    assert cx.max_acceptance(inst) == pytest.approx(1.0)


@settings(max_examples=20)
@given(seeds, st.sampled_from(["YES", "NO"]))
def test_operator_matches_verify(seed, truth):
    rng = np.random.default_rng(seed)
    inst = cx.generate_rohc(3, 1, truth, rng)
    M = cx.acceptance_operator(inst).matrix
    for _ in range(5):
        w = random_vector(inst.dim, rng)
        w[-1] = 0
        psi = PureState.normalized(w)
        v = psi.amplitudes
        assert abs(cx.rohc_verify(inst, psi) - np.vdot(v, M @ v).real) <= 1e-9


def test_composition_examples():
    assert cx.composition_fidelity(1, 1) == 1
    assert cx.composition_fidelity(0.9, 0.9) == pytest.approx(0.45332, abs=1e-5)
    assert cx.composition_fidelity(0.7, 1) == pytest.approx(0.49)
    with pytest.raises(OutOfRange):
        cx.composition_fidelity(1.1, 0.5)


@given(st.floats(0, 1), st.floats(0, 1), st.floats(0, 1))
def test_composition_monotone(a, b, c):
    lo, hi = sorted((a, b))
    assert cx.composition_fidelity(lo, c) <= cx.composition_fidelity(hi, c) + 1e-12
    assert cx.composition_fidelity(c, lo) <= cx.composition_fidelity(c, hi) + 1e-12


def test_undisturbing_verifier(rng):
    inst = yes()
    psi = inst.witness()
    vc = cx.VerifierCloner(OperatorMatrix.projector_onto([psi]), lambda r: cx.rohc_clone(inst, r))
    check = cx.composition_check(vc, psi)
    assert check["c"] == pytest.approx(1.0)
    assert check["clone_fidelity"] == pytest.approx(check["f"])


def test_orthogonal_verifier_never_accepts(rng):
    inst = yes()
    phi = orthogonal_witness(inst, rng)
    vc = cx.VerifierCloner(OperatorMatrix.projector_onto([phi]), lambda r: cx.rohc_clone(inst, r))
    assert cx.acceptance_probability(vc, inst.witness()) == pytest.approx(0.0)
    assert all(cx.combined_verifier_cloner(vc, inst.witness(), rng)[0] == 0 for _ in range(20))


def test_projector_with_overlap(rng):
    psi = PureState(random_vector(6, rng))
    P = cx.projector_with_overlap(psi, 0.37, 3, rng).matrix
    assert np.allclose(P @ P, P)
    assert np.trace(P).real == pytest.approx(3)
    assert np.vdot(psi.amplitudes, P @ psi.amplitudes).real == pytest.approx(0.37)


@settings(max_examples=30)
@given(seeds)
def test_exact_mode_bounds(seed):
    vc, witness = random_composition_pair(3, 1, np.random.default_rng(seed))
    r = cx.composition_check(vc, witness)
    assert r["disturbed_overlap"] >= r["c"] ** 2 - 1e-9
    assert r["clone_fidelity"] >= lemma_bound(r["c"] ** 2, min(r["f"], 1.0)) - 1e-9


@settings(max_examples=10)
@given(seeds)
def test_exact_mode_equals_outcome_average(seed):
    rng = np.random.default_rng(seed)
    vc, witness = random_composition_pair(2, 1, rng)
    c = cx.acceptance_probability(vc, witness)
    P = vc.accept_projector.matrix
    Q = np.eye(P.shape[0]) - P
    rho = witness.to_density().matrix
    mix = P @ rho @ P + Q @ rho @ Q
    assert np.allclose(cx.disturbed_state(vc, witness).matrix, mix)
    assert 0 <= c <= 1


def test_classical_sweep():
    inst = yes(4)
    r = classical_witness_sweep(inst, 8)
    assert r["strings_tried"] == 255
    assert 0 < r["best_acceptance"] <= 1 + 1e-9
    assert classical_witness_sweep(no(), 4)["best_acceptance"] == 0.0
