import numpy as np
import pytest

from nogolab.errors import NoPreimage
from nogolab.harness.rng import stream
from nogolab.nogo import collisions as coll
from nogolab.scheme import ClassicalFunction, sample_label, sample_random_function


def test_run_count():
    assert coll.collision_runs(4, 1.0) == 32
    assert coll.collision_runs(4, 0.3) == 107


def test_exact_reconstructor_mostly_succeeds():
    wins = 0
    for t in range(100):
        rng = stream(2024, t)
        f = sample_random_function(6, 2, rng)
        z = sample_label(f, rng)
        wins += coll.collision_experiment(coll.exact_state_reconstructor(f, z), f, z, 4, 1.0, rng).passed
    assert wins >= 50


def test_basis_reconstructor_finds_one(rng):
    f = sample_random_function(4, 1, rng)
    z = f(0)
    r = coll.collision_experiment(coll.basis_preimage_reconstructor(f, z), f, z, 2, 1.0, rng)
    assert r.metrics["distinct_preimages"] == 1
    assert r.metrics["disjoint_collisions"] == 0
    assert not r.passed


def test_orthogonal_reconstructor_finds_none(rng):
    f = sample_random_function(4, 1, rng)
    r = coll.collision_experiment(coll.orthogonal_reconstructor(f), f, f(0), 1, 1.0, rng)
    assert r.metrics["valid_outcomes"] == 0


def test_missing_label(rng):
    f = ClassicalFunction(2, 2, (0, 0, 1, 1))
    with pytest.raises(NoPreimage):
        coll.collision_experiment(coll.orthogonal_reconstructor(f), f, 3, 1, 1.0, rng)


def test_satisfiability_flag(rng):
    f = ClassicalFunction(2, 1, (0, 1, 1, 1))
    r = coll.collision_experiment(coll.exact_state_reconstructor(f, 0), f, 0, 1, 1.0, rng)
    assert r.metrics["satisfiable"] == 0.0 and not r.passed
