"""Repeated reconstruction and measurement, counting distinct preimages."""

from __future__ import annotations

import math

import numpy as np

from ..errors import NoPreimage
from ..qcore import DensityMatrix, augmented_dim
from ..report import ExperimentReport
from ..scheme import ClassicalFunction, augmented_tag, bottom_state, preimage_state
from .tasks import Reconstructor


def collision_runs(k: int, eta: float) -> int:
    return math.ceil(8 * k / eta)


def collision_experiment(
    r: Reconstructor,
    f: ClassicalFunction,
    z: int,
    k: int,
    eta: float,
    rng: np.random.Generator,
    advice: str | None = None,
    seed: int | None = None,
) -> ExperimentReport:
    """Run the reconstructor ⌈8k/η⌉ times and measure each output in the computational basis.

    Distinct valid preimages x₁…x_d give ⌊d/2⌋ disjoint collisions; the run
    succeeds when d ≥ 2k.
    """
    pre = f.preimages(z)
    if not pre:
        raise NoPreimage(f"label {z} has no preimage")
    advice = format(z, f"0{f.n}b") if advice is None else advice
    runs = collision_runs(k, eta)
    found: set[int] = set()
    valid = 0
    for _ in range(runs):
        rho = r(advice, rng)
        probs = np.clip(np.real(np.diag(rho.matrix)), 0.0, None)
        x = int(rng.choice(probs.size, p=probs / probs.sum()))
        if x < f.domain_size and f(x) == z:
            valid += 1
            found.add(x)
    d = len(found)
    metrics = {
        "runs": float(runs),
        "valid_outcomes": float(valid),
        "distinct_preimages": float(d),
        "disjoint_collisions": float(d // 2),
        "preimage_count": float(len(pre)),
        "satisfiable": float(2 * k <= len(pre)),
    }
    params = {"m": f.m, "n": f.n, "z": z, "k": k, "eta": eta}
    return ExperimentReport.from_checks(
        "collisions", params, seed, metrics, {"success": d >= 2 * k}, bound=float(2 * k)
    )


def exact_state_reconstructor(f: ClassicalFunction, z: int) -> Reconstructor:
    """Knows f and outputs ψ_z exactly, whatever the advice."""
    rho = preimage_state(f, z).to_density()
    return Reconstructor(lambda advice, rng: rho, max(f.n, 1))


def basis_preimage_reconstructor(f: ClassicalFunction, z: int) -> Reconstructor:
    """Outputs the first preimage of z as a basis state."""
    x = f.preimages(z)[0]
    d = augmented_dim(f.m)
    mat = np.zeros((d, d))
    mat[x, x] = 1.0
    rho = DensityMatrix(mat, augmented_tag(f.m))
    return Reconstructor(lambda advice, rng: rho, max(f.n, 1))


def orthogonal_reconstructor(f: ClassicalFunction) -> Reconstructor:
    """Outputs ⊥, orthogonal to every preimage."""
    rho = bottom_state(f.m).to_density()
    return Reconstructor(lambda advice, rng: rho, max(f.n, 1))
