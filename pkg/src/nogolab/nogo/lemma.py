"""Measuring an approximation of a state: the product-minus-radical bound."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from ..errors import OutOfRange
from ..qcore import DensityMatrix, PureState, fidelity, random_vector


def _unit(p: float, name: str) -> float:
    if not (0.0 <= p <= 1.0):
        raise OutOfRange(f"{name}={p!r} is outside [0, 1]")
    return float(p)


def lemma_bound(p1: float, p2: float) -> float:
    """p1·p2 − 2√((1−p1)(1−p2)); may be negative."""
    p1, p2 = _unit(p1, "p1"), _unit(p2, "p2")
    return p1 * p2 - 2.0 * math.sqrt((1.0 - p1) * (1.0 - p2))


@dataclass(frozen=True)
class LemmaTriple:
    psi: PureState
    rho: DensityMatrix
    projector: np.ndarray
    p1: float
    p2: float
    accept: float

    @property
    def bound(self) -> float:
        return lemma_bound(min(max(self.p1, 0.0), 1.0), min(max(self.p2, 0.0), 1.0))


def _near(psi: np.ndarray, rng: np.random.Generator) -> np.ndarray:
    """A random vector leaning toward psi, so the bound is often non-trivial."""
    w = rng.uniform(0.0, 1.0) ** 2
    v = math.sqrt(1 - w) * psi + math.sqrt(w) * random_vector(psi.shape[0], rng)
    return v / np.linalg.norm(v)


def random_triple(dim: int, rng: np.random.Generator) -> LemmaTriple:
    """A random pure state, a mixed state near it, and a projector of random rank."""
    psi = random_vector(dim, rng)
    parts = int(rng.integers(1, 4))
    weights = rng.dirichlet(np.ones(parts))
    rho = sum(w * np.outer(v, v.conj()) for w, v in zip(weights, (_near(psi, rng) for _ in range(parts))))
    rank = int(rng.integers(1, dim))
    cols = np.column_stack([_near(psi, rng)] + [random_vector(dim, rng) for _ in range(rank - 1)])
    q, _ = np.linalg.qr(cols)
    proj = q @ q.conj().T
    state = PureState(psi)
    dm = DensityMatrix(rho)
    p1 = fidelity(dm, state)
    p2 = float(np.vdot(psi, proj @ psi).real)
    accept = float(np.trace(proj @ rho).real)
    return LemmaTriple(state, dm, proj, p1, p2, accept)
