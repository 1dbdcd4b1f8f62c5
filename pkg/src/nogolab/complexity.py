"""The hidden-cloning-oracle decision problem and verifier/cloner composition."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Any, Callable, Literal

import numpy as np

from .errors import DimensionMismatch, OutOfRange
from .nogo.lemma import lemma_bound
from .qcore import (
    DensityMatrix,
    OperatorMatrix,
    PureState,
    State,
    as_density,
    augmented_dim,
)
from .scheme import (
    ClassicalFunction,
    augmented_tag,
    check_widths,
    preimage_state,
    sample_label,
    sample_random_function,
    z_cloning_oracle,
)

Truth = Literal["YES", "NO"]


@dataclass(frozen=True)
class RohcInstance:
    h: ClassicalFunction
    c: OperatorMatrix
    truth: Truth
    z: int | None = None

    @property
    def dim(self) -> int:
        return augmented_dim(self.h.m)

    def witness(self) -> PureState:
        """The honest witness ψ_z of a YES instance."""
        if self.truth != "YES" or self.z is None:
            raise ValueError("NO instances have no valid witness")
        return preimage_state(self.h, self.z)


def generate_rohc(m: int, n: int, truth: Truth, rng: np.random.Generator, cap: int | None = None) -> RohcInstance:
    check_widths(m, n, cap=cap)
    h = sample_random_function(m, n, rng, cap=cap)
    if truth == "YES":
        z = sample_label(h, rng)
        return RohcInstance(h, z_cloning_oracle(h, z), "YES", z)
    if truth == "NO":
        D = augmented_dim(m)
        return RohcInstance(h, OperatorMatrix.identity(D * D, (D, D)), "NO", None)
    raise ValueError(f"truth must be YES or NO, got {truth!r}")


def _with_blank(inst: RohcInstance) -> np.ndarray:
    """Columns of C that take |x⟩|⊥⟩ inputs, as a D²×D matrix."""
    D = inst.dim
    return inst.c.matrix[:, np.arange(D) * D + (D - 1)]


def _non_blank_rows(D: int) -> np.ndarray:
    return np.array([i for i in range(D * D) if i % D != D - 1])


def rohc_verify(inst: RohcInstance, witness: PureState) -> float:
    """‖(I ⊗ (I − |⊥⟩⟨⊥|)) C (ψ ⊗ ⊥)‖²."""
    if witness.dim != inst.dim:
        raise DimensionMismatch(f"witness dimension {witness.dim} but instance uses {inst.dim}")
    out = _with_blank(inst) @ witness.amplitudes
    return float(np.sum(np.abs(out[_non_blank_rows(inst.dim)]) ** 2))


def rohc_clone(inst: RohcInstance, witness: State) -> DensityMatrix:
    """C(ρ ⊗ |⊥⟩⟨⊥|)C† on two registers."""
    if witness.dim != inst.dim:
        raise DimensionMismatch(f"witness dimension {witness.dim} but instance uses {inst.dim}")
    A = _with_blank(inst)
    rho = as_density(witness).matrix
    tag = augmented_tag(inst.h.m)
    return DensityMatrix(A @ rho @ A.conj().T, f"{tag}⊗{tag}")


def acceptance_operator(inst: RohcInstance) -> OperatorMatrix:
    """M = A†A with A = (I ⊗ (I − |⊥⟩⟨⊥|)) C (· ⊗ |⊥⟩)."""
    A = _with_blank(inst)[_non_blank_rows(inst.dim)]
    M = A.conj().T @ A
    return OperatorMatrix((M + M.conj().T) / 2, "general")


def max_acceptance(inst: RohcInstance) -> float:
    return float(np.linalg.eigvalsh(acceptance_operator(inst).matrix).max())


def composition_fidelity(c: float, f: float) -> float:
    """c²f − 2√((1−c²)(1−f))."""
    for name, v in (("c", c), ("f", f)):
        if not (0.0 <= v <= 1.0):
            raise OutOfRange(f"{name}={v!r} is outside [0, 1]")
    return c * c * f - 2.0 * math.sqrt((1.0 - c * c) * (1.0 - f))


@dataclass(frozen=True)
class VerifierCloner:
    """A projective verifier on the witness space with a cloner for accepted witnesses.

    `instance` carries whatever the cloner is allowed to know about the
    problem instance.
    """

    accept_projector: OperatorMatrix
    cloner: Callable[[DensityMatrix], DensityMatrix]
    params: dict[str, float] = field(default_factory=dict)
    instance: Any = None

    def __post_init__(self) -> None:
        if self.accept_projector.kind != "projector":
            raise ValueError("the verifier must be a projector")


def rohc_verifier_cloner(inst: RohcInstance) -> VerifierCloner:
    """The verifier Π_v = M (a projector for these instances) and the oracle-wrapping cloner."""
    proj = OperatorMatrix(acceptance_operator(inst).matrix, "projector")
    return VerifierCloner(proj, lambda rho: rohc_clone(inst, rho), {"c": 1.0, "f": 1.0, "s": 0.0}, inst)


def acceptance_probability(vc: VerifierCloner, witness: State) -> float:
    rho = as_density(witness).matrix
    return float(np.clip(np.trace(vc.accept_projector.matrix @ rho).real, 0.0, 1.0))


def disturbed_state(vc: VerifierCloner, witness: State) -> DensityMatrix:
    """ρ̃ = Π ρ Π + (I − Π) ρ (I − Π)."""
    P = vc.accept_projector.matrix
    Q = np.eye(P.shape[0]) - P
    rho = as_density(witness).matrix
    return DensityMatrix(P @ rho @ P + Q @ rho @ Q, witness.dim_tag)


def verify_and_refresh(vc: VerifierCloner, witness: State, rng: np.random.Generator) -> tuple[int, DensityMatrix]:
    """Measure {I − Π, Π}; return the outcome (1 = accept) and the post-measurement state."""
    if witness.dim != vc.accept_projector.dim:
        raise DimensionMismatch("witness does not match the verifier")
    P = vc.accept_projector.matrix
    rho = as_density(witness).matrix
    p = acceptance_probability(vc, witness)
    accept = int(rng.random() < p)
    proj = P if accept else np.eye(P.shape[0]) - P
    weight = p if accept else 1.0 - p
    post = proj @ rho @ proj / weight
    return accept, DensityMatrix((post + post.conj().T) / 2, witness.dim_tag)


def combined_verifier_cloner(
    vc: VerifierCloner, witness: State, rng: np.random.Generator, exact: bool = False
) -> tuple[int, DensityMatrix]:
    """Compute, measure and uncompute the verifier, then clone.

    With `exact` the cloner receives ρ̃, the outcome-averaged state;
    otherwise it receives the post-measurement state of the sampled outcome.
    """
    if exact:
        accept = int(rng.random() < acceptance_probability(vc, witness))
        return accept, vc.cloner(disturbed_state(vc, witness))
    accept, post = verify_and_refresh(vc, witness, rng)
    return accept, vc.cloner(post)


def two_copy_fidelity(rho: DensityMatrix, psi: PureState) -> float:
    v = np.kron(psi.amplitudes, psi.amplitudes)
    return float(np.vdot(v, rho.matrix @ v).real)


def composition_check(vc: VerifierCloner, witness: PureState) -> dict[str, float]:
    """Exact-mode quantities: c, f, fidelity on ρ̃, and the bound it must meet."""
    c = acceptance_probability(vc, witness)
    f = two_copy_fidelity(vc.cloner(witness.to_density()), witness)
    rho_t = disturbed_state(vc, witness)
    got = two_copy_fidelity(vc.cloner(rho_t), witness)
    overlap = float(np.vdot(witness.amplitudes, rho_t.matrix @ witness.amplitudes).real)
    c_, f_ = min(max(c, 0.0), 1.0), min(max(f, 0.0), 1.0)
    return {
        "c": c,
        "f": f,
        "disturbed_overlap": overlap,
        "clone_fidelity": got,
        "lemma_bound": lemma_bound(c_ * c_, f_),
        "composition_bound": composition_fidelity(c_, f_),
        "slack": got - lemma_bound(c_ * c_, f_),
        "overlap_slack": overlap - c * c,
    }


def projector_with_overlap(psi: PureState, c: float, rank: int, rng: np.random.Generator) -> OperatorMatrix:
    """Random rank-`rank` projector with ⟨ψ|Π|ψ⟩ = c exactly."""
    d = psi.dim
    v = psi.amplitudes
    perp = rng.standard_normal(d) + 1j * rng.standard_normal(d)
    perp -= np.vdot(v, perp) * v
    perp /= np.linalg.norm(perp)
    lead = math.sqrt(c) * v + math.sqrt(1 - c) * perp
    cols = [lead]
    basis = np.column_stack([v, perp])
    for _ in range(rank - 1):
        w = rng.standard_normal(d) + 1j * rng.standard_normal(d)
        w -= basis @ (basis.conj().T @ w)
        for u in cols[1:]:
            w -= np.vdot(u, w) * u
        cols.append(w / np.linalg.norm(w))
    q = np.column_stack(cols)
    return OperatorMatrix(q @ q.conj().T, "projector")
