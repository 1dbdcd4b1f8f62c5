"""Dense complex linear algebra: states, density matrices, operators, measurement.

Every value is immutable once built.  Arrays handed to the constructors are
copied and marked read-only, so objects can be shared freely between threads.
Basis ordering is the computational one; for the augmented space of width m
the extra symbol ⊥ sits at index 2**m.
"""

from __future__ import annotations

import contextlib
import math
from dataclasses import dataclass, field
from typing import Iterator, Sequence, Union

import numpy as np

from .errors import (
    DegenerateOutcome,
    DimensionMismatch,
    InvalidState,
    NotProjector,
    NotUnitary,
)

_TOL = 1e-9
DEGENERATE_PROBABILITY = 1e-12


def get_tol() -> float:
    return _TOL


def set_tol(value: float) -> None:
    global _TOL
    if not value > 0:
        raise ValueError("tolerance must be positive")
    _TOL = float(value)


@contextlib.contextmanager
def tolerance(value: float) -> Iterator[None]:
    """Temporarily override the global tolerance."""
    old = _TOL
    set_tol(value)
    try:
        yield
    finally:
        set_tol(old)


def augmented_dim(m: int) -> int:
    return 2**m + 1


def bottom_index(m: int) -> int:
    return 2**m


def _frozen(a: np.ndarray, dtype=None) -> np.ndarray:
    out = np.array(a, dtype=dtype, copy=True)
    if out.dtype.kind not in "fc":
        out = out.astype(np.complex128)
    out.setflags(write=False)
    return out


def _spectral_norm(a: np.ndarray) -> float:
    if a.size == 0:
        return 0.0
    return float(np.linalg.norm(a, 2))


def _small_in_opnorm(a: np.ndarray, tol: float) -> bool:
    # Frobenius bounds the spectral norm from above, so a small Frobenius
    # norm settles the question without an SVD.
    if np.linalg.norm(a) <= tol:
        return True
    return _spectral_norm(a) <= tol


# --------------------------------------------------------------------------
# States
# --------------------------------------------------------------------------


@dataclass(frozen=True)
class PureState:
    amplitudes: np.ndarray
    dim_tag: str = ""

    def __post_init__(self) -> None:
        amps = _frozen(np.asarray(self.amplitudes).reshape(-1), np.complex128)
        object.__setattr__(self, "amplitudes", amps)
        norm = float(np.linalg.norm(amps))
        if abs(norm - 1.0) > _TOL:
            raise InvalidState(f"state norm {norm!r} is not 1")

    @property
    def dim(self) -> int:
        return self.amplitudes.shape[0]

    @classmethod
    def basis(cls, dim: int, index: int, dim_tag: str = "") -> "PureState":
        v = np.zeros(dim, dtype=np.complex128)
        v[index] = 1.0
        return cls(v, dim_tag)

    @classmethod
    def normalized(cls, vector, dim_tag: str = "") -> "PureState":
        v = np.asarray(vector, dtype=np.complex128).reshape(-1)
        norm = np.linalg.norm(v)
        if norm == 0:
            raise InvalidState("cannot normalize the zero vector")
        return cls(v / norm, dim_tag)

    def inner(self, other: "PureState") -> complex:
        """⟨self|other⟩."""
        _check_dims(self.dim, other.dim)
        return complex(np.vdot(self.amplitudes, other.amplitudes))

    def to_density(self) -> "DensityMatrix":
        v = self.amplitudes
        return DensityMatrix(np.outer(v, v.conj()), self.dim_tag)


@dataclass(frozen=True)
class DensityMatrix:
    matrix: np.ndarray
    dim_tag: str = ""
    validate: bool = field(default=True, repr=False, compare=False)

    def __post_init__(self) -> None:
        mat = _frozen(np.asarray(self.matrix), np.complex128)
        object.__setattr__(self, "matrix", mat)
        if mat.ndim != 2 or mat.shape[0] != mat.shape[1]:
            raise DimensionMismatch(f"density matrix must be square, got {mat.shape}")
        if not self.validate:
            return
        if np.max(np.abs(mat - mat.conj().T), initial=0.0) > _TOL:
            raise InvalidState("density matrix is not Hermitian")
        tr = np.trace(mat)
        if abs(tr - 1.0) > _TOL:
            raise InvalidState(f"density matrix trace {tr!r} is not 1")
        lo = np.linalg.eigvalsh(mat).min()
        if lo < -_TOL:
            raise InvalidState(f"density matrix has eigenvalue {lo!r}")

    @property
    def dim(self) -> int:
        return self.matrix.shape[0]

    @classmethod
    def maximally_mixed(cls, dim: int, dim_tag: str = "") -> "DensityMatrix":
        return cls(np.eye(dim, dtype=np.complex128) / dim, dim_tag)

    @classmethod
    def mixture(
        cls, weights: Sequence[float], states: Sequence[Union["PureState", "DensityMatrix"]]
    ) -> "DensityMatrix":
        if len(weights) != len(states) or not states:
            raise ValueError("need one weight per state")
        acc = np.zeros((states[0].dim, states[0].dim), dtype=np.complex128)
        for w, s in zip(weights, states):
            acc += w * as_density(s).matrix
        return cls(acc, states[0].dim_tag)


State = Union[PureState, DensityMatrix]


def as_density(s: State) -> DensityMatrix:
    return s.to_density() if isinstance(s, PureState) else s


# --------------------------------------------------------------------------
# Operators and measurements
# --------------------------------------------------------------------------

KINDS = ("unitary", "projector", "general")


@dataclass(frozen=True)
class OperatorMatrix:
    """Square matrix tagged with a kind and, optionally, a register layout."""

    matrix: np.ndarray
    kind: str = "general"
    layout: tuple[int, ...] | None = None

    def __post_init__(self) -> None:
        mat = _frozen(np.asarray(self.matrix))
        object.__setattr__(self, "matrix", mat)
        if mat.ndim != 2 or mat.shape[0] != mat.shape[1]:
            raise DimensionMismatch(f"operator must be square, got {mat.shape}")
        if self.kind not in KINDS:
            raise ValueError(f"unknown operator kind {self.kind!r}")
        if self.layout is not None:
            layout = tuple(int(d) for d in self.layout)
            object.__setattr__(self, "layout", layout)
            if math.prod(layout) != mat.shape[0]:
                raise DimensionMismatch(f"layout {layout} does not match dimension {mat.shape[0]}")
        d = mat.shape[0]
        if self.kind == "unitary":
            if not _small_in_opnorm(mat.conj().T @ mat - np.eye(d), _TOL):
                raise NotUnitary("‖U†U − I‖ exceeds tolerance")
        elif self.kind == "projector":
            if np.max(np.abs(mat - mat.conj().T), initial=0.0) > _TOL:
                raise NotProjector("projector is not Hermitian")
            if not _small_in_opnorm(mat @ mat - mat, _TOL):
                raise NotProjector("‖Π² − Π‖ exceeds tolerance")

    @property
    def dim(self) -> int:
        return self.matrix.shape[0]

    @property
    def dagger(self) -> "OperatorMatrix":
        return OperatorMatrix(self.matrix.conj().T, self.kind, self.layout)

    def __matmul__(self, other: "OperatorMatrix") -> "OperatorMatrix":
        _check_dims(self.dim, other.dim)
        kind = "unitary" if self.kind == other.kind == "unitary" else "general"
        layout = self.layout if self.layout == other.layout else None
        return OperatorMatrix(self.matrix @ other.matrix, kind, layout)

    @classmethod
    def identity(cls, dim: int, layout: tuple[int, ...] | None = None) -> "OperatorMatrix":
        return cls(np.eye(dim), "unitary", layout)

    @classmethod
    def projector_onto(cls, vectors: Sequence[PureState] | np.ndarray) -> "OperatorMatrix":
        """Orthogonal projector onto the span of the given vectors."""
        if isinstance(vectors, np.ndarray):
            cols = np.atleast_2d(vectors)
        else:
            cols = np.column_stack([v.amplitudes for v in vectors])
        q, r = np.linalg.qr(cols)
        keep = np.abs(np.diag(r)) > _TOL
        q = q[:, keep]
        return cls(q @ q.conj().T, "projector")


@dataclass(frozen=True)
class Pvm:
    operators: tuple[OperatorMatrix, ...]

    def __post_init__(self) -> None:
        ops = tuple(self.operators)
        object.__setattr__(self, "operators", ops)
        if not ops:
            raise ValueError("a measurement needs at least one outcome")
        d = ops[0].dim
        total = np.zeros((d, d), dtype=np.complex128)
        for op in ops:
            _check_dims(d, op.dim)
            if op.kind != "projector":
                raise NotProjector("measurement operators must be projectors")
            total += op.matrix
        if not _small_in_opnorm(total - np.eye(d), _TOL):
            raise NotProjector("measurement operators do not sum to identity")
        # For projectors ‖Π_jΠ_k‖_F² = tr(Π_jΠ_k), and Frobenius bounds the
        # operator norm, so one Gram matrix settles almost every pair.
        flat = np.stack([op.matrix.reshape(-1) for op in ops])
        gram = np.abs(flat.conj() @ flat.T)
        np.fill_diagonal(gram, 0.0)
        for j, k in zip(*np.nonzero(gram > _TOL**2)):
            if j < k and not _small_in_opnorm(ops[j].matrix @ ops[k].matrix, _TOL):
                raise NotProjector(f"outcomes {j} and {k} are not orthogonal")

    @property
    def dim(self) -> int:
        return self.operators[0].dim

    @classmethod
    def computational(cls, dim: int) -> "Pvm":
        ops = []
        for i in range(dim):
            p = np.zeros((dim, dim))
            p[i, i] = 1.0
            ops.append(OperatorMatrix(p, "projector"))
        return cls(tuple(ops))

    @classmethod
    def binary(cls, accept: OperatorMatrix) -> "Pvm":
        """Two-outcome measurement {I − Π, Π}; outcome 1 means accept."""
        reject = OperatorMatrix(np.eye(accept.dim) - accept.matrix, "projector")
        return cls((reject, accept))


# --------------------------------------------------------------------------
# Operations
# --------------------------------------------------------------------------


def _check_dims(a: int, b: int) -> None:
    if a != b:
        raise DimensionMismatch(f"dimension {a} does not match {b}")


def _join_tags(a: str, b: str) -> str:
    return f"{a}⊗{b}" if a or b else ""


def tensor(a, b):
    """Kronecker product of two states, two density matrices or two operators."""
    if isinstance(a, PureState) and isinstance(b, PureState):
        return PureState(np.kron(a.amplitudes, b.amplitudes), _join_tags(a.dim_tag, b.dim_tag))
    if isinstance(a, DensityMatrix) and isinstance(b, DensityMatrix):
        return DensityMatrix(np.kron(a.matrix, b.matrix), _join_tags(a.dim_tag, b.dim_tag), validate=False)
    if isinstance(a, OperatorMatrix) and isinstance(b, OperatorMatrix):
        kind = a.kind if a.kind == b.kind else "general"
        layout = None
        if a.layout is not None and b.layout is not None:
            layout = a.layout + b.layout
        return OperatorMatrix(np.kron(a.matrix, b.matrix), kind, layout)
    raise TypeError(f"cannot tensor {type(a).__name__} with {type(b).__name__}")


def apply(u: OperatorMatrix, s: State) -> State:
    """U|s⟩ for a state, UρU† for a density matrix."""
    _check_dims(u.dim, s.dim)
    if isinstance(s, PureState):
        return PureState(u.matrix @ s.amplitudes, s.dim_tag)
    return DensityMatrix(u.matrix @ s.matrix @ u.matrix.conj().T, s.dim_tag)


def fidelity(rho: State, psi: PureState) -> float:
    """⟨ψ|ρ|ψ⟩."""
    _check_dims(rho.dim, psi.dim)
    if isinstance(rho, PureState):
        return float(abs(np.vdot(psi.amplitudes, rho.amplitudes)) ** 2)
    val = np.vdot(psi.amplitudes, rho.matrix @ psi.amplitudes)
    return float(val.real)


def measurement_distribution(pvm: Pvm, s: State) -> np.ndarray:
    """Exact outcome probabilities tr(Π_k ρ)."""
    _check_dims(pvm.dim, s.dim)
    if isinstance(s, PureState):
        v = s.amplitudes
        probs = [float(np.vdot(v, op.matrix @ v).real) for op in pvm.operators]
    else:
        probs = [float(np.trace(op.matrix @ s.matrix).real) for op in pvm.operators]
    return np.clip(np.array(probs), 0.0, 1.0)


def measure(pvm: Pvm, s: State, rng: np.random.Generator) -> tuple[int, State]:
    """Sample an outcome and return it with the normalized post-measurement state."""
    probs = measurement_distribution(pvm, s)
    k = int(rng.choice(len(probs), p=probs / probs.sum()))
    p = probs[k]
    if p < DEGENERATE_PROBABILITY:
        raise DegenerateOutcome(f"outcome {k} has probability {p!r}")
    proj = pvm.operators[k].matrix
    if isinstance(s, PureState):
        return k, PureState(proj @ s.amplitudes / math.sqrt(p), s.dim_tag)
    return k, DensityMatrix(proj @ s.matrix @ proj / p, s.dim_tag)


def operator_norm(a: OperatorMatrix | np.ndarray) -> float:
    """Largest singular value."""
    mat = a.matrix if isinstance(a, OperatorMatrix) else np.asarray(a)
    if mat.ndim != 2 or mat.shape[0] != mat.shape[1]:
        raise DimensionMismatch(f"operator norm needs a square matrix, got {mat.shape}")
    return _spectral_norm(mat)


def is_unitary(mat: np.ndarray, tol: float | None = None) -> bool:
    tol = _TOL if tol is None else tol
    return _small_in_opnorm(mat.conj().T @ mat - np.eye(mat.shape[0]), tol)


# --------------------------------------------------------------------------
# Register plumbing
# --------------------------------------------------------------------------


def apply_on(op: np.ndarray, vec: np.ndarray, dims: Sequence[int], targets: Sequence[int]) -> np.ndarray:
    """Apply `op` to the `targets` registers of a flat state vector."""
    dims = tuple(dims)
    targets = tuple(targets)
    tdim = math.prod(dims[t] for t in targets)
    if op.shape != (tdim, tdim):
        raise DimensionMismatch(f"operator of shape {op.shape} does not act on registers {targets}")
    psi = vec.reshape(dims)
    psi = np.moveaxis(psi, targets, range(len(targets)))
    rest = psi.shape[len(targets):]
    psi = (op @ psi.reshape(tdim, -1)).reshape((tdim,) + rest)
    psi = psi.reshape(tuple(dims[t] for t in targets) + rest)
    psi = np.moveaxis(psi, range(len(targets)), targets)
    return psi.reshape(-1)


def partial_trace(rho: State, dims: Sequence[int], keep: Sequence[int]) -> DensityMatrix:
    """Reduced state on the registers listed in `keep`."""
    dims = tuple(dims)
    keep = tuple(sorted(keep))
    n = len(dims)
    mat = as_density(rho).matrix
    _check_dims(mat.shape[0], math.prod(dims))
    t = mat.reshape(dims + dims)
    drop = [i for i in range(n) if i not in keep]
    for i in sorted(drop, reverse=True):
        t = np.trace(t, axis1=i, axis2=i + t.ndim // 2)
    kd = math.prod(dims[i] for i in keep)
    return DensityMatrix(t.reshape(kd, kd))


# --------------------------------------------------------------------------
# Random instances
# --------------------------------------------------------------------------


def random_unitary(dim: int, rng: np.random.Generator) -> np.ndarray:
    """Haar-random unitary via QR of a complex Gaussian matrix."""
    z = (rng.standard_normal((dim, dim)) + 1j * rng.standard_normal((dim, dim))) / math.sqrt(2)
    q, r = np.linalg.qr(z)
    d = np.diag(r)
    return q * (d / np.abs(d))


def random_vector(dim: int, rng: np.random.Generator) -> np.ndarray:
    v = rng.standard_normal(dim) + 1j * rng.standard_normal(dim)
    return v / np.linalg.norm(v)


def random_state(dim: int, rng: np.random.Generator, dim_tag: str = "") -> PureState:
    return PureState(random_vector(dim, rng), dim_tag)


def random_density(dim: int, rng: np.random.Generator, rank: int | None = None) -> DensityMatrix:
    rank = dim if rank is None else rank
    g = rng.standard_normal((dim, rank)) + 1j * rng.standard_normal((dim, rank))
    rho = g @ g.conj().T
    return DensityMatrix(rho / np.trace(rho).real)


def random_near_identity(dim: int, strength: float, rng: np.random.Generator) -> np.ndarray:
    """exp(−i·s·H) for a random Hermitian H of unit operator norm."""
    g = rng.standard_normal((dim, dim)) + 1j * rng.standard_normal((dim, dim))
    h = (g + g.conj().T) / 2
    w, v = np.linalg.eigh(h)
    w = w / np.max(np.abs(w))
    return (v * np.exp(-1j * strength * w)) @ v.conj().T
