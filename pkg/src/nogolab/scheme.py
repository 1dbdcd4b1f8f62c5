"""Function tables, preimage superposition states and the oracles built from them."""

from __future__ import annotations

import math
import os
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .errors import CapExceeded, InvalidParameters, NoPreimage, NotOrthonormal
from .qcore import (
    OperatorMatrix,
    PureState,
    State,
    augmented_dim,
    bottom_index,
    fidelity,
    get_tol,
)

DEFAULT_CAP = 6
CAP_ENV = "NOGOLAB_CAP"


def width_cap() -> int:
    """Largest m allowed for dense construction; override with NOGOLAB_CAP."""
    raw = os.environ.get(CAP_ENV)
    return int(raw) if raw else DEFAULT_CAP


def check_widths(m: int, n: int, strict: bool = False, cap: int | None = None) -> None:
    cap = width_cap() if cap is None else cap
    if n < 1 or n > m:
        raise InvalidParameters(f"need 1 <= n <= m, got m={m}, n={n}")
    if m > cap:
        raise CapExceeded(f"m={m} exceeds the cap {cap}")
    if strict and m < 2 * n:
        raise InvalidParameters(f"strict mode requires m >= 2n, got m={m}, n={n}")


@dataclass(frozen=True)
class ClassicalFunction:
    m: int
    n: int
    table: tuple[int, ...]

    def __post_init__(self) -> None:
        table = tuple(int(v) for v in self.table)
        object.__setattr__(self, "table", table)
        if len(table) != 2**self.m:
            raise InvalidParameters(f"table has {len(table)} entries, expected {2**self.m}")
        if any(v < 0 or v >= 2**self.n for v in table):
            raise InvalidParameters("table entry outside {0,1}^n")

    def __call__(self, x: int) -> int:
        return self.table[x]

    @property
    def domain_size(self) -> int:
        return 2**self.m

    @property
    def codomain_size(self) -> int:
        return 2**self.n

    def as_array(self) -> np.ndarray:
        return np.asarray(self.table, dtype=np.int64)

    def preimages(self, z: int) -> list[int]:
        return [x for x, y in enumerate(self.table) if y == z]

    def counts(self) -> np.ndarray:
        return np.bincount(self.as_array(), minlength=self.codomain_size)

    def image(self) -> list[int]:
        return sorted(set(self.table))

    def dumps(self) -> str:
        lines = [f"{x:0{self.m}b} {y:0{self.n}b}" for x, y in enumerate(self.table)]
        return "\n".join(lines) + "\n"

    @classmethod
    def loads(cls, text: str) -> "ClassicalFunction":
        rows = [line.split() for line in text.splitlines() if line.strip()]
        if not rows:
            raise InvalidParameters("empty function table")
        m, n = len(rows[0][0]), len(rows[0][1])
        table = []
        for i, (xb, yb) in enumerate(rows):
            if len(xb) != m or len(yb) != n or int(xb, 2) != i:
                raise InvalidParameters(f"line {i} is out of order or has the wrong width")
            table.append(int(yb, 2))
        return cls(m, n, tuple(table))


def sample_random_function(
    m: int,
    n: int,
    rng: np.random.Generator,
    strict: bool = False,
    cap: int | None = None,
) -> ClassicalFunction:
    check_widths(m, n, strict, cap)
    return ClassicalFunction(m, n, tuple(rng.integers(0, 2**n, size=2**m).tolist()))


def augmented_tag(m: int) -> str:
    return f"augmented({m})"


def bottom_state(m: int) -> PureState:
    return PureState.basis(augmented_dim(m), bottom_index(m), augmented_tag(m))


def preimage_state(f: ClassicalFunction, z: int) -> PureState:
    """Uniform positive superposition over f⁻¹(z) in the augmented space."""
    pre = f.preimages(z)
    if not pre:
        raise NoPreimage(f"label {z} has no preimage")
    v = np.zeros(augmented_dim(f.m))
    v[pre] = 1.0 / math.sqrt(len(pre))
    return PureState(v, augmented_tag(f.m))


def preimage_set(f: ClassicalFunction) -> list[PureState]:
    return [preimage_state(f, z) for z in f.image()]


def xor_oracle(f: ClassicalFunction) -> OperatorMatrix:
    """|x⟩|y⟩ ↦ |x⟩|y ⊕ f(x)⟩ on m + n bits, index x·2ⁿ + y."""
    N = 2**f.n
    dim = 2**f.m * N
    perm = np.empty(dim, dtype=np.int64)
    for x, fx in enumerate(f.table):
        for y in range(N):
            perm[x * N + y] = x * N + (y ^ fx)
    mat = np.zeros((dim, dim))
    mat[perm, np.arange(dim)] = 1.0
    return OperatorMatrix(mat, "unitary", (2**f.m, N))


def _check_orthonormal(vectors: np.ndarray, bottom: int) -> None:
    tol = get_tol()
    if vectors.shape[1] == 0:
        return
    gram = vectors.conj().T @ vectors
    if np.max(np.abs(gram - np.eye(gram.shape[0]))) > tol:
        raise NotOrthonormal("states are not mutually orthonormal")
    if np.max(np.abs(vectors[bottom, :])) > tol:
        raise NotOrthonormal("states have weight on ⊥")


def cloning_oracle_for_set(states: Sequence[PureState], m: int | None = None) -> OperatorMatrix:
    """I + Σᵢ |ψᵢ⟩⟨ψᵢ| ⊗ (|ψᵢ⟩⟨⊥| + |⊥⟩⟨ψᵢ| − |⊥⟩⟨⊥| − |ψᵢ⟩⟨ψᵢ|).

    The dimension comes from the states; pass `m` to build the identity for
    an empty set.
    """
    if states:
        dim = states[0].dim
        if m is not None and dim != augmented_dim(m):
            raise NotOrthonormal(f"states of dimension {dim} do not live in augmented({m})")
    elif m is None:
        raise InvalidParameters("an empty set needs the width m")
    else:
        dim = augmented_dim(m)
    bot = dim - 1
    vecs = np.column_stack([s.amplitudes for s in states]) if states else np.zeros((dim, 0))
    if any(s.dim != dim for s in states):
        raise NotOrthonormal("states have different dimensions")
    _check_orthonormal(vecs, bot)
    if not np.iscomplexobj(vecs) or np.max(np.abs(vecs.imag), initial=0.0) == 0:
        vecs = vecs.real
    out = np.eye(dim * dim, dtype=vecs.dtype)
    e_bot = np.zeros(dim)
    e_bot[bot] = 1.0
    for i in range(vecs.shape[1]):
        v = vecs[:, i]
        proj = np.outer(v, v.conj())
        swap = np.outer(v, e_bot) + np.outer(e_bot, v.conj()) - np.outer(e_bot, e_bot) - proj
        out += np.kron(proj, swap)
    return OperatorMatrix(out, "unitary", (dim, dim))


def full_cloning_oracle(f: ClassicalFunction) -> OperatorMatrix:
    return cloning_oracle_for_set(preimage_set(f), f.m)


def z_cloning_oracle(f: ClassicalFunction, z: int) -> OperatorMatrix:
    return cloning_oracle_for_set([preimage_state(f, z)], f.m)


@dataclass(frozen=True)
class SchemeInstance:
    h: ClassicalFunction
    xor_oracle: OperatorMatrix
    clone_oracle: OperatorMatrix
    labels_in_image: frozenset[int]


def build_scheme(h: ClassicalFunction) -> SchemeInstance:
    return SchemeInstance(h, xor_oracle(h), full_cloning_oracle(h), frozenset(h.image()))


def sample_label(inst: SchemeInstance | ClassicalFunction, rng: np.random.Generator) -> int:
    """Label of a uniformly random domain element."""
    h = inst.h if isinstance(inst, SchemeInstance) else inst
    return h.table[int(rng.integers(0, h.domain_size))]


def label_distribution(inst: SchemeInstance | ClassicalFunction) -> np.ndarray:
    h = inst.h if isinstance(inst, SchemeInstance) else inst
    return h.counts() / h.domain_size


def verify(state: State, z: int, f: ClassicalFunction) -> float:
    """Probability that the state passes the projective test onto ψ_z."""
    return fidelity(state, preimage_state(f, z))
