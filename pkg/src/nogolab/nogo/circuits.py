"""Oracle circuits, query magnitudes and the oracle-swap distance check."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Mapping, Sequence, Union

import numpy as np

from ..errors import (
    DimensionMismatch,
    InconsistentModification,
    NotClassicalOracle,
    UnknownSlot,
)
from ..qcore import OperatorMatrix, PureState, Pvm, apply_on, get_tol, measurement_distribution
from ..report import ExperimentReport
from ..scheme import ClassicalFunction


@dataclass(frozen=True)
class ClassicalOracle:
    """A permutation oracle whose basis states each query one classical input.

    `perm[j]` is the image of basis index j of the target registers and
    `labels[j]` the input that basis state queries.  The permutation only
    moves a basis state to another with the same label.
    """

    dims: tuple[int, ...]
    perm: np.ndarray
    labels: np.ndarray

    def __post_init__(self) -> None:
        dims = tuple(int(d) for d in self.dims)
        object.__setattr__(self, "dims", dims)
        size = math.prod(dims)
        perm = np.asarray(self.perm, dtype=np.int64).copy()
        labels = np.asarray(self.labels, dtype=np.int64).copy()
        if perm.shape != (size,) or labels.shape != (size,):
            raise DimensionMismatch("permutation and labels must cover every basis state")
        if sorted(perm.tolist()) != list(range(size)):
            raise ValueError("perm is not a permutation")
        if np.any(labels[perm] != labels):
            raise ValueError("oracle moves a basis state to a different query input")
        perm.setflags(write=False)
        labels.setflags(write=False)
        object.__setattr__(self, "perm", perm)
        object.__setattr__(self, "labels", labels)

    @property
    def dim(self) -> int:
        return self.perm.shape[0]

    @property
    def operator(self) -> OperatorMatrix:
        mat = np.zeros((self.dim, self.dim))
        mat[self.perm, np.arange(self.dim)] = 1.0
        return OperatorMatrix(mat, "unitary", self.dims)

    @classmethod
    def from_function(cls, f: ClassicalFunction) -> "ClassicalOracle":
        """|x⟩|y⟩ ↦ |x⟩|y ⊕ f(x)⟩ with query input x."""
        N = 2**f.n
        idx = np.arange(2**f.m * N)
        x, y = idx // N, idx % N
        fx = f.as_array()[x]
        return cls((2**f.m, N), x * N + (y ^ fx), x)

    @classmethod
    def indicator(cls, dims: Sequence[int], marked: Sequence[int] = ()) -> "ClassicalOracle":
        """Flip the low bit of the last register on every marked query input.

        The query input of a basis state is its index with the low bit of the
        last register dropped.  An odd last dimension leaves its top value
        without a partner; those states query an input that is never marked.
        """
        dims = tuple(int(d) for d in dims)
        last = dims[-1]
        half = (last + 1) // 2
        size = math.prod(dims)
        idx = np.arange(size)
        head, tail = idx // last, idx % last
        labels = head * half + tail // 2
        perm = idx.copy()
        flippable = (tail ^ 1) < last
        for y in marked:
            hit = (labels == y) & flippable
            perm[hit] = head[hit] * last + (tail[hit] ^ 1)
        return cls(dims, perm, labels)

    def differing_inputs(self, other: "ClassicalOracle") -> set[int]:
        if self.dims != other.dims or np.any(self.labels != other.labels):
            raise InconsistentModification("oracles act on different query registers")
        return set(self.labels[self.perm != other.perm].tolist())


Oracle = Union[OperatorMatrix, ClassicalOracle]


def _matrix(oracle: Oracle) -> np.ndarray:
    return oracle.operator.matrix if isinstance(oracle, ClassicalOracle) else oracle.matrix


@dataclass(frozen=True)
class FixedUnitary:
    op: OperatorMatrix
    targets: tuple[int, ...] | None = None


@dataclass(frozen=True)
class OracleCall:
    slot: str
    targets: tuple[int, ...]


Step = Union[FixedUnitary, OracleCall]


@dataclass(frozen=True)
class AdversaryCircuit:
    initial: PureState
    registers: tuple[int, ...]
    steps: tuple[Step, ...]
    final_measurement: Pvm
    calls: int = field(init=False)

    def __post_init__(self) -> None:
        regs = tuple(int(d) for d in self.registers)
        object.__setattr__(self, "registers", regs)
        object.__setattr__(self, "steps", tuple(self.steps))
        size = math.prod(regs)
        if self.initial.dim != size or self.final_measurement.dim != size:
            raise DimensionMismatch("initial state, registers and measurement disagree on dimension")
        for step in self.steps:
            targets = step.targets
            if targets is not None and any(t < 0 or t >= len(regs) for t in targets):
                raise DimensionMismatch(f"step targets {targets} outside {len(regs)} registers")
            if isinstance(step, FixedUnitary):
                want = size if targets is None else math.prod(regs[t] for t in targets)
                if step.op.dim != want:
                    raise DimensionMismatch(f"fixed unitary of dimension {step.op.dim} on {want}")
        object.__setattr__(self, "calls", sum(isinstance(s, OracleCall) for s in self.steps))

    def target_dim(self, targets: tuple[int, ...] | None) -> int:
        if targets is None:
            return math.prod(self.registers)
        return math.prod(self.registers[t] for t in targets)


@dataclass(frozen=True)
class CallRecord:
    time: int
    slot: str
    targets: tuple[int, ...]
    state: np.ndarray


def _apply(c: AdversaryCircuit, op: np.ndarray, vec: np.ndarray, targets) -> np.ndarray:
    if targets is None:
        return op @ vec
    return apply_on(op, vec, c.registers, targets)


def _evolve(c: AdversaryCircuit, oracles: Mapping[str, Oracle]) -> tuple[np.ndarray, list[CallRecord]]:
    vec = c.initial.amplitudes.copy()
    records: list[CallRecord] = []
    for step in c.steps:
        if isinstance(step, FixedUnitary):
            vec = _apply(c, step.op.matrix, vec, step.targets)
            continue
        if step.slot not in oracles:
            raise UnknownSlot(step.slot)
        oracle = oracles[step.slot]
        mat = _matrix(oracle)
        if mat.shape[0] != c.target_dim(step.targets):
            raise DimensionMismatch(f"oracle in slot {step.slot!r} does not fit registers {step.targets}")
        records.append(CallRecord(len(records), step.slot, step.targets, vec.copy()))
        vec = _apply(c, mat, vec, step.targets)
    return vec, records


def run_circuit(c: AdversaryCircuit, oracles: Mapping[str, Oracle]) -> tuple[PureState, np.ndarray]:
    vec, _ = _evolve(c, oracles)
    final = PureState(vec, c.initial.dim_tag)
    return final, measurement_distribution(c.final_measurement, final)


def _target_weights(c: AdversaryCircuit, vec: np.ndarray, targets: tuple[int, ...]) -> np.ndarray:
    """Probability of each basis state of the target registers."""
    probs = (np.abs(vec) ** 2).reshape(c.registers)
    others = tuple(i for i in range(len(c.registers)) if i not in targets)
    marg = probs.sum(axis=others) if others else probs
    # Summing leaves the kept axes in ascending order; restore target order.
    ascending = sorted(targets)
    marg = np.transpose(marg, [ascending.index(t) for t in targets])
    return marg.reshape(-1)


def _query_weight(c: AdversaryCircuit, rec: CallRecord, oracle: ClassicalOracle, y: int) -> float:
    w = _target_weights(c, rec.state, rec.targets)
    return float(w[oracle.labels == y].sum())


def query_magnitude(c: AdversaryCircuit, oracles: Mapping[str, Oracle], slot: str, y: int) -> list[float]:
    """q_y of the state entering each call to `slot`."""
    if slot not in oracles:
        raise UnknownSlot(slot)
    oracle = oracles[slot]
    if not isinstance(oracle, ClassicalOracle):
        raise NotClassicalOracle(f"slot {slot!r} holds no classical oracle")
    _, records = _evolve(c, oracles)
    return [_query_weight(c, rec, oracle, y) for rec in records if rec.slot == slot]


def _check_modification(
    c: AdversaryCircuit,
    oracles: Mapping[str, Oracle],
    modified: Mapping[str, Oracle],
    F: set[tuple[int, int]],
    records: list[CallRecord],
) -> None:
    allowed: dict[int, set[int]] = {}
    for t, y in F:
        allowed.setdefault(t, set()).add(y)
    for rec in records:
        a, b = oracles[rec.slot], modified.get(rec.slot)
        if b is None:
            raise UnknownSlot(rec.slot)
        if isinstance(a, ClassicalOracle) and isinstance(b, ClassicalOracle):
            diff = a.differing_inputs(b)
        elif np.array_equal(_matrix(a), _matrix(b)):
            diff = set()
        else:
            raise NotClassicalOracle(f"slot {rec.slot!r} differs but is not a classical oracle")
        extra = diff - allowed.get(rec.time, set())
        if extra:
            raise InconsistentModification(f"call {rec.time} differs on inputs {sorted(extra)} outside F")


def oracle_swap_check(
    c: AdversaryCircuit,
    oracles: Mapping[str, Oracle],
    modified: Mapping[str, Oracle],
    F: set[tuple[int, int]],
    seed: int | None = None,
) -> ExperimentReport:
    """Compare the runs under two oracle assignments that differ only on F.

    F holds (call time, query input) pairs, call times counting every oracle
    call in order.  ε = √(T·Σ_F q_y(φ_t)) with q taken from the run under
    `oracles`.  TV is the L1 distance between outcome distributions.
    """
    tol = get_tol()
    final_a, records = _evolve(c, oracles)
    _check_modification(c, oracles, modified, F, records)
    final_b, _ = _evolve(c, modified)
    mass = 0.0
    for t, y in sorted(F):
        if t >= len(records):
            continue
        oracle = oracles[records[t].slot]
        if not isinstance(oracle, ClassicalOracle):
            raise NotClassicalOracle(f"slot {records[t].slot!r} holds no classical oracle")
        mass += _query_weight(c, records[t], oracle, y)
    T = len(records)
    eps = math.sqrt(T * mass)
    dist = float(np.linalg.norm(final_a - final_b))
    pa = measurement_distribution(c.final_measurement, PureState(final_a))
    pb = measurement_distribution(c.final_measurement, PureState(final_b))
    tv = float(np.abs(pa - pb).sum())
    metrics = {
        "epsilon": eps,
        "distance": dist,
        "tv": tv,
        "tv_half": tv / 2,
        "query_mass": mass,
        "calls": float(T),
        "distance_over_epsilon": dist / eps if eps > 0 else (0.0 if dist <= tol else math.inf),
        "distance_within_2epsilon": float(dist <= 2 * eps + tol),
        "tv_within_2distance": float(tv <= 2 * dist + tol),
    }
    checks = {"distance_within_epsilon": dist <= eps + tol, "tv_within_4epsilon": tv <= 4 * eps + tol}
    return ExperimentReport.from_checks("bbbv-swap", {"calls": T}, seed, metrics, checks, bound=eps)


# --------------------------------------------------------------------------
# The z-clone oracle as a basis-changed classical indicator
# --------------------------------------------------------------------------


def indicator_basis(psi_z: PureState) -> np.ndarray:
    """Unitary B with B|⊥⟩ = |0⟩ and B|ψ_z⟩ = |1⟩ on the augmented space.

    The remaining basis vectors are an arbitrary completion.
    """
    d = psi_z.dim
    bot = np.zeros(d)
    bot[d - 1] = 1.0
    q, _ = np.linalg.qr(np.column_stack([bot, psi_z.amplitudes, np.eye(d)]))
    # Fix the phases so the first two columns are exactly ⊥ and ψ_z.
    for k, ref in enumerate((bot, psi_z.amplitudes)):
        q[:, k] *= np.vdot(q[:, k], ref) / abs(np.vdot(q[:, k], ref))
    return q.conj().T


def z_clone_as_indicator(psi_z: PureState) -> tuple[np.ndarray, ClassicalOracle, int]:
    """(D, O, y) with C_z = D† O D, O the indicator marking query input y.

    D = B ⊗ B sends ψ_z⊗⊥ to |1⟩|0⟩ and ψ_z⊗ψ_z to |1⟩|1⟩; O flips the low
    bit of the second register exactly on those two.
    """
    B = indicator_basis(psi_z)
    d = B.shape[0]
    D = np.kron(B, B)
    y = 1 * ((d + 1) // 2) + 0
    return D, ClassicalOracle.indicator((d, d), [y]), y


# --------------------------------------------------------------------------
# Random circuit families
# --------------------------------------------------------------------------


@dataclass(frozen=True)
class SwapSetup:
    circuit: AdversaryCircuit
    oracles: dict[str, Oracle]
    modified: dict[str, Oracle]
    F: frozenset[tuple[int, int]]
    kind: str
    fidelities: tuple[float, ...] = ()


def random_xor_setup(m: int, calls: int, rng: np.random.Generator) -> SwapSetup:
    """Haar-random unitaries around XOR-oracle calls on (input, output bit, workspace bit).

    The modified oracle flips the answer on a random nonempty set of inputs.
    """
    from ..qcore import random_unitary
    from ..scheme import sample_random_function

    f = sample_random_function(m, 1, rng)
    flips = rng.choice(2**m, size=int(rng.integers(1, 2**m + 1)), replace=False)
    g_table = list(f.table)
    for y in flips:
        g_table[int(y)] ^= 1
    g = ClassicalFunction(m, 1, tuple(g_table))
    regs = (2**m, 2, 2)
    size = math.prod(regs)
    steps: list[Step] = [FixedUnitary(OperatorMatrix(random_unitary(size, rng), "unitary"))]
    for _ in range(calls):
        steps.append(OracleCall("H", (0, 1)))
        steps.append(FixedUnitary(OperatorMatrix(random_unitary(size, rng), "unitary")))
    c = AdversaryCircuit(PureState.basis(size, 0), regs, tuple(steps), Pvm.computational(size))
    F = frozenset((t, int(y)) for t in range(calls) for y in flips)
    return SwapSetup(c, {"H": ClassicalOracle.from_function(f)}, {"H": ClassicalOracle.from_function(g)}, F, "xor")


def z_clone_setup(m: int, calls: int, rng: np.random.Generator, strength: float = 0.6) -> SwapSetup:
    """z-cloning oracle versus the dummy identity, written as an indicator in a changed basis.

    Registers are (first augmented, second augmented, workspace bit).  Each
    call is D, the indicator, D†.  The run under the dummy oracle is the
    reference; `fidelities` holds ⟨ψ_z|ρ'_t|ψ_z⟩ for its first register at
    every call.
    """
    from ..qcore import random_near_identity, random_vector
    from ..scheme import bottom_state, preimage_state, sample_label, sample_random_function

    h = sample_random_function(m, 1, rng)
    z = sample_label(h, rng)
    psi_z = preimage_state(h, z)
    D, real, y = z_clone_as_indicator(psi_z)
    d = psi_z.dim
    dummy = ClassicalOracle.indicator((d, d), [])
    regs = (d, d, 2)
    size = math.prod(regs)
    a = rng.uniform(0, math.pi / 2)
    first = math.cos(a) * psi_z.amplitudes + math.sin(a) * random_vector(d, rng)
    first[d - 1] = 0.0
    first /= np.linalg.norm(first)
    init = np.kron(np.kron(first, bottom_state(m).amplitudes), [1.0, 0.0])
    Dop = OperatorMatrix(D, "unitary")
    steps: list[Step] = []
    for _ in range(calls):
        steps.append(FixedUnitary(OperatorMatrix(random_near_identity(size, strength, rng), "unitary")))
        steps += [FixedUnitary(Dop, (0, 1)), OracleCall("clone", (0, 1)), FixedUnitary(Dop.dagger, (0, 1))]
    steps.append(FixedUnitary(OperatorMatrix(random_near_identity(size, strength, rng), "unitary")))
    c = AdversaryCircuit(PureState(init), regs, tuple(steps), Pvm.computational(size))
    oracles = {"clone": dummy}
    _, records = _evolve(c, oracles)
    # In the changed basis ψ_z on the first register is the basis state |1⟩.
    fids = tuple(float(_target_weights(c, rec.state, (0,))[1]) for rec in records)
    F = frozenset((t, y) for t in range(calls))
    return SwapSetup(c, oracles, {"clone": real}, F, "z-clone", fids)


def z_clone_bound(setup: SwapSetup) -> float:
    """4·√(q·Σ_t η'_t) for q cloning calls."""
    return 4.0 * math.sqrt(len(setup.fidelities) * sum(setup.fidelities))
