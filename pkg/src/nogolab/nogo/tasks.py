"""Telegraphing, cloning and reconstruction as procedures, and the reductions between them."""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np

from ..errors import MessageTooLong, NoMessageObserved, NotOrthogonal
from ..qcore import DensityMatrix, PureState, fidelity, get_tol

SendFn = Callable[[PureState, np.random.Generator], str]
ReceiveFn = Callable[[str, np.random.Generator], DensityMatrix]


@dataclass(frozen=True)
class TelegraphProtocol:
    """A classical-channel transmission scheme.

    `send` may be randomized; `receive` returns the density matrix of its
    output, including any randomness it uses internally.
    """

    send: SendFn
    receive: ReceiveFn
    message_budget: int

    def transmit(self, psi: PureState, rng: np.random.Generator) -> str:
        c = self.send(psi, rng)
        if len(c) > self.message_budget:
            raise MessageTooLong(f"message of {len(c)} bits exceeds budget {self.message_budget}")
        return c


@dataclass(frozen=True)
class Reconstructor:
    reconstruct: Callable[[str, np.random.Generator], DensityMatrix]
    advice_budget: int

    def __call__(self, advice: str, rng: np.random.Generator) -> DensityMatrix:
        if len(advice) > self.advice_budget:
            raise MessageTooLong(f"advice of {len(advice)} bits exceeds budget {self.advice_budget}")
        return self.reconstruct(advice, rng)


def orthogonal_junk(psi: PureState) -> PureState:
    """A fixed state orthogonal to `psi` (⊥ for augmented-space states)."""
    v = psi.amplitudes
    k = int(np.argmin(np.abs(v)))
    e = np.zeros_like(v)
    e[k] = 1.0
    e = e - np.vdot(v, e) * v
    return PureState.normalized(e, psi.dim_tag)


# --------------------------------------------------------------------------
# Telegraphing implies cloning
# --------------------------------------------------------------------------


def _two_receives(p: TelegraphProtocol, psi: PureState, rng: np.random.Generator):
    """One run of Send followed by two independent Receives; None on failure."""
    try:
        c = p.transmit(psi, rng)
        return c, p.receive(c, rng), p.receive(c, rng)
    except Exception:
        return None


def clone_via_telegraph(
    p: TelegraphProtocol, psi: PureState, rng: np.random.Generator, trials: int = 1
) -> DensityMatrix:
    """Average of receive(c) ⊗ receive(c) over `trials` runs of send.

    A run that raises counts as producing a state orthogonal to ψ⊗ψ.
    """
    d = psi.dim
    acc = np.zeros((d * d, d * d), dtype=np.complex128)
    junk = None
    for _ in range(trials):
        out = _two_receives(p, psi, rng)
        if out is None:
            if junk is None:
                junk = orthogonal_junk(psi).to_density().matrix
            acc += np.kron(junk, junk)
        else:
            acc += np.kron(out[1].matrix, out[2].matrix)
    tag = f"{psi.dim_tag}⊗{psi.dim_tag}" if psi.dim_tag else ""
    return DensityMatrix(acc / trials, tag)


def clone_fidelity_samples(
    p: TelegraphProtocol, psi: PureState, rng: np.random.Generator, trials: int
) -> np.ndarray:
    """Per-run two-copy fidelities ⟨ψ|ρ₁|ψ⟩·⟨ψ|ρ₂|ψ⟩ (the receives are independent)."""
    out = np.zeros(trials)
    for t in range(trials):
        run = _two_receives(p, psi, rng)
        if run is not None:
            out[t] = fidelity(run[1], psi) * fidelity(run[2], psi)
    return out


def telegraph_fidelity_samples(
    p: TelegraphProtocol, psi: PureState, rng: np.random.Generator, trials: int
) -> np.ndarray:
    out = np.zeros(trials)
    for t in range(trials):
        try:
            out[t] = fidelity(p.receive(p.transmit(psi, rng), rng), psi)
        except Exception:
            out[t] = 0.0
    return out


def clone_bound(eta: float) -> float:
    return 4.0 / 27.0 * eta**3


# --------------------------------------------------------------------------
# Telegraphing implies reconstruction
# --------------------------------------------------------------------------


def reconstructor_via_telegraph(
    p: TelegraphProtocol,
    psi: PureState,
    trials: int,
    rng: np.random.Generator,
    receive_samples: int = 1,
) -> tuple[str, float]:
    """Best observed message and its receive fidelity.

    Each distinct message is scored by averaging `receive_samples` calls to
    receive; the argmax is the advice string a reconstructor would hard-code.
    """
    if trials <= 0:
        raise NoMessageObserved("no send samples were drawn")
    seen: list[str] = []
    for _ in range(trials):
        try:
            c = p.transmit(psi, rng)
        except Exception:
            continue
        if c not in seen:
            seen.append(c)
    if not seen:
        raise NoMessageObserved("every send attempt failed")
    best, best_f = seen[0], -1.0
    for c in sorted(seen):
        f = sum(fidelity(p.receive(c, rng), psi) for _ in range(receive_samples)) / receive_samples
        if f > best_f:
            best, best_f = c, f
    return best, best_f


def reconstructor_from_advice(p: TelegraphProtocol) -> Reconstructor:
    """The receiver half of a protocol, used as a reconstructor."""
    return Reconstructor(p.receive, p.message_budget)


# --------------------------------------------------------------------------
# Noise wrappers
# --------------------------------------------------------------------------


def noised_protocol(p: TelegraphProtocol, eta: float, junk: PureState, mode: str = "receiver") -> TelegraphProtocol:
    """Degrade a protocol to success η by mixing in `junk`.

    receiver: receive returns η·receive(c) + (1−η)|junk⟩⟨junk| exactly.
    sender:   send emits a junk message with probability 1−η; messages carry
              a leading flag bit so junk never collides with a real message.
    """
    junk_rho = junk.to_density().matrix
    if mode == "receiver":

        def receive(c: str, rng: np.random.Generator) -> DensityMatrix:
            good = p.receive(c, rng).matrix
            return DensityMatrix(eta * good + (1 - eta) * junk_rho, junk.dim_tag)

        return TelegraphProtocol(p.send, receive, p.message_budget)
    if mode == "sender":

        def send(psi: PureState, rng: np.random.Generator) -> str:
            if rng.random() < eta:
                return "1" + p.send(psi, rng)
            return "0"

        def receive(c: str, rng: np.random.Generator) -> DensityMatrix:
            if c.startswith("1"):
                return p.receive(c[1:], rng)
            return DensityMatrix(junk_rho, junk.dim_tag)

        return TelegraphProtocol(send, receive, p.message_budget + 1)
    raise ValueError(f"unknown noise mode {mode!r}")


# --------------------------------------------------------------------------
# Orthogonal sets: perfect telegraphing and the no-cloning constraint
# --------------------------------------------------------------------------


def _overlaps(states: Sequence[PureState]) -> np.ndarray:
    vecs = np.column_stack([s.amplitudes for s in states])
    return vecs.conj().T @ vecs


def is_orthogonal_with_duplication(states: Sequence[PureState], tol: float | None = None) -> bool:
    tol = get_tol() if tol is None else tol
    if len(states) < 2:
        return True
    sq = np.abs(_overlaps(states)) ** 2
    return bool(np.all((sq <= tol) | (np.abs(sq - 1.0) <= tol)))


def _representatives(states: Sequence[PureState], tol: float) -> list[np.ndarray]:
    reps: list[np.ndarray] = []
    for s in states:
        if all(abs(np.vdot(r, s.amplitudes)) ** 2 <= tol for r in reps):
            reps.append(s.amplitudes)
    return reps


def completed_basis(states: Sequence[PureState], tol: float | None = None) -> np.ndarray:
    """Orthonormal basis (columns) whose leading columns match the distinct states up to phase."""
    tol = get_tol() if tol is None else tol
    if not is_orthogonal_with_duplication(states, tol):
        raise NotOrthogonal("states are neither orthogonal nor duplicates")
    d = states[0].dim
    reps = _representatives(states, tol)
    # QR of [reps | I] is a full unitary whose leading columns are the
    # representatives up to phase, so the rest completes the basis.
    q, _ = np.linalg.qr(np.column_stack(reps + [np.eye(d)]))
    return q


def perfect_telegraph_for_orthogonal(states: Sequence[PureState]) -> TelegraphProtocol:
    """Measure in a completed basis, send the index, prepare the indexed vector."""
    basis = completed_basis(states)
    d = basis.shape[0]
    width = max(1, math.ceil(math.log2(d)))
    tag = states[0].dim_tag

    def send(psi: PureState, rng: np.random.Generator) -> str:
        probs = np.abs(basis.conj().T @ psi.amplitudes) ** 2
        j = int(rng.choice(d, p=probs / probs.sum()))
        return format(j, f"0{width}b")

    def receive(c: str, rng: np.random.Generator) -> DensityMatrix:
        v = basis[:, int(c, 2)]
        return DensityMatrix(np.outer(v, v.conj()), tag)

    return TelegraphProtocol(send, receive, width)


def required_ancilla_overlap(s: complex) -> complex | None:
    """⟨χᵢ|χⱼ⟩ forced by ⟨ψᵢ|ψⱼ⟩ = ⟨ψᵢ|ψⱼ⟩²⟨χᵢ|χⱼ⟩; None when s = 0 leaves it free."""
    if s == 0:
        return None
    return 1.0 / s


def constraint_satisfiable(s: complex, tol: float | None = None) -> bool:
    """Whether some ancilla overlap of modulus ≤ 1 solves the cloning constraint."""
    tol = get_tol() if tol is None else tol
    if abs(s) <= tol:
        return True
    return abs(required_ancilla_overlap(s)) <= 1.0 + tol


def constraint_violations(states: Sequence[PureState], tol: float | None = None) -> list[tuple[int, int, float]]:
    """Pairs (i, j, |required ⟨χᵢ|χⱼ⟩|) that no unitary cloner can satisfy."""
    tol = get_tol() if tol is None else tol
    g = _overlaps(states)
    out = []
    for i in range(len(states)):
        for j in range(i + 1, len(states)):
            if not constraint_satisfiable(g[i, j], tol):
                out.append((i, j, float(abs(required_ancilla_overlap(g[i, j])))))
    return out
