"""Impostor functions and the ancilla-sandwich approximation of their cloning oracle.

Register order for every three-register operator here is
(ancilla bit, first augmented register, second augmented register), so the
flat index of |b⟩|x⟩|y⟩ is (b·D + x)·D + y with D = 2**m + 1.
"""

from __future__ import annotations

import math
from collections import Counter
from dataclasses import dataclass

import numpy as np

from .errors import CodomainTooSmall, InconsistentInputs, InsufficientTrials, InvalidParameters, SparseBins
from .qcore import OperatorMatrix, apply_on, augmented_dim, operator_norm
from .report import ExperimentReport
from .scheme import (
    ClassicalFunction,
    cloning_oracle_for_set,
    full_cloning_oracle,
    preimage_state,
)

P0 = np.diag([1.0, 0.0])
P1 = np.diag([0.0, 1.0])
ENVELOPE_NOTE = "the 4·max|λ| envelope is derived here, not quoted"


@dataclass(frozen=True)
class ImpostorBundle:
    h: ClassicalFunction
    h_private: ClassicalFunction
    h_impostor: ClassicalFunction
    z: int
    k_z: int
    k_i: tuple[int, ...]
    k_z_to_i: tuple[int, ...]

    @property
    def m(self) -> int:
        return self.h.m

    @property
    def n(self) -> int:
        return self.h.n

    @property
    def dim(self) -> int:
        return augmented_dim(self.h.m)


def sample_private_function(h: ClassicalFunction, z: int, rng: np.random.Generator) -> ClassicalFunction:
    """Uniform entries over {0,1}ⁿ ∖ {z}."""
    size = 2**h.n
    if size < 2:
        raise CodomainTooSmall("codomain has a single value")
    r = rng.integers(0, size - 1, size=h.domain_size)
    r = r + (r >= z)
    return ClassicalFunction(h.m, h.n, tuple(r.tolist()))


def build_impostor(h: ClassicalFunction, h_private: ClassicalFunction, z: int) -> ClassicalFunction:
    if (h.m, h.n) != (h_private.m, h_private.n):
        raise InconsistentInputs("function widths differ")
    if z in h_private.table:
        raise InconsistentInputs(f"private function outputs the target label {z}")
    table = tuple(z if hx == z else px for hx, px in zip(h.table, h_private.table))
    return ClassicalFunction(h.m, h.n, table)


def bundle_from(h: ClassicalFunction, h_private: ClassicalFunction, z: int) -> ImpostorBundle:
    imp = build_impostor(h, h_private, z)
    size = 2**h.n
    k_i = [0] * size
    k_z_to_i = [0] * size
    for hx, px in zip(h.table, h_private.table):
        if hx == z:
            k_z_to_i[px] += 1
        else:
            k_i[px] += 1
    k_z = h.table.count(z)
    k_i[z] = k_z
    return ImpostorBundle(h, h_private, imp, z, k_z, tuple(k_i), tuple(k_z_to_i))


def make_bundle(h: ClassicalFunction, z: int, rng: np.random.Generator) -> ImpostorBundle:
    return bundle_from(h, sample_private_function(h, z, rng), z)


def sample_bundle(m: int, n: int, rng: np.random.Generator) -> ImpostorBundle:
    """Random h, label z = h(x) for uniform x, and a fresh private function."""
    from .scheme import sample_label, sample_random_function

    h = sample_random_function(m, n, rng)
    return make_bundle(h, sample_label(h, rng), rng)


# --------------------------------------------------------------------------
# Sampling equivalence
# --------------------------------------------------------------------------


def _encode_tables(tables: np.ndarray, n: int) -> np.ndarray:
    weights = (2**n) ** np.arange(tables.shape[1], dtype=np.int64)
    return tables.astype(np.int64) @ weights


def _draw_conditioned(m: int, n: int, count: int, rng: np.random.Generator) -> tuple[np.ndarray, np.ndarray]:
    """(z, H) with z uniform and H uniform, rejecting draws where z ∉ image(H)."""
    zs, hs = [], []
    have = 0
    while have < count:
        batch = max(2 * (count - have), 64)
        z = rng.integers(0, 2**n, size=batch)
        h = rng.integers(0, 2**n, size=(batch, 2**m))
        ok = (h == z[:, None]).any(axis=1)
        zs.append(z[ok])
        hs.append(h[ok])
        have += int(ok.sum())
    return np.concatenate(zs)[:count], np.concatenate(hs)[:count]


def _draw_constructed(
    m: int, n: int, count: int, rng: np.random.Generator, mutate: bool = False
) -> tuple[np.ndarray, np.ndarray]:
    """(z, H_impostor) built from a conditioned (z, H) and a private function.

    With `mutate` the private function may output z, which breaks the
    construction and is used as a negative control.
    """
    z, h = _draw_conditioned(m, n, count, rng)
    if mutate:
        private = rng.integers(0, 2**n, size=h.shape)
    else:
        private = rng.integers(0, 2**n - 1, size=h.shape)
        private = private + (private >= z[:, None])
    imp = np.where(h == z[:, None], h, private)
    return z, imp


def valid_pair_bins(m: int, n: int) -> np.ndarray:
    """Bin ids z·|tables| + table for every pair with z in the table's image."""
    tables = np.array(np.meshgrid(*[np.arange(2**n)] * 2**m, indexing="ij")).reshape(2**m, -1).T
    codes = _encode_tables(tables, n)
    bins = []
    for z in range(2**n):
        hit = (tables == z).any(axis=1)
        bins.append(z * (2**n) ** (2**m) + codes[hit])
    return np.sort(np.concatenate(bins))


def sampling_equivalence_test(
    m: int,
    n: int,
    trials: int,
    rng: np.random.Generator,
    mutate: bool = False,
    self_test: bool = False,
    alpha: float = 1e-3,
    seed: int | None = None,
) -> ExperimentReport:
    """Two-sample chi-square on joint (z, full table) outcomes.

    Arm A is the impostor construction (mutated when asked); arm B is the
    conditioned uniform oracle, or the construction again for a self test.
    """
    from .harness.stats import chi_square, chi_square_homogeneity

    if m * 2**n > 24:
        raise InvalidParameters("joint outcome space too large to bin")
    bins = valid_pair_bins(m, n)
    if trials / bins.size < 5:
        raise InsufficientTrials(f"{trials} trials over {bins.size} bins leaves expected counts below 5")
    za, ha = _draw_constructed(m, n, trials, rng, mutate)
    if self_test:
        zb, hb = _draw_constructed(m, n, trials, rng, mutate)
    else:
        zb, hb = _draw_conditioned(m, n, trials, rng)
    span = (2**n) ** (2**m)
    codes_a = za * span + _encode_tables(ha, n)
    codes_b = zb * span + _encode_tables(hb, n)
    idx_a = np.searchsorted(bins, codes_a)
    idx_b = np.searchsorted(bins, codes_b)
    idx_a = np.minimum(idx_a, bins.size - 1)
    idx_b = np.minimum(idx_b, bins.size - 1)
    outside = int((bins[idx_a] != codes_a).sum() + (bins[idx_b] != codes_b).sum())
    obs_a = np.bincount(idx_a[bins[idx_a] == codes_a], minlength=bins.size)
    obs_b = np.bincount(idx_b[bins[idx_b] == codes_b], minlength=bins.size)
    try:
        stat, p = chi_square_homogeneity(obs_a, obs_b)
    except SparseBins as exc:
        raise InsufficientTrials(str(exc)) from exc
    uniform = np.full(bins.size, 1.0 / bins.size)
    stat_a, p_a = chi_square(obs_a, uniform, int(obs_a.sum()))
    metrics = {
        "statistic": stat,
        "p_value": p,
        "bins": float(bins.size),
        "outside_support": float(outside),
        "arm_a_uniform_p": p_a,
        "arm_a_uniform_statistic": stat_a,
    }
    params = {"m": m, "n": n, "trials": trials, "mutate": mutate, "self_test": self_test}
    return ExperimentReport.from_checks(
        "impostor-dist", params, seed, metrics, {"p_above_floor": p > alpha}, bound=alpha
    )


# --------------------------------------------------------------------------
# Operators
# --------------------------------------------------------------------------


def exact_impostor_cloner(bundle: ImpostorBundle) -> OperatorMatrix:
    return full_cloning_oracle(bundle.h_impostor)


def private_cloner(bundle: ImpostorBundle) -> OperatorMatrix:
    return full_cloning_oracle(bundle.h_private)


def target_cloner(bundle: ImpostorBundle) -> OperatorMatrix:
    """C_z, or the identity when z has no preimage (nothing to clone)."""
    states = [preimage_state(bundle.h, bundle.z)] if bundle.k_z else []
    return cloning_oracle_for_set(states, bundle.m)


def _layout(bundle: ImpostorBundle) -> tuple[int, int, int]:
    D = bundle.dim
    return (2, D, D)


def build_u1(bundle: ImpostorBundle) -> OperatorMatrix:
    D = bundle.dim
    marks = np.zeros(D, dtype=bool)
    marks[: bundle.h.domain_size] = np.asarray(bundle.h.table) == bundle.z
    flip = np.repeat(marks, D)
    size = 2 * D * D
    idx = np.arange(size)
    b, rest = idx // (D * D), idx % (D * D)
    target = np.where(flip[rest], (1 - b) * D * D + rest, idx)
    mat = np.zeros((size, size))
    mat[target, idx] = 1.0
    return OperatorMatrix(mat, "unitary", _layout(bundle))


def _block_controlled(one: OperatorMatrix, zero: OperatorMatrix, bundle: ImpostorBundle) -> OperatorMatrix:
    mat = np.kron(P1, one.matrix) + np.kron(P0, zero.matrix)
    return OperatorMatrix(mat, "unitary", _layout(bundle))


def build_u2(bundle: ImpostorBundle) -> OperatorMatrix:
    return _block_controlled(target_cloner(bundle), exact_impostor_cloner(bundle), bundle)


def build_u2_hat(bundle: ImpostorBundle) -> OperatorMatrix:
    return _block_controlled(target_cloner(bundle), private_cloner(bundle), bundle)


def efficient_impostor_factors(bundle: ImpostorBundle) -> list[tuple[str, OperatorMatrix, str | None]]:
    """(name, operator, oracle queried) in application order."""
    u1 = build_u1(bundle)
    return [("U1", u1, "h"), ("U2_hat", build_u2_hat(bundle), "z_clone"), ("U1", u1, "h")]


def query_budget(factors: list[tuple[str, OperatorMatrix, str | None]]) -> dict[str, int]:
    return dict(Counter(oracle for _, _, oracle in factors if oracle))


def efficient_impostor_cloner(bundle: ImpostorBundle) -> OperatorMatrix:
    """U1 · Û2 · U1."""
    out = None
    for _, op, _ in efficient_impostor_factors(bundle):
        out = op if out is None else op @ out
    return OperatorMatrix(out.matrix, "unitary", _layout(bundle))


def ancilla_leakage(op: OperatorMatrix) -> float:
    """Norm of the ancilla-flipping blocks of a three-register operator."""
    half = op.dim // 2
    m = op.matrix
    return max(operator_norm(m[:half, half:]), operator_norm(m[half:, :half]))


def controlled_target_clone_via_swap(bundle: ImpostorBundle, vec: np.ndarray) -> np.ndarray:
    """Controlled C_z built from one uncontrolled call and the fixed point |⊥⟩|⊥⟩.

    `vec` lives on (control, X, Y).  A fresh pair register (X', Y') starts in
    |⊥⟩|⊥⟩; a 0-controlled swap moves the input out of the oracle's way, the
    oracle is applied to (X, Y), and the swap is undone.  Returns the state on
    (control, X, Y) after checking the pair register came back to |⊥⟩|⊥⟩.
    """
    D = bundle.dim
    bot = D - 1
    pair = np.zeros(D * D)
    pair[bot * D + bot] = 1.0
    dims = (2, D * D, D * D)
    psi = np.kron(vec, pair).reshape(dims)
    swapped = psi.copy()
    swapped[0] = psi[0].T
    cz = target_cloner(bundle).matrix
    out = apply_on(cz, swapped.reshape(-1), dims, (1,)).reshape(dims)
    back = out.copy()
    back[0] = out[0].T
    residual = back.copy()
    residual[:, :, bot * D + bot] = 0.0
    if np.linalg.norm(residual) > 1e-9:
        raise AssertionError("swap register did not return to ⊥⊥")
    return back[:, :, bot * D + bot].reshape(-1)


# --------------------------------------------------------------------------
# The rotation U3
# --------------------------------------------------------------------------


@dataclass(frozen=True)
class RotationPlane:
    label: int
    k_i: int
    k_z_to_i: int
    theta: float
    lam: float
    overlap: float
    explicit_overlap: float
    degenerate: bool


def _uniform_on(D: int, support: list[int]) -> np.ndarray | None:
    if not support:
        return None
    v = np.zeros(D)
    v[support] = 1.0 / math.sqrt(len(support))
    return v


def _plane_vectors(bundle: ImpostorBundle, i: int) -> tuple[np.ndarray | None, np.ndarray | None, np.ndarray | None]:
    """(ψ_i of the impostor, ψ̂_i of the private function, ψ_{z→i})."""
    D = bundle.dim
    h, hp, hi = bundle.h.table, bundle.h_private.table, bundle.h_impostor.table
    psi = _uniform_on(D, [x for x, v in enumerate(hi) if v == i])
    hat = _uniform_on(D, [x for x, v in enumerate(hp) if v == i])
    moved = _uniform_on(D, [x for x in range(len(h)) if h[x] == bundle.z and hp[x] == i])
    return psi, hat, moved


def rotation_spectrum(bundle: ImpostorBundle) -> list[RotationPlane]:
    planes = []
    for i in range(2**bundle.n):
        if i == bundle.z:
            continue
        k, kz = bundle.k_i[i], bundle.k_z_to_i[i]
        if k + kz == 0:
            continue
        cos = math.sqrt(k / (k + kz))
        psi, hat, _ = _plane_vectors(bundle, i)
        explicit = 0.0 if psi is None else float(psi @ hat)
        planes.append(
            RotationPlane(
                label=i,
                k_i=k,
                k_z_to_i=kz,
                theta=math.acos(min(cos, 1.0)),
                lam=math.sqrt(max(2.0 * (1.0 - cos), 0.0)),
                overlap=cos,
                explicit_overlap=explicit,
                degenerate=(k == 0),
            )
        )
    return planes


def build_u3(bundle: ImpostorBundle) -> OperatorMatrix:
    """Plane rotations ψ_i ↦ cos θ ψ_i + sin θ ψ_{z→i}, identity elsewhere.

    A plane with k_i = 0 has no ψ_i to rotate into; the displayed rotation
    would not be unitary there, so such planes are left untouched.
    """
    D = bundle.dim
    u = np.eye(D)
    for plane in rotation_spectrum(bundle):
        if plane.degenerate or plane.k_z_to_i == 0:
            continue
        psi, _, moved = _plane_vectors(bundle, plane.label)
        c, s = math.cos(plane.theta), math.sin(plane.theta)
        u -= np.outer(psi, psi) + np.outer(moved, moved)
        u += np.outer(c * psi + s * moved, psi) + np.outer(-s * psi + c * moved, moved)
    return OperatorMatrix(u, "general")


def five_factor_product(bundle: ImpostorBundle) -> np.ndarray:
    """U1 (U3† ⊗ U3†) U2 (U3 ⊗ U3) U1, read as an ordinary operator product."""
    u1 = build_u1(bundle).matrix
    u2 = build_u2(bundle).matrix
    u3 = build_u3(bundle).matrix
    w = np.kron(np.eye(2), np.kron(u3, u3))
    return u1 @ w.conj().T @ u2 @ w @ u1


def corrected_product(bundle: ImpostorBundle) -> np.ndarray:
    """U1 [P1⊗C_z + P0⊗(U3⊗U3) C' (U3⊗U3)†] U1 with C' the impostor cloner without ψ_z.

    This is the conjugation that actually maps the impostor preimage set,
    minus the target label, onto the private preimage set.
    """
    u1 = build_u1(bundle).matrix
    u3 = build_u3(bundle).matrix
    others = [preimage_state(bundle.h_impostor, i) for i in bundle.h_impostor.image() if i != bundle.z]
    c_rest = cloning_oracle_for_set(others, bundle.m).matrix
    w = np.kron(u3, u3)
    inner = np.kron(P1, target_cloner(bundle).matrix) + np.kron(P0, w @ c_rest @ w.conj().T)
    return u1 @ inner @ u1


def _anc0(mat: np.ndarray) -> np.ndarray:
    """Columns for ancilla-|0⟩ inputs."""
    return mat[:, : mat.shape[1] // 2]


def _norm_pair(mat: np.ndarray) -> tuple[float, float]:
    return operator_norm(mat), float(np.linalg.norm(_anc0(mat), 2))


def decomposition_residuals(bundle: ImpostorBundle) -> dict[str, float]:
    u1 = build_u1(bundle).matrix
    u2 = build_u2(bundle).matrix
    target = np.kron(np.eye(2), exact_impostor_cloner(bundle).matrix)
    full, anc0 = _norm_pair(u1 @ u2 @ u1 - target)
    return {
        "decomposition_residual": full,
        "decomposition_residual_anc0": anc0,
        "commutator_u1_u2": operator_norm(u1 @ u2 - u2 @ u1),
    }


def hat_distance_check(bundle: ImpostorBundle, seed: int | None = None) -> ExperimentReport:
    """Distance of the efficient cloner from I⊗C_impostor against the rotation spectrum."""
    from .qcore import get_tol

    tol = get_tol()
    planes = rotation_spectrum(bundle)
    lam_max = max((p.lam for p in planes), default=0.0)
    c_hat = efficient_impostor_cloner(bundle).matrix
    target = np.kron(np.eye(2), exact_impostor_cloner(bundle).matrix)
    delta, delta0 = _norm_pair(c_hat - target)
    u3 = build_u3(bundle).matrix
    u3_res = operator_norm(u3.T.conj() @ u3 - np.eye(u3.shape[0]))
    five, five0 = _norm_pair(c_hat - five_factor_product(bundle))
    fixed, fixed0 = _norm_pair(c_hat - corrected_product(bundle))
    spectrum_err = max((abs(p.overlap - p.explicit_overlap) for p in planes), default=0.0)
    metrics = {
        "delta": delta,
        "delta_anc0": delta0,
        "max_lambda": lam_max,
        "envelope": 4 * lam_max,
        "u3_unitarity_residual": u3_res,
        "five_factor_residual": five,
        "five_factor_residual_anc0": five0,
        "corrected_identity_residual": fixed,
        "corrected_identity_residual_anc0": fixed0,
        "spectrum_crosscheck_error": spectrum_err,
        "ancilla_leakage": ancilla_leakage(OperatorMatrix(c_hat)),
        "degenerate_planes": float(sum(p.degenerate and p.k_z_to_i > 0 for p in planes)),
        "k_z": float(bundle.k_z),
    }
    checks = {
        "delta_within_envelope": delta <= 4 * lam_max + tol,
        "u3_unitary": u3_res <= tol,
        "five_factor_identity": five <= tol,
    }
    params = {"m": bundle.m, "n": bundle.n, "z": bundle.z}
    return ExperimentReport.from_checks(
        "impostor-bound", params, seed, metrics, checks, bound=4 * lam_max, notes=(ENVELOPE_NOTE,)
    )


# --------------------------------------------------------------------------
# Preimage-ratio claim
# --------------------------------------------------------------------------


@dataclass(frozen=True)
class RatioCounts:
    m: int
    n: int
    z: int
    k_z: int
    k_i: tuple[int, ...]
    k_z_to_i: tuple[int, ...]


def ratio_counts(bundle: ImpostorBundle) -> RatioCounts:
    return RatioCounts(bundle.m, bundle.n, bundle.z, bundle.k_z, bundle.k_i, bundle.k_z_to_i)


def sample_ratio_counts(m: int, n: int, rng: np.random.Generator) -> RatioCounts:
    """Counts for a random bundle without building any state or operator."""
    size = 2**n
    h = rng.integers(0, size, size=2**m)
    z = int(h[rng.integers(0, 2**m)])
    private = rng.integers(0, size - 1, size=2**m)
    private = private + (private >= z)
    hit = h == z
    k_i = np.bincount(private[~hit], minlength=size)
    k_z_to_i = np.bincount(private[hit], minlength=size)
    k_z = int(hit.sum())
    k_i[z] = k_z
    return RatioCounts(m, n, z, k_z, tuple(k_i.tolist()), tuple(k_z_to_i.tolist()))


def ratio_bound(n: int) -> float:
    return 72 * n * 2.0**-n


def ratio_bound_report(source: ImpostorBundle | RatioCounts, seed: int | None = None) -> ExperimentReport:
    rc = ratio_counts(source) if isinstance(source, ImpostorBundle) else source
    m, n, z = rc.m, rc.n, rc.z
    others = [i for i in range(2**n) if i != z]
    ratios = [
        rc.k_z_to_i[i] / (rc.k_i[i] + rc.k_z_to_i[i]) for i in others if rc.k_i[i] + rc.k_z_to_i[i] > 0
    ]
    max_ratio = max(ratios, default=0.0)
    bound = ratio_bound(n)
    base = 2.0 ** (m - n)
    metrics = {
        "max_ratio": max_ratio,
        "bound": bound,
        "vacuous": float(bound > 1),
        "sub_a_all_k_i_large": float(all(rc.k_i[i] > 0.5 * base for i in others)),
        "sub_b_k_z_window": float(0.5 * base < rc.k_z < 3 * base),
        "sub_c_all_moved_small": float(all(rc.k_z_to_i[i] < 36 * n * 2.0 ** (m - 2 * n) for i in others)),
        "k_z": float(rc.k_z),
    }
    checks = {"ratio_within_bound": max_ratio <= bound, "ratio_at_most_one": max_ratio <= 1.0}
    return ExperimentReport.from_checks("ratio-bound", {"m": m, "n": n, "z": z}, seed, metrics, checks, bound=bound)
