"""Acceptance criteria 1-13, each at its stated tolerance.

Every test appends one PASS/FAIL line that the terminal summary prints.
"""

import functools
import math
import time

from conftest import ACCEPTANCE_LINES

from nogolab.complexity import composition_fidelity
from nogolab.harness.experiments import RunConfig, run_experiment
from nogolab.nogo.lemma import lemma_bound

TOL = 1e-9

CLONE_CONFIGS = ((2, 1), (4, 2), (5, 2))

# Every experiment a criterion relies on, with the arguments it runs under.
RUNS = {
    **{f"clone-check-{m}-{n}": dict(experiment="clone-check", m=m, n=n, trials=50) for m, n in CLONE_CONFIGS},
    "impostor-identity": dict(experiment="impostor-identity", m=4, n=1, trials=20),
    "impostor-bound": dict(experiment="impostor-bound", m=4, n=1, trials=20),
    "impostor-dist": dict(experiment="impostor-dist", m=3, n=1, trials=100_000),
    "lemma-a": dict(experiment="lemma-a", trials=10_000),
    "nogo-equiv": dict(experiment="nogo-equiv", trials=1000),
    "telegraph-reductions": dict(experiment="telegraph-reductions", trials=10_000),
    "bbbv-swap": dict(experiment="bbbv-swap", m=3, trials=100),
    "collisions": dict(experiment="collisions", m=6, n=2, trials=100, k=4, eta=1.0),
    "rohc": dict(experiment="rohc", m=4, n=2, trials=100),
    "composition": dict(experiment="composition", trials=100),
    "nepke-demo": dict(experiment="nepke-demo", trials=20, k=4),
}


def _timed(key):
    start = time.perf_counter()
    report = run_experiment(RunConfig(seed=0, tol=TOL, **RUNS[key]))
    return report, time.perf_counter() - start


@functools.lru_cache(maxsize=None)
def run(key):
    return _timed(key)


def record(n, ok, detail):
    line = f"{'PASS' if ok else 'FAIL'} criterion {n}: {detail}"
    ACCEPTANCE_LINES.append(line)
    print(line)
    assert ok, line


def test_criterion_01_perfect_clonability():
    fids, uni, inv, secs = [], [], [], 0.0
    for m, n in CLONE_CONFIGS:
        r, dt = run(f"clone-check-{m}-{n}")
        fids.append(r.metrics["min_clone_fidelity"])
        uni.append(r.metrics["max_unitarity_residual"])
        inv.append(r.metrics["max_involution_residual"])
        secs += dt
    ok = min(fids) >= 1 - TOL and max(uni) <= TOL and max(inv) <= TOL and secs < 60
    record(1, ok, f"min fidelity {min(fids):.12f}, unitarity {max(uni):.1e}, involution {max(inv):.1e}, {secs:.1f}s")


def test_criterion_02_stage3_decomposition():
    r, secs = run("impostor-identity")
    dec = r.metrics["max_decomposition_residual"]
    five = r.metrics["max_five_factor_residual"]
    ok = dec <= TOL and five <= TOL and secs < 120
    record(2, ok, f"decomposition residual {dec:.3g}, five-factor residual {five:.3g}, {secs:.1f}s")


def test_criterion_03_eigenvalue_formula():
    r, _ = run("impostor-bound")
    err = r.metrics["max_spectrum_crosscheck_error"]
    env = r.metrics["check.delta_within_envelope"] == 1.0
    ok = err <= TOL and env
    record(3, ok, f"spectrum cross-check error {err:.1e}, envelope margin {r.metrics['min_envelope_margin']:.3f}")


def test_criterion_04_sampling_equivalence():
    r, secs = run("impostor-dist")
    p, pm = r.metrics["p_value"], r.metrics["mutated_p_value"]
    ok = p > 1e-3 and pm < 1e-3 and secs < 60
    record(4, ok, f"faithful p {p:.4f}, mutated p {pm:.3g}, {secs:.1f}s")


def test_criterion_05_lemma():
    r, _ = run("lemma-a")
    slack = r.metrics["min_slack"]
    example = lemma_bound(0.9, 0.9)
    ok = slack >= -TOL and math.isclose(example, 0.61, abs_tol=1e-12)
    record(5, ok, f"min slack {slack:.3g} over 1e4 triples, (0.9, 0.9) -> {example:.12f}")


def test_criterion_06_orthogonality_equivalence():
    r, _ = run("nogo-equiv")
    m = r.metrics
    ok = (
        m["orthogonal_predicate_rate"] == 1.0
        and m["min_telegraph_fidelity"] >= 1 - TOL
        and m["min_clone_fidelity"] >= 1 - TOL
        and m["nonorthogonal_predicate_rate"] == 0.0
        and m["nonorthogonal_violation_rate"] == 1.0
    )
    record(6, ok, f"telegraph {m['min_telegraph_fidelity']:.12f}, clone {m['min_clone_fidelity']:.12f}, "
                  f"non-orthogonal violations {m['nonorthogonal_violation_rate']:.3f}")


def test_criterion_07_reductions():
    r, _ = run("telegraph-reductions")
    m = r.metrics
    clone = min(m["min_clone_margin"], m["min_clone_margin_measured"])
    recon = min(m["min_reconstruction_margin"], m["min_reconstruction_margin_measured"])
    ok = clone >= -TOL and recon >= -TOL
    record(7, ok, f"min clone margin {clone:.4f}, min reconstruction margin {recon:.4f}")


def test_criterion_08_bbbv():
    r, _ = run("bbbv-swap")
    m = r.metrics
    d, tv, z = m["distance_within_epsilon_rate"], m["tv_within_4epsilon_rate"], m["z_clone_tv_bound_rate"]
    ok = d == 1.0 and tv == 1.0 and z == 1.0
    record(8, ok, f"distance <= eps on {d:.2f}, TV <= 4 eps on {tv:.2f}, z-clone config {z:.2f}")


def test_criterion_09_collisions():
    r, _ = run("collisions")
    rate = r.metrics["success_rate"]
    ok = rate >= 0.5 and r.metrics["runs_per_meta_run"] == 32
    record(9, ok, f"success in {rate:.2f} of 100 meta-runs, mean distinct {r.metrics['mean_distinct']:.2f}")


def test_criterion_10_rohc():
    r, _ = run("rohc")
    comp, sound = r.metrics["min_completeness"], r.metrics["max_no_acceptance_norm"]
    ok = abs(comp - 1) <= TOL and sound <= TOL
    record(10, ok, f"min completeness {comp:.12f}, NO acceptance norm {sound:.1e}")


def test_criterion_11_composition():
    r, _ = run("composition")
    value = composition_fidelity(0.9, 0.9)
    slack = r.metrics["min_slack"]
    ok = abs(value - 0.45332) <= 1e-5 and slack >= -TOL
    record(11, ok, f"composition_fidelity(0.9, 0.9) = {value:.6f}, min exact-mode slack {slack:.3g}")


def test_criterion_12_nepke():
    r, _ = run("nepke-demo")
    chain, par = r.metrics["min_chain_success_probability"], r.metrics["min_parallel_success_probability"]
    ok = abs(chain - 1) <= TOL and abs(par - 1) <= TOL and r.passed
    record(12, ok, f"8-step chain {chain:.12f}, 4-way parallel {par:.12f}")


def test_criterion_13_reproducibility():
    differing = [key for key in RUNS if _timed(key)[0].comparable() != run(key)[0].comparable()]
    record(13, not differing, f"{len(RUNS) - len(differing)}/{len(RUNS)} experiments bit-identical on re-run"
           + (f", differing: {differing}" if differing else ""))
