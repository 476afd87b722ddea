"""Acceptance checks, one per primary criterion.

Each test records a ``PASS``/``FAIL`` line; the lines are printed in the
pytest terminal summary (see conftest.py) and when the module is run as a
script.
"""

import itertools
import math
import time

import numpy as np
import pytest

import oracles
from conftest import trace_from_labels
from gazesa.baselines import TransitionModel, gte, sge
from gazesa.cli import main as cli_main
from gazesa.numerics import kendall, mutual_information, pca_first_component, pearson, spearman, student_t_two_sided
from gazesa.scoring import sa_l1, sa_l2
from gazesa.segmentation import segment_runs
from gazesa.study import correlate
from gazesa.synth import ramp_cohort, ramp_thetas

RESULTS: list[str] = []


def record(name: str, ok: bool, detail: str) -> None:
    line = f"{'PASS' if ok else 'FAIL'}  {name}: {detail}"
    RESULTS.append(line)
    print(line)
    assert ok, line


def test_mi_oracle():
    start = time.perf_counter()
    rng = np.random.default_rng(2024)
    x, y = rng.multivariate_normal([0, 0], [[1, 0.8], [0.8, 1]], 5000).T
    dep = mutual_information(x, y)
    u, v = rng.standard_normal((2, 5000))
    ind = mutual_information(u, v)
    elapsed = time.perf_counter() - start
    target = oracles.gaussian_mi_bits(0.8)
    ok = abs(dep - target) <= 0.10 and abs(ind) <= 0.05 and elapsed < 10
    record("MI oracle", ok, f"rho=0.8 -> {dep:.4f} (analytic {target:.4f}), rho=0 -> {ind:.4f}, {elapsed:.2f}s")


def _chain(P):
    P = np.asarray(P, dtype=float)
    k = len(P)
    return TransitionModel(tuple(map(str, range(k))), np.zeros((k, k), dtype=np.int64), P, np.full(k, 1 / k))


def test_entropy_oracles():
    start = time.perf_counter()
    flip = _chain([[0, 1], [1, 0]])
    sym = np.full((4, 4), 1 / 3)
    np.fill_diagonal(sym, 0)
    four = _chain(sym)
    vals = (gte(flip), sge(flip), gte(four), sge(four))
    elapsed = time.perf_counter() - start
    ok = (
        abs(vals[0]) <= 1e-9
        and abs(vals[1] - 1.0) <= 1e-9
        and abs(vals[2] - math.log2(3)) <= 1e-6
        and abs(vals[3] - 2.0) <= 1e-6
        and elapsed < 1
    )
    record("Entropy oracles", ok, "GTE/SGE = " + ", ".join(f"{v:.6f}" for v in vals) + f", {elapsed:.3f}s")


def _seg(s):
    return segment_runs(trace_from_labels([None if c == "." else c for c in s]))


def test_hand_computed_scores():
    phi = oracles.normal_pdf
    cases = [
        (sa_l1(_seg("AAABBCCCCA")), 0.7),
        (sa_l1(_seg("AAAAAAAAAA")), 0.0),
        (sa_l1(_seg("AB")), 0.5),
        (sa_l2(_seg("XXXXAABBBB")), (2 * phi(-1) + 4 * phi(1)) / 10),
        (sa_l2(_seg("XXXXAAABBB")), 6 * phi(0) / 10),
        (sa_l2(_seg("AAAAAAAAAA")), 0.0),
    ]
    worst = max(abs(got - want) for got, want in cases)
    record("Hand-computed score vectors", worst <= 1e-9, f"6 examples, max error {worst:.1e}")


def _orient_ok(v):
    s = v.sum()
    if s > 1e-12:
        return True
    if s < -1e-12:
        return False
    return v[np.flatnonzero(np.abs(v) > 1e-12)[0]] > 0


def test_pca_oracle():
    rng = np.random.default_rng(77)
    worst = 0.0
    for k, top in ((2, oracles.top_eigenpair_2x2), (3, oracles.top_eigenpair_3x3)):
        for _ in range(250):
            X = rng.normal(size=(15, k)) @ rng.normal(size=(k, k))
            Z = oracles.zscore_population(X)
            _, vec = top(Z.T @ Z / len(Z))
            vec = oracles.orient_sum_positive(vec)
            model, scores = pca_first_component(X)
            worst = max(worst, np.abs(model.loadings - vec).max(), np.abs(scores - Z @ vec).max())
    sign_ok = 0
    for _ in range(1000):
        n, k = int(rng.integers(2, 25)), int(rng.integers(2, 6))
        model, _ = pca_first_component(rng.normal(size=(n, k)) * rng.uniform(0.1, 10, k))
        sign_ok += _orient_ok(model.loadings)
    ok = worst <= 1e-9 and sign_ok == 1000
    record("PCA oracle", ok, f"max deviation {worst:.1e} on 500 fits, sign rule {sign_ok}/1000")


def test_correlation_oracles():
    start = time.perf_counter()
    kendall_ok = True
    count = 0
    for n in range(3, 9):
        base = list(range(n))
        for perm in itertools.permutations(base):
            count += 1
            if kendall(base, perm).coefficient != oracles.kendall_tau_b_bruteforce(base, perm):
                kendall_ok = False
    rng = np.random.default_rng(5)
    spearman_ok = True
    for _ in range(200):
        x = rng.integers(0, 6, size=20).astype(float)
        y = rng.integers(0, 6, size=20).astype(float)
        ranked = pearson(oracles.midranks_bruteforce(x), oracles.midranks_bruteforce(y)).coefficient
        spearman_ok &= spearman(x, y).coefficient == ranked
    p_s = student_t_two_sided(0.69 * math.sqrt(54 / (1 - 0.69**2)), 54)
    p_p = student_t_two_sided(0.67 * math.sqrt(54 / (1 - 0.67**2)), 54)
    elapsed = time.perf_counter() - start
    ok = kendall_ok and spearman_ok and p_s < 1e-8 and p_p < 1e-7 and elapsed < 5
    record(
        "Correlation oracles",
        ok,
        f"Kendall exact on {count} permutations: {kendall_ok}, Spearman=Pearson(ranks): {spearman_ok}, "
        f"p(0.69)={p_s:.2e}, p(0.67)={p_p:.2e}, {elapsed:.2f}s",
    )


@pytest.mark.slow
def test_cohort_property():
    start = time.perf_counter()
    thetas = ramp_thetas(56)
    report = correlate(ramp_cohort(56, seed=0))
    elapsed = time.perf_counter() - start
    by_id = {tm.trial_id: tm for tm in report.trials}
    ordered = [by_id[f"t{i + 1:02d}"] for i in range(56)]
    overall = [tm.values["sa_overall"] for tm in ordered]
    track = spearman(thetas, overall)
    perf = report.row("sa_overall").results["spearman"]
    ok = (
        track.coefficient >= 0.8
        and track.p_value < 1e-3
        and perf.coefficient > 0
        and perf.p_value < 0.01
        and elapsed < 60
    )
    record(
        "End-to-end cohort property",
        ok,
        f"Spearman(theta, overall)={track.coefficient:.3f} (p={track.p_value:.1e}), "
        f"Spearman(overall, performance)={perf.coefficient:.3f} (p={perf.p_value:.1e}), {elapsed:.1f}s",
    )


def _snapshot(root):
    return {p.relative_to(root).as_posix(): p.read_bytes() for p in sorted(root.rglob("*")) if p.is_file()}


@pytest.mark.slow
def test_determinism(tmp_path):
    snaps = []
    for run, jobs in enumerate((1, 1, 8)):
        root = tmp_path / f"run{run}"
        data = root / "data"
        codes = [
            cli_main(["synth", "--ramp", "12", "--seed", "11", "--duration-s", "10", "--jobs", str(jobs), "--out", str(data)]),
            cli_main(["score", str(data / "manifest.csv"), "--jobs", str(jobs), "--out", str(root / "score")]),
            cli_main(["correlate", str(data / "manifest.csv"), "--jobs", str(jobs), "--out", str(root / "corr"),
                      "--permutation", "99", "--radar", "t01,t12"]),
        ]
        assert codes == [0, 0, 0]
        snaps.append(_snapshot(root))
    ok = snaps[0] == snaps[1] == snaps[2] and len(snaps[0]) > 20
    record("Determinism", ok, f"{len(snaps[0])} files byte-identical across two --jobs 1 runs and one --jobs 8 run")


if __name__ == "__main__":
    import sys

    sys.exit(pytest.main([__file__, "-q", "-s"]))
