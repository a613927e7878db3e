"""Acceptance suite: one test per exit criterion, one printed line each.

Defaults unless a criterion pins otherwise: K=50, n_arrivals=500,
sigma_rating=1.0, sigma_quality=0.8, CRN on, R=2000 replicates, master
seed 20260809. Directional criteria use three-combined-standard-error
margins; the analytic fixture and the determinism checks are exact. The
full-grid criteria take a few minutes of compute.
"""

import itertools
import math
import os
import time

import numpy as np
import pytest

from hijack_sim import (
    AttackKind,
    ItemCatalog,
    Orientation,
    RatingLedger,
    SimConfig,
    SweepSpec,
    choice_probabilities,
    final_ranking,
    run_condition,
    run_conditions,
    run_sweep,
    run_trial_pair,
)
from hijack_sim.results import rows_from_summaries, write_results

MASTER_SEED = 20260809
R = 2000
WORKERS = max(1, min(4, os.cpu_count() or 1))
BETAS = (1.5, 2.5, 4.0)
QS = (0.0, 0.1, 0.2, 0.3, 0.4, 0.5)


def _report(number: int, name: str, checks: list[tuple[bool, str]]) -> None:
    ok = all(flag for flag, _ in checks)
    print(f"criterion {number} ({name}): {'PASS' if ok else 'FAIL'}")
    for flag, detail in checks:
        assert flag, f"criterion {number} ({name}): {detail}"


def _combined_se(a, b) -> float:
    return math.hypot(a, b)


def _spearman(xs, ys) -> float:
    """Rank correlation; inputs here are continuous, so plain ranks suffice."""

    def ranks(values):
        order = sorted(range(len(values)), key=lambda i: values[i])
        out = [0.0] * len(values)
        for position, i in enumerate(order, start=1):
            out[i] = float(position)
        return out

    rx, ry = ranks(xs), ranks(ys)
    mean_x = sum(rx) / len(rx)
    mean_y = sum(ry) / len(ry)
    cov = sum((a - mean_x) * (b - mean_y) for a, b in zip(rx, ry))
    var_x = sum((a - mean_x) ** 2 for a in rx)
    var_y = sum((b - mean_y) ** 2 for b in ry)
    return cov / math.sqrt(var_x * var_y)


@pytest.fixture(scope="session")
def grid():
    """Monte Carlo summaries at every grid point the criteria touch."""
    points = []
    for beta in BETAS:
        for m_seed in (0, 10):
            points.append((AttackKind.SPARSE, m_seed, beta, 0.0))
    for q in QS[1:]:
        points.append((AttackKind.SPARSE, 0, 2.5, q))
    for beta in (1.5, 4.0):
        points.append((AttackKind.SPARSE, 0, beta, 0.3))
    points.append((AttackKind.BROAD, 0, 2.5, 0.0))
    configs = [
        SimConfig(K=50, m_seed=m, beta=b, q=q, attack=kind)
        for kind, m, b, q in points
    ]
    summaries = run_conditions(configs, R, MASTER_SEED, workers=WORKERS)
    return dict(zip(points, summaries))


def test_criterion_1_fragile_regime(grid):
    checks = []
    for beta in BETAS:
        low = grid[(AttackKind.SPARSE, 0, beta, 0.0)]
        high = grid[(AttackKind.SPARSE, 10, beta, 0.0)]
        margin = 3 * low.se_delta_rmse
        checks.append((
            low.mean_delta_rmse > margin,
            f"beta={beta}: delta_rmse(m_seed=0)={low.mean_delta_rmse:.4f} "
            f"not > 0 by 3 SE ({margin:.4f})",
        ))
        gap = low.mean_delta_rmse - high.mean_delta_rmse
        combined = 3 * _combined_se(low.se_delta_rmse, high.se_delta_rmse)
        checks.append((
            gap > combined,
            f"beta={beta}: m_seed=0 vs 10 gap {gap:.4f} not > 3 combined SE "
            f"({combined:.4f})",
        ))
    _report(1, "fragile-regime effect", checks)


def test_criterion_2_density_robustness(grid):
    low = grid[(AttackKind.SPARSE, 0, 2.5, 0.0)].mean_delta_rmse
    high = grid[(AttackKind.SPARSE, 10, 2.5, 0.0)].mean_delta_rmse
    _report(2, "density robustness", [(
        high < 0.25 * low,
        f"delta_rmse(m_seed=10)={high:.4f} not < 0.25 * {low:.4f}",
    )])


def test_criterion_3_contrarian_buffering(grid):
    curve = [grid[(AttackKind.SPARSE, 0, 2.5, q)] for q in QS]
    means = [c.mean_delta_rmse for c in curve]
    checks = []
    first_drop = means[0] - means[1]
    combined = 3 * _combined_se(curve[0].se_delta_rmse, curve[1].se_delta_rmse)
    checks.append((
        first_drop > combined,
        f"q=0 -> 0.1 drop {first_drop:.4f} not > 3 combined SE ({combined:.4f})",
    ))
    late_drop = means[3] - means[5]
    checks.append((
        first_drop >= late_drop,
        f"early drop {first_drop:.4f} < late drop {late_drop:.4f}",
    ))
    rho = _spearman(QS, means)
    checks.append((rho <= 0, f"spearman(delta_rmse, q) = {rho:.3f} > 0"))
    _report(3, "contrarian buffering saturates early", checks)


def test_criterion_4_worst_item_promotion(grid):
    checks = []
    for beta in BETAS:
        base = grid[(AttackKind.SPARSE, 0, beta, 0.0)]
        margin = 3 * base.se_worst_promotion
        checks.append((
            base.mean_worst_promotion > margin,
            f"beta={beta}: promotion {base.mean_worst_promotion:.2f} "
            f"not > 0 by 3 SE ({margin:.2f})",
        ))
        buffered = grid[(AttackKind.SPARSE, 0, beta, 0.3)]
        gap = base.mean_worst_promotion - buffered.mean_worst_promotion
        combined = 3 * _combined_se(base.se_worst_promotion, buffered.se_worst_promotion)
        checks.append((
            gap > combined,
            f"beta={beta}: q=0 vs 0.3 promotion gap {gap:.2f} not > 3 combined "
            f"SE ({combined:.2f})",
        ))
    # density clause pinned at beta=2.5, q=0 (the criterion leaves them free)
    dense = grid[(AttackKind.SPARSE, 10, 2.5, 0.0)].mean_worst_promotion
    sparse_regime = grid[(AttackKind.SPARSE, 0, 2.5, 0.0)].mean_worst_promotion
    checks.append((
        dense < 0.25 * sparse_regime,
        f"promotion(m_seed=10)={dense:.2f} not < 0.25 * {sparse_regime:.2f}",
    ))
    _report(4, "worst-item promotion and its buffering", checks)


def test_criterion_5_best_item_demotion(grid):
    summary = grid[(AttackKind.SPARSE, 0, 2.5, 0.0)]
    margin = 3 * summary.se_best_demotion
    _report(5, "best-item demotion", [(
        summary.mean_best_demotion > margin,
        f"demotion {summary.mean_best_demotion:.2f} not > 0 by 3 SE ({margin:.2f})",
    )])


def test_criterion_6_sparse_beats_broad(grid):
    sparse = grid[(AttackKind.SPARSE, 0, 2.5, 0.0)]
    broad = grid[(AttackKind.BROAD, 0, 2.5, 0.0)]
    gap = sparse.mean_delta_rmse - broad.mean_delta_rmse
    combined = 3 * _combined_se(sparse.se_delta_rmse, broad.se_delta_rmse)
    _report(6, "sparse beats broad", [(
        gap > combined,
        f"sparse {sparse.mean_delta_rmse:.4f} vs broad {broad.mean_delta_rmse:.4f}: "
        f"gap {gap:.4f} not > 3 combined SE ({combined:.4f})",
    )])


def test_criterion_7_analytic_fixture():
    config = SimConfig(
        K=2, m_seed=1, n_arrivals=0, sigma_rating=0.0, attack=AttackKind.SPARSE
    )
    out = run_trial_pair(config, MASTER_SEED, 0, catalog=ItemCatalog([2.0, 4.0]))
    checks = [
        (abs(out.delta_rmse - 1.5) <= 1e-12,
         f"delta_rmse {out.delta_rmse!r} != 1.5 within 1e-12"),
        (out.best_item_demotion == 1, f"demotion {out.best_item_demotion} != 1"),
        (out.worst_item_promotion == 1, f"promotion {out.worst_item_promotion} != 1"),
        (abs(out.delta_rmse - (out.rmse_attack - out.rmse_no_attack)) <= 1e-12,
         "delta_rmse is not the difference of the arm RMSEs"),
    ]
    _report(7, "analytic fixture", checks)


# --- enumeration oracle for criterion 8 (independent of the package) -------

ORACLE_QUALITIES = [2.0, 3.4, 4.6]


def _oracle_displays(counts, sums):
    return [s / c if c else 3.0 for c, s in zip(counts, sums)]


def _oracle_rmse(counts, sums, qualities):
    d = _oracle_displays(counts, sums)
    return math.sqrt(
        sum((x - mu) ** 2 for x, mu in zip(d, qualities)) / len(qualities)
    )


def _oracle_ranks(counts, sums):
    d = _oracle_displays(counts, sums)
    order = sorted(range(len(d)), key=lambda i: (-d[i], i))
    ranks = [0] * len(d)
    for position, item in enumerate(order, start=1):
        ranks[item] = position
    return ranks


def _enumerate_arm(qualities, counts, sums, beta, sign, depth):
    """All softmax-weighted choice sequences under zero rating noise."""
    if depth == 0:
        return [(1.0, counts, sums)]
    d = _oracle_displays(counts, sums)
    z = [sign * beta * x for x in d]
    zmax = max(z)
    w = [math.exp(v - zmax) for v in z]
    total = sum(w)
    leaves = []
    for i, weight in enumerate(w):
        c = list(counts)
        s = list(sums)
        c[i] += 1
        s[i] += qualities[i]
        for prob, lc, ls in _enumerate_arm(qualities, c, s, beta, sign, depth - 1):
            leaves.append((weight / total * prob, lc, ls))
    return leaves


def _oracle_expectation(qualities, beta, sign, n_arrivals):
    k = len(qualities)
    counts = [1] * k          # m_seed=1 with zero noise seeds each item at mu
    sums = list(qualities)
    worst = min(range(k), key=lambda i: (qualities[i], i))
    best = max(range(k), key=lambda i: (qualities[i], i))
    att_counts = list(counts)
    att_sums = list(sums)
    att_counts[worst] += 1
    att_sums[worst] += 5.0
    att_counts[best] += 1
    att_sums[best] += 1.0

    def arm_expectations(c0, s0):
        e_rmse = e_best = e_worst = 0.0
        for prob, c, s in _enumerate_arm(qualities, c0, s0, beta, sign, n_arrivals):
            ranks = _oracle_ranks(c, s)
            e_rmse += prob * _oracle_rmse(c, s, qualities)
            e_best += prob * ranks[best]
            e_worst += prob * ranks[worst]
        return e_rmse, e_best, e_worst

    rmse_att, best_att, worst_att = arm_expectations(att_counts, att_sums)
    rmse_un, best_un, worst_un = arm_expectations(counts, sums)
    return (rmse_att - rmse_un, best_att - best_un, worst_un - worst_att)


def test_criterion_8_oracle_equivalence():
    checks = []
    catalog = ItemCatalog(ORACLE_QUALITIES)
    replicates = 100_000
    for n_arrivals, q in itertools.product((1, 2), (0.0, 1.0)):
        config = SimConfig(
            K=3, m_seed=1, beta=2.5, q=q, n_arrivals=n_arrivals,
            sigma_rating=0.0, attack=AttackKind.SPARSE,
        )
        summary = run_condition(config, replicates, MASTER_SEED, catalog=catalog)
        sign = -1.0 if q == 1.0 else 1.0
        exact = _oracle_expectation(ORACLE_QUALITIES, 2.5, sign, n_arrivals)
        observed = (
            (summary.mean_delta_rmse, summary.se_delta_rmse, "delta_rmse"),
            (summary.mean_best_demotion, summary.se_best_demotion, "best_demotion"),
            (summary.mean_worst_promotion, summary.se_worst_promotion, "worst_promotion"),
        )
        for (mean, se, name), expected in zip(observed, exact):
            tol = max(3 * se, 1e-9)
            checks.append((
                abs(mean - expected) <= tol,
                f"n={n_arrivals} q={q} {name}: monte carlo {mean:.5f} vs "
                f"enumeration {expected:.5f} (tol {tol:.5f})",
            ))
    _report(8, "enumeration-oracle equivalence", checks)


def test_criterion_9_property_suite(tmp_path):
    checks = []
    rng = np.random.default_rng(314159)

    # probability normalization over random inputs
    worst_gap = 0.0
    for _ in range(10_000):
        displays = rng.uniform(1.0, 5.0, size=rng.integers(1, 12))
        beta = float(rng.uniform(0.0, 6.0))
        orientation = Orientation.CONTRARIAN if rng.random() < 0.5 else Orientation.CONFORMIST
        p = choice_probabilities(displays, beta, orientation)
        worst_gap = max(worst_gap, abs(float(p.sum()) - 1.0))
    checks.append((worst_gap <= 1e-12, f"normalization gap {worst_gap:.2e} > 1e-12"))

    # contrarian mirror identity
    worst_mirror = 0.0
    for _ in range(2_000):
        displays = rng.uniform(1.0, 5.0, size=rng.integers(1, 12))
        beta = float(rng.uniform(0.0, 6.0))
        gap = np.max(np.abs(
            choice_probabilities(displays, beta, Orientation.CONTRARIAN)
            - choice_probabilities(-displays, beta, Orientation.CONFORMIST)
        ))
        worst_mirror = max(worst_mirror, float(gap))
    checks.append((worst_mirror <= 1e-12, f"mirror gap {worst_mirror:.2e} > 1e-12"))

    # zero feedback strength gives uniform exposure
    uniform_ok = all(
        np.allclose(
            choice_probabilities(rng.uniform(1.0, 5.0, 7), 0.0, o), 1 / 7, atol=1e-12
        )
        for o in Orientation for _ in range(50)
    )
    checks.append((uniform_ok, "beta=0 did not give uniform probabilities"))

    # a no-op attack leaves the paired outcome exactly zero
    none_config = SimConfig(K=50, m_seed=2, attack=AttackKind.NONE)
    zero_ok = all(
        (out.delta_rmse, out.best_item_demotion, out.worst_item_promotion) == (0.0, 0, 0)
        for out in (run_trial_pair(none_config, MASTER_SEED, r) for r in range(20))
    )
    checks.append((zero_ok, "no-op attack produced a nonzero paired outcome"))

    # rankings are permutations, exhaustively over tied display vectors
    permutation_ok = True
    for k in range(1, 7):
        for displays in itertools.product((1.0, 3.0, 5.0), repeat=k):
            ledger = RatingLedger(k)
            for i, value in enumerate(displays):
                ledger.record_rating(i, value)
            if sorted(final_ranking(ledger).rank_of) != list(range(1, k + 1)):
                permutation_ok = False
    checks.append((permutation_ok, "a ranking was not a permutation"))

    # determinism: serial and parallel full-grid runs, same seed, identical bytes
    spec = SweepSpec(replicates=R, master_seed=MASTER_SEED)
    serial = write_results(
        rows_from_summaries(run_sweep(spec, workers=1)), tmp_path / "serial.csv"
    )
    parallel = write_results(
        rows_from_summaries(run_sweep(spec, workers=WORKERS)), tmp_path / "parallel.csv"
    )
    checks.append((
        serial.read_bytes() == parallel.read_bytes(),
        "two full-grid runs with one seed were not byte-identical across worker counts",
    ))
    _report(9, "property suite", checks)


def test_criterion_10_performance_envelope():
    spec = SweepSpec(replicates=1000, master_seed=MASTER_SEED)
    start = time.perf_counter()
    summaries = run_sweep(spec, workers=WORKERS)
    elapsed = time.perf_counter() - start
    checks = [
        (len(summaries) == 72, f"expected 72 conditions, got {len(summaries)}"),
        (elapsed < 600.0,
         f"full grid at R=1000 took {elapsed:.0f}s on {WORKERS} workers (limit 600s)"),
    ]
    print(f"full 72-condition grid at R=1000: {elapsed:.0f}s on {WORKERS} workers")
    _report(10, "performance envelope", checks)
