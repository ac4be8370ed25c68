"""Acceptance suite: every criterion at its stated tolerance and budget.

Each test prints one pass/fail line; run with ``pytest -s`` to see them.
Tolerances for the composite group coefficient use the sum of the three
component standard errors, a conservative bound since the composite's own
standard error is unavailable by design.
"""

import math
import time

import numpy as np

from grouptail import (
    EpsPairTarget,
    EpsScaledTarget,
    GaussianModel,
    LogisticModel,
    LPairTarget,
    M4Model,
    MCConfig,
    MinFactorModel,
    Provenance as Prov,
    PseudoSample,
    RawSample,
    Seed,
    GroupConfig,
    analyze,
    eps_pair_estimate,
    eps_scaled_estimate,
    eta_from_pairwise,
    l_pair_estimate,
    load_prices,
    make_index_pair,
    mc_consistency,
    mc_normality,
    mc_survival_check,
    monthly_block_maxima,
    neg_log_returns,
    pit_transform,
    rank_transform,
    sample_logistic,
    sample_m4,
    stdf_estimate,
)
from conftest import WEIGHTS_4X4, build_price_csv, random_m4_table

PAIR_12_34 = make_index_pair((1, 2), (3, 4), 4)
PAIR_12_4 = make_index_pair((1, 2), (4,), 4)


def report(number, name, ok, elapsed, budget, detail=""):
    status = "PASS" if ok else "FAIL"
    extra = f"  [{detail}]" if detail else ""
    print(f"[criterion {number:02d}] {name}: {status} "
          f"({elapsed:.3f}s of {budget:g}s budget){extra}")
    assert ok, f"criterion {number} failed: {name} {detail}"
    assert elapsed < budget, f"criterion {number} over budget: {elapsed:.3f}s >= {budget}s"


def composite_tolerance(pseudo, pair, multiple=3.0):
    return multiple * (
        eps_scaled_estimate(pseudo, pair.i1, 1.0).std_error
        + eps_scaled_estimate(pseudo, pair.i2, 1.0).std_error
        + l_pair_estimate(pseudo, pair, 1.0, 1.0).std_error
    )


def test_01_exact_group_coefficients():
    model = M4Model(WEIGHTS_4X4)
    model.functionals(PAIR_12_34)  # warm-up outside the timed region
    t0 = time.perf_counter()
    a = model.functionals(PAIR_12_34).eps_pair
    b = model.functionals(PAIR_12_4).eps_pair
    elapsed = time.perf_counter() - t0
    ok = abs(a - 7.0 / 8.0) <= 1e-12 and abs(b - 3.0 / 8.0) <= 1e-12
    report(1, "exact weight-table coefficients 7/8 and 3/8", ok, elapsed, 1e-3,
           f"eps={a:.15f}, {b:.15f}")


def test_02_m4_estimation_both_provenances():
    t0 = time.perf_counter()
    sim = sample_m4(M4Model(WEIGHTS_4X4), 20_000, Seed(2, 0))
    ok = True
    details = []
    for pseudo in (pit_transform(sim.raw, sim.margins), rank_transform(sim.raw)):
        est = eps_pair_estimate(pseudo, PAIR_12_34)
        tol = composite_tolerance(pseudo, PAIR_12_34)
        ok &= abs(est.value - 7.0 / 8.0) <= tol
        details.append(f"{pseudo.provenance.value}: {est.value:.4f} (tol {tol:.4f})")
    report(2, "weight-table pair coefficient at n=20000", ok,
           time.perf_counter() - t0, 5.0, "; ".join(details))


def test_03_logistic_estimation():
    t0 = time.perf_counter()
    sim = sample_logistic(LogisticModel(0.5, 4), 20_000, Seed(3, 0))
    truth = 2.0 * math.sqrt(2.0) - 2.0
    ok = True
    details = []
    for pseudo in (pit_transform(sim.raw, sim.margins), rank_transform(sim.raw)):
        est = eps_pair_estimate(pseudo, PAIR_12_34)
        tol = composite_tolerance(pseudo, PAIR_12_34)
        ok &= abs(est.value - truth) <= tol
        details.append(f"{pseudo.provenance.value}: {est.value:.4f} (tol {tol:.4f})")
    report(3, "logistic pair coefficient at n=20000", ok,
           time.perf_counter() - t0, 5.0, "; ".join(details))


def test_04_moment_identity_sanity():
    t0 = time.perf_counter()
    rng = np.random.default_rng(4)
    indep = PseudoSample(rng.uniform(1e-6, 1 - 1e-6, (100_000, 2)), Prov.KNOWN_MARGINS)
    est_indep = stdf_estimate(indep, (1.0, 1.0))
    u = rng.uniform(1e-6, 1 - 1e-6, (100_000, 1))
    total = PseudoSample(np.hstack([u, u]), Prov.KNOWN_MARGINS)
    est_total = stdf_estimate(total, (1.0, 1.0))
    ok = (abs(est_indep.value - 2.0) <= 3.0 * est_indep.std_error
          and abs(est_total.value - 1.0) <= 3.0 * est_total.std_error)
    report(4, "moment identity on independence and total dependence", ok,
           time.perf_counter() - t0, 2.0,
           f"indep {est_indep.value:.4f}, total {est_total.value:.4f}")


def test_05a_normality_logistic_group_coefficient():
    t0 = time.perf_counter()
    cfg = MCConfig(
        model=LogisticModel(0.5, 4),
        pair=PAIR_12_34,
        target=EpsScaledTarget((1, 2), 1.0),
        n=500,
        reps=2000,
        seed=Seed(1, 0),
        provenance=Prov.KNOWN_MARGINS,
    )
    rep = mc_normality(cfg)
    gates = (f"mean {rep.scaled_mean:+.4f}, var ratio {rep.var_ratio:.4f}, "
             f"KS {rep.ks_distance:.4f}")
    ok = (rep.passed is True
          and abs(rep.truth - math.sqrt(2.0)) < 1e-14
          and abs(rep.theory_var - (1.0 + math.sqrt(2.0))) < 1e-14)
    report(5, "normality of the scaled group coefficient (logistic)", ok,
           time.perf_counter() - t0, 120.0, gates)


def test_05b_normality_m4_pair_coefficient():
    t0 = time.perf_counter()
    cfg = MCConfig(
        model=M4Model(WEIGHTS_4X4),
        pair=PAIR_12_34,
        target=LPairTarget(1.0, 1.0),
        n=500,
        reps=2000,
        seed=Seed(11, 0),
        provenance=Prov.KNOWN_MARGINS,
    )
    rep = mc_normality(cfg)
    gates = (f"mean {rep.scaled_mean:+.4f}, var ratio {rep.var_ratio:.4f}, "
             f"KS {rep.ks_distance:.4f}")
    ok = rep.passed is True and rep.truth == 2.0 and rep.theory_var == 4.5
    report(5, "normality of the union coefficient (weight table)", ok,
           time.perf_counter() - t0, 120.0, gates)


def test_06_strong_consistency():
    t0 = time.perf_counter()
    ok = True
    details = []
    for prov in (Prov.KNOWN_MARGINS, Prov.EMPIRICAL_RANKS):
        cfg = MCConfig(
            model=LogisticModel(0.5, 4),
            pair=PAIR_12_34,
            target=EpsPairTarget(),
            n=250,
            reps=200,
            seed=Seed(6, 0),
            provenance=prov,
        )
        rep = mc_consistency(cfg, (250, 1000, 4000))
        ok &= rep.monotone_decreasing
        details.append(f"{prov.value}: " + " > ".join(f"{e:.4f}" for _, e in rep.rows))
    report(6, "median error shrinks over n = 250, 1000, 4000", ok,
           time.perf_counter() - t0, 120.0, "; ".join(details))


def test_07_survival_closed_form():
    t0 = time.perf_counter()
    check_diag = mc_survival_check(10.0, 1.0, 1.0, PAIR_12_34, 1_000_000, Seed(7, 0))
    check_off = mc_survival_check(10.0, 2.0, 1.0, PAIR_12_34, 1_000_000, Seed(7, 1))
    model = MinFactorModel()
    rng = np.random.default_rng(7)
    branches_agree = True
    for _ in range(50):
        t = float(rng.uniform(2.0, 40.0))
        x = float(rng.uniform(0.1, 0.9 * t))
        lo = model.joint_survival(t, x, np.nextafter(x, np.inf), PAIR_12_34)
        hi = model.joint_survival(t, np.nextafter(x, np.inf), x, PAIR_12_34)
        branches_agree &= abs(lo - hi) <= 1e-12
    ok = check_diag.passed and check_off.passed and branches_agree
    report(7, "joint survival closed form vs simulation at n=1e6", ok,
           time.perf_counter() - t0, 10.0,
           f"diag femp={check_diag.empirical:.6f} vs {check_diag.closed_form:.6f}; "
           f"off femp={check_off.empirical:.6f} vs {check_off.closed_form:.6f}")


def test_08_eta_oracles():
    t0 = time.perf_counter()
    model = MinFactorModel()
    table = model.pairwise_eta()
    ok = eta_from_pairwise(table, PAIR_12_34) == 0.75
    ok &= model.eta(make_index_pair((1, 2, 3), (4,), 4)) == 0.5
    corr = np.eye(4)
    corr[0, 2] = corr[2, 0] = 0.6
    corr[1, 3] = corr[3, 1] = 0.2
    gm = GaussianModel(corr)
    ok &= gm.eta(PAIR_12_34) == (1.0 + 0.6) / 2.0
    ok &= gm.eta(make_index_pair((2,), (4,), 4)) == (1.0 + 0.2) / 2.0
    ok &= GaussianModel(np.eye(4)).eta(PAIR_12_34) == 0.5
    report(8, "tail dependence coefficient oracles are exact", ok,
           time.perf_counter() - t0, 1.0)


def _random_model_pair(rng, theta_low=0.05, theta_high=1.0):
    d = int(rng.integers(2, 7))
    cols = list(rng.permutation(np.arange(1, d + 1)))
    k = int(rng.integers(1, d))
    pair = make_index_pair(cols[:k], cols[k:], d)
    if rng.random() < 0.5:
        model = LogisticModel(float(rng.uniform(theta_low, theta_high)), d)
    else:
        model = M4Model(random_m4_table(rng, int(rng.integers(1, 6)), d))
    return model, pair


def test_09_property_suites():
    t0 = time.perf_counter()
    grid = (0.1, 0.5, 1.0, 2.0, 8.0)
    rng = np.random.default_rng(9)
    ok = True

    # bounds 0 <= lambda <= min(x eps1, y eps2) on the grid
    for _ in range(200):
        model, pair = _random_model_pair(rng)
        fn = model.functionals(pair)
        for x in grid:
            for y in grid:
                lam = fn.lambda_u(x, y)
                ok &= -1e-10 <= lam <= min(x * fn.eps_i1, y * fn.eps_i2) + 1e-10

    # grounded at zero and the single-group limit at x = 1e8
    for _ in range(200):
        d = int(rng.integers(2, 7))
        cols = list(rng.permutation(np.arange(1, d + 1)))
        k = int(rng.integers(1, d))
        pair = make_index_pair(cols[:k], cols[k:], d)
        if rng.random() < 0.5:
            model = LogisticModel(float(rng.uniform(0.05, 0.5)), d)
        else:
            model = M4Model(random_m4_table(rng, int(rng.integers(1, 6)), d))
        fn = model.functionals(pair)
        y = float(rng.uniform(0.1, 8.0))
        ok &= abs(fn.lambda_u(0.0, y)) <= 1e-12 and abs(fn.lambda_u(y, 0.0)) <= 1e-12
        ok &= abs(fn.lambda_u(1e8, y) - y * fn.eps_i2) <= 1e-6 * y * fn.eps_i2
        ok &= abs(fn.lambda_u(y, 1e8) - y * fn.eps_i1) <= 1e-6 * y * fn.eps_i1

    # Lipschitz bound |I1| dx + |I2| dy
    for _ in range(200):
        model, pair = _random_model_pair(rng)
        fn = model.functionals(pair)
        x1, y1, x2, y2 = rng.uniform(0.0, 10.0, size=4)
        bound = len(pair.i1) * abs(x1 - x2) + len(pair.i2) * abs(y1 - y2)
        ok &= abs(fn.lambda_u(x1, y1) - fn.lambda_u(x2, y2)) <= bound + 1e-9

    # estimator monotonicity: pair value below both component coefficients
    for _ in range(200):
        n, d = int(rng.integers(5, 40)), int(rng.integers(2, 6))
        sample = PseudoSample(rng.uniform(0.001, 0.999, (n, d)), Prov.KNOWN_MARGINS)
        cols = list(rng.permutation(np.arange(1, d + 1)))
        k = int(rng.integers(1, d))
        pair = make_index_pair(cols[:k], cols[k:], d)
        e1 = eps_scaled_estimate(sample, pair.i1, 1.0).value
        e2 = eps_scaled_estimate(sample, pair.i2, 1.0).value
        ok &= eps_pair_estimate(sample, pair).value <= min(e1, e2) + 1e-12

    # rank invariance under strictly increasing transforms
    transforms = [np.exp, lambda v: 5.0 * v - 2.0, lambda v: v ** 3]
    for i in range(200):
        raw = rng.standard_normal((30, 3))
        pair = make_index_pair((1,), (2, 3), 3)
        a = eps_pair_estimate(rank_transform(RawSample(raw)), pair).value
        b = eps_pair_estimate(rank_transform(RawSample(transforms[i % 3](raw))), pair).value
        ok &= a == b

    # bit-determinism across worker counts
    cfg = MCConfig(
        model=LogisticModel(0.5, 4),
        pair=PAIR_12_34,
        target=EpsScaledTarget((1, 2), 1.0),
        n=200,
        reps=64,
        seed=Seed(9, 0),
    )
    serial = mc_normality(cfg, workers=1)
    for workers in (2, 4):
        ok &= np.array_equal(serial.estimates, mc_normality(cfg, workers=workers).estimates)

    report(9, "property suites (bounds, limits, Lipschitz, monotonicity, "
              "rank invariance, determinism)", ok, time.perf_counter() - t0, 60.0)


def test_10_pipeline_end_to_end(tmp_path):
    t0 = time.perf_counter()
    csv_path = build_price_csv(tmp_path / "prices.csv", 1500, Seed(10, 0))
    series = load_prices(csv_path)
    maxima = monthly_block_maxima(neg_log_returns(series))
    config = GroupConfig(
        groups={"A": ["c1", "c2"], "B": ["c3"], "C": ["c4"]},
        pairs=[("A", "B"), ("A", "C"), ("B", "C"),
               ("A", "B|C"), ("B", "A|C"), ("C", "A|B")],
    )
    results = analyze(maxima, config)
    pseudo = rank_transform(RawSample(maxima.maxima))
    target = next(r for r in results if r.label_i1 == "A" and r.label_i2 == "B|C")
    tol = composite_tolerance(pseudo, PAIR_12_34)
    ok = (len(results) == 6
          and maxima.n == 1500
          and abs(target.eps_pair.value - 7.0 / 8.0) <= tol)
    report(10, "price CSV to six-pair dependence table", ok,
           time.perf_counter() - t0, 10.0,
           f"eps_pair {target.eps_pair.value:.4f} (tol {tol:.4f}), rows {len(results)}")
