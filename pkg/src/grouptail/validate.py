"""Monte Carlo harness for the estimators' limit laws and closed forms.

``mc_normality`` draws many independent samples, estimates one target on
each, and checks sqrt(n)(estimate - truth) against the theoretical normal
limit through three gates: a mean test, a variance-ratio band, and a
Kolmogorov-Smirnov distance.  ``mc_consistency`` tracks the median absolute
error along a grid of sample sizes.  ``mc_survival_check`` compares the
min-factor joint survival closed forms against plain empirical frequencies.

Replication r always uses RNG stream ``seed.stream + r``, and each
replication is computed single-threaded, so reports are bit-identical for a
given config regardless of the worker count.
"""

from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np
from scipy import stats

from .core import (
    IndexPair,
    Provenance,
    PseudoSample,
    ValidationError,
    pit_transform,
    rank_transform,
)
from .estimate import (
    eps_pair_estimate,
    eps_scaled_estimate,
    l_pair_estimate,
    stdf_estimate,
    variance_formula,
)
from .models import GaussianModel, MinFactorModel, model_from_dict
from .simulate import Seed, SimOutput, sample, sample_minfactor

# Normality gates, calibrated for reps around 2000.  The limit law fixes the
# distribution; these finite-sample thresholds are configuration.
MEAN_GATE_MULTIPLE = 4.0
VAR_RATIO_BAND = (0.85, 1.15)
KS_GATE_COEFF = 1.63  # 1% critical coefficient for the KS statistic


# ---------------------------------------------------------------------------
# targets
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class StdfTarget:
    """Stable tail dependence function at a fixed exponent vector."""

    x: tuple

    def to_dict(self) -> dict:
        return {"kind": "stdf", "x": list(self.x)}


@dataclass(frozen=True)
class EpsScaledTarget:
    """x * eps_I for one column group."""

    cols: tuple
    x: float = 1.0

    def to_dict(self) -> dict:
        return {"kind": "eps_scaled", "i": list(self.cols), "x": self.x}


@dataclass(frozen=True)
class LPairTarget:
    """Pair coefficient l(I1, I2) at reciprocal arguments (x, y)."""

    x: float = 1.0
    y: float = 1.0

    def to_dict(self) -> dict:
        return {"kind": "l_pair", "x": self.x, "y": self.y}


@dataclass(frozen=True)
class EpsPairTarget:
    """Extremal coefficient of dependence between the two groups."""

    def to_dict(self) -> dict:
        return {"kind": "eps_pair"}


def target_from_dict(spec: dict):
    try:
        kind = spec["kind"]
    except (KeyError, TypeError):
        raise ValidationError(f"target spec must carry a 'kind', got {spec!r}") from None
    if kind == "stdf":
        return StdfTarget(tuple(float(v) for v in spec["x"]))
    if kind == "eps_scaled":
        return EpsScaledTarget(tuple(int(c) for c in spec["i"]), float(spec.get("x", 1.0)))
    if kind == "l_pair":
        return LPairTarget(float(spec.get("x", 1.0)), float(spec.get("y", 1.0)))
    if kind == "eps_pair":
        return EpsPairTarget()
    raise ValidationError(f"unknown target kind {kind!r}")


@dataclass(frozen=True)
class MCConfig:
    """One Monte Carlo experiment: model, pair, target, sizes, seed."""

    model: object
    pair: IndexPair
    target: object
    n: int
    reps: int
    seed: Seed
    provenance: Provenance = Provenance.KNOWN_MARGINS

    def __post_init__(self) -> None:
        if self.n < 2:
            raise ValidationError(f"per-replication sample size must be >= 2, got {self.n}")
        if self.reps < 2:
            raise ValidationError(f"replication count must be >= 2, got {self.reps}")
        object.__setattr__(self, "provenance", Provenance(self.provenance))

    def to_dict(self) -> dict:
        return {
            "model": self.model.to_dict(),
            "pair": self.pair.to_dict(),
            "target": self.target.to_dict(),
            "n": self.n,
            "reps": self.reps,
            "seed": self.seed.to_dict(),
            "provenance": self.provenance.value,
        }


def config_from_dict(spec: dict) -> MCConfig:
    model = model_from_dict(spec["model"])
    pair_spec = dict(spec["pair"])
    pair_spec.setdefault("d", getattr(model, "d"))
    pair = IndexPair(tuple(pair_spec["i1"]), tuple(pair_spec["i2"]), int(pair_spec["d"]))
    seed_spec = spec.get("seed", {})
    seed = Seed(int(seed_spec.get("value", 0)), int(seed_spec.get("stream", 0)))
    return MCConfig(
        model=model,
        pair=pair,
        target=target_from_dict(spec["target"]),
        n=int(spec["n"]),
        reps=int(spec["reps"]),
        seed=seed,
        provenance=Provenance(spec.get("provenance", Provenance.KNOWN_MARGINS)),
    )


# ---------------------------------------------------------------------------
# truth lookup and per-replication machinery
# ---------------------------------------------------------------------------


def theoretical_value(model, pair: IndexPair, target) -> float:
    """Exact limiting value of a target, where the model provides one.

    Gaussian and min-factor groups are asymptotically independent: their
    coefficient targets have truth 0 with a degenerate limit, so they are
    rejected rather than silently producing a zero-variance comparison.
    """
    if isinstance(model, (GaussianModel, MinFactorModel)):
        raise ValidationError(
            "no non-degenerate theoretical value for this model family; "
            "its groups are asymptotically independent"
        )
    if isinstance(target, StdfTarget):
        return model.stdf(target.x)
    if isinstance(target, EpsScaledTarget):
        args = np.zeros(model.d)
        args[[c - 1 for c in target.cols]] = 1.0 / target.x
        return model.stdf(args)
    if isinstance(target, LPairTarget):
        return model.l_pair(pair, target.x, target.y)
    if isinstance(target, EpsPairTarget):
        return model.functionals(pair).eps_pair
    raise ValidationError(f"unknown target {target!r}")


def _pseudo(sim: SimOutput, provenance: Provenance) -> PseudoSample:
    if provenance is Provenance.KNOWN_MARGINS:
        return pit_transform(sim.raw, sim.margins)
    return rank_transform(sim.raw)


def _estimate_target(pseudo: PseudoSample, pair: IndexPair, target) -> float:
    if isinstance(target, StdfTarget):
        return stdf_estimate(pseudo, target.x).value
    if isinstance(target, EpsScaledTarget):
        return eps_scaled_estimate(pseudo, target.cols, target.x).value
    if isinstance(target, LPairTarget):
        return l_pair_estimate(pseudo, pair, target.x, target.y).value
    if isinstance(target, EpsPairTarget):
        return eps_pair_estimate(pseudo, pair).value
    raise ValidationError(f"unknown target {target!r}")


def _replicate(cfg: MCConfig, stream: int) -> float:
    sim = sample(cfg.model, cfg.n, cfg.seed.with_stream(stream))
    return _estimate_target(_pseudo(sim, cfg.provenance), cfg.pair, cfg.target)


def _run_replications(cfg: MCConfig, streams, workers: int) -> np.ndarray:
    out = np.empty(len(streams))
    if workers <= 1:
        for k, s in enumerate(streams):
            out[k] = _replicate(cfg, s)
    else:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            for k, val in enumerate(pool.map(lambda s: _replicate(cfg, s), streams)):
                out[k] = val
    return out


# ---------------------------------------------------------------------------
# reports
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class MCReport:
    """Outcome of one normality experiment.

    ``passed`` is None on rank-based runs: the comparison variance is the
    known-margin formula, so the result is informational there.
    """

    estimates: np.ndarray
    truth: float
    scaled_mean: float
    scaled_var: float
    theory_var: float
    var_ratio: float
    ks_distance: float
    passed: bool | None

    def __post_init__(self) -> None:
        a = np.asarray(self.estimates, dtype=float)
        a.flags.writeable = False
        object.__setattr__(self, "estimates", a)

    @property
    def reps(self) -> int:
        return self.estimates.shape[0]

    def to_dict(self) -> dict:
        return {
            "estimates": self.estimates.tolist(),
            "truth": self.truth,
            "scaled_mean": self.scaled_mean,
            "scaled_var": self.scaled_var,
            "theory_var": self.theory_var,
            "var_ratio": self.var_ratio,
            "ks_distance": self.ks_distance,
            "pass": self.passed,
        }


def mc_normality(cfg: MCConfig, workers: int = 1) -> MCReport:
    """Check sqrt(n)(estimate - truth) against its theoretical normal limit.

    Gates: |scaled mean| <= 4 sqrt(theory_var / reps), variance ratio inside
    [0.85, 1.15], and KS distance of the standardized estimates from the
    standard normal at most 1.63 / sqrt(reps).
    """
    if isinstance(cfg.target, EpsPairTarget):
        raise ValidationError(
            "the composite group coefficient has no closed-form asymptotic "
            "variance; use an eps_scaled or l_pair target"
        )
    truth = theoretical_value(cfg.model, cfg.pair, cfg.target)
    theory_var = variance_formula(truth)
    if theory_var <= 0.0:
        raise ValidationError(
            f"target has truth {truth} with degenerate limiting variance; "
            "normality checking is meaningless here"
        )
    streams = [cfg.seed.stream + r for r in range(cfg.reps)]
    estimates = _run_replications(cfg, streams, workers)

    scaled = np.sqrt(cfg.n) * (estimates - truth)
    scaled_mean = float(np.mean(scaled))
    scaled_var = float(np.var(scaled, ddof=1))
    var_ratio = scaled_var / theory_var
    ks = float(stats.kstest(scaled / np.sqrt(theory_var), "norm").statistic)

    if cfg.provenance is Provenance.EMPIRICAL_RANKS:
        passed = None
    else:
        passed = bool(
            abs(scaled_mean) <= MEAN_GATE_MULTIPLE * np.sqrt(theory_var / cfg.reps)
            and VAR_RATIO_BAND[0] <= var_ratio <= VAR_RATIO_BAND[1]
            and ks <= KS_GATE_COEFF / np.sqrt(cfg.reps)
        )
    return MCReport(
        estimates=estimates,
        truth=truth,
        scaled_mean=scaled_mean,
        scaled_var=scaled_var,
        theory_var=theory_var,
        var_ratio=var_ratio,
        ks_distance=ks,
        passed=passed,
    )


@dataclass(frozen=True)
class ConsistencyReport:
    """Median absolute error per sample size, plus a monotonicity flag."""

    rows: tuple  # of (n, median_abs_error)
    truth: float
    monotone_decreasing: bool

    def to_dict(self) -> dict:
        return {
            "rows": [{"n": n, "median_abs_error": e} for n, e in self.rows],
            "truth": self.truth,
            "monotone_decreasing": self.monotone_decreasing,
        }


def mc_consistency(cfg: MCConfig, n_grid, workers: int = 1) -> ConsistencyReport:
    """Median absolute estimation error along a strictly increasing n grid."""
    grid = [int(n) for n in n_grid]
    if len(grid) < 3:
        raise ValidationError(f"n grid needs at least 3 sizes, got {grid}")
    if any(b <= a for a, b in zip(grid, grid[1:])):
        raise ValidationError(f"n grid must be strictly increasing, got {grid}")
    truth = theoretical_value(cfg.model, cfg.pair, cfg.target)
    rows = []
    for gi, n in enumerate(grid):
        sub = MCConfig(cfg.model, cfg.pair, cfg.target, n, cfg.reps, cfg.seed, cfg.provenance)
        streams = [cfg.seed.stream + gi * cfg.reps + r for r in range(cfg.reps)]
        estimates = _run_replications(sub, streams, workers)
        rows.append((n, float(np.median(np.abs(estimates - truth)))))
    monotone = all(b[1] < a[1] for a, b in zip(rows, rows[1:]))
    return ConsistencyReport(rows=tuple(rows), truth=truth, monotone_decreasing=monotone)


@dataclass(frozen=True)
class SurvivalCheck:
    """Empirical vs closed-form joint survival probability."""

    empirical: float
    closed_form: float
    tolerance: float
    passed: bool
    n: int

    def to_dict(self) -> dict:
        return {
            "empirical": self.empirical,
            "closed_form": self.closed_form,
            "tolerance": self.tolerance,
            "pass": self.passed,
            "n": self.n,
        }


def mc_survival_check(t: float, x: float, y: float, pair: IndexPair, n: int,
                      seed: Seed) -> SurvivalCheck:
    """Empirical check of the min-factor joint survival closed form.

    Simulates n min-factor draws, transforms them with the exact margins, and
    compares the frequency of {M(I1) > 1 - x/t, M(I2) > 1 - y/t} against the
    closed form within three binomial standard errors.
    """
    n = int(n)
    if n < 100_000:
        raise ValidationError(f"survival check needs n >= 100000, got {n}")
    model = MinFactorModel()
    closed = model.joint_survival(t, x, y, pair)
    sim = sample_minfactor(n, seed)
    pseudo = pit_transform(sim.raw, sim.margins)
    m1 = np.max(pseudo.data[:, [c - 1 for c in pair.i1]], axis=1)
    m2 = np.max(pseudo.data[:, [c - 1 for c in pair.i2]], axis=1)
    empirical = float(np.mean((m1 > 1.0 - x / t) & (m2 > 1.0 - y / t)))
    tol = 3.0 * np.sqrt(closed * (1.0 - closed) / n)
    return SurvivalCheck(
        empirical=empirical,
        closed_form=closed,
        tolerance=float(tol),
        passed=bool(abs(empirical - closed) <= tol),
        n=n,
    )
