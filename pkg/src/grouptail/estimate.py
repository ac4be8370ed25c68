"""Moment-based plug-in estimators for group tail dependence.

Every estimator here is a sample mean pushed through the strictly increasing
map g(m) = m / (1 - m):

* ``stdf_estimate``        g(mean of max_j u_ij^(x_j)), the stable tail
  dependence function at the argument vector x;
* ``eps_scaled_estimate``  g(mean of max_{j in I} u_ij^(1/x)), estimating
  x * eps_I;
* ``l_pair_estimate``      the same with the row maximum taken over both
  groups, estimating the pair coefficient l(I1, I2) at (1/x, 1/y);
* ``lambda_estimate``      x*eps_I1 + y*eps_I2 - l_pair, the upper-tail
  dependence function;
* ``eps_pair_estimate``    lambda at (1, 1), the extremal coefficient of
  dependence between the two groups.

Standard errors come from the delta method: the asymptotic variance of the
first three estimators is l(1+l)^2/(2+l) evaluated at the estimate (plug-in).
No joint covariance is available for the composite lambda/eps_pair values,
so their standard errors are reported as unavailable rather than combined
naively.  On rank-based pseudo-samples the same formula is used and flagged
as approximate; the rank estimator is asymptotically normal but its limiting
variance has no closed form here.

Row means use numpy's pairwise summation over the fixed row order, so
results are bit-stable no matter how callers parallelize around them.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy import special

from .core import (
    DegenerateError,
    IndexPair,
    Provenance,
    PseudoSample,
    ValidationError,
    group_max,
)

# Above this mean the ratio m/(1-m) is numerically meaningless.
_MEAN_LIMIT = 1.0 - 1e-12


def odds(m: float) -> float:
    """The map g(m) = m / (1 - m), strictly increasing on [0, 1)."""
    return m / (1.0 - m)


def variance_formula(l_value: float) -> float:
    """Asymptotic variance l(1 + l)^2 / (2 + l) of the plug-in estimators."""
    if l_value < 0:
        raise ValidationError(f"variance formula needs a non-negative value, got {l_value}")
    return l_value * (1.0 + l_value) ** 2 / (2.0 + l_value)


@dataclass(frozen=True)
class Estimate:
    """Point estimate with delta-method standard error and normal CI.

    ``std_error`` and the interval bounds are None for composite estimators
    whose asymptotic variance is not available.
    """

    value: float
    std_error: float | None
    ci_low: float | None
    ci_high: float | None
    level: float
    n: int
    provenance: Provenance

    @property
    def se_is_approximate(self) -> bool:
        """True when the SE reuses the known-margin formula on rank data."""
        return self.std_error is not None and self.provenance is Provenance.EMPIRICAL_RANKS

    def to_dict(self) -> dict:
        return {
            "value": self.value,
            "std_error": self.std_error,
            "ci": None if self.std_error is None else [self.ci_low, self.ci_high],
            "level": self.level,
            "n": self.n,
            "provenance": self.provenance.value,
            "se_approximate": self.se_is_approximate or None,
        }


def _check_level(level: float) -> float:
    if not (0.0 < level < 1.0):
        raise ValidationError(f"confidence level must lie in (0, 1), got {level}")
    return float(level)


def _from_row_values(values: np.ndarray, level: float, provenance: Provenance) -> Estimate:
    n = values.shape[0]
    m = float(np.mean(values))
    if m >= _MEAN_LIMIT:
        raise DegenerateError(
            f"sample mean {m} is at the upper limit of the ratio transform; "
            "the estimate would be unbounded"
        )
    value = odds(m)
    se = math.sqrt(variance_formula(value) / n)
    z = float(special.ndtri((1.0 + level) / 2.0))
    return Estimate(
        value=value,
        std_error=se,
        ci_low=value - z * se,
        ci_high=value + z * se,
        level=level,
        n=n,
        provenance=provenance,
    )


def stdf_estimate(sample: PseudoSample, x, level: float = 0.95) -> Estimate:
    """Estimate the stable tail dependence function at argument vector x.

    Parameters
    ----------
    sample : PseudoSample
    x : array-like of length d
        Non-negative exponents, at least one positive.  An exponent of 0
        excludes its column from the row maximum (the component is
        marginalized away, which is the limit of an exponent tending to
        infinity on the original scale).
    level : float
        Confidence level for the normal interval.
    """
    level = _check_level(level)
    xv = np.asarray(x, dtype=float)
    if xv.shape != (sample.d,):
        raise ValidationError(f"need {sample.d} exponents, got shape {xv.shape}")
    if np.any(xv < 0):
        raise ValidationError("exponents must be >= 0")
    inc = xv > 0
    if not inc.any():
        raise ValidationError("at least one exponent must be positive")
    rows = np.max(sample.data[:, inc] ** xv[inc], axis=1)
    return _from_row_values(rows, level, sample.provenance)


def eps_scaled_estimate(sample: PseudoSample, cols, x: float, level: float = 0.95) -> Estimate:
    """Estimate x * eps_I for the column group ``cols`` (1-based indices)."""
    level = _check_level(level)
    rows = group_max(sample, cols, x)
    return _from_row_values(rows, level, sample.provenance)


def l_pair_estimate(sample: PseudoSample, pair: IndexPair, x: float, y: float,
                    level: float = 0.95) -> Estimate:
    """Estimate the pair coefficient l(I1, I2) at reciprocal arguments (x, y)."""
    level = _check_level(level)
    if pair.d != sample.d:
        raise ValidationError(f"index pair dimension {pair.d} != sample dimension {sample.d}")
    rows = np.maximum(group_max(sample, pair.i1, x), group_max(sample, pair.i2, y))
    return _from_row_values(rows, level, sample.provenance)


def lambda_estimate(sample: PseudoSample, pair: IndexPair, x: float, y: float,
                    level: float = 0.95) -> Estimate:
    """Estimate the upper-tail dependence function at (x, y).

    The value is the exact combination of the three component estimates; no
    standard error is reported because the components are dependent and no
    joint variance is available.
    """
    e1 = eps_scaled_estimate(sample, pair.i1, x, level)
    e2 = eps_scaled_estimate(sample, pair.i2, y, level)
    lp = l_pair_estimate(sample, pair, x, y, level)
    return Estimate(
        value=e1.value + e2.value - lp.value,
        std_error=None,
        ci_low=None,
        ci_high=None,
        level=level,
        n=sample.n,
        provenance=sample.provenance,
    )


def eps_pair_estimate(sample: PseudoSample, pair: IndexPair, level: float = 0.95) -> Estimate:
    """Estimate the extremal coefficient of dependence between the two groups.

    This is ``lambda_estimate`` at (1, 1).  Finite samples can produce
    slightly negative values; they are reported raw, without clamping, so
    downstream variance checks stay unbiased.
    """
    return lambda_estimate(sample, pair, 1.0, 1.0, level)
