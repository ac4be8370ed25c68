"""Exact tail-dependence functionals for the supported model families.

Each model computes, for a pair of disjoint column groups (I1, I2):

* ``l_pair(pair, x, y)``   the group stable tail dependence function at
  reciprocal arguments, i.e. the value whose sample analogue is the mean of
  ``max(M(I1)^(1/x), M(I2)^(1/y))`` pushed through m -> m/(1-m);
* ``functionals(pair)``    the upper-tail dependence function
  ``lambda_u(x, y) = x*eps_1 + y*eps_2 - l_pair(x, y)`` together with the
  extremal coefficients ``eps_I1``, ``eps_I2``, ``eps_union`` and the
  group-to-group coefficient ``eps_pair = eps_I1 + eps_I2 - eps_union``.

These serve as the oracle layer for every estimator test.  The Gaussian and
min-factor families are asymptotically independent; they expose the tail
dependence coefficient eta instead.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from .core import IndexPair, ValidationError

_EPS_TOL = 1e-9


@dataclass(frozen=True)
class TailFunctionals:
    """Exact tail functionals of one model and one index pair."""

    l_pair: Callable
    lambda_u: Callable
    eps_i1: float
    eps_i2: float
    eps_union: float
    eps_pair: float


def lambda_from_parts(eps1: float, eps2: float, l_pair_value: float, x: float, y: float) -> float:
    """Assemble the upper-tail dependence value x*eps1 + y*eps2 - l_pair."""
    return x * eps1 + y * eps2 - l_pair_value


def _build_functionals(l_pair_fn, eps1, eps2, eps_union, size1, size2) -> TailFunctionals:
    # Extremal coefficients of a group of size k live in [1, k]; enforce it
    # here because nothing downstream would catch a violated table.
    for eps, size, name in ((eps1, size1, "eps_i1"), (eps2, size2, "eps_i2"),
                            (eps_union, size1 + size2, "eps_union")):
        if not (1.0 - _EPS_TOL <= eps <= size + _EPS_TOL):
            raise ValidationError(f"{name}={eps} outside [1, {size}]")
    eps_pair = eps1 + eps2 - eps_union

    def lambda_u(x: float, y: float) -> float:
        return lambda_from_parts(eps1, eps2, l_pair_fn(x, y), x, y)

    return TailFunctionals(
        l_pair=l_pair_fn,
        lambda_u=lambda_u,
        eps_i1=eps1,
        eps_i2=eps2,
        eps_union=eps_union,
        eps_pair=eps_pair,
    )


def _check_pair(pair: IndexPair, d: int) -> None:
    if pair.d != d:
        raise ValidationError(f"index pair has ambient dimension {pair.d}, model has {d}")


def _check_positive(x: float, y: float) -> None:
    if not (x > 0 and y > 0):
        raise ValidationError(f"scale arguments must be positive, got x={x}, y={y}")


# ---------------------------------------------------------------------------
# symmetric logistic
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class LogisticModel:
    """Symmetric logistic max-stable model with unit Frechet margins.

    theta in (0, 1] is the dependence parameter: theta = 1 is independence,
    theta -> 0 total dependence.
    """

    theta: float
    d: int

    def __post_init__(self) -> None:
        if not (0.0 < self.theta <= 1.0):
            raise ValidationError(f"theta must lie in (0, 1], got {self.theta}")
        if self.d < 2:
            raise ValidationError(f"dimension must be >= 2, got {self.d}")

    def stdf(self, args) -> float:
        """Stable tail dependence value (sum_j a_j^(-1/theta))^theta.

        ``args`` has one entry per column; an entry of 0 excludes its column
        (the corresponding component is marginalized away).
        """
        a = np.asarray(args, dtype=float)
        if a.shape != (self.d,):
            raise ValidationError(f"need {self.d} arguments, got shape {a.shape}")
        if np.any(a < 0):
            raise ValidationError("arguments must be >= 0")
        inc = a > 0
        if not inc.any():
            raise ValidationError("at least one argument must be positive")
        return float(np.sum(a[inc] ** (-1.0 / self.theta)) ** self.theta)

    def l_pair(self, pair: IndexPair, x: float, y: float) -> float:
        """(|I1| x^(1/theta) + |I2| y^(1/theta))^theta."""
        _check_pair(pair, self.d)
        _check_positive(x, y)
        k1, k2 = len(pair.i1), len(pair.i2)
        t = self.theta
        return float((k1 * x ** (1.0 / t) + k2 * y ** (1.0 / t)) ** t)

    def functionals(self, pair: IndexPair) -> TailFunctionals:
        _check_pair(pair, self.d)
        k1, k2 = len(pair.i1), len(pair.i2)
        t = self.theta

        def l_pair_fn(x: float, y: float) -> float:
            return float((k1 * x ** (1.0 / t) + k2 * y ** (1.0 / t)) ** t)

        return _build_functionals(
            l_pair_fn,
            eps1=float(k1 ** t),
            eps2=float(k2 ** t),
            eps_union=float((k1 + k2) ** t),
            size1=k1,
            size2=k2,
        )

    def to_dict(self) -> dict:
        return {"family": "logistic", "theta": self.theta, "d": self.d}


# ---------------------------------------------------------------------------
# finite moving-maxima table
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class M4Model:
    """Max-stable model from a finite table of moving-maxima weights.

    ``weights`` is an r x d matrix of non-negative coefficients whose columns
    each sum to one, so the margins are unit Frechet.  Row r of the table is
    one latent Frechet factor; component j is the maximum of
    ``weights[r, j] * Z_r`` over the rows.
    """

    weights: np.ndarray

    def __post_init__(self) -> None:
        w = np.array(self.weights, dtype=float)
        if w.ndim != 2 or w.shape[0] < 1 or w.shape[1] < 1:
            raise ValidationError(f"weight table must be a non-empty 2-d array, got shape {w.shape}")
        if not np.all(np.isfinite(w)) or np.any(w < 0):
            raise ValidationError("weights must be finite and non-negative")
        colsums = w.sum(axis=0)
        # Unit Frechet margins need column sums of exactly one.
        bad = np.nonzero(np.abs(colsums - 1.0) > 1e-12)[0]
        if bad.size:
            raise ValidationError(
                f"weight columns {[int(b) + 1 for b in bad]} do not sum to 1 "
                f"(sums {colsums[bad]})"
            )
        w.flags.writeable = False
        object.__setattr__(self, "weights", w)

    @property
    def d(self) -> int:
        return self.weights.shape[1]

    @property
    def n_terms(self) -> int:
        return self.weights.shape[0]

    def _group_coeff(self, cols) -> np.ndarray:
        """Per-row maxima of the weights over a 1-based column set."""
        idx = [c - 1 for c in cols]
        return np.max(self.weights[:, idx], axis=1)

    def stdf(self, args) -> float:
        """sum_r max_j weights[r, j] / a_j, entries of 0 excluding the column."""
        a = np.asarray(args, dtype=float)
        if a.shape != (self.d,):
            raise ValidationError(f"need {self.d} arguments, got shape {a.shape}")
        if np.any(a < 0):
            raise ValidationError("arguments must be >= 0")
        inc = a > 0
        if not inc.any():
            raise ValidationError("at least one argument must be positive")
        return float(np.sum(np.max(self.weights[:, inc] / a[inc], axis=1)))

    def l_pair(self, pair: IndexPair, x: float, y: float) -> float:
        """sum_r max(x * max_{I1} w_r, y * max_{I2} w_r); other columns drop out."""
        _check_pair(pair, self.d)
        _check_positive(x, y)
        a = self._group_coeff(pair.i1)
        b = self._group_coeff(pair.i2)
        return float(np.sum(np.maximum(x * a, y * b)))

    def functionals(self, pair: IndexPair) -> TailFunctionals:
        _check_pair(pair, self.d)
        a = self._group_coeff(pair.i1)
        b = self._group_coeff(pair.i2)

        def l_pair_fn(x: float, y: float) -> float:
            return float(np.sum(np.maximum(x * a, y * b)))

        return _build_functionals(
            l_pair_fn,
            eps1=float(a.sum()),
            eps2=float(b.sum()),
            eps_union=float(np.maximum(a, b).sum()),
            size1=len(pair.i1),
            size2=len(pair.i2),
        )

    def to_dict(self) -> dict:
        return {"family": "m4", "weights": self.weights.tolist()}


# ---------------------------------------------------------------------------
# Gaussian (asymptotically independent)
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class GaussianModel:
    """Standard d-variate Gaussian with a positive definite correlation matrix.

    All pairs with |rho| < 1 are asymptotically independent, so the group
    coefficient eps_pair is exactly 0 and the informative quantity is the
    tail dependence coefficient eta.
    """

    corr: np.ndarray

    def __post_init__(self) -> None:
        c = np.array(self.corr, dtype=float)
        if c.ndim != 2 or c.shape[0] != c.shape[1] or c.shape[0] < 1:
            raise ValidationError(f"correlation matrix must be square, got shape {c.shape}")
        if not np.all(np.isfinite(c)):
            raise ValidationError("correlation matrix contains non-finite entries")
        if not np.allclose(c, c.T, atol=1e-12, rtol=0.0):
            raise ValidationError("correlation matrix must be symmetric")
        if np.any(np.abs(np.diag(c) - 1.0) > 1e-12):
            raise ValidationError("correlation matrix must have unit diagonal")
        off = c[~np.eye(c.shape[0], dtype=bool)]
        if off.size and (off.min() <= -1.0 or off.max() >= 1.0):
            raise ValidationError("off-diagonal correlations must lie strictly inside (-1, 1)")
        try:
            np.linalg.cholesky(c)
        except np.linalg.LinAlgError:
            raise ValidationError("correlation matrix is not positive definite") from None
        c.flags.writeable = False
        object.__setattr__(self, "corr", c)

    @property
    def d(self) -> int:
        return self.corr.shape[0]

    def max_cross_correlation(self, pair: IndexPair) -> float:
        _check_pair(pair, self.d)
        i = [c - 1 for c in pair.i1]
        j = [c - 1 for c in pair.i2]
        return float(self.corr[np.ix_(i, j)].max())

    def eta(self, pair: IndexPair) -> float:
        """(1 + max cross-correlation) / 2."""
        return (1.0 + self.max_cross_correlation(pair)) / 2.0

    def eps_pair(self, pair: IndexPair) -> float:
        """Exactly 0: Gaussian groups are asymptotically independent."""
        _check_pair(pair, self.d)
        return 0.0

    def to_dict(self) -> dict:
        return {"family": "gaussian", "corr": self.corr.tolist()}


# ---------------------------------------------------------------------------
# min-factor construction (asymptotically independent, known closed forms)
# ---------------------------------------------------------------------------


def _c_12_34(x: float, y: float) -> float:
    if x <= y:
        return 2.0 * x * y ** (1.0 / 3.0) - x ** (4.0 / 3.0)
    return y * x ** (1.0 / 3.0)


@dataclass(frozen=True)
class MinFactorModel:
    """Fixed 4-dimensional construction from five independent uniforms.

    With V1..V5 i.i.d. U(0,1):

        X1 = min(V3, V2, V1),  X2 = min(V4, V2, V1),
        X3 = min(V4, V3, V1),  X4 = V5.

    Components 1-3 share factors pairwise, component 4 is independent, which
    makes every group pair asymptotically independent with a non-trivial
    tail dependence coefficient eta.  Joint survival probabilities of the
    group maxima have closed forms for the three analyzed pairs.
    """

    d: int = field(default=4, init=False)

    _SUPPORTED = (((1, 2), (3, 4)), ((1, 2, 3), (4,)), ((1,), (2, 3, 4)))

    def _which_pair(self, pair: IndexPair) -> int:
        _check_pair(pair, self.d)
        key = (pair.i1, pair.i2)
        for k, supported in enumerate(self._SUPPORTED):
            if key == supported:
                return k
        raise ValidationError(
            f"unsupported pair ({pair.i1}, {pair.i2}); closed forms exist for "
            f"{self._SUPPORTED}"
        )

    def joint_survival(self, t: float, x: float, y: float, pair: IndexPair) -> float:
        """P(M(I1) > 1 - x/t, M(I2) > 1 - y/t) on the uniform margin scale.

        Exact for all t with x/t < 1 and y/t < 1, by inclusion-exclusion over
        the shared uniform factors.
        """
        k = self._which_pair(pair)
        _check_positive(x, y)
        if not t > 1:
            raise ValidationError(f"t must exceed 1, got {t}")
        u, v = x / t, y / t
        if u >= 1.0 or v >= 1.0:
            raise ValidationError(f"x/t and y/t must be below 1, got {u} and {v}")
        if k == 0:  # ({1,2}, {3,4})
            if x <= y:
                return (2.0 * u * v ** (1.0 / 3.0) + 2.0 * u * v
                        - u ** (4.0 / 3.0) - 2.0 * u * v ** (4.0 / 3.0))
            return (u ** (1.0 / 3.0) * v + 2.0 * u * v
                    - u ** (4.0 / 3.0) * v - u ** (1.0 / 3.0) * v ** 2)
        if k == 1:  # ({1,2,3}, {4}): component 4 is independent of the rest
            return (3.0 * u - 2.0 * u ** (4.0 / 3.0)) * v
        # ({1}, {2,3,4})
        w = min(u, v)
        return (2.0 * w ** (2.0 / 3.0) * u ** (1.0 / 3.0) * v ** (1.0 / 3.0)
                + u * v
                - w * v ** (1.0 / 3.0)
                - 2.0 * w ** (2.0 / 3.0) * u ** (1.0 / 3.0) * v ** (4.0 / 3.0)
                + w * v ** (4.0 / 3.0))

    def eta_and_c(self, pair: IndexPair):
        """Tail dependence coefficient eta and the limiting shape c(x, y).

        c is normalized so c(1, 1) = 1 and is homogeneous of order 1/eta.
        """
        k = self._which_pair(pair)
        if k == 0:
            return 0.75, _c_12_34
        if k == 1:
            return 0.5, lambda x, y: x * y
        return 0.75, lambda x, y: _c_12_34(y, x)

    def eta(self, pair: IndexPair) -> float:
        return self.eta_and_c(pair)[0]

    def pairwise_eta(self) -> dict:
        """eta for every singleton pair ({i}, {j}), i < j.

        Components 1-3 share a uniform factor pairwise (eta 3/4); component 4
        is independent of everything (eta 1/2).
        """
        table = {(i, j): 0.75 for i in (1, 2, 3) for j in (1, 2, 3) if i < j}
        table.update({(i, 4): 0.5 for i in (1, 2, 3)})
        return table

    def to_dict(self) -> dict:
        return {"family": "minfactor"}


def eta_from_pairwise(eta_table: dict, pair: IndexPair) -> float:
    """Group tail dependence coefficient as the maximum over cross pairs.

    ``eta_table`` maps singleton pairs (i, j) to eta values in (0, 1]; since
    eta is symmetric, either key order is accepted.
    """
    best = None
    for i in pair.i1:
        for j in pair.i2:
            v = eta_table.get((i, j), eta_table.get((j, i)))
            if v is None:
                raise ValidationError(f"eta table is missing the cross pair ({i}, {j})")
            if not (0.0 < v <= 1.0):
                raise ValidationError(f"eta for pair ({i}, {j}) must lie in (0, 1], got {v}")
            if best is None or v > best:
                best = v
    return float(best)


# ---------------------------------------------------------------------------
# serialization
# ---------------------------------------------------------------------------


def model_from_dict(spec: dict):
    """Build a model from its JSON form (see each model's ``to_dict``)."""
    if not isinstance(spec, dict) or "family" not in spec:
        raise ValidationError(f"model spec must be a dict with a 'family' key, got {spec!r}")
    family = spec["family"]
    if family == "logistic":
        return LogisticModel(theta=float(spec["theta"]), d=int(spec["d"]))
    if family == "m4":
        return M4Model(weights=np.asarray(spec["weights"], dtype=float))
    if family == "gaussian":
        return GaussianModel(corr=np.asarray(spec["corr"], dtype=float))
    if family == "minfactor":
        return MinFactorModel()
    raise ValidationError(f"unknown model family {family!r}")
