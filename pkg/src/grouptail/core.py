"""Sample containers, group index pairs, and margin transforms.

Observations enter as raw n x d arrays and are mapped to pseudo-observations
in the open unit interval, either through known marginal distribution
functions (probability integral transform) or through column ranks divided
by n + 1.  Everything downstream (estimators, Monte Carlo harness, the
analysis pipeline) consumes :class:`PseudoSample`.

All containers are immutable after construction and all operations are pure,
so concurrent reads from multiple threads are safe.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass

import numpy as np
from scipy import special, stats

# Pseudo-observations are clamped to [CLAMP, 1 - CLAMP]; powers of exact 0/1
# degenerate downstream.
CLAMP = 1e-12


class GrouptailError(Exception):
    """Base class for errors raised by this package."""


class ValidationError(GrouptailError):
    """Invalid input data, index sets, or configuration."""


class DegenerateError(GrouptailError):
    """Numeric degeneracy: a computation left its usable domain."""


class Provenance(str, enum.Enum):
    """How a pseudo-sample was obtained from raw data."""

    KNOWN_MARGINS = "known_margins"
    EMPIRICAL_RANKS = "empirical_ranks"


# ---------------------------------------------------------------------------
# margin descriptors
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class UnitFrechet:
    """Distribution function exp(-1/x) on x > 0."""

    def cdf(self, x: np.ndarray) -> np.ndarray:
        x = np.asarray(x, dtype=float)
        out = np.zeros_like(x)
        pos = x > 0
        out[pos] = np.exp(-1.0 / x[pos])
        return out

    def ppf(self, p: np.ndarray) -> np.ndarray:
        return -1.0 / np.log(np.asarray(p, dtype=float))

    def to_dict(self) -> dict:
        return {"family": "unit_frechet"}


@dataclass(frozen=True)
class Uniform01:
    """Standard uniform distribution on [0, 1]."""

    def cdf(self, x: np.ndarray) -> np.ndarray:
        return np.clip(np.asarray(x, dtype=float), 0.0, 1.0)

    def ppf(self, p: np.ndarray) -> np.ndarray:
        return np.asarray(p, dtype=float)

    def to_dict(self) -> dict:
        return {"family": "uniform"}


@dataclass(frozen=True)
class StdNormal:
    """Standard normal distribution."""

    def cdf(self, x: np.ndarray) -> np.ndarray:
        return special.ndtr(np.asarray(x, dtype=float))

    def ppf(self, p: np.ndarray) -> np.ndarray:
        return special.ndtri(np.asarray(p, dtype=float))

    def to_dict(self) -> dict:
        return {"family": "std_normal"}


@dataclass(frozen=True)
class PowerUniform:
    """Distribution function 1 - (1 - x)^k on [0, 1], integer k >= 1.

    This is the law of the minimum of k independent standard uniforms.
    """

    k: int

    def __post_init__(self) -> None:
        if not (isinstance(self.k, (int, np.integer)) and self.k >= 1):
            raise ValidationError(f"PowerUniform exponent must be an integer >= 1, got {self.k!r}")

    def cdf(self, x: np.ndarray) -> np.ndarray:
        x = np.clip(np.asarray(x, dtype=float), 0.0, 1.0)
        return 1.0 - (1.0 - x) ** self.k

    def ppf(self, p: np.ndarray) -> np.ndarray:
        p = np.asarray(p, dtype=float)
        return 1.0 - (1.0 - p) ** (1.0 / self.k)

    def to_dict(self) -> dict:
        return {"family": "power_uniform", "k": int(self.k)}


#: One marginal descriptor per column.
Margins = tuple

_MARGIN_FAMILIES = {
    "unit_frechet": UnitFrechet,
    "uniform": Uniform01,
    "std_normal": StdNormal,
    "power_uniform": PowerUniform,
}


def margin_from_dict(spec: dict):
    """Rebuild a margin descriptor from its ``to_dict`` form."""
    try:
        family = spec["family"]
        cls = _MARGIN_FAMILIES[family]
    except (KeyError, TypeError):
        raise ValidationError(f"unknown margin descriptor: {spec!r}") from None
    kwargs = {k: v for k, v in spec.items() if k != "family"}
    return cls(**kwargs)


# ---------------------------------------------------------------------------
# sample containers
# ---------------------------------------------------------------------------


def _frozen_matrix(data, what: str) -> np.ndarray:
    a = np.array(data, dtype=float)
    if a.ndim != 2:
        raise ValidationError(f"{what} must be a 2-d array, got shape {a.shape}")
    n, d = a.shape
    if n < 1 or d < 1:
        raise ValidationError(f"{what} needs at least one row and one column, got {n} x {d}")
    if not np.all(np.isfinite(a)):
        raise ValidationError(f"{what} contains non-finite entries")
    a.flags.writeable = False
    return a


@dataclass(frozen=True)
class RawSample:
    """An n x d matrix of raw observations, one row per observation."""

    data: np.ndarray

    def __post_init__(self) -> None:
        object.__setattr__(self, "data", _frozen_matrix(self.data, "raw sample"))

    @property
    def n(self) -> int:
        return self.data.shape[0]

    @property
    def d(self) -> int:
        return self.data.shape[1]


@dataclass(frozen=True)
class PseudoSample:
    """Margin-transformed observations, every entry strictly inside (0, 1)."""

    data: np.ndarray
    provenance: Provenance

    def __post_init__(self) -> None:
        a = _frozen_matrix(self.data, "pseudo-sample")
        if a.min() <= 0.0 or a.max() >= 1.0:
            raise ValidationError("pseudo-sample entries must lie strictly inside (0, 1)")
        object.__setattr__(self, "data", a)
        object.__setattr__(self, "provenance", Provenance(self.provenance))

    @property
    def n(self) -> int:
        return self.data.shape[0]

    @property
    def d(self) -> int:
        return self.data.shape[1]


def _checked_index_set(cols, d: int, what: str) -> tuple:
    """Validate a 1-based column index set and return it sorted."""
    cols = tuple(int(c) for c in cols)
    if not cols:
        raise ValidationError(f"{what} must not be empty")
    if len(set(cols)) != len(cols):
        raise ValidationError(f"{what} contains duplicate columns: {cols}")
    bad = [c for c in cols if c < 1 or c > d]
    if bad:
        raise ValidationError(f"{what} has out-of-range columns {bad} for dimension {d}")
    return tuple(sorted(cols))


@dataclass(frozen=True)
class IndexPair:
    """Two disjoint, non-empty sets of 1-based column indices within 1..d."""

    i1: tuple
    i2: tuple
    d: int

    def __post_init__(self) -> None:
        d = int(self.d)
        if d < 1:
            raise ValidationError(f"ambient dimension must be >= 1, got {d}")
        i1 = _checked_index_set(self.i1, d, "index set i1")
        i2 = _checked_index_set(self.i2, d, "index set i2")
        overlap = set(i1) & set(i2)
        if overlap:
            raise ValidationError(f"index sets must be disjoint, both contain {sorted(overlap)}")
        object.__setattr__(self, "i1", i1)
        object.__setattr__(self, "i2", i2)
        object.__setattr__(self, "d", d)

    @property
    def union(self) -> tuple:
        return tuple(sorted(self.i1 + self.i2))

    def swapped(self) -> "IndexPair":
        return IndexPair(self.i2, self.i1, self.d)

    def to_dict(self) -> dict:
        return {"i1": list(self.i1), "i2": list(self.i2), "d": self.d}


def make_index_pair(i1, i2, d: int) -> IndexPair:
    """Build a validated :class:`IndexPair` from two 1-based index sets."""
    return IndexPair(tuple(i1), tuple(i2), int(d))


# ---------------------------------------------------------------------------
# transforms
# ---------------------------------------------------------------------------


def pit_transform(raw: RawSample, margins: Margins) -> PseudoSample:
    """Probability integral transform with known marginal distributions.

    Parameters
    ----------
    raw : RawSample
        Observations whose column j follows the distribution ``margins[j]``.
    margins : tuple
        One margin descriptor per column.

    Returns
    -------
    PseudoSample
        Entry (i, j) equals ``margins[j].cdf(raw.data[i, j])`` clamped to
        ``[CLAMP, 1 - CLAMP]`` so the output stays strictly inside (0, 1).
    """
    if len(margins) != raw.d:
        raise ValidationError(f"need {raw.d} margin descriptors, got {len(margins)}")
    u = np.empty_like(raw.data)
    for j, margin in enumerate(margins):
        u[:, j] = margin.cdf(raw.data[:, j])
    np.clip(u, CLAMP, 1.0 - CLAMP, out=u)
    return PseudoSample(u, Provenance.KNOWN_MARGINS)


def rank_transform(raw: RawSample) -> PseudoSample:
    """Rank-based pseudo-observations: column ranks divided by n + 1.

    Ties receive average ranks, which keeps column means exact.  Requires at
    least two rows.
    """
    if raw.n < 2:
        raise ValidationError(f"rank transform needs at least 2 rows, got {raw.n}")
    ranks = stats.rankdata(raw.data, method="average", axis=0)
    return PseudoSample(ranks / (raw.n + 1.0), Provenance.EMPIRICAL_RANKS)


def group_max(sample: PseudoSample, cols, x: float, row: int | None = None):
    """Row-wise maximum of pseudo-observations over a column group.

    Computes ``max_{j in cols} u_{ij}^(1/x)`` for every row i, the building
    block of the group estimators.

    Parameters
    ----------
    sample : PseudoSample
    cols : iterable of int
        Non-empty 1-based column indices.
    x : float
        Positive exponent denominator; each entry is raised to ``1/x``.
    row : int, optional
        If given, return the scalar value for this single row.

    Returns
    -------
    numpy.ndarray or float
        Length-n vector, or a scalar when ``row`` is given.
    """
    if not x > 0:
        raise ValidationError(f"exponent denominator must be positive, got {x}")
    cols = _checked_index_set(cols, sample.d, "column group")
    block = sample.data[:, [c - 1 for c in cols]]
    vals = np.max(block ** (1.0 / x), axis=1)
    if row is not None:
        return float(vals[row])
    return vals
