"""Financial block-maxima workflow: prices -> returns -> monthly maxima ->
group tail dependence table.

Input files are CSV with a ``date`` column (ISO ``YYYY-MM-DD``) followed by
one positive price column per market index.  Negative log-returns are taken
day over day, monthly maxima per column, columns are grouped into markets by
a small JSON config, and each configured group pair gets a rank-based
extremal coefficient of dependence estimate.
"""

from __future__ import annotations

import csv
import datetime
import json
from dataclasses import dataclass
from importlib import resources
from pathlib import Path

import numpy as np

from .core import IndexPair, RawSample, ValidationError, rank_transform
from .estimate import Estimate, eps_pair_estimate, eps_scaled_estimate, l_pair_estimate

DEFAULT_GROUPS_RESOURCE = "default_groups.json"


@dataclass(frozen=True)
class PriceSeries:
    """Aligned daily closing prices, strictly increasing dates, all positive."""

    dates: tuple
    prices: np.ndarray
    names: tuple

    def __post_init__(self) -> None:
        p = np.array(self.prices, dtype=float)
        p.flags.writeable = False
        object.__setattr__(self, "prices", p)
        object.__setattr__(self, "dates", tuple(self.dates))
        object.__setattr__(self, "names", tuple(self.names))

    @property
    def n(self) -> int:
        return self.prices.shape[0]


@dataclass(frozen=True)
class ReturnTable:
    """Dated return values; same layout as PriceSeries without positivity."""

    dates: tuple
    values: np.ndarray
    names: tuple

    def __post_init__(self) -> None:
        v = np.array(self.values, dtype=float)
        v.flags.writeable = False
        object.__setattr__(self, "values", v)
        object.__setattr__(self, "dates", tuple(self.dates))
        object.__setattr__(self, "names", tuple(self.names))


@dataclass(frozen=True)
class BlockMaxima:
    """Per-month column maxima; months with no observations are absent."""

    months: tuple  # of (year, month)
    maxima: np.ndarray
    names: tuple

    def __post_init__(self) -> None:
        m = np.array(self.maxima, dtype=float)
        m.flags.writeable = False
        object.__setattr__(self, "maxima", m)
        object.__setattr__(self, "months", tuple(self.months))
        object.__setattr__(self, "names", tuple(self.names))

    @property
    def n(self) -> int:
        return self.maxima.shape[0]


def load_prices(path) -> PriceSeries:
    """Parse one price CSV, rejecting bad rows with their line number.

    The header must be ``date,<name1>,...``; every data row needs an ISO
    date strictly later than the previous one and a positive price in every
    column.
    """
    path = Path(path)
    with path.open(newline="", encoding="utf-8") as fh:
        reader = csv.reader(fh)
        try:
            header = next(reader)
        except StopIteration:
            raise ValidationError(f"{path}: file is empty") from None
        if len(header) < 2 or header[0].strip().lower() != "date":
            raise ValidationError(
                f"{path}: header must be 'date,<name1>,...', got {header!r}"
            )
        names = tuple(h.strip() for h in header[1:])
        if len(set(names)) != len(names):
            raise ValidationError(f"{path}: duplicate column names in header")
        dates: list = []
        rows: list = []
        for lineno, row in enumerate(reader, start=2):
            if not row or all(not cell.strip() for cell in row):
                continue
            if len(row) != len(names) + 1:
                raise ValidationError(
                    f"{path}: line {lineno}: expected {len(names) + 1} cells, got {len(row)}"
                )
            try:
                day = datetime.date.fromisoformat(row[0].strip())
            except ValueError:
                raise ValidationError(
                    f"{path}: line {lineno}: bad date {row[0]!r}"
                ) from None
            if dates and day <= dates[-1]:
                raise ValidationError(
                    f"{path}: line {lineno}: date {day} does not increase past {dates[-1]}"
                )
            values = []
            for name, cell in zip(names, row[1:]):
                cell = cell.strip()
                if not cell:
                    raise ValidationError(
                        f"{path}: line {lineno}: missing value in column {name}"
                    )
                try:
                    v = float(cell)
                except ValueError:
                    raise ValidationError(
                        f"{path}: line {lineno}: unparseable value {cell!r} in column {name}"
                    ) from None
                if not np.isfinite(v) or v <= 0.0:
                    raise ValidationError(
                        f"{path}: line {lineno}: non-positive price {cell} in column {name}"
                    )
                values.append(v)
            dates.append(day)
            rows.append(values)
    if not rows:
        raise ValidationError(f"{path}: no data rows")
    return PriceSeries(tuple(dates), np.asarray(rows), names)


def merge_prices(series) -> tuple:
    """Inner-join several price series on dates.

    Returns (merged PriceSeries, number of rows dropped across inputs).
    Trading calendars differ between markets; only common dates are kept.
    """
    series = list(series)
    if not series:
        raise ValidationError("nothing to merge")
    if len(series) == 1:
        return series[0], 0
    all_names = [n for s in series for n in s.names]
    if len(set(all_names)) != len(all_names):
        raise ValidationError("duplicate column names across price files")
    common = set(series[0].dates)
    for s in series[1:]:
        common &= set(s.dates)
    if not common:
        raise ValidationError("price files share no common dates")
    kept = sorted(common)
    dropped = sum(s.n - len(kept) for s in series)
    blocks = []
    for s in series:
        pos = {day: i for i, day in enumerate(s.dates)}
        blocks.append(s.prices[[pos[day] for day in kept], :])
    return PriceSeries(tuple(kept), np.hstack(blocks), tuple(all_names)), dropped


def neg_log_returns(series: PriceSeries) -> ReturnTable:
    """Day-over-day negative log-returns, dated by the later day."""
    if series.n < 2:
        raise ValidationError(f"need at least 2 price rows, got {series.n}")
    r = -np.diff(np.log(series.prices), axis=0)
    return ReturnTable(series.dates[1:], r, series.names)


def monthly_block_maxima(returns: ReturnTable) -> BlockMaxima:
    """Column-wise maxima within each observed (year, month)."""
    if len(returns.dates) == 0:
        raise ValidationError("return table is empty")
    months: list = []
    maxima: list = []
    current = None
    for i, day in enumerate(returns.dates):
        key = (day.year, day.month)
        if key != current:
            months.append(key)
            maxima.append(returns.values[i].copy())
            current = key
        else:
            np.maximum(maxima[-1], returns.values[i], out=maxima[-1])
    return BlockMaxima(tuple(months), np.asarray(maxima), returns.names)


# ---------------------------------------------------------------------------
# group configuration and analysis
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class GroupConfig:
    """Named column groups plus the group pairs to analyze.

    A pair entry is a (expr, expr) tuple where an expr is a group label or a
    union of labels joined by ``|``, e.g. ``"USA|FarEast"``.
    """

    groups: dict
    pairs: tuple

    def __post_init__(self) -> None:
        if not self.groups:
            raise ValidationError("group config has no groups")
        groups = {str(k): tuple(str(n) for n in v) for k, v in self.groups.items()}
        for label, members in groups.items():
            if not members:
                raise ValidationError(f"group {label!r} is empty")
        pairs = tuple((str(a), str(b)) for a, b in self.pairs)
        if not pairs:
            raise ValidationError("group config lists no pairs to analyze")
        object.__setattr__(self, "groups", groups)
        object.__setattr__(self, "pairs", pairs)

    @classmethod
    def from_dict(cls, spec: dict) -> "GroupConfig":
        try:
            return cls(groups=dict(spec["groups"]), pairs=[tuple(p) for p in spec["pairs"]])
        except (KeyError, TypeError, ValueError):
            raise ValidationError(
                "group config must look like "
                '{"groups": {label: [names]}, "pairs": [[expr, expr], ...]}'
            ) from None

    @classmethod
    def from_file(cls, path) -> "GroupConfig":
        with Path(path).open(encoding="utf-8") as fh:
            return cls.from_dict(json.load(fh))

    def member_names(self, expr: str) -> tuple:
        """Column names of a group expression (label or '|'-joined union)."""
        out: list = []
        for label in expr.split("|"):
            label = label.strip()
            if label not in self.groups:
                raise ValidationError(f"unknown group {label!r} in expression {expr!r}")
            for name in self.groups[label]:
                if name not in out:
                    out.append(name)
        return tuple(out)


def default_group_config() -> GroupConfig:
    """The packaged market grouping (Europe, USA, Far East index names)."""
    text = resources.files(__package__).joinpath("data", DEFAULT_GROUPS_RESOURCE).read_text()
    return GroupConfig.from_dict(json.loads(text))


@dataclass(frozen=True)
class PairAnalysis:
    """One analyzed group pair."""

    label_i1: str
    label_i2: str
    cols_i1: tuple
    cols_i2: tuple
    eps_i1: Estimate
    eps_i2: Estimate
    eps_union: Estimate
    eps_pair: Estimate
    n: int
    note: str


def _resolve_columns(names, wanted, expr: str) -> tuple:
    index = {name: i + 1 for i, name in enumerate(names)}
    missing = [w for w in wanted if w not in index]
    if missing:
        raise ValidationError(f"expression {expr!r} names unknown columns {missing}")
    return tuple(index[w] for w in wanted)


def analyze(maxima: BlockMaxima, config: GroupConfig, level: float = 0.95) -> tuple:
    """Rank-based extremal coefficient of dependence for each configured pair.

    The block maxima are rank-transformed once and every pair in the config
    is estimated on the shared pseudo-sample.  Each result carries the two
    group coefficients, the union coefficient, and the pair coefficient; a
    note flags the (only possible) bound violation, a negative pair value.
    """
    pseudo = rank_transform(RawSample(maxima.maxima))
    d = pseudo.d
    results = []
    for expr1, expr2 in config.pairs:
        cols1 = _resolve_columns(maxima.names, config.member_names(expr1), expr1)
        cols2 = _resolve_columns(maxima.names, config.member_names(expr2), expr2)
        overlap = set(cols1) & set(cols2)
        if overlap:
            raise ValidationError(
                f"pair ({expr1!r}, {expr2!r}) overlaps on columns "
                f"{sorted(maxima.names[c - 1] for c in overlap)}"
            )
        pair = IndexPair(cols1, cols2, d)
        e1 = eps_scaled_estimate(pseudo, pair.i1, 1.0, level)
        e2 = eps_scaled_estimate(pseudo, pair.i2, 1.0, level)
        eu = l_pair_estimate(pseudo, pair, 1.0, 1.0, level)
        ep = eps_pair_estimate(pseudo, pair, level)
        note = "below zero" if ep.value < 0.0 else ""
        results.append(PairAnalysis(
            label_i1=expr1,
            label_i2=expr2,
            cols_i1=cols1,
            cols_i2=cols2,
            eps_i1=e1,
            eps_i2=e2,
            eps_union=eu,
            eps_pair=ep,
            n=pseudo.n,
            note=note,
        ))
    return tuple(results)


def format_analysis_table(results) -> str:
    """Tab-separated analysis table, nine decimal places."""
    lines = ["i1\ti2\teps_i1\teps_i2\teps_union\teps_pair\tn\tnote"]
    for r in results:
        lines.append(
            f"{r.label_i1}\t{r.label_i2}\t{r.eps_i1.value:.9f}\t{r.eps_i2.value:.9f}"
            f"\t{r.eps_union.value:.9f}\t{r.eps_pair.value:.9f}\t{r.n}\t{r.note}"
        )
    return "\n".join(lines) + "\n"
