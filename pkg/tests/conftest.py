import numpy as np
import pytest

from grouptail import LogisticModel, M4Model, make_index_pair

# Four-term moving-maxima weight table with unit column sums; the worked
# reference case for the exact group coefficients (7/8, 3/8, ...).
WEIGHTS_4X4 = np.array(
    [
        [1.0, 1.0, 1.0, 1.0],
        [5.0, 4.0, 7.0, 1.0],
        [1.0, 2.0, 0.0, 0.0],
        [1.0, 1.0, 0.0, 6.0],
    ]
) / 8.0


@pytest.fixture
def m4_weights():
    return WEIGHTS_4X4.copy()


@pytest.fixture
def m4_model():
    return M4Model(WEIGHTS_4X4)


@pytest.fixture
def logistic_half():
    return LogisticModel(theta=0.5, d=4)


@pytest.fixture
def pair_12_34():
    return make_index_pair((1, 2), (3, 4), 4)


@pytest.fixture
def pair_12_4():
    return make_index_pair((1, 2), (4,), 4)


def random_m4_table(rng, n_rows, d):
    """Random non-negative weight table with exact unit column sums."""
    w = rng.random((n_rows, d)) + 0.05
    return w / w.sum(axis=0, keepdims=True)


def build_price_csv(path, n_months, seed):
    """Price CSV whose monthly maxima of negative log-returns are i.i.d.
    draws carrying the reference weight table's copula.

    Each month has two trading days: the first day's return is the month's
    target value, the second day cancels it so prices stay bounded.  The
    draws are mapped to the uniform scale first; a strictly increasing
    per-column rescale leaves every rank-based estimate unchanged.
    """
    from grouptail import sample_m4

    draws = sample_m4(M4Model(WEIGHTS_4X4), n_months, seed)
    returns = np.exp(-1.0 / draws.raw.data)
    names = ["c1", "c2", "c3", "c4"]
    lines = ["date," + ",".join(names)]
    prices = np.full(4, 100.0)
    lines.append("1899-12-28," + ",".join(f"{p:.12g}" for p in prices))
    for i in range(n_months):
        year, month = 1900 + i // 12, 1 + i % 12
        down = prices * np.exp(-returns[i])
        lines.append(f"{year:04d}-{month:02d}-10," + ",".join(f"{p:.12g}" for p in down))
        lines.append(f"{year:04d}-{month:02d}-20," + ",".join(f"{p:.12g}" for p in prices))
    path.write_text("\n".join(lines) + "\n")
    return path
