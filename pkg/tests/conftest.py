import numpy as np
import pytest
from scipy.stats import chisquare


def write_lines(path, rows):
    path.write_text("".join(f"{r}\n" for r in rows))
    return str(path)


def assert_uniform_chisquare(counts, alpha=0.01):
    """Goodness-of-fit of observed state counts against the uniform law."""
    counts = np.asarray(counts, dtype=float)
    assert counts.min() >= 0
    stat, p = chisquare(counts)
    assert p > alpha, f"chi-square GOF rejected uniformity: p={p:.2e}"


def assert_chisquare_fit(counts, expected, alpha=0.01):
    counts = np.asarray(counts, dtype=float)
    expected = np.asarray(expected, dtype=float)
    expected = expected * counts.sum() / expected.sum()
    stat, p = chisquare(counts, expected)
    assert p > alpha, f"chi-square GOF rejected fit: p={p:.2e}"


@pytest.fixture
def bin10():
    from trackmc import Bin

    return Bin("b10", 0, 10)
