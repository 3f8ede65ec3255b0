"""Shared statistical helpers for the mechanism and acceptance tests."""

import numpy as np


def truncated_shift_pmfs(dist, radius):
    """Mass of `dist` and its unit shift over [-radius, radius].

    Points where either mass underflows double precision are dropped; each
    carries under 1e-300 absolute mass and a vanishing share of any
    divergence sum, far below the certificate tolerances used here.
    """
    xs = [
        x
        for x in range(-radius, radius + 1)
        if dist.pmf(x) > 0.0 and dist.pmf(x - 1) > 0.0
    ]
    return [dist.pmf(x) for x in xs], [dist.pmf(x - 1) for x in xs]


def chisquare_vs_pmf(draws, dist, min_tail_expected=10.0):
    """Chi-square goodness of fit of integer draws against an analytic pmf.

    Integer bins across the window where expected counts are meaningful;
    both tails are pooled so every bin's expected count is at least
    `min_tail_expected`.

    Returns:
        (statistic, pvalue) from scipy.stats.chisquare.
    """
    from scipy import stats

    n = len(draws)
    # generous evaluation window, then pick the pooling point
    sigma = float(dist.sigma_sq) ** 0.5
    big = int(10 * sigma) + 10
    pmf = {x: dist.pmf(x) for x in range(-big, big + 1)}
    tail = 0.0
    w = big
    while w > 1:
        tail += pmf[w] + pmf[-w]
        if n * tail / 2 >= min_tail_expected:
            break
        w -= 1
    counts = {}
    for x in draws:
        counts[x] = counts.get(x, 0) + 1

    observed = []
    expected = []
    # left pooled tail, singleton bins, right pooled tail
    observed.append(sum(v for k, v in counts.items() if k <= -w))
    expected.append(n * sum(pmf[x] for x in range(-big, -w + 1)))
    for x in range(-w + 1, w):
        observed.append(counts.get(x, 0))
        expected.append(n * pmf[x])
    observed.append(sum(v for k, v in counts.items() if k >= w))
    expected.append(n * sum(pmf[x] for x in range(w, big + 1)))

    observed = np.asarray(observed, dtype=float)
    expected = np.asarray(expected, dtype=float)
    expected *= observed.sum() / expected.sum()
    return stats.chisquare(observed, expected)
