"""Rank correlations on tied fixtures, via scipy."""
from scipy.stats import kendalltau, pearsonr, spearmanr

FIXTURES = [
    ([3, 1, 4, 1, 5, 9, 2, 6], [2, 7, 1, 8, 2, 8, 1, 8]),
    ([1, 1, 2, 2, 3, 3, 4, 4], [1, 2, 1, 2, 3, 4, 3, 4]),
    ([0.5, 0.25, 0.25, 0.75, 1.0, 0.0, 0.5, 0.5], [10, 20, 20, 30, 30, 40, 10, 50]),
]

for x, y in FIXTURES:
    print(f"    ({spearmanr(x, y).statistic!r}, {kendalltau(x, y).statistic!r}, {pearsonr(x, y).statistic!r}),")
