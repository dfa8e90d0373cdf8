"""Independent reference implementations used to cross-check the package.

These are deliberately naive (exhaustive search, exact fractions, numeric
differentiation) so they share no code or technique with the implementations
they verify.
"""

from __future__ import annotations

from fractions import Fraction
from itertools import permutations
from typing import Callable, Sequence

import numpy as np


def brute_force_matching_size(
    left: Sequence[str], right: Sequence[str], match: Callable[[str, str], bool]
) -> int:
    """Maximum injective assignment size by trying every permutation.

    Exponential; callers keep token lists at length <= 6.
    """
    if len(left) > len(right):
        left, right = right, left
    best = 0
    indices = range(len(right))
    for perm in permutations(indices, len(left)):
        size = sum(1 for a, j in zip(left, perm) if match(a, right[j]))
        best = max(best, size)
    return best


def reference_score(m: int, total: int) -> int:
    """round(100 * 2m / total) with halves away from zero, via Fraction."""
    if total == 0:
        return 0
    value = Fraction(200 * m, total)
    floor = value.numerator // value.denominator
    return floor + (1 if value - floor >= Fraction(1, 2) else 0)


def numeric_gradient(
    f: Callable[[np.ndarray], float], x: np.ndarray, eps: float = 1e-6
) -> np.ndarray:
    """Central finite differences, one coordinate at a time."""
    grad = np.zeros_like(x)
    for i in range(x.size):
        bumped = x.copy()
        bumped[i] += eps
        up = f(bumped)
        bumped[i] -= 2 * eps
        down = f(bumped)
        grad[i] = (up - down) / (2 * eps)
    return grad


def reference_edit_distance(a: str, b: str) -> int:
    """Full-matrix Wagner-Fischer, no size tricks."""
    rows = len(a) + 1
    cols = len(b) + 1
    table = [[0] * cols for _ in range(rows)]
    for i in range(rows):
        table[i][0] = i
    for j in range(cols):
        table[0][j] = j
    for i in range(1, rows):
        for j in range(1, cols):
            cost = 0 if a[i - 1] == b[j - 1] else 1
            table[i][j] = min(
                table[i - 1][j] + 1,
                table[i][j - 1] + 1,
                table[i - 1][j - 1] + cost,
            )
    return table[-1][-1]
