"""Independent reference implementations used to check the package.

Nothing here imports framecert: ranks use plain fraction elimination,
spark and the complement property are brute force over all subsets, and
rational orthogonal matrices come from the Cayley transform.
"""

from fractions import Fraction
from itertools import combinations

import numpy as np


def frac_matrix(rows):
    return [[Fraction(x) for x in row] for row in rows]


def frac_rank(rows) -> int:
    """Rank by textbook Gaussian elimination over the rationals."""
    a = frac_matrix(rows)
    if not a:
        return 0
    nrows, ncols = len(a), len(a[0])
    r = 0
    for c in range(ncols):
        pivot = next((i for i in range(r, nrows) if a[i][c] != 0), None)
        if pivot is None:
            continue
        a[r], a[pivot] = a[pivot], a[r]
        for i in range(r + 1, nrows):
            if a[i][c] != 0:
                f = a[i][c] / a[r][c]
                a[i] = [x - f * y for x, y in zip(a[i], a[r])]
        r += 1
        if r == nrows:
            break
    return r


def frac_inverse(rows):
    n = len(rows)
    a = [row + [Fraction(int(i == j)) for j in range(n)] for i, row in enumerate(frac_matrix(rows))]
    for c in range(n):
        pivot = next(i for i in range(c, n) if a[i][c] != 0)
        a[c], a[pivot] = a[pivot], a[c]
        p = a[c][c]
        a[c] = [x / p for x in a[c]]
        for i in range(n):
            if i != c and a[i][c] != 0:
                f = a[i][c]
                a[i] = [x - f * y for x, y in zip(a[i], a[c])]
    return [row[n:] for row in a]


def frac_matmul(a, b):
    return [[sum(x * y for x, y in zip(row, col)) for col in zip(*b)] for row in a]


def brute_spark(vectors) -> int:
    m = len(vectors)
    for k in range(1, m + 1):
        for combo in combinations(range(m), k):
            if frac_rank([vectors[i] for i in combo]) < k:
                return k
    return m + 1


def brute_cp(vectors, n: int) -> bool:
    """Complement property by checking every partition."""
    m = len(vectors)
    for mask in range(2**m):
        side = [vectors[i] for i in range(m) if mask >> i & 1]
        other = [vectors[i] for i in range(m) if not mask >> i & 1]
        if frac_rank(side) < n and frac_rank(other) < n:
            return False
    return True


def cayley_orthogonal(m: int, rng: np.random.Generator, entry: int = 3):
    """Rational orthogonal matrix ``(I - A)(I + A)^{-1}`` for a random skew A."""
    a = [[Fraction(0)] * m for _ in range(m)]
    for i in range(m):
        for j in range(i + 1, m):
            v = Fraction(int(rng.integers(-entry, entry + 1)), int(rng.integers(1, 4)))
            a[i][j], a[j][i] = v, -v
    ident = [[Fraction(int(i == j)) for j in range(m)] for i in range(m)]
    minus = [[ident[i][j] - a[i][j] for j in range(m)] for i in range(m)]
    plus = [[ident[i][j] + a[i][j] for j in range(m)] for i in range(m)]
    return frac_matmul(minus, frac_inverse(plus))


def rational_parseval(n: int, m: int, rng: np.random.Generator):
    """Rows of the first n columns of a rational orthogonal M x M matrix."""
    q = cayley_orthogonal(m, rng)
    return [row[:n] for row in q]


def object_array(rows) -> np.ndarray:
    out = np.empty((len(rows), len(rows[0])), dtype=object)
    for i, row in enumerate(rows):
        out[i, :] = [Fraction(x) for x in row]
    return out


def composition(rng: np.random.Generator, n: int) -> list[int]:
    """Random composition of n into at least two positive parts."""
    while True:
        cuts = [i for i in range(1, n) if rng.random() < 0.5]
        if cuts:
            break
    b = [0, *cuts, n]
    return [b[i + 1] - b[i] for i in range(len(b) - 1)]


def random_unit(rng: np.random.Generator, n: int) -> np.ndarray:
    v = rng.standard_normal(n)
    return v / np.linalg.norm(v)
