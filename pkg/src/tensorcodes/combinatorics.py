"""Exact counts of matrices and low-rank tensors over GF(q), and the
lower bounds on the number of errors the fibre-wise decoders correct.

All counts are Python ints; intermediate divisions go through Fraction and
are checked to be integral.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from itertools import combinations, product

import numpy as np


def _exact(x: Fraction) -> int:
    if x.denominator != 1:
        raise ArithmeticError(f"non-integral count {x}")
    return int(x)


def gaussian_binomial(a: int, b: int, q: int) -> int:
    """Number of a-dimensional subspaces of GF(q)^b."""
    if not 0 <= a <= b:
        raise ValueError("need 0 <= a <= b")
    num, den = 1, 1
    for i in range(a):
        num *= q ** (b - i) - 1
        den *= q ** (i + 1) - 1
    return _exact(Fraction(num, den))


def count_rank_matrices(q: int, rows: int, cols: int, r: int) -> int:
    """Number of rows x cols matrices over GF(q) of rank exactly r."""
    if not 0 <= r <= min(rows, cols):
        raise ValueError("rank out of range")
    num, den = 1, 1
    for i in range(r):
        num *= (q ** rows - q ** i) * (q ** cols - q ** i)
        den *= q ** r - q ** i
    return _exact(Fraction(num, den))


def count_rank_le(q: int, rows: int, cols: int, r: int) -> int:
    return sum(count_rank_matrices(q, rows, cols, s) for s in range(min(r, rows, cols) + 1))


def count_trank1(q: int, k: int, m: int, n: int) -> int:
    return _exact(Fraction((q ** k - 1) * (q ** m - 1) * (q ** n - 1), (q - 1) ** 2))


def count_trank2(q: int, k: int, m: int, n: int) -> int:
    """Closed form for tensors of rank exactly two in GF(q)^k x GF(q)^m x GF(q)^n."""
    if min(k, m, n) < 2:
        raise ValueError("need k, m, n >= 2")
    Q = Fraction(q)
    lead = Q * (q ** n - 1) * (q ** m - 1) * (q ** k - 1) / ((q - 1) ** 3 * (q ** 2 - 1))
    first = Fraction((q ** (n - 1) - 1) * (q ** (m - 1) - 1) * (q ** (k - 1) - 1) * q ** 2 * (q + 1), 2)
    second = (q - 1) * (
        Fraction(q ** (n + m) + q ** (k + n) + q ** (k + m), q ** 2)
        - 2 * Fraction(q ** k + q ** m + q ** n, q)
        + 3
    )
    return _exact(lead * (first + second))


def roth_trank2_count(q: int, n: int) -> int:
    """Errors of tensor rank <= 2 in (GF(q)^n)^(x3), in the factored cubic form."""
    a = Fraction(q * (q ** n - 1) ** 3 * (q ** (n - 1) - 1) ** 2, (q - 1) ** 3 * (q ** 2 - 1))
    b = Fraction(q ** 2 * (q + 1) * (q ** (n - 1) - 1), 2) + 3 * (q - 1)
    return _exact(a * b + Fraction((q ** n - 1) ** 3, (q - 1) ** 2) + 1)


def rank_leR_upperbound(q: int, n: int, R: int) -> int:
    """Upper bound (q^n - 1)^(3R) / (q - 1)^(2R) on tensors of rank <= R."""
    if R < 2 or n < 2:
        raise ValueError("need R >= 2 and n >= 2")
    return _exact(Fraction((q ** n - 1) ** (3 * R), (q - 1) ** (2 * R)))


@dataclass(frozen=True)
class ErrorBounds:
    N1: int
    N2: int

    @property
    def log10_ratio(self) -> float:
        return log10_int(self.N2) - log10_int(self.N1)


def log10_int(x: int) -> float:
    """log10 of a positive int of any size (math.log10 handles big ints)."""
    if x <= 0:
        raise ValueError("log of a non-positive count")
    return math.log10(x)


def alg_error_lowerbounds(q: int, n: int, mu1: int, mu2: int) -> ErrorBounds:
    """Lower bounds on the number of errors corrected by the column-wise
    decoder (N1) and the two-way decoder (N2) on the box code."""
    radius = (n - mu1 - 1) // 2
    A = count_rank_le(q, n, n, radius) if radius >= 0 else 0
    total = q ** (n * n)
    N1 = A ** n
    kmin = -(-(n + mu2 + 1) // 2)
    N2 = sum(math.comb(n, k) * A ** k * (total - A) ** (n - k) for k in range(kmin, n + 1))
    return ErrorBounds(N1, N2)


def figure3_grid(q: int, n: int, mus=range(1, 9)) -> list[tuple[int, int, float]]:
    rows = []
    for mu1 in mus:
        for mu2 in mus:
            rows.append((mu1, mu2, alg_error_lowerbounds(q, n, mu1, mu2).log10_ratio))
    return rows


@dataclass(frozen=True)
class Table1:
    S_n: int
    T1: int
    T2: int
    roth_trank1: int
    roth_trank2: int


def table1_quantities(q: int, n: int) -> Table1:
    """Counts behind the comparison of fibre-wise decoders with Roth's decoders."""
    S = 1 + _exact(Fraction((q ** n - 1) ** 2, q - 1))
    T1 = S ** n
    T2 = n * S ** (n - 1) * (q ** (n * n) - S) + S ** n
    return Table1(S, T1, T2, count_trank1(q, n, n, n) + 1, roth_trank2_count(q, n))


# -- brute-force cross-checks ---------------------------------------------------


def enumerate_subspaces(a: int, b: int, q: int) -> int:
    """Count a-dim subspaces of GF(q)^b via their reduced echelon forms."""
    count = 0
    for pivots in combinations(range(b), a):
        free = [(i, c) for i, p in enumerate(pivots) for c in range(p + 1, b) if c not in pivots]
        count += q ** len(free)
    return count


def low_rank_tensor_counts(q: int, dims: tuple[int, int, int], max_rank: int = 2) -> list[int]:
    """Exhaustive counts of tensors of rank exactly 0..max_rank over GF(q), q prime,
    by iterated sumsets of the rank-one tensors."""
    size = int(np.prod(dims))

    def rank_one():
        vecs = [
            [np.array(v) for v in product(range(q), repeat=d) if any(v)] for d in dims
        ]
        out = set()
        for a in vecs[0]:
            for b in vecs[1]:
                for c in vecs[2]:
                    t = np.einsum("i,j,k->ijk", a, b, c).reshape(-1) % q
                    out.add(tuple(int(x) for x in t))
        return out

    ones = rank_one()
    counts = [1, len(ones)]
    level = {tuple([0] * size)} | ones
    one_arr = np.array(sorted(ones), dtype=np.int64)
    for _ in range(2, max_rank + 1):
        cur = np.array(sorted(level), dtype=np.int64)
        sums = (cur[:, None, :] + one_arr[None, :, :]) % q
        new = {tuple(row) for row in sums.reshape(-1, size).tolist()} | level
        counts.append(len(new) - len(level))
        level = new
    return counts
