"""Constructive error samplers.  Every sample can be re-verified against the
criterion it was built for with ``ChannelModel.verify``.

Randomness comes from numpy's PCG64; trial k of a run with seed s uses
SeedSequence([s, k]) so trials are independent of scheduling.
"""

from __future__ import annotations

from dataclasses import dataclass, field as dc_field
from itertools import product

import numpy as np

from . import linalg, metrics
from .finite_field import ExtField, FieldBasis, polynomial_basis
from .tensor_codes import fibres, from_fibres


def trial_rng(seed: int, index: int) -> np.random.Generator:
    return np.random.Generator(np.random.PCG64(np.random.SeedSequence([int(seed), int(index)])))


def independent_elements(F: ExtField, r: int, rng: np.random.Generator) -> np.ndarray:
    """r elements of GF(q^n) linearly independent over GF(q)."""
    if not 0 <= r <= F.n:
        raise ValueError("need 0 <= r <= n")
    while True:
        g = rng.integers(1, F.order, size=r)
        if r == 0 or linalg.rank(F.base, F.digits(g)) == r:
            return g.astype(np.int64)


def combine(F: ExtField, coeffs: np.ndarray, gens: np.ndarray) -> np.ndarray:
    """sum_k coeffs[..., k] gens[k] with GF(q) coefficients."""
    if len(gens) == 0:
        return np.zeros(coeffs.shape[:-1], dtype=np.int64)
    return F.sum(F.mul(F.embed(coeffs), gens), axis=-1)


def rank_bounded_vector(F: ExtField, length: int, r: int, rng: np.random.Generator,
                        exact: bool = False) -> np.ndarray:
    """Entries in the span of r random independent elements (rank <= r, or == r)."""
    while True:
        gens = independent_elements(F, r, rng)
        v = combine(F, rng.integers(0, F.q, size=(length, r)), gens)
        if not exact or metrics.rank_fq(F, v) == r:
            return v


def fibre_rank_error(F: ExtField, n: int, m: int, mode: int, radius: int,
                     rng: np.random.Generator) -> np.ndarray:
    """Every mode-``mode`` fibre has rank <= radius."""
    shape = (n,) * m
    count = n ** (m - 1)
    rows = np.stack([rank_bounded_vector(F, n, int(rng.integers(0, radius + 1)), rng) for _ in range(count)])
    return from_fibres(rows, mode, shape)


def subset_error(F: ExtField, n: int, m: int, fibre_mode: int, subset_mode: int, kappa: int,
                 radius: int, rng: np.random.Generator) -> np.ndarray:
    """For every choice of the remaining indices, at least kappa positions along
    ``subset_mode`` carry mode-``fibre_mode`` fibres of rank <= radius; the
    other fibres are uniform."""
    if fibre_mode == subset_mode:
        raise ValueError("fibre and subset modes must differ")
    E = np.zeros((n,) * m, dtype=np.int64)
    others = [j for j in range(m) if j not in (fibre_mode - 1, subset_mode - 1)]
    for rest in product(range(n), repeat=len(others)):
        J = set(rng.choice(n, size=kappa, replace=False).tolist())
        for x in range(n):
            idx: list = [0] * m
            for j, v in zip(others, rest):
                idx[j] = v
            idx[subset_mode - 1] = x
            idx[fibre_mode - 1] = slice(None)
            if x in J:
                E[tuple(idx)] = rank_bounded_vector(F, n, int(rng.integers(0, radius + 1)), rng)
            else:
                E[tuple(idx)] = rng.integers(0, F.order, size=n)
    return E


def slice_fibre_error(F: ExtField, n: int, m: int, mode: int, a: int, b: int,
                      rng: np.random.Generator) -> np.ndarray:
    """w_S(mode) <= a and w_F <= b: E = sum_{u<a} P[i_mode, u] Q_u[rest] with
    the entries of every Q_u in a fixed b-dimensional GF(q)-subspace."""
    gens = independent_elements(F, b, rng)
    Q = combine(F, rng.integers(0, F.q, size=(a, n ** (m - 1), b)), gens)  # a x rest
    P = rng.integers(0, F.q, size=(n, a))
    sl = F.sum(F.mul(F.embed(P)[:, :, None], Q[None, :, :]), axis=1) if a else np.zeros((n, n ** (m - 1)), dtype=np.int64)
    sl = sl.reshape((n,) * m)
    return np.moveaxis(sl, 0, mode - 1)


def trank_error(F: ExtField, n: int, m: int, r: int, rng: np.random.Generator,
                omega: FieldBasis | None = None) -> np.ndarray:
    """Sum of r elementary tensors: gamma_rho * u1 (x) ... (x) um with u_j over GF(q)."""
    E = np.zeros((n,) * m, dtype=np.int64)
    for _ in range(r):
        term = np.array(int(rng.integers(1, F.order)), dtype=np.int64)
        for _j in range(m):
            u = rng.integers(0, F.q, size=n)
            term = F.mul(term[..., None], F.embed(u))
        E = F.add(E, term)
    return E


def uniform_error(F: ExtField, n: int, m: int, rng: np.random.Generator) -> np.ndarray:
    return rng.integers(0, F.order, size=(n,) * m).astype(np.int64)


def first_rows_pattern(basis: FieldBasis, m: int, a: int) -> np.ndarray:
    """E[i] = alpha_{i_1} if i_1 < a (0-based) else 0."""
    n = basis.field.n
    col = np.where(np.arange(n) < a, basis.elements, 0)
    return np.broadcast_to(col.reshape((n,) + (1,) * (m - 1)), (n,) * m).copy()


# -- channel models ------------------------------------------------------------------

KINDS = ("col-rank", "row-rank", "subsetJ", "slice-fibre", "trank", "uniform-entry")


@dataclass(frozen=True)
class ChannelModel:
    """kind plus parameters.

    col-rank / row-rank: radius (mode-1 / mode-2 fibres, or ``mode``)
    subsetJ: radius, kappa, fibre_mode (default 1), subset_mode (default 2)
    slice-fibre: a (slice weight bound), b (fibre weight bound), mode
    trank: r
    """

    kind: str
    params: dict = dc_field(default_factory=dict)

    def __post_init__(self) -> None:
        if self.kind not in KINDS:
            raise ValueError(f"unknown channel {self.kind!r}; choose from {KINDS}")

    def sample(self, F: ExtField, n: int, m: int, rng: np.random.Generator) -> np.ndarray:
        p = self.params
        if self.kind in ("col-rank", "row-rank"):
            mode = p.get("mode", 1 if self.kind == "col-rank" else 2)
            return fibre_rank_error(F, n, m, mode, p["radius"], rng)
        if self.kind == "subsetJ":
            return subset_error(F, n, m, p.get("fibre_mode", 1), p.get("subset_mode", 2),
                                p["kappa"], p["radius"], rng)
        if self.kind == "slice-fibre":
            return slice_fibre_error(F, n, m, p.get("mode", 1), p["a"], p["b"], rng)
        if self.kind == "trank":
            return trank_error(F, n, m, p["r"], rng)
        return uniform_error(F, n, m, rng)

    def verify(self, F: ExtField, E: np.ndarray) -> bool:
        """Re-check the declared criterion with the metrics module."""
        p = self.params
        E = np.asarray(E, dtype=np.int64)
        if self.kind in ("col-rank", "row-rank"):
            mode = p.get("mode", 1 if self.kind == "col-rank" else 2)
            return metrics.max_fibre_rank(F, E, mode) <= p["radius"]
        if self.kind == "subsetJ":
            fm, sm = p.get("fibre_mode", 1), p.get("subset_mode", 2)
            return subset_criterion(F, E, fm, sm, p["kappa"], p["radius"])
        if self.kind == "slice-fibre":
            return (metrics.slice_weight(F, E, p.get("mode", 1)) <= p["a"]
                    and metrics.rank_fq(F, E) <= p["b"])
        if self.kind == "trank":
            rep = metrics.weights(F, E)
            ok = rep.fibre_weight <= p["r"] and max(rep.slice_weights) <= p["r"]
            if ok and E.ndim == 2 and F.n <= metrics.MAX_DIM and F.q ** F.n <= metrics.RANK_SEARCH_LIMIT:
                ok = metrics.word_tensor_rank(F, E, polynomial_basis(F)) <= p["r"]
            return ok
        return True


def subset_criterion(F: ExtField, E: np.ndarray, fibre_mode: int, subset_mode: int,
                     kappa: int, radius: int) -> bool:
    """For every fixing of the other indices, >= kappa positions along
    ``subset_mode`` have mode-``fibre_mode`` fibre rank <= radius."""
    E = np.moveaxis(np.asarray(E), (fibre_mode - 1, subset_mode - 1), (-1, -2))
    flat = E.reshape(-1, E.shape[-2], E.shape[-1])
    for block in flat:
        good = sum(metrics.rank_fq(F, fib) <= radius for fib in block)
        if good < kappa:
            return False
    return True
