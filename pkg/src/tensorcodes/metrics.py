"""Rank-metric weights of tensor words, exact tensor rank, distance bounds."""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache
from itertools import combinations, product
from typing import Iterable

import numpy as np

from . import linalg
from .finite_field import ExtField, FieldBasis, polynomial_basis
from .qpolynomials import Point
from .tensor_codes import CodeSpec, encode, fibres, ground_tensor, slices, tensor_to_poly


class InfeasibleError(ValueError):
    """Instance exceeds the exhaustive-search limits."""


def rank_fq(field: ExtField, v) -> int:
    """GF(q)-dimension of the span of the entries of v."""
    v = np.asarray(v, dtype=np.int64).reshape(-1)
    v = v[v != 0]
    if v.size == 0:
        return 0
    return linalg.rank(field.base, field.digits(v))


@dataclass(frozen=True)
class WeightReport:
    fibre_weight: int
    slice_weights: tuple[int, ...]
    max_fibre_ranks: tuple[int, ...]

    @property
    def sigma_slice(self) -> int:
        return self.fibre_weight + min(self.slice_weights)

    def as_dict(self) -> dict[str, int]:
        out = {"w_F": self.fibre_weight}
        for j, w in enumerate(self.slice_weights, 1):
            out[f"w_S{j}"] = w
        for j, r in enumerate(self.max_fibre_ranks, 1):
            out[f"d_rk{j}"] = r
        out["w_sigmaS"] = self.sigma_slice
        return out


def slice_weight(field: ExtField, w: np.ndarray, j: int) -> int:
    """GF(q)-dimension of the span of the j-slices (index i_j fixed)."""
    sl = slices(w, j)
    return linalg.rank(field.base, field.digits(sl).reshape(sl.shape[0], -1))


def max_fibre_rank(field: ExtField, w: np.ndarray, j: int) -> int:
    return max(rank_fq(field, f) for f in fibres(w, j))


def weights(field: ExtField, w: np.ndarray) -> WeightReport:
    w = np.asarray(w, dtype=np.int64)
    m = w.ndim
    return WeightReport(
        fibre_weight=rank_fq(field, w),
        slice_weights=tuple(slice_weight(field, w, j) for j in range(1, m + 1)),
        max_fibre_ranks=tuple(max_fibre_rank(field, w, j) for j in range(1, m + 1)),
    )


# -- exact tensor rank of order-3 tensors over GF(q) ------------------------------

RANK_SEARCH_LIMIT = 16  # q ** max(dims)
MAX_DIM = 3


class _VectorSpace:
    """K^d with vectors encoded as ints; tables for addition and scaling."""

    def __init__(self, K, d: int) -> None:
        self.K, self.d, self.q = K, d, K.order
        self.size = self.q ** d
        self.weights = self.q ** np.arange(d, dtype=np.int64)
        ids = np.arange(self.size, dtype=np.int64)
        self.vecs = (ids[:, None] // self.weights) % self.q
        summed = K.add(self.vecs[:, None, :], self.vecs[None, :, :])
        self.add = summed @ self.weights
        scal = np.arange(self.q, dtype=np.int64)
        self.smul = K.mul(scal[:, None, None], self.vecs[None, :, :]) @ self.weights

    def encode(self, v) -> np.ndarray:
        return np.asarray(v, dtype=np.int64) @ self.weights

    def extend(self, span: np.ndarray, g: int) -> np.ndarray:
        """Elements of span + K g (g assumed outside span)."""
        return self.add[span[:, None], self.smul[:, g][None, :]].reshape(-1)

    def span(self, gens: Iterable[int], start: np.ndarray | None = None) -> np.ndarray:
        S = np.zeros(1, dtype=np.int64) if start is None else start
        mask = np.zeros(self.size, dtype=bool)
        mask[S] = True
        for g in gens:
            if not mask[g]:
                S = self.extend(S, int(g))
                mask[S] = True
        return S


@lru_cache(maxsize=32)
def _rank_one_setup(K, a: int, b: int):
    """Vector space of a x b matrices and its normalised rank-1 elements."""
    space = _VectorSpace(K, a * b)
    us = [u for u in product(range(K.order), repeat=a) if any(u) and u[next(i for i, x in enumerate(u) if x)] == 1]
    vs = [v for v in product(range(K.order), repeat=b) if any(v) and v[next(i for i, x in enumerate(v) if x)] == 1]
    mats = []
    for u in us:
        for v in vs:
            mats.append(K.mul(np.array(u)[:, None], np.array(v)[None, :]).reshape(-1))
    ids = space.encode(np.array(mats))
    order = np.argsort(ids)
    mask = np.zeros(space.size, dtype=bool)
    mask[ids] = True
    return space, ids[order], mask


def _check_feasible(K, gamma: np.ndarray) -> None:
    if gamma.ndim != 3:
        raise InfeasibleError("exact tensor rank supports order-3 tensors only")
    if max(gamma.shape) > MAX_DIM or K.order ** max(gamma.shape) > RANK_SEARCH_LIMIT:
        raise InfeasibleError(
            f"shape {gamma.shape} over GF({K.order}) exceeds the exhaustive-search limit"
        )


def flattening_ranks(K, gamma: np.ndarray) -> tuple[int, ...]:
    out = []
    for k in range(gamma.ndim):
        G = np.moveaxis(gamma, k, 0)
        out.append(linalg.rank(K, G.reshape(G.shape[0], -1)))
    return tuple(out)


def _search(K, gamma: np.ndarray):
    """(rank, slicing mode, rank-1 basis of the covering space) for order-3 gamma."""
    franks = flattening_ranks(K, gamma)
    if max(franks) == 0:
        return 0, 0, np.zeros(0, dtype=np.int64)
    k = int(np.argmax(franks))
    d = franks[k]
    G = np.moveaxis(gamma, k, 0)
    a, b = G.shape[1], G.shape[2]
    space, rank1, r1mask = _rank_one_setup(K, a, b)
    W = space.span(space.encode(G.reshape(G.shape[0], -1)))
    wmask = np.zeros(space.size, dtype=bool)
    wmask[W] = True
    outside = rank1[~wmask[rank1]]
    R = max(franks)
    while True:
        for extras in combinations(outside.tolist(), R - d):
            U = space.span(extras, start=W)
            if len(U) > K.order ** R:
                continue
            umask = np.zeros(space.size, dtype=bool)
            umask[U] = True
            inside = rank1[umask[rank1]]
            basis: list[int] = []
            S = np.zeros(1, dtype=np.int64)
            smask = np.zeros(space.size, dtype=bool)
            smask[0] = True
            for g in inside.tolist():
                if not smask[g]:
                    S = space.extend(S, g)
                    smask[S] = True
                    basis.append(g)
                    if len(S) == len(U):
                        break
            if len(S) == len(U):
                return len(basis), k, np.array(basis, dtype=np.int64)
        R += 1


def tensor_rank_exact(gamma, K) -> int:
    """Exact tensor rank of an order-3 tensor over the field K = GF(q)."""
    gamma = np.asarray(gamma, dtype=np.int64)
    _check_feasible(K, gamma)
    return _search(K, gamma)[0]


def tensor_rank_decomposition(gamma, K) -> list[tuple[np.ndarray, np.ndarray, np.ndarray]]:
    """Minimal list of (x1, x2, x3) with gamma = sum x1 (x) x2 (x) x3.

    The non-slicing factors are normalised to a leading 1.  The result is
    verified by reconstruction.
    """
    gamma = np.asarray(gamma, dtype=np.int64)
    _check_feasible(K, gamma)
    r, k, basis = _search(K, gamma)
    if r == 0:
        return []
    G = np.moveaxis(gamma, k, 0)
    a, b = G.shape[1], G.shape[2]
    space, _, _ = _rank_one_setup(K, a, b)
    B = space.vecs[basis]  # r x ab
    coords = []
    for sl in G.reshape(G.shape[0], -1):
        x, _ = linalg.solve_affine(K, B.T, sl)
        coords.append(x)
    X = np.array(coords)  # d_k x r
    terms = []
    for j in range(r):
        M = B[j].reshape(a, b)
        i0 = int(np.flatnonzero(M.any(axis=1))[0])
        v = M[i0]
        j0 = int(np.flatnonzero(v)[0])
        v = K.mul(v, K.inv(v[j0]))
        u = M[:, j0].copy()
        factors = [None, None, None]
        others = [ax for ax in range(3) if ax != k]
        factors[others[0]] = u
        factors[others[1]] = v
        factors[k] = X[:, j].copy()
        terms.append(tuple(np.asarray(f, dtype=np.int64) for f in factors))
    if not np.array_equal(reconstruct(K, terms, gamma.shape), gamma):
        raise AssertionError("tensor rank decomposition failed to reconstruct")
    return terms


def reconstruct(K, terms, shape) -> np.ndarray:
    out = np.zeros(shape, dtype=np.int64)
    for x1, x2, x3 in terms:
        t = K.mul(K.mul(x1[:, None, None], x2[None, :, None]), x3[None, None, :])
        out = K.add(out, t)
    return out


def word_tensor_rank(field: ExtField, w: np.ndarray, omega: FieldBasis | None = None) -> int:
    omega = omega or polynomial_basis(field)
    return tensor_rank_exact(ground_tensor(w, omega), field.base)


def fibre_space_dims(K, gamma: np.ndarray) -> tuple[int, ...]:
    """dim of the span of mode-j fibres of gamma, for each j."""
    out = []
    for j in range(gamma.ndim):
        G = np.moveaxis(gamma, j, -1)
        out.append(linalg.rank(K, G.reshape(-1, G.shape[-1])))
    return tuple(out)


def slice_space_dims(K, gamma: np.ndarray) -> tuple[int, ...]:
    """dim of the span of j-slices of gamma, for each j."""
    return flattening_ranks(K, gamma)


def verify_weight_bounds(field: ExtField, w: np.ndarray, omega: FieldBasis | None = None) -> bool:
    """Weights never exceed the tensor rank; weights match ground-tensor spaces.

    Checked: w_F, w_Sj, max fibre ranks <= trank; w_Sj = dim of j-slice
    space of the ground tensor; w_F = dim of its last-mode fibre space;
    max mode-j fibre rank <= w_Sj.
    """
    w = np.asarray(w, dtype=np.int64)
    omega = omega or polynomial_basis(field)
    K = field.base
    gamma = ground_tensor(w, omega)
    rep = weights(field, w)
    tr = tensor_rank_exact(gamma, K)
    ok = rep.fibre_weight <= tr and all(s <= tr for s in rep.slice_weights)
    ok &= all(r <= tr for r in rep.max_fibre_ranks)
    sl = slice_space_dims(K, gamma)
    fb = fibre_space_dims(K, gamma)
    ok &= tuple(sl[: w.ndim]) == rep.slice_weights
    ok &= fb[-1] == rep.fibre_weight
    # relations among the j-slices hold entrywise along every mode-j fibre
    ok &= all(r <= s for r, s in zip(rep.max_fibre_ranks, rep.slice_weights))
    return bool(ok)


# -- distance bounds ---------------------------------------------------------------


def _wrapped_triangle(n: int, x: int, y: int, mu: int) -> set[Point]:
    """{((r1 + x) mod n, (r2 + y) mod n) : r1 + r2 <= mu - 2}."""
    return {((r1 + x) % n, (r2 + y) % n) for r1 in range(n) for r2 in range(n) if r1 + r2 <= mu - 2}


def trank_distance_bound(S: Iterable[Point], n: int) -> int:
    """Largest mu in [0, 2n-1] such that some translate of the triangle
    r1 + r2 <= mu - 2 misses S; a lower bound on the tensor-rank distance."""
    S = set(tuple(s) for s in S)
    if not S:
        raise ValueError("empty support")
    if any(len(s) != 2 for s in S):
        raise ValueError("triangle bound is defined for order 2")
    best = 0
    for mu in range(2 * n - 1, -1, -1):
        if any(not (_wrapped_triangle(n, x, y, mu) & S) for x in range(n) for y in range(n)):
            best = mu
            break
    return best


METRICS = ("fibre", "trank", "sigma") + tuple(f"slice{j}" for j in range(1, 9)) + tuple(
    f"rk{j}" for j in range(1, 9)
)

ENUMERATION_LIMIT = 1 << 20


def word_weight(field: ExtField, w: np.ndarray, metric: str, omega: FieldBasis | None = None) -> int:
    if metric == "fibre":
        return rank_fq(field, w)
    if metric == "trank":
        return word_tensor_rank(field, w, omega)
    if metric == "sigma":
        return weights(field, w).sigma_slice
    if metric.startswith("slice"):
        return slice_weight(field, w, int(metric[5:]))
    if metric.startswith("rk"):
        return max_fibre_rank(field, w, int(metric[2:]))
    raise ValueError(f"unknown metric {metric!r}")


def min_distance_bruteforce(spec: CodeSpec, metric: str) -> int:
    """Minimum weight over nonzero codewords, enumerated up to GF(q^n) scaling.

    All supported weights are invariant under multiplication by a nonzero
    scalar of GF(q^n).
    """
    if spec.dimension == 0:
        raise ValueError("the zero code has no minimum distance")
    F = spec.field
    if F.q ** (spec.n * spec.dimension) > ENUMERATION_LIMIT:
        raise InfeasibleError("code too large to enumerate")
    pts = sorted(spec.support)
    best = None
    for lead in range(len(pts)):
        tail = pts[lead + 1 :]
        for vals in product(range(F.order), repeat=len(tail)):
            coeffs = {pts[lead]: 1}
            coeffs.update({s: v for s, v in zip(tail, vals) if v})
            T = np.zeros(spec.shape, dtype=np.int64)
            for s, c in coeffs.items():
                T[s] = c
            w = encode(spec, tensor_to_poly(F, T))
            val = word_weight(F, w, metric, spec.basis)
            best = val if best is None else min(best, val)
    return int(best)
