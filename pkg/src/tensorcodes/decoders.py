"""Decoders for C_alpha(S): fibre-wise Gabidulin decoding, radical decoding
through the linearised system V(R[i]) = N(alpha_i), and the supercode
variant.  Modes are 1-based throughout the API.
"""

from __future__ import annotations

from dataclasses import dataclass, field as dc_field
from typing import Sequence

import numpy as np

from . import linalg
from .finite_field import FieldBasis
from .qpolynomials import (
    FactorisationError,
    LinPoly,
    MultilinPoly,
    Point,
    factor_left,
    kernel,
    minkowski_diagonal,
)
from .tensor_codes import (
    CodeSpec,
    SupportError,
    coefficients_of,
    decode_to_message,
    encode,
    fibres,
    from_fibres,
    gabidulin_member,
    membership,
)

DECODED = "decoded"
FAILURE = "failure"


@dataclass
class DecodeOutcome:
    """Result of a decoder run.

    ``output`` is always the word the algorithm returns (the received word
    on an early failure); ``codeword``, ``message`` and ``error`` are set
    only on success.
    """

    status: str
    output: np.ndarray
    codeword: np.ndarray | None = None
    message: MultilinPoly | None = None
    error: np.ndarray | None = None
    diagnostics: dict = dc_field(default_factory=dict)

    @property
    def ok(self) -> bool:
        return self.status == DECODED


def _success(spec: CodeSpec, R: np.ndarray, C: np.ndarray, diag: dict,
             message: MultilinPoly | None = None) -> DecodeOutcome:
    F = spec.field
    E = F.sub(R, C)
    if message is None:
        message = decode_to_message(spec, C)
    return DecodeOutcome(DECODED, C, C, message, E, diag)


def _failure(R: np.ndarray, diag: dict, output: np.ndarray | None = None, reason: str = "") -> DecodeOutcome:
    if reason:
        diag = dict(diag, reason=reason)
    return DecodeOutcome(FAILURE, R if output is None else output, diagnostics=diag)


# -- the linearised system ----------------------------------------------------------


@dataclass(frozen=True)
class LinearisedSystem:
    """Rows V(R[i]) - N(alpha_i) = 0; unknowns v_0..v_t then n_r, r sorted."""

    t: int
    support_N: tuple[Point, ...]
    matrix: np.ndarray

    @property
    def n_unknowns(self) -> int:
        return self.t + 1 + len(self.support_N)

    def split(self, vec: np.ndarray, field) -> tuple[LinPoly, MultilinPoly]:
        vec = np.asarray(vec, dtype=np.int64)
        V = LinPoly(field, {ell: int(vec[ell]) for ell in range(self.t + 1)})
        m = len(self.support_N[0]) if self.support_N else 1
        N = MultilinPoly(field, m, {r: int(vec[self.t + 1 + k]) for k, r in enumerate(self.support_N)})
        return V, N


def build_linearised_system(spec: CodeSpec, R: np.ndarray, t: int,
                            support: frozenset | None = None) -> LinearisedSystem:
    F = spec.field
    n, m = spec.n, spec.m
    S = spec.support if support is None else support
    if not 0 <= t <= n - 1:
        raise ValueError("t must lie in [0, n-1]")
    SN = tuple(sorted(minkowski_diagonal(S, t)))
    if len({tuple(x % n for x in r) for r in SN}) != len(SN):
        raise ValueError("S + [0, t] wraps around mod n; t is too large for this support")
    R = np.asarray(R, dtype=np.int64).reshape(-1)
    A = spec.basis.moore
    cols = [F.frobenius(R, ell) for ell in range(t + 1)]
    for r in SN:
        prod = np.ones((1,), dtype=np.int64)
        for j in range(m):
            prod = F.mul(prod[..., None], A[r[j] % n]).reshape(-1)
        cols.append(F.neg(prod))
    return LinearisedSystem(t, SN, np.stack(cols, axis=1))


def solve_linearised(spec: CodeSpec, R: np.ndarray, t: int,
                     support: frozenset | None = None) -> tuple[LinearisedSystem, np.ndarray]:
    """The system and a reduced-echelon basis of its solution space."""
    system = build_linearised_system(spec, R, t, support)
    return system, linalg.nullspace(spec.field, system.matrix)


# -- Gabidulin fibre decoder ------------------------------------------------------


def _gab_spec(basis: FieldBasis, k: int) -> CodeSpec:
    return CodeSpec(basis.field, basis, 1, frozenset((s,) for s in range(k)))


def gab_dec(r: Sequence[int], k: int, basis: FieldBasis) -> tuple[np.ndarray, bool]:
    """Decode r in G_k(alpha) up to rank floor((n-k)/2).

    Returns (c, True) on success and (r, False) otherwise.
    """
    F = basis.field
    n = F.n
    if not 1 <= k <= n:
        raise ValueError("k must lie in [1, n]")
    r = np.asarray(r, dtype=np.int64)
    if gabidulin_member(basis, k, r):
        return r.copy(), True
    spec = _gab_spec(basis, k)
    t = (n - k) // 2
    system, sol = solve_linearised(spec, r, t)
    if len(sol) == 0:
        return r, False
    V, N = system.split(sol[0], F)
    try:
        f = factor_left(V, N, spec.support)
    except (FactorisationError, ValueError):
        return r, False
    c = encode(spec, f)
    if _rank(F, F.sub(r, c)) > t:
        return r, False
    return c, True


def _rank(F, v) -> int:
    v = np.asarray(v, dtype=np.int64).reshape(-1)
    v = v[v != 0]
    return linalg.rank(F.base, F.digits(v)) if v.size else 0


# -- fibre-wise decoders ---------------------------------------------------------


def fibre_pass(spec: CodeSpec, R: np.ndarray, j: int, k: int) -> tuple[np.ndarray, int]:
    """Apply gab_dec(., k) to every mode-j fibre; returns (word, failures)."""
    rows = fibres(R, j)
    out = np.empty_like(rows)
    failures = 0
    for idx, fib in enumerate(rows):
        c, ok = gab_dec(fib, k, spec.basis)
        out[idx] = c
        failures += not ok
    return from_fibres(out, j, R.shape), failures


def _finish(spec: CodeSpec, R: np.ndarray, C: np.ndarray, diag: dict) -> DecodeOutcome:
    if membership(spec, C):
        return _success(spec, R, C, diag)
    return _failure(R, diag, output=C, reason="output is not a codeword")


def decode_fibrewise_m(spec: CodeSpec, R: np.ndarray, j: int) -> DecodeOutcome:
    """Gabidulin-decode every mode-j fibre with k = max pi_j(S) + 1."""
    R = np.asarray(R, dtype=np.int64)
    if not 1 <= j <= spec.m:
        raise ValueError("mode out of range")
    k = spec.max_projection(j) + 1
    if k < 1:
        raise SupportError("the zero code has no fibre decoder")
    C, fails = fibre_pass(spec, R, j, k)
    return _finish(spec, R, C, {f"fibre_failures_{j}": fails})


def decode_columnwise(spec: CodeSpec, R: np.ndarray) -> DecodeOutcome:
    if spec.m != 2:
        raise SupportError("column-wise decoding needs order 2")
    return decode_fibrewise_m(spec, R, 1)


def decode_rowwise(spec: CodeSpec, R: np.ndarray) -> DecodeOutcome:
    if spec.m != 2:
        raise SupportError("row-wise decoding needs order 2")
    return decode_fibrewise_m(spec, R, 2)


def decode_modes(spec: CodeSpec, R: np.ndarray, modes: Sequence[int]) -> DecodeOutcome:
    """Successive fibre passes along ``modes`` on a box code."""
    mus = spec.box_degrees
    if mus is None:
        raise SupportError("multi-mode decoding needs a box support")
    C = np.asarray(R, dtype=np.int64)
    diag = {}
    for j in modes:
        C, fails = fibre_pass(spec, C, j, mus[j - 1] + 1)
        diag[f"fibre_failures_{j}"] = fails
    return _finish(spec, np.asarray(R, dtype=np.int64), C, diag)


def decode_twoway(spec: CodeSpec, R: np.ndarray, first: str = "cols") -> DecodeOutcome:
    """Columns with mu1 + 1 then rows with mu2 + 1; ``first='rows'`` swaps the order."""
    if spec.m != 2:
        raise SupportError("two-way decoding needs order 2")
    if first not in ("cols", "rows"):
        raise ValueError("first must be 'cols' or 'rows'")
    return decode_modes(spec, R, (1, 2) if first == "cols" else (2, 1))


def decode_allmodes_m(spec: CodeSpec, R: np.ndarray) -> DecodeOutcome:
    return decode_modes(spec, R, range(1, spec.m + 1))


# -- radical decoders ------------------------------------------------------------


def _require_cube(spec: CodeSpec) -> int:
    mu = spec.cube_degree
    if mu is None:
        raise SupportError("radical decoding needs S = [0, mu]^m")
    return mu


def _factor_and_encode(spec: CodeSpec, system: LinearisedSystem, vec: np.ndarray):
    V, N = system.split(vec, spec.field)
    f = factor_left(V, N, spec.support)
    return f, encode(spec, f)


def decode_radical_fixed(spec: CodeSpec, R: np.ndarray, t: int) -> DecodeOutcome:
    """Solve at q-degree budget t and factor the first nonzero solution."""
    _require_cube(spec)
    R = np.asarray(R, dtype=np.int64)
    system, sol = solve_linearised(spec, R, t)
    diag = {"t": t, "nullspace_dim": len(sol)}
    if len(sol) == 0:
        return _failure(R, diag, reason="no nonzero solution")
    try:
        f, C = _factor_and_encode(spec, system, sol[0])
    except (FactorisationError, ValueError):
        return _failure(R, diag, reason="factorisation failed")
    return _success(spec, R, C, diag, f)


def decode_radical(spec: CodeSpec, R: np.ndarray) -> DecodeOutcome:
    """Least-delta radical decoder for S = [0, mu]^m (any order m).

    Solves once at t = n - mu - 2, then for delta = 0, 1, ... keeps the
    solutions with v_l = 0 for l > delta and n_r = 0 outside S + [0, delta].
    Every basis vector of the first nonempty space is factored; disagreement
    is reported as failure.
    """
    mu = _require_cube(spec)
    R = np.asarray(R, dtype=np.int64)
    n = spec.n
    if mu >= n - 1:
        return _success(spec, R, R.copy(), {"delta": 0, "nullspace_dim": 0})
    T = n - mu - 2
    system, sol = solve_linearised(spec, R, T)
    diag: dict = {"t": T, "nullspace_dim": len(sol)}
    if len(sol) == 0:
        return _failure(R, diag, reason="no nonzero solution")
    F = spec.field
    for delta in range(T + 1):
        allowed = minkowski_diagonal(spec.support, delta)
        forbidden = [ell for ell in range(delta + 1, T + 1)]
        forbidden += [T + 1 + k for k, r in enumerate(system.support_N) if r not in allowed]
        if forbidden:
            lam = linalg.nullspace(F, sol[:, forbidden].T)
            if len(lam) == 0:
                continue
            sub = linalg.rref(F, F.matmul(lam, sol))[0]
        else:
            sub = sol
        diag["delta"] = delta
        diag["solution_dim"] = len(sub)
        try:
            outs = [_factor_and_encode(spec, system, v) for v in sub]
        except (FactorisationError, ValueError):
            return _failure(R, diag, reason="factorisation failed")
        f, C = outs[0]
        if any(not np.array_equal(C, other) for _, other in outs[1:]):
            return _failure(R, diag, reason="solutions factor to different codewords")
        return _success(spec, R, C, diag, f)
    return _failure(R, diag, reason="no delta admits a nonzero solution")


decode_radical_m = decode_radical


def decode_supercode(spec: CodeSpec, R: np.ndarray, t: int) -> DecodeOutcome:
    """Solve at t, then find the unique E with entries in ker V and R - E in the code."""
    mu = _require_cube(spec)
    if spec.m != 2:
        raise SupportError("supercode decoding needs order 2")
    if not 0 <= t <= spec.n - mu - 1:
        raise ValueError("t must lie in [0, n - mu - 1]")
    R = np.asarray(R, dtype=np.int64)
    F = spec.field
    n = spec.n
    system, sol = solve_linearised(spec, R, t)
    diag: dict = {"t": t, "nullspace_dim": len(sol)}
    if len(sol) == 0:
        return _failure(R, diag, reason="no nonzero solution")
    V, _ = system.split(sol[0], F)
    K = kernel(V)
    diag["kernel_dim"] = len(K)
    outside = ~spec.support_mask.reshape(-1)
    target = coefficients_of(spec.basis, R).reshape(-1)[outside]
    if len(K) == 0:
        if np.any(target != 0):
            return _failure(R, diag, reason="no solution")
        return _success(spec, R, R.copy(), diag)
    # G[s, i] = coefficient at s of the elementary word at i
    Binv = spec.basis.dual.moore.T
    G = F.mul(Binv[:, None, :, None], Binv[None, :, None, :]).reshape(n * n, n * n).T
    G = G[outside]  # rows s outside S, columns i
    cols = [F.mul(G, kappa) for kappa in K]  # each: |S^c| x n^2
    M = np.stack(cols, axis=2).reshape(G.shape[0], -1)  # column index i * d + k
    q_mat = np.moveaxis(F.digits(M), 2, 1).reshape(-1, M.shape[1])
    q_rhs = F.digits(target).reshape(-1)
    x, null = linalg.solve_affine(F.base, q_mat, q_rhs)
    diag["coset_dim"] = len(null) if x is not None else -1
    if x is None:
        return _failure(R, diag, reason="no solution")
    if len(null):
        return _failure(R, diag, reason="solution is not unique")
    lam = x.reshape(n * n, len(K))
    E = F.sum(F.mul(F.embed(lam), np.asarray(K, dtype=np.int64)[None, :]), axis=1).reshape(spec.shape)
    C = F.sub(R, E)
    if not membership(spec, C):
        return _failure(R, diag, reason="output is not a codeword")
    return _success(spec, R, C, diag)


ALGORITHMS = (
    "col", "row", "twoway", "radical", "radical-fixed", "supercode",
    "fibrewise-m", "allmodes-m", "radical-m",
)


def run_decoder(spec: CodeSpec, R: np.ndarray, alg: str, t: int | None = None,
                mode: int | None = None) -> DecodeOutcome:
    if alg == "col":
        return decode_columnwise(spec, R)
    if alg == "row":
        return decode_rowwise(spec, R)
    if alg == "twoway":
        return decode_twoway(spec, R)
    if alg in ("radical", "radical-m"):
        return decode_radical(spec, R)
    if alg == "radical-fixed":
        if t is None:
            raise ValueError("radical-fixed needs t")
        return decode_radical_fixed(spec, R, t)
    if alg == "supercode":
        if t is None:
            raise ValueError("supercode needs t")
        return decode_supercode(spec, R, t)
    if alg == "fibrewise-m":
        if mode is None:
            raise ValueError("fibrewise-m needs a mode")
        return decode_fibrewise_m(spec, R, mode)
    if alg == "allmodes-m":
        return decode_allmodes_m(spec, R)
    raise ValueError(f"unknown algorithm {alg!r}")
