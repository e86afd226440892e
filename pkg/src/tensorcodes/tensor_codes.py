"""Evaluation tensor codes C_alpha(S) over GF(q^n).

A word of order m is an int64 array of shape (n,)*m holding GF(q^n)
elements; index i (0-based) corresponds to the evaluation point
(alpha_{i_1}, ..., alpha_{i_m}).  A message is a MultilinPoly whose support
lies in S; monomial s sits at coefficient-tensor index s.
"""

from __future__ import annotations

from dataclasses import dataclass, field as dc_field
from functools import cached_property
from itertools import product
from typing import Iterable, Sequence

import numpy as np

from .finite_field import ExtField, FieldBasis, make_field, polynomial_basis
from .qpolynomials import MultilinPoly, Point, box


class SupportError(ValueError):
    pass


class NotACodewordError(ValueError):
    pass


@dataclass(frozen=True, eq=False)
class CodeSpec:
    """C_alpha(S): field, basis alpha, order m and support S in [0, n-1]^m."""

    field: ExtField
    basis: FieldBasis
    m: int
    support: frozenset = dc_field(default_factory=frozenset)

    def __post_init__(self) -> None:
        if self.m < 1:
            raise SupportError("order must be >= 1")
        if self.basis.field != self.field:
            raise SupportError("basis lives in a different field")
        pts = frozenset(tuple(int(x) for x in s) for s in self.support)
        for s in pts:
            if len(s) != self.m or min(s) < 0 or max(s) >= self.field.n:
                raise SupportError(f"support point {s} outside [0,{self.field.n - 1}]^{self.m}")
        object.__setattr__(self, "support", pts)

    def __eq__(self, other: object) -> bool:
        return (
            isinstance(other, CodeSpec)
            and other.basis == self.basis
            and other.m == self.m
            and other.support == self.support
        )

    @property
    def n(self) -> int:
        return self.field.n

    @property
    def q(self) -> int:
        return self.field.q

    @property
    def dimension(self) -> int:
        return len(self.support)

    @property
    def shape(self) -> tuple[int, ...]:
        return (self.n,) * self.m

    def max_projection(self, j: int) -> int:
        """max pi_j(S) for 1-based mode j; -1 for the zero code."""
        if not self.support:
            return -1
        return max(s[j - 1] for s in self.support)

    @cached_property
    def box_degrees(self) -> tuple[int, ...] | None:
        """(mu_1..mu_m) when S is the box prod [0, mu_j], else None."""
        if not self.support:
            return None
        mus = tuple(self.max_projection(j) for j in range(1, self.m + 1))
        return mus if box(mus) == self.support else None

    @cached_property
    def cube_degree(self) -> int | None:
        """mu when S = [0, mu]^m, else None."""
        mus = self.box_degrees
        if mus is None or len(set(mus)) != 1:
            return None
        return mus[0]

    @cached_property
    def support_mask(self) -> np.ndarray:
        mask = np.zeros(self.shape, dtype=bool)
        for s in self.support:
            mask[s] = True
        return mask


def make_spec(
    q: int,
    n: int,
    m: int = 2,
    support: Iterable[Sequence[int]] | None = None,
    mus: Sequence[int] | int | None = None,
    modulus: Sequence[int] | None = None,
    basis: Sequence[int] | None = None,
    base_modulus: Sequence[int] | None = None,
) -> CodeSpec:
    """Build a CodeSpec from either an explicit support or box degrees."""
    F = make_field(q, n, modulus, base_modulus)
    alpha = polynomial_basis(F) if basis is None else FieldBasis(F, basis)
    if (support is None) == (mus is None):
        raise SupportError("give exactly one of support or mus")
    if mus is not None:
        if isinstance(mus, int):
            mus = [mus] * m
        if len(mus) != m:
            raise SupportError("need one degree per mode")
        S = box(mus)
    else:
        S = frozenset(tuple(s) for s in support)
    return CodeSpec(F, alpha, m, S)


# -- mode products ---------------------------------------------------------------


def mode_product(F: ExtField, T: np.ndarray, A: np.ndarray, axis: int) -> np.ndarray:
    """out[..., i, ...] = sum_s T[..., s, ...] A[s, i] along ``axis``."""
    T = np.moveaxis(np.asarray(T, dtype=np.int64), axis, -1)
    shp = T.shape
    out = F.matmul(T.reshape(-1, shp[-1]), A).reshape(shp[:-1] + (A.shape[1],))
    return np.moveaxis(out, -1, axis)


def coefficient_tensor(f: MultilinPoly, n: int) -> np.ndarray:
    T = np.zeros((n,) * f.m, dtype=np.int64)
    for s, c in f.coeffs.items():
        if max(s) >= n:
            raise SupportError(f"exponent {s} is not reduced mod n")
        T[s] = c
    return T


def tensor_to_poly(F: ExtField, T: np.ndarray) -> MultilinPoly:
    nz = np.argwhere(T != 0)
    return MultilinPoly(F, T.ndim, {tuple(int(x) for x in s): int(T[tuple(s)]) for s in nz})


def evaluate_all(basis: FieldBasis, T: np.ndarray) -> np.ndarray:
    """Evaluation of the coefficient tensor T at all basis points."""
    F = basis.field
    A = basis.moore
    W = np.asarray(T, dtype=np.int64)
    for j in range(W.ndim):
        W = mode_product(F, W, A, j)
    return W


def coefficients_of(basis: FieldBasis, W: np.ndarray) -> np.ndarray:
    """Inverse of ``evaluate_all``, using M(alpha)^{-1} = M(alpha_dual)^T."""
    F = basis.field
    Binv = basis.dual.moore.T
    T = np.asarray(W, dtype=np.int64)
    for j in range(T.ndim):
        T = mode_product(F, T, Binv, j)
    return T


# -- code operations ----------------------------------------------------------------


def _check_word(spec: CodeSpec, w: np.ndarray) -> np.ndarray:
    w = np.asarray(w, dtype=np.int64)
    if w.shape != spec.shape:
        raise ValueError(f"word shape {w.shape} != {spec.shape}")
    return w


def encode(spec: CodeSpec, message: MultilinPoly) -> np.ndarray:
    if message.m != spec.m:
        raise SupportError("message order does not match the code")
    if not message.support <= spec.support:
        raise SupportError("message support is not contained in S")
    return evaluate_all(spec.basis, coefficient_tensor(message, spec.n))


def decode_to_message(spec: CodeSpec, codeword: np.ndarray) -> MultilinPoly:
    T = coefficients_of(spec.basis, _check_word(spec, codeword))
    if np.any(T[~spec.support_mask] != 0):
        raise NotACodewordError("word has coefficients outside the support")
    return tensor_to_poly(spec.field, T)


def membership(spec: CodeSpec, w: np.ndarray) -> bool:
    T = coefficients_of(spec.basis, _check_word(spec, w))
    return not np.any(T[~spec.support_mask] != 0)


def generator_words(spec: CodeSpec) -> list[np.ndarray]:
    """Codewords of the monomials of S (a GF(q^n)-basis of the code)."""
    F = spec.field
    return [encode(spec, MultilinPoly(F, spec.m, {s: 1})) for s in sorted(spec.support)]


def dual_code(spec: CodeSpec) -> CodeSpec:
    """Dual under sum_i C[i] D[i]: basis alpha_dual, complementary support."""
    if spec.m != 2:
        raise SupportError("dual_code is defined for order 2 only")
    full = box([spec.n - 1] * 2)
    return CodeSpec(spec.field, spec.basis.dual, 2, full - spec.support)


def frobenius_change_matrix(basis: FieldBasis, r: int) -> np.ndarray:
    """GF(q) matrix A with M(alpha^(q^r)) = M(alpha) A; column c is the
    coordinate vector of alpha_c^(q^r)."""
    F = basis.field
    return basis.coordinates(F.frobenius(basis.elements, r)).T.copy()


def translate_support(spec: CodeSpec, r: Sequence[int]) -> tuple[CodeSpec, np.ndarray, np.ndarray]:
    """(spec with S + r mod n, L, R) such that L C R lies in the shifted code."""
    if spec.m != 2:
        raise SupportError("translate_support is defined for order 2 only")
    r1, r2 = (int(x) for x in r)
    n = spec.n
    S2 = frozenset(((s1 + r1) % n, (s2 + r2) % n) for s1, s2 in spec.support)
    L = frobenius_change_matrix(spec.basis, r1).T.copy()
    R = frobenius_change_matrix(spec.basis, r2)
    return CodeSpec(spec.field, spec.basis, 2, S2), L, R


def apply_fq_matrices(F: ExtField, L: np.ndarray, C: np.ndarray, R: np.ndarray) -> np.ndarray:
    """L C R with L, R over GF(q) embedded in GF(q^n)."""
    return F.matmul(F.matmul(F.embed(L), C), F.embed(R))


# -- ground tensors -------------------------------------------------------------


def ground_tensor(w: np.ndarray, omega: FieldBasis) -> np.ndarray:
    """Gamma with w = sum_k omega_k Gamma[..., k]; shape w.shape + (n,)."""
    return omega.coordinates(np.asarray(w, dtype=np.int64))


def from_ground(gamma: np.ndarray, omega: FieldBasis) -> np.ndarray:
    return omega.combine(np.asarray(gamma, dtype=np.int64))


# -- slices, fibres, Gabidulin --------------------------------------------------


def fibres(w: np.ndarray, j: int) -> np.ndarray:
    """All mode-j fibres (1-based j) as rows of a matrix."""
    w = np.moveaxis(np.asarray(w), j - 1, -1)
    return w.reshape(-1, w.shape[-1])


def from_fibres(rows: np.ndarray, j: int, shape: tuple[int, ...]) -> np.ndarray:
    moved = shape[: j - 1] + shape[j:] + (shape[j - 1],)
    return np.moveaxis(np.asarray(rows).reshape(moved), -1, j - 1)


def slices(w: np.ndarray, j: int) -> np.ndarray:
    """j-slices (index i_j fixed), flattened: row a is w[..., a, ...]."""
    w = np.moveaxis(np.asarray(w), j - 1, 0)
    return w.reshape(w.shape[0], -1)


def gabidulin_encode(basis: FieldBasis, k: int, message: Sequence[int]) -> np.ndarray:
    """Evaluation of sum_l u_l Z^(q^l), l < k, at alpha."""
    u = np.asarray(message, dtype=np.int64)
    if u.shape != (k,):
        raise ValueError("message length must equal k")
    return basis.field.matmul(u, basis.moore[:k])


def gabidulin_message(basis: FieldBasis, v: np.ndarray) -> np.ndarray:
    """Coefficients u_0..u_{n-1} of the q-polynomial evaluating to v."""
    return basis.field.matmul(np.asarray(v, dtype=np.int64), basis.dual.moore.T)


def gabidulin_member(basis: FieldBasis, k: int, v: np.ndarray) -> bool:
    return not np.any(gabidulin_message(basis, v)[k:] != 0)


# -- interleaving embeddings ----------------------------------------------------

INTERLEAVE_VARIANTS = ("rows", "cols", "both", "iso3")


def interleave_embed(spec: CodeSpec, w: np.ndarray, variant: str) -> np.ndarray:
    """Stack fibres of an order-2 word into an interleaved matrix.

    rows: each row is a mode-2 fibre; cols: each row is a mode-1 fibre;
    both: rows then columns (2n x n); iso3: M_{mu2+1}(alpha_dual) C^T, whose
    rows lie in G_{mu1+1}(alpha) for box supports.
    """
    if spec.m != 2:
        raise SupportError("interleaving embeddings need order 2")
    C = _check_word(spec, w)
    if variant == "rows":
        return C.copy()
    if variant == "cols":
        return C.T.copy()
    if variant == "both":
        return np.concatenate([C, C.T], axis=0)
    if variant == "iso3":
        mus = spec.box_degrees
        if mus is None:
            raise SupportError("iso3 needs a box support")
        return spec.field.matmul(spec.basis.dual.moore[: mus[1] + 1], C.T)
    raise SupportError(f"unknown variant {variant!r}; choose from {INTERLEAVE_VARIANTS}")


def random_message(spec: CodeSpec, rng: np.random.Generator) -> MultilinPoly:
    F = spec.field
    return MultilinPoly(F, spec.m, {s: int(rng.integers(F.order)) for s in sorted(spec.support)})


def all_points(n: int, m: int) -> Iterable[Point]:
    return product(range(n), repeat=m)
