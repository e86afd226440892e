"""Linearised and multilinearised q-polynomials over GF(q^n).

A ``LinPoly`` is V(Z) = sum_l v_l Z^(q^l).  A ``MultilinPoly`` of order m is
f(X_1..X_m) = sum_s f_s prod_j X_j^(q^(s_j)).  Both are sparse maps from
exponents to nonzero field elements and are treated as immutable.
"""

from __future__ import annotations

import re
from itertools import product
from typing import Iterable, Mapping, Sequence

import numpy as np

from . import linalg
from .finite_field import ExtField

Point = tuple[int, ...]


class FactorisationError(ValueError):
    """No f with N = V o f and the requested support exists."""


class ZeroPolynomialError(ValueError):
    pass


class LinPoly:
    __slots__ = ("field", "coeffs")

    def __init__(self, field: ExtField, coeffs: Mapping[int, int] | None = None) -> None:
        if coeffs is None:
            coeffs = {}
        clean = {}
        for ell, c in sorted(coeffs.items()):
            if ell < 0:
                raise ValueError("q-exponents must be non-negative")
            if int(c):
                clean[int(ell)] = int(c)
        self.field = field
        self.coeffs = clean

    @classmethod
    def identity(cls, field: ExtField) -> "LinPoly":
        return cls(field, {0: 1})

    @classmethod
    def from_list(cls, field: ExtField, values: Sequence[int]) -> "LinPoly":
        return cls(field, {ell: int(v) for ell, v in enumerate(values)})

    def __eq__(self, other: object) -> bool:
        return isinstance(other, LinPoly) and other.field == self.field and other.coeffs == self.coeffs

    def __repr__(self) -> str:
        return f"LinPoly({self.coeffs})"

    def is_zero(self) -> bool:
        return not self.coeffs

    @property
    def q_degree(self) -> int | None:
        return max(self.coeffs) if self.coeffs else None

    @property
    def low_degree(self) -> int | None:
        return min(self.coeffs) if self.coeffs else None

    def __call__(self, x):
        F = self.field
        x = np.asarray(x, dtype=np.int64)
        acc = np.zeros_like(x)
        for ell, v in self.coeffs.items():
            acc = F.add(acc, F.mul(v, F.frobenius(x, ell)))
        return acc

    def compose(self, other: "LinPoly") -> "LinPoly":
        """self o other."""
        F = self.field
        out: dict[int, int] = {}
        for ell, v in self.coeffs.items():
            for k, w in other.coeffs.items():
                term = int(F.mul(v, F.frobenius(w, ell)))
                out[ell + k] = int(F.add(out.get(ell + k, 0), term))
        return LinPoly(F, out)

    def as_multilin(self) -> "MultilinPoly":
        return MultilinPoly(self.field, 1, {(ell,): c for ell, c in self.coeffs.items()})

    def __add__(self, other: "LinPoly") -> "LinPoly":
        F = self.field
        out = dict(self.coeffs)
        for k, c in other.coeffs.items():
            out[k] = int(F.add(out.get(k, 0), c))
        return LinPoly(F, out)

    def __sub__(self, other: "LinPoly") -> "LinPoly":
        F = self.field
        return self + LinPoly(F, {k: int(F.neg(c)) for k, c in other.coeffs.items()})

    def scale(self, c: int) -> "LinPoly":
        F = self.field
        return LinPoly(F, {k: int(F.mul(c, v)) for k, v in self.coeffs.items()})


class MultilinPoly:
    __slots__ = ("field", "m", "coeffs")

    def __init__(self, field: ExtField, m: int, coeffs: Mapping[Point, int] | None = None) -> None:
        if m < 1:
            raise ValueError("order must be >= 1")
        clean: dict[Point, int] = {}
        for s, c in sorted((coeffs or {}).items()):
            s = tuple(int(x) for x in s)
            if len(s) != m or min(s) < 0:
                raise ValueError(f"bad exponent tuple {s} for order {m}")
            if int(c):
                clean[s] = int(c)
        self.field = field
        self.m = m
        self.coeffs = clean

    def __eq__(self, other: object) -> bool:
        return (
            isinstance(other, MultilinPoly)
            and other.field == self.field
            and other.m == self.m
            and other.coeffs == self.coeffs
        )

    def __repr__(self) -> str:
        return f"MultilinPoly(m={self.m}, {self.coeffs})"

    def is_zero(self) -> bool:
        return not self.coeffs

    @property
    def support(self) -> frozenset[Point]:
        return frozenset(self.coeffs)

    @property
    def partial_degrees(self) -> tuple[int, ...] | None:
        if not self.coeffs:
            return None
        return tuple(max(s[j] for s in self.coeffs) for j in range(self.m))

    def __add__(self, other: "MultilinPoly") -> "MultilinPoly":
        F = self.field
        out = dict(self.coeffs)
        for s, c in other.coeffs.items():
            out[s] = int(F.add(out.get(s, 0), c))
        return MultilinPoly(F, self.m, out)

    def __sub__(self, other: "MultilinPoly") -> "MultilinPoly":
        F = self.field
        return self + MultilinPoly(F, self.m, {s: int(F.neg(c)) for s, c in other.coeffs.items()})


# -- supports -----------------------------------------------------------------


def box(mus: Sequence[int]) -> frozenset[Point]:
    """prod_j [0, mu_j]."""
    return frozenset(product(*[range(mu + 1) for mu in mus]))


def minkowski_diagonal(S: Iterable[Point], t: int) -> frozenset[Point]:
    """S + [0, t]: all s + l(1,...,1) with 0 <= l <= t."""
    return frozenset(tuple(x + ell for x in s) for s in S for ell in range(t + 1))


# -- core operations --------------------------------------------------------


def normal_form(f: MultilinPoly, n: int) -> MultilinPoly:
    F = f.field
    out: dict[Point, int] = {}
    for s, c in f.coeffs.items():
        r = tuple(x % n for x in s)
        out[r] = int(F.add(out.get(r, 0), c))
    return MultilinPoly(F, f.m, out)


def evaluate(f: MultilinPoly, point: Sequence) -> np.ndarray:
    """sum_s f_s prod_j point_j^(q^(s_j)); components may be broadcastable arrays."""
    F = f.field
    if len(point) != f.m:
        raise ValueError(f"expected {f.m} coordinates")
    pts = [np.asarray(p, dtype=np.int64) for p in point]
    shape = np.broadcast_shapes(*[p.shape for p in pts])
    acc = np.zeros(shape, dtype=np.int64)
    for s, c in f.coeffs.items():
        term = np.full(shape, c, dtype=np.int64)
        for j, x in enumerate(pts):
            term = F.mul(term, F.frobenius(x, s[j]))
        acc = F.add(acc, term)
    return acc


def compose_left(V: LinPoly, f: MultilinPoly) -> MultilinPoly:
    """V o f; the coefficient at t is sum_l v_l f_{t - l(1..1)}^(q^l)."""
    F = f.field
    out: dict[Point, int] = {}
    for ell, v in V.coeffs.items():
        for s, c in f.coeffs.items():
            t = tuple(x + ell for x in s)
            term = int(F.mul(v, F.frobenius(c, ell)))
            out[t] = int(F.add(out.get(t, 0), term))
    return MultilinPoly(F, f.m, out)


def linear_map_matrix(V: LinPoly) -> np.ndarray:
    """GF(q) matrix of x -> V(x) in the power basis (columns are images)."""
    F = V.field
    units = np.array([F.q ** k for k in range(F.n)], dtype=np.int64)
    return F.digits(V(units)).T


def kernel(V: LinPoly) -> list[int]:
    """GF(q)-basis of {x : V(x) = 0}."""
    if V.is_zero():
        raise ZeroPolynomialError("kernel of the zero polynomial is the whole field")
    F = V.field
    ker = linalg.nullspace(F.base, linear_map_matrix(V))
    return [int(x) for x in F.from_digits(ker)] if len(ker) else []


def annihilator(U: Sequence[int], field: ExtField) -> LinPoly:
    """Monic subspace polynomial of q-degree dim U vanishing exactly on span(U)."""
    F = field
    V = LinPoly.identity(F)
    for u in U:
        c = int(V(u))
        if c == 0:
            raise ValueError("input vectors are linearly dependent over GF(q)")
        c_pow = int(F.mul(F.frobenius(c, 1), F.inv(c)))  # c^(q-1)
        shifted = LinPoly(F, {ell + 1: int(F.frobenius(v, 1)) for ell, v in V.coeffs.items()})
        V = shifted - V.scale(c_pow)
    return V


def radical(f: MultilinPoly, side: int) -> list[int]:
    """GF(q)-basis of Rad_side(f): slot-``side`` inputs annihilating f (1-based side).

    f must be in normal form; the radical is the intersection of the kernels of
    the slot polynomials obtained by grouping monomials on the other exponents.
    """
    F = f.field
    if not 1 <= side <= f.m:
        raise ValueError("side out of range")
    j = side - 1
    if f.is_zero():
        return [F.q ** k for k in range(F.n)]
    if max(max(s) for s in f.coeffs) >= F.n:
        raise ValueError("radical requires normal form (exponents < n)")
    groups: dict[Point, dict[int, int]] = {}
    for s, c in f.coeffs.items():
        rest = s[:j] + s[j + 1 :]
        groups.setdefault(rest, {})[s[j]] = c
    blocks = [linear_map_matrix(LinPoly(F, g)) for _, g in sorted(groups.items())]
    ker = linalg.nullspace(F.base, np.concatenate(blocks, axis=0))
    return [int(x) for x in F.from_digits(ker)] if len(ker) else []


def diagonal_decompose(N: MultilinPoly) -> dict:
    """Split N along the diagonals shifted by (1, ..., 1).

    For m = 2 the keys are delta = s2 - s1 and N_delta(Z) = sum_tau
    n_(tau, delta + tau) Z^(q^tau), so N = sum_delta N_delta(X Y^(q^delta)).
    For general m the key is the tuple (s_j - s_1)_{j >= 2} and tau = s_1.
    """
    F = N.field
    parts: dict = {}
    for s, c in N.coeffs.items():
        key = tuple(x - s[0] for x in s[1:])
        if N.m == 2:
            key = key[0]
        parts.setdefault(key, {})[s[0]] = c
    return {k: LinPoly(F, v) for k, v in sorted(parts.items())}


def diagonal_recompose(parts: Mapping, m: int, field: ExtField) -> MultilinPoly:
    out: dict[Point, int] = {}
    for key, P in parts.items():
        offs = (key,) if m == 2 else tuple(key)
        for tau, c in P.coeffs.items():
            out[(tau,) + tuple(tau + o for o in offs)] = c
    return MultilinPoly(field, m, out)


def _traversal(S: frozenset[Point]) -> list[Point]:
    """Order in which the left-factoring recursion visits S.

    For m = 2 this is delta = s1 - s2 from -M to M and tau = s2 ascending.
    Otherwise points are grouped by diagonal class and visited in
    ascending min-coordinate order inside each class.
    """
    pts = list(S)
    if pts and len(pts[0]) == 2:
        return sorted(pts, key=lambda s: (s[0] - s[1], s[1]))
    def key(s):
        tau = min(s)
        return (tuple(x - tau for x in s), tau)
    return sorted(pts, key=key)


def factor_left(V: LinPoly, N: MultilinPoly, S: Iterable[Point]) -> MultilinPoly:
    """Recover f with Supp f in S from N = V o f by the bottom-up coefficient recursion.

    Raises FactorisationError when the result does not reproduce N.
    """
    if V.is_zero():
        raise ZeroPolynomialError("cannot factor through V = 0")
    F = N.field
    S = frozenset(tuple(s) for s in S)
    f_coeffs: dict[Point, int] = {}
    if N.is_zero():
        return MultilinPoly(F, N.m)
    theta = V.q_degree
    allowed = minkowski_diagonal(S, theta)
    if not N.support <= allowed:
        raise FactorisationError("Supp(N) is not contained in S + [0, q-deg V]")
    lmin = V.low_degree
    vinv = int(F.inv(V.coeffs[lmin]))
    for s in _traversal(S):
        acc = N.coeffs.get(tuple(x + lmin for x in s), 0)
        for ell in range(lmin + 1, theta + 1):
            v = V.coeffs.get(ell)
            if not v:
                continue
            prev = tuple(x + lmin - ell for x in s)
            c = f_coeffs.get(prev)
            if c:
                acc = int(F.sub(acc, F.mul(v, F.frobenius(c, ell))))
        if acc:
            f_coeffs[s] = int(F.inv_frobenius(F.mul(vinv, acc), lmin))
    f = MultilinPoly(F, N.m, f_coeffs)
    if normal_form(compose_left(V, f), F.n) != normal_form(N, F.n):
        raise FactorisationError("N is not V o f for any f supported on S")
    return f


# -- text format ----------------------------------------------------------------


def _var_names(m: int) -> list[str]:
    if m == 1:
        return ["Z"]
    if m == 2:
        return ["X", "Y"]
    return [f"X{j + 1}" for j in range(m)]


def format_poly(f: MultilinPoly) -> str:
    """Terms like ``[0,1,1]*X^q^1*Y^q^2`` joined by `` + ``; ``0`` for zero."""
    if f.is_zero():
        return "0"
    F = f.field
    names = _var_names(f.m)
    terms = []
    for s, c in sorted(f.coeffs.items()):
        digits = ",".join(str(int(d)) for d in F.digits(c))
        mons = "*".join(f"{names[j]}^q^{s[j]}" for j in range(f.m))
        terms.append(f"[{digits}]*{mons}")
    return " + ".join(terms)


_TERM = re.compile(r"^\[([0-9,\s]*)\]((?:\*[A-Za-z][0-9]*(?:\^q\^[0-9]+)?)*)$")
_MON = re.compile(r"\*([A-Za-z][0-9]*)(?:\^q\^([0-9]+))?")


def parse_poly(text: str, field: ExtField, m: int) -> MultilinPoly:
    text = text.strip()
    if text in ("", "0"):
        return MultilinPoly(field, m)
    names = _var_names(m)
    out: dict[Point, int] = {}
    for raw in text.split("+"):
        term = raw.replace(" ", "")
        mt = _TERM.match(term)
        if not mt:
            raise ValueError(f"cannot parse term {raw!r}")
        digits = [int(d) for d in mt.group(1).split(",") if d != ""]
        c = field.from_coeffs(digits)
        s = [0] * m
        for name, e in _MON.findall(mt.group(2)):
            if name not in names:
                raise ValueError(f"unknown variable {name!r}")
            s[names.index(name)] += int(e) if e else 0
        key = tuple(s)
        out[key] = int(field.add(out.get(key, 0), c))
    return MultilinPoly(field, m, out)
