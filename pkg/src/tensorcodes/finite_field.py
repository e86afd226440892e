"""Exact arithmetic in GF(q) and GF(q^n).

Elements of every field are plain integers.  For an extension field the
base-q digits of the integer are the coefficients of the representative
polynomial, constant term first (least significant digit).  A prime-power
q is handled by a two-level tower: GF(p^a) is itself an ``ExtField`` over
GF(p) and serves as the base of GF(q^n).

All vectorised operations accept numpy arrays (or scalars) and return
numpy arrays of dtype int64.
"""

from __future__ import annotations

from functools import cached_property, lru_cache
from typing import Iterable, Sequence

import numpy as np

# Full add/mul tables are materialised up to this order; above it
# multiplication goes through exp/log tables and addition through digits.
TABLE_LIMIT = 1024
MAX_ORDER = 1 << 16


class FieldError(ValueError):
    pass


def _factor_prime_power(q: int) -> tuple[int, int]:
    if q < 2:
        raise FieldError(f"q={q} is not a prime power")
    p = 2
    while p * p <= q and q % p:
        p += 1
    if q % p:
        p = q
    a, r = 0, q
    while r % p == 0:
        r //= p
        a += 1
    if r != 1:
        raise FieldError(f"q={q} is not a prime power")
    return p, a


class PrimeField:
    """The prime field GF(p)."""

    def __init__(self, p: int) -> None:
        pp, a = _factor_prime_power(p)
        if a != 1:
            raise FieldError(f"{p} is not prime")
        self.p = p
        self.char = p
        self.order = p
        self.n = 1
        self.base = None
        self._inv = np.array([0] + [pow(x, p - 2, p) for x in range(1, p)], dtype=np.int64)

    def __repr__(self) -> str:
        return f"GF({self.p})"

    def __eq__(self, other: object) -> bool:
        return isinstance(other, PrimeField) and other.p == self.p

    def __hash__(self) -> int:
        return hash(("GF", self.p))

    def elements(self) -> np.ndarray:
        return np.arange(self.p, dtype=np.int64)

    def add(self, a, b):
        return (np.asarray(a, dtype=np.int64) + b) % self.p

    def sub(self, a, b):
        return (np.asarray(a, dtype=np.int64) - b) % self.p

    def neg(self, a):
        return (-np.asarray(a, dtype=np.int64)) % self.p

    def mul(self, a, b):
        return (np.asarray(a, dtype=np.int64) * b) % self.p

    def inv(self, a):
        a = np.asarray(a, dtype=np.int64)
        if np.any(a == 0):
            raise ZeroDivisionError("inverse of zero")
        return self._inv[a]

    def sum(self, a, axis=None):
        return np.sum(np.asarray(a, dtype=np.int64), axis=axis) % self.p

    def matmul(self, a, b):
        return (np.asarray(a, dtype=np.int64) @ np.asarray(b, dtype=np.int64)) % self.p

    def frobenius(self, a, ell: int = 1):
        return np.asarray(a, dtype=np.int64)

    def power(self, a, e: int):
        return np.asarray(pow(int(a), e, self.p) if e >= 0 else pow(int(self.inv(a)), -e, self.p))


class ExtField:
    """GF(Q) with Q = base.order ** n, built as base[x]/(modulus).

    Parameters
    ----------
    base : PrimeField or ExtField
        The field GF(q).
    n : int
        Extension degree.
    modulus : sequence of int, optional
        Monic irreducible polynomial of degree ``n`` over ``base``, constant
        term first.  Defaults to the lexicographically least one.
    """

    def __init__(self, base, n: int, modulus: Sequence[int] | None = None) -> None:
        if n < 1:
            raise FieldError("extension degree must be >= 1")
        self.base = base
        self.q = base.order
        self.n = n
        self.char = base.char
        self.order = self.q ** n
        if self.order > MAX_ORDER:
            raise FieldError(f"field order {self.order} exceeds supported limit {MAX_ORDER}")
        if modulus is None:
            modulus = least_irreducible(base, n)
        modulus = [int(c) for c in modulus]
        if len(modulus) != n + 1 or modulus[-1] != 1:
            raise FieldError("modulus must be monic of degree n (constant term first)")
        if any(not 0 <= c < self.q for c in modulus):
            raise FieldError("modulus coefficients must lie in the base field")
        if not is_irreducible(base, modulus):
            raise FieldError(f"modulus {modulus} is reducible over GF({self.q})")
        self.modulus = tuple(modulus)
        self._weights = self.q ** np.arange(n, dtype=np.int64)
        self._build_tables()

    def __repr__(self) -> str:
        return f"GF({self.q}^{self.n})"

    def __eq__(self, other: object) -> bool:
        return (
            isinstance(other, ExtField)
            and other.base == self.base
            and other.n == self.n
            and other.modulus == self.modulus
        )

    def __hash__(self) -> int:
        return hash(("GFext", hash(self.base), self.n, self.modulus))

    # -- digit conversion -------------------------------------------------

    def digits(self, a) -> np.ndarray:
        """Coefficient vectors over GF(q); shape ``a.shape + (n,)``."""
        a = np.asarray(a, dtype=np.int64)
        return (a[..., None] // self._weights) % self.q

    def from_digits(self, d) -> np.ndarray:
        d = np.asarray(d, dtype=np.int64)
        return d @ self._weights

    def elements(self) -> np.ndarray:
        return np.arange(self.order, dtype=np.int64)

    # -- reference (polynomial) arithmetic ---------------------------------

    def ref_mul(self, a: int, b: int) -> int:
        """Schoolbook product modulo the modulus; used to build and check tables."""
        da = [int(x) for x in self.digits(a)]
        db = [int(x) for x in self.digits(b)]
        prod = poly_mul(self.base, da, db)
        rem = poly_divmod(self.base, prod, list(self.modulus))[1]
        rem = rem + [0] * (self.n - len(rem))
        return int(self.from_digits(rem[: self.n]))

    def ref_inv(self, a: int) -> int:
        """Inverse by the extended Euclidean algorithm."""
        if a == 0:
            raise ZeroDivisionError("inverse of zero")
        da = poly_trim([int(x) for x in self.digits(a)])
        g, s, _ = poly_ext_gcd(self.base, da, list(self.modulus))
        if len(g) != 1:
            raise FieldError("element not invertible; modulus reducible")
        ginv = int(self.base.inv(g[0]))
        s = [int(self.base.mul(c, ginv)) for c in s]
        s = poly_divmod(self.base, s, list(self.modulus))[1]
        s = s + [0] * (self.n - len(s))
        return int(self.from_digits(s[: self.n]))

    # -- tables ------------------------------------------------------------

    def _build_tables(self) -> None:
        Q = self.order
        g = self._find_generator()
        exp = np.zeros(2 * (Q - 1) + 1, dtype=np.int64)
        log = np.zeros(Q, dtype=np.int64)
        x = 1
        for k in range(Q - 1):
            exp[k] = x
            log[x] = k
            x = self.ref_mul(x, g)
        exp[Q - 1 : 2 * (Q - 1)] = exp[: Q - 1]
        exp[2 * (Q - 1)] = exp[0]
        self._exp = exp
        self._log = log
        self.generator = g
        self._inv_tab = np.zeros(Q, dtype=np.int64)
        for a in range(1, Q):
            self._inv_tab[a] = self.ref_inv(a)
        els = self.elements()
        if Q <= TABLE_LIMIT:
            self._add_tab = self._digit_add(els[:, None], els[None, :])
            self._mul_tab = self._log_mul(els[:, None], els[None, :])
            self._neg_tab = self.from_digits(self.base.neg(self.digits(els)))
        else:
            self._add_tab = None
            self._mul_tab = None
            self._neg_tab = self.from_digits(self.base.neg(self.digits(els)))
        frob = np.zeros((self.n, Q), dtype=np.int64)
        frob[0] = els
        for ell in range(1, self.n):
            frob[ell] = self._pow_q(frob[ell - 1])
        self._frob = frob

    def _find_generator(self) -> int:
        Q = self.order
        if Q == 2:
            return 1
        for g in range(2, Q) if self.n > 1 else range(1, Q):
            x, k = g, 1
            while x != 1:
                x = self.ref_mul(x, g)
                k += 1
                if k > Q - 1:
                    break
            if k == Q - 1:
                return g
        raise FieldError("no primitive element found; modulus reducible")

    def _digit_add(self, a, b):
        return self.from_digits(self.base.add(self.digits(a), self.digits(b)))

    def _log_mul(self, a, b):
        a = np.asarray(a, dtype=np.int64)
        b = np.asarray(b, dtype=np.int64)
        r = self._exp[self._log[a] + self._log[b]]
        return np.where((a == 0) | (b == 0), 0, r)

    def _pow_q(self, a):
        a = np.asarray(a, dtype=np.int64)
        e = (self._log[a] * self.q) % (self.order - 1)
        return np.where(a == 0, 0, self._exp[e])

    # -- vectorised arithmetic --------------------------------------------

    def add(self, a, b):
        if self._add_tab is not None:
            return self._add_tab[np.asarray(a, dtype=np.int64), np.asarray(b, dtype=np.int64)]
        if self.q == 2:
            return np.bitwise_xor(np.asarray(a, dtype=np.int64), b)
        return self._digit_add(a, b)

    def neg(self, a):
        return self._neg_tab[np.asarray(a, dtype=np.int64)]

    def sub(self, a, b):
        return self.add(a, self.neg(b))

    def mul(self, a, b):
        if self._mul_tab is not None:
            return self._mul_tab[np.asarray(a, dtype=np.int64), np.asarray(b, dtype=np.int64)]
        return self._log_mul(a, b)

    def inv(self, a):
        a = np.asarray(a, dtype=np.int64)
        if np.any(a == 0):
            raise ZeroDivisionError("inverse of zero")
        return self._inv_tab[a]

    def power(self, a, e: int):
        a = np.asarray(a, dtype=np.int64)
        if e == 0:
            return np.ones_like(a)
        if e < 0:
            a, e = self.inv(a), -e
        k = (self._log[a] * e) % (self.order - 1)
        return np.where(a == 0, 0, self._exp[k])

    def frobenius(self, a, ell: int = 1):
        """x -> x^(q^ell); ``ell`` is reduced mod n."""
        return self._frob[ell % self.n][np.asarray(a, dtype=np.int64)]

    def inv_frobenius(self, a, ell: int = 1):
        return self.frobenius(a, self.n - (ell % self.n))

    def sum(self, a, axis=None):
        a = np.asarray(a, dtype=np.int64)
        if axis is None:
            a = a.reshape(-1)
            axis = 0
        if self.q == 2:
            return np.bitwise_xor.reduce(a, axis=axis)
        d = self.digits(a)
        ax = axis if axis >= 0 else axis - 1
        return self.from_digits(self.base.sum(d, axis=ax))

    def matmul(self, a, b):
        a = np.asarray(a, dtype=np.int64)
        b = np.asarray(b, dtype=np.int64)
        squeeze_a = a.ndim == 1
        squeeze_b = b.ndim == 1
        if squeeze_a:
            a = a[None, :]
        if squeeze_b:
            b = b[:, None]
        prod = self.mul(a[:, :, None], b[None, :, :])
        out = self.sum(prod, axis=1)
        if squeeze_a:
            out = out[0]
        if squeeze_b:
            out = out[..., 0]
        return out

    def trace(self, a):
        """Absolute-over-GF(q) trace, returned as a field element in GF(q)."""
        a = np.asarray(a, dtype=np.int64)
        acc = a.copy()
        for ell in range(1, self.n):
            acc = self.add(acc, self.frobenius(a, ell))
        return acc

    def embed(self, c):
        """GF(q) elements as elements of this field (constant polynomials)."""
        return np.asarray(c, dtype=np.int64)

    def from_coeffs(self, coeffs: Iterable[int]) -> int:
        coeffs = [int(c) for c in coeffs]
        if len(coeffs) > self.n:
            raise FieldError("too many coefficients")
        coeffs += [0] * (self.n - len(coeffs))
        return int(self.from_digits(coeffs))

    @cached_property
    def x(self) -> int:
        """The class of the indeterminate, i.e. the root of the modulus."""
        return self.from_coeffs([0, 1]) if self.n > 1 else int(self.base.neg(self.modulus[0]))


# -- polynomials over a (small) field, lists of ints, constant first ---------


def poly_trim(a: list[int]) -> list[int]:
    a = list(a)
    while a and a[-1] == 0:
        a.pop()
    return a


def poly_add(F, a: list[int], b: list[int]) -> list[int]:
    L = max(len(a), len(b))
    a = a + [0] * (L - len(a))
    b = b + [0] * (L - len(b))
    return poly_trim([int(x) for x in F.add(np.array(a, dtype=np.int64), np.array(b, dtype=np.int64))]) if L else []


def poly_sub(F, a: list[int], b: list[int]) -> list[int]:
    return poly_add(F, a, [int(x) for x in F.neg(np.array(b, dtype=np.int64))] if b else [])


def poly_mul(F, a: list[int], b: list[int]) -> list[int]:
    a, b = poly_trim(a), poly_trim(b)
    if not a or not b:
        return []
    out = np.zeros(len(a) + len(b) - 1, dtype=np.int64)
    bb = np.array(b, dtype=np.int64)
    for i, c in enumerate(a):
        if c:
            out[i : i + len(b)] = F.add(out[i : i + len(b)], F.mul(c, bb))
    return poly_trim([int(x) for x in out])


def poly_divmod(F, a: list[int], b: list[int]) -> tuple[list[int], list[int]]:
    a, b = poly_trim(a), poly_trim(b)
    if not b:
        raise ZeroDivisionError("polynomial division by zero")
    if len(a) < len(b):
        return [], a
    lead_inv = int(F.inv(b[-1]))
    rem = np.array(a, dtype=np.int64)
    bb = np.array(b, dtype=np.int64)
    quot = np.zeros(len(a) - len(b) + 1, dtype=np.int64)
    for k in range(len(a) - len(b), -1, -1):
        c = int(F.mul(rem[k + len(b) - 1], lead_inv))
        if c:
            quot[k] = c
            rem[k : k + len(b)] = F.sub(rem[k : k + len(b)], F.mul(c, bb))
    return poly_trim([int(x) for x in quot]), poly_trim([int(x) for x in rem[: len(b) - 1]])


def poly_ext_gcd(F, a: list[int], b: list[int]):
    """Return (g, s, t) with s*a + t*b = g."""
    r0, r1 = poly_trim(a), poly_trim(b)
    s0, s1 = [1], []
    t0, t1 = [], [1]
    while r1:
        qt, r = poly_divmod(F, r0, r1)
        r0, r1 = r1, r
        s0, s1 = s1, poly_sub(F, s0, poly_mul(F, qt, s1))
        t0, t1 = t1, poly_sub(F, t0, poly_mul(F, qt, t1))
    return r0, s0, t0


def poly_powmod(F, a: list[int], e: int, m: list[int]) -> list[int]:
    result = [1]
    base = poly_divmod(F, a, m)[1]
    while e:
        if e & 1:
            result = poly_divmod(F, poly_mul(F, result, base), m)[1]
        base = poly_divmod(F, poly_mul(F, base, base), m)[1]
        e >>= 1
    return result


def is_irreducible(F, f: Sequence[int]) -> bool:
    """gcd(x^(q^i) - x, f) = 1 for all i <= deg f / 2."""
    f = poly_trim([int(c) for c in f])
    d = len(f) - 1
    if d < 1:
        return False
    if d == 1:
        return True
    q = F.order
    xq = [0, 1]
    for _ in range(1, d // 2 + 1):
        xq = poly_powmod(F, xq, q, f)
        g = poly_ext_gcd(F, f, poly_sub(F, xq, [0, 1]))[0]
        if len(g) > 1:
            return False
    return True


def least_irreducible(F, n: int) -> list[int]:
    """Monic irreducible of degree n minimising sum c_i q^i (constant first)."""
    q = F.order
    for code in range(q ** n):
        low = [(code // q ** i) % q for i in range(n)]
        f = low + [1]
        if is_irreducible(F, f):
            return f
    raise FieldError(f"no irreducible polynomial of degree {n}")


def make_field(q: int, n: int, modulus: Sequence[int] | None = None,
               base_modulus: Sequence[int] | None = None) -> ExtField:
    """GF(q^n) for a prime power q (two-level tower when q is not prime).

    Fields are immutable, so constructions are cached.
    """
    return _make_field(q, n, None if modulus is None else tuple(int(c) for c in modulus),
                       None if base_modulus is None else tuple(int(c) for c in base_modulus))


@lru_cache(maxsize=64)
def _make_field(q, n, modulus, base_modulus) -> ExtField:
    p, a = _factor_prime_power(q)
    prime = PrimeField(p)
    base = prime if a == 1 else ExtField(prime, a, base_modulus)
    return ExtField(base, n, modulus)


# -- bases --------------------------------------------------------------------


def frobenius(field: ExtField, x, ell: int):
    return field.frobenius(x, ell)


def inv_frobenius(field: ExtField, x, ell: int):
    return field.inv_frobenius(x, ell)


class FieldBasis:
    """An ordered basis alpha of GF(q^n) over GF(q)."""

    def __init__(self, field: ExtField, elements: Sequence[int]) -> None:
        from . import linalg

        self.field = field
        self.elements = np.asarray([int(e) for e in elements], dtype=np.int64)
        if self.elements.shape != (field.n,):
            raise FieldError(f"a basis needs exactly n={field.n} elements")
        if linalg.rank(field.base, field.digits(self.elements)) != field.n:
            raise FieldError("basis elements are linearly dependent over GF(q)")

    def __repr__(self) -> str:
        return f"FieldBasis({self.field!r}, {self.elements.tolist()})"

    def __eq__(self, other: object) -> bool:
        return (
            isinstance(other, FieldBasis)
            and other.field == self.field
            and np.array_equal(other.elements, self.elements)
        )

    def __len__(self) -> int:
        return self.field.n

    @cached_property
    def moore(self) -> np.ndarray:
        """Full n x n Moore matrix, entry (r, c) = alpha_c^(q^r) (0-based)."""
        return np.stack([self.field.frobenius(self.elements, r) for r in range(self.field.n)])

    @cached_property
    def dual(self) -> "FieldBasis":
        return dual_basis(self)

    @cached_property
    def coord_matrix_inv(self) -> np.ndarray:
        """Inverse of the GF(q) matrix whose columns are the digits of alpha."""
        from . import linalg

        return linalg.inverse(self.field.base, self.field.digits(self.elements).T)

    def coordinates(self, x) -> np.ndarray:
        """GF(q) coordinates of x in this basis; shape ``x.shape + (n,)``."""
        d = self.field.digits(x)
        base = self.field.base
        flat = d.reshape(-1, self.field.n)
        coords = base.matmul(flat, self.coord_matrix_inv.T)
        return coords.reshape(d.shape)

    def combine(self, coords) -> np.ndarray:
        """Inverse of ``coordinates``."""
        coords = np.asarray(coords, dtype=np.int64)
        F = self.field
        terms = F.mul(F.embed(coords), self.elements)
        return F.sum(terms, axis=-1)


def moore_matrix(basis: FieldBasis, k: int) -> np.ndarray:
    n = basis.field.n
    if not 1 <= k <= n:
        raise FieldError(f"k={k} out of range 1..{n}")
    return basis.moore[:k].copy()


def dual_basis(basis: FieldBasis) -> FieldBasis:
    """beta with M(beta)^T = M(alpha)^{-1}."""
    from . import linalg

    F = basis.field
    try:
        minv = linalg.inverse(F, basis.moore)
    except linalg.SingularMatrixError as exc:
        raise FieldError("Moore matrix is singular; not a basis") from exc
    return FieldBasis(F, minv[:, 0])


def polynomial_basis(field: ExtField) -> FieldBasis:
    return FieldBasis(field, [field.q ** i for i in range(field.n)])


def normal_basis(field: ExtField) -> FieldBasis:
    """First element (in integer order) whose conjugates form a basis."""
    from . import linalg

    for a in range(1, field.order):
        conj = [int(field.frobenius(a, r)) for r in range(field.n)]
        if linalg.rank(field.base, field.digits(np.array(conj))) == field.n:
            return FieldBasis(field, conj)
    raise FieldError("no normal basis found")
