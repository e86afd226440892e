"""Text formats for code specs, words and messages.

Code-spec file: one ``key=value`` per line; ``#`` starts a comment.
    q=2
    n=3
    m=2
    modulus=1,1,0,1            constant term first
    base_modulus=1,1,1         only for prime-power q
    basis=0,1,0;0,0,1;0,1,1    n rows of n GF(q)-coefficients
    support=0,0;0,1;1,0;1,1    m-tuples

Word file: header ``order=m n=N`` then N^m lines, row-major (last index
fastest), each a comma-separated GF(q)-coefficient vector.
"""

from __future__ import annotations

import numpy as np

from .finite_field import ExtField, FieldBasis, make_field, polynomial_basis
from .qpolynomials import MultilinPoly, format_poly, parse_poly
from .tensor_codes import CodeSpec


class FormatError(ValueError):
    pass


def _ints(text: str) -> list[int]:
    try:
        return [int(x) for x in text.split(",") if x.strip() != ""]
    except ValueError as e:
        raise FormatError(f"expected comma-separated integers, got {text!r}") from e


def _kv_lines(text: str) -> dict[str, str]:
    out: dict[str, str] = {}
    for raw in text.splitlines():
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise FormatError(f"expected key=value, got {raw!r}")
        k, v = line.split("=", 1)
        k = k.strip()
        if k in out:
            raise FormatError(f"duplicate key {k!r}")
        out[k] = v.strip()
    return out


def field_base_modulus(F: ExtField) -> tuple[int, ...] | None:
    return F.base.modulus if isinstance(F.base, ExtField) else None


def emit_spec(spec: CodeSpec) -> str:
    F = spec.field
    lines = [f"q={F.q}", f"n={F.n}", f"m={spec.m}", "modulus=" + ",".join(map(str, F.modulus))]
    bm = field_base_modulus(F)
    if bm is not None:
        lines.append("base_modulus=" + ",".join(map(str, bm)))
    rows = [",".join(str(int(d)) for d in F.digits(a)) for a in spec.basis.elements]
    lines.append("basis=" + ";".join(rows))
    lines.append("support=" + ";".join(",".join(map(str, s)) for s in sorted(spec.support)))
    return "\n".join(lines) + "\n"


def parse_spec(text: str) -> CodeSpec:
    kv = _kv_lines(text)
    for key in ("q", "n", "support"):
        if key not in kv:
            raise FormatError(f"missing key {key!r}")
    unknown = set(kv) - {"q", "n", "m", "modulus", "base_modulus", "basis", "support"}
    if unknown:
        raise FormatError(f"unknown keys {sorted(unknown)}")
    try:
        q, n = int(kv["q"]), int(kv["n"])
        m = int(kv.get("m", "2"))
    except ValueError as e:
        raise FormatError("q, n and m must be integers") from e
    modulus = _ints(kv["modulus"]) if "modulus" in kv else None
    base_modulus = _ints(kv["base_modulus"]) if "base_modulus" in kv else None
    F = make_field(q, n, modulus, base_modulus)
    if "basis" in kv:
        rows = [r for r in kv["basis"].split(";") if r.strip()]
        elems = [F.from_coeffs(_ints(r)) for r in rows]
        for r in rows:
            if len(_ints(r)) != n:
                raise FormatError("basis rows must have n coefficients")
        basis = FieldBasis(F, elems)
    else:
        basis = polynomial_basis(F)
    support = [tuple(_ints(p)) for p in kv["support"].split(";") if p.strip()]
    return CodeSpec(F, basis, m, frozenset(support))


def emit_word(F: ExtField, w: np.ndarray) -> str:
    w = np.asarray(w, dtype=np.int64)
    n = w.shape[0] if w.ndim else 0
    lines = [f"order={w.ndim} n={n}"]
    digits = F.digits(w.reshape(-1))
    lines += [",".join(str(int(d)) for d in row) for row in digits]
    return "\n".join(lines) + "\n"


def parse_word(F: ExtField, text: str) -> np.ndarray:
    lines = [ln.strip() for ln in text.splitlines() if ln.strip()]
    if not lines:
        raise FormatError("empty word file")
    head = dict(tok.split("=", 1) for tok in lines[0].split() if "=" in tok)
    try:
        m, n = int(head["order"]), int(head["n"])
    except (KeyError, ValueError) as e:
        raise FormatError("word header must be 'order=m n=N'") from e
    body = lines[1:]
    if len(body) != n ** m:
        raise FormatError(f"expected {n ** m} entries, got {len(body)}")
    rows = [_ints(ln) for ln in body]
    if any(len(r) != F.n for r in rows):
        raise FormatError(f"each entry needs {F.n} coefficients")
    if any(not 0 <= d < F.q for r in rows for d in r):
        raise FormatError(f"coefficients must lie in [0, {F.q - 1}]")
    return F.from_digits(np.array(rows, dtype=np.int64)).reshape((n,) * m)


def emit_message(f: MultilinPoly) -> str:
    return format_poly(f) + "\n"


def parse_message(text: str, F: ExtField, m: int) -> MultilinPoly:
    try:
        return parse_poly(text, F, m)
    except ValueError as e:
        raise FormatError(str(e)) from e
