"""Command-line workflows over the tensor-code library.

Exit codes: 0 ok, 1 usage, 2 decode failure, 3 data error, 4 self-test violation.
Diagnostics go to stderr as ``key=value`` lines.
"""

from __future__ import annotations

import argparse
import sys
import time
from concurrent.futures import ThreadPoolExecutor
from pathlib import Path

import numpy as np

from . import channels, combinatorics, decoders, metrics
from . import tensor_codes as tc
from .finite_field import FieldBasis, FieldError, make_field, polynomial_basis
from .formats import (FormatError, emit_message, emit_spec, emit_word, parse_message,
                      parse_spec, parse_word)
from .qpolynomials import FactorisationError, box
from .tensor_codes import CodeSpec, SupportError

EXIT_OK, EXIT_USAGE, EXIT_DECODE, EXIT_DATA, EXIT_SELFTEST = 0, 1, 2, 3, 4


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message: str):  # argparse would exit 2, which means decode failure here
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def _diag(**kv) -> None:
    for k, v in kv.items():
        print(f"{k}={v}", file=sys.stderr)


def _read(path: str) -> str:
    return sys.stdin.read() if path == "-" else Path(path).read_text()


def _write(path: str | None, text: str) -> None:
    if path is None or path == "-":
        sys.stdout.write(text)
    else:
        Path(path).write_text(text)


def _int_list(text: str) -> list[int]:
    try:
        return [int(x) for x in text.split(",") if x.strip()]
    except ValueError as e:
        raise UsageError(f"expected comma-separated integers, got {text!r}") from e


def _load_spec(path: str) -> CodeSpec:
    return parse_spec(_read(path))


# -- gen / encode / corrupt / decode -------------------------------------------------


def cmd_gen(args) -> int:
    modulus = _int_list(args.modulus) if args.modulus else None
    base_modulus = _int_list(args.base_modulus) if args.base_modulus else None
    F = make_field(args.q, args.n, modulus, base_modulus)
    if args.basis:
        rows = [r for r in args.basis.split(";") if r.strip()]
        basis = FieldBasis(F, [F.from_coeffs(_int_list(r)) for r in rows])
    else:
        basis = None
    if (args.mu is None) == (args.support is None):
        raise UsageError("give exactly one of --mu or --support")
    if args.mu is not None:
        mus = _int_list(args.mu)
        if len(mus) == 1:
            mus = mus * args.m
        if len(mus) != args.m:
            raise UsageError("--mu needs one value or m values")
        S = box(mus)
    else:
        S = frozenset(tuple(_int_list(p)) for p in args.support.split(";") if p.strip())
    spec = CodeSpec(F, basis if basis is not None else polynomial_basis(F), args.m, S)
    _write(args.out, emit_spec(spec))
    _diag(dimension=spec.dimension)
    return EXIT_OK


def cmd_encode(args) -> int:
    spec = _load_spec(args.code)
    if args.msg is not None:
        f = parse_message(_read(args.msg), spec.field, spec.m)
    elif args.seed is not None:
        f = tc.random_message(spec, channels.trial_rng(args.seed, 0))
        if args.msg_out:
            _write(args.msg_out, emit_message(f))
    else:
        raise UsageError("give --msg or --seed")
    _write(args.out, emit_word(spec.field, tc.encode(spec, f)))
    return EXIT_OK


def _channel_from_args(args) -> channels.ChannelModel:
    params = {}
    for key in ("radius", "kappa", "a", "b", "r", "fibre_mode", "subset_mode"):
        v = getattr(args, key, None)
        if v is not None:
            params[key] = v
    if args.err_mode is not None:
        params["mode"] = args.err_mode
    required = {
        "col-rank": ("radius",), "row-rank": ("radius",), "subsetJ": ("radius", "kappa"),
        "slice-fibre": ("a", "b"), "trank": ("r",), "uniform-entry": (),
    }[args.model]
    missing = [k for k in required if k not in params]
    if missing:
        raise UsageError(f"model {args.model} needs --{' --'.join(missing)}")
    return channels.ChannelModel(args.model, params)


def cmd_corrupt(args) -> int:
    spec = _load_spec(args.code)
    F = spec.field
    R = parse_word(F, _read(args.input))
    model = _channel_from_args(args)
    E = model.sample(F, spec.n, spec.m, channels.trial_rng(args.seed, 0))
    if not model.verify(F, E):
        raise AssertionError("sampled error violates its declared model")
    rep = metrics.weights(F, E)
    _diag(**rep.as_dict())
    _write(args.out, emit_word(F, F.add(R, E)))
    return EXIT_OK


def cmd_decode(args) -> int:
    spec = _load_spec(args.code)
    R = parse_word(spec.field, _read(args.input))
    out = decoders.run_decoder(spec, R, args.alg, t=args.t, mode=args.mode)
    _diag(status=out.status, **{k: v for k, v in out.diagnostics.items()})
    if out.ok:
        _write(args.out, emit_word(spec.field, out.codeword))
        if args.msg_out:
            _write(args.msg_out, emit_message(out.message))
        return EXIT_OK
    # failure contract: hand back the received word
    _write(args.out, emit_word(spec.field, R))
    return EXIT_DECODE


# -- weights / trank / stats -----------------------------------------------------------


def cmd_weights(args) -> int:
    spec = _load_spec(args.code)
    w = parse_word(spec.field, _read(args.input))
    parts = [f"{k}={v}" for k, v in metrics.weights(spec.field, w).as_dict().items()]
    _write(args.out, " ".join(parts) + "\n")
    return EXIT_OK


def cmd_trank(args) -> int:
    spec = _load_spec(args.code)
    w = parse_word(spec.field, _read(args.input))
    r = metrics.word_tensor_rank(spec.field, w, spec.basis)
    parts = [f"trank={r}"]
    if spec.m == 2:
        parts.append(f"code_trank_distance_bound={metrics.trank_distance_bound(spec.support, spec.n)}")
    _write(args.out, " ".join(parts) + "\n")
    return EXIT_OK


def cmd_stats(args) -> int:
    single = args.mu1 is not None or args.mu2 is not None
    chosen = [args.figure3_grid, args.table1, args.distance_bound is not None, single]
    if sum(chosen) != 1:
        raise UsageError("choose one of --figure3-grid, --table1, --distance-bound, --mu1/--mu2")
    if single:
        if args.mu1 is None or args.mu2 is None:
            raise UsageError("--mu1 and --mu2 go together")
        b = combinatorics.alg_error_lowerbounds(args.q, args.n, args.mu1, args.mu2)
        rows = ["mu1,mu2,log10_ratio,N1,N2", f"{args.mu1},{args.mu2},{b.log10_ratio:.6f},{b.N1},{b.N2}"]
    elif args.figure3_grid:
        rows = ["mu1,mu2,log10_ratio"]
        for mu1, mu2, ratio in combinatorics.figure3_grid(args.q, args.n):
            rows.append(f"{mu1},{mu2},{ratio:.6f}")
    elif args.table1:
        t = combinatorics.table1_quantities(args.q, args.n)
        rows = ["q,n,S_n,T1,T2,roth_trank1,roth_trank2",
                f"{args.q},{args.n},{t.S_n},{t.T1},{t.T2},{t.roth_trank1},{t.roth_trank2}"]
    else:
        spec = _load_spec(args.distance_bound)
        rows = ["dimension,trank_distance_bound",
                f"{spec.dimension},{metrics.trank_distance_bound(spec.support, spec.n)}"]
    _write(args.out, "\n".join(rows) + "\n")
    return EXIT_OK


# -- bench -----------------------------------------------------------------------------

BENCH_HEADER = ("trial", "seed", "algorithm", "channel", "params", "success", "delta", "wF")


def _params_text(params: dict) -> str:
    return ";".join(f"{k}={params[k]}" for k in sorted(params)) or "none"


def bench_rows(spec: CodeSpec, model: channels.ChannelModel, algs: list[str], trials: int,
               seed: int, t: int | None = None, mode: int | None = None, timing: bool = False,
               workers: int = 1) -> list[list[str]]:
    """One row per (trial, algorithm), sorted by trial index then algorithm order."""
    F = spec.field

    def one(k: int) -> list[list[str]]:
        rng = channels.trial_rng(seed, k)
        C = tc.encode(spec, tc.random_message(spec, rng))
        E = model.sample(F, spec.n, spec.m, rng)
        if not model.verify(F, E):
            raise AssertionError(f"trial {k}: sample violates model {model.kind}")
        R = F.add(C, E)
        wF = metrics.rank_fq(F, E)
        out = []
        for alg in algs:
            t0 = time.perf_counter()
            res = decoders.run_decoder(spec, R, alg, t=t, mode=mode)
            dt = time.perf_counter() - t0
            ok = res.ok and np.array_equal(res.codeword, C)
            delta = res.diagnostics.get("delta", "")
            row = [str(k), str(seed), alg, model.kind, _params_text(model.params),
                   str(int(ok)), str(delta), str(wF)]
            if timing:
                row.append(f"{dt:.6f}")
            out.append(row)
        return out

    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as ex:
            chunks = list(ex.map(one, range(trials)))
    else:
        chunks = [one(k) for k in range(trials)]
    return [row for chunk in chunks for row in chunk]


def cmd_bench(args) -> int:
    spec = _load_spec(args.code)
    model = _channel_from_args(args)
    algs = [a for a in args.alg.split(",") if a]
    for a in algs:
        if a not in decoders.ALGORITHMS:
            raise UsageError(f"unknown algorithm {a!r}")
    rows = bench_rows(spec, model, algs, args.trials, args.seed, args.t, args.mode,
                      args.timing, args.workers)
    header = list(BENCH_HEADER) + (["wall_time"] if args.timing else [])
    text = "\n".join(",".join(r) for r in [header] + rows) + "\n"
    _write(args.out, text)
    for a in algs:
        mine = [r for r in rows if r[2] == a]
        if mine:
            rate = sum(int(r[5]) for r in mine) / len(mine)
            _diag(**{f"success_rate_{a}": f"{rate:.4f}"})
    return EXIT_OK


# -- selftest --------------------------------------------------------------------------


def selftest_checks() -> list[tuple[str, bool]]:
    """Small invariant suite; each entry is (name, passed)."""
    out: list[tuple[str, bool]] = []
    rng = np.random.default_rng(0)

    F4 = make_field(4, 1)
    a = np.arange(4)
    A, B = np.meshgrid(a, a)
    out.append(("gf4_distributive", all(
        np.array_equal(F4.mul(x, F4.add(A, B)), F4.add(F4.mul(x, A), F4.mul(x, B))) for x in a)))
    out.append(("gf4_inverse", all(int(F4.mul(x, F4.inv(x))) == 1 for x in range(1, 4))))

    spec = tc.make_spec(2, 4, 2, mus=(1, 1))
    f = tc.random_message(spec, rng)
    C = tc.encode(spec, f)
    out.append(("encode_decode_roundtrip", tc.decode_to_message(spec, C).coeffs == f.coeffs))
    out.append(("membership", tc.membership(spec, C)))
    fixed = True
    for alg in ("col", "row", "twoway", "radical", "allmodes-m"):
        res = decoders.run_decoder(spec, C, alg)
        fixed &= res.ok and np.array_equal(res.codeword, C)
    out.append(("decoder_fixed_point", fixed))

    F8 = make_field(2, 3)
    ok = True
    for _ in range(20):
        w = rng.integers(0, 8, size=(3, 3))
        ok &= metrics.verify_weight_bounds(F8, w)
    out.append(("weight_rank_bounds", ok))

    out.append(("trank_counts", combinatorics.low_rank_tensor_counts(2, (2, 2, 2))
                == [1, combinatorics.count_trank1(2, 2, 2, 2), combinatorics.count_trank2(2, 2, 2, 2)]))

    model = channels.ChannelModel("col-rank", {"radius": 1})
    spec6 = tc.make_spec(2, 6, 2, mus=(1, 1))
    ok = True
    for k in range(10):
        r = channels.trial_rng(0, k)
        C = tc.encode(spec6, tc.random_message(spec6, r))
        E = model.sample(spec6.field, 6, 2, r)
        ok &= model.verify(spec6.field, E)
        res = decoders.decode_columnwise(spec6, spec6.field.add(C, E))
        ok &= res.ok and np.array_equal(res.codeword, C)
    out.append(("columnwise_radius", ok))
    return out


def cmd_selftest(args) -> int:
    results = selftest_checks()
    for name, passed in results:
        print(f"{'PASS' if passed else 'FAIL'} {name}")
    return EXIT_OK if all(p for _, p in results) else EXIT_SELFTEST


# -- entry point -----------------------------------------------------------------------


def _add_channel_args(p) -> None:
    p.add_argument("--model", required=True, choices=channels.KINDS)
    for key in ("radius", "kappa", "a", "b", "r"):
        p.add_argument(f"--{key}", type=int)
    p.add_argument("--fibre-mode", dest="fibre_mode", type=int)
    p.add_argument("--subset-mode", dest="subset_mode", type=int)
    p.add_argument("--err-mode", dest="err_mode", type=int, help="fibre/slice mode of the error model")
    p.add_argument("--seed", type=int, default=0)


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="tensorcodes", description="Tensor codes over finite fields.")
    sub = p.add_subparsers(dest="cmd", required=True, parser_class=_Parser)

    g = sub.add_parser("gen", help="write a code-spec file")
    g.add_argument("--q", type=int, required=True)
    g.add_argument("--n", type=int, required=True)
    g.add_argument("--m", type=int, default=2)
    g.add_argument("--mu", help="one degree or m comma-separated degrees")
    g.add_argument("--support", help="m-tuples separated by ';'")
    g.add_argument("--modulus")
    g.add_argument("--base-modulus", dest="base_modulus")
    g.add_argument("--basis", help="n rows separated by ';'")
    g.add_argument("--out")
    g.set_defaults(func=cmd_gen)

    e = sub.add_parser("encode", help="encode a message polynomial")
    e.add_argument("--code", required=True)
    e.add_argument("--msg")
    e.add_argument("--seed", type=int, help="encode a random message instead")
    e.add_argument("--msg-out", dest="msg_out")
    e.add_argument("--out")
    e.set_defaults(func=cmd_encode)

    c = sub.add_parser("corrupt", help="add a sampled error")
    c.add_argument("--code", required=True)
    c.add_argument("--in", dest="input", required=True)
    _add_channel_args(c)
    c.add_argument("--out")
    c.set_defaults(func=cmd_corrupt)

    d = sub.add_parser("decode", help="decode a received word")
    d.add_argument("--alg", required=True, choices=decoders.ALGORITHMS)
    d.add_argument("--code", required=True)
    d.add_argument("--in", dest="input", required=True)
    d.add_argument("--t", type=int)
    d.add_argument("--mode", type=int)
    d.add_argument("--out")
    d.add_argument("--msg-out", dest="msg_out")
    d.set_defaults(func=cmd_decode)

    for name, func, helptext in (("weights", cmd_weights, "fibre and slice weights"),
                                 ("trank", cmd_trank, "exact tensor rank (small words)")):
        w = sub.add_parser(name, help=helptext)
        w.add_argument("--code", required=True)
        w.add_argument("--in", dest="input", required=True)
        w.add_argument("--out")
        w.set_defaults(func=func)

    s = sub.add_parser("stats", help="counting tables as CSV")
    s.add_argument("--figure3-grid", dest="figure3_grid", action="store_true",
                   help="log10(N2/N1) for mu1, mu2 in 1..8")
    s.add_argument("--table1", action="store_true")
    s.add_argument("--distance-bound", dest="distance_bound", metavar="CODE")
    s.add_argument("--mu1", type=int)
    s.add_argument("--mu2", type=int)
    s.add_argument("--q", type=int, default=2)
    s.add_argument("--n", type=int, default=10)
    s.add_argument("--out")
    s.set_defaults(func=cmd_stats)

    b = sub.add_parser("bench", help="seeded Monte-Carlo trials as CSV")
    b.add_argument("--code", required=True)
    b.add_argument("--alg", required=True, help="comma-separated algorithms")
    b.add_argument("--trials", type=int, default=100)
    b.add_argument("--t", type=int)
    b.add_argument("--mode", type=int)
    b.add_argument("--workers", type=int, default=1)
    b.add_argument("--timing", action="store_true", help="add a wall_time column")
    _add_channel_args(b)
    b.add_argument("--out")
    b.set_defaults(func=cmd_bench)

    st = sub.add_parser("selftest", help="run the built-in invariant suite")
    st.set_defaults(func=cmd_selftest)
    return p


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except UsageError as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_USAGE
    except (FormatError, FieldError, SupportError, FactorisationError, metrics.InfeasibleError,
            ValueError, OSError, AssertionError) as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_DATA


if __name__ == "__main__":
    sys.exit(main())
