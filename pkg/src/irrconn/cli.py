"""Command line front end.

    irrconn check-mellit --genus 1 --delta 0 --points 0 --rmax 2
    irrconn conn-class --query '{"g": 1, "divisor": ["p:1"], ...}'
    irrconn ddp --format csv

Exit status: 0 ok, 1 usage or configuration error, 2 an identity failed,
3 inconclusive (a tail certificate or truncation gave out).

Kernels are cached on disk under a hash of their parameters and the package
version; the directory comes from --cache-dir, then $IRRCONN_CACHE_DIR.
"""

from __future__ import annotations

import argparse
import csv
import hashlib
import io
import json
import logging
import os
import random
import sys
import tempfile
from fractions import Fraction
from pathlib import Path

from . import __version__
from .exactalg import ScalarFraction, get_ring
from .genfun import (
    GenFunParams,
    check_admissible,
    check_mellit,
    dt_kernels,
    l_univ,
    omega_hlv,
    omega_sch,
    omega_univ,
    substitution_identity,
)
from .moduli import (
    DivisorSpec,
    InadmissibleClassError,
    StackQuery,
    Truncation,
    chi,
    conn_class,
    ddp_poincare,
    euler_pairing,
    graded_class,
    set_kernel_source,
    stabilized_graded_class,
    twist,
)
from .partition import enumerate_partitions, partitions_of
from .series import CertificateError, GammaExponent, GradedSeries, TruncationError, pleth_exp, pleth_log, tail_ok
from .specialize import E_TARGET, P_TARGET, e_p_conn, omega_specialized, specialize_value
from .symfunc import hhl_modified_macdonald

log = logging.getLogger("irrconn")

EXIT_OK, EXIT_USAGE, EXIT_IDENTITY, EXIT_INCONCLUSIVE = 0, 1, 2, 3
CACHE_FORMAT = 1
DDP_CASES = ((1, 2, 1), (2, 2, 1), (2, 3, 1))


class UsageError(ValueError):
    pass


# ----------------------------------------------------------------------
# kernel cache


def _series_dump(s: GradedSeries) -> list:
    return [[list(vec), s.data[vec].to_struct()] for vec in sorted(s.data)]


def _series_load(p: GenFunParams, rows: list) -> GradedSeries:
    ring = p.ring
    data = {tuple(vec): ScalarFraction.from_struct(ring, f) for vec, f in rows}
    return GradedSeries(ring, p.grading, p.r_max, p.z_max, data)


class KernelCache:
    """Content-addressed store for dt_kernels(params)."""

    def __init__(self, root):
        self.root = Path(root)
        self.hits = 0
        self.misses = 0

    @staticmethod
    def key(p: GenFunParams) -> str:
        blob = json.dumps({"params": p.to_struct(), "version": __version__, "format": CACHE_FORMAT},
                          sort_keys=True)
        return hashlib.sha256(blob.encode()).hexdigest()

    def path(self, p: GenFunParams) -> Path:
        return self.root / f"kernels-{self.key(p)}.json"

    def load(self, p: GenFunParams):
        path = self.path(p)
        if not path.exists():
            return None
        try:
            blob = json.loads(path.read_text())
            if blob["key"] != self.key(p):
                raise ValueError("key mismatch")
            return {name: _series_load(p, blob[name]) for name in ("H_univ", "H_sch")}
        except Exception as exc:  # anything unreadable is recomputed
            log.warning("cache entry %s is corrupt (%s); recomputing", path.name, exc)
            return None

    def store(self, p: GenFunParams, kernels: dict) -> None:
        self.root.mkdir(parents=True, exist_ok=True)
        blob = {"key": self.key(p), "params": p.to_struct(), "version": __version__}
        blob.update({name: _series_dump(kernels[name]) for name in ("H_univ", "H_sch")})
        fd, tmp = tempfile.mkstemp(dir=self.root, suffix=".tmp")
        try:
            with os.fdopen(fd, "w") as fh:
                json.dump(blob, fh, sort_keys=True)
            os.replace(tmp, self.path(p))
        except BaseException:
            os.unlink(tmp)
            raise

    def __call__(self, p: GenFunParams) -> dict:
        kernels = self.load(p)
        if kernels is not None:
            self.hits += 1
            log.info("kernel cache hit %s", self.key(p)[:12])
            return kernels
        self.misses += 1
        log.info("kernel cache miss %s", self.key(p)[:12])
        kernels = dt_kernels(p)
        self.store(p, kernels)
        return kernels


def _no_cache(p: GenFunParams) -> dict:
    return dt_kernels(p)


# ----------------------------------------------------------------------
# argument handling


def _positive(name):
    def conv(text):
        try:
            v = int(text)
        except ValueError:
            raise argparse.ArgumentTypeError(f"{name} must be an integer") from None
        if v < 1:
            raise argparse.ArgumentTypeError(f"{name} must be positive")
        return v
    return conv


def _nonneg(name):
    def conv(text):
        try:
            v = int(text)
        except ValueError:
            raise argparse.ArgumentTypeError(f"{name} must be an integer") from None
        if v < 0:
            raise argparse.ArgumentTypeError(f"{name} must be nonnegative")
        return v
    return conv


def _params(args) -> GenFunParams:
    if args.divisor:
        div = DivisorSpec.make(args.divisor)
        if args.points is not None and args.points != len(div.support_prime):
            raise UsageError("--points disagrees with the flagged points of --divisor")
        return GenFunParams(args.genus, div.support_prime, div.delta, args.rmax, args.zmax)
    pts = tuple(f"p{i}" for i in range(1, (args.points or 0) + 1))
    return GenFunParams(args.genus, pts, args.delta, args.rmax, args.zmax)


def _trunc(args) -> Truncation:
    return Truncation(args.zmax, args.window, max(args.zbudget, args.zmax))


def _read_json(text: str):
    if text == "-":
        return json.load(sys.stdin)
    stripped = text.lstrip()
    if stripped.startswith(("{", "[")):
        return json.loads(text)
    return json.loads(Path(text).read_text())


def _queries(args) -> list:
    if not args.query:
        raise UsageError("--query is required")
    data = _read_json(args.query)
    items = data if isinstance(data, list) else [data]
    return [StackQuery.from_struct(q) for q in items]


# ----------------------------------------------------------------------
# output


def _emit(args, payload, rows=None, header=None) -> None:
    if args.format == "csv":
        if rows is None:
            raise UsageError("csv output is only available for flat tables")
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(header)
        w.writerows(rows)
        text = buf.getvalue()
    else:
        text = json.dumps(payload, sort_keys=True, indent=2) + "\n"
    if args.out:
        Path(args.out).write_text(text)
    else:
        sys.stdout.write(text)


# ----------------------------------------------------------------------
# subcommands


def cmd_omega(args) -> int:
    p = _params(args)
    builders = {"univ": omega_univ, "hlv": omega_hlv, "sch": omega_sch}
    names = sorted(builders) if args.which == "all" else [args.which]
    out = {"params": p.to_struct(), "experimental": p.experimental}
    for name in names:
        out[name] = builders[name](p).to_struct()
    _emit(args, out)
    return EXIT_OK


def cmd_kernels(args) -> int:
    p = _params(args)
    kernels = args.cache(p)
    out = {"params": p.to_struct(), "window": args.window, "experimental": p.experimental}
    status = EXIT_OK
    for name in ("H_univ", "H_sch"):
        s = kernels[name]
        rows = []
        for vec in sorted(s.data):
            ok = tail_ok(s, vec, args.window)
            if not ok:
                status = EXIT_INCONCLUSIVE
            rows.append({
                "gamma": s.grading.gamma(vec).to_struct(),
                "tail_ok": ok,
                "at_z_1": s.data[vec].substitute({"z": 1}).to_text() if ok else None,
                "coeff": s.data[vec].to_text(),
            })
        out[name] = rows
    _emit(args, out)
    return status


def cmd_check_mellit(args) -> int:
    p = _params(args)
    report = check_mellit(p, args.window, kernels=args.cache(p))
    _emit(args, report)
    return {"equal": EXIT_OK, "unequal": EXIT_IDENTITY}.get(report["status"], EXIT_INCONCLUSIVE)


def _value_row(q: StackQuery, value, extra=None) -> dict:
    row = {"query": q.to_struct(), "chi": q.chi, "value": value.to_text()}
    row.update(extra or {})
    return row


def cmd_conn_class(args) -> int:
    trunc = _trunc(args)
    rows = [_value_row(q, conn_class(q, trunc)) for q in _queries(args)]
    _emit(args, {"results": rows}, [[json.dumps(r["query"], sort_keys=True), r["value"]] for r in rows],
          ["query", "value"])
    return EXIT_OK


def cmd_graded_class(args) -> int:
    trunc = _trunc(args)
    rows = []
    for q in _queries(args):
        if args.twist is not None:
            rows.append(_value_row(q, graded_class(q, args.twist, trunc), {"N": args.twist}))
        else:
            value, n = stabilized_graded_class(q, trunc)
            rows.append(_value_row(q, value, {"N": n, "witness": True}))
    _emit(args, {"results": rows}, [[json.dumps(r["query"], sort_keys=True), r["N"], r["value"]] for r in rows],
          ["query", "N", "value"])
    return EXIT_OK


def _cmd_specialized(args, target) -> int:
    trunc = _trunc(args)
    rows = [_value_row(q, e_p_conn(q, target, trunc, route=args.route), {"target": target.kind})
            for q in _queries(args)]
    _emit(args, {"results": rows}, [[json.dumps(r["query"], sort_keys=True), r["value"]] for r in rows],
          ["query", "value"])
    return EXIT_OK


def cmd_epoly(args) -> int:
    return _cmd_specialized(args, E_TARGET)


def cmd_poincare(args) -> int:
    return _cmd_specialized(args, P_TARGET)


def _parse_case(text: str) -> tuple:
    try:
        r, n, g = (int(v) for v in text.split(","))
    except ValueError:
        raise UsageError(f"malformed case {text!r}; expected r,n,g") from None
    if r < 1 or n < 1 or g < 0:
        raise UsageError(f"case {text!r} out of range")
    return r, n, g


def cmd_ddp(args) -> int:
    cases = [_parse_case(c) for c in args.case] if args.case else list(DDP_CASES)
    trunc = _trunc(args)
    rows = []
    for r, n, g in cases:
        res = ddp_poincare(g, n, r, trunc)
        rows.append({"r": r, "n": n, "g": g, "d": res["d_val"], "H": res["H"].to_text(),
                     "palindromic": res["palindromic"], "sigma": res["sigma"]})
    _emit(args, {"cases": rows},
          [[x["r"], x["n"], x["g"], x["d"], x["H"], int(x["palindromic"])] for x in rows],
          ["r", "n", "g", "d", "H", "palindromic"])
    return EXIT_OK if all(x["palindromic"] for x in rows) else EXIT_IDENTITY


# ----------------------------------------------------------------------
# selftest


def _random_fraction(ring, rng: random.Random) -> ScalarFraction:
    names = ("qh", "z") + ring.alpha_names()
    num = ring.zero()
    for _ in range(3):
        num = num + ring.mono({n: rng.randint(-2, 2) for n in names}, rng.randint(-3, 3))
    den = ring.one() - ring.mono({rng.choice(names): rng.randint(1, 2)})
    return num / den


def _random_class(rng: random.Random, divisor: DivisorSpec, nflags: int = 3) -> tuple:
    r = rng.randint(1, 3)
    parts = {}
    for x in divisor.support_prime:
        for _ in range(r):
            j = rng.randint(1, nflags)
            parts[(x, j)] = parts.get((x, j), 0) + 1
    return GammaExponent.make(r, parts), rng.randint(-3, 3)


def euler_identity(g1, g2, divisor: DivisorSpec, g: int) -> tuple:
    """(-chi(g2, twist g1) - chi(g1, g2), (chi12 - chi1 - chi2) / 2)."""
    (a, d1), (b, d2) = g1, g2
    mode = "full" if divisor.is_full_level else "partial"
    ta, td = twist(a, d1, divisor)
    lhs = -euler_pairing(b, d2, ta, td, divisor, g) - euler_pairing(a, d1, b, d2, divisor, g)
    rhs = Fraction(chi(a + b, divisor, mode, g) - chi(a, divisor, mode, g) - chi(b, divisor, mode, g), 2)
    return lhs, rhs


def _check(name, fn) -> dict:
    try:
        ok, detail = fn()
        return {"name": name, "status": "pass" if ok else "fail", "detail": detail}
    except (CertificateError, TruncationError) as exc:
        return {"name": name, "status": "inconclusive", "detail": str(exc)}


def selftest_suite(trunc: Truncation) -> list:
    rng = random.Random(20240601)
    out = []

    def mellit(g, delta, npts):
        def run():
            p = GenFunParams(g, tuple(f"p{i}" for i in range(1, npts + 1)), delta, 2, trunc.z_max)
            rep = check_mellit(p, trunc.window, kernels=_kernels(p))
            if rep["status"] == "inconclusive":
                raise CertificateError("tail certificate failed")
            return rep["status"] == "equal", f"{len(rep['gammas'])} classes"
        return run

    for case in ((1, 0, 0), (1, 1, 1)):
        out.append(_check(f"mellit g={case[0]} delta={case[1]} points={case[2]}", mellit(*case)))

    def rank_one():
        bad = []
        for g in (1, 2):
            ring = get_ring(g)
            q = ring.var("qh", 2)
            want = q ** g * ScalarFraction.from_laurent(l_univ(ring)).substitute({"z": 1}) / (q - 1)
            for n in (1, 2):
                query = StackQuery.from_struct({
                    "g": g, "divisor": [f"p:{n}"], "gamma": {"r": 1, "parts": [["p", 1, 1]]},
                    "eps": "1", "zeta": [["p", 1, ["0"] * n]], "kind": "full"})
                if conn_class(query, trunc) != want:
                    bad.append((g, n))
        return not bad, f"failures {bad}"

    out.append(_check("rank-one class", rank_one))

    def adams_law():
        ring = get_ring(1)
        for _ in range(5):
            f = _random_fraction(ring, rng)
            for n, m in ((2, 3), (3, 2), (2, 2)):
                if f.psi(n).psi(m) != f.psi(n * m):
                    return False, f"psi_{n} psi_{m}"
        return True, "15 cases"

    out.append(_check("adams composition", adams_law))

    def exp_log():
        p = GenFunParams(1, ("p",), 1, 2, 12)
        A = pleth_log(omega_univ(p))
        ok = pleth_exp(A) == omega_univ(p) and pleth_log(pleth_exp(A)) == A
        return ok, f"{len(A.data)} classes"

    out.append(_check("exp log round trip", exp_log))

    def macdonald():
        bad = [tuple(mu) for mu in enumerate_partitions(5)
               if hhl_modified_macdonald(mu).swap() != hhl_modified_macdonald(mu.conjugate())]
        return not bad, f"failures {bad}"

    out.append(_check("macdonald symmetry", macdonald))

    def arm_leg():
        bad = [tuple(mu) for mu in enumerate_partitions(8)
               if sum(2 * l + 1 for _, l in mu.arms_legs()) != mu.pairing(mu)]
        return not bad, f"failures {bad}"

    out.append(_check("leg sum", arm_leg))

    def euler():
        div = DivisorSpec.make(["p:2:1", "q:1"])
        for _ in range(200):
            lhs, rhs = euler_identity(_random_class(rng, div), _random_class(rng, div), div, rng.randint(0, 3))
            if lhs != rhs:
                return False, f"{lhs} != {rhs}"
        return True, "200 pairs"

    out.append(_check("euler form", euler))

    def substitution():
        bad = []
        for g in (1,):
            for delta in (0, 1):
                for m in range(4):
                    for mu in partitions_of(m):
                        lhs, rhs = substitution_identity(mu, g, delta)
                        if lhs != rhs:
                            bad.append((g, delta, tuple(mu)))
        return not bad, f"failures {bad}"

    out.append(_check("substitution identity", substitution))

    def admissible():
        bad = check_admissible(GenFunParams(1, ("p",), 1, 2, 16))
        return not bad, f"failures {bad}"

    out.append(_check("admissibility", admissible))

    def graded():
        query = StackQuery.from_struct({
            "g": 1, "divisor": ["p:1"], "gamma": {"r": 2, "parts": [["p", 1, 1], ["p", 2, 1]]},
            "d": 0, "eps": "1", "zeta": [["p", 1, ["1/2"]], ["p", 2, ["-1/2"]]], "kind": "full"})
        value, n = stabilized_graded_class(query, trunc)
        return value == conn_class(query, trunc), f"witness N = {n}"

    out.append(_check("graded versus z = 1 class", graded))

    def closed_forms():
        p = GenFunParams(1, ("p",), 1, 2, 12)
        for target in (E_TARGET, P_TARGET):
            if omega_specialized(p, target) != specialize_value(omega_univ(p), target):
                return False, target.kind
        return True, "E and P"

    out.append(_check("specialized closed forms", closed_forms))
    return out


_kernels = _no_cache


def cmd_selftest(args) -> int:
    rows = selftest_suite(_trunc(args))
    statuses = {r["status"] for r in rows}
    _emit(args, {"version": __version__, "checks": rows},
          [[r["name"], r["status"], r["detail"]] for r in rows], ["name", "status", "detail"])
    if "fail" in statuses:
        return EXIT_IDENTITY
    if "inconclusive" in statuses:
        return EXIT_INCONCLUSIVE
    return EXIT_OK


# ----------------------------------------------------------------------
# parser


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--genus", type=_nonneg("genus"), default=1)
    common.add_argument("--delta", type=_nonneg("delta"), default=0)
    common.add_argument("--points", type=_nonneg("points"), default=None,
                        help="number of marked points with full flags (named p1, p2, ...)")
    common.add_argument("--divisor", action="append", default=[], metavar="X:N[:N']",
                        help="divisor entry; repeatable; overrides --points and --delta")
    common.add_argument("--rmax", type=_positive("rmax"), default=2)
    common.add_argument("--zmax", type=_positive("zmax"), default=40)
    common.add_argument("--zbudget", type=_positive("zbudget"), default=80,
                        help="largest z-degree the graded drivers may expand to")
    common.add_argument("--window", type=_positive("window"), default=5)
    common.add_argument("--query", help="query JSON: inline, a file path, or - for stdin")
    common.add_argument("--out")
    common.add_argument("--format", choices=("json", "csv"), default="json")
    common.add_argument("--cache-dir", default=None)
    common.add_argument("--no-cache", action="store_true")
    common.add_argument("-v", "--verbose", action="store_true")

    parser = argparse.ArgumentParser(prog="irrconn", description=__doc__.split("\n\n")[0])
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("omega", parents=[common], help="truncated generating functions")
    p.add_argument("--which", choices=("univ", "hlv", "sch", "all"), default="all")
    p.set_defaults(fn=cmd_omega)
    sub.add_parser("kernels", parents=[common], help="DT kernels with tail certificates").set_defaults(fn=cmd_kernels)
    sub.add_parser("check-mellit", parents=[common], help="compare both kernels at z = 1") \
        .set_defaults(fn=cmd_check_mellit)
    sub.add_parser("conn-class", parents=[common], help="stack classes at z = 1").set_defaults(fn=cmd_conn_class)
    p = sub.add_parser("graded-class", parents=[common], help="stack classes from the graded formulas")
    p.add_argument("--twist", type=_nonneg("twist"), default=None, help="fixed N; default searches for a witness")
    p.set_defaults(fn=cmd_graded_class)
    for name, fn in (("epoly", cmd_epoly), ("poincare", cmd_poincare)):
        p = sub.add_parser(name, parents=[common], help=f"{'E' if name == 'epoly' else 'P'}-specialized classes")
        p.add_argument("--route", choices=("substitution", "kernel"), default="substitution")
        p.set_defaults(fn=fn)
    p = sub.add_parser("ddp", parents=[common], help="one-point full-flag Poincare polynomials")
    p.add_argument("--case", action="append", metavar="R,N,G")
    p.set_defaults(fn=cmd_ddp)
    sub.add_parser("selftest", parents=[common], help="run the invariant suite").set_defaults(fn=cmd_selftest)
    return parser


def main(argv=None) -> int:
    global _kernels
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_OK if exc.code == 0 else EXIT_USAGE
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s: %(message)s", stream=sys.stderr)
    cache_dir = args.cache_dir or os.environ.get("IRRCONN_CACHE_DIR")
    args.cache = KernelCache(cache_dir) if cache_dir and not args.no_cache else _no_cache
    _kernels = args.cache
    set_kernel_source(args.cache)
    try:
        return args.fn(args)
    except (CertificateError, TruncationError) as exc:
        print(f"inconclusive: {exc}", file=sys.stderr)
        return EXIT_INCONCLUSIVE
    except (UsageError, InadmissibleClassError, ValueError, KeyError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    finally:
        if isinstance(args.cache, KernelCache):
            log.info("kernel cache: %d hits, %d misses", args.cache.hits, args.cache.misses)
        set_kernel_source(None)
        _kernels = _no_cache


if __name__ == "__main__":
    sys.exit(main())
