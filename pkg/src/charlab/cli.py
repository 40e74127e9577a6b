"""Reproducible command-line surface.

Every command writes CSV (and JSON for ``construct``) with floats at a
fixed 12 significant digits, plus a run manifest recording parameters,
versions, seed and output digests.  Re-running a command with equal
parameters reproduces byte-identical CSV.

Exit codes: 0 ok, 1 declared threshold violated, 2 usage error,
3 resource limit.
"""

from __future__ import annotations

import argparse
import csv
import dataclasses
import hashlib
import json
import math
import sys
import time

import numpy as np

from . import __version__
from ._kernels import BACKEND
from .characters import build_group, enumerate_characters, parse_character
from .charsum import max_partial_sum, polya_vinogradov_check, scan_family
from .construct import PipelineConfig, run_pipeline
from .errors import CharlabError, DomainError, ResourceLimitError
from .lfunc import CmaComputer, control_err_check, coset_identity_check, lz_residual
from .pretentious import mean_identity, select_z, sj_table
from .primes import sieve_primes

EXIT_OK = 0
EXIT_THRESHOLD = 1
EXIT_USAGE = 2
EXIT_RESOURCE = 3


def fmt(x) -> str:
    """Fixed 12-significant-digit decimal printing for reproducible CSV."""
    if isinstance(x, float):
        return f"{x:.12g}"
    return str(x)


def _write_csv(path: str, header: list[str], rows) -> None:
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(header)
        for row in rows:
            w.writerow([fmt(v) for v in row])


def _sha256(path: str) -> str:
    h = hashlib.sha256()
    with open(path, "rb") as fh:
        for chunk in iter(lambda: fh.read(1 << 16), b""):
            h.update(chunk)
    return h.hexdigest()


def _write_manifest(args, outputs: list[str], t0: float) -> None:
    if getattr(args, "no_manifest", False):
        return
    params = {
        k: v
        for k, v in sorted(vars(args).items())
        if k not in ("func", "no_manifest") and v is not None
    }
    manifest = {
        "command": args.command,
        "params": {k: str(v) for k, v in params.items()},
        "seed": getattr(args, "seed", None) or 0,
        "versions": {
            "charlab": __version__,
            "python": sys.version.split()[0],
            "numpy": np.__version__,
            "kernel_backend": BACKEND,
        },
        "wall_time_s": round(time.monotonic() - t0, 3),
        "outputs": [
            {"path": p, "sha256": _sha256(p)} for p in outputs
        ],
    }
    path = outputs[0] + ".manifest.json" if outputs else args.out + ".manifest.json"
    with open(path, "w") as fh:
        json.dump(manifest, fh, indent=2, sort_keys=True)
        fh.write("\n")


def _parse_range(text: str) -> tuple[int, int]:
    lo, _, hi = text.partition(":")
    return int(lo), int(hi)


def _parse_float_list(text: str) -> list[float]:
    return [float(t) for t in text.split(",") if t.strip()]


# -- msum -----------------------------------------------------------------

_SCAN_HEADER = [
    "q", "char", "order", "parity", "conductor", "M", "M_over_sqrtq",
    "envelope_ratio",
]


def cmd_msum(args) -> int:
    t0 = time.monotonic()
    from .charsum import envelope_ratio

    rows = []
    truncated = False
    if args.q is None and args.range is None:
        print("msum: need --q or --range", file=sys.stderr)
        return EXIT_USAGE
    if args.q is not None:
        table = sieve_primes(max(3, args.q))
        group = build_group(args.q, table)
        if args.char is not None:
            chars = [parse_character(f"{args.q}:{args.char}", table)]
        else:
            chars = [
                c for c in enumerate_characters(group) if not c.is_principal()
            ]
        if not chars:
            print(
                f"msum: q={args.q} has no non-principal characters",
                file=sys.stderr,
            )
            return EXIT_USAGE
        for chi in chars:
            prof = max_partial_sum(chi)
            order = chi.order
            env = (
                envelope_ratio(prof.M, chi.q, order)
                if order >= 3 and order % 2 == 1
                else ""
            )
            rows.append([
                chi.q, chi.label(), order, chi.parity(), chi.conductor,
                prof.M, prof.normalized, env,
            ])
    else:
        lo, hi = _parse_range(args.range)
        table = sieve_primes(max(3, hi))
        stream = scan_family(
            table, lo, hi, args.order, primitive_only=args.primitive,
            max_records=args.max_records, threads=args.threads,
        )
        for rec in stream:
            rows.append([
                rec.q, rec.char, rec.order, rec.parity, rec.conductor,
                rec.M, rec.m_over_sqrtq, rec.envelope_ratio,
            ])
        truncated = stream.truncated
        print(f"msum: running max M/sqrt(q) = {fmt(stream.running_max)}",
              file=sys.stderr)
    _write_csv(args.out, _SCAN_HEADER, rows)
    if truncated:
        with open(args.out, "a", newline="") as fh:
            fh.write("# truncated=true (record cap reached)\n")
    _write_manifest(args, [args.out], t0)
    if truncated:
        return EXIT_RESOURCE

    class _R:  # adapt rows for the PV check
        __slots__ = ("q", "M")

        def __init__(self, q, M):
            self.q, self.M = q, M

    pv = polya_vinogradov_check(_R(r[0], r[5]) for r in rows)
    if pv.violations:
        print(f"msum: {len(pv.violations)} Polya-Vinogradov violations",
              file=sys.stderr)
        return EXIT_THRESHOLD
    return EXIT_OK


# -- identities -----------------------------------------------------------


def cmd_identities(args) -> int:
    t0 = time.monotonic()
    g_lo, g_hi = _parse_range(args.g)
    k_lo, k_hi = _parse_range(args.k)
    tol = args.tol
    rows = []
    worst = 0.0
    ok = True
    for g in range(g_lo, g_hi + 1, 2):
        # Positivity of the selected maximizer for every k, even or odd.
        for k in range(max(1, k_lo), k_hi + 1):
            for ell in range(k):
                r = select_z(ell, k, g)
                if not (r.cos_value > 0 and abs(r.cos_value - r.direct_re) <= 1e-12):
                    ok = False
        # The tan-form mean identity holds on even k (odd-character orders).
        for k in range(max(2, k_lo + k_lo % 2), k_hi + 1, 2):
            mi = mean_identity(g, k)
            rows.append([g, k, mi.lhs, mi.rhs, mi.abs_err])
            worst = max(worst, mi.abs_err)
        for k_star in range(2, args.sj_kmax + 1):
            if math.gcd(g, k_star) == 1:
                t = sj_table(g, k_star)
                worst = max(worst, t.max_discrepancy)
    _write_csv(args.out, ["g", "k", "lhs", "rhs", "abs_err"], rows)
    _write_manifest(args, [args.out], t0)
    print(f"identities: max abs_err = {fmt(worst)}", file=sys.stderr)
    return EXIT_OK if ok and worst <= tol else EXIT_THRESHOLD


# -- cma / lz / coset / controlerr ----------------------------------------


def cmd_cma(args) -> int:
    t0 = time.monotonic()
    table = sieve_primes(int(args.X))
    rows = []
    violated = False
    for m in (int(t) for t in args.m.split(",")):
        comp = CmaComputer(m, args.X, table)
        for v in comp.row():
            rows.append([v.m, v.a, v.value])
        lhs, rhs = comp.row_sum_identity()
        if abs(lhs - rhs) > 1e-8:
            violated = True
            print(f"cma: row-sum identity violated for m={m}: "
                  f"{abs(lhs - rhs):.3e}", file=sys.stderr)
    _write_csv(args.out, ["m", "a", "value"], rows)
    _write_manifest(args, [args.out], t0)
    return EXIT_THRESHOLD if violated else EXIT_OK


def cmd_lz(args) -> int:
    t0 = time.monotonic()
    ys = _parse_float_list(args.y)
    limit = int(max(max(ys), args.X))
    table = sieve_primes(limit)
    rows = []
    shrinking = True
    for m in (int(t) for t in args.m.split(",")):
        comp = CmaComputer(m, args.X, table)
        for a in range(1, m + 1):
            if math.gcd(a, m) != 1:
                continue
            res = [lz_residual(m, a, y, args.X, table, comp) for y in ys]
            for r in res:
                rows.append([r.m, r.a, r.y, r.residual])
            if len(res) >= 2 and abs(res[-1].residual) > abs(res[0].residual):
                shrinking = False
    _write_csv(args.out, ["m", "a", "y", "residual"], rows)
    _write_manifest(args, [args.out], t0)
    return EXIT_OK if shrinking else EXIT_THRESHOLD


def _resolve_psi(spec: str, m: int, table):
    group = build_group(m, table)
    if spec == "quadratic":
        cands = [
            c for c in enumerate_characters(group)
            if c.order == 2 and c.is_primitive()
        ]
        if len(cands) != 1:
            raise DomainError(
                f"{len(cands)} primitive quadratic characters mod {m}"
            )
        return cands[0]
    return parse_character(f"{m}:{spec}", table)


def cmd_coset(args) -> int:
    t0 = time.monotonic()
    table = sieve_primes(int(args.X))
    comp = CmaComputer(args.m, args.X, table)
    if args.psi is not None:
        psis = [_resolve_psi(args.psi, args.m, table)]
    else:
        psis = [
            c for c in enumerate_characters(comp.group, primitive_only=True)
            if not c.is_principal()
        ]
    rows = []
    worst = 0.0
    sizes_ok = True
    for psi in psis:
        for ell in range(psi.order):
            cc = coset_identity_check(psi, ell, args.X, table, comp)
            rows.append([cc.m, cc.psi, cc.ell, cc.lhs, cc.rhs, cc.abs_err])
            worst = max(worst, cc.abs_err)
            sizes_ok = sizes_ok and cc.coset_size == cc.expected_size
    _write_csv(args.out, ["m", "psi", "ell", "lhs", "rhs", "err"], rows)
    _write_manifest(args, [args.out], t0)
    print(f"coset: max abs_err = {fmt(worst)}", file=sys.stderr)
    return EXIT_OK if worst <= 1e-3 and sizes_ok else EXIT_THRESHOLD


def cmd_controlerr(args) -> int:
    t0 = time.monotonic()
    table = sieve_primes(int(args.X))
    rows = []
    if args.m_range is not None:
        lo, hi = _parse_range(args.m_range)
        ms = [int(p) for p in table.primes_up_to(hi) if lo <= p]
    else:
        ms = [args.m]
    for m in ms:
        try:
            psi = _resolve_psi(args.psi, m, table)
        except DomainError:
            continue
        P = args.P if args.P is not None else 100.0 * math.log(m)
        ce = control_err_check(psi, args.g, args.X, P, table)
        rows.append([ce.m, ce.psi, ce.g, ce.k_star, ce.P, ce.lhs, ce.rhs,
                     ce.abs_err])
    _write_csv(
        args.out,
        ["m", "psi", "g", "k_star", "P", "lhs", "rhs", "abs_err"],
        rows,
    )
    _write_manifest(args, [args.out], t0)
    if rows:
        print(f"controlerr: max abs_err = "
              f"{fmt(max(r[-1] for r in rows))}", file=sys.stderr)
    return EXIT_OK


# -- construct ------------------------------------------------------------

_CONFIG_KEYS = {
    "M": int, "g": int, "preset": str, "delta": float, "T": float,
    "N": int, "p_agree": float, "p_small": float, "Y": float,
    "q_max": int, "q_products": lambda s: s.lower() in ("1", "true", "yes"),
    "exhaustive_limit": int, "sample": int, "seed": int,
}


def _load_config_file(path: str) -> dict:
    out = {}
    with open(path) as fh:
        for line in fh:
            line = line.split("#", 1)[0].strip()
            if not line:
                continue
            key, _, val = line.partition("=")
            key = key.strip()
            if key not in _CONFIG_KEYS:
                raise DomainError(f"unknown config key {key!r}")
            out[key] = _CONFIG_KEYS[key](val.strip())
    return out


def _report_to_json(report) -> dict:
    def convert(obj):
        if dataclasses.is_dataclass(obj):
            return {
                k: convert(v)
                for k, v in dataclasses.asdict(obj).items()
            }
        if isinstance(obj, dict):
            return {str(k): convert(v) for k, v in obj.items()}
        if isinstance(obj, (list, tuple)):
            return [convert(v) for v in obj]
        if isinstance(obj, (np.floating, float)):
            return float(f"{float(obj):.12g}")
        if isinstance(obj, np.integer):
            return int(obj)
        return obj

    return convert(report)


def cmd_construct(args) -> int:
    t0 = time.monotonic()
    if args.g % 2 == 0 or args.g < 3:
        print(f"construct: g must be odd >= 3, got {args.g}", file=sys.stderr)
        return EXIT_USAGE
    settings = {}
    if args.config:
        settings.update(_load_config_file(args.config))
    for key in _CONFIG_KEYS:
        val = getattr(args, key, None)
        if val is not None:
            settings[key] = val
    settings.setdefault("M", args.M)
    settings.setdefault("g", args.g)
    try:
        config = PipelineConfig(**settings)
    except TypeError as exc:
        print(f"construct: bad configuration: {exc}", file=sys.stderr)
        return EXIT_USAGE
    limit = int(max(config.Y, config.q_max, config.M))
    table = sieve_primes(limit)
    report = run_pipeline(config, table)
    json_path = args.out + ".json"
    csv_path = args.out + ".csv"
    with open(json_path, "w") as fh:
        json.dump(_report_to_json(report), fh, indent=2, sort_keys=True)
        fh.write("\n")
    _write_csv(
        csv_path,
        ["q", "chi", "agreement"],
        ([r.q, r.chi, r.agreement] for r in report.stage_candidates),
    )
    _write_manifest(args, [json_path, csv_path], t0)
    if report.failed_stage is not None:
        print(
            f"construct: stage {report.failed_stage!r} failed: "
            f"{report.fail_reason}",
            file=sys.stderr,
        )
        return EXIT_THRESHOLD
    print(
        f"construct: m={report.m} k={report.k} q={report.q} "
        f"agreement={fmt(report.agreement)}",
        file=sys.stderr,
    )
    return EXIT_OK


# -- plotdata -------------------------------------------------------------

_PLOT_SPECS = {
    # name: (x column, y column, log-x column emitted, sort by x)
    "envelope": ("q", "envelope_ratio", False, True),
    "residual": ("y", "residual", True, True),
}


def cmd_plotdata(args) -> int:
    t0 = time.monotonic()
    if args.spec is not None:
        if args.spec not in _PLOT_SPECS:
            print(f"plotdata: unknown spec {args.spec!r}", file=sys.stderr)
            return EXIT_USAGE
        xcol, ycol, logx, sort = _PLOT_SPECS[args.spec]
    else:
        if args.x is None or args.y is None:
            print("plotdata: need --spec or both --x and --y", file=sys.stderr)
            return EXIT_USAGE
        xcol, ycol, logx, sort = args.x, args.y, args.logx, True
    with open(args.input, newline="") as fh:
        reader = csv.DictReader(
            row for row in fh if not row.startswith("#")
        )
        data = list(reader)
    if not data or xcol not in data[0] or ycol not in data[0]:
        print(
            f"plotdata: column {xcol!r} or {ycol!r} missing from "
            f"{args.input}",
            file=sys.stderr,
        )
        return EXIT_USAGE
    try:
        rows = [(float(r[xcol]), float(r[ycol])) for r in data]
    except ValueError:
        print(
            f"plotdata: non-numeric values in column {xcol!r} or {ycol!r}",
            file=sys.stderr,
        )
        return EXIT_USAGE
    if sort:
        rows.sort()
    header = [xcol, ycol] + ([f"log10_{xcol}"] if logx else [])
    out_rows = [
        [x, y] + ([math.log10(x)] if logx else []) for x, y in rows
    ]
    _write_csv(args.out, header, out_rows)
    _write_manifest(args, [args.out], t0)
    return EXIT_OK


# -- parser ----------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(
        prog="charlab",
        description="Dirichlet character sum laboratory",
    )
    p.add_argument("--version", action="version", version=__version__)
    sub = p.add_subparsers(dest="command", required=True)

    def common(sp, default_out):
        sp.add_argument("--out", default=default_out, help="output CSV path")
        # default None so config-file seeds are not silently overridden
        sp.add_argument("--seed", type=int, default=None)
        sp.add_argument("--threads", type=int, default=1)
        sp.add_argument("--no-manifest", action="store_true")

    sp = sub.add_parser("msum", help="maximal partial sums M(chi)")
    sp.add_argument("--q", type=int)
    sp.add_argument("--char", help="exponent vector, e.g. '5' or '1,2'")
    sp.add_argument("--all", action="store_true",
                    help="all non-principal characters mod q")
    sp.add_argument("--range", help="q range lo:hi for a family scan")
    sp.add_argument("--order", type=int, default=3,
                    help="character order for family scans")
    sp.add_argument("--primitive", action="store_true")
    sp.add_argument("--max-records", type=int)
    common(sp, "msum.csv")
    sp.set_defaults(func=cmd_msum)

    sp = sub.add_parser("identities", help="maximizer and mean identities")
    sp.add_argument("--g", default="3:15", help="odd order range lo:hi")
    sp.add_argument("--k", default="1:300", help="twist order range lo:hi")
    sp.add_argument("--sj-kmax", type=int, default=500)
    sp.add_argument("--tol", type=float, default=1e-10)
    common(sp, "identities.csv")
    sp.set_defaults(func=cmd_identities)

    sp = sub.add_parser("cma", help="AP-constant table C_m(a)")
    sp.add_argument("--m", required=True, help="modulus or comma list")
    sp.add_argument("--X", type=float, default=1e6, help="Euler truncation")
    common(sp, "cma.csv")
    sp.set_defaults(func=cmd_cma)

    sp = sub.add_parser("lz", help="prime-reciprocal residuals in APs")
    sp.add_argument("--m", required=True, help="modulus or comma list")
    sp.add_argument("--y", default="1e4,1e5,1e6,1e7", help="cutoff list")
    sp.add_argument("--X", type=float, default=1e7)
    common(sp, "lz.csv")
    sp.set_defaults(func=cmd_lz)

    sp = sub.add_parser("coset", help="coset sums of C_m(a) vs power sums")
    sp.add_argument("--m", type=int, required=True)
    sp.add_argument("--psi", help="'quadratic' or exponent vector")
    sp.add_argument("--X", type=float, default=1e6)
    common(sp, "coset.csv")
    sp.set_defaults(func=cmd_coset)

    sp = sub.add_parser("controlerr",
                        help="S_j-weighted log(K/L) against small primes")
    sp.add_argument("--m", type=int)
    sp.add_argument("--m-range", help="prime modulus range lo:hi")
    sp.add_argument("--psi", default="quadratic")
    sp.add_argument("--g", type=int, default=3)
    sp.add_argument("--X", type=float, default=1e6)
    sp.add_argument("--P", type=float, help="small-prime cutoff")
    common(sp, "controlerr.csv")
    sp.set_defaults(func=cmd_controlerr)

    sp = sub.add_parser("construct", help="extremal character pipeline")
    sp.add_argument("--M", type=int, required=True)
    sp.add_argument("--g", type=int, default=3)
    sp.add_argument("--preset", choices=("desk", "paper"))
    sp.add_argument("--config", help="key=value config file")
    sp.add_argument("--delta", type=float)
    sp.add_argument("--T", type=float)
    sp.add_argument("--N", type=int)
    sp.add_argument("--p-agree", dest="p_agree", type=float)
    sp.add_argument("--p-small", dest="p_small", type=float)
    sp.add_argument("--Y", type=float)
    sp.add_argument("--q-max", dest="q_max", type=int)
    sp.add_argument("--q-products", dest="q_products", action="store_const",
                    const=True)
    sp.add_argument("--sample", type=int)
    common(sp, "construct")
    sp.set_defaults(func=cmd_construct)

    sp = sub.add_parser("plotdata", help="extract plot columns from CSV")
    sp.add_argument("--input", required=True)
    sp.add_argument("--spec", choices=sorted(_PLOT_SPECS))
    sp.add_argument("--x")
    sp.add_argument("--y")
    sp.add_argument("--logx", action="store_true")
    common(sp, "plotdata.csv")
    sp.set_defaults(func=cmd_plotdata)

    return p


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except ResourceLimitError as exc:
        print(f"charlab: resource limit: {exc}", file=sys.stderr)
        return EXIT_RESOURCE
    except (DomainError, CharlabError, FileNotFoundError, ValueError) as exc:
        print(f"charlab: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
