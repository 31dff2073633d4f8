"""Command line: ``orthobicm {coeffs,table,sweep,min-ebno}``."""

from __future__ import annotations

import argparse
import sys

from .constellation import labeling_natural, labeling_near_gray, make_bippm, make_ppm
from .sweep import (
    SpecError,
    SweepSpec,
    min_ebno,
    parse_grid,
    read_curve,
    render_table,
    run_sweep,
    write_result,
)
from .wideband import bicm_coefficients, cm_coefficients, wideband_summary

EXIT_SPEC = 2


def _coeffs(args) -> int:
    if args.M < 2 or args.M & (args.M - 1):
        raise SpecError(f"M must be a power of two >= 2, got {args.M}")
    s = make_ppm(args.M) if args.scheme == "ppm" else make_bippm(args.M)
    rows = [("CM", cm_coefficients(s))]
    if args.labeling != "none":
        if args.labeling == "near-gray":
            if args.scheme != "bippm":
                raise SpecError("near-gray labeling is defined for bippm only")
            lab = labeling_near_gray(s)
        else:
            lab = labeling_natural(s)
        rows.append((f"BICM ({args.labeling})", bicm_coefficients(s, lab)))
    print(f"{args.M}-{args.scheme}  D={s.dim}")
    for name, c in rows:
        w = wideband_summary(c, s.dim)
        slope = "undefined" if w.slope_per_dim_3db is None else f"{w.slope_per_dim_3db:.6g}"
        print(f"{name:18s} c1={c.c1:.12g}  c2={c.c2:.12g}  "
              f"EbN0_lim={w.ebno_lim_db:.4f} dB  slope={slope} bit/dim/3dB")
    return 0


def _table(args) -> int:
    print(render_table())
    return 0


def _sweep(args) -> int:
    spec = SweepSpec(
        scheme=args.scheme,
        M=args.M,
        labeling=args.labeling,
        detection=args.detection,
        esn0_db=parse_grid(args.esn0_db),
        n_samples=args.samples,
        seed=args.seed,
        target_se=None if args.target_se <= 0 else args.target_se,
    )
    spec.validate()
    result = run_sweep(spec, workers=args.workers)
    for path in write_result(result, args.out):
        print(path)
    return 0


def _min_ebno(args) -> int:
    res = min_ebno(read_curve(args.input))
    where = "boundary" if res.at_boundary else "interior"
    print(f"min EbN0 = {res.ebno_db:.4f} dB at C = {res.capacity_bits:.5f} bits "
          f"(std error {res.std_error:.2g}, {where})")
    return 0


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="orthobicm", description="Wideband CM/BICM analysis of (bi)orthogonal PPM.")
    sub = p.add_subparsers(dest="command", required=True)

    c = sub.add_parser("coeffs", help="Taylor coefficients, limit Eb/N0 and wideband slope")
    c.add_argument("--scheme", choices=("ppm", "bippm"), required=True)
    c.add_argument("--M", type=int, required=True)
    c.add_argument("--labeling", choices=("natural", "near-gray", "none"), default="natural")
    c.set_defaults(func=_coeffs)

    t = sub.add_parser("table", help="limit Eb/N0 and slopes for M = 2..32")
    t.set_defaults(func=_table)

    s = sub.add_parser("sweep", help="Monte-Carlo capacity curves over an Es/N0 grid")
    s.add_argument("--scheme", choices=("ppm", "bippm"), required=True)
    s.add_argument("--M", type=int, required=True)
    s.add_argument("--labeling", choices=("natural", "near-gray", "none"), default="natural")
    s.add_argument("--detection", choices=("coherent", "energy", "differential"), default="coherent")
    s.add_argument("--esn0-db", default="-10:0.5:12", help="A:STEP:B in dB, inclusive (default %(default)s)")
    s.add_argument("--samples", type=int, default=200_000, help="initial samples per grid point")
    s.add_argument("--target-se", type=float, default=0.002,
                   help="double samples until the std error is below this (<= 0 disables)")
    s.add_argument("--seed", type=int, default=0)
    s.add_argument("--workers", type=int, default=None, help="worker processes (default: $ORTHOBICM_WORKERS or 1)")
    s.add_argument("--out", required=True, help="output directory")
    s.set_defaults(func=_sweep)

    m = sub.add_parser("min-ebno", help="minimum Eb/N0 of a curve CSV")
    m.add_argument("--in", dest="input", required=True)
    m.set_defaults(func=_min_ebno)
    return p


def _join_grid(argv):
    # "--esn0-db -6:1:9" would be read as an option; glue the value on
    out = list(argv)
    for i, a in enumerate(out[:-1]):
        if a == "--esn0-db":
            out[i : i + 2] = [f"--esn0-db={out[i + 1]}"]
            break
    return out


def main(argv=None) -> int:
    argv = sys.argv[1:] if argv is None else argv
    args = build_parser().parse_args(_join_grid(argv))
    try:
        return args.func(args)
    except SpecError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_SPEC
    except (ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
