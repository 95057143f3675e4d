"""Command-line front end.

Subcommands:

    denoise-matrix   threshold the singular values of a CSV matrix
    synth-bench      multi-method RSE sweep over noise levels (CSV out)
    denoise-image    non-local self-similarity denoising of a PGM image
    add-noise        add seeded Gaussian noise to a PGM image
    threshold-plot   sample penalty / threshold curves to CSV

Every subcommand accepts ``--config FILE`` with flat ``key=value`` lines
whose keys mirror the long flag names; explicit flags win over the file.
All randomness flows from ``--seed``. Outputs are written atomically, so a
failing run never leaves a partial file behind.
"""

from __future__ import annotations

import argparse
import sys
from typing import Dict, List, Optional

import numpy as np

from . import bench as bench_mod
from . import image as image_mod
from . import lrma
from .matrix import add_awgn, make_rng, read_matrix_csv, write_matrix_csv
from .methods import METHODS, canonical_method, spec_for_method
from .penalty import PenaltySpec, emit_curves, write_curves_csv
from .svd import SvdConvergenceError

_METHOD_CHOICES = ("elma", "nnm", "svt", "ps", "wnnm")
_FAMILY_CHOICES = ("firm", "soft", "pshrink", "wsoft")


def _float_list(text: str) -> List[float]:
    try:
        return [float(tok) for tok in text.split(",") if tok.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated numbers, got {text!r}")


def _name_list(text: str) -> List[str]:
    return [tok.strip() for tok in text.split(",") if tok.strip()]


def _range_pair(text: str):
    parts = text.split(":")
    if len(parts) != 2:
        raise argparse.ArgumentTypeError(f"expected lo:hi, got {text!r}")
    try:
        lo, hi = float(parts[0]), float(parts[1])
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected numbers in lo:hi, got {text!r}")
    return lo, hi


def _grid_triple(text: str):
    parts = text.split(":")
    if len(parts) != 3:
        raise argparse.ArgumentTypeError(f"expected lo:hi:step, got {text!r}")
    try:
        lo, hi, step = (float(p) for p in parts)
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected numbers in lo:hi:step, got {text!r}")
    if step <= 0 or hi < lo:
        raise argparse.ArgumentTypeError(f"bad grid {text!r}")
    return lo, hi, step


def _beta_arg(text: str):
    """'auto', a single number, or per-method assignments 'elma=3.5,nnm=2'."""
    text = text.strip()
    if text.lower() == "auto":
        return None
    if "=" not in text:
        try:
            return float(text)
        except ValueError:
            raise argparse.ArgumentTypeError(f"bad beta {text!r}")
    out = {}
    for item in text.split(","):
        if not item.strip():
            continue
        key, _, val = item.partition("=")
        try:
            out[key.strip()] = float(val)
        except ValueError:
            raise argparse.ArgumentTypeError(f"bad beta assignment {item!r}")
    return out


def _fmt_vals(values) -> str:
    return ",".join(format(float(v), ".9g") for v in values)


# ----------------------------------------------------------------------------
# Subcommand implementations
# ----------------------------------------------------------------------------


def _cmd_denoise_matrix(args) -> int:
    y = read_matrix_csv(args.infile)
    method = canonical_method(args.method)
    spec = spec_for_method(method, args.lam, args.a_fraction, args.p)
    result = lrma.solve(y, spec)
    write_matrix_csv(result.x_hat, args.out)
    print(
        f"rank={lrma.rank_of(result)} "
        f"sigma_in={_fmt_vals(result.sigma_in)} "
        f"sigma_out={_fmt_vals(result.sigma_out)}"
    )
    return 0


def _cmd_synth_bench(args) -> int:
    beta = args.beta
    if isinstance(beta, float):
        beta = {m: beta for m in args.methods}
    grid = None
    if args.beta_grid is not None:
        lo, hi, step = args.beta_grid
        scale = float(np.sqrt(max(args.m, args.n)))
        n_steps = int(np.floor((hi - lo) / step + 1e-9)) + 1
        grid = tuple((lo + i * step) * scale for i in range(n_steps))
    cfg = bench_mod.BenchConfig(
        m=args.m,
        n=args.n,
        rank=args.rank,
        sigma_list=args.sigma,
        trials=args.trials,
        methods=args.methods,
        beta_per_method=beta,
        beta_grid=grid,
        a_fraction=args.a_fraction,
        p=args.p,
        seed=args.seed,
    )
    records = bench_mod.run_sweep(cfg, threads=args.threads)
    bench_mod.write_records_csv(records, args.out, timing=args.timing)
    if args.summary:
        bench_mod.write_summary_csv(bench_mod.summarize(records), args.summary)
    print(f"records={len(records)} out={args.out}")
    return 0


def _cmd_denoise_image(args) -> int:
    noisy = image_mod.read_pgm(args.infile)
    cfg = image_mod.NssConfig(
        sigma=args.sigma,
        patch_size=args.patch_size,
        stride=args.stride,
        search_radius=args.search_radius,
        group_size=args.group_size,
        method=args.method,
        beta=args.beta,
        a_fraction=args.a_fraction,
        p=args.p,
        agg_weight=args.agg,
    )
    out = image_mod.denoise_image(noisy, cfg, threads=args.threads)
    image_mod.write_pgm(out, args.out)
    if args.reference:
        ref = image_mod.read_pgm(args.reference)
        # Score what was actually written: the quantized image.
        written = image_mod.read_pgm(args.out)
        print(f"psnr_db={image_mod.psnr(written, ref):.6f}")
    return 0


def _cmd_add_noise(args) -> int:
    img = image_mod.read_pgm(args.infile)
    noisy = add_awgn(img, args.sigma, make_rng(args.seed))
    image_mod.write_pgm(noisy, args.out)
    return 0


def _cmd_threshold_plot(args) -> int:
    lo, hi = args.range
    if args.family == "firm":
        spec = PenaltySpec.firm_fraction(args.lam, args.a_fraction)
    elif args.family == "soft":
        spec = PenaltySpec.soft(args.lam)
    elif args.family == "pshrink":
        spec = PenaltySpec.pshrink(args.lam, args.p)
    else:
        spec = PenaltySpec.wsoft(args.lam)
    rows = emit_curves(spec, lo, hi, args.step)
    write_curves_csv(rows, args.out)
    print(f"rows={len(rows)} out={args.out}")
    return 0


# ----------------------------------------------------------------------------
# Parser assembly and config-file handling
# ----------------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="elma",
        description="Low-rank matrix denoising via firm singular-value thresholding.",
    )
    subs = parser.add_subparsers(dest="command", required=True, metavar="SUBCOMMAND")
    fmt = argparse.ArgumentDefaultsHelpFormatter

    def common(sp):
        sp.add_argument("--config", default=None, metavar="FILE",
                        help="flat key=value file mirroring flag names; flags win")
        sp.add_argument("--seed", type=int, default=0, help="base seed for all randomness")

    sp = subs.add_parser("denoise-matrix", formatter_class=fmt,
                         help="threshold the singular values of a CSV matrix")
    sp.add_argument("--in", dest="infile", required=True, metavar="CSV", help="input matrix")
    sp.add_argument("--out", required=True, metavar="CSV", help="denoised matrix output")
    sp.add_argument("--method", choices=_METHOD_CHOICES, default="elma")
    sp.add_argument("--lam", type=float, required=True, help="regularization strength (> 0)")
    sp.add_argument("--a-fraction", type=float, default=0.6,
                    help="non-convexity as a fraction of the bound 1/lam (elma only)")
    sp.add_argument("--p", type=float, default=-2.0, help="p-shrinkage exponent (ps only)")
    common(sp)
    sp.set_defaults(func=_cmd_denoise_matrix)

    sp = subs.add_parser("synth-bench", formatter_class=fmt,
                         help="RSE sweep on random low-rank matrices plus noise")
    sp.add_argument("--m", type=int, default=200)
    sp.add_argument("--n", type=int, default=200)
    sp.add_argument("--rank", type=int, default=100)
    sp.add_argument("--sigma", type=_float_list, default=[float(s) for s in range(1, 11)],
                    metavar="LIST", help="comma-separated noise levels")
    sp.add_argument("--trials", type=int, default=15)
    sp.add_argument("--methods", type=_name_list, default=list(METHODS), metavar="LIST")
    sp.add_argument("--beta", type=_beta_arg, default=None,
                    help="'auto' (grid-tuned), one number, or 'elma=3.5,nnm=2.0'")
    sp.add_argument("--beta-grid", type=_grid_triple, default=None, metavar="LO:HI:STEP",
                    help="tuning grid in multiples of sqrt(max(m,n))")
    sp.add_argument("--a-fraction", type=float, default=0.6)
    sp.add_argument("--p", type=float, default=-2.0)
    sp.add_argument("--threads", type=int, default=1, help="worker threads for sweep cells")
    sp.add_argument("--timing", action="store_true",
                    help="record wall times (makes records CSV non-reproducible)")
    sp.add_argument("--out", required=True, metavar="CSV", help="per-record output")
    sp.add_argument("--summary", default=None, metavar="CSV", help="grouped summary output")
    common(sp)
    sp.set_defaults(func=_cmd_synth_bench)

    sp = subs.add_parser("denoise-image", formatter_class=fmt,
                         help="denoise a PGM image with patch-stack thresholding")
    sp.add_argument("--in", dest="infile", required=True, metavar="PGM", help="noisy image")
    sp.add_argument("--out", required=True, metavar="PGM", help="denoised image output")
    sp.add_argument("--sigma", type=float, required=True, help="noise level of the input")
    sp.add_argument("--method", choices=_METHOD_CHOICES, default="elma")
    sp.add_argument("--beta", type=float, default=None,
                    help="lam = beta * sigma (default: per-method calibrated value)")
    sp.add_argument("--patch-size", type=int, default=8)
    sp.add_argument("--stride", type=int, default=4)
    sp.add_argument("--search-radius", type=int, default=20)
    sp.add_argument("--group-size", type=int, default=60)
    sp.add_argument("--a-fraction", type=float, default=0.6)
    sp.add_argument("--p", type=float, default=-2.0)
    sp.add_argument("--agg", choices=("uniform", "rank"), default="uniform",
                    help="aggregation weighting of overlapping estimates")
    sp.add_argument("--threads", type=int, default=1, help="worker threads for patch rows")
    sp.add_argument("--reference", default=None, metavar="PGM",
                    help="clean image; prints psnr_db of the written output")
    common(sp)
    sp.set_defaults(func=_cmd_denoise_image)

    sp = subs.add_parser("add-noise", formatter_class=fmt,
                         help="add seeded Gaussian noise to a PGM image")
    sp.add_argument("--in", dest="infile", required=True, metavar="PGM")
    sp.add_argument("--out", required=True, metavar="PGM")
    sp.add_argument("--sigma", type=float, required=True, help="noise standard deviation")
    common(sp)
    sp.set_defaults(func=_cmd_add_noise)

    sp = subs.add_parser("threshold-plot", formatter_class=fmt,
                         help="sample penalty/threshold curves to CSV")
    sp.add_argument("--family", choices=_FAMILY_CHOICES, default="firm")
    sp.add_argument("--lam", type=float, required=True)
    sp.add_argument("--a-fraction", type=float, default=0.6)
    sp.add_argument("--p", type=float, default=-2.0)
    sp.add_argument("--range", type=_range_pair, default=(-5.0, 5.0), metavar="LO:HI")
    sp.add_argument("--step", type=float, default=0.01)
    sp.add_argument("--out", required=True, metavar="CSV")
    common(sp)
    sp.set_defaults(func=_cmd_threshold_plot)

    return parser


def _read_config_file(path) -> Dict[str, str]:
    out = {}
    with open(path, "r", encoding="utf-8") as fh:
        for ln, line in enumerate(fh, start=1):
            line = line.strip()
            if not line or line.startswith("#"):
                continue
            if "=" not in line:
                raise ValueError(f"{path}: line {ln}: expected key=value")
            key, _, val = line.partition("=")
            out[key.strip()] = val.strip()
    return out


def _extract_config_path(argv: List[str]) -> Optional[str]:
    for i, tok in enumerate(argv):
        if tok == "--config":
            return argv[i + 1] if i + 1 < len(argv) else None
        if tok.startswith("--config="):
            return tok.split("=", 1)[1]
    return None


def _apply_config(parser: argparse.ArgumentParser, argv: List[str], path) -> None:
    """Install config-file values as subcommand defaults.

    Explicit flags still replace them, yielding the precedence
    flags > config > built-in defaults. Flags supplied through the file
    also satisfy their required-ness.
    """
    sub_actions = [a for a in parser._actions if isinstance(a, argparse._SubParsersAction)]
    command = next((tok for tok in argv if not tok.startswith("-")), None)
    if not sub_actions or command not in sub_actions[0].choices:
        raise ValueError("cannot apply --config: unknown subcommand")
    sub = sub_actions[0].choices[command]
    by_flag = {}
    for action in sub._actions:
        for opt in action.option_strings:
            if opt.startswith("--"):
                by_flag[opt[2:]] = action
    for raw_key, raw_val in _read_config_file(path).items():
        key = raw_key.strip().replace("_", "-")
        action = by_flag.get(key)
        if action is None:
            raise ValueError(f"config key {raw_key!r} does not match any flag of {command}")
        if isinstance(action, argparse._StoreTrueAction):
            value = raw_val.lower() in ("1", "true", "yes", "on")
        elif action.type is not None:
            try:
                value = action.type(raw_val)
            except (ValueError, argparse.ArgumentTypeError) as exc:
                raise ValueError(f"config key {raw_key!r}: {exc}") from None
        else:
            value = raw_val
        sub.set_defaults(**{action.dest: value})
        action.required = False


def main(argv: Optional[List[str]] = None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    parser = build_parser()
    cfg_path = _extract_config_path(argv)
    if cfg_path:
        try:
            _apply_config(parser, argv, cfg_path)
        except (OSError, ValueError) as exc:
            print(f"error: {exc}", file=sys.stderr)
            return 1
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (ValueError, OSError, SvdConvergenceError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
