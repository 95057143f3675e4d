"""Scaled-down noise sweep over random low-rank matrices.

Runs the multi-method RSE benchmark at 80x80 rank 40 (a quarter of the
full 200x200 rank-100 configuration) so it finishes in seconds. Betas are
fixed per method by the built-in deterministic grid search; records and the
per-cell summary land in demos/out/.

Worth noticing in the output: the firm threshold wins at low noise, while
plain soft thresholding pulls ahead once most of the signal spectrum sinks
below the noise edge - shrinking the surviving components then pays off.
"""

import os

from elma.bench import BenchConfig, run_sweep, summarize, tune_betas, write_records_csv, write_summary_csv

OUT_DIR = os.path.join(os.path.dirname(__file__), "out")


def main():
    os.makedirs(OUT_DIR, exist_ok=True)
    cfg = BenchConfig(m=80, n=80, rank=40, sigma_list=[1.0, 2.0, 4.0, 7.0, 10.0],
                      trials=8, seed=0)
    betas = tune_betas(cfg)
    print("tuned betas:", {k: round(v, 2) for k, v in betas.items()})
    cfg.beta_per_method = betas

    records = run_sweep(cfg, threads=4)
    rows = summarize(records)
    write_records_csv(records, os.path.join(OUT_DIR, "sweep_records.csv"))
    write_summary_csv(rows, os.path.join(OUT_DIR, "sweep_summary.csv"))

    methods = sorted({r[0] for r in rows})
    sigmas = sorted({r[1] for r in rows})
    mean = {(r[0], r[1]): r[2] for r in rows}
    header = "sigma  " + "  ".join(f"{m:>7s}" for m in methods)
    print(header)
    for s in sigmas:
        print(f"{s:5.1f}  " + "  ".join(f"{mean[(m, s)]:7.4f}" for m in methods))
    print(f"\nwrote {OUT_DIR}/sweep_records.csv and sweep_summary.csv")


if __name__ == "__main__":
    main()
