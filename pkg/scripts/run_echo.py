#!/usr/bin/env python3
"""Echo-circuit survival under trajectory depolarizing noise.

Runs (U_F^dag)^n U_F^n with per-gate depolarizing noise and reports the mean
survival probability versus n; the noiseless echo is the identity, so the
decay isolates circuit error from genuine dynamics.
"""
import pathlib
import sys

from sptchain.cli import load_config, run_job

HERE = pathlib.Path(__file__).resolve().parent.parent


def main() -> int:
    cfg = load_config(str(HERE / "configs" / "echo_noise.json"), sys.argv[1:])
    run_job(cfg, "echo")
    print(f"wrote {cfg['output_dir']}/echo.csv")
    return 0


if __name__ == "__main__":
    sys.exit(main())
