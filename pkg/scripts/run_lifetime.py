#!/usr/bin/env python3
"""Edge-spin lifetime tau* versus system size.

Computes the first 1/2-crossing of the disorder-averaged edge envelope for
each size in the config; in the time-crystal phase tau* grows exponentially
with L. At the default delta=0.35 the crossing fits in a few hundred periods.
"""
import pathlib
import sys

from sptchain.cli import load_config, run_job

HERE = pathlib.Path(__file__).resolve().parent.parent


def main() -> int:
    cfg = load_config(str(HERE / "configs" / "lifetime.json"), sys.argv[1:])
    run_job(cfg, "lifetime")
    print(f"wrote {cfg['output_dir']}/lifetime.csv")
    return 0


if __name__ == "__main__":
    sys.exit(main())
