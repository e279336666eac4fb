#!/usr/bin/env python3
"""Subharmonic peak height over the (delta, V) plane.

Scans the drive-error / interaction grid at L=8 with 50 disorder realizations
per cell and plots the resulting phase diagram. Pass --set overrides, e.g.
`run_phase_diagram.py 'statistic="peak_std"' realizations=20`.
"""
import pathlib
import sys

from sptchain.cli import load_config, run_job

HERE = pathlib.Path(__file__).resolve().parent.parent


def main() -> int:
    cfg = load_config(str(HERE / "configs" / "phase_scan.json"), sys.argv[1:])
    run_job(cfg, "scan")
    run_job(cfg, "plot")
    print(f"wrote {cfg['output_dir']}/grid.csv and grid.svg")
    return 0


if __name__ == "__main__":
    sys.exit(main())
