#!/usr/bin/env python3
"""Variationally compile a short-time interacting step into the gate set.

Optimizes the entangler-sandwich ansatz against exp(-i dt H2) for one drawn
realization; add `'search=true'` to grow the ansatz by neuroevolution instead
of fixing it. Writes the compiled circuit (text) plus a JSON sidecar with the
final loss.
"""
import pathlib
import sys

from sptchain.cli import load_config, run_job

HERE = pathlib.Path(__file__).resolve().parent.parent


def main() -> int:
    cfg = load_config(str(HERE / "configs" / "compile.json"), sys.argv[1:])
    run_job(cfg, "compile")
    print(f"wrote {cfg['output_dir']}/compiled_circuit.txt (+ .json sidecar)")
    return 0


if __name__ == "__main__":
    sys.exit(main())
