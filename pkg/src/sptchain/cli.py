"""Config-driven command-line front end.

One JSON config per job; subcommands select the task, flags override config
fields.  Every run writes a manifest with the resolved config and the derived
per-realization seeds, so re-running a config reproduces the aggregates
bit-identically.

Exit codes: 0 success, 2 schema error, 3 capacity error, 4 non-convergence.
"""

from __future__ import annotations

import argparse
import csv
import json
import os
import sys
import time
from dataclasses import asdict, replace
from pathlib import Path

import numpy as np

from . import __version__
from .errors import CapacityError, ContractError, ConvergenceError, SchemaError
from .exact import EvolutionMethod, StateVector
from .model import ModelParams, sample_realization
from .mps import TruncationPolicy

_MASK = (1 << 64) - 1


def derive_seed(base_seed: int, index: int) -> int:
    """Splitmix64-style derivation: injective in ``index`` below 2^32."""
    x = (base_seed + 0x9E3779B97F4A7C15 * (index + 1)) & _MASK
    x ^= x >> 30
    x = (x * 0xBF58476D1CE4E5B9) & _MASK
    x ^= x >> 27
    x = (x * 0x94D049BB133111EB) & _MASK
    x ^= x >> 31
    return x


# --- config schema ----------------------------------------------------------

_NUM = {"type": "number"}
_POSINT = {"type": "integer", "minimum": 1}

CONFIG_SCHEMA = {
    "type": "object",
    "additionalProperties": False,
    "required": ["model"],
    "properties": {
        "model": {
            "type": "object",
            "additionalProperties": False,
            "required": ["L"],
            "properties": {
                "L": {"type": "integer", "minimum": 3},
                "J": _NUM, "dJ": {"type": "number", "minimum": 0},
                "V": _NUM, "dV": {"type": "number", "minimum": 0},
                "h": _NUM, "dh": {"type": "number", "minimum": 0},
                "delta": _NUM,
                "boundary": {"enum": ["open", "periodic"]},
            },
        },
        "engine": {
            "type": "object",
            "additionalProperties": False,
            "properties": {
                "kind": {"enum": ["exact", "mps", "circuit"]},
                "chi_max": _POSINT,
                "svd_cutoff": {"type": "number", "minimum": 0},
                "dt": {"type": "number", "exclusiveMinimum": 0},
                "noise": {
                    "type": "object",
                    "additionalProperties": False,
                    "properties": {
                        "p1": {"type": "number", "minimum": 0, "exclusiveMaximum": 1},
                        "p2": {"type": "number", "minimum": 0, "exclusiveMaximum": 1},
                    },
                },
            },
        },
        "method": {
            "type": "object",
            "additionalProperties": False,
            "properties": {
                "variant": {"enum": ["trotter", "krylov"]},
                "dt": {"type": "number", "exclusiveMinimum": 0},
                "tol": {"type": "number", "exclusiveMinimum": 0},
            },
        },
        "initial_state": {
            "type": "object",
            "additionalProperties": False,
            "required": ["kind"],
            "properties": {
                "kind": {"enum": ["zeros", "ones", "bits", "random-z-product", "spt"]},
                "bits": {"type": "array", "items": {"enum": [0, 1]}},
                "excitations": {"type": "array", "items": _POSINT},
                "random": {"type": "boolean"},
            },
        },
        "channels": {
            "type": "array",
            "items": {"enum": ["magnetization", "stabilizer", "entropy",
                               "autocorrelator"]},
            "minItems": 1,
        },
        "n_periods": _POSINT,
        "realizations": _POSINT,
        "base_seed": {"type": "integer", "minimum": 0},
        "output_dir": {"type": "string"},
        "statistic": {"enum": ["mean_peak", "peak_std", "o_sg"]},
        "delta_grid": {"type": "array", "items": _NUM, "minItems": 1},
        "v_grid": {"type": "array", "items": _NUM, "minItems": 1},
        "sizes": {"type": "array", "items": {"type": "integer", "minimum": 3}},
        "echo_max_n": _POSINT,
        "trajectories": _POSINT,
        "target_dt": {"type": "number", "exclusiveMinimum": 0},
        "alpha": {"type": "number", "exclusiveMinimum": 0},
        "threshold": {"type": "number", "exclusiveMinimum": 0},
        "max_iterations": _POSINT,
        "search": {"type": "boolean"},
        "site": _POSINT,
    },
}

DEFAULTS = {
    "model": {"J": 1.0, "dJ": 0.0, "V": 0.0, "dV": 0.0, "h": 0.0, "dh": 0.0,
              "delta": 0.0, "boundary": "open"},
    "engine": {"kind": "exact", "chi_max": 64, "svd_cutoff": 1e-10, "dt": 0.05,
               "noise": {"p1": 0.0, "p2": 0.0}},
    "method": {"variant": "trotter", "dt": 0.05, "tol": 1e-10},
    "initial_state": {"kind": "zeros"},
    "channels": ["magnetization"],
    "n_periods": 20,
    "realizations": 1,
    "base_seed": 0,
    "output_dir": "out",
}


def _merge(base, override):
    out = dict(base)
    for k, v in override.items():
        if isinstance(v, dict) and isinstance(out.get(k), dict):
            out[k] = _merge(out[k], v)
        else:
            out[k] = v
    return out


def validate_config(raw: dict) -> dict:
    """Validate against the schema and fill defaults; SchemaError on failure."""
    import jsonschema
    try:
        jsonschema.validate(raw, CONFIG_SCHEMA)
    except jsonschema.ValidationError as e:
        path = ".".join(str(p) for p in e.absolute_path)
        raise SchemaError(f"config invalid at '{path}': {e.message}",
                          field_path=path) from e
    return _merge(DEFAULTS, raw)


def load_config(path: str, overrides=()) -> dict:
    try:
        raw = json.loads(Path(path).read_text())
    except (OSError, json.JSONDecodeError) as e:
        raise SchemaError(f"cannot read config {path}: {e}") from e
    for item in overrides:
        if "=" not in item:
            raise SchemaError(f"override {item!r} is not key=value")
        key, value = item.split("=", 1)
        node = raw
        parts = key.split(".")
        for p in parts[:-1]:
            node = node.setdefault(p, {})
        node[parts[-1]] = json.loads(value)
    return validate_config(raw)


def model_params(cfg: dict) -> ModelParams:
    m = cfg["model"]
    return ModelParams(L=m["L"], J=m["J"], dJ=m["dJ"], V=m["V"], dV=m["dV"],
                       h=m["h"], dh=m["dh"], delta=m["delta"],
                       boundary=m["boundary"])


def _initial_spec(cfg: dict, L: int, seed: int):
    init = cfg["initial_state"]
    kind = init["kind"]
    if kind in ("zeros", "ones"):
        return kind
    if kind == "bits":
        bits = init.get("bits")
        if bits is None or len(bits) != L:
            raise SchemaError("initial_state.bits must list exactly L bits",
                              field_path="initial_state.bits")
        return list(bits)
    if kind == "random-z-product":
        rng = np.random.Generator(np.random.Philox(key=np.uint64(seed)))
        return list(rng.integers(0, 2, L))
    return {"spt": tuple(init.get("excitations", ()))}


def _outdir(cfg: dict) -> Path:
    d = os.environ.get("SPTCHAIN_OUTPUT_DIR") or cfg["output_dir"]
    path = Path(d)
    path.mkdir(parents=True, exist_ok=True)
    return path


def _worker_count() -> int:
    return max(1, int(os.environ.get("SPTCHAIN_WORKERS", "1")))


def _write_csv(path: Path, header, rows):
    with path.open("w", newline="") as f:
        w = csv.writer(f)
        w.writerow(header)
        for row in rows:
            w.writerow([repr(v) if isinstance(v, float) else v for v in row])


def _write_manifest(outdir: Path, cfg: dict, seeds, t0: float, extra=None):
    manifest = {
        "config": cfg,
        "seeds": [int(s) for s in seeds],
        "version": __version__,
        "wall_time_s": time.time() - t0,
        "timestamp": time.strftime("%Y-%m-%dT%H:%M:%S"),
    }
    if extra:
        manifest.update(extra)
    (outdir / "manifest.json").write_text(json.dumps(manifest, indent=2) + "\n")
    return manifest


def _run_one_series(args):
    cfg, index = args
    from . import observables
    params = model_params(cfg)
    seed = derive_seed(cfg["base_seed"], index)
    r = sample_realization(params, seed)
    eng = cfg["engine"]
    init = _initial_spec(cfg, params.L, seed)
    method = EvolutionMethod(cfg["method"]["variant"], dt=cfg["method"]["dt"],
                             tol=cfg["method"]["tol"])
    policy = TruncationPolicy(eng["chi_max"], eng["svd_cutoff"])
    return observables.evolve_and_record(
        r, init, tuple(cfg["channels"]), cfg["n_periods"],
        engine=eng["kind"], method=method, policy=policy, dt=eng["dt"])


def _collect_series(cfg: dict):
    """All realizations' series, in deterministic index order."""
    n = cfg["realizations"]
    tasks = [(cfg, i) for i in range(n)]
    workers = _worker_count()
    if workers == 1 or n == 1:
        return [_run_one_series(t) for t in tasks]
    from concurrent.futures import ProcessPoolExecutor
    with ProcessPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(_run_one_series, tasks))


def _series_rows(series_list, channels):
    for i, s in enumerate(series_list):
        for channel in channels:
            arr = getattr(s, channel)
            if arr is None:
                continue
            if arr.ndim == 1:
                for n, v in enumerate(arr):
                    yield (i, n, 0, channel, float(v))
            else:
                for site in range(arr.shape[0]):
                    for n in range(arr.shape[1]):
                        yield (i, n, site + 1, channel, float(arr[site, n]))


def _aggregate_rows(series_list, channels):
    for channel in channels:
        arrays = [getattr(s, channel) for s in series_list]
        if arrays[0] is None:
            continue
        stack = np.stack(arrays)  # (realization, [site,] period)
        mean = stack.mean(axis=0)
        std = stack.std(axis=0, ddof=1) if len(arrays) > 1 else np.zeros_like(mean)
        if mean.ndim == 1:
            for n in range(mean.shape[0]):
                yield (n, 0, channel, float(mean[n]), float(std[n]))
        else:
            for site in range(mean.shape[0]):
                for n in range(mean.shape[1]):
                    yield (n, site + 1, channel,
                           float(mean[site, n]), float(std[site, n]))


# --- subcommand implementations --------------------------------------------

def cmd_evolve(cfg: dict) -> int:
    t0 = time.time()
    outdir = _outdir(cfg)
    series = _collect_series(cfg)
    channels = cfg["channels"]
    _write_csv(outdir / "series.csv",
               ("realization", "period", "site", "channel", "value"),
               _series_rows(series, channels))
    _write_csv(outdir / "aggregate.csv",
               ("period", "site", "channel", "mean", "std"),
               _aggregate_rows(series, channels))
    seeds = [derive_seed(cfg["base_seed"], i) for i in range(cfg["realizations"])]
    _write_manifest(outdir, cfg, seeds, t0)
    return 0


def cmd_spectrum(cfg: dict) -> int:
    from .observables import fourier_spectrum
    t0 = time.time()
    if "magnetization" not in cfg["channels"]:
        raise SchemaError("spectrum needs the magnetization channel",
                          field_path="channels")
    outdir = _outdir(cfg)
    series = _collect_series(cfg)
    stack = np.stack([s.magnetization for s in series]).mean(axis=0)
    rows = []
    peaks = []
    for site in range(stack.shape[0]):
        spec = fourier_spectrum(stack[site, 1:])
        peaks.append((site + 1, spec.peak_height))
        for m in range(len(spec.frequencies)):
            rows.append((site + 1, float(spec.frequencies[m]),
                         float(spec.amplitudes[m])))
    _write_csv(outdir / "spectra.csv", ("site", "frequency", "amplitude"), rows)
    _write_csv(outdir / "peaks.csv", ("site", "peak_height"), peaks)
    seeds = [derive_seed(cfg["base_seed"], i) for i in range(cfg["realizations"])]
    _write_manifest(outdir, cfg, seeds, t0)
    return 0


def cmd_scan(cfg: dict) -> int:
    from .observables import phase_diagram_scan
    t0 = time.time()
    stat = cfg.get("statistic")
    if stat is None:
        raise SchemaError("scan needs 'statistic'", field_path="statistic")
    if stat == "peak_std" and cfg["realizations"] < 2:
        raise SchemaError("statistic 'peak_std' needs realizations >= 2",
                          field_path="realizations")
    for key in ("delta_grid", "v_grid"):
        if key not in cfg:
            raise SchemaError(f"scan needs '{key}'", field_path=key)
    outdir = _outdir(cfg)
    grid = phase_diagram_scan(cfg["delta_grid"], cfg["v_grid"],
                              model_params(cfg), cfg["realizations"], stat,
                              n_periods=cfg["n_periods"],
                              base_seed=cfg["base_seed"])
    rows = [(float(d), float(v), stat, float(grid.values[a, b]))
            for a, d in enumerate(grid.delta_grid)
            for b, v in enumerate(grid.v_grid)]
    _write_csv(outdir / "grid.csv", ("delta", "v", "statistic", "value"), rows)
    _write_manifest(outdir, cfg, [cfg["base_seed"]], t0,
                    {"statistic": stat, "realizations": cfg["realizations"]})
    return 0


def cmd_lifetime(cfg: dict) -> int:
    from .observables import evolve_and_record, tau_star
    t0 = time.time()
    sizes = cfg.get("sizes")
    if not sizes:
        raise SchemaError("lifetime needs 'sizes'", field_path="sizes")
    outdir = _outdir(cfg)
    rows = []
    for L in sizes:
        sub = _merge(cfg, {"model": {"L": L}})
        params = model_params(sub)
        acc = np.zeros(cfg["n_periods"] + 1)
        for i in range(cfg["realizations"]):
            r = sample_realization(params, derive_seed(cfg["base_seed"], i))
            s = evolve_and_record(r, "zeros", ("magnetization",),
                                  cfg["n_periods"])
            acc += s.magnetization[0]
        acc /= cfg["realizations"]
        env = np.array([(-1) ** n * acc[n] for n in range(len(acc))])
        env[0] = abs(env[0])
        ts = tau_star(env)
        rows.append((L, "" if ts is None else float(ts)))
    _write_csv(outdir / "lifetime.csv", ("L", "tau_star"), rows)
    _write_manifest(outdir, cfg, [cfg["base_seed"]], t0)
    return 0


def cmd_floquet_spectrum(cfg: dict) -> int:
    from .exact import floquet_spectrum
    t0 = time.time()
    outdir = _outdir(cfg)
    params = model_params(cfg)
    seed = derive_seed(cfg["base_seed"], 0)
    r = sample_realization(params, seed)
    report = floquet_spectrum(r, keep_vectors=False)
    _write_csv(outdir / "quasienergies.csv", ("index", "quasienergy"),
               [(i, float(e)) for i, e in enumerate(report.quasienergies)])
    _write_manifest(outdir, cfg, [seed], t0, {
        "pairing_defect": report.pairing_defect,
        "degeneracies": {str(k): v for k, v in report.degeneracies.items()},
    })
    return 0


def cmd_prep_spt(cfg: dict) -> int:
    from .circuit import circuit_to_text, run_circuit, spt_prep_circuit
    from .exact import pauli_expectation
    from .model import stabilizer_observable
    t0 = time.time()
    outdir = _outdir(cfg)
    params = model_params(cfg)
    exc = tuple(cfg["initial_state"].get("excitations", ()))
    c = spt_prep_circuit(params.L, exc)
    state = run_circuit(StateVector.from_bits([0] * params.L), c)
    (outdir / "prep_circuit.txt").write_text(circuit_to_text(c))
    rows = [(k, float(pauli_expectation(state, stabilizer_observable(k, params))))
            for k in range(1, params.L + 1)]
    _write_csv(outdir / "stabilizers.csv", ("site", "expectation"), rows)
    _write_manifest(outdir, cfg, [cfg["base_seed"]], t0)
    return 0


def cmd_echo(cfg: dict) -> int:
    from .circuit import (NoiseModel, echo_circuit, floquet_period_circuit,
                          run_circuit)
    t0 = time.time()
    outdir = _outdir(cfg)
    params = model_params(cfg)
    seed = derive_seed(cfg["base_seed"], 0)
    r = sample_realization(params, seed)
    period = floquet_period_circuit(r)
    noise_cfg = cfg["engine"]["noise"]
    max_n = cfg.get("echo_max_n", 5)
    n_traj = cfg.get("trajectories", 100)
    init = StateVector.from_bits([0] * params.L)
    rows = []
    for n in range(1, max_n + 1):
        c = echo_circuit(period, n)
        if noise_cfg["p1"] == 0 and noise_cfg["p2"] == 0:
            out = run_circuit(init, c)
            surv = abs(np.vdot(init.amplitudes, out.amplitudes)) ** 2
        else:
            total = 0.0
            for t in range(n_traj):
                nm = NoiseModel(noise_cfg["p1"], noise_cfg["p2"],
                                derive_seed(seed, n * n_traj + t))
                out = run_circuit(init, c, nm)
                total += abs(np.vdot(init.amplitudes, out.amplitudes)) ** 2
            surv = total / n_traj
        rows.append((n, float(surv)))
    _write_csv(outdir / "echo.csv", ("n", "survival"), rows)
    _write_manifest(outdir, cfg, [seed], t0)
    return 0


def cmd_compile(cfg: dict) -> int:
    import scipy.linalg
    from .circuit import circuit_to_text
    from .compiler import (ParamCircuit, ansatz_from_path, fidelity_loss,
                           neuroevolution_search, optimize, sandwich_ansatz)
    from .exact import dense_hamiltonian
    from .model import build_grouped_terms
    t0 = time.time()
    outdir = _outdir(cfg)
    params = model_params(cfg)
    if params.L > 8:
        raise CapacityError("compilation limited to L <= 8")
    seed = derive_seed(cfg["base_seed"], 0)
    r = sample_realization(params, seed)
    dt = cfg.get("target_dt", 0.5)
    H2 = dense_hamiltonian(params.L, build_grouped_terms(r))
    target = scipy.linalg.expm(-1j * dt * H2)
    threshold = cfg.get("threshold", 0.001)
    alpha = cfg.get("alpha", 0.005)
    max_it = cfg.get("max_iterations", 5000)
    if cfg.get("search"):
        res = neuroevolution_search(target, params.L, beta=threshold,
                                    alpha=alpha, max_iterations=max_it,
                                    seed=seed,
                                    seed_paths=(sandwich_ansatz(params.L),))
        pc, loss, converged = res.circuit, res.loss, res.converged
        iterations = res.generations
    else:
        pc = ansatz_from_path(sandwich_ansatz(params.L), params.L)
        rng = np.random.Generator(np.random.Philox(key=np.uint64(seed)))
        pc = pc.with_parameters(rng.uniform(-np.pi, np.pi, len(pc.parameters)))
        out = optimize(pc, target, alpha=alpha, threshold=threshold,
                       max_iterations=max_it)
        pc = pc.with_parameters(out.parameters)
        loss, converged, iterations = out.loss, out.converged, out.iterations
    (outdir / "compiled_circuit.txt").write_text(circuit_to_text(pc.bind()))
    sidecar = {
        "target_dt": dt,
        "final_loss": float(loss),
        "iterations": int(iterations),
        "converged": bool(converged),
        "seed": seed,
        "realization": {"J": list(r.J), "V": list(r.V), "h": list(r.h)},
    }
    (outdir / "compiled_circuit.json").write_text(json.dumps(sidecar, indent=2) + "\n")
    _write_manifest(outdir, cfg, [seed], t0, {"final_loss": float(loss)})
    if not converged:
        raise ConvergenceError(f"compilation stalled at loss {loss:.3e}",
                               residual=loss)
    return 0


def cmd_tebd_bench(cfg: dict) -> int:
    from . import observables
    t0 = time.time()
    outdir = _outdir(cfg)
    params = model_params(cfg)
    if params.L > 12:
        raise CapacityError("tebd-bench compares against the dense engine; L <= 12")
    seed = derive_seed(cfg["base_seed"], 0)
    r = sample_realization(params, seed)
    eng = cfg["engine"]
    policy = TruncationPolicy(eng["chi_max"], eng["svd_cutoff"])
    method = EvolutionMethod("trotter", dt=eng["dt"])
    n = cfg["n_periods"]
    s_exact = observables.evolve_and_record(r, "zeros", ("magnetization",), n,
                                            engine="exact", method=method)
    s_mps = observables.evolve_and_record(r, "zeros", ("magnetization",), n,
                                          engine="mps", policy=policy,
                                          dt=eng["dt"])
    diff = np.abs(s_exact.magnetization - s_mps.magnetization)
    rows = [(per, float(diff[:, per].max())) for per in range(n + 1)]
    _write_csv(outdir / "bench.csv", ("period", "max_abs_difference"), rows)
    _write_manifest(outdir, cfg, [seed], t0,
                    {"max_difference": float(diff.max())})
    return 0


def cmd_plot(cfg: dict) -> int:
    import matplotlib
    matplotlib.use("Agg")
    import matplotlib.pyplot as plt
    t0 = time.time()
    outdir = _outdir(cfg)
    made = []
    agg = outdir / "aggregate.csv"
    if agg.exists():
        rows = list(csv.DictReader(agg.open()))
        mag = [(int(r["period"]), int(r["site"]), float(r["mean"]))
               for r in rows if r["channel"] == "magnetization"]
        if mag:
            n_per = max(r[0] for r in mag) + 1
            n_site = max(r[1] for r in mag)
            img = np.zeros((n_site, n_per))
            for per, site, v in mag:
                img[site - 1, per] = v
            fig, ax = plt.subplots(figsize=(6, 3))
            im = ax.imshow(img, aspect="auto", cmap="RdBu_r", vmin=-1, vmax=1)
            ax.set_xlabel("period"); ax.set_ylabel("site")
            fig.colorbar(im, label=r"$\langle\sigma^z\rangle$")
            fig.savefig(outdir / "magnetization.svg", bbox_inches="tight")
            plt.close(fig)
            made.append("magnetization.svg")
    spectra = outdir / "spectra.csv"
    if spectra.exists():
        rows = list(csv.DictReader(spectra.open()))
        fig, ax = plt.subplots(figsize=(5, 3))
        sites = sorted({int(r["site"]) for r in rows})
        for site in sites:
            pts = [(float(r["frequency"]), float(r["amplitude"]))
                   for r in rows if int(r["site"]) == site]
            pts.sort()
            ax.plot([p[0] for p in pts], [p[1] for p in pts],
                    label=f"site {site}" if site in (sites[0], sites[-1]) else None)
        ax.set_xlabel(r"$\omega/\omega_0$"); ax.set_ylabel("amplitude")
        ax.legend()
        fig.savefig(outdir / "spectra.svg", bbox_inches="tight")
        plt.close(fig)
        made.append("spectra.svg")
    grid = outdir / "grid.csv"
    if grid.exists():
        rows = list(csv.DictReader(grid.open()))
        deltas = sorted({float(r["delta"]) for r in rows})
        vs = sorted({float(r["v"]) for r in rows})
        img = np.zeros((len(vs), len(deltas)))
        for r in rows:
            img[vs.index(float(r["v"])), deltas.index(float(r["delta"]))] = \
                float(r["value"])
        fig, ax = plt.subplots(figsize=(5, 4))
        im = ax.imshow(img, origin="lower", aspect="auto",
                       extent=(deltas[0], deltas[-1], vs[0], vs[-1]))
        ax.set_xlabel(r"$\delta$"); ax.set_ylabel("V")
        fig.colorbar(im, label=rows[0]["statistic"])
        fig.savefig(outdir / "grid.svg", bbox_inches="tight")
        plt.close(fig)
        made.append("grid.svg")
    _write_manifest(outdir, cfg, [], t0, {"plots": made})
    return 0


COMMANDS = {
    "evolve": cmd_evolve,
    "spectrum": cmd_spectrum,
    "scan": cmd_scan,
    "lifetime": cmd_lifetime,
    "floquet-spectrum": cmd_floquet_spectrum,
    "prep-spt": cmd_prep_spt,
    "echo": cmd_echo,
    "compile": cmd_compile,
    "tebd-bench": cmd_tebd_bench,
    "plot": cmd_plot,
}


def run_job(cfg: dict, command: str = "evolve") -> int:
    """Programmatic entry point; cfg must already be validated."""
    return COMMANDS[command](cfg)


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(
        prog="sptchain",
        description="Driven SPT time-crystal chain: simulation and analysis")
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True)
    for name in COMMANDS:
        p = sub.add_parser(name)
        p.add_argument("--config", required=True, help="JSON job config")
        p.add_argument("--set", action="append", default=[], metavar="KEY=JSON",
                       help="override a config field (dotted path, JSON value)")
        p.add_argument("--output-dir", help="override output_dir")
    args = parser.parse_args(argv)
    try:
        overrides = list(args.set)
        if args.output_dir:
            overrides.append(f'output_dir="{args.output_dir}"')
        cfg = load_config(args.config, overrides)
        return COMMANDS[args.command](cfg)
    except SchemaError as e:
        print(f"schema error: {e}", file=sys.stderr)
        return 2
    except CapacityError as e:
        print(f"capacity error: {e}", file=sys.stderr)
        return 3
    except ConvergenceError as e:
        print(f"non-convergence: {e}", file=sys.stderr)
        return 4


if __name__ == "__main__":
    sys.exit(main())
