"""Engine-agnostic drivers and analyses.

Time series are recorded at integer period boundaries t_n = n T.  Analyses
(Fourier subharmonic peaks, lifetime extraction, string order, phase-diagram
scans) are pure functions over the recorded series.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from . import exact, mps as mpsmod
from .errors import CapacityError, ContractError, ParameterError
from .exact import EvolutionMethod, StateVector
from .model import (DisorderRealization, ModelParams, PauliString,
                    build_grouped_terms, sample_realization,
                    stabilizer_observable)

CHANNELS = ("magnetization", "stabilizer", "entropy", "autocorrelator")


@dataclass
class ObservableSeries:
    """Per-period records for one realization.

    Arrays are indexed [site (or stabilizer site), period] with period 0 the
    initial state; entropy is [period].  Channels not requested are None.
    """

    realization: DisorderRealization
    n_periods: int
    magnetization: np.ndarray | None = None
    stabilizer: np.ndarray | None = None
    entropy: np.ndarray | None = None
    autocorrelator: np.ndarray | None = None

    def times(self) -> np.ndarray:
        return np.arange(self.n_periods + 1) * self.realization.params.period


@dataclass(frozen=True)
class SpectrumResult:
    """Discrete Fourier amplitudes of a per-period signal.

    frequencies[m] = m/N in units of the drive frequency; the subharmonic
    peak is the bin at m = N/2.
    """

    frequencies: np.ndarray
    amplitudes: np.ndarray
    peak_height: float


@dataclass(frozen=True)
class PhaseDiagramGrid:
    delta_grid: np.ndarray
    v_grid: np.ndarray
    values: np.ndarray  # shape (len(delta_grid), len(v_grid))
    statistic: str
    realizations: int


def _initial_statevector(L: int, init) -> StateVector:
    from .circuit import run_circuit, spt_prep_circuit
    if isinstance(init, StateVector):
        return init
    if isinstance(init, (list, tuple, np.ndarray)):
        return StateVector.from_bits(list(init))
    if init == "zeros":
        return StateVector.from_bits([0] * L)
    if init == "ones":
        return StateVector.from_bits([1] * L)
    if isinstance(init, dict) and "spt" in init:
        base = StateVector.from_bits([0] * L)
        return run_circuit(base, spt_prep_circuit(L, init["spt"]))
    raise ContractError(f"unknown initial state spec {init!r}")


def evolve_and_record(r: DisorderRealization, init, channels, n_periods: int,
                      engine: str = "exact",
                      method: EvolutionMethod | None = None,
                      policy: "mpsmod.TruncationPolicy | None" = None,
                      dt: float = 0.05) -> ObservableSeries:
    """Drive the chain for n periods and record the requested channels.

    ``engine`` is "exact", "mps", or "circuit" (circuit only in the cluster
    limit, where the exact period circuit exists).  The autocorrelator channel
    uses the two-state method: evolve both |psi0> and sigma_j^z |psi0| and
    take the cross matrix element <psi(t)| sigma_j^z |phi(t)>.
    """
    for c in channels:
        if c not in CHANNELS:
            raise ContractError(f"unknown channel {c!r}")
    p = r.params
    L = p.L
    series = ObservableSeries(r, n_periods)
    stab_sites = list(range(1, L + 1)) if p.boundary == "open" else list(p.stabilizer_sites())
    if "magnetization" in channels:
        series.magnetization = np.empty((L, n_periods + 1))
    if "stabilizer" in channels:
        series.stabilizer = np.empty((len(stab_sites), n_periods + 1))
    if "entropy" in channels:
        series.entropy = np.empty(n_periods + 1)
    if "autocorrelator" in channels:
        series.autocorrelator = np.empty((L, n_periods + 1))

    if engine == "mps":
        _record_mps(series, r, init, channels, n_periods, stab_sites, policy, dt)
        return series
    if engine not in ("exact", "circuit"):
        raise ContractError(f"unknown engine {engine!r}")

    method = method or EvolutionMethod()
    state = _initial_statevector(L, init)
    terms = build_grouped_terms(r)
    if engine == "circuit":
        from .circuit import floquet_period_circuit, run_circuit
        period_circuit = floquet_period_circuit(r)
        step = lambda s: run_circuit(s, period_circuit)
    elif L <= 10:
        U = exact.dense_floquet_operator(r)
        step = lambda s: StateVector(L, U @ s.amplitudes)
    else:
        step = lambda s: exact.floquet_step(s, r, method, terms)

    echoes = None
    if "autocorrelator" in channels:
        echoes = [StateVector(L, exact.apply_pauli(state, PauliString(1.0, ((j, "Z"),))))
                  for j in range(1, L + 1)]

    def record(n, s, ech):
        if series.magnetization is not None:
            series.magnetization[:, n] = exact.magnetization_profile(s)
        if series.stabilizer is not None:
            for i, k in enumerate(stab_sites):
                series.stabilizer[i, n] = exact.pauli_expectation(
                    s, stabilizer_observable(k, p))
        if series.entropy is not None:
            series.entropy[n] = exact.entanglement_entropy(s, range(1, L // 2 + 1))
        if series.autocorrelator is not None:
            for j in range(L):
                zs = exact.apply_pauli(s, PauliString(1.0, ((j + 1, "Z"),)))
                series.autocorrelator[j, n] = float(
                    np.real(np.vdot(zs, ech[j].amplitudes)))

    record(0, state, echoes)
    for n in range(1, n_periods + 1):
        state = step(state)
        if echoes is not None:
            echoes = [step(e) for e in echoes]
        record(n, state, echoes)
    return series


def _record_mps(series, r, init, channels, n_periods, stab_sites, policy, dt):
    p = r.params
    L = p.L
    policy = policy or mpsmod.TruncationPolicy()
    if isinstance(init, str):
        bits = [0] * L if init == "zeros" else [1] * L
    else:
        bits = list(init)
    state = mpsmod.product_state_mps(bits, policy)
    terms = build_grouped_terms(r)
    if "autocorrelator" in channels:
        raise ContractError("autocorrelator channel needs the exact engine")

    def record(n, s):
        if series.magnetization is not None:
            series.magnetization[:, n] = mpsmod.magnetization_profile_mps(s)
        if series.stabilizer is not None:
            for i, k in enumerate(stab_sites):
                series.stabilizer[i, n] = mpsmod.mps_expectation(
                    s, stabilizer_observable(k, p))
        if series.entropy is not None:
            series.entropy[n] = mpsmod.half_chain_entropy(s)

    record(0, state)
    for n in range(1, n_periods + 1):
        mpsmod.tebd_floquet_period(state, r, dt, terms)
        record(n, state)


def fourier_spectrum(signal) -> SpectrumResult:
    """amplitude(m) = |(1/N) sum_n s_n exp(-i 2 pi m n / N)|, m = 0..N-1.

    The subharmonic peak is the bin at m = N/2, so N must be even (and >= 4).
    """
    s = np.asarray(signal, dtype=float)
    N = len(s)
    if N < 4 or N % 2:
        raise ContractError(f"need an even sample count >= 4, got {N}")
    amps = np.abs(np.fft.fft(s)) / N
    freqs = np.arange(N) / N
    return SpectrumResult(freqs, amps, float(amps[N // 2]))


def ensemble_stats(values) -> tuple[float, float]:
    """Mean and unbiased sample standard deviation over realizations."""
    v = np.asarray(values, dtype=float)
    if v.size < 2:
        raise ContractError("need at least 2 realizations for a std")
    return float(np.mean(v)), float(np.std(v, ddof=1))


def tau_star(envelope) -> float | None:
    """First 1/2 crossing of the (-1)^n-stripped edge envelope, in time units.

    Linear interpolation between the bracketing periods; None if the envelope
    never drops to 1/2.  envelope[n] corresponds to period n (n = 0 first).
    """
    e = np.asarray(envelope, dtype=float)
    if e[0] <= 0.5:
        return 0.0
    for n in range(1, len(e)):
        if e[n] <= 0.5:
            frac = (e[n - 1] - 0.5) / (e[n - 1] - e[n])
            return float((n - 1 + frac) * 2.0)
    return None


def string_order(state: StateVector, l: int, j: int) -> float:
    """O_st(l, j) = <Z_l Y_{l+1} (prod_{k=l+2}^{j-2} X_k) Y_{j-1} Z_j>."""
    if j - l < 3:
        raise ContractError(f"need j - l >= 3, got l={l}, j={j}")
    if l < 1 or j > state.L:
        raise ContractError(f"range ({l}, {j}) outside 1..{state.L}")
    factors = [(l, "Z"), (l + 1, "Y")]
    factors += [(k, "X") for k in range(l + 2, j - 1)]
    factors += [(j - 1, "Y"), (j, "Z")]
    return exact.pauli_expectation(state, PauliString(1.0, tuple(factors)))


def default_pair_policy(L: int):
    """All (l, j) with l >= 2, j <= L-1, j-l >= 4 (bulk-supported strings).

    For chains too short to admit any such pair (L < 8) the separation
    relaxes to j - l >= 3, the minimum the string operator supports.
    """
    pairs = [(l, j) for l in range(2, L) for j in range(l + 4, L)]
    if not pairs:
        pairs = [(l, j) for l in range(2, L) for j in range(l + 3, L)]
    return pairs


def o_sg(params: ModelParams, n_realizations: int, base_seed: int = 0,
         pairs=None) -> float:
    """Mean of O_st^2 over Floquet eigenstates, (l, j) pairs, realizations."""
    if params.L > 8:
        raise CapacityError("o_sg needs dense eigenstates; L <= 8")
    pairs = pairs if pairs is not None else default_pair_policy(params.L)
    if not pairs:
        raise ContractError("empty (l, j) pair set")
    from .cli import derive_seed
    total, count = 0.0, 0
    for i in range(n_realizations):
        r = sample_realization(params, derive_seed(base_seed, i))
        report = exact.floquet_spectrum(r)
        for col in range(report.eigenvectors.shape[1]):
            state = StateVector(params.L, report.eigenvectors[:, col])
            for (l, j) in pairs:
                total += string_order(state, l, j) ** 2
                count += 1
    return total / count


def edge_peak_height(params: ModelParams, n_realizations: int, n_periods: int,
                     base_seed: int = 0, site: int = 1,
                     return_all_sites: bool = False):
    """Subharmonic peak of the disorder-averaged <sigma_site^z(nT)> series.

    Evolution starts from |0...0>; the n = 1..N samples feed the transform
    (period 0 is the initial condition, excluded so N stays even and the
    signal is purely dynamical).
    """
    from .cli import derive_seed
    acc = np.zeros((params.L, n_periods + 1))
    for i in range(n_realizations):
        r = sample_realization(params, derive_seed(base_seed, i))
        s = evolve_and_record(r, "zeros", ("magnetization",), n_periods)
        acc += s.magnetization
    acc /= n_realizations
    if return_all_sites:
        return np.array([fourier_spectrum(acc[j, 1:]).peak_height
                         for j in range(params.L)])
    return fourier_spectrum(acc[site - 1, 1:]).peak_height


def peak_height_std(params: ModelParams, n_realizations: int, n_periods: int,
                    base_seed: int = 0, site: int = 1) -> tuple[float, float]:
    """Mean and std over realizations of the per-realization edge peak."""
    from .cli import derive_seed
    peaks = []
    for i in range(n_realizations):
        r = sample_realization(params, derive_seed(base_seed, i))
        s = evolve_and_record(r, "zeros", ("magnetization",), n_periods)
        peaks.append(fourier_spectrum(s.magnetization[site - 1, 1:]).peak_height)
    return ensemble_stats(peaks)


def phase_diagram_scan(delta_grid, v_grid, params: ModelParams,
                       n_realizations: int, statistic: str,
                       n_periods: int = 20, base_seed: int = 0) -> PhaseDiagramGrid:
    """Per-cell ensemble statistic over a (delta, V) grid.

    statistic: "mean_peak" (edge peak of the disorder-averaged series),
    "peak_std" (std of per-realization peaks), or "o_sg".
    """
    if statistic not in ("mean_peak", "peak_std", "o_sg"):
        raise ContractError(f"unknown statistic {statistic!r}")
    delta_grid = np.asarray(delta_grid, dtype=float)
    v_grid = np.asarray(v_grid, dtype=float)
    values = np.empty((len(delta_grid), len(v_grid)))
    from dataclasses import replace
    for a, d in enumerate(delta_grid):
        for b, v in enumerate(v_grid):
            cell = replace(params, delta=float(d), V=float(v), dV=params.dV)
            cell_seed = base_seed + 1_000_003 * (a * len(v_grid) + b)
            if statistic == "o_sg":
                values[a, b] = o_sg(cell, n_realizations, cell_seed)
            elif statistic == "mean_peak":
                values[a, b] = edge_peak_height(cell, n_realizations,
                                                n_periods, cell_seed)
            else:
                values[a, b] = peak_height_std(cell, n_realizations,
                                               n_periods, cell_seed)[1]
    return PhaseDiagramGrid(delta_grid, v_grid, values, statistic, n_realizations)
