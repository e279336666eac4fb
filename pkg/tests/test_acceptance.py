"""Acceptance gate: one test per criterion, one PASS/FAIL line each.

Each criterion is asserted exactly as registered, at the stated tolerances.
Two sub-assertions are known to fail for physics reasons and are reported
honestly rather than weakened:

* Criterion 1 (bulk decay): in the noiseless integrable limit the bulk
  magnetization per realization is exactly +-cos(2 n J_j) — an undamped
  oscillation — so the 20-realization disorder average has an irreducible
  sampling floor ~0.16 per (site, period) and cannot satisfy < 0.15.
* Criterion 6 (glass order): O_sg at the stated corner measures 0.66, not
  > 0.9; near-degeneracies of the random quasienergy spectrum mix eigenstates
  across string-order sectors at finite drive error. The ideal-limit value is
  1 exactly and is asserted.

All measurement choices left open by the registration (observation windows,
sample grids, ensemble seeds, fixture thresholds) are frozen here as module
constants; the calibration record lives in the project notes.
"""

import time
from dataclasses import replace

import numpy as np
import pytest
import scipy.linalg

from sptchain import exact
from sptchain.circuit import (NoiseModel, circuit_unitary, cluster_u2_circuit,
                              echo_circuit, floquet_period_circuit,
                              fused_depth, run_circuit, spt_prep_circuit)
from sptchain.cli import derive_seed
from sptchain.compiler import (ansatz_from_path, fidelity_loss, loss_gradient,
                               optimize, sandwich_ansatz)
from sptchain.exact import (EvolutionMethod, StateVector, dense_hamiltonian,
                            entanglement_spectrum, floquet_spectrum,
                            mutual_information)
from sptchain.model import (ModelParams, PauliString, build_grouped_terms,
                            sample_realization)
from sptchain.mps import (TruncationPolicy, half_chain_entropy,
                          mps_expectation, product_state_mps,
                          tebd_floquet_period)
from sptchain.observables import (evolve_and_record, fourier_spectrum, o_sg,
                                  peak_height_std, phase_diagram_scan)

pytestmark = pytest.mark.acceptance

BASE_SEED = 0              # ensemble seed frozen for the whole gate
N_PERIODS_C3 = 100         # criterion 3 observation window (calibrated)
C4_GRID = [0.0, 0.02, 0.05, 0.1, 0.15, 0.2, 0.3, 0.4]   # criterion 4 axes
THERMAL_PEAK_THRESHOLD = 0.25   # criterion 2 fixture noise threshold
LN2 = float(np.log(2))


def _report(capsys, line):
    with capsys.disabled():
        print(line, flush=True)


def _mean_magnetization(params, n_realizations, n_periods, base_seed=BASE_SEED):
    acc = np.zeros((params.L, n_periods + 1))
    for i in range(n_realizations):
        r = sample_realization(params, derive_seed(base_seed, i))
        s = evolve_and_record(r, "zeros", ("magnetization",), n_periods)
        acc += s.magnetization
    return acc / n_realizations


@pytest.fixture(scope="module")
def fig2_regime():
    """Disorder-averaged magnetization: L=14 ideal limit, delta=0.01,
    20 realizations, 20 periods, exact engine."""
    p = ModelParams(L=14, J=1.0, dJ=1.0, delta=0.01)
    return _mean_magnetization(p, 20, 20)


@pytest.fixture(scope="module")
def compiled_l6():
    """Compiled dt=0.1 interacting step at L=6 (shared by criteria 10/11)."""
    p = ModelParams(L=6, J=1.0, dJ=1.0, V=0.05, dV=0.05, h=0.05, dh=0.05,
                    delta=0.05)
    r = sample_realization(p, derive_seed(BASE_SEED, 0))
    H2 = dense_hamiltonian(6, build_grouped_terms(r))
    target = scipy.linalg.expm(-1j * 0.1 * H2)
    pc = ansatz_from_path(sandwich_ansatz(6), 6)
    rng = np.random.default_rng(BASE_SEED)
    pc = pc.with_parameters(rng.uniform(-0.1, 0.1, len(pc.parameters)))
    res = optimize(pc, target, alpha=0.02, threshold=1e-3, max_iterations=6000)
    return pc, target, res


def test_criterion_01_boundary_only_symmetry_breaking(fig2_regime, capsys):
    mag = fig2_regime
    edge_ok = all((-1) ** n * mag[0, n] > 0.9 for n in range(1, 21))
    bulk_max = float(np.abs(mag[1:13, 5:]).max())
    bulk_ok = bulk_max < 0.15
    verdict = "PASS" if (edge_ok and bulk_ok) else "FAIL"
    _report(capsys, f"CRITERION 1 [{verdict}] edge alternation |val|>0.9: "
                    f"{edge_ok}; bulk max disorder-averaged |<sz>| for n>=5: "
                    f"{bulk_max:.3f} (< 0.15: {bulk_ok})")
    assert edge_ok
    assert bulk_ok, (
        f"bulk magnetization floor {bulk_max:.3f} >= 0.15: the noiseless "
        "integrable bulk oscillates as cos(2 n J_j) without decay; a "
        "20-realization average cannot drop below its ~0.16 sampling floor")


def test_criterion_02_frequency_domain(fig2_regime, capsys):
    peaks = [fourier_spectrum(fig2_regime[j, 1:]).peak_height
             for j in range(14)]
    ratio = peaks[0] / max(peaks[1:13])
    thermal = _mean_magnetization(
        ModelParams(L=14, J=1.0, dJ=1.0, delta=0.8), 20, 20)
    thermal_max = max(fourier_spectrum(thermal[j, 1:]).peak_height
                      for j in range(14))
    ok = ratio >= 5.0 and thermal_max < THERMAL_PEAK_THRESHOLD
    _report(capsys, f"CRITERION 2 [{'PASS' if ok else 'FAIL'}] edge/bulk peak "
                    f"ratio {ratio:.1f} (>= 5); delta=0.8 max peak "
                    f"{thermal_max:.3f} (< {THERMAL_PEAK_THRESHOLD})")
    assert ratio >= 5.0
    assert thermal_max < THERMAL_PEAK_THRESHOLD


def test_criterion_03_transition_location(capsys):
    t0 = time.time()
    p = ModelParams(L=14, J=1.0, dJ=1.0)
    deltas = np.round(np.arange(0.0, 0.501, 0.05), 2)
    stds = [peak_height_std(replace(p, delta=float(d)), 20, N_PERIODS_C3,
                            base_seed=BASE_SEED)[1]
            for d in deltas]
    argmax = float(deltas[int(np.argmax(stds))])
    ok = 0.1 <= argmax <= 0.3
    _report(capsys, f"CRITERION 3 [{'PASS' if ok else 'FAIL'}] peak-std "
                    f"argmax delta={argmax:.2f} in [0.1, 0.3] "
                    f"({time.time() - t0:.0f}s)")
    assert ok


def test_criterion_04_phase_diagram_shape(capsys):
    t0 = time.time()
    base = ModelParams(L=8, J=1.0, dJ=1.0, h=0.05, dh=0.05, dV=0.05)
    n_real = 50
    grid = phase_diagram_scan(C4_GRID, C4_GRID, base, n_real, "mean_peak",
                              n_periods=20, base_seed=BASE_SEED)

    def cell_se(a, b):
        # standard error of the cell from the per-realization peak spread,
        # at the same derived cell seed the scan uses
        cell = replace(base, delta=C4_GRID[a], V=C4_GRID[b])
        seed = BASE_SEED + 1_000_003 * (a * len(C4_GRID) + b)
        return peak_height_std(cell, n_real, 20, base_seed=seed)[1] \
            / np.sqrt(n_real)

    def non_increasing(vals, ses):
        return all(vals[i + 1] <= vals[i] + 3 * np.hypot(ses[i], ses[i + 1])
                   for i in range(len(vals) - 1))

    along_delta = grid.values[:, 0]
    along_v = grid.values[1, :]          # delta = 0.02 row
    se_delta = [cell_se(a, 0) for a in range(len(C4_GRID))]
    se_v = [cell_se(1, b) for b in range(len(C4_GRID))]
    ok_delta = non_increasing(along_delta, se_delta)
    ok_v = non_increasing(along_v, se_v)
    ok = ok_delta and ok_v
    _report(capsys, f"CRITERION 4 [{'PASS' if ok else 'FAIL'}] mean peak "
                    f"non-increasing (3 SE) along delta@V=0: {ok_delta} "
                    f"{np.round(along_delta, 3).tolist()}; along "
                    f"V@delta=0.02: {ok_v} {np.round(along_v, 3).tolist()} "
                    f"({time.time() - t0:.0f}s)")
    assert ok_delta
    assert ok_v


def test_criterion_05_quasienergy_structure(capsys):
    p = ModelParams(L=6, J=1.0, dJ=1.0)
    r = sample_realization(p, derive_seed(BASE_SEED, 0))
    report = floquet_spectrum(r)
    defect = report.pairing_defect
    eps = np.sort(report.quasienergies)
    twofold = all(abs(eps[2 * i] - eps[2 * i + 1]) < 1e-8
                  for i in range(len(eps) // 2))
    ok = defect < 1e-8 and twofold
    _report(capsys, f"CRITERION 5 [{'PASS' if ok else 'FAIL'}] pi-pairing "
                    f"defect {defect:.2e} (< 1e-8); two-fold degeneracy of "
                    f"all quasienergies: {twofold}")
    assert defect < 1e-8
    assert twofold


def test_criterion_06_topological_diagnostics(capsys):
    t0 = time.time()
    # entanglement spectrum of the open-chain cluster state
    L = 8
    obc = run_circuit(StateVector.from_bits([0] * L), spt_prep_circuit(L))
    spec_obc = entanglement_spectrum(obc, L // 2)
    obc_ok = (len(spec_obc) == 2
              and bool(np.allclose(spec_obc, LN2, atol=1e-8)))
    # periodic-chain cluster state: |+>^L with CZ on all L wrapped bonds
    dim = 2**L
    amps = np.full(dim, dim**-0.5, dtype=complex)
    bits = [(np.arange(dim) >> k) & 1 for k in range(L)]
    for k in range(L):
        amps = amps * (-1.0) ** (bits[k] * bits[(k + 1) % L])
    spec_pbc = entanglement_spectrum(StateVector(L, amps), L // 2)
    pbc_ok = (len(spec_pbc) == 4
              and bool(np.allclose(spec_pbc, 2 * LN2, atol=1e-8)))
    # boundary mutual information of every ideal Floquet eigenstate at L=6
    r6 = sample_realization(ModelParams(L=6, J=1.0, dJ=1.0),
                            derive_seed(BASE_SEED, 0))
    rep = floquet_spectrum(r6)
    mis = [mutual_information(StateVector(6, rep.eigenvectors[:, c]),
                              (1, 2), (5, 6))
           for c in range(rep.eigenvectors.shape[1])]
    mi_ok = bool(np.allclose(mis, 2 * LN2, atol=1e-6))
    # glass order: exactly 1 in the ideal limit; > 0.9 at the stated corner
    ideal_osg = o_sg(ModelParams(L=8, J=1.0, dJ=1.0), 5, base_seed=BASE_SEED)
    ideal_ok = abs(ideal_osg - 1.0) < 1e-12
    corner = ModelParams(L=8, J=1.0, dJ=1.0, V=0.05, h=0.01, dh=0.01,
                         delta=0.05)
    corner_osg = o_sg(corner, 100, base_seed=BASE_SEED)
    corner_ok = corner_osg > 0.9
    ok = obc_ok and pbc_ok and mi_ok and ideal_ok and corner_ok
    _report(capsys, f"CRITERION 6 [{'PASS' if ok else 'FAIL'}] ES obc "
                    f"{{ln2 x2}}: {obc_ok}; ES pbc {{2ln2 x4}}: {pbc_ok}; "
                    f"boundary MI = 2ln2: {mi_ok}; O_sg ideal = "
                    f"{ideal_osg:.12f} (= 1: {ideal_ok}); O_sg corner = "
                    f"{corner_osg:.3f} (> 0.9: {corner_ok}) "
                    f"({time.time() - t0:.0f}s)")
    assert obc_ok
    assert pbc_ok
    assert mi_ok
    assert ideal_ok
    assert corner_ok, (
        f"O_sg at the stated corner is {corner_osg:.3f}, not > 0.9: "
        "quasienergy near-degeneracies of the disordered spectrum mix "
        "eigenstates across string-order sectors at finite drive error "
        "(cross-validated against an independent eigensolver and a "
        "degenerate-block-resolved estimator; see project notes)")


def test_criterion_07_stabilizer_dynamics(capsys):
    p = ModelParams(L=8, J=1.0, dJ=1.0, V=0.05, dV=0.05, h=0.05, dh=0.05,
                    delta=0.05)
    acc = np.zeros((8, 11))
    for i in range(10):
        r = sample_realization(p, derive_seed(BASE_SEED, i))
        s = evolve_and_record(r, {"spt": (4,)}, ("stabilizer",), 10)
        acc += s.stabilizer
    acc /= 10
    boundary_ok = all(np.sign(acc[j, n]) == (-1) ** n
                      for j in (0, 7) for n in range(11))
    bulk_ok = all(np.sign(acc[k, n]) == np.sign(acc[k, 0])
                  for k in range(1, 7) for n in range(11))
    ok = boundary_ok and bulk_ok
    _report(capsys, f"CRITERION 7 [{'PASS' if ok else 'FAIL'}] boundary "
                    f"stabilizers 2T-periodic: {boundary_ok}; bulk "
                    f"stabilizers T-periodic: {bulk_ok}")
    assert boundary_ok
    assert bulk_ok


def test_criterion_08_tebd_validity(capsys):
    t0 = time.time()
    # (a) truncation-only agreement at L=8 over 10 periods: both engines
    # share one Trotterization (same dt), so the difference is truncation
    p8 = ModelParams(L=8, J=1.0, dJ=1.0, V=0.05, dV=0.05, h=0.05, dh=0.05,
                     delta=0.05)
    r8 = sample_realization(p8, derive_seed(BASE_SEED, 0))
    terms8 = build_grouped_terms(r8)
    sv = StateVector.from_bits([0] * 8)
    trotter_mag = np.empty((8, 11))
    trotter_mag[:, 0] = exact.magnetization_profile(sv)
    for n in range(1, 11):
        sv = exact.floquet_step(sv, r8, EvolutionMethod("trotter", dt=0.1),
                                terms8)
        trotter_mag[:, n] = exact.magnetization_profile(sv)
    mps_s = evolve_and_record(r8, "zeros", ("magnetization",), 10,
                              engine="mps",
                              policy=TruncationPolicy(256, 1e-14), dt=0.1)
    agreement = float(np.abs(trotter_mag - mps_s.magnetization).max())
    a_ok = agreement < 1e-6
    # (b, c) L=40 ensemble at the frozen production settings; the engine is
    # driven directly so only the edge spin and the half-chain entropy are
    # measured each period (the full profile would triple the runtime)
    p40 = ModelParams(L=40, J=1.0, dJ=1.0, V=0.05, dV=0.05, h=0.05, dh=0.05,
                      delta=0.05)
    n_real, n_per = 50, 50
    z1 = PauliString(1.0, ((1, "Z"),))
    edge = np.zeros(n_per + 1)
    ent = np.zeros(n_per + 1)
    for i in range(n_real):
        r = sample_realization(p40, derive_seed(BASE_SEED, i))
        terms = build_grouped_terms(r)
        mps = product_state_mps([0] * 40, TruncationPolicy(32, 1e-6))
        edge[0] += mps_expectation(mps, z1)
        ent[0] += half_chain_entropy(mps)
        for nn in range(1, n_per + 1):
            tebd_floquet_period(mps, r, 0.5, terms)
            edge[nn] += mps_expectation(mps, z1)
            ent[nn] += half_chain_entropy(mps)
    edge /= n_real
    ent /= n_real
    env = np.array([(-1) ** n * edge[n] for n in range(n_per + 1)])
    b_ok = bool(np.all(env[1:] > 0))
    n = np.arange(5, n_per + 1)
    y = ent[5:]
    log_fit = np.polyfit(np.log(n), y, 1)
    lin_fit = np.polyfit(n, y, 1)
    log_res = float(np.sum((y - np.polyval(log_fit, np.log(n))) ** 2))
    lin_res = float(np.sum((y - np.polyval(lin_fit, n)) ** 2))
    c_ok = log_fit[0] > 0 and log_res < lin_res
    ok = a_ok and b_ok and c_ok
    _report(capsys, f"CRITERION 8 [{'PASS' if ok else 'FAIL'}] L=8 max "
                    f"disagreement {agreement:.1e} (< 1e-6); L=40 edge "
                    f"envelope > 0 through 50 periods (min "
                    f"{env[1:].min():.3f}): {b_ok}; entropy log fit "
                    f"b={log_fit[0]:.4f} > 0, residuals log<lin: "
                    f"{log_res < lin_res} ({time.time() - t0:.0f}s)")
    assert a_ok
    assert b_ok
    assert c_ok


def _tau_star_spectral(L, n_real, samples):
    """tau* via per-realization diagonalization of U_F.

    Exact closed-form evaluation of the disorder-averaged edge series at
    sparse sample periods; the first <= 1/2 crossing of the stripped envelope
    is interpolated linearly and returned in time units (period T = 2).
    """
    z = np.real(np.diag(exact.dense_operator(L, PauliString(1.0, ((1, "Z"),)))))
    psi0 = np.zeros(2**L)
    psi0[0] = 1.0
    acc = np.zeros(len(samples))
    for i in range(n_real):
        p = ModelParams(L=L, J=1.0, dJ=1.0, V=0.05, dV=0.05, h=0.05, dh=0.05,
                        delta=0.1)
        r = sample_realization(p, derive_seed(BASE_SEED, i))
        U = exact.dense_floquet_operator(r)
        T, V = scipy.linalg.schur(U, output="complex")
        theta = np.angle(np.diag(T))
        c = V.conj().T @ psi0
        Zt = V.conj().T @ (z[:, None] * V)
        for k, nn in enumerate(samples):
            v = c * np.exp(-1j * theta * nn)
            acc[k] += np.real(np.vdot(v, Zt @ v))
    env = np.array([(-1.0) ** int(nn) for nn in samples]) * acc / n_real
    below = np.where(env <= 0.5)[0]
    if len(below) == 0:
        return None
    k = below[0]
    if k == 0:
        return 0.0
    frac = (env[k - 1] - 0.5) / (env[k - 1] - env[k])
    return float((samples[k - 1] + frac * (samples[k] - samples[k - 1])) * 2.0)


def test_criterion_09_lifetime_scaling(capsys):
    t0 = time.time()
    taus = {
        6: _tau_star_spectral(6, 200, np.arange(0, 2001, 5)),
        8: _tau_star_spectral(8, 200, np.arange(0, 5001, 25)),
        10: _tau_star_spectral(10, 200, np.arange(0, 20001, 100)),
    }
    increasing = (None not in taus.values()
                  and taus[6] < taus[8] < taus[10])
    if increasing:
        r86 = taus[8] / taus[6]
        r108 = taus[10] / taus[8]
        consistent = max(r86, r108) / min(r86, r108) <= 2.0
    else:
        r86 = r108 = float("nan")
        consistent = False
    ok = increasing and consistent
    _report(capsys, f"CRITERION 9 [{'PASS' if ok else 'FAIL'}] tau* = "
                    f"{taus[6]}, {taus[8]}, {taus[10]} for L = 6, 8, 10; "
                    f"ratios {r86:.2f} / {r108:.2f} within factor 2: "
                    f"{consistent} ({time.time() - t0:.0f}s)")
    assert increasing
    assert consistent


def test_criterion_10_compiler(compiled_l6, capsys):
    t0 = time.time()
    pc, target, res = compiled_l6
    loss_ok = res.converged and res.loss <= 1e-3
    # analytic gradient vs central finite differences at the starting point
    grad = loss_gradient(pc, target)
    eps = 1e-6
    fd = np.empty_like(grad)
    for i in range(len(pc.parameters)):
        th = np.array(pc.parameters, dtype=float)
        th[i] += eps
        up = fidelity_loss(pc.with_parameters(th), target)
        th[i] -= 2 * eps
        dn = fidelity_loss(pc.with_parameters(th), target)
        fd[i] = (up - dn) / (2 * eps)
    grad_rel = float(np.linalg.norm(grad - fd) / np.linalg.norm(fd))
    grad_ok = grad_rel < 1e-4
    # cluster-limit circuit vs the dense interacting-interval exponential
    p8 = ModelParams(L=8, J=1.0, dJ=1.0, delta=0.03)
    r8 = sample_realization(p8, derive_seed(BASE_SEED, 1))
    H2 = dense_hamiltonian(8, build_grouped_terms(r8))
    U2 = scipy.linalg.expm(-1j * (p8.period - p8.t1) * H2)
    u_circ = circuit_unitary(cluster_u2_circuit(r8))
    fid = float(abs(np.trace(U2.conj().T @ u_circ)) / 2**8)
    fid_ok = fid >= 1 - 1e-10
    depth = fused_depth(floquet_period_circuit(r8))
    depth_ok = depth == 6
    ok = loss_ok and grad_ok and fid_ok and depth_ok
    _report(capsys, f"CRITERION 10 [{'PASS' if ok else 'FAIL'}] compile loss "
                    f"{res.loss:.2e} <= 1e-3 in {res.iterations} iterations; "
                    f"gradient rel err {grad_rel:.1e} (< 1e-4); cluster "
                    f"circuit fidelity deficit {1 - fid:.1e} (< 1e-10); "
                    f"fused depth {depth} (= 6) ({time.time() - t0:.0f}s)")
    assert loss_ok
    assert grad_ok
    assert fid_ok
    assert depth_ok


def test_criterion_11_echo(compiled_l6, capsys):
    t0 = time.time()
    p = ModelParams(L=6, J=1.0, dJ=1.0, delta=0.05)
    r = sample_realization(p, derive_seed(BASE_SEED, 0))
    period = floquet_period_circuit(r)
    init = StateVector.from_bits([0] * 6)
    pc, _, res = compiled_l6
    compiled = pc.with_parameters(res.parameters).bind()
    worst = 0.0
    for circ in (period, compiled):
        for n in (1, 5, 10):
            out = run_circuit(init, echo_circuit(circ, n))
            overlap = abs(np.vdot(init.amplitudes, out.amplitudes)) ** 2
            worst = max(worst, abs(1.0 - overlap))
    noiseless_ok = worst < 1e-8
    # 1% two-qubit depolarizing noise, 200 trajectories per depth
    means = []
    for n in (1, 2, 3, 4):
        total = 0.0
        for t in range(200):
            out = run_circuit(init, echo_circuit(period, n),
                              NoiseModel(0.0, 0.01, seed=n * 1000 + t))
            total += abs(np.vdot(init.amplitudes, out.amplitudes)) ** 2
        means.append(total / 200)
    monotone = all(means[i + 1] < means[i] for i in range(3))
    ok = noiseless_ok and monotone
    _report(capsys, f"CRITERION 11 [{'PASS' if ok else 'FAIL'}] noiseless "
                    f"echo deviation {worst:.1e} (< 1e-8); noisy survival "
                    f"{np.round(means, 4).tolist()} strictly decreasing: "
                    f"{monotone} ({time.time() - t0:.0f}s)")
    assert noiseless_ok
    assert monotone
