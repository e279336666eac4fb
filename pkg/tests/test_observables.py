import numpy as np
import pytest

from sptchain.circuit import run_circuit, spt_prep_circuit
from sptchain.errors import CapacityError, ContractError
from sptchain.exact import EvolutionMethod, StateVector
from sptchain.model import ModelParams, sample_realization
from sptchain.mps import TruncationPolicy
from sptchain.observables import (default_pair_policy, edge_peak_height,
                                  ensemble_stats, evolve_and_record,
                                  fourier_spectrum, o_sg, peak_height_std,
                                  phase_diagram_scan, string_order, tau_star)


def _ideal(L=8, delta=0.0, seed=5):
    return sample_realization(ModelParams(L=L, J=1.0, dJ=1.0, delta=delta), seed)


def test_evolve_and_record_shapes_and_alternation():
    r = _ideal()
    s = evolve_and_record(r, "zeros", ("magnetization", "stabilizer", "entropy"), 6)
    assert s.magnetization.shape == (8, 7)
    assert s.stabilizer.shape == (8, 7)
    assert s.entropy.shape == (7,)
    assert np.allclose(s.times(), np.arange(7) * 2.0)
    # ideal edge magnetization alternates exactly
    assert np.allclose(s.magnetization[0], [(-1) ** n for n in range(7)])
    assert np.allclose(s.magnetization[7], [(-1) ** n for n in range(7)])


def test_engines_agree_ideal_limit():
    r = _ideal(delta=0.06, seed=9)
    exact_s = evolve_and_record(r, "zeros", ("magnetization",), 5)
    circ_s = evolve_and_record(r, "zeros", ("magnetization",), 5, engine="circuit")
    mps_s = evolve_and_record(r, "zeros", ("magnetization",), 5, engine="mps",
                              policy=TruncationPolicy(64, 1e-12), dt=0.5)
    assert np.abs(exact_s.magnetization - circ_s.magnetization).max() < 1e-9
    assert np.abs(exact_s.magnetization - mps_s.magnetization).max() < 1e-8


def test_autocorrelator_two_state_method():
    r = _ideal(delta=0.03, seed=4)
    s = evolve_and_record(r, "zeros", ("autocorrelator",), 4)
    # t = 0: <psi|Z_j Z_j|psi> = 1 for every site
    assert np.allclose(s.autocorrelator[:, 0], 1.0)
    # edge autocorrelator alternates near +-1 at small delta
    signs = np.array([(-1) ** n for n in range(5)])
    assert np.all(s.autocorrelator[0] * signs > 0.9)
    with pytest.raises(ContractError):
        evolve_and_record(r, "zeros", ("autocorrelator",), 4, engine="mps")


def test_unknown_channel_and_engine():
    r = _ideal()
    with pytest.raises(ContractError):
        evolve_and_record(r, "zeros", ("magnetisation",), 4)
    with pytest.raises(ContractError):
        evolve_and_record(r, "zeros", ("magnetization",), 4, engine="qmc")


def test_fourier_spectrum_pure_subharmonic():
    n = np.arange(20)
    spec = fourier_spectrum((-1.0) ** n)
    assert spec.peak_height == pytest.approx(1.0)
    assert spec.frequencies[10] == pytest.approx(0.5)
    # all other bins are empty for the pure alternating signal
    others = np.delete(spec.amplitudes, 10)
    assert np.abs(others).max() < 1e-12
    with pytest.raises(ContractError):
        fourier_spectrum([1.0, -1.0, 1.0])  # odd length
    with pytest.raises(ContractError):
        fourier_spectrum([1.0, -1.0])  # too short


def test_ensemble_stats():
    m, s = ensemble_stats([1.0, 2.0, 3.0])
    assert m == pytest.approx(2.0)
    assert s == pytest.approx(1.0)
    with pytest.raises(ContractError):
        ensemble_stats([1.0])


def test_tau_star_cases():
    assert tau_star([1.0, 0.9, 0.5, 0.1]) == pytest.approx(4.0)
    # interpolation: crossing halfway between periods 1 and 2
    assert tau_star([1.0, 0.7, 0.3]) == pytest.approx(3.0)
    assert tau_star([0.4, 0.3]) == 0.0
    assert tau_star([1.0, 0.9, 0.8]) is None


def test_string_order_on_spt_state():
    L = 8
    state = run_circuit(StateVector.from_bits([0] * L), spt_prep_circuit(L, ()))
    # cluster state: string order unity in magnitude for every valid pair
    for (l, j) in default_pair_policy(L):
        assert abs(string_order(state, l, j)) == pytest.approx(1.0, abs=1e-10)
    with pytest.raises(ContractError):
        string_order(state, 3, 5)  # j - l < 3
    with pytest.raises(ContractError):
        string_order(state, 0, 6)


def test_default_pair_policy():
    assert default_pair_policy(8) == [(2, 6), (2, 7), (3, 7)]
    assert all(j - l >= 3 for l, j in default_pair_policy(6))
    assert default_pair_policy(6)  # non-empty even for short chains


def test_o_sg_ideal_limit_is_unity():
    p = ModelParams(L=6, J=1.0, dJ=1.0, delta=0.0)
    assert o_sg(p, 3, base_seed=2) == pytest.approx(1.0, abs=1e-8)
    with pytest.raises(CapacityError):
        o_sg(ModelParams(L=10, J=1.0, dJ=1.0), 1)


def test_o_sg_decays_with_delta():
    p0 = ModelParams(L=6, J=1.0, dJ=1.0, delta=0.0)
    p1 = ModelParams(L=6, J=1.0, dJ=1.0, delta=0.3)
    assert o_sg(p1, 5, base_seed=1) < o_sg(p0, 5, base_seed=1) - 0.05


def test_edge_peak_height_ideal():
    p = ModelParams(L=6, J=1.0, dJ=1.0, delta=0.0)
    peak = edge_peak_height(p, 2, 20, base_seed=3)
    assert peak == pytest.approx(1.0, abs=1e-9)
    all_sites = edge_peak_height(p, 2, 20, base_seed=3, return_all_sites=True)
    assert all_sites.shape == (6,)
    assert all_sites[0] == pytest.approx(peak)


def test_peak_height_std_ideal_is_zero():
    p = ModelParams(L=6, J=1.0, dJ=1.0, delta=0.0)
    mean, std = peak_height_std(p, 3, 20, base_seed=3)
    assert mean == pytest.approx(1.0, abs=1e-9)
    assert std == pytest.approx(0.0, abs=1e-9)


def test_phase_diagram_scan_shapes_and_trend():
    p = ModelParams(L=6, J=1.0, dJ=1.0)
    grid = phase_diagram_scan([0.0, 0.4], [0.0], p, 2,
                              "mean_peak", n_periods=12, base_seed=0)
    assert grid.values.shape == (2, 1)
    assert grid.statistic == "mean_peak"
    # larger drive error erodes the subharmonic peak
    assert grid.values[0, 0] > grid.values[1, 0]
    with pytest.raises(ContractError):
        phase_diagram_scan([0.0], [0.0], p, 2, "bogus")
