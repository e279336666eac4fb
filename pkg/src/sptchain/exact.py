"""Dense statevector engine for chains up to L = 14.

Basis ordering: site 1 is the least significant bit of the computational
index, so |b_L ... b_2 b_1> lives at index sum_s b_s 2^(s-1).  Bit value 1
means spin down (sigma^z eigenvalue -1); the all-zero string is fully
polarized up.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache, reduce

import numpy as np
import scipy.linalg

from .errors import CapacityError, ContractError, ConvergenceError
from .model import DisorderRealization, GroupedTerms, PauliString, build_grouped_terms

MAX_DENSE_L = 14
_PAULI = {
    "I": np.eye(2, dtype=complex),
    "X": np.array([[0, 1], [1, 0]], dtype=complex),
    "Y": np.array([[0, -1j], [1j, 0]], dtype=complex),
    "Z": np.array([[1, 0], [0, -1]], dtype=complex),
}


@dataclass
class StateVector:
    """2^L complex amplitudes over the computational basis."""

    L: int
    amplitudes: np.ndarray

    @classmethod
    def from_bits(cls, bits) -> "StateVector":
        """Product state |b_1 b_2 ... b_L> with b_s in {0, 1}."""
        L = len(bits)
        amp = np.zeros(2**L, dtype=complex)
        idx = 0
        for s, b in enumerate(bits, start=1):
            if b not in (0, 1):
                raise ContractError(f"bit {b!r} at site {s} not in {{0,1}}")
            idx |= int(b) << (s - 1)
        amp[idx] = 1.0
        return cls(L, amp)

    def copy(self) -> "StateVector":
        return StateVector(self.L, self.amplitudes.copy())

    def norm(self) -> float:
        return float(np.linalg.norm(self.amplitudes))


@dataclass(frozen=True)
class EvolutionMethod:
    """Time-stepping choice for the interacting interval.

    variant "trotter": first-order A/B/C/D splitting with substep ``dt``.
    variant "krylov": Lanczos exp(-i t H) with 2-norm tolerance ``tol``.
    """

    variant: str = "trotter"
    dt: float = 0.05
    tol: float = 1e-10
    max_dim: int = 30

    def __post_init__(self):
        if self.variant not in ("trotter", "krylov"):
            raise ContractError(f"unknown variant {self.variant!r}")
        if self.variant == "krylov" and self.tol <= 0:
            raise ContractError("krylov tolerance must be > 0")


@dataclass
class QuasienergyReport:
    """Quasienergies of the one-period operator plus pairing diagnostics."""

    quasienergies: np.ndarray
    pairing_defect: float
    degeneracies: dict[int, int]
    eigenvectors: np.ndarray | None = None


@lru_cache(maxsize=4096)
def _pauli_action(L: int, factors) -> tuple[np.ndarray, np.ndarray]:
    """(perm, phase) with P|b> = phase[b] |perm[b]> for the factor product."""
    idx = np.arange(2**L)
    phase = np.ones(2**L, dtype=complex)
    flip = 0
    for site, axis in factors:
        if not 1 <= site <= L:
            raise IndexError(f"site {site} outside 1..{L}")
        bit = (idx >> (site - 1)) & 1
        if axis == "X":
            flip ^= 1 << (site - 1)
        elif axis == "Y":
            flip ^= 1 << (site - 1)
            phase = phase * (1j * (1 - 2 * bit))
        else:
            phase = phase * (1 - 2 * bit)
    return idx ^ flip, phase


def apply_pauli(state: StateVector, p: PauliString) -> np.ndarray:
    """Amplitudes of coefficient * P |psi>."""
    perm, phase = _pauli_action(state.L, p.factors)
    out = np.empty_like(state.amplitudes)
    out[perm] = phase * state.amplitudes
    if p.coefficient != 1.0:
        out *= p.coefficient
    return out


def apply_pauli_exp(state: StateVector, p: PauliString, theta: float) -> StateVector:
    """Apply exp(i theta P), P the unit-coefficient factor product of ``p``.

    P squares to the identity, so the rotation is cos(theta) + i sin(theta) P;
    the string's coefficient is deliberately not folded into theta.
    """
    perm, phase = _pauli_action(state.L, p.factors)
    out = np.cos(theta) * state.amplitudes
    out[perm] += 1j * np.sin(theta) * (phase * state.amplitudes)
    return StateVector(state.L, out)


def evolve_u1(state: StateVector, delta: float, lam: float | None = None,
              duration: float = 1.0) -> StateVector:
    """First-interval drive: independent exp(-i (lam - delta) t X) per site."""
    if lam is None:
        lam = np.pi / 2
    theta = -(lam - delta) * duration
    out = state
    for site in range(1, state.L + 1):
        out = apply_pauli_exp(out, PauliString(1.0, ((site, "X"),)), theta)
    return out


def _hamiltonian_matvec(L: int, terms: GroupedTerms, psi: np.ndarray) -> np.ndarray:
    out = np.zeros_like(psi)
    for p in terms.all_terms():
        perm, phase = _pauli_action(L, p.factors)
        contrib = np.empty_like(psi)
        contrib[perm] = phase * psi
        out += p.coefficient * contrib
    return out


def _lanczos_expm(L, terms, psi, duration, tol, max_dim):
    """exp(-i duration H) psi by Lanczos; returns (result, residual_estimate)."""
    norm0 = np.linalg.norm(psi)
    vecs = [psi / norm0]
    alphas, betas = [], []
    w = _hamiltonian_matvec(L, terms, vecs[0])
    for m in range(max_dim):
        a = float(np.vdot(vecs[-1], w).real)
        alphas.append(a)
        w = w - a * vecs[-1]
        if len(vecs) > 1:
            w = w - betas[-1] * vecs[-2]
        # full reorthogonalization; subspace is tiny
        for v in vecs:
            w = w - np.vdot(v, w) * v
        b = float(np.linalg.norm(w))
        T = np.diag(alphas) + np.diag(betas, 1) + np.diag(betas, -1)
        small = scipy.linalg.expm(-1j * duration * T)[:, 0]
        resid = abs(duration * b * small[-1])
        if resid < tol or b < 1e-14:
            result = norm0 * np.stack(vecs, axis=1) @ small
            return result, resid
        betas.append(b)
        vecs.append(w / b)
        w = _hamiltonian_matvec(L, terms, vecs[-1])
    result = norm0 * np.stack(vecs, axis=1) @ small
    return result, resid


def evolve_u2(state: StateVector, terms: GroupedTerms, duration: float,
              method: EvolutionMethod) -> StateVector:
    """Second-interval evolution exp(-i duration H2) by splitting or Lanczos.

    The trotter variant applies exp(-dt D) exp(-dt C) exp(-dt B) exp(-dt A)
    per substep; members of one group commute, so each group factor is exact.
    In the cluster limit (B = C = D empty) a single substep is exact and is
    used regardless of dt.
    """
    if duration < 0:
        raise ContractError("duration must be >= 0")
    if duration == 0:
        return state.copy()
    if method.variant == "krylov":
        pieces, depth = 1, 0
        while True:
            psi = state.amplitudes
            step = duration / pieces
            ok = True
            for _ in range(pieces):
                psi, resid = _lanczos_expm(state.L, terms, psi, step,
                                           method.tol / pieces, method.max_dim)
                if resid >= method.tol / pieces:
                    ok = False
                    break
            if ok:
                return StateVector(state.L, psi)
            pieces *= 2
            depth += 1
            if depth > 12:
                raise ConvergenceError(
                    f"krylov failed at subspace dim {method.max_dim}", residual=resid)
    # trotter
    if terms.ideal:
        substeps, dt = 1, duration
    else:
        substeps = round(duration / method.dt)
        if substeps < 1 or abs(substeps * method.dt - duration) > 1e-9:
            raise ContractError(
                f"dt={method.dt} does not evenly divide duration={duration}")
        dt = method.dt
    out = state
    for _ in range(substeps):
        for group in (terms.A, terms.B, terms.C, terms.D):
            for p in group:
                out = apply_pauli_exp(out, p, -dt * p.coefficient)
    return out


def floquet_step(state: StateVector, r: DisorderRealization,
                 method: EvolutionMethod,
                 terms: GroupedTerms | None = None) -> StateVector:
    """One full driving period: the x-field interval, then the cluster interval."""
    p = r.params
    if terms is None:
        terms = build_grouped_terms(r)
    out = evolve_u1(state, p.delta, p.lam, p.t1)
    return evolve_u2(out, terms, p.period - p.t1, method)


def dense_operator(L: int, p: PauliString) -> np.ndarray:
    """Dense 2^L x 2^L matrix of a Pauli string (oracle-grade, small L)."""
    mats = {s: _PAULI[ax] for s, ax in p.factors}
    # site L first so that site 1 lands on the least significant bit
    full = reduce(np.kron, [mats.get(s, _PAULI["I"]) for s in range(L, 0, -1)])
    return p.coefficient * full


def dense_hamiltonian(L: int, terms: GroupedTerms) -> np.ndarray:
    """Dense Hermitian matrix of the summed term list."""
    H = np.zeros((2**L, 2**L), dtype=complex)
    for p in terms.all_terms():
        H += dense_operator(L, p)
    return H


def dense_floquet_operator(r: DisorderRealization,
                           terms: GroupedTerms | None = None) -> np.ndarray:
    """Dense one-period operator U2 @ U1 via exact exponentials (L <= 10).

    U2 comes from an eigendecomposition of the dense interacting Hamiltonian,
    U1 from a Kronecker product of single-site rotations.  Used as the fast
    propagator for ensemble scans and as a cross-check oracle.
    """
    p = r.params
    if p.L > 10:
        raise CapacityError(f"dense one-period operator limited to L <= 10, got {p.L}")
    if terms is None:
        terms = build_grouped_terms(r)
    H2 = dense_hamiltonian(p.L, terms)
    evals, evecs = np.linalg.eigh(H2)
    U2 = (evecs * np.exp(-1j * (p.period - p.t1) * evals)) @ evecs.conj().T
    theta = (p.lam - p.delta) * p.t1
    u1_site = np.cos(theta) * _PAULI["I"] - 1j * np.sin(theta) * _PAULI["X"]
    U1 = reduce(np.kron, [u1_site] * p.L)
    return U2 @ U1


def floquet_spectrum(r: DisorderRealization, delta: float | None = None,
                     method: EvolutionMethod | None = None,
                     keep_vectors: bool = True,
                     degeneracy_tol: float = 1e-8) -> QuasienergyReport:
    """Quasienergies of the one-period operator, with pi-pairing diagnostics.

    Assembles the operator column-by-column with ``floquet_step`` on basis
    states and diagonalizes it.  Quasienergies are eigenphases in (-pi, pi]
    of U|v> = exp(-i eps)|v>.  In the cluster limit on an open chain, exactly
    degenerate pairs are additionally rotated to simultaneously diagonalize
    the conserved edge correlator Z_1 Z_L, which fixes the physical (cat)
    eigenbasis inside each degenerate block.
    """
    p = r.params
    if p.L > 10:
        raise CapacityError(f"dense spectrum limited to L <= 10, got {p.L}")
    if delta is not None and delta != p.delta:
        from dataclasses import replace
        r = DisorderRealization(replace(p, delta=delta), r.J, r.V, r.h, r.seed)
        p = r.params
    if method is None:
        method = EvolutionMethod("krylov", tol=1e-12)
    terms = build_grouped_terms(r)
    dim = 2**p.L
    U = np.empty((dim, dim), dtype=complex)
    for col in range(dim):
        basis = np.zeros(dim, dtype=complex)
        basis[col] = 1.0
        U[:, col] = floquet_step(StateVector(p.L, basis), r, method, terms).amplitudes
    # Schur of a unitary (normal) matrix gives an orthonormal eigenbasis,
    # which plain eig does not guarantee inside degenerate blocks.
    T, Z = scipy.linalg.schur(U, output="complex")
    evals, evecs = np.diag(T), Z
    eps = -np.angle(evals)
    eps[eps <= -np.pi + 1e-15] = np.pi
    order = np.argsort(eps)
    eps, evecs = eps[order], evecs[:, order]
    if p.ideal and p.boundary == "open":
        evecs = _resolve_edge_degeneracies(p.L, eps, evecs, degeneracy_tol)
    defect = _pairing_defect(eps)
    degen = _degeneracy_histogram(eps, degeneracy_tol)
    return QuasienergyReport(eps, defect, degen,
                             evecs if keep_vectors else None)


def _wrapped_distance(a: np.ndarray, b: float) -> np.ndarray:
    d = np.abs(a - b) % (2 * np.pi)
    return np.minimum(d, 2 * np.pi - d)


def _pairing_defect(eps: np.ndarray) -> float:
    defect = 0.0
    for e in eps:
        defect = max(defect, float(_wrapped_distance(eps, e + np.pi).min()))
    return defect


def _degeneracy_histogram(eps: np.ndarray, tol: float) -> dict[int, int]:
    hist: dict[int, int] = {}
    i = 0
    while i < len(eps):
        j = i + 1
        while j < len(eps) and abs(eps[j] - eps[j - 1]) < tol:
            j += 1
        size = j - i
        hist[size] = hist.get(size, 0) + 1
        i = j
    return hist


def _resolve_edge_degeneracies(L, eps, evecs, tol):
    """Diagonalize Z_1 Z_L within each exactly degenerate quasienergy block."""
    zz = PauliString(1.0, ((1, "Z"), (L, "Z")))
    perm, phase = _pauli_action(L, zz.factors)
    out = evecs.copy()
    i = 0
    while i < len(eps):
        j = i + 1
        while j < len(eps) and abs(eps[j] - eps[j - 1]) < tol:
            j += 1
        if j - i > 1:
            block = out[:, i:j]
            zz_block = block.conj().T @ (phase[:, None] * block[perm, :])
            _, rot = np.linalg.eigh(0.5 * (zz_block + zz_block.conj().T))
            out[:, i:j] = block @ rot
        i = j
    return out


def reduced_density(state: StateVector, sites) -> np.ndarray:
    """Reduced density matrix over ``sites`` (ascending site = low bit)."""
    sites = sorted(set(sites))
    L = state.L
    if not sites or len(sites) >= L:
        raise ContractError("subset must be non-empty and proper")
    if sites[0] < 1 or sites[-1] > L:
        raise ContractError(f"sites {sites} outside 1..{L}")
    rest = [s for s in range(1, L + 1) if s not in sites]
    tensor = state.amplitudes.reshape([2] * L)  # axis L - s holds site s
    axes = [L - s for s in reversed(sites)] + [L - s for s in reversed(rest)]
    M = tensor.transpose(axes).reshape(2 ** len(sites), 2 ** len(rest))
    return M @ M.conj().T


def _entropy_from_probs(v: np.ndarray) -> float:
    v = v[v > 1e-14]
    return float(-np.sum(v * np.log(v)))


def entanglement_spectrum(state: StateVector, cut: int,
                          floor: float = 1e-12) -> np.ndarray:
    """Ascending -ln(v) for Schmidt weights v > floor across bond ``cut``."""
    if not 1 <= cut < state.L:
        raise ContractError(f"cut {cut} outside 1..{state.L - 1}")
    rho = reduced_density(state, range(1, cut + 1))
    v = np.linalg.eigvalsh(rho)
    v = v[v > floor]
    return np.sort(-np.log(v))


def entanglement_entropy(state: StateVector, sites) -> float:
    """Von Neumann entropy (nats) of the reduced state on ``sites``."""
    if len(set(sites)) >= state.L:
        return 0.0  # the full pure state carries no entropy
    v = np.linalg.eigvalsh(reduced_density(state, sites))
    return _entropy_from_probs(v[v > 0])


def mutual_information(state: StateVector, site_a, site_b) -> float:
    """I(a:b) = S(a) + S(b) - S(ab) in nats.

    Either argument may be a single site or a collection of sites; the two
    regions must be disjoint.  The boundary edge modes of the open cluster
    chain span two sites each, so their full 2 ln 2 correlation shows up
    between the regions {1, 2} and {L-1, L}, not between single end sites.
    """
    a = {site_a} if isinstance(site_a, int) else set(site_a)
    b = {site_b} if isinstance(site_b, int) else set(site_b)
    if a & b:
        raise ContractError("regions must be disjoint")
    sa = entanglement_entropy(state, a)
    sb = entanglement_entropy(state, b)
    sab = entanglement_entropy(state, a | b)
    return sa + sb - sab


def pauli_expectation(state: StateVector, p: PauliString) -> float:
    """Real part of <psi| coefficient * P |psi>; asserts Hermitian-real value."""
    val = np.vdot(state.amplitudes, apply_pauli(state, p))
    assert abs(val.imag) < 1e-10 * max(1.0, abs(val.real) + 1.0)
    return float(val.real)


def magnetization_profile(state: StateVector) -> np.ndarray:
    """<sigma_s^z> for every site, via bit populations."""
    probs = np.abs(state.amplitudes) ** 2
    idx = np.arange(len(probs))
    out = np.empty(state.L)
    for s in range(1, state.L + 1):
        bit = (idx >> (s - 1)) & 1
        out[s - 1] = float(np.sum(probs * (1 - 2 * bit)))
    return out
