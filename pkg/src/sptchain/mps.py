"""Matrix-product-state engine: TEBD evolution of the driven chain at large L.

Tensors are rank-3 arrays (left bond, physical, right bond); list index i
holds site i + 1.  The state is kept in mixed-canonical form around a
canonical center; every truncation renormalizes back to unit norm and logs
the discarded weight.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import reduce

import numpy as np

from .errors import ContractError
from .model import DisorderRealization, GroupedTerms, PauliString, build_grouped_terms

_PAULI = {
    "I": np.eye(2, dtype=complex),
    "X": np.array([[0, 1], [1, 0]], dtype=complex),
    "Y": np.array([[0, -1j], [1j, 0]], dtype=complex),
    "Z": np.array([[1, 0], [0, -1]], dtype=complex),
}


@dataclass(frozen=True)
class TruncationPolicy:
    chi_max: int = 64
    svd_cutoff: float = 1e-10


@dataclass
class MatrixProductState:
    tensors: list[np.ndarray]
    center: int  # 0-based tensor index
    policy: TruncationPolicy
    discarded_weight: float = 0.0

    @property
    def L(self) -> int:
        return len(self.tensors)

    def copy(self) -> "MatrixProductState":
        return MatrixProductState([t.copy() for t in self.tensors], self.center,
                                  self.policy, self.discarded_weight)

    def bond_dimensions(self) -> list[int]:
        return [t.shape[2] for t in self.tensors[:-1]]


def product_state_mps(bits, policy: TruncationPolicy | None = None) -> MatrixProductState:
    """Bond-dimension-1 product state |b_1 ... b_L>."""
    policy = policy or TruncationPolicy()
    tensors = []
    for b in bits:
        if b not in (0, 1):
            raise ContractError(f"bit {b!r} not in {{0,1}}")
        t = np.zeros((1, 2, 1), dtype=complex)
        t[0, int(b), 0] = 1.0
        tensors.append(t)
    return MatrixProductState(tensors, 0, policy)


def to_statevector(mps: MatrixProductState) -> np.ndarray:
    """Dense amplitudes in the exact engine's ordering (site 1 = low bit)."""
    if mps.L > 14:
        raise ContractError("dense contraction limited to L <= 14")
    acc = mps.tensors[0][0]  # (2, D)
    shape_bits = [2]
    for t in mps.tensors[1:]:
        acc = np.tensordot(acc, t, axes=([-1], [0]))
        shape_bits.append(2)
    acc = acc[..., 0]
    # axes currently (site1, ..., siteL); exact ordering wants site L first
    return np.ascontiguousarray(acc.transpose(tuple(reversed(range(len(shape_bits)))))).reshape(-1)


def _move_center_right(mps: MatrixProductState) -> None:
    i = mps.center
    t = mps.tensors[i]
    dl, d, dr = t.shape
    q, rmat = np.linalg.qr(t.reshape(dl * d, dr))
    mps.tensors[i] = q.reshape(dl, d, -1)
    mps.tensors[i + 1] = np.tensordot(rmat, mps.tensors[i + 1], axes=([1], [0]))
    mps.center = i + 1


def _move_center_left(mps: MatrixProductState) -> None:
    i = mps.center
    t = mps.tensors[i]
    dl, d, dr = t.shape
    # LQ via QR of the transpose
    q, rmat = np.linalg.qr(t.reshape(dl, d * dr).conj().T)
    mps.tensors[i] = q.conj().T.reshape(-1, d, dr)
    mps.tensors[i - 1] = np.tensordot(mps.tensors[i - 1], rmat.conj().T, axes=([2], [0]))
    mps.center = i - 1


def move_center(mps: MatrixProductState, target: int) -> None:
    """Shift the canonical center to 0-based tensor index ``target``."""
    while mps.center < target:
        _move_center_right(mps)
    while mps.center > target:
        _move_center_left(mps)


def _truncated_svd(mat: np.ndarray, policy: TruncationPolicy):
    """SVD with weight-based truncation; returns (U, s, Vh, discarded)."""
    u, s, vh = np.linalg.svd(mat, full_matrices=False)
    total = float(np.sum(s**2))
    keep = len(s)
    tail = 0.0
    while keep > 1 and tail + s[keep - 1] ** 2 <= policy.svd_cutoff * total:
        tail += s[keep - 1] ** 2
        keep -= 1
    keep = min(keep, policy.chi_max)
    discarded = float(np.sum(s[keep:] ** 2)) / total if total > 0 else 0.0
    s = s[:keep]
    norm = np.linalg.norm(s)
    return u[:, :keep], s / norm, vh[:keep, :], discarded


def _local_unitary(p: PauliString, theta: float, sites: tuple[int, ...]) -> np.ndarray:
    """Dense exp(i theta P) on the contiguous window ``sites`` (leftmost first)."""
    mats = {s: _PAULI[ax] for s, ax in p.factors}
    op = reduce(np.kron, [mats.get(s, _PAULI["I"]) for s in sites])
    dim = op.shape[0]
    return np.cos(theta) * np.eye(dim) + 1j * np.sin(theta) * op


def apply_term_exp(mps: MatrixProductState, p: PauliString, theta: float) -> None:
    """Apply exp(i theta P) in place for P supported on 1-3 contiguous sites.

    One-site gates are exact; two-site gates use one truncated SVD; three-site
    gates contract the full block and re-split with two truncated SVDs.
    The canonical center ends on the rightmost support site.
    """
    sites = p.sites
    if not sites:
        return
    if len(sites) > 3 or sites != tuple(range(sites[0], sites[0] + len(sites))):
        raise ContractError(f"support must be 1-3 contiguous sites, got {sites}")
    if sites[0] < 1 or sites[-1] > mps.L:
        raise ContractError(f"sites {sites} outside 1..{mps.L}")
    i = sites[0] - 1
    w = len(sites)
    U = _local_unitary(p, theta, sites)
    if w == 1:
        mps.tensors[i] = np.einsum("pq,aqb->apb", U, mps.tensors[i])
        return
    move_center(mps, i)
    theta_t = mps.tensors[i]
    for j in range(1, w):
        theta_t = np.tensordot(theta_t, mps.tensors[i + j], axes=([-1], [0]))
    dl = theta_t.shape[0]
    dr = theta_t.shape[-1]
    block = theta_t.reshape(dl, 2**w, dr)
    block = np.einsum("pq,aqb->apb", U, block)
    if w == 2:
        mat = block.reshape(dl * 2, 2 * dr)
        u, s, vh, disc = _truncated_svd(mat, mps.policy)
        mps.discarded_weight += disc
        mps.tensors[i] = u.reshape(dl, 2, -1)
        mps.tensors[i + 1] = (s[:, None] * vh).reshape(-1, 2, dr)
        mps.center = i + 1
    else:
        mat = block.reshape(dl * 2, 4 * dr)
        u, s, vh, disc = _truncated_svd(mat, mps.policy)
        mps.discarded_weight += disc
        mps.tensors[i] = u.reshape(dl, 2, -1)
        rest = (s[:, None] * vh).reshape(-1, 2, 2 * dr)
        k = rest.shape[0]
        u2, s2, vh2, disc2 = _truncated_svd(rest.reshape(k * 2, 2 * dr), mps.policy)
        mps.discarded_weight += disc2
        mps.tensors[i + 1] = u2.reshape(k, 2, -1)
        mps.tensors[i + 2] = (s2[:, None] * vh2).reshape(-1, 2, dr)
        mps.center = i + 2


def _stabilizer_sublayers(terms: GroupedTerms) -> list[list[PauliString]]:
    """Three non-overlapping sublayers of the three-site group (center mod 3)."""
    layers = [[], [], []]
    for p in terms.A:
        center = p.sites[len(p.sites) // 2] if len(p.sites) == 3 else p.sites[0]
        layers[center % 3].append(p)
    return [sorted(layer, key=lambda q: q.sites[0]) for layer in layers if layer]


def tebd_floquet_period(mps: MatrixProductState, r: DisorderRealization, dt: float,
                        terms: GroupedTerms | None = None) -> None:
    """Advance one driving period in place.

    The x-field interval is a single exact one-site layer; the interacting
    interval is split into (period - t1)/dt substeps, each applying the
    three-site sublayers, then even-bond, odd-bond, and field layers.
    In the cluster limit a single exact substep replaces the loop.
    """
    p = r.params
    if terms is None:
        terms = build_grouped_terms(r)
    theta1 = -(p.lam - p.delta) * p.t1
    for s in range(1, mps.L + 1):
        apply_term_exp(mps, PauliString(1.0, ((s, "X"),)), theta1)
    duration = p.period - p.t1
    if terms.ideal:
        substeps, step = 1, duration
    else:
        substeps = round(duration / dt)
        if substeps < 1 or abs(substeps * dt - duration) > 1e-9:
            raise ContractError(f"dt={dt} does not evenly divide the interval")
        step = dt
    sublayers = _stabilizer_sublayers(terms)
    for _ in range(substeps):
        for layer in sublayers:
            for term in layer:
                apply_term_exp(mps, term, -step * term.coefficient)
        for group in (terms.B, terms.C, terms.D):
            for term in sorted(group, key=lambda q: q.sites[0]):
                apply_term_exp(mps, term, -step * term.coefficient)


def bond_singular_values(mps: MatrixProductState, bond: int) -> np.ndarray:
    """Schmidt coefficients across bond ``bond`` (1-based, between bond, bond+1)."""
    if not 1 <= bond < mps.L:
        raise ContractError(f"bond {bond} outside 1..{mps.L - 1}")
    move_center(mps, bond - 1)
    t = mps.tensors[bond - 1]
    dl, d, dr = t.shape
    return np.linalg.svd(t.reshape(dl * d, dr), compute_uv=False)


def half_chain_entropy(mps: MatrixProductState) -> float:
    """Von Neumann entropy (nats) across the central bond."""
    s = bond_singular_values(mps, mps.L // 2)
    w = s**2
    w = w[w > 1e-14]
    return float(-np.sum(w * np.log(w)))


def mps_expectation(mps: MatrixProductState, p: PauliString) -> float:
    """<psi| coefficient * P |psi> by left-to-right transfer contraction."""
    for s in p.sites:
        if not 1 <= s <= mps.L:
            raise ContractError(f"site {s} outside 1..{mps.L}")
    ops = {s: _PAULI[ax] for s, ax in p.factors}
    env = np.ones((1, 1), dtype=complex)
    for idx, t in enumerate(mps.tensors):
        op = ops.get(idx + 1)
        ket = t if op is None else np.einsum("pq,aqb->apb", op, t)
        env = np.einsum("ab,apc,bpd->cd", env, t.conj(), ket)
    val = p.coefficient * env[0, 0]
    assert abs(val.imag) < 1e-8 * max(1.0, abs(val.real) + 1.0)
    return float(val.real)


def magnetization_profile_mps(mps: MatrixProductState) -> np.ndarray:
    """<sigma_s^z> for every site in one sweep."""
    out = np.empty(mps.L)
    for s in range(1, mps.L + 1):
        out[s - 1] = mps_expectation(mps, PauliString(1.0, ((s, "Z"),)))
    return out


def norm_mps(mps: MatrixProductState) -> float:
    env = np.ones((1, 1), dtype=complex)
    for t in mps.tensors:
        env = np.einsum("ab,apc,bpd->cd", env, t.conj(), t)
    return float(np.sqrt(env[0, 0].real))


def canonical_defect(mps: MatrixProductState) -> float:
    """Max deviation of off-center tensors from their isometry conditions."""
    worst = 0.0
    for i, t in enumerate(mps.tensors):
        dl, d, dr = t.shape
        if i < mps.center:
            m = t.reshape(dl * d, dr)
            worst = max(worst, float(np.abs(m.conj().T @ m - np.eye(dr)).max()))
        elif i > mps.center:
            m = t.reshape(dl, d * dr)
            worst = max(worst, float(np.abs(m @ m.conj().T - np.eye(dl)).max()))
    return worst
