"""Driven cluster-chain model: parameters, disorder sampling, grouped term lists.

The chain alternates between a global x-field interval and an interval governed
by a disordered cluster Hamiltonian built from three-site stabilizer couplings
J_k, two-site XX couplings V_k, and on-site fields h_k.  Couplings are drawn
uniformly and independently from [c - dc, c + dc].

Site indices are 1-based throughout.  Open-boundary index ranges:
stabilizers k = 2..L-1, bonds k = 1..L-1, fields k = 1..L.  Periodic chains
use k = 1..L everywhere with wraparound.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import ContractError, ParameterError

AXES = ("X", "Y", "Z")


@dataclass(frozen=True)
class ModelParams:
    """Static parameters of the driven chain.

    ``delta`` is the drive imperfection; ``lam`` the drive-angle center
    (pi/2 unless exploring generalized drives).  ``t1`` and ``period`` are
    fixed at 1 and 2: the two intervals have equal unit duration.
    """

    L: int
    J: float = 1.0
    dJ: float = 0.0
    V: float = 0.0
    dV: float = 0.0
    h: float = 0.0
    dh: float = 0.0
    delta: float = 0.0
    lam: float = math.pi / 2
    t1: float = 1.0
    period: float = 2.0
    boundary: str = "open"
    boundary_stabilizers: tuple[float, float] | None = None

    def __post_init__(self):
        if self.L < 3:
            raise ParameterError(f"need L >= 3, got {self.L}")
        for name in ("dJ", "dV", "dh"):
            if getattr(self, name) < 0:
                raise ParameterError(f"{name} must be >= 0")
        if self.boundary not in ("open", "periodic"):
            raise ParameterError(f"unknown boundary {self.boundary!r}")
        if self.period != 2.0 or self.t1 != 1.0:
            raise ParameterError("schedule is fixed at period = 2 * t1 = 2")
        if self.boundary_stabilizers is not None and self.boundary != "open":
            raise ParameterError("boundary_stabilizers require an open chain")

    @property
    def ideal(self) -> bool:
        """True in the cluster limit: no XX couplings, no fields."""
        return self.V == self.dV == self.h == self.dh == 0.0

    def stabilizer_sites(self) -> range:
        if self.boundary == "open":
            return range(2, self.L)
        return range(1, self.L + 1)

    def bond_sites(self) -> range:
        if self.boundary == "open":
            return range(1, self.L)
        return range(1, self.L + 1)

    def field_sites(self) -> range:
        return range(1, self.L + 1)


@dataclass(frozen=True)
class DisorderRealization:
    """One sampled instance of couplings; the unit of ensemble work."""

    params: ModelParams
    J: tuple[float, ...]
    V: tuple[float, ...]
    h: tuple[float, ...]
    seed: int

    def J_at(self, k: int) -> float:
        return self.J[k - self.params.stabilizer_sites().start]

    def V_at(self, k: int) -> float:
        return self.V[k - 1]

    def h_at(self, k: int) -> float:
        return self.h[k - 1]


@dataclass(frozen=True)
class PauliString:
    """coefficient * product of single-site Paulis; empty factors = identity.

    Factors are (site, axis) pairs with strictly increasing 1-based sites.
    """

    coefficient: float
    factors: tuple[tuple[int, str], ...]

    def __post_init__(self):
        sites = [s for s, _ in self.factors]
        if sites != sorted(set(sites)):
            raise ParameterError(f"sites must be strictly increasing: {sites}")
        for s, ax in self.factors:
            if s < 1:
                raise ParameterError(f"site {s} out of range")
            if ax not in AXES:
                raise ParameterError(f"unknown axis {ax!r}")

    @property
    def sites(self) -> tuple[int, ...]:
        return tuple(s for s, _ in self.factors)


@dataclass(frozen=True)
class GroupedTerms:
    """Commuting-group split of the interacting Hamiltonian.

    A: three-site stabilizer strings (-J_k);
    B: XX bonds starting on even sites (-V_k, k even);
    C: XX bonds starting on odd sites;
    D: on-site x-field strings (-h_k).
    """

    A: tuple[PauliString, ...]
    B: tuple[PauliString, ...]
    C: tuple[PauliString, ...]
    D: tuple[PauliString, ...]

    def all_terms(self) -> tuple[PauliString, ...]:
        return self.A + self.B + self.C + self.D

    @property
    def ideal(self) -> bool:
        return not (self.B or self.C or self.D)


def sample_realization(params: ModelParams, seed: int) -> DisorderRealization:
    """Draw one disorder realization.

    Uses the counter-based Philox generator keyed by ``seed``, so identical
    (params, seed) give bit-identical draws on any platform.  Draw order:
    all J_k ascending, then V_k, then h_k.
    """
    rng = np.random.Generator(np.random.Philox(key=np.uint64(seed & (2**64 - 1))))
    n_stab = len(params.stabilizer_sites())
    n_bond = len(params.bond_sites())
    J = rng.uniform(params.J - params.dJ, params.J + params.dJ, n_stab)
    V = rng.uniform(params.V - params.dV, params.V + params.dV, n_bond)
    h = rng.uniform(params.h - params.dh, params.h + params.dh, params.L)
    return DisorderRealization(params, tuple(J), tuple(V), tuple(h), seed)


def _stabilizer_string(coeff: float, k: int, L: int) -> PauliString:
    left = (k - 2) % L + 1
    right = k % L + 1
    factors = sorted([(left, "Z"), (k, "X"), (right, "Z")])
    return PauliString(coeff, tuple(factors))


def _bond_string(coeff: float, k: int, L: int) -> PauliString:
    right = k % L + 1
    factors = sorted([(k, "X"), (right, "X")])
    return PauliString(coeff, tuple(factors))


def build_grouped_terms(r: DisorderRealization) -> GroupedTerms:
    """Split the interacting Hamiltonian into commuting groups A/B/C/D.

    The union of the four groups reproduces the full term sum exactly; the
    B/C bond parity is 1-based (B holds bonds whose left site is even).
    """
    p = r.params
    A = [_stabilizer_string(-r.J_at(k), k, p.L) for k in p.stabilizer_sites()]
    B, C = [], []
    for k in p.bond_sites():
        if r.V_at(k) == 0.0:
            continue
        s = _bond_string(-r.V_at(k), k, p.L)
        (B if k % 2 == 0 else C).append(s)
    D = [PauliString(-r.h_at(k), ((k, "X"),))
         for k in p.field_sites() if r.h_at(k) != 0.0]
    return GroupedTerms(tuple(A), tuple(B), tuple(C), tuple(D))


def h2_prime_terms(r: DisorderRealization, J1: float, JL: float) -> GroupedTerms:
    """Grouped terms plus the two boundary stabilizers -J1*X1Z2, -JL*Z(L-1)XL.

    Boundary strings join group A with the same minus-sign convention as the
    bulk stabilizers; open boundary only.
    """
    if r.params.boundary != "open":
        raise ContractError("boundary stabilizers require an open chain")
    g = build_grouped_terms(r)
    L = r.params.L
    extra = (
        PauliString(-J1, ((1, "X"), (2, "Z"))),
        PauliString(-JL, ((L - 1, "Z"), (L, "X"))),
    )
    return GroupedTerms(g.A + extra, g.B, g.C, g.D)


def boundary_stabilizer_strings(L: int) -> tuple[PauliString, PauliString]:
    """Unit-coefficient boundary stabilizers S_1 = X1 Z2 and S_L = Z(L-1) XL."""
    return (
        PauliString(1.0, ((1, "X"), (2, "Z"))),
        PauliString(1.0, ((L - 1, "Z"), (L, "X"))),
    )


def stabilizer_observable(k: int, params: ModelParams) -> PauliString:
    """Unit-coefficient stabilizer observable at site k (boundary-aware)."""
    L = params.L
    if params.boundary == "open":
        if k == 1:
            return PauliString(1.0, ((1, "X"), (2, "Z")))
        if k == L:
            return PauliString(1.0, ((L - 1, "Z"), (L, "X")))
        if not 1 < k < L:
            raise ContractError(f"stabilizer site {k} out of range for L={L}")
    return _stabilizer_string(1.0, k, L)
