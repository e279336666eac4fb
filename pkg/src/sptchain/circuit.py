"""Gate-level representation: {X, Y, Z, H, CZ, CRz} circuits on a line.

Conventions (fixed; every fixture depends on them):
  X(theta) = exp(-i theta/2 sigma_x), likewise Y and Z;
  CZ = diag(1, 1, 1, -1);
  CRz(theta) = |0><0| (x) I + |1><1| (x) Z(theta), control listed first.
Two-qubit gates act on nearest neighbors only.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import reduce

import numpy as np

from .errors import CapacityError, ContractError
from .exact import StateVector
from .model import DisorderRealization

ROTATION_KINDS = ("X", "Y", "Z", "CRZ")
GATE_KINDS = ROTATION_KINDS + ("H", "CZ")

_H = np.array([[1, 1], [1, -1]], dtype=complex) / np.sqrt(2)
_CZ = np.diag([1, 1, 1, -1]).astype(complex)
_SIGMA = {
    "X": np.array([[0, 1], [1, 0]], dtype=complex),
    "Y": np.array([[0, -1j], [1j, 0]], dtype=complex),
    "Z": np.array([[1, 0], [0, -1]], dtype=complex),
}


@dataclass(frozen=True)
class Gate:
    kind: str
    sites: tuple[int, ...]
    angle: float | None = None

    def __post_init__(self):
        if self.kind not in GATE_KINDS:
            raise ContractError(f"unknown gate kind {self.kind!r}")
        want = 2 if self.kind in ("CZ", "CRZ") else 1
        if len(self.sites) != want:
            raise ContractError(f"{self.kind} takes {want} site(s), got {self.sites}")
        if len(set(self.sites)) != len(self.sites):
            raise ContractError(f"repeated site in {self.sites}")
        if self.kind in ROTATION_KINDS and self.angle is None:
            raise ContractError(f"{self.kind} needs an angle")
        if self.angle is not None:
            object.__setattr__(self, "angle", float(self.angle))
        object.__setattr__(self, "sites", tuple(int(s) for s in self.sites))
        if self.kind in ("H", "CZ") and self.angle is not None:
            raise ContractError(f"{self.kind} takes no angle")

    def matrix(self) -> np.ndarray:
        """Dense matrix; first listed site is the most significant local index."""
        if self.kind == "H":
            return _H
        if self.kind == "CZ":
            return _CZ
        if self.kind == "CRZ":
            rz = _rotation("Z", self.angle)
            out = np.zeros((4, 4), dtype=complex)
            out[:2, :2] = np.eye(2)
            out[2:, 2:] = rz
            return out
        return _rotation(self.kind, self.angle)

    def inverse(self) -> "Gate":
        if self.kind in ("H", "CZ"):
            return self
        return Gate(self.kind, self.sites, -self.angle)


def _rotation(axis: str, theta: float) -> np.ndarray:
    s = _SIGMA[axis]
    return np.cos(theta / 2) * np.eye(2) - 1j * np.sin(theta / 2) * s


@dataclass(frozen=True)
class Circuit:
    """Ordered gate list with layer boundaries for depth accounting."""

    L: int
    gates: tuple[Gate, ...]
    layers: tuple[int, ...]  # gate count per layer; sums to len(gates)

    def __post_init__(self):
        if sum(self.layers) != len(self.gates):
            raise ContractError("layer sizes must sum to the gate count")
        for g in self.gates:
            for s in g.sites:
                if not 1 <= s <= self.L:
                    raise ContractError(f"site {s} outside 1..{self.L}")
            if len(g.sites) == 2 and abs(g.sites[0] - g.sites[1]) != 1:
                raise ContractError(f"two-qubit gate on non-neighbors {g.sites}")

    def layer_gates(self):
        i = 0
        for n in self.layers:
            yield self.gates[i:i + n]
            i += n

    def concat(self, other: "Circuit") -> "Circuit":
        if other.L != self.L:
            raise ContractError("size mismatch")
        return Circuit(self.L, self.gates + other.gates, self.layers + other.layers)


class CircuitBuilder:
    def __init__(self, L: int):
        self.L = L
        self._gates: list[Gate] = []
        self._layers: list[int] = []

    def layer(self, gates) -> "CircuitBuilder":
        gates = list(gates)
        if gates:
            self._gates.extend(gates)
            self._layers.append(len(gates))
        return self

    def build(self) -> Circuit:
        return Circuit(self.L, tuple(self._gates), tuple(self._layers))


@dataclass(frozen=True)
class NoiseModel:
    """Depolarizing error after each gate, trajectory-sampled."""

    p1: float = 0.0
    p2: float = 0.0
    seed: int = 0

    def __post_init__(self):
        if not (0 <= self.p1 < 1 and 0 <= self.p2 < 1):
            raise ContractError("probabilities must lie in [0, 1)")


def u1_layer(L: int, delta: float) -> Circuit:
    """One layer of X(pi - 2 delta): the compiled first-interval drive."""
    return CircuitBuilder(L).layer(
        Gate("X", (s,), np.pi - 2 * delta) for s in range(1, L + 1)).build()


def _cz_layers(L: int, reverse: bool = False):
    odd = [Gate("CZ", (k, k + 1)) for k in range(1, L) if k % 2 == 1]
    even = [Gate("CZ", (k, k + 1)) for k in range(1, L) if k % 2 == 0]
    return (even, odd) if reverse else (odd, even)


def cluster_u2_circuit(r: DisorderRealization,
                       boundary: tuple[float, float] | None = None) -> Circuit:
    """Exact sandwich circuit for the cluster-limit second interval.

    Application order: CZ-even, CZ-odd, H (the entangler inverse), a layer of
    Z rotations with angles -2 J_k (t2), then H, CZ-odd, CZ-even.  Requires a
    realization in the cluster limit; ``boundary`` optionally adds the two
    boundary stabilizer angles (J1, JL).
    """
    p = r.params
    if not p.ideal:
        raise ContractError("cluster circuit needs V = h = 0; compile instead")
    L = p.L
    t2 = p.period - p.t1
    odd, even = _cz_layers(L)
    angles = {k: -2.0 * r.J_at(k) * t2 for k in p.stabilizer_sites()}
    if boundary is not None:
        angles[1] = -2.0 * boundary[0] * t2
        angles[L] = -2.0 * boundary[1] * t2
    b = CircuitBuilder(L)
    b.layer(even).layer(odd)
    b.layer(Gate("H", (s,)) for s in range(1, L + 1))
    b.layer(Gate("Z", (k,), angles[k]) for k in sorted(angles))
    b.layer(Gate("H", (s,)) for s in range(1, L + 1))
    b.layer(odd).layer(even)
    return b.build()


def floquet_period_circuit(r: DisorderRealization, n_periods: int = 1) -> Circuit:
    """n periods of the cluster-limit drive: [u1_layer][cluster sandwich]."""
    one = u1_layer(r.params.L, r.params.delta).concat(cluster_u2_circuit(r))
    out = one
    for _ in range(n_periods - 1):
        out = out.concat(one)
    return out


def fused_depth(c: Circuit) -> int:
    """Layer count after merging runs of adjacent single-qubit-only layers."""
    kinds = []
    for gates in c.layer_gates():
        kinds.append(all(len(g.sites) == 1 for g in gates))
    depth, prev_single = 0, False
    for single in kinds:
        if not (single and prev_single):
            depth += 1
        prev_single = single
    return depth


def spt_prep_circuit(L: int, excitations=()) -> Circuit:
    """Prepare a cluster eigenstate: H everywhere, CZ on all bonds in two
    parallel steps, then Z(pi) on each excitation site.

    With no excitations the output is the +1 eigenstate of every stabilizer
    including the boundary pair; each Z(pi) flips the one stabilizer whose
    central X it anticommutes with.
    """
    excitations = tuple(excitations)
    for s in excitations:
        if not 1 <= s <= L:
            raise ContractError(f"excitation site {s} outside 1..{L}")
    odd, even = _cz_layers(L)
    b = CircuitBuilder(L)
    b.layer(Gate("H", (s,)) for s in range(1, L + 1))
    b.layer(odd).layer(even)
    b.layer(Gate("Z", (s,), np.pi) for s in sorted(set(excitations)))
    return b.build()


def echo_circuit(period: Circuit, n: int) -> Circuit:
    """period^n followed by the gate-wise inverse in reverse order."""
    if n == 0:
        return Circuit(period.L, (), ())
    fwd = period
    for _ in range(n - 1):
        fwd = fwd.concat(period)
    inv_gates = tuple(g.inverse() for g in reversed(fwd.gates))
    inv_layers = tuple(reversed(fwd.layers))
    return Circuit(period.L, fwd.gates + inv_gates, fwd.layers + inv_layers)


def _apply_gate_tensor(amps: np.ndarray, L: int, U: np.ndarray,
                       sites: tuple[int, ...]) -> np.ndarray:
    """Apply a k-site gate to an amplitude array of shape (2^L, ...)."""
    k = len(sites)
    extra = amps.shape[1:]
    tensor = amps.reshape([2] * L + list(extra))
    axes = [L - s for s in sites]  # axis L - s holds site s; first site = MSB
    Ut = U.reshape([2] * (2 * k))
    tensor = np.tensordot(Ut, tensor, axes=(list(range(k, 2 * k)), axes))
    # tensordot moved the acted axes to the front, in `sites` order
    tensor = np.moveaxis(tensor, list(range(k)), axes)
    return tensor.reshape(amps.shape)


def run_circuit(state: StateVector, c: Circuit,
                noise: NoiseModel | None = None) -> StateVector:
    """Execute the circuit; with noise, one stochastic Pauli trajectory."""
    if c.L != state.L:
        raise ContractError(f"circuit is {c.L} sites, state is {state.L}")
    rng = None
    if noise is not None and (noise.p1 > 0 or noise.p2 > 0):
        rng = np.random.Generator(np.random.Philox(key=np.uint64(noise.seed)))
    amps = state.amplitudes.copy()
    paulis = [_SIGMA["X"], _SIGMA["Y"], _SIGMA["Z"]]
    for g in c.gates:
        amps = _apply_gate_tensor(amps, c.L, g.matrix(), g.sites)
        if rng is None:
            continue
        p_err = noise.p1 if len(g.sites) == 1 else noise.p2
        if p_err > 0 and rng.random() < p_err:
            if len(g.sites) == 1:
                err = paulis[rng.integers(3)]
                amps = _apply_gate_tensor(amps, c.L, err, g.sites)
            else:
                # uniform over the 15 non-identity two-site Pauli pairs
                pair = rng.integers(1, 16)
                mats = [np.eye(2, dtype=complex)] + paulis
                err = np.kron(mats[pair // 4], mats[pair % 4])
                amps = _apply_gate_tensor(amps, c.L, err, g.sites)
    return StateVector(state.L, amps)


def circuit_unitary(c: Circuit) -> np.ndarray:
    """Dense operator of the circuit (L <= 8), in the global bit ordering."""
    if c.L > 8:
        raise CapacityError(f"dense circuit unitary limited to L <= 8, got {c.L}")
    U = np.eye(2**c.L, dtype=complex)
    for g in c.gates:
        U = _apply_gate_tensor(U, c.L, g.matrix(), g.sites)
    return U


def circuit_to_text(c: Circuit) -> str:
    """Line format: one gate per line `KIND site[,site] [angle]`; `#layer`
    lines mark layer boundaries.  Angles use repr for bit-exact round-trip."""
    lines = [f"# sptchain circuit L={c.L}"]
    for gates in c.layer_gates():
        lines.append("#layer")
        for g in gates:
            parts = [g.kind, ",".join(str(s) for s in g.sites)]
            if g.angle is not None:
                parts.append(repr(g.angle))
            lines.append(" ".join(parts))
    return "\n".join(lines) + "\n"


def circuit_from_text(text: str) -> Circuit:
    L = None
    gates: list[Gate] = []
    layers: list[int] = []
    for raw in text.splitlines():
        line = raw.strip()
        if not line:
            continue
        if line.startswith("#"):
            if line.startswith("# sptchain circuit L="):
                L = int(line.rsplit("=", 1)[1])
            elif line == "#layer":
                layers.append(0)
            continue
        parts = line.split()
        try:
            kind = parts[0]
            sites = tuple(int(s) for s in parts[1].split(","))
            angle = float(parts[2]) if len(parts) > 2 else None
        except (IndexError, ValueError) as exc:
            raise ContractError(f"malformed gate line {line!r}") from exc
        gates.append(Gate(kind, sites, angle))
        if not layers:
            layers.append(0)
        layers[-1] += 1
    if L is None:
        raise ContractError("missing size header line")
    layers = [n for n in layers if n > 0]
    return Circuit(L, tuple(gates), tuple(layers))
