"""Variational compilation of the interacting interval into the gate set.

Two layers: plain gradient descent on a fixed parameterized circuit, and a
neuroevolution-style search that grows circuit ansatze along a directed graph
of layer templates until the loss threshold is met.
"""

from __future__ import annotations

from dataclasses import dataclass, field, replace

import numpy as np

from .circuit import (Circuit, CircuitBuilder, Gate, ROTATION_KINDS,
                      circuit_unitary, _apply_gate_tensor)
from .errors import CapacityError, ContractError

_GEN = {
    "X": np.array([[0, 1], [1, 0]], dtype=complex),
    "Y": np.array([[0, -1j], [1j, 0]], dtype=complex),
    "Z": np.array([[1, 0], [0, -1]], dtype=complex),
}
# CRz differentiates to -i/2 |1><1| (x) sigma_z inserted after the gate
_GEN["CRZ"] = np.kron(np.diag([0.0, 1.0]), _GEN["Z"]).astype(complex)


@dataclass(frozen=True)
class ParamCircuit:
    """Circuit skeleton whose rotation angles are free parameters."""

    skeleton: Circuit
    parameters: tuple[float, ...]

    def __post_init__(self):
        n_rot = sum(1 for g in self.skeleton.gates if g.kind in ROTATION_KINDS)
        if n_rot != len(self.parameters):
            raise ContractError(
                f"{n_rot} rotation gates but {len(self.parameters)} parameters")

    @property
    def L(self) -> int:
        return self.skeleton.L

    def bind(self) -> Circuit:
        gates, i = [], 0
        for g in self.skeleton.gates:
            if g.kind in ROTATION_KINDS:
                gates.append(Gate(g.kind, g.sites, self.parameters[i]))
                i += 1
            else:
                gates.append(g)
        return Circuit(self.L, tuple(gates), self.skeleton.layers)

    def with_parameters(self, theta) -> "ParamCircuit":
        return replace(self, parameters=tuple(float(t) for t in theta))


def fidelity_loss(pc: ParamCircuit, target: np.ndarray) -> float:
    """1 - |Tr(target^dag U_circuit)| / d, phase-free by the modulus."""
    d = 2**pc.L
    if target.shape != (d, d):
        raise ContractError(f"target shape {target.shape} != ({d}, {d})")
    if pc.L > 8:
        raise CapacityError("compilation limited to L <= 8")
    U = circuit_unitary(pc.bind())
    return 1.0 - abs(np.trace(target.conj().T @ U)) / d


def loss_gradient(pc: ParamCircuit, target: np.ndarray) -> np.ndarray:
    """Analytic gradient of fidelity_loss with respect to every angle.

    d/dtheta of a rotation gate inserts -i/2 times its generator; the loss
    derivative follows from d|z|/dtheta = Re(conj(z) dz/dtheta) / |z|.
    """
    d = 2**pc.L
    if target.shape != (d, d):
        raise ContractError(f"target shape {target.shape} != ({d}, {d})")
    bound = pc.bind()
    gates = bound.gates
    # suffix[k] = product of gates k..end applied to the identity
    suffix = [None] * (len(gates) + 1)
    acc = np.eye(d, dtype=complex)
    suffix[0] = acc
    for k, g in enumerate(gates):
        acc = _apply_gate_tensor(acc, bound.L, g.matrix(), g.sites)
        suffix[k + 1] = acc
    U = suffix[len(gates)]
    z = np.trace(target.conj().T @ U)
    if abs(z) < 1e-15:
        return np.zeros(len(pc.parameters))
    # Two-sweep scheme: z = Tr[rest @ suffix[k]] holds at every k, with rest
    # absorbing gates from the back; inserting -i/2 G after gate k gives dz.
    grad = np.empty(len(pc.parameters))
    rest = target.conj().T
    idx = len(pc.parameters)
    for k in range(len(gates) - 1, -1, -1):
        g = gates[k]
        if g.kind in ROTATION_KINDS:
            idx -= 1
            gen = _GEN[g.kind]
            # dz = Tr[rest @ (-i/2 G on sites) @ suffix[k+1]]
            inserted = _apply_gate_tensor(suffix[k + 1], bound.L,
                                          -0.5j * gen, g.sites)
            dz = np.trace(rest @ inserted)
            grad[idx] = -float(np.real(np.conj(z) * dz)) / (abs(z) * d)
        # move gate k from the suffix side into rest: rest <- rest @ G_k
        rest = _apply_gate_tensor(rest.T, bound.L, g.matrix().T, g.sites).T
    return grad


@dataclass(frozen=True)
class OptimizeResult:
    parameters: tuple[float, ...]
    loss: float
    trace: tuple[float, ...]
    iterations: int
    converged: bool


def optimize(pc: ParamCircuit, target: np.ndarray, alpha: float = 0.005,
             threshold: float = 0.001, max_iterations: int = 5000) -> OptimizeResult:
    """Fixed-step gradient descent with step-halving on loss increase."""
    if alpha < 0:
        raise ContractError("learning rate must be >= 0")
    theta = np.array(pc.parameters, dtype=float)
    loss = fidelity_loss(pc.with_parameters(theta), target)
    trace = [loss]
    it = 0
    while loss > threshold and it < max_iterations and alpha > 0:
        grad = loss_gradient(pc.with_parameters(theta), target)
        step = alpha
        for _ in range(30):
            cand = theta - step * grad
            cand_loss = fidelity_loss(pc.with_parameters(cand), target)
            if cand_loss <= loss:
                break
            step /= 2
        else:
            break  # no descent direction at any step size: stop
        theta, loss = cand, cand_loss
        trace.append(loss)
        it += 1
    return OptimizeResult(tuple(theta), loss, tuple(trace), it, loss <= threshold)


# --- neuroevolution ansatz search -----------------------------------------

LAYER_TEMPLATES = ("rx", "ry", "rz", "cze", "czo", "crze", "crzo")
# single-qubit layers may follow entangling layers and vice versa; identical
# consecutive single-qubit layers are redundant, so edges skip self-loops on
# the same rotation axis
ANSATZ_EDGES = {
    t: tuple(u for u in LAYER_TEMPLATES if u != t) for t in LAYER_TEMPLATES
}


def _template_gates(template: str, L: int) -> list[Gate]:
    if template in ("rx", "ry", "rz"):
        kind = template[1].upper()
        return [Gate(kind, (s,), 0.0) for s in range(1, L + 1)]
    odd = template.endswith("o")
    if template.startswith("crz"):
        return [Gate("CRZ", (k, k + 1), 0.0)
                for k in range(1, L) if k % 2 == (1 if odd else 0)]
    return [Gate("CZ", (k, k + 1))
            for k in range(1, L) if k % 2 == (1 if odd else 0)]


def ansatz_from_path(path, L: int) -> ParamCircuit:
    """Decode a template path into a zero-initialized ParamCircuit."""
    b = CircuitBuilder(L)
    for t in path:
        if t not in LAYER_TEMPLATES:
            raise ContractError(f"unknown layer template {t!r}")
        b.layer(_template_gates(t, L))
    skel = b.build()
    n_rot = sum(1 for g in skel.gates if g.kind in ROTATION_KINDS)
    return ParamCircuit(skel, (0.0,) * n_rot)


@dataclass(frozen=True)
class SearchResult:
    circuit: ParamCircuit
    path: tuple[str, ...]
    loss: float
    generations: int
    converged: bool


def neuroevolution_search(target: np.ndarray, L: int, beta: float = 0.001,
                          population: int = 8, initial_length: int = 4,
                          survivors: int = 2, generation_cap: int = 50,
                          alpha: float = 0.005, max_iterations: int = 2000,
                          seed: int = 0,
                          seed_paths: tuple[tuple[str, ...], ...] = ()) -> SearchResult:
    """Grow circuit ansatze along the template graph until loss <= beta.

    Each member is a template path; every generation optimizes all members,
    keeps the best `survivors`, and extends them along graph edges.  Paths in
    ``seed_paths`` join the initial population (physics-informed warm starts).
    """
    if beta <= 0:
        raise ContractError("beta must be > 0")
    rng = np.random.Generator(np.random.Philox(key=np.uint64(seed)))

    def random_path(length):
        path = [str(rng.choice(LAYER_TEMPLATES))]
        while len(path) < length:
            path.append(str(rng.choice(ANSATZ_EDGES[path[-1]])))
        return tuple(path)

    def evaluate(path):
        pc = ansatz_from_path(path, L)
        init = rng.uniform(-np.pi, np.pi, len(pc.parameters))
        res = optimize(pc.with_parameters(init), target, alpha=alpha,
                       threshold=beta, max_iterations=max_iterations)
        return pc.with_parameters(res.parameters), res.loss

    paths = list(seed_paths)[:population]
    while len(paths) < population:
        paths.append(random_path(initial_length))
    best = None
    for gen in range(generation_cap + 1):
        scored = []
        for i, path in enumerate(paths):
            pc, loss = evaluate(path)
            scored.append((loss, i, path, pc))
        scored.sort(key=lambda t: (t[0], t[1]))
        loss, _, path, pc = scored[0]
        if best is None or loss < best.loss:
            best = SearchResult(pc, tuple(path), loss, gen, loss <= beta)
        if best.loss <= beta or gen == generation_cap:
            return replace(best, converged=best.loss <= beta)
        keep = [tuple(s[2]) for s in scored[:survivors]]
        paths = list(keep)
        i = 0
        while len(paths) < population:
            base = keep[i % len(keep)]
            ext = str(rng.choice(ANSATZ_EDGES[base[-1]]))
            paths.append(base + (ext,))
            i += 1
    return best


def sandwich_ansatz(L: int) -> tuple[str, ...]:
    """The cluster sandwich as a template path: entanglers, a single-qubit
    block rich enough to absorb H.Z.H, and the mirrored entanglers."""
    return ("cze", "czo", "ry", "rx", "rz", "ry", "rx", "czo", "cze")
