"""Circuits for ``exp(-i A t)`` with ``A`` real symmetric and graph-sparse.

``A`` is split into its diagonal ``D`` and one 1-sparse term per colour class
of a greedy edge colouring of its off-diagonal pattern.  Each term is
exponentiated exactly and the product is Trotterised:
``(exp(-i D t/m) prod_c exp(-i M_c t/m))**m``.

Two gate flavours are emitted:

* oracle (default): ``DIAG`` for ``D`` and one ``TWO_LEVEL`` block per matched pair;
* strict: only X, H, CX, multi-controlled X and (multi-)controlled phase.
  ``D`` is written into a memory register with multi-controlled bit-flips,
  phased bit by bit with ``P(-2**i t)`` and uncomputed, so it needs integer
  diagonal entries.  A matched pair is rotated onto a single qubit with a CX
  ladder, then ``H exp(-i w t Z) H`` is applied under a multi-control.

Every strict block has the shape ``V (phases) V^-1`` where removing the phase
gates leaves the identity; :func:`controlled_power` relies on this and only
attaches the control qubit to phase gates.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .errors import InvalidInputError
from .graph import Graph
from .quantum import (CX, Circuit, Controlled, Diag, Gate, H, P, TwoLevel, Unitary, X,
                      circuit_unitary)


@dataclass(frozen=True)
class EdgeColoring:
    color_of: dict
    classes: tuple[tuple[tuple[int, int], ...], ...]

    @property
    def n_colors(self) -> int:
        return len(self.classes)

    def is_proper(self) -> bool:
        for cls in self.classes:
            ends = [v for e in cls for v in e]
            if len(ends) != len(set(ends)):
                return False
        return True


def greedy_edge_coloring(g: Graph) -> EdgeColoring:
    """Colour edges in lexicographic order with the smallest colour free at both ends."""
    used: list[set[int]] = [set() for _ in range(g.n)]
    color_of = {}
    for u, v in g.edges:
        c = 0
        while c in used[u] or c in used[v]:
            c += 1
        color_of[(u, v)] = c
        used[u].add(c)
        used[v].add(c)
    n_colors = max(color_of.values(), default=-1) + 1
    classes = tuple(tuple(e for e in g.edges if color_of[e] == c) for c in range(n_colors))
    return EdgeColoring(color_of, classes)


def decompose(a: np.ndarray, g: Graph | None = None) -> tuple[np.ndarray, EdgeColoring]:
    """Split ``a`` into its diagonal and an edge colouring of its off-diagonal part."""
    a = np.asarray(a, dtype=float)
    n = a.shape[0]
    if a.shape != (n, n) or not np.array_equal(a, a.T):
        raise InvalidInputError("matrix must be square and exactly symmetric")
    rows, cols = np.nonzero(np.triu(a, k=1))
    pattern = set(zip(rows.tolist(), cols.tolist()))
    if g is None:
        g = Graph(n, tuple(pattern))
    elif g.n != n or set(g.edges) != pattern:
        raise InvalidInputError("off-diagonal pattern of the matrix does not match the graph")
    return np.diag(a).copy(), greedy_edge_coloring(g)


def weighted_classes(a: np.ndarray, coloring: EdgeColoring):
    return tuple(tuple((i, j, float(a[i, j])) for i, j in cls) for cls in coloring.classes)


def pad_to_power_of_two(a: np.ndarray, b: np.ndarray | None = None):
    """Pad ``a`` (and ``b``) to the next power-of-two dimension with decoupled rows.

    The padding diagonal value is 1 when 1 lies in ``[lambda_min, lambda_max]``,
    otherwise the smallest diagonal entry of ``a`` (always inside that range),
    so the condition number is unchanged.  Returns ``(a_pad, b_pad, pad_value)``.
    """
    a = np.asarray(a, dtype=float)
    n = a.shape[0]
    dim = 1 << max(1, math.ceil(math.log2(n))) if n > 1 else 2
    b_pad = None
    if b is not None:
        b_pad = np.zeros(dim)
        b_pad[:n] = b
    if dim == n:
        return a.copy(), b_pad, None
    w = np.linalg.eigvalsh(a)
    pad = 1.0 if w[0] <= 1.0 <= w[-1] else float(np.min(np.diag(a)))
    out = np.zeros((dim, dim))
    out[:n, :n] = a
    out[np.arange(n, dim), np.arange(n, dim)] = pad
    return out, b_pad, pad


def _system_qubits(dim: int) -> int:
    q = int(round(math.log2(dim)))
    if dim < 2 or 1 << q != dim:
        raise InvalidInputError(f"dimension {dim} is not a power of two >= 2")
    return q


def memory_bits(d: np.ndarray) -> int:
    d = np.asarray(d, dtype=float)
    if np.any(d < 0) or np.any(d != np.round(d)):
        raise InvalidInputError("strict diagonal circuits need non-negative integer entries")
    return max(1, int(np.max(d)).bit_length())


def exp_diagonal(d: np.ndarray, t: float, *, strict: bool = False,
                 n_qubits: int | None = None) -> Circuit:
    """Circuit for ``exp(-i D t)`` with ``D = diag(d)`` on the low ``log2(len(d))`` qubits.

    Strict mode places a memory register of ``memory_bits(d)`` qubits directly
    above the index register; it must start (and ends) in ``|0>``.
    """
    d = np.asarray(d, dtype=float)
    qs = _system_qubits(len(d))
    if not strict:
        circ = Circuit(n_qubits or qs)
        return circ.add(Diag(np.exp(-1j * d * t)), *range(qs))

    w = memory_bits(d)
    circ = Circuit(n_qubits or qs + w)
    memory = list(range(qs, qs + w))
    index_qubits = tuple(range(qs))
    load = Circuit(circ.q)
    for a, val in enumerate(d.astype(int)):
        if val == 0:
            continue
        zeros = [b for b in range(qs) if not (a >> b) & 1]
        for b in zeros:
            load.add(X, b)
        for bit in range(w):
            if (val >> bit) & 1:
                load.add(Controlled(X, index_qubits), memory[bit])
        for b in zeros:
            load.add(X, b)
    circ.extend(load)
    for bit in range(w):
        circ.add(P(-(2 ** bit) * t), memory[bit])
    circ.extend(load)
    return circ


def _pair_block(w: float, t: float) -> np.ndarray:
    c, s = math.cos(w * t), math.sin(w * t)
    return np.array([[c, -1j * s], [-1j * s, c]])


def exp_matching(pairs: Sequence[tuple[int, int, float]], t: float, n_qubits: int, *,
                 strict: bool = False, system_qubits: int | None = None) -> Circuit:
    """Circuit for ``exp(-i M t)`` where ``M`` has symmetric weight ``w`` on each pair ``(i, j)``."""
    qs = system_qubits if system_qubits is not None else n_qubits
    ends = [v for i, j, _ in pairs for v in (i, j)]
    if len(ends) != len(set(ends)):
        raise InvalidInputError("colour class is not a matching")
    if any(not 0 <= v < (1 << qs) for v in ends):
        raise InvalidInputError("matched index outside the system register")
    circ = Circuit(n_qubits)
    for i, j, w in pairs:
        if not strict:
            circ.add(TwoLevel(_pair_block(w, t), i, j, qs), *range(qs))
            continue
        diff = i ^ j
        p = (diff & -diff).bit_length() - 1
        if (i >> p) & 1:
            i, j = j, i
        basis = Circuit(n_qubits)
        for b in range(qs):
            if b != p and (diff >> b) & 1:
                basis.add(CX, p, b)
        for b in range(qs):
            if b != p and not (i >> b) & 1:
                basis.add(X, b)
        basis.add(H, p)
        controls = tuple(b for b in range(qs) if b != p)
        circ.extend(basis)
        if controls:
            circ.add(X, p).add(Controlled(P(-w * t), controls), p)
            circ.add(X, p).add(Controlled(P(w * t), controls), p)
        else:
            circ.add(X, p).add(P(-w * t), p).add(X, p).add(P(w * t), p)
        circ.extend(basis.inverse())
    return circ


@dataclass(frozen=True, eq=False)
class TrotterPlan:
    """First-order product formula for ``exp(-i A t)``.

    ``matrix`` is the padded operator, ``terms`` lists ``("diag", d)`` first
    and then ``("matching", colour, pairs)`` in ascending colour order.
    """

    t: float
    m: int
    terms: tuple
    epsilon: float
    nu: float
    matrix: np.ndarray
    system_qubits: int
    workspace_qubits: int
    strict: bool

    @property
    def qubits(self) -> int:
        return self.system_qubits + self.workspace_qubits

    def step_circuit(self) -> Circuit:
        """One Trotter step ``exp(-i D t/m) prod_c exp(-i M_c t/m)``."""
        dt = self.t / self.m
        circ = Circuit(self.qubits)
        for term in self.terms:
            if term[0] == "diag":
                circ.extend(exp_diagonal(term[1], dt, strict=self.strict, n_qubits=self.qubits))
            else:
                circ.extend(exp_matching(term[2], dt, self.qubits, strict=self.strict,
                                         system_qubits=self.system_qubits))
        return circ


def trotter_plan(a: np.ndarray, g: Graph | None, t: float, epsilon: float, *,
                 strict: bool = False, steps: int | None = None) -> TrotterPlan:
    """Choose ``m = ceil((nu t)**2 / epsilon)`` with ``nu`` the largest term norm.

    ``g`` describes the off-diagonal pattern of ``a`` (derived when None).
    ``steps`` overrides the step count.
    """
    if epsilon <= 0:
        raise InvalidInputError("epsilon must be positive")
    a = np.asarray(a, dtype=float)
    n = a.shape[0]
    padded, _, _ = pad_to_power_of_two(a)
    if g is not None and padded.shape[0] != n:
        g = Graph(padded.shape[0], g.edges)
    d, coloring = decompose(padded, g)
    classes = weighted_classes(padded, coloring)
    terms = (("diag", d),) + tuple(("matching", c, pairs) for c, pairs in enumerate(classes))
    norms = [float(np.max(np.abs(d)))] + [max(abs(w) for _, _, w in pairs) for pairs in classes]
    nu = max(norms)
    active = sum(1 for x in norms if x > 0.0)
    if steps is not None:
        if steps < 1:
            raise InvalidInputError("step count must be at least 1")
        m = int(steps)
    elif active <= 1:
        m = 1
    else:
        m = max(1, math.ceil((nu * abs(t)) ** 2 / epsilon))
    qs = _system_qubits(padded.shape[0])
    work = memory_bits(d) if strict else 0
    padded.setflags(write=False)
    return TrotterPlan(float(t), m, terms, float(epsilon), nu, padded, qs, work, strict)


def trotter_circuit(a: np.ndarray, g: Graph | None, t: float, epsilon: float, *,
                    strict: bool = False, steps: int | None = None) -> tuple[Circuit, TrotterPlan]:
    plan = trotter_plan(a, g, t, epsilon, strict=strict, steps=steps)
    return plan.step_circuit().repeated(plan.m), plan


def system_operator(circ: Circuit, system_qubits: int) -> np.ndarray:
    """Block of ``circ`` acting on the low register with every higher qubit in ``|0>``."""
    dim = 1 << system_qubits
    return circuit_unitary(circ, columns=range(dim))[:dim, :]


def _phase_controlled(gate: Gate, control: int) -> Gate:
    if isinstance(gate, P) or (isinstance(gate, Controlled) and isinstance(gate.inner, P)):
        return Controlled(gate, (control,))
    return gate


def controlled_power(plan: TrotterPlan, k: int, control: int, *, mode: str = "strict",
                     register: Sequence[int] | None = None,
                     n_qubits: int | None = None) -> Circuit:
    """Controlled ``U**(2**k)`` for the unitary ``U`` described by ``plan``.

    ``mode="strict"`` repeats the Trotter circuit ``2**k`` times under the
    control; ``mode="oracle"`` applies the exact power through the eigenbasis
    of the padded matrix as ``V . controlled-DIAG . V^T``.  ``register`` maps
    the plan's local qubits to absolute indices.
    """
    if k < 0:
        raise InvalidInputError("power exponent must be non-negative")
    register = list(range(plan.qubits)) if register is None else list(register)
    if len(register) < plan.qubits:
        raise InvalidInputError("register mapping is shorter than the plan's register")
    if control in register[:plan.qubits]:
        raise InvalidInputError("control qubit overlaps the target register")
    width = n_qubits or max(register[:plan.qubits] + [control]) + 1
    out = Circuit(width)
    system = register[:plan.system_qubits]

    if mode == "oracle":
        w, v = np.linalg.eigh(plan.matrix)
        phases = np.exp(-1j * w * plan.t * (2 ** k))
        out.add(Unitary(v.T), *system)
        out.add(Controlled(Diag(phases), (control,)), *system)
        out.add(Unitary(v), *system)
        return out
    if mode != "strict":
        raise InvalidInputError(f"unknown mode {mode!r}")

    local_control = plan.qubits
    step = plan.step_circuit().widened(plan.qubits + 1)
    ctrl_step = Circuit(step.q)
    for gate, targets in step.ops:
        g2 = _phase_controlled(gate, local_control) if plan.strict else Controlled(gate, (local_control,))
        ctrl_step.add(g2, *targets)
    mapping = register[:plan.qubits] + [control]
    body = Circuit(width).extend(ctrl_step, mapping)
    return body.repeated(plan.m * (2 ** k))
