"""Dense state-vector simulator.

Qubit 0 is the least-significant bit of a basis-state index.  A gate acting on
``targets`` sees a local index in which ``targets[0]`` is the least
significant bit, so ``gate.matrix()[i, j]`` is the amplitude map between local
indices ``j -> i`` in that convention.

Gates are applied by viewing the amplitude vector as a ``(2,)*q`` tensor,
fixing control axes to 1 and contracting the target axes; no ``2**q`` sized
operator is ever formed.  Amplitude buffers have a leading batch axis so the
same kernel can push a whole basis (a unitary) through a circuit.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .errors import InvalidInputError
from .rng import Xorshift64Star

_SQRT_HALF = 1.0 / np.sqrt(2.0)


class Gate:
    """Base class; subclasses define ``arity``, ``matrix`` and ``adjoint``."""

    arity = 1

    def matrix(self) -> np.ndarray:
        raise NotImplementedError

    def adjoint(self) -> "Gate":
        raise NotImplementedError

    def relabel(self, mapping) -> "Gate":
        return self


@dataclass(frozen=True)
class Named(Gate):
    """A fixed gate from the table: I, X, Z, H (one qubit), CX (two), TOFFOLI (three)."""

    name: str

    def __post_init__(self):
        if self.name not in _NAMED:
            raise InvalidInputError(f"unknown gate {self.name!r}")

    @property
    def arity(self) -> int:
        return {"CX": 2, "TOFFOLI": 3}.get(self.name, 1)

    def matrix(self) -> np.ndarray:
        return _NAMED[self.name]()

    def adjoint(self) -> "Named":
        return self


def _controlled_x_matrix(k: int) -> np.ndarray:
    # controls are the low k-1 local bits, target is the top bit
    dim = 1 << k
    m = np.eye(dim, dtype=complex)
    lo = (1 << (k - 1)) - 1
    hi = lo | (1 << (k - 1))
    m[[lo, hi]] = m[[hi, lo]]
    return m


_NAMED = {
    "I": lambda: np.eye(2, dtype=complex),
    "X": lambda: np.array([[0, 1], [1, 0]], dtype=complex),
    "Z": lambda: np.array([[1, 0], [0, -1]], dtype=complex),
    "H": lambda: np.array([[1, 1], [1, -1]], dtype=complex) * _SQRT_HALF,
    "CX": lambda: _controlled_x_matrix(2),
    "TOFFOLI": lambda: _controlled_x_matrix(3),
}

I = Named("I")
X = Named("X")
Z = Named("Z")
H = Named("H")
CX = Named("CX")
TOFFOLI = Named("TOFFOLI")


@dataclass(frozen=True)
class P(Gate):
    """Phase gate ``diag(1, exp(i theta))``."""

    theta: float

    def matrix(self) -> np.ndarray:
        return np.diag([1.0, np.exp(1j * self.theta)]).astype(complex)

    def adjoint(self) -> "P":
        return P(-self.theta)


@dataclass(frozen=True, eq=False)
class Diag(Gate):
    """Diagonal unitary over its targets: multiplies local basis state ``a`` by ``phases[a]``."""

    phases: np.ndarray

    def __post_init__(self):
        ph = np.asarray(self.phases, dtype=complex).copy()
        k = int(round(np.log2(len(ph)))) if len(ph) else -1
        if k < 1 or len(ph) != 1 << k:
            raise InvalidInputError("DIAG needs 2**k phases with k >= 1")
        ph.setflags(write=False)
        object.__setattr__(self, "phases", ph)

    @property
    def arity(self) -> int:
        return int(np.log2(len(self.phases)))

    def matrix(self) -> np.ndarray:
        return np.diag(self.phases)

    def adjoint(self) -> "Diag":
        return Diag(np.conj(self.phases))


@dataclass(frozen=True, eq=False)
class TwoLevel(Gate):
    """2x2 unitary ``u`` acting on local basis states ``i`` and ``j`` of ``arity`` qubits."""

    u: np.ndarray
    i: int
    j: int
    arity: int = 1

    def __post_init__(self):
        u = np.asarray(self.u, dtype=complex).copy()
        if u.shape != (2, 2):
            raise InvalidInputError("TWO_LEVEL needs a 2x2 matrix")
        dim = 1 << self.arity
        if self.i == self.j or not (0 <= self.i < dim and 0 <= self.j < dim):
            raise InvalidInputError("TWO_LEVEL indices must be distinct and in range")
        u.setflags(write=False)
        object.__setattr__(self, "u", u)

    def matrix(self) -> np.ndarray:
        m = np.eye(1 << self.arity, dtype=complex)
        idx = [self.i, self.j]
        m[np.ix_(idx, idx)] = self.u
        return m

    def adjoint(self) -> "TwoLevel":
        return TwoLevel(self.u.conj().T, self.i, self.j, self.arity)


@dataclass(frozen=True, eq=False)
class Unitary(Gate):
    """Arbitrary dense unitary over its targets (exact-oracle primitive)."""

    u: np.ndarray

    def __post_init__(self):
        u = np.asarray(self.u, dtype=complex).copy()
        k = int(round(np.log2(u.shape[0]))) if u.ndim == 2 and u.shape[0] else -1
        if k < 1 or u.shape != (1 << k, 1 << k):
            raise InvalidInputError("UNITARY needs a 2**k x 2**k matrix")
        u.setflags(write=False)
        object.__setattr__(self, "u", u)

    @property
    def arity(self) -> int:
        return int(np.log2(self.u.shape[0]))

    def matrix(self) -> np.ndarray:
        return self.u.copy()

    def adjoint(self) -> "Unitary":
        return Unitary(self.u.conj().T)


@dataclass(frozen=True, eq=False)
class Controlled(Gate):
    """``inner`` applied only where every qubit in ``controls`` is 1.

    Controls are absolute qubit indices; targets are those of ``inner``.
    Nested controls are flattened on construction.
    """

    inner: Gate
    controls: tuple[int, ...]

    def __post_init__(self):
        inner, controls = self.inner, tuple(int(c) for c in self.controls)
        if isinstance(inner, Controlled):
            controls = controls + inner.controls
            inner = inner.inner
        if not controls or len(set(controls)) != len(controls):
            raise InvalidInputError("controls must be a non-empty list of distinct qubits")
        object.__setattr__(self, "inner", inner)
        object.__setattr__(self, "controls", controls)

    @property
    def arity(self) -> int:
        return self.inner.arity

    def matrix(self) -> np.ndarray:
        """Matrix over ``controls + targets`` with the controls as the low local bits."""
        k = len(self.controls)
        inner = self.inner.matrix()
        dim = (1 << k) * inner.shape[0]
        m = np.eye(dim, dtype=complex)
        on = (1 << k) - 1
        idx = [on + (t << k) for t in range(inner.shape[0])]
        m[np.ix_(idx, idx)] = inner
        return m

    def adjoint(self) -> "Controlled":
        return Controlled(self.inner.adjoint(), self.controls)

    def relabel(self, mapping) -> "Controlled":
        return Controlled(self.inner.relabel(mapping), tuple(mapping[c] for c in self.controls))


def ry_matrix(theta: float) -> np.ndarray:
    c, s = np.cos(theta / 2), np.sin(theta / 2)
    return np.array([[c, -s], [s, c]], dtype=complex)


def is_strict(gate: Gate) -> bool:
    """True for the table gates plus (multi-)controlled phase and bit-flip."""
    if isinstance(gate, (Named, P)):
        return True
    if isinstance(gate, Controlled):
        return isinstance(gate.inner, P) or gate.inner == X
    return False


# -- kernel -----------------------------------------------------------------

def _apply_buffer(buf: np.ndarray, q: int, gate: Gate, targets: Sequence[int],
                  controls: Sequence[int] = ()) -> None:
    """Apply ``gate`` in place to ``buf`` of shape ``(batch, 2**q)``."""
    if isinstance(gate, Controlled):
        _apply_buffer(buf, q, gate.inner, targets, tuple(controls) + gate.controls)
        return
    if isinstance(gate, Named) and gate.name in ("CX", "TOFFOLI"):
        _apply_buffer(buf, q, X, targets[-1:], tuple(controls) + tuple(targets[:-1]))
        return
    if isinstance(gate, Named) and gate.name == "I":
        return

    tensor = buf.reshape((buf.shape[0],) + (2,) * q)
    index: list = [slice(None)] * (q + 1)
    for c in controls:
        index[q - c] = 1
    sub = tensor[tuple(index)]
    free = [j for j in range(q - 1, -1, -1) if j not in controls]
    k = len(targets)
    src = [1 + free.index(t) for t in reversed(targets)]
    view = np.moveaxis(sub, src, list(range(sub.ndim - k, sub.ndim)))
    shape = view.shape
    block = view.reshape(shape[:-k] + (1 << k,))

    if isinstance(gate, Diag):
        new = block * gate.phases
    elif isinstance(gate, P):
        new = block.copy()
        new[..., 1] *= np.exp(1j * gate.theta)
    elif isinstance(gate, TwoLevel):
        new = block.copy()
        pair = block[..., [gate.i, gate.j]]
        new[..., [gate.i, gate.j]] = pair @ gate.u.T
    else:
        new = block @ gate.matrix().T
    view[...] = new.reshape(shape)


def _check_targets(q: int, gate: Gate, targets: Sequence[int]) -> tuple[int, ...]:
    targets = tuple(int(t) for t in targets)
    if len(targets) != gate.arity:
        raise InvalidInputError(f"{gate!r} acts on {gate.arity} qubit(s), got targets {targets}")
    used = targets + (gate.controls if isinstance(gate, Controlled) else ())
    if len(set(used)) != len(used):
        raise InvalidInputError(f"targets and controls must be distinct, got {used}")
    if any(not 0 <= t < q for t in used):
        raise InvalidInputError(f"qubit index out of range for {q} qubits: {used}")
    return targets


# -- state ------------------------------------------------------------------

@dataclass
class StateVector:
    q: int
    amps: np.ndarray

    def __post_init__(self):
        self.amps = np.ascontiguousarray(self.amps, dtype=complex)
        if self.amps.shape != (1 << self.q,):
            raise InvalidInputError(f"expected {1 << self.q} amplitudes, got {self.amps.shape}")

    @classmethod
    def basis(cls, q: int, index: int = 0) -> "StateVector":
        amps = np.zeros(1 << q, dtype=complex)
        amps[index] = 1.0
        return cls(q, amps)

    @classmethod
    def from_vector(cls, v) -> "StateVector":
        v = np.asarray(v, dtype=complex)
        q = int(round(np.log2(len(v))))
        norm = np.linalg.norm(v)
        if norm == 0.0:
            raise InvalidInputError("cannot normalise the zero vector")
        return cls(q, v / norm)

    def copy(self) -> "StateVector":
        return StateVector(self.q, self.amps.copy())

    def norm(self) -> float:
        return float(np.linalg.norm(self.amps))

    def probabilities(self) -> np.ndarray:
        return np.abs(self.amps) ** 2

    def tensor(self, other: "StateVector") -> "StateVector":
        """``self`` on the low qubits, ``other`` on the qubits above them."""
        return StateVector(self.q + other.q, np.kron(other.amps, self.amps))


def apply(state: StateVector, op: Gate, targets: Sequence[int]) -> StateVector:
    targets = _check_targets(state.q, op, targets)
    out = state.copy()
    _apply_buffer(out.amps.reshape(1, -1), out.q, op, targets)
    return out


@dataclass
class Circuit:
    q: int
    ops: list = field(default_factory=list)

    def add(self, gate: Gate, *targets: int) -> "Circuit":
        self.ops.append((gate, _check_targets(self.q, gate, targets)))
        return self

    def extend(self, other: "Circuit", mapping: Sequence[int] | None = None) -> "Circuit":
        """Append ``other``'s ops, optionally sending its qubit ``j`` to ``mapping[j]``."""
        if mapping is None:
            if other.q > self.q:
                raise InvalidInputError("appended circuit is wider than the target")
            self.ops.extend(other.ops)
        else:
            for gate, targets in other.ops:
                self.add(gate.relabel(mapping), *(mapping[t] for t in targets))
        return self

    def inverse(self) -> "Circuit":
        return Circuit(self.q, [(g.adjoint(), t) for g, t in reversed(self.ops)])

    def repeated(self, times: int) -> "Circuit":
        return Circuit(self.q, list(self.ops) * times)

    def widened(self, q: int) -> "Circuit":
        if q < self.q:
            raise InvalidInputError("cannot narrow a circuit")
        return Circuit(q, list(self.ops))

    def is_strict(self) -> bool:
        return all(is_strict(g) for g, _ in self.ops)

    def __len__(self) -> int:
        return len(self.ops)


def run(circ: Circuit, initial: StateVector) -> StateVector:
    if circ.q != initial.q:
        raise InvalidInputError(f"circuit has {circ.q} qubits, state has {initial.q}")
    out = initial.copy()
    buf = out.amps.reshape(1, -1)
    for gate, targets in circ.ops:
        _apply_buffer(buf, circ.q, gate, targets)
    return out


def circuit_unitary(circ: Circuit, columns: Sequence[int] | None = None) -> np.ndarray:
    """Dense matrix of ``circ`` (optionally only the given input columns)."""
    dim = 1 << circ.q
    cols = np.arange(dim) if columns is None else np.asarray(columns)
    buf = np.zeros((len(cols), dim), dtype=complex)
    buf[np.arange(len(cols)), cols] = 1.0
    for gate, targets in circ.ops:
        _apply_buffer(buf, circ.q, gate, targets)
    return buf.T.copy()


# -- measurement ------------------------------------------------------------

def _bit_mask(q: int, k: int) -> np.ndarray:
    if not 0 <= k < q:
        raise InvalidInputError(f"qubit {k} out of range for {q} qubits")
    return ((np.arange(1 << q) >> k) & 1).astype(bool)


def branch_probability(state: StateVector, k: int, bit: int) -> float:
    mask = _bit_mask(state.q, k)
    probs = np.abs(state.amps) ** 2
    return float(np.sum(probs[mask] if bit else probs[~mask]))


def project(state: StateVector, k: int, bit: int) -> StateVector:
    """Post-select qubit ``k`` on ``bit`` and renormalise."""
    p = branch_probability(state, k, bit)
    if p <= 0.0:
        raise InvalidInputError(f"qubit {k} has zero probability of reading {bit}")
    mask = _bit_mask(state.q, k)
    amps = state.amps.copy()
    amps[~mask if bit else mask] = 0.0
    return StateVector(state.q, amps / np.sqrt(p))


def measure_qubit(state: StateVector, k: int, rng: Xorshift64Star) -> tuple[int, StateVector]:
    p1 = branch_probability(state, k, 1)
    bit = 1 if rng.random() < p1 else 0
    return bit, project(state, k, bit)
