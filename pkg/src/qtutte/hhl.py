"""HHL linear-systems solver on the state-vector simulator.

Register layout (qubit 0 least significant)::

    [ system (log2 N) | clock (r) | ancilla (1) | workspace (strict only) ]

so the post-selected solution sits at amplitudes ``2**ancilla + i`` for
``i < N`` (ancilla 1, clock 0, workspace 0).

Phase estimation runs on ``U = exp(+i A t)``; eigenvalue ``lambda`` shows up as
clock value ``k ~ 2**r * lambda * t / (2 pi)``.  The rotation puts amplitude
``C / lambda_k`` on the ancilla's ``|1>`` (``lambda_k = 2 pi k / (2**r t)``),
clock value 0 is left alone, and after uncomputing the clock the ancilla-1
block holds ``C * A^-1 |b>``.
"""

from __future__ import annotations

import json
import math
import warnings
from dataclasses import asdict, dataclass, field, fields
from pathlib import Path
from typing import Callable

import numpy as np

from . import classical
from .errors import DegradedAccuracyWarning, InvalidInputError, NumericalFailure
from .graph import TutteSystem
from .hamiltonian import controlled_power, pad_to_power_of_two, trotter_plan
from .quantum import (CX, Circuit, Controlled, H, P, StateVector, TwoLevel, X,
                      branch_probability, measure_qubit, project, run, ry_matrix)
from .rng import DEFAULT_SEED, Xorshift64Star

MAX_STRICT_DIM = 1 << 7
MAX_QUBITS = 24
MIN_SUCCESS_PROBABILITY = 1e-12
C_POLICIES = ("classical", "floor", "representable")


@dataclass(frozen=True)
class HHLConfig:
    r: int = 8
    t_override: float | None = None
    c_override: float | None = None
    epsilon: float = 1e-2
    mode: str = "oracle"
    seed: int = DEFAULT_SEED
    max_attempts: int = 100
    postselect: str = "project"
    c_policy: str = "floor"

    def __post_init__(self):
        if self.r < 1:
            raise InvalidInputError("need at least one clock qubit")
        if self.mode not in ("oracle", "strict"):
            raise InvalidInputError(f"mode must be 'oracle' or 'strict', got {self.mode!r}")
        if self.postselect not in ("project", "sample"):
            raise InvalidInputError(f"postselect must be 'project' or 'sample'")
        if self.c_policy not in C_POLICIES:
            raise InvalidInputError(f"c_policy must be one of {C_POLICIES}")
        if self.epsilon <= 0:
            raise InvalidInputError("epsilon must be positive")
        if self.c_override is not None and self.c_override <= 0:
            raise InvalidInputError("rotation constant must be positive")
        if self.t_override is not None and self.t_override <= 0:
            raise InvalidInputError("evolution time must be positive")

    @classmethod
    def from_mapping(cls, data: dict) -> "HHLConfig":
        known = {f.name for f in fields(cls)}
        unknown = set(data) - known
        if unknown:
            raise InvalidInputError(f"unknown HHL config keys: {sorted(unknown)}")
        return cls(**data)

    @classmethod
    def load(cls, path: str | Path) -> "HHLConfig":
        try:
            data = json.loads(Path(path).read_text())
        except json.JSONDecodeError as exc:
            raise InvalidInputError(f"config is not valid JSON: {exc}") from None
        return cls.from_mapping(data)

    def to_dict(self) -> dict:
        return asdict(self)


@dataclass
class HHLResult:
    solution: np.ndarray
    success_probability: float
    norm_estimate: float
    fidelity_vs_classical: float | None = None
    imaginary_mass: float = 0.0
    leakage: float = 0.0
    clamped_mass: float = 0.0
    clock_zero_probability: float = 1.0
    t: float = 0.0
    c: float = 0.0
    r: int = 0
    qubits: int = 0
    attempts: int = 1
    diagnostics: dict = field(default_factory=dict)


@dataclass(frozen=True)
class Layout:
    system: int
    clock: int
    workspace: int = 0

    @property
    def system_qubits(self) -> list[int]:
        return list(range(self.system))

    @property
    def clock_qubits(self) -> list[int]:
        return list(range(self.system, self.system + self.clock))

    @property
    def ancilla(self) -> int:
        return self.system + self.clock

    @property
    def workspace_qubits(self) -> list[int]:
        return list(range(self.ancilla + 1, self.ancilla + 1 + self.workspace))

    @property
    def n_qubits(self) -> int:
        return self.ancilla + 1 + self.workspace

    @property
    def solution_offset(self) -> int:
        return 1 << self.ancilla


# -- input state ------------------------------------------------------------

def prepare_vector(b: np.ndarray, q: int) -> tuple[StateVector, float]:
    """Amplitude-encode ``b`` (zero-padded) on ``q`` qubits; also return ``||b||``."""
    b = np.asarray(b, dtype=float)
    if len(b) > 1 << q:
        raise InvalidInputError(f"{len(b)} entries do not fit in {q} qubits")
    norm = float(np.linalg.norm(b))
    if norm == 0.0:
        raise InvalidInputError("cannot prepare the zero vector")
    amps = np.zeros(1 << q, dtype=complex)
    amps[:len(b)] = b / norm
    return StateVector(q, amps), norm


def prepare_b(sys: TutteSystem, axis: str, q: int) -> tuple[StateVector, float]:
    """Input state for one coordinate axis.

    For the soft-grounded construction this is a computational basis state
    (``|2>`` for x, ``|1>`` for y) and the returned norm is 1.
    """
    return prepare_vector(sys.rhs(axis), q)


# -- circuit pieces ---------------------------------------------------------

def _swap(circ: Circuit, a: int, b: int) -> None:
    circ.add(CX, a, b).add(CX, b, a).add(CX, a, b)


def qft_circuit(qubits: list[int], n_qubits: int) -> Circuit:
    """QFT on ``qubits`` (``qubits[0]`` least significant): ``|x> -> sum_y e^{2 pi i xy/N} |y> / sqrt(N)``."""
    circ = Circuit(n_qubits)
    r = len(qubits)
    for i in reversed(range(r)):
        circ.add(H, qubits[i])
        for j in reversed(range(i)):
            circ.add(Controlled(P(math.pi / 2 ** (i - j)), (qubits[j],)), qubits[i])
    for i in range(r // 2):
        _swap(circ, qubits[i], qubits[r - 1 - i])
    return circ


PowerProvider = Callable[[int, int], Circuit]


def phase_estimation_circuit(u: PowerProvider, clock: list[int], n_qubits: int) -> Circuit:
    """Hadamards on the clock, controlled ``U**(2**k)`` ladder, inverse QFT."""
    circ = Circuit(n_qubits)
    for c in clock:
        circ.add(H, c)
    for k, c in enumerate(clock):
        circ.extend(u(k, c).widened(n_qubits))
    circ.extend(qft_circuit(clock, n_qubits).inverse())
    return circ


def phase_estimation(u: PowerProvider, b_state: StateVector, r: int) -> StateVector:
    """Run phase estimation with ``b_state`` on the low qubits and ``r`` clock qubits above.

    ``u(k, control)`` must return a circuit for controlled ``U**(2**k)`` acting
    on the low ``b_state.q`` qubits with the given control qubit.
    """
    n = b_state.q + r
    clock = list(range(b_state.q, n))
    state = b_state.tensor(StateVector.basis(r))
    return run(phase_estimation_circuit(u, clock, n), state)


def clock_eigenvalue(k: int, r: int, t: float) -> float:
    return 2.0 * math.pi * k / ((1 << r) * t)


def _controlled_ry(circ: Circuit, theta: float, controls: tuple[int, ...], target: int,
                   strict: bool) -> None:
    if not strict:
        circ.add(Controlled(TwoLevel(ry_matrix(theta), 0, 1), controls), target)
        return
    # Ry = S H Rz H S^dagger; only the Rz phases need the controls
    circ.add(P(-math.pi / 2), target).add(H, target)
    circ.add(X, target).add(Controlled(P(-theta / 2), controls), target)
    circ.add(X, target).add(Controlled(P(theta / 2), controls), target)
    circ.add(H, target).add(P(math.pi / 2), target)


def rotation_circuit(c: float, r: int, t: float, layout: Layout, *,
                     strict: bool = False) -> tuple[Circuit, list[int]]:
    """Clock-conditioned ancilla rotation; also returns the clock values that had to clamp."""
    circ = Circuit(layout.n_qubits)
    clock = layout.clock_qubits
    clamped = []
    for k in range(1, 1 << r):
        ratio = c / clock_eigenvalue(k, r, t)
        if ratio > 1.0:
            clamped.append(k)
            ratio = 1.0
        theta = 2.0 * math.asin(ratio)
        zeros = [clock[b] for b in range(r) if not (k >> b) & 1]
        for qb in zeros:
            circ.add(X, qb)
        _controlled_ry(circ, theta, tuple(clock), layout.ancilla, strict)
        for qb in zeros:
            circ.add(X, qb)
    return circ, clamped


def clock_distribution(state: StateVector, layout: Layout) -> np.ndarray:
    probs = state.probabilities()
    values = (np.arange(1 << state.q) >> layout.system) & ((1 << layout.clock) - 1)
    return np.bincount(values, weights=probs, minlength=1 << layout.clock)


def conditional_rotation(state: StateVector, c: float, r: int, t: float,
                         layout: Layout | None = None, *, strict: bool = False) -> StateVector:
    """Rotate the ancilla to ``sqrt(1-(c/l)^2)|0> + (c/l)|1>`` for each clock eigenvalue ``l``.

    Without a ``layout`` the ancilla is the top qubit and the clock the ``r``
    qubits directly below it.
    """
    if layout is None:
        layout = Layout(state.q - r - 1, r)
    circ, clamped = rotation_circuit(c, r, t, layout, strict=strict)
    if clamped:
        dist = clock_distribution(state, layout)
        mass = float(dist[clamped].sum())
        if mass > 1e-3:
            warnings.warn(f"rotation clamped on clock values holding {mass:.2e} probability",
                          DegradedAccuracyWarning, stacklevel=2)
    return run(circ, state)


# -- read-out ---------------------------------------------------------------

def extract_solution(final_state: StateVector, dim: int, offset: int,
                     reference: int | np.ndarray | None = None) -> tuple[np.ndarray, float]:
    """Real solution block ``amps[offset:offset+dim]`` and its discarded imaginary mass.

    The block's global phase is removed first.  ``reference`` is either an
    index whose entry is made real and positive, or a real vector ``b`` in
    which case ``<b|block>`` is made real and positive (for SPD ``A`` the true
    solution satisfies ``<b|A^-1 b> > 0``).  Default: the largest entry.
    """
    block = final_state.amps[offset:offset + dim].copy()
    norm = float(np.linalg.norm(block))
    if norm <= 1e-300:
        raise NumericalFailure("solution block is empty")
    if isinstance(reference, np.ndarray):
        anchor = np.vdot(reference[:dim], block)
        if abs(anchor) <= 1e-12 * norm * np.linalg.norm(reference):
            warnings.warn("solution is orthogonal to the reference; aligning on the largest entry",
                          DegradedAccuracyWarning, stacklevel=2)
            reference = None
    elif reference is not None:
        anchor = block[reference]
        if abs(anchor) <= 1e-12 * norm:
            warnings.warn("reference entry of the solution is ~0; aligning on the largest entry",
                          DegradedAccuracyWarning, stacklevel=2)
            reference = None
    if reference is None:
        anchor = block[int(np.argmax(np.abs(block)))]
    block *= np.conj(anchor) / abs(anchor)
    imag = float(np.linalg.norm(block.imag))
    if imag > 1e-3 * norm:
        warnings.warn(f"discarding imaginary mass {imag:.2e} of a block with norm {norm:.2e}",
                      DegradedAccuracyWarning, stacklevel=2)
    return block.real.copy(), imag


def measure_expectation(x: np.ndarray, m: np.ndarray, *, shots: int | None = None,
                        rng: Xorshift64Star | None = None):
    """``<x|M|x>`` for the normalised ``x``.

    With ``shots`` the value is estimated by sampling eigenvalues of ``M`` with
    Born-rule probabilities and ``(mean, standard_error)`` is returned.
    """
    x = np.asarray(x)
    m = np.asarray(m, dtype=float)
    if m.shape != (len(x), len(x)):
        raise InvalidInputError(f"operator shape {m.shape} does not match vector length {len(x)}")
    norm = np.linalg.norm(x)
    if norm == 0.0:
        raise InvalidInputError("cannot take an expectation in the zero vector")
    x = x / norm
    if shots is None:
        return float(np.real(np.vdot(x, m @ x)))
    rng = rng or Xorshift64Star()
    w, v = np.linalg.eigh(m)
    probs = np.abs(v.T @ x) ** 2
    cdf = np.cumsum(probs)
    cdf /= cdf[-1]
    draws = np.array([w[min(np.searchsorted(cdf, rng.random(), side="right"), len(w) - 1)]
                      for _ in range(shots)])
    return float(draws.mean()), float(draws.std(ddof=1) / math.sqrt(shots)) if shots > 1 else 0.0


# -- solver -----------------------------------------------------------------

def gershgorin_bound(a: np.ndarray) -> float:
    a = np.asarray(a, dtype=float)
    return float(np.max(np.diag(a) + np.sum(np.abs(a), axis=1) - np.abs(np.diag(a))))


def calibrate(a: np.ndarray, cfg: HHLConfig) -> tuple[float, float, float]:
    """Evolution time ``t``, rotation constant ``c`` and ``lambda_min`` for ``a``."""
    lam_min = float(np.linalg.eigvalsh(np.asarray(a, dtype=float))[0])
    if lam_min <= 0.0:
        raise NumericalFailure(f"matrix is not positive definite (lambda_min = {lam_min:.3e})")
    r = cfg.r
    t = cfg.t_override or 2.0 * math.pi * ((1 << r) - 1) / ((1 << r) * gershgorin_bound(a))
    if cfg.c_override is not None:
        c = cfg.c_override
    elif cfg.c_policy == "classical":
        c = 0.99 * lam_min
    elif cfg.c_policy == "floor":
        # below the clock value under lambda_min, so its two nearest bins never clamp
        k = max(1, math.floor(lam_min * t * (1 << r) / (2.0 * math.pi)))
        c = 0.99 * min(lam_min, clock_eigenvalue(k, r, t))
    else:
        c = clock_eigenvalue(1, r, t)
    return t, c, lam_min


def solve_linear(a: np.ndarray, b: np.ndarray, cfg: HHLConfig | None = None, *,
                 reference: int | None = None) -> HHLResult:
    """HHL solution of ``a x = b`` for symmetric positive definite ``a``.

    The sign of the read-out vector is fixed by ``<b|x> > 0`` unless an index
    ``reference`` is given, in which case that entry is made positive.
    """
    cfg = cfg or HHLConfig()
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    n = len(b)
    if a.shape != (n, n):
        raise InvalidInputError(f"matrix shape {a.shape} does not match rhs length {n}")
    t, c, lam_min = calibrate(a, cfg)
    if not np.any(b):
        return HHLResult(np.zeros(n), 1.0, 0.0, None, t=t, c=c, r=cfg.r, attempts=0)

    a_pad, b_pad, pad = pad_to_power_of_two(a, b)
    dim = a_pad.shape[0]
    qs = int(round(math.log2(dim)))
    if cfg.mode == "strict":
        if dim > MAX_STRICT_DIM:
            raise InvalidInputError(f"strict mode is limited to padded dimension {MAX_STRICT_DIM}")
        plan = trotter_plan(a_pad, None, -t, cfg.epsilon, strict=True)
    else:
        plan = trotter_plan(a_pad, None, -t, cfg.epsilon, steps=1)
    layout = Layout(qs, cfg.r, plan.workspace_qubits)
    if layout.n_qubits > MAX_QUBITS:
        raise InvalidInputError(f"{layout.n_qubits} qubits exceed the simulator limit {MAX_QUBITS}")
    register = layout.system_qubits + layout.workspace_qubits

    def power(k: int, control: int) -> Circuit:
        return controlled_power(plan, k, control, mode=cfg.mode, register=register,
                                n_qubits=layout.n_qubits)

    qpe = phase_estimation_circuit(power, layout.clock_qubits, layout.n_qubits)
    rot, clamped = rotation_circuit(c, cfg.r, t, layout, strict=cfg.mode == "strict")

    b_state, b_norm = prepare_vector(b_pad, qs)
    state = b_state.tensor(StateVector.basis(layout.n_qubits - qs))
    state = run(qpe, state)
    dist = clock_distribution(state, layout)
    leakage = float(dist[0])
    clamped_mass = float(dist[clamped].sum()) if clamped else 0.0
    if clamped_mass > 1e-3:
        warnings.warn(f"rotation clamped on clock values holding {clamped_mass:.2e} probability",
                      DegradedAccuracyWarning, stacklevel=2)
    state = run(rot, state)
    state = run(qpe.inverse(), state)
    norm_drift = abs(state.norm() - 1.0)

    p1 = branch_probability(state, layout.ancilla, 1)
    if p1 < MIN_SUCCESS_PROBABILITY:
        raise NumericalFailure(f"post-selection probability {p1:.2e}; check the c/t calibration")
    attempts = 1
    if cfg.postselect == "project":
        final = project(state, layout.ancilla, 1)
    else:
        rng = Xorshift64Star(cfg.seed)
        for attempts in range(1, cfg.max_attempts + 1):
            bit, final = measure_qubit(state, layout.ancilla, rng)
            if bit == 1:
                break
        else:
            raise NumericalFailure(f"ancilla never read 1 in {cfg.max_attempts} attempts")

    block, imag = extract_solution(final, n, layout.solution_offset,
                                   b if reference is None else reference)
    # the projected block has norm sqrt(P(clean)/P(1)), so this is raw amplitude / c
    norm_estimate = math.sqrt(p1) / c
    solution = block * norm_estimate * b_norm
    off = layout.solution_offset
    p_clean = float(np.sum(np.abs(state.amps[off:off + n]) ** 2))

    clock_mask = ((np.arange(1 << final.q) >> layout.system) & ((1 << layout.clock) - 1)) == 0
    clock_zero = float(np.sum(final.probabilities()[clock_mask]))

    exact = classical.solve_vector(a, b)
    fidelity = float(abs(np.dot(block, exact)) / (np.linalg.norm(block) * np.linalg.norm(exact)))

    return HHLResult(
        solution=solution,
        success_probability=p1,
        norm_estimate=norm_estimate,
        fidelity_vs_classical=fidelity,
        imaginary_mass=imag,
        leakage=leakage,
        clamped_mass=clamped_mass,
        clock_zero_probability=clock_zero,
        t=t,
        c=c,
        r=cfg.r,
        qubits=layout.n_qubits,
        attempts=attempts,
        diagnostics={"clean_probability": p_clean, "lambda_min": lam_min, "pad_value": pad, "trotter_steps": plan.m,
                     "norm_drift": norm_drift, "mode": cfg.mode},
    )


def solve_hhl(sys: TutteSystem, axis: str, cfg: HHLConfig | None = None) -> HHLResult:
    """Solve one coordinate axis of a Tutte system with HHL.

    Coordinates of a Tutte system are non-negative, so the entry at the first
    nonzero index of ``b`` must come out positive; a violation is flagged.
    """
    b = sys.rhs(axis)
    res = solve_linear(sys.a, b, cfg)
    nz = np.flatnonzero(b)
    if len(nz) and res.solution[nz[0]] <= 0.0:
        warnings.warn("HHL read-out has a non-positive entry at the first nonzero of b",
                      DegradedAccuracyWarning, stacklevel=2)
    return res
