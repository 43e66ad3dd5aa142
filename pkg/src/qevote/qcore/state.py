"""Pure states of mixed-dimension qudit registers and projective measurement.

Conventions
-----------
Basis order is row-major over the register's dimension tuple: the flat
amplitude index of |i_0, i_1, ..., i_{n-1}> is i_0*d_1*...*d_{n-1} + ...
The discrete Fourier transform on a dimension-m qudit is

    F|j> = (1/sqrt(m)) * sum_k exp(+2*pi*i*j*k/m) |k>,

and "measuring in the Fourier basis" applies F-dagger to the target,
reads out the computational index, then maps the collapsed qudit back
through F so amplitudes always stay expressed in the computational
frame.

States are treated as immutable: every operation returns a fresh
PureState and never mutates its input.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ..errors import CapacityError, InternalError, ParameterError, UnitarityError
from ..rng import Rng

# Hard ceiling on register size: 2**22 complex amplitudes (~64 MiB).
AMPLITUDE_BUDGET = 1 << 22

_NORM_TOL = 1e-9
_UNITARY_TOL = 1e-9


class PureState:
    """Normalized amplitude vector over a register of qudits.

    dims  -- tuple of per-qudit dimensions, each >= 2
    amps  -- complex128 vector of length prod(dims), unit norm
    """

    __slots__ = ("dims", "amps")

    def __init__(self, dims, amps):
        dims = tuple(int(d) for d in dims)
        if not dims or any(d < 2 for d in dims):
            raise ParameterError(f"every qudit dimension must be >= 2, got {dims}")
        size = int(np.prod(dims, dtype=np.int64))
        if size > AMPLITUDE_BUDGET:
            raise CapacityError(
                f"register of shape {dims} needs {size} amplitudes "
                f"(budget {AMPLITUDE_BUDGET})"
            )
        amps = np.asarray(amps, dtype=np.complex128).reshape(-1)
        if amps.size != size:
            raise ParameterError(f"amplitude vector has length {amps.size}, expected {size}")
        norm = float(np.linalg.norm(amps))
        if abs(norm - 1.0) > _NORM_TOL:
            raise ParameterError(f"state norm {norm!r} deviates from 1 beyond tolerance")
        self.dims = dims
        self.amps = amps

    @property
    def n_qudits(self) -> int:
        return len(self.dims)

    def tensor(self) -> np.ndarray:
        """Amplitudes reshaped to one axis per qudit (a view when possible)."""
        return self.amps.reshape(self.dims)

    def probabilities(self, target: int) -> np.ndarray:
        """Marginal computational-basis outcome distribution of one qudit."""
        target = _check_target(self, target)
        axes = tuple(i for i in range(self.n_qudits) if i != target)
        return np.abs(self.tensor()) ** 2 if not axes else (np.abs(self.tensor()) ** 2).sum(axis=axes)

    def fidelity(self, other: "PureState") -> float:
        if self.dims != other.dims:
            raise ParameterError("fidelity requires identical register shapes")
        return float(abs(np.vdot(self.amps, other.amps)) ** 2)

    def __repr__(self) -> str:  # pragma: no cover
        return f"PureState(dims={self.dims})"


@dataclass(frozen=True)
class MeasurementRecord:
    """Outcome of one projective measurement."""

    outcome: int
    basis: str  # "computational" | "fourier" | "pair-difference"
    probabilities: np.ndarray
    state: PureState  # post-measurement state, renormalized


# ---- constructors -------------------------------------------------------


def basis_state(dims, index) -> PureState:
    """|index> for a register; index is a digit tuple or a flat integer."""
    dims = tuple(int(d) for d in dims)
    if isinstance(index, (int, np.integer)):
        flat = int(index)
    else:
        digits = tuple(int(i) for i in index)
        if len(digits) != len(dims):
            raise ParameterError("digit tuple length must match register length")
        flat = 0
        for d, i in zip(dims, digits):
            if not 0 <= i < d:
                raise IndexError(f"digit {i} out of range for dimension {d}")
            flat = flat * d + i
    size = int(np.prod(dims, dtype=np.int64))
    if not 0 <= flat < size:
        raise IndexError(f"basis index {flat} out of range for size {size}")
    amps = np.zeros(size, dtype=np.complex128)
    amps[flat] = 1.0
    return PureState(dims, amps)


def product_state(states: list[PureState]) -> PureState:
    """Tensor product of independent registers, in the given order."""
    if not states:
        raise ParameterError("product of zero registers is undefined")
    amps = states[0].amps
    dims: tuple[int, ...] = states[0].dims
    for s in states[1:]:
        amps = np.kron(amps, s.amps)
        dims = dims + s.dims
    return PureState(dims, amps)


def ghz_phase_state(copies: int, dim: int, phases=None) -> PureState:
    """(1/sqrt(dim)) * sum_j exp(i*phases[j]) |j>^{tensor copies}.

    phases may be None (all zero), a length-dim array, or a callable j -> angle.
    """
    if copies < 1 or dim < 2:
        raise ParameterError("need copies >= 1 and dim >= 2")
    size = dim**copies
    if size > AMPLITUDE_BUDGET:
        raise CapacityError(f"{copies} copies of dimension {dim} exceed the amplitude budget")
    if phases is None:
        phi = np.zeros(dim)
    elif callable(phases):
        phi = np.array([float(phases(j)) for j in range(dim)])
    else:
        phi = np.asarray(phases, dtype=float)
        if phi.shape != (dim,):
            raise ParameterError(f"phase vector must have length {dim}")
    amps = np.zeros(size, dtype=np.complex128)
    # the flat index of |j,j,...,j> is j * (dim^copies - 1) / (dim - 1)
    stride = (size - 1) // (dim - 1)
    amps[np.arange(dim) * stride] = np.exp(1j * phi) / np.sqrt(dim)
    return PureState((dim,) * copies, amps)


# ---- gate matrices ------------------------------------------------------


def fourier_matrix(dim: int) -> np.ndarray:
    """F[k, j] = exp(2*pi*i*j*k/dim) / sqrt(dim)."""
    j = np.arange(dim)
    return np.exp(2j * np.pi * np.outer(j, j) / dim) / np.sqrt(dim)


def shift_matrix(dim: int, amount: int = 1) -> np.ndarray:
    """Cyclic shift |j> -> |j + amount mod dim>."""
    u = np.zeros((dim, dim), dtype=np.complex128)
    u[(np.arange(dim) + amount) % dim, np.arange(dim)] = 1.0
    return u


def phase_matrix(dim: int, angle_per_level: float) -> np.ndarray:
    """diag(exp(i*j*angle_per_level)) for j = 0..dim-1."""
    return np.diag(np.exp(1j * np.arange(dim) * angle_per_level))


def bitflip_matrix() -> np.ndarray:
    """Qubit bit flip |0> <-> |1>."""
    return np.array([[0, 1], [1, 0]], dtype=np.complex128)


def y_flip_matrix() -> np.ndarray:
    """Real bit flip with a sign: |0> -> |1>, |1> -> -|0>.

    Flips the encoded bit in the rectilinear and the diagonal basis
    alike (|+> -> -|->, |-> -> |+>), which is what makes it useful for
    basis-blind ballot tampering.
    """
    return np.array([[0, -1], [1, 0]], dtype=np.complex128)


# ---- operations ---------------------------------------------------------


def _check_target(state: PureState, target: int) -> int:
    target = int(target)
    if not 0 <= target < state.n_qudits:
        raise IndexError(f"qudit index {target} out of range for {state.n_qudits} qudits")
    return target


def apply_unitary(state: PureState, u, targets) -> PureState:
    """Apply a unitary acting on the listed target qudits (in that order)."""
    if isinstance(targets, (int, np.integer)):
        targets = (int(targets),)
    targets = tuple(_check_target(state, t) for t in targets)
    if len(set(targets)) != len(targets):
        raise IndexError(f"duplicate target qudits in {targets}")
    u = np.asarray(u, dtype=np.complex128)
    block = int(np.prod([state.dims[t] for t in targets], dtype=np.int64))
    if u.shape != (block, block):
        raise ParameterError(f"unitary shape {u.shape} does not match target block {block}")
    if not np.allclose(u @ u.conj().T, np.eye(block), atol=_UNITARY_TOL):
        raise UnitarityError("matrix is not unitary within 1e-9")

    n = state.n_qudits
    rest = tuple(i for i in range(n) if i not in targets)
    tensor = np.moveaxis(state.tensor(), targets, range(len(targets)))
    shaped = tensor.reshape(block, -1)
    shaped = u @ shaped
    tensor = shaped.reshape([state.dims[t] for t in targets] + [state.dims[r] for r in rest])
    tensor = np.moveaxis(tensor, range(len(targets)), targets)
    out = tensor.reshape(-1)
    norm = float(np.linalg.norm(out))
    if abs(norm - 1.0) > 1e-7:
        raise InternalError(f"unitary application drifted norm to {norm!r}")
    return PureState(state.dims, out / norm)


def measure_computational(state: PureState, target: int, rng: Rng) -> MeasurementRecord:
    """Projectively measure one qudit in the computational basis."""
    target = _check_target(state, target)
    probs = state.probabilities(target)
    outcome = rng.choice_index(probs)
    tensor = np.array(state.tensor())
    index = [slice(None)] * state.n_qudits
    for j in range(state.dims[target]):
        if j != outcome:
            index[target] = j
            tensor[tuple(index)] = 0.0
    flat = tensor.reshape(-1)
    norm = float(np.linalg.norm(flat))
    if norm <= 0:
        raise InternalError("measurement collapsed onto a zero branch")
    return MeasurementRecord(
        outcome=outcome,
        basis="computational",
        probabilities=probs,
        state=PureState(state.dims, flat / norm),
    )


def measure_fourier(state: PureState, target: int, rng: Rng) -> MeasurementRecord:
    """Projectively measure one qudit in the Fourier basis.

    Equivalent to rotating the target by F-dagger, reading the
    computational index, and rotating the collapsed qudit back with F.
    """
    target = _check_target(state, target)
    f = fourier_matrix(state.dims[target])
    rotated = apply_unitary(state, f.conj().T, target)
    rec = measure_computational(rotated, target, rng)
    restored = apply_unitary(rec.state, f, target)
    return MeasurementRecord(
        outcome=rec.outcome,
        basis="fourier",
        probabilities=rec.probabilities,
        state=restored,
    )


def measure_difference(state: PureState, target_a: int, target_b: int, rng: Rng) -> MeasurementRecord:
    """Measure the cyclic difference (a - b) mod d of two same-dimension qudits.

    This is the coarse projective measurement {P_r}, P_r projecting onto
    span{|j + r>|j>}: the pair collapses onto the difference-r subspace
    without resolving the individual values, so superposition across j
    survives.
    """
    target_a = _check_target(state, target_a)
    target_b = _check_target(state, target_b)
    if target_a == target_b:
        raise IndexError("pair-difference measurement needs two distinct qudits")
    d = state.dims[target_a]
    if state.dims[target_b] != d:
        raise ParameterError("pair-difference measurement requires equal dimensions")

    tensor = np.moveaxis(state.tensor(), (target_a, target_b), (0, 1))
    a_idx, b_idx = np.meshgrid(np.arange(d), np.arange(d), indexing="ij")
    diff = (a_idx - b_idx) % d
    weights = np.abs(tensor.reshape(d, d, -1)) ** 2
    probs = np.array([weights[diff == r].sum() for r in range(d)])
    outcome = rng.choice_index(probs)

    masked = np.array(tensor)
    masked[diff != outcome] = 0.0
    masked = np.moveaxis(masked, (0, 1), (target_a, target_b))
    flat = masked.reshape(-1)
    norm = float(np.linalg.norm(flat))
    if norm <= 0:
        raise InternalError("pair-difference measurement collapsed onto a zero branch")
    return MeasurementRecord(
        outcome=outcome,
        basis="pair-difference",
        probabilities=probs,
        state=PureState(state.dims, flat / norm),
    )
