"""Dimension-aware operator algebra on tensor-product Hilbert spaces.

The fixed working space is Q1(3) x Q2(3) x R1(2) x R2(2), in that subsystem
order, but all routines accept arbitrary dimension lists.  Transmon levels are
indexed g=0, e=1, f=2; resonator levels are photon numbers.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

FULL_DIMS = (3, 3, 2, 2)
QUTRIT_LEVELS = {"g": 0, "e": 1, "f": 2}


class DimensionMismatchError(ValueError):
    """Raised when operands act on incompatible subsystem dimension lists."""


def _check_dims(dims):
    dims = tuple(int(d) for d in dims)
    if any(d < 2 for d in dims):
        raise ValueError(f"subsystem dimensions must be >= 2, got {dims}")
    return dims


@dataclass(frozen=True)
class LabeledOperator:
    """Complex matrix tagged with the subsystem dimensions it acts on."""

    dims: tuple
    data: np.ndarray = field(repr=False)

    def __post_init__(self):
        dims = _check_dims(self.dims)
        data = np.asarray(self.data, dtype=complex)
        n = int(np.prod(dims))
        if data.shape != (n, n):
            raise ValueError(f"matrix shape {data.shape} does not match dims {dims}")
        data.setflags(write=False)
        object.__setattr__(self, "dims", dims)
        object.__setattr__(self, "data", data)

    @property
    def dim(self):
        return self.data.shape[0]

    def dag(self):
        return LabeledOperator(self.dims, self.data.conj().T)

    def __matmul__(self, other):
        if isinstance(other, LabeledOperator):
            if other.dims != self.dims:
                raise DimensionMismatchError(f"{self.dims} vs {other.dims}")
            return LabeledOperator(self.dims, self.data @ other.data)
        return NotImplemented

    def __add__(self, other):
        if isinstance(other, LabeledOperator):
            if other.dims != self.dims:
                raise DimensionMismatchError(f"{self.dims} vs {other.dims}")
            return LabeledOperator(self.dims, self.data + other.data)
        return NotImplemented

    def __sub__(self, other):
        if isinstance(other, LabeledOperator):
            if other.dims != self.dims:
                raise DimensionMismatchError(f"{self.dims} vs {other.dims}")
            return LabeledOperator(self.dims, self.data - other.data)
        return NotImplemented

    def __mul__(self, scalar):
        return LabeledOperator(self.dims, self.data * scalar)

    __rmul__ = __mul__

    def __neg__(self):
        return LabeledOperator(self.dims, -self.data)


@dataclass(frozen=True)
class DensityMatrix:
    """Density matrix on a labeled tensor-product space.

    A physical instance is Hermitian, unit trace, and positive semidefinite;
    use :func:`validate_state` for a tolerance-based diagnostic.
    """

    dims: tuple
    data: np.ndarray = field(repr=False)

    def __post_init__(self):
        dims = _check_dims(self.dims)
        data = np.asarray(self.data, dtype=complex)
        n = int(np.prod(dims))
        if data.shape != (n, n):
            raise ValueError(f"matrix shape {data.shape} does not match dims {dims}")
        data.setflags(write=False)
        object.__setattr__(self, "dims", dims)
        object.__setattr__(self, "data", data)

    @property
    def dim(self):
        return self.data.shape[0]


@dataclass(frozen=True)
class StateVector:
    """Pure state on a labeled tensor-product space (norm 1 within 1e-10)."""

    dims: tuple
    amplitudes: np.ndarray = field(repr=False)

    def __post_init__(self):
        dims = _check_dims(self.dims)
        amps = np.asarray(self.amplitudes, dtype=complex)
        n = int(np.prod(dims))
        if amps.shape != (n,):
            raise ValueError(f"amplitude shape {amps.shape} does not match dims {dims}")
        if abs(np.linalg.norm(amps) - 1.0) > 1e-10:
            raise ValueError("state vector is not normalized")
        amps.setflags(write=False)
        object.__setattr__(self, "dims", dims)
        object.__setattr__(self, "amplitudes", amps)

    def to_density(self):
        return DensityMatrix(self.dims, np.outer(self.amplitudes, self.amplitudes.conj()))


# ---------------------------------------------------------------------------
# elementary building blocks

def identity(dim):
    return LabeledOperator((dim,), np.eye(dim))


def destroy(dim):
    """Bosonic annihilation operator truncated to ``dim`` levels."""
    return LabeledOperator((dim,), np.diag(np.sqrt(np.arange(1, dim)), k=1))


def number(dim):
    return LabeledOperator((dim,), np.diag(np.arange(dim, dtype=float)))


def transition(dim, to_level, from_level):
    """|to><from| on a single ``dim``-level subsystem."""
    m = np.zeros((dim, dim), dtype=complex)
    m[to_level, from_level] = 1.0
    return LabeledOperator((dim,), m)


def projector_index(dims, index):
    n = int(np.prod(dims))
    m = np.zeros((n, n), dtype=complex)
    m[index, index] = 1.0
    return LabeledOperator(tuple(dims), m)


def _label_to_levels(label):
    levels = []
    for ch in label:
        if ch in QUTRIT_LEVELS:
            levels.append(QUTRIT_LEVELS[ch])
        elif ch.isdigit():
            levels.append(int(ch))
        else:
            raise ValueError(f"unknown level symbol {ch!r} in {label!r}")
    return levels


def basis_index(dims, label):
    """Flat index of a product basis state, e.g. ``'eg00'`` on (3,3,2,2)."""
    levels = _label_to_levels(label)
    if len(levels) != len(dims):
        raise ValueError(f"label {label!r} does not match dims {dims}")
    idx = 0
    for lvl, d in zip(levels, dims):
        if lvl >= d:
            raise ValueError(f"level {lvl} out of range for dimension {d}")
        idx = idx * d + lvl
    return idx


def basis_state(dims, label):
    """Product basis StateVector from a level label like ``'gf00'``."""
    dims = tuple(dims)
    amps = np.zeros(int(np.prod(dims)), dtype=complex)
    amps[basis_index(dims, label)] = 1.0
    return StateVector(dims, amps)


def ket_projector(dims, label_to, label_from=None):
    """|a><b| between product basis states on the given dims."""
    dims = tuple(dims)
    if label_from is None:
        label_from = label_to
    n = int(np.prod(dims))
    m = np.zeros((n, n), dtype=complex)
    m[basis_index(dims, label_to), basis_index(dims, label_from)] = 1.0
    return LabeledOperator(dims, m)


# ---------------------------------------------------------------------------
# core operations

def tensor(*factors):
    """Kronecker product of LabeledOperators in the declared subsystem order."""
    if len(factors) == 1 and isinstance(factors[0], (list, tuple)):
        factors = tuple(factors[0])
    if not factors:
        raise ValueError("tensor requires at least one factor")
    data = factors[0].data
    dims = list(factors[0].dims)
    for f in factors[1:]:
        data = np.kron(data, f.data)
        dims.extend(f.dims)
    return LabeledOperator(tuple(dims), data)


def expectation(rho, op):
    """Tr(rho * op) as a complex scalar."""
    if rho.dims != op.dims:
        raise DimensionMismatchError(f"{rho.dims} vs {op.dims}")
    return complex(np.trace(rho.data @ op.data))


def partial_trace(rho, keep):
    """Trace out all subsystems not in ``keep`` (set of subsystem indices)."""
    dims = rho.dims
    keep = sorted(set(keep))
    if not keep or any(k < 0 or k >= len(dims) for k in keep):
        raise ValueError(f"invalid keep set {keep} for dims {dims}")
    n_sub = len(dims)
    tensor_form = rho.data.reshape(dims + dims)
    # contract traced-out subsystems pairwise, highest index first so earlier
    # axis positions stay valid
    traced = tensor_form
    removed = 0
    for idx in sorted(set(range(n_sub)) - set(keep), reverse=True):
        n_now = n_sub - removed
        traced = np.trace(traced, axis1=idx, axis2=idx + n_now)
        removed += 1
    kept_dims = tuple(dims[k] for k in keep)
    n = int(np.prod(kept_dims))
    return DensityMatrix(kept_dims, traced.reshape(n, n))


@dataclass(frozen=True)
class StateReport:
    """Diagnostics from validate_state."""

    hermiticity_deviation: float
    trace_deviation: float
    min_eigenvalue: float
    tol: float
    passed: bool

    def __str__(self):
        status = "pass" if self.passed else "FAIL"
        return (
            f"{status}: |rho-rho^dag|_max={self.hermiticity_deviation:.3e}, "
            f"|tr-1|={self.trace_deviation:.3e}, min_eig={self.min_eigenvalue:.3e}"
        )


def validate_state(rho, tol=1e-8):
    """Report Hermiticity, trace and positivity deviations of a DensityMatrix."""
    m = rho.data
    herm = float(np.max(np.abs(m - m.conj().T)))
    trace_dev = float(abs(np.trace(m).real - 1.0) + abs(np.trace(m).imag))
    min_eig = float(np.min(np.linalg.eigvalsh(0.5 * (m + m.conj().T))))
    passed = herm <= tol and trace_dev <= tol and min_eig >= -tol
    return StateReport(herm, trace_dev, min_eig, tol, passed)
