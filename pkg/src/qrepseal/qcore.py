"""Dense complex linear algebra and pure-state primitives.

Matrices are plain ``numpy`` complex arrays; :func:`as_matrix` is the single
entry point that validates shape and finiteness. Pure states get their own
small immutable type because the unit-norm invariant is load-bearing for every
fidelity computed downstream.
"""

from __future__ import annotations

import numpy as np

from .errors import DimensionError, NotPsdError

MAX_DIM = 64
STATE_NORM_TOL = 1e-10
PSD_TOL = 1e-10


def as_matrix(m, *, copy=True) -> np.ndarray:
    """Return ``m`` as a finite 2-D complex128 array.

    Raises
    ------
    DimensionError
        If ``m`` is not two-dimensional, is empty, or contains NaN/Inf.
    """
    arr = np.array(m, dtype=np.complex128, copy=copy)
    if arr.ndim != 2 or arr.shape[0] == 0 or arr.shape[1] == 0:
        raise DimensionError(f"expected a non-empty 2-D matrix, got shape {arr.shape}")
    if not np.all(np.isfinite(arr)):
        raise DimensionError("matrix entries must be finite")
    arr.flags.writeable = False
    return arr


def identity(d: int) -> np.ndarray:
    return as_matrix(np.eye(d))


def adjoint(m) -> np.ndarray:
    """Conjugate transpose."""
    return as_matrix(np.conj(np.asarray(m, dtype=np.complex128)).T)


def apply(m, v) -> np.ndarray:
    """Matrix-vector product with a dimension check."""
    m = np.asarray(m, dtype=np.complex128)
    v = np.asarray(v.amplitudes if isinstance(v, PureState) else v, dtype=np.complex128)
    if m.ndim != 2 or v.ndim != 1 or m.shape[1] != v.shape[0]:
        raise DimensionError(f"cannot apply {m.shape} matrix to vector of shape {v.shape}")
    return m @ v


class PureState:
    """Unit-norm amplitude vector of dimension ``d``.

    Instances are immutable. ``normalize=True`` rescales the input instead of
    rejecting a non-unit vector.
    """

    __slots__ = ("_amps",)

    def __init__(self, amplitudes, *, normalize: bool = False, min_dim: int = 2):
        amps = np.array(amplitudes, dtype=np.complex128).reshape(-1)
        if amps.size < min_dim:
            raise DimensionError(f"state dimension must be >= {min_dim}, got {amps.size}")
        if amps.size > MAX_DIM * MAX_DIM:
            raise DimensionError(f"state dimension {amps.size} exceeds cap")
        if not np.all(np.isfinite(amps)):
            raise DimensionError("state amplitudes must be finite")
        norm = np.linalg.norm(amps)
        if normalize:
            if norm == 0.0:
                raise DimensionError("cannot normalize the zero vector")
            amps = amps / norm
        elif abs(norm - 1.0) > STATE_NORM_TOL:
            raise DimensionError(f"state is not normalized (norm {norm!r})")
        amps.flags.writeable = False
        self._amps = amps

    @property
    def amplitudes(self) -> np.ndarray:
        return self._amps

    @property
    def dim(self) -> int:
        return self._amps.size

    def projector(self) -> np.ndarray:
        return np.outer(self._amps, np.conj(self._amps))

    def __array__(self, dtype=None, copy=None):
        return self._amps if dtype is None else self._amps.astype(dtype)

    def __eq__(self, other):
        if not isinstance(other, PureState):
            return NotImplemented
        return self.dim == other.dim and bool(np.array_equal(self._amps, other._amps))

    def __hash__(self):
        return hash(self._amps.tobytes())

    def __repr__(self):
        return f"PureState({np.round(self._amps, 6).tolist()})"


def basis_state(d: int, k: int) -> PureState:
    v = np.zeros(d, dtype=np.complex128)
    v[k] = 1.0
    return PureState(v)


def inner(a: PureState, b: PureState) -> complex:
    """``<a|b>``, conjugate-linear in the first argument."""
    if a.dim != b.dim:
        raise DimensionError(f"dimension mismatch: {a.dim} vs {b.dim}")
    return complex(np.vdot(a.amplitudes, b.amplitudes))


def fidelity(a: PureState, b: PureState) -> float:
    return abs(inner(a, b)) ** 2


def is_hermitian(m, tol: float = PSD_TOL) -> bool:
    m = np.asarray(m)
    return m.shape[0] == m.shape[1] and bool(np.max(np.abs(m - m.conj().T)) <= tol)


def psd_sqrt(m) -> np.ndarray:
    """Hermitian square root of a positive semidefinite matrix.

    Eigenvalues in ``[-1e-10, 0)`` are clamped to zero before the root is taken.
    """
    m = as_matrix(m)
    if m.shape[0] != m.shape[1]:
        raise DimensionError(f"square matrix required, got {m.shape}")
    if not is_hermitian(m):
        raise NotPsdError("matrix is not Hermitian")
    h = 0.5 * (m + m.conj().T)
    w, v = np.linalg.eigh(h)
    if w.min() < -PSD_TOL:
        raise NotPsdError(f"matrix has negative eigenvalue {w.min():.3e}")
    w = np.clip(w, 0.0, None)
    r = (v * np.sqrt(w)) @ v.conj().T
    return as_matrix(0.5 * (r + r.conj().T))


class RngStream:
    """Reproducible random stream keyed by ``(seed, stream_index)``.

    The stream owns a ``numpy`` generator and is therefore stateful; give each
    worker its own via :meth:`derive`.
    """

    def __init__(self, seed: int, stream_index: int = 0):
        if not (0 <= int(seed) < 2**64) or int(stream_index) < 0:
            raise ValueError("seed must be a u64 and stream_index non-negative")
        self.seed = int(seed)
        self.stream_index = int(stream_index)
        ss = np.random.SeedSequence(self.seed, spawn_key=(self.stream_index,))
        self.generator = np.random.Generator(np.random.PCG64(ss))

    def derive(self, stream_index: int) -> "RngStream":
        return RngStream(self.seed, stream_index)

    def __repr__(self):
        return f"RngStream(seed={self.seed}, stream_index={self.stream_index})"


def haar_amplitudes(d: int, n: int, rng: RngStream) -> np.ndarray:
    """``n`` Haar-random unit vectors in C^d as an ``(n, d)`` array."""
    if d < 2:
        raise DimensionError(f"Haar sampling needs d >= 2, got {d}")
    g = rng.generator.standard_normal((n, 2 * d))
    z = g[:, :d] + 1j * g[:, d:]
    return z / np.linalg.norm(z, axis=1, keepdims=True)


def haar_sample(d: int, rng: RngStream) -> PureState:
    return PureState(haar_amplitudes(d, 1, rng)[0], normalize=True)
