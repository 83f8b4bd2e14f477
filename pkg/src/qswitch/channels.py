"""Density matrices and Kraus-operator channels."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from ._constants import VALIDATION_TOL
from .exceptions import DimensionError, ValidationError
from .qmath import as_matrix, as_state_vector, dagger, is_hermitian, is_unitary, projector

__all__ = [
    "PAULI_LABELS",
    "DensityMatrix",
    "KrausChannel",
    "apply_channel",
    "compose",
    "depolarizing_channel",
    "named_ket",
    "pauli",
    "unitary_basis",
    "unitary_channel",
    "weyl",
]

PAULI_LABELS = ("I", "X", "Y", "Z")

_PAULIS = (
    np.array([[1, 0], [0, 1]], dtype=np.complex128),
    np.array([[0, 1], [1, 0]], dtype=np.complex128),
    np.array([[0, -1j], [1j, 0]], dtype=np.complex128),
    np.array([[1, 0], [0, -1]], dtype=np.complex128),
)
for _p in _PAULIS:
    _p.flags.writeable = False

_SQRT_HALF = 1.0 / np.sqrt(2.0)
_NAMED_KETS = {
    "0": (1.0, 0.0),
    "1": (0.0, 1.0),
    "D": (_SQRT_HALF, _SQRT_HALF),
    "A": (_SQRT_HALF, -_SQRT_HALF),
    "R": (_SQRT_HALF, 1j * _SQRT_HALF),
    "L": (_SQRT_HALF, -1j * _SQRT_HALF),
}


def _frozen(m: np.ndarray) -> np.ndarray:
    m = np.array(m, dtype=np.complex128, copy=True)
    m.flags.writeable = False
    return m


def pauli(idx: int) -> np.ndarray:
    """Pauli matrix for index 0, 1, 2, 3 (I, X, Y, Z). The result is read-only."""
    if isinstance(idx, str):
        idx = PAULI_LABELS.index(idx.upper())
    if not 0 <= int(idx) <= 3:
        raise ValidationError(f"Pauli index must be in 0..3, got {idx}")
    return _PAULIS[int(idx)]


def weyl(a: int, b: int, d: int) -> np.ndarray:
    """Heisenberg-Weyl operator ``X^a Z^b`` (shift ``a`` times, clock ``b`` times)."""
    shift = np.roll(np.eye(d, dtype=np.complex128), 1, axis=0)
    clock = np.diag(np.exp(2j * np.pi * np.arange(d) / d))
    return np.linalg.matrix_power(shift, a) @ np.linalg.matrix_power(clock, b)


def unitary_basis(d: int, kind: str | None = None) -> tuple[np.ndarray, ...]:
    """Orthogonal unitary basis of ``d x d`` matrices with ``d**2`` elements.

    ``kind`` is ``"pauli"`` (only for ``d == 2``) or ``"weyl"``. The default is
    Pauli for qubits and Weyl otherwise.
    """
    if d < 2:
        raise ValidationError(f"dimension must be at least 2, got {d}")
    if kind is None:
        kind = "pauli" if d == 2 else "weyl"
    if kind == "pauli":
        if d != 2:
            raise ValidationError("the Pauli basis is only defined for d = 2")
        return _PAULIS
    if kind == "weyl":
        return tuple(_frozen(weyl(a, b, d)) for a in range(d) for b in range(d))
    raise ValidationError(f"unknown unitary basis {kind!r}")


@dataclass(frozen=True)
class DensityMatrix:
    """A validated density operator (Hermitian, unit trace, PSD).

    The wrapped array is copied and made read-only on construction.
    """

    matrix: np.ndarray
    tol: float = field(default=VALIDATION_TOL, repr=False, compare=False)

    def __post_init__(self):
        m = as_matrix(self.matrix)
        if m.shape[0] != m.shape[1]:
            raise DimensionError(f"density matrix must be square, got {m.shape}")
        if not is_hermitian(m, self.tol):
            raise ValidationError("density matrix is not Hermitian")
        tr = np.trace(m).real
        if abs(tr - 1.0) > self.tol:
            raise ValidationError(f"density matrix has trace {tr!r}, expected 1")
        lowest = np.linalg.eigvalsh(0.5 * (m + dagger(m)))[0]
        if lowest < -self.tol:
            raise ValidationError(f"density matrix has negative eigenvalue {lowest!r}")
        object.__setattr__(self, "matrix", _frozen(m))

    @property
    def dim(self) -> int:
        return self.matrix.shape[0]

    @classmethod
    def from_ket(cls, ket) -> "DensityMatrix":
        return cls(projector(as_state_vector(ket)))

    @classmethod
    def maximally_mixed(cls, d: int) -> "DensityMatrix":
        return cls(np.eye(d) / d)

    @classmethod
    def from_bloch(cls, r: Sequence[float]) -> "DensityMatrix":
        """Qubit state ``(I + r·σ)/2`` for a Bloch vector with ``|r| <= 1``."""
        r = np.asarray(r, dtype=float)
        if r.shape != (3,):
            raise DimensionError("Bloch vector must have three components")
        return cls(0.5 * (_PAULIS[0] + r[0] * _PAULIS[1] + r[1] * _PAULIS[2] + r[2] * _PAULIS[3]))

    def bloch(self) -> np.ndarray:
        if self.dim != 2:
            raise DimensionError("Bloch vectors are defined for qubits only")
        return np.array([np.trace(self.matrix @ p).real for p in _PAULIS[1:]])

    def is_pure(self, tol: float = VALIDATION_TOL) -> bool:
        return abs(np.trace(self.matrix @ self.matrix).real - 1.0) <= tol


def named_ket(label: str, d: int = 2) -> np.ndarray:
    """One of the six qubit states 0, 1, D, A, R, L, embedded in the first two levels of ``C^d``."""
    try:
        amps = _NAMED_KETS[label]
    except KeyError:
        raise ValidationError(f"unknown state label {label!r}; expected one of {sorted(_NAMED_KETS)}") from None
    if d < 2:
        raise ValidationError(f"dimension must be at least 2, got {d}")
    ket = np.zeros(d, dtype=np.complex128)
    ket[:2] = amps
    return ket


@dataclass(frozen=True)
class KrausChannel:
    """Channel ``rho -> sum_i K_i rho K_i^†`` with ``sum_i K_i^† K_i = I``."""

    kraus: tuple[np.ndarray, ...]
    label: str = ""
    tol: float = field(default=VALIDATION_TOL, repr=False, compare=False)

    def __post_init__(self):
        ops = tuple(_frozen(as_matrix(k)) for k in self.kraus)
        if not ops:
            raise ValidationError("a channel needs at least one Kraus operator")
        d = ops[0].shape[0]
        for k in ops:
            if k.shape != (d, d):
                raise DimensionError(f"Kraus operators must all be {d}x{d}, got {k.shape}")
        completeness = sum(dagger(k) @ k for k in ops)
        if np.max(np.abs(completeness - np.eye(d))) > self.tol:
            raise ValidationError(f"Kraus operators of {self.label or 'channel'} are not trace preserving")
        object.__setattr__(self, "kraus", ops)

    @property
    def dim(self) -> int:
        return self.kraus[0].shape[0]

    def __len__(self) -> int:
        return len(self.kraus)


def depolarizing_channel(d: int, basis: str | None = None) -> KrausChannel:
    """Completely depolarizing channel on ``C^d``.

    Uses the ``d**2`` Kraus operators ``U_i / d`` for an orthogonal unitary
    basis ``{U_i}`` (see :func:`unitary_basis`), so every input is mapped to
    ``I/d``.
    """
    ops = unitary_basis(d, basis)
    return KrausChannel(tuple(u / d for u in ops), label=f"depolarizing(d={d})")


def unitary_channel(u, label: str = "") -> KrausChannel:
    u = as_matrix(u)
    if not is_unitary(u):
        raise ValidationError("operator is not unitary")
    return KrausChannel((u,), label=label or "unitary")


def apply_channel(c: KrausChannel, rho: DensityMatrix) -> DensityMatrix:
    if c.dim != rho.dim:
        raise DimensionError(f"channel acts on dimension {c.dim}, state has dimension {rho.dim}")
    r = rho.matrix
    return DensityMatrix(sum(k @ r @ dagger(k) for k in c.kraus))


def compose(*channels: KrausChannel) -> KrausChannel:
    """Sequential composition; ``channels[0]`` acts first."""
    if not channels:
        raise ValidationError("nothing to compose")
    ops = channels[0].kraus
    for c in channels[1:]:
        if c.dim != channels[0].dim:
            raise DimensionError("cannot compose channels of different dimensions")
        ops = tuple(k2 @ k1 for k2 in c.kraus for k1 in ops)
    return KrausChannel(ops, label=" -> ".join(c.label for c in channels))
