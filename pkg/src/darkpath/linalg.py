"""Dense complex linear algebra over small labeled Hilbert spaces.

States and operators carry an ordered tuple of basis labels, so tensor
products, subspace embeddings and matrix-element lookups stay explicit
and bit-reproducible.  Everything is dense: the spaces used elsewhere in
this package have dimension 3 * 2**(N-1) with N <= 6 atoms, well below
the point where sparse structures would pay off.

All values are immutable after construction (the backing arrays are
marked read-only), so they are safe to share between worker processes
and concurrent propagations.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Union

import numpy as np

__all__ = [
    "Ket",
    "Operator",
    "DensityMatrix",
    "basis_state",
    "kron",
    "dagger",
    "expectation",
    "hermitian_eigen",
    "embed",
    "outer",
    "product_labels",
]

HERMITICITY_TOL = 1e-10
TRACE_TOL = 1e-8
POSITIVITY_TOL = -1e-7


def _labels(labels: Iterable[str]) -> tuple[str, ...]:
    out = tuple(str(x) for x in labels)
    if len(set(out)) != len(out):
        raise ValueError("basis labels must be unique")
    return out


def _frozen(arr: np.ndarray) -> np.ndarray:
    arr = np.array(arr, dtype=complex)
    arr.setflags(write=False)
    return arr


@dataclass(frozen=True)
class Ket:
    """State vector with labeled amplitudes.

    Normalization is checked on demand, not enforced on construction:
    dark-path coordinates are sometimes manipulated unnormalized
    mid-computation.
    """

    amplitudes: np.ndarray
    basis: tuple[str, ...]

    def __post_init__(self):
        basis = _labels(self.basis)
        amps = np.asarray(self.amplitudes, dtype=complex)
        if amps.ndim != 1 or amps.size != len(basis):
            raise ValueError(
                f"amplitude vector of length {amps.size} does not match "
                f"{len(basis)} basis labels"
            )
        object.__setattr__(self, "amplitudes", _frozen(amps))
        object.__setattr__(self, "basis", basis)

    @property
    def dim(self) -> int:
        return len(self.basis)

    def index(self, label: str) -> int:
        try:
            return self.basis.index(label)
        except ValueError:
            raise ValueError(f"unknown basis label {label!r}") from None

    def norm(self) -> float:
        return float(np.linalg.norm(self.amplitudes))

    def is_normalized(self, tol: float = 1e-12) -> bool:
        return abs(self.norm() - 1.0) <= tol

    def normalized(self) -> "Ket":
        n = self.norm()
        if n == 0.0:
            raise ValueError("cannot normalize the zero vector")
        return Ket(self.amplitudes / n, self.basis)

    def overlap(self, other: "Ket") -> complex:
        """Inner product <self|other>."""
        _check_same_basis(self, other)
        return complex(np.vdot(self.amplitudes, other.amplitudes))


@dataclass(frozen=True)
class Operator:
    """Square matrix over a labeled basis."""

    entries: np.ndarray
    basis: tuple[str, ...]

    def __post_init__(self):
        basis = _labels(self.basis)
        m = np.asarray(self.entries, dtype=complex)
        if m.ndim != 2 or m.shape[0] != m.shape[1] or m.shape[0] != len(basis):
            raise ValueError(
                f"operator of shape {m.shape} does not match {len(basis)} basis labels"
            )
        object.__setattr__(self, "entries", _frozen(m))
        object.__setattr__(self, "basis", basis)

    @property
    def dim(self) -> int:
        return len(self.basis)

    def index(self, label: str) -> int:
        try:
            return self.basis.index(label)
        except ValueError:
            raise ValueError(f"unknown basis label {label!r}") from None

    def element(self, row: str, col: str) -> complex:
        return complex(self.entries[self.index(row), self.index(col)])

    def is_hermitian(self, tol: float = 1e-12) -> bool:
        return float(np.abs(self.entries - self.entries.conj().T).max()) <= tol

    def is_unitary(self, tol: float = 1e-8) -> bool:
        g = self.entries.conj().T @ self.entries
        return float(np.abs(g - np.eye(self.dim)).max()) <= tol

    def restrict(self, labels: Iterable[str]) -> "Operator":
        """Sub-block on the given labels (reduced view of a padded operator)."""
        labels = _labels(labels)
        idx = [self.index(x) for x in labels]
        return Operator(self.entries[np.ix_(idx, idx)], labels)

    def __matmul__(self, other: Union["Operator", Ket]):
        if isinstance(other, Operator):
            _check_same_basis(self, other)
            return Operator(self.entries @ other.entries, self.basis)
        if isinstance(other, Ket):
            _check_same_basis(self, other)
            return Ket(self.entries @ other.amplitudes, self.basis)
        return NotImplemented


@dataclass(frozen=True)
class DensityMatrix:
    """Hermitian, unit-trace matrix over a labeled basis.

    Hermiticity and trace are validated on construction; positivity is a
    monitor (``min_eigenvalue``) because eigen-decomposition per step
    would be wasteful during propagation.
    """

    entries: np.ndarray
    basis: tuple[str, ...]

    def __post_init__(self):
        basis = _labels(self.basis)
        m = np.asarray(self.entries, dtype=complex)
        if m.ndim != 2 or m.shape[0] != m.shape[1] or m.shape[0] != len(basis):
            raise ValueError("density matrix shape does not match basis")
        herm = float(np.abs(m - m.conj().T).max())
        if herm > HERMITICITY_TOL:
            raise ValueError(f"not Hermitian: max |rho - rho^dag| = {herm:.3e}")
        tr = complex(np.trace(m))
        if abs(tr - 1.0) > TRACE_TOL:
            raise ValueError(f"trace deviates from one by {abs(tr - 1.0):.3e}")
        object.__setattr__(self, "entries", _frozen(m))
        object.__setattr__(self, "basis", basis)

    @classmethod
    def from_ket(cls, psi: Ket) -> "DensityMatrix":
        return cls(np.outer(psi.amplitudes, psi.amplitudes.conj()), psi.basis)

    @property
    def dim(self) -> int:
        return len(self.basis)

    def min_eigenvalue(self) -> float:
        return float(np.linalg.eigvalsh(self.entries)[0])

    def is_positive(self, tol: float = POSITIVITY_TOL) -> bool:
        return self.min_eigenvalue() >= tol


def _check_same_basis(a, b) -> None:
    if a.basis != b.basis:
        raise ValueError(f"basis mismatch: {a.basis} vs {b.basis}")


def product_labels(left: Iterable[str], right: Iterable[str], sep: str = "⊗") -> tuple[str, ...]:
    """Concatenate basis labels left-to-right, row-major order."""
    return tuple(f"{a}{sep}{b}" for a in left for b in right)


def basis_state(label: str, basis: Iterable[str]) -> Ket:
    basis = _labels(basis)
    amps = np.zeros(len(basis), dtype=complex)
    amps[basis.index(label)] = 1.0
    return Ket(amps, basis)


def kron(a: Union[Operator, Ket], b: Union[Operator, Ket], sep: str = "⊗"):
    """Tensor product of two kets or two operators.

    Entries follow the row-major Kronecker convention; the basis of the
    product is the left-to-right concatenation of the input labels.
    """
    if isinstance(a, Ket) and isinstance(b, Ket):
        return Ket(np.kron(a.amplitudes, b.amplitudes), product_labels(a.basis, b.basis, sep))
    if isinstance(a, Operator) and isinstance(b, Operator):
        return Operator(np.kron(a.entries, b.entries), product_labels(a.basis, b.basis, sep))
    raise TypeError("kron expects two Kets or two Operators")


def dagger(a: Operator) -> Operator:
    """Conjugate transpose."""
    return Operator(a.entries.conj().T, a.basis)


def expectation(state: Ket, op: Operator) -> complex:
    """<state| op |state>."""
    if state.basis != op.basis:
        raise ValueError("dimension/basis mismatch between state and operator")
    return complex(np.vdot(state.amplitudes, op.entries @ state.amplitudes))


def hermitian_eigen(
    op: Union[Operator, DensityMatrix], tol: float = HERMITICITY_TOL
) -> tuple[np.ndarray, Operator]:
    """Eigen-decomposition of a Hermitian operator or density matrix.

    Returns ascending real eigenvalues and the unitary matrix whose
    columns are the corresponding eigenvectors.  Raises on input that is
    not Hermitian within ``tol``.
    """
    dev = float(np.abs(op.entries - op.entries.conj().T).max())
    if dev > tol:
        raise ValueError(f"operator is not Hermitian: max |A - A^dag| = {dev:.3e}")
    vals, vecs = np.linalg.eigh(op.entries)
    return vals, Operator(vecs, op.basis)


def embed(small: Operator, subspace_labels: Iterable[str], full_basis: Iterable[str]) -> Operator:
    """Place ``small`` on the listed labels of a larger space, identity elsewhere.

    The block acts on ``subspace_labels`` in the given order; every other
    basis state is left untouched, so a unitary block embeds to a unitary.
    """
    sub = _labels(subspace_labels)
    full = _labels(full_basis)
    if len(sub) != small.dim:
        raise ValueError("subspace label count does not match block dimension")
    missing = [x for x in sub if x not in full]
    if missing:
        raise ValueError(f"unknown label(s) {missing} not in full basis")
    idx = [full.index(x) for x in sub]
    out = np.eye(len(full), dtype=complex)
    for i in idx:
        out[i, i] = 0.0
    out[np.ix_(idx, idx)] = small.entries
    return Operator(out, full)


def outer(a: Ket, b: Ket) -> Operator:
    """|a><b| over a shared basis."""
    _check_same_basis(a, b)
    return Operator(np.outer(a.amplitudes, b.amplitudes.conj()), a.basis)
