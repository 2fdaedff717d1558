"""Measurement-symbol algebra over finite labeled orthonormal bases.

A measurement symbol M(a', b') is realized concretely as the rank-1 outer
product |a'><b'| of two labeled basis vectors living in one fixed ambient
space. That makes every algebraic statement a testable matrix identity:

* composition:      M(a',b') M(c',d') = <b'|c'> M(a',d')
* reconstruction:   X = sum_{a',a''} <a'|X|a''> M(a',a'')
* trace pairing:    <a'|X|a''> = Tr(X M(a'',a'))
* mixtures:         rho = sum_{b'} Pi(b') M(b',b'),  <A> = Tr(rho A)

Only orthonormal bases are supported; overlap numbers are always computed
from the stored vectors, never user-supplied.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

GRAM_TOL = 1e-12
WEIGHT_SUM_TOL = 1e-12


@dataclass(frozen=True, eq=False)
class LabeledBasis:
    """Ordered set of labeled orthonormal column vectors.

    ``vectors`` has shape (ambient_dim, size); column i belongs to
    ``labels[i]``. The ambient dimension may exceed the number of vectors,
    in which case the basis spans a proper subspace.
    """

    labels: tuple
    vectors: np.ndarray

    def __post_init__(self) -> None:
        labels = tuple(self.labels)
        object.__setattr__(self, "labels", labels)
        vecs = np.asarray(self.vectors, dtype=complex)
        object.__setattr__(self, "vectors", vecs)
        if vecs.ndim != 2:
            raise ValueError("vectors must be a 2-d array of columns")
        if vecs.shape[1] != len(labels):
            raise ValueError(
                f"{len(labels)} labels but {vecs.shape[1]} vectors"
            )
        if len(set(labels)) != len(labels):
            raise ValueError("basis labels must be unique")
        if vecs.shape[0] < vecs.shape[1]:
            raise ValueError("ambient dimension smaller than basis size")
        gram = vecs.conj().T @ vecs
        defect = np.max(np.abs(gram - np.eye(vecs.shape[1])))
        if defect > GRAM_TOL:
            raise ValueError(f"basis not orthonormal, Gram defect {defect:.3e}")

    @classmethod
    def standard(cls, dim: int, prefix: str = "") -> "LabeledBasis":
        """Computational basis of dimension ``dim`` with labels '0', '1', ..."""
        labels = tuple(f"{prefix}{i}" for i in range(dim))
        return cls(labels, np.eye(dim, dtype=complex))

    @property
    def size(self) -> int:
        return len(self.labels)

    @property
    def ambient_dim(self) -> int:
        return self.vectors.shape[0]

    def index(self, label) -> int:
        try:
            return self.labels.index(label)
        except ValueError:
            raise ValueError(f"unknown basis label {label!r}") from None

    def vector(self, label) -> np.ndarray:
        return self.vectors[:, self.index(label)]


@dataclass(frozen=True, eq=False)
class MeasurementSymbol:
    """Elementary selective-measurement operator |left><right|."""

    left_label: object
    right_label: object
    left_vector: np.ndarray
    right_vector: np.ndarray

    @property
    def matrix(self) -> np.ndarray:
        return np.outer(self.left_vector, self.right_vector.conj())

    @property
    def ambient_dim(self) -> int:
        return self.left_vector.shape[0]

    def adjoint(self) -> "MeasurementSymbol":
        return MeasurementSymbol(
            self.right_label, self.left_label, self.right_vector, self.left_vector
        )


def symbol(basis: LabeledBasis, left, right) -> MeasurementSymbol:
    """Measurement symbol M(left, right) over one labeled basis."""
    return MeasurementSymbol(left, right, basis.vector(left), basis.vector(right))


def compose(m1: MeasurementSymbol, m2: MeasurementSymbol):
    """Compose two symbols, possibly from different bases.

    Returns ``(overlap, result)`` with overlap = <m1.right|m2.left> and
    result = M(m1.left, m2.right), so that as matrices
    ``m1.matrix @ m2.matrix == overlap * result.matrix``.
    """
    if m1.ambient_dim != m2.ambient_dim:
        raise ValueError(
            f"ambient dimension mismatch: {m1.ambient_dim} vs {m2.ambient_dim}"
        )
    overlap = complex(np.vdot(m1.right_vector, m2.left_vector))
    result = MeasurementSymbol(
        m1.left_label, m2.right_label, m1.left_vector, m2.right_vector
    )
    return overlap, result


def operator_from_elements(basis: LabeledBasis, elements: np.ndarray) -> np.ndarray:
    """Assemble X = sum_{ij} elements[i, j] |i><j| over ``basis``."""
    elements = np.asarray(elements, dtype=complex)
    if elements.shape != (basis.size, basis.size):
        raise ValueError(
            f"elements shape {elements.shape} does not match basis size {basis.size}"
        )
    v = basis.vectors
    return v @ elements @ v.conj().T


def matrix_element(X: np.ndarray, basis: LabeledBasis, a1, a2) -> complex:
    """Matrix element <a1|X|a2> computed through the trace pairing.

    Evaluates Tr(X M(a2, a1)); for an orthonormal basis this equals the
    direct sandwich <a1|X|a2>.
    """
    X = np.asarray(X, dtype=complex)
    if X.shape != (basis.ambient_dim, basis.ambient_dim):
        raise ValueError(
            f"operator shape {X.shape} does not match ambient dim {basis.ambient_dim}"
        )
    pairing = symbol(basis, a2, a1).matrix
    return complex(np.trace(X @ pairing))


@dataclass(frozen=True, eq=False)
class MixtureWeights:
    """Probability weights of a convex mixture over basis labels."""

    values: np.ndarray

    def __post_init__(self) -> None:
        vals = np.asarray(self.values, dtype=float)
        object.__setattr__(self, "values", vals)
        if vals.ndim != 1:
            raise ValueError("weights must be a 1-d array")
        if np.any(vals < 0):
            raise ValueError(f"weights must be nonnegative, min {vals.min():.3e}")
        total = vals.sum()
        if abs(total - 1.0) > WEIGHT_SUM_TOL:
            raise ValueError(f"weights must sum to 1, got {total!r}")


def density_operator(basis: LabeledBasis, weights) -> np.ndarray:
    """Statistical mixture rho = sum_i Pi_i |i><i| over ``basis``.

    ``weights`` may be a :class:`MixtureWeights` or any array-like; it is
    validated either way (nonnegative, unit sum).
    """
    if not isinstance(weights, MixtureWeights):
        weights = MixtureWeights(np.asarray(weights, dtype=float))
    pi = weights.values
    if pi.shape[0] != basis.size:
        raise ValueError(
            f"{pi.shape[0]} weights for a basis of size {basis.size}"
        )
    v = basis.vectors
    return (v * pi) @ v.conj().T


def statistical_mean(rho: np.ndarray, A: np.ndarray) -> float:
    """Ensemble average Tr(rho A) of a Hermitian observable.

    ``rho`` must be a valid density matrix (unit trace, Hermitian, positive
    to tolerance) and ``A`` Hermitian; the residual imaginary part of the
    trace is checked to be below 1e-10 and then discarded.
    """
    rho = np.asarray(rho, dtype=complex)
    A = np.asarray(A, dtype=complex)
    if rho.shape != A.shape or rho.ndim != 2 or rho.shape[0] != rho.shape[1]:
        raise ValueError(f"shape mismatch: rho {rho.shape}, A {A.shape}")
    a_defect = float(np.max(np.abs(A - A.conj().T)))
    if a_defect > 1e-8:
        raise ValueError(f"observable not Hermitian, defect {a_defect:.3e}")
    trace = complex(np.trace(rho))
    if abs(trace - 1.0) > 1e-8:
        raise ValueError(f"state trace {trace!r} differs from 1")
    r_defect = float(np.max(np.abs(rho - rho.conj().T)))
    if r_defect > 1e-8:
        raise ValueError(f"state not Hermitian, defect {r_defect:.3e}")
    min_eig = float(np.linalg.eigvalsh((rho + rho.conj().T) / 2).min())
    if min_eig < -1e-8:
        raise ValueError(f"state not positive, min eigenvalue {min_eig:.3e}")
    value = complex(np.trace(rho @ A))
    if abs(value.imag) >= 1e-10:
        raise ValueError(f"mean has non-negligible imaginary part {value.imag:.3e}")
    return float(value.real)
