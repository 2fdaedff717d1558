"""Truncated Fock space for a single bosonic mode, plus dense tensor helpers.

Everything is a dense complex numpy array. A :class:`FockSpace` fixes the
truncation: states |0> .. |n_max> are kept, so operators are
(n_max+1) x (n_max+1) matrices. Truncation makes the canonical commutator
fail in the top corner, [b, b+] = 1 - (n_max+1)|n_max><n_max|; callers are
expected to keep thermal tails negligible (see :func:`choose_n_max`).

All functions are pure and all returned arrays are freshly allocated, so
values can be shared freely across threads.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

# Hard stop for runaway tensor products (doubled spaces, joint spaces).
DEFAULT_DIM_CAP = 16384


@dataclass(frozen=True)
class FockSpace:
    """Single-oscillator Fock space truncated at occupation ``n_max``."""

    n_max: int

    def __post_init__(self) -> None:
        if self.n_max < 1:
            raise ValueError(f"n_max must be at least 1, got {self.n_max}")

    @property
    def dim(self) -> int:
        return self.n_max + 1


def lowering(space: FockSpace) -> np.ndarray:
    """Annihilation operator b with <n-1|b|n> = sqrt(n)."""
    dim = space.dim
    b = np.zeros((dim, dim), dtype=complex)
    ns = np.arange(1, dim)
    b[ns - 1, ns] = np.sqrt(ns)
    return b


def raising(space: FockSpace) -> np.ndarray:
    """Creation operator b+, exactly the conjugate transpose of ``lowering``."""
    return lowering(space).conj().T


def number(space: FockSpace) -> np.ndarray:
    """Number operator b+ b (diagonal 0..n_max up to rounding)."""
    b = lowering(space)
    return b.conj().T @ b


def basis_state(space: FockSpace, n: int) -> np.ndarray:
    """Column vector |n>."""
    if not 0 <= n <= space.n_max:
        raise ValueError(f"occupation {n} outside 0..{space.n_max}")
    vec = np.zeros(space.dim, dtype=complex)
    vec[n] = 1.0
    return vec


def oscillator_hamiltonian(space: FockSpace, omega: float, hbar: float = 1.0) -> np.ndarray:
    """Ladder Hamiltonian hbar*omega*(b+ b + 1/2) as a diagonal matrix.

    ``omega`` is an angular frequency and must be positive; the zero-point
    term is kept so energies are hbar*omega*(n + 1/2).
    """
    if omega <= 0:
        raise ValueError(f"oscillator frequency must be positive, got {omega}")
    ns = np.arange(space.dim)
    return np.diag(hbar * omega * (ns + 0.5)).astype(complex)


def kron(a: np.ndarray, b: np.ndarray, max_dim: int = DEFAULT_DIM_CAP) -> np.ndarray:
    """Kronecker product with a guard on the resulting dimension.

    The first factor varies slowest (row-major convention), matching
    ``np.kron``. Raises ``ValueError`` when the product of row or column
    dimensions exceeds ``max_dim``.
    """
    a = np.asarray(a)
    b = np.asarray(b)
    rows = a.shape[0] * b.shape[0]
    cols = a.shape[1] * b.shape[1]
    if max(rows, cols) > max_dim:
        raise ValueError(
            f"kron result {rows}x{cols} exceeds the dimension cap {max_dim}"
        )
    return np.kron(a, b)


def partial_trace(m: np.ndarray, dims: Sequence[int], keep: Sequence[int]) -> np.ndarray:
    """Trace out all tensor factors except those listed in ``keep``.

    Parameters
    ----------
    m : square matrix on the full product space
    dims : dimension of each tensor factor, slowest-varying first
    keep : indices (into ``dims``) of the factors to retain, in order

    The result acts on the kept factors in their original order and has the
    same trace as ``m``.
    """
    m = np.asarray(m)
    dims = [int(d) for d in dims]
    keep = sorted(set(int(k) for k in keep))
    total = math.prod(dims)
    if m.shape != (total, total):
        raise ValueError(
            f"matrix shape {m.shape} does not match product of dims {tuple(dims)}"
        )
    if not keep or any(k < 0 or k >= len(dims) for k in keep):
        raise ValueError(f"keep indices {keep} invalid for {len(dims)} factors")

    n = len(dims)
    kept_dim = math.prod(dims[k] for k in keep)
    reshaped = m.reshape(dims + dims)
    # Row index i and column index n+i share a label for traced factors.
    row_idx = list(range(n))
    col_idx = [n + i if i in keep else i for i in range(n)]
    out_idx = [i for i in keep] + [n + i for i in keep]
    reduced = np.einsum(reshaped, row_idx + col_idx, out_idx)
    return reduced.reshape(kept_dim, kept_dim)


def hermiticity_defect(m: np.ndarray) -> float:
    """Largest entrywise deviation of ``m`` from its conjugate transpose."""
    m = np.asarray(m)
    return float(np.max(np.abs(m - m.conj().T)))


def choose_n_max(omega: float, beta: float, hbar: float = 1.0, tail: float = 1e-12) -> int:
    """Smallest truncation whose discarded Boltzmann weight is below ``tail``.

    For a thermal ladder the discarded fraction above n_max is
    q**(n_max+1) with q = exp(-beta*hbar*omega); this returns the minimal
    n_max >= 1 such that the fraction drops below ``tail``.
    """
    if omega <= 0:
        raise ValueError(f"frequency must be positive, got {omega}")
    if not beta > 0:
        raise ValueError(f"inverse temperature must be positive, got {beta}")
    if not 0 < tail < 1:
        raise ValueError(f"tail must lie in (0, 1), got {tail}")
    q = math.exp(-beta * hbar * omega) if math.isfinite(beta) else 0.0
    if q == 0.0:
        return 1
    n = max(1, math.floor(math.log(tail) / math.log(q)))
    while q ** (n + 1) >= tail:
        n += 1
    while n > 1 and q ** n < tail:
        n -= 1
    return n
