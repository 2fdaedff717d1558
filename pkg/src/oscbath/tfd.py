"""Thermal vacuum layer: canonical weights and the doubled-space purification.

A thermal mixture over ladder states is represented as a pure vector in the
doubled space H (x) H~, the tilde factor being a fictitious copy of the
oscillator:

    |vac(beta)> = sum_n sqrt(Pi_n) |n> (x) |n~>,   Pi_n = exp(-beta E_n) / Z

with E_n = hbar*omega0*(n + 1/2) and Z summed over the truncated ladder only,
so the vector is exactly normalized at every truncation. Convention used
throughout: the physical (non-tilde) factor always comes FIRST in Kronecker
products, i.e. component n*dim + m carries |n> (x) |m~>.

Expectation values of observables F acting on the physical factor reproduce
canonical averages:

    <vac| F (x) 1 |vac> = Tr(rho F) = sum_n Pi_n <n|F|n>,

and the projector |vac><vac| reduces to the thermal density matrix when the
tilde factor is traced out. Both identities are exact for the truncated Z
and are enforced by :func:`purify_check`.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import fock, sma


@dataclass(frozen=True, eq=False)
class ThermalWeights:
    """Canonical occupation probabilities over a truncated ladder."""

    omega0: float
    beta: float
    hbar: float
    n_max: int
    energies: np.ndarray
    weights: np.ndarray
    partition_sum: float

    @property
    def dim(self) -> int:
        return self.n_max + 1


@dataclass(frozen=True, eq=False)
class ThermalVacuum:
    """Purification amplitudes sqrt(Pi_n) on the diagonal pair states."""

    weights: ThermalWeights
    amplitudes: np.ndarray

    @property
    def single_dim(self) -> int:
        return self.weights.dim

    @property
    def doubled_dim(self) -> int:
        return self.single_dim ** 2


def thermal_weights(omega0: float, beta: float, hbar: float = 1.0, *, n_max: int) -> ThermalWeights:
    """Normalized Boltzmann weights Pi_n over occupations 0..n_max.

    ``beta`` must be positive; ``math.inf`` is accepted and gives the
    ground-state limit (all weight on n = 0). The zero-point energy is kept
    in the stored energies; it cancels in the weights but keeps the
    partition sum auditable.
    """
    if omega0 <= 0:
        raise ValueError(f"omega0 must be positive, got {omega0}")
    if not beta > 0:
        raise ValueError(f"beta must be positive, got {beta}")
    if n_max < 1:
        raise ValueError(f"n_max must be at least 1, got {n_max}")
    ns = np.arange(n_max + 1)
    energies = hbar * omega0 * (ns + 0.5)
    if math.isinf(beta):
        weights = np.zeros(n_max + 1)
        weights[0] = 1.0
        partition = 0.0
    else:
        # Shift by the ground-state energy so nothing underflows before the
        # normalization; the shift cancels exactly in the weights.
        shifted = np.exp(-beta * (energies - energies[0]))
        total = shifted.sum()
        weights = shifted / total
        partition = float(total * math.exp(-beta * energies[0]))
    return ThermalWeights(
        omega0=omega0,
        beta=beta,
        hbar=hbar,
        n_max=n_max,
        energies=energies,
        weights=weights,
        partition_sum=partition,
    )


def thermal_vacuum(weights: ThermalWeights) -> ThermalVacuum:
    """Doubled-space purification of ``weights`` (physical factor first)."""
    dim = weights.dim
    amps = np.zeros(dim * dim, dtype=complex)
    idx = np.arange(dim)
    amps[idx * dim + idx] = np.sqrt(weights.weights)
    return ThermalVacuum(weights=weights, amplitudes=amps)


def tfd_expectation(vac: ThermalVacuum, F: np.ndarray) -> float:
    """Vacuum expectation <vac| F (x) 1 |vac> of a physical-factor observable.

    The contraction is performed honestly in the doubled space (the operator
    is extended by the tilde identity), so agreement with Tr(rho F) is a
    nontrivial check rather than a definition.
    """
    F = np.asarray(F, dtype=complex)
    dim = vac.single_dim
    if F.shape != (dim, dim):
        raise ValueError(f"observable shape {F.shape} does not match dim {dim}")
    extended = fock.kron(F, np.eye(dim), max_dim=dim * dim)
    value = complex(np.vdot(vac.amplitudes, extended @ vac.amplitudes))
    if abs(value.imag) >= 1e-10:
        raise ValueError(
            f"expectation has non-negligible imaginary part {value.imag:.3e}"
        )
    return float(value.real)


def purify_check(vac: ThermalVacuum) -> float:
    """Largest defect of the purification identities for ``vac``.

    Builds P = |vac><vac| in the doubled space and returns the maximum of

    * the projector defect  max |P @ P - P|, and
    * the reduction defect  max |Tr_tilde P - rho_thermal|,

    where rho_thermal is the mixture of the weights over the standard ladder
    basis. Both vanish identically in exact arithmetic.
    """
    amps = vac.amplitudes
    projector = np.outer(amps, amps.conj())
    proj_defect = float(np.max(np.abs(projector @ projector - projector)))
    dim = vac.single_dim
    reduced = fock.partial_trace(projector, [dim, dim], keep=[0])
    rho = sma.density_operator(sma.LabeledBasis.standard(dim), vac.weights.weights)
    red_defect = float(np.max(np.abs(reduced - rho)))
    return max(proj_defect, red_defect)


def pair_basis(dim: int) -> sma.LabeledBasis:
    """Labeled basis of diagonal pair states |n> (x) |n~> in the doubled space.

    This is the bridge between measurement symbols and doubled-space outer
    products: the symbol M(n, m) over this basis is exactly
    |n,n~><m,m~|, so the thermal projector |vac><vac| is the operator with
    elements sqrt(Pi_n Pi_m) over this basis. Intended for tests and
    demonstrations; vector n sits at component n*dim + n.
    """
    if dim < 2:
        raise ValueError(f"dim must be at least 2, got {dim}")
    vectors = np.zeros((dim * dim, dim), dtype=complex)
    for n in range(dim):
        vectors[n * dim + n, n] = 1.0
    labels = tuple(str(n) for n in range(dim))
    return sma.LabeledBasis(labels, vectors)
