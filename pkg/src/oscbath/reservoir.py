"""Discretized reservoir: mode lists, transition rates, shifts, correlations.

The bath is a finite list of oscillator modes (omega_i, eta_i, <n_i>), with
eta_i the coupling energy to the system oscillator and <n_i> the mean
excitation of mode i. From these the module computes the four constants of
the master equation,

    Gamma  = (2 pi / hbar) sum_i |eta_i|^2 delta_s(hbar*omega0 - hbar*omega_i)
    Gamma' = same sum with <n_i> inserted
    hbar*Delta  = PV sum_i |eta_i|^2 / (hbar*omega0 - hbar*omega_i)
    hbar*Delta' = same PV sum with <n_i> inserted

where two discretization surrogates replace the continuum objects:

* the energy delta is a normalized Gaussian delta_s of width ``sigma_e``
  (default 3x the local mode energy spacing), which converges smoothly as
  the mode count grows;
* the principal value is a symmetric exclusion window of half-width
  ``pv_epsilon`` (default half the local spacing) around resonance, the
  direct grid analog of the symmetric limit. The rate result reports the
  shifts at twice the window as a convergence check.

The argument of the delta is read as an energy difference throughout, so
Gamma and Gamma' carry units of 1/time once hbar is fixed.

Also provided: the Bose-Einstein occupation law, the per-mode occupation
evaluated as a thermal-vacuum expectation (module :mod:`tfd`), and the
stationary free-bath correlation function

    g(tau) = sum_i |eta_i|^2 [ (<n_i>+1) e^{-i omega_i tau}
                               + <n_i> e^{+i omega_i tau} ].
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Optional

import numpy as np

from . import fock, tfd


@dataclass(eq=False)
class ReservoirSpec:
    """Finite bath model: sorted mode frequencies, couplings, occupations.

    ``sigma_e`` (Gaussian delta width) and ``pv_epsilon`` (principal-value
    exclusion half-width) are energies; when left as ``None`` they default,
    inside :func:`rates`, to 3x and 0.5x the local mode energy spacing at
    the probe frequency. ``occupation_law``, when present, is the smooth
    law omega -> <n(omega)> the per-mode occupations were drawn from.
    """

    omegas: np.ndarray
    etas: np.ndarray
    occupations: np.ndarray
    sigma_e: Optional[float] = None
    pv_epsilon: Optional[float] = None
    occupation_law: Optional[Callable[[float], float]] = field(
        default=None, repr=False, compare=False
    )

    def __post_init__(self) -> None:
        self.omegas = np.asarray(self.omegas, dtype=float)
        self.etas = np.asarray(self.etas, dtype=complex)
        self.occupations = np.asarray(self.occupations, dtype=float)
        if self.omegas.ndim != 1 or len(self.omegas) == 0:
            raise ValueError("mode frequencies must form a nonempty 1-d array")
        if self.etas.shape != self.omegas.shape:
            raise ValueError("one coupling per mode required")
        if self.occupations.shape != self.omegas.shape:
            raise ValueError("one occupation per mode required")
        if np.any(self.omegas <= 0):
            raise ValueError("mode frequencies must be positive")
        if len(self.omegas) > 1 and np.any(np.diff(self.omegas) <= 0):
            raise ValueError("mode frequencies must be strictly increasing")
        if np.any(self.occupations < 0):
            raise ValueError("occupations must be nonnegative")
        if self.sigma_e is not None and not self.sigma_e > 0:
            raise ValueError(f"sigma_e must be positive, got {self.sigma_e}")
        if self.pv_epsilon is not None and self.pv_epsilon < 0:
            raise ValueError(f"pv_epsilon must be nonnegative, got {self.pv_epsilon}")

    @property
    def mode_count(self) -> int:
        return len(self.omegas)


@dataclass(frozen=True)
class ReservoirRates:
    """Derived master-equation constants.

    ``delta_at_double_epsilon`` and ``delta_prime_at_double_epsilon`` repeat
    the principal-value sums with the exclusion window doubled; comparing
    them against ``delta``/``delta_prime`` indicates how converged the
    discrete principal value is. ``resolution_warning`` is set when the
    Gaussian width fails to resolve the local mode spacing.
    """

    gamma: float
    gamma_prime: float
    delta: float
    delta_prime: float
    sigma_e: Optional[float] = None
    pv_epsilon: Optional[float] = None
    resolution_warning: bool = False
    delta_at_double_epsilon: Optional[float] = None
    delta_prime_at_double_epsilon: Optional[float] = None

    def __post_init__(self) -> None:
        if self.gamma < 0:
            raise ValueError(f"gamma must be nonnegative, got {self.gamma}")
        if self.gamma_prime < 0:
            raise ValueError(f"gamma_prime must be nonnegative, got {self.gamma_prime}")

    @property
    def mean_occupation(self) -> float:
        """Occupation ratio gamma_prime / gamma (nan when gamma is zero)."""
        if self.gamma == 0:
            return math.nan
        return self.gamma_prime / self.gamma


def direct_rates(
    gamma: float,
    n_bar: Optional[float] = None,
    gamma_prime: Optional[float] = None,
    delta: float = 0.0,
    delta_prime: float = 0.0,
) -> ReservoirRates:
    """Rates fixed directly instead of via mode sums.

    Exactly one of ``n_bar`` (giving gamma_prime = n_bar * gamma) or
    ``gamma_prime`` must be supplied.
    """
    if (n_bar is None) == (gamma_prime is None):
        raise ValueError("specify exactly one of n_bar or gamma_prime")
    if n_bar is not None:
        if n_bar < 0:
            raise ValueError(f"n_bar must be nonnegative, got {n_bar}")
        gamma_prime = n_bar * gamma
    return ReservoirRates(
        gamma=gamma, gamma_prime=float(gamma_prime), delta=delta, delta_prime=delta_prime
    )


def _local_spacing(omegas: np.ndarray, omega0: float) -> float:
    """Mode frequency spacing in the neighborhood of ``omega0``."""
    if len(omegas) < 2:
        return float(omegas[0])
    diffs = np.diff(omegas)
    pos = np.searchsorted(omegas, omega0)
    pos = min(max(pos - 1, 0), len(diffs) - 1)
    return float(diffs[pos])


def rates(spec: ReservoirSpec, omega0: float, hbar: float = 1.0) -> ReservoirRates:
    """Transition rates and level shifts seen by an oscillator at ``omega0``.

    Preconditions: ``omega0`` must lie inside the mode band (otherwise no
    mode is near resonance and the Gaussian surrogate is meaningless). A
    ``resolution_warning`` is flagged, not raised, when ``sigma_e`` is below
    the local energy spacing.
    """
    if not spec.omegas[0] <= omega0 <= spec.omegas[-1]:
        raise ValueError(
            f"no resonant modes: omega0={omega0} outside band "
            f"[{spec.omegas[0]}, {spec.omegas[-1]}]"
        )
    spacing_e = hbar * _local_spacing(spec.omegas, omega0)
    sigma = spec.sigma_e if spec.sigma_e is not None else 3.0 * spacing_e
    eps = spec.pv_epsilon if spec.pv_epsilon is not None else 0.5 * spacing_e
    if not sigma > 0:
        raise ValueError(f"sigma_e must be positive, got {sigma}")

    x = hbar * (omega0 - spec.omegas)  # energy detuning per mode
    weight = spec.etas.real ** 2 + spec.etas.imag ** 2
    delta_surrogate = np.exp(-(x ** 2) / (2.0 * sigma ** 2)) / (sigma * math.sqrt(2.0 * math.pi))
    gamma = float(2.0 * math.pi / hbar * np.sum(weight * delta_surrogate))
    gamma_prime = float(
        2.0 * math.pi / hbar * np.sum(weight * spec.occupations * delta_surrogate)
    )

    def principal_value(eps_window: float):
        mask = np.abs(x) > eps_window
        dd = float(np.sum(weight[mask] / x[mask]) / hbar)
        ddp = float(np.sum(weight[mask] * spec.occupations[mask] / x[mask]) / hbar)
        return dd, ddp

    delta, delta_prime = principal_value(eps)
    delta_2, delta_prime_2 = principal_value(2.0 * eps)

    return ReservoirRates(
        gamma=gamma,
        gamma_prime=gamma_prime,
        delta=delta,
        delta_prime=delta_prime,
        sigma_e=sigma,
        pv_epsilon=eps,
        resolution_warning=bool(sigma < spacing_e),
        delta_at_double_epsilon=delta_2,
        delta_prime_at_double_epsilon=delta_prime_2,
    )


def bose_einstein(omega: float, temperature: float, hbar: float = 1.0, kB: float = 1.0) -> float:
    """Equilibrium occupation 1 / (exp(hbar*omega / kB*T) - 1); zero at T = 0."""
    if omega <= 0:
        raise ValueError(f"omega must be positive, got {omega}")
    if temperature < 0:
        raise ValueError(f"temperature must be nonnegative, got {temperature}")
    if temperature == 0:
        return 0.0
    return float(1.0 / np.expm1(hbar * omega / (kB * temperature)))


def tfd_occupation(omega: float, beta: float, hbar: float = 1.0, *, n_max: int = 60) -> float:
    """Mean occupation of one bath mode as a thermal-vacuum expectation.

    Builds the truncated purification for the mode and evaluates the number
    operator in it; converges to :func:`bose_einstein` as ``n_max`` grows.
    """
    weights = tfd.thermal_weights(omega, beta, hbar, n_max=n_max)
    vac = tfd.thermal_vacuum(weights)
    return tfd.tfd_expectation(vac, fock.number(fock.FockSpace(n_max)))


def correlation(spec: ReservoirSpec, tau):
    """Stationary two-time bath correlation g(tau) as a mode sum.

    Accepts a scalar or array of time lags; satisfies g(-tau) = conj(g(tau)).
    """
    tau_arr = np.asarray(tau, dtype=float)
    weight = spec.etas.real ** 2 + spec.etas.imag ** 2
    phases = np.exp(-1j * np.multiply.outer(spec.omegas, tau_arr))
    occ = spec.occupations
    terms = weight[..., None] * ((occ[..., None] + 1.0) * phases + occ[..., None] * phases.conj())
    result = terms.sum(axis=0)
    if np.isscalar(tau) or tau_arr.ndim == 0:
        return complex(result)
    return result


def mean_occupation_at(spec: ReservoirSpec, omega: float) -> float:
    """Occupation law evaluated at ``omega`` (interpolating the table if no law)."""
    if spec.occupation_law is not None:
        return float(spec.occupation_law(omega))
    return float(np.interp(omega, spec.omegas, spec.occupations))


def linear_grid(
    omega_min: float,
    omega_max: float,
    count: int,
    coupling_profile: str = "flat",
    coupling_scale: float = 1.0,
    temperature: Optional[float] = None,
    occupations=None,
    hbar: float = 1.0,
    kB: float = 1.0,
    sigma_e: Optional[float] = None,
    pv_epsilon: Optional[float] = None,
) -> ReservoirSpec:
    """Uniform frequency grid with a named coupling profile.

    Profiles: ``"flat"`` sets eta_i = coupling_scale for every mode;
    ``"ohmic"`` sets |eta_i|^2 = coupling_scale^2 * omega_i. Occupations come
    from the Bose-Einstein law at ``temperature`` (zero allowed) or from an
    explicit ``occupations`` table; exactly one source must be given.
    """
    if not 0 < omega_min < omega_max:
        raise ValueError(f"need 0 < omega_min < omega_max, got [{omega_min}, {omega_max}]")
    if count < 1:
        raise ValueError(f"count must be at least 1, got {count}")
    omegas = np.linspace(omega_min, omega_max, count)
    if coupling_profile == "flat":
        etas = np.full(count, coupling_scale, dtype=complex)
    elif coupling_profile == "ohmic":
        etas = (coupling_scale * np.sqrt(omegas)).astype(complex)
    else:
        raise ValueError(f"unknown coupling profile {coupling_profile!r}")

    law = None
    if (temperature is None) == (occupations is None):
        raise ValueError("specify exactly one of temperature or occupations")
    if temperature is not None:
        occ = np.array([bose_einstein(w, temperature, hbar, kB) for w in omegas])
        law = lambda w, T=temperature: bose_einstein(w, T, hbar, kB)  # noqa: E731
    else:
        occ = np.asarray(occupations, dtype=float)

    return ReservoirSpec(
        omegas=omegas,
        etas=etas,
        occupations=occ,
        sigma_e=sigma_e,
        pv_epsilon=pv_epsilon,
        occupation_law=law,
    )
