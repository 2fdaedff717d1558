"""Master equation for the damped oscillator: generator, integrator, steady state.

The generator is implemented term by term in its anticommutator form,

    d(sigma)/dt = - (Gamma/2) {sigma, b+ b}  -  Gamma' {sigma, b+ b}
                  - Gamma' sigma
                  - i (omega0 + Delta) [b+ b, sigma]
                  + Gamma b sigma b+  +  Gamma' (b+ sigma b + b sigma b+).

Collecting terms with {b b+, sigma} = {b+ b, sigma} + 2 sigma (canonical
commutator) shows this is precisely the standard Lindblad dissipator with
downward jump operator b at rate Gamma + Gamma' and upward jump operator b+
at rate Gamma', plus a Hamiltonian rotation at the shifted frequency
omega0 + Delta. Equilibrium then follows from detailed balance,
p_{n+1}/p_n = Gamma' / (Gamma + Gamma'), a geometric profile whose mean
occupation is Gamma'/Gamma. Delta' never enters the generator.

On the truncated space the commutator identity fails in the top corner, and
the six-term form differs from the reduced form by
-(Gamma'/2) (n_max+1) {|n_max><n_max|, sigma}; consequently the generator
leaks trace at rate Gamma' (n_max+1) sigma[n_max, n_max]. The leak is of the
order of the boundary population: keep thermal tails negligible (see
``fock.choose_n_max``) and it sits far below every tolerance used here.
Interior states (top level unpopulated) see exact trace conservation.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Dict, List

import numpy as np

from . import fock
from .reservoir import ReservoirRates

# Integration aborts when a sampled state drifts past these.
TRACE_ABORT = 1e-6
EIGENVALUE_ABORT = -1e-6


class NumericalError(RuntimeError):
    """A numerical contract failed (trace drift, positivity, bad null space)."""


@dataclass(frozen=True, eq=False)
class MasterEquationSpec:
    """Problem definition: truncated space, frequency, rates, units."""

    space: fock.FockSpace
    omega0: float
    rates: ReservoirRates
    hbar: float = 1.0


@dataclass(eq=False)
class Trajectory:
    """Sampled density-matrix history with derived observables.

    ``observables`` maps names to per-sample arrays: ``trace``, ``mean_n``,
    ``purity``, ``min_eigenvalue`` and the complex coherence
    ``coherence_01`` = <0|sigma|1>.
    """

    times: np.ndarray
    states: List[np.ndarray]
    observables: Dict[str, np.ndarray]


def _rhs(sigma, b, bdag, nop, gamma, gamma_prime, omega_shifted):
    anti = sigma @ nop + nop @ sigma
    return (
        -(0.5 * gamma) * anti
        - gamma_prime * anti
        - gamma_prime * sigma
        - 1j * omega_shifted * (nop @ sigma - sigma @ nop)
        + gamma * (b @ sigma @ bdag)
        + gamma_prime * (bdag @ sigma @ b + b @ sigma @ bdag)
    )


def generator(spec: MasterEquationSpec, sigma: np.ndarray) -> np.ndarray:
    """Right-hand side d(sigma)/dt of the master equation.

    Linear in ``sigma``; maps Hermitian to Hermitian and is traceless up to
    the truncation boundary leak described in the module docstring.
    """
    sigma = np.asarray(sigma, dtype=complex)
    dim = spec.space.dim
    if sigma.shape != (dim, dim):
        raise ValueError(f"state shape {sigma.shape} does not match dim {dim}")
    b = fock.lowering(spec.space)
    bdag = b.conj().T
    nop = bdag @ b
    r = spec.rates
    return _rhs(sigma, b, bdag, nop, r.gamma, r.gamma_prime, spec.omega0 + r.delta)


def liouvillian_matrix(spec: MasterEquationSpec) -> np.ndarray:
    """Dense matrix of the generator acting on row-major vectorized states.

    Built column by column from the generator itself, so the two views can
    never drift apart.
    """
    dim = spec.space.dim
    b = fock.lowering(spec.space)
    bdag = b.conj().T
    nop = bdag @ b
    r = spec.rates
    w = spec.omega0 + r.delta
    mat = np.zeros((dim * dim, dim * dim), dtype=complex)
    unit = np.zeros((dim, dim), dtype=complex)
    for j in range(dim * dim):
        unit.flat[j] = 1.0
        mat[:, j] = _rhs(unit, b, bdag, nop, r.gamma, r.gamma_prime, w).ravel()
        unit.flat[j] = 0.0
    return mat


def _validate_density(sigma: np.ndarray, what: str = "initial state") -> np.ndarray:
    sigma = np.asarray(sigma, dtype=complex)
    defect = fock.hermiticity_defect(sigma)
    if defect > 1e-8:
        raise ValueError(f"{what} not Hermitian, defect {defect:.3e}")
    trace = complex(np.trace(sigma))
    if abs(trace - 1.0) > 1e-8:
        raise ValueError(f"{what} trace {trace!r} differs from 1")
    min_eig = float(np.linalg.eigvalsh((sigma + sigma.conj().T) / 2).min())
    if min_eig < -1e-8:
        raise ValueError(f"{what} not positive, min eigenvalue {min_eig:.3e}")
    return sigma


def evolve(
    spec: MasterEquationSpec,
    sigma0: np.ndarray,
    t_final: float,
    dt: float,
    sample_every: int = 1,
) -> Trajectory:
    """Integrate the master equation with a fixed-step classical RK4 scheme.

    The state is re-symmetrized, sigma <- (sigma + sigma+)/2, after every
    step; each sampled state is checked for trace drift and positivity and
    the run aborts with :class:`NumericalError` when either monitor trips.
    The stability precondition dt * (Gamma + 2 Gamma') * n_max < 0.1 is
    enforced up front. ``t_final`` is rounded to a whole number of steps;
    samples are taken every ``sample_every`` steps plus the final step.
    """
    sigma = _validate_density(sigma0).copy()
    dim = spec.space.dim
    if sigma.shape != (dim, dim):
        raise ValueError(f"state shape {sigma.shape} does not match dim {dim}")
    if dt <= 0 or t_final <= 0:
        raise ValueError("dt and t_final must be positive")
    if sample_every < 1:
        raise ValueError(f"sample_every must be at least 1, got {sample_every}")
    r = spec.rates
    stiffness = dt * (r.gamma + 2.0 * r.gamma_prime) * spec.space.n_max
    if stiffness >= 0.1:
        raise ValueError(
            f"unstable step: dt*(Gamma+2Gamma')*n_max = {stiffness:.3g} >= 0.1"
        )
    n_steps = int(round(t_final / dt))
    if n_steps < 1:
        raise ValueError(f"t_final {t_final} shorter than one step dt {dt}")

    b = fock.lowering(spec.space)
    bdag = b.conj().T
    nop = bdag @ b
    w = spec.omega0 + r.delta
    gamma, gamma_prime = r.gamma, r.gamma_prime

    times: List[float] = []
    states: List[np.ndarray] = []
    obs: Dict[str, List] = {
        "trace": [],
        "mean_n": [],
        "purity": [],
        "min_eigenvalue": [],
        "coherence_01": [],
    }

    def record(step: int) -> None:
        t = step * dt
        trace = float(np.trace(sigma).real)
        min_eig = float(np.linalg.eigvalsh(sigma).min())
        if abs(trace - 1.0) > TRACE_ABORT:
            raise NumericalError(
                f"trace drift {trace - 1.0:.3e} at t={t:.6g} exceeds {TRACE_ABORT:.0e}; "
                "reduce dt or increase n_max"
            )
        if min_eig < EIGENVALUE_ABORT:
            raise NumericalError(
                f"negative eigenvalue {min_eig:.3e} at t={t:.6g} below {EIGENVALUE_ABORT:.0e}; "
                "reduce dt or increase n_max"
            )
        times.append(t)
        states.append(sigma.copy())
        obs["trace"].append(trace)
        obs["mean_n"].append(float(np.trace(nop @ sigma).real))
        obs["purity"].append(float(np.sum(np.abs(sigma) ** 2)))
        obs["min_eigenvalue"].append(min_eig)
        obs["coherence_01"].append(complex(sigma[0, 1]))

    record(0)
    for step in range(1, n_steps + 1):
        k1 = _rhs(sigma, b, bdag, nop, gamma, gamma_prime, w)
        k2 = _rhs(sigma + (0.5 * dt) * k1, b, bdag, nop, gamma, gamma_prime, w)
        k3 = _rhs(sigma + (0.5 * dt) * k2, b, bdag, nop, gamma, gamma_prime, w)
        k4 = _rhs(sigma + dt * k3, b, bdag, nop, gamma, gamma_prime, w)
        sigma = sigma + (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
        sigma = 0.5 * (sigma + sigma.conj().T)
        if step % sample_every == 0 or step == n_steps:
            record(step)

    observables = {
        key: np.array(vals) for key, vals in obs.items()
    }
    return Trajectory(times=np.array(times), states=states, observables=observables)


def steady_state(spec: MasterEquationSpec, residual_tol: float = 1e-10) -> np.ndarray:
    """Stationary density matrix from the null space of the vectorized generator.

    Takes the right singular vector of :func:`liouvillian_matrix` with the
    smallest singular value, normalizes it to unit trace and symmetrizes.
    Raises :class:`NumericalError` when the null space looks degenerate
    (second singular value also tiny), when the null vector is traceless, or
    when the residual max|generator(sigma)| exceeds ``residual_tol`` (the
    usual cause is a truncation too small for the temperature).
    """
    if spec.rates.gamma <= 0:
        raise ValueError(f"steady state requires Gamma > 0, got {spec.rates.gamma}")
    dim = spec.space.dim
    mat = liouvillian_matrix(spec)
    _, svals, vh = np.linalg.svd(mat)
    if svals[-2] < 1e-10 * svals[0]:
        raise NumericalError(
            "degenerate null space: two smallest singular values "
            f"{svals[-1]:.3e}, {svals[-2]:.3e} (largest {svals[0]:.3e})"
        )
    candidate = vh[-1].conj().reshape(dim, dim)
    trace = complex(np.trace(candidate))
    if abs(trace) < 1e-10 * np.linalg.norm(candidate):
        raise NumericalError(f"null vector is traceless (trace {trace!r})")
    sigma = candidate / trace
    sigma = 0.5 * (sigma + sigma.conj().T)
    sigma = sigma / np.trace(sigma).real
    residual = float(np.max(np.abs(generator(spec, sigma))))
    if residual > residual_tol:
        raise NumericalError(
            f"steady-state residual {residual:.3e} exceeds {residual_tol:.0e}; "
            "increase n_max so the thermal tail is negligible"
        )
    return sigma
