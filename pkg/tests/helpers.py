"""Shared random generators and brute-force oracles for the test suite."""

from __future__ import annotations

import numpy as np

from oscbath import fock, sma, tfd


def random_unitary(dim: int, rng: np.random.Generator) -> np.ndarray:
    z = rng.normal(size=(dim, dim)) + 1j * rng.normal(size=(dim, dim))
    q, r = np.linalg.qr(z)
    phases = np.diag(r) / np.abs(np.diag(r))
    return q * phases[None, :]


def random_orthonormal_basis(dim, size, rng, prefix="v") -> sma.LabeledBasis:
    u = random_unitary(dim, rng)
    labels = tuple(f"{prefix}{i}" for i in range(size))
    return sma.LabeledBasis(labels, u[:, :size])


def random_hermitian(dim: int, rng: np.random.Generator) -> np.ndarray:
    z = rng.normal(size=(dim, dim)) + 1j * rng.normal(size=(dim, dim))
    return (z + z.conj().T) / 2


def random_density(dim: int, rng: np.random.Generator) -> np.ndarray:
    z = rng.normal(size=(dim, dim)) + 1j * rng.normal(size=(dim, dim))
    rho = z @ z.conj().T
    return rho / np.trace(rho)


def partial_trace_loops(m: np.ndarray, dims, keep) -> np.ndarray:
    """Index-summation partial trace, written as plain loops (oracle)."""
    dims = list(dims)
    keep = sorted(keep)
    traced = [i for i in range(len(dims)) if i not in keep]
    kept_dim = int(np.prod([dims[k] for k in keep]))
    out = np.zeros((kept_dim, kept_dim), dtype=complex)
    shape = dims + dims
    m_idx = m.reshape(shape)

    kept_ranges = [range(dims[k]) for k in keep]
    traced_ranges = [range(dims[t]) for t in traced]

    def flatten(kept_vals):
        flat = 0
        for k, v in zip(keep, kept_vals):
            flat = flat * dims[k] + v
        return flat

    import itertools

    for row_vals in itertools.product(*kept_ranges):
        for col_vals in itertools.product(*kept_ranges):
            total = 0.0 + 0.0j
            for tr_vals in itertools.product(*traced_ranges):
                idx_row = [0] * len(dims)
                idx_col = [0] * len(dims)
                for k, v in zip(keep, row_vals):
                    idx_row[k] = v
                for k, v in zip(keep, col_vals):
                    idx_col[k] = v
                for t, v in zip(traced, tr_vals):
                    idx_row[t] = v
                    idx_col[t] = v
                total += m_idx[tuple(idx_row) + tuple(idx_col)]
            out[flatten(row_vals), flatten(col_vals)] = total
    return out


def bath_correlation_bruteforce(omegas, etas, beta, n_max_per_mode, taus, hbar=1.0, t_ref=0.7):
    """Doubled-space evaluation of <vac| R(t) R(t - tau) |vac> for a small bath.

    Builds explicit multimode matrices: the coupling-weighted bath operator
    R = sum_i (eta_i a_i + conj(eta_i) a_i+), its free Heisenberg evolution
    through the diagonal bath Hamiltonian, and the product-state thermal
    vacuum in the doubled space. Independent of reservoir.correlation.
    """
    spaces = [fock.FockSpace(n_max_per_mode) for _ in omegas]
    dims = [s.dim for s in spaces]
    total = int(np.prod(dims))

    def embed(i, op):
        out = np.eye(1, dtype=complex)
        for j, d in enumerate(dims):
            factor = op if j == i else np.eye(d, dtype=complex)
            out = np.kron(out, factor)
        return out

    r_op = np.zeros((total, total), dtype=complex)
    h_bath = np.zeros((total, total), dtype=complex)
    for i, (w, eta, space) in enumerate(zip(omegas, etas, spaces)):
        a = fock.lowering(space)
        r_op += eta * embed(i, a) + np.conj(eta) * embed(i, a.conj().T)
        h_bath += embed(i, fock.oscillator_hamiltonian(space, w, hbar))

    energies = np.diag(h_bath).real

    def heisenberg(t):
        phases = np.exp(1j * energies * t / hbar)
        return phases[:, None] * r_op * phases.conj()[None, :]

    # Thermal vacuum of the whole bath: product weights on diagonal pairs.
    weight = np.ones(1)
    for w, space in zip(omegas, spaces):
        weight = np.kron(
            weight, tfd.thermal_weights(w, beta, hbar, n_max=space.n_max).weights
        )
    vac = np.zeros(total * total, dtype=complex)
    idx = np.arange(total)
    vac[idx * total + idx] = np.sqrt(weight)

    identity = np.eye(total, dtype=complex)
    values = []
    for tau in taus:
        product = heisenberg(t_ref) @ heisenberg(t_ref - tau)
        doubled = np.kron(product, identity)
        values.append(complex(np.vdot(vac, doubled @ vac)))
    return np.array(values)
