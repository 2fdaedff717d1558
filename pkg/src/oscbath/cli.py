"""Batch front-end: one JSON config in, CSV/JSON results out.

Usage: ``oscbath <command> --config <path> [--out <dir>] [--seed <u64>]``
with commands rates, evolve, steady, tfd-check, correlation, validate-joint.
Exit codes: 0 success, 1 numerical or precondition failure, 2 config error.

Output is deterministic: floats are written with 17 significant digits and
every file carries the config hash and library version (as ``#`` comment
lines in CSV, as a ``_meta`` object in JSON).
"""

from __future__ import annotations

import argparse
import hashlib
import json
import math
import os
import sys
from typing import Optional

import numpy as np

from . import __version__, fock, joint, lindblad, reservoir, tfd

COMMANDS = ("rates", "evolve", "steady", "tfd-check", "correlation", "validate-joint")

# Blocks tied to a single command; at most the invoked command's block may appear.
COMMAND_BLOCKS = {
    "evolve": "evolve",
    "correlation": "correlation",
    "tfd-check": "tfd",
    "validate-joint": "joint",
}
SHARED_BLOCKS = {"units", "system", "reservoir", "thermal", "output"}


class ConfigError(Exception):
    pass


# ---------------------------------------------------------------------------
# config access helpers


def _check_keys(block: dict, allowed, path: str) -> None:
    for key in block:
        if key not in allowed:
            raise ConfigError(f"{path}.{key}: unknown field")


def _block(cfg: dict, name: str, required: bool) -> Optional[dict]:
    value = cfg.get(name)
    if value is None:
        if required:
            raise ConfigError(f"{name}: required block missing")
        return None
    if not isinstance(value, dict):
        raise ConfigError(f"{name}: must be an object")
    return value


def _num(block: dict, key: str, path: str, default=None, minimum=None, positive=False):
    if key not in block:
        if default is None:
            raise ConfigError(f"{path}.{key}: required number missing")
        return default
    value = block[key]
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise ConfigError(f"{path}.{key}: must be a number")
    value = float(value)
    if not math.isfinite(value):
        raise ConfigError(f"{path}.{key}: must be finite")
    if positive and value <= 0:
        raise ConfigError(f"{path}.{key}: must be positive")
    if minimum is not None and value < minimum:
        raise ConfigError(f"{path}.{key}: must be at least {minimum}")
    return value


def _int(block: dict, key: str, path: str, default=None, minimum=None):
    if key not in block:
        if default is None:
            raise ConfigError(f"{path}.{key}: required integer missing")
        return default
    value = block[key]
    if isinstance(value, bool) or not isinstance(value, int):
        raise ConfigError(f"{path}.{key}: must be an integer")
    if minimum is not None and value < minimum:
        raise ConfigError(f"{path}.{key}: must be at least {minimum}")
    return value


def _opt_num(block: dict, key: str, path: str, positive=False):
    if key not in block:
        return None
    return _num(block, key, path, positive=positive)


def _number_list(block: dict, key: str, path: str):
    value = block.get(key)
    if not isinstance(value, list) or not value:
        raise ConfigError(f"{path}.{key}: must be a nonempty array of numbers")
    out = []
    for i, item in enumerate(value):
        if isinstance(item, bool) or not isinstance(item, (int, float)):
            raise ConfigError(f"{path}.{key}[{i}]: must be a number")
        if not math.isfinite(float(item)):
            raise ConfigError(f"{path}.{key}[{i}]: must be finite")
        out.append(float(item))
    return out


def _complex_list(block: dict, key: str, path: str):
    value = block.get(key)
    if not isinstance(value, list) or not value:
        raise ConfigError(f"{path}.{key}: must be a nonempty array")
    out = []
    for i, item in enumerate(value):
        if isinstance(item, (int, float)) and not isinstance(item, bool):
            out.append(complex(float(item)))
        elif isinstance(item, list) and len(item) == 2 and all(
            isinstance(p, (int, float)) and not isinstance(p, bool) for p in item
        ):
            out.append(complex(float(item[0]), float(item[1])))
        else:
            raise ConfigError(f"{path}.{key}[{i}]: must be a number or [re, im] pair")
    return out


# ---------------------------------------------------------------------------
# block parsers


def _units(cfg: dict):
    block = _block(cfg, "units", required=False) or {}
    _check_keys(block, {"hbar", "kB"}, "units")
    return (
        _num(block, "hbar", "units", default=1.0, positive=True),
        _num(block, "kB", "units", default=1.0, positive=True),
    )


def _system(cfg: dict):
    block = _block(cfg, "system", required=True)
    _check_keys(block, {"omega0", "n_max"}, "system")
    omega0 = _num(block, "omega0", "system", positive=True)
    n_max = _int(block, "n_max", "system", default=30, minimum=1)
    return omega0, n_max


def _thermal_beta(cfg: dict, hbar: float, kB: float, required: bool) -> Optional[float]:
    """Inverse temperature from the thermal block (inf for T = 0)."""
    block = _block(cfg, "thermal", required=required)
    if block is None:
        return None
    _check_keys(block, {"temperature", "beta"}, "thermal")
    if ("temperature" in block) == ("beta" in block):
        raise ConfigError("thermal: specify exactly one of temperature or beta")
    if "beta" in block:
        return _num(block, "beta", "thermal", positive=True)
    temperature = _num(block, "temperature", "thermal", minimum=0.0)
    if temperature == 0.0:
        return math.inf
    return 1.0 / (kB * temperature)


def _mode_arrays(block: dict, path: str):
    _check_keys(block, {"omegas", "etas", "occupations"}, path)
    omegas = _number_list(block, "omegas", path)
    etas = _complex_list(block, "etas", path)
    occupations = (
        _number_list(block, "occupations", path)
        if "occupations" in block
        else [0.0] * len(omegas)
    )
    return np.array(omegas), np.array(etas), np.array(occupations)


def _reservoir_spec(cfg: dict, hbar: float, kB: float) -> reservoir.ReservoirSpec:
    """Mode-based reservoir (explicit arrays or linear_grid descriptor)."""
    block = _block(cfg, "reservoir", required=True)
    if block.get("type") == "direct":
        raise ConfigError("reservoir.type: this command needs a mode-based reservoir")
    try:
        if "modes" in block:
            _check_keys(block, {"modes", "sigma_E", "pv_epsilon"}, "reservoir")
            modes = block["modes"]
            if not isinstance(modes, dict):
                raise ConfigError("reservoir.modes: must be an object")
            omegas, etas, occupations = _mode_arrays(modes, "reservoir.modes")
            return reservoir.ReservoirSpec(
                omegas=omegas,
                etas=etas,
                occupations=occupations,
                sigma_e=_opt_num(block, "sigma_E", "reservoir", positive=True),
                pv_epsilon=_opt_num(block, "pv_epsilon", "reservoir"),
            )
        if block.get("type") == "linear_grid":
            allowed = {
                "type", "omega_min", "omega_max", "count", "coupling_profile",
                "coupling_scale", "temperature", "sigma_E", "pv_epsilon",
            }
            _check_keys(block, allowed, "reservoir")
            return reservoir.linear_grid(
                omega_min=_num(block, "omega_min", "reservoir", positive=True),
                omega_max=_num(block, "omega_max", "reservoir", positive=True),
                count=_int(block, "count", "reservoir", minimum=1),
                coupling_profile=block.get("coupling_profile", "flat"),
                coupling_scale=_num(block, "coupling_scale", "reservoir", default=1.0),
                temperature=_num(block, "temperature", "reservoir", minimum=0.0),
                hbar=hbar,
                kB=kB,
                sigma_e=_opt_num(block, "sigma_E", "reservoir", positive=True),
                pv_epsilon=_opt_num(block, "pv_epsilon", "reservoir"),
            )
    except ValueError as exc:
        raise ConfigError(f"reservoir: {exc}") from exc
    raise ConfigError("reservoir: needs either a 'modes' object or type 'linear_grid'")


def _rates_for(cfg: dict, omega0: float, hbar: float, kB: float) -> reservoir.ReservoirRates:
    """Rates from any reservoir form (direct values or mode sums)."""
    block = _block(cfg, "reservoir", required=True)
    if block.get("type") == "direct":
        allowed = {"type", "gamma", "gamma_prime", "n_bar", "delta", "delta_prime"}
        _check_keys(block, allowed, "reservoir")
        gamma = _num(block, "gamma", "reservoir", minimum=0.0)
        delta = _num(block, "delta", "reservoir", default=0.0)
        delta_prime = _num(block, "delta_prime", "reservoir", default=0.0)
        if "gamma_prime" in block and "n_bar" in block:
            raise ConfigError("reservoir: specify at most one of gamma_prime, n_bar")
        if "gamma_prime" in block:
            gp = _num(block, "gamma_prime", "reservoir", minimum=0.0)
            return reservoir.direct_rates(gamma, gamma_prime=gp, delta=delta, delta_prime=delta_prime)
        if "n_bar" in block:
            n_bar = _num(block, "n_bar", "reservoir", minimum=0.0)
        else:
            beta = _thermal_beta(cfg, hbar, kB, required=True)
            n_bar = 0.0 if math.isinf(beta) else reservoir.bose_einstein(
                omega0, 1.0 / (kB * beta), hbar, kB
            )
        return reservoir.direct_rates(gamma, n_bar=n_bar, delta=delta, delta_prime=delta_prime)
    spec = _reservoir_spec(cfg, hbar, kB)
    try:
        return reservoir.rates(spec, omega0, hbar)
    except ValueError as exc:
        raise ConfigError(f"reservoir: {exc}") from exc


def _initial_state(cfg: dict, space: fock.FockSpace, omega0: float, hbar: float, kB: float):
    block = _block(cfg, "evolve", required=True)
    desc = block.get("initial_state")
    if not isinstance(desc, dict):
        raise ConfigError("evolve.initial_state: must be an object")
    kind = desc.get("type")
    if kind == "fock":
        _check_keys(desc, {"type", "n"}, "evolve.initial_state")
        n = _int(desc, "n", "evolve.initial_state", minimum=0)
        if n > space.n_max:
            raise ConfigError(f"evolve.initial_state.n: exceeds n_max {space.n_max}")
        vec = fock.basis_state(space, n)
        return np.outer(vec, vec.conj())
    if kind == "thermal":
        _check_keys(desc, {"type"}, "evolve.initial_state")
        beta = _thermal_beta(cfg, hbar, kB, required=True)
        weights = tfd.thermal_weights(omega0, beta, hbar, n_max=space.n_max)
        return np.diag(weights.weights).astype(complex)
    if kind == "superposition":
        _check_keys(desc, {"type", "coefficients"}, "evolve.initial_state")
        coeffs = _complex_list(desc, "coefficients", "evolve.initial_state")
        if len(coeffs) > space.dim:
            raise ConfigError(
                f"evolve.initial_state.coefficients: {len(coeffs)} entries exceed dim {space.dim}"
            )
        vec = np.zeros(space.dim, dtype=complex)
        vec[: len(coeffs)] = coeffs
        norm = np.linalg.norm(vec)
        if norm == 0:
            raise ConfigError("evolve.initial_state.coefficients: zero vector")
        vec = vec / norm
        return np.outer(vec, vec.conj())
    raise ConfigError(
        "evolve.initial_state.type: must be one of fock, thermal, superposition"
    )


# ---------------------------------------------------------------------------
# output writers


def _fmt(value) -> str:
    if isinstance(value, str):
        return value
    return f"{float(value):.17g}"


class OutputSink:
    def __init__(self, command: str, cfg: dict, out_dir: str, config_hash: str):
        block = _block(cfg, "output", required=False) or {}
        _check_keys(block, {"path", "format"}, "output")
        self.base = block.get("path", command)
        if not isinstance(self.base, str) or not self.base:
            raise ConfigError("output.path: must be a nonempty string")
        fmt = block.get("format", "both")
        if fmt not in ("csv", "json", "both"):
            raise ConfigError("output.format: must be csv, json, or both")
        self.format = fmt
        self.command = command
        self.out_dir = out_dir
        self.config_hash = config_hash
        self.written = []

    def _path(self, ext: str) -> str:
        os.makedirs(self.out_dir, exist_ok=True)
        return os.path.join(self.out_dir, f"{self.base}.{ext}")

    def meta_lines(self):
        return [
            f"# oscbath-version={__version__}",
            f"# command={self.command}",
            f"# config-sha256={self.config_hash}",
        ]

    def write_csv(self, header, rows) -> None:
        if self.format == "json":
            return
        path = self._path("csv")
        lines = self.meta_lines()
        lines.append(",".join(header))
        for row in rows:
            lines.append(",".join(_fmt(v) for v in row))
        with open(path, "w") as fh:
            fh.write("\n".join(lines) + "\n")
        self.written.append(path)

    def write_json(self, payload: dict) -> None:
        if self.format == "csv":
            return
        path = self._path("json")
        payload = dict(payload)
        payload["_meta"] = {
            "oscbath_version": __version__,
            "command": self.command,
            "config_sha256": self.config_hash,
        }
        with open(path, "w") as fh:
            json.dump(payload, fh, indent=2, sort_keys=True)
            fh.write("\n")
        self.written.append(path)


# ---------------------------------------------------------------------------
# commands


def _cmd_rates(cfg: dict, sink: OutputSink, seed: int) -> None:
    hbar, kB = _units(cfg)
    omega0, _ = _system(cfg)
    spec = _reservoir_spec(cfg, hbar, kB)
    result = reservoir.rates(spec, omega0, hbar)
    n_at = reservoir.mean_occupation_at(spec, omega0)
    ratio = result.gamma_prime / result.gamma if result.gamma > 0 else math.nan
    header = ["gamma", "gamma_prime", "delta", "delta_prime", "n_omega0", "gamma_ratio"]
    sink.write_csv(header, [[
        result.gamma, result.gamma_prime, result.delta, result.delta_prime, n_at, ratio,
    ]])
    sink.write_json({
        "gamma": result.gamma,
        "gamma_prime": result.gamma_prime,
        "delta": result.delta,
        "delta_prime": result.delta_prime,
        "n_omega0": n_at,
        "gamma_ratio": ratio,
        "sigma_E": result.sigma_e,
        "pv_epsilon": result.pv_epsilon,
        "resolution_warning": result.resolution_warning,
        "delta_at_double_epsilon": result.delta_at_double_epsilon,
        "delta_prime_at_double_epsilon": result.delta_prime_at_double_epsilon,
    })


def _cmd_evolve(cfg: dict, sink: OutputSink, seed: int) -> None:
    hbar, kB = _units(cfg)
    omega0, n_max = _system(cfg)
    space = fock.FockSpace(n_max)
    rates = _rates_for(cfg, omega0, hbar, kB)
    block = _block(cfg, "evolve", required=True)
    _check_keys(block, {"t_final", "dt", "sample_every", "initial_state"}, "evolve")
    t_final = _num(block, "t_final", "evolve", positive=True)
    dt = _num(block, "dt", "evolve", positive=True)
    sample_every = _int(block, "sample_every", "evolve", default=1, minimum=1)
    sigma0 = _initial_state(cfg, space, omega0, hbar, kB)
    spec = lindblad.MasterEquationSpec(space=space, omega0=omega0, rates=rates, hbar=hbar)
    traj = lindblad.evolve(spec, sigma0, t_final, dt, sample_every)
    obs = traj.observables
    rows = [
        [
            traj.times[i],
            obs["mean_n"][i],
            obs["trace"][i],
            obs["purity"][i],
            obs["min_eigenvalue"][i],
            obs["coherence_01"][i].real,
            obs["coherence_01"][i].imag,
        ]
        for i in range(len(traj.times))
    ]
    sink.write_csv(
        ["time", "mean_n", "trace", "purity", "min_eig", "re01", "im01"], rows
    )
    sink.write_json({
        "samples": len(traj.times),
        "final_mean_n": float(obs["mean_n"][-1]),
        "max_trace_drift": float(np.max(np.abs(obs["trace"] - 1.0))),
        "min_eigenvalue": float(np.min(obs["min_eigenvalue"])),
    })


def _cmd_steady(cfg: dict, sink: OutputSink, seed: int) -> None:
    hbar, kB = _units(cfg)
    omega0, n_max = _system(cfg)
    beta = _thermal_beta(cfg, hbar, kB, required=True)
    rates = _rates_for(cfg, omega0, hbar, kB)
    spec = lindblad.MasterEquationSpec(
        space=fock.FockSpace(n_max), omega0=omega0, rates=rates, hbar=hbar
    )
    sigma = lindblad.steady_state(spec)
    nop = fock.number(spec.space)
    mean_n = float(np.trace(nop @ sigma).real)
    n_be = 0.0 if math.isinf(beta) else reservoir.bose_einstein(
        omega0, 1.0 / (kB * beta), hbar, kB
    )
    diff = mean_n - n_be
    rel = diff / n_be if n_be > 0 else math.nan
    rows = [[n, float(sigma[n, n].real)] for n in range(spec.space.dim)]
    sink.write_csv(["n", "population"], rows)
    sink.write_json({
        "mean_n": mean_n,
        "bose_einstein": n_be,
        "difference": diff,
        "relative_difference": rel,
        "gamma": rates.gamma,
        "gamma_prime": rates.gamma_prime,
    })


def _cmd_tfd_check(cfg: dict, sink: OutputSink, seed: int) -> None:
    hbar, kB = _units(cfg)
    omega0, n_max = _system(cfg)
    block = _block(cfg, "tfd", required=True)
    _check_keys(block, {"betas", "temperatures", "observables"}, "tfd")
    if ("betas" in block) == ("temperatures" in block):
        raise ConfigError("tfd: specify exactly one of betas or temperatures")
    if "betas" in block:
        betas = _number_list(block, "betas", "tfd")
        if any(b <= 0 for b in betas):
            raise ConfigError("tfd.betas: must be positive")
    else:
        temps = _number_list(block, "temperatures", "tfd")
        if any(t <= 0 for t in temps):
            raise ConfigError("tfd.temperatures: must be positive")
        betas = [1.0 / (kB * t) for t in temps]
    n_obs = _int(block, "observables", "tfd", default=100, minimum=1)
    rng = np.random.default_rng(seed)

    from . import sma

    basis = sma.LabeledBasis.standard(n_max + 1)
    rows = []
    worst = {"purification": 0.0, "expectation": 0.0, "norm": 0.0}
    for beta in betas:
        weights = tfd.thermal_weights(omega0, beta, hbar, n_max=n_max)
        vac = tfd.thermal_vacuum(weights)
        purification = tfd.purify_check(vac)
        norm_defect = abs(float(np.linalg.norm(vac.amplitudes)) - 1.0)
        rho = sma.density_operator(basis, weights.weights)
        expectation = 0.0
        for _ in range(n_obs):
            z = rng.normal(size=(n_max + 1, n_max + 1)) + 1j * rng.normal(
                size=(n_max + 1, n_max + 1)
            )
            obs_f = (z + z.conj().T) / 2
            via_vacuum = tfd.tfd_expectation(vac, obs_f)
            via_trace = sma.statistical_mean(rho, obs_f)
            via_sum = float(np.sum(weights.weights * np.diag(obs_f).real))
            expectation = max(
                expectation, abs(via_vacuum - via_trace), abs(via_vacuum - via_sum)
            )
        rows.append([beta, purification, expectation, norm_defect])
        worst["purification"] = max(worst["purification"], purification)
        worst["expectation"] = max(worst["expectation"], expectation)
        worst["norm"] = max(worst["norm"], norm_defect)
    sink.write_csv(
        ["beta", "purification_defect", "expectation_defect", "norm_defect"], rows
    )
    sink.write_json({
        "betas": betas,
        "observables_per_beta": n_obs,
        "max_purification_defect": worst["purification"],
        "max_expectation_defect": worst["expectation"],
        "max_norm_defect": worst["norm"],
    })


def _cmd_correlation(cfg: dict, sink: OutputSink, seed: int) -> None:
    hbar, kB = _units(cfg)
    spec = _reservoir_spec(cfg, hbar, kB)
    block = _block(cfg, "correlation", required=True)
    _check_keys(block, {"tau_max", "count"}, "correlation")
    tau_max = _num(block, "tau_max", "correlation", positive=True)
    count = _int(block, "count", "correlation", minimum=2)
    taus = np.linspace(0.0, tau_max, count)
    values = reservoir.correlation(spec, taus)
    rows = [[taus[i], values[i].real, values[i].imag] for i in range(count)]
    sink.write_csv(["tau", "re_g", "im_g"], rows)
    sink.write_json({
        "tau_max": tau_max,
        "count": count,
        "g_zero": values[0].real,
    })


def _parse_joint_modes(block: dict):
    modes = block.get("modes")
    if not isinstance(modes, dict):
        raise ConfigError("joint.modes: must be an object")
    if modes.get("type") == "linear_grid":
        allowed = {"type", "omega_min", "omega_max", "count", "coupling_profile", "coupling_scale"}
        _check_keys(modes, allowed, "joint.modes")
        omega_min = _num(modes, "omega_min", "joint.modes", positive=True)
        omega_max = _num(modes, "omega_max", "joint.modes", positive=True)
        count = _int(modes, "count", "joint.modes", minimum=1)
        scale = _num(modes, "coupling_scale", "joint.modes", default=1.0)
        profile = modes.get("coupling_profile", "flat")
        if omega_max <= omega_min:
            raise ConfigError("joint.modes.omega_max: must exceed omega_min")
        omegas = np.linspace(omega_min, omega_max, count)
        if profile == "flat":
            etas = np.full(count, scale, dtype=complex)
        elif profile == "ohmic":
            etas = (scale * np.sqrt(omegas)).astype(complex)
        else:
            raise ConfigError("joint.modes.coupling_profile: must be flat or ohmic")
        return omegas, etas
    omegas, etas, _ = _mode_arrays(modes, "joint.modes")
    return omegas, etas


def _cmd_validate_joint(cfg: dict, sink: OutputSink, seed: int) -> None:
    hbar, kB = _units(cfg)
    omega0, n_max = _system(cfg)
    block = _block(cfg, "joint", required=True)
    allowed = {
        "modes", "per_mode_n_max", "beta", "dim_cap", "t_final",
        "sample_dt", "master_dt", "method",
    }
    _check_keys(block, allowed, "joint")
    omegas, etas = _parse_joint_modes(block)
    per_mode = _int(block, "per_mode_n_max", "joint", default=1, minimum=1)
    dim_cap = _int(block, "dim_cap", "joint", default=joint.DEFAULT_JOINT_DIM_CAP, minimum=2)
    t_final = _num(block, "t_final", "joint", positive=True)
    sample_dt = _num(block, "sample_dt", "joint", positive=True)
    master_dt = _num(block, "master_dt", "joint", positive=True)
    method = block.get("method", "auto")
    if method not in ("auto", "sector", "full"):
        raise ConfigError("joint.method: must be auto, sector, or full")
    beta_raw = block.get("beta", "inf")
    if beta_raw == "inf":
        beta = math.inf
    elif isinstance(beta_raw, (int, float)) and not isinstance(beta_raw, bool):
        beta = float(beta_raw)
        if beta <= 0:
            raise ConfigError("joint.beta: must be positive")
    else:
        raise ConfigError("joint.beta: must be a positive number or 'inf'")

    sample_every = int(round(sample_dt / master_dt))
    if sample_every < 1 or abs(sample_every * master_dt - sample_dt) > 1e-9 * sample_dt:
        raise ConfigError("joint.sample_dt: must be an integer multiple of master_dt")

    if math.isinf(beta):
        occupations = np.zeros(len(omegas))
    else:
        occupations = np.array(
            [reservoir.tfd_occupation(w, beta, hbar, n_max=per_mode) for w in omegas]
        )
    rspec = reservoir.ReservoirSpec(omegas=omegas, etas=etas, occupations=occupations)
    rates = reservoir.rates(rspec, omega0, hbar)

    system = fock.FockSpace(n_max)
    vec = fock.basis_state(system, 1)
    sigma0 = np.outer(vec, vec.conj())
    mspec = lindblad.MasterEquationSpec(space=system, omega0=omega0, rates=rates, hbar=hbar)
    traj = lindblad.evolve(mspec, sigma0, t_final, master_dt, sample_every)

    modes = tuple(
        joint.BathMode(omega=w, eta=e, space=fock.FockSpace(per_mode))
        for w, e in zip(omegas, etas)
    )
    jspec = joint.JointSpec(
        system=system, omega0=omega0, modes=modes, hbar=hbar, beta=beta, dim_cap=dim_cap
    )
    if method == "auto":
        if jspec.total_dim <= dim_cap:
            method = "full"
        elif math.isinf(beta):
            method = "sector"
        else:
            raise ConfigError(
                "joint: dimension exceeds dim_cap and the sector method needs beta='inf'"
            )
    if method == "sector":
        exact_times = traj.times
        exact_sigmas = joint.evolve_single_excitation(jspec, exact_times)
    else:
        rho0 = joint.initial_state(jspec, sigma0)
        exact_times, exact_sigmas = joint.evolve_exact(jspec, rho0, t_final, sample_dt)

    n_floor = (
        rates.gamma_prime / rates.gamma
        if rates.gamma > 0 and not math.isinf(beta)
        else 0.0
    )
    report = joint.compare_with_master(jspec, exact_times, exact_sigmas, traj, n_floor)
    nop = fock.number(system)
    rows = [
        [
            report.times[i],
            float(np.trace(nop @ exact_sigmas[i]).real),
            traj.observables["mean_n"][i],
            report.trace_distances[i],
        ]
        for i in range(len(report.times))
    ]
    sink.write_csv(["time", "mean_n_exact", "mean_n_master", "trace_distance"], rows)
    sink.write_json({
        "method": method,
        "gamma_fit": report.gamma_fit,
        "gamma_rates": rates.gamma,
        "fit_ratio": (report.gamma_fit / rates.gamma) if report.gamma_fit else None,
        "recurrence_time": report.recurrence_time,
        "window_t_max": report.window_t_max,
        "max_trace_distance": report.max_trace_distance,
    })


_DISPATCH = {
    "rates": _cmd_rates,
    "evolve": _cmd_evolve,
    "steady": _cmd_steady,
    "tfd-check": _cmd_tfd_check,
    "correlation": _cmd_correlation,
    "validate-joint": _cmd_validate_joint,
}


def _load_config(path: str) -> tuple:
    try:
        with open(path, "rb") as fh:
            raw = fh.read()
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from exc
    try:
        cfg = json.loads(raw.decode("utf-8"))
    except json.JSONDecodeError as exc:
        raise ConfigError(
            f"parse error in {path} at line {exc.lineno} column {exc.colno}: {exc.msg}"
        ) from exc
    if not isinstance(cfg, dict):
        raise ConfigError(f"{path}: top level must be an object")
    return cfg, hashlib.sha256(raw).hexdigest()


def _validate_top_level(cfg: dict, command: str) -> None:
    own_block = COMMAND_BLOCKS.get(command)
    allowed = SHARED_BLOCKS | ({own_block} if own_block else set())
    for key in cfg:
        if key in SHARED_BLOCKS or key == own_block:
            continue
        if key in COMMAND_BLOCKS.values():
            raise ConfigError(
                f"{key}: block belongs to another command; exactly one command block per run"
            )
        raise ConfigError(f"{key}: unknown field (allowed: {', '.join(sorted(allowed))})")


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(
        prog="oscbath",
        description="Damped-oscillator reservoir calculations driven by a JSON config.",
    )
    parser.add_argument("command", choices=COMMANDS)
    parser.add_argument("--config", required=True, help="path to the JSON experiment config")
    parser.add_argument("--out", default=".", help="directory for output files")
    parser.add_argument("--seed", type=int, default=0, help="seed for randomized checks")
    args = parser.parse_args(argv)

    try:
        cfg, config_hash = _load_config(args.config)
        _validate_top_level(cfg, args.command)
        sink = OutputSink(args.command, cfg, args.out, config_hash)
        _DISPATCH[args.command](cfg, sink, args.seed)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 2
    except (ValueError, lindblad.NumericalError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    for path in sink.written:
        print(f"wrote {path}")
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
