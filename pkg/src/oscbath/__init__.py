"""Toolkit for a damped quantum harmonic oscillator coupled to a discretized
thermal reservoir.

Layers, bottom up:

* ``fock``      truncated single-mode ladder operators and tensor utilities
* ``sma``       measurement-symbol algebra over labeled orthonormal bases
* ``tfd``       thermal weights, doubled-space thermal vacuum, purification
* ``reservoir`` bath mode lists, transition rates, level shifts, correlations
* ``lindblad``  the master-equation generator, integrator, and steady state
* ``joint``     exact unitary system+bath evolution used as a validation oracle
* ``cli``       JSON-config batch front-end emitting CSV/JSON
"""

__version__ = "0.1.0"

from . import cli, fock, joint, lindblad, reservoir, sma, tfd  # noqa: F401
from .fock import FockSpace
from .lindblad import MasterEquationSpec, NumericalError, Trajectory
from .reservoir import ReservoirRates, ReservoirSpec

__all__ = [
    "FockSpace",
    "MasterEquationSpec",
    "NumericalError",
    "ReservoirRates",
    "ReservoirSpec",
    "Trajectory",
    "cli",
    "fock",
    "joint",
    "lindblad",
    "reservoir",
    "sma",
    "tfd",
]
