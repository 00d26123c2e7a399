"""Bit-flip rates of dissipative cat qubits from adiabatic elimination.

Closed-form rates, Kerr eigensums and brute-force Lindbladian spectra for a
bosonic mode stabilized by two-photon dissipation ``kappa2 D[a^2 - alpha^2]``.
Rates are in units of kappa2.
"""

from .errors import CatBitflipError, ConfigError, NumericalError
from .fock import FockSpace, default_dim
from .kerr import s1_s2
from .liouville import PerturbationSpec, cat_basis
from .rates import detuning_rate, leaking_dissipator_rate, photon_loss_rate, zgate_rate
from .spectral import spectral_rate

__version__ = "0.1.0"
