"""Brownian development, damped transports, controls and Bismut integrals."""

from heatlab.stochastic.controls import control_exit_adapted, control_linear, moment_of_control
from heatlab.stochastic.development import develop_path, dump_path, path_horizon
from heatlab.stochastic.integrals import bismut_integrals
from heatlab.stochastic.transports import damped_transports

__all__ = [
    "bismut_integrals",
    "control_exit_adapted",
    "control_linear",
    "damped_transports",
    "develop_path",
    "dump_path",
    "moment_of_control",
    "path_horizon",
]
