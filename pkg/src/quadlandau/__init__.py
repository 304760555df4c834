"""Atom with a magnetic quadrupole moment in a time-dependent magnetic field.

Closed-form spectra (Landau-type, hard wall, 1/rho and linear scalar
potentials), the special functions behind them, and a finite-difference
radial eigensolver that checks them independently.
"""

__version__ = "0.1.0"
