"""Relativistic collapse of polarization-entangled photon pairs.

Modules: ``kinematics`` (1+1 special relativity), ``polarization`` (two-photon
states and measurement), ``wavepacket`` (Gaussian photon packets),
``bell_harness`` (Monte Carlo CHSH), ``scenario`` (the collapse experiment and
its cross-frame consistency check), ``diagram`` and ``cli``.
"""

__version__ = "0.1.0"
