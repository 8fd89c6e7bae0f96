"""Outage analysis of hovering-UAV millimetre-wave links with planar arrays.

Modules:

* :mod:`uavmmw.specfun` - Bessel, Marcum-Q and incomplete-gamma routines.
* :mod:`uavmmw.antenna` - element/array patterns, normalisation, sectorisation.
* :mod:`uavmmw.channel` - path loss, sector weights and Gamma-mixture SNR laws.
* :mod:`uavmmw.montecarlo` - reproducible simulation ground truth.
* :mod:`uavmmw.optimize` - grid search for the outage-optimal array sizes.
* :mod:`uavmmw.cli` - the ``uavmmw`` command-line tool.
"""
__version__ = "0.1.0"
