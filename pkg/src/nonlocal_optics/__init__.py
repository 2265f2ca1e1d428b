"""Quantum and classical models of nonlocal optical effects.

Modules
-------
core
    Frequency grids, fields, dispersive media, statistics and seeded RNG.
dispersion
    Entangled pairs and classical pulse trains through distant dispersive media.
chaotic
    Thermal light split onto identical media; intensity correlations.
modulation
    Distant phase modulators, sideband statistics and the frequency-sum spread.
interferometer
    Franson interferometry, the Ou-Mandel model, CHSH and the visibility bound.
cli
    Command-line front end (``python -m nonlocal_optics``).
"""

from .core import (
    AliasingError,
    ComplexField,
    DispersiveMedium,
    FrequencyGrid,
    RandomStream,
    SummaryStats,
)

__version__ = "0.1.0"

__all__ = [
    "AliasingError",
    "ComplexField",
    "DispersiveMedium",
    "FrequencyGrid",
    "RandomStream",
    "SummaryStats",
]
