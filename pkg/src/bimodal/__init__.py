"""Quantum emitter coupled to a two-mode lossy nanoantenna: steady states and entangled emission.

Submodules
----------
qspace    operator algebra on mode1 (x) mode2 (x) emitter
model     device records, couplings, Hamiltonian and collapse channels
steady    Liouvillian, stationary solve, RK4 reference, observables
entangle  vacuum projection, far-field map, logarithmic negativity
spectra   two-oscillator spectral fits and mode characterization
pipeline  one configuration -> observables; optimal emitter frequency
config    JSON run configuration
sweep     parameter grids, figure presets, CSV output
cli       command-line entry point
"""

__version__ = "0.1.0"

from .errors import BimodalError  # noqa: E402
from .model import AntennaModel, EmitterModel, ModeRecord, load_table1, table1_antenna  # noqa: E402
from .qspace import SpaceDescriptor  # noqa: E402

__all__ = [
    "AntennaModel",
    "BimodalError",
    "EmitterModel",
    "ModeRecord",
    "SpaceDescriptor",
    "__version__",
    "load_table1",
    "table1_antenna",
]
