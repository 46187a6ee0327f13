"""ibflow: periodic 2D immersed-boundary Navier-Stokes solver.

A spectral-projection Euler implicit-explicit scheme for an incompressible
fluid coupled to an elastically tethered particle through a six-point C3
kernel, plus the verification harness (consistency residues, grid-refinement
convergence studies) that checks its first-order-in-dt / second-order-in-h
behaviour.
"""

__version__ = "0.1.0"

from .grid import GridSpec, ScalarField, VectorField
from .kernel import Kernel, ParticleState
from .sim import FluidParams, SimConfig, SimState

__all__ = [
    "GridSpec",
    "ScalarField",
    "VectorField",
    "Kernel",
    "ParticleState",
    "FluidParams",
    "SimConfig",
    "SimState",
    "__version__",
]
