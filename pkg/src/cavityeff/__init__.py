"""Matter Hamiltonians with the cavity traced out, and the numerics to test them."""

from .bogoliubov import QuadraticBosonForm, diagonalize_quadratic, single_mode
from .effective import CouplingChannel, MatsubaraKernelSpec, build_effective, matsubara_kernel
from .models import DickeParams
from .spin import SpinSector, build_spin_operators, sector_list
from .thermo import analytic_free_energy, free_energy_from_spectra

__version__ = "0.1.0"

__all__ = [
    "CouplingChannel", "DickeParams", "MatsubaraKernelSpec", "QuadraticBosonForm", "SpinSector",
    "analytic_free_energy", "build_effective", "build_spin_operators", "diagonalize_quadratic",
    "free_energy_from_spectra", "matsubara_kernel", "sector_list", "single_mode",
]
