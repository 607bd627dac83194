from .functional import density_terms, energy_density, sobolev_ratio, total_energy

__all__ = ["density_terms", "energy_density", "sobolev_ratio", "total_energy"]
