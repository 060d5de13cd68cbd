"""Random commuting matrix tuples: spectra, eigenvalue densities, samplers and equilibrium laws."""

from .densities import (
    DensityReport,
    ExternalField,
    LogGas,
    k_n_functional,
    log_ginibre_density,
    log_rho_2x2,
    log_scaled_density,
    projected_density,
    radial_integral,
)
from .equilibrium import (
    EnergyReport,
    EquilibriumLaw,
    LawKind,
    axis_projection,
    discrete_energy,
    equilibrium_radius,
    ks_distance_1d,
    minimize_energy,
    projected_cdf,
    sample_equilibrium,
)
from .errors import RMTError
from .jacobians import (
    ChartMap,
    KappaCase,
    UnipotentParam,
    gamma_det_closed,
    gamma_matrix,
    gamma_matrix_2x2,
    hermitian_chart,
    kappa_closed_form,
    kappa_numeric,
    log_integrand_thmd2,
    numeric_gram_jacobian,
    tangent_check,
    tangent_dimension,
    triangular_chart,
)
from .mcmc import ChainConfig, ChainResult, ldp_concentration, sample_2x2_joint, sample_chain
from .tuples import (
    Banner,
    EigenConfig,
    Irreducibility,
    MatrixTuple,
    commutator_defect,
    dim_banner_stratum,
    dim_variety,
    haar_unitary,
    hoffman_wielandt_gap,
    irreducibility_status,
    multi_spectrum,
    reconstruct_tuple,
)

__all__ = [name for name in dir() if not name.startswith("_")]
