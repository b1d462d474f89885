from .buchholz import BuchholzResult, buchholz_check, jordan_block, nullspace_projector, random_lemma_matrix
from .fields import (
    DyadicSplit, OperatorField, commutator_norm, default_kappa_grid, dyadic_operator_split, energy_weight,
    frequency_part, frequency_parts, kappa_fit, momentum_filter, operator_norm, power_iteration_norm, random_field,
    smear, spectral_projector, time_derivative, time_domain_parts, translate,
)
from .spectrum import (
    QuantumModel, bundled_mass_shell, generate, lattice_model, mass_shell_model, random_cone_model,
    spatially_distinct,
)
from .weights import EnergyWeight, G_minus, G_plus, G_t, zero_weight
