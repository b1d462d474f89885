"""Energy-momentum transfer of bounded operators on finite quantum models: a numerical laboratory."""

from .spacetime import DiscreteMeasure, EnvelopeParams, boost, d_kappa, envelope_integral, minkowski_dot
from .fractional import Signal, Spectrum, derivative_from_parts, filter_signal, fractional_filter
from .dyadic import Mollifier, eta_k_l1, telescoping_check
from .toymodel import (
    EnergyWeight, G_minus, G_plus, G_t, OperatorField, QuantumModel, buchholz_check, bundled_mass_shell,
    dyadic_operator_split, frequency_parts, generate, random_field,
)
from .harness import ExperimentConfig, ModelSpec, RunRecord, report, run

__version__ = "0.1.0"
