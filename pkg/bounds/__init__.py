"""Lower bounds on achievable NMSE: information-theoretic and spectral-support."""

from bounds.info_bound import (
    DensityEstimate,
    InfoQuantities,
    estimate_densities,
    histogram_entropy,
    info_bound_db,
    kde_pdf,
    mutual_information,
    path_energy,
)
from bounds.support_bound import (
    SupportBoundResult,
    SupportSet,
    spectral_support,
    support_bound_db,
    support_ratio,
)

__all__ = [
    "DensityEstimate",
    "InfoQuantities",
    "SupportBoundResult",
    "SupportSet",
    "estimate_densities",
    "histogram_entropy",
    "info_bound_db",
    "kde_pdf",
    "mutual_information",
    "path_energy",
    "spectral_support",
    "support_bound_db",
    "support_ratio",
]
