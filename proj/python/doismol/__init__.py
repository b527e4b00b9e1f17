"""Doi and Smoluchowski binding models in a reflecting ball."""

from ._doismol import (
    DomainError,
    Geometry,
    NumericsError,
    SpectralSolution,
    reference_grids,
    doi_eigenvalues,
    loglog_slope,
    mean_binding_doi,
    mean_binding_smol,
    mean_diff,
    rel_diff,
    simulate_mean,
    smol_eigenvalues,
    sup_norm_cdf_diff,
)

__all__ = [
    "DomainError",
    "Geometry",
    "NumericsError",
    "SpectralSolution",
    "reference_grids",
    "doi_eigenvalues",
    "loglog_slope",
    "mean_binding_doi",
    "mean_binding_smol",
    "mean_diff",
    "rel_diff",
    "simulate_mean",
    "smol_eigenvalues",
    "sup_norm_cdf_diff",
]
