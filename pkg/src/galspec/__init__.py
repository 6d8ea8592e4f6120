"""Spectral decompositions of differential operators from data, via
Galerkin projection onto kernel landmark bases."""

from .galerkin import (GramTriplet, SpectralEstimate, build_gram_generic,
                       build_gram_laplacian, build_gram_laplacian_dist,
                       build_gram_laplacian_dot, decompose,
                       empirical_orthogonality, evaluate_eigenfunction,
                       evaluate_eigenfunctions, gevd, gsvd, load_estimate,
                       save_estimate)
from .graph import (GraphWeights, graph_decompose, graph_energy_matrix,
                    rescale_eigenvalues, weight_matrix, weight_matrix_from_kernel)
from .ground_truth import (GroundTruthSpectrum, estimate_to_inverses,
                           sample_gaussian, sample_sphere, sample_two_moons,
                           sphere_spectrum, surrogate_error, two_moons_labels)
from .harness import (ExperimentConfig, ResultRecord, export_eigenfunction_grid,
                      run_experiment, time_scaling_report)
from .hermite import (HermiteModel, HermiteProblem, hermite_fit,
                      hermite_predict, hermite_predict_batch, plain_ridge_fit)
from .kernels import KernelSpec, grad_dot, grad_inner, kernel_eval

__all__ = [
    "KernelSpec", "kernel_eval", "grad_inner", "grad_dot",
    "GramTriplet", "SpectralEstimate", "build_gram_generic",
    "build_gram_laplacian", "build_gram_laplacian_dot",
    "build_gram_laplacian_dist", "gevd", "gsvd", "decompose",
    "evaluate_eigenfunction", "evaluate_eigenfunctions",
    "empirical_orthogonality", "save_estimate", "load_estimate",
    "GraphWeights", "weight_matrix", "weight_matrix_from_kernel",
    "graph_energy_matrix", "graph_decompose", "rescale_eigenvalues",
    "GroundTruthSpectrum", "sphere_spectrum", "surrogate_error",
    "estimate_to_inverses", "sample_sphere", "sample_two_moons",
    "two_moons_labels", "sample_gaussian",
    "HermiteProblem", "HermiteModel", "hermite_fit", "hermite_predict",
    "hermite_predict_batch", "plain_ridge_fit",
    "ExperimentConfig", "ResultRecord", "run_experiment",
    "export_eigenfunction_grid", "time_scaling_report",
]
