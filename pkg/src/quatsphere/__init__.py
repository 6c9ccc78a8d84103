"""Induced spherical ensemble of quaternion random matrices.

Sampling, exact finite-N correlation functions, large-N limiting laws and the
tooling to compare them.
"""
from .asympt import bulk_density, classify, edge_density, near_real_conjecture, radii, regime_limit
from .dataset import load_sample, save_sample
from .kernel import (correlation_m, density, kernel_D, kernel_I, kernel_S, norm_gk,
                     radial_cdf, radial_density, skew_inner, sop)
from .params import EnsembleParams
from .quatlin import QuatMatrix, Quaternion, pfaffian, qdet
from .sampler import EigenSample, induced_spherical, sample_eigenvalues, stereographic_project

__all__ = [
    "EigenSample", "EnsembleParams", "QuatMatrix", "Quaternion",
    "bulk_density", "classify", "correlation_m", "density", "edge_density", "induced_spherical",
    "kernel_D", "kernel_I", "kernel_S", "load_sample", "near_real_conjecture", "norm_gk",
    "pfaffian", "qdet", "radial_cdf", "radial_density", "radii", "regime_limit",
    "sample_eigenvalues", "save_sample", "skew_inner", "sop", "stereographic_project",
]
