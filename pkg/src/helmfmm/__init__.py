"""Directional FFT-accelerated fast multipole method for the 3D Helmholtz kernel."""

from .distributions import Distribution, generate_distribution, random_charges
from .geometry import BoundingBox, CellFrame, MortonKey, compute_root_box
from .harness import ExperimentConfig, RunRecord, run_experiment
from .kernel import ErrorReport, HelmholtzKernel, direct_sum, relative_errors
from .traversal import FmmConfig, run_fmm, run_fmm_full
from .tree import ClusterTree, ParticleSet, TreeConfig, build_tree

__version__ = "0.1.0"

__all__ = [
    "BoundingBox",
    "CellFrame",
    "ClusterTree",
    "Distribution",
    "ErrorReport",
    "ExperimentConfig",
    "FmmConfig",
    "HelmholtzKernel",
    "MortonKey",
    "ParticleSet",
    "RunRecord",
    "TreeConfig",
    "build_tree",
    "compute_root_box",
    "direct_sum",
    "generate_distribution",
    "random_charges",
    "relative_errors",
    "run_experiment",
    "run_fmm",
    "run_fmm_full",
]
