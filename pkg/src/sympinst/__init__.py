"""Exact verification of cohomology computations for symplectic instanton bundles."""

from __future__ import annotations

__version__ = "0.1.0"

from .exactla import Config, SparseMat, block_ranks, kernel_basis, rank_exact, rank_modular
from .repmod import AltSq, SymSq, SymU, Tensor, V, dimension, enumerate_basis, lie_action, weights
from .cgmaps import build_beta, build_epsilon, build_mu, build_phi_dual, build_connector
from .cohom import VerdictReport, compute_h2, verify_paper_formulas
from .monad import build_special_B, sample_rank, solve_symplectic

__all__ = [
    "__version__",
    "Config", "SparseMat", "block_ranks", "kernel_basis", "rank_exact", "rank_modular",
    "AltSq", "SymSq", "SymU", "Tensor", "V", "dimension", "enumerate_basis", "lie_action", "weights",
    "build_beta", "build_epsilon", "build_mu", "build_phi_dual", "build_connector",
    "VerdictReport", "compute_h2", "verify_paper_formulas",
    "build_special_B", "sample_rank", "solve_symplectic",
]
