"""Nonnegative tensor ring decomposition with optional graph regularization.

A dense-tensor numerical library built on numpy: ring-format core chains,
an accelerated proximal gradient solver for the nonnegative fit, mutual
p-nearest-neighbor graph Laplacians for manifold-aware regularization,
and the clustering/classification metrics used to evaluate the extracted
features.  The ``tring`` command line drives reproducible desk-scale
experiments on top of it.
"""

__version__ = "0.1.0"

from .graph import (
    NeighborGraph,
    knn_graph,
    laplacian_quadratic,
    neighbor_graph,
    pairwise_distances,
)
from .metrics import accuracy, entropy, kmeans, knn_classify, mutual_information, nmi, sparseness
from .ring import (
    TRCores,
    build_subchain,
    core_fold2,
    core_unfold2,
    feature_matrix,
    init_random,
    reconstruct,
    relative_error,
    subchain_fold2,
    subchain_unfold2,
)
from .solver import (
    DegenerateSubproblemError,
    FitReport,
    NumericalError,
    SolverConfig,
    alpha_next,
    fit,
    gradient_gntr,
    gradient_ntr,
    lipschitz_gntr,
    lipschitz_ntr,
    prox_step,
    search_point,
    solve_core,
)
from .synthetic import blob_tensor, ring_tensor
from .tensor_ops import (
    contract_single_mode,
    fold_classical,
    fold_tr,
    frobenius_norm,
    inner_product,
    mode_n_product,
    spectral_norm,
    unfold_classical,
    unfold_tr,
)

__all__ = [
    "TRCores",
    "NeighborGraph",
    "SolverConfig",
    "FitReport",
    "DegenerateSubproblemError",
    "NumericalError",
    "inner_product",
    "frobenius_norm",
    "mode_n_product",
    "unfold_classical",
    "fold_classical",
    "unfold_tr",
    "fold_tr",
    "contract_single_mode",
    "spectral_norm",
    "init_random",
    "build_subchain",
    "subchain_unfold2",
    "subchain_fold2",
    "core_unfold2",
    "core_fold2",
    "reconstruct",
    "relative_error",
    "feature_matrix",
    "pairwise_distances",
    "knn_graph",
    "neighbor_graph",
    "laplacian_quadratic",
    "gradient_ntr",
    "gradient_gntr",
    "lipschitz_ntr",
    "lipschitz_gntr",
    "alpha_next",
    "search_point",
    "prox_step",
    "solve_core",
    "fit",
    "sparseness",
    "accuracy",
    "mutual_information",
    "entropy",
    "nmi",
    "kmeans",
    "knn_classify",
    "ring_tensor",
    "blob_tensor",
]
