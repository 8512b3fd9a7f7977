"""Spectral clustering of edge-weighted graphs with volume-regularity certificates."""

from .errors import SpecregError
from .generators import PlantedModel, erdos_renyi, expected_matrix, generate
from .graph import (
    WeightedGraph,
    complement,
    from_edge_list,
    read_edge_list,
    relative_density,
    volume,
    weighted_cut,
    write_edge_list,
)
from .objectives import (
    extremize_partition_exact,
    isoperimetric_exact,
    modularity,
    normalized_cut,
    verify_bounds,
)
from .partitioning import (
    KMeansResult,
    Partition,
    exact_min_k_variance,
    k_variance,
    spectral_cluster,
    weighted_kmeans,
)
from .regularity import (
    RegularityCertificate,
    alpha_exact,
    alpha_sampled,
    certify,
    mixing_check_exact,
)
from .spectral import Spectrum, decompose, modularity_norm, representatives, select_k

__version__ = "0.1.0"

__all__ = [
    "KMeansResult",
    "Partition",
    "PlantedModel",
    "RegularityCertificate",
    "SpecregError",
    "Spectrum",
    "WeightedGraph",
    "alpha_exact",
    "alpha_sampled",
    "certify",
    "complement",
    "decompose",
    "erdos_renyi",
    "exact_min_k_variance",
    "expected_matrix",
    "extremize_partition_exact",
    "from_edge_list",
    "generate",
    "isoperimetric_exact",
    "k_variance",
    "mixing_check_exact",
    "modularity",
    "modularity_norm",
    "normalized_cut",
    "read_edge_list",
    "relative_density",
    "representatives",
    "select_k",
    "spectral_cluster",
    "verify_bounds",
    "volume",
    "weighted_cut",
    "weighted_kmeans",
    "write_edge_list",
]
