"""treebed: tight k-trees in k-uniform hypergraphs.

Structure (layerings, pseudopaths, decompositions), generators including
the extremal host H(A, B), and a spanning-tree embedder with an exhaustive
oracle for desk-scale verification.
"""

from .density import (
    DensityReport,
    Exhaustive,
    Sampled,
    Typical,
    UniformlyDense,
    WeaklyQuasirandom,
    density_check,
)
from .embed import (
    Embedding,
    PipelineParams,
    brute_force_embed,
    embed_spanning,
    min_ell,
    sample_reservoir,
    validate_embedding,
)
from .errors import (
    EmbedError,
    FormatError,
    GeneratorError,
    InvalidHypergraphError,
    InvalidTreeError,
    TreebedError,
)
from .generators import (
    ExtremalInstance,
    extremal_instance,
    gen_binomial,
    gen_hab,
    gen_random_ktree,
)
from .hypergraph import Hypergraph, build_hypergraph, largeness_check, walk_inspect
from .io import (
    read_embedding,
    read_host,
    read_tree,
    write_embedding,
    write_host,
    write_tree,
)
from .ktree import (
    KTree,
    Layering,
    Pseudopath,
    build_ktree,
    decompose_beta_d,
    enumerate_small_ktrees,
    find_separated_xfamily,
    flatten,
    k_partition,
    link_graph,
    pseudopath_between,
    tree_distance,
    validate_decomposition,
)

__version__ = "0.1.0"

__all__ = [
    "DensityReport",
    "EmbedError",
    "Embedding",
    "Exhaustive",
    "ExtremalInstance",
    "FormatError",
    "GeneratorError",
    "Hypergraph",
    "InvalidHypergraphError",
    "InvalidTreeError",
    "KTree",
    "Layering",
    "PipelineParams",
    "Pseudopath",
    "Sampled",
    "TreebedError",
    "Typical",
    "UniformlyDense",
    "WeaklyQuasirandom",
    "__version__",
    "brute_force_embed",
    "build_hypergraph",
    "build_ktree",
    "decompose_beta_d",
    "density_check",
    "embed_spanning",
    "enumerate_small_ktrees",
    "extremal_instance",
    "find_separated_xfamily",
    "flatten",
    "gen_binomial",
    "gen_hab",
    "gen_random_ktree",
    "k_partition",
    "largeness_check",
    "link_graph",
    "min_ell",
    "pseudopath_between",
    "read_embedding",
    "read_host",
    "read_tree",
    "sample_reservoir",
    "tree_distance",
    "validate_decomposition",
    "validate_embedding",
    "walk_inspect",
    "write_embedding",
    "write_host",
    "write_tree",
]
