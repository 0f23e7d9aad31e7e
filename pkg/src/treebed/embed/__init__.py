"""The embedding pipeline: oracle, stage implementations, and the driver."""

from .absorb import (
    AbsorbingFamily,
    AbsorbingTuple,
    absorb_complete,
    cover_embedding,
    find_absorbing_tuples,
    is_x_covered,
    select_absorbing_family,
    validate_absorbing,
)
from .embedding import Embedding, validate_embedding
from .oracle import BruteResult, brute_force_embed
from .params import PipelineParams, min_ell
from .partite import clean_partite, extend_greedy
from .pipeline import embed_spanning
from .reservoir import Reservoir, sample_reservoir
from .trunk import egood_tuples, embed_pseudopath, embed_subtree, embed_trunk
from .walks import build_swap_walk, connect, swap1_seq, swap_full_seq, swap_length

__all__ = [
    "AbsorbingFamily",
    "AbsorbingTuple",
    "BruteResult",
    "Embedding",
    "PipelineParams",
    "Reservoir",
    "absorb_complete",
    "brute_force_embed",
    "build_swap_walk",
    "clean_partite",
    "connect",
    "cover_embedding",
    "egood_tuples",
    "embed_pseudopath",
    "embed_spanning",
    "embed_subtree",
    "embed_trunk",
    "extend_greedy",
    "find_absorbing_tuples",
    "is_x_covered",
    "min_ell",
    "sample_reservoir",
    "select_absorbing_family",
    "swap1_seq",
    "swap_full_seq",
    "swap_length",
    "validate_absorbing",
    "validate_embedding",
]
