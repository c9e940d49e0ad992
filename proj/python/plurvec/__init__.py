"""Vector-space models of English noun pluralization."""

from ._plurvec import (
    DataError,
    EmbeddingTable,
    LinearMap,
    UsageError,
    analogy_topn,
    apply_map,
    diagonal_profile,
    fit_linear_map,
    friedman,
    gen_synth,
    lda_cv,
    load_embeddings,
    top_k,
    wilcoxon,
)

__all__ = [
    "DataError",
    "EmbeddingTable",
    "LinearMap",
    "UsageError",
    "analogy_topn",
    "apply_map",
    "diagonal_profile",
    "fit_linear_map",
    "friedman",
    "gen_synth",
    "lda_cv",
    "load_embeddings",
    "top_k",
    "wilcoxon",
]
