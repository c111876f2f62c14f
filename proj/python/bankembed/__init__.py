"""Word embedding pipeline for consumer complaint narratives.

Thin wrapper over the C++ core: tokenization, distance-weighted
co-occurrence counting, PPMI, LSA / GloVe / autoencoder / CBOW training,
embedding file I/O and intrinsic evaluation.
"""

from bankembed._core import (
    ArgumentError,
    CoocEntry,
    CooccurrenceMatrix,
    DegenerateInputError,
    EmbeddingMatrix,
    FormatError,
    IoError,
    NumericError,
    PipelineError,
    SchemaError,
    TrainConfig,
    Vocabulary,
    WordLookupError,
    apply_ppmi,
    build_cooccurrence,
    build_vocabulary,
    cosine_similarity,
    kmeans,
    lsa,
    nearest_neighbors,
    read_embeddings,
    run_pipeline,
    spearman,
    tokenize,
    train_autoencoder,
    train_cbow,
    train_glove,
    write_embeddings,
)

__all__ = [
    "ArgumentError",
    "CoocEntry",
    "CooccurrenceMatrix",
    "DegenerateInputError",
    "EmbeddingMatrix",
    "FormatError",
    "IoError",
    "NumericError",
    "PipelineError",
    "SchemaError",
    "TrainConfig",
    "Vocabulary",
    "WordLookupError",
    "apply_ppmi",
    "build_cooccurrence",
    "build_vocabulary",
    "cosine_similarity",
    "kmeans",
    "lsa",
    "nearest_neighbors",
    "read_embeddings",
    "run_pipeline",
    "spearman",
    "tokenize",
    "train_autoencoder",
    "train_cbow",
    "train_glove",
    "write_embeddings",
]

__version__ = "0.1.0"
