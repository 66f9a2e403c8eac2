"""Learned clause selection for a small saturation prover."""

from ._clauselab import (
    Model,
    Problem,
    RunResult,
    clause_features,
    generate_corpus,
    hash_key,
    load_model,
    parse_problem,
    read_examples,
    run_bench,
    sdbm,
    solve,
    train,
)

__all__ = [
    "Model",
    "Problem",
    "RunResult",
    "clause_features",
    "generate_corpus",
    "hash_key",
    "load_model",
    "parse_problem",
    "read_examples",
    "run_bench",
    "sdbm",
    "solve",
    "train",
]
