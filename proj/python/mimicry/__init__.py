"""Python bindings for the mimicry C++ core."""

from ._mimicry import (
    Embedder,
    Forest,
    MimicryError,
    abstract,
    cross_validate,
    evaluate,
    format_percent,
    label,
    mutate,
    ochiai,
    run_stage,
    tokenize,
    train_embedder,
    train_forest,
)

__all__ = [
    "Embedder",
    "Forest",
    "MimicryError",
    "abstract",
    "cross_validate",
    "evaluate",
    "format_percent",
    "label",
    "mutate",
    "ochiai",
    "run_stage",
    "tokenize",
    "train_embedder",
    "train_forest",
]
