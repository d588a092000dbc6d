from ._mixreason import (
    RELATIONS,
    CheckpointError,
    Error,
    InfeasibleK,
    KnowledgeBase,
    Model,
    bleu,
    constrained_assign,
    div_bleu,
    div_ngram,
    hard_assign,
    map_question,
    synth_qa,
)

__all__ = [
    "RELATIONS",
    "CheckpointError",
    "Error",
    "InfeasibleK",
    "KnowledgeBase",
    "Model",
    "bleu",
    "constrained_assign",
    "div_bleu",
    "div_ngram",
    "hard_assign",
    "map_question",
    "synth_qa",
]
