"""secrel: bootstrapped relation extraction for security text."""

__version__ = "0.1.0"

from .bootstrap import BootstrapConfig, BootstrapState, bootstrap_relation, run_pipeline
from .corpus import Document, Sentence, Token, load_corpus, tokenize
from .entity import EntityMention, Gazetteer, load_gazetteer, tag_document
from .patterns import Pattern, RelationInstance, RELATION_TYPES
from .relevance import RelevanceModel, predict, train

__all__ = [
    "BootstrapConfig",
    "BootstrapState",
    "Document",
    "EntityMention",
    "Gazetteer",
    "Pattern",
    "RELATION_TYPES",
    "RelationInstance",
    "RelevanceModel",
    "Sentence",
    "Token",
    "bootstrap_relation",
    "load_corpus",
    "load_gazetteer",
    "predict",
    "run_pipeline",
    "tag_document",
    "tokenize",
    "train",
]
