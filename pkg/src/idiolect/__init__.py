"""Idiolect: a reconfigurable voice-command intent engine."""

__version__ = "0.1.0"

from .actions import ActionCatalog, camel_case_to_description, load_default_catalog
from .dispatch import EngineSettings, Session, UtteranceInput
from .grammar import GrammarDoc, language_membership, parse_grammar, tokenize
from .repair import repair, token_edit_distance

__all__ = [
    "ActionCatalog",
    "EngineSettings",
    "GrammarDoc",
    "Session",
    "UtteranceInput",
    "camel_case_to_description",
    "language_membership",
    "load_default_catalog",
    "parse_grammar",
    "repair",
    "token_edit_distance",
    "tokenize",
    "__version__",
]
