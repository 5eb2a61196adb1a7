"""Directed Jónsson terms from Jónsson terms, with proof certificates and a model mode."""

__version__ = "0.1.0"

from .terms import Term, X, Y, Z, app, parse_term, substitute, restrict, to_sexpr  # noqa: E402
from .catalog import catalog_path, identity_set, PatternPath  # noqa: E402

__all__ = [
    "Term", "X", "Y", "Z", "app", "parse_term", "substitute", "restrict", "to_sexpr",
    "catalog_path", "identity_set", "PatternPath", "__version__",
]
