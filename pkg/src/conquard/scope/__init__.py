from .lexer import Token, TokenKind, TokenStream, tokenize
from .profiles import BUILTIN_PROFILES, C_LIKE, SCRIPT, LanguageProfile, load_profiles, parse_profiles
from .tree import MISSING, NodeKind, ResourceNode, RootNotFound, attach_value, read_value, scan, tokenize_tree

__all__ = [
    "Token", "TokenKind", "TokenStream", "tokenize", "BUILTIN_PROFILES", "C_LIKE", "SCRIPT",
    "LanguageProfile", "load_profiles", "parse_profiles", "MISSING", "NodeKind", "ResourceNode",
    "RootNotFound", "attach_value", "read_value", "scan", "tokenize_tree",
]
