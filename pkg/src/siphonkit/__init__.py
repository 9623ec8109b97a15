"""Exact siphon, catalysis and persistence analysis for chemical reaction networks."""

__version__ = "0.1.0"

from .network import ParseError, ReactionNetwork, parse_network  # noqa: E402
from .persistence import certify, simulate  # noqa: E402
from .siphons import classify_set, minimal_siphons  # noqa: E402

__all__ = [
    "ParseError",
    "ReactionNetwork",
    "parse_network",
    "certify",
    "simulate",
    "classify_set",
    "minimal_siphons",
    "__version__",
]
