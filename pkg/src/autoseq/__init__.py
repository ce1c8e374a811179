"""Evidence and certificates for (non-)automaticity of morphic and arithmetic sequences."""

__version__ = "0.1.0"

from .core import (  # noqa: E402
    Alphabet,
    IntMatrix,
    Morphism,
    PrefixView,
    expand,
    height,
    is_primitive,
    load_morphism,
    parse_morphism,
    return_words,
    transition_matrix,
)
from .errors import AutoseqError, InputError, InternalLimit  # noqa: E402
from .strategy import AnalysisConfig, Verdict, analyze, analyze_sequence  # noqa: E402

__all__ = [
    "__version__",
    "Alphabet",
    "IntMatrix",
    "Morphism",
    "PrefixView",
    "expand",
    "height",
    "is_primitive",
    "load_morphism",
    "parse_morphism",
    "return_words",
    "transition_matrix",
    "AutoseqError",
    "InputError",
    "InternalLimit",
    "AnalysisConfig",
    "Verdict",
    "analyze",
    "analyze_sequence",
]
