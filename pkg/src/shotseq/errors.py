"""Exception hierarchy.

Two broad failure classes matter to callers (and to the CLI exit codes):
``DataError`` for malformed or inconsistent inputs, ``InfeasibleError`` for
well-formed instances that cannot be optimized as requested.
"""


class ShotseqError(Exception):
    """Base class for all shotseq errors."""


class DataError(ShotseqError):
    """Malformed or inconsistent input data."""


class InfeasibleError(ShotseqError):
    """Well-formed input that cannot be optimized as requested."""


class MalformedJsonError(DataError):
    """Input is not valid JSON or does not follow the documented schema."""


class DuplicateShotIdError(DataError):
    """Two shots in one catalog share an id."""


class UnknownLabelError(DataError):
    """A label string is not in the shot-size or motion alphabet."""


class EmbeddingDimMismatchError(DataError):
    """Embeddings in one catalog do not share a common dimension."""


class NegativeDurationError(DataError):
    """A shot duration is negative."""


class EmptySequenceError(DataError):
    """A reference or label sequence contains no entries."""


class UnknownShotIdError(DataError):
    """A sequence references a shot id absent from the catalog."""


class NoTransitionsError(DataError):
    """A label sequence yields no countable transitions for the alphabet."""


class AlphabetMismatchError(DataError):
    """Two transition matrices are defined over different alphabets."""


class ZeroVectorError(DataError):
    """A mean embedding has (near-)zero norm and cannot be normalized."""


class ShapeMismatchError(DataError):
    """An array argument has the wrong shape for the catalog/instance."""


class NonFiniteInputError(DataError):
    """An array argument contains NaN or infinite entries."""


class KExceedsNError(InfeasibleError):
    """Asked to select more shots than the catalog contains."""


class MissingEmbeddingsError(InfeasibleError):
    """Semantic weight is positive but embeddings are missing."""


class InstanceTooLargeError(InfeasibleError):
    """Exhaustive enumeration would exceed the brute-force guard."""
