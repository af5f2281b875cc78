"""Exception hierarchy shared across the litgraph pipeline."""


class LitGraphError(Exception):
    """Base class for all litgraph errors."""


# --- metadata snapshot ingestion ---

class SnapshotParseError(LitGraphError):
    """A snapshot line could not be parsed as JSON."""

    def __init__(self, message: str, line_number: int | None = None):
        self.line_number = line_number
        if line_number is not None:
            message = f"line {line_number}: {message}"
        super().__init__(message)


class MissingFieldError(SnapshotParseError):
    """A mandatory metadata field is absent or empty."""

    def __init__(self, field: str, line_number: int | None = None):
        self.field = field
        super().__init__(f"missing mandatory field {field!r}", line_number)


# --- concept generation and embeddings ---

class ConceptParseError(LitGraphError):
    """An LLM completion did not contain three parseable list items."""

    def __init__(self, message: str, completion: str = ""):
        self.completion = completion
        super().__init__(message)


class GenerationError(LitGraphError):
    """Concept generation failed after exhausting retries."""


class EndpointError(LitGraphError):
    """An HTTP inference or embedding endpoint reported a failure."""


class EmbeddingError(LitGraphError):
    """An embedding could not be produced or loaded."""


class DimensionMismatchError(EmbeddingError):
    """A vector's dimension disagrees with the store's declared dimension."""


class MissingEmbeddingError(EmbeddingError):
    """A required vector (level or title+abstract) is absent for a paper."""


# --- retrieval ---

class ZeroVectorError(LitGraphError):
    """Cosine similarity is undefined for an all-zero vector."""


class EmptyStoreError(LitGraphError):
    """Operation requires a non-empty embedding store."""


# --- LaTeX processing ---

class LatexError(LitGraphError):
    """Base class for source-tree processing errors."""


class NoMainFileError(LatexError):
    """No file both declares a document class and is unimported."""


class AmbiguousMainFileError(LatexError):
    """Several files qualify as the main document."""

    def __init__(self, candidates: list[str]):
        self.candidates = sorted(candidates)
        super().__init__("multiple main-file candidates: " + ", ".join(self.candidates))


class ImportCycleError(LatexError):
    """The file import graph contains a cycle."""


class FlattenDepthError(LatexError):
    """Recursive input expansion exceeded the depth bound."""


# --- graph construction and splitting ---

class DegenerateSplitError(LitGraphError):
    """A hold-out fraction left one side of the split empty."""


# --- pipeline orchestration ---

class StageInputError(LitGraphError):
    """A stage input artifact is missing; names the command that produces it."""

    def __init__(self, path: str, producer: str):
        self.path = path
        self.producer = producer
        super().__init__(
            f"required input {path!r} not found; produce it with `litgraph {producer}`"
        )


class ConfigError(LitGraphError):
    """Pipeline configuration failed validation."""
