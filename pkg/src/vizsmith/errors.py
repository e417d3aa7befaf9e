"""Exception classes shared across the pipeline.

Grouped by the stage that raises them; all inherit VizsmithError so the CLI
and service can map error classes to exit codes and HTTP statuses in one
place.
"""

from __future__ import annotations


class VizsmithError(Exception):
    """Base class for every error raised by this package."""


# --- provider port ---------------------------------------------------------


class ProviderUnavailable(VizsmithError):
    """The configured model provider cannot serve the request."""


class CassetteMiss(VizsmithError):
    """Replay lookup failed: no recorded response for this fingerprint."""

    def __init__(self, fingerprint: str, request_summary: str = ""):
        self.fingerprint = fingerprint
        self.request_summary = request_summary
        detail = f" ({request_summary})" if request_summary else ""
        super().__init__(f"no cassette entry for fingerprint {fingerprint}{detail}")


class TokenBudgetExceeded(VizsmithError):
    """The request does not fit the provider's context window."""


class UnparseableScore(VizsmithError):
    """A scoring reply contained no usable number."""


# --- dataset ingestion and summarization -----------------------------------


class ParseError(VizsmithError):
    """A cell or record could not be parsed into the table model."""

    def __init__(self, row: int, column: object, message: str):
        self.row = row
        self.column = column
        super().__init__(f"row {row}, column {column!r}: {message}")


class EmptyDataset(VizsmithError):
    """The source holds no data rows."""


class HeaderMissing(VizsmithError):
    """The csv header row is absent, blank, or has duplicate names."""


class EnrichmentParseFailure(VizsmithError):
    """The enrichment reply was not the expected JSON object (non-fatal)."""


class UnknownField(VizsmithError):
    """A refinement edit names a field the summary does not have."""


# --- goal exploration -------------------------------------------------------


class NoParsableJSON(VizsmithError):
    """No JSON payload could be extracted from the provider reply."""


class AllGoalsRejected(VizsmithError):
    """Every parsed goal failed validation or the hallucination filter."""


# --- code generation --------------------------------------------------------


class UnknownGrammar(VizsmithError):
    """No scaffold is registered for the requested grammar id."""


class EmptyStub(VizsmithError):
    """The model returned no code for the stub region."""


class NoViableCandidate(VizsmithError):
    """No candidate survived execution and filtering."""

    def __init__(self, message: str, candidates: list | None = None):
        self.candidates = list(candidates or [])
        super().__init__(message)


# --- post-generation operations ---------------------------------------------


class ExplanationParseFailure(VizsmithError):
    """The explanation reply lacked the expected sections."""

    def __init__(self, raw_text: str):
        self.raw_text = raw_text
        super().__init__("explanation reply had no recognizable sections")


class ScoreParseFailure(VizsmithError):
    """One evaluation dimension reply had no usable 1..10 score."""

    def __init__(self, dimension: str, raw_text: str = ""):
        self.dimension = dimension
        self.raw_text = raw_text
        super().__init__(f"no 1..10 score in reply for dimension {dimension!r}")


# --- infographics -----------------------------------------------------------


class UnknownStyle(VizsmithError):
    """A style id is not present in the style library."""


class StrengthOutOfRange(VizsmithError):
    """Stylization strength must stay within [0, 1]."""


# --- benchmark harness ------------------------------------------------------


class DivisionByZeroTotal(VizsmithError):
    """An error rate is undefined when no runs were attempted."""


class ConfigurationError(VizsmithError):
    """A benchmark or service configuration value is unusable."""
