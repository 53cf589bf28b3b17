"""Exception types shared across the pipeline."""

from __future__ import annotations


class SurfError(Exception):
    """Base class for all pipeline errors."""


class MalformedTrace(SurfError):
    """Raised when text cannot be parsed as a stack trace."""


class EmptyTokenSet(SurfError):
    """Raised when all candidate tokens were filtered out of a trace."""


class InvalidUrl(SurfError):
    """Raised for strings that are not syntactically valid absolute URLs."""


class ProviderError(SurfError):
    """A single search provider failed (HTTP error, bad payload, missing fixture)."""

    def __init__(self, provider_id: str, cause: str):
        super().__init__(f"{provider_id}: {cause}")
        self.provider_id = provider_id
        self.cause = cause


class AllProvidersFailed(SurfError):
    """No enabled provider returned any result."""


class FetchError(SurfError):
    """A result page could not be fetched."""

    def __init__(self, url: str, cause: str):
        super().__init__(f"{url}: {cause}")
        self.url = url
        self.cause = cause


class EmptyCorpus(SurfError):
    """Ranking was asked to score an empty corpus."""


class EmptyCandidate(SurfError):
    """Pyramid scoring was given an empty candidate token set."""
