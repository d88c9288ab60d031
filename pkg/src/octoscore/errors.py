"""Domain exceptions shared across the package."""


class OctoscoreError(Exception):
    """Base class for every error octoscore raises on purpose."""


class EmptyDocument(OctoscoreError):
    """The page capture contained no element tags and cannot be scored."""


class NetworkError(OctoscoreError):
    """DNS, connect, timeout, or redirect-loop failure while fetching."""


class HttpError(OctoscoreError):
    """Non-2xx HTTP response."""

    def __init__(self, status: int, url: str):
        super().__init__(f"HTTP {status} for {url}")
        self.status = status
        self.url = url


class TooLarge(OctoscoreError):
    """Response body exceeded the configured size cap."""


class OfflineError(OctoscoreError):
    """A URL was requested while offline mode is active."""


class DuplicateSite(OctoscoreError):
    """The same site identifier appeared more than once."""


class SiteSetMismatch(OctoscoreError):
    """Two rankings or a run and its ground truth cover different sites."""


class EmptyRun(OctoscoreError):
    """An operation that needs at least one scored site received none."""


class ZeroTotal(OctoscoreError):
    """Every site in the run scored zero; shares are undefined."""


class MissingCategory(OctoscoreError):
    """A scored site has no category in the ground-truth table."""


class ZeroContribution(OctoscoreError):
    """Scale suggestion needs strictly positive contributions."""


class ValidationError(OctoscoreError):
    """A stored experiment or run file violates the schema."""


class UnknownExperiment(OctoscoreError):
    """No experiment with the requested id exists in the data directory."""


class UnknownRun(OctoscoreError):
    """No run with the requested id exists in the data directory."""
