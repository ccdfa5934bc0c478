"""Exception types shared across the package."""


class TourbotError(Exception):
    """Base class for all package-specific errors."""


# -- map loading / queries ---------------------------------------------------

class MapParseError(TourbotError):
    """Map document is not syntactically valid."""


class MapValidationError(TourbotError):
    """Map document parsed but violates a model invariant."""


class OutOfBounds(TourbotError):
    """World point or cell lies outside the grid."""


class OccupiedCell(TourbotError):
    """Operation requires a free cell but the cell is occupied."""


# -- navigation --------------------------------------------------------------

class NoPath(TourbotError):
    """Start and goal lie in disconnected free components."""


class UnknownExhibit(TourbotError):
    """Exhibit id does not exist on the loaded map."""


# -- dialogue ----------------------------------------------------------------

class EmptyUtterance(TourbotError):
    """Utterance is empty after trimming."""


class BackendError(TourbotError):
    """Language-model backend unreachable or returned an unusable answer."""


class AmbiguousGoal(TourbotError):
    """Exhibit name matched more than one exhibit."""

    def __init__(self, name_fragment: str, candidates: list[int]):
        self.name_fragment = name_fragment
        self.candidates = list(candidates)
        pretty = ", ".join(str(c) for c in candidates)
        super().__init__(f"'{name_fragment}' matches several exhibits: {pretty}")


# -- gateway -----------------------------------------------------------------

class GatewayError(TourbotError):
    """Base class for gateway failures."""


class GatewayTimeout(GatewayError):
    """Backend did not answer within the request deadline."""


class RemoteError(GatewayError):
    """Remote endpoint returned a non-success status."""

    def __init__(self, status: int, body: str):
        self.status = status
        self.body = body
        super().__init__(f"remote endpoint returned status {status}")


class ParseFailure(GatewayError):
    """Structured extraction answer is missing required fields."""

    def __init__(self, missing: list[str]):
        self.missing = list(missing)
        super().__init__(f"missing fields: {', '.join(missing)}")


# -- session / logs ----------------------------------------------------------

class SessionClosed(TourbotError):
    """Command sent to a session that has been closed."""


class LogParseError(TourbotError):
    """A persisted log line could not be decoded."""

    def __init__(self, line_number: int, reason: str):
        self.line_number = line_number
        super().__init__(f"line {line_number}: {reason}")


# -- statistics --------------------------------------------------------------

class LengthMismatch(TourbotError):
    """Paired samples have different lengths."""


class DegenerateSample(TourbotError):
    """Paired differences have zero variance; t statistic undefined."""
