"""Exception hierarchy shared across the toolkit.

The CLI maps these onto exit codes: bad input -> 2, empty prediction -> 3,
anything else -> 1.
"""


class EmorecError(Exception):
    """Base class for all toolkit errors."""


class InputError(EmorecError):
    """Malformed or inconsistent user input (files, flags, request payloads)."""


class FormatVersionError(InputError):
    """Serialized artifact carries an unsupported format version."""

    def __init__(self, found: int, supported: int):
        super().__init__(
            f"unsupported format_version {found}; this build supports {supported}"
        )
        self.found = found
        self.supported = supported


class NoModelledTokensError(EmorecError):
    """A query contained no tokens covered by the model's domain.

    Raised instead of silently falling back to the prior; callers that want
    the prior fall back explicitly.
    """
