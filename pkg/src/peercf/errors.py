"""Exception types shared across the package."""


class InputError(ValueError):
    """Malformed user input: files, identifiers, out-of-vocabulary variables."""


class ResourceCapError(RuntimeError):
    """A saturation or query exceeded its clause-count or time budget.

    Signals that the instance is too hard for the configured limits, not
    that the computation went wrong.
    """


class ProtocolError(RuntimeError):
    """A peer received a message that violates the wire protocol."""
