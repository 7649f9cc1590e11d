"""Exception hierarchy shared across the package."""


class PPFLError(Exception):
    """Base class for every error raised by ppfl."""


class ConfigError(PPFLError, ValueError):
    """Invalid configuration or mismatched dimensions.

    ``problems`` holds every violation found, so callers can report them all
    at once instead of failing on the first.
    """

    def __init__(self, message, problems=None):
        super().__init__(message)
        self.problems = list(problems) if problems else [message]


class InputError(PPFLError, ValueError):
    """Malformed call arguments (empty batches, ragged vectors, bad labels)."""


class ParseError(InputError):
    """A dataset file could not be parsed."""

    def __init__(self, message, row=None):
        if row is not None:
            message = f"row {row}: {message}"
        super().__init__(message)
        self.row = row


class NoInverseError(PPFLError, ArithmeticError):
    """Raised by ``mod_inverse`` when gcd(a, m) != 1."""


class EncodeOverflowError(PPFLError, OverflowError):
    """A value does not fit the fixed-point range of the target modulus."""


class ProtocolError(PPFLError):
    """A privacy protocol was driven outside its contract (e.g. missing party)."""


class MechanismError(PPFLError):
    """A privacy mechanism failed during a round.

    Wraps the underlying error and records which client and which stage
    (``protect``, ``aggregate``, ``recover``) broke.
    """

    def __init__(self, stage, cause, client_id=None):
        who = f"client {client_id}" if client_id is not None else "server"
        super().__init__(f"{stage} failed at {who}: {cause}")
        self.stage = stage
        self.client_id = client_id
        self.cause = cause
