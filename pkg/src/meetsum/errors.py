"""Exception types.  ``exit_code`` is what the CLI returns for each family."""


class MeetsumError(Exception):
    exit_code = 1


class UsageError(MeetsumError):
    exit_code = 1


class DataError(MeetsumError):
    """Malformed input data or a violated corpus invariant."""

    exit_code = 2


class ParseError(DataError):
    pass


class ValidationError(DataError):
    pass


class FormatError(DataError):
    pass


class ProtocolError(MeetsumError):
    """An external summarizer worker broke the record protocol."""

    exit_code = 3
