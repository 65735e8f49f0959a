"""Exception hierarchy shared by every bisimod module."""


class BisimodError(Exception):
    pass


class ParseError(BisimodError):
    """Malformed formula text.

    ``offset`` is a byte offset into the UTF-8 encoding of the input and
    ``expected`` the set of token descriptions that would have been accepted.
    """

    def __init__(self, message, offset, expected=()):
        self.offset = offset
        self.expected = frozenset(expected)
        detail = ""
        if self.expected:
            detail = "; expected one of: " + ", ".join(sorted(self.expected))
        super().__init__(f"{message} at byte {offset}{detail}")


class FormatError(BisimodError):
    """A bi-model or proof document that is not syntactically well formed."""


class ValidationError(BisimodError):
    """A well-formed document whose content breaks a model invariant."""

    def __init__(self, message, path=""):
        self.path = path
        super().__init__(f"{path}: {message}" if path else message)


class UnknownFixture(BisimodError, KeyError):
    pass


class UnknownWorld(BisimodError, KeyError):
    pass


class BoundExceeded(BisimodError):
    pass


class SkeletonTooLarge(BisimodError):
    pass


class NotLSquare(BisimodError, ValueError):
    pass
