"""Exception hierarchy. Every error is a ``ValueError`` subclass."""


class CaqwbhError(ValueError):
    pass


class DomainError(CaqwbhError):
    pass


class SizeMismatch(CaqwbhError):
    pass


class InvalidTheta(CaqwbhError):
    pass


class InvalidAlpha(CaqwbhError):
    pass


class InvalidSize(CaqwbhError):
    pass


class InvalidKey(CaqwbhError):
    pass


class DegenerateInit(CaqwbhError):
    pass


class EmptyMessage(CaqwbhError):
    pass
