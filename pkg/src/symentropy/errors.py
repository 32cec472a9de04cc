"""Exception and warning types shared across the package."""


class SymEntropyError(Exception):
    """Base class for all package errors."""


class IncompatibleAlphabet(SymEntropyError, ValueError):
    pass


class WordTooShort(SymEntropyError, ValueError):
    pass


class InadmissibleWord(SymEntropyError, ValueError):
    pass


class DepthOverflow(SymEntropyError):
    """A window or enumeration exceeds the configured counting limit."""


class DepthCapTooSmall(SymEntropyError):
    pass


class Inconclusive(SymEntropyError):
    """Certified bounds could not be separated; ``bracket`` holds what was reached."""

    def __init__(self, message, bracket=None):
        super().__init__(message)
        self.bracket = bracket


class ScaleUnderflow(SymEntropyError, ValueError):
    pass


class TargetOutOfRange(SymEntropyError, ValueError):
    pass


class NotMixing(SymEntropyError, ValueError):
    pass


class ToleranceUnachievable(SymEntropyError):
    pass


class BaseEntropyTooSmall(SymEntropyError, ValueError):
    pass


class ConfigError(SymEntropyError):
    """Bad command-line configuration or input file (exit status 2)."""


class NotIrreducibleWarning(UserWarning):
    """Spectral entropy was taken as a max over irreducible components."""


class NonConvergentWarning(UserWarning):
    pass
