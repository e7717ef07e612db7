"""Exception types raised across the package."""


class ParameterError(ValueError):
    """An argument is outside its admissible range."""


class DomainError(ValueError):
    """A user-supplied function returned a value outside its allowed range."""


class LawError(RuntimeError):
    """A weight law produced an invalid sample or moment."""


class IntegrationError(RuntimeError):
    """The state of an integration became non-finite or blew up."""

    def __init__(self, message, time=None):
        super().__init__(message)
        self.time = time
