"""Exception hierarchy shared by the library and the command-line tool."""


class SceneryError(Exception):
    """Base class for all errors raised by :mod:`rwscenery`."""


class ContractError(SceneryError, ValueError):
    """An argument violates a documented precondition."""


class InvalidDepthError(ContractError):
    pass


class DepthExceededError(SceneryError, ValueError):
    """A word is longer than an explicit table can answer for."""

    def __init__(self, word, max_depth):
        self.word = word
        self.max_depth = max_depth
        super().__init__(
            f"word {word!r} of length {len(word)} exceeds table depth {max_depth}"
        )


class NotSampleableError(SceneryError, TypeError):
    pass


class InsufficientDataError(SceneryError, ValueError):
    pass


class SingularSystemError(SceneryError, ArithmeticError):
    """A diagonal block of the reconstruction system cannot be inverted.

    ``N`` is the walk-word length of the failing block, i.e. the block acting
    on colour words of length ``N + 1``.
    """

    def __init__(self, N, detail=""):
        self.N = N
        msg = f"singular reconstruction system at N={N}"
        if detail:
            msg += f": {detail}"
        super().__init__(msg)


class InconclusiveDepthError(SceneryError):
    def __init__(self, n_max, detail=""):
        self.n_max = n_max
        msg = f"no record divergence found up to depth {n_max}"
        if detail:
            msg += f" ({detail})"
        super().__init__(msg)


class UnsupportedRegimeError(SceneryError, ValueError):
    pass
