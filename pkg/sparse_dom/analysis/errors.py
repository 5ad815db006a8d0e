# Exceptions raised by the analysis package
#
# Created On: Oct 19, 2026
#

__all__ = [
    "SparseDomError",
    "AlignmentError",
    "DomainError",
    "ParameterError",
    "DataError",
    "ContractError",
    "DivergenceError",
    "HypothesisError",
    "StructuralError",
    "ResolutionError",
    "ConfigError",
]


class SparseDomError(Exception):
    """Root of every error raised by `sparse_dom`."""

    def __init__(self, message:str):
        self.message = message
        super().__init__(f"{self.__class__.__name__}: {message}")


class AlignmentError(SparseDomError, ValueError):
    """A cube does not sit on the grid (anchor or side not a multiple of h)."""


class DomainError(SparseDomError, ValueError):
    """A cube leaves the box of a grid or the truncation box of a lattice."""


class ParameterError(SparseDomError, ValueError):
    """An argument is outside its admissible range."""


class DataError(SparseDomError, ValueError):
    """Input data is unusable: non-finite samples, non-positive weights, bad files."""


class ContractError(SparseDomError):
    """An input object breaks the contract of the operation (e.g. not a Young function)."""


class DivergenceError(SparseDomError):
    """
    An improper integral does not converge.

    Attributes
    ----------
    partial : float
        The accumulated value when divergence was detected.
    """

    def __init__(self, message:str, partial:float=float("nan")):
        self.partial = partial
        super().__init__(message)


class HypothesisError(SparseDomError):
    """The hypotheses of an inequality failed their grid check, so it was not evaluated."""


class StructuralError(SparseDomError):
    """
    A certificate produced by a constructive algorithm failed.

    Attributes
    ----------
    offender : object
        The cube, family or node that broke the certificate.
    """

    def __init__(self, message:str, offender=None):
        self.offender = offender
        super().__init__(message)


class ResolutionError(SparseDomError):
    """The grid is too coarse or has the wrong shape for the requested construction."""


class ConfigError(SparseDomError):
    """
    A scenario file could not be parsed.

    Attributes
    ----------
    path : str or None
    lineno : int or None
    """

    def __init__(self, message:str, path=None, lineno=None):
        self.path = None if path is None else str(path)
        self.lineno = lineno
        where = ""
        if self.path is not None:
            where = f"{self.path}"
            if lineno is not None:
                where += f":{lineno}"
            where += ": "
        super().__init__(where + message)
