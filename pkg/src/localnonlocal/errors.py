"""Exception hierarchy shared by all modules."""


class LocalNonlocalError(Exception):
    """Base class for every error raised by the package."""


class ZeroMass(LocalNonlocalError, ValueError):
    """A kernel profile integrates to (numerically) zero."""


class InvalidResolution(LocalNonlocalError, ValueError):
    pass


class InvalidPartition(LocalNonlocalError, ValueError):
    pass


class NumericalError(LocalNonlocalError):
    """Failure of a linear-algebra step (exit code 2 in the CLI)."""


class SingularSystem(NumericalError):
    pass


class HypothesisViolation(SingularSystem):
    """The interaction kernel cannot connect A and B.

    Subclasses ``SingularSystem`` because the elliptic block is then singular.
    """

    def __init__(self, report):
        self.report = report
        super().__init__("; ".join(report.reasons) or "kernel hypothesis violated")


class EigFailure(NumericalError):
    pass


class NoContraction(NumericalError):
    """Picard map is not provably contractive on the requested window."""

    def __init__(self, factor):
        self.factor = factor
        super().__init__(f"estimated contraction factor {factor:.4g} >= 1; shrink the window")


class DegenerateFit(NumericalError, ValueError):
    pass


class InvariantViolation(LocalNonlocalError):
    """A runtime self-check failed (exit code 3 in the CLI)."""


class ConfigError(LocalNonlocalError, ValueError):
    def __init__(self, path, message):
        self.path = path
        super().__init__(f"{path}: {message}")


class ParseError(LocalNonlocalError, ValueError):
    pass
