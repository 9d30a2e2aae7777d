"""Exception hierarchy for the numerical library"""


class StieltjesError(Exception):
    """Base class for every library failure"""


class ParameterError(StieltjesError, ValueError):
    """Argument outside the documented range"""


class CoefficientError(StieltjesError, ValueError):
    """Coefficient sequence violates a sign, size or length requirement"""


class PoleError(StieltjesError):
    """Convergent denominator vanished at the evaluation point"""

    def __init__(self, z, n, magnitude):
        self.z = z
        self.n = n
        self.magnitude = magnitude
        super().__init__(f"pole at z={z!r}: |B_{n}| = {magnitude:.3e}")


class FactorizationError(StieltjesError):
    """Hankel factorization hit a non-positive or ambiguous pivot"""

    def __init__(self, level, pivots=(), note=""):
        self.level = level
        self.pivots = tuple(pivots)
        self.note = note
        message = f"moment sequence not strictly positive definite at level {level}"
        if note:
            message += f" ({note})"
        super().__init__(message)


class ConvergenceError(StieltjesError):
    """Iteration did not reach its tolerance"""

    def __init__(self, message, iterations=None, residual=None):
        self.iterations = iterations
        self.residual = residual
        super().__init__(message)


class CrossCheckError(StieltjesError):
    """Two independent evaluations disagree"""

    def __init__(self, name, discrepancy, tolerance=None):
        self.name = name
        self.discrepancy = discrepancy
        self.tolerance = tolerance
        detail = f"{name}: discrepancy {discrepancy:.3e}"
        if tolerance is not None:
            detail += f" exceeds {tolerance:.1e}"
        super().__init__(detail)


class NodeError(StieltjesError):
    """Kronrod extension produced unusable nodes"""

    def __init__(self, message, zeros=()):
        self.zeros = tuple(zeros)
        super().__init__(f"{message}: {list(self.zeros)}")


class InfeasibleError(StieltjesError):
    """Starting point violates the system constraints"""


class SingularSystemError(StieltjesError):
    """Linear system too ill-conditioned to solve"""

    def __init__(self, name, condition):
        self.name = name
        self.condition = condition
        super().__init__(f"{name}: singular system, condition estimate {condition:.3e}")
