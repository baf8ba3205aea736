"""Exception hierarchy shared by all modules."""


class QVFError(Exception):
    """Base class for every error raised by this package."""


class NumericalError(QVFError, ArithmeticError):
    """A computation could not be carried out to the requested accuracy."""


class PoleProximity(QVFError, ValueError):
    """Frequency lies inside the exclusion radius of a dielectric pole."""


class InvalidWavevector(QVFError, ValueError):
    pass


class GappedFrequency(QVFError, ValueError):
    """Frequency lies in a gap, where no propagating mode exists."""


class NotOnBranch(QVFError, ValueError):
    pass


class DegeneratePoint(QVFError, ValueError):
    pass


class BandEdge(NumericalError):
    """Permittivity too close to zero for the quantity to be finite."""


class DivergentIntegral(NumericalError):
    pass


class EmptyTrace(QVFError, ValueError):
    pass


class AllGapped(QVFError, ValueError):
    pass


class NonConvergence(NumericalError):
    pass


class SingularJacobian(NumericalError):
    pass
