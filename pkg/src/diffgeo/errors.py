"""Exception hierarchy shared by all modules."""


class DiffGeoError(Exception):
    """Base class for every error raised by the package."""


class InputError(DiffGeoError):
    """Malformed definition file or argument."""


class ToleranceFailure(DiffGeoError):
    """A verification check missed its bound."""


# numeric kernels
class DomainTooSmall(DiffGeoError):
    pass


class ToleranceNotMet(DiffGeoError):
    pass


class StepUnderflow(DiffGeoError):
    pass


class NotSymmetric(DiffGeoError):
    pass


# curves
class DomainViolation(DiffGeoError):
    pass


class NotRegular(DiffGeoError):
    pass


class VanishingCurvature(DiffGeoError):
    def __init__(self, message, kappa=0.0):
        super().__init__(message)
        self.kappa = kappa


class NotPlanar(DiffGeoError):
    pass


class NotClosed(DiffGeoError):
    pass


class DegenerateVertex(DiffGeoError):
    pass


class CuspError(DiffGeoError):
    pass


class NoInteriorPoint(DiffGeoError):
    pass


class NonpositiveCurvature(DiffGeoError):
    pass


class DegenerateConfiguration(DiffGeoError):
    pass


# surfaces
class IrregularPoint(DiffGeoError):
    pass


class NotTangent(DiffGeoError):
    pass


class AxisContact(DiffGeoError):
    pass


# geodesics
class LeftDomain(DiffGeoError):
    pass


class NoConvergence(DiffGeoError):
    def __init__(self, message, best=None, residual=float("inf")):
        super().__init__(message)
        self.best = best
        self.residual = residual


class OnAxis(DiffGeoError):
    pass


class Disconnected(DiffGeoError):
    pass


# comparison
class ShootFailure(DiffGeoError):
    pass


class TriangleInequalityViolation(DiffGeoError):
    pass


class ConfigurationMismatch(DiffGeoError):
    pass


class RayNotMinimizing(DiffGeoError):
    pass


class GridTooCoarse(UserWarning):
    pass
