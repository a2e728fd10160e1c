class TunnelingError(Exception):
    """Base class for every error raised by the tunneling engine"""

    category = "error"


class DomainError(TunnelingError, ValueError):
    """Argument outside the domain of an operation"""

    category = "domain"


class DivergenceError(DomainError):
    """Gauss sum requested where the series diverges"""


class NoBarrierError(DomainError):
    """Barrier top lies below the bound-state level"""


class UnsupportedError(DomainError):
    """No closed form exists for the requested potential/method"""


class ApplicabilityError(TunnelingError):
    """Asymptotic formula used outside its regime of validity"""

    category = "applicability"


class ConvergenceError(TunnelingError, RuntimeError):
    """Series, quadrature or root search failed to converge"""

    category = "convergence"


class UsageError(TunnelingError):
    """Invalid command-line or request configuration"""

    category = "usage"
