"""Legendre-Gauss-Lobatto functions, Legendre coefficient decay and the
error bounds built on them."""
from .bounds import *  # noqa: F401,F403
from .coefficients import *  # noqa: F401,F403
from .errors import ConvergenceError, DomainError, ParameterError, ValidityError
from .interp import *  # noqa: F401,F403
from .lobatto import *  # noqa: F401,F403
from .polycore import *  # noqa: F401,F403
from . import bounds, coefficients, interp, lobatto, polycore

__version__ = "0.1.0"
