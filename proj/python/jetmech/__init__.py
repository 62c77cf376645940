"""Higher-order variational mechanics engine.

The compiled core exposes jets (coordinates with multiple time derivatives),
a small expression language with exact symbolic derivatives, quadratic and
expression Lagrangians, Euler-Lagrange residuals and derived equations of
motion, Ostrogradsky momenta and generalized Hamiltonians, adaptive
integration, action stationarity checks, and the modified gravitational
potential family with orbit diagnostics.
"""

from ._core import *  # noqa: F401,F403
from ._core import __version__  # noqa: F401
