"""Langevin and overdamped Langevin simulation on the torus, with corrector,
generator and convergence diagnostics. Thin wrapper over the C++ core."""

from ._odlab import *  # noqa: F401,F403
from ._odlab import __version__  # noqa: F401
