"""Transfer and routing of Gaussian states over harmonic-oscillator networks."""

from ._gaussnet import *  # noqa: F401,F403
from ._gaussnet import __version__  # noqa: F401
