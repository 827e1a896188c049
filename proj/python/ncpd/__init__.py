"""Adaptive radar detection against noise-cover-pulse jamming.

Thin python surface over the C++ core: scenario synthesis, the rank-one and
deterministic NCP detectors with their baselines, and the Monte Carlo
threshold/Pd harness.
"""

from ncpd._core import *  # noqa: F401,F403
from ncpd._core import __version__  # noqa: F401
