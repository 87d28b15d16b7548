"""Deterministic polarity audit toolkit for contrastive chest-X-ray VQA.

Thin Python surface over the C++ core: protocol construction, the
four-condition post-hoc verifier, polarity metrics, resampling statistics,
and the additive score-model simulator.
"""

from negaudit._core import *  # noqa: F401,F403
from negaudit._core import __version__  # noqa: F401
