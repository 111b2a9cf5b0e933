"""Kernel backend selection.

The compiled extension is used when it imports; otherwise the NumPy
fallback. Set ``OBJPER_BACKEND=python`` to force the fallback.
"""

import logging
import os

from . import _fallback

log = logging.getLogger(__name__)


def _load():
    if os.environ.get("OBJPER_BACKEND", "").lower() == "python":
        return _fallback, "python"
    try:
        from . import _kernels
    except ImportError as exc:  # extension not built
        log.debug("compiled kernels unavailable (%s); using NumPy fallback", exc)
        return _fallback, "python"
    return _kernels, "compiled"


kernels, BACKEND = _load()

OK, NOT_CONVERGED, DEGENERATE = _fallback.OK, _fallback.NOT_CONVERGED, _fallback.DEGENERATE
