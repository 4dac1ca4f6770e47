"""Hot inner loops, compiled when available.

The Cython extension ``_core`` is used if it was built; otherwise the
pure-Python ``_fallback`` module is used. Setting ``EPA_COMPLEXITY_PURE=1``
forces the fallback. ``BACKEND`` names the active implementation.
"""

import os

from . import _fallback

_NAMES = ("build_epa", "levenshtein", "pairwise_levenshtein_sum", "pairwise_jaccard_sum", "lz76")

core = None
if os.environ.get("EPA_COMPLEXITY_PURE") != "1":
    try:
        from . import _core as core
    except ImportError:
        core = None

_impl = core if core is not None else _fallback
BACKEND = "compiled" if core is not None else "python"

build_epa = _impl.build_epa
levenshtein = _impl.levenshtein
pairwise_levenshtein_sum = _impl.pairwise_levenshtein_sum
pairwise_jaccard_sum = _impl.pairwise_jaccard_sum
lz76 = _impl.lz76


def backends():
    """Map backend name to module for every implementation importable here."""
    found = {"python": _fallback}
    if core is not None:
        found["compiled"] = core
    else:
        try:
            from . import _core
        except ImportError:
            pass
        else:
            found["compiled"] = _core
    return found


__all__ = list(_NAMES) + ["BACKEND", "backends"]
