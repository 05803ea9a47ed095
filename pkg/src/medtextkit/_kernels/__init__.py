"""Hot-kernel selection: compiled extension when built, pure Python otherwise.

Set MEDTEXTKIT_PURE_PYTHON=1 to force the fallback (used by the benchmark
and the kernel-equivalence tests).
"""
from __future__ import annotations

import os

if os.environ.get("MEDTEXTKIT_PURE_PYTHON"):
    from medtextkit._kernels._pure import BACKEND, lcs_length, rank_scores
else:
    try:
        from medtextkit._kernels._speedups import (  # type: ignore[no-redef]
            BACKEND,
            lcs_length,
            rank_scores,
        )
    except ImportError:
        from medtextkit._kernels._pure import (  # type: ignore[no-redef]
            BACKEND,
            lcs_length,
            rank_scores,
        )

__all__ = ["BACKEND", "lcs_length", "rank_scores"]
