"""Splittable random streams for reproducible, order-independent trials.

Every trial / round gets its own counter-based generator keyed by
(seed, index), so aggregate results do not depend on execution order or
on how work is distributed across workers.
"""
from __future__ import annotations

import numpy as np

#: Recorded in every report so results can be reproduced elsewhere.
GENERATOR_NAME = "numpy-philox4x64 key=(seed, stream_index)"

_U64 = (1 << 64) - 1

#: Stream index reserved for session-level scheduling decisions.
SCHEDULER_INDEX = _U64


def stream(seed: int, index: int) -> np.random.Generator:
    """Independent generator for the given seed and stream index."""
    return np.random.Generator(np.random.Philox(key=[seed & _U64, index & _U64]))
