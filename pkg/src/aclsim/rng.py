"""Random stream derivation.

Every random draw in the package comes from a ``numpy.random.Generator``
backed by PCG64. Streams are derived from a master seed plus a key of small
integers (module id, condition index, replicate index) through
``SeedSequence.spawn_key``, so a stream never depends on scheduling order.
"""

from __future__ import annotations

import numpy as np

RNG_ALGORITHM = "numpy.PCG64/SeedSequence"

# Module ids used as the first element of every stream key.
NETGEN = 1
DIFFUSION = 2
CLI = 3


def stream(master_seed: int, *key: int) -> np.random.Generator:
    seq = np.random.SeedSequence(int(master_seed) & (2**64 - 1), spawn_key=tuple(int(k) for k in key))
    return np.random.Generator(np.random.PCG64(seq))
