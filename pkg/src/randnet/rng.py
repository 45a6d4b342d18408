"""Counter-based random streams.

Every random array in the package is drawn from a Philox stream addressed by
``(seed, tag, *key)``.  Streams are independent of call order and of the
number of worker threads, and row ``i`` of a ``(count, ...)`` draw does not
depend on ``count``.
"""
import numpy as np

NOISE = 0
INIT = 1
POSITION = 2
DISORDER = 3
DERIVED = 4

MASK64 = (1 << 64) - 1


def stream(seed, *key):
    """Return a Philox generator for the stream ``(seed, *key)``."""
    ss = np.random.SeedSequence(entropy=int(seed) & MASK64,
                                spawn_key=tuple(int(k) for k in key))
    return np.random.Generator(np.random.Philox(ss))


def derive_seed(master, *key):
    """Expand a master seed into a 64-bit child seed."""
    ss = np.random.SeedSequence(entropy=int(master) & MASK64,
                                spawn_key=(DERIVED,) + tuple(int(k) for k in key))
    return int(ss.generate_state(1, dtype=np.uint64)[0])
