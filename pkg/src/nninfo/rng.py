"""Counter-based random streams.

Uniforms come from Philox4x64-10 keyed by ``(seed, stream)``. Standard normals
are the inverse normal CDF (``scipy.special.ndtri``) of the 53-bit uniform
``((raw >> 11) + 0.5) * 2**-53``, which lies strictly inside (0, 1).

Monte-Carlo draws are organised in fixed blocks of ``BLOCK_ROWS`` samples.
Block ``b`` starts from Philox counter ``(0, b, 0, 0)``, so sample ``i`` is a
function of ``(seed, stream, i)`` only: results do not depend on how work is
chunked or distributed, and the first M samples of a run with M' > M samples
are the same numbers.
"""

import numpy as np
from scipy.special import ndtri

from .errors import InvalidArgument

BLOCK_ROWS = 1024

# independent sub-streams for each purpose
STREAM_ESTIMATOR = 1
STREAM_ORACLE = 2
STREAM_SUBSAMPLE = 3
STREAM_LABELS = 4
STREAM_SYNTHETIC = 5

_U53 = 2.0 ** -53


def check_seed(seed):
    seed = int(seed)
    if not 0 <= seed < 2**64:
        raise InvalidArgument(f"seed must be a 64-bit unsigned integer, got {seed}")
    return seed


def philox(seed, stream, block=0):
    return np.random.Philox(key=[check_seed(seed), int(stream)], counter=[0, int(block), 0, 0])


def generator(seed, stream):
    """A numpy Generator on its own Philox sub-stream, for non-MC plumbing."""
    return np.random.Generator(philox(seed, stream))


def uniform_block(seed, stream, block, rows, cols):
    raw = philox(seed, stream, block).random_raw(rows * cols)
    u = ((raw >> np.uint64(11)).astype(np.float64) + 0.5) * _U53
    return u.reshape(rows, cols)


def normal_block(seed, stream, block, rows, cols):
    """``rows x cols`` standard normals for block ``block`` (rows <= BLOCK_ROWS)."""
    if rows > BLOCK_ROWS:
        raise InvalidArgument(f"at most {BLOCK_ROWS} rows per block")
    return ndtri(uniform_block(seed, stream, block, rows, cols))


def normal_blocks(seed, stream, count, cols):
    """Yield ``(start, block)`` pairs covering ``count`` rows of ``cols`` normals."""
    for b, start in enumerate(range(0, count, BLOCK_ROWS)):
        rows = min(BLOCK_ROWS, count - start)
        yield start, normal_block(seed, stream, b, rows, cols)
