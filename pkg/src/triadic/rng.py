"""Counter-based random streams for reproducible Monte Carlo.

Every variate is addressed by ``(seed, stream, coordinate, replicate)``:
the Philox key comes from ``(seed, stream)``, the coordinate occupies the
second counter word and the replicate index is the position inside that
stream. A block of replicates can therefore be regenerated in any chunking
or order and always yields the same bits.
"""
import numpy as np
from numpy.random import Philox, SeedSequence

_PER_BLOCK = 4  # Philox4x64 emits four words per counter increment
_TO_UNIT = 2.0 ** -53


def philox_key(seed: int, stream: int = 0) -> np.ndarray:
    if seed is None or int(seed) < 0:
        raise ValueError(f"seed must be a non-negative integer, got {seed!r}")
    return SeedSequence(int(seed), spawn_key=(int(stream),)).generate_state(2, np.uint64)


def raw_block(key, coordinate: int, start: int, stop: int) -> np.ndarray:
    """64-bit words ``start..stop-1`` of the stream for ``coordinate``."""
    if stop <= start:
        return np.empty(0, dtype=np.uint64)
    block, skip = divmod(start, _PER_BLOCK)
    bg = Philox(key=key, counter=[block, coordinate, 0, 0])
    return bg.random_raw(skip + stop - start)[skip:]


def uniforms(seed, coordinate, start, stop, stream=0) -> np.ndarray:
    """Uniform(0, 1) variates, never exactly 0 or 1."""
    raw = raw_block(philox_key(seed, stream), coordinate, start, stop)
    return ((raw >> np.uint64(11)).astype(np.float64) + 0.5) * _TO_UNIT


def normals(seed, n_coordinates, start, stop, stream=0) -> np.ndarray:
    """Standard normal variates of shape ``(stop - start, n_coordinates)``.

    Drawn by inversion so each replicate consumes exactly one word per
    coordinate.
    """
    from scipy.special import ndtri

    key = philox_key(seed, stream)
    out = np.empty((max(stop - start, 0), n_coordinates))
    for j in range(n_coordinates):
        raw = raw_block(key, j, start, stop)
        u = ((raw >> np.uint64(11)).astype(np.float64) + 0.5) * _TO_UNIT
        out[:, j] = ndtri(u)
    return out
