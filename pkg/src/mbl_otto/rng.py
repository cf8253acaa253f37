"""Counter-based splittable random numbers.

Every draw is a pure function of four 64-bit keys
``(master_seed, domain, stream, draw)`` pushed through a chain of SplitMix64
finalizers.  There is no sequential state, so realizations, trials and
bootstrap resamples can be generated in any order, on any number of workers,
with bit-identical results.  The numba kernels reproduce the exact same bit
stream (see tests/test_kernels.py).
"""

import numpy as np

RNG_NAME = "splitmix64-chain-v1"

# Domain constants keep independent uses of the generator from colliding.
DOMAIN_FIELDS = 0x11
DOMAIN_TRIALS = 0x22
DOMAIN_BOOTSTRAP = 0x33

_GOLD = np.uint64(0x9E3779B97F4A7C15)
_M1 = np.uint64(0xBF58476D1CE4E5B9)
_M2 = np.uint64(0x94D049BB133111EB)
_R30 = np.uint64(30)
_R27 = np.uint64(27)
_R31 = np.uint64(31)
_R11 = np.uint64(11)
_MASK = (1 << 64) - 1

TWO_NEG53 = 2.0 ** -53
TWO_NEG52 = 2.0 ** -52


def mix64(z):
    """SplitMix64 finalizer; accepts uint64 scalars or arrays (wrapping mul)."""
    with np.errstate(over="ignore"):
        z = (z ^ (z >> _R30)) * _M1
        z = (z ^ (z >> _R27)) * _M2
        return z ^ (z >> _R31)


def stream_base(seed, domain, stream):
    """Mix the three high-order keys into one uint64 stream base."""
    with np.errstate(over="ignore"):
        h = mix64(np.uint64(int(seed) & _MASK) + _GOLD)
    h = mix64(h ^ np.uint64(int(domain) & _MASK))
    return mix64(h ^ np.uint64(int(stream) & _MASK))


def raw_u64(seed, domain, stream, n, offset=0):
    """n consecutive uint64 draws for one (seed, domain, stream) key."""
    draws = np.arange(offset, offset + n, dtype=np.uint64)
    return mix64(stream_base(seed, domain, stream) ^ draws)


def uniform01(seed, domain, stream, n, offset=0):
    """n floats uniform on [0, 1)."""
    return (raw_u64(seed, domain, stream, n, offset) >> _R11) * TWO_NEG53


def uniform_symmetric(seed, domain, stream, n, offset=0):
    """n floats uniform on [-1, 1)."""
    return (raw_u64(seed, domain, stream, n, offset) >> _R11) * TWO_NEG52 - 1.0
