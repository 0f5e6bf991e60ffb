"""Deterministic per-entry seed derivation.

A SplitMix64-style finalizer over (master_seed, stream index) so that
parallel build order never affects which random stream an entry sees.
"""

_MASK = (1 << 64) - 1

# fixed stream-index offsets so different harness roles never collide
OBSERVED_OFFSET = 1_000_000_000
AUX_OFFSET = 2_000_000_000
FILL_OFFSET = 3_000_000_000


def mix_seed(master_seed, index):
    """64-bit mix of a master seed and a stream index."""
    z = (int(master_seed) + (int(index) + 1) * 0x9E3779B97F4A7C15) & _MASK
    z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & _MASK
    z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & _MASK
    return (z ^ (z >> 31)) & _MASK
