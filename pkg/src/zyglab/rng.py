"""SplitMix64 generator and the seeded samplers built on it.

Every seeded draw in the package goes through :class:`SplitMix64` so that
seeds printed in reports reproduce on any platform.
"""

import math

_MASK = (1 << 64) - 1


class SplitMix64:
    """Steele-Lea-Flood SplitMix64 with a 64-bit state."""

    def __init__(self, seed):
        self.state = int(seed) & _MASK

    def next_u64(self):
        self.state = (self.state + 0x9E3779B97F4A7C15) & _MASK
        z = self.state
        z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & _MASK
        z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & _MASK
        return z ^ (z >> 31)

    def uniform(self, low=0.0, high=1.0):
        # top 53 bits -> [0, 1)
        u = (self.next_u64() >> 11) * (1.0 / (1 << 53))
        return low + (high - low) * u

    def unit_square(self):
        """Complex number uniform on [-1, 1] x [-1, 1]."""
        return complex(self.uniform(-1.0, 1.0), self.uniform(-1.0, 1.0))

    def unimodular(self):
        return complex(math.cos(t := self.uniform(0.0, 2 * math.pi)), math.sin(t))

    def disc_point(self, radius=1.0):
        """Area-uniform point in the disc of the given radius."""
        r = radius * math.sqrt(self.uniform())
        t = self.uniform(0.0, 2 * math.pi)
        return complex(r * math.cos(t), r * math.sin(t))

    def disc_points(self, n, radius=1.0):
        return [self.disc_point(radius) for _ in range(n)]

    def spawn(self):
        """Independent child stream seeded from this one."""
        return SplitMix64(self.next_u64())
