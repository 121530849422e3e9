"""Deterministic splittable random streams built on SplitMix64.

Every sampler in this package draws from a SplitMix64 stream identified by a
64-bit seed and a stream (worker) index.  The same algorithm is implemented
twice, here in plain Python and in ``_kernels`` for numba, and the two are
bit-identical, so pure reference code and compiled kernels can be compared
draw for draw.
"""

MASK64 = (1 << 64) - 1

GOLDEN = 0x9E3779B97F4A7C15


def mix64(z: int) -> int:
    """SplitMix64 finalizer; a bijective 64-bit mixer."""
    z &= MASK64
    z ^= z >> 30
    z = (z * 0xBF58476D1CE4E5B9) & MASK64
    z ^= z >> 27
    z = (z * 0x94D049BB133111EB) & MASK64
    z ^= z >> 31
    return z


def stream_state(seed: int, stream: int = 0) -> int:
    """Initial generator state for worker `stream` under a 64-bit seed.

    The (seed, stream) pair is mixed before use so worker streams are
    decorrelated; merged tallies then depend only on which streams ran,
    not on scheduling.
    """
    if stream < 0:
        raise ValueError("stream index must be >= 0")
    return mix64((seed & MASK64) ^ mix64((1 + stream * GOLDEN) & MASK64))


class SplitMix64:
    """SplitMix64 generator: state advances by a fixed odd constant per draw."""

    __slots__ = ("state",)

    def __init__(self, state: int):
        self.state = state & MASK64

    @classmethod
    def from_seed(cls, seed: int, stream: int = 0) -> "SplitMix64":
        return cls(stream_state(seed, stream))

    def next_u64(self) -> int:
        self.state = (self.state + GOLDEN) & MASK64
        return mix64(self.state)

    def next_below(self, n: int) -> int:
        """Uniform integer in [0, n), unbiased via rejection sampling."""
        if n <= 0:
            raise ValueError("n must be positive")
        threshold = ((1 << 64) // n) * n
        while True:
            z = self.next_u64()
            if z < threshold:
                return z % n

    def shuffle(self, items: list) -> None:
        """In-place Fisher-Yates shuffle."""
        for i in range(len(items) - 1, 0, -1):
            j = self.next_below(i + 1)
            items[i], items[j] = items[j], items[i]
