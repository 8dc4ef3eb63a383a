"""A persistent file of pre-generated random words and replayable streams.

Every stochastic experiment in this package draws from one of these files, so
any run can be replayed bit-exactly under either measurement ordering. Streams
never wrap around: exhausting one raises, because silently reusing words would
correlate trials.

File layout (all integers little-endian):

    bytes 0-3      magic ``b"LMDA"``
    byte  4        format version (currently 1)
    bytes 5-12     word count, uint64
    bytes 13-20    seed provenance note, uint64 (informational only)
    bytes 21-...   payload: count x uint64 words

A stored word ``w`` maps to the real ``w / 2**64``, rounded down to the 53-bit
float grid (``(w >> 11) * 2**-53``) so every derived value lies strictly in
``[0, 1)``; the naive float division would round the top ~2**10 words up to
exactly 1.0.

Splitting is fixed-block: substream ``i`` of a stream owns words
``[i*block, (i+1)*block)`` of that stream's range, making per-substream values
independent of the order in which substreams are consumed.
"""

from __future__ import annotations

import struct
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .errors import (
    CapacityError,
    EmptyFileError,
    LambdaFormatError,
    StreamExhaustedError,
)

MAGIC = b"LMDA"
FORMAT_VERSION = 1
DEFAULT_BLOCK = 64

_HEADER = struct.Struct("<4sBQQ")


def words_to_reals(words: np.ndarray) -> np.ndarray:
    """Map uint64 words to floats in [0, 1) on the 53-bit grid."""
    words = np.asarray(words, dtype=np.uint64)
    return (words >> np.uint64(11)).astype(np.float64) * (2.0 ** -53)


@dataclass(frozen=True, eq=False)
class LambdaFile:
    """Immutable array of stored uint64 words plus a seed provenance note."""

    words: np.ndarray
    seed_note: int = 0

    def __post_init__(self) -> None:
        words = np.ascontiguousarray(self.words, dtype=np.uint64)
        if words.ndim != 1:
            raise LambdaFormatError("payload must be a flat word sequence")
        if words.size == 0:
            raise EmptyFileError("a lambda file must contain at least one word")
        words = words.copy()
        words.flags.writeable = False
        object.__setattr__(self, "words", words)
        object.__setattr__(self, "seed_note", int(self.seed_note) & (2**64 - 1))

    @property
    def count(self) -> int:
        return int(self.words.size)

    @classmethod
    def from_reals(cls, values, seed_note: int = 0) -> "LambdaFile":
        """Build a file whose derived reals approximate `values` to ~2**-53.

        Test convenience: lets a scenario pin specific lambda draws.
        """
        values = np.asarray(values, dtype=float)
        if np.any(values < 0.0) or np.any(values >= 1.0):
            raise ValueError("values must lie in [0, 1)")
        words = np.floor(values * 2.0**64).astype(np.uint64)
        return cls(words, seed_note)

    def to_bytes(self) -> bytes:
        header = _HEADER.pack(MAGIC, FORMAT_VERSION, self.count, self.seed_note)
        return header + self.words.astype("<u8").tobytes()

    @classmethod
    def from_bytes(cls, blob: bytes) -> "LambdaFile":
        if len(blob) < _HEADER.size:
            raise LambdaFormatError("file too short for a lambda header")
        magic, version, count, seed_note = _HEADER.unpack_from(blob)
        if magic != MAGIC:
            raise LambdaFormatError(f"bad magic {magic!r}, expected {MAGIC!r}")
        if version != FORMAT_VERSION:
            raise LambdaFormatError(f"unsupported format version {version}")
        payload = blob[_HEADER.size:]
        if len(payload) != 8 * count:
            raise LambdaFormatError(
                f"payload holds {len(payload)} bytes, header promises {8 * count}"
            )
        words = np.frombuffer(payload, dtype="<u8").astype(np.uint64)
        return cls(words, seed_note)

    def save(self, path) -> Path:
        path = Path(path)
        path.write_bytes(self.to_bytes())
        return path

    @classmethod
    def load(cls, path) -> "LambdaFile":
        return cls.from_bytes(Path(path).read_bytes())

    def stream(self, label: str = "root") -> "LambdaStream":
        """A cursor over the whole file."""
        return LambdaStream(self, 0, self.count, label)


def generate_lambda_file(seed: int, count: int) -> LambdaFile:
    """Deterministically expand a 64-bit seed into `count` stored words.

    Same (seed, count) always yields byte-identical files; the generator's
    statistical quality is enforced by the uniformity tests, not by decree.
    """
    seed = int(seed)
    if not 0 <= seed < 2**64:
        raise ValueError("seed must fit in 64 bits")
    count = int(count)
    if count < 1:
        raise EmptyFileError("count must be at least 1")
    words = np.random.PCG64(seed).random_raw(count)
    return LambdaFile(np.asarray(words, dtype=np.uint64), seed_note=seed)


@dataclass(eq=False)
class LambdaStream:
    """Single-owner cursor over a contiguous word range of a LambdaFile.

    Reading advances the cursor; `rewind()` restores it, and re-reading yields
    the identical sequence. Not safe for concurrent mutation; parallel trials
    must take one substream each via `split`.
    """

    file: LambdaFile
    start: int = 0
    length: int | None = None
    label: str = "root"
    _cursor: int = field(default=0, repr=False)

    def __post_init__(self) -> None:
        if self.length is None:
            self.length = self.file.count - self.start
        if self.start < 0 or self.length < 0 or self.start + self.length > self.file.count:
            raise CapacityError(
                f"range [{self.start}, {self.start + self.length}) exceeds "
                f"file capacity {self.file.count}"
            )

    @property
    def position(self) -> int:
        return self._cursor

    @property
    def remaining(self) -> int:
        return self.length - self._cursor

    def rewind(self) -> None:
        self._cursor = 0

    def next_real(self) -> float:
        """The next stored value as a float in [0, 1)."""
        if self._cursor >= self.length:
            raise StreamExhaustedError(
                f"stream {self.label!r} exhausted after {self.length} words"
            )
        word = self.file.words[self.start + self._cursor]
        self._cursor += 1
        return float(words_to_reals(np.asarray([word]))[0])

    def take(self, n: int) -> np.ndarray:
        """Consume and return the next `n` values as an array."""
        if n < 0:
            raise ValueError("cannot take a negative number of values")
        if self._cursor + n > self.length:
            raise StreamExhaustedError(
                f"stream {self.label!r} holds {self.remaining} words, requested {n}"
            )
        lo = self.start + self._cursor
        self._cursor += n
        return words_to_reals(self.file.words[lo:lo + n])

    def split(self, trial_index: int, block: int = DEFAULT_BLOCK) -> "LambdaStream":
        """Substream owning words [i*block, (i+1)*block) of this stream's range.

        Values depend only on (file, index path), never on consumption order.
        """
        if trial_index < 0:
            raise ValueError("trial index must be nonnegative")
        if block < 1:
            raise ValueError("block size must be positive")
        end = (trial_index + 1) * block
        if end > self.length:
            raise CapacityError(
                f"substream {trial_index} needs words up to {end}, "
                f"stream {self.label!r} holds {self.length}"
            )
        return LambdaStream(
            self.file,
            self.start + trial_index * block,
            block,
            f"{self.label}[{trial_index}]",
        )


def next_real(stream: LambdaStream) -> float:
    return stream.next_real()


def split_stream(stream: LambdaStream, trial_index: int, block: int = DEFAULT_BLOCK) -> LambdaStream:
    return stream.split(trial_index, block)
