"""Seeded, labelled random streams.

Every stochastic decision in rclust draws from a :class:`RandomStream`
derived from ``(seed, label[, index])``. The stream key is a BLAKE2b hash
of those values fed into numpy's counter-based Philox generator, so the
sequence is a pure function of its inputs: it does not depend on global
state, call order elsewhere in the program, or thread scheduling.
"""

from __future__ import annotations

import hashlib
import struct
from dataclasses import dataclass, field

import numpy as np

from .errors import ConfigError, DomainError

__all__ = ["RandomStream", "derive_stream", "DEFAULT_SEED"]

DEFAULT_SEED = 0
MAX_LABEL_BYTES = 32
_U64 = (1 << 64) - 1


def _stream_key(seed: int, label: str, index: int | None) -> np.ndarray:
    h = hashlib.blake2b(digest_size=16, person=b"rclust-stream")
    h.update(struct.pack("<Q", seed))
    h.update(label.encode("ascii"))
    if index is not None:
        h.update(b"\x00")
        h.update(struct.pack("<Q", index))
    return np.frombuffer(h.digest(), dtype="<u8").astype(np.uint64)


@dataclass(frozen=True)
class RandomStream:
    """A reproducible stream of random values.

    Streams are cheap value objects. :meth:`clone` gives a fresh stream at
    the starting position; draws advance the private generator only.
    """

    seed: int
    stream_label: str
    index: int | None = None
    _gen: np.random.Generator = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        key = _stream_key(self.seed, self.stream_label, self.index)
        object.__setattr__(self, "_gen", np.random.Generator(np.random.Philox(key=key)))

    @property
    def generator(self) -> np.random.Generator:
        """The underlying numpy generator (for vectorised draws)."""
        return self._gen

    def clone(self) -> "RandomStream":
        return RandomStream(self.seed, self.stream_label, self.index)

    def substream(self, index: int) -> "RandomStream":
        """Independent child stream keyed by ``index`` under the same label."""
        return derive_stream(self.seed, self.stream_label, index)

    def uniform_u64(self) -> int:
        return int(self._gen.integers(0, _U64, endpoint=True, dtype=np.uint64))

    def uniform_real(self) -> float:
        """Uniform real in [0, 1)."""
        return float(self._gen.random())

    def choice(self, n: int) -> int:
        """Uniform index in ``[0, n)``; numpy's bounded draw has no modulo bias."""
        if n < 1:
            raise DomainError(f"choice needs n >= 1, got {n}")
        return int(self._gen.integers(0, n))

    def shuffle(self, items):
        """Return a Fisher-Yates permutation of ``items`` as a new list."""
        items = list(items)
        for i in range(len(items) - 1, 0, -1):
            j = self.choice(i + 1)
            items[i], items[j] = items[j], items[i]
        return items

    def permutation(self, n: int) -> np.ndarray:
        """Uniformly random permutation of ``range(n)`` as an int array."""
        return np.asarray(self.shuffle(range(n)), dtype=np.int64)


def derive_stream(seed: int, label: str, index: int | None = None) -> RandomStream:
    """Derive the stream for ``(seed, label)``, optionally split by ``index``.

    Parameters
    ----------
    seed : int
        Unsigned 64-bit seed.
    label : str
        Non-empty ASCII tag of at most 32 bytes, e.g. ``"weights"``.
    index : int, optional
        Substream index (used for per-feature streams).

    Raises
    ------
    ConfigError
        If the label is empty, too long, or not ASCII, or the seed is out
        of range.
    """
    if not isinstance(label, str) or not label:
        raise ConfigError("stream label must be a non-empty string")
    try:
        raw = label.encode("ascii")
    except UnicodeEncodeError:
        raise ConfigError(f"stream label must be ASCII: {label!r}") from None
    if len(raw) > MAX_LABEL_BYTES:
        raise ConfigError(f"stream label longer than {MAX_LABEL_BYTES} bytes: {label!r}")
    seed = int(seed)
    if not 0 <= seed <= _U64:
        raise ConfigError(f"seed must be an unsigned 64-bit integer, got {seed}")
    if index is not None and not 0 <= int(index) <= _U64:
        raise ConfigError(f"substream index out of range: {index}")
    return RandomStream(seed, label, None if index is None else int(index))
