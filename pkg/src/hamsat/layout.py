"""Partitioned vertex universe and (l,k)-sequence plumbing.

Vertices are dense integers ``0 .. N-1``.  Part ``s`` (1-based, ``1 .. 2n``)
owns one contiguous id range, with its A-class block first and its B-class
block second, so classifying an id is a binary search over part offsets.
Parts ``1 .. n`` are the core parts, ``n+1 .. 2n`` the pendant parts.
"""

from __future__ import annotations

import json
import struct
from bisect import bisect_right
from dataclasses import dataclass, field
from itertools import accumulate
from pathlib import Path
from typing import TYPE_CHECKING, Iterable, Iterator, Sequence

import numpy as np

if TYPE_CHECKING:
    from hamsat.params import ConstructionParams

MAGIC = b"LKC1"
_HEADER = struct.Struct("<4sqqq")


@dataclass(frozen=True)
class InstanceConfig:
    k: int
    ell: int
    N: int
    relaxed: bool = False
    seed: int = 0

    def __post_init__(self) -> None:
        if self.k < 5:
            raise ValueError(f"k must be at least 5, got {self.k}")
        if not (2 <= self.ell and 2 * self.ell < self.k):
            raise ValueError(f"need 2 <= ell < k/2, got k={self.k}, ell={self.ell}")
        if self.N % (self.k - self.ell):
            raise ValueError(f"N={self.N} is not divisible by k-ell={self.k - self.ell}")
        if not self.relaxed and self.N < 100 * self.k**10:
            raise ValueError(
                f"N={self.N} is below 100*k^10={100 * self.k**10}; pass relaxed=True "
                "to rely on the runtime inequality battery instead"
            )

    @property
    def n0(self) -> int:
        return 100 * self.k**10


@dataclass(frozen=True)
class VertexLayout:
    """Sizes of the sets A_s, B_s for parts s = 1..2n, plus the id codec."""

    k: int
    ell: int
    n: int
    size_a: tuple[int, ...]
    size_b: tuple[int, ...]
    _offsets: tuple[int, ...] = field(init=False, repr=False, compare=False)

    def __post_init__(self) -> None:
        if len(self.size_a) != 2 * self.n or len(self.size_b) != 2 * self.n:
            raise ValueError("size_a and size_b need exactly 2n entries")
        if min(self.size_a + self.size_b, default=0) < 0:
            raise ValueError("set sizes must be non-negative")
        part_sizes = [a + b for a, b in zip(self.size_a, self.size_b)]
        object.__setattr__(self, "size_a", tuple(self.size_a))
        object.__setattr__(self, "size_b", tuple(self.size_b))
        object.__setattr__(self, "_offsets", (0, *accumulate(part_sizes)))

    @property
    def N(self) -> int:
        return self._offsets[-1]

    @property
    def parts(self) -> range:
        return range(1, 2 * self.n + 1)

    def is_core(self, s: int) -> bool:
        return 1 <= s <= self.n

    def part_size(self, s: int) -> int:
        return self.size_a[s - 1] + self.size_b[s - 1]

    def u_range(self, s: int) -> range:
        return range(self._offsets[s - 1], self._offsets[s])

    def a_range(self, s: int) -> range:
        lo = self._offsets[s - 1]
        return range(lo, lo + self.size_a[s - 1])

    def b_range(self, s: int) -> range:
        lo = self._offsets[s - 1] + self.size_a[s - 1]
        return range(lo, self._offsets[s])

    # -- codec ---------------------------------------------------------

    def part_of(self, v: int) -> int:
        if not 0 <= v < self.N:
            raise ValueError(f"vertex id {v} outside [0, {self.N})")
        return bisect_right(self._offsets, v)

    def classify(self, v: int) -> tuple[int, str, int]:
        """Return ``(part, "A" | "B", index within the class)``."""
        s = self.part_of(v)
        rel = v - self._offsets[s - 1]
        na = self.size_a[s - 1]
        return (s, "A", rel) if rel < na else (s, "B", rel - na)

    def encode(self, part: int, cls: str, index: int) -> int:
        if not 1 <= part <= 2 * self.n:
            raise ValueError(f"part {part} outside [1, {2 * self.n}]")
        size = self.size_a[part - 1] if cls == "A" else self.size_b[part - 1]
        if cls not in ("A", "B") or not 0 <= index < size:
            raise ValueError(f"no vertex ({part}, {cls}, {index})")
        base = self._offsets[part - 1] + (0 if cls == "A" else self.size_a[part - 1])
        return base + index

    def parts_array(self, ids: np.ndarray) -> np.ndarray:
        """Vectorized :meth:`part_of`."""
        return np.searchsorted(np.asarray(self._offsets), ids, side="right")

    def a_mask(self, ids: np.ndarray) -> np.ndarray:
        """Boolean mask of ids lying in some A-class block."""
        offsets = np.asarray(self._offsets)
        parts = np.searchsorted(offsets, ids, side="right")
        rel = ids - offsets[parts - 1]
        return rel < np.asarray(self.size_a)[parts - 1]

    # -- traces ----------------------------------------------------------

    def trace(self, S: Iterable[int]) -> set[int]:
        tr = {self.part_of(v) for v in S}
        if not tr:
            raise ValueError("trace of an empty vertex set")
        return tr

    def trace1(self, S: Iterable[int]) -> set[int]:
        return {s for s in self.trace(S) if s <= self.n}

    def min_trace(self, S: Iterable[int]) -> int:
        return min(self.trace(S))

    def count_in(self, S: Iterable[int], s: int, cls: str | None = None) -> int:
        r = self.u_range(s) if cls is None else (self.a_range(s) if cls == "A" else self.b_range(s))
        return sum(1 for v in S if v in r)

    # -- serialization ----------------------------------------------------

    def to_json(self) -> dict:
        return {
            "k": self.k,
            "ell": self.ell,
            "N": self.N,
            "n": self.n,
            "sizeA": list(self.size_a),
            "sizeB": list(self.size_b),
        }

    @classmethod
    def from_json(cls, data: dict) -> "VertexLayout":
        layout = cls(data["k"], data["ell"], data["n"], tuple(data["sizeA"]), tuple(data["sizeB"]))
        if "N" in data and data["N"] != layout.N:
            raise ValueError(f"layout sizes sum to {layout.N}, header says N={data['N']}")
        return layout


def balanced_split(total: int, parts: int) -> list[int]:
    """Split ``total`` into ``parts`` integers differing by at most one.

    The remainder goes to the lowest indices.
    """
    if parts <= 0:
        raise ValueError("need at least one part")
    if total < 0:
        raise ValueError(f"cannot split a negative residual ({total})")
    q, r = divmod(total, parts)
    return [q + 1 if i < r else q for i in range(parts)]


def build_layout(config: InstanceConfig, params: "ConstructionParams") -> VertexLayout:
    k, ell, n = config.k, config.ell, params.n
    half = k // 2
    size_a = [2 * half + ell] * n + [2 * k - 2 * ell - 3] * n
    core_b = [x - 2 * half - ell for x in params.xs]
    residual = config.N - sum(size_a) - sum(core_b)
    if residual < 0:
        raise ValueError(
            f"configuration infeasible: core parts need {config.N - residual} vertices, N={config.N}"
        )
    size_b = core_b + balanced_split(residual, n)
    return VertexLayout(k, ell, n, tuple(size_a), tuple(size_b))


# -- (l,k)-sequences ------------------------------------------------------


@dataclass(frozen=True)
class LKSequence:
    seq: tuple[int, ...]
    k: int
    ell: int
    kind: str = "cycle"

    def __post_init__(self) -> None:
        if self.kind not in ("path", "cycle"):
            raise ValueError(f"kind must be 'path' or 'cycle', got {self.kind!r}")
        check_length(len(self.seq), self.k, self.ell, self.kind)
        if len(set(self.seq)) != len(self.seq):
            raise ValueError("sequence repeats a vertex")

    def windows(self) -> Iterator[tuple[int, ...]]:
        return windows(self.seq, self.k, self.ell, self.kind)


def check_length(length: int, k: int, ell: int, kind: str) -> None:
    step = k - ell
    if kind == "path":
        if length < k or (length - ell) % step:
            raise ValueError(f"a path needs length >= k and = ell mod {step}, got {length}")
    elif length == 0 or length % step:
        raise ValueError(f"a cycle needs a positive length divisible by {step}, got {length}")


def windows(seq: Sequence[int], k: int, ell: int, kind: str = "path") -> Iterator[tuple[int, ...]]:
    """Yield the width-k windows at stride k-ell; cycles wrap around."""
    check_length(len(seq), k, ell, kind)
    step = k - ell
    L = len(seq)
    if kind == "path":
        for start in range(0, L - ell, step):
            yield tuple(seq[start : start + k])
    else:
        for start in range(0, L, step):
            if start + k <= L:
                yield tuple(seq[start : start + k])
            else:
                yield tuple(seq[start:]) + tuple(seq[: start + k - L])


def window_count(length: int, k: int, ell: int, kind: str) -> int:
    check_length(length, k, ell, kind)
    return (length - ell) // (k - ell) if kind == "path" else length // (k - ell)


def write_sequence(path: str | Path, seq: Sequence[int] | np.ndarray, k: int, ell: int, N: int) -> bytes:
    """Write ``seq`` in the binary LKC1 format; returns the bytes written."""
    arr = np.asarray(seq, dtype="<i8")
    if arr.ndim != 1 or len(arr) != N:
        raise ValueError(f"expected {N} vertex ids, got shape {arr.shape}")
    data = _HEADER.pack(MAGIC, k, ell, N) + arr.tobytes()
    Path(path).write_bytes(data)
    return data


def read_header(path: str | Path) -> tuple[int, int, int]:
    with open(path, "rb") as fh:
        raw = fh.read(_HEADER.size)
    if len(raw) < _HEADER.size:
        raise ValueError(f"{path}: truncated header")
    magic, k, ell, N = _HEADER.unpack(raw)
    if magic != MAGIC:
        raise ValueError(f"{path}: bad magic {magic!r}")
    return k, ell, N


def iter_sequence_chunks(path: str | Path, chunk: int = 1 << 20) -> Iterator[np.ndarray]:
    """Stream the vertex ids of an LKC1 file in chunks of at most ``chunk``."""
    _, _, N = read_header(path)
    remaining = N
    with open(path, "rb") as fh:
        fh.seek(_HEADER.size)
        while remaining:
            take = min(chunk, remaining)
            buf = fh.read(8 * take)
            if len(buf) != 8 * take:
                raise ValueError(f"{path}: file ends before {N} ids")
            remaining -= take
            yield np.frombuffer(buf, dtype="<i8").astype(np.int64)
        if fh.read(1):
            raise ValueError(f"{path}: trailing bytes after {N} ids")


def read_sequence(path: str | Path) -> tuple[int, int, np.ndarray]:
    k, ell, N = read_header(path)
    chunks = list(iter_sequence_chunks(path))
    seq = np.concatenate(chunks) if chunks else np.zeros(0, dtype=np.int64)
    return k, ell, seq


def write_text_sequence(path: str | Path, seq: Iterable[int]) -> None:
    with open(path, "w") as fh:
        for v in seq:
            fh.write(f"{int(v)}\n")


def read_text_sequence(path: str | Path) -> list[int]:
    with open(path) as fh:
        return [int(line) for line in fh if line.strip()]


def save_layout(path: str | Path, layout: VertexLayout) -> None:
    Path(path).write_text(json.dumps(layout.to_json()))


def load_layout(path: str | Path) -> VertexLayout:
    return VertexLayout.from_json(json.loads(Path(path).read_text()))
