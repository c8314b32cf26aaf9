from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Mapping, Sequence, Union

import numpy as np

from .errors import InvalidSpecError, InvalidWordError, WordLengthError


# A symbol is either a transmission k in {0, ..., q-1} or the quiet symbol "N".
Symbol = int
QUIET: Symbol = -1

# Largest q that still has a one-character text form per symbol.
TEXT_MAX_Q = 10


def symbol_to_text(s: Symbol) -> str:
    return "N" if s == QUIET else str(s)


@dataclass(frozen=True)
class Word:
    """
    A fixed-length sequence of channel symbols for one node and one block.

    Validity (every transmission < q) is checked here, once; q lives on the word
    so two words can be compared without a CascadeSpec at hand.
    """

    symbols: tuple[Symbol, ...]
    q: int

    def __post_init__(self) -> None:
        if self.q < 1:
            raise InvalidWordError(f"q must be >= 1, got {self.q}")
        if len(self.symbols) < 1:
            raise InvalidWordError("a word has at least one symbol")
        for s in self.symbols:
            if s != QUIET and not 0 <= s < self.q:
                raise InvalidWordError(f"symbol {s} outside alphabet for q={self.q}")

    @classmethod
    def quiet(cls, n: int, q: int) -> "Word":
        return cls(symbols=(QUIET,) * n, q=q)

    @classmethod
    def from_text(cls, text: str, q: int) -> "Word":
        """Parse "N010" style text (q <= 10)."""
        if q > TEXT_MAX_Q:
            raise InvalidWordError(f"text form only supports q <= {TEXT_MAX_Q}")
        symbols = []
        for ch in text.strip():
            if ch in ("N", "n"):
                symbols.append(QUIET)
            elif ch.isdigit():
                symbols.append(int(ch))
            else:
                raise InvalidWordError(f"unexpected character {ch!r} in word {text!r}")
        return cls(symbols=tuple(symbols), q=q)

    @classmethod
    def from_list(cls, values: Iterable[int | None], q: int) -> "Word":
        """Integer-array form: None stands for the quiet symbol."""
        return cls(symbols=tuple(QUIET if v is None else int(v) for v in values), q=q)

    def __len__(self) -> int:
        return len(self.symbols)

    def __getitem__(self, t: int) -> Symbol:
        return self.symbols[t]

    @property
    def weight(self) -> int:
        return sum(1 for s in self.symbols if s != QUIET)

    @property
    def transmit_slots(self) -> tuple[int, ...]:
        return tuple(t for t, s in enumerate(self.symbols) if s != QUIET)

    @property
    def listen_slots(self) -> tuple[int, ...]:
        return tuple(t for t, s in enumerate(self.symbols) if s == QUIET)

    def to_text(self) -> str:
        return "".join(symbol_to_text(s) for s in self.symbols)

    def to_json(self) -> Union[str, list[int | None]]:
        if self.q <= TEXT_MAX_Q:
            return self.to_text()
        return [None if s == QUIET else s for s in self.symbols]

    def __str__(self) -> str:
        return self.to_text() if self.q <= TEXT_MAX_Q else str(self.to_json())


def word_from_json(value: Union[str, Sequence[int | None]], q: int) -> Word:
    if isinstance(value, str):
        return Word.from_text(value, q)
    return Word.from_list(value, q)


@dataclass(frozen=True)
class CascadeSpec:
    """
    Line network 0 -> 1 -> ... -> m. Node 0 is the source, m the sink,
    1..m-1 are half-duplex relays. `sources` is V_s in cascade order.
    """

    m: int
    q: int
    sources: tuple[int, ...] = (0,)

    def __post_init__(self) -> None:
        if self.m < 1:
            raise InvalidSpecError(f"m must be >= 1, got {self.m}")
        if self.q < 1:
            raise InvalidSpecError(f"q must be >= 1, got {self.q}")
        srcs = tuple(self.sources)
        if 0 not in srcs:
            raise InvalidSpecError("node 0 must be a source")
        if len(set(srcs)) != len(srcs):
            raise InvalidSpecError(f"duplicate source nodes in {srcs}")
        for v in srcs:
            if not 0 <= v <= self.m - 1:
                raise InvalidSpecError(f"source {v} outside 0..{self.m - 1}")
        object.__setattr__(self, "sources", tuple(sorted(srcs)))

    @property
    def relays(self) -> tuple[int, ...]:
        return tuple(range(1, self.m))

    def alpha(self, v: int) -> int:
        """Rank of source v in V_s."""
        try:
            return self.sources.index(v)
        except ValueError:
            raise InvalidSpecError(f"node {v} is not a source") from None

    def to_dict(self) -> dict:
        return {"m": self.m, "q": self.q, "sources": list(self.sources)}

    @classmethod
    def from_dict(cls, data: Mapping) -> "CascadeSpec":
        try:
            return cls(m=int(data["m"]), q=int(data["q"]), sources=tuple(int(v) for v in data.get("sources", [0])))
        except KeyError as e:
            raise InvalidSpecError(f"missing field {e.args[0]!r}") from None


def channel_output(x_prev: Symbol, x_self: Symbol) -> Symbol:
    """Half-duplex link: a transmitting node hears itself, a quiet one hears upstream."""
    return x_prev if x_self == QUIET else x_self


def _stack(inputs: Sequence[Word]) -> np.ndarray:
    if not inputs:
        raise WordLengthError("need at least one input word")
    lengths = {len(w) for w in inputs}
    if len(lengths) != 1:
        raise WordLengthError(f"input words differ in length: {sorted(lengths)}")
    return np.array([w.symbols for w in inputs], dtype=np.int64)


def simulate_cascade(spec: CascadeSpec, inputs: Sequence[Word]) -> dict[int, Word]:
    """
    Run one block through the cascade.

    inputs[i] is the word sent by node i for i = 0..m-1; the sink is always quiet.
    Returns node -> received word for nodes 1..m.
    """
    if len(inputs) != spec.m:
        raise WordLengthError(f"expected {spec.m} input words (nodes 0..{spec.m - 1}), got {len(inputs)}")
    x = _stack(inputs)
    x = np.vstack([x, np.full((1, x.shape[1]), QUIET, dtype=np.int64)])
    y = np.where(x[1:] == QUIET, x[:-1], x[1:])
    return {i: Word(symbols=tuple(int(s) for s in y[i - 1]), q=spec.q) for i in range(1, spec.m + 1)}


def is_collision_free(inputs: Sequence[Word]) -> bool:
    """True iff no slot has two adjacent nodes transmitting."""
    x = _stack(inputs)
    tx = x != QUIET
    return not bool(np.any(tx[:-1] & tx[1:]))
