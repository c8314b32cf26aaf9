from __future__ import annotations

import abc
import logging
import math
from dataclasses import dataclass, field
from typing import Mapping, Optional, Sequence

from .counting import BudgetVector, binom, max_w0
from .errors import CodeConstructionError, DecodeError, EnumerationLimitError
from .model import QUIET, CascadeSpec, Symbol, Word, symbol_to_text

logger = logging.getLogger(__name__)

# Largest number of (context, message) entries codebooks() will list.
CODEBOOK_CAP = 100_000


@dataclass(frozen=True)
class CodebookEntry:
    """One codeword. `word` is text; "B" marks a slot carrying a relay source's own bits."""

    message: int
    word: str
    colors: tuple[str, ...] = ()
    context: str = ""


@dataclass(frozen=True)
class Codebook:
    node: int
    entries: tuple[CodebookEntry, ...]
    contexts: tuple[str, ...] = ("",)

    def __post_init__(self) -> None:
        lengths = {len(e.word) for e in self.entries}
        if len(lengths) > 1:
            raise CodeConstructionError(f"codebook of node {self.node} mixes word lengths {sorted(lengths)}")
        seen: dict[tuple[str, str], int] = {}
        for e in self.entries:
            if e.context not in self.contexts:
                raise CodeConstructionError(f"unknown context {e.context!r} in codebook of node {self.node}")
            key = (e.context, e.word)
            if key in seen and seen[key] != e.message:
                raise CodeConstructionError(
                    f"node {self.node}: messages {seen[key]} and {e.message} share {e.word!r} in context {e.context!r}"
                )
            seen[key] = e.message

    def lookup(self, message: int, context: str = "") -> CodebookEntry:
        for e in self.entries:
            if e.message == message and e.context == context:
                return e
        raise KeyError((message, context))

    @property
    def n(self) -> int:
        return len(self.entries[0].word) if self.entries else 0


def to_digits(value: int, radix: int, length: int) -> list[int]:
    """Big-endian base-`radix` digits, zero padded to `length`."""
    digits = [0] * length
    for k in range(length - 1, -1, -1):
        value, digits[k] = divmod(value, radix)
    if value:
        raise CodeConstructionError(f"value does not fit into {length} base-{radix} digits")
    return digits


def from_digits(digits: Sequence[int], radix: int) -> int:
    value = 0
    for d in digits:
        value = value * radix + d
    return value


def unrank_subset(rank: int, n: int, k: int) -> tuple[int, ...]:
    """The rank-th k-subset of range(n) in lexicographic order."""
    if not 0 <= rank < binom(n, k):
        raise CodeConstructionError(f"subset rank {rank} outside 0..C({n},{k})-1")
    out: list[int] = []
    start = 0
    for remaining in range(k, 0, -1):
        for c in range(start, n):
            count = binom(n - c - 1, remaining - 1)
            if rank < count:
                out.append(c)
                start = c + 1
                break
            rank -= count
    return tuple(out)


def rank_subset(slots: Sequence[int], n: int) -> int:
    k = len(slots)
    rank = 0
    prev = -1
    for idx, c in enumerate(slots):
        for x in range(prev + 1, c):
            rank += binom(n - x - 1, k - idx - 1)
        prev = c
    return rank


class TimingCode(abc.ABC):
    """
    A block code for a cascade. Node k's block-b word encodes w_0(b-k); blocks b <= k are warm-up
    and node k stays quiet. `known` holds what a node has decoded so far: block index -> w_0.
    """

    name: str
    spec: CascadeSpec
    n: int

    @property
    @abc.abstractmethod
    def sizes(self) -> tuple[int, ...]:
        """Message set size per source, in source order."""

    @abc.abstractmethod
    def encode(self, node: int, block: int, known: Mapping[int, int], own: Optional[int] = None) -> Word:
        ...

    @abc.abstractmethod
    def decode(self, node: int, block: int, received: Word, known: Mapping[int, int]) -> dict[int, int]:
        """Messages recovered in this block, keyed by source node; empty during warm-up."""

    @abc.abstractmethod
    def codebooks(self) -> tuple[Codebook, ...]:
        ...

    @property
    def sum_rate(self) -> float:
        return sum(math.log2(s) for s in self.sizes) / self.n


def _word(symbols: Sequence[Symbol], q: int) -> Word:
    return Word(symbols=tuple(symbols), q=q)


class SingleRelayCode(TimingCode):
    """
    Source -> relay -> sink with block length n and n1 relay transmissions per block.

    The relay forwards w_0(b-1) as a transmit pattern (lexicographic n1-subset) plus n1
    q-ary symbols: index = pattern_rank * q^n1 + payload. The source, which knows that
    pattern, writes w_0(b) into the relay's listen slots. If q-ary digits suffice the
    source never idles there, otherwise it uses (q+1)-ary digits with digit q sent as N.
    """

    def __init__(self, n: int, n1: int, q: int) -> None:
        if q < 1:
            raise CodeConstructionError(f"q must be >= 1, got {q}")
        if not 1 <= n1 < n:
            raise CodeConstructionError(f"need 1 <= n1 < n, got n={n}, n1={n1}")
        self.name = f"single_relay({n},{n1},{q})"
        self.spec = CascadeSpec(m=2, q=q)
        self.n = n
        self.n1 = n1
        self.q = q
        self.size = min(q ** n1 * binom(n, n1), (q + 1) ** (n - n1))
        if self.size != max_w0(BudgetVector(n=n, budgets=(n1,)), q):
            raise CodeConstructionError("code size disagrees with the counting bound")
        self.radix = q if q ** (n - n1) >= self.size else q + 1
        # warm-up: the relay is quiet, the source acts as if it transmits in the last n1 slots
        self.warmup_pattern = tuple(range(n - n1, n))

    @property
    def sizes(self) -> tuple[int, ...]:
        return (self.size,)

    def _check_message(self, w: int) -> None:
        if not 0 <= w < self.size:
            raise CodeConstructionError(f"message {w} outside 0..{self.size - 1}")

    def relay_pattern(self, w: int) -> tuple[int, ...]:
        self._check_message(w)
        return unrank_subset(w // self.q ** self.n1, self.n, self.n1)

    def relay_word(self, w: int) -> Word:
        pattern = self.relay_pattern(w)
        payload = to_digits(w % self.q ** self.n1, self.q, self.n1) if self.q > 1 else [0] * self.n1
        symbols = [QUIET] * self.n
        for slot, d in zip(pattern, payload):
            symbols[slot] = d
        return _word(symbols, self.q)

    def relay_index(self, word: Word) -> int:
        slots = word.transmit_slots
        if len(slots) != self.n1:
            raise DecodeError(f"relay word {word} has {len(slots)} transmissions, expected {self.n1}")
        payload = from_digits([word[t] for t in slots], self.q) if self.q > 1 else 0
        return rank_subset(slots, self.n) * self.q ** self.n1 + payload

    def listen_slots(self, pattern: Sequence[int]) -> tuple[int, ...]:
        tx = set(pattern)
        return tuple(t for t in range(self.n) if t not in tx)

    def source_word(self, w: int, pattern: Sequence[int]) -> Word:
        self._check_message(w)
        digits = to_digits(w, self.radix, self.n - self.n1)
        symbols = [QUIET] * self.n
        for slot, d in zip(self.listen_slots(pattern), digits):
            symbols[slot] = QUIET if d == self.q else d
        return _word(symbols, self.q)

    def _pattern_at(self, block: int, known: Mapping[int, int]) -> tuple[int, ...]:
        if block <= 1:
            return self.warmup_pattern
        return self.relay_pattern(known[block - 1])

    def encode(self, node: int, block: int, known: Mapping[int, int], own: Optional[int] = None) -> Word:
        if node == 0:
            return self.source_word(known[block], self._pattern_at(block, known))
        if node == 1:
            if block <= 1:
                return Word.quiet(self.n, self.q)
            return self.relay_word(known[block - 1])
        raise CodeConstructionError(f"node {node} does not transmit in a single-relay cascade")

    def decode(self, node: int, block: int, received: Word, known: Mapping[int, int]) -> dict[int, int]:
        if node == 1:
            digits = []
            for t in self.listen_slots(self._pattern_at(block, known)):
                s = received[t]
                digits.append(self.q if s == QUIET else s)
            if self.radix == self.q and self.q in digits:
                raise DecodeError(f"unexpected quiet slot in source word {received}")
            w = from_digits(digits, self.radix)
            if w >= self.size:
                raise DecodeError(f"decoded index {w} outside the message set")
            return {0: w}
        if node == 2:
            if block <= 1:
                return {}
            w = self.relay_index(received)
            if w >= self.size:
                raise DecodeError(f"decoded index {w} outside the message set")
            return {0: w}
        raise CodeConstructionError(f"node {node} does not decode in a single-relay cascade")

    def codebooks(self) -> tuple[Codebook, ...]:
        patterns = binom(self.n, self.n1)
        if self.size * (patterns + 1) > CODEBOOK_CAP:
            raise EnumerationLimitError(f"codebooks of {self.name} exceed {CODEBOOK_CAP} entries")
        contexts = tuple(unrank_subset(r, self.n, self.n1) for r in range(patterns))
        labels = tuple(_pattern_label(p, self.n) for p in contexts)
        src = tuple(
            CodebookEntry(message=w, word=self.source_word(w, p).to_text(), context=label)
            for p, label in zip(contexts, labels)
            for w in range(self.size)
        )
        relay = tuple(
            CodebookEntry(message=w, word=self.relay_word(w).to_text(), colors=(_pattern_label(self.relay_pattern(w), self.n),))
            for w in range(self.size)
        )
        return Codebook(node=0, entries=src, contexts=labels), Codebook(node=1, entries=relay)


def _pattern_label(pattern: Sequence[int], n: int) -> str:
    """Transmit pattern as text: T where the node transmits, N elsewhere."""
    tx = set(pattern)
    return "".join("T" if t in tx else "N" for t in range(n))


def build_single_relay_code(n: int, n1: int, q: int) -> tuple[Codebook, ...]:
    """(source, relay) codebooks of the single-relay code."""
    return SingleRelayCode(n, n1, q).codebooks()


def counting_rate(n: int, n1: int, q: int) -> float:
    """(1/n) log2 |W_0| of the single-relay code, computed from exact integers."""
    return math.log2(SingleRelayCode(n, n1, q).size) / n


# Three-node example: node 2 keys its transmit pattern on w_0(b-2) and fills the B slots with w_1(b).
NODE2_PATTERNS: dict[int, tuple[str, str]] = {
    0: ("NBNB", "a"),
    1: ("BNBN", "b"),
    2: ("NBBN", "c"),
    3: ("BNNB", "d"),
}
# Colors of a word by the first two slots in which the node listens.
LISTEN_COLORS: dict[tuple[int, int], str] = {(1, 2): "e", (0, 2): "f", (0, 1): "g"}


def single_transmission(w: int, listen: Sequence[int], n: int) -> list[Symbol]:
    """w in 0..3 as one binary symbol (w % 2) in the (w // 2)-th of two listen slots."""
    symbols = [QUIET] * n
    symbols[listen[w // 2]] = w % 2
    return symbols


def read_single_transmission(received: Word, listen: Sequence[int]) -> int:
    hits = [(k, received[t]) for k, t in enumerate(listen[:2]) if received[t] != QUIET]
    if len(hits) != 1:
        raise DecodeError(f"expected exactly one transmission in slots {tuple(listen[:2])} of {received}")
    k, s = hits[0]
    return 2 * k + s


@dataclass
class TwoSourceCode(TimingCode):
    """
    Four-node cascade 0 -> 1 -> 2 -> 3 with sources {0, 2}, q = 2, n = 4, n_1 = 1, n_2 = 2.

    Node 2 shows w_0 by its transmit pattern and w_1 by the two bits it sends. Nodes 0 and 1
    each place a single binary symbol into the first two slots where the next node listens.
    """

    name: str = "table2"
    spec: CascadeSpec = field(default_factory=lambda: CascadeSpec(m=3, q=2, sources=(0, 2)))
    n: int = 4

    @property
    def sizes(self) -> tuple[int, ...]:
        return (4, 4)

    @staticmethod
    def node2_template(w0: int) -> str:
        return NODE2_PATTERNS[w0][0]

    def node2_word(self, w0: int, w1: int) -> Word:
        if not 0 <= w1 < 4:
            raise CodeConstructionError(f"w_1 = {w1} outside 0..3")
        bits = iter(to_digits(w1, 2, 2))
        return _word([next(bits) if c == "B" else QUIET for c in self.node2_template(w0)], 2)

    def _node2_listen(self, block: int, known: Mapping[int, int]) -> tuple[int, ...]:
        if block <= 2:
            return tuple(range(self.n))
        template = self.node2_template(known[block - 2])
        return tuple(t for t, c in enumerate(template) if c == "N")

    def _node1_symbols(self, block: int, known: Mapping[int, int]) -> list[Symbol]:
        if block <= 1:
            return [QUIET] * self.n
        return single_transmission(known[block - 1], self._node2_listen(block, known), self.n)

    def _node1_listen(self, block: int, known: Mapping[int, int]) -> tuple[int, ...]:
        symbols = self._node1_symbols(block, known)
        return tuple(t for t, s in enumerate(symbols) if s == QUIET)

    def encode(self, node: int, block: int, known: Mapping[int, int], own: Optional[int] = None) -> Word:
        if node == 0:
            return _word(single_transmission(known[block], self._node1_listen(block, known), self.n), 2)
        if node == 1:
            return _word(self._node1_symbols(block, known), 2)
        if node == 2:
            if block <= 2:
                return Word.quiet(self.n, 2)
            if own is None:
                raise CodeConstructionError("node 2 needs its own message w_1")
            return self.node2_word(known[block - 2], own)
        raise CodeConstructionError(f"node {node} does not transmit")

    def decode(self, node: int, block: int, received: Word, known: Mapping[int, int]) -> dict[int, int]:
        if node == 1:
            return {0: read_single_transmission(received, self._node1_listen(block, known))}
        if node == 2:
            if block <= 1:
                return {}
            return {0: read_single_transmission(received, self._node2_listen(block, known))}
        if node == 3:
            if block <= 2:
                return {}
            template = "".join("N" if s == QUIET else "B" for s in received.symbols)
            matches = [w0 for w0, (t, _) in NODE2_PATTERNS.items() if t == template]
            if not matches:
                raise DecodeError(f"sink received unknown pattern {received}")
            w1 = from_digits([s for s in received.symbols if s != QUIET], 2)
            return {0: matches[0], 2: w1}
        raise CodeConstructionError(f"node {node} does not decode")

    def codebooks(self) -> tuple[Codebook, ...]:
        c2 = Codebook(
            node=2,
            entries=tuple(CodebookEntry(message=w, word=t, colors=(r,)) for w, (t, r) in NODE2_PATTERNS.items()),
        )
        c1_entries = []
        for w2, (template, r) in NODE2_PATTERNS.items():
            listen = tuple(t for t, c in enumerate(template) if c == "N")
            for w in range(4):
                symbols = single_transmission(w, listen, self.n)
                own_listen = tuple(t for t, s in enumerate(symbols) if s == QUIET)
                s_color = LISTEN_COLORS[own_listen[:2]]
                text = "".join(symbol_to_text(s) for s in symbols)
                c1_entries.append(CodebookEntry(message=w, word=text, colors=(r, s_color), context=r))
        c1 = Codebook(node=1, entries=tuple(c1_entries), contexts=("a", "b", "c", "d"))
        c0_entries = []
        for listen, s_color in sorted(LISTEN_COLORS.items(), key=lambda kv: kv[1]):
            for w in range(4):
                text = "".join(symbol_to_text(s) for s in single_transmission(w, listen, self.n))
                c0_entries.append(CodebookEntry(message=w, word=text, colors=(s_color,), context=s_color))
        c0 = Codebook(node=0, entries=tuple(c0_entries), contexts=("e", "f", "g"))
        return c0, c1, c2


def build_table2_code() -> tuple[Codebook, ...]:
    return TwoSourceCode().codebooks()


def format_codebooks(codebooks: Sequence[Codebook]) -> str:
    """Colored-table text: one block per node, one row per message, one column per context."""
    lines: list[str] = []
    for cb in codebooks:
        lines.append(f"C_{cb.node}")
        header = ["w0"] + [c if c else "-" for c in cb.contexts]
        lines.append(" | ".join(header))
        messages = sorted({e.message for e in cb.entries})
        for w in messages:
            cells = [str(w)]
            for ctx in cb.contexts:
                try:
                    e = cb.lookup(w, ctx)
                except KeyError:
                    cells.append("")
                    continue
                colors = ",".join(e.colors)
                cells.append(f"{e.word} ({colors})" if colors else e.word)
            lines.append(" | ".join(cells))
        lines.append("")
    return "\n".join(lines)
