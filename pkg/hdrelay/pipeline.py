from __future__ import annotations

import itertools
import logging
from dataclasses import dataclass, field
from typing import Callable, Mapping, Optional, Sequence, Union

from .codec import TimingCode
from .errors import CodeConstructionError, CollisionError, DecodeError, InvalidSpecError
from .model import Word, is_collision_free, simulate_cascade

logger = logging.getLogger(__name__)

DEFAULT_SEQUENCE_CAP = 100_000

Messages = Union[Sequence[int], Mapping[int, Sequence[int]]]


@dataclass(frozen=True)
class TranscriptEntry:
    """One node in one block. Transmitters log the sent word, the sink logs what it received."""

    block: int
    node: int
    word: Word
    decoded: Optional[dict[str, int]] = None

    def to_dict(self) -> dict:
        return {"block": self.block, "node": self.node, "word": self.word.to_json(), "decoded": self.decoded}


@dataclass
class PipelineState:
    """
    Per-node decode history (message block -> w_0), the current block and the words
    pending for it. Node 0 starts out knowing every source message.
    """

    block: int = 0
    known: dict[int, dict[int, int]] = field(default_factory=dict)
    pending: dict[int, Word] = field(default_factory=dict)


@dataclass(frozen=True)
class PipelineResult:
    sink_decodes: tuple[tuple[int, dict[str, int]], ...]
    transcript: tuple[TranscriptEntry, ...]

    def sink_w0(self) -> list[tuple[int, int]]:
        return [(b, d["w0"]) for b, d in self.sink_decodes if "w0" in d]


def _normalize(code: TimingCode, messages: Messages) -> dict[int, list[int]]:
    if isinstance(messages, Mapping):
        msgs = {int(v): list(seq) for v, seq in messages.items()}
    else:
        msgs = {0: list(messages)}
    for v in code.spec.sources:
        if v not in msgs:
            raise InvalidSpecError(f"no messages given for source {v}")
    for v, seq in msgs.items():
        size = code.sizes[code.spec.alpha(v)]
        for w in seq:
            if not 0 <= w < size:
                raise CodeConstructionError(f"message {w} of source {v} outside 0..{size - 1}")
    return msgs


def run_pipeline(code: TimingCode, messages: Messages, blocks: Optional[int] = None) -> PipelineResult:
    """
    Run `blocks` blocks of `code` through the cascade.

    messages is either the w_0 sequence or a mapping source node -> sequence (one entry per
    block, block 1 first). Every decode is checked against the true message: node k recovers
    source v's block-(b - (k - 1 - v)) message in block b.
    """
    spec = code.spec
    msgs = _normalize(code, messages)
    B = blocks if blocks is not None else len(msgs[0])
    if B < spec.m:
        raise InvalidSpecError(f"need at least m={spec.m} blocks, got {B}")
    for v, seq in msgs.items():
        if len(seq) < B:
            raise InvalidSpecError(f"source {v} has {len(seq)} messages for {B} blocks")

    state = PipelineState(known={k: {} for k in range(spec.m + 1)})
    state.known[0] = {b: w for b, w in enumerate(msgs[0][:B], start=1)}
    transcript: list[TranscriptEntry] = []
    sink: list[tuple[int, dict[str, int]]] = []

    for b in range(1, B + 1):
        state.block = b
        state.pending = {
            k: code.encode(k, b, state.known[k], msgs[k][b - 1] if k in msgs and k > 0 else None)
            for k in range(spec.m)
        }
        words = [state.pending[k] for k in range(spec.m)]
        if not is_collision_free(words):
            raise CollisionError(f"{code.name}: adjacent nodes transmit together in block {b}")
        received = simulate_cascade(spec, words)

        decoded_now: dict[int, dict[str, int]] = {}
        for k in range(1, spec.m + 1):
            out = code.decode(k, b, received[k], state.known[k])
            labelled: dict[str, int] = {}
            for v, w in out.items():
                j = b - (k - 1 - v)
                truth = msgs[v][j - 1] if 1 <= j <= len(msgs[v]) else None
                if truth is None or w != truth:
                    raise DecodeError(f"{code.name}: node {k} decoded w_{spec.alpha(v)}({j}) = {w}, sent {truth}")
                if v == 0:
                    state.known[k][j] = w
                labelled[f"w{spec.alpha(v)}"] = w
            decoded_now[k] = labelled

        for k in range(spec.m):
            transcript.append(TranscriptEntry(b, k, words[k], decoded_now.get(k) or None))
        transcript.append(TranscriptEntry(b, spec.m, received[spec.m], decoded_now[spec.m] or None))
        if decoded_now[spec.m]:
            sink.append((b, decoded_now[spec.m]))
        logger.debug("%s block %d: sink decoded %s", code.name, b, decoded_now[spec.m])

    return PipelineResult(sink_decodes=tuple(sink), transcript=tuple(transcript))


@dataclass(frozen=True)
class VerificationSummary:
    sequences: int
    decode_errors: int
    collisions: int
    truncated: bool

    @property
    def passed(self) -> bool:
        return self.decode_errors == 0 and self.collisions == 0

    def to_dict(self) -> dict:
        return {
            "sequences": self.sequences,
            "decode_errors": self.decode_errors,
            "collisions": self.collisions,
            "truncated": self.truncated,
            "passed": self.passed,
        }


def iter_message_sequences(code: TimingCode, blocks: int):
    """Every assignment of messages to (source, block), lexicographic in source order."""
    ranges = [range(code.sizes[code.spec.alpha(v)]) for v in code.spec.sources for _ in range(blocks)]
    for combo in itertools.product(*ranges):
        yield {v: list(combo[a * blocks:(a + 1) * blocks]) for a, v in enumerate(code.spec.sources)}


def verify_exhaustive(
    code: TimingCode,
    blocks: int,
    cap: int = DEFAULT_SEQUENCE_CAP,
    progress_callback: Optional[Callable[[int], None]] = None,
) -> VerificationSummary:
    """Run the pipeline on every message sequence (at most `cap` of them) and tally failures."""
    errors = collisions = count = 0
    truncated = False
    for msgs in iter_message_sequences(code, blocks):
        if count >= cap:
            truncated = True
            break
        count += 1
        try:
            run_pipeline(code, msgs, blocks)
        except CollisionError as e:
            collisions += 1
            logger.warning("%s", e)
        except DecodeError as e:
            errors += 1
            logger.warning("%s", e)
        if progress_callback:
            progress_callback(count)
    summary = VerificationSummary(sequences=count, decode_errors=errors, collisions=collisions, truncated=truncated)
    logger.info("%s: verified %d sequences over %d blocks (%d errors, %d collisions%s)",
                code.name, count, blocks, errors, collisions, ", capped" if truncated else "")
    return summary
