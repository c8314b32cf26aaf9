import itertools

import pytest
from pytest import approx

from hdrelay.capacity import capacity_single_relay, solve_capacity
from hdrelay.codec import (
    NODE2_PATTERNS,
    Codebook,
    CodebookEntry,
    SingleRelayCode,
    TwoSourceCode,
    build_single_relay_code,
    build_table2_code,
    counting_rate,
    format_codebooks,
    rank_subset,
    to_digits,
    unrank_subset,
)
from hdrelay.counting import BudgetVector
from hdrelay.counting import counting_rate as budget_counting_rate
from hdrelay.errors import CodeConstructionError, DecodeError, EnumerationLimitError
from hdrelay.model import Word


# -- single relay code -------------------------------------------------------

def test_small_single_relay_code():
    source, relay = build_single_relay_code(4, 1, 2)
    assert len(relay.entries) == 8
    assert source.n == relay.n == 4
    code = SingleRelayCode(4, 1, 2)
    assert code.size == 8
    assert code.sum_rate == approx(0.75)
    assert code.radix == 2


def test_single_relay_words():
    code = SingleRelayCode(4, 1, 2)
    assert code.source_word(1, code.warmup_pattern).to_text() == "001N"
    assert code.relay_word(1).to_text() == "1NNN"
    assert code.source_word(2, code.relay_pattern(1)).to_text() == "N010"
    assert code.relay_word(2).to_text() == "N0NN"
    assert code.relay_word(4).to_text() == "NN0N"
    assert code.source_word(7, code.relay_pattern(4)).to_text() == "11N1"


@pytest.mark.parametrize("n, n1, q", [(4, 1, 2), (3, 1, 1), (5, 2, 2), (6, 2, 1), (5, 2, 3)])
def test_source_stays_quiet_while_relay_transmits(n, n1, q):
    code = SingleRelayCode(n, n1, q)
    for w in range(code.size):
        relay = code.relay_word(w)
        assert relay.weight == n1
        assert code.relay_index(relay) == w
        source = code.source_word(w, relay.transmit_slots)
        assert not set(source.transmit_slots) & set(relay.transmit_slots)


def test_relay_rejects_words_with_wrong_weight():
    code = SingleRelayCode(4, 1, 2)
    with pytest.raises(DecodeError):
        code.relay_index(Word.from_text("10NN", 2))


def test_invalid_parameters():
    with pytest.raises(CodeConstructionError):
        SingleRelayCode(4, 0, 2)
    with pytest.raises(CodeConstructionError):
        SingleRelayCode(4, 4, 2)
    with pytest.raises(CodeConstructionError):
        SingleRelayCode(4, 1, 2).relay_word(8)


def test_counting_rate():
    assert counting_rate(4, 1, 2) == approx(0.75)
    assert counting_rate(1024, 288, 2) >= 1.10
    assert counting_rate(1024, 288, 2) == approx(budget_counting_rate(BudgetVector(n=1024, budgets=(288,)), 2))


@pytest.mark.parametrize("q", [1, 2, 3])
def test_counting_rate_stays_below_capacity(q):
    cap = capacity_single_relay(q).value
    for n in range(2, 10):
        for n1 in range(1, n):
            assert counting_rate(n, n1, q) <= cap + 1e-12
    assert cap == approx(solve_capacity(2, q).value, abs=1e-6)


def test_single_relay_codebooks():
    source, relay = SingleRelayCode(4, 1, 2).codebooks()
    assert source.node == 0 and relay.node == 1
    assert len(source.contexts) == 4
    assert len(source.entries) == 32
    assert relay.lookup(1).word == "1NNN"
    assert relay.lookup(1).colors == ("TNNN",)
    with pytest.raises(EnumerationLimitError):
        build_single_relay_code(40, 10, 2)


# -- subsets and digits ------------------------------------------------------

def test_subsets_are_ranked_lexicographically():
    subsets = [unrank_subset(r, 6, 3) for r in range(20)]
    assert subsets == list(itertools.combinations(range(6), 3))
    assert [rank_subset(s, 6) for s in subsets] == list(range(20))
    with pytest.raises(CodeConstructionError):
        unrank_subset(20, 6, 3)


def test_digits():
    assert to_digits(5, 2, 4) == [0, 1, 0, 1]
    with pytest.raises(CodeConstructionError):
        to_digits(9, 2, 3)


# -- four-node two-source code ----------------------------------------------

def test_two_source_node2_words():
    code = TwoSourceCode()
    assert code.node2_word(0, 3).to_text() == "N1N1"
    assert code.node2_word(2, 1).to_text() == "N01N"
    assert code.sum_rate == approx(1.0)
    with pytest.raises(CodeConstructionError):
        code.node2_word(0, 4)


def test_two_source_codebooks():
    c0, c1, c2 = build_table2_code()
    assert [e.word for e in c2.entries] == [t for t, _ in NODE2_PATTERNS.values()]
    assert [e.colors for e in c2.entries] == [("a",), ("b",), ("c",), ("d",)]

    def column(cb, ctx):
        return [cb.lookup(w, ctx).word for w in range(4)]

    assert column(c0, "e") == ["N0NN", "N1NN", "NN0N", "NN1N"]
    assert column(c0, "f") == ["0NNN", "1NNN", "NN0N", "NN1N"]
    assert column(c0, "g") == ["0NNN", "1NNN", "N0NN", "N1NN"]
    assert column(c1, "a") == ["0NNN", "1NNN", "NN0N", "NN1N"]
    assert column(c1, "b") == ["N0NN", "N1NN", "NNN0", "NNN1"]
    assert column(c1, "c") == ["0NNN", "1NNN", "NNN0", "NNN1"]
    assert column(c1, "d") == ["N0NN", "N1NN", "NN0N", "NN1N"]
    assert [c1.lookup(w, "a").colors for w in range(4)] == [("a", "e"), ("a", "e"), ("a", "g"), ("a", "g")]
    assert [c1.lookup(w, "b").colors for w in range(4)] == [("b", "f"), ("b", "f"), ("b", "g"), ("b", "g")]
    templates = {r: t for t, r in NODE2_PATTERNS.values()}
    for e in c1.entries:
        busy = {i for i, c in enumerate(templates[e.context]) if c == "B"}
        assert not busy & {i for i, c in enumerate(e.word) if c != "N"}


def test_format_codebooks():
    text = format_codebooks(TwoSourceCode().codebooks())
    assert "C_1" in text
    assert "NN0N (a,g)" in text
    assert text.splitlines()[0] == "C_0"


def test_codebook_must_be_injective_per_context():
    with pytest.raises(CodeConstructionError):
        Codebook(node=0, entries=(CodebookEntry(0, "0N"), CodebookEntry(1, "0N")))
    with pytest.raises(CodeConstructionError):
        Codebook(node=0, entries=(CodebookEntry(0, "0N"), CodebookEntry(1, "0NN")))
    with pytest.raises(CodeConstructionError):
        Codebook(node=0, entries=(CodebookEntry(0, "0N", context="x"),))
