import itertools
import math

import pytest
from pytest import approx

from hdrelay.capacity import ListenProfile, capacity_single_relay, solve_capacity
from hdrelay.counting import (
    BudgetVector,
    MessageSetSizes,
    asymptotic_rate_bounds,
    binom_entropy_limit,
    counting_rate,
    max_w0,
    max_w_relay,
    message_set_sizes,
    optimal_budgets,
    optimal_finite_rate,
    sequences_available,
)
from hdrelay.errors import BudgetError
from hdrelay.model import CascadeSpec


def _count_words(n, weight, q, forbidden=()):
    """Brute force: length-n words with `weight` transmissions, quiet in `forbidden` slots."""
    total = 0
    for slots in itertools.combinations(range(n), weight):
        if set(slots) & set(forbidden):
            continue
        total += q ** weight
    return total


def test_sequences_available_examples():
    bv = BudgetVector(n=4, budgets=(1, 2))
    assert sequences_available(2, bv, 2) == 24
    assert sequences_available(1, bv, 2) == 4
    assert sequences_available(1, BudgetVector(n=5, budgets=(0,)), 2) == 1


def test_sequences_available_matches_enumeration():
    assert sequences_available(2, BudgetVector(n=4, budgets=(1, 2)), 2) == _count_words(4, 2, 2)
    # relay 1 must stay quiet in the two slots relay 2 transmits in
    assert sequences_available(1, BudgetVector(n=4, budgets=(1, 2)), 2) == _count_words(4, 1, 2, forbidden=(0, 1))


def test_max_w0_examples():
    assert max_w0(BudgetVector(n=4, budgets=(1, 2)), 2) == 4
    assert max_w0(BudgetVector(n=3), 2) == 27
    assert max_w0(BudgetVector(n=4, budgets=(1,)), 2) == 8


def test_relay_source_sizes():
    bv = BudgetVector(n=4, budgets=(1, 2))
    assert max_w_relay(2, MessageSetSizes((4,)), bv, 2) == 4
    # no upstream traffic: the relay may use its slot pattern too
    assert max_w_relay(1, MessageSetSizes((1,)), BudgetVector(n=6, budgets=(2,)), 2) == 60
    sizes = message_set_sizes(CascadeSpec(m=3, q=2, sources=(0, 2)), bv)
    assert sizes.sizes == (4, 4)
    assert sizes.rates(4) == approx((0.5, 0.5))


def test_message_set_sizes_checks_length():
    with pytest.raises(BudgetError):
        message_set_sizes(CascadeSpec(m=2, q=2), BudgetVector(n=4, budgets=(1, 2)))


def test_budget_vector_validation():
    with pytest.raises(BudgetError):
        BudgetVector(n=4, budgets=(4,))
    with pytest.raises(BudgetError):
        BudgetVector(n=4, budgets=(3, 2))
    with pytest.raises(BudgetError):
        BudgetVector(n=0)
    assert BudgetVector(n=4, budgets=(1, 2)).budget(3) == 0


def test_binom_entropy_limit():
    assert binom_entropy_limit(4, 1) == approx(0.5)
    assert binom_entropy_limit(10, 0) == 0.0
    assert binom_entropy_limit(1024, 512) == approx(1.0, abs=0.01)
    with pytest.raises(ValueError):
        binom_entropy_limit(4, 5)


# -- asymptotic bounds -------------------------------------------------------

def test_asymptotic_bound_at_single_relay_optimum():
    bounds = asymptotic_rate_bounds(ListenProfile.from_relays((0.7185,), 2))
    assert bounds.sum_bounds[0] == approx(1.1389, abs=1e-3)
    assert bounds.caps == (None,)


def test_always_listening_relay_carries_nothing():
    bounds = asymptotic_rate_bounds(ListenProfile.from_relays((1.0,), 2))
    assert bounds.sum_bounds[0] == 0.0


@pytest.mark.parametrize("q", [1, 2, 3])
def test_bounds_follow_hop_entropies(q):
    for p1 in (0.4, 0.6, 0.8):
        for p2 in (0.6, 0.75, 1.0):
            if p1 + p2 < 1.0:
                continue
            profile = ListenProfile.from_relays((p1, p2), q)
            bounds = asymptotic_rate_bounds(profile, sources=(0, 2))
            hops = profile.hop_entropies()
            assert bounds.sum_bounds[0] == approx(min(hops))
            assert bounds.sum_bounds[1] == approx(hops[2])
            assert bounds.caps[1] == approx((1.0 - p2) * math.log2(q))


# -- finite-n rates ----------------------------------------------------------

def test_counting_rate_never_exceeds_capacity():
    cap = capacity_single_relay(2).value
    for n in range(2, 13):
        for n1 in range(1, n):
            assert counting_rate(BudgetVector(n=n, budgets=(n1,)), 2) <= cap + 1e-12


def test_counting_rate_at_large_block_length():
    n = 4096
    n1 = round((1.0 - 0.7185) * n)
    rate = counting_rate(BudgetVector(n=n, budgets=(n1,)), 2)
    assert 1.12 <= rate <= 1.1389
    assert rate == approx(1.1389, abs=0.01)


def test_optimal_rate_grows_under_doubling():
    rates = [optimal_finite_rate(2, n, 2) for n in (4, 8, 16, 32, 64)]
    assert all(b >= a - 1e-12 for a, b in zip(rates, rates[1:]))
    assert rates[-1] <= capacity_single_relay(2).value


def test_optimal_budgets_is_the_best_vector():
    bv, size = optimal_budgets(3, 6, 2)
    assert size == max_w0(bv, 2)
    for combo in itertools.product(range(6), repeat=2):
        if combo[0] + combo[1] > 6:
            continue
        assert max_w0(BudgetVector(n=6, budgets=combo), 2) <= size


def test_optimal_budgets_rounds_when_the_search_is_too_large():
    bv, size = optimal_budgets(3, 64, 2, exhaustive_cap=10)
    assert bv.m == 3
    assert size == max_w0(bv, 2)
    assert math.log2(size) / 64 <= solve_capacity(3, 2).value


def test_optimal_budgets_direct_link():
    bv, size = optimal_budgets(1, 5, 2)
    assert bv.budgets == ()
    assert size == 3 ** 5
