import numpy as np
import pytest
from pytest import approx

from hdrelay.capacity import ListenProfile, pair_pmf, solve_capacity
from hdrelay.counting import asymptotic_rate_bounds
from hdrelay.cutset import StructuredJoint, cut_entropy, cutset_min_entropy
from hdrelay.errors import EnumerationLimitError, InvalidSpecError


@pytest.mark.parametrize("m", [2, 3, 4])
@pytest.mark.parametrize("q", [1, 2])
def test_cutset_minimum_matches_solver(m, q):
    result = solve_capacity(m, q)
    joint = StructuredJoint.from_profile(result.profile)
    cutset = cutset_min_entropy(joint)
    assert cutset.value == approx(result.value, abs=1e-6)
    assert cutset.dominated


@pytest.mark.parametrize("relays", [(0.6, 0.7), (0.8, 0.5), (0.5, 0.5), (1.0, 0.3)])
def test_chain_cuts_are_the_hop_entropies(relays):
    profile = ListenProfile.from_relays(relays, 2)
    joint = StructuredJoint.from_profile(profile)
    cutset = cutset_min_entropy(joint)
    hops = profile.hop_entropies()
    m = profile.m
    for i in range(1, m + 1):
        assert cutset.chain_value(i, m) == approx(hops[i - 1], abs=1e-9)
    assert cutset.dominated
    assert cutset.value == approx(min(hops), abs=1e-9)


def test_joint_reproduces_pair_pmfs():
    profile = solve_capacity(4, 2).profile
    for coupling in ("markov", "northwest"):
        joint = StructuredJoint.from_profile(profile, coupling=coupling)
        assert sum(joint.support.values()) == approx(1.0)
        for i in range(1, profile.m + 1):
            assert np.allclose(joint.pair_marginal(i), pair_pmf(profile, i).matrix, atol=1e-9)


def test_coupling_only_matters_on_longer_cuts():
    profile = solve_capacity(3, 2).profile
    markov = cutset_min_entropy(StructuredJoint.from_profile(profile, "markov"))
    northwest = cutset_min_entropy(StructuredJoint.from_profile(profile, "northwest"))
    assert markov.cut_values[()] == approx(northwest.cut_values[()], abs=1e-12)
    assert markov.cut_values[(2,)] == approx(northwest.cut_values[(2,)], abs=1e-12)
    assert markov.value >= northwest.value - 1e-9


def test_relay_source_cuts_start_downstream():
    profile = ListenProfile.from_relays((0.6, 0.7), 2)
    joint = StructuredJoint.from_profile(profile)
    cutset = cutset_min_entropy(joint, v=1)
    assert set(cutset.cut_values) == {(), (2,)}
    expected = asymptotic_rate_bounds(profile, sources=(0, 1)).sum_bounds[1]
    assert cutset.value == approx(expected, abs=1e-9)


def test_empty_cut_is_last_relay_entropy():
    profile = ListenProfile.from_relays((0.7,), 2)
    joint = StructuredJoint.from_profile(profile)
    assert cut_entropy(joint, ()) == approx(profile.hop_entropies()[-1], abs=1e-12)


def test_degenerate_always_listening_relay():
    profile = ListenProfile.from_relays((1.0,), 2)
    cutset = cutset_min_entropy(StructuredJoint.from_profile(profile))
    assert cutset.cut_values[()] == approx(0.0)
    assert cutset.cut_values[(1,)] == approx(np.log2(3))
    assert cutset.value == approx(0.0)
    assert cutset.cut == ()


def test_limits_and_bad_arguments():
    with pytest.raises(EnumerationLimitError):
        StructuredJoint.from_profile(ListenProfile(p=(1.0,) * 13, q=1))
    profile = ListenProfile.from_relays((0.7,), 2)
    with pytest.raises(ValueError):
        StructuredJoint.from_profile(profile, coupling="random")
    with pytest.raises(InvalidSpecError):
        cutset_min_entropy(StructuredJoint.from_profile(profile), v=2)
