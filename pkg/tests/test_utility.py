import math

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from socialcapital.harness.presets import PARTIAL, SQRT, homophilic, partial, tolerant
from socialcapital.utility import (
    AggregationCurve,
    ConfigError,
    SocietyConfig,
    TypeProfile,
    compute_L_star,
    compute_Lbar_star,
    cost_for_gregariousness,
    eval_v,
    exogenous_homophily_index,
    link_decision,
    marginal_link_utility,
    reachable_counts,
)


def brute_argmax(profile, alpha, offset, upto=4000):
    # smallest maximiser of v(x alpha + offset) - c x by enumeration
    vals = [profile.v(x * alpha + offset) - profile.link_cost * x for x in range(upto)]
    best = max(vals)
    return next(x for x, v in enumerate(vals) if v == best)


def test_eval_v_families():
    assert eval_v(AggregationCurve("sqrt", 2.0), 4.0) == 4.0
    assert eval_v(AggregationCurve("log", 1.0), math.e - 1) == pytest.approx(1.0)
    with pytest.raises(ValueError):
        eval_v(SQRT, -1.0)


def test_marginal_utility_by_hand():
    p = TypeProfile(1.0, 0.5, 0.3, SQRT)
    # sqrt(1 + 0.5) - sqrt(1) - 0.3
    assert marginal_link_utility(p, 1, 0, False) == pytest.approx(math.sqrt(1.5) - 1.3)
    assert marginal_link_utility(p, 0, 0, True) == pytest.approx(0.7)


def test_link_rule_is_strict():
    # cost equal to the first marginal gain: indifference must not link
    p = TypeProfile(1.0, 0.0, 1.0, SQRT)
    assert marginal_link_utility(p, 0, 0, True) == 0.0
    assert not link_decision(p, 0, 0, True)
    assert compute_L_star(p) == 0


def test_partial_calibration_table():
    # sqrt curve, cost 0.222, alpha_diff 0.775: gains 1, .414, .318, .268, .236 > .222 > .213
    p = partial("1/3", 0.5, 1.0)
    assert compute_L_star(p) == 5
    assert compute_Lbar_star(p) == 4
    # on top of 4 * 0.775 = 3.1 only two same-type links still pay
    assert compute_L_star(p, 3.1) == 2
    assert exogenous_homophily_index(p) == pytest.approx(1 / 3)
    for key, (_, _, L, Lbar) in PARTIAL.items():
        q = partial(key, 0.0, 1.0)
        num, den = map(int, key.split("/"))
        assert exogenous_homophily_index(q) == pytest.approx(num / den)
        assert (compute_L_star(q), compute_Lbar_star(q)) == (L, Lbar)


def test_extreme_homophily_indices():
    assert exogenous_homophily_index(homophilic(4, 0, 1)) == 1.0
    assert exogenous_homophily_index(tolerant(4, 0, 1)) == 0.0


@pytest.mark.parametrize("L", [0, 1, 2, 5, 8, 20])
@pytest.mark.parametrize("family", ["sqrt", "log"])
def test_cost_for_gregariousness_hits_target(L, family):
    curve = AggregationCurve(family, 1.0)
    c = cost_for_gregariousness(curve, 1.0, L)
    assert compute_L_star(TypeProfile(1.0, 0.0, c, curve)) == L


def test_profile_validation_lists_every_error():
    with pytest.raises(ConfigError) as exc:
        TypeProfile(1.0, 2.0, -1.0, SQRT, 1.5, 2.0)
    fields = " ".join(exc.value.errors)
    for f in ("alpha_diff", "link_cost", "opportunism", "pop_share"):
        assert f"profile.{f}" in fields


def test_society_validation():
    with pytest.raises(ConfigError, match="pop_share"):
        SocietyConfig((homophilic(3, 0, 0.5), homophilic(3, 0, 0.4)))
    with pytest.raises(ConfigError, match="horizon"):
        SocietyConfig((homophilic(3, 0, 1.0),), horizon=1)


def test_reachable_counts_tolerant():
    # with equal benefits the order of link kinds is irrelevant
    p = tolerant(3, 0, 1)
    assert reachable_counts(p) == {(a, b) for a in range(4) for b in range(4) if a + b <= 3}


profiles = st.builds(
    lambda a_s, ratio, c, fam, scale: TypeProfile(a_s, a_s * ratio, c, AggregationCurve(fam, scale)),
    st.floats(0.2, 3.0),
    st.floats(0.0, 1.0),
    st.floats(0.05, 1.0),
    st.sampled_from(["sqrt", "log"]),
    st.floats(0.5, 3.0),
)


@settings(max_examples=150, deadline=None)
@given(profiles, st.floats(0.0, 5.0))
def test_L_star_is_smallest_argmax(p, offset):
    assert compute_L_star(p, offset) == brute_argmax(p, p.alpha_same, offset)
    assert compute_Lbar_star(p, offset) == brute_argmax(p, p.alpha_diff, offset)


@settings(max_examples=150, deadline=None)
@given(profiles, st.floats(0.0, 3.0), st.floats(0.0, 3.0))
def test_L_star_nonincreasing_in_offset(p, a, b):
    lo, hi = sorted((a, b))
    assert compute_L_star(p, hi) <= compute_L_star(p, lo)


@settings(max_examples=150, deadline=None)
@given(profiles)
def test_homophily_in_unit_interval_and_lbar_bounded(p):
    h = exogenous_homophily_index(p)
    assert 0.0 <= h <= 1.0
    assert compute_Lbar_star(p) <= compute_L_star(p)


@settings(max_examples=100, deadline=None)
@given(profiles, st.integers(0, 6), st.integers(0, 6))
def test_marginal_utility_concave_in_links(p, ns, nd):
    # diminishing returns: a further same-type link is worth no more
    assert marginal_link_utility(p, ns + 1, nd, True) <= marginal_link_utility(p, ns, nd, True) + 1e-12
