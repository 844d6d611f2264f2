"""Acceptance gate.

Every test carries an ``acceptance`` marker; conftest.py folds the outcomes
into one PASS/FAIL line per criterion at the end of the run.
"""

import io
import time

import numpy as np
import pytest

from gmudgame.channel import run_stream
from gmudgame.config import preset_config
from gmudgame.experiment import emit_results, run_sweep
from gmudgame.game import STRICT_TOL, core
from gmudgame.partition import Coalition, CoalitionStructure, enumerate_structures
from gmudgame.payoff import (ReceivedPowers, SystemParams, payoffs_for_structure,
                             sinr_decorrelator, sinr_matched_filter)

from oracles import bell_numbers, naive_core

# "notable" cooperation gain over non-cooperation above this SNR
NOTABLE_GAIN = 0.10
NOTABLE_FROM_DB = -20.0
FIG5_OTHERS = ("12|3|4", "12|34", "1|2|3|4")


CRITERIA = {
    1: "Bell counts 5 and 15, recurrence for n=1..8, < 1 s",
    2: "singleton decorrelator equals matched filter (1e4 draws, 1e-12 rel)",
    3: "core solver equals naive oracle for M<=4 (100 draws each)",
    4: "fig1: grand coalition max total, weakly improves everyone, unique core",
    5: "fig2: nothing below non-cooperation; grand gain > 10% above -20 dB; < 10 s",
    6: "fig4: gain at mu=6 below 5% of gain at mu=2, maximal at smallest mu",
    7: "fig5: 1234 best; 12|3|4 vs 12|34 within 2%; near users gain more at 20 dB",
    8: "permutation, common scale, CSV determinism, finite-difference monotonicity",
}


def c(number):
    return pytest.mark.acceptance(number, CRITERIA[number])


def sweep_of(name):
    cfg = preset_config(name)
    return run_sweep(cfg.scenario, cfg.sweep, cfg.structures)


def as_sets(structures):
    return {frozenset(frozenset(b.members) for b in s.blocks) for s in structures}


# 1. Bell counts

@c(1)
def test_bell_counts():
    start = time.perf_counter()
    assert len(enumerate_structures(3)) == 5
    assert len(enumerate_structures(4)) == 15
    bell = bell_numbers(8)
    for n in range(1, 9):
        structures = enumerate_structures(n)
        assert len(structures) == bell[n]
        assert len(set(structures)) == bell[n]
    assert time.perf_counter() - start < 1.0


# 2. singleton decorrelator equals matched filter

@c(2)
def test_singleton_reduction():
    rng = np.random.default_rng(20260)
    worst = 0.0
    for _ in range(10_000):
        n = int(rng.integers(1, 9))
        rho = float(rng.uniform(0.0, 0.95))
        noise = float(100.0 - rng.uniform(0.0, 100.0))  # (0, 100]
        known = tuple(100.0 - rng.uniform(0.0, 100.0, n))
        unknown = float(100.0 - rng.uniform(0.0, 100.0)) if rng.random() < 0.5 else 0.0
        params = SystemParams(rho=rho, noise_var=noise)
        powers = ReceivedPowers(known, unknown)
        i = int(rng.integers(n))
        a = sinr_decorrelator(params, powers, Coalition((i,)), i)
        b = sinr_matched_filter(params, powers, i)
        worst = max(worst, abs(a - b) / abs(b))
    assert worst <= 1e-12


# 3. core solver against the naive oracle

@c(3)
@pytest.mark.parametrize("m", [1, 2, 3, 4])
def test_core_matches_oracle(m):
    rng = np.random.default_rng(300 + m)
    nonempty = 0
    for _ in range(100):
        rho = float(rng.uniform(0.0, 0.95))
        noise = float(10 ** rng.uniform(-2, 2))
        known = tuple(float(x) for x in 10 ** rng.uniform(-3, 3, m))
        unknown = float(10 ** rng.uniform(-2, 2)) if rng.random() < 0.5 else 0.0
        report = core(SystemParams(rho=rho, noise_var=noise), ReceivedPowers(known, unknown))
        expected = naive_core(rho, noise, known, unknown)
        assert as_sets(report.core_members) == expected
        nonempty += bool(expected)
    assert nonempty > 0


# 4. fig1 preset

@c(4)
def test_fig1_claims():
    cfg = preset_config("fig1")
    scenario = cfg.scenario
    assert scenario.fading.sigma_s_db == 0.0 and cfg.snr_db == 27.0
    powers = scenario.received_powers(run_stream(scenario.seed, 0))["BS1"]
    report = core(scenario.system, powers)
    grand = report.evaluation(CoalitionStructure.grand(3))
    for ev in report.evaluations:
        if ev.structure != grand.structure:
            assert grand.group_total > ev.group_total * (1 + STRICT_TOL)
    alone = report.evaluation(CoalitionStructure.singletons(3))
    assert all(g >= a for g, a in zip(grand.payoffs, alone.payoffs))
    assert [s.label() for s in report.core_members] == ["123"]

    # the sweep pipeline reaches the same verdict
    st = sweep_of("fig1").station("BS1")
    k = st.structure_index("123")
    assert st.in_core[0, 0].tolist() == [j == k for j in range(len(st.structures))]


# 5. fig2 SNR sweep

@c(5)
def test_fig2_claims():
    start = time.perf_counter()
    result = sweep_of("fig2")
    elapsed = time.perf_counter() - start
    st = result.station("BS1")
    snr = np.array(result.spec.values)
    assert snr[0] == -40.0 and snr[-1] == 40.0

    totals = st.group_totals()
    base = st.noncoop_totals()
    assert np.all(totals >= base[:, None])

    rg = st.relative_gain()[:, st.structure_index("123")]
    assert np.all(rg[snr > NOTABLE_FROM_DB] > NOTABLE_GAIN)
    assert elapsed < 10.0


# 6. fig4 path-loss sweep

@c(6)
def test_fig4_claims():
    result = sweep_of("fig4")
    st = result.station("BS1")
    mu = list(result.spec.values)
    rg = st.relative_gain()[:, st.structure_index("123")]
    assert rg[mu.index(6.0)] < 0.05 * rg[mu.index(2.0)]
    assert int(np.argmax(rg)) == int(np.argmin(mu))


# 7. fig5 two base stations

@pytest.fixture(scope="module")
def fig5():
    return sweep_of("fig5")


@c(7)
@pytest.mark.parametrize("station", ["BS1", "BS2"])
def test_fig5_grand_is_best(fig5, station):
    st = fig5.station(station)
    grand = st.curve("1234")
    for label in FIG5_OTHERS:
        assert np.all(grand > st.curve(label))


@c(7)
@pytest.mark.parametrize("station", ["BS1", "BS2"])
def test_fig5_pair_structures_overlap(fig5, station):
    st = fig5.station(station)
    a, b = st.curve("12|3|4"), st.curve("12|34")
    assert np.all(np.abs(a - b) / b < 0.02)


@c(7)
@pytest.mark.parametrize("station", ["BS1", "BS2"])
def test_fig5_near_users_gain_more(fig5, station):
    st = fig5.station(station)
    p = list(fig5.spec.values).index(20.0)
    means = st.mean_payoffs()[p]
    gain = means[st.structure_index("1234")] - means[st.structure_index("1|2|3|4")]
    near, far = gain[:2], gain[2:]
    assert near.min() > far.max()


# 8. invariance suite

@c(8)
@pytest.mark.parametrize("m", [2, 3, 4])
def test_permutation_equivariance(m):
    rng = np.random.default_rng(800 + m)
    structures = enumerate_structures(m)
    for _ in range(25):
        params = SystemParams(rho=float(rng.uniform(0, 0.9)), noise_var=float(rng.uniform(0.1, 5)))
        known = tuple(float(x) for x in 10 ** rng.uniform(-2, 3, m))
        unknown = float(rng.uniform(0, 10))
        perm = rng.permutation(m)  # new user j is old user perm[j]
        inv = np.argsort(perm)
        permuted = ReceivedPowers(tuple(known[i] for i in perm), unknown)
        original = ReceivedPowers(known, unknown)

        def relabel(s):
            return CoalitionStructure.from_blocks([[int(inv[i]) for i in b.members] for b in s.blocks])

        for s in structures:
            a = payoffs_for_structure(params, original, s)
            b = payoffs_for_structure(params, permuted, relabel(s))
            np.testing.assert_allclose([b[int(inv[i])] for i in range(m)], a.sinr, rtol=1e-12)
        got = {relabel(s) for s in core(params, original).core_members}
        assert got == set(core(params, permuted).core_members)


@c(8)
@pytest.mark.parametrize("scale", [1e-6, 0.37, 3.0, 1e5])
def test_common_scale_invariance(scale):
    rng = np.random.default_rng(int(scale * 1000) % 997)
    for _ in range(20):
        m = int(rng.integers(1, 5))
        rho = float(rng.uniform(0, 0.9))
        noise = float(rng.uniform(0.1, 5))
        powers = ReceivedPowers(tuple(10 ** rng.uniform(-2, 3, m)), float(rng.uniform(0, 10)))
        a_params = SystemParams(rho=rho, noise_var=noise)
        b_params = SystemParams(rho=rho, noise_var=noise * scale)
        for s in enumerate_structures(m):
            a = payoffs_for_structure(a_params, powers, s)
            b = payoffs_for_structure(b_params, powers.scaled(scale), s)
            np.testing.assert_allclose(b.sinr, a.sinr, rtol=1e-12)


@c(8)
@pytest.mark.parametrize("name", ["fig3", "fig5"])
def test_csv_determinism(name):
    outputs = []
    for _ in range(2):
        buf = io.StringIO()
        emit_results(sweep_of(name), buf, presentation_offset=True)
        outputs.append(buf.getvalue().encode())
    assert outputs[0] == outputs[1]


@c(8)
def test_finite_difference_monotonicity():
    rng = np.random.default_rng(88)
    for _ in range(300):
        m = int(rng.integers(2, 6))
        rho = float(rng.uniform(0.05, 0.9))
        noise = float(rng.uniform(0.1, 5))
        known = list(10 ** rng.uniform(-2, 3, m))
        unknown = float(rng.uniform(0.1, 10))
        params = SystemParams(rho=rho, noise_var=noise)
        size = int(rng.integers(1, m))
        coalition = Coalition(tuple(sorted(rng.choice(m, size, replace=False).tolist())))
        user = coalition.members[0]
        outsider = next(j for j in range(m) if j not in coalition)
        base = sinr_decorrelator(params, ReceivedPowers(tuple(known), unknown), coalition, user)
        h = 1e-3

        up_own = list(known)
        up_own[user] *= 1 + h
        assert sinr_decorrelator(params, ReceivedPowers(tuple(up_own), unknown),
                                 coalition, user) > base
        up_out = list(known)
        up_out[outsider] *= 1 + h
        assert sinr_decorrelator(params, ReceivedPowers(tuple(up_out), unknown),
                                 coalition, user) < base
        assert sinr_decorrelator(params, ReceivedPowers(tuple(known), unknown * (1 + h)),
                                 coalition, user) < base
        louder = SystemParams(rho=rho, noise_var=noise * (1 + h))
        assert sinr_decorrelator(louder, ReceivedPowers(tuple(known), unknown),
                                 coalition, user) < base
