from dataclasses import replace

import numpy as np
import pytest
from scipy.stats import chisquare

from fountain_exponents import prf
from fountain_exponents.channel import Channel, InputDistribution, make_bsc
from fountain_exponents.codec import (CodebookSeed, ConcatConfig, Schedule, apply_schedule, concat_roundtrip,
                                      decode_all_inner, gmd_decode, gmd_score, inner_ml_decode, inner_symbol,
                                      random_fountain_sim, random_message, rate_compatible_decode,
                                      rate_compatible_encode, rate_compatible_trial, received_needed, run_trial,
                                      stream_length_for, transmit_stream)
from fountain_exponents.outer import OuterCodeSpec, outer_encode

BSC = make_bsc(0.1)
CLEAN = Channel([[1.0, 0.0], [0.0, 1.0]])
SMALL = OuterCodeSpec(15, 11, 4)


def small_cfg(ch=BSC, **kw):
    return ConcatConfig(SMALL, kw.pop("n_i", 11), ch, seed=CodebookSeed(kw.pop("seed", 3)), **kw)


# ---------------------------------------------------------------- PRF

def test_prf_is_deterministic_and_tag_separated():
    a = prf.hash64(7, prf.TAG_NOISE, np.arange(5))
    np.testing.assert_array_equal(a, prf.hash64(7, prf.TAG_NOISE, np.arange(5)))
    assert not np.any(a == prf.hash64(7, prf.TAG_THIN, np.arange(5)))
    assert not np.any(a == prf.hash64(8, prf.TAG_NOISE, np.arange(5)))
    assert prf.derive_seed(1, 2, 3) == prf.derive_seed(1, 2, 3) != prf.derive_seed(1, 2, 4)


def test_prf_uniform_range_and_decorrelation():
    u = prf.uniform(42, prf.TAG_NOISE, np.arange(200_000))
    assert 0.0 <= u.min() and u.max() < 1.0
    assert chisquare(np.histogram(u, bins=50, range=(0, 1))[0]).pvalue > 1e-3
    v = prf.uniform(42, prf.TAG_THIN, np.arange(200_000))
    assert abs(np.corrcoef(u, v)[0, 1]) < 0.01
    assert abs(np.corrcoef(u[:-1], u[1:])[0, 1]) < 0.01


def test_codebook_symbols_follow_input_distribution():
    px = InputDistribution([0.7, 0.3])
    seed = CodebookSeed(9)
    x = seed.symbols(px.cdf, 3, 5, np.arange(1, 100_001))
    counts = np.bincount(x, minlength=2)
    assert chisquare(counts, 1e5 * px.probs).pvalue > 1e-3
    assert abs(counts[1] - 3e4) < 3 * np.sqrt(1e5 * 0.21)


def test_inner_symbol_matches_stream():
    cfg = small_cfg()
    cw = outer_encode(SMALL, list(range(11)))
    s = transmit_stream(cfg, cw, 300)
    for l in (0, 17, 299):
        assert s.symbol[l] == inner_symbol(cfg.seed, int(s.code[l]), cw[s.code[l]], int(s.occurrence[l]), cfg.px)
    with pytest.raises(ValueError):
        inner_symbol(cfg.seed, 0, 0, 0, cfg.px)


def test_transmit_stream_occurrences_count_up_per_code():
    cfg = small_cfg()
    s = transmit_stream(cfg, [0] * 15, 500)
    for k in range(15):
        np.testing.assert_array_equal(s.occurrence[s.code == k], np.arange(1, np.sum(s.code == k) + 1))
    # a longer stream extends, never rewrites, a shorter one
    t = transmit_stream(cfg, [0] * 15, 800)
    np.testing.assert_array_equal(t.symbol[:500], s.symbol)


def test_digest_matches_for_shared_seed():
    cfg = small_cfg()
    assert CodebookSeed(3).digest(cfg.cdf, 15) == cfg.seed.digest(cfg.cdf, 15)
    assert CodebookSeed(4).digest(cfg.cdf, 15) != cfg.seed.digest(cfg.cdf, 15)


# ---------------------------------------------------------------- configuration

def test_config_rate_and_defaults():
    cfg = ConcatConfig(OuterCodeSpec(64, 51), 24, BSC)
    assert cfg.rate == pytest.approx(0.5001 * 0.3680642, rel=1e-3)
    assert cfg.nominal_n == 1536
    assert cfg.weight_scale > 0


def test_config_validation():
    with pytest.raises(ValueError, match="not below capacity"):
        ConcatConfig(OuterCodeSpec(64, 51), 10, BSC)
    with pytest.raises(ValueError, match="tractability"):
        ConcatConfig(OuterCodeSpec(64, 51), 100, BSC, levels=3)
    with pytest.raises(ValueError):
        small_cfg(weight_scale=-1.0)
    with pytest.raises(ValueError):
        small_cfg(z_cap=0.0)


def test_schedule_validation():
    with pytest.raises(ValueError, match="unknown schedule"):
        Schedule("burst", 10)
    with pytest.raises(ValueError):
        Schedule.iid_thinning(10, 0.0)
    with pytest.raises(ValueError):
        Schedule.per_code_starve(10, 1.0)
    assert Schedule.prefix(5).with_total(9).received_total == 9


# ---------------------------------------------------------------- erasure device

def test_prefix_schedule_counts_sum_to_n():
    cfg = small_cfg()
    s = transmit_stream(cfg, [1] * 15, 165)
    rx = apply_schedule(s, Schedule.prefix(165), cfg, 0)
    assert rx.counts.sum() == 165 and rx.z.sum() == pytest.approx(15)
    np.testing.assert_array_equal(rx.code, np.sort(rx.code))


def test_clean_channel_outputs_equal_inputs():
    cfg = small_cfg(CLEAN)
    s = transmit_stream(cfg, [1] * 15, 200)
    rx = apply_schedule(s, Schedule.prefix(200), cfg, 5)
    order = np.lexsort((s.occurrence, s.code))
    np.testing.assert_array_equal(rx.output, s.symbol[order])


def test_bsc_noise_rate():
    cfg = small_cfg()
    s = transmit_stream(cfg, [0] * 15, 40_000)
    rx = apply_schedule(s, Schedule.prefix(40_000), replace(cfg, z_cap=1e6), 1)
    order = np.lexsort((s.occurrence, s.code))
    flips = np.mean(rx.output != s.symbol[order])
    assert abs(flips - 0.1) < 3 * np.sqrt(0.09 / 40_000)


def test_iid_thinning_keeps_binomial_fraction():
    cfg = small_cfg()
    sched = Schedule.iid_thinning(2000, 0.3)
    length = stream_length_for(sched)
    s = transmit_stream(cfg, [0] * 15, length)
    mask = prf.uniform(7, prf.TAG_THIN, np.arange(length)) < 0.3
    assert abs(mask.mean() - 0.3) < 4 * np.sqrt(0.21 / length)
    rx = apply_schedule(s, sched, replace(cfg, z_cap=1e6), 7)
    assert rx.n_received == 2000 and rx.counts.sum() == 2000


def test_short_stream_is_reported():
    cfg = small_cfg()
    s = transmit_stream(cfg, [0] * 15, 100)
    with pytest.raises(ValueError, match="longer stream"):
        apply_schedule(s, Schedule.iid_thinning(100, 0.5), cfg, 0)


def test_starved_codes_get_zero_length_and_zero_weight():
    cfg = small_cfg()
    sched = Schedule.per_code_starve(165, 0.2)
    cw = outer_encode(SMALL, [2] * 11)
    s = transmit_stream(cfg, cw, stream_length_for(sched))
    rx = apply_schedule(s, sched, cfg, 4)
    starved = np.flatnonzero(rx.counts_raw == 0)
    assert starved.size == 3
    dec = decode_all_inner(cfg, rx)
    assert all(dec[k].alpha == 0.0 and dec[k].z == 0.0 for k in starved)


def test_truncation_caps_each_code():
    cfg = small_cfg(z_cap=1.0)
    s = transmit_stream(cfg, [0] * 15, 165)
    rx = apply_schedule(s, Schedule.prefix(165), cfg, 0)
    assert rx.counts.max() <= 11 and rx.z.max() <= 1.0
    assert rx.counts_raw.sum() == 165 and rx.counts.sum() < 165
    # the first occurrences of each code survive
    for k in range(15):
        j, _ = rx.for_code(k)
        np.testing.assert_array_equal(j, np.arange(1, j.size + 1))


# ---------------------------------------------------------------- inner decoding

def test_inner_ml_on_clean_channel():
    cfg = small_cfg(CLEAN)
    cw = outer_encode(SMALL, list(range(11)))
    s = transmit_stream(cfg, cw, 600)
    rx = apply_schedule(s, Schedule.prefix(600), replace(cfg, z_cap=1e6), 0)
    for k in range(15):
        j, y = rx.for_code(k)
        d = inner_ml_decode(cfg, k, j, y, rx.n_eff)
        assert d.xi_hat == cw[k] and d.alpha > 0


def test_inner_ml_without_symbols_picks_first_candidate():
    cfg = small_cfg()
    d = inner_ml_decode(cfg, 0, [], [], candidates=[5, 9])
    assert d.xi_hat == 5 and d.alpha == 0.0 and d.z == 0.0


def test_vectorized_inner_decoding_matches_per_code():
    cfg = small_cfg()
    cw = outer_encode(SMALL, [3] * 11)
    s = transmit_stream(cfg, cw, 165)
    rx = apply_schedule(s, Schedule.prefix(165), cfg, 2)
    fast = decode_all_inner(cfg, rx)
    slow = decode_all_inner(cfg, rx, [np.arange(16)] * 15)
    assert [d.xi_hat for d in fast] == [d.xi_hat for d in slow]
    np.testing.assert_allclose([d.alpha for d in fast], [d.alpha for d in slow], atol=1e-12)
    assert all(0.0 <= d.alpha <= 1.0 for d in fast)


# ---------------------------------------------------------------- GMD

def test_gmd_score():
    assert gmd_score([1, 2, 3], [1, 0, 3], [0.5, 1.0, 0.25]) == pytest.approx(-0.25)


def test_gmd_recovers_beyond_error_radius_with_good_weights():
    # 3 errors exceed t = 2 for a (15, 11) code, but their low weights let GMD erase them
    cw = outer_encode(SMALL, list(range(11)))
    rx, alpha = list(cw), np.ones(15)
    for p in (0, 5, 12):
        rx[p] ^= 1
        alpha[p] = 0.05
    assert gmd_score(cw, rx, alpha) > SMALL.k_o
    assert gmd_decode(SMALL, rx, alpha) == list(range(11))


def test_gmd_refuses_when_condition_fails():
    cw = outer_encode(SMALL, [0] * 11)
    assert gmd_decode(SMALL, cw, np.zeros(15)) is None  # no reliability, nothing accepted
    with pytest.raises(ValueError):
        gmd_decode(SMALL, cw[:-1], np.ones(14))


def test_gmd_adversarial_small_field():
    # (6, 2) over GF(16): all 256 codewords as the rival, errors placed at the
    # rival's symbols, weights on a 3-level lattice
    spec = OuterCodeSpec(6, 2, 4)
    msg = [7, 11]
    cw = outer_encode(spec, msg)
    rng = np.random.default_rng(0)
    checked = 0
    for a in range(16):
        for b in range(16):
            rival = outer_encode(spec, [a, b])
            if rival == cw:
                continue
            for _ in range(6):
                wrong = rng.random(6) < 0.4
                rx = [r if w and r != c else (c ^ 1 if w else c) for r, c, w in zip(rival, cw, wrong)]
                alpha = rng.choice([0.0, 0.5, 1.0], 6)
                if gmd_score(cw, rx, alpha) > spec.k_o:
                    checked += 1
                    assert gmd_decode(spec, rx, alpha) == msg
    assert checked > 200


# ---------------------------------------------------------------- end to end

def test_clean_roundtrip_succeeds():
    cfg = small_cfg(CLEAN)
    for t in range(10):
        msg = random_message(cfg, t, 1)[0]
        rt = concat_roundtrip(cfg, msg, Schedule.prefix(2 * cfg.nominal_n), t)
        assert rt.success and rt.decoded == msg and rt.inner_correct.all()


def test_run_trial_is_deterministic_and_reports():
    cfg = small_cfg()
    a, b = run_trial(cfg, Schedule.prefix(200), 4), run_trial(cfg, Schedule.prefix(200), 4)
    assert a.success == b.success and a.decoded == b.decoded
    np.testing.assert_array_equal(a.alpha, b.alpha)
    assert sum(a.z_histogram()) == 15 and len(a.alpha_quantiles()) == 5
    assert '"N": 200' in a.transcript(4)


def test_more_symbols_lower_error_rate():
    cfg = small_cfg()
    lo = sum(not run_trial(cfg, Schedule.prefix(165), t).success for t in range(150))
    hi = sum(not run_trial(cfg, Schedule.prefix(330), t).success for t in range(150))
    assert hi < lo


def test_truncation_neutral_at_operating_point():
    cfg = ConcatConfig(OuterCodeSpec(64, 51), 24, BSC, seed=CodebookSeed(77))
    uncapped = replace(cfg, z_cap=1e9)
    sched = Schedule.prefix(cfg.nominal_n)
    changed = sum(run_trial(cfg, sched, t).decoded != run_trial(uncapped, sched, t).decoded for t in range(150))
    assert changed / 150 < 0.01


# ---------------------------------------------------------------- rate-compatible

def test_single_level_rate_compatible_equals_concat():
    cfg = small_cfg()
    for t in range(20):
        assert rate_compatible_trial(cfg, 0, t) == run_trial(cfg, Schedule.prefix(cfg.nominal_n), t).success


def test_rate_compatible_clean_two_levels():
    cfg = small_cfg(CLEAN, n_i=22, levels=2)
    assert received_needed(cfg, 1) == 165 and received_needed(cfg, 0) == 330
    subs = random_message(cfg, 1)
    stream = rate_compatible_encode(cfg, subs, 660)
    rx = apply_schedule(stream, Schedule.prefix(660), cfg, 0)
    assert rate_compatible_decode(cfg, rx, {0: subs[0]}) == {1: subs[1]}
    assert rate_compatible_decode(cfg, rx, {}) == {0: subs[0], 1: subs[1]}


def test_rate_compatible_argument_errors():
    cfg = small_cfg(n_i=22, levels=2)
    subs = random_message(cfg, 1)
    stream = rate_compatible_encode(cfg, subs, 400)
    rx = apply_schedule(stream, Schedule.prefix(330), cfg, 0)
    with pytest.raises(ValueError, match="nothing to decode"):
        rate_compatible_decode(cfg, rx, {0: subs[0], 1: subs[1]})
    with pytest.raises(ValueError, match="outside"):
        rate_compatible_decode(cfg, rx, {2: subs[0]})
    with pytest.raises(ValueError, match="not a valid"):
        rate_compatible_decode(cfg, rx, {0: [16] * 11})
    with pytest.raises(ValueError):
        rate_compatible_encode(cfg, subs[:1], 10)
    with pytest.raises(ValueError):
        received_needed(cfg, 2)


# ---------------------------------------------------------------- plain random fountain code

def test_random_fountain_sim_error_rate_falls_with_n():
    est = random_fountain_sim(BSC, None, 0.2, 16, seed=1, trials=300, n_values=[8, 30])
    assert est[0].p_hat > est[1].p_hat
    assert est[1].ci_high < 0.2
    with pytest.raises(ValueError):
        random_fountain_sim(BSC, None, 0.2, 100, 1, 10)
