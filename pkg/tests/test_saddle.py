import pytest

from fountain_exponents.channel import make_bsc
from fountain_exponents.exponents import one_level_fixed
from fountain_exponents.saddle import SaddleConfig, saddle_one_level

BSC = make_bsc(0.1)
C = 0.3680642071684971


@pytest.mark.parametrize("frac,ro", [(0.5, 0.75), (0.3, 0.5), (0.7, 0.9)])
def test_saddle_value_and_gamma_match_closed_form(frac, ro):
    sconf = SaddleConfig()
    sad = saddle_one_level(frac * C, BSC, None, ro, sconf)
    closed = one_level_fixed(frac * C, BSC, None, ro).value
    assert sad.value == pytest.approx(closed, abs=1e-3)
    assert abs(sad.gamma - (1 - ro) / 2) <= sconf.gamma_step + 1e-12
    assert sad.breakpoints_dominate


def test_saddle_value_is_an_upper_estimate_that_tightens():
    # the min over a finer (z0, gamma) grid can only come down
    coarse = saddle_one_level(0.5 * C, BSC, None, 0.75, SaddleConfig(z0_steps=26, gamma_steps=24))
    fine = saddle_one_level(0.5 * C, BSC, None, 0.75, SaddleConfig(z0_steps=201, gamma_steps=199))
    assert fine.value <= coarse.value + 1e-12


def test_saddle_rejects_infeasible_outer_rate():
    with pytest.raises(ValueError, match="ro must lie"):
        saddle_one_level(0.5 * C, BSC, None, 0.4)
    with pytest.raises(ValueError):
        SaddleConfig(z0_steps=1)
    with pytest.raises(ValueError):
        SaddleConfig(s_max=-1.0)
