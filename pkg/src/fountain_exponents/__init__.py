"""Fountain error exponents and a concatenated fountain codec.

Exponents are computed by numerical optimization over Gallager's ``E0``;
the codec (random fountain inner codes, Reed-Solomon outer code, GMD
decoding) checks them operationally by Monte Carlo simulation.
"""
from .channel import (CapacityError, Channel, InputDistribution, capacity, e0_slope_at_zero, gallager_e0,
                      load_channel, make_bsc, mutual_information, parse_channel)
from .codec import (CodebookSeed, ConcatConfig, InnerDecision, Schedule, apply_schedule, concat_roundtrip,
                    gmd_decode, inner_ml_decode, inner_symbol, random_fountain_sim, rate_compatible_decode,
                    rate_compatible_encode, transmit_stream)
from .exponents import (DEFAULT_GRID, ExponentPoint, OptimizerGrid, RateNotAchievable, adjusted_exponent_ez,
                        blokh_zyablov_comparison, closed_form_witness_z0, e_fc_gamma, e_fc_gamma_optimal, e_fcs,
                        e_fl, e_fl_penalized, forney_exponent, infinite_level_exponent, multilevel_exponent,
                        one_level_exponent, one_level_fixed, one_level_lower_bound, phi, random_fountain_exponent,
                        suboptimal_outer_rate)
from .outer import OuterCodeSpec, decode_errors_erasures, gmd_candidate_set, outer_encode
from .saddle import SaddleConfig, SaddleResult, saddle_one_level
from .sim import ExperimentManifest, RandomFountainSpec, run_sweep
from .stats import PeEstimate, fit_exponent

__version__ = "0.1.0"
