"""Hybrid SLNR beamforming with GA-designed finite-resolution analog precoders."""

__version__ = "0.1.0"

from .channel import (
    ChannelMatrix,
    ChannelSet,
    EffectiveChannel,
    UlaGeometry,
    draw_channel_set,
    draw_iid_rayleigh,
    effective_channel,
    los_channel,
    steering_vector,
)
from .ga import Chromosome, GaConfig, GaTrace, decode, encode, evolve, exhaustive_oracle
from .metrics import BeamPattern, LinkMetrics, beam_pattern, fitness, link_metrics, sinr, slnr, sum_rate
from .precoding import (
    AnalogPrecoder,
    DigitalPrecoderSet,
    SlnrSolution,
    analog_from_indices,
    slnr_digital_precoder,
    zf_digital_precoder,
)
