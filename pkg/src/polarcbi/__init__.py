"""Polar codes with SC decoding, correlated-bit analysis and LDPC/polar interleavers."""
from .channel import ChannelParams, awgn_transmit, bec_transmit, rng_stream
from .correlation import CorrelationProfile, column_support, correlated_split, measure_coupling
from .interleave import (InterleaverMap, apply_map, build_bi_map, build_cbi_map,
                         build_direct_map, invert_map)
from .ldpc import LdpcCodeSpec, bp_decode, build_tanner_h, ldpc_encode
from .polar import (PolarCodeSpec, construct_awgn, construct_bec, encode, encode_systematic,
                    sc_decode, sc_decode_systematic)

__all__ = [
    "ChannelParams", "awgn_transmit", "bec_transmit", "rng_stream",
    "CorrelationProfile", "column_support", "correlated_split", "measure_coupling",
    "InterleaverMap", "apply_map", "build_bi_map", "build_cbi_map", "build_direct_map",
    "invert_map", "LdpcCodeSpec", "bp_decode", "build_tanner_h", "ldpc_encode",
    "PolarCodeSpec", "construct_awgn", "construct_bec", "encode", "encode_systematic",
    "sc_decode", "sc_decode_systematic",
]
