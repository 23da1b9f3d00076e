"""Noisy gradient-descent bit-flipping decoders for LDPC codes, with re-decoding."""

__version__ = "0.1.0"

from .channel import ChannelParams, NoiseStreamKey, StreamRole, ebn0_to_sigma2, make_stream, transmit
from .decoder import (
    GDBF_TRAPSET,
    NGDBF_8023AN,
    NGDBF_TRAPSET,
    SM_NGDBF_PEG,
    DecodeResult,
    DecoderConfig,
    PhaseResult,
    decode,
    decode_phase,
)
from .refdec import NmsConfig, nms_decode
from .tanner import (
    ParityCheckMatrix,
    bundled_code,
    emit_alist,
    induced_subgraph,
    is_codeword,
    load_alist,
    parse_alist,
    syndrome,
)

__all__ = [
    "ChannelParams", "NoiseStreamKey", "StreamRole", "ebn0_to_sigma2", "make_stream", "transmit",
    "GDBF_TRAPSET", "NGDBF_8023AN", "NGDBF_TRAPSET", "SM_NGDBF_PEG",
    "DecodeResult", "DecoderConfig", "PhaseResult", "decode", "decode_phase",
    "NmsConfig", "nms_decode",
    "ParityCheckMatrix", "bundled_code", "emit_alist", "induced_subgraph", "is_codeword",
    "load_alist", "parse_alist", "syndrome",
]
