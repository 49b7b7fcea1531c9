"""Semantic-bit accounting for a protocol run.

Counts the information actually carried per message, not wire overhead:
an encrypted digest vector is 2nl bits, a revealed message r bits, an
announcement 2 bits, and every authenticator n+l bits. The comparison
phase must fit in 4(nl + 2n + 2l + 1) bits total and the dispute phase
in 2(r + 4n + 4l + 2); the meter checks both.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from ..errors import ProtocolStateError
from ..params import Params
from .frames import Frame, MsgType

ANNOUNCE_BITS = 2

ET_TYPES = (MsgType.ET_SUBMIT_A, MsgType.ET_SUBMIT_B, MsgType.ET_ANNOUNCE)
DR_TYPES = (MsgType.DR_CLAIM_A, MsgType.DR_CLAIM_B, MsgType.DR_ANNOUNCE)


def semantic_payload_bits(params: Params, msg_type: MsgType) -> int:
    if msg_type in (MsgType.ET_SUBMIT_A, MsgType.ET_SUBMIT_B):
        return params.digest_vector_bits
    if msg_type in (MsgType.ET_ANNOUNCE, MsgType.DR_ANNOUNCE):
        return ANNOUNCE_BITS
    if msg_type in (MsgType.DR_CLAIM_A, MsgType.DR_CLAIM_B):
        return params.data_bits
    raise ProtocolStateError(f"no semantic accounting for {msg_type!r}")


def semantic_bits(params: Params, msg_type: MsgType) -> int:
    """Payload information plus the n+l authenticator bits."""
    return semantic_payload_bits(params, msg_type) + params.tag_bits


@dataclass
class TrafficMeter:
    """Aggregates one session's semantic bits; error frames do not count."""

    params: Params
    et_bits: int = 0
    dr_bits: int = 0
    claim_bits: int = 0
    counts: dict = field(default_factory=dict)

    def note(self, frame: Frame) -> None:
        if frame.msg_type == MsgType.ERROR:
            return
        bits = semantic_bits(self.params, frame.msg_type)
        if frame.msg_type in ET_TYPES:
            self.et_bits += bits
        elif frame.msg_type in DR_TYPES:
            self.dr_bits += bits
        if frame.msg_type in (MsgType.DR_CLAIM_A, MsgType.DR_CLAIM_B):
            self.claim_bits += semantic_payload_bits(self.params, frame.msg_type)
        self.counts[frame.msg_type] = self.counts.get(frame.msg_type, 0) + 1

    @property
    def et_within_budget(self) -> bool:
        return self.et_bits <= self.params.et_comm_bits

    @property
    def dr_within_budget(self) -> bool:
        return self.dr_bits <= self.params.dr_comm_bits
