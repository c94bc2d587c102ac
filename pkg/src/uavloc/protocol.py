"""Identity-capture message exchange between a UE and the UAV cell.

Two small state machines: the UE camps on a ground cell, reselects to the
UAV cell when it advertises a higher priority and a different tracking
area, and is then walked through a rejected TAU and a rejected attach, in
the course of which it discloses its IMSI. No radio or NAS encoding is
modeled, only message kinds, minimal payloads and ordering.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field, replace
from typing import Iterable

from .errors import ProtocolViolation

CAUSE_IMPLICITLY_DETACHED = 10


class Kind(enum.Enum):
    SIB = "SIB"
    TAU_REQUEST = "TAU_REQUEST"
    TAU_REJECT = "TAU_REJECT"
    ATTACH_REQUEST = "ATTACH_REQUEST"
    IDENTITY_REQUEST = "IDENTITY_REQUEST"
    IDENTITY_RESPONSE = "IDENTITY_RESPONSE"
    ATTACH_REJECT = "ATTACH_REJECT"


UPLINK = {Kind.TAU_REQUEST, Kind.ATTACH_REQUEST, Kind.IDENTITY_RESPONSE}


@dataclass(frozen=True)
class Message:
    kind: Kind
    tac: int | None = None
    priority: int | None = None
    cause: int | None = None
    guti: str | None = None
    imsi: str | None = None

    @property
    def direction(self) -> str:
        return "UE->UAV" if self.kind in UPLINK else "UAV->UE"

    def payload(self) -> str:
        parts = [f"{k}={v}" for k in ("tac", "priority", "cause", "guti", "imsi")
                 if (v := getattr(self, k)) is not None]
        return " ".join(parts) if parts else "-"

    def log_line(self) -> str:
        return f"{self.direction} {self.kind.value} {self.payload()}"


class UeState(enum.Enum):
    CAMPED_ON_GROUND = "CampedOnGround"
    RESELECTING = "Reselecting"
    TAU_SENT = "TauSent"
    DEREGISTERED = "Deregistered"
    ATTACH_SENT = "AttachSent"
    IDENTITY_SENT = "IdentitySent"
    REJECTED = "Rejected"


class CatcherState(enum.Enum):
    BROADCASTING = "Broadcasting"
    AWAIT_TAU = "AwaitTau"
    AWAIT_ATTACH = "AwaitAttach"
    AWAIT_IDENTITY = "AwaitIdentity"
    DONE = "Done"


@dataclass(frozen=True)
class UeFsm:
    imsi: str = "001010123456789"
    guti: str = "guti-7f3a"
    serving_tac: int = 1
    serving_priority: int = 3
    state: UeState = UeState.CAMPED_ON_GROUND
    identity_requested: bool = False

    def __post_init__(self):
        if len(self.imsi) != 15 or not self.imsi.isdigit():
            raise ValueError("IMSI must be a 15-digit string")


@dataclass(frozen=True)
class CatcherFsm:
    advertised_tac: int = 7
    priority: int = 7  # highest reselection priority
    ground_tac: int = 1
    state: CatcherState = CatcherState.BROADCASTING
    captured_imsi: str | None = None
    ue_rangeable: bool = False

    def __post_init__(self):
        if self.advertised_tac == self.ground_tac:
            raise ValueError("advertised TAC must differ from the ground TAC")


def _violation(who: str, state, msg: Message) -> ProtocolViolation:
    return ProtocolViolation(f"{who} in state {state.value} cannot accept {msg.kind.value}")


def ue_step(fsm: UeFsm, msg: Message) -> tuple[UeFsm, list[Message]]:
    """Advance the UE on one downlink message. Raises on out-of-order input."""
    s = fsm.state
    if msg.kind is Kind.SIB and s is UeState.CAMPED_ON_GROUND:
        if msg.tac == fsm.serving_tac or (msg.priority or 0) <= fsm.serving_priority:
            return fsm, []
        # reselection to the new tracking area triggers the update immediately
        return replace(fsm, state=UeState.TAU_SENT), [Message(Kind.TAU_REQUEST, tac=fsm.serving_tac)]
    if msg.kind is Kind.TAU_REJECT and s is UeState.TAU_SENT:
        if msg.cause != CAUSE_IMPLICITLY_DETACHED:
            raise ProtocolViolation(f"unsupported TAU reject cause {msg.cause}")
        return replace(fsm, state=UeState.ATTACH_SENT), [Message(Kind.ATTACH_REQUEST, guti=fsm.guti)]
    if msg.kind is Kind.IDENTITY_REQUEST and s is UeState.ATTACH_SENT:
        return (replace(fsm, state=UeState.IDENTITY_SENT, identity_requested=True),
                [Message(Kind.IDENTITY_RESPONSE, imsi=fsm.imsi)])
    if msg.kind is Kind.ATTACH_REJECT and s is UeState.IDENTITY_SENT:
        return replace(fsm, state=UeState.REJECTED), []
    raise _violation("UE", s, msg)


def catcher_step(fsm: CatcherFsm, msg: Message | None = None) -> tuple[CatcherFsm, list[Message]]:
    """Advance the catcher. ``None`` is the start trigger that emits the SIB."""
    s = fsm.state
    if msg is None:
        if s is not CatcherState.BROADCASTING:
            raise ProtocolViolation(f"catcher in state {s.value} is not broadcasting")
        sib = Message(Kind.SIB, tac=fsm.advertised_tac, priority=fsm.priority)
        return replace(fsm, state=CatcherState.AWAIT_TAU), [sib]
    if msg.kind is Kind.TAU_REQUEST and s is CatcherState.AWAIT_TAU:
        return (replace(fsm, state=CatcherState.AWAIT_ATTACH),
                [Message(Kind.TAU_REJECT, cause=CAUSE_IMPLICITLY_DETACHED)])
    if msg.kind is Kind.ATTACH_REQUEST and s is CatcherState.AWAIT_ATTACH:
        # the GUTI was issued by another MME and cannot be resolved here
        return replace(fsm, state=CatcherState.AWAIT_IDENTITY), [Message(Kind.IDENTITY_REQUEST)]
    if msg.kind is Kind.IDENTITY_RESPONSE and s is CatcherState.AWAIT_IDENTITY:
        return (replace(fsm, state=CatcherState.DONE, captured_imsi=msg.imsi, ue_rangeable=True),
                [Message(Kind.ATTACH_REJECT)])
    raise _violation("catcher", s, msg)


CANONICAL_ORDER = [
    Kind.SIB, Kind.TAU_REQUEST, Kind.TAU_REJECT, Kind.ATTACH_REQUEST,
    Kind.IDENTITY_REQUEST, Kind.IDENTITY_RESPONSE, Kind.ATTACH_REJECT,
]
MAX_MESSAGES = len(CANONICAL_ORDER)


@dataclass
class Exchange:
    ue: UeFsm
    catcher: CatcherFsm
    transcript: list[Message] = field(default_factory=list)

    @property
    def agreed(self) -> bool:
        return (self.catcher.ue_rangeable == (self.catcher.state is CatcherState.DONE)
                == (self.ue.state is UeState.REJECTED))

    def transcript_lines(self) -> list[str]:
        return [m.log_line() for m in self.transcript]


def run_exchange(ue: UeFsm | None = None, catcher: CatcherFsm | None = None,
                 tamper=None) -> Exchange:
    """Run both state machines to quiescence.

    ``tamper`` may rewrite the in-flight queue before each delivery (drop,
    duplicate or reorder messages) to exercise the error paths; it receives
    and returns a list of messages. An exchange that goes quiet with the
    two endpoints disagreeing (say, the final reject was lost) raises.
    """
    ex = Exchange(ue or UeFsm(), catcher or CatcherFsm())
    ex.catcher, queue = catcher_step(ex.catcher)
    delivered = 0
    while queue:
        if tamper is not None:
            queue = list(tamper(list(queue)))
            if not queue:
                break
        msg = queue.pop(0)
        delivered += 1
        if delivered > MAX_MESSAGES:
            raise ProtocolViolation("exchange exceeded the message budget")
        ex.transcript.append(msg)
        if msg.kind in UPLINK:
            ex.catcher, out = catcher_step(ex.catcher, msg)
        else:
            ex.ue, out = ue_step(ex.ue, msg)
        queue.extend(out)
    if not ex.agreed:
        raise ProtocolViolation(
            f"exchange stalled with UE {ex.ue.state.value} and catcher {ex.catcher.state.value}")
    return ex


def imsi_disclosed_in_order(messages: Iterable[Message]) -> bool:
    """True if no message carries an IMSI before an IDENTITY_REQUEST."""
    asked = False
    for m in messages:
        if m.kind is Kind.IDENTITY_REQUEST:
            asked = True
        if m.imsi is not None and not asked:
            return False
    return True
