import dataclasses

import numpy as np
import pytest

from uavloc.errors import ProtocolViolation
from uavloc.protocol import (
    CANONICAL_ORDER,
    CAUSE_IMPLICITLY_DETACHED,
    UPLINK,
    CatcherFsm,
    CatcherState,
    Kind,
    Message,
    UeFsm,
    UeState,
    catcher_step,
    imsi_disclosed_in_order,
    run_exchange,
    ue_step,
)


def test_canonical_exchange():
    ex = run_exchange()
    assert [m.kind for m in ex.transcript] == CANONICAL_ORDER
    assert len(ex.transcript) == 7
    assert ex.ue.state is UeState.REJECTED
    assert ex.catcher.state is CatcherState.DONE
    assert ex.catcher.captured_imsi == "001010123456789"
    assert ex.catcher.ue_rangeable and ex.agreed


def test_ue_emits_three_messages_in_order():
    ex = run_exchange()
    ue_msgs = [m.kind for m in ex.transcript if m.kind in UPLINK]
    assert ue_msgs == [Kind.TAU_REQUEST, Kind.ATTACH_REQUEST, Kind.IDENTITY_RESPONSE]


def test_tau_reject_cause():
    tau_reject = run_exchange().transcript[2]
    assert tau_reject.kind is Kind.TAU_REJECT and tau_reject.cause == CAUSE_IMPLICITLY_DETACHED == 10


def test_sib_same_tac_ignored():
    ue = UeFsm()
    after, out = ue_step(ue, Message(Kind.SIB, tac=ue.serving_tac, priority=7))
    assert after == ue and out == []


def test_sib_lower_priority_ignored():
    ue = UeFsm()
    after, out = ue_step(ue, Message(Kind.SIB, tac=9, priority=1))
    assert after == ue and out == []


def test_identity_request_out_of_order():
    with pytest.raises(ProtocolViolation):
        ue_step(UeFsm(), Message(Kind.IDENTITY_REQUEST))


def test_catcher_records_imsi():
    c = dataclasses.replace(CatcherFsm(), state=CatcherState.AWAIT_IDENTITY)
    after, out = catcher_step(c, Message(Kind.IDENTITY_RESPONSE, imsi="001010123456789"))
    assert after.captured_imsi == "001010123456789" and after.ue_rangeable
    assert [m.kind for m in out] == [Kind.ATTACH_REJECT]


def test_duplicate_tau_request_rejected():
    c = dataclasses.replace(CatcherFsm(), state=CatcherState.AWAIT_ATTACH)
    with pytest.raises(ProtocolViolation):
        catcher_step(c, Message(Kind.TAU_REQUEST, tac=1))


def test_catcher_start_only_once():
    c, _ = catcher_step(CatcherFsm())
    with pytest.raises(ProtocolViolation):
        catcher_step(c)


def test_invalid_fsm_config():
    with pytest.raises(ValueError):
        UeFsm(imsi="123")
    with pytest.raises(ValueError):
        CatcherFsm(advertised_tac=1, ground_tac=1)


def test_transcript_lines():
    lines = run_exchange().transcript_lines()
    assert lines[0] == "UAV->UE SIB tac=7 priority=7"
    assert lines[1] == "UE->UAV TAU_REQUEST tac=1"
    assert lines[5] == "UE->UAV IDENTITY_RESPONSE imsi=001010123456789"
    assert lines[6] == "UAV->UE ATTACH_REJECT -"


def test_privacy_order_detector():
    leaked = [Message(Kind.IDENTITY_RESPONSE, imsi="001010123456789"), Message(Kind.IDENTITY_REQUEST)]
    assert not imsi_disclosed_in_order(leaked)
    assert imsi_disclosed_in_order(run_exchange().transcript)


def _random_tamper(rng):
    def tamper(queue):
        r = rng.random()
        if r < 0.15:
            return queue[1:]
        if r < 0.3:
            return queue + queue[:1]
        if r < 0.4 and len(queue) > 1:
            return queue[::-1]
        return queue
    return tamper


def test_fuzzed_schedules():
    rng = np.random.default_rng(0)
    outcomes = {"complete": 0, "violation": 0, "stalled": 0}
    for _ in range(10_000):
        try:
            ex = run_exchange(tamper=_random_tamper(rng))
        except ProtocolViolation:
            outcomes["violation"] += 1
            continue
        assert len(ex.transcript) <= 7
        assert imsi_disclosed_in_order(ex.transcript)
        assert ex.agreed
        outcomes["complete" if ex.catcher.state is CatcherState.DONE else "stalled"] += 1
    assert all(v > 0 for v in outcomes.values())
