import json

import pytest

import kernels
from polysched import (
    Schedule,
    ScheduleRow,
    emit_schedule,
    emit_scop,
    initial_as_schedule,
    parse_schedule,
    parse_scop,
)
from polysched.errors import (
    BadInitialSchedule,
    DimensionMismatch,
    IncompleteSchedule,
    SchemaError,
)


def test_parse_fig1(fig1):
    assert [s.name for s in fig1.statements] == ["S0", "S1"]
    assert fig1.statements[0].depth == 2
    assert len(fig1.statements[0].initial_schedule) == 5
    assert fig1.statements[0].accesses[0].array == "c"


def test_parse_empty_statement_list():
    scop = parse_scop(json.dumps({"parameters": [], "statements": []}))
    assert scop.statements == ()


def test_wrong_row_width():
    doc = kernels.fig1_doc()
    doc["statements"][0]["domain"][0]["row"] = [1, 0]
    with pytest.raises(DimensionMismatch):
        parse_scop(json.dumps(doc))


def test_initial_schedule_row_count():
    doc = kernels.fig1_doc()
    doc["statements"][0]["initial_schedule"] = [[0, 0, 0]]
    with pytest.raises(BadInitialSchedule):
        parse_scop(json.dumps(doc))


def test_initial_schedule_scalar_rows_must_be_constant():
    doc = kernels.chain_doc()
    doc["statements"][0]["initial_schedule"][0] = [1, 0, 0]
    with pytest.raises(BadInitialSchedule):
        parse_scop(json.dumps(doc))


def test_unknown_keys_rejected():
    doc = kernels.chain_doc()
    doc["surprise"] = 1
    with pytest.raises(SchemaError):
        parse_scop(json.dumps(doc))


def test_duplicate_statement_names():
    doc = kernels.producer_consumer_doc()
    doc["statements"][1]["name"] = "S0"
    with pytest.raises(SchemaError):
        parse_scop(json.dumps(doc))


def test_inconsistent_array_dimensionality():
    doc = kernels.producer_consumer_doc()
    doc["statements"][1]["accesses"][1]["subscripts"] = [[1, 0], [0, 1]]
    with pytest.raises(SchemaError):
        parse_scop(json.dumps(doc))


def test_scop_round_trip_fixpoint(fig1):
    once = emit_scop(fig1)
    again = emit_scop(parse_scop(once))
    assert once == again


def test_schedule_round_trip_fixpoint(fig1):
    sched = initial_as_schedule(fig1)
    once = emit_schedule(fig1, sched)
    back = parse_schedule(once, fig1)
    assert emit_schedule(fig1, back) == once


def test_emit_identity_depth1():
    scop = kernels.make(kernels.chain_doc())
    sched = initial_as_schedule(scop)
    assert len(sched.rows[0]) == 1
    assert sched.rows[0][0] == ScheduleRow((1,), (0,), 0)
    assert sched.bands == [0]
    doc = json.loads(emit_schedule(scop, sched))
    assert doc["statements"][0]["rows"] == [
        {"it": [1], "par": [0], "const": 0}]
    assert doc["bands"] == [0]


def test_emit_missing_statement(fig1):
    sched = initial_as_schedule(fig1)
    broken = Schedule(sched.rows[:1], sched.bands, sched.parallel, [[]])
    with pytest.raises(IncompleteSchedule):
        emit_schedule(fig1, broken)


def test_parse_schedule_missing_statement(fig1):
    sched = initial_as_schedule(fig1)
    doc = json.loads(emit_schedule(fig1, sched))
    doc["statements"] = doc["statements"][:1]
    with pytest.raises(IncompleteSchedule):
        parse_schedule(json.dumps(doc), fig1)


def test_matrix_text_format(fig1):
    sched = initial_as_schedule(fig1)
    text = emit_schedule(fig1, sched, "matrix-text").decode()
    assert text.startswith("S0:")
    assert "bands:" in text and "parallel:" in text


def test_initial_as_schedule_keeps_separating_scalars(fig1):
    sched = initial_as_schedule(fig1)
    # fused loops i, j plus the separating inner scalar row
    assert len(sched.rows[0]) == 3
    assert sched.rows[0][2].const == 0 and sched.rows[1][2].const == 1


def test_row_normalization():
    row = ScheduleRow((2, 4), (0,), 2)
    assert row.normalized() == ScheduleRow((1, 2), (0,), 1)
