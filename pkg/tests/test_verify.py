import json

import pytest

import kernels
from polysched import (
    Schedule,
    ScheduleRow,
    check_injective,
    compute_dependences,
    config_from_dict,
    enumerate_dates,
    initial_as_schedule,
    parse_scop,
    print_loops,
    schedule,
    verify_legality,
)
from polysched.errors import BudgetExceeded, UnboundedDomain


def test_identity_trace_interleaves(fig1):
    sched = initial_as_schedule(fig1)
    trace = enumerate_dates(fig1, sched, {})
    assert len(trace) == 2000
    # fused original order: S0 then S1 at every (i, j)
    assert [e[0] for e in trace.entries[:4]] == [0, 1, 0, 1]
    assert not check_injective(trace)


def test_transformed_trace_separates(fig1):
    deps = compute_dependences(fig1)
    cfg = config_from_dict({"preset": "tensor-style", "autoVectorize": True})
    sched = schedule(fig1, deps, cfg)
    trace = enumerate_dates(fig1, sched, {})
    kinds = [e[0] for e in trace.entries]
    assert kinds[:1000] == [0] * 1000 and kinds[1000:] == [1] * 1000


def test_unbounded_domain_detected():
    doc = kernels.chain_doc()
    doc["statements"][0]["domain"] = [{"rel": ">=", "row": [1, 0, 0]}]
    scop = parse_scop(json.dumps(doc))
    with pytest.raises(UnboundedDomain):
        enumerate_dates(scop, initial_as_schedule(scop), {"N": 6})


def test_budget_exceeded(fig1):
    with pytest.raises(BudgetExceeded):
        enumerate_dates(fig1, initial_as_schedule(fig1), {}, budget=10)


def test_identity_schedule_is_legal(jacobi):
    deps = compute_dependences(jacobi)
    rep = verify_legality(jacobi, initial_as_schedule(jacobi), deps, {})
    assert rep.legal
    assert rep.instances_checked > 0


def test_reversed_order_is_flagged():
    # Producer/consumer with the consumer nest scheduled first.
    scop = kernels.make(kernels.producer_consumer_doc())
    deps = compute_dependences(scop)
    bad = Schedule(
        [[ScheduleRow((0,), (), 1), ScheduleRow((1,), (), 0)],
         [ScheduleRow((0,), (), 0), ScheduleRow((1,), (), 0)]],
        [0, 0], [False, False], [[], []])
    rep = verify_legality(scop, bad, deps, {})
    assert rep.violations
    assert rep.to_json()["violations"]


def test_false_parallel_flag_is_flagged(chain):
    deps = compute_dependences(chain)
    lying = Schedule([[ScheduleRow((1,), (0,), 0)]], [0], [True], [[]])
    rep = verify_legality(chain, lying, deps, {"N": 6})
    assert rep.violations == []
    assert rep.parallel_flag_errors


def test_verifier_flags_known_illegal_mutations():
    # Corpus of schedules made illegal by decrementing a coefficient of a
    # dependence-carrying row: every mutation that stays in the coefficient
    # box must either remain legal or be flagged; at least one is flagged.
    flagged = 0
    for seed in range(8):
        scop = kernels.random_scop(seed)
        deps = compute_dependences(scop)
        if not deps:
            continue
        sched = schedule(scop, deps, config_from_dict({}))
        params = {p: 6 for p in scop.parameters}
        for si in range(len(scop.statements)):
            for d in range(sched.n_dims):
                row = sched.rows[si][d]
                for k, v in enumerate(row.it):
                    if v <= 0:
                        continue
                    mutated = [list(r) for r in sched.rows]
                    it = list(row.it)
                    it[k] -= 1
                    mutated[si] = list(sched.rows[si])
                    mutated[si][d] = ScheduleRow(tuple(it), row.par,
                                                 row.const)
                    twisted = Schedule(mutated, list(sched.bands),
                                       [False] * sched.n_dims,
                                       [[] for _ in sched.rows])
                    rep = verify_legality(scop, twisted, deps, params)
                    flagged += bool(rep.violations)
    assert flagged > 0


def test_params_must_satisfy_context(chain):
    deps = compute_dependences(chain)
    sched = schedule(chain, deps, config_from_dict({}))
    with pytest.raises(ValueError):
        verify_legality(chain, sched, deps, {"N": 0})


def test_print_single_instance():
    doc = kernels.chain_doc()
    doc["parameters"] = []
    doc["statements"][0]["domain"] = [
        {"rel": ">=", "row": [1, 0]}, {"rel": ">=", "row": [-1, 0]}]
    doc["statements"][0]["accesses"] = [
        {"array": "a", "kind": "write", "subscripts": [[1, 0]]}]
    doc["statements"][0]["initial_schedule"] = [[0, 0], [1, 0], [0, 0]]
    scop = parse_scop(json.dumps(doc))
    sched = initial_as_schedule(scop)
    text = print_loops(enumerate_dates(scop, sched, {}), scop, sched)
    assert text == "S0\n"


def test_print_fig1_two_nests(fig1):
    deps = compute_dependences(fig1)
    cfg = config_from_dict({"preset": "tensor-style", "autoVectorize": True})
    sched = schedule(fig1, deps, cfg)
    text = print_loops(enumerate_dates(fig1, sched, {}), fig1, sched)
    assert text.splitlines() == [
        "for j = 0..9:",
        "  for i = 0..99:",
        "    S0",
        "for i = 0..99:",
        "  for j = 0..9:",
        "    S1",
    ]


def test_print_tiled_nest(square):
    from polysched import tile
    deps = compute_dependences(square)
    tiled = tile(schedule(square, deps, config_from_dict({})), square,
                 [(2, 2)])
    text = print_loops(enumerate_dates(square, tiled, {}), square, tiled)
    assert text.splitlines() == [
        "for tt0 = 0..1:",
        "  for tt1 = 0..1:",
        "    for i = 0..1:",
        "      for j = 0..1:",
        "        S0",
    ]


def test_report_json_shape(chain):
    deps = compute_dependences(chain)
    sched = schedule(chain, deps, config_from_dict({}))
    rep = verify_legality(chain, sched, deps, {"N": 6})
    doc = rep.to_json()
    assert set(doc) == {"violations", "parallel_flag_errors",
                        "instances_checked"}
    assert doc["instances_checked"] == 5  # pairs i -> i+1 at N = 6
