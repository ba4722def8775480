"""Steering the scheduler: custom constraints, directives, callbacks.

The kernel is a row-sum style reduction c[i] += A[i][k].  Loop i is
dependence-free, so plain proximity schedules it outermost for outer
parallelism.  Three different ways to override that decision:

  * a custom constraint pinning the first dimension's i-coefficient to 0;
  * a vectorize directive, which moves i innermost as a unit row;
  * a strategy callback that switches the cost list per dimension.
"""

import json

from polysched import (
    DimensionPlan,
    compute_dependences,
    config_from_dict,
    parse_scop,
    schedule,
)
from polysched.config import Config

REDUCTION = {
    "parameters": [],
    "context": [],
    "statements": [
        {
            "name": "S0",
            "iterators": ["i", "k"],
            "domain": [
                {"rel": ">=", "row": [1, 0, 0]},
                {"rel": ">=", "row": [-1, 0, 5]},
                {"rel": ">=", "row": [0, 1, 0]},
                {"rel": ">=", "row": [0, -1, 5]},
            ],
            "accesses": [
                {"array": "c", "kind": "write", "subscripts": [[1, 0, 0]]},
                {"array": "c", "kind": "read", "subscripts": [[1, 0, 0]]},
                {"array": "A", "kind": "read",
                 "subscripts": [[1, 0, 0], [0, 1, 0]]},
            ],
            "initial_schedule": [[0, 0, 0], [1, 0, 0], [0, 0, 0],
                                 [0, 1, 0], [0, 0, 0]],
        },
    ],
}


def show(tag, sched):
    rows = [tuple(r.it) for r in sched.rows[0]]
    print(f"{tag:24s} rows={rows} parallel={sched.parallel}")


def main():
    scop = parse_scop(json.dumps(REDUCTION))

    sched = schedule(scop, compute_dependences(scop),
                     config_from_dict({"preset": "pluto-style"}))
    show("plain proximity", sched)

    cfg = config_from_dict({
        "constraints": [{"scope": 0, "expr": "S0_it_0 = 0"}]})
    sched = schedule(scop, compute_dependences(scop), cfg)
    show("constraint S0_it_0 = 0", sched)

    cfg = config_from_dict({
        "directives": [{"statement": 0, "loop": 0, "type": "vectorize"}]})
    sched = schedule(scop, compute_dependences(scop), cfg)
    show("vectorize directive", sched)

    def strategy(state):
        # feautrier outermost (carry the reduction first), then proximity
        costs = ["feautrier"] if state.dim == 0 else ["proximity"]
        return DimensionPlan("solve", costs)

    cfg = Config()
    cfg.callback = strategy
    sched = schedule(scop, compute_dependences(scop), cfg)
    show("callback strategy", sched)


if __name__ == "__main__":
    main()
