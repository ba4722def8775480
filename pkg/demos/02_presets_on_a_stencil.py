"""The four built-in strategies on a time-iterated 1-D stencil.

The stencil A[t][i] = f(A[t-1][i-1..i+1]) carries dependences with
distances (1,-1), (1,0), (1,1).  Proximity finds the classic skewed band,
the no-skew tensor strategy settles for plain loops with an inner
parallel dimension, Feautrier maximizes carried dependences, and the
isl-like strategy recomputes a non-parallel proximity dimension with the
Feautrier objective.
"""

import json

from polysched import (
    compute_dependences,
    config_from_dict,
    parse_scop,
    schedule,
    verify_legality,
)

STENCIL = {
    "parameters": [],
    "context": [],
    "statements": [
        {
            "name": "S0",
            "iterators": ["t", "i"],
            "domain": [
                {"rel": ">=", "row": [1, 0, 0]},
                {"rel": ">=", "row": [-1, 0, 5]},
                {"rel": ">=", "row": [0, 1, -1]},
                {"rel": ">=", "row": [0, -1, 5]},
            ],
            "accesses": [
                {"array": "A", "kind": "write",
                 "subscripts": [[1, 0, 0], [0, 1, 0]]},
                {"array": "A", "kind": "read",
                 "subscripts": [[1, 0, -1], [0, 1, -1]]},
                {"array": "A", "kind": "read",
                 "subscripts": [[1, 0, -1], [0, 1, 0]]},
                {"array": "A", "kind": "read",
                 "subscripts": [[1, 0, -1], [0, 1, 1]]},
            ],
            "initial_schedule": [[0, 0, 0], [1, 0, 0], [0, 0, 0],
                                 [0, 1, 0], [0, 0, 0]],
        },
    ],
}


def main():
    scop = parse_scop(json.dumps(STENCIL))
    for preset in ["pluto-style", "tensor-style", "feautrier-style",
                   "isl-style"]:
        deps = compute_dependences(scop)
        sched = schedule(scop, deps, config_from_dict({"preset": preset}))
        rows = [tuple(r.it) for r in sched.rows[0]]
        report = verify_legality(scop, sched, deps, {})
        print(f"{preset:16s} rows={rows} bands={sched.bands} "
              f"parallel={sched.parallel} "
              f"objectives={[list(c) for c in sched.dim_costs]} "
              f"legal={report.legal}")


if __name__ == "__main__":
    main()
