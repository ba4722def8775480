"""Two fused parallel statements whose best layouts disagree.

Statement 0 walks c[j][i] (i fastest in memory) and statement 1 walks
d[i][j] (j fastest).  Keeping them fused forces one of them to stride.
With the contiguity cost and auto-vectorization the scheduler distributes
the statements and interchanges the first nest, so each statement gets
its own contiguous innermost loop.
"""

import json

from polysched import (
    compute_dependences,
    config_from_dict,
    emit_schedule,
    enumerate_dates,
    parse_scop,
    print_loops,
    schedule,
)

KERNEL = {
    "parameters": [],
    "context": [],
    "statements": [
        {
            "name": "S0",
            "iterators": ["i", "j"],
            "domain": [
                {"rel": ">=", "row": [1, 0, 0]},
                {"rel": ">=", "row": [-1, 0, 99]},
                {"rel": ">=", "row": [0, 1, 0]},
                {"rel": ">=", "row": [0, -1, 9]},
            ],
            "accesses": [
                {"array": "c", "kind": "write",
                 "subscripts": [[0, 1, 0], [1, 0, 0]]},     # c[j][i]
                {"array": "a", "kind": "read",
                 "subscripts": [[0, 1, 0], [1, 0, 0]]},     # a[j][i]
                {"array": "b", "kind": "read", "subscripts": []},
            ],
            "initial_schedule": [[0, 0, 0], [1, 0, 0], [0, 0, 0],
                                 [0, 1, 0], [0, 0, 0]],
        },
        {
            "name": "S1",
            "iterators": ["i", "j"],
            "domain": [
                {"rel": ">=", "row": [1, 0, 0]},
                {"rel": ">=", "row": [-1, 0, 99]},
                {"rel": ">=", "row": [0, 1, 0]},
                {"rel": ">=", "row": [0, -1, 9]},
            ],
            "accesses": [
                {"array": "d", "kind": "write",
                 "subscripts": [[1, 0, 0], [0, 1, 0]]},     # d[i][j]
                {"array": "e", "kind": "read",
                 "subscripts": [[1, 0, 0], [0, 1, 0]]},     # e[i][j]
                {"array": "x", "kind": "read", "subscripts": []},
            ],
            "initial_schedule": [[0, 0, 0], [1, 0, 0], [0, 0, 0],
                                 [0, 1, 0], [0, 0, 1]],
        },
    ],
}


def main():
    scop = parse_scop(json.dumps(KERNEL))
    deps = compute_dependences(scop)
    print(f"dependences: {len(deps)} (the statements touch disjoint arrays)")

    config = config_from_dict({"preset": "tensor-style",
                               "autoVectorize": True})
    sched = schedule(scop, deps, config)

    print("\nschedule (matrix form):")
    print(emit_schedule(scop, sched, "matrix-text").decode())

    print("loop sketch after transformation:")
    trace = enumerate_dates(scop, sched, {})
    print(print_loops(trace, scop, sched))


if __name__ == "__main__":
    main()
