"""The enumeration verifier catching a deliberately broken schedule.

The scheduler guarantees legality through the Farkas construction; the
verifier re-checks it by brute force, instance by instance.  Here a
producer/consumer pair is first scheduled correctly, then the two nests
are swapped by hand, and the verifier reports the violated pairs.
"""

import json

from polysched import (
    Schedule,
    ScheduleRow,
    compute_dependences,
    config_from_dict,
    parse_scop,
    schedule,
    verify_legality,
)

KERNEL = {
    "parameters": [],
    "context": [],
    "statements": [
        {
            "name": "S0",
            "iterators": ["i"],
            "domain": [{"rel": ">=", "row": [1, 0]},
                       {"rel": ">=", "row": [-1, 5]}],
            "accesses": [
                {"array": "t", "kind": "write", "subscripts": [[1, 0]]}],
            "initial_schedule": [[0, 0], [1, 0], [0, 0]],
        },
        {
            "name": "S1",
            "iterators": ["i"],
            "domain": [{"rel": ">=", "row": [1, 0]},
                       {"rel": ">=", "row": [-1, 5]}],
            "accesses": [
                {"array": "u", "kind": "write", "subscripts": [[1, 0]]},
                {"array": "t", "kind": "read", "subscripts": [[1, 0]]}],
            "initial_schedule": [[0, 1], [1, 0], [0, 0]],
        },
    ],
}


def main():
    scop = parse_scop(json.dumps(KERNEL))
    deps = compute_dependences(scop)
    print("dependences:", [(d.kind, d.source, "->", d.target) for d in deps])

    good = schedule(scop, deps, config_from_dict({}))
    print("computed schedule legal:",
          verify_legality(scop, good, deps, {}).legal)

    # Swap the nests by hand: consumer before producer.
    bad = Schedule(
        [[ScheduleRow((0,), (), 1), ScheduleRow((1,), (), 0)],
         [ScheduleRow((0,), (), 0), ScheduleRow((1,), (), 0)]],
        [0, 1], [False, True], [[], []])
    report = verify_legality(scop, bad, deps, {})
    print("hand-swapped schedule legal:", report.legal)
    for v in report.violations[:3]:
        print("  violation:", v)
    print(f"  ({len(report.violations)} violations in total)")


if __name__ == "__main__":
    main()
