"""Post-processing: band tiling and wavefront skewing.

Proximity schedules the stencil as the permutable band {(1,0), (1,1)}.
Neither dimension is parallel, but summing the first two band rows makes
the inner dimension parallel (a wavefront), and the band can be tiled
with externally supplied sizes.  The enumeration trace shows the tile
structure directly.
"""

import json

from polysched import (
    compute_dependences,
    config_from_dict,
    enumerate_dates,
    parse_scop,
    print_loops,
    schedule,
    tile,
    verify_legality,
    wavefront_skew,
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
    deps = compute_dependences(scop)
    band = schedule(scop, deps, config_from_dict({"preset": "pluto-style"}))
    print("band rows:", [tuple(r.it) for r in band.rows[0]],
          "parallel:", band.parallel)

    skewed = wavefront_skew(band, scop, deps, 0)
    print("wavefront rows:", [tuple(r.it) for r in skewed.rows[0]],
          "parallel:", skewed.parallel,
          "legal:", verify_legality(scop, skewed, deps, {}).legal)

    tiled = tile(band, scop, [(2, 2)])
    print("tiled bands:", tiled.bands,
          "legal:", verify_legality(scop, tiled, deps, {}).legal)

    # The skewed band gives ragged tiles; a dependence-free square shows
    # the tile structure more readably.
    square = parse_scop(json.dumps({
        "parameters": [], "context": [],
        "statements": [{
            "name": "S0", "iterators": ["i", "j"],
            "domain": [
                {"rel": ">=", "row": [1, 0, 0]},
                {"rel": ">=", "row": [-1, 0, 3]},
                {"rel": ">=", "row": [0, 1, 0]},
                {"rel": ">=", "row": [0, -1, 3]}],
            "accesses": [{"array": "z", "kind": "write",
                          "subscripts": [[1, 0, 0], [0, 1, 0]]}],
            "initial_schedule": [[0, 0, 0], [1, 0, 0], [0, 0, 0],
                                 [0, 1, 0], [0, 0, 0]],
        }],
    }))
    sdeps = compute_dependences(square)
    stiled = tile(schedule(square, sdeps, config_from_dict({})), square,
                  [(2, 2)])
    print()
    print(print_loops(enumerate_dates(square, stiled, {}), square, stiled))


if __name__ == "__main__":
    main()
