"""Band-based tiling with externally supplied sizes, and wavefront skewing.

Tiling a band of width w spawns, for every dimension tiled at size s >= 2,
an auxiliary tile iterator tau with s*tau <= phi <= s*tau + s - 1; the tile
loops run ahead of the band as their own band.  Tile sizes are never
chosen here: they arrive with the configuration.  Size 1 leaves a
dimension untouched.

Within a band all dependence distances are non-negative on every
dimension (that is what makes it a band), so the tile-space order is
dominated by the point-space order and legality is preserved; the
enumeration verifier re-checks this independently in the tests.
"""

from __future__ import annotations

from .deps import default_context
from .errors import BandNotTilable, NotABand, NotApplicable
from .scop import Schedule, ScheduleRow, TileIter
from .scheduler import (
    dep_strongly_satisfied,
    detect_parallel,
    remove_satisfied,
)


def _band_layout(sched: Schedule):
    n_bands = max(sched.bands) + 1 if sched.bands else 0
    return [sched.band_dims(b) for b in range(n_bands)]


def tile(sched: Schedule, scop, spec) -> Schedule:
    """Apply per-band tile sizes; ``spec[b]`` lists one size per dimension
    of band ``b`` (missing or empty entries leave the band untiled)."""
    if any(sched.tile_iters):
        raise NotABand("schedule is already tiled")
    layout = _band_layout(sched)
    plans = {}  # band -> list of (dim, size) to tile
    for b, sizes in enumerate(spec):
        if not sizes:
            continue
        if b >= len(layout):
            raise NotABand(f"no band {b} in this schedule")
        dims = layout[b]
        if len(dims) < 2:
            raise BandNotTilable(f"band {b} has width {len(dims)}")
        if len(sizes) != len(dims):
            raise BandNotTilable(
                f"band {b}: {len(sizes)} sizes for {len(dims)} dimensions")
        if any(s < 1 for s in sizes):
            raise BandNotTilable(f"band {b}: sizes must be >= 1")
        chosen = [(d, s) for d, s in zip(dims, sizes) if s > 1]
        if chosen:
            plans[b] = chosen
    if not plans:
        return Schedule([list(r) for r in sched.rows], list(sched.bands),
                        list(sched.parallel),
                        [[] for _ in sched.rows], list(sched.dim_costs))

    tile_dims = []  # (dim, size) in emission order
    new_bands = []
    new_parallel = []
    order = []      # ("tile", idx into tile_dims) | ("point", dim)
    next_band = 0
    for b, dims in enumerate(layout):
        chosen = plans.get(b)
        if chosen:
            for d, s in chosen:
                order.append(("tile", len(tile_dims)))
                tile_dims.append((d, s))
                new_bands.append(next_band)
                new_parallel.append(sched.parallel[d])
            next_band += 1
        for d in dims:
            order.append(("point", d))
            new_bands.append(next_band)
            new_parallel.append(sched.parallel[d])
        next_band += 1

    nt = len(tile_dims)
    new_rows = []
    new_tiles = []
    for si in range(len(sched.rows)):
        tiles = [TileIter(f"tt{d}", s, sched.rows[si][d])
                 for d, s in tile_dims]
        rows = []
        for what, x in order:
            if what == "tile":
                it = [0] * nt
                it[x] = 1
                rows.append(ScheduleRow(
                    tuple(it) + (0,) * len(sched.rows[si][0].it),
                    (0,) * len(sched.rows[si][0].par), 0))
            else:
                r = sched.rows[si][x]
                rows.append(ScheduleRow((0,) * nt + tuple(r.it),
                                        r.par, r.const))
        new_rows.append(rows)
        new_tiles.append(tiles)
    return Schedule(new_rows, new_bands, new_parallel, new_tiles,
                    [("tile",)] * len(new_bands))


def wavefront_skew(sched: Schedule, scop, deps, band: int,
                   context=None) -> Schedule:
    """Replace the band's first row by the sum of its first two rows.

    Applicable when the band has width >= 2, its first dimension is not
    parallel, and some later band dimension is parallel within the band
    (its distances vanish for every dependence not carried elsewhere in
    the band).  Summing rows with non-negative distances keeps every
    distance non-negative, so legality is preserved; parallel flags are
    recomputed from scratch.
    """
    if any(sched.tile_iters):
        raise NotApplicable("wavefront skewing applies before tiling")
    if context is None:
        context = default_context(scop)
    layout = _band_layout(sched)
    if not 0 <= band < len(layout):
        raise NotABand(f"no band {band} in this schedule")
    dims = layout[band]
    if len(dims) < 2:
        raise NotApplicable(f"band {band} has width {len(dims)}")
    if sched.parallel[dims[0]]:
        raise NotApplicable("first band dimension is already parallel")

    working = [d.clone() for d in deps]
    for d in working:
        d.satisfied = False
        d.satisfied_at = None
    nstmt = len(sched.rows)
    for dm in range(dims[0]):
        dim_rows = [sched.rows[si][dm] for si in range(nstmt)]
        working = remove_satisfied(working, scop, dim_rows, dm, context)

    def carried_at(dep, dm):
        dim_rows = [sched.rows[si][dm] for si in range(nstmt)]
        return dep_strongly_satisfied(dep, scop, dim_rows, context)

    found = False
    for dm in dims[1:]:
        ok = True
        for dep in working:
            dim_rows = [sched.rows[si][dm] for si in range(nstmt)]
            if detect_parallel(scop, dim_rows, [dep], context):
                continue
            if any(carried_at(dep, other) for other in dims if other != dm):
                continue
            ok = False
            break
        if ok:
            found = True
            break
    if not found:
        raise NotApplicable("no band dimension becomes parallel by skewing")

    d0, d1 = dims[0], dims[1]
    new_rows = []
    for si in range(nstmt):
        rows = list(sched.rows[si])
        a, b = rows[d0], rows[d1]
        rows[d0] = ScheduleRow(tuple(x + y for x, y in zip(a.it, b.it)),
                               tuple(x + y for x, y in zip(a.par, b.par)),
                               a.const + b.const)
        new_rows.append(rows)

    flags = []
    working = [d.clone() for d in deps]
    for d in working:
        d.satisfied = False
        d.satisfied_at = None
    for dm in range(len(sched.bands)):
        dim_rows = [new_rows[si][dm] for si in range(nstmt)]
        pending = [d for d in working if not d.satisfied]
        flags.append(detect_parallel(scop, dim_rows, pending, context))
        working = remove_satisfied(working, scop, dim_rows, dm, context)
    return Schedule(new_rows, list(sched.bands), flags,
                    [[] for _ in range(nstmt)],
                    [("wavefront",)] * len(sched.bands))
