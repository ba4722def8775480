"""Program model: statements, domains, accesses, schedules, and their JSON forms.

The input format ("mini-SCoP") is a single JSON document:

    {
      "parameters": ["N"],
      "context": [[1, -2]],                       # rows over (params, 1), >= 0
      "statements": [
        {
          "name": "S0",
          "iterators": ["i", "j"],
          "domain": [{"rel": ">=", "row": [1, 0, 0, 0]}, ...],
          "accesses": [
            {"array": "a", "kind": "read", "subscripts": [[0,1,0,0], ...]}
          ],
          "initial_schedule": [[0,0,0,0], [1,0,0,0], ...]   # 2k+1 rows
        }
      ]
    }

All rows use the column order: iterators, parameters, constant.  Statement
indices are their positions in the "statements" array (textual order).

Schedules are serialized as:

    {
      "statements": [{"name": "S0", "rows": [{"it": [...], "par": [...],
                                              "const": 0}, ...]}, ...],
      "bands": [0, 1, 1],
      "parallel": [false, true, true]
    }

Tiled schedules additionally carry, per statement, "tile_iterators" (name,
size, and the source row phi) and "tile_constraints" materializing
s*tau <= phi <= s*tau + s - 1 over the extended column order
(tile iterators, iterators, parameters, constant).
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field

from .errors import (
    BadInitialSchedule,
    DimensionMismatch,
    IncompleteSchedule,
    SchemaError,
)


@dataclass(frozen=True)
class PolyRow:
    rel: str  # ">=" or "="
    coeffs: tuple

    def __post_init__(self):
        if self.rel not in (">=", "="):
            raise SchemaError(f"bad relation {self.rel!r}")


@dataclass(frozen=True)
class Polyhedron:
    """Affine relations over an explicitly named column layout."""

    columns: tuple  # names; last column is the constant "1"
    rows: tuple     # PolyRow

    def __post_init__(self):
        for r in self.rows:
            if len(r.coeffs) != len(self.columns):
                raise DimensionMismatch(
                    f"row width {len(r.coeffs)} != {len(self.columns)} columns")


@dataclass(frozen=True)
class Access:
    array: str
    kind: str  # "read" | "write"
    subscripts: tuple  # rows over (iterators, params, 1); index 0 slowest


@dataclass(frozen=True)
class Statement:
    name: str
    iterators: tuple
    domain: Polyhedron
    accesses: tuple
    initial_schedule: tuple  # 2k+1 rows over (iterators, params, 1)

    @property
    def depth(self) -> int:
        return len(self.iterators)


@dataclass(frozen=True)
class Scop:
    parameters: tuple
    statements: tuple
    context: tuple = ()  # rows over (params, 1), each meaning row >= 0

    @property
    def n_params(self) -> int:
        return len(self.parameters)

    def row_width(self, stmt: Statement) -> int:
        return stmt.depth + self.n_params + 1


# --------------------------------------------------------------------------
# Schedules
# --------------------------------------------------------------------------

@dataclass(frozen=True)
class ScheduleRow:
    """One affine schedule dimension for one statement.

    ``it`` spans the statement's extended iterator space: tile iterators
    first (when the schedule is tiled), then the original iterators.
    """

    it: tuple
    par: tuple
    const: int

    def normalized(self) -> "ScheduleRow":
        from math import gcd
        g = 0
        for v in (*self.it, *self.par, self.const):
            g = gcd(g, abs(v))
        if g <= 1:
            return self
        return ScheduleRow(tuple(v // g for v in self.it),
                           tuple(v // g for v in self.par), self.const // g)


@dataclass(frozen=True)
class TileIter:
    """Auxiliary iterator tau with s*tau <= phi <= s*tau + s - 1."""

    name: str
    size: int
    row: ScheduleRow  # phi, over the original iterator space


@dataclass
class Schedule:
    rows: list          # per statement: list[ScheduleRow]
    bands: list         # band index per dimension, non-decreasing
    parallel: list      # bool per dimension
    tile_iters: list = None   # per statement: list[TileIter]
    dim_costs: list = field(default_factory=list)  # bookkeeping, not serialized

    def __post_init__(self):
        if self.tile_iters is None:
            self.tile_iters = [[] for _ in self.rows]

    @property
    def n_dims(self) -> int:
        return len(self.bands)

    def band_dims(self, band: int) -> list:
        return [d for d, b in enumerate(self.bands) if b == band]

    def date(self, stmt_idx: int, point: tuple, params: dict, scop: Scop):
        """Exact integer date vector of one statement instance."""
        st = scop.statements[stmt_idx]
        pvals = [params[p] for p in scop.parameters]
        taus = []
        for t in self.tile_iters[stmt_idx]:
            phi = _row_value(t.row, point, pvals)
            taus.append(phi // t.size)
        ext = (*taus, *point)
        out = []
        for row in self.rows[stmt_idx]:
            v = row.const
            for c, x in zip(row.it, ext):
                if c:
                    v += c * x
            for c, x in zip(row.par, pvals):
                if c:
                    v += c * x
            out.append(v)
        return tuple(out)


def _row_value(row: ScheduleRow, point, pvals) -> int:
    v = row.const
    for c, x in zip(row.it, point):
        if c:
            v += c * x
    for c, x in zip(row.par, pvals):
        if c:
            v += c * x
    return v


# --------------------------------------------------------------------------
# Parsing
# --------------------------------------------------------------------------

def _require(cond, exc, msg):
    if not cond:
        raise exc(msg)


def _int_row(raw, width, what):
    _require(isinstance(raw, list), SchemaError, f"{what}: row must be a list")
    _require(all(isinstance(v, int) and not isinstance(v, bool) for v in raw),
             SchemaError, f"{what}: row entries must be integers")
    if len(raw) != width:
        raise DimensionMismatch(f"{what}: row width {len(raw)}, expected {width}")
    return tuple(raw)


def _check_keys(obj, allowed, what):
    _require(isinstance(obj, dict), SchemaError, f"{what} must be an object")
    extra = set(obj) - set(allowed)
    _require(not extra, SchemaError, f"{what}: unknown keys {sorted(extra)}")


def parse_scop(text) -> Scop:
    """Parse and fully validate a mini-SCoP document (str or bytes)."""
    if isinstance(text, bytes):
        text = text.decode("utf-8")
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as e:
        raise SchemaError(f"invalid JSON: {e}") from None
    _check_keys(doc, {"parameters", "context", "statements"}, "document")
    params = doc.get("parameters", [])
    _require(isinstance(params, list) and
             all(isinstance(p, str) for p in params),
             SchemaError, "parameters must be a list of strings")
    _require(len(set(params)) == len(params), SchemaError,
             "duplicate parameter names")
    np = len(params)
    context = tuple(_int_row(r, np + 1, "context") for r in doc.get("context", []))

    raw_stmts = doc.get("statements")
    _require(isinstance(raw_stmts, list), SchemaError,
             "statements must be a list")
    statements = []
    array_dims = {}
    for idx, rs in enumerate(raw_stmts):
        what = f"statement {idx}"
        _check_keys(rs, {"name", "iterators", "domain", "accesses",
                         "initial_schedule"}, what)
        name = rs.get("name", f"S{idx}")
        _require(isinstance(name, str), SchemaError, f"{what}: name")
        iters = rs.get("iterators", [])
        _require(isinstance(iters, list) and
                 all(isinstance(i, str) for i in iters),
                 SchemaError, f"{what}: iterators")
        _require(len(set(iters)) == len(iters), SchemaError,
                 f"{what}: duplicate iterator names")
        k = len(iters)
        width = k + np + 1

        dom_rows = []
        for rr in rs.get("domain", []):
            _check_keys(rr, {"rel", "row"}, f"{what} domain row")
            rel = rr.get("rel", ">=")
            _require(rel in (">=", "="), SchemaError,
                     f"{what}: domain rel {rel!r}")
            dom_rows.append(PolyRow(rel, _int_row(rr.get("row"), width,
                                                  f"{what} domain")))
        domain = Polyhedron(tuple(iters) + tuple(params) + ("1",),
                            tuple(dom_rows))

        accesses = []
        for ai, ra in enumerate(rs.get("accesses", [])):
            aw = f"{what} access {ai}"
            _check_keys(ra, {"array", "kind", "subscripts"}, aw)
            arr = ra.get("array")
            _require(isinstance(arr, str), SchemaError, f"{aw}: array")
            kind = ra.get("kind")
            _require(kind in ("read", "write"), SchemaError,
                     f"{aw}: kind {kind!r}")
            subs = tuple(_int_row(r, width, aw)
                         for r in ra.get("subscripts", []))
            if arr in array_dims:
                _require(array_dims[arr] == len(subs), SchemaError,
                         f"{aw}: array {arr!r} used with "
                         f"{len(subs)} subscripts, previously "
                         f"{array_dims[arr]}")
            else:
                array_dims[arr] = len(subs)
            accesses.append(Access(arr, kind, subs))

        raw_init = rs.get("initial_schedule")
        _require(isinstance(raw_init, list), BadInitialSchedule,
                 f"{what}: initial_schedule missing")
        if len(raw_init) != 2 * k + 1:
            raise BadInitialSchedule(
                f"{what}: initial_schedule has {len(raw_init)} rows, "
                f"expected {2 * k + 1}")
        init = []
        for ri, rr in enumerate(raw_init):
            row = _int_row(rr, width, f"{what} initial_schedule")
            if ri % 2 == 0 and any(row[:k + np]):
                raise BadInitialSchedule(
                    f"{what}: initial_schedule row {ri} must be a constant")
            init.append(row)

        statements.append(Statement(name, tuple(iters), domain,
                                    tuple(accesses), tuple(init)))
    names = [s.name for s in statements]
    _require(len(set(names)) == len(names), SchemaError,
             "duplicate statement names")
    return Scop(tuple(params), tuple(statements), context)


def scop_to_json(scop: Scop) -> dict:
    return {
        "parameters": list(scop.parameters),
        "context": [list(r) for r in scop.context],
        "statements": [
            {
                "name": st.name,
                "iterators": list(st.iterators),
                "domain": [{"rel": r.rel, "row": list(r.coeffs)}
                           for r in st.domain.rows],
                "accesses": [
                    {"array": a.array, "kind": a.kind,
                     "subscripts": [list(s) for s in a.subscripts]}
                    for a in st.accesses
                ],
                "initial_schedule": [list(r) for r in st.initial_schedule],
            }
            for st in scop.statements
        ],
    }


def emit_scop(scop: Scop) -> bytes:
    return (json.dumps(scop_to_json(scop), indent=1) + "\n").encode("utf-8")


# --------------------------------------------------------------------------
# Schedule serialization
# --------------------------------------------------------------------------

def _tile_constraint_rows(st: Statement, tiles, np: int):
    """Materialize s*tau <= phi <= s*tau + s - 1 over (taus, its, params, 1)."""
    nt = len(tiles)
    width = nt + st.depth + np + 1
    rows = []
    for ti, t in enumerate(tiles):
        lo = [0] * width
        hi = [0] * width
        lo[ti] = -t.size
        hi[ti] = t.size
        for k, c in enumerate(t.row.it):
            lo[nt + k] = c
            hi[nt + k] = -c
        for p, c in enumerate(t.row.par):
            lo[nt + st.depth + p] = c
            hi[nt + st.depth + p] = -c
        lo[-1] = t.row.const
        hi[-1] = -t.row.const + t.size - 1
        rows.append({"rel": ">=", "row": lo})   # phi - s*tau >= 0
        rows.append({"rel": ">=", "row": hi})   # s*tau + s - 1 - phi >= 0
    return rows


def schedule_to_json(scop: Scop, sched: Schedule) -> dict:
    if len(sched.rows) != len(scop.statements):
        raise IncompleteSchedule(
            f"schedule covers {len(sched.rows)} statements, "
            f"program has {len(scop.statements)}")
    n_dims = sched.n_dims
    stmts = []
    for si, st in enumerate(scop.statements):
        rows = sched.rows[si]
        if len(rows) != n_dims:
            raise IncompleteSchedule(
                f"statement {st.name}: {len(rows)} rows, expected {n_dims}")
        entry = {"name": st.name}
        tiles = sched.tile_iters[si]
        if tiles:
            entry["tile_iterators"] = [
                {"name": t.name, "size": t.size,
                 "row": {"it": list(t.row.it), "par": list(t.row.par),
                         "const": t.row.const}}
                for t in tiles
            ]
            entry["tile_constraints"] = _tile_constraint_rows(
                st, tiles, scop.n_params)
        entry["rows"] = [{"it": list(r.it), "par": list(r.par),
                          "const": r.const} for r in rows]
        stmts.append(entry)
    return {
        "statements": stmts,
        "bands": list(sched.bands),
        "parallel": [bool(b) for b in sched.parallel],
    }


def _schedule_matrix_text(scop: Scop, sched: Schedule) -> str:
    lines = []
    for si, st in enumerate(scop.statements):
        lines.append(f"{st.name}:")
        for t in sched.tile_iters[si]:
            lines.append(f"  tile {t.name} size {t.size} of "
                         f"[{' '.join(map(str, t.row.it))} | "
                         f"{' '.join(map(str, t.row.par))} | {t.row.const}]")
        for r in sched.rows[si]:
            lines.append(f"  [{' '.join(map(str, r.it))} | "
                         f"{' '.join(map(str, r.par))} | {r.const}]")
    lines.append("bands: " + " ".join(map(str, sched.bands)))
    lines.append("parallel: " +
                 " ".join("1" if p else "0" for p in sched.parallel))
    return "\n".join(lines) + "\n"


def emit_schedule(scop: Scop, sched: Schedule, format: str = "json") -> bytes:
    """Deterministic, byte-stable schedule serialization."""
    if format == "json":
        return (json.dumps(schedule_to_json(scop, sched), indent=1)
                + "\n").encode("utf-8")
    if format == "matrix-text":
        return _schedule_matrix_text(scop, sched).encode("utf-8")
    raise ValueError(f"unknown format {format!r}")


def parse_schedule(text, scop: Scop) -> Schedule:
    if isinstance(text, bytes):
        text = text.decode("utf-8")
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as e:
        raise SchemaError(f"invalid JSON: {e}") from None
    _check_keys(doc, {"statements", "bands", "parallel"}, "schedule")
    raw_stmts = doc.get("statements", [])
    by_name = {}
    for rs in raw_stmts:
        _check_keys(rs, {"name", "rows", "tile_iterators", "tile_constraints"},
                    "schedule statement")
        by_name[rs.get("name")] = rs
    bands = doc.get("bands", [])
    parallel = doc.get("parallel", [])
    _require(all(isinstance(b, int) for b in bands), SchemaError, "bands")
    n_dims = len(bands)
    _require(len(parallel) == n_dims, SchemaError,
             "parallel length != bands length")

    rows = []
    tile_iters = []
    for st in scop.statements:
        rs = by_name.get(st.name)
        if rs is None:
            raise IncompleteSchedule(f"schedule missing statement {st.name}")
        tiles = []
        for rt in rs.get("tile_iterators", []):
            _check_keys(rt, {"name", "size", "row"}, "tile iterator")
            row = rt.get("row", {})
            _check_keys(row, {"it", "par", "const"}, "tile row")
            tiles.append(TileIter(
                rt.get("name"), int(rt.get("size")),
                ScheduleRow(tuple(row.get("it", [])),
                            tuple(row.get("par", [])),
                            int(row.get("const", 0)))))
        ext = len(tiles) + st.depth
        srows = []
        raw_rows = rs.get("rows", [])
        if len(raw_rows) != n_dims:
            raise IncompleteSchedule(
                f"statement {st.name}: {len(raw_rows)} rows, "
                f"expected {n_dims}")
        for rr in raw_rows:
            _check_keys(rr, {"it", "par", "const"}, "schedule row")
            it = tuple(rr.get("it", []))
            par = tuple(rr.get("par", []))
            if len(it) != ext or len(par) != scop.n_params:
                raise DimensionMismatch(
                    f"statement {st.name}: schedule row width mismatch")
            srows.append(ScheduleRow(it, par, int(rr.get("const", 0))))
        rows.append(srows)
        tile_iters.append(tiles)
    return Schedule(rows, list(bands), [bool(p) for p in parallel],
                    tile_iters)


# --------------------------------------------------------------------------
# Initial schedule as a Schedule object
# --------------------------------------------------------------------------

def initial_as_schedule(scop: Scop) -> Schedule:
    """The original execution order, compressed into a Schedule.

    Statements' 2k+1 initial schedules are aligned by level (shorter ones
    padded with zero rows), then scalar levels whose constants are equal
    across all statements are dropped: they separate nothing.  The result
    is legal by construction and keeps per-statement iterator rows intact.
    """
    nstmts = len(scop.statements)
    np = len(scop.parameters)
    if nstmts == 0:
        return Schedule([], [], [], [])
    max_len = max(2 * st.depth + 1 for st in scop.statements)
    levels = []  # per level: list of ScheduleRow per statement
    for lvl in range(max_len):
        per_stmt = []
        for st in scop.statements:
            if lvl < len(st.initial_schedule):
                raw = st.initial_schedule[lvl]
                per_stmt.append(ScheduleRow(tuple(raw[:st.depth]),
                                            tuple(raw[st.depth:st.depth + np]),
                                            raw[-1]))
            else:
                per_stmt.append(ScheduleRow((0,) * st.depth, (0,) * np, 0))
        levels.append(per_stmt)

    rows = [[] for _ in range(nstmts)]
    bands = []
    parallel = []
    band = 0
    for per_stmt in levels:
        scalar = all(not any(r.it) and not any(r.par) for r in per_stmt)
        if scalar:
            consts = {r.const for r in per_stmt}
            if len(consts) <= 1:
                continue  # separates nothing
        for si, r in enumerate(per_stmt):
            rows[si].append(r)
        bands.append(band)
        parallel.append(False)
        if scalar:
            band += 1
    return Schedule(rows, bands, parallel, [[] for _ in range(nstmts)])
