"""Memory-based dependence analysis over the initial execution order.

For every ordered pair of accesses to the same array (at least one of them
a write) and every common level of the two statements' 2k+1 initial
schedules, a candidate dependence polyhedron is built:

    domains  /\  equal subscripts  /\  equal dates up to level-1
             /\  source date < target date at the level

Candidates that have no rational point under the parameter context are
discarded; splitting per level keeps every kept polyhedron convex.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, replace
from heapq import heappop, heappush

from .errors import SchemaError, UnsupportedAccess
from .ilp import Constraint, INFEASIBLE, _solve_lp
from .scop import Polyhedron, PolyRow, Scop

KINDS = ("RAW", "WAR", "WAW")


@dataclass
class Dependence:
    source: int
    target: int
    kind: str
    array: str
    level: int
    src_access: int
    tgt_access: int
    polyhedron: Polyhedron  # columns: (src iters, tgt iters, params, 1)
    satisfied: bool = False
    satisfied_at: int | None = None

    def clone(self) -> "Dependence":
        return replace(self)


@dataclass(frozen=True)
class DependenceGraph:
    nodes: tuple   # statement indices
    edges: tuple   # unsatisfied Dependences


def default_context(scop: Scop) -> tuple:
    """scop.context, or 'every parameter >= 2' when none is supplied."""
    if scop.context:
        return scop.context
    np = scop.n_params
    rows = []
    for p in range(np):
        row = [0] * (np + 1)
        row[p] = 1
        row[-1] = -2
        rows.append(tuple(row))
    return tuple(rows)


# --------------------------------------------------------------------------
# Feasibility via LP (rational relaxation; conservative for emptiness)
# --------------------------------------------------------------------------

def poly_feasible(poly: Polyhedron, context=(), n_params=0, extra_rows=()):
    """True iff the polyhedron (plus context and extra rows) has a rational
    point.  Integrality is deliberately ignored: an integer-empty but
    rationally nonempty set is conservatively treated as nonempty."""
    ncols = len(poly.columns)
    nvars = ncols - 1
    cons = []
    for r in poly.rows:
        coeffs = {j: c for j, c in enumerate(r.coeffs[:nvars]) if c}
        cons.append(Constraint(coeffs, r.coeffs[-1], r.rel == "="))
    par_base = nvars - n_params
    for row in context:
        coeffs = {par_base + p: c for p, c in enumerate(row[:-1]) if c}
        cons.append(Constraint(coeffs, row[-1], False))
    for rel, coeffs in extra_rows:
        cs = {j: c for j, c in enumerate(coeffs[:nvars]) if c}
        cons.append(Constraint(cs, coeffs[-1], rel == "="))
    bounds = [(None, None)] * nvars
    status, _x, _v = _solve_lp(bounds, cons, {})
    return status != INFEASIBLE


def is_empty(poly: Polyhedron, context=(), n_params=0) -> bool:
    return not poly_feasible(poly, context, n_params)


# --------------------------------------------------------------------------
# Dependence construction
# --------------------------------------------------------------------------

def _map_row(row, width, src_k, tgt_k, np, block):
    """Map a statement-local row (its, params, 1) into dependence columns."""
    out = [0] * width
    k = src_k if block == 0 else tgt_k
    base = 0 if block == 0 else src_k
    for i in range(k):
        out[base + i] = row[i]
    for p in range(np):
        out[src_k + tgt_k + p] = row[k + p]
    out[-1] = row[-1]
    return out


def _add(a, b):
    return [x + y for x, y in zip(a, b)]


def _sub(a, b):
    return [x - y for x, y in zip(a, b)]


def _fold(rows):
    """Drop trivially true rows; return None when a row is trivially false."""
    out = []
    seen = set()
    for rel, coeffs in rows:
        if not any(coeffs[:-1]):
            c = coeffs[-1]
            if (rel == "=" and c != 0) or (rel == ">=" and c < 0):
                return None
            continue
        key = (rel, tuple(coeffs))
        if key not in seen:
            seen.add(key)
            out.append((rel, coeffs))
    return out


def compute_dependences(scop: Scop, context=None) -> list:
    """All RAW/WAR/WAW dependences of the program, in a fixed order
    (source, target, array, level, kind, access indices)."""
    if context is None:
        context = default_context(scop)
    np = scop.n_params
    results = []
    for si, src in enumerate(scop.statements):
        for ti, tgt in enumerate(scop.statements):
            ks, kt = src.depth, tgt.depth
            width = ks + kt + np + 1
            columns = (tuple("s." + n for n in src.iterators)
                       + tuple("t." + n for n in tgt.iterators)
                       + scop.parameters + ("1",))
            base = []
            for r in src.domain.rows:
                base.append((r.rel, _map_row(r.coeffs, width, ks, kt, np, 0)))
            for r in tgt.domain.rows:
                base.append((r.rel, _map_row(r.coeffs, width, ks, kt, np, 1)))

            n_levels = min(2 * ks + 1, 2 * kt + 1)
            for ai, acc_a in enumerate(src.accesses):
                for bi, acc_b in enumerate(tgt.accesses):
                    if acc_a.array != acc_b.array:
                        continue
                    if acc_a.kind != "write" and acc_b.kind != "write":
                        continue
                    if len(acc_a.subscripts) != len(acc_b.subscripts):
                        raise UnsupportedAccess(
                            f"array {acc_a.array!r}: inconsistent subscript "
                            f"counts")
                    kind = ("WAW" if acc_a.kind == acc_b.kind == "write"
                            else "RAW" if acc_a.kind == "write" else "WAR")
                    eqs = []
                    for d in range(len(acc_a.subscripts)):
                        a_row = _map_row(acc_a.subscripts[d], width,
                                         ks, kt, np, 0)
                        b_row = _map_row(acc_b.subscripts[d], width,
                                         ks, kt, np, 1)
                        eqs.append(("=", _sub(a_row, b_row)))
                    for lvl in range(n_levels):
                        rows = list(base) + list(eqs)
                        ok = True
                        for m in range(lvl + 1):
                            s_row = _map_row(src.initial_schedule[m], width,
                                             ks, kt, np, 0)
                            t_row = _map_row(tgt.initial_schedule[m], width,
                                             ks, kt, np, 1)
                            diff = _sub(t_row, s_row)
                            if m < lvl:
                                rows.append(("=", diff))
                            else:
                                diff[-1] -= 1
                                rows.append((">=", diff))
                        folded = _fold(rows)
                        if folded is None:
                            continue
                        poly = Polyhedron(columns, tuple(
                            PolyRow(rel, tuple(c)) for rel, c in folded))
                        if is_empty(poly, context, np):
                            continue
                        results.append(Dependence(
                            si, ti, kind, acc_a.array, lvl, ai, bi, poly))
    results.sort(key=lambda d: (d.source, d.target, d.array, d.level,
                                d.kind, d.src_access, d.tgt_access))
    return results


# --------------------------------------------------------------------------
# Strongly connected components of the dependence graph
# --------------------------------------------------------------------------

def scc_condense(graph: DependenceGraph) -> list:
    """SCCs of the unsatisfied-dependence graph, in a topological order of
    the condensation; ties broken by minimum statement index."""
    nodes = list(graph.nodes)
    adj = {v: [] for v in nodes}
    for dep in graph.edges:
        if dep.satisfied:
            continue
        if dep.source in adj and dep.target in adj:
            adj[dep.source].append(dep.target)

    index = {}
    low = {}
    on_stack = set()
    stack = []
    comp_of = {}
    comps = []
    counter = [0]

    for root in nodes:
        if root in index:
            continue
        work = [(root, 0)]
        while work:
            v, pi = work[-1]
            if pi == 0:
                index[v] = low[v] = counter[0]
                counter[0] += 1
                stack.append(v)
                on_stack.add(v)
            advanced = False
            for wi in range(pi, len(adj[v])):
                w = adj[v][wi]
                if w not in index:
                    work[-1] = (v, wi + 1)
                    work.append((w, 0))
                    advanced = True
                    break
                if w in on_stack:
                    low[v] = min(low[v], index[w])
            if advanced:
                continue
            work.pop()
            if work:
                parent = work[-1][0]
                low[parent] = min(low[parent], low[v])
            if low[v] == index[v]:
                comp = []
                while True:
                    w = stack.pop()
                    on_stack.discard(w)
                    comp_of[w] = len(comps)
                    comp.append(w)
                    if w == v:
                        break
                comps.append(sorted(comp))

    # Topological order of the condensation (Kahn), min-index tie-break.
    n = len(comps)
    cadj = [set() for _ in range(n)]
    indeg = [0] * n
    for v in nodes:
        for w in adj[v]:
            a, b = comp_of[v], comp_of[w]
            if a != b and b not in cadj[a]:
                cadj[a].add(b)
                indeg[b] += 1
    heap = []
    for c in range(n):
        if indeg[c] == 0:
            heappush(heap, (comps[c][0], c))
    order = []
    while heap:
        _, c = heappop(heap)
        order.append(comps[c])
        for b in cadj[c]:
            indeg[b] -= 1
            if indeg[b] == 0:
                heappush(heap, (comps[b][0], b))
    assert len(order) == n
    return order


# --------------------------------------------------------------------------
# JSON round-trip
# --------------------------------------------------------------------------

def dependences_to_json(deps) -> list:
    return [
        {
            "source": d.source,
            "target": d.target,
            "kind": d.kind,
            "array": d.array,
            "level": d.level,
            "src_access": d.src_access,
            "tgt_access": d.tgt_access,
            "satisfied": d.satisfied,
            "satisfied_at": d.satisfied_at,
            "columns": list(d.polyhedron.columns),
            "rows": [{"rel": r.rel, "row": list(r.coeffs)}
                     for r in d.polyhedron.rows],
        }
        for d in deps
    ]


def emit_dependences(deps) -> bytes:
    return (json.dumps(dependences_to_json(deps), indent=1)
            + "\n").encode("utf-8")


def parse_dependences(text, scop: Scop) -> list:
    if isinstance(text, bytes):
        text = text.decode("utf-8")
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as e:
        raise SchemaError(f"invalid JSON: {e}") from None
    if not isinstance(doc, list):
        raise SchemaError("dependence document must be a list")
    out = []
    n = len(scop.statements)
    for i, rd in enumerate(doc):
        what = f"dependence {i}"
        keys = {"source", "target", "kind", "array", "level", "src_access",
                "tgt_access", "satisfied", "satisfied_at", "columns", "rows"}
        extra = set(rd) - keys
        if extra:
            raise SchemaError(f"{what}: unknown keys {sorted(extra)}")
        si, ti = rd.get("source"), rd.get("target")
        if not (isinstance(si, int) and 0 <= si < n):
            raise SchemaError(f"{what}: bad source")
        if not (isinstance(ti, int) and 0 <= ti < n):
            raise SchemaError(f"{what}: bad target")
        if rd.get("kind") not in KINDS:
            raise SchemaError(f"{what}: bad kind")
        width = (scop.statements[si].depth + scop.statements[ti].depth
                 + scop.n_params + 1)
        cols = tuple(rd.get("columns", []))
        if len(cols) != width:
            raise SchemaError(f"{what}: {len(cols)} columns, expected {width}")
        rows = []
        for rr in rd.get("rows", []):
            rel = rr.get("rel")
            if rel not in (">=", "="):
                raise SchemaError(f"{what}: bad rel")
            row = rr.get("row", [])
            if len(row) != width or not all(isinstance(v, int) for v in row):
                raise SchemaError(f"{what}: bad row")
            rows.append(PolyRow(rel, tuple(row)))
        out.append(Dependence(
            si, ti, rd["kind"], rd.get("array", ""), rd.get("level", 0),
            rd.get("src_access", 0), rd.get("tgt_access", 0),
            Polyhedron(cols, tuple(rows)),
            bool(rd.get("satisfied", False)), rd.get("satisfied_at")))
    return out
