"""Enumeration oracle: dates, legality, parallel flags, loop sketches.

The verifier fixes every parameter to a small integer, enumerates actual
integer points, and checks the schedule against them.  The scheduler
already guarantees legality symbolically through the Farkas construction;
enumeration is the independent cross-check, so nothing here shares code
with the constraint machinery.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field

from .deps import default_context
from .errors import BudgetExceeded, UnboundedDomain
from .ilp import Constraint, INFEASIBLE, UNBOUNDED, _solve_lp
from .scop import Schedule, Scop

DEFAULT_BUDGET = 100_000


@dataclass
class InstanceTrace:
    """Statement instances with their dates, sorted by date then statement."""

    entries: list  # (stmt_idx, iteration vector, date vector)

    def __len__(self):
        return len(self.entries)


@dataclass
class Report:
    violations: list = field(default_factory=list)
    parallel_flag_errors: list = field(default_factory=list)
    instances_checked: int = 0

    @property
    def legal(self) -> bool:
        return not self.violations and not self.parallel_flag_errors

    def to_json(self) -> dict:
        return {
            "violations": self.violations,
            "parallel_flag_errors": self.parallel_flag_errors,
            "instances_checked": self.instances_checked,
        }

    def emit(self) -> bytes:
        return (json.dumps(self.to_json(), indent=1) + "\n").encode("utf-8")


# --------------------------------------------------------------------------
# Integer point enumeration
# --------------------------------------------------------------------------

def _substitute_params(rows, nvars, pvals):
    """Rows over (vars, params, 1) -> rows over (vars, 1) with params fixed."""
    out = []
    for rel, coeffs in rows:
        const = coeffs[-1]
        for p, v in zip(pvals, coeffs[nvars:-1]):
            const += v * p
        out.append((rel, tuple(coeffs[:nvars]) + (const,)))
    return out


def _lp_bound(rows, nvars, prefix, level, maximize):
    cons = []
    for rel, coeffs in rows:
        cs = {j: c for j, c in enumerate(coeffs[:nvars]) if c}
        cons.append(Constraint(cs, coeffs[-1], rel == "="))
    for j, v in enumerate(prefix):
        cons.append(Constraint({j: 1}, -v, True))
    obj = {level: -1 if maximize else 1}
    status, x, _v = _solve_lp([(None, None)] * nvars, cons, obj)
    if status == UNBOUNDED:
        raise UnboundedDomain(f"variable {level} unbounded")
    if status == INFEASIBLE:
        return None
    return x[level]


def _enum_points(rows, nvars, budget):
    """Integer points of conjunction ``rows`` over ``nvars`` variables.

    Bounds for each variable come from the rows whose deepest variable is
    that one; when a side is missing (non-triangular constraints), an
    exact LP supplies it.  Raises UnboundedDomain / BudgetExceeded.
    """
    for rel, coeffs in rows:
        if not any(coeffs[:-1]):
            c = coeffs[-1]
            if (rel == "=" and c != 0) or (rel == ">=" and c < 0):
                return
    by_level = [[] for _ in range(nvars)]
    for rel, coeffs in rows:
        deepest = max((j for j in range(nvars) if coeffs[j]), default=-1)
        if deepest >= 0:
            by_level[deepest].append((rel, coeffs))

    count = 0
    prefix = [0] * nvars

    def scan(level):
        nonlocal count
        if level == nvars:
            count += 1
            if count > budget:
                raise BudgetExceeded(f"more than {budget} points")
            yield tuple(prefix)
            return
        lo = hi = None
        feasible = True
        for rel, coeffs in by_level[level]:
            c = coeffs[level]
            rest = coeffs[-1]
            for j in range(level):
                if coeffs[j]:
                    rest += coeffs[j] * prefix[j]
            if rel == "=":
                if rest % c:
                    feasible = False
                    break
                v = -rest // c
                lo = v if lo is None or v > lo else lo
                hi = v if hi is None or v < hi else hi
            elif c > 0:
                v = math.ceil(-rest / c)
                lo = v if lo is None or v > lo else lo
            else:
                v = math.floor(rest / -c)
                hi = v if hi is None or v < hi else hi
        if not feasible:
            return
        if lo is None:
            b = _lp_bound(rows, nvars, prefix[:level], level, False)
            if b is None:
                return
            lo = math.ceil(b)
        if hi is None:
            b = _lp_bound(rows, nvars, prefix[:level], level, True)
            if b is None:
                return
            hi = math.floor(b)
        for v in range(lo, hi + 1):
            prefix[level] = v
            yield from scan(level + 1)

    if nvars == 0:
        yield ()
        return
    yield from scan(0)


# --------------------------------------------------------------------------
# Dates and legality
# --------------------------------------------------------------------------

def _pvals(scop: Scop, params) -> list:
    return [params[p] for p in scop.parameters]


def enumerate_dates(scop: Scop, sched: Schedule, params,
                    budget=DEFAULT_BUDGET) -> InstanceTrace:
    """Evaluate every statement instance through its schedule rows."""
    pvals = _pvals(scop, params)
    entries = []
    left = budget
    for si, st in enumerate(scop.statements):
        rows = _substitute_params([(r.rel, r.coeffs) for r in st.domain.rows],
                                  st.depth, pvals)
        n = 0
        for pt in _enum_points(rows, st.depth, left):
            entries.append((si, pt, sched.date(si, pt, params, scop)))
            n += 1
        left -= n
    entries.sort(key=lambda e: (e[2], e[0]))
    return InstanceTrace(entries)


def check_injective(trace: InstanceTrace):
    """Duplicate (statement, date) pairs; empty when the schedule is a
    bijection on each domain."""
    seen = {}
    dups = []
    for si, pt, date in trace.entries:
        key = (si, date)
        if key in seen:
            dups.append((si, seen[key], pt, date))
        else:
            seen[key] = pt
    return dups


def _dep_points(dep, scop, pvals, budget):
    ks = scop.statements[dep.source].depth
    kt = scop.statements[dep.target].depth
    rows = _substitute_params(
        [(r.rel, r.coeffs) for r in dep.polyhedron.rows], ks + kt, pvals)
    yield from _enum_points(rows, ks + kt, budget)


def verify_legality(scop: Scop, sched: Schedule, deps, params,
                    budget=DEFAULT_BUDGET) -> Report:
    """Check every dependence instance pair and every parallel flag by
    exhaustive enumeration at the given parameter values."""
    pvals = _pvals(scop, params)
    for row in default_context(scop):
        v = row[-1] + sum(c * p for c, p in zip(row[:-1], pvals))
        if v < 0:
            raise ValueError(
                f"parameter values {params} violate the context")
    report = Report()
    par_dims = [d for d, f in enumerate(sched.parallel) if f]
    date_cache = [dict() for _ in scop.statements]

    def date_of(si, pt):
        hit = date_cache[si].get(pt)
        if hit is None:
            hit = sched.date(si, pt, params, scop)
            date_cache[si][pt] = hit
        return hit

    for di, dep in enumerate(deps):
        ks = scop.statements[dep.source].depth
        for pt in _dep_points(dep, scop, pvals, budget):
            report.instances_checked += 1
            src = pt[:ks]
            tgt = pt[ks:]
            ds = date_of(dep.source, src)
            dt = date_of(dep.target, tgt)
            if not ds < dt:
                report.violations.append({
                    "dependence": di, "kind": dep.kind, "array": dep.array,
                    "source": list(src), "target": list(tgt),
                    "source_date": list(ds), "target_date": list(dt),
                })
            for d in par_dims:
                if ds[:d] == dt[:d] and ds[d] != dt[d]:
                    report.parallel_flag_errors.append({
                        "dimension": d, "dependence": di,
                        "source": list(src), "target": list(tgt),
                    })
    return report


# --------------------------------------------------------------------------
# Loop sketch
# --------------------------------------------------------------------------

def _row_expr(sched: Schedule, si: int, d: int, scop: Scop) -> str:
    row = sched.rows[si][d]
    tiles = sched.tile_iters[si]
    names = [t.name for t in tiles] + list(scop.statements[si].iterators)
    terms = []
    for c, name in zip(row.it, names):
        if c == 1:
            terms.append(name)
        elif c:
            terms.append(f"{c}*{name}")
    for c, name in zip(row.par, scop.parameters):
        if c == 1:
            terms.append(name)
        elif c:
            terms.append(f"{c}*{name}")
    if row.const or not terms:
        terms.append(str(row.const))
    return "+".join(terms)


def print_loops(trace: InstanceTrace, scop: Scop,
                sched: Schedule | None = None) -> str:
    """Reconstruct an indented pseudo-loop sketch from a sorted trace.

    Consecutive subtrees with the same shape collapse into a single loop
    line; statement names sit at the leaves.  Purely presentational.
    """
    entries = trace.entries
    if not entries:
        return ""
    depth = len(entries[0][2])

    def build(lo, hi, d):
        if d == depth:
            names = sorted({scop.statements[si].name
                            for si, _p, _dt in entries[lo:hi]})
            return ("leaf", tuple(names)), ("leaf", names)
        children = []
        i = lo
        while i < hi:
            v = entries[i][2][d]
            j = i
            while j < hi and entries[j][2][d] == v:
                j += 1
            sig, render = build(i, j, d + 1)
            children.append((v, sig, render))
            i = j
        runs = []
        for v, sig, render in children:
            if runs and runs[-1][0] == sig:
                runs[-1][2] = v
                runs[-1][3] += 1
            else:
                runs.append([sig, v, v, 1, render])
        node_sig = ("node", tuple((r[0], r[3] > 1) for r in runs))
        return node_sig, ("node", d, runs)

    _sig, root = build(0, len(entries), 0)
    lines = []

    def loop_name(d, lo, hi):
        stmts = {si for si, _p, _dt in entries[lo:hi]}
        if sched is not None:
            exprs = {_row_expr(sched, si, d, scop) for si in stmts}
            if len(exprs) == 1:
                return exprs.pop()
        return f"c{d}"

    def emit(render, indent, lo, hi):
        kind = render[0]
        if kind == "leaf":
            lines.append("  " * indent + "; ".join(render[1]))
            return
        _k, d, runs = render
        i = lo
        for sig, vlo, vhi, count, first in runs:
            # size of this run's span within entries
            j = i
            seen = 0
            while j < hi and seen < count:
                v = entries[j][2][d]
                k = j
                while k < hi and entries[k][2][d] == v:
                    k += 1
                seen += 1
                j = k
            if count > 1:
                lines.append("  " * indent +
                             f"for {loop_name(d, i, j)} = {vlo}..{vhi}:")
                # render the first child's span only
                v0 = entries[i][2][d]
                k = i
                while k < j and entries[k][2][d] == v0:
                    k += 1
                emit(first, indent + 1, i, k)
            else:
                emit(first, indent, i, j)
            i = j

    emit(root, 0, 0, len(entries))
    return "\n".join(lines) + "\n"
