"""Iterative affine scheduler.

One schedule dimension is computed per iteration, outermost first.  Each
dimension is either a distribution (constant rows separating statement
groups) or the solution of an exact ILP combining:

  * legality rows: for every unsatisfied dependence, the Farkas
    linearization of phi_target - phi_source >= 0 over the dependence
    polyhedron and the parameter context;
  * progression rows: the integer-scaled orthogonal complement of the
    iterator parts already found forces every new row to add rank;
  * custom constraint rows and probed directive rows;
  * cost objectives (proximity, feautrier, contiguity, bigLoopsFirst or a
    user variable), followed by deterministic tie-breaks.

When the ILP is infeasible the scheduler removes dependences already
strongly satisfied, closes the band and retries; if that fails too, the
strongly connected components of the remaining dependence graph are
distributed.  A schedule that stops making progress falls back to the
initial execution order, which is always legal; with custom constraints or
forced fusion in play the same situation raises ConfigInfeasible instead.
"""

from __future__ import annotations

import os
import sys
import warnings
from dataclasses import dataclass

from .config import (
    Config,
    DimensionPlan,
    SchedulingState,
    compile_plan,
    effective_directives,
)
from .deps import (
    DependenceGraph,
    compute_dependences,
    default_context,
    poly_feasible,
    scc_condense,
)
from .errors import (
    ConfigInfeasible,
    FullyScheduledStatement,
    IllegalDistribution,
    NonRectangularDomain,
    UnknownCost,
)
from .ilp import INFEASIBLE, OPTIMAL, IlpProblem, solve_lex_min
from .rational import RatMatrix, orthogonal_complement
from .scop import Schedule, ScheduleRow, Scop, initial_as_schedule

_DEBUG_LP = bool(os.environ.get("POLYSCHED_DEBUG_LP"))


# --------------------------------------------------------------------------
# Farkas linearization
# --------------------------------------------------------------------------

def farkas_linearize(ilp: IlpProblem, poly_rows, ncols, form_cols, prefix):
    """Equate an affine form with a non-negative combination of rows.

    ``poly_rows`` are (rel, coeffs) over ``ncols`` columns (constant last);
    equality rows are split into opposite inequalities so that every row
    gets one non-negative multiplier.  ``form_cols`` gives, per column, the
    form's coefficient as (var->coef dict, constant).  The emitted
    equalities state form == lambda0 + sum(lambda_k * row_k); with all
    multipliers >= 0 this certifies form >= 0 over the polyhedron.
    """
    ineqs = []
    for rel, coeffs in poly_rows:
        ineqs.append(coeffs)
        if rel == "=":
            ineqs.append(tuple(-c for c in coeffs))
    lam0 = ilp.add_variable(f"{prefix}.l0", 0, None)
    lams = [ilp.add_variable(f"{prefix}.l{k + 1}", 0, None)
            for k in range(len(ineqs))]
    for j in range(ncols):
        coeffs = {}
        for k, row in enumerate(ineqs):
            if row[j]:
                coeffs[lams[k]] = coeffs.get(lams[k], 0) + row[j]
        if j == ncols - 1:
            coeffs[lam0] = coeffs.get(lam0, 0) + 1
        varpart, const = form_cols[j]
        for var, c in varpart.items():
            coeffs[var] = coeffs.get(var, 0) - c
        ilp.add_constraint(coeffs, -const, equality=True)
    return [lam0] + lams


def _acc(d, var, c):
    if c:
        d[var] = d.get(var, 0) + c


def _dep_cols(dep, scop):
    ks = scop.statements[dep.source].depth
    kt = scop.statements[dep.target].depth
    return ks, kt, scop.n_params


def _symbolic_distance_cols(dep, scop, tv):
    """phi_target - phi_source as per-column affine forms in the T vars."""
    ks, kt, np = _dep_cols(dep, scop)
    src, tgt = tv[dep.source], tv[dep.target]
    cols = []
    for k in range(ks):
        d = {}
        _acc(d, src.it[k], -1)
        cols.append((d, 0))
    for k in range(kt):
        d = {}
        _acc(d, tgt.it[k], 1)
        cols.append((d, 0))
    for p in range(np):
        d = {}
        _acc(d, tgt.par[p], 1)
        _acc(d, src.par[p], -1)
        cols.append((d, 0))
    d = {}
    _acc(d, tgt.cst, 1)
    _acc(d, src.cst, -1)
    cols.append((d, 0))
    return cols


def _fixed_distance_row(dep, scop, dim_rows):
    """phi_target - phi_source with fixed coefficients, over dep columns."""
    ks, kt, np = _dep_cols(dep, scop)
    rs = dim_rows[dep.source]
    rt = dim_rows[dep.target]
    out = []
    out.extend(-c for c in rs.it[:ks])
    out.extend(rt.it[:kt])
    out.extend(rt.par[p] - rs.par[p] for p in range(np))
    out.append(rt.const - rs.const)
    return out


def _context_rows_for(dep, scop, context):
    ks, kt, np = _dep_cols(dep, scop)
    width = ks + kt + np + 1
    rows = []
    for crow in context:
        row = [0] * width
        for p in range(np):
            row[ks + kt + p] = crow[p]
        row[-1] = crow[-1]
        rows.append((">=", tuple(row)))
    return rows


def build_legality(ilp, dep, scop, tv, context, prefix):
    """Farkas rows for phi_target - phi_source >= 0 over poly and context."""
    rows = [(r.rel, r.coeffs) for r in dep.polyhedron.rows]
    rows += _context_rows_for(dep, scop, context)
    cols = _symbolic_distance_cols(dep, scop, tv)
    return farkas_linearize(ilp, rows, len(dep.polyhedron.columns), cols,
                            prefix)


def build_progression(ilp, stmt_idx, depth, prev_rows, itvars):
    """Constrain the new iterator part to add rank, in the positive orthant.

    With H the matrix of previously found iterator parts: every row of the
    integer-scaled orthogonal complement must be non-negative on the new
    vector and their sum at least one.  The encoding can be infeasible
    after skewed rows (the complement rows may cancel); the caller handles
    that through its retry ladder.
    """
    if len(prev_rows) >= depth:
        raise FullyScheduledStatement(
            f"statement {stmt_idx} already has rank {len(prev_rows)}")
    if not prev_rows:
        for k in range(depth):
            ilp.add_constraint({itvars[k]: 1})
        ilp.add_constraint({k: 1 for k in itvars}, -1)
        return
    horth = orthogonal_complement(RatMatrix(prev_rows))
    total = [0] * depth
    for r in range(horth.rows):
        coeffs = {}
        for k in range(depth):
            v = int(horth[r, k])
            total[k] += v
            if v:
                coeffs[itvars[k]] = v
        ilp.add_constraint(coeffs, 0)
    ilp.add_constraint({itvars[k]: total[k]
                        for k in range(depth) if total[k]}, -1)


# --------------------------------------------------------------------------
# Cost coefficient vectors
# --------------------------------------------------------------------------

def contiguity_coefficients(st) -> list:
    """10^q per iterator, q the slowest subscript position using it."""
    c = [0] * st.depth
    for acc in st.accesses:
        for q, sub in enumerate(acc.subscripts):
            for k in range(st.depth):
                if sub[k] and 10 ** q > c[k]:
                    c[k] = 10 ** q
    return c


def _trip_counts(st, scop):
    """Per-iterator trip count as (param coeffs, constant); raises
    NonRectangularDomain when bounds are not per-iterator affine rows."""
    np = scop.n_params
    lows = [None] * st.depth
    highs = [None] * st.depth
    for row in st.domain.rows:
        active = [k for k in range(st.depth) if row.coeffs[k]]
        if not active:
            continue
        if len(active) > 1 or row.rel == "=":
            raise NonRectangularDomain(st.name)
        k = active[0]
        c = row.coeffs[k]
        if abs(c) != 1:
            raise NonRectangularDomain(st.name)
        rest = tuple(row.coeffs[st.depth:])
        if c > 0:
            # k >= -(rest): lower bound
            if lows[k] is not None:
                raise NonRectangularDomain(st.name)
            lows[k] = tuple(-v for v in rest)
        else:
            if highs[k] is not None:
                raise NonRectangularDomain(st.name)
            highs[k] = rest
    trips = []
    for k in range(st.depth):
        if lows[k] is None or highs[k] is None:
            raise NonRectangularDomain(st.name)
        par = tuple(h - l for h, l in zip(highs[k][:np], lows[k][:np]))
        trips.append((par, highs[k][-1] - lows[k][-1] + 1))
    return trips


def blf_coefficients(st, scop) -> list:
    """10^rank per iterator, rank 0 for the largest trip count.  Parametric
    trip counts order above constants; falls back to all-equal coefficients
    on non-rectangular domains (cost becomes inert)."""
    try:
        trips = _trip_counts(st, scop)
    except NonRectangularDomain:
        return [1] * st.depth
    order = sorted(range(st.depth),
                   key=lambda k: (tuple(-c for c in trips[k][0]),
                                  -trips[k][1], k))
    c = [0] * st.depth
    for rank, k in enumerate(order):
        c[k] = 10 ** rank
    return c


# --------------------------------------------------------------------------
# Fixed-row probes
# --------------------------------------------------------------------------

def _probe(dep, scop, context, extra_row) -> bool:
    ks, kt, np = _dep_cols(dep, scop)
    return poly_feasible(dep.polyhedron,
                         context=context, n_params=np,
                         extra_rows=[(">=", tuple(extra_row))])


def dep_strongly_satisfied(dep, scop, dim_rows, context) -> bool:
    """distance >= 1 over the whole polyhedron, checked as infeasibility of
    distance <= 0 (exact for integer dates at integer points)."""
    form = _fixed_distance_row(dep, scop, dim_rows)
    if not any(form[:-1]):
        return form[-1] >= 1
    neg = [-c for c in form]
    return not _probe(dep, scop, context, neg)


def _dep_zero_distance(dep, scop, dim_rows, context) -> bool:
    form = _fixed_distance_row(dep, scop, dim_rows)
    if not any(form[:-1]):
        return form[-1] == 0
    fwd = list(form)
    fwd[-1] -= 1
    if _probe(dep, scop, context, fwd):   # distance >= 1 somewhere
        return False
    back = [-c for c in form]
    back[-1] -= 1
    return not _probe(dep, scop, context, back)  # distance <= -1 somewhere


def detect_parallel(scop, dim_rows, deps, context) -> bool:
    """True iff every given dependence has distance identically 0 at the
    dimension defined by ``dim_rows``."""
    return all(_dep_zero_distance(d, scop, dim_rows, context) for d in deps)


def remove_satisfied(deps, scop, dim_rows, dim_index, context) -> list:
    """Mark dependences strongly satisfied by this dimension; returns the
    still-unsatisfied ones."""
    out = []
    for dep in deps:
        if not dep.satisfied and \
                dep_strongly_satisfied(dep, scop, dim_rows, context):
            dep.satisfied = True
            dep.satisfied_at = dim_index
        if not dep.satisfied:
            out.append(dep)
    return out


def distribute_dim(scop, groups, unsatisfied) -> list:
    """Constant rows realizing an ordered statement partition; group g gets
    constant g.  Raises IllegalDistribution when the ordering contradicts
    an unsatisfied dependence (its polyhedron is nonempty by invariant, so
    a reversed pair is a genuine violation)."""
    pos = {}
    for gi, g in enumerate(groups):
        for s in g:
            pos[s] = gi
    for dep in unsatisfied:
        if pos[dep.source] > pos[dep.target]:
            raise IllegalDistribution(
                f"group order places statement {dep.target} before its "
                f"dependence source {dep.source}")
    np = scop.n_params
    return [ScheduleRow((0,) * st.depth, (0,) * np, pos[si])
            for si, st in enumerate(scop.statements)]


# --------------------------------------------------------------------------
# The scheduling job
# --------------------------------------------------------------------------

@dataclass
class _StmtVars:
    it: list
    par: list
    cst: int


class _Job:
    def __init__(self, scop: Scop, deps, config: Config):
        self.scop = scop
        self.config = config
        self.context = default_context(scop)
        self.deps = [d.clone() for d in deps]
        n = len(scop.statements)
        self.rows = [[] for _ in range(n)]
        self.hmat = [[] for _ in range(n)]   # iterator parts of solve rows
        self.bands = []
        self.parallel = []
        self.dim_costs = []
        self.band = 0
        self.stall = 0
        self.directives = effective_directives(config, scop)
        self.dropped = set()
        self.parallel_fired = set()
        self._strong_cache = {}

    # -- bookkeeping ------------------------------------------------------

    @property
    def dim(self):
        return len(self.bands)

    def active(self):
        return [si for si, st in enumerate(self.scop.statements)
                if len(self.hmat[si]) < st.depth]

    def unsat(self):
        return [d for d in self.deps if not d.satisfied]

    def dim_rows(self, d):
        return [self.rows[si][d] for si in range(len(self.rows))]

    def strong_at(self, dep, d) -> bool:
        key = (id(dep), d)
        hit = self._strong_cache.get(key)
        if hit is None:
            hit = dep_strongly_satisfied(dep, self.scop, self.dim_rows(d),
                                         self.context)
            self._strong_cache[key] = hit
        return hit

    def sweep(self) -> int:
        """Remove dependences strongly satisfied by any emitted dimension."""
        newly = 0
        for dep in self.deps:
            if dep.satisfied:
                continue
            for d in range(self.dim):
                if self.strong_at(dep, d):
                    dep.satisfied = True
                    dep.satisfied_at = d
                    newly += 1
                    break
        return newly

    def snapshot(self):
        return SchedulingState(
            scop=self.scop, dim=self.dim, band=self.band,
            rows=tuple(tuple(r) for r in self.rows),
            bands=tuple(self.bands), parallel=tuple(self.parallel),
            unsatisfied=tuple(self.unsat()), active=tuple(self.active()))

    # -- ILP assembly -----------------------------------------------------

    def _declare_vars(self, ilp, active):
        bounds = self.config.bounds
        n = len(self.scop.statements)
        cst_max = bounds.const_bound(n)
        tv = []
        for si, st in enumerate(self.scop.statements):
            live = si in active
            it = [0] * st.depth
            for k in reversed(range(st.depth)):
                it[k] = ilp.add_variable(
                    f"S{si}_it_{k}", 0, bounds.iter_max if live else 0,
                    integer=True)
            par = [ilp.add_variable(
                f"S{si}_par_{p}", 0, bounds.par_max if live else 0,
                integer=True) for p in range(self.scop.n_params)]
            cst = ilp.add_variable(f"S{si}_cst", 0, cst_max, integer=True)
            tv.append(_StmtVars(it, par, cst))
        user = {}
        for v in self.config.variables:
            user[v.name] = ilp.add_variable(v.name, v.lower, v.upper,
                                            integer=True)
        return tv, user

    def _unique_deps(self, unsat):
        groups = {}
        for dep in unsat:
            key = (dep.source, dep.target, dep.polyhedron)
            groups.setdefault(key, []).append(dep)
        return [(g[0], len(g)) for g in groups.values()]

    def _lower_custom(self, ilp, rows, tv, user):
        for lc in rows:
            coeffs = {}
            for key, c in lc.coeffs:
                if key[0] == "user":
                    coeffs[user[key[1]]] = coeffs.get(user[key[1]], 0) + c
                else:
                    _t, s, vtype, idx = key
                    stv = tv[s]
                    var = (stv.cst if vtype == "cst"
                           else stv.it[idx] if vtype == "it"
                           else stv.par[idx])
                    coeffs[var] = coeffs.get(var, 0) + c
            ilp.add_constraint(coeffs, lc.const, equality=lc.equality)

    def _cost_objectives(self, ilp, costs, uniq, tv, user, active):
        bounds = self.config.bounds
        objectives = []
        for cname in costs:
            if cname == "proximity":
                u = [ilp.add_variable(f"prox.u{p}", 0, bounds.cost_max,
                                      integer=True)
                     for p in range(self.scop.n_params)]
                w = ilp.add_variable("prox.w", 0, bounds.cost_max,
                                     integer=True)
                for di, (dep, _cnt) in enumerate(uniq):
                    ks, kt, np = _dep_cols(dep, self.scop)
                    cols = [(dict(d), c) for d, c in
                            _symbolic_distance_cols(dep, self.scop, tv)]
                    neg = [({v: -c for v, c in d.items()}, -c0)
                           for d, c0 in cols]
                    for p in range(np):
                        _acc(neg[ks + kt + p][0], u[p], 1)
                    _acc(neg[-1][0], w, 1)
                    rows = [(r.rel, r.coeffs) for r in dep.polyhedron.rows]
                    rows += _context_rows_for(dep, self.scop, self.context)
                    farkas_linearize(ilp, rows, ks + kt + np + 1, neg,
                                     f"prox.d{di}")
                objectives.append(({v: 1 for v in u}, 0))
                objectives.append(({w: 1}, 0))
            elif cname == "feautrier":
                es = []
                counts = []
                for di, (dep, cnt) in enumerate(uniq):
                    e = ilp.add_variable(f"feau.e{di}", 0, 1, integer=True)
                    es.append(e)
                    counts.append(cnt)
                    ks, kt, np = _dep_cols(dep, self.scop)
                    cols = [(dict(d), c) for d, c in
                            _symbolic_distance_cols(dep, self.scop, tv)]
                    _acc(cols[-1][0], e, -1)
                    rows = [(r.rel, r.coeffs) for r in dep.polyhedron.rows]
                    rows += _context_rows_for(dep, self.scop, self.context)
                    farkas_linearize(ilp, rows, ks + kt + np + 1, cols,
                                     f"feau.d{di}")
                objectives.append(({e: -c for e, c in zip(es, counts)},
                                   sum(counts)))
            elif cname in ("contiguity", "bigLoopsFirst"):
                terms = {}
                for si in active:
                    st = self.scop.statements[si]
                    c = (contiguity_coefficients(st) if cname == "contiguity"
                         else blf_coefficients(st, self.scop))
                    # Integer-valued and bounded given the coefficient boxes,
                    # which lets the solver fuse the objective chain.
                    var = ilp.add_variable(f"{cname}.S{si}", 0,
                                           sum(c) * bounds.iter_max,
                                           integer=True)
                    coeffs = {tv[si].it[k]: c[k]
                              for k in range(st.depth) if c[k]}
                    coeffs[var] = -1
                    ilp.add_constraint(coeffs, 0, equality=True)
                    terms[var] = 1
                objectives.append((terms, 0))
            elif cname in user:
                objectives.append(({user[cname]: 1}, 0))
            else:
                raise UnknownCost(f"unknown cost {cname!r}")
        return objectives

    def _directive_bundles(self, unsat):
        """Constraint bundles for directives applicable at this dimension."""
        bundles = []
        active = set(self.active())
        for di, d in enumerate(self.directives):
            if (di, "gone") in self.dropped or d.statement not in active:
                continue
            st = self.scop.statements[d.statement]
            remaining = st.depth - len(self.hmat[d.statement])
            if d.kind == "vectorize":
                rows = []
                if remaining > 1:
                    rows.append((("T", d.statement, "it", d.loop), 0, True))
                else:
                    for k in range(st.depth):
                        rows.append((("T", d.statement, "it", k),
                                     1 if k == d.loop else 0, True))
                bundles.append((di, rows, None))
            elif d.kind == "parallel" and d.statement not in \
                    self.parallel_fired:
                rows = [(("T", d.statement, "it", d.loop), 1, False)]
                bundles.append((di, rows, d.statement))
        return bundles

    def _assemble(self, plan, unsat, bundles, with_costs=True):
        ilp = IlpProblem()
        active = set(self.active())
        tv, user = self._declare_vars(ilp, active)
        uniq = self._unique_deps(unsat)
        for di, (dep, _cnt) in enumerate(uniq):
            build_legality(ilp, dep, self.scop, tv, self.context,
                           f"leg.d{di}")
        for si in active:
            st = self.scop.statements[si]
            build_progression(ilp, si, st.depth, self.hmat[si], tv[si].it)
        self._lower_custom(ilp, plan.constraints, tv, user)

        for _di, rows, zero_stmt in bundles:
            for key, rhs, equality in rows:
                _t, s, vtype, idx = key
                var = (tv[s].cst if vtype == "cst"
                       else tv[s].it[idx] if vtype == "it"
                       else tv[s].par[idx])
                ilp.add_constraint({var: 1}, -rhs, equality=equality)
            if zero_stmt is not None:
                for di2, (dep, _c) in enumerate(uniq):
                    if zero_stmt in (dep.source, dep.target):
                        cols = _symbolic_distance_cols(dep, self.scop, tv)
                        neg = [({v: -c for v, c in d.items()}, -c0)
                               for d, c0 in cols]
                        rows2 = [(r.rel, r.coeffs)
                                 for r in dep.polyhedron.rows]
                        rows2 += _context_rows_for(dep, self.scop,
                                                   self.context)
                        farkas_linearize(
                            ilp, rows2, len(dep.polyhedron.columns), neg,
                            f"par.s{zero_stmt}.d{di2}")

        objectives = []
        if with_costs:
            objectives = self._cost_objectives(ilp, plan.costs, uniq, tv,
                                               user, sorted(active))
        # Tie-breaks: simple rows first, then the solver's own
        # lexicographic variable minimization.
        all_it = {v: 1 for s in tv for v in s.it}
        all_par = {v: 1 for s in tv for v in s.par}
        all_cst = {s.cst: 1 for s in tv}
        for coeffs in (all_it, all_par, all_cst):
            objectives.append((coeffs, 0))
        for coeffs, const in objectives:
            ilp.add_objective(coeffs, const)
        return ilp, tv

    def _probe_bundle(self, plan, unsat, bundles) -> bool:
        ilp, _tv = self._assemble(plan, unsat, bundles, with_costs=False)
        if _DEBUG_LP:
            sys.stderr.write(ilp.to_lp_text())
        sol = solve_lex_min(ilp)
        return sol.status == OPTIMAL

    def _extract(self, sol, tv):
        out = []
        for si, st in enumerate(self.scop.statements):
            it = tuple(int(sol[v]) for v in tv[si].it)
            par = tuple(int(sol[v]) for v in tv[si].par)
            out.append(ScheduleRow(it, par, int(sol[tv[si].cst])))
        return out

    def _solve_plan(self, plan, unsat, costs):
        planx = plan if costs is plan.costs else \
            DimensionPlan(plan.kind, list(costs), plan.groups,
                          plan.constraints, None)
        bundles = []
        for bundle in self._directive_bundles(unsat):
            if self._probe_bundle(planx, unsat, bundles + [bundle]):
                bundles.append(bundle)
            else:
                di = bundle[0]
                self.dropped.add((di, "gone"))
                warnings.warn(
                    f"directive {self.directives[di]} dropped: it would "
                    f"make the dimension infeasible", stacklevel=2)
        ilp, tv = self._assemble(planx, unsat, bundles)
        if _DEBUG_LP:
            sys.stderr.write(ilp.to_lp_text())
        sol = solve_lex_min(ilp)
        if sol.status == INFEASIBLE:
            if bundles and self._probe_bundle(planx, unsat, []):
                for di, _r, _z in bundles:
                    self.dropped.add((di, "gone"))
                    warnings.warn(
                        f"directive {self.directives[di]} dropped after "
                        f"integer infeasibility", stacklevel=2)
                ilp, tv = self._assemble(planx, unsat, [])
                sol = solve_lex_min(ilp)
            if sol.status == INFEASIBLE:
                return None
        if sol.status != OPTIMAL:
            raise RuntimeError(f"unexpected solver status {sol.status}")
        fired = [zstmt for _di, _rows, zstmt in bundles if zstmt is not None]
        return self._extract(sol, tv), fired

    def try_solve(self, plan, unsat):
        """Solve one dimension; applies the dynamic fallback cost list when
        the computed dimension is neither parallel nor carries anything new.
        Returns (rows, costs_used) or None."""
        got = self._solve_plan(plan, unsat, plan.costs)
        if got is None:
            return None
        rows, fired = got
        used = tuple(plan.costs)
        if plan.fallback_costs and list(plan.fallback_costs) != \
                list(plan.costs):
            par = detect_parallel(self.scop, rows, unsat, self.context)
            if not par:
                carries_new = False
                for dep in unsat:
                    if dep_strongly_satisfied(dep, self.scop, rows,
                                              self.context) and \
                            not any(self.strong_at(dep, d)
                                    for d in range(self.dim)):
                        carries_new = True
                        break
                if not carries_new:
                    alt = self._solve_plan(plan, unsat, plan.fallback_costs)
                    if alt is not None:
                        rows, fired = alt
                        used = tuple(plan.fallback_costs)
        self.parallel_fired.update(fired)
        return rows, used

    # -- emission ---------------------------------------------------------

    def _flag_for(self, dim_rows, unsat):
        flag = detect_parallel(self.scop, dim_rows, unsat, self.context)
        if flag:
            for d in self.directives:
                if d.kind == "sequential" and \
                        dim_rows[d.statement].it[d.loop]:
                    flag = False
                    break
        return flag

    def append_dim(self, dim_rows, unsat, costs):
        for si, row in enumerate(dim_rows):
            self.rows[si].append(row)
            if any(row.it):
                self.hmat[si].append(list(row.it))
        self.parallel.append(self._flag_for(dim_rows, unsat))
        self.bands.append(self.band)
        self.dim_costs.append(tuple(costs))

    def emit_scalar(self, groups, unsat, costs=("distribute",)) -> int:
        """Distribution dimension; returns the number of dependences newly
        satisfied.  Raises IllegalDistribution for bad orderings."""
        dim_rows = distribute_dim(self.scop, groups, unsat)
        self.append_dim(dim_rows, unsat, costs)
        newly = self.sweep()
        self.band += 1
        return newly

    # -- main loop --------------------------------------------------------

    def _initial_satisfies_constraints(self, sched) -> bool:
        """Whether the initial-order schedule obeys every scoped custom
        constraint (constraints over user variables are not checkable
        against a fixed schedule and count as unsatisfied)."""
        from .config import lower_constraint
        for dm in range(sched.n_dims):
            for scope, expr in self.config.constraints:
                if scope != "all" and scope != dm:
                    continue
                for lc in lower_constraint(expr, self.scop,
                                           self.config.variables):
                    total = lc.const
                    for key, c in lc.coeffs:
                        if key[0] == "user":
                            return False
                        _t, s, vtype, idx = key
                        row = sched.rows[s][dm]
                        v = (row.const if vtype == "cst"
                             else row.it[idx] if vtype == "it"
                             else row.par[idx])
                        total += c * v
                    if (lc.equality and total != 0) or \
                            (not lc.equality and total < 0):
                        return False
        return True

    def resolve_stuck(self):
        stuck_msg = ("custom constraints or forced fusion left no legal "
                     "schedule dimension")
        if self.config.fusion or self.config.callback is not None:
            raise ConfigInfeasible(stuck_msg)
        sched = initial_as_schedule(self.scop)
        if self.config.constraints and \
                not self._initial_satisfies_constraints(sched):
            raise ConfigInfeasible(stuck_msg)
        working = [d.clone() for d in self.deps]
        for d in working:
            d.satisfied = False
            d.satisfied_at = None
        flags = []
        for dm in range(sched.n_dims):
            dim_rows = [sched.rows[si][dm] for si in range(len(sched.rows))]
            pending = [d for d in working if not d.satisfied]
            flags.append(detect_parallel(self.scop, dim_rows, pending,
                                         self.context))
            remove_satisfied(working, self.scop, dim_rows, dm, self.context)
        sched.parallel = flags
        sched.dim_costs = [("initial-fallback",)] * sched.n_dims
        for dep, w in zip(self.deps, working):
            dep.satisfied = w.satisfied
            dep.satisfied_at = w.satisfied_at
        return sched

    def run(self) -> Schedule:
        n = len(self.scop.statements)
        if n == 0:
            return Schedule([], [], [], [])
        max_depth = max(st.depth for st in self.scop.statements)
        fusion_dims = max(self.config.fusion) + 1 if self.config.fusion else 0
        max_dims = 2 * max_depth + n + fusion_dims + 4

        while True:
            active = self.active()
            unsat = self.unsat()
            if not active:
                if unsat:
                    self.sweep()
                    unsat = self.unsat()
                if not unsat:
                    break
                groups = scc_condense(DependenceGraph(
                    tuple(range(n)), tuple(unsat)))
                if len(groups) <= 1:
                    return self.resolve_stuck()
                newly = self.emit_scalar(groups, unsat)
                if newly == 0:
                    return self.resolve_stuck()
                continue

            if self.dim >= max_dims:
                return self.resolve_stuck()

            plan = compile_plan(self.config, self.scop, self.dim,
                                self.snapshot(), self.directives)
            if plan.kind == "distribute":
                try:
                    self.emit_scalar(plan.groups, unsat)
                except IllegalDistribution as e:
                    raise ConfigInfeasible(str(e)) from None
                continue

            got = self.try_solve(plan, unsat)
            if got is None:
                # Change band and retry with satisfied dependences removed.
                self.sweep()
                self.band += 1
                unsat = self.unsat()
                got = self.try_solve(plan, unsat)
            if got is not None:
                rows, used = got
                self.append_dim(rows, unsat, used)
                self.stall = 0
                continue

            groups = scc_condense(DependenceGraph(
                tuple(range(n)), tuple(unsat)))
            if len(groups) <= 1:
                return self.resolve_stuck()
            newly = self.emit_scalar(groups, unsat)
            if newly == 0:
                self.stall += 1
                if self.stall >= 2:
                    return self.resolve_stuck()
            else:
                self.stall = 0

        return Schedule(self.rows, self.bands, self.parallel,
                        [[] for _ in range(n)], self.dim_costs)


def schedule(scop: Scop, deps=None, config: Config | None = None) -> Schedule:
    """Run the iterative scheduler; ``deps`` defaults to the computed
    memory-based dependences, ``config`` to plain proximity scheduling.

    On return the passed dependences carry their satisfaction bookkeeping
    (`satisfied`, `satisfied_at`).  A scheduling job never shares mutable
    state with other jobs; callers running jobs concurrently should hand
    each its own dependence list.
    """
    if config is None:
        config = Config()
    if deps is None:
        deps = compute_dependences(scop)
    job = _Job(scop, deps, config)
    sched = job.run()
    for orig, clone in zip(deps, job.deps):
        orig.satisfied = clone.satisfied
        orig.satisfied_at = clone.satisfied_at
    return sched
