"""Exact lexicographic integer linear programming.

The LP core is a two-phase primal simplex with Bland's rule (termination
under degeneracy).  For speed the tableau is kept in exact integer form:
every row is a list of integer numerators with one positive denominator,
so a pivot costs integer multiplications only; rows are re-reduced by
their gcd lazily, when the denominator grows past a threshold.  On top of
the LP sit depth-first branch and bound (branching on the fractional
integer variable with the lowest declaration index, floor branch first)
and sequential lexicographic minimization: each objective is minimized
and frozen with an equality before the next is considered.

Two exact shortcuts keep the solve count low:

  * a run of consecutive objectives whose values are integral and bounded
    on every integer-feasible point (integer coefficients over bounded
    integer variables) collapses into a single positionally weighted
    objective, which is equivalent to minimizing them lexicographically;
  * the final determinism tie-break, lexicographic minimization of the
    box-bounded integer variables in declaration order, is folded into
    the same weighted objective.

Continuous variables are not tie-broken; their values come from the final
deterministic basis, so identical problems still yield identical
assignments.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Optional

_ZERO = Fraction(0)

OPTIMAL = "optimal"
INFEASIBLE = "infeasible"
UNBOUNDED = "unbounded"


@dataclass(frozen=True)
class IlpVariable:
    name: str
    lower: Optional[Fraction] = None
    upper: Optional[Fraction] = None
    integer: bool = False


@dataclass(frozen=True)
class Constraint:
    """sum(coeffs[j] * x_j) + const  >= 0   (or == 0 when equality)."""

    coeffs: dict
    const: Fraction = _ZERO
    equality: bool = False


@dataclass(frozen=True)
class Objective:
    """Affine form sum(coeffs[j] * x_j) + const, to be minimized."""

    coeffs: dict
    const: Fraction = _ZERO


@dataclass
class IlpSolution:
    status: str
    assignment: Optional[list]
    objective_values: list
    failed_objective: Optional[int] = None

    def __getitem__(self, j: int) -> Fraction:
        return self.assignment[j]


class IlpProblem:
    """Variables, affine constraints and an ordered objective list."""

    def __init__(self):
        self.variables: list[IlpVariable] = []
        self.constraints: list[Constraint] = []
        self.objectives: list[Objective] = []

    def add_variable(self, name, lower=None, upper=None, integer=False) -> int:
        lo = None if lower is None else Fraction(lower)
        hi = None if upper is None else Fraction(upper)
        if lo is not None and hi is not None and lo > hi:
            raise ValueError(f"variable {name}: lower {lo} > upper {hi}")
        self.variables.append(IlpVariable(name, lo, hi, integer))
        return len(self.variables) - 1

    def add_constraint(self, coeffs, const=0, equality=False):
        cleaned = {}
        for j, c in coeffs.items():
            c = Fraction(c)
            if c:
                if not 0 <= j < len(self.variables):
                    raise ValueError(f"constraint references unknown variable {j}")
                cleaned[j] = c
        self.constraints.append(Constraint(cleaned, Fraction(const), equality))

    def add_objective(self, coeffs, const=0):
        cleaned = {j: Fraction(c) for j, c in coeffs.items() if c}
        for j in cleaned:
            if not 0 <= j < len(self.variables):
                raise ValueError(f"objective references unknown variable {j}")
        self.objectives.append(Objective(cleaned, Fraction(const)))

    def to_lp_text(self) -> str:
        """Plain-text dump for human inspection."""
        out = []
        for i, ob in enumerate(self.objectives):
            terms = " + ".join(f"{c}*{self.variables[j].name}"
                               for j, c in sorted(ob.coeffs.items()))
            out.append(f"min[{i}]: {terms or '0'} + {ob.const}")
        for con in self.constraints:
            terms = " + ".join(f"{c}*{self.variables[j].name}"
                               for j, c in sorted(con.coeffs.items()))
            rel = "=" if con.equality else ">="
            out.append(f"  {terms or '0'} + {con.const} {rel} 0")
        for v in self.variables:
            kind = "int" if v.integer else "cont"
            out.append(f"  {v.lower} <= {v.name} <= {v.upper}  [{kind}]")
        return "\n".join(out) + "\n"


# --------------------------------------------------------------------------
# LP core: sparse integer rows (column -> numerator; -1 holds the rhs),
# one positive denominator per row.
# --------------------------------------------------------------------------

_DEN_LIMIT = 1 << 128
_RHS = -1


def _reduce_row(row, den):
    g = den
    for v in row.values():
        g = math.gcd(g, v if v > 0 else -v)
        if g == 1:
            return row, den
    if g > 1:
        row = {k: v // g for k, v in row.items()}
        den //= g
    return row, den


def _pivot(rows, dens, zrow, zden, basis, r, c):
    pnums, _pd = _reduce_row(rows[r], dens[r])
    piv = pnums[c]
    if piv < 0:  # only from driving artificials out of degenerate rows
        pnums = {k: -v for k, v in pnums.items()}
        piv = -piv
    rows[r] = pnums
    dens[r] = piv  # normalized pivot row: value_j = pnums[j] / pnums[c]
    pitems = list(pnums.items())

    def update(row, den):
        f = row.get(c)
        if not f:
            return row, den
        new = {k: v * piv for k, v in row.items()}
        for k, pv in pitems:
            nv = new.get(k, 0) - f * pv
            if nv:
                new[k] = nv
            elif k in new:
                del new[k]
        den *= piv
        if den > _DEN_LIMIT:
            return _reduce_row(new, den)
        return new, den

    for i, row in enumerate(rows):
        if i != r:
            rows[i], dens[i] = update(row, dens[i])
    zrow, zden = update(zrow, zden)
    basis[r] = c
    return zrow, zden


def _run_simplex(rows, dens, zrow, zden, basis, ncols):
    """Minimize; returns (status, zrow, zden).  Bland's rule throughout."""
    while True:
        enter = -1
        for j, v in zrow.items():
            if v < 0 and 0 <= j < ncols and (enter < 0 or j < enter):
                enter = j
        if enter < 0:
            return OPTIMAL, zrow, zden
        leave = -1
        bn = bd = None  # best ratio as a fraction bn/bd, bd > 0
        for i, row in enumerate(rows):
            a = row.get(enter, 0)
            if a > 0:
                rn = row.get(_RHS, 0)
                if leave < 0:
                    better = True
                else:
                    lhs = rn * bd
                    rhs = bn * a
                    better = lhs < rhs or (lhs == rhs and
                                           basis[i] < basis[leave])
                if better:
                    bn, bd = rn, a
                    leave = i
        if leave < 0:
            return UNBOUNDED, zrow, zden
        zrow, zden = _pivot(rows, dens, zrow, zden, basis, leave, enter)


def _solve_lp(bounds, constraints, obj_coeffs):
    """Solve min sum(obj_coeffs[j] x_j) subject to constraints and bounds.

    ``bounds`` is a list of (lower, upper) pairs (None for infinite).
    Returns (status, x, value) with x a list of Fractions in the original
    variable space.
    """
    nvars = len(bounds)
    # Standard-form mapping: each variable becomes one shifted non-negative
    # variable or a pair (positive, negative part).
    plus = [-1] * nvars
    minus = [-1] * nvars
    shift = [_ZERO] * nvars
    sign = [1] * nvars
    nstd = 0
    ub_rows = []
    for j, (lo, hi) in enumerate(bounds):
        if lo is not None:
            if hi is not None and hi < lo:
                return INFEASIBLE, None, None
            plus[j] = nstd
            shift[j] = lo
            nstd += 1
            if hi is not None:
                ub_rows.append((plus[j], hi - lo))
        elif hi is not None:
            plus[j] = nstd
            shift[j] = hi
            sign[j] = -1
            nstd += 1
        else:
            plus[j] = nstd
            minus[j] = nstd + 1
            nstd += 2

    std_rows = []
    for con in constraints:
        acc = dict()
        rhs = -con.const
        for j, c in con.coeffs.items():
            if not c:
                continue
            rhs -= c * shift[j]
            cj = c * sign[j]
            p = plus[j]
            acc[p] = acc.get(p, _ZERO) + cj
            if minus[j] >= 0:
                m = minus[j]
                acc[m] = acc.get(m, _ZERO) - cj
        acc = {k: v for k, v in acc.items() if v}
        if not acc:
            if con.equality:
                if rhs != 0:
                    return INFEASIBLE, None, None
            elif rhs > 0:
                return INFEASIBLE, None, None
            continue
        std_rows.append((acc, rhs, con.equality))
    for y, b in ub_rows:
        std_rows.append(({y: Fraction(1)}, b, "ub"))

    nslack = sum(1 for _, _, eq in std_rows if eq is not True)
    ncols = nstd + nslack

    rows = []
    dens = []
    basis = []
    art_rows = []
    si = nstd
    for acc, rhs, eq in std_rows:
        den = rhs.denominator
        for v in acc.values():
            den = den * v.denominator // math.gcd(den, v.denominator)
        row = {}
        for k, v in acc.items():
            row[k] = int(v * den)
        if rhs:
            row[_RHS] = int(rhs * den)
        s = -1
        if eq is not True:  # inequality: surplus (>=) or slack (ub)
            s = si
            si += 1
            row[s] = den if eq == "ub" else -den
        rhs_num = row.get(_RHS, 0)
        if rhs_num < 0 or (rhs_num == 0 and row.get(s, 0) < 0):
            row = {k: -v for k, v in row.items()}
        if s >= 0 and row.get(s, 0) > 0:
            basis.append(s)
        else:
            basis.append(-1)
            art_rows.append(len(rows))
        rows.append(row)
        dens.append(den)

    # Phase 1 (only when artificials are needed).
    if art_rows:
        nart = len(art_rows)
        for a, i in enumerate(art_rows):
            rows[i][ncols + a] = dens[i]
            basis[i] = ncols + a
        zrow = {}
        zden = 1
        for i in art_rows:
            row = rows[i]
            d = dens[i]
            zrow = {k: v * d for k, v in zrow.items()}
            for k, v in row.items():
                nv = zrow.get(k, 0) - v * zden
                if nv:
                    zrow[k] = nv
                elif k in zrow:
                    del zrow[k]
            zden *= d
            zrow, zden = _reduce_row(zrow, zden)
        for a in range(nart):
            nv = zrow.get(ncols + a, 0) + zden
            if nv:
                zrow[ncols + a] = nv
            elif ncols + a in zrow:
                del zrow[ncols + a]
        status, zrow, zden = _run_simplex(rows, dens, zrow, zden, basis,
                                          ncols + nart)
        assert status == OPTIMAL  # bounded below by 0
        if zrow.get(_RHS, 0) != 0:
            return INFEASIBLE, None, None
        drop = []
        for i, b in enumerate(basis):
            if b >= ncols:
                c = min((k for k in rows[i] if 0 <= k < ncols), default=None)
                if c is None:
                    drop.append(i)  # redundant 0 = 0 row
                else:
                    zrow, zden = _pivot(rows, dens, zrow, zden, basis, i, c)
        for i in reversed(drop):
            del rows[i]
            del dens[i]
            del basis[i]
        for row in rows:
            for k in [k for k in row if k >= ncols]:
                del row[k]

    # Phase 2.
    cz = {}
    for j, c in obj_coeffs.items():
        if not c:
            continue
        cj = c * sign[j]
        cz[plus[j]] = cz.get(plus[j], _ZERO) + cj
        if minus[j] >= 0:
            cz[minus[j]] = cz.get(minus[j], _ZERO) - cj
    zden = 1
    for v in cz.values():
        zden = zden * v.denominator // math.gcd(zden, v.denominator)
    zrow = {}
    for k, v in cz.items():
        nv = int(v * zden)
        if nv:
            zrow[k] = nv
    for i, b in enumerate(basis):
        f = zrow.get(b, 0)
        if f:
            row = rows[i]
            d = dens[i]
            zrow = {k: v * d for k, v in zrow.items()}
            for k, v in row.items():
                nv = zrow.get(k, 0) - f * v
                if nv:
                    zrow[k] = nv
                elif k in zrow:
                    del zrow[k]
            zden *= d
            zrow, zden = _reduce_row(zrow, zden)
    status, zrow, zden = _run_simplex(rows, dens, zrow, zden, basis, ncols)
    if status == UNBOUNDED:
        return UNBOUNDED, None, None

    y = [_ZERO] * ncols
    for i, b in enumerate(basis):
        y[b] = Fraction(rows[i].get(_RHS, 0), dens[i])
    x = []
    for j in range(nvars):
        v = sign[j] * y[plus[j]] + shift[j]
        if minus[j] >= 0:
            v -= y[minus[j]]
        x.append(v)
    value = sum((c * x[j] for j, c in obj_coeffs.items()), _ZERO)
    return OPTIMAL, x, value


# --------------------------------------------------------------------------
# Presolve: eliminate continuous variables through equality substitution
# --------------------------------------------------------------------------

def _presolve(bounds, constraints, int_set):
    """Substitute continuous variables out of equality rows.

    Farkas multipliers arrive as hundreds of continuous variables tied by
    equalities; eliminating them once here shrinks every LP that branch
    and bound will solve.  Returns (rows, eliminations) where rows are
    (coeffs, const, equality) triples and each elimination records
    var = const + sum(coeffs * x) for back-substitution, in order.
    Returns None when the system is trivially infeasible.
    """
    rows = [[dict(c.coeffs), c.const, c.equality] for c in constraints]
    var_rows = {}
    for ri, (coeffs, _c, _e) in enumerate(rows):
        for j in coeffs:
            var_rows.setdefault(j, set()).add(ri)
    elim = []
    dropped = set()

    def substitute(ri, pivot, e_coeffs, e_const):
        row = rows[ri]
        f = row[0].pop(pivot, None)
        if not f:
            return
        row[1] += f * e_const
        for j, c in e_coeffs.items():
            nv = row[0].get(j, _ZERO) + f * c
            if nv:
                row[0][j] = nv
                var_rows.setdefault(j, set()).add(ri)
            elif j in row[0]:
                del row[0][j]

    ri = 0
    while ri < len(rows):
        coeffs, const, eq = rows[ri]
        if not eq or ri in dropped:
            ri += 1
            continue
        pivot = -1
        for j in coeffs:
            if j not in int_set and j > pivot:
                pivot = j
        if pivot < 0:
            ri += 1
            continue
        cp = coeffs.pop(pivot)
        e_coeffs = {j: -c / cp for j, c in coeffs.items()}
        e_const = -const / cp
        elim.append((pivot, e_coeffs, e_const))
        dropped.add(ri)
        for r2 in var_rows.get(pivot, ()):
            if r2 != ri and r2 not in dropped:
                substitute(r2, pivot, e_coeffs, e_const)
        lo, hi = bounds[pivot]
        if lo is not None:
            nr = len(rows)
            rows.append([dict(e_coeffs), e_const - lo, False])
            for j in e_coeffs:
                var_rows.setdefault(j, set()).add(nr)
        if hi is not None:
            nr = len(rows)
            rows.append([{j: -c for j, c in e_coeffs.items()},
                         hi - e_const, False])
            for j in e_coeffs:
                var_rows.setdefault(j, set()).add(nr)
        ri += 1

    out = []
    for ri, (coeffs, const, eq) in enumerate(rows):
        if ri in dropped:
            continue
        coeffs = {j: c for j, c in coeffs.items() if c}
        if not coeffs:
            if (eq and const != 0) or (not eq and const < 0):
                return None
            continue
        out.append((coeffs, const, eq))
    return out, elim


_NODE_LIMIT = 200_000


def _solve_ilp(bounds, constraints, int_vars, obj_coeffs):
    """Exact minimum over the mixed-integer feasible set.

    Branches on the fractional integer variable with the lowest index and
    explores the floor branch first, which makes the returned incumbent
    deterministic.
    """
    pre = _presolve(bounds, constraints, set(int_vars))
    if pre is None:
        return INFEASIBLE, None, None
    rows, elim = pre
    eliminated = {p for p, _c, _k in elim}
    nvars = len(bounds)
    live = [j for j in range(nvars) if j not in eliminated]
    pos = {j: i for i, j in enumerate(live)}
    red_bounds = [bounds[j] for j in live]
    red_cons = [Constraint({pos[j]: c for j, c in coeffs.items()},
                           const, eq) for coeffs, const, eq in rows]
    red_int = [pos[j] for j in int_vars]

    # Rewrite the objective over live variables (forward through the
    # elimination chain; each expression references only variables still
    # alive at its own step).
    obj = dict(obj_coeffs)
    obj_offset = _ZERO
    for p, coeffs, const in elim:
        f = obj.pop(p, None)
        if f:
            obj_offset += f * const
            for j, c in coeffs.items():
                nv = obj.get(j, _ZERO) + f * c
                if nv:
                    obj[j] = nv
                elif j in obj:
                    del obj[j]
    red_obj = {pos[j]: c for j, c in obj.items()}

    def expand(xr):
        x = [None] * nvars
        for j, v in zip(live, xr):
            x[j] = v
        for p, coeffs, const in reversed(elim):
            v = const
            for j, c in coeffs.items():
                v += c * x[j]
            x[p] = v
        return x

    best_x = None
    best_v = None
    stack = [dict()]
    nodes = 0
    while stack:
        over = stack.pop()
        nodes += 1
        if nodes > _NODE_LIMIT:
            raise RuntimeError("branch-and-bound node limit exceeded")
        eff = list(red_bounds)
        for j, b in over.items():
            eff[j] = b
        status, x, v = _solve_lp(eff, red_cons, red_obj)
        if status == INFEASIBLE:
            continue
        if status == UNBOUNDED:
            return UNBOUNDED, None, None
        if best_v is not None and v >= best_v:
            continue
        branch = -1
        for j in red_int:
            if x[j].denominator != 1:
                branch = j
                break
        if branch < 0:
            best_x, best_v = x, v
            continue
        lo, hi = eff[branch]
        f = Fraction(math.floor(x[branch]))
        up = dict(over)
        up[branch] = (f + 1, hi)
        down = dict(over)
        down[branch] = (lo, f)
        stack.append(up)
        stack.append(down)
    if best_x is None:
        return INFEASIBLE, None, None
    return OPTIMAL, expand(best_x), best_v + obj_offset


# --------------------------------------------------------------------------
# Lexicographic driver
# --------------------------------------------------------------------------

def _objective_range(ob: Objective, variables):
    """Certified [lo, hi] of the objective over the variable boxes, or None
    when some contributing variable is unbounded, continuous, or the
    coefficients are not integral (then the weighted fusion is invalid)."""
    lo = hi = 0
    for j, c in ob.coeffs.items():
        v = variables[j]
        if not v.integer or v.lower is None or v.upper is None or \
                c.denominator != 1 or v.lower.denominator != 1 or \
                v.upper.denominator != 1:
            return None
        c = int(c)
        if c > 0:
            lo += c * int(v.lower)
            hi += c * int(v.upper)
        else:
            lo += c * int(v.upper)
            hi += c * int(v.lower)
    return lo, hi


def _fuse_weighted(objs, ranges):
    """One objective equivalent to minimizing ``objs`` lexicographically.

    Valid because every objective takes integer values within its
    certified range on each integer-feasible point, so positional weights
    dominate exactly."""
    weight = 1
    coeffs = {}
    for (ob, (lo, hi)) in reversed(list(zip(objs, ranges))):
        for j, c in ob.coeffs.items():
            coeffs[j] = coeffs.get(j, 0) + weight * int(c)
        weight = weight * (hi - lo) + weight + 1
    return {j: Fraction(c) for j, c in coeffs.items() if c}


def solve_lex_min(problem: IlpProblem) -> IlpSolution:
    """Minimize the problem's objectives in lexicographic order.

    Integer variables take integer values in the returned assignment; a
    final tie-break minimizes the box-bounded integer variables
    lexicographically in declaration order, making the assignment
    deterministic.
    """
    if not problem.objectives:
        raise ValueError("solve_lex_min requires at least one objective")
    variables = problem.variables
    bounds = [(v.lower, v.upper) for v in variables]
    int_vars = [j for j, v in enumerate(variables) if v.integer]
    boxed = [j for j in int_vars
             if variables[j].lower is not None
             and variables[j].upper is not None]
    tie_objs = [Objective({j: Fraction(1)}) for j in boxed]
    tie_ranges = [(int(variables[j].lower), int(variables[j].upper))
                  for j in boxed]

    cons = list(problem.constraints)
    values = []
    nobj = len(problem.objectives)
    i = 0
    x = None
    while i < nobj:
        tail = [_objective_range(ob, variables)
                for ob in problem.objectives[i:]]
        if all(r is not None for r in tail):
            objs = list(problem.objectives[i:]) + tie_objs
            fused = _fuse_weighted(objs, tail + tie_ranges)
            status, x, _v = _solve_ilp(bounds, cons, int_vars, fused)
            if status != OPTIMAL:
                return IlpSolution(status, None, values, failed_objective=i)
            for ob in problem.objectives[i:]:
                values.append(sum((c * x[j] for j, c in ob.coeffs.items()),
                                  _ZERO) + ob.const)
            for j in int_vars:
                assert x[j].denominator == 1
            return IlpSolution(OPTIMAL, x, values)
        ob = problem.objectives[i]
        status, x, v = _solve_ilp(bounds, cons, int_vars, ob.coeffs)
        if status != OPTIMAL:
            return IlpSolution(status, None, values, failed_objective=i)
        values.append(v + ob.const)
        cons.append(Constraint(dict(ob.coeffs), -v, equality=True))
        i += 1

    # Tie-break stage for problems whose objective chain could not be fused.
    if tie_objs:
        fused = _fuse_weighted(tie_objs, tie_ranges)
        status, x, _v = _solve_ilp(bounds, cons, int_vars, fused)
    else:
        status, x, _v = _solve_ilp(bounds, cons, int_vars, {})
    assert status == OPTIMAL  # feasibility witnessed by earlier stages
    for j in int_vars:
        assert x[j].denominator == 1
    return IlpSolution(OPTIMAL, x, values)
