"""Scheduling configuration: JSON documents, constraint grammar, presets,
directives, and per-dimension plan compilation.

A configuration can pin cost functions globally or per dimension, declare
extra ILP variables, inject affine constraints over the schedule
coefficients of the current dimension, force fusion/distribution choices,
and attach directives (parallel / vectorize / sequential).  A programmatic
strategy callback may replace the static plan before every scheduling
iteration.

Constraint symbols follow the pattern S<stmt>_<kind>_<idx>:

    S3_it_0   iterator coefficient 0 of statement 3 (current dimension)
    S3_par_1  parameter coefficient 1
    S3_cst    the constant coefficient

The index slot accepts the wildcard ``i``, meaning the sum of all
variables of that kind; the statement slot accepts ``i`` as well, which
replicates the constraint for every statement it applies to.
"""

from __future__ import annotations

import json
import re
from dataclasses import dataclass, field, replace

from .errors import (
    BadGroup,
    ConflictingPlan,
    NonAffine,
    ParseError,
    SchemaError,
    UnknownCost,
    UnknownSymbol,
)

BUILTIN_COSTS = ("proximity", "feautrier", "contiguity", "bigLoopsFirst")
PRESETS = ("pluto-style", "tensor-style", "feautrier-style", "isl-style")


@dataclass(frozen=True)
class UserVar:
    name: str
    lower: int = 0
    upper: int = 4


@dataclass(frozen=True)
class Directive:
    statement: int
    loop: int
    kind: str  # "parallel" | "vectorize" | "sequential"


@dataclass(frozen=True)
class FusionEntry:
    dimension: int
    fuse: tuple = ()
    distribute: tuple = ()


@dataclass(frozen=True)
class Bounds:
    iter_max: int = 4
    par_max: int = 4
    const_max: int | None = None  # defaults to n_statements + 4
    cost_max: int = 200

    def const_bound(self, n_statements: int) -> int:
        return self.const_max if self.const_max is not None \
            else n_statements + 4


@dataclass
class SchedulingState:
    """Read-only snapshot handed to strategy callbacks before each iteration."""

    scop: object
    dim: int
    band: int
    rows: tuple          # per statement: tuple of ScheduleRow found so far
    bands: tuple
    parallel: tuple
    unsatisfied: tuple   # Dependence objects still in the working set
    active: tuple        # statement indices not yet fully scheduled


@dataclass
class DimensionPlan:
    kind: str                       # "solve" | "distribute"
    costs: list = field(default_factory=list)
    groups: list | None = None      # ordered partition, for "distribute"
    constraints: list = field(default_factory=list)  # LoweredConstraint
    fallback_costs: list | None = None


@dataclass
class Config:
    variables: tuple = ()
    cost_default: tuple = ("proximity",)
    cost_per_dim: dict = field(default_factory=dict)
    constraints: tuple = ()          # (scope, ConstraintExpr)
    fusion: dict = field(default_factory=dict)  # dim -> FusionEntry
    directives: tuple = ()
    auto_vectorize: bool = False
    preset: str | None = None
    tiling: tuple | None = None      # per band: tuple of sizes
    bounds: Bounds = field(default_factory=Bounds)
    callback: object = None          # StrategyCallback
    isl_fallback: bool = False

    def has_hard_customization(self) -> bool:
        """Whether the configuration carries features that may make
        scheduling raise ConfigInfeasible: custom constraints, forced
        fusion, or a strategy callback.  Cost functions and directives
        never do."""
        return bool(self.constraints) or bool(self.fusion) or \
            self.callback is not None


# --------------------------------------------------------------------------
# Constraint expression grammar
# --------------------------------------------------------------------------

_SYM_RE = re.compile(r"^S(\d+|i)_(it|par)_(\d+|i)$|^S(\d+|i)_cst$")
_TOKEN_RE = re.compile(r"\s*(?:(\d+)|([A-Za-z_][A-Za-z_0-9]*)|(<=|>=|=)"
                       r"|(\+)|(-)|(\*)|(\S))")

_WILD = "i"


@dataclass(frozen=True)
class Symbol:
    stmt: object   # int or _WILD
    vtype: str     # "it" | "par" | "cst" | "user"
    idx: object    # int, _WILD, or None; user-variable name for "user"

    def text(self) -> str:
        if self.vtype == "user":
            return self.idx
        if self.vtype == "cst":
            return f"S{self.stmt}_cst"
        return f"S{self.stmt}_{self.vtype}_{self.idx}"


@dataclass(frozen=True)
class ConstraintExpr:
    terms: tuple   # (coef, Symbol)
    const: int     # folded integer terms on the left-hand side
    rel: str       # ">=", "<=", "="
    rhs: int

    def text(self) -> str:
        parts = []
        for coef, sym in self.terms:
            mag = abs(coef)
            body = sym.text() if mag == 1 else f"{mag}*{sym.text()}"
            if not parts:
                parts.append(body if coef > 0 else f"-{body}")
            else:
                parts.append(("+ " if coef > 0 else "- ") + body)
        if self.const or not parts:
            c = self.const
            if not parts:
                parts.append(str(c))
            else:
                parts.append(("+ " if c >= 0 else "- ") + str(abs(c)))
        return f"{' '.join(parts)} {self.rel} {self.rhs}"


def _tokenize(text: str):
    pos = 0
    out = []
    while pos < len(text):
        m = _TOKEN_RE.match(text, pos)
        if not m:
            break
        pos = m.end()
        if m.group(1):
            out.append(("int", int(m.group(1))))
        elif m.group(2):
            out.append(("name", m.group(2)))
        elif m.group(3):
            out.append(("rel", m.group(3)))
        elif m.group(4):
            out.append(("op", "+"))
        elif m.group(5):
            out.append(("op", "-"))
        elif m.group(6):
            out.append(("star", "*"))
        elif m.group(7):
            raise ParseError(f"unexpected character {m.group(7)!r}")
    return out


def _classify(name: str) -> Symbol:
    m = _SYM_RE.match(name)
    if not m:
        return Symbol(None, "user", name)
    if m.group(4) is not None:
        stmt = m.group(4)
        return Symbol(_WILD if stmt == _WILD else int(stmt), "cst", None)
    stmt, vtype, idx = m.group(1), m.group(2), m.group(3)
    return Symbol(_WILD if stmt == _WILD else int(stmt), vtype,
                  _WILD if idx == _WILD else int(idx))


def parse_constraint_expr(text: str, ctx=None, user_vars=()) -> ConstraintExpr:
    """Parse one affine constraint; resolve symbols when ``ctx`` (a Scop)
    is given.  Grammar: ``term (('+'|'-') term)* REL integer`` with
    ``term := [integer '*'] symbol | integer``."""
    toks = _tokenize(text)
    terms = []
    const = 0
    i = 0
    sign = 1
    expect_term = True
    rel = None
    while i < len(toks):
        kind, val = toks[i]
        if expect_term:
            if kind == "op":
                if val == "-":
                    sign = -sign
                i += 1
                continue
            coef = 1
            if kind == "int":
                if i + 1 < len(toks) and toks[i + 1][0] == "star":
                    if i + 2 >= len(toks) or toks[i + 2][0] != "name":
                        raise NonAffine(f"{text!r}: coefficient must "
                                        f"multiply a symbol")
                    coef = val
                    i += 2
                    kind, val = toks[i]
                else:
                    const += sign * val
                    i += 1
                    sign = 1
                    expect_term = False
                    continue
            if kind != "name":
                raise ParseError(f"{text!r}: expected a term near {val!r}")
            terms.append((sign * coef, _classify(val)))
            i += 1
            sign = 1
            expect_term = False
        else:
            if kind == "star":
                raise NonAffine(f"{text!r}: products of symbols are not "
                                f"affine")
            if kind == "op":
                sign = 1 if val == "+" else -1
                i += 1
                expect_term = True
            elif kind == "rel":
                rel = val
                i += 1
                break
            else:
                raise ParseError(f"{text!r}: unexpected token {val!r}")
    if rel is None:
        raise ParseError(f"{text!r}: missing relational operator")
    rsign = 1
    while i < len(toks) and toks[i][0] == "op":
        if toks[i][1] == "-":
            rsign = -rsign
        i += 1
    if i >= len(toks) or toks[i][0] != "int":
        raise ParseError(f"{text!r}: right-hand side must be an integer")
    rhs = rsign * toks[i][1]
    i += 1
    if i != len(toks):
        raise ParseError(f"{text!r}: trailing tokens")
    expr = ConstraintExpr(tuple(terms), const, rel, rhs)
    if ctx is not None:
        lower_constraint(expr, ctx, user_vars)  # validation only
    return expr


@dataclass(frozen=True)
class LoweredConstraint:
    """Concrete affine row over the current dimension's variables.

    Keys: ("T", stmt, "it"|"par"|"cst", idx) or ("user", name).
    Meaning: sum(coeffs) + const  (>=|=)  0.
    """

    coeffs: tuple  # ((key, coef), ...)
    const: int
    equality: bool


def _expand_symbol(sym: Symbol, stmt: int, scop) -> list:
    """Concrete (key list) for one symbol under a statement instantiation;
    None when the symbol does not apply to this statement."""
    st = scop.statements[stmt]
    if sym.vtype == "cst":
        return [("T", stmt, "cst", 0)]
    limit = st.depth if sym.vtype == "it" else scop.n_params
    if sym.idx == _WILD:
        return [("T", stmt, sym.vtype, k) for k in range(limit)]
    if sym.idx >= limit:
        return None
    return [("T", stmt, sym.vtype, sym.idx)]


def lower_constraint(expr: ConstraintExpr, scop, user_vars=()) -> list:
    """Expand wildcards and resolve symbols into LoweredConstraint rows."""
    user_names = {v.name for v in user_vars}
    n = len(scop.statements)
    stmt_syms = [s for _c, s in expr.terms if s.vtype != "user"]
    for _c, s in expr.terms:
        if s.vtype == "user":
            if s.idx not in user_names:
                raise UnknownSymbol(f"unknown symbol {s.idx!r}")
        elif s.stmt != _WILD and not 0 <= s.stmt < n:
            raise UnknownSymbol(f"no statement {s.stmt} in {s.text()!r}")
    wildcard = any(s.stmt == _WILD for s in stmt_syms)
    instances = range(n) if wildcard else [None]

    out = []
    for inst in instances:
        coeffs = {}
        ok = True
        for coef, sym in expr.terms:
            if sym.vtype == "user":
                key = ("user", sym.idx)
                coeffs[key] = coeffs.get(key, 0) + coef
                continue
            stmt = inst if sym.stmt == _WILD else sym.stmt
            keys = _expand_symbol(sym, stmt, scop)
            if keys is None:
                if sym.stmt == _WILD:
                    ok = False
                    break
                raise UnknownSymbol(
                    f"{sym.text()!r}: index out of range for statement "
                    f"{stmt}")
            for key in keys:
                coeffs[key] = coeffs.get(key, 0) + coef
        if not ok:
            continue
        items = tuple((k, c) for k, c in coeffs.items() if c)
        base = expr.const - expr.rhs
        if expr.rel == "<=":
            items = tuple((k, -c) for k, c in items)
            out.append(LoweredConstraint(items, -base, False))
        else:
            out.append(LoweredConstraint(items, base, expr.rel == "="))
    if not out:
        raise UnknownSymbol(
            f"{expr.text()!r} applies to no statement of this program")
    return out


# --------------------------------------------------------------------------
# Config document parsing
# --------------------------------------------------------------------------

def _check_keys(obj, allowed, what):
    if not isinstance(obj, dict):
        raise SchemaError(f"{what} must be an object")
    extra = set(obj) - set(allowed)
    if extra:
        raise SchemaError(f"{what}: unknown keys {sorted(extra)}")


def _groups(raw, what):
    groups = []
    seen = set()
    for g in raw:
        if not isinstance(g, list) or \
                not all(isinstance(s, int) for s in g):
            raise SchemaError(f"{what}: groups must be lists of integers")
        for s in g:
            if s in seen:
                raise BadGroup(f"{what}: statement {s} appears twice")
            seen.add(s)
        groups.append(tuple(g))
    return tuple(groups), seen


def parse_config(text) -> Config:
    """Parse and validate a configuration document (str or bytes)."""
    if isinstance(text, bytes):
        text = text.decode("utf-8")
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as e:
        raise SchemaError(f"invalid JSON: {e}") from None
    return config_from_dict(doc)


def config_from_dict(doc: dict) -> Config:
    _check_keys(doc, {"variables", "costFunctions", "constraints", "fusion",
                      "directives", "autoVectorize", "preset", "tiling",
                      "bounds"}, "config")

    variables = []
    for rv in doc.get("variables", []):
        _check_keys(rv, {"name", "lower", "upper"}, "variable")
        name = rv.get("name")
        if not isinstance(name, str) or not name:
            raise SchemaError("variable name must be a string")
        if _SYM_RE.match(name):
            raise SchemaError(f"variable name {name!r} shadows the "
                              f"constraint symbol pattern")
        variables.append(UserVar(name, int(rv.get("lower", 0)),
                                 int(rv.get("upper", 4))))
    names = [v.name for v in variables]
    if len(set(names)) != len(names):
        raise SchemaError("duplicate variable names")
    user_names = set(names)

    def check_costs(costs, what):
        if not isinstance(costs, list) or \
                not all(isinstance(c, str) for c in costs):
            raise SchemaError(f"{what} must be a list of cost names")
        for c in costs:
            if c not in BUILTIN_COSTS and c not in user_names:
                raise UnknownCost(f"{what}: unknown cost {c!r}")
        return tuple(costs)

    cost_default = None
    cost_per_dim = {}
    if "costFunctions" in doc:
        cf = doc["costFunctions"]
        _check_keys(cf, {"default", "perDimension"}, "costFunctions")
        if "default" in cf:
            cost_default = check_costs(cf["default"], "costFunctions.default")
        for entry in cf.get("perDimension", []):
            _check_keys(entry, {"dimension", "costs"}, "perDimension entry")
            d = entry.get("dimension")
            if not isinstance(d, int) or d < 0:
                raise SchemaError("perDimension: bad dimension index")
            cost_per_dim[d] = check_costs(entry.get("costs", []),
                                          f"perDimension[{d}]")

    constraints = []
    for rc in doc.get("constraints", []):
        _check_keys(rc, {"scope", "expr"}, "constraint")
        scope = rc.get("scope", "all")
        if scope != "all" and not (isinstance(scope, int) and scope >= 0):
            raise SchemaError(f"constraint scope {scope!r}")
        expr = parse_constraint_expr(rc.get("expr", ""))
        constraints.append((scope, expr))

    fusion = {}
    for rf in doc.get("fusion", []):
        _check_keys(rf, {"dimension", "fuse", "distribute"}, "fusion entry")
        d = rf.get("dimension")
        if not isinstance(d, int) or d < 0:
            raise SchemaError("fusion: bad dimension index")
        if d in fusion:
            raise SchemaError(f"fusion: duplicate entry for dimension {d}")
        fuse, fused = _groups(rf.get("fuse", []), f"fusion[{d}].fuse")
        dist, disted = _groups(rf.get("distribute", []),
                               f"fusion[{d}].distribute")
        both = fused & disted
        if both:
            raise ConflictingPlan(
                f"fusion[{d}]: statements {sorted(both)} both fused and "
                f"distributed")
        fusion[d] = FusionEntry(d, fuse, dist)

    directives = []
    for rd in doc.get("directives", []):
        _check_keys(rd, {"statement", "loop", "type"}, "directive")
        s, l, t = rd.get("statement"), rd.get("loop"), rd.get("type")
        if not isinstance(s, int) or not isinstance(l, int):
            raise SchemaError("directive: statement and loop must be ints")
        if t not in ("parallel", "vectorize", "sequential"):
            raise SchemaError(f"directive type {t!r}")
        directives.append(Directive(s, l, t))

    auto_vec = doc.get("autoVectorize", False)
    if not isinstance(auto_vec, bool):
        raise SchemaError("autoVectorize must be a boolean")

    preset = doc.get("preset")
    if preset is not None and preset not in PRESETS:
        raise SchemaError(f"unknown preset {preset!r}")

    tiling = None
    if "tiling" in doc:
        _check_keys(doc["tiling"], {"sizes"}, "tiling")
        sizes = doc["tiling"].get("sizes", [])
        tiling = []
        for band_sizes in sizes:
            if not isinstance(band_sizes, list) or \
                    not all(isinstance(s, int) and s >= 1
                            for s in band_sizes):
                raise SchemaError("tiling sizes must be positive integers")
            tiling.append(tuple(band_sizes))
        tiling = tuple(tiling)

    bounds = Bounds()
    if "bounds" in doc:
        rb = doc["bounds"]
        _check_keys(rb, {"iteratorMax", "parameterMax", "constantMax",
                         "costMax"}, "bounds")
        bounds = Bounds(int(rb.get("iteratorMax", 4)),
                        int(rb.get("parameterMax", 4)),
                        rb.get("constantMax"),
                        int(rb.get("costMax", 200)))

    cfg = Config(tuple(variables),
                 cost_default if cost_default is not None else ("proximity",),
                 cost_per_dim, tuple(constraints), fusion, tuple(directives),
                 auto_vec, preset, tiling, bounds)
    return apply_preset(cfg, explicit_costs=cost_default is not None)


def apply_preset(cfg: Config, explicit_costs: bool) -> Config:
    if cfg.preset is None:
        return cfg
    if cfg.preset == "pluto-style":
        if not explicit_costs:
            cfg = replace(cfg, cost_default=("proximity",))
    elif cfg.preset == "feautrier-style":
        if not explicit_costs:
            cfg = replace(cfg, cost_default=("feautrier",))
    elif cfg.preset == "tensor-style":
        if not explicit_costs:
            cfg = replace(cfg, cost_default=("contiguity", "proximity"))
        noskew = ("all", parse_constraint_expr("Si_it_i <= 1"))
        cfg = replace(cfg, constraints=cfg.constraints + (noskew,))
    elif cfg.preset == "isl-style":
        if not explicit_costs:
            cfg = replace(cfg, cost_default=("proximity",))
        cfg = replace(cfg, isl_fallback=True)
    return cfg


PRESET_DOCS = {name: {"preset": name} for name in PRESETS}


def preset_config(name: str) -> Config:
    if name not in PRESETS:
        raise SchemaError(f"unknown preset {name!r}")
    return config_from_dict({"preset": name})


# --------------------------------------------------------------------------
# Auto-vectorization detection and effective directives
# --------------------------------------------------------------------------

def auto_vectorize_detect(scop) -> list:
    """Per statement, the iterator moving contiguously in memory: the one
    appearing with coefficient 1 in the fastest-varying subscript of the
    most accesses (ties: higher iterator index); None when no iterator
    qualifies."""
    out = []
    for st in scop.statements:
        counts = [0] * st.depth
        for acc in st.accesses:
            if not acc.subscripts:
                continue
            fastest = acc.subscripts[-1]
            for k in range(st.depth):
                if fastest[k] == 1:
                    counts[k] += 1
        best = None
        for k in range(st.depth):
            if counts[k] and (best is None or counts[k] >= counts[best]):
                best = k
        out.append(best)
    return out


def effective_directives(config: Config, scop) -> tuple:
    """Explicit directives plus vectorize directives synthesized by
    auto-vectorization (skipping statements that already have one)."""
    directives = list(config.directives)
    if config.auto_vectorize:
        have = {d.statement for d in directives if d.kind == "vectorize"}
        for si, k in enumerate(auto_vectorize_detect(scop)):
            if k is not None and si not in have:
                directives.append(Directive(si, k, "vectorize"))
    for d in directives:
        st = scop.statements[d.statement] \
            if 0 <= d.statement < len(scop.statements) else None
        if st is None or not 0 <= d.loop < st.depth:
            raise SchemaError(f"directive targets missing loop: {d}")
    return tuple(directives)


# --------------------------------------------------------------------------
# Plan compilation
# --------------------------------------------------------------------------

def _topo_groups(groups, unsatisfied):
    """Order groups so no dependence target group precedes its source.
    Returns None when the group graph is cyclic."""
    pos = {}
    for gi, g in enumerate(groups):
        for s in g:
            pos[s] = gi
    n = len(groups)
    succ = [set() for _ in range(n)]
    indeg = [0] * n
    for dep in unsatisfied:
        a, b = pos.get(dep.source), pos.get(dep.target)
        if a is None or b is None or a == b:
            continue
        if b not in succ[a]:
            succ[a].add(b)
            indeg[b] += 1
    from heapq import heappop, heappush
    heap = []
    for gi in range(n):
        if indeg[gi] == 0:
            heappush(heap, (min(groups[gi]), gi))
    order = []
    while heap:
        _, gi = heappop(heap)
        order.append(list(groups[gi]))
        for b in succ[gi]:
            indeg[b] -= 1
            if indeg[b] == 0:
                heappush(heap, (min(groups[b]), b))
    if len(order) != n:
        return None
    return order


def _default_dim0_groups(scop, state, directives):
    """Smartfuse-like heuristic: split statements of different loop depth at
    the outermost dimension; unfuse vectorized statements so each can get
    its own innermost loop."""
    n = len(scop.statements)
    if n <= 1:
        return None
    vec = {d.statement for d in directives if d.kind == "vectorize"}
    by_depth = {}
    for si, st in enumerate(scop.statements):
        by_depth.setdefault(st.depth, []).append(si)
    groups = []
    for depth in sorted(by_depth):
        members = [s for s in by_depth[depth] if s not in vec]
        if members:
            groups.append(tuple(members))
        groups.extend((s,) for s in by_depth[depth] if s in vec)
    if len(groups) <= 1:
        return None
    ordered = _topo_groups(groups, state.unsatisfied)
    return ordered  # None when cyclic: fall back to plain fusion


def compile_plan(config: Config, scop, dim: int, state: SchedulingState,
                 directives=()) -> DimensionPlan:
    """Merge (highest priority first) callback output, per-dimension JSON
    entries, and defaults into the plan for one dimension."""
    if config.callback is not None:
        plan = config.callback(state)
        if plan is not None:
            _validate_plan(plan, scop, {v.name for v in config.variables})
            return plan

    costs = list(config.cost_per_dim.get(dim, config.cost_default))
    fallback = ["feautrier"] if config.isl_fallback else None

    entry = config.fusion.get(dim)
    if entry is not None:
        mentioned = set()
        groups = []
        for g in entry.fuse:
            groups.append(list(g))
            mentioned.update(g)
        for g in entry.distribute:
            groups.append(list(g))
            mentioned.update(g)
        for s in mentioned:
            if not 0 <= s < len(scop.statements):
                raise BadGroup(f"fusion[{dim}]: no statement {s}")
        for si in range(len(scop.statements)):
            if si not in mentioned:
                groups.append([si])
        return DimensionPlan("distribute", costs, groups,
                             _scoped_constraints(config, scop, dim),
                             fallback)

    if dim == 0:
        groups = _default_dim0_groups(scop, state, directives)
        if groups is not None:
            return DimensionPlan("distribute", costs, groups,
                                 _scoped_constraints(config, scop, dim),
                                 fallback)

    return DimensionPlan("solve", costs, None,
                         _scoped_constraints(config, scop, dim), fallback)


def _scoped_constraints(config: Config, scop, dim: int) -> list:
    rows = []
    for scope, expr in config.constraints:
        if scope == "all" or scope == dim:
            rows.extend(lower_constraint(expr, scop, config.variables))
    return rows


def _validate_plan(plan: DimensionPlan, scop, user_names=()):
    if plan.kind not in ("solve", "distribute"):
        raise SchemaError(f"plan kind {plan.kind!r}")
    for c in plan.costs:
        if c not in BUILTIN_COSTS and c not in user_names:
            raise UnknownCost(f"callback plan: unknown cost {c!r}")
    if plan.kind == "distribute":
        if not plan.groups:
            raise BadGroup("distribute plan without groups")
        seen = set()
        for g in plan.groups:
            for s in g:
                if s in seen:
                    raise BadGroup(f"statement {s} in two groups")
                seen.add(s)
        missing = set(range(len(scop.statements))) - seen
        if missing:
            raise BadGroup(f"groups do not cover statements {sorted(missing)}")
