"""Shared kernel fixtures and the random mini-SCoP generator."""

import json
import random

from polysched import parse_scop


def make(doc):
    return parse_scop(json.dumps(doc))


def _rect_domain(bounds, np):
    """bounds: per iterator (lo, hi) with hi an int or ("N", shift)."""
    k = len(bounds)
    rows = []
    for i, (lo, hi) in enumerate(bounds):
        row = [0] * (k + np + 1)
        row[i] = 1
        row[-1] = -lo
        rows.append({"rel": ">=", "row": row})
        row = [0] * (k + np + 1)
        row[i] = -1
        if isinstance(hi, tuple):
            row[k] = 1
            row[-1] = hi[1]
        else:
            row[-1] = hi
        rows.append({"rel": ">=", "row": row})
    return rows


def _ident_beta_schedule(k, np, beta):
    rows = []
    for m in range(k):
        row = [0] * (k + np + 1)
        row[-1] = beta[m]
        rows.append(row)
        row = [0] * (k + np + 1)
        row[m] = 1
        rows.append(row)
    row = [0] * (k + np + 1)
    row[-1] = beta[k]
    rows.append(row)
    return rows


def fig1_doc():
    """Two fully parallel statements fused under (i, j); statement 0
    accesses c[j][i], a[j][i] and statement 1 accesses d[i][j], e[i][j]."""
    dom = _rect_domain([(0, 99), (0, 9)], 0)
    return {
        "parameters": [], "context": [],
        "statements": [
            {"name": "S0", "iterators": ["i", "j"], "domain": dom,
             "accesses": [
                 {"array": "c", "kind": "write",
                  "subscripts": [[0, 1, 0], [1, 0, 0]]},
                 {"array": "a", "kind": "read",
                  "subscripts": [[0, 1, 0], [1, 0, 0]]},
                 {"array": "b", "kind": "read", "subscripts": []}],
             "initial_schedule": _ident_beta_schedule(2, 0, [0, 0, 0])},
            {"name": "S1", "iterators": ["i", "j"], "domain": dom,
             "accesses": [
                 {"array": "d", "kind": "write",
                  "subscripts": [[1, 0, 0], [0, 1, 0]]},
                 {"array": "e", "kind": "read",
                  "subscripts": [[1, 0, 0], [0, 1, 0]]},
                 {"array": "x", "kind": "read", "subscripts": []}],
             "initial_schedule": _ident_beta_schedule(2, 0, [0, 0, 1])},
        ],
    }


def chain_doc():
    """a[i] = a[i-1] for 0 <= i < N."""
    return {
        "parameters": ["N"], "context": [],
        "statements": [
            {"name": "S0", "iterators": ["i"],
             "domain": [{"rel": ">=", "row": [1, 0, 0]},
                        {"rel": ">=", "row": [-1, 1, -1]}],
             "accesses": [
                 {"array": "a", "kind": "write", "subscripts": [[1, 0, 0]]},
                 {"array": "a", "kind": "read", "subscripts": [[1, 0, -1]]}],
             "initial_schedule": _ident_beta_schedule(1, 1, [0, 0])},
        ],
    }


def jacobi1d_doc(t_max=5, i_max=5):
    """Time-iterated 3-point stencil: A[t][i] = f(A[t-1][i-1..i+1])."""
    dom = [{"rel": ">=", "row": [1, 0, 0]},
           {"rel": ">=", "row": [-1, 0, t_max]},
           {"rel": ">=", "row": [0, 1, -1]},
           {"rel": ">=", "row": [0, -1, i_max]}]
    return {
        "parameters": [], "context": [],
        "statements": [
            {"name": "S0", "iterators": ["t", "i"], "domain": dom,
             "accesses": [
                 {"array": "A", "kind": "write",
                  "subscripts": [[1, 0, 0], [0, 1, 0]]},
                 {"array": "A", "kind": "read",
                  "subscripts": [[1, 0, -1], [0, 1, -1]]},
                 {"array": "A", "kind": "read",
                  "subscripts": [[1, 0, -1], [0, 1, 0]]},
                 {"array": "A", "kind": "read",
                  "subscripts": [[1, 0, -1], [0, 1, 1]]}],
             "initial_schedule": _ident_beta_schedule(2, 0, [0, 0, 0])},
        ],
    }


def square_doc(n=4):
    """Dependence-free 2-D copy on an n x n domain."""
    return {
        "parameters": [], "context": [],
        "statements": [
            {"name": "S0", "iterators": ["i", "j"],
             "domain": _rect_domain([(0, n - 1), (0, n - 1)], 0),
             "accesses": [
                 {"array": "z", "kind": "write",
                  "subscripts": [[1, 0, 0], [0, 1, 0]]},
                 {"array": "a", "kind": "read",
                  "subscripts": [[1, 0, 0], [0, 1, 0]]}],
             "initial_schedule": _ident_beta_schedule(2, 0, [0, 0, 0])},
        ],
    }


def reduction_doc():
    """c[i] += A[i][k]: loop i is dependence-free, loop k carries the
    reduction; proximity alone schedules i outermost."""
    dom = _rect_domain([(0, 5), (0, 5)], 0)
    return {
        "parameters": [], "context": [],
        "statements": [
            {"name": "S0", "iterators": ["i", "k"], "domain": dom,
             "accesses": [
                 {"array": "c", "kind": "write", "subscripts": [[1, 0, 0]]},
                 {"array": "c", "kind": "read", "subscripts": [[1, 0, 0]]},
                 {"array": "A", "kind": "read",
                  "subscripts": [[1, 0, 0], [0, 1, 0]]}],
             "initial_schedule": _ident_beta_schedule(2, 0, [0, 0, 0])},
        ],
    }


def skew_trap_doc():
    """a[i][j] = a[i-1][j+1]: proximity prefers the (1,1) hyperplane whose
    orthogonal-complement encoding then admits no second dimension."""
    return {
        "parameters": [], "context": [],
        "statements": [
            {"name": "S0", "iterators": ["i", "j"],
             "domain": _rect_domain([(1, 5), (0, 4)], 0),
             "accesses": [
                 {"array": "a", "kind": "write",
                  "subscripts": [[1, 0, 0], [0, 1, 0]]},
                 {"array": "a", "kind": "read",
                  "subscripts": [[1, 0, -1], [0, 1, 1]]}],
             "initial_schedule": _ident_beta_schedule(2, 0, [0, 0, 0])},
        ],
    }


def producer_consumer_doc():
    """S0 writes t[i], S1 reads t[i] in a later loop nest."""
    dom = _rect_domain([(0, 5)], 0)
    return {
        "parameters": [], "context": [],
        "statements": [
            {"name": "S0", "iterators": ["i"], "domain": dom,
             "accesses": [
                 {"array": "t", "kind": "write", "subscripts": [[1, 0]]}],
             "initial_schedule": _ident_beta_schedule(1, 0, [0, 0])},
            {"name": "S1", "iterators": ["i"], "domain": dom,
             "accesses": [
                 {"array": "u", "kind": "write", "subscripts": [[1, 0]]},
                 {"array": "t", "kind": "read", "subscripts": [[1, 0]]}],
             "initial_schedule": _ident_beta_schedule(1, 0, [1, 0])},
        ],
    }


# --------------------------------------------------------------------------
# Random mini-SCoPs (small sizes, rectangular domains, shared arrays)
# --------------------------------------------------------------------------

def random_doc(seed: int) -> dict:
    rng = random.Random(seed)
    nstmt = rng.randint(1, 3)
    use_param = rng.random() < 0.25
    params = ["N"] if use_param else []
    np = len(params)
    arrays = {}
    for name in ("A", "B", "C"):
        arrays[name] = rng.randint(1, 2)

    depths = [rng.choices([1, 2, 3], weights=[35, 45, 20])[0]
              for _ in range(nstmt)]

    def subscript_rows(depth, ndim):
        rows = []
        for _ in range(ndim):
            row = [0] * (depth + np + 1)
            if rng.random() < 0.85:
                it = rng.randrange(depth)
                row[it] = 1
                row[-1] = rng.choice([-1, 0, 0, 1])
            else:
                row[-1] = rng.randint(0, 2)
            rows.append(row)
        return rows

    statements = []
    betas = []
    for si in range(nstmt):
        k = depths[si]
        bounds = []
        for _ in range(k):
            if use_param and rng.random() < 0.3:
                bounds.append((0, ("N", -1)))
            else:
                bounds.append((0, rng.randint(2, 5)))
        if si == 0:
            beta = [0] * (k + 1)
        else:
            prev = betas[si - 1]
            f = rng.randint(0, min(depths[si - 1], k))
            beta = prev[:f] + [prev[f] + 1] + [0] * (k - f)
        betas.append(beta)

        accesses = []
        warr = rng.choice(list(arrays))
        accesses.append({"array": warr, "kind": "write",
                         "subscripts": subscript_rows(k, arrays[warr])})
        for _ in range(rng.randint(0, 2)):
            rarr = rng.choice(list(arrays))
            accesses.append({"array": rarr, "kind": "read",
                             "subscripts": subscript_rows(k, arrays[rarr])})
        statements.append({
            "name": f"S{si}", "iterators": [f"i{m}" for m in range(k)],
            "domain": _rect_domain(bounds, np),
            "accesses": accesses,
            "initial_schedule": _ident_beta_schedule(k, np, beta),
        })
    return {"parameters": params, "context": [], "statements": statements}


def random_scop(seed: int):
    return make(random_doc(seed))
