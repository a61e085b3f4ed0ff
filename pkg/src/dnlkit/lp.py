"""Exact rational linear programming and the fractional parameters built on it.

The simplex runs on an all-integer tableau (Edmonds' fraction-free pivoting):
entries are integers over one shared positive denominator, every division is
exact, and Bland's rule picks entering and leaving columns, so it cannot cycle.
"""
from dataclasses import dataclass, field
from fractions import Fraction
import math

import numpy as np

from .core import Digraph, members

LE, GE, EQ = "<=", ">=", "="


def _frac(x):
    if isinstance(x, Fraction):
        return x
    if isinstance(x, str):
        return Fraction(x)
    if isinstance(x, float):
        return Fraction(repr(x))
    return Fraction(x)


def fmt(x):
    x = Fraction(x)
    return f"{x.numerator}/{x.denominator}"


@dataclass
class Row:
    coeffs: list
    rel: str
    rhs: Fraction

    def __post_init__(self):
        self.coeffs = [_frac(c) for c in self.coeffs]
        self.rhs = _frac(self.rhs)
        if self.rel not in (LE, GE, EQ):
            raise ValueError(f"bad relation {self.rel!r}")


@dataclass
class LinearProgram:
    objective: list
    rows: list = field(default_factory=list)
    sense: str = "max"

    def __post_init__(self):
        self.objective = [_frac(c) for c in self.objective]
        self.rows = [r if isinstance(r, Row) else Row(*r) for r in self.rows]
        if self.sense not in ("max", "min"):
            raise ValueError("sense must be max or min")
        n = len(self.objective)
        for r in self.rows:
            if len(r.coeffs) != n:
                raise ValueError("row length differs from objective length")

    @property
    def nvars(self):
        return len(self.objective)

    def to_json(self):
        return {"sense": self.sense, "objective": [fmt(c) for c in self.objective],
                "rows": [{"coeffs": [fmt(c) for c in r.coeffs], "rel": r.rel, "rhs": fmt(r.rhs)}
                         for r in self.rows]}

    @classmethod
    def from_json(cls, doc):
        return cls(doc["objective"], [Row(r["coeffs"], r["rel"], r["rhs"]) for r in doc["rows"]],
                   doc.get("sense", "max"))

    def feasible(self, x):
        if any(v < 0 for v in x):
            return False
        for r in self.rows:
            lhs = sum(a * v for a, v in zip(r.coeffs, x))
            if (r.rel == LE and lhs > r.rhs) or (r.rel == GE and lhs < r.rhs) or (r.rel == EQ and lhs != r.rhs):
                return False
        return True

    def value(self, x):
        return sum(c * v for c, v in zip(self.objective, x))


@dataclass
class LPResult:
    status: str
    value: Fraction = None
    solution: list = None
    pivots: int = 0

    def to_json(self):
        out = {"status": self.status, "pivots": self.pivots}
        if self.status == "optimal":
            out["value"] = fmt(self.value)
            out["solution"] = [fmt(v) for v in self.solution]
        return out


class _Tableau:
    """Integer tableau: true entry = M[i][j] / D, D > 0."""

    def __init__(self, rows, obj):
        self.M = rows
        self.obj = obj
        self.D = 1
        self.pivots = 0

    def pivot(self, r, c):
        M, D = self.M, self.D
        pr = M[r]
        p = pr[c]
        for i, row in enumerate(M):
            if i == r:
                continue
            f = row[c]
            if f:
                M[i] = [(a * p - f * b) // D for a, b in zip(row, pr)]
            elif p != D:
                M[i] = [(a * p) // D for a in row]
        f = self.obj[c]
        if f:
            self.obj = [(a * p - f * b) // D for a, b in zip(self.obj, pr)]
        elif p != D:
            self.obj = [(a * p) // D for a in self.obj]
        self.D = p
        self.pivots += 1


def _run(tab, basis, allowed):
    """Maximise with Bland's rule; returns 'optimal' or 'unbounded'."""
    M = tab.M
    while True:
        enter = next((j for j in allowed if tab.obj[j] < 0), None)
        if enter is None:
            return "optimal"
        best = None
        for i, row in enumerate(M):
            a = row[enter]
            if a > 0:
                if best is None:
                    best = i
                else:
                    b = M[best]
                    lhs, rhs = row[-1] * b[enter], b[-1] * a
                    if lhs < rhs or (lhs == rhs and basis[i] < basis[best]):
                        best = i
        if best is None:
            return "unbounded"
        tab.pivot(best, enter)
        M = tab.M
        basis[best] = enter


def solve_lp(lp):
    """Exact optimum, or status 'infeasible' / 'unbounded'."""
    n = lp.nvars
    c = lp.objective if lp.sense == "max" else [-x for x in lp.objective]
    rows = []
    for r in lp.rows:
        a, rel, b = list(r.coeffs), r.rel, r.rhs
        if b < 0:
            a, b = [-x for x in a], -b
            rel = {LE: GE, GE: LE, EQ: EQ}[rel]
        L = 1
        for x in a + [b]:
            L = math.lcm(L, x.denominator)
        rows.append(([int(x * L) for x in a], rel, int(b * L)))
    n_slack = sum(1 for _, rel, _ in rows if rel != EQ)
    n_art = sum(1 for _, rel, _ in rows if rel != LE)
    width = n + n_slack + n_art
    M, basis, arts = [], [], []
    s_at, a_at = n, n + n_slack
    for a, rel, b in rows:
        row = a + [0] * (n_slack + n_art) + [b]
        if rel == LE:
            row[s_at] = 1
            basis.append(s_at)
            s_at += 1
        else:
            if rel == GE:
                row[s_at] = -1
                s_at += 1
            row[a_at] = 1
            basis.append(a_at)
            arts.append(a_at)
            a_at += 1
        M.append(row)
    cols = list(range(width))
    pivots = 0
    if arts:
        obj = [0] * (width + 1)
        for j in arts:
            obj[j] = 1
        for i, row in enumerate(M):
            if basis[i] in arts:
                obj = [o - x for o, x in zip(obj, row)]
        tab = _Tableau(M, obj)
        _run(tab, basis, cols)
        if tab.obj[-1] != 0:
            return LPResult("infeasible", pivots=tab.pivots)
        art_set = set(arts)
        keep = []
        for i in range(len(tab.M)):
            if basis[i] in art_set:
                j = next((j for j in range(n + n_slack) if tab.M[i][j] != 0), None)
                if j is None:
                    continue  # redundant row
                if tab.M[i][j] < 0:
                    tab.M[i] = [-x for x in tab.M[i]]
                tab.pivot(i, j)
                basis[i] = j
            keep.append(i)
        tab.M = [tab.M[i] for i in keep]
        basis = [basis[i] for i in keep]
        pivots = tab.pivots
        D = tab.D
        M = [row[:n + n_slack] + [row[-1]] for row in tab.M]
    else:
        D = 1
    width = n + n_slack
    # phase 2 objective row (scaled by D), made canonical w.r.t. the basis
    L = 1
    for x in c:
        L = math.lcm(L, x.denominator)
    ci = [int(x * L) for x in c] + [0] * n_slack
    obj = [-x * D for x in ci] + [0]
    for i, j in enumerate(basis):
        if j < n and ci[j]:
            f = ci[j]
            obj = [o + f * x for o, x in zip(obj, M[i])]
    tab = _Tableau(M, obj)
    tab.D = D
    status = _run(tab, basis, list(range(width)))
    pivots += tab.pivots
    if status == "unbounded":
        return LPResult("unbounded", pivots=pivots)
    x = [Fraction(0)] * n
    for i, j in enumerate(basis):
        if j < n:
            x[j] = Fraction(tab.M[i][-1], tab.D)
    val = lp.value(x)
    if not lp.feasible(x):
        raise AssertionError("simplex returned an infeasible point")
    return LPResult("optimal", val, x, pivots)


def dual_program(lp):
    """Dual of lp written with non-negative variables only.

    Variable blocks: one y_i >= 0 per <= row, y_i' >= 0 standing for -y_i per
    >= row, and a pair (y+, y-) per = row.  Returns (dual LP, decode function).
    """
    sign = 1 if lp.sense == "max" else -1
    c = [sign * x for x in lp.objective]
    cols, rhs, kinds = [], [], []
    for i, r in enumerate(lp.rows):
        if r.rel == LE:
            cols.append(r.coeffs); rhs.append(r.rhs); kinds.append((i, 1))
        elif r.rel == GE:
            cols.append([-a for a in r.coeffs]); rhs.append(-r.rhs); kinds.append((i, -1))
        else:
            cols.append(r.coeffs); rhs.append(r.rhs); kinds.append((i, 1))
            cols.append([-a for a in r.coeffs]); rhs.append(-r.rhs); kinds.append((i, -1))
    k = len(cols)
    rows = [Row([cols[t][j] for t in range(k)], GE, c[j]) for j in range(lp.nvars)]
    dual = LinearProgram(rhs, rows, "min")

    def decode(y):
        out = [Fraction(0)] * len(lp.rows)
        for (i, s), v in zip(kinds, y):
            out[i] += s * v
        return out

    return dual, decode


def duality_certificate(lp, primal=None):
    """Solve the dual; returns (dual multipliers, dual value, matches primal)."""
    primal = primal or solve_lp(lp)
    dual, decode = dual_program(lp)
    res = solve_lp(dual)
    if res.status != "optimal" or primal.status != "optimal":
        return None, None, False
    val = res.value if lp.sense == "max" else -res.value
    return decode(res.solution), val, val == primal.value


# ---------------------------------------------------------------- tournaments

@dataclass
class Distribution:
    probabilities: list
    exact: bool = True

    def __post_init__(self):
        if self.exact:
            if any(p < 0 for p in self.probabilities) or sum(self.probabilities) != 1:
                raise ValueError("not a probability distribution")

    def as_array(self):
        return np.array([float(p) for p in self.probabilities])

    def to_json(self):
        if self.exact:
            return {"probabilities": [fmt(p) for p in self.probabilities], "exact": True}
        return {"probabilities": [float(p) for p in self.probabilities], "exact": False}


def _check_tournament(T):
    if not isinstance(T, Digraph) or not T.is_tournament():
        raise ValueError("expected a tournament")


EXACT_LIMIT = 60


def winning_strategy(T, exact=None):
    """p with p(N+(v)) <= p(N-(v)) for every v.

    Exact rational simplex up to EXACT_LIMIT vertices (or when exact=True);
    bigger tournaments use a floating LP and return an inexact distribution,
    which callers only use to steer sampling.
    """
    _check_tournament(T)
    n = T.ground_size
    if exact is None:
        exact = n <= EXACT_LIMIT
    A = T.adj.astype(int)
    G = A - A.T  # row v: +1 on N+(v), -1 on N-(v)
    if not exact:
        from scipy.optimize import linprog
        res = linprog(np.zeros(n), A_ub=G, b_ub=np.zeros(n), A_eq=np.ones((1, n)), b_eq=[1],
                      bounds=[(0, None)] * n, method="highs")
        if res.status != 0:
            return winning_strategy(T, exact=True)
        p = np.clip(res.x, 0, None)
        return Distribution(list(p / p.sum()), exact=False)
    rows = [Row(G[v].tolist(), LE, 0) for v in range(n)]
    rows.append(Row([1] * n, EQ, 1))
    res = solve_lp(LinearProgram([0] * n, rows, "max"))
    if res.status != "optimal":
        raise AssertionError("winning strategy LP must be feasible")
    return Distribution(res.solution)


def is_winning_strategy(T, p):
    A = T.adj
    for v in range(T.ground_size):
        out = sum(p[u] for u in np.flatnonzero(A[v]))
        inn = sum(p[u] for u in np.flatnonzero(A[:, v]))
        if out > inn:
            return False
    return True


def fractional_domination(D):
    """gamma+_f: min w(V) subject to w(N-[v]) >= 1 for every v."""
    n = D.ground_size
    if n == 0:
        return Fraction(0), []
    closed_in = D.adj.T | np.eye(n, dtype=bool)
    rows = [Row(closed_in[v].astype(int).tolist(), GE, 1) for v in range(n)]
    lp = LinearProgram([1] * n, rows, "min")
    res = solve_lp(lp)
    return res.value, res.solution


def is_transitive_subset(T, mask):
    verts = members(mask)
    sub = T.adj[np.ix_(verts, verts)]
    deg = sub.sum(axis=1)
    return len(set(deg.tolist())) == len(verts)


def transitive_subsets(T, maximal=True):
    n = T.ground_size
    out = [m for m in range(1, 1 << n) if is_transitive_subset(T, m)]
    if not maximal:
        return out
    good = set(out)
    return [m for m in out if not any((m | (1 << v)) in good for v in range(n) if not m >> v & 1)]


def fractional_acyclic_chromatic(T, max_n=10):
    """chi^a_f over the maximal transitive vertex sets; returns (value, {set: weight})."""
    _check_tournament(T)
    n = T.ground_size
    if n > max_n:
        raise ValueError(f"column enumeration refused above n={max_n}")
    if n == 0:
        return Fraction(0), {}
    cols = transitive_subsets(T)
    rows = [Row([1 if m >> v & 1 else 0 for m in cols], GE, 1) for v in range(n)]
    res = solve_lp(LinearProgram([1] * len(cols), rows, "min"))
    weights = {m: w for m, w in zip(cols, res.solution) if w}
    return res.value, weights
