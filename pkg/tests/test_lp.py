from fractions import Fraction
from itertools import combinations

import numpy as np
import pytest

from dnlkit.core import Digraph
from dnlkit.gen import random_tournament
from dnlkit.lp import (EQ, GE, LE, LinearProgram, Row, duality_certificate,
                       fractional_acyclic_chromatic, fractional_domination, is_winning_strategy,
                       solve_lp, winning_strategy)


def transitive(n):
    return Digraph.from_arcs(n, [(i, j) for i in range(n) for j in range(i + 1, n)])


CYCLE3 = Digraph.from_arcs(3, [(0, 1), (1, 2), (2, 0)])


def solve3(A, b):
    """Exact Cramer solve of a 3x3 system, or None when singular."""
    M = [[Fraction(x) for x in row] for row in A]

    def det(m):
        return (m[0][0] * (m[1][1] * m[2][2] - m[1][2] * m[2][1])
                - m[0][1] * (m[1][0] * m[2][2] - m[1][2] * m[2][0])
                + m[0][2] * (m[1][0] * m[2][1] - m[1][1] * m[2][0]))

    D = det(M)
    if D == 0:
        return None
    out = []
    for j in range(3):
        Mj = [row[:] for row in M]
        for i in range(3):
            Mj[i][j] = Fraction(b[i])
        out.append(det(Mj) / D)
    return out


def vertex_enumeration(c, A, b):
    """Max c.x over Ax <= b, x >= 0 by checking every basic point."""
    rows = [list(r) for r in A] + [[-1 if i == j else 0 for i in range(3)] for j in range(3)]
    rhs = list(b) + [0, 0, 0]
    best = None
    for idx in combinations(range(len(rows)), 3):
        x = solve3([rows[i] for i in idx], [rhs[i] for i in idx])
        if x is None:
            continue
        if all(sum(Fraction(a) * v for a, v in zip(r, x)) <= h for r, h in zip(rows, rhs)):
            val = sum(Fraction(ci) * v for ci, v in zip(c, x))
            best = val if best is None or val > best else best
    return best


class TestSimplex:
    def test_single_bound(self):
        res = solve_lp(LinearProgram([1], [Row([1], LE, 3)]))
        assert res.status == "optimal" and res.value == 3

    def test_infeasible(self):
        lp = LinearProgram([1], [Row([1], LE, 0), Row([1], GE, 1)], "min")
        assert solve_lp(lp).status == "infeasible"

    def test_unbounded(self):
        assert solve_lp(LinearProgram([1, 1], [Row([1, -1], LE, 1)])).status == "unbounded"

    def test_equality_rows(self):
        lp = LinearProgram([1, 2], [Row([1, 1], EQ, 1)], "max")
        res = solve_lp(lp)
        assert res.value == 2 and res.solution == [0, 1]

    def test_random_against_vertex_enumeration(self):
        rng = np.random.default_rng(7)
        for _ in range(200):
            A = rng.integers(-4, 6, size=(4, 3)).tolist() + np.eye(3, dtype=int).tolist()
            b = rng.integers(0, 12, size=4).tolist() + [10, 10, 10]
            c = rng.integers(-5, 6, size=3).tolist()
            res = solve_lp(LinearProgram(c, [Row(a, LE, h) for a, h in zip(A, b)]))
            assert res.status == "optimal"
            assert res.value == vertex_enumeration(c, A, b)

    def test_duality(self):
        rng = np.random.default_rng(3)
        for _ in range(30):
            A = rng.integers(0, 5, size=(3, 4)).tolist()
            lp = LinearProgram(rng.integers(1, 5, 4).tolist(),
                               [Row(a, GE, int(h)) for a, h in zip(A, rng.integers(1, 6, 3))], "min")
            if solve_lp(lp).status != "optimal":
                continue
            _, value, match = duality_certificate(lp)
            assert match

    def test_json(self):
        lp = LinearProgram(["1/2", 1], [Row([1, 1], LE, "3/4")])
        assert LinearProgram.from_json(lp.to_json()).to_json() == lp.to_json()


class TestWinningStrategy:
    def test_three_cycle(self):
        p = winning_strategy(CYCLE3).probabilities
        assert is_winning_strategy(CYCLE3, p) and sum(p) == 1

    def test_transitive_source(self):
        p = winning_strategy(transitive(5)).probabilities
        assert p == [1, 0, 0, 0, 0]

    def test_random_exact(self):
        for s in range(500):
            T = random_tournament(2 + s % 11, seed=s)
            p = winning_strategy(T).probabilities
            assert all(isinstance(x, Fraction) for x in p)
            assert is_winning_strategy(T, p)

    def test_large_float_steering(self):
        T = random_tournament(80, seed=1)
        ws = winning_strategy(T)
        assert not ws.exact and abs(sum(ws.probabilities) - 1) < 1e-9

    def test_rejects_non_tournament(self):
        with pytest.raises(ValueError):
            winning_strategy(Digraph.from_arcs(2, []))


class TestFractional:
    def test_single_vertex(self):
        assert fractional_domination(Digraph(1, [[0]]))[0] == 1

    def test_three_cycle_domination(self):
        value, w = fractional_domination(CYCLE3)
        assert value == Fraction(3, 2)
        for v in range(3):
            assert w[v] + w[(v - 1) % 3] >= 1

    def test_fisher_ryan(self):
        for s in range(200):
            T = random_tournament(1 + s % 12, seed=s)
            assert fractional_domination(T)[0] <= 2

    def test_acyclic_transitive(self):
        assert fractional_acyclic_chromatic(transitive(6))[0] == 1

    def test_acyclic_three_cycle(self):
        value, w = fractional_acyclic_chromatic(CYCLE3)
        assert value == Fraction(3, 2)
        assert sorted(w.values()) == [Fraction(1, 2)] * 3

    def test_acyclic_size_cap(self):
        with pytest.raises(ValueError):
            fractional_acyclic_chromatic(random_tournament(11), max_n=10)
