"""Domination in tournaments, tri-tournaments and majority digraphs."""
from dataclasses import dataclass, field
from fractions import Fraction
from itertools import combinations
import logging
import math

import numpy as np

from . import constants
from .core import (Digraph, TriTournament, as_fraction, count_floor, full_mask, mask_of,
                   members, popcount)
from .lp import fractional_acyclic_chromatic, is_transitive_subset, is_winning_strategy, winning_strategy
from .nets import MAX_DRAWS, MAX_ROUNDS, draw, tau_p
from .rng import derive, stream

log = logging.getLogger(__name__)

EXHAUSTIVE_LIMIT = 20


@dataclass
class Domination:
    vertices: list
    valid: bool
    report: dict = field(default_factory=dict)

    def __len__(self):
        return len(self.vertices)

    def __iter__(self):
        return iter(self.vertices)

    @property
    def mask(self):
        return mask_of(self.vertices)

    def to_json(self):
        return {"vertices": list(self.vertices), "size": len(self.vertices),
                "valid": self.valid, "report": self.report}


def _tournament(T):
    if not isinstance(T, Digraph) or not T.is_tournament():
        raise ValueError("expected a tournament")


def prune(dominates, X, order=None):
    """Drop vertices of X one at a time while the rest still dominates."""
    for v in (members(X) if order is None else order):
        if X >> v & 1 and dominates(X & ~(1 << v)):
            X &= ~(1 << v)
    return X


# ---------------------------------------------------------------- families

class TransitiveFamily:
    """Multiset of transitive vertex sets of a tournament."""

    def __init__(self, T, members_, check=True):
        _tournament(T)
        self.tournament = T
        self.members = [int(m) for m in members_]
        if check:
            for m in self.members:
                if not is_transitive_subset(T, m):
                    raise ValueError(f"member {members(m)} is not transitive")
        n = T.ground_size
        inc = np.zeros((len(self.members), n), dtype=np.int64)
        for i, m in enumerate(self.members):
            inc[i, members(m)] = 1
        self.incidence = inc
        self.coverage = inc.sum(axis=0)

    @property
    def t(self):
        return len(self.members)

    @property
    def c(self):
        """Least coverage as a fraction of the family size."""
        if not self.t or not self.tournament.ground_size:
            return Fraction(0)
        return Fraction(int(self.coverage.min()), self.t)

    def co_membership(self):
        return self.incidence.T @ self.incidence

    def to_json(self):
        return {"members": [members(m) for m in self.members],
                "coverage": self.coverage.tolist()}


def _extendable(T, S, v):
    """S ∪ {v} stays transitive, given S transitive: no u -> v -> w -> u inside S."""
    out_v = T.out_masks[v] & S
    in_v = T.in_masks[v] & S
    return all(not T.out_masks[w] & in_v for w in members(out_v))


def greedy_transitive_partition(T, verts=None, seed=0):
    """Place vertices in random order into the first part they keep transitive."""
    pool = list(range(T.ground_size)) if verts is None else list(verts)
    order = stream(seed, "tournament.partition").permutation(len(pool))
    parts = []
    for i in order:
        v = pool[i]
        for j, S in enumerate(parts):
            if _extendable(T, S, v):
                parts[j] = S | (1 << v)
                break
        else:
            parts.append(1 << v)
    return parts


def transitive_cover(T, r=4, seed=0):
    """Family made of r independent greedy transitive partitions; c = r / t."""
    _tournament(T)
    fam = []
    for i in range(r):
        fam += greedy_transitive_partition(T, seed=derive(seed, "cover", i))
    return TransitiveFamily(T, fam, check=False)


def family_from_fractional(T, max_n=10):
    """Optimal fractional acyclic coloring turned into integer multiplicities."""
    value, weights = fractional_acyclic_chromatic(T, max_n=max_n)
    L = math.lcm(*(w.denominator for w in weights.values())) if weights else 1
    fam = []
    for m, w in sorted(weights.items()):
        fam += [m] * int(w * L)
    return TransitiveFamily(T, fam, check=False), value


def enumerated_family(T, seed=0, r=4):
    if T.ground_size <= 10:
        return family_from_fractional(T)[0]
    return transitive_cover(T, r=r, seed=seed)


# ---------------------------------------------------------------- tri-tournaments

def _hyper_dimension(n):
    # A tri-hypergraph with n edges shatters at most log2(n) vertices.
    return max(1, int(math.floor(math.log2(max(n, 2)))))


def dominating_set_tri_tournament(T, seed=0, p=constants.DEFAULT_P, dimension=None,
                                  rounds=MAX_ROUNDS, do_prune=True):
    """Sample from the winning strategy until A ∪ R dominates; V is the fallback."""
    n = T.ground_size
    if n == 0:
        return Domination([], True, {"fallback": False})
    D = T.underlying()
    ws = winning_strategy(D)
    w = np.clip(ws.as_array(), 0, None)
    w = w / w.sum()
    d = _hyper_dimension(n) if dimension is None else int(dimension)
    size = tau_p(d, 0.5, p)
    report = {"dimension": d, "requested": size, "exact_strategy": ws.exact, "rounds": 0}
    X = None
    for r in range(rounds):
        report["rounds"] = r + 1
        sample = draw(n, min(size, MAX_DRAWS), seed, "tournament.dominate", r, p=w)
        cand = mask_of(set(sample.tolist()))
        if T.dominates(cand):
            X = cand
            break
        size *= 2
    report["fallback"] = X is None
    if X is None:
        X = full_mask(n)
    report["sampled_size"] = popcount(X)
    if do_prune:
        order = sorted(members(X), key=lambda v: (w[v], v))
        X = prune(T.dominates, X, order)
    return Domination(members(X), T.dominates(X), report)


def red_augment(T, F, threshold):
    """Red arc yx whenever arc xy lies in at most threshold * t members of F."""
    _tournament(T)
    limit = count_floor(threshold, F.t)
    M = F.co_membership()
    A = T.adj
    low = A & (M <= limit)
    return TriTournament(T.ground_size, A, low.T.copy())


# ---------------------------------------------------------------- recursion

def _source(T):
    return int(np.argmax(T.adj.sum(axis=1)))


def _dominate_rec(T, fam, seed, depth, levels, p):
    n = T.ground_size
    if n == 0:
        return 0
    if is_transitive_subset(T, full_mask(n)):
        levels.append({"depth": depth, "n": n, "base": True, "size": 1})
        return 1 << _source(T)
    F = TransitiveFamily(T, fam, check=False)
    c = F.c
    if c == 0:
        raise ValueError("family leaves a vertex uncovered")
    T2 = red_augment(T, F, c * c / 2)
    dim = math.ceil(4 / (c * c))
    dom = dominating_set_tri_tournament(T2, seed=derive(seed, "level", depth, n), p=p,
                                        dimension=dim)
    X = dom.mask
    levels.append({"depth": depth, "n": n, "c": str(c), "t": F.t, "dimension": dim,
                   "size": len(dom), "red_arcs": int(T2.R.sum()), "fallback": dom.report["fallback"]})
    covered = X
    for x in members(X):
        covered |= T.out_masks[x]
    out = X
    for x in members(X):
        Y = T2.red_out(x) & ~covered
        if not Y:
            continue
        verts = members(Y)
        local = {v: i for i, v in enumerate(verts)}
        sub_fam = []
        for m in fam:
            if m >> x & 1:
                continue
            r = m & Y
            if r:
                sub_fam.append(mask_of(local[v] for v in members(r)))
        assert all(not (mask_of(verts[i] for i in members(m)) >> x & 1) for m in sub_fam)
        sub = _dominate_rec(T.induced(verts), sub_fam, derive(seed, "branch", x), depth + 1, levels, p)
        out |= mask_of(verts[i] for i in members(sub))
    return out


def dominate_from_fractional_coloring(T, F, seed=0, c=None, p=constants.DEFAULT_P):
    """Dominating set via red augmentation at c²/2 and recursion on red out-neighbourhoods."""
    _tournament(T)
    if F.tournament is not T and not np.array_equal(F.tournament.adj, T.adj):
        raise ValueError("family belongs to another tournament")
    if c is not None and (F.coverage < as_fraction(c) * F.t).any():
        raise ValueError("some vertex is covered fewer than c*t times")
    if T.ground_size and F.c == 0:
        raise ValueError("family leaves a vertex uncovered")
    levels = []
    X = _dominate_rec(T, F.members, seed, 0, levels, p)
    before = popcount(X)
    if not T.dominates(X):
        raise AssertionError("recursion produced a non-dominating set")
    X = prune(T.dominates, X)
    report = {"levels": levels, "depth": max((l["depth"] for l in levels), default=0),
              "c": str(F.c), "unpruned_size": before}
    return Domination(members(X), T.dominates(X), report)


# ---------------------------------------------------------------- local covers

@dataclass
class LocalCover:
    family: TransitiveFamily
    weights: dict
    total: Fraction
    bound: Fraction
    min_coverage: Fraction

    @property
    def certified(self):
        return self.total <= self.bound and self.min_coverage >= 1


def greedy_local_partitions(T, seed=0):
    """Transitive partition of {v} ∪ N+(v) for every v (v joins any part as its source)."""
    out = []
    for v in range(T.ground_size):
        parts = greedy_transitive_partition(T, members(T.out_masks[v]), seed=derive(seed, v))
        if not parts:
            parts = [0]
        parts[0] |= 1 << v
        out.append(parts)
    return out


def locally_bounded_cover(T, partitions=None, seed=0):
    """Weight 2p(v) on each part at v; total <= 2k and coverage >= 1 checked exactly."""
    _tournament(T)
    n = T.ground_size
    if partitions is None:
        partitions = greedy_local_partitions(T, seed)
    if len(partitions) != n:
        raise ValueError("need one partition per vertex")
    k = max((len(ps) for ps in partitions), default=0)
    ws = winning_strategy(T, exact=True)
    prob = ws.probabilities
    if not is_winning_strategy(T, prob):
        raise AssertionError("winning strategy failed its recheck")
    weights = {}
    for v, parts in enumerate(partitions):
        union = 0
        for m in parts:
            m = int(m)
            if union & m:
                raise ValueError(f"parts at vertex {v} overlap")
            if not is_transitive_subset(T, m):
                raise ValueError(f"part {members(m)} at vertex {v} is not transitive")
            union |= m
            weights[m] = weights.get(m, Fraction(0)) + 2 * prob[v]
        if union != (T.out_masks[v] | 1 << v):
            raise ValueError(f"parts at vertex {v} do not partition its closed out-neighbourhood")
    total = sum(weights.values(), Fraction(0))
    cov = [Fraction(0)] * n
    for m, w in weights.items():
        for u in members(m):
            cov[u] += w
    fam = TransitiveFamily(T, sorted(weights), check=False)
    return LocalCover(fam, weights, total, Fraction(2 * k), min(cov, default=Fraction(1)))


# ---------------------------------------------------------------- majority

class VoterProfile:
    """m total orders on candidates 0..n-1, each listed best first."""

    def __init__(self, orders, candidates=None):
        o = np.asarray(orders, dtype=np.int64)
        if o.ndim != 2:
            if o.size == 0:
                o = o.reshape(0, candidates or 0)
            else:
                raise ValueError("orders must be an m x n array")
        n = o.shape[1] if candidates is None else int(candidates)
        if o.shape[1] != n:
            raise ValueError("orders disagree with the candidate count")
        ref = np.arange(n)
        for row in o:
            if not np.array_equal(np.sort(row), ref):
                raise ValueError("each order must be a permutation")
        o.setflags(write=False)
        self.orders = o

    @property
    def candidates(self):
        return self.orders.shape[1]

    @property
    def voters(self):
        return self.orders.shape[0]

    def pairwise(self):
        """C[x, y] = number of voters ranking x before y."""
        n = self.candidates
        pos = np.empty_like(self.orders)
        rows = np.arange(self.voters)[:, None]
        pos[rows, self.orders] = np.arange(n)[None, :]
        C = np.zeros((n, n), dtype=np.int64)
        for chunk in range(0, self.voters, 64):
            P = pos[chunk:chunk + 64]
            C += (P[:, :, None] < P[:, None, :]).sum(axis=0)
        return C

    def to_json(self):
        return {"type": "VoterProfile", "candidates": self.candidates,
                "orders": self.orders.tolist()}

    @classmethod
    def from_json(cls, doc):
        return cls(doc["orders"], doc["candidates"])

    def __repr__(self):
        return f"VoterProfile(n={self.candidates}, m={self.voters})"


def _at_least(C, c, m):
    c = as_fraction(c)
    return C * c.denominator >= c.numerator * m


def majority_digraph(P, c):
    """Arc xy iff at least c*m voters put x before y."""
    if not 0 <= as_fraction(c) <= 1:
        raise ValueError("c must lie in [0, 1]")
    n = P.candidates
    adj = _at_least(P.pairwise(), c, P.voters)
    np.fill_diagonal(adj, False)
    return Digraph(n, adj)


def majority_tournament(C, m):
    """Strict majority arcs; an exact tie points from the lower index to the higher."""
    n = len(C)
    lower = np.triu(np.ones((n, n), dtype=bool), 1)
    A = (2 * C > m) | ((2 * C == m) & lower)
    np.fill_diagonal(A, False)
    return A


def majority_tri_tournament(P, eps):
    C = P.pairwise()
    m = P.voters
    A = majority_tournament(C, m)
    loose = _at_least(C, Fraction(1, 2) - as_fraction(eps), m)
    np.fill_diagonal(loose, False)
    return TriTournament(P.candidates, A, loose & ~A), Digraph(P.candidates, loose)


def majority_domination(P, eps, seed=0, p=constants.DEFAULT_P):
    """Dominating set of the (1/2 - eps)-majority digraph via its tri-tournament."""
    e = as_fraction(eps)
    if not 0 < e < Fraction(1, 2):
        raise ValueError("eps must lie in (0, 1/2)")
    T, D = majority_tri_tournament(P, e)
    dom = dominating_set_tri_tournament(T, seed=seed, p=p)
    ok = D.dominates(dom.mask)
    dom.report.update({"red_arcs": int(T.R.sum()), "validated_against": f"D_{{1/2-{e}}}"})
    return Domination(dom.vertices, ok, dom.report)


# ---------------------------------------------------------------- oracle

def exhaustive_domination(D, limit=EXHAUSTIVE_LIMIT):
    """(gamma+, witness) by increasing-size enumeration."""
    n = D.ground_size
    if n > limit:
        raise ValueError(f"exhaustive domination refused above n={limit}")
    if n == 0:
        return 0, []
    masks = D.dom_masks if isinstance(D, TriTournament) else D.out_masks
    full = full_mask(n)
    closed = [masks[v] | 1 << v for v in range(n)]
    for k in range(1, n + 1):
        for combo in combinations(range(n), k):
            cover = 0
            for v in combo:
                cover |= closed[v]
            if cover == full:
                return k, list(combo)
    return n, list(range(n))
