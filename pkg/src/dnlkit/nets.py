"""delta-nets by uniform sampling, transversals, weight replication, eps-coverings."""
from dataclasses import dataclass, field
from fractions import Fraction
import math

import numpy as np

from .core import (TriEdge, TriHypergraph, as_fraction, disjointness_trigraph, members,
                   trigraph_to_hypergraph)
from .rng import stream

MAX_ROUNDS = 6
# Draw budget for one sample.  Several of the structural dimension bounds
# give tau_p in the millions; past this point a sample of this many uniform
# draws already contains every vertex of a desk-scale instance.
MAX_DRAWS = 1_000_000
LCM_CAP = 10**6


class NetError(RuntimeError):
    pass


def tau_p(d, delta, p):
    """Sample size 2(d/ln(1+delta)) ln(e/(ln(1+delta) p^(1/d))), rounded up."""
    if d < 1 or not 0 < delta <= 1 or not 0 < p < 1:
        raise ValueError("need d >= 1, 0 < delta <= 1, 0 < p < 1")
    L = math.log1p(float(delta))
    val = 2 * (d / L) * math.log(math.e / (L * p ** (1.0 / d)))
    return max(1, math.ceil(val - 1e-9))


@dataclass
class NetRequest:
    delta: float
    failure_prob: float
    dimension: int
    seed: int = 0

    def __post_init__(self):
        if not 0 < float(self.delta) <= 1:
            raise ValueError("delta must lie in (0, 1]")
        if not 0 < float(self.failure_prob) < 1:
            raise ValueError("failure_prob must lie in (0, 1)")
        if int(self.dimension) < 1:
            raise ValueError("dimension must be >= 1")

    @property
    def size(self):
        return tau_p(self.dimension, self.delta, self.failure_prob)


@dataclass
class NetReport:
    sample: np.ndarray
    deduplicated: list
    valid: bool
    violating_edge: int = None
    requested: int = 0
    capped: bool = False
    rounds: int = 1

    def to_json(self):
        return {"sample_size": int(len(self.sample)), "requested": self.requested,
                "capped": self.capped, "deduplicated": self.deduplicated,
                "valid": self.valid, "violating_edge": self.violating_edge,
                "rounds": self.rounds}


def heavy_floor(delta, n):
    """Smallest integer b with b >= delta*n."""
    return math.ceil(as_fraction(delta) * n)


def validate_net(H, X, delta):
    """(valid, first violating edge index) for X against the delta-heavy edges."""
    n = H.ground_size
    if not H.edges:
        return True, None
    B, BR = H.arrays
    idx = sorted(set(int(x) for x in X))
    heavy = B.sum(axis=1) >= heavy_floor(delta, n)
    hit = BR[:, idx].any(axis=1) if idx else np.zeros(len(H.edges), bool)
    bad = np.flatnonzero(heavy & ~hit)
    if len(bad):
        return False, int(bad[0])
    return True, None


def draw(n, size, seed, *labels, p=None):
    rng = stream(seed, "nets.draw", *labels)
    if p is None:
        return rng.integers(0, n, size=size)
    return rng.choice(n, size=size, p=p)


def sample_delta_net(H, req, size=None, label=0):
    """One seeded sample of tau_p vertices (with repetition), validated exhaustively."""
    n = H.ground_size
    if n == 0:
        raise ValueError("empty ground set")
    want = req.size if size is None else int(size)
    k = min(want, MAX_DRAWS)
    sample = draw(n, k, req.seed, "delta-net", label)
    dedup = sorted(set(sample.tolist()))
    ok, bad = validate_net(H, dedup, req.delta)
    return NetReport(sample, dedup, ok, bad, want, want > MAX_DRAWS)


def sample_net_with_retries(H, req, rounds=MAX_ROUNDS):
    """Redraw with doubled size until the sample validates; error after `rounds`."""
    size = req.size
    for r in range(rounds):
        rep = sample_delta_net(H, req, size=size, label=r)
        rep.rounds = r + 1
        if rep.valid:
            return rep
        size *= 2
    raise NetError(f"no valid net after {rounds} rounds (last violating edge {rep.violating_edge})")


# ---------------------------------------------------------------- transversals

def min_transversal_exhaustive(H):
    """A smallest X meeting B∪R of every edge (branch and bound)."""
    n = H.ground_size
    if n > 24:
        raise ValueError("instance too large for the exhaustive transversal")
    edges = sorted({e.black | e.red for e in H.edges}, key=lambda m: m.bit_count())
    if any(m == 0 for m in edges):
        raise ValueError("an edge with empty B∪R has no transversal")
    best = [None]

    def go(chosen, count):
        if best[0] is not None and count >= best[0][1]:
            return
        for m in edges:
            if not m & chosen:
                break
        else:
            best[0] = (chosen, count)
            return
        if best[0] is not None and count + 1 >= best[0][1]:
            return
        for v in members(m):
            go(chosen | (1 << v), count + 1)

    go(0, 0)
    return members(best[0][0])


def greedy_bound(m, f):
    """Picks needed by greedy when every set has density >= f: m(1-f)^k < 1."""
    if m == 0:
        return 0
    f = float(f)
    if f >= 1:
        return 1
    return math.floor(math.log(m) / -math.log1p(-f)) + 1


def greedy_transversal(F, min_fraction):
    """Elements hitting every set of F, picking the most-covering element each time."""
    n = F.ground_size
    need = heavy_floor(min_fraction, n)
    M = F.matrix
    if len(F) and (M.sum(axis=1) < need).any():
        raise ValueError("a set is below the size floor")
    if len(F) and as_fraction(min_fraction) <= 0 and (M.sum(axis=1) == 0).any():
        raise ValueError("an empty set has no transversal")
    alive = np.ones(len(F), dtype=bool)
    picks = []
    while alive.any():
        score = M[alive].sum(axis=0)
        v = int(np.argmax(score))
        picks.append(v)
        alive &= ~M[:, v]
    return picks


# ---------------------------------------------------------------- replication

@dataclass
class Replication:
    hypergraph: TriHypergraph
    origin: list      # copy index -> original vertex
    scale: int        # N, the lcm of the weight denominators

    def lift(self, v):
        return [i for i, o in enumerate(self.origin) if o == v]


def replicate_by_weights(H, weights):
    """Vertex v becomes N*w(v) copies; every edge is lifted part by part."""
    w = [Fraction(x) if not isinstance(x, Fraction) else x for x in weights]
    if len(w) != H.ground_size:
        raise ValueError("one weight per vertex")
    if any(x < 0 for x in w):
        raise ValueError("weights must be non-negative")
    if all(x == 0 for x in w):
        raise ValueError("all weights are zero")
    N = 1
    for x in w:
        N = math.lcm(N, x.denominator)
        if N > LCM_CAP:
            raise ValueError("weight denominators exceed the lcm cap")
    origin = []
    for v, x in enumerate(w):
        origin += [v] * int(x * N)
    m = len(origin)
    copies = [0] * H.ground_size
    for i, v in enumerate(origin):
        copies[v] |= 1 << i

    def lift(mask):
        out = 0
        for v in members(mask):
            out |= copies[v]
        return out

    edges = [TriEdge(m, lift(e.black), lift(e.red), lift(e.white)) for e in H.edges]
    return Replication(TriHypergraph(m, edges), origin, N)


# ---------------------------------------------------------------- coverings

class Uncoverable(ValueError):
    pass


@dataclass
class Covering:
    net: list
    valid: bool
    request: NetRequest
    report: NetReport = None
    sizes: list = field(default_factory=list)

    def to_json(self):
        return {"net": self.net, "valid": self.valid, "dimension": self.request.dimension,
                "delta": str(self.request.delta), "round_sizes": self.sizes}


def covers(F, eps, X):
    if not len(X):
        return F.ground_size == 0
    return bool(F.disjoint_rows(eps)[list(X)].any(axis=0).all())


def epsilon_covering(F, eps, seed=0, p=0.1, rounds=MAX_ROUNDS):
    """X with the union of D_eps(x), x in X, equal to V.

    The sample is a delta-net of H_T for the disjointness trigraph T with
    sensitivity eps, sized with the structural bound d = ceil(1/eps) and
    delta = disjointness ratio; each failed round doubles the size.
    """
    eps = as_fraction(eps)
    if not 0 < eps <= 1:
        raise ValueError("eps must lie in (0, 1]")
    delta = F.disjointness_ratio()
    if delta == 0:
        raise Uncoverable("some vertex has empty D(x); this method cannot cover it")
    d = math.ceil(1 / eps)
    req = NetRequest(float(delta), p, d, seed)
    H = trigraph_to_hypergraph(disjointness_trigraph(F, eps))
    size = req.size
    sizes = []
    for r in range(rounds):
        rep = sample_delta_net(H, req, size=size, label=("cover", r))
        sizes.append(len(rep.sample))
        X = [int(x) for x in dict.fromkeys(rep.sample.tolist())]
        if covers(F, eps, X):
            rep.rounds = r + 1
            return Covering(X, True, req, rep, sizes)
        size *= 2
    raise NetError(f"no eps-covering after {rounds} rounds")
