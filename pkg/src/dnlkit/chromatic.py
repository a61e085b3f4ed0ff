"""Colorings and homomorphisms of dense triangle-free and K_t-free graphs."""
from dataclasses import dataclass, field
from fractions import Fraction
import logging
import math

import numpy as np

from . import constants
from .cluster import HypothesisError, set_system_clustering
from .core import SetSystem, SimpleGraph, as_fraction, bool_from_mask, members, popcount
from .nets import MAX_DRAWS, MAX_ROUNDS, NetRequest, draw, epsilon_covering
from .rng import stream

log = logging.getLogger(__name__)

CHROMATIC_LIMIT = 40
INDEPENDENCE_LIMIT = 60
FALSIFIER_EXHAUSTIVE = 120


class VerificationError(RuntimeError):
    pass


# ---------------------------------------------------------------- exact oracles

def _nbr(G):
    return G.nbr if isinstance(G, SimpleGraph) else list(G)


def count_cliques(G, k, within=None):
    """Number of k-cliques (vertex sets), optionally inside the bitset `within`."""
    nbr = _nbr(G)
    n = len(nbr)
    allowed = (1 << n) - 1 if within is None else within
    if k == 0:
        return 1
    total = 0

    def go(cand, depth):
        nonlocal total
        if depth == k:
            total += 1
            return
        if depth == k - 1:
            total += popcount(cand)
            return
        while cand:
            low = cand & -cand
            v = low.bit_length() - 1
            cand ^= low
            go(cand & nbr[v], depth + 1)

    go(allowed, 0)
    return total


def _colour_classes(cand, nbr, stop):
    """Greedy colour classes of cand, stopping once `stop` classes are used."""
    used = 0
    while cand and used < stop:
        used += 1
        Q = cand
        while Q:
            low = Q & -Q
            v = low.bit_length() - 1
            Q &= ~nbr[v] & ~low
            cand &= ~low
    return used


def find_clique(G, k, within=None):
    """Some k-clique as a sorted vertex list, or None.

    Branches are cut when a greedy colouring of the candidates uses fewer
    colours than the vertices still missing.
    """
    nbr = _nbr(G)
    n = len(nbr)
    allowed = (1 << n) - 1 if within is None else within

    def go(cand, chosen):
        need = k - len(chosen)
        if need == 0:
            return chosen
        if popcount(cand) < need or _colour_classes(cand, nbr, need) < need:
            return None
        while cand:
            low = cand & -cand
            v = low.bit_length() - 1
            cand ^= low
            got = go(cand & nbr[v], chosen + [v])
            if got is not None:
                return got
            if popcount(cand) < need:
                return None
        return None

    return go(allowed, [])


def is_kt_free(G, t):
    return find_clique(G, t) is None


def is_triangle_free(G):
    A = G.adj.astype(np.float64)
    return not ((A @ A) * A).any()


def cliques(G, k):
    """All k-cliques as sorted tuples, in lexicographic order."""
    nbr = _nbr(G)
    n = len(nbr)
    out = []

    def go(cand, chosen):
        if len(chosen) == k:
            out.append(tuple(chosen))
            return
        while cand:
            low = cand & -cand
            v = low.bit_length() - 1
            cand ^= low
            go(cand & nbr[v], chosen + [v])

    go((1 << n) - 1, [])
    return out


def max_clique(nbr, allowed=None):
    """Largest clique by branch and bound with a greedy colouring bound."""
    n = len(nbr)
    best = []

    def colour_bound(P):
        order, bounds = [], []
        colour = 0
        while P:
            colour += 1
            Q = P
            while Q:
                low = Q & -Q
                v = low.bit_length() - 1
                Q &= ~nbr[v] & ~low
                P &= ~low
                order.append(v)
                bounds.append(colour)
        return order, bounds

    def expand(R, P):
        nonlocal best
        order, bounds = colour_bound(P)
        for i in range(len(order) - 1, -1, -1):
            if len(R) + bounds[i] <= len(best):
                return
            v = order[i]
            NP = P & nbr[v]
            if NP:
                expand(R + [v], NP)
            elif len(R) + 1 > len(best):
                best = R + [v]
            P &= ~(1 << v)

    expand([], (1 << n) - 1 if allowed is None else allowed)
    return sorted(best)


def max_independent_set(G):
    n = G.ground_size
    if n > INDEPENDENCE_LIMIT:
        raise ValueError(f"independence oracle limited to {INDEPENDENCE_LIMIT} vertices")
    full = (1 << n) - 1
    comp = [full & ~(m | (1 << v)) for v, m in enumerate(G.nbr)]
    return max_clique(comp)


def independence_number(G):
    return len(max_independent_set(G))


def chromatic_number(G, want_coloring=False):
    """Exact chromatic number by DSATUR branch and bound."""
    n = G.ground_size
    if n > CHROMATIC_LIMIT:
        raise ValueError(f"chromatic oracle limited to {CHROMATIC_LIMIT} vertices")
    if n == 0:
        return (0, []) if want_coloring else 0
    nbr = G.nbr
    deg = [popcount(m) for m in nbr]
    lower = len(max_clique(nbr))
    best = [n + 1, None]
    colour = [-1] * n
    seen = [0] * n  # bitmask of colours present around v

    def pick():
        v, key = -1, None
        for u in range(n):
            if colour[u] < 0:
                k = (popcount(seen[u]), deg[u])
                if key is None or k > key:
                    v, key = u, k
        return v

    def go(done, used):
        if used >= best[0]:
            return
        if done == n:
            best[0], best[1] = used, colour[:]
            return
        v = pick()
        for c in range(min(used + 1, best[0] - 1)):
            if seen[v] >> c & 1:
                continue
            colour[v] = c
            touched = []
            for u in members(nbr[v]):
                if not seen[u] >> c & 1:
                    seen[u] |= 1 << c
                    touched.append(u)
            go(done + 1, max(used, c + 1))
            for u in touched:
                seen[u] &= ~(1 << c)
            colour[v] = -1
            if best[0] <= lower:
                return

    go(0, 0)
    return (best[0], best[1]) if want_coloring else best[0]


def exact_oracles(G, t=None, k=None):
    """Dictionary of the exact quantities that fit the size caps."""
    out = {"triangle_free": is_triangle_free(G)}
    if G.ground_size <= CHROMATIC_LIMIT:
        out["chromatic_number"] = chromatic_number(G)
    if G.ground_size <= INDEPENDENCE_LIMIT:
        out["independence_number"] = independence_number(G)
    if t is not None:
        out["kt_free"] = is_kt_free(G, t)
    if k is not None:
        out["cliques"] = count_cliques(G, k)
    return out


def clique_count_floor(G, X, c, s, eps):
    """Whether G[X] has at least eps c^s n^(s+1)/(s+1)! cliques of size s+1.

    Returns None when the degree or size hypothesis does not hold.
    """
    n = G.ground_size
    c, eps = as_fraction(c), as_fraction(eps)
    X = X if isinstance(X, int) else sum(1 << v for v in X)
    if G.min_degree() < (1 - c) * n or popcount(X) < (s * c + eps) * n:
        return None
    floor = eps * c ** s * Fraction(n) ** (s + 1) / math.factorial(s + 1)
    return count_cliques(G, s + 1, within=X) >= floor


# ---------------------------------------------------------------- results

@dataclass
class ColoringResult:
    colors: list
    proper: bool
    classes_count: int
    report: dict = field(default_factory=dict)

    def to_json(self):
        return {"type": "ColoringResult", "colors": self.colors, "proper": self.proper,
                "classes_count": self.classes_count, "report": self.report}


def is_proper(G, colors):
    c = np.asarray(colors)
    if len(c) != G.ground_size or (c < 0).any():
        return False
    iu = np.triu_indices(G.ground_size, 1)
    return not (G.adj[iu] & (c[iu[0]] == c[iu[1]])).any()


def _result(G, colors, report):
    return ColoringResult([int(x) for x in colors], is_proper(G, colors),
                          len(set(int(x) for x in colors)), report)


def _hypothesis(ok, msg, force):
    if ok:
        return
    if force:
        log.warning("running off-hypothesis: %s", msg)
        return
    raise HypothesisError(msg)


def _labels_to_colors(parts, n):
    colors = [0] * n
    for i, p in enumerate(parts):
        for v in p:
            colors[v] = i
    return colors


# ---------------------------------------------------------------- triangle-free

def dnl_color_triangle_free(G, eps, seed=0, rounds=MAX_ROUNDS, force=False):
    """Colour each v by the first x of an eps-covering with v in D_eps(x)."""
    n = G.ground_size
    e = as_fraction(eps)
    _hypothesis(is_triangle_free(G), "graph has a triangle", force)
    _hypothesis(G.min_degree() >= (Fraction(1, 3) + e) * n,
                f"min degree {G.min_degree()} below (1/3+eps)n", force)
    F = G.neighborhood_system()
    D = F.disjoint_rows(e)
    for r in range(rounds):
        cov = epsilon_covering(F, e, seed=seed + r * 7919)
        X = cov.net
        first = np.full(n, -1, np.int64)
        for i, x in enumerate(X):
            first[(first < 0) & D[x]] = i
        res = _result(G, first.tolist(), {"net_size": len(X), "net": X, "rounds": r + 1,
                                          "coverage_rounds": cov.report.rounds})
        if res.proper:
            return res
        log.error("improper class from an eps-covering (round %d); the sampled cover "
                  "contradicts the degree argument", r + 1)
    raise VerificationError("no proper colouring within the retry budget")


def cluster_color_regular_triangle_free(G, eps, seed=0, force=False):
    """Parts of an (eps/2, eps/2)-clustering of the neighbourhoods."""
    n = G.ground_size
    e = as_fraction(eps)
    _hypothesis(G.is_regular(), "graph is not regular", force)
    _hypothesis(is_triangle_free(G), "graph has a triangle", force)
    _hypothesis(G.min_degree() >= (Fraction(1, 4) + e) * n,
                f"degree {G.min_degree()} below (1/4+eps)n", force)
    cl = set_system_clustering(G.neighborhood_system(), e / 2, e / 2, seed)
    res = _result(G, _labels_to_colors(cl.parts, n), {"clustering": cl.report,
                                                       "net_size": len(cl.net)})
    if not res.proper:
        raise VerificationError("a cluster contains an edge")
    return res


# ---------------------------------------------------------------- cliques

@dataclass
class CliqueSystem:
    t: int
    cliques: list          # (t-2)-cliques as tuples
    extensions: np.ndarray  # |cliques| x n, row K = E(K)

    @classmethod
    def of(cls, G, t):
        if t < 3:
            raise ValueError("need t >= 3")
        K = cliques(G, t - 2)
        M = np.zeros((len(K), G.ground_size), dtype=bool)
        for i, C in enumerate(K):
            m = (1 << G.ground_size) - 1
            for v in C:
                m &= G.nbr[v]
            M[i] = bool_from_mask(m, G.ground_size)
        return cls(t, K, M)

    def family(self):
        return SetSystem(self.extensions.shape[1], matrix=self.extensions)


def gamma(t):
    """(2/(2t-3))^(t-3) / (t-2)!"""
    return Fraction(2, 2 * t - 3) ** (t - 3) / math.factorial(t - 2)


def homomorphism_quotient(G, t, eps, seed=0, rounds=MAX_ROUNDS, force=False):
    """Partition into independent parts with a K_t-free quotient.

    Samples (t-2)-cliques C and keys v by [C in D^K_{gamma eps}(v)], that is
    whether v is gamma*eps-disjoint of every vertex of C.
    """
    n = G.ground_size
    e = as_fraction(eps)
    _hypothesis(is_kt_free(G, t), f"graph contains K_{t}", force)
    _hypothesis(G.min_degree() >= (Fraction(2 * t - 5, 2 * t - 3) + e) * n,
                f"min degree {G.min_degree()} below ((2t-5)/(2t-3)+eps)n", force)
    cs = CliqueSystem.of(G, t)
    F = cs.family()
    g = gamma(t) * e
    close = F.disjoint_rows(g)   # u, w gamma*eps-disjoint
    m = len(cs.cliques)
    if m == 0:
        raise HypothesisError("no (t-2)-cliques")
    idx = np.array(cs.cliques, dtype=np.int64).reshape(m, t - 2)
    req = NetRequest(float(g), constants.DEFAULT_P, max(1, math.floor(1 / g)), seed)
    size = req.size
    for r in range(rounds):
        pick = sorted(set(draw(m, min(size, MAX_DRAWS), seed, "chromatic.cliques", r).tolist()))
        sig = close[:, idx[pick]].all(axis=2)
        parts, labels = _group(sig)
        Q = quotient_graph(G, labels, len(parts))
        indep = all(not (G.adj[np.ix_(p, p)]).any() for p in parts)
        ok = indep and is_kt_free(Q, t)
        rep = {"rounds": r + 1, "sampled_cliques": len(pick), "parts": len(parts),
               "independent": indep, "quotient_kt_free": ok}
        if ok:
            return parts, Q, rep
        size *= 2
    raise VerificationError("no valid quotient within the retry budget")


def _group(sig):
    keys = {}
    labels = []
    for row in np.packbits(sig, axis=1):
        labels.append(keys.setdefault(row.tobytes(), len(keys)))
    parts = [[] for _ in keys]
    for v, l in enumerate(labels):
        parts[l].append(v)
    return parts, np.array(labels, dtype=np.int64)


def quotient_graph(G, labels, k):
    """Parts i != j adjacent iff some edge of G joins them."""
    P = np.zeros((k, G.ground_size))
    P[labels, np.arange(G.ground_size)] = 1
    A = (P @ G.adj.astype(np.float64) @ P.T) > 0.5
    np.fill_diagonal(A, False)
    return SimpleGraph(k, adj=A)


def regular_kt_threshold(t):
    return Fraction(3 * t - 8, 3 * t - 5)


def default_eps_prime(t, eps):
    return as_fraction(eps) * constants.KT_EPS_FACTOR / math.comb(t + 1, 2)


def cluster_color_regular_kt_free(G, t, eps, seed=0, eps_prime=None, eta=None, force=False):
    """Parts of a clustering of the (t-2)-clique extension family."""
    n = G.ground_size
    e = as_fraction(eps)
    _hypothesis(G.is_regular(), "graph is not regular", force)
    _hypothesis(G.min_degree() >= (regular_kt_threshold(t) + e) * n,
                f"degree {G.min_degree()} below (r_t+eps)n", force)
    _hypothesis(is_kt_free(G, t), f"graph contains K_{t}", force)
    ep = default_eps_prime(t, e) if eps_prime is None else as_fraction(eps_prime)
    et = ep * constants.KT_ETA_FACTOR if eta is None else as_fraction(eta)
    F = CliqueSystem.of(G, t).family()
    cl = set_system_clustering(F, ep, et, seed)
    res = _result(G, _labels_to_colors(cl.parts, n),
                  {"eps_prime": str(ep), "eta": str(et), "clustering": cl.report,
                   "family_size": len(F)})
    if not res.proper:
        raise VerificationError("a cluster contains an edge")
    return res


def farvertices_falsifier(G, t, eps_prime, system=None, seed=0, samples=20000):
    """t+1 pairwise eps'-disjoint vertices, or None.

    Exhaustive clique search in the eps'-disjointness graph up to
    FALSIFIER_EXHAUSTIVE vertices; above that, a seeded greedy search.
    """
    n = G.ground_size
    if t + 1 > n:
        return None
    F = (system or CliqueSystem.of(G, t)).family()
    R = F.disjoint_rows(eps_prime).copy()
    np.fill_diagonal(R, False)
    H = SimpleGraph(n, adj=R)
    if n <= FALSIFIER_EXHAUSTIVE:
        return find_clique(H, t + 1)
    rng = stream(seed, "chromatic.falsifier")
    nbr = H.nbr
    for _ in range(samples):
        order = rng.permutation(n)
        cand, chosen = (1 << n) - 1, []
        for v in order:
            if cand >> int(v) & 1:
                chosen.append(int(v))
                cand &= nbr[v]
                if len(chosen) == t + 1:
                    return sorted(chosen)
    return None
