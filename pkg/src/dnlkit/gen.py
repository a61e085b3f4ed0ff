"""Named extremal graphs, Kneser-type families, sphere constructions and seeded random instances."""
from dataclasses import dataclass, field
import hashlib
from itertools import combinations
import json
import math

import numpy as np

from .core import Digraph, SetSystem, SimpleGraph, TriEdge, TriGraph, TriHypergraph, EDGE, RED, WHITE
from .rng import stream

MAX_VERTICES = 100_000


@dataclass
class InstanceSpec:
    family: str
    params: dict = field(default_factory=dict)

    def to_json(self):
        return {"family": self.family, "params": self.params}


class GenerationError(RuntimeError):
    pass


def digest(G):
    """sha256 of the canonical edge-list JSON."""
    doc = json.dumps(G.to_json(), sort_keys=True, separators=(",", ":"))
    return hashlib.sha256(doc.encode()).hexdigest()


# ---------------------------------------------------------------- named graphs

def _cycle(k):
    return [(i, (i + 1) % k) for i in range(k)]


def grotzsch():
    """Outer 5-cycle 0..4, inner 5..9 with 5+i ~ i±1, centre 10 ~ all inner."""
    E = _cycle(5)
    for i in range(5):
        E += [(5 + i, (i - 1) % 5), (5 + i, (i + 1) % 5), (5 + i, 10)]
    return SimpleGraph(11, E)


def petersen():
    E = _cycle(5) + [(i, 5 + i) for i in range(5)] + [(5 + i, 5 + (i + 2) % 5) for i in range(5)]
    return SimpleGraph(10, E)


def blow_up(G, weights):
    """Replace vertex v by an independent set of size weights[v]; edges become complete bipartite."""
    start = np.concatenate([[0], np.cumsum(weights)]).astype(int)
    n = int(start[-1])
    A = np.zeros((n, n), dtype=bool)
    for u, v in G.edges:
        A[start[u]:start[u + 1], start[v]:start[v + 1]] = True
        A[start[v]:start[v + 1], start[u]:start[u + 1]] = True
    return SimpleGraph(n, adj=A)


def haggkvist():
    """Grötzsch blown up: outer cycle x3, inner x2, centre x4."""
    return blow_up(grotzsch(), [3] * 5 + [2] * 5 + [4])


BRANDT_LABELS = ["u1", "u2", "u3", "u4", "x", "v2", "v3", "y", "w1", "w2", "w3", "w4"]
BRANDT_EDGES = [
    ("u1", "w4"), ("u2", "w3"), ("u3", "w2"), ("u4", "w1"),
    ("u1", "w2"), ("u1", "w3"), ("u2", "w1"), ("u2", "w4"),
    ("u3", "w1"), ("u3", "w4"), ("u4", "w2"), ("u4", "w3"),
    ("v2", "u2"), ("v2", "w2"), ("v2", "x"), ("v2", "y"),
    ("v3", "u3"), ("v3", "w3"), ("v3", "y"), ("v3", "x"),
    ("x", "u1"), ("x", "w1"), ("y", "u4"), ("y", "w4"),
]


def brandt12():
    idx = {s: i for i, s in enumerate(BRANDT_LABELS)}
    return SimpleGraph(12, [(idx[a], idx[b]) for a, b in BRANDT_EDGES])


def clebsch():
    """Folded 5-cube: 16 vertices, 5-regular, triangle-free."""
    E = []
    for u in range(16):
        for m in (1, 2, 4, 8, 15):
            v = u ^ m
            if u < v:
                E.append((u, v))
    return SimpleGraph(16, E)


NAMED = {"grotzsch": grotzsch, "haggkvist": haggkvist, "brandt12": brandt12,
         "petersen": petersen, "clebsch": clebsch}

NAMED_DIGESTS = {
    "grotzsch": "291c52ee28142c700a0abbb680e5a4cd2fed96ff032275a8c091fb5c2bc79252",
    "haggkvist": "eb2c32e4548da7629d5cfa8ba2d42ccf7260686b71b060dd94dc5ef42aac8823",
    "brandt12": "7171222c52a6ba1f2c317aec6355f3ab7d1acb3bd46e66698574600b4016fa6c",
    "petersen": "2a4c8f017d67f4f7fb2aa5d56845db1c247a3f5e0452bf6db1ed67ca520457ec",
    "clebsch": "066e7c12d665003f87287e0da6e27959051250d1122305a4d579fd8735538618",
}


def named_graph(name):
    if name not in NAMED:
        raise ValueError(f"unknown named graph {name!r}; known: {sorted(NAMED)}")
    G = NAMED[name]()
    want = NAMED_DIGESTS.get(name)
    if want is not None and digest(G) != want:
        raise GenerationError(f"{name} does not match its frozen digest")
    return G


# ---------------------------------------------------------------- Kneser family

def _stable_subsets(m, l):
    """l-subsets of the m-cycle with no two cyclically consecutive elements."""
    out = []
    for S in combinations(range(m), l):
        if any(b - a == 1 for a, b in zip(S, S[1:])):
            continue
        if l > 1 and S[0] == 0 and S[-1] == m - 1:
            continue
        out.append(S)
    return out


def _disjointness_graph(sets, n_ground):
    M = np.zeros((len(sets), n_ground), dtype=np.float64)
    for i, S in enumerate(sets):
        M[i, list(S)] = 1
    A = (M @ M.T) < 0.5
    np.fill_diagonal(A, False)
    return SimpleGraph(len(sets), adj=A)


def kneser_graph(n, k):
    if math.comb(n, k) > MAX_VERTICES:
        raise GenerationError("too many vertices")
    sets = list(combinations(range(n), k))
    G = _disjointness_graph(sets, n)
    G.labels = sets
    return G


def schrijver_graph(l, k):
    """Stable l-subsets of the cycle of length 2l+k, adjacent when disjoint."""
    if l < 1 or k < 1:
        raise ValueError("need l, k >= 1")
    m = 2 * l + k
    if math.comb(m, l) > MAX_VERTICES:
        raise GenerationError("too many vertices")
    sets = _stable_subsets(m, l)
    G = _disjointness_graph(sets, m)
    G.labels = sets
    return G


def schrijver_hajnal(l, k, K):
    """S(l,k) plus blocks A_i of size l^K (X ~ A_i for i in X) and B complete to A.

    |B| = floor(|A|/2).  Vertex order: S(l,k), then A_1..A_m, then B.
    """
    S = schrijver_graph(l, k)
    m = 2 * l + k
    block = l ** K
    a = m * block
    b = a // 2
    n = S.ground_size + a + b
    if n > MAX_VERTICES:
        raise GenerationError("too many vertices")
    A = np.zeros((n, n), dtype=bool)
    s = S.ground_size
    A[:s, :s] = S.adj
    for x, X in enumerate(S.labels):
        for i in X:
            A[x, s + i * block: s + (i + 1) * block] = True
    A[s:s + a, s + a:] = True
    A = A | A.T
    G = SimpleGraph(n, adj=A)
    G.meta = {"schrijver": s, "A": a, "B": b, "block": block,
              "deficit": b - l * block}
    return G


# ---------------------------------------------------------------- sphere constructions

def sphere_points(count, d, seed, min_sep=0.0, label="points", tries=50):
    """Seeded uniform points on S^d (in R^(d+1)), greedily thinned to a minimum angle."""
    rng = stream(seed, "gen.sphere", label)
    out = []
    for _ in range(tries):
        P = rng.standard_normal((count * 4, d + 1))
        P /= np.linalg.norm(P, axis=1)[:, None]
        for p in P:
            if len(out) == count:
                break
            if min_sep <= 0 or not out or np.arccos(np.clip(np.array(out) @ p, -1, 1)).min() >= min_sep:
                out.append(p)
        if len(out) == count:
            return np.array(out)
    raise GenerationError("could not place well-separated points")


def _angles(P, Q):
    return np.arccos(np.clip(P @ Q.T, -1.0, 1.0))


def borsuk_hajnal(d, eps, nx, ny, seed=0, retries=5):
    """X on S^d with near-antipodal edges, Y joined to X by caps, Z complete to Y.

    Vertex order X, Y, Z with |Z| = ny // 2.
    """
    nz = ny // 2
    n = nx + ny + nz
    if n > 5000:
        raise GenerationError("too many vertices")
    for r in range(retries):
        X = sphere_points(nx, d, seed, label=("X", r))
        Y = sphere_points(ny, d, seed, label=("Y", r))
        A = np.zeros((n, n), dtype=bool)
        A[:nx, :nx] = _angles(X, X) >= math.pi - eps
        np.fill_diagonal(A, False)
        A[:nx, nx:nx + ny] = _angles(X, Y) <= math.pi / 2 - eps
        A[nx:nx + ny, nx + ny:] = True
        A = A | A.T
        G = SimpleGraph(n, adj=A)
        from .chromatic import is_triangle_free
        if is_triangle_free(G):
            dmin = G.min_degree()
            G.meta = {"X": nx, "Y": ny, "Z": nz, "min_degree": dmin,
                      "eps_prime": 1 / 3 - dmin / n, "rounds": r + 1}
            return G
    raise GenerationError("triangle persists after retries")


def _degree_subgraph(allowed, left, right):
    """Max-flow subgraph of `allowed` with left/right degree caps (bool matrix)."""
    from scipy.sparse import csr_matrix
    from scipy.sparse.csgraph import maximum_flow
    a, b = allowed.shape
    src, sink = a + b, a + b + 1
    rows, cols, caps = [], [], []
    for i in range(a):
        rows.append(src); cols.append(i); caps.append(int(left[i]))
    li, rj = np.nonzero(allowed)
    rows += li.tolist(); cols += (rj + a).tolist(); caps += [1] * len(li)
    for j in range(b):
        rows.append(a + j); cols.append(sink); caps.append(int(right[j]))
    C = csr_matrix((np.array(caps, np.int32), (rows, cols)), shape=(a + b + 2, a + b + 2))
    flow = maximum_flow(C, src, sink).flow.toarray()
    return flow[:a, a:a + b] > 0


def _balanced(total, k):
    q, r = divmod(total, k)
    return [q + 1] * r + [q] * (k - r)


def _borsuk_points(count, d, eps, seed):
    """Sphere points in near-antipodal pairs, each pair at angle >= pi - eps."""
    half = sphere_points((count + 1) // 2, d, seed, label="core")
    rng = stream(seed, "gen.borsuk-pairs")
    out = []
    for p in half:
        while True:
            q = -p + rng.normal(0, eps / 4, size=p.shape)
            q /= np.linalg.norm(q)
            if np.arccos(np.clip(p @ q, -1, 1)) >= math.pi - eps:
                break
        out += [p, q]
    return np.array(out[:count])


def orourke_core(s, d, eps, core, seed=0, degree=None):
    """Triangle-free G_eps, regular up to a spread of 1, vertex order B, I1, I2, J1, J2.

    B is a Borsuk graph on `core` sphere points (edges at angle >= pi - eps,
    planted as near-antipodal pairs);
    I = I1+I2 holds 2s sphere points and each b in B picks D - deg_B(b) of
    the I points in its cap of radius pi/2 - eps (chosen by max-flow, so caps
    of adjacent core points stay disjoint).  Each I_k is joined to J_k by a
    bipartite graph giving every I vertex total degree D and every J vertex
    D or D-1.  D defaults to the largest value every cap allows.
    """
    B = _borsuk_points(core, d, eps, seed)
    I = sphere_points(2 * s, d, seed, label="I")
    BB = _angles(B, B) >= math.pi - eps
    np.fill_diagonal(BB, False)
    cap = _angles(B, I) <= math.pi / 2 - eps
    degB = BB.sum(axis=1)
    top = int((cap.sum(axis=1) + degB).min())
    D = top if degree is None else min(int(degree), top)
    while D >= 1:
        try:
            return _orourke_layout(BB, cap, degB, s, D, top)
        except GenerationError:
            D -= 1
    raise GenerationError("no feasible core degree")


def _orourke_layout(BB, cap, degB, s, D, top):
    core = len(BB)
    if (degB > D).any():
        raise GenerationError("core degrees exceed the target degree")
    need = D - degB
    load = max(1, math.ceil(need.sum() / (2 * s)) + 1)
    BI = _degree_subgraph(cap, need, [load] * (2 * s))
    if (BI.sum(axis=1) < need).any():
        BI = _degree_subgraph(cap, need, [D] * (2 * s))
        if (BI.sum(axis=1) < need).any():
            raise GenerationError("caps cannot carry the core degrees")
    r = BI.sum(axis=0)
    halves = [np.arange(s), np.arange(s, 2 * s)]
    sizes = [math.ceil(int((D - r[h]).sum()) / D) for h in halves]
    n = core + 2 * s + sum(sizes)
    A = np.zeros((n, n), dtype=bool)
    A[:core, :core] = BB
    A[:core, core:core + 2 * s] = BI
    off = core + 2 * s
    for h, m in zip(halves, sizes):
        want = D - r[h]
        if m == 0 or (want > m).any():
            raise GenerationError("J part too small for the I degrees")
        IJ = _degree_subgraph(np.ones((len(h), m), bool), want, _balanced(int(want.sum()), m))
        A[np.ix_(core + h, off + np.arange(m))] = IJ
        off += m
    G = SimpleGraph(n, adj=A | A.T)
    G.meta = {"degree": D, "max_degree": top, "B": core, "I": 2 * s, "J": sum(sizes)}
    return G


def orourke_ratio(t, x):
    """Degree ratio of the joined graph when G_eps has degree x * |G_eps|."""
    return 1 / (2 - x) if t == 4 else (2 - x) / (3 - 2 * x)


def orourke_regular(t, eps, scale=20, seed=0, d=2, core=None):
    """G_eps joined with one (t=4) or two mutually complete (t=5) independent sets.

    G_eps is built with caps of radius pi/2 - eps and degree D as close to
    (1/4 - eps) n as the sampled caps allow from below.  Each added set has
    n - D vertices, so the result is regular up to the spread of 1 left by
    G_eps, with degree ratio about 4/7 (t=4) or 7/10 (t=5) minus O(eps).
    """
    if t not in (4, 5):
        raise ValueError("t must be 4 or 5")
    if not 0 < eps < 0.25:
        raise ValueError("eps must lie in (0, 1/4)")
    from .chromatic import is_kt_free, is_triangle_free
    core = core if core is not None else max(6, scale // 2)
    target = 0.25 - eps
    G0 = orourke_core(scale, d, eps, core, seed)
    D = G0.meta["degree"]
    while D > 1 and D / G0.ground_size > target:
        D = min(D - 1, math.floor(target * G0.ground_size))
        G0 = orourke_core(scale, d, eps, core, seed, D)
    if not is_triangle_free(G0):
        raise GenerationError("core has a triangle")
    n0, D = G0.ground_size, G0.meta["degree"]
    extra = n0 - D
    layers = 1 if t == 4 else 2
    n = n0 + layers * extra
    A = np.zeros((n, n), dtype=bool)
    A[:n0, :n0] = G0.adj
    A[:n0, n0:] = True
    if layers == 2:
        A[n0:n0 + extra, n0 + extra:] = True
    A = A | A.T
    G = SimpleGraph(n, adj=A)
    if not is_kt_free(G, t):
        raise GenerationError(f"construction contains K_{t}")
    deg = G.degrees
    G.meta = {"core_vertices": n0, "core_degree": D, "core_ratio": D / n0,
              "layer": extra, "layers": layers, "borsuk_edges": int(G0.adj[:core, :core].sum()) // 2,
              "min_degree": int(deg.min()), "max_degree": int(deg.max()),
              "degree_ratio": float(deg.min()) / n,
              "ideal_ratio": orourke_ratio(t, target), "spread": int(deg.max() - deg.min())}
    return G


# ---------------------------------------------------------------- dense graph families

def andrasfai(k):
    """Circulant on 3k-1 vertices, i ~ j iff (j - i) mod (3k-1) is 1 mod 3; k-regular."""
    m = 3 * k - 1
    return SimpleGraph(m, [(i, j) for i in range(m) for j in range(i + 1, m) if (j - i) % 3 == 1])


def complete_multipartite(sizes):
    lab = np.repeat(np.arange(len(sizes)), sizes)
    A = lab[:, None] != lab[None, :]
    return SimpleGraph(len(lab), adj=A)


def circulant_bipartite(m, offsets):
    """Bipartite graph on two m-sets with left i ~ right (i + o) mod m for o in offsets."""
    A = np.zeros((2 * m, 2 * m), dtype=bool)
    for o in offsets:
        for i in range(m):
            A[i, m + (i + o) % m] = True
    return SimpleGraph(2 * m, adj=A | A.T)


def join(G, H):
    n, k = G.ground_size, H.ground_size
    A = np.zeros((n + k, n + k), dtype=bool)
    A[:n, :n] = G.adj
    A[n:, n:] = H.adj
    A[:n, n:] = True
    return SimpleGraph(n + k, adj=A | A.T)


def empty_graph(k):
    return SimpleGraph(k)


def regular_k4_free(kind, a, seed=0):
    """Regular K4-free instances: 'c5join' (degree 5/8) or 'tripartite' minus circulant pieces."""
    if kind == "c5join":
        return join(blow_up(SimpleGraph(5, _cycle(5)), [a] * 5), empty_graph(3 * a))
    if kind == "tripartite":
        rng = stream(seed, "gen.tripartite")
        A = complete_multipartite([a] * 3).adj.copy()
        r = int(rng.integers(0, max(1, a // 20) + 1))
        offs = rng.choice(a, size=r, replace=False) if r else []
        for p, q in ((0, 1), (1, 2), (0, 2)):
            for o in offs:
                for i in range(a):
                    u, v = p * a + i, q * a + (i + int(o)) % a
                    A[u, v] = A[v, u] = False
        return SimpleGraph(3 * a, adj=A)
    raise ValueError(f"unknown kind {kind!r}")


def regular_triangle_free(kind, a, seed=0):
    """Regular triangle-free blow-ups: petersen (0.3), clebsch (0.3125), c5 (0.4), bipartite (0.5)."""
    cores = {"petersen": petersen, "clebsch": clebsch,
             "c5": lambda: SimpleGraph(5, _cycle(5)), "bipartite": lambda: SimpleGraph(2, [(0, 1)])}
    if kind == "andrasfai":
        core = andrasfai(3)
    elif kind in cores:
        core = cores[kind]()
    else:
        raise ValueError(f"unknown kind {kind!r}")
    return blow_up(core, [a] * core.ground_size)


def dense_tf_graph(n, eps, seed=0, noise=0.05):
    """Triangle-free, min degree >= (1/3+eps)n: a weighted blow-up of a small core plus edge deletions."""
    from .chromatic import is_triangle_free
    rng = stream(seed, "gen.dense-tf")
    need = math.ceil((1 / 3 + eps) * n - 1e-9)
    for _ in range(200):
        kind = rng.choice(["c5", "bipartite", "andrasfai"])
        if kind == "c5":
            core = SimpleGraph(5, _cycle(5))
        elif kind == "bipartite":
            core = SimpleGraph(2, [(0, 1)])
        else:
            ks = [k for k in (2, 3, 4) if k / (3 * k - 1) >= 1 / 3 + eps + 0.01]
            if not ks:
                continue
            core = andrasfai(int(rng.choice(ks)))
        c = core.ground_size
        w = rng.dirichlet(np.full(c, 300.0)) * n
        w = np.floor(w).astype(int)
        w[: n - w.sum()] += 1
        G = blow_up(core, w)
        if G.min_degree() < need:
            continue
        A = G.adj.copy()
        deg = A.sum(axis=1)
        iu = np.triu_indices(n, 1)
        cand = np.flatnonzero(A[iu])
        rng.shuffle(cand)
        for e in cand[: int(noise * len(cand))]:
            u, v = iu[0][e], iu[1][e]
            if deg[u] > need and deg[v] > need:
                A[u, v] = A[v, u] = False
                deg[u] -= 1
                deg[v] -= 1
        G = SimpleGraph(n, adj=A)
        if is_triangle_free(G) and G.min_degree() >= need:
            G.meta = {"core": str(kind), "weights": w.tolist()}
            return G
    raise GenerationError("no instance met the degree floor")


# ---------------------------------------------------------------- random instances

def random_tournament(n, seed=0):
    rng = stream(seed, "gen.tournament", n)
    A = np.zeros((n, n), dtype=bool)
    iu = np.triu_indices(n, 1)
    flip = rng.random(len(iu[0])) < 0.5
    A[iu[0][flip], iu[1][flip]] = True
    A[iu[1][~flip], iu[0][~flip]] = True
    return Digraph(n, A)


def random_profile(n, m, seed=0):
    from .tournament import VoterProfile
    rng = stream(seed, "gen.profile", n, m)
    return VoterProfile(np.array([rng.permutation(n) for _ in range(m)], dtype=np.int64))


def random_set_system(n, m, density=0.3, seed=0):
    rng = stream(seed, "gen.set-system", n, m)
    return SetSystem(n, matrix=rng.random((m, n)) < density)


def block_set_system(n, types=4, base=4, copies=6, seed=0):
    """Vertices of a few types; each base set repeated, so |F_xy| is 0 or >= copies."""
    rng = stream(seed, "gen.block", n, types)
    pattern = rng.random((base, types)) < 0.5
    lab = rng.integers(0, types, n)
    M = np.repeat(pattern[:, lab], copies, axis=0)
    return SetSystem(n, matrix=M)


def random_trigraph(n, p_edge=0.3, p_red=0.1, seed=0):
    rng = stream(seed, "gen.trigraph", n)
    U = rng.random((n, n))
    st = np.where(U < p_edge, EDGE, np.where(U < p_edge + p_red, RED, WHITE)).astype(np.uint8)
    st = np.triu(st, 1)
    return TriGraph(n, st + st.T)


def random_trihypergraph(n, m, p_black=0.4, p_red=0.15, seed=0):
    """m tri-edges; each vertex black, red or white independently."""
    rng = stream(seed, "gen.trihypergraph", n, m)
    U = rng.random((m, n))
    edges = []
    for row in U:
        black = sum(1 << v for v in np.flatnonzero(row < p_black).tolist())
        red = sum(1 << v for v in np.flatnonzero((row >= p_black) & (row < p_black + p_red)).tolist())
        edges.append(TriEdge(n, black, red))
    return TriHypergraph(n, edges)


def random_instances(kind, params=None, seed=0):
    p = dict(params or {})
    if kind == "tournament":
        return random_tournament(p.get("n", 10), seed)
    if kind == "profile":
        return random_profile(p.get("n", 10), p.get("m", 7), seed)
    if kind == "set_system":
        return random_set_system(p.get("n", 20), p.get("m", 20), p.get("density", 0.3), seed)
    if kind == "trigraph":
        return random_trigraph(p.get("n", 10), p.get("p_edge", 0.3), p.get("p_red", 0.1), seed)
    if kind == "trihypergraph":
        return random_trihypergraph(p.get("n", 8), p.get("m", 12), p.get("p_black", 0.4),
                                    p.get("p_red", 0.15), seed)
    if kind == "dense_tf_graph":
        return dense_tf_graph(p.get("n", 200), p.get("eps", 0.05), seed)
    raise ValueError(f"unknown instance kind {kind!r}")
