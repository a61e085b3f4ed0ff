"""The acceptance matrix: one seeded experiment per criterion, each rechecked by an oracle.

Every criterion returns a `Row`.  The CLI writes rows to CSV; the test suite
asserts on them.
"""
from dataclasses import dataclass, field
from fractions import Fraction
import math
import time

import numpy as np

from . import constants
from .chromatic import (chromatic_number, cluster_color_regular_kt_free,
                        cluster_color_regular_triangle_free, dnl_color_triangle_free,
                        homomorphism_quotient, independence_number, is_kt_free, is_proper,
                        is_triangle_free)
from .cluster import ClusteringError, euclidean_clustering, hamming_clustering, regularity_partition, set_system_clustering
from .core import (EDGE, WHITE, SetSystem, disjointness_trigraph,
                   as_fraction, mask_of, trigraph_to_hypergraph)
from .gen import (block_set_system, dense_tf_graph, named_graph, random_profile,
                  random_set_system, random_tournament, random_trihypergraph,
                  regular_k4_free, regular_triangle_free, schrijver_graph)
from .lp import fractional_domination
from .metric import PointCloud, embed_euclidean_to_hamming, metric_trigraph, shattered_sphere_instance
from .nets import NetRequest, sample_delta_net
from .rng import derive, stream
from .tournament import (dominate_from_fractional_coloring, enumerated_family,
                         exhaustive_domination, majority_domination, majority_tri_tournament)
from .vc import is_shattered, sauer_shelah_check, vc_dimension, vc_dimension_bruteforce

CSV_COLUMNS = ("instance", "params", "seed", "metric", "value", "bound", "pass")


@dataclass
class Row:
    criterion: int
    instance: str
    params: str
    seed: int
    metric: str
    value: object
    bound: object
    passed: bool
    detail: dict = field(default_factory=dict)
    seconds: float = 0.0

    def csv(self):
        return [self.instance, self.params, self.seed, self.metric, _fmt(self.value),
                _fmt(self.bound), "true" if self.passed else "false"]

    def to_json(self):
        return {"criterion": self.criterion, "instance": self.instance, "params": self.params,
                "seed": self.seed, "metric": self.metric, "value": _fmt(self.value),
                "bound": _fmt(self.bound), "pass": self.passed, "detail": self.detail}

    def line(self):
        tag = "PASS" if self.passed else "FAIL"
        return (f"[{tag}] criterion {self.criterion:2d} {self.instance}: {self.metric} = "
                f"{_fmt(self.value)} (bound {_fmt(self.bound)})")


def _fmt(x):
    if isinstance(x, float):
        return f"{x:.6g}"
    return str(x)


# ---------------------------------------------------------------- 1..4

def criterion_1(seed=0, count=500):
    """Fractional domination of tournaments is at most 2, exactly."""
    t0 = time.perf_counter()
    worst, bad = Fraction(0), []
    for s in range(count):
        n = 2 + s % 11
        val, _ = fractional_domination(random_tournament(n, derive(seed, 1, s)))
        worst = max(worst, val)
        if val > 2:
            bad.append(s)
    sec = time.perf_counter() - t0
    return Row(1, "random tournaments n<=12", f"count={count}", seed, "max fractional domination",
               worst, 2, not bad and sec <= 120, {"violations": bad, "within_2min": sec <= 120})


def criterion_2(seed=0, count=200):
    """Brute-force VC-dimension of disjointness trigraphs is at most floor(1/eps)."""
    epss = [Fraction(1, 2), Fraction(1, 3), Fraction(1, 4)]
    bad, worst = [], -2
    for s in range(count):
        n, m, eps = 2 + s % 13, 1 + (s * 7) % 20, epss[s % 3]
        dens = [0.2, 0.35, 0.5][(s // 3) % 3]
        F = random_set_system(n, m, dens, derive(seed, 2, s))
        d = vc_dimension_bruteforce(disjointness_trigraph(F, eps))
        slack = d - math.floor(1 / eps)
        worst = max(worst, slack)
        if slack > 0:
            bad.append((s, d, str(eps)))
    return Row(2, "random set systems n<=14 |F|<=20", f"count={count}", seed,
               "max vc - floor(1/eps)", worst, 0, not bad, {"violations": bad})


def criterion_3(seed=0, count=500, max_word=6):
    """Word traces obey the Sauer-Shelah bound."""
    bad, words = [], 0
    for s in range(count):
        n, m = 1 + s % 10, 1 + (s * 11) % 40
        H = random_trihypergraph(n, m, seed=derive(seed, 3, s))
        rep = sauer_shelah_check(H, max_word=max_word)
        words += rep.words_checked
        if not rep.ok:
            bad.append((s, rep.violation))
    return Row(3, "random tri-hypergraphs n<=10", f"count={count} |Z|<={max_word}", seed,
               "violations", len(bad), 0, not bad, {"words_checked": words, "violations": bad[:5]})


def interval_hypergraph(n, seed):
    """Random points on a line; one tri-edge per vertex: balls of radius 0.1 with a 0.05 red fringe.

    Clean separations come from intervals, so the VC-dimension is at most 2.
    """
    pts = np.sort(stream(seed, "suite.line").random(n))[:, None]
    return trigraph_to_hypergraph(metric_trigraph(PointCloud("euclidean", pts), 0.1, 0.05))


def criterion_4(seed=0, trials=1000):
    """Failure rate of tau_p samples stays within p + 3 sigma."""
    instances = {"line-balls n=200": (interval_hypergraph(200, seed), 2, 0.1),
                 "line-balls n=60": (interval_hypergraph(60, seed + 1), 2, 0.25)}
    rows, ok = {}, True
    for name, (H, d, delta) in instances.items():
        for p in (0.05, 0.2):
            fails = 0
            for s in range(trials):
                req = NetRequest(delta, p, d, derive(seed, 4, name, p, s))
                fails += not sample_delta_net(H, req).valid
            rate = fails / trials
            bound = p + 3 * math.sqrt(p * (1 - p) / trials)
            rows[f"{name} p={p}"] = {"rate": rate, "bound": bound, "size": NetRequest(delta, p, d).size}
            ok &= rate <= bound
    worst = max(r["rate"] - r["bound"] for r in rows.values())
    return Row(4, "interval calibration instances", f"trials={trials}", seed,
               "max(rate - bound)", worst, 0, ok, rows)


# ---------------------------------------------------------------- 5..8

def criterion_5(seed=0):
    """Named instances: Haggkvist, Brandt, Schrijver."""
    t0 = time.perf_counter()
    H = named_graph("haggkvist")
    checks = {
        "haggkvist_vertices": H.ground_size == 29,
        "haggkvist_10_regular": H.is_regular() and H.min_degree() == 10,
        "haggkvist_triangle_free": is_triangle_free(H),
        "haggkvist_chi_4": chromatic_number(H) == 4,
        "brandt_alpha_4": independence_number(named_graph("brandt12")) == 4,
        "schrijver_2_2_chi_4": chromatic_number(schrijver_graph(2, 2)) == 4,
        "schrijver_3_2_chi_4": chromatic_number(schrijver_graph(3, 2)) == 4,
    }
    checks["runtime_under_5min"] = time.perf_counter() - t0 <= 300
    return Row(5, "named graphs", "haggkvist brandt12 S(2,2) S(3,2)", seed, "checks passed",
               sum(checks.values()), len(checks), all(checks.values()), {"checks": checks})


def criterion_6(seed=0, count=50, eps=0.05):
    """Dense triangle-free graphs get proper colourings from an eps-covering."""
    bad, classes, nets = [], [], []
    e = as_fraction(eps)
    for s in range(count):
        n = 100 + 6 * s
        G = dense_tf_graph(n, eps, seed=derive(seed, 6, s))
        assert is_triangle_free(G) and G.min_degree() >= (Fraction(1, 3) + e) * n
        try:
            r = dnl_color_triangle_free(G, eps, seed=derive(seed, 6, "color", s))
        except Exception as exc:  # counted as a failure with its message
            bad.append((s, repr(exc)))
            continue
        ok = is_proper(G, r.colors) and r.classes_count <= r.report["net_size"]
        classes.append(r.classes_count)
        nets.append(r.report["net_size"])
        if not ok:
            bad.append((s, "improper or too many classes"))
    return Row(6, "dense triangle-free graphs n<=394", f"count={count} eps={eps}", seed,
               "pass rate", (count - len(bad)) / count, 1.0, not bad,
               {"failures": bad, "max_classes": max(classes, default=0),
                "max_net": max(nets, default=0)})


def criterion_7(seed=0, eps=0.05):
    """Clustering colourings of dense regular triangle-free and K4-free graphs."""
    cases = []
    for kind, a in (("petersen", 10), ("clebsch", 8), ("c5", 20), ("bipartite", 50), ("andrasfai", 12)):
        cases.append((f"tf-{kind}", regular_triangle_free(kind, a), 3))
    for s in range(3):
        cases.append((f"k4-tripartite-{s}", regular_k4_free("tripartite", 40, seed=derive(seed, 7, s)), 4))
    cases.append(("k4-c5join", regular_k4_free("c5join", 10), 4))
    out, ok = {}, True
    for i, (name, G, t) in enumerate(cases):
        s = derive(seed, 7, name)
        if t == 3:
            r = cluster_color_regular_triangle_free(G, eps, seed=s)
        else:
            r = cluster_color_regular_kt_free(G, 4, eps, seed=s)
        proper = is_proper(G, r.colors)
        out[name] = {"n": G.ground_size, "degree_ratio": G.min_degree() / G.ground_size,
                     "proper": proper, "classes": r.classes_count}
        ok &= proper
    return Row(7, "regular triangle-free and K4-free", f"eps={eps}", seed, "proper colourings",
               sum(v["proper"] for v in out.values()), len(out), ok, out)


def _check_quotient(G, parts, Q, t):
    n = G.ground_size
    lab = np.full(n, -1)
    for i, p in enumerate(parts):
        lab[p] = i
    if (lab < 0).any():
        return False
    for i, p in enumerate(parts):
        if G.adj[np.ix_(p, p)].any():
            return False
    u, v = np.nonzero(G.adj)
    if not Q.adj[lab[u], lab[v]].all():
        return False
    return is_kt_free(Q, t)


def criterion_8(seed=0, count=50):
    """Homomorphisms to small K_t-free graphs for t = 3, 4."""
    bad, sizes = [], {3: [], 4: []}
    for s in range(count):
        if s % 2 == 0:
            t, eps = 3, 0.05
            G = dense_tf_graph(200, eps, seed=derive(seed, 8, s))
        elif s % 4 == 1:
            t, eps = 4, 0.03
            G = regular_k4_free("tripartite", 40, seed=derive(seed, 8, s))
        else:
            t, eps = 4, 0.02
            G = regular_k4_free("c5join", 10)
        try:
            parts, Q, rep = homomorphism_quotient(G, t, eps, seed=derive(seed, 8, "q", s))
        except Exception as exc:
            bad.append((s, repr(exc)))
            continue
        sizes[t].append(Q.ground_size)
        if not _check_quotient(G, parts, Q, t):
            bad.append((s, "quotient check failed"))
    return Row(8, "K_t-free homomorphic images t in {3,4}", f"count={count}", seed, "pass rate",
               (count - len(bad)) / count, 1.0, not bad,
               {"failures": bad, "max_quotient": {k: max(v, default=0) for k, v in sizes.items()}})


# ---------------------------------------------------------------- 9..11

def set_violations(F, parts, eps, eta):
    """Brute force: same-part u, v with |D(u) minus D_eps(v)| > eta n."""
    n, m = F.ground_size, len(F)
    M = F.matrix.astype(np.int64)
    C = M.T @ M
    D0 = C == 0
    De = C <= math.floor(as_fraction(eps) * m)
    limit = math.floor(as_fraction(eta) * n)
    bad = 0
    for p in parts:
        for u in p:
            for v in p:
                if int((D0[u] & ~De[v]).sum()) > limit:
                    bad += 1
    return bad


def hamming_violations(P, parts, c, eps, eta):
    """Brute force: same-part u, v with more than eta|V| points w, d(u,w) >= cN, d(v,w) <= (c-eps)N."""
    X = P.points.astype(np.int64)
    N, n = P.dimension, len(P)
    d = (X[:, None, :] != X[None, :, :]).sum(axis=2)
    c, e = as_fraction(c), as_fraction(eps)
    far = d >= math.ceil(c * N)
    near = d <= math.floor((c - e) * N)
    limit = math.floor(as_fraction(eta) * n)
    bad = 0
    for p in parts:
        idx = np.array(p)
        cnt = far[idx].astype(int) @ near[idx].astype(int).T
        bad += int((cnt > limit).sum())
    return bad


def clustered_hamming(n, N, centres, flip, seed):
    rng = stream(seed, "suite.hamming")
    C = rng.random((centres, N)) < 0.5
    lab = rng.integers(0, centres, n)
    X = C[lab] ^ (rng.random((n, N)) < flip)
    return PointCloud("hamming", X.astype(np.uint8))


def criterion_9(seed=0, eps=0.2, eta=0.2):
    """Exhaustive recheck of set-system and Hamming clusterings."""
    out, total = {}, 0
    rng = stream(seed, "suite.9")
    for s in range(10):
        n, m = int(rng.integers(20, 201)), int(rng.integers(1, 200))
        F = random_set_system(n, m, float(rng.uniform(0.05, 0.4)), derive(seed, 9, s))
        cl = set_system_clustering(F, eps, eta, seed=derive(seed, 9, "c", s))
        bad = set_violations(F, cl.parts, eps, eta)
        out[f"set n={n} m={m}"] = {"parts": len(cl.parts), "violations": bad}
        total += bad
    for s in range(4):
        n = 80 + 40 * s
        B = block_set_system(n, types=3 + s, seed=derive(seed, 9, "b", s)).matrix
        flips = stream(seed, 9, "flip", s).random(B.shape) < 0.01
        F = SetSystem(n, matrix=B ^ flips)
        cl = set_system_clustering(F, eps, eta, seed=derive(seed, 9, "bc", s))
        bad = set_violations(F, cl.parts, eps, eta)
        out[f"noisy blocks n={n}"] = {"parts": len(cl.parts), "violations": bad}
        total += bad
    for s in range(6):
        n = [300, 200, 250][s % 3]
        P = (clustered_hamming(n, 128, 3 + s, 0.1, derive(seed, 9, "h", s)) if s % 2
             else PointCloud("hamming", (stream(seed, 9, "u", s).random((n, 128)) < 0.5).astype(np.uint8)))
        c = 0.5
        cl = hamming_clustering(P, c, eps, eta, seed=derive(seed, 9, "hc", s))
        bad = hamming_violations(P, cl.parts, c, eps, eta)
        out[f"hamming n={n} s={s}"] = {"parts": len(cl.parts), "violations": bad}
        total += bad
    return Row(9, "set-system and hamming clusterings", f"eps={eps} eta={eta}", seed,
               "violating pairs", total, 0, total == 0, out)


def random_cloud(seed):
    rng = stream(seed, "suite.cloud")
    n, V = int(rng.integers(2, 21)), int(rng.integers(10, 61))
    X = rng.normal(size=(V, n))
    X *= (rng.uniform(0, 3, V) / np.linalg.norm(X, axis=1))[:, None]
    return PointCloud("euclidean", X)


def euclid_violations(P, parts, eps, eta):
    d = P.distances()
    ball = d <= 1 + 1e-12
    out = d > 1 + eps + 1e-12
    limit = math.floor(as_fraction(eta) * len(P))
    bad = 0
    for p in parts:
        idx = np.array(p)
        cnt = ball[idx].astype(int) @ out[idx].astype(int).T
        bad += int((cnt > limit).sum())
    return bad


def criterion_10(seed=0, count=100, eps=0.3, eta=0.2):
    """Euclidean embedding certificates and Euclidean clustering."""
    clean, clustered, gaps = 0, 0, []
    for s in range(count):
        P = random_cloud(derive(seed, 10, s))
        _, cert = embed_euclidean_to_hamming(P, eps, seed=derive(seed, 10, "e", s), strict=False)
        clean += cert.clean
        gaps.append(cert.achieved_gap if cert.achieved_gap is not None else float("nan"))
        try:
            cl = euclidean_clustering(P, eps, eta, seed=derive(seed, 10, "c", s))
            clustered += euclid_violations(P, cl.parts, eps, eta) == 0
        except ClusteringError:
            pass
    ok_a, ok_b = clean / count >= 0.95, clustered / count >= 0.90
    g = np.array(gaps, float)
    return Row(10, "random euclidean clouds |V|<=60 n<=20", f"eps={eps} eta={eta}", seed,
               "certificate clean rate / clustering clean rate",
               f"{clean / count:.2f}/{clustered / count:.2f}", "0.95/0.90", ok_a and ok_b,
               {"certificate_clean_rate": clean / count, "clustering_clean_rate": clustered / count,
                "certificate_ok": ok_a, "clustering_ok": ok_b,
                "max_achieved_gap": float(np.nanmax(g)), "needed_gap": eps * eps})


def criterion_11(seed=0):
    """The basis of the sign-vector sphere instance is shattered."""
    out, ok = {}, True
    for N in (2, 3, 4):
        inst = shattered_sphere_instance(N)
        T = metric_trigraph(inst.cloud, inst.tau, inst.eps)
        sh = is_shattered(T, mask_of(inst.basis)) is not None
        d = vc_dimension(T, cap=N + 1).dimension
        out[N] = {"shattered": sh, "vc": d}
        ok &= sh and d >= N
    return Row(11, "shattered sphere N in {2,3,4}", "", seed, "min vc - N",
               min(v["vc"] - N for N, v in out.items()), 0, ok, out)


# ---------------------------------------------------------------- 12..14

MAJORITY_VOTERS = (1, 3, 5, 7, 9, 11, 21, 51, 101, 1001)
MAJORITY_CANDIDATES = (300, 20, 120, 15)


def profile_case(s):
    return MAJORITY_CANDIDATES[s % len(MAJORITY_CANDIDATES)], MAJORITY_VOTERS[s % len(MAJORITY_VOTERS)]


def criterion_12(seed=0, count=100, eps=0.1):
    """Majority-digraph domination within the frozen budget."""
    budget = constants.MAJORITY_BUDGET[eps]
    bad, ratios, sizes = [], [], []
    for s in range(count):
        n, m = profile_case(s)
        P = random_profile(n, m, seed + s)
        dom = majority_domination(P, eps, seed=seed + s)
        _, D = majority_tri_tournament(P, eps)
        valid = D.dominates(dom.mask)
        sizes.append(len(dom))
        if not valid or len(dom) > budget:
            bad.append((s, valid, len(dom)))
        if n <= 20:
            g, _ = exhaustive_domination(D)
            ratios.append(len(dom) / g)
    return Row(12, "random profiles n<=300 m<=1001", f"eps={eps} count={count}", seed,
               "max |X|", max(sizes), budget, not bad,
               {"failures": bad, "max_ratio_to_exhaustive": max(ratios, default=None),
                "mean_ratio_to_exhaustive": float(np.mean(ratios)) if ratios else None})


def criterion_13(seed=0, count=100):
    """Domination through the fractional-colouring recursion."""
    bad, ratios, depth = [], [], 0
    for s in range(count):
        n = 5 + s % 36
        T = random_tournament(n, derive(seed, 13, s))
        F = enumerated_family(T, seed=derive(seed, 13, "f", s))
        dom = dominate_from_fractional_coloring(T, F, seed=derive(seed, 13, "d", s))
        depth = max(depth, dom.report["depth"])
        if not T.dominates(dom.mask):
            bad.append((s, "not dominating"))
            continue
        if n <= 14:
            g, _ = exhaustive_domination(T)
            ratios.append(len(dom) / g)
            if len(dom) > constants.RECURSION_RATIO * g:
                bad.append((s, "ratio"))
    return Row(13, "random tournaments n<=40", f"count={count}", seed, "max ratio to exhaustive",
               max(ratios, default=0.0), constants.RECURSION_RATIO, not bad,
               {"failures": bad, "max_depth": depth})


def bad_pairs(T, parts, eta):
    """Direct density count per pair of parts."""
    st = T.status
    eta = as_fraction(eta)
    bad = 0
    for i in range(len(parts)):
        for j in range(i + 1, len(parts)):
            block = st[np.ix_(parts[i], parts[j])]
            tot = block.size
            if (block == EDGE).sum() > eta * tot and (block == WHITE).sum() > eta * tot:
                bad += 1
    return bad


def criterion_14(seed=0, count=8, eps=0.2, eta=0.2):
    """Regularity partitions of dense disjointness instances."""
    out, ok = {}, True
    for s in range(count):
        n = 50 + 50 * s
        F = block_set_system(n, types=3 + s % 3, seed=derive(seed, 14, s))
        T = disjointness_trigraph(F, eps)
        hyp = 8 * T.red_count() <= float(eta) ** 2 * n * n
        R = regularity_partition(F, eps, eta, seed=derive(seed, 14, "r", s))
        K = len(R.parts)
        frac = bad_pairs(T, R.parts, eta) / (K * (K - 1) // 2) if K > 1 else 0.0
        sizes = [len(p) for p in R.parts]
        equitable = max(sizes) - min(sizes) <= 1 and sum(sizes) == n
        out[f"n={n}"] = {"K": K, "bad_fraction": frac, "hypothesis": hyp, "equitable": equitable}
        ok &= hyp and equitable and frac <= eta
    return Row(14, "block disjointness instances n<=400", f"eps={eps} eta={eta}", seed,
               "max bad-pair fraction", max(v["bad_fraction"] for v in out.values()), eta, ok, out)


CRITERIA = {i: globals()[f"criterion_{i}"] for i in range(1, 15)}


def run_criterion(i, seed=0):
    t0 = time.perf_counter()
    row = CRITERIA[i](seed=seed)
    row.seconds = time.perf_counter() - t0
    return row
