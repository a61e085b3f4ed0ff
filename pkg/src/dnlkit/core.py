"""Set systems, trigraphs, tri-hypergraphs, tri-tournaments, digraphs, graphs.

Vertices are the integers 0..n-1.  Vertex subsets are Python ints used as
bitsets (bit v set <=> v in the subset); bulk counting goes through numpy.
"""
from fractions import Fraction
from functools import cached_property
import math

import numpy as np

WHITE, EDGE, RED = 0, 1, 2


# ---------------------------------------------------------------- bitsets

def mask_of(vertices):
    m = 0
    for v in vertices:
        m |= 1 << int(v)
    return m


def members(mask):
    """Sorted list of the vertices in a bitset."""
    out = []
    while mask:
        low = mask & -mask
        out.append(low.bit_length() - 1)
        mask ^= low
    return out


def popcount(mask):
    return mask.bit_count()


def full_mask(n):
    return (1 << n) - 1


def mask_from_bool(row):
    """Bitset from a boolean numpy vector."""
    idx = np.flatnonzero(row)
    if len(idx) == 0:
        return 0
    packed = np.packbits(np.asarray(row, dtype=bool), bitorder="little")
    return int.from_bytes(packed.tobytes(), "little")


def bool_from_mask(mask, n):
    raw = mask.to_bytes((n + 7) // 8 or 1, "little")
    return np.unpackbits(np.frombuffer(raw, dtype=np.uint8), bitorder="little")[:n].astype(bool)


def as_fraction(x):
    """Exact rational for a user threshold; floats are read as their decimal repr."""
    if isinstance(x, Fraction):
        return x
    if isinstance(x, int):
        return Fraction(x)
    if isinstance(x, str):
        return Fraction(x)
    return Fraction(repr(float(x)))


def count_floor(eps, total):
    """Largest integer k with k <= eps*total (exact)."""
    return math.floor(as_fraction(eps) * total)


# ---------------------------------------------------------------- SetSystem

class SetSystem:
    """A family F of subsets of {0..ground_size-1}; duplicates allowed."""

    def __init__(self, ground_size, sets=(), matrix=None):
        self.ground_size = n = int(ground_size)
        if matrix is not None:
            m = np.asarray(matrix, dtype=bool)
            if m.ndim != 2 or m.shape[1] != n:
                raise ValueError("incidence matrix must be |F| x ground_size")
            self._matrix = m
            self._sets = None
        else:
            out = []
            for s in sets:
                m = s if isinstance(s, int) else mask_of(s)
                if m >> n:
                    raise ValueError(f"set {members(m)} leaves the ground set")
                out.append(m)
            self._sets = tuple(out)
            self._matrix = None

    @property
    def sets(self):
        if self._sets is None:
            self._sets = tuple(mask_from_bool(r) for r in self._matrix)
        return self._sets

    @cached_property
    def matrix(self):
        if self._matrix is not None:
            return self._matrix
        m = np.zeros((len(self._sets), self.ground_size), dtype=bool)
        for i, s in enumerate(self._sets):
            m[i, members(s)] = True
        return m

    def __len__(self):
        if self._sets is not None:
            return len(self._sets)
        return self._matrix.shape[0]

    @cached_property
    def co_counts(self):
        """n x n matrix of |F_xy|; the diagonal holds |F_x|."""
        m = self.matrix.astype(np.float64)
        return np.rint(m.T @ m).astype(np.int64)

    def count_xy(self, x, y):
        return int(self.co_counts[x, y])

    def disjoint_rows(self, eps):
        """Boolean n x n matrix, row x = D_eps(x)."""
        return self.co_counts <= count_floor(eps, len(self))

    def disjointness_ratio(self):
        """min_x |D(x)|/|V| as a Fraction (0 for the empty ground set)."""
        n = self.ground_size
        if n == 0:
            return Fraction(0)
        sizes = (self.co_counts == 0).sum(axis=1)
        return Fraction(int(sizes.min()), n)

    def to_json(self):
        return {"type": "SetSystem", "ground_size": self.ground_size,
                "sets": [members(s) for s in self.sets]}

    @classmethod
    def from_json(cls, doc):
        return cls(doc["ground_size"], [mask_of(s) for s in doc["sets"]])

    def __repr__(self):
        return f"SetSystem(n={self.ground_size}, |F|={len(self)})"


def disjoint_set(F, x, eps):
    """D_eps(x) = {y : |F_xy| <= eps*|F|} as a bitset."""
    if not 0 <= x < F.ground_size:
        raise ValueError("vertex out of range")
    return mask_from_bool(F.disjoint_rows(eps)[x])


# ---------------------------------------------------------------- TriGraph

class TriGraph:
    """Pairs classified as edge (E), red (R) or non-edge (W)."""

    def __init__(self, ground_size, status):
        n = self.ground_size = int(ground_size)
        st = np.asarray(status, dtype=np.uint8)
        if st.shape != (n, n):
            raise ValueError("status must be n x n")
        if not np.array_equal(st, st.T):
            raise ValueError("status must be symmetric")
        if n and (st.diagonal() != WHITE).any():
            raise ValueError("no self pairs")
        if (st > RED).any():
            raise ValueError("unknown status code")
        st.setflags(write=False)
        self.status = st

    @classmethod
    def from_pairs(cls, n, edges=(), red=()):
        st = np.zeros((n, n), dtype=np.uint8)
        for code, pairs in ((EDGE, edges), (RED, red)):
            for u, v in pairs:
                if u == v:
                    raise ValueError("self pair")
                if st[u, v] != WHITE:
                    raise ValueError(f"pair {u},{v} listed twice")
                st[u, v] = st[v, u] = code
        return cls(n, st)

    @cached_property
    def _masks(self):
        E = [mask_from_bool(r) for r in self.status == EDGE]
        R = [mask_from_bool(r) for r in self.status == RED]
        return E, R

    def nbr(self, v):
        return self._masks[0][v]

    def closed_nbr(self, v):
        return self._masks[0][v] | (1 << v)

    def red(self, v):
        return self._masks[1][v]

    def white(self, v):
        """W(v): vertices other than v in neither N(v) nor R(v)."""
        return full_mask(self.ground_size) & ~(self.closed_nbr(v) | self.red(v))

    def min_degree(self):
        if self.ground_size == 0:
            return 0
        return int((self.status == EDGE).sum(axis=1).min())

    def edge_pairs(self, code=EDGE):
        iu = np.triu_indices(self.ground_size, 1)
        sel = self.status[iu] == code
        return list(zip(iu[0][sel].tolist(), iu[1][sel].tolist()))

    def red_count(self):
        return int((self.status == RED).sum()) // 2

    def to_json(self):
        out = [[u, v, "e"] for u, v in self.edge_pairs(EDGE)]
        out += [[u, v, "r"] for u, v in self.edge_pairs(RED)]
        out.sort()
        return {"type": "TriGraph", "ground_size": self.ground_size, "status": out}

    @classmethod
    def from_json(cls, doc):
        n = doc["ground_size"]
        st = np.zeros((n, n), dtype=np.uint8)
        for u, v, s in doc["status"]:
            st[u, v] = st[v, u] = EDGE if s == "e" else RED
        return cls(n, st)

    def __repr__(self):
        return f"TriGraph(n={self.ground_size}, |E|={len(self.edge_pairs())}, |R|={self.red_count()})"


def disjointness_trigraph(F, eps):
    """E = {xy : F_xy empty}, R = {xy : 0 < |F_xy| <= eps|F|}."""
    C = F.co_counts
    k = count_floor(eps, len(F))
    st = np.where(C == 0, EDGE, np.where(C <= k, RED, WHITE)).astype(np.uint8)
    np.fill_diagonal(st, WHITE)
    return TriGraph(F.ground_size, st)


def read_edge_list(text, ground_size=None):
    """Parse 'u v [e|r]' lines into a TriGraph ('#' comments allowed)."""
    edges, reds, top = [], [], -1
    for raw in text.splitlines():
        line = raw.split("#", 1)[0].split()
        if not line:
            continue
        if len(line) not in (2, 3) or (len(line) == 3 and line[2] not in "er"):
            raise ValueError(f"bad edge-list line: {raw!r}")
        u, v = int(line[0]), int(line[1])
        (reds if len(line) == 3 and line[2] == "r" else edges).append((u, v))
        top = max(top, u, v)
    n = top + 1 if ground_size is None else ground_size
    return TriGraph.from_pairs(n, edges, reds)


def write_edge_list(T):
    lines = [f"{u} {v} e" for u, v in T.edge_pairs(EDGE)]
    lines += [f"{u} {v} r" for u, v in T.edge_pairs(RED)]
    return "\n".join(lines) + ("\n" if lines else "")


# ---------------------------------------------------------------- tri-edges

class TriEdge:
    __slots__ = ("ground_size", "black", "red", "white")

    def __init__(self, ground_size, black, red, white=None):
        full = full_mask(ground_size)
        if white is None:
            white = full & ~(black | red)
        if black & red or black & white or red & white or (black | red | white) != full:
            raise ValueError("black/red/white must partition the ground set")
        self.ground_size = ground_size
        self.black, self.red, self.white = black, red, white

    def complement(self):
        return TriEdge(self.ground_size, self.white, self.red, self.black)

    def key(self):
        return (self.ground_size, self.black, self.red)

    def __eq__(self, other):
        return isinstance(other, TriEdge) and self.key() == other.key()

    def __hash__(self):
        return hash(self.key())

    def __repr__(self):
        return f"TriEdge(B={members(self.black)}, R={members(self.red)}, W={members(self.white)})"

    def to_json(self):
        return {"black": members(self.black), "red": members(self.red), "white": members(self.white)}


def triedge_combine(e1, e2, mode):
    if e1.ground_size != e2.ground_size:
        raise ValueError("ground-set mismatch")
    if mode == "intersect":
        b = e1.black & e2.black
        r = ((e1.black | e1.red) & (e2.black | e2.red)) & ~b
    elif mode == "difference":
        b = e1.black & e2.white
        r = ((e1.black | e1.red) & (e2.white | e2.red)) & ~b
    else:
        raise ValueError(f"unknown mode {mode!r}")
    return TriEdge(e1.ground_size, b, r)


class TriHypergraph:
    def __init__(self, ground_size, edges=()):
        self.ground_size = int(ground_size)
        edges = tuple(edges)
        for e in edges:
            if e.ground_size != self.ground_size:
                raise ValueError("edge on a different ground set")
        self.edges = edges

    def __len__(self):
        return len(self.edges)

    def complement(self):
        return TriHypergraph(self.ground_size, [e.complement() for e in self.edges])

    @cached_property
    def arrays(self):
        """(black, black-or-red) as boolean |E| x n matrices."""
        n = self.ground_size
        B = np.zeros((len(self.edges), n), dtype=bool)
        BR = np.zeros_like(B)
        for i, e in enumerate(self.edges):
            B[i] = bool_from_mask(e.black, n)
            BR[i] = bool_from_mask(e.black | e.red, n)
        return B, BR

    def to_json(self):
        return {"type": "TriHypergraph", "ground_size": self.ground_size,
                "edges": [e.to_json() for e in self.edges]}

    @classmethod
    def from_json(cls, doc):
        n = doc["ground_size"]
        edges = []
        for e in doc["edges"]:
            w = mask_of(e["white"]) if "white" in e else None
            edges.append(TriEdge(n, mask_of(e["black"]), mask_of(e["red"]), w))
        return cls(n, edges)

    def __repr__(self):
        return f"TriHypergraph(n={self.ground_size}, |E|={len(self.edges)})"


def hypergraph_combine(H1, H2=None, mode="intersect"):
    if mode == "complement":
        return H1.complement()
    if H2 is None or H1.ground_size != H2.ground_size:
        raise ValueError("ground-set mismatch")
    return TriHypergraph(H1.ground_size,
                         [triedge_combine(a, b, mode) for a in H1.edges for b in H2.edges])


def trigraph_to_hypergraph(T):
    """H_T: one tri-edge (N[v], R(v), W(v)) per vertex."""
    n = T.ground_size
    return TriHypergraph(n, [TriEdge(n, T.closed_nbr(v), T.red(v), T.white(v)) for v in range(n)])


# ---------------------------------------------------------------- digraphs

class Digraph:
    """Arc xy stored as adj[x, y] = True; no loops; both directions allowed."""

    def __init__(self, ground_size, adj):
        n = self.ground_size = int(ground_size)
        a = np.array(adj, dtype=bool)
        if a.shape != (n, n):
            raise ValueError("adjacency must be n x n")
        if n and a.diagonal().any():
            raise ValueError("self-loops are not allowed")
        a.setflags(write=False)
        self.adj = a

    @classmethod
    def from_arcs(cls, n, arcs):
        a = np.zeros((n, n), dtype=bool)
        for x, y in arcs:
            a[x, y] = True
        return cls(n, a)

    @property
    def arcs(self):
        xs, ys = np.nonzero(self.adj)
        return list(zip(xs.tolist(), ys.tolist()))

    def is_tournament(self):
        a = self.adj
        off = ~np.eye(self.ground_size, dtype=bool)
        return bool(((a ^ a.T) | ~off).all() and not (a & a.T).any())

    @cached_property
    def out_masks(self):
        return [mask_from_bool(r) for r in self.adj]

    @cached_property
    def in_masks(self):
        return [mask_from_bool(c) for c in self.adj.T]

    def dominates(self, X):
        """True iff every vertex outside X has an in-neighbour in X."""
        cover = X
        for x in members(X):
            cover |= self.out_masks[x]
        return cover == full_mask(self.ground_size)

    def induced(self, verts):
        verts = list(verts)
        return Digraph(len(verts), self.adj[np.ix_(verts, verts)])

    def to_json(self):
        return {"type": "Digraph", "ground_size": self.ground_size,
                "arcs": [list(a) for a in self.arcs]}

    @classmethod
    def from_json(cls, doc):
        return cls.from_arcs(doc["ground_size"], doc["arcs"])

    def __repr__(self):
        return f"Digraph(n={self.ground_size}, arcs={int(self.adj.sum())})"


class TriTournament:
    """Tournament arcs A plus red back-arcs R (R disjoint from A)."""

    def __init__(self, ground_size, arcs, red):
        n = self.ground_size = int(ground_size)
        a = np.array(arcs, dtype=bool)
        r = np.array(red, dtype=bool)
        off = ~np.eye(n, dtype=bool)
        if a.shape != (n, n) or r.shape != (n, n):
            raise ValueError("arc matrices must be n x n")
        if n and (a.diagonal().any() or r.diagonal().any()):
            raise ValueError("self-loops are not allowed")
        if (a & a.T).any() or not ((a | a.T) | ~off).all():
            raise ValueError("arcs must orient each pair exactly once")
        if (a & r).any():
            raise ValueError("red arcs must avoid A")
        a.setflags(write=False)
        r.setflags(write=False)
        self.A, self.R = a, r

    @classmethod
    def from_tournament(cls, D, red=None):
        n = D.ground_size
        return cls(n, D.adj, np.zeros((n, n), bool) if red is None else red)

    def underlying(self):
        return Digraph(self.ground_size, self.A)

    @cached_property
    def dom_masks(self):
        """Per vertex x: the set of y with xy in A or xy in R."""
        return [mask_from_bool(r) for r in (self.A | self.R)]

    def dominates(self, X):
        cover = X
        for x in members(X):
            cover |= self.dom_masks[x]
        return cover == full_mask(self.ground_size)

    def red_out(self, x):
        return mask_from_bool(self.R[x])

    def to_json(self):
        xs, ys = np.nonzero(self.A)
        rx, ry = np.nonzero(self.R)
        return {"type": "TriTournament", "ground_size": self.ground_size,
                "arcs": [[int(x), int(y)] for x, y in zip(xs, ys)],
                "red_arcs": [[int(x), int(y)] for x, y in zip(rx, ry)]}

    @classmethod
    def from_json(cls, doc):
        n = doc["ground_size"]
        a = np.zeros((n, n), bool)
        r = np.zeros((n, n), bool)
        for x, y in doc["arcs"]:
            a[x, y] = True
        for x, y in doc.get("red_arcs", []):
            r[x, y] = True
        return cls(n, a, r)


# ---------------------------------------------------------------- graphs

class SimpleGraph:
    """Undirected simple graph with symmetric adjacency bitsets."""

    def __init__(self, ground_size, edges=(), adj=None):
        n = self.ground_size = int(ground_size)
        if adj is None:
            a = np.zeros((n, n), dtype=bool)
            for u, v in edges:
                if u == v:
                    raise ValueError("self-loop")
                a[u, v] = a[v, u] = True
        else:
            a = np.array(adj, dtype=bool)
            if a.shape != (n, n) or not np.array_equal(a, a.T):
                raise ValueError("adjacency must be symmetric n x n")
            if n and a.diagonal().any():
                raise ValueError("self-loop")
        a.setflags(write=False)
        self.adj = a

    @cached_property
    def nbr(self):
        return [mask_from_bool(r) for r in self.adj]

    @cached_property
    def degrees(self):
        return self.adj.sum(axis=1).astype(int)

    def min_degree(self):
        return int(self.degrees.min()) if self.ground_size else 0

    def is_regular(self):
        return self.ground_size == 0 or int(self.degrees.min()) == int(self.degrees.max())

    @property
    def edges(self):
        iu = np.triu_indices(self.ground_size, 1)
        sel = self.adj[iu]
        return list(zip(iu[0][sel].tolist(), iu[1][sel].tolist()))

    def edge_count(self):
        return int(self.adj.sum()) // 2

    def neighborhood_system(self):
        return SetSystem(self.ground_size, matrix=self.adj.copy())

    def induced(self, verts):
        verts = list(verts)
        return SimpleGraph(len(verts), adj=self.adj[np.ix_(verts, verts)])

    def to_json(self):
        return {"type": "SimpleGraph", "ground_size": self.ground_size,
                "edges": [list(e) for e in self.edges]}

    @classmethod
    def from_json(cls, doc):
        return cls(doc["ground_size"], [tuple(e) for e in doc["edges"]])

    def to_dimacs(self):
        es = self.edges
        lines = [f"p edge {self.ground_size} {len(es)}"] + [f"e {u + 1} {v + 1}" for u, v in es]
        return "\n".join(lines) + "\n"

    @classmethod
    def from_dimacs(cls, text):
        n, edges = None, []
        for line in text.splitlines():
            p = line.split()
            if not p or p[0] == "c":
                continue
            if p[0] == "p":
                n = int(p[2])
            elif p[0] == "e":
                edges.append((int(p[1]) - 1, int(p[2]) - 1))
        if n is None:
            raise ValueError("missing 'p edge' header")
        return cls(n, edges)

    def __repr__(self):
        return f"SimpleGraph(n={self.ground_size}, m={self.edge_count()})"


def from_json(doc):
    """Rebuild any core object from its JSON form (dispatch on 'type')."""
    kinds = {"SetSystem": SetSystem, "TriGraph": TriGraph, "TriHypergraph": TriHypergraph,
             "Digraph": Digraph, "TriTournament": TriTournament, "SimpleGraph": SimpleGraph}
    t = doc.get("type")
    if t not in kinds:
        raise ValueError(f"unknown object type {t!r}")
    return kinds[t].from_json(doc)
