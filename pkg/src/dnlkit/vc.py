"""Traces, shattering and brute-force VC-dimension of tri-hypergraphs."""
from dataclasses import dataclass, field
from itertools import combinations, combinations_with_replacement
from math import comb

import numpy as np

from .core import TriGraph, TriHypergraph, members, mask_of, trigraph_to_hypergraph

DEFAULT_CAP = 12
MAX_WORD = 20


def _as_hypergraph(H):
    return trigraph_to_hypergraph(H) if isinstance(H, TriGraph) else H


def trace(H, X):
    """Map Y -> index of the first edge e with X∩B(e) = X∩(B(e)∪R(e)) = Y."""
    out = {}
    for i, e in enumerate(H.edges):
        if e.red & X:
            continue
        y = e.black & X
        if y not in out:
            out[y] = i
    return out


@dataclass
class ShatterWitness:
    shattered_set: int
    selectors: dict  # Y bitset -> edge index

    def verify(self, H):
        X = self.shattered_set
        if len(self.selectors) != 1 << X.bit_count():
            return False
        for y, i in self.selectors.items():
            e = H.edges[i]
            if y & ~X or (X & e.black) != y or (X & (e.black | e.red)) != y:
                return False
        return True

    def to_json(self):
        return {"shattered_set": members(self.shattered_set),
                "selectors": {",".join(map(str, members(y))): i for y, i in sorted(self.selectors.items())}}


def is_shattered(H, X):
    H = _as_hypergraph(H)
    if not isinstance(X, int):
        X = mask_of(X)
    if X >> H.ground_size:
        raise ValueError("X leaves the ground set")
    tr = trace(H, X)
    if len(tr) == 1 << X.bit_count():
        return ShatterWitness(X, tr)
    return None


@dataclass
class VCResult:
    dimension: int
    at_least: bool = False  # True when the search stopped at the cap
    witness: ShatterWitness = None

    def to_json(self):
        out = {"dimension": self.dimension, "at_least": self.at_least}
        if self.witness is not None:
            out["witness"] = self.witness.to_json()
        return out


def _colex_key(mask):
    return tuple(reversed(members(mask)))


def vc_dimension(H, cap=DEFAULT_CAP):
    """Largest shattered set size, searched level by level.

    Candidates of size k are unions of a shattered (k-1)-set with one larger
    vertex whose every (k-1)-subset is shattered, so the search stops at the
    first empty level.  Returns -1 for an edgeless hypergraph.
    """
    if cap < 0:
        raise ValueError("cap must be >= 0")
    H = _as_hypergraph(H)
    if not H.edges:
        return VCResult(-1)
    best = ShatterWitness(0, trace(H, 0))
    level = {0}
    k = 0
    while True:
        if k >= cap:
            return VCResult(k, True, best)
        if 1 << (k + 1) > len(H.edges):
            return VCResult(k, False, best)
        cands = set()
        for s in level:
            for v in range(s.bit_length(), H.ground_size):
                c = s | (1 << v)
                if all((c & ~(1 << u)) in level for u in members(s)):
                    cands.add(c)
        found = {}
        for c in sorted(cands, key=_colex_key):
            w = is_shattered(H, c)
            if w is not None:
                found[c] = w
        if not found:
            return VCResult(k, False, best)
        k += 1
        level = set(found)
        best = found[min(found, key=_colex_key)]


def vc_dimension_bruteforce(H):
    """Reference search over all subsets; small ground sets only."""
    H = _as_hypergraph(H)
    if not H.edges:
        return -1
    d = 0
    for k in range(1, H.ground_size + 1):
        if any(is_shattered(H, mask_of(c)) for c in combinations(range(H.ground_size), k)):
            d = k
        else:
            break
    return d


# ---------------------------------------------------------------- words

@dataclass(frozen=True)
class Word:
    letters: tuple = field(default_factory=tuple)

    def __post_init__(self):
        object.__setattr__(self, "letters", tuple(int(x) for x in self.letters))


def word_trace(H, Z):
    """tr_H(Z): index sets I with Z_I inside B and the rest of Z inside W of one edge.

    Each edge decides every position, so it realises at most one I; scanning
    the edges is therefore the same as testing all 2^|Z| index sets.
    """
    H = _as_hypergraph(H)
    letters = Z.letters if isinstance(Z, Word) else tuple(Z)
    if len(letters) > MAX_WORD:
        raise ValueError(f"word longer than {MAX_WORD}")
    for v in letters:
        if not 0 <= v < H.ground_size:
            raise ValueError("letter outside the ground set")
    out = set()
    for e in H.edges:
        I, ok = [], True
        for pos, v in enumerate(letters):
            bit = 1 << v
            if e.black & bit:
                I.append(pos)
            elif not e.white & bit:
                ok = False
                break
        if ok:
            out.add(frozenset(I))
    return out


def word_trace_sizes(H, words):
    """|tr_H(Z)| for many equal-length words at once (rows of an int array)."""
    H = _as_hypergraph(H)
    W = np.asarray(words, dtype=np.int64)
    if W.ndim != 2:
        raise ValueError("words must be a 2-d array")
    nw, t = W.shape
    if not H.edges:
        return np.zeros(nw, dtype=np.int64)
    if t == 0:
        return np.ones(nw, dtype=np.int64)
    B, BR = H.arrays
    white = ~BR
    inB = B[:, W]              # |E| x nw x t
    ok = (inB | white[:, W]).all(axis=2)
    weights = (1 << np.arange(t, dtype=np.int64))
    codes = (inB * weights).sum(axis=2)
    codes = np.where(ok, codes, -1)
    codes.sort(axis=0)
    distinct = (codes[1:] != codes[:-1]) & (codes[1:] >= 0)
    return distinct.sum(axis=0) + (codes[0] >= 0)


def sauer_shelah_bound(length, d):
    if d < 0:
        return 0
    return sum(comb(length, i) for i in range(0, min(d, length) + 1))


@dataclass
class SauerShelahReport:
    dimension: int
    classical_ok: bool
    classical_count: int
    classical_bound: int
    words_checked: int
    violation: tuple = None

    @property
    def ok(self):
        return self.classical_ok and self.violation is None


def canonical_words(n, max_len):
    """All words over range(n) of length <= max_len, one per reordering class.

    The trace of a reordered word is the image of the original trace under
    the same position permutation, so its size is unchanged.
    """
    for t in range(max_len + 1):
        words = list(combinations_with_replacement(range(n), t))
        yield t, np.array(words, dtype=np.int64).reshape(len(words), t)


def sauer_shelah_check(H, max_word=4):
    """Check the classical bound on the red-free edges and the word bound."""
    H = _as_hypergraph(H)
    if H.ground_size > 16:
        raise ValueError("ground set too large for this check")
    d = vc_dimension(H, cap=H.ground_size + 1).dimension
    plain = TriHypergraph(H.ground_size, [e for e in H.edges if e.red == 0])
    d0 = vc_dimension(plain, cap=H.ground_size + 1).dimension
    count = len({e.black for e in plain.edges})
    bound = sauer_shelah_bound(H.ground_size, d0)
    checked = 0
    violation = None
    for t, words in canonical_words(H.ground_size, max_word):
        sizes = word_trace_sizes(H, words)
        checked += len(words)
        lim = sauer_shelah_bound(t, d)
        bad = np.flatnonzero(sizes > lim)
        if len(bad):
            violation = (tuple(words[bad[0]].tolist()), int(sizes[bad[0]]), lim)
            break
    return SauerShelahReport(d, count <= bound, count, bound, checked, violation)
