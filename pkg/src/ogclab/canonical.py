"""Canonical labelling of marked weighted (di)graphs by partition refinement
with individualisation, plus the automorphism and sign bookkeeping the chain
complexes need.

Two graphs are isomorphic (weights, directions and marking labels preserved)
iff their canonical byte keys are equal.  Ties between refinement-equivalent
vertices are broken by minimising the encoded form, so keys are deterministic
and independent of input labelling or thread scheduling.
"""
from __future__ import annotations

from collections import Counter
from math import factorial

from .graphs import Graph, GraphError


def perm_parity(seq) -> int:
    """Sign of the permutation given as the image sequence of 0..n-1."""
    seq = list(seq)
    n = len(seq)
    seen = [False] * n
    sign = 1
    for i in range(n):
        if seen[i]:
            continue
        j = i
        c = 0
        while not seen[j]:
            seen[j] = True
            j = seq[j]
            c += 1
        if c % 2 == 0:
            sign = -sign
    return sign


# -- byte keys ----------------------------------------------------------------

def encode_key(weights, edges, marks, directed) -> bytes:
    nv = len(weights)
    ne = len(edges)
    nm = len(marks)
    if nv > 255 or ne > 127 or any(w > 255 for w in weights) \
            or any(l > 255 for (l, _) in marks):
        raise GraphError("graph too large for the byte encoding")
    out = bytearray([1 if directed else 0, nv, ne, nm])
    out += bytes(weights)
    for (u, v) in edges:
        out.append(u)
        out.append(v)
    for (l, v) in marks:
        out.append(l)
        out.append(v)
    return bytes(out)


def decode_key(key: bytes) -> Graph:
    directed = bool(key[0])
    nv, ne, nm = key[1], key[2], key[3]
    pos = 4
    weights = tuple(key[pos:pos + nv])
    pos += nv
    edges = []
    for _ in range(ne):
        edges.append((key[pos], key[pos + 1]))
        pos += 2
    marks = []
    for _ in range(nm):
        marks.append((key[pos], key[pos + 1]))
        pos += 2
    return Graph(weights, edges, marks, directed)


def _encoded(weights, edges, marks, perm, directed):
    nv = len(weights)
    w = [0] * nv
    for v in range(nv):
        w[perm[v]] = weights[v]
    es = []
    for (u, v) in edges:
        a, b = perm[u], perm[v]
        if not directed and a > b:
            a, b = b, a
        es.append((a, b))
    es.sort()
    ms = sorted((l, perm[v]) for (l, v) in marks)
    return encode_key(w, es, ms, directed)


# -- refinement + search -------------------------------------------------------

def _refine(nv, inc, colors):
    while True:
        nclasses = len(set(colors))
        if nclasses == nv:
            return colors
        sigs = []
        for v in range(nv):
            row = sorted(d + 2 * colors[w] for (d, w) in inc[v])
            row.insert(0, colors[v])
            sigs.append(tuple(row))
        ren = {s: i for i, s in enumerate(sorted(set(sigs)))}
        new = [ren[s] for s in sigs]
        if len(set(new)) == nclasses:
            return colors
        colors = new


def canonicalize(weights, edges, marks, directed):
    """Return ``(key, vperm, auts)``: canonical byte key, the relabelling
    old->canonical, and all vertex automorphisms in canonical coordinates."""
    nv = len(weights)
    if nv == 0:
        raise GraphError("empty vertex set")
    inc = [[] for _ in range(nv)]
    for (u, v) in edges:
        if directed:
            inc[u].append((0, v))
            inc[v].append((1, u))
        else:
            inc[u].append((0, v))
            inc[v].append((0, u))
    hairs = [[] for _ in range(nv)]
    for (l, v) in marks:
        hairs[v].append(l)
    deg = [len(inc[v]) for v in range(nv)]
    raw = [(weights[v], tuple(sorted(hairs[v])), deg[v]) for v in range(nv)]
    ren = {s: i for i, s in enumerate(sorted(set(raw)))}
    colors = _refine(nv, inc, [ren[s] for s in raw])

    best_key = None
    best_perms = []

    stack = [colors]
    while stack:
        cols = stack.pop()
        classes = {}
        for v in range(nv):
            classes.setdefault(cols[v], []).append(v)
        target = None
        for c in sorted(classes):
            if len(classes[c]) > 1:
                target = classes[c]
                break
        if target is None:
            order = sorted(range(nv), key=lambda v: cols[v])
            perm = [0] * nv
            for i, v in enumerate(order):
                perm[v] = i
            key = _encoded(weights, edges, marks, perm, directed)
            if best_key is None or key < best_key:
                best_key = key
                best_perms = [perm]
            elif key == best_key:
                best_perms.append(perm)
            continue
        for v in target:
            c2 = list(cols)
            c2[v] = -1
            ren2 = {s: i for i, s in enumerate(sorted(set(c2)))}
            stack.append(_refine(nv, inc, [ren2[s] for s in c2]))

    perm0 = best_perms[0]
    inv0 = [0] * nv
    for i, p in enumerate(perm0):
        inv0[p] = i
    auts = sorted(set(tuple(p[inv0[i]] for i in range(nv)) for p in best_perms))
    return best_key, tuple(perm0), tuple(auts)


# -- canonical form object ------------------------------------------------------

class CanonicalForm:
    """Canonical representative of a graph with its relabelling data.

    ``vertex_map`` sends old vertex ids to canonical ids; ``edge_map`` is the
    induced edge bijection (parallel bundles matched in input order);
    ``auts`` are the vertex automorphisms of the canonical graph.
    """
    __slots__ = ("key", "vertex_map", "auts", "_graph", "_edge_map", "_src")

    def __init__(self, src: Graph):
        key, vperm, auts = canonicalize(src.weights, src.edges, src.marks, src.directed)
        self.key = key
        self.vertex_map = vperm
        self.auts = auts
        self._src = src
        self._graph = None
        self._edge_map = None

    @property
    def graph(self) -> Graph:
        if self._graph is None:
            self._graph = decode_key(self.key)
        return self._graph

    @property
    def edge_map(self):
        if self._edge_map is None:
            self._edge_map = induced_edge_map(
                self._src.edges, self.vertex_map, self.graph.edges, self._src.directed)
        return self._edge_map

    def vertex_sign(self) -> int:
        """Parity of ``vertex_map`` relative to the identity reference."""
        return perm_parity(self.vertex_map)

    def edge_sign(self) -> int:
        return perm_parity(self.edge_map)

    def killed(self, kind: str) -> bool:
        g = self.graph
        if kind == "edges":
            return edge_orientation_killed(g, self.auts)
        if kind == "vertices":
            return any(perm_parity(a) < 0 for a in self.auts)
        raise GraphError("orientation kind must be 'edges' or 'vertices'")

    def aut_order(self) -> int:
        """Order of the half-edge level automorphism group."""
        return automorphism_count(self.graph, self.auts)


def canonical_form(g: Graph) -> CanonicalForm:
    return CanonicalForm(g)


def induced_edge_map(edges, vperm, canonical_edges, directed):
    """Edge bijection induced by a vertex relabelling; within a parallel
    bundle edges are matched in input order."""
    pos = {}
    for i, e in enumerate(canonical_edges):
        pos.setdefault(e, []).append(i)
    used = Counter()
    out = []
    for (u, v) in edges:
        a, b = vperm[u], vperm[v]
        if not directed and a > b:
            a, b = b, a
        k = (a, b)
        out.append(pos[k][used[k]])
        used[k] += 1
    return tuple(out)


def edge_orientation_killed(g: Graph, auts) -> bool:
    """True iff some automorphism acts with sign -1 on the edge set.  Any
    parallel bundle (or repeated loop) carries an odd swap already."""
    cnt = Counter((min(u, v), max(u, v)) for (u, v) in g.edges)
    if any(c >= 2 for c in cnt.values()):
        return True
    for a in auts:
        em = induced_edge_map(g.edges, a, g.edges, g.directed)
        if perm_parity(em) < 0:
            return True
    return False


def automorphism_count(g: Graph, auts) -> int:
    """Half-edge level automorphism count: vertex automorphisms times the
    parallel-bundle permutations they leave free, times loop flips."""
    if g.directed:
        bundles = Counter(g.edges)
        loops = 0
    else:
        bundles = Counter((min(u, v), max(u, v)) for (u, v) in g.edges)
        loops = sum(1 for (u, v) in g.edges if u == v)
    bundle_factor = 1
    for c in bundles.values():
        bundle_factor *= factorial(c)
    return len(auts) * bundle_factor * (2 ** loops)


# -- orientation data -----------------------------------------------------------

class Orientation:
    """Ordering of the reference set (edges or vertices) with a sign."""
    __slots__ = ("kind", "reference", "sign")

    def __init__(self, kind, reference, sign=1):
        if kind not in ("edges", "vertices"):
            raise GraphError("orientation kind must be 'edges' or 'vertices'")
        if sign not in (1, -1):
            raise GraphError("orientation sign must be +-1")
        self.kind = kind
        self.reference = tuple(reference)
        self.sign = sign
        n = len(self.reference)
        if sorted(self.reference) != list(range(n)):
            raise GraphError("orientation reference must be a permutation")


def orientation_sign(g: Graph, orientation: Orientation, aut) -> int:
    """Sign of the permutation a vertex automorphism induces on the
    orientation's reference list."""
    n = g.n_vertices
    if len(aut) != n:
        raise GraphError("automorphism has wrong length")
    if orientation.kind == "vertices":
        if len(orientation.reference) != n:
            raise GraphError("vertex orientation has wrong length")
        return perm_parity([aut[v] for v in range(n)])
    if len(orientation.reference) != g.n_edges:
        raise GraphError("edge orientation has wrong length")
    em = induced_edge_map(g.edges, tuple(aut), g.edges, g.directed)
    return perm_parity(em)
