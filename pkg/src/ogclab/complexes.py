"""Assembly of the two weight-zero complexes with exact differentials.

The marked complex is graded by edge count and oriented by an ordering of the
edge set; the oriented complex is graded by vertex count and oriented by an
ordering of the vertex set.  Both are stored homologically: the recorded
matrix in degree ``k`` maps degree-``k`` generators to degree-``k-1``
generators by summing admissible edge contractions with signs.  The
cohomological vertex-splitting map is the transpose.

Contractions that would raise a weight (loops, parallel bundles) or leave the
stable acyclic locus are dropped; generators carrying an orientation-reversing
automorphism are excluded from the bases.
"""
from __future__ import annotations

import csv
import io
import json
from dataclasses import dataclass, field

from .graphs import Graph, StabilityProfile, is_acyclic, is_stable
from .canonical import decode_key, canonical_form, perm_parity
from .catalogs import GraphCatalog
from .linalg import SparseIntMatrix


class ComplexError(RuntimeError):
    """Internal consistency failure while building or checking a complex."""


@dataclass
class GradedComplex:
    flavor: str
    genus: int
    labels: tuple
    d_parity: int
    basis: dict = field(default_factory=dict)     # degree -> [canonical key]
    diffs: dict = field(default_factory=dict)     # degree -> C_k -> C_{k-1}
    variant: str = "full"
    _index: dict = field(default_factory=dict, repr=False)
    _ranks: dict = field(default_factory=dict, repr=False)

    def degrees(self):
        return sorted(self.basis)

    def dim(self, k):
        return len(self.basis.get(k, ()))

    def total_dim(self):
        return sum(len(v) for v in self.basis.values())

    def index_of(self, key):
        return self._index.get(key)

    def generator(self, k, i) -> Graph:
        return decode_key(self.basis[k][i])

    def differential(self, k) -> SparseIntMatrix:
        m = self.diffs.get(k)
        if m is None:
            m = SparseIntMatrix(self.dim(k - 1), self.dim(k))
        return m

    def splitting_matrix(self, k) -> SparseIntMatrix:
        """Cohomological differential out of degree ``k-1``: the transpose."""
        return self.differential(k).transpose()

    def rank_of_differential(self, k, seed=0):
        if k not in self._ranks:
            name = f"{self.flavor}(g={self.genus},n={len(self.labels)}) d_{k}"
            self._ranks[k] = self.differential(k).check_consensus(seed=seed, name=name)
        return self._ranks[k]


def _base_strata(catalog: GraphCatalog):
    basis = {}
    index = {}
    for deg in catalog.degrees():
        keys = [e.key for e in catalog.strata[deg] if not e.killed]
        basis[deg] = keys
        for i, key in enumerate(keys):
            index[key] = (deg, i)
    return basis, index


def build_marked_complex(catalog: GraphCatalog, d_parity: int = 0) -> GradedComplex:
    """Differential: sum of single contractions of non-loop, non-parallel
    edges with the sign ``(-1)^i`` for removing the ``i``-th edge, transported
    through the canonical relabelling."""
    if catalog.flavor != "marked":
        raise ComplexError("build_marked_complex needs a marked catalog")
    if d_parity % 2 != 0:
        raise ComplexError("the marked complex takes an even parity")
    basis, index = _base_strata(catalog)
    cx = GradedComplex(flavor="marked", genus=catalog.genus, labels=catalog.labels,
                       d_parity=d_parity, basis=basis, _index=index)
    for k in cx.degrees():
        mat = SparseIntMatrix(cx.dim(k - 1), cx.dim(k))
        for col, key in enumerate(basis[k]):
            g = decode_key(key)
            for i, sign, tkey, vperm, emap in _marked_contractions(g):
                pos = index.get(tkey)
                if pos is None:
                    continue
                (kk, row) = pos
                if kk != k - 1:
                    raise ComplexError("contraction changed the degree by != 1")
                mat.add(row, col, sign)
        cx.diffs[k] = mat
    _check_d_squared(cx)
    return cx


def _marked_contractions(g: Graph):
    """Yield ``(edge, sign, target_key, vperm, edge_map)`` for admissible
    single contractions of ``g``."""
    for i in range(g.n_edges):
        if g.is_loop(i) or g.parallel_count(i) > 0:
            continue
        target = _contract_keep_order(g, i)
        cf = canonical_form(target)
        sign = (-1) ** i * perm_parity(cf.edge_map)
        yield i, sign, cf.key, cf.vertex_map, cf.edge_map


def _contract_keep_order(g: Graph, e: int) -> Graph:
    (a, b) = g.edges[e]
    lo, hi = min(a, b), max(a, b)

    def rl(v):
        if v == hi:
            v = lo
        return v - 1 if v > hi else v

    edges = [(rl(u), rl(v)) for j, (u, v) in enumerate(g.edges) if j != e]
    marks = [(l, rl(v)) for (l, v) in g.marks]
    weights = [w for j, w in enumerate(g.weights) if j != hi]
    weights[rl(a)] = g.weights[a] + g.weights[b]
    return Graph(weights, edges, marks, g.directed)


def build_oriented_complex(catalog: GraphCatalog,
                           d_parity: int = 1,
                           contract_subdivider_edges: bool = True) -> GradedComplex:
    """Differential: sum of contractions of non-parallel directed edges with
    acyclic stable targets; the sign moves the source and target vertex to the
    front of the vertex ordering before merging them there.

    With ``contract_subdivider_edges=False`` the edges leaving a bivalent
    unmarked double-outgoing source are left uncontracted; those vertices act
    as frozen edge subdivisions.  This sub-differential squares to zero as
    well and is the one the spanning-forest chain map commutes with on the
    nose; the full differential is the default and is what the Betti numbers
    refer to.
    """
    if catalog.flavor != "oriented":
        raise ComplexError("build_oriented_complex needs an oriented catalog")
    if d_parity % 2 != 1:
        raise ComplexError("the oriented complex takes an odd parity")
    basis, index = _base_strata(catalog)
    variant = "full" if contract_subdivider_edges else "subdividers_frozen"
    cx = GradedComplex(flavor="oriented", genus=catalog.genus, labels=catalog.labels,
                       d_parity=d_parity, basis=basis, _index=index, variant=variant)
    profile = catalog.profile
    for k in cx.degrees():
        mat = SparseIntMatrix(cx.dim(k - 1), cx.dim(k))
        for col, key in enumerate(basis[k]):
            g = decode_key(key)
            for i, sign, tkey in _oriented_contractions(
                    g, profile, contract_subdivider_edges):
                pos = index.get(tkey)
                if pos is None:
                    continue
                (kk, row) = pos
                if kk != k - 1:
                    raise ComplexError("contraction changed the degree by != 1")
                mat.add(row, col, sign)
        cx.diffs[k] = mat
    _check_d_squared(cx)
    return cx


def is_subdivider(g: Graph, v: int) -> bool:
    """Bivalent unmarked source with two outgoing edges: the directed stand-in
    for an undirected edge subdivision."""
    deg, ind, out, hair = g.degree_data()
    return hair[v] == 0 and ind[v] == 0 and out[v] == 2 and deg[v] == 2


def _oriented_contractions(g: Graph, profile: StabilityProfile,
                           contract_subdivider_edges: bool):
    n = g.n_vertices
    deg, ind, out, hair = g.degree_data()
    for i, (a, b) in enumerate(g.edges):
        if g.parallel_count(i) > 0:
            continue
        if not contract_subdivider_edges:
            if hair[a] == 0 and ind[a] == 0 and out[a] == 2 and deg[a] == 2:
                continue
        target, seq_sign, ref = _contract_merged_first(g, i)
        if not is_acyclic(target):
            continue
        if not is_stable(target, profile):
            continue
        cf = canonical_form(target)
        sign = seq_sign * perm_parity([cf.vertex_map[x] for x in ref])
        yield i, sign, cf.key


def _contract_merged_first(g: Graph, e: int):
    """Contract directed edge ``e``; returns the target, the sign of moving
    (source, target) to the front of the vertex order, and the reference
    sequence of target ids realising [merged, rest]."""
    (a, b) = g.edges[e]
    n = g.n_vertices
    lo, hi = min(a, b), max(a, b)

    def rl(v):
        if v == hi:
            v = lo
        return v - 1 if v > hi else v

    edges = [(rl(u), rl(v)) for j, (u, v) in enumerate(g.edges) if j != e]
    marks = [(l, rl(v)) for (l, v) in g.marks]
    weights = [w for j, w in enumerate(g.weights) if j != hi]
    weights[rl(a)] = g.weights[a] + g.weights[b]
    target = Graph(weights, edges, marks, directed=True)

    seq = [a, b] + [v for v in range(n) if v not in (a, b)]
    pos = [0] * n
    for p, x in enumerate(seq):
        pos[x] = p
    seq_sign = perm_parity(pos)
    ref = [rl(a)] + [rl(v) for v in range(n) if v not in (a, b)]
    return target, seq_sign, ref


def _check_d_squared(cx: GradedComplex) -> None:
    for k in cx.degrees():
        if k - 1 not in cx.diffs:
            continue
        prod = cx.diffs[k - 1] * cx.diffs[k]
        if not prod.is_zero():
            (i, j) = sorted(prod.entries)[0]
            raise ComplexError(
                f"d^2 != 0 in {cx.flavor}(g={cx.genus},n={len(cx.labels)}) at degree {k}: "
                f"generator {j} hits degree-{k - 2} generator {i} "
                f"with coefficient {prod.entries[(i, j)]}")


# -- Betti tables ----------------------------------------------------------------

def hc_degree(cell_degree: int, g: int, n: int, d_parity: int) -> int:
    """Compactly-supported cohomological degree for a cell degree, using the
    grading normalisation ``cell = hc + g(1-d) - n``."""
    return cell_degree - g * (1 - d_parity) + n


def cell_degree_from_hc(hc: int, g: int, n: int, d_parity: int) -> int:
    return hc + g * (1 - d_parity) - n


@dataclass
class BettiTable:
    flavor: str
    genus: int
    labels: tuple
    d_parity: int
    dims: dict
    betti: dict

    def rows(self):
        n = len(self.labels)
        for k in sorted(self.dims):
            yield {"flavor": self.flavor, "g": self.genus, "n": n,
                   "cell_degree": k,
                   "hc_degree": hc_degree(k, self.genus, n, self.d_parity),
                   "dim_basis": self.dims[k], "betti": self.betti[k]}

    def to_csv(self) -> str:
        buf = io.StringIO()
        writer = csv.DictWriter(buf, fieldnames=[
            "flavor", "g", "n", "cell_degree", "hc_degree", "dim_basis", "betti"])
        writer.writeheader()
        for row in self.rows():
            writer.writerow(row)
        return buf.getvalue()

    def to_json(self) -> str:
        return json.dumps(list(self.rows()), indent=1)

    def euler_from_dims(self):
        return sum((-1) ** k * d for k, d in self.dims.items())

    def euler_from_betti(self):
        return sum((-1) ** k * b for k, b in self.betti.items())


def betti(cx: GradedComplex, seed: int = 0) -> BettiTable:
    """Betti numbers ``dim_k - rank d_k - rank d_{k+1}`` with the modular and
    rational rank pipelines cross-checked on every matrix."""
    dims = {k: cx.dim(k) for k in cx.degrees()}
    table = {}
    for k in cx.degrees():
        r_in = cx.rank_of_differential(k, seed=seed)
        r_out = cx.rank_of_differential(k + 1, seed=seed) if (k + 1) in cx.basis else 0
        table[k] = dims[k] - r_in - r_out
        if table[k] < 0:
            raise ComplexError(f"negative Betti number at degree {k}")
    return BettiTable(flavor=cx.flavor, genus=cx.genus, labels=cx.labels,
                      d_parity=cx.d_parity, dims=dims, betti=table)


def euler_characteristic(cx: GradedComplex, table: BettiTable | None = None,
                         seed: int = 0):
    """Euler characteristic computed from dimensions and from Betti numbers;
    raises on mismatch, which would signal a rank or sign bug."""
    if table is None:
        table = betti(cx, seed=seed)
    chi_dim = table.euler_from_dims()
    chi_betti = table.euler_from_betti()
    if chi_dim != chi_betti:
        raise ComplexError(
            f"Euler mismatch for {cx.flavor}(g={cx.genus}): {chi_dim} vs {chi_betti}")
    return chi_dim, chi_betti


def betti_shift_matches(marked_table: BettiTable, oriented_table: BettiTable) -> bool:
    """The dictionary between the two gradings: an oriented cell degree is a
    marked cell degree plus the number of markings."""
    n = len(marked_table.labels)
    keys = set(marked_table.betti) | {k - n for k in oriented_table.betti}
    return all(marked_table.betti.get(k, 0) == oriented_table.betti.get(k + n, 0)
               for k in keys)
