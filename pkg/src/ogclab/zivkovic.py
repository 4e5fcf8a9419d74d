"""The spanning-forest correspondence between the marked and oriented
complexes, and its verification.

``forest_orient`` realises the orientation functor: forest edges flow toward
the marking of their component, every other edge is replaced by a bivalent
source with two outgoing half-edges, and the marked component roots close the
vertex ordering.  Summing over spanning forests gives the leading term of the
chain map from the marked to the oriented complex.

That forest sum commutes on the nose with the oriented sub-differential that
never merges a subdividing source into its target.  Against the full
splitting differential it needs an exact lower-order completion, solved
degree by degree; the completed map is the one whose induced map on
cohomology is checked for bijectivity.
"""
from __future__ import annotations

import json
import time
from dataclasses import dataclass, field

from .graphs import Graph, GraphError, genus
from .canonical import canonical_form, perm_parity
from .catalogs import (GraphCatalog, generate_or_load, spanning_forests)
from .complexes import (GradedComplex, betti, betti_shift_matches,
                        build_marked_complex, build_oriented_complex,
                        euler_characteristic)
from .linalg import SparseIntMatrix, kernel_basis, solve_columns


@dataclass
class ForestOrientedGraph:
    """Result of orienting a marked graph along a spanning forest."""
    source: Graph
    forest: tuple
    graph: Graph          # directed; original vertices first, then one
                          # subdivision source per non-forest edge
    cell_map: tuple       # edge id of the source -> vertex id of the result
    roots: tuple          # component roots ordered by marking label


def forest_orient(g: Graph, forest) -> ForestOrientedGraph:
    """Apply the orientation functor to ``(g, forest)``.

    Forest edges point toward the marked vertex of their component; the
    remaining edges become fresh sources with two outgoing half-edges.  The
    cell map sends a forest edge to its child endpoint and a subdivided edge
    to its fresh source; component roots are exactly the vertices not hit.
    """
    forest = tuple(sorted(forest))
    if g.directed:
        raise GraphError("forest_orient starts from an undirected graph")
    nv = g.n_vertices
    for i in forest:
        if not 0 <= i < g.n_edges or g.is_loop(i):
            raise GraphError("forest contains a loop or a bad edge id")
    adj = {}
    for i in forest:
        (u, v) = g.edges[i]
        adj.setdefault(u, []).append((v, i))
        adj.setdefault(v, []).append((u, i))
    owner = {}
    parent_edge = {}
    roots = []
    for (label, v) in g.marks:
        if v in owner:
            raise GraphError("forest component holds two marking labels")
        owner[v] = label
        roots.append((label, v))
        stack = [v]
        while stack:
            x = stack.pop()
            for (y, i) in adj.get(x, ()):  # noqa: B023 - local adjacency
                if y not in owner:
                    owner[y] = label
                    parent_edge[y] = (i, x)
                    stack.append(y)
    if len(owner) != nv:
        raise GraphError("forest does not cover every vertex")
    seen_edges = {i for (i, _) in parent_edge.values()}
    if seen_edges != set(forest):
        raise GraphError("forest contains a cycle")

    edges = []
    cell_map = [None] * g.n_edges
    directed_of = {}
    for y, (i, x) in parent_edge.items():
        directed_of[i] = (y, x)      # child -> parent, toward the root
    nv2 = nv
    for i, (u, v) in enumerate(g.edges):
        if i in directed_of:
            edges.append(directed_of[i])
            cell_map[i] = directed_of[i][0]
        else:
            s = nv2
            nv2 += 1
            edges.append((s, u))
            edges.append((s, v))
            cell_map[i] = s
    weights = (0,) * nv2
    result = Graph(weights, edges, g.marks, directed=True)
    if genus(result) != genus(g):
        raise GraphError("orientation functor changed the genus")
    root_vs = tuple(v for (_, v) in sorted(roots))
    return ForestOrientedGraph(source=g, forest=forest, graph=result,
                               cell_map=tuple(cell_map), roots=root_vs)


def psi_matrix(marked: GradedComplex, oriented: GradedComplex,
               roots_last: bool = True) -> dict:
    """Forest-sum chain map family ``psi[k]: marked_k -> oriented_{k+n}``.

    The orientation of the image transports the edge order of the source
    through the cell map and appends the component roots (by label) at the
    end; generators absent from the oriented basis contribute zero.
    """
    if (marked.genus, marked.labels) != (oriented.genus, oriented.labels):
        raise GraphError("complexes are for different (g, S)")
    n = len(marked.labels)
    psi = {}
    for k in marked.degrees():
        mat = SparseIntMatrix(oriented.dim(k + n), marked.dim(k))
        for col in range(marked.dim(k)):
            g = marked.generator(k, col)
            for forest in spanning_forests(g):
                fo = forest_orient(g, forest)
                order = list(fo.cell_map) + list(fo.roots) if roots_last \
                    else list(fo.roots) + list(fo.cell_map)
                cf = canonical_form(fo.graph)
                pos = oriented.index_of(cf.key)
                if pos is None:
                    continue   # killed by an orientation-reversing automorphism
                (kk, row) = pos
                if kk != k + n:
                    raise GraphError(
                        f"forest image of a degree-{k} generator landed in "
                        f"oriented degree {kk}, expected {k + n}")
                mat.add(row, col, perm_parity([cf.vertex_map[x] for x in order]))
        psi[k] = mat
    return psi


@dataclass
class ChainMapReport:
    passed: bool
    global_sign: int | None
    convention: dict
    frozen_identity: bool
    full_identity: bool
    completion_solvable: bool
    completion_support: dict
    failure: dict | None = None

    def to_dict(self):
        return {
            "passed": self.passed,
            "global_sign": self.global_sign,
            "convention": self.convention,
            "frozen_identity": self.frozen_identity,
            "full_identity": self.full_identity,
            "completion_solvable": self.completion_solvable,
            "completion_support": {str(k): v for k, v in self.completion_support.items()},
            "failure": self.failure,
        }


def _identity_sign(psi, marked, oriented, diffs):
    """Global sign making ``D.psi = eps.psi.d`` hold, or (None, failure)."""
    eps = None
    for k in sorted(psi):
        a = diffs.get(k + len(marked.labels))
        left = (a * psi[k]) if a is not None else SparseIntMatrix(0, 0)
        right = (psi[k - 1] * marked.diffs[k]) if ((k - 1) in psi and k in marked.diffs) \
            else SparseIntMatrix(left.nrows, left.ncols)
        keys = set(left.entries) | set(right.entries)
        for pos in sorted(keys):
            lv, rv = left[pos], right[pos]
            if lv == 0 and rv == 0:
                continue
            if lv == rv:
                cand = 1
            elif lv == -rv:
                cand = -1
            else:
                return None, {"degree": k, "entry": list(pos),
                              "lhs": str(lv), "rhs": str(rv)}
            if eps is None:
                eps = cand
            elif eps != cand:
                return None, {"degree": k, "entry": list(pos),
                              "lhs": str(lv), "rhs": str(rv), "mixed_sign": True}
    return (eps if eps is not None else 1), None


def complete_chain_map(psi: dict, marked: GradedComplex, oriented: GradedComplex,
                       eps: int = 1):
    """Add an exact lower-order correction so the family commutes with the
    full oriented differential: solve ``D phi_k = eps phi_{k-1} d_k - r_k``
    bottom-up.  Returns ``(completed family, solvable, support sizes)``."""
    n = len(marked.labels)
    completed = {k: m.copy() for k, m in psi.items()}
    support = {}
    for k in sorted(completed):
        big = oriented.differential(k + n)
        left = big * completed[k]
        if (k - 1) in completed and k in marked.diffs:
            right = completed[k - 1] * marked.diffs[k]
        else:
            right = SparseIntMatrix(left.nrows, left.ncols)
        resid = left - (right if eps == 1 else -right)
        if resid.is_zero():
            continue
        target = -resid
        phi = solve_columns(big, target)
        if phi is None:
            return completed, False, support
        completed[k] = completed[k] + phi
        support[k] = phi.nnz
    return completed, True, support


def verify_chain_map(psi: dict, marked: GradedComplex,
                     oriented_full: GradedComplex,
                     oriented_frozen: GradedComplex,
                     roots_last: bool = True):
    """Check the two chain identities exactly.

    The forest sum must commute with the subdivider-frozen differential with
    one global sign; the completed map must commute with the full splitting
    differential with the same sign.  Returns the report and the completed
    family (None when something failed).
    """
    convention = {"flow": "toward-marking", "subdivision": "double-outgoing-source",
                  "roots": "last" if roots_last else "first",
                  "frozen_differential": "subdividers_frozen"}
    eps, failure = _identity_sign(psi, marked, oriented_frozen, oriented_frozen.diffs)
    frozen_ok = failure is None
    if not frozen_ok:
        report = ChainMapReport(passed=False, global_sign=None, convention=convention,
                                frozen_identity=False, full_identity=False,
                                completion_solvable=False, completion_support={},
                                failure=failure)
        return report, None
    completed, solvable, support = complete_chain_map(psi, marked, oriented_full, eps)
    full_ok = False
    failure = None
    if solvable:
        eps2, failure = _identity_sign(completed, marked, oriented_full,
                                       oriented_full.diffs)
        full_ok = failure is None and eps2 == eps
        if failure is None and eps2 != eps:
            failure = {"mixed_sign_between_variants": [eps, eps2]}
            full_ok = False
    report = ChainMapReport(passed=frozen_ok and solvable and full_ok,
                            global_sign=eps, convention=convention,
                            frozen_identity=frozen_ok, full_identity=full_ok,
                            completion_solvable=solvable,
                            completion_support=support, failure=failure)
    return report, (completed if report.passed else None)


@dataclass
class QuasiIsoReport:
    passed: bool
    per_degree: list
    marked_betti: dict
    oriented_betti: dict

    def to_dict(self):
        return {"passed": self.passed, "per_degree": self.per_degree,
                "marked_betti": {str(k): v for k, v in sorted(self.marked_betti.items())},
                "oriented_betti": {str(k): v for k, v in sorted(self.oriented_betti.items())}}


def verify_quasi_iso(completed_psi: dict, marked: GradedComplex,
                     oriented: GradedComplex, seed: int = 0) -> QuasiIsoReport:
    """Exact rank check that the completed chain map induces an isomorphism
    on cohomology in every degree."""
    n = len(marked.labels)
    mt = betti(marked, seed=seed)
    ot = betti(oriented, seed=seed)
    rows = []
    passed = True
    for k in marked.degrees():
        h_m = mt.betti.get(k, 0)
        h_o = ot.betti.get(k + n, 0)
        image_rank = 0
        if h_m or h_o:
            zbasis = kernel_basis(marked.differential(k))
            pz = SparseIntMatrix(oriented.dim(k + n), len(zbasis))
            pk = completed_psi.get(k)
            if pk is not None:
                cols = {}
                for (i, j), v in pk.entries.items():
                    cols.setdefault(j, []).append((i, v))
                for ci, vec in enumerate(zbasis):
                    for j, x in vec.items():
                        for (i, v) in cols.get(j, ()):  # noqa: B023
                            pz.add(i, ci, v * x)
            bnd = oriented.differential(k + n + 1)
            stack = SparseIntMatrix(pz.nrows, pz.ncols + bnd.ncols)
            for (i, j), v in pz.entries.items():
                stack[i, j] = v
            for (i, j), v in bnd.entries.items():
                stack[i, j + pz.ncols] = v
            image_rank = stack.rank("rational") - bnd.rank("rational")
        iso = (image_rank == h_m == h_o)
        passed = passed and iso
        rows.append({"marked_degree": k, "oriented_degree": k + n,
                     "h_marked": h_m, "h_oriented": h_o,
                     "induced_rank": image_rank, "iso": iso})
    # degrees present only on the oriented side must be exact there
    for kk in oriented.degrees():
        if (kk - n) not in marked.basis and ot.betti.get(kk, 0) != 0:
            passed = False
            rows.append({"marked_degree": kk - n, "oriented_degree": kk,
                         "h_marked": 0, "h_oriented": ot.betti[kk],
                         "induced_rank": 0, "iso": False})
    return QuasiIsoReport(passed=passed, per_degree=rows,
                          marked_betti=mt.betti, oriented_betti=ot.betti)


@dataclass
class VerificationReport:
    genus: int
    labels: tuple
    dims: dict
    betti_shift_ok: bool
    chain_map: ChainMapReport
    quasi_iso: QuasiIsoReport
    timings: dict = field(default_factory=dict)

    @property
    def passed(self):
        return (self.betti_shift_ok and self.chain_map.passed
                and self.quasi_iso.passed)

    def to_json(self) -> str:
        doc = {"genus": self.genus, "n": len(self.labels),
               "labels": list(self.labels),
               "passed": self.passed,
               "dims": {f: {str(k): v for k, v in sorted(d.items())}
                        for f, d in self.dims.items()},
               "betti_shift_ok": self.betti_shift_ok,
               "chain_map": self.chain_map.to_dict(),
               "quasi_iso": self.quasi_iso.to_dict(),
               "timings": {k: round(v, 3) for k, v in self.timings.items()}}
        return json.dumps(doc, indent=1, sort_keys=True)


def run_verification(g: int, labels, threads: int = 1, seed: int = 0,
                     max_cells: int | None = None) -> VerificationReport:
    """Full pipeline for one ``(g, S)``: catalogs, both complexes, Betti
    comparison, chain map and quasi-isomorphism checks."""
    timings = {}
    t0 = time.time()
    mcat = generate_or_load("marked", g, labels, max_cells=max_cells, threads=threads)
    ocat = generate_or_load("oriented", g, labels, max_cells=max_cells, threads=threads)
    timings["generate"] = time.time() - t0
    t0 = time.time()
    marked = build_marked_complex(mcat)
    or_full = build_oriented_complex(ocat)
    or_frozen = build_oriented_complex(ocat, contract_subdivider_edges=False)
    timings["complexes"] = time.time() - t0
    t0 = time.time()
    mt = betti(marked, seed=seed)
    ot = betti(or_full, seed=seed)
    euler_characteristic(marked, mt)
    euler_characteristic(or_full, ot)
    shift_ok = betti_shift_matches(mt, ot)
    timings["betti"] = time.time() - t0
    t0 = time.time()
    psi = psi_matrix(marked, or_full)
    chain_report, completed = verify_chain_map(psi, marked, or_full, or_frozen)
    timings["chain_map"] = time.time() - t0
    t0 = time.time()
    if completed is not None:
        quasi = verify_quasi_iso(completed, marked, or_full, seed=seed)
    else:
        quasi = QuasiIsoReport(passed=False, per_degree=[],
                               marked_betti=mt.betti, oriented_betti=ot.betti)
    timings["quasi_iso"] = time.time() - t0
    dims = {"marked": {k: marked.dim(k) for k in marked.degrees()},
            "oriented": {k: or_full.dim(k) for k in or_full.degrees()}}
    return VerificationReport(genus=g, labels=tuple(sorted(labels)), dims=dims,
                              betti_shift_ok=shift_ok, chain_map=chain_report,
                              quasi_iso=quasi, timings=timings)
