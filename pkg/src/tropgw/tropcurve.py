"""Combinatorial types of tropical curves in R^3 and their linear algebra.

A type records vertices, internal edges with integral derivative vectors, and
labeled external rays.  The stored orientation of an internal edge is pure
bookkeeping: an edge (tail, head, d) contributes +d to the balance at its
tail and -d at its head, and a placement satisfies

    x_head - x_tail - d * length = 0        (one 3-row block per edge)

so flipping (tail, head, d) to (head, tail, -d) changes nothing.  All derived
invariants (transversality, multiplicities, generality) are exact.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Sequence

from .lattice import (
    INFINITE,
    IntMatrix,
    integral_kernel,
    lattice_index,
    quotient_projection,
    rank,
    rational_rank,
)

IntVec3 = tuple[int, int, int]


def _vec3(v: Sequence[int]) -> IntVec3:
    t = tuple(int(x) for x in v)
    if len(t) != 3:
        raise ValueError("derivatives live in Z^3")
    return t


class UnbalancedCurve(ValueError):
    pass


class DisconnectedCurve(ValueError):
    pass


@dataclass(frozen=True)
class CurveType:
    """Combinatorial type of a parametrized tropical curve in R^3."""

    vertices: tuple[int, ...]
    internal_edges: tuple[tuple[int, int, IntVec3], ...]
    external_edges: tuple[tuple[int, IntVec3, int], ...]  # (vertex, derivative, label)

    @staticmethod
    def make(vertices: Iterable[int],
             internal_edges: Iterable[tuple[int, int, Sequence[int]]],
             external_edges: Iterable[tuple[int, Sequence[int], int]]) -> "CurveType":
        vs = tuple(vertices)
        if len(set(vs)) != len(vs):
            raise ValueError("duplicate vertex ids")
        ies = tuple((t, h, _vec3(d)) for t, h, d in internal_edges)
        ees = tuple((v, _vec3(d), int(l)) for v, d, l in external_edges)
        t = CurveType(vs, ies, ees)
        t._validate()
        return t

    def _validate(self):
        vset = set(self.vertices)
        for t, h, _ in self.internal_edges:
            if t not in vset or h not in vset:
                raise ValueError("internal edge attached to unknown vertex")
        for v, _, _ in self.external_edges:
            if v not in vset:
                raise ValueError("external edge attached to unknown vertex")
        labels = sorted(l for _, _, l in self.external_edges)
        if labels != list(range(1, len(labels) + 1)):
            raise ValueError("external labels must be a permutation of 1..n")
        bal = {v: [0, 0, 0] for v in self.vertices}
        for t, h, d in self.internal_edges:
            for i in range(3):
                bal[t][i] += d[i]
                bal[h][i] -= d[i]
        for v, d, _ in self.external_edges:
            for i in range(3):
                bal[v][i] += d[i]
        for v, s in bal.items():
            if s != [0, 0, 0]:
                raise UnbalancedCurve(f"vertex {v} unbalanced: residue {tuple(s)}")

    # -- basic structure ---------------------------------------------------

    @property
    def n_ends(self) -> int:
        return len(self.external_edges)

    @property
    def n_internal(self) -> int:
        return len(self.internal_edges)

    @property
    def n_vertices(self) -> int:
        return len(self.vertices)

    def zero_end_count(self) -> int:
        return sum(1 for _, d, _ in self.external_edges if d == (0, 0, 0))

    def incident(self, v: int) -> list[tuple[str, int, IntVec3]]:
        """Edges leaving v as (kind, index, outgoing derivative).

        kind is 'ext' (index = position in external_edges), 'tail' or 'head'
        (index = position in internal_edges).  A self-loop shows up twice.
        """
        out = []
        for i, (vv, d, _) in enumerate(self.external_edges):
            if vv == v:
                out.append(("ext", i, d))
        for i, (t, h, d) in enumerate(self.internal_edges):
            if t == v:
                out.append(("tail", i, d))
            if h == v:
                out.append(("head", i, tuple(-x for x in d)))
        return out

    def components(self) -> list[tuple[int, ...]]:
        adj = {v: set() for v in self.vertices}
        for t, h, _ in self.internal_edges:
            adj[t].add(h)
            adj[h].add(t)
        seen = set()
        comps = []
        for v in self.vertices:
            if v in seen:
                continue
            stack, comp = [v], []
            while stack:
                u = stack.pop()
                if u in seen:
                    continue
                seen.add(u)
                comp.append(u)
                stack.extend(adj[u] - seen)
            comps.append(tuple(sorted(comp)))
        return comps

    def is_connected(self) -> bool:
        return len(self.components()) <= 1

    def component_types(self) -> list["CurveType"]:
        """Split a disconnected type into its connected pieces.

        Labels are kept as in the whole curve, compressed to 1..m per piece;
        the original labels are recoverable from label_map on each piece.
        """
        comps = self.components()
        if len(comps) <= 1:
            return [self]
        out = []
        for comp in comps:
            cset = set(comp)
            ies = [(t, h, d) for t, h, d in self.internal_edges if t in cset]
            ees = [(v, d, l) for v, d, l in self.external_edges if v in cset]
            relabel = {l: i + 1 for i, (_, _, l) in enumerate(sorted(ees, key=lambda e: e[2]))}
            ees = [(v, d, relabel[l]) for v, d, l in ees]
            out.append(CurveType.make(comp, ies, ees))
        return out

    def flip_edge(self, i: int) -> "CurveType":
        """Reverse the stored orientation of internal edge i (a no-op semantically)."""
        t, h, d = self.internal_edges[i]
        ies = list(self.internal_edges)
        ies[i] = (h, t, tuple(-x for x in d))
        return CurveType(self.vertices, tuple(ies), self.external_edges)

    def map_derivatives(self, m: IntMatrix) -> "CurveType":
        """Apply an integral-linear map to every derivative vector."""
        ies = tuple((t, h, tuple(m.mul_vec(d))) for t, h, d in self.internal_edges)
        ees = tuple((v, tuple(m.mul_vec(d)), l) for v, d, l in self.external_edges)
        return CurveType.make(self.vertices, ies, ees)

    def canonical_key(self):
        """Hashable key identifying the type up to vertex relabeling
        and edge orientation/reordering; external labels are significant."""
        return _canonical_key(self)

    def to_json(self) -> dict:
        return {
            "vertices": list(self.vertices),
            "internal_edges": [
                {"tail": t, "head": h, "derivative": list(d)}
                for t, h, d in self.internal_edges],
            "external_edges": [
                {"vertex": v, "derivative": list(d), "label": l}
                for v, d, l in self.external_edges],
        }

    @staticmethod
    def from_json(d: dict) -> "CurveType":
        return CurveType.make(
            d["vertices"],
            [(e["tail"], e["head"], e["derivative"]) for e in d["internal_edges"]],
            [(e["vertex"], e["derivative"], e["label"]) for e in d["external_edges"]],
        )


# -- moduli ------------------------------------------------------------------


@dataclass(frozen=True)
class DeformationSpace:
    """Solution space of the edge equations, with its integral tangent lattice."""

    matrix: IntMatrix          # 3k rows, 3*n_vertices + k columns
    lattice: IntMatrix         # columns: saturated integral kernel
    dimension: int

    @property
    def rational_basis(self) -> IntMatrix:
        # the saturated integral basis also spans the rational solution space
        return self.lattice


def edge_equation_matrix(t: CurveType) -> IntMatrix:
    """The 3k x (3n + k) system: x_head - x_tail - d*l = 0 per internal edge."""
    vindex = {v: i for i, v in enumerate(t.vertices)}
    nv, k = t.n_vertices, t.n_internal
    rows = []
    for e, (tail, head, d) in enumerate(t.internal_edges):
        for c in range(3):
            row = [0] * (3 * nv + k)
            row[3 * vindex[head] + c] += 1
            row[3 * vindex[tail] + c] -= 1
            row[3 * nv + e] -= d[c]
            rows.append(row)
    return IntMatrix.from_rows(rows, cols_hint=3 * nv + k)


def deformation_space(t: CurveType) -> DeformationSpace:
    a = edge_equation_matrix(t)
    ker = integral_kernel(a)
    return DeformationSpace(a, ker, ker.cols)


def genus(t: CurveType) -> int:
    if not t.is_connected():
        raise DisconnectedCurve("genus is defined for connected curves only")
    return t.n_internal - t.n_vertices + 1


def is_transverse(t: CurveType) -> bool:
    a = edge_equation_matrix(t)
    return rank(a) == 3 * t.n_internal


def multiplicity(t: CurveType) -> int:
    """Index of the image of the edge equations inside Z^(3k)."""
    if not is_transverse(t):
        raise ValueError("multiplicity requires a transverse curve")
    idx = lattice_index(edge_equation_matrix(t))
    assert idx is not INFINITE
    return idx


def loop_multiplicity(t: CurveType) -> int:
    """Same index computed from the independent loop relations.

    A maximal subtree of the internal edges eliminates the vertex positions;
    each remaining edge closes a loop whose equation sum(+-d_e l_e) = 0
    supplies one 3-row block.
    """
    if not t.is_connected():
        raise DisconnectedCurve("loop relations need a connected curve")
    if not is_transverse(t):
        raise ValueError("loop multiplicity requires a transverse curve")
    vindex = {v: i for i, v in enumerate(t.vertices)}
    k = t.n_internal
    # build spanning tree
    parent = {t.vertices[0]: None} if t.vertices else {}
    tree_edges = set()
    frontier = [t.vertices[0]] if t.vertices else []
    adj = {v: [] for v in t.vertices}
    for i, (tl, hd, d) in enumerate(t.internal_edges):
        adj[tl].append((hd, i, 1))
        adj[hd].append((tl, i, -1))
    order = []
    while frontier:
        v = frontier.pop()
        order.append(v)
        for w, i, s in adj[v]:
            if w not in parent:
                parent[w] = (v, i, s)
                tree_edges.add(i)
                frontier.append(w)
    rows = []
    for i, (tl, hd, d) in enumerate(t.internal_edges):
        if i in tree_edges:
            continue
        # loop: edge i from tail to head, then tree path head -> tail
        coeffs = [0] * k
        coeffs[i] += 1
        # walk from head up to root, recording signed steps; same from tail;
        # the difference is the path head -> tail
        def path_to_root(v):
            steps = []
            while parent[v] is not None:
                p, ei, s = parent[v]
                steps.append((ei, s))
                v = p
            return steps
        hsteps = path_to_root(hd)
        tsteps = path_to_root(tl)
        for ei, s in hsteps:
            coeffs[ei] += s
        for ei, s in tsteps:
            coeffs[ei] -= s
        for c in range(3):
            rows.append([coeffs[e] * t.internal_edges[e][2][c] for e in range(k)])
    g = genus(t)
    if g == 0:
        return 1
    a = IntMatrix.from_rows(rows)
    idx = lattice_index(a)
    assert idx is not INFINITE, "transverse curve must have full-rank loop system"
    return idx


# -- evaluation ---------------------------------------------------------------


@dataclass(frozen=True)
class EvaluationLayout:
    """Row layout of the edge evaluation: one block per external edge, in
    label order; zero-derivative edges occupy 3 rows, others 2."""

    blocks: tuple[tuple[int, int, int], ...]  # (label, offset, size)

    @property
    def total(self) -> int:
        return self.blocks[-1][1] + self.blocks[-1][2] if self.blocks else 0

    def block_for_label(self, label: int) -> tuple[int, int]:
        for l, off, size in self.blocks:
            if l == label:
                return off, size
        raise KeyError(label)


def evaluation_layout(ends: Sequence[IntVec3]) -> EvaluationLayout:
    blocks = []
    off = 0
    for i, d in enumerate(ends):
        size = 3 if tuple(d) == (0, 0, 0) else 2
        blocks.append((i + 1, off, size))
        off += size
    return EvaluationLayout(tuple(blocks))


def evaluation_matrix(t: CurveType) -> tuple[IntMatrix, EvaluationLayout]:
    """Linear map from the edge-equation unknowns to the evaluation space.

    For a zero-derivative end the block records the attached vertex position;
    otherwise it records the image of that position under the projection
    killing the derivative (the position of the edge's line, not the point).
    """
    vindex = {v: i for i, v in enumerate(t.vertices)}
    nv, k = t.n_vertices, t.n_internal
    ends = [d for _, d, _ in sorted(t.external_edges, key=lambda e: e[2])]
    layout = evaluation_layout(ends)
    rows = []
    for v, d, label in sorted(t.external_edges, key=lambda e: e[2]):
        if d == (0, 0, 0):
            block = IntMatrix.identity(3)
        else:
            block = quotient_projection(d)
        for brow in block.entries:
            row = [0] * (3 * nv + k)
            for c in range(3):
                row[3 * vindex[v] + c] = brow[c]
            rows.append(row)
    return IntMatrix.from_rows(rows, cols_hint=3 * nv + k), layout


def evaluation_image(t: CurveType) -> IntMatrix:
    """Columns: image of the integral tangent lattice under the evaluation map."""
    ds = deformation_space(t)
    ev, _ = evaluation_matrix(t)
    return ev.mul(ds.lattice)


def is_general(t: CurveType) -> bool:
    """Deformation dimension equals the number of ends and evaluation is injective."""
    ds = deformation_space(t)
    if ds.dimension != t.n_ends:
        return False
    ev, _ = evaluation_matrix(t)
    img = ev.mul(ds.lattice)
    return rational_rank(img.entries) == ds.dimension


# -- automorphisms ------------------------------------------------------------


def _edge_key(e: tuple[int, int, IntVec3]):
    t, h, d = e
    a = (t, h, d)
    b = (h, t, tuple(-x for x in d))
    return min(a, b)


def automorphism_count(t: CurveType) -> int:
    """Automorphisms fixing every labeled external edge.

    Vertex bijections must preserve the multiset of internal edges up to
    orientation flip and fix the attachment of every labeled end; parallel
    identical edges may be permuted freely, contributing factorials.
    """
    from math import factorial

    pin = {}
    for v, d, label in t.external_edges:
        if pin.get(v, (None, None)) == (None, None):
            pin[v] = v
    # vertices carrying ends must be fixed
    fixed = {v for v, _, _ in t.external_edges}
    free = [v for v in t.vertices if v not in fixed]

    from collections import Counter
    base_edges = Counter(_edge_key(e) for e in t.internal_edges)

    def edge_multiset(sigma):
        return Counter(
            _edge_key((sigma[tl], sigma[hd], d)) for tl, hd, d in t.internal_edges)

    count = 0
    # neighborhood signature pruning for the free vertices
    def signature(v):
        inc = sorted((kind if kind == "ext" else "int", d)
                     for kind, _, d in t.incident(v))
        return tuple(inc)

    sigs = {v: signature(v) for v in t.vertices}
    candidates = {v: [w for w in free if sigs[w] == sigs[v]] for v in free}

    def backtrack(i, sigma, used):
        nonlocal count
        if i == len(free):
            if edge_multiset(sigma) == base_edges:
                mult = 1
                for key, c in base_edges.items():
                    mult *= factorial(c)
                count += mult
            return
        v = free[i]
        for w in candidates[v]:
            if w in used:
                continue
            sigma[v] = w
            used.add(w)
            backtrack(i + 1, sigma, used)
            used.discard(w)
        del v

    sigma0 = {v: v for v in fixed}
    backtrack(0, sigma0, set())
    return count


# -- local models -------------------------------------------------------------


@dataclass(frozen=True)
class VertexStar:
    """Single-vertex type collecting the outgoing derivatives at a vertex.

    edge_refs[i] says where external label i+1 of the star comes from:
    ('ext', j) for external edge j of the parent, ('tail', e) / ('head', e)
    for end of internal edge e.
    """

    star: CurveType
    edge_refs: tuple[tuple[str, int], ...]


def vertex_star(t: CurveType, v: int) -> VertexStar:
    if v not in t.vertices:
        raise ValueError(f"unknown vertex {v}")
    ends = []
    refs = []
    for kind, i, d in t.incident(v):
        refs.append((kind, i))
        ends.append(d)
    star = CurveType.make(
        (0,), (), [(0, d, i + 1) for i, d in enumerate(ends)])
    return VertexStar(star, tuple(refs))


# -- placements ---------------------------------------------------------------


@dataclass(frozen=True)
class PlacedCurve:
    """An exact rational solution of the edge equations with positive lengths."""

    ctype: CurveType
    positions: dict[int, tuple[Fraction, Fraction, Fraction]]
    lengths: dict[int, Fraction]

    def check(self) -> bool:
        for i, (tail, head, d) in enumerate(self.ctype.internal_edges):
            l = self.lengths[i]
            if l <= 0:
                return False
            for c in range(3):
                if self.positions[head][c] - self.positions[tail][c] - d[c] * l != 0:
                    return False
        return True


# -- isomorphism --------------------------------------------------------------


def _refine_colors(t: CurveType):
    from collections import Counter
    colors = {}
    for v in t.vertices:
        ext = tuple(sorted((d, l) for vv, d, l in t.external_edges if vv == v))
        inc = tuple(sorted(Counter(d for _, _, d in t.incident(v)).items()))
        colors[v] = (ext, inc)
    return colors


def are_isomorphic(t1: CurveType, t2: CurveType) -> bool:
    """Isomorphism fixing external labels (orientation flips allowed)."""
    if (t1.n_vertices != t2.n_vertices or t1.n_internal != t2.n_internal
            or sorted((d, l) for _, d, l in t1.external_edges)
            != sorted((d, l) for _, d, l in t2.external_edges)):
        return False
    return _find_isomorphism(t1, t2) is not None


def _find_isomorphism(t1: CurveType, t2: CurveType):
    from collections import Counter

    c1, c2 = _refine_colors(t1), _refine_colors(t2)
    if sorted(c1.values()) != sorted(c2.values()):
        return None
    # external attachments force part of the map
    anchor1 = {l: v for v, _, l in t1.external_edges}
    anchor2 = {l: v for v, _, l in t2.external_edges}
    sigma = {}
    for l, v in anchor1.items():
        w = anchor2[l]
        if v in sigma and sigma[v] != w:
            return None
        if c1[v] != c2[w]:
            return None
        sigma[v] = w

    e2 = Counter(_edge_key(e) for e in t2.internal_edges)
    free = [v for v in t1.vertices if v not in sigma]
    used = set(sigma.values())

    def ok(sig):
        return Counter(_edge_key((sig[t], sig[h], d))
                       for t, h, d in t1.internal_edges) == e2

    result = None

    def backtrack(i):
        nonlocal result
        if result is not None:
            return
        if i == len(free):
            if ok(sigma):
                result = dict(sigma)
            return
        v = free[i]
        for w in t2.vertices:
            if w in used or c1[v] != c2[w]:
                continue
            sigma[v] = w
            used.add(w)
            backtrack(i + 1)
            used.discard(w)
            del sigma[v]

    backtrack(0)
    return result


def _canonical_key(t: CurveType):
    """Deterministic key invariant under vertex relabeling and edge flips."""
    colors = _refine_colors(t)
    base = sorted(t.vertices, key=lambda v: (colors[v], v))
    best = None
    # vertices pinned by ends get canonical positions via their label sets;
    # remaining ambiguity is resolved by trying orders within color classes
    from itertools import permutations as perms
    groups = []
    i = 0
    while i < len(base):
        j = i
        while j < len(base) and colors[base[j]] == colors[base[i]]:
            j += 1
        groups.append(base[i:j])
        i = j
    if any(len(g) > 6 for g in groups):
        # fall back: color order only (coarser but still deterministic for
        # hashing; equality then goes through are_isomorphic)
        idx = {v: i for i, v in enumerate(base)}
        edges = sorted(min((idx[t_], idx[h], d), (idx[h], idx[t_], tuple(-x for x in d)))
                       for t_, h, d in t.internal_edges)
        ends = sorted((idx[v], d, l) for v, d, l in t.external_edges)
        return ("coarse", tuple(edges), tuple(ends))

    def orders(gs):
        if not gs:
            yield []
            return
        for p in perms(gs[0]):
            for rest in orders(gs[1:]):
                yield list(p) + rest

    for order in orders(groups):
        idx = {v: i for i, v in enumerate(order)}
        edges = tuple(sorted(
            min((idx[t_], idx[h], d), (idx[h], idx[t_], tuple(-x for x in d)))
            for t_, h, d in t.internal_edges))
        ends = tuple(sorted((idx[v], d, l) for v, d, l in t.external_edges))
        key = (edges, ends)
        if best is None or key < best:
            best = key
    return ("exact",) + best
