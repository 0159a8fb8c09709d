"""Bounded enumeration of general curve types and exact placement solving.

Genus zero is a complete search over leaf-labeled trivalent trees (internal
derivatives are forced by balancing).  Positive genus augments the trees two
ways: splitting a non-primitive internal edge into parallel multiples of its
primitive direction, and adding extra edges between existing vertices with a
bounded free derivative, rebalancing along the tree path.  Everything is then
filtered through is_general and deduplicated up to isomorphism; completeness
holds only within the stated bounds and every caller surfaces them.
"""

from __future__ import annotations

import random
from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

from .lattice import (
    IntMatrix,
    primitive_part,
    quotient_projection,
    saturation,
    solve_rational,
)
from .tropcurve import (
    CurveType,
    IntVec3,
    PlacedCurve,
    are_isomorphic,
    edge_equation_matrix,
    evaluation_layout,
    evaluation_matrix,
    is_general,
)


@dataclass(frozen=True)
class SearchBounds:
    """Finite search window; completeness is only guaranteed inside it.

    max_derivative_norm bounds the free derivative parameters of loop edges
    added between existing vertices; 0 disables that (expensive) mechanism.
    Balancing-forced derivatives and parallel splittings are never bounded.
    """

    max_internal_edges: int = 8
    max_genus: int = 5
    max_derivative_norm: int = 0
    seed: int = 0

    def __post_init__(self):
        if min(self.max_internal_edges, self.max_genus, self.max_derivative_norm) < 0:
            raise ValueError("bounds must be non-negative")

    def to_json(self) -> dict:
        return {"max_internal_edges": self.max_internal_edges,
                "max_genus": self.max_genus,
                "max_derivative_norm": self.max_derivative_norm,
                "seed": self.seed}

    @staticmethod
    def from_json(d: dict) -> "SearchBounds":
        return SearchBounds(**d)


# -- constraint cycles ---------------------------------------------------------


@dataclass(frozen=True)
class Stratum:
    base: tuple[Fraction, ...]
    span: IntMatrix                     # columns: integral tangent lattice
    multiplicity: Fraction

    def dim(self) -> int:
        return self.span.cols


@dataclass(frozen=True)
class ConstraintCycle:
    """Weighted affine strata inside the evaluation space."""

    ambient_dim: int
    strata: tuple[Stratum, ...]

    def __post_init__(self):
        from .lattice import rational_rank
        for s in self.strata:
            if len(s.base) != self.ambient_dim or s.span.rows != self.ambient_dim:
                raise ValueError("stratum does not match the ambient dimension")
            if s.span.cols and rational_rank(s.span.entries) != s.span.cols:
                raise ValueError("stratum spanning columns must be independent")

    def perturbed(self, seed: int, attempt: int) -> "ConstraintCycle":
        """Translate every stratum base by a deterministic generic offset."""
        if attempt == 0:
            return self
        out = []
        for i, s in enumerate(self.strata):
            rng = random.Random(f"cycle:{seed}:{i}:{attempt}")
            p = _LARGE_PRIMES[(seed + i + attempt) % len(_LARGE_PRIMES)]
            base = tuple(b + Fraction(rng.randint(-(p - 1), p - 1), p)
                         for b in s.base)
            out.append(Stratum(base, s.span, s.multiplicity))
        return ConstraintCycle(self.ambient_dim, tuple(out))

    def rescaled(self, factor: Fraction) -> "ConstraintCycle":
        return ConstraintCycle(self.ambient_dim, tuple(
            Stratum(s.base, s.span, s.multiplicity * factor) for s in self.strata))

    def to_json(self) -> dict:
        return {
            "ambient_dim": self.ambient_dim,
            "strata": [{
                "base": [[b.numerator, b.denominator] for b in s.base],
                "spanning": [list(c) for c in s.span.columns()],
                "multiplicity": [s.multiplicity.numerator, s.multiplicity.denominator],
            } for s in self.strata],
        }

    @staticmethod
    def from_json(d: dict) -> "ConstraintCycle":
        strata = []
        for s in d["strata"]:
            base = tuple(Fraction(n, den) for n, den in s["base"])
            span = IntMatrix.from_cols([tuple(c) for c in s["spanning"]],
                                       rows_hint=d["ambient_dim"])
            mult = Fraction(s["multiplicity"][0], s["multiplicity"][1])
            strata.append(Stratum(base, span, mult))
        return ConstraintCycle(d["ambient_dim"], tuple(strata))


_LARGE_PRIMES = (10007, 10009, 10037, 10039, 10061, 10067, 10069, 10079,
                 10091, 10093, 10099, 10103, 10111, 10133, 10139, 10141)


# constraints on a single end, in R^3 terms
PointConstraint = tuple  # ("point", (x, y, z))
PlaneConstraint = tuple  # ("plane", coord, value)


def cycle_from_constraints(ends: Sequence[IntVec3],
                           constraints: dict[int, tuple]) -> ConstraintCycle:
    """Build the product cycle for per-end affine constraints.

    constraints maps an end label to ("point", (x,y,z)) or
    ("plane", coord_index, value); unconstrained ends contribute their whole
    evaluation block.  A plane constraint on a nonzero end must contain the
    end's direction, otherwise it cuts nothing out and is rejected.
    """
    layout = evaluation_layout([tuple(e) for e in ends])
    base: list[Fraction] = []
    span_cols: list[list[int]] = []
    total = layout.total

    def push_cols(local_cols, offset):
        for c in local_cols:
            col = [0] * total
            for i, x in enumerate(c):
                col[offset + i] = x
            span_cols.append(col)

    for label, off, size in layout.blocks:
        d = tuple(ends[label - 1])
        con = constraints.get(label)
        if d == (0, 0, 0):
            if con is None:
                base.extend([Fraction(0)] * 3)
                push_cols([(1, 0, 0), (0, 1, 0), (0, 0, 1)], off)
            elif con[0] == "point":
                base.extend(Fraction(x) for x in con[1])
            elif con[0] == "plane":
                _, coord, value = con
                base.extend(Fraction(value) if i == coord else Fraction(0)
                            for i in range(3))
                push_cols([tuple(1 if i == j else 0 for i in range(3))
                           for j in range(3) if j != coord], off)
            else:
                raise ValueError(f"unknown constraint {con[0]!r}")
        else:
            proj = quotient_projection(d)
            if con is None:
                base.extend([Fraction(0)] * 2)
                push_cols([(1, 0), (0, 1)], off)
            elif con[0] == "point":
                img = proj.mul_vec(tuple(int(x) for x in con[1])) \
                    if all(Fraction(x).denominator == 1 for x in con[1]) else None
                if img is None:
                    fr = [Fraction(x) for x in con[1]]
                    img = tuple(sum(Fraction(proj.entries[r][c]) * fr[c]
                                    for c in range(3)) for r in range(2))
                base.extend(Fraction(x) for x in img)
            elif con[0] == "plane":
                _, coord, value = con
                if d[coord] != 0:
                    raise ValueError(
                        f"plane x_{coord}={value} does not constrain an end of derivative {d}")
                pt = tuple(value if i == coord else 0 for i in range(3))
                fr = [Fraction(x) for x in pt]
                img = tuple(sum(Fraction(proj.entries[r][c]) * fr[c]
                                for c in range(3)) for r in range(2))
                base.extend(img)
                dirs = [tuple(proj.entries[r][j] for r in range(2))
                        for j in range(3) if j != coord]
                sat = saturation([c for c in dirs if any(c)], 2)
                push_cols(sat.columns(), off)
            else:
                raise ValueError(f"unknown constraint {con[0]!r}")
    span = IntMatrix.from_cols(span_cols, rows_hint=total)
    return ConstraintCycle(total, (Stratum(tuple(base), span, Fraction(1)),))


def constrained_labels(ends: Sequence[IntVec3], cycle: ConstraintCycle) -> set[int]:
    """Labels whose evaluation block is genuinely cut down by every stratum."""
    layout = evaluation_layout([tuple(e) for e in ends])
    out = set()
    for label, off, size in layout.blocks:
        for s in cycle.strata:
            block_rows = [[c[off + i] for c in s.span.columns()] for i in range(size)]
            from .lattice import rational_rank
            if rational_rank(block_rows) < size:
                out.add(label)
                break
    return out


# -- tree shapes ---------------------------------------------------------------


def _tree_shapes(n: int):
    """Edge lists of leaf-labeled trivalent trees; leaves 1..n, internal > n."""
    if n < 3:
        return
    shapes = [([(1, n + 1), (2, n + 1), (3, n + 1)], n + 1)]
    for j in range(4, n + 1):
        nxt = []
        for edges, last in shapes:
            for i, (u, v) in enumerate(edges):
                nid = last + 1
                ne = edges[:i] + edges[i + 1:] + [(u, nid), (nid, v), (j, nid)]
                nxt.append((ne, nid))
        shapes = nxt
    for edges, _ in shapes:
        yield edges


def _tree_to_type(edges, ends: Sequence[IntVec3]) -> CurveType | None:
    """Force internal derivatives by balancing; None if some become zero."""
    n = len(ends)
    nodes = sorted({u for e in edges for u in e})
    internal = [u for u in nodes if u > n]
    adj = {u: [] for u in nodes}
    for idx, (u, v) in enumerate(edges):
        adj[u].append((v, idx))
        adj[v].append((u, idx))
    ext = []
    internal_edges = []
    for u, v in edges:
        if u <= n and v <= n:
            return None  # n = 2 style degenerate shape; not produced for n >= 3
        if u <= n:
            ext.append((v, tuple(ends[u - 1]), u))
        elif v <= n:
            ext.append((u, tuple(ends[v - 1]), v))
        else:
            # cutting the edge: summing balance over the v side leaves the
            # head contribution -d plus the v-side leaf ends, so d = leaf sum
            stack = [v]
            seen = {u, v}
            leaf_sum = [0, 0, 0]
            while stack:
                w = stack.pop()
                if w <= n:
                    for c in range(3):
                        leaf_sum[c] += ends[w - 1][c]
                    continue
                for x, _ in adj[w]:
                    if x not in seen:
                        seen.add(x)
                        stack.append(x)
            d = tuple(leaf_sum)
            if d == (0, 0, 0):
                return None
            internal_edges.append((u, v, d))
    try:
        return CurveType.make(internal, internal_edges, ext)
    except ValueError:
        return None


def _cheap_reject(t: CurveType) -> bool:
    """Fast necessary-condition filters ahead of the exact generality check."""
    for _, _, d in t.internal_edges:
        if d == (0, 0, 0):
            return True
    for v in t.vertices:
        inc = [d for _, _, d in t.incident(v)]
        nz = [d for d in inc if d != (0, 0, 0)]
        if len(nz) == len(inc) and len(nz) >= 2:
            from .lattice import wedge_index
            if all(wedge_index(nz[0], d) == 0 for d in nz[1:]):
                # a colinear vertex is only acceptable when the whole curve is
                # a point; that case has no nonzero derivatives at all
                return True
    return False


def _partitions(n: int):
    """Partitions of n as descending tuples."""
    if n == 0:
        yield ()
        return
    def rec(rest, maxpart):
        if rest == 0:
            yield ()
            return
        for p in range(min(rest, maxpart), 0, -1):
            for tail in rec(rest - p, p):
                yield (p,) + tail
    yield from rec(n, n)


def _parallel_splits(t: CurveType, bounds: SearchBounds):
    """All ways to split non-primitive internal edges into parallel parts."""
    options = []
    for i, (u, w, d) in enumerate(t.internal_edges):
        p, g = primitive_part(d)
        opts = []
        for mu in _partitions(g):
            opts.append(mu)
        options.append((i, p, opts))
    def rec(idx, acc_edges, extra_genus):
        if extra_genus > bounds.max_genus:
            return
        if idx == len(options):
            if len(acc_edges) <= bounds.max_internal_edges:
                yield acc_edges
            return
        i, p, opts = options[idx]
        u, w, d = t.internal_edges[i]
        for mu in opts:
            parts = [(u, w, tuple(m * x for x in p)) for m in mu]
            yield from rec(idx + 1, acc_edges + parts, extra_genus + len(mu) - 1)
    for edges in rec(0, [], 0):
        if len(edges) == t.n_internal:
            continue  # the trivial all-singleton choice reproduces t
        try:
            yield CurveType.make(t.vertices, edges, t.external_edges)
        except ValueError:
            continue


def _tree_path(t: CurveType, u: int, w: int):
    """Path of (edge index, aligned) pairs from u to w through internal edges."""
    adj = {v: [] for v in t.vertices}
    for i, (a, b, _) in enumerate(t.internal_edges):
        adj[a].append((b, i, True))
        adj[b].append((a, i, False))
    prev = {u: None}
    stack = [u]
    while stack:
        x = stack.pop()
        if x == w:
            break
        for y, i, aligned in adj[x]:
            if y not in prev:
                prev[y] = (x, i, aligned)
                stack.append(y)
    if w not in prev:
        return None
    path = []
    x = w
    while prev[x] is not None:
        p, i, aligned = prev[x]
        path.append((i, aligned))
        x = p
    return list(reversed(path))


def _with_extra_edge(t: CurveType, u: int, w: int, d: IntVec3) -> CurveType | None:
    path = _tree_path(t, u, w)
    if path is None:
        return None
    edges = [list(e) for e in t.internal_edges]
    for i, aligned in path:
        old = edges[i][2]
        if aligned:
            edges[i][2] = tuple(a - b for a, b in zip(old, d))
        else:
            edges[i][2] = tuple(a + b for a, b in zip(old, d))
    edges.append([u, w, d])
    try:
        return CurveType.make(t.vertices,
                              [(a, b, tuple(dd)) for a, b, dd in edges],
                              t.external_edges)
    except ValueError:
        return None


def _box_vectors(b: int):
    for x in range(-b, b + 1):
        for y in range(-b, b + 1):
            for z in range(-b, b + 1):
                if (x, y, z) != (0, 0, 0):
                    yield (x, y, z)


def enumerate_curve_types(ends: Sequence[IntVec3], bounds: SearchBounds,
                          connected: bool = True) -> list[CurveType]:
    """All general types with the given labeled ends, one per isomorphism class.

    The list is complete within the bounds and deterministically ordered.
    """
    ends = [tuple(int(x) for x in e) for e in ends]
    total = tuple(sum(e[c] for e in ends) for c in range(3))
    if total != (0, 0, 0):
        raise ValueError(f"ends do not balance: total {total}")
    if not connected:
        return _enumerate_disconnected(ends, bounds)
    n = len(ends)
    candidates: list[CurveType] = []
    if n == 0:
        return []
    if n <= 2:
        # single-vertex possibilities; a 2-end curve is never general and the
        # vertexless line is outside this data model
        try:
            candidates.append(CurveType.make(
                [0], (), [(0, e, i + 1) for i, e in enumerate(ends)]))
        except ValueError:
            pass
    else:
        for edges in _tree_shapes(n):
            t = _tree_to_type(edges, ends)
            if t is not None:
                candidates.append(t)

    # leaf-insertion enumerates each labeled tree topology exactly once, so
    # the genus-zero layer needs no isomorphism dedupe
    base_trees = [t for t in candidates if not _cheap_reject(t)]
    expanded = list(base_trees)
    if bounds.max_genus > 0:
        # extra edges with free bounded derivatives, iterated
        layer = base_trees
        for _ in range(bounds.max_genus):
            nxt = []
            for t in layer:
                if t.n_internal + 1 > bounds.max_internal_edges:
                    continue
                for ui in range(len(t.vertices)):
                    for wi in range(ui + 1, len(t.vertices)):
                        for d in _box_vectors(bounds.max_derivative_norm):
                            t2 = _with_extra_edge(
                                t, t.vertices[ui], t.vertices[wi], d)
                            if t2 is not None and not _cheap_reject(t2):
                                nxt.append(t2)
            expanded.extend(nxt)
            layer = nxt
        # parallel splittings of non-primitive edges
        for t in list(expanded):
            for s in _parallel_splits(t, bounds):
                if not _cheap_reject(s):
                    expanded.append(s)

    # bounds, generality, dedupe (trees were unique already)
    kept: list[CurveType] = []
    buckets: dict = {}
    n_base = len(base_trees)
    for pos, t in enumerate(expanded):
        if t.n_internal > bounds.max_internal_edges:
            continue
        if t.is_connected() and t.n_internal - t.n_vertices + 1 > bounds.max_genus:
            continue
        if pos >= n_base:
            key = _bucket_key(t)
            group = buckets.setdefault(key, [])
            if any(are_isomorphic(t, u) for u in group):
                continue
            group.append(t)   # remember rejects too, to skip isomorphic copies
        if not is_general(t):
            continue
        kept.append(t)
    kept.sort(key=lambda t: t.canonical_key())
    return kept


def _bucket_key(t: CurveType):
    from collections import Counter
    ders = Counter()
    for _, _, d in t.internal_edges:
        ders[min(d, tuple(-x for x in d))] += 1
    return (t.n_vertices, t.n_internal, tuple(sorted(ders.items())))


def _set_partitions(items: list):
    if not items:
        yield []
        return
    first, rest = items[0], items[1:]
    for part in _set_partitions(rest):
        for i in range(len(part)):
            yield part[:i] + [[first] + part[i]] + part[i + 1:]
        yield [[first]] + part


def _enumerate_disconnected(ends, bounds) -> list[CurveType]:
    """Multisets of connected general types partitioning the labeled ends.

    Every component carries at least one end, which is exactly the "no
    trivial components" requirement of the disconnected count.
    """
    n = len(ends)
    out = []
    seen = []
    for part in _set_partitions(list(range(1, n + 1))):
        blocks = [sorted(b) for b in part]
        if any(tuple(sum(ends[l - 1][c] for l in b) for c in range(3)) != (0, 0, 0)
               for b in blocks):
            continue
        per_block = []
        ok = True
        for b in blocks:
            sub = enumerate_curve_types([ends[l - 1] for l in b], bounds,
                                        connected=True)
            if not sub:
                ok = False
                break
            per_block.append((b, sub))
        if not ok:
            continue
        def rec(i, acc):
            if i == len(per_block):
                yield list(acc)
                return
            b, subs = per_block[i]
            for s in subs:
                yield from rec(i + 1, acc + [(b, s)])
        for combo in rec(0, []):
            merged = _merge_components(combo)
            if any(are_isomorphic(merged, u) for u in seen):
                continue
            seen.append(merged)
            out.append(merged)
    out.sort(key=lambda t: t.canonical_key())
    return out


def _merge_components(combo) -> CurveType:
    vertices = []
    internal = []
    external = []
    offset = 0
    for labels, t in combo:
        vmap = {v: offset + i for i, v in enumerate(t.vertices)}
        offset += len(t.vertices)
        vertices.extend(vmap[v] for v in t.vertices)
        internal.extend((vmap[a], vmap[b], d) for a, b, d in t.internal_edges)
        for v, d, l in t.external_edges:
            external.append((vmap[v], d, labels[l - 1]))
    return CurveType.make(vertices, internal, external)


# -- placement ----------------------------------------------------------------


@dataclass(frozen=True)
class Placement:
    ctype: CurveType
    stratum_index: int
    curve: PlacedCurve
    solution_dim: int          # 0 for a transverse hit
    boundary: bool             # some length vanished exactly


class GenericityFailure(Exception):
    """Constraint position hit a degenerate configuration; caller resamples."""


def place_curves(t: CurveType, cycle: ConstraintCycle) -> list[Placement]:
    """Solve the edge equations jointly with each stratum's constraint.

    Raises GenericityFailure on a positive-dimensional solution set or on a
    boundary hit (a length exactly zero): both mean the cycle needs a nudge.
    Placements with some negative length simply do not exist and are dropped.
    """
    a = edge_equation_matrix(t)
    ev, layout = evaluation_matrix(t)
    if layout.total != cycle.ambient_dim:
        raise ValueError("cycle ambient dimension does not match the ends")
    nv, k = t.n_vertices, t.n_internal
    ncols = 3 * nv + k
    out = []
    for si, stratum in enumerate(cycle.strata):
        sdim = stratum.span.cols
        rows = []
        rhs = []
        for r in range(a.rows):
            rows.append(list(a.entries[r]) + [0] * sdim)
            rhs.append(Fraction(0))
        for r in range(ev.rows):
            rows.append(list(ev.entries[r])
                        + [-stratum.span.entries[r][c] for c in range(sdim)])
            rhs.append(stratum.base[r])
        sol = solve_rational(rows, rhs)
        if sol is None:
            continue
        part, null = sol
        if null:
            raise GenericityFailure(
                f"stratum {si} meets type in a {len(null)}-dimensional family")
        lengths = {i: part[3 * nv + i] for i in range(k)}
        if any(l == 0 for l in lengths.values()):
            raise GenericityFailure(f"stratum {si} hits a boundary length")
        if any(l < 0 for l in lengths.values()):
            continue
        positions = {
            v: (part[3 * i], part[3 * i + 1], part[3 * i + 2])
            for i, v in enumerate(t.vertices)}
        placed = PlacedCurve(t, positions, lengths)
        assert placed.check()
        out.append(Placement(t, si, placed, 0, False))
    return out


def genericity_check(t: CurveType, cycle: ConstraintCycle,
                     placements: Sequence[Placement]) -> bool:
    """Re-verify that every placement is a clean transverse intersection."""
    for p in placements:
        if p.solution_dim != 0 or p.boundary:
            return False
        if not p.curve.check():
            return False
        if any(l <= 0 for l in p.curve.lengths.values()):
            return False
    return True
