"""Curve weights: the generating-function value attached to a general type.

A transverse type factors as its multiplicity times one closed-form weight
per trivalent vertex.  A non-transverse type is resolved by shifting each
internal edge's matching equation by a generic vector and summing over the
combinatorial types of resolutions: per vertex a general replacement curve
with matching outgoing derivatives, glued by signed connector lengths.  Each
solvable resolution contributes its own lattice index times the product of
its vertex-curve weights over their automorphisms; the total is independent
of the shift, which the test suite checks across seeds.

Both the Laurent-series weight and its q-polynomial counterpart run through
the same resolution machinery; only the closed forms at trivalent vertices
differ.
"""

from __future__ import annotations

import random
from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

from .exactnum import (
    LaurentSeries,
    QHalfLaurent,
    normalized_sin_half,
    q_to_lambda,
    quantum_integer_q,
)
from .feasibility import positive_combinations
from .lattice import (
    IntMatrix,
    lattice_index,
    left_null_basis,
    quotient_projection,
    solve_rational_multi,
    wedge_index,
)
from .enumeration import SearchBounds, enumerate_curve_types
from .tropcurve import (
    CurveType,
    _edge_key,
    automorphism_count,
    deformation_space,
    is_general,
    is_transverse,
    multiplicity,
    vertex_star,
)


class UnsupportedVertex(ValueError):
    """A vertex weight the source material does not define (refused, not guessed)."""


class NonGenericShift(Exception):
    """Some resolution system is solvable but not transversely; resample."""


class ShiftExhausted(Exception):
    """No generic shift found within the resample cap."""


class DepthExceeded(Exception):
    """Resolution recursion failed to terminate within the cap."""


RESAMPLE_CAP = 16
_SMALL_PRIMES = (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41, 43, 47, 53)


# -- vertex closed forms -------------------------------------------------------


def _classify_star(ends: Sequence[tuple[int, int, int]]):
    if len(ends) != 3:
        raise UnsupportedVertex(f"no closed form for a {len(ends)}-valent vertex")
    zeros = [d for d in ends if d == (0, 0, 0)]
    nonzero = [d for d in ends if d != (0, 0, 0)]
    if len(zeros) == 0:
        n = wedge_index(nonzero[0], nonzero[1])
        if n == 0:
            raise UnsupportedVertex("colinear trivalent vertex is not general")
        return ("wedge", n)
    if len(zeros) == 1:
        return ("marker", None)
    raise UnsupportedVertex("vertex with several zero-derivative ends")


def vertex_series(star: CurveType, order: int) -> LaurentSeries:
    """Series weight of a single-vertex type (trivalent closed forms)."""
    kind, n = _classify_star([d for _, d, _ in star.external_edges])
    if kind == "wedge":
        return normalized_sin_half(n, order)
    return LaurentSeries.monomial(1, 1, order)


def vertex_qpoly(star: CurveType) -> QHalfLaurent:
    """q-polynomial weight of a single-vertex type."""
    kind, n = _classify_star([d for _, d, _ in star.external_edges])
    if kind == "wedge":
        return quantum_integer_q(n).scale(Fraction(1, n))
    return QHalfLaurent.one()


def transverse_weight(t: CurveType, order: int, mode: str):
    """Multiplicity times the product of vertex weights (transverse case)."""
    if not is_transverse(t):
        raise ValueError("transverse weight on a non-transverse curve")
    m = multiplicity(t)
    if mode == "lambda":
        acc = LaurentSeries.monomial(m, 0, order)
        for v in t.vertices:
            acc = acc * vertex_series(vertex_star(t, v).star, order)
        return acc
    elif mode == "q":
        acc = QHalfLaurent.monomial(m, 0)
        for v in t.vertices:
            acc = acc * vertex_qpoly(vertex_star(t, v).star)
        return acc
    raise ValueError(f"unknown mode {mode!r}")


# -- shift sampling ------------------------------------------------------------


def sample_shifts(t: CurveType, seed: int, attempt: int) -> tuple[tuple[int, int, int], ...]:
    """Deterministic integral shift per internal edge, scaled by distinct primes."""
    out = []
    b = 3 + 2 * attempt
    for i in range(t.n_internal):
        rng = random.Random(f"shift:{seed}:{attempt}:{i}")
        p = _SMALL_PRIMES[i % len(_SMALL_PRIMES)]
        v = tuple(rng.randint(-b, b) for _ in range(3))
        out.append(tuple(p * x for x in v))
    return tuple(out)


# -- resolutions ---------------------------------------------------------------


@dataclass(frozen=True)
class Resolution:
    """One solvable combinatorial resolution of a non-transverse curve."""

    vertex_types: tuple[CurveType, ...]   # replacement per vertex, t.vertices order
    index: int                            # lattice index of the glued system


def _replacement_bounds(degree: int, repl_genus: int) -> SearchBounds:
    return SearchBounds(
        max_internal_edges=max(degree - 3, 0) + 2 * repl_genus,
        max_genus=repl_genus,
        max_derivative_norm=0,
        seed=0,
    )


def resolve_with_shifts(t: CurveType, shifts, repl_genus: int = 0) -> list[Resolution]:
    """All solvable resolutions of t for the given shift assignment.

    Raises NonGenericShift when some candidate system is solvable without
    being transversely solvable, or solvable only on the positivity boundary.

    Candidates per vertex are general types on the vertex's outgoing
    derivatives; the glued linear system for a candidate tuple asks, per
    internal edge e of t with derivative d, that the replacement attachment
    points differ by shift_e + (signed length) * d.  A candidate tuple counts
    when the system is surjective and admits a solution with every
    replacement length strictly positive.
    """
    stars = {v: vertex_star(t, v) for v in t.vertices}
    # candidate lists, grouped modulo derivative-preserving relabeling
    groups: dict[int, list] = {}
    for vi, v in enumerate(t.vertices):
        star = stars[v]
        cands = enumerate_curve_types(
            [d for _, d, _ in star.star.external_edges],
            _replacement_bounds(len(star.edge_refs), repl_genus))
        groups[vi] = _group_by_relabeling(cands)

    # star label of each edge end at its vertex
    label_at = {}
    for vi, v in enumerate(t.vertices):
        for slot, ref in enumerate(stars[v].edge_refs):
            label_at[(vi, ref)] = slot + 1
    vidx = {v: i for i, v in enumerate(t.vertices)}

    solver = _ResolutionSolver(t, vidx, label_at)
    pshifts = solver.projected_shifts(shifts)
    out = []

    def assignments(groups_list):
        if not groups_list:
            yield ()
            return
        head, *rest = groups_list
        for choice in head:
            for tail in assignments(rest):
                yield (choice,) + tail

    group_lists = [groups[vi] for vi in range(len(t.vertices))]
    for assign in assignments(group_lists):
        reps = tuple(a[0] for a in assign)
        invs = tuple(a[3] for a in assign)
        status = solver.classify(reps, invs, pshifts)
        if status == "solvable":
            out.append(Resolution(tuple(a[1] for a in assign), solver.last_index))
        elif status == "nongeneric":
            raise NonGenericShift("shift assignment is not generic for this curve")
    return out


def _group_by_relabeling(cands: list[CurveType]):
    """Return [(rep, candidate, perm, inv)] where perm relabels rep's ends to
    the candidate's (identity on derivatives) and inv[cand_label - 1] is the
    rep label; reps are shared across the group."""
    out = []
    reps: list[CurveType] = []
    for c in cands:
        perm = None
        for r in reps:
            perm = _label_relabeling(r, c)
            if perm is not None:
                out.append((r, c, perm, _invert_perm(perm)))
                break
        else:
            perm = tuple(range(1, c.n_ends + 1))
            reps.append(c)
            out.append((c, c, perm, perm))
    return out


def _invert_perm(perm: tuple[int, ...]) -> tuple[int, ...]:
    inv = [0] * len(perm)
    for i, p in enumerate(perm):
        inv[p - 1] = i + 1
    return tuple(inv)


def _label_relabeling(rep: CurveType, cand: CurveType):
    """Permutation p with p[label-1] = new label turning rep into cand, if any.

    Searches vertex bijections compatible with the label-free structure; the
    label permutation is read off per (vertex, derivative) group afterwards.
    """
    from collections import Counter

    if rep.n_vertices != cand.n_vertices or rep.n_internal != cand.n_internal:
        return None

    def color(t, v):
        ext = Counter(d for vv, d, _ in t.external_edges if vv == v)
        inc = Counter(d for _, _, d in t.incident(v))
        return (tuple(sorted(ext.items())), tuple(sorted(inc.items())))

    c1 = {v: color(rep, v) for v in rep.vertices}
    c2 = {v: color(cand, v) for v in cand.vertices}
    if sorted(c1.values()) != sorted(c2.values()):
        return None
    target = Counter(_edge_key(e) for e in cand.internal_edges)

    verts = list(rep.vertices)
    cand_by_color: dict = {}
    for w in cand.vertices:
        cand_by_color.setdefault(c2[w], []).append(w)

    sigma: dict = {}
    used: set = set()

    def backtrack(i):
        if i == len(verts):
            got = Counter(_edge_key((sigma[a], sigma[b], d))
                          for a, b, d in rep.internal_edges)
            return got == target
        v = verts[i]
        for w in cand_by_color.get(c1[v], ()):
            if w in used:
                continue
            sigma[v] = w
            used.add(w)
            if backtrack(i + 1):
                return True
            used.discard(w)
            del sigma[v]
        return False

    if not backtrack(0):
        return None
    # read off the label matching within each (vertex, derivative) group
    perm = [0] * rep.n_ends
    groups: dict = {}
    for v, d, l in cand.external_edges:
        groups.setdefault((v, d), []).append(l)
    for g in groups.values():
        g.sort()
    taken: dict = {}
    for v, d, l in sorted(rep.external_edges, key=lambda e: e[2]):
        key = (sigma[v], d)
        pos = taken.get(key, 0)
        perm[l - 1] = groups[key][pos]
        taken[key] = pos + 1
    return tuple(perm)


class _ResolutionSolver:
    """Solves glued systems once per wiring class; replays per assignment.

    The matrix of a candidate tuple depends only on the replacement shapes
    and on which slot of each replacement every internal edge attaches to.
    Assignments sharing that data up to a renaming of the base edges share
    rank, index and feasibility conditions; only the shift vector permutes.

    The connector length of an edge with derivative d is eliminated up front
    by the integral projection killing d, shrinking each edge's block from 3
    rows to 2; existence with positive replacement lengths, the genericity
    test, and the projected shift all live in the reduced system.  The full
    lattice index is only computed for wirings that actually contribute.
    """

    def __init__(self, t: CurveType, vidx, label_at):
        self.t = t
        self.vidx = vidx
        self.label_at = label_at
        self.cache: dict = {}
        self.proj = {}
        for _, _, d in t.internal_edges:
            if d not in self.proj:
                self.proj[d] = quotient_projection(d)
        # static per-edge data: (tail idx, head idx, tail slot, head slot, d)
        self.edge_info = []
        for ei, (a, b, d) in enumerate(t.internal_edges):
            ai, bi = vidx[a], vidx[b]
            self.edge_info.append((ai, bi, label_at[(ai, ("tail", ei))],
                                   label_at[(bi, ("head", ei))], d))
        self.last_index = None

    def _wiring(self, invs):
        """Per edge: (tail vertex, head vertex, tail slot, head slot, d) with
        slots in rep coordinates (candidate slot pulled back through inv)."""
        return [(ai, bi, invs[ai][sa - 1], invs[bi][sb - 1], d)
                for ai, bi, sa, sb, d in self.edge_info]

    def projected_shifts(self, shifts):
        return [self.proj[d].mul_vec(shifts[ei])
                for ei, (_, _, d) in enumerate(self.t.internal_edges)]

    def classify(self, reps, invs, pshifts) -> str:
        wires = self._wiring(invs)
        order = sorted(range(len(wires)), key=lambda i: wires[i])
        key = (tuple(id(r) for r in reps), tuple(wires[i] for i in order))
        entry = self.cache.get(key)
        if entry is None:
            entry = list(self._solve(reps, [wires[i] for i in order]))
            self.cache[key] = entry
        # projected shift vector in the solved system's edge order
        shift_vec = []
        for i in order:
            shift_vec.extend(pshifts[i])
        if entry[0] == "defective":
            null_rows = entry[1]
            assert null_rows, "rank-deficient system must have left null vectors"
            if all(sum(a * s for a, s in zip(row, shift_vec)) == 0
                   for row in null_rows):
                return "nongeneric"  # solvable but not transversely
            return "discard"
        g_rows = entry[2]
        saw_zero = False
        for row in g_rows:
            v = 0
            for a, s in zip(row, shift_vec):
                if a:
                    v += a * s
            if v < 0:
                return "discard"
            if v == 0:
                saw_zero = True
        if saw_zero:
            return "nongeneric"
        if entry[1] is None:
            entry[1] = self._full_index(reps, [wires[i] for i in order])
        self.last_index = entry[1]
        return "solvable"

    def _rep_data(self, reps):
        dims, kerns, length_rows = [], [], []
        for r in reps:
            ds = deformation_space(r)
            kerns.append(ds.lattice)
            dims.append(ds.lattice.cols)
            length_rows.append([3 * r.n_vertices + j for j in range(r.n_internal)])
        offs = []
        acc = 0
        for d in dims:
            offs.append(acc)
            acc += d
        return dims, kerns, length_rows, offs, acc

    @staticmethod
    def _attach_rows(reps, kerns, dims, vi, slot):
        # 3 x dims[vi]: position of the vertex carrying external label `slot`
        # in replacement vi, composed with its kernel basis
        r = reps[vi]
        w = next(v for v, _, l in r.external_edges if l == slot)
        wi = list(r.vertices).index(w)
        kern = kerns[vi]
        return [[kern.entries[3 * wi + c][j] for j in range(dims[vi])]
                for c in range(3)]

    def _solve(self, reps, wires):
        k = len(wires)
        dims, kerns, length_rows_per_rep, offs, ncols = self._rep_data(reps)
        rows = []
        for ai, bi, sa, sb, d in wires:
            ra = self._attach_rows(reps, kerns, dims, ai, sa)
            rb = self._attach_rows(reps, kerns, dims, bi, sb)
            p = self.proj[d]
            for prow in p.entries:
                row = [0] * ncols
                for j in range(dims[bi]):
                    row[offs[bi] + j] += sum(prow[c] * rb[c][j] for c in range(3))
                for j in range(dims[ai]):
                    row[offs[ai] + j] -= sum(prow[c] * ra[c][j] for c in range(3))
                rows.append(row)
        if not rows:
            return ("surjective", 1, [])
        rhs_cols = [[Fraction(1) if i == j else Fraction(0) for i in range(2 * k)]
                    for j in range(2 * k)]
        sol = solve_rational_multi(rows, rhs_cols)
        if sol is None:
            return ("defective", [_int_row(r) for r in left_null_basis(rows)], None)
        s_cols, null = sol
        # length extraction over the reduced coordinates
        l_rows = []
        for vi in range(len(reps)):
            for r_idx in length_rows_per_rep[vi]:
                row = [Fraction(0)] * ncols
                for j in range(dims[vi]):
                    row[offs[vi] + j] = Fraction(kerns[vi].entries[r_idx][j])
                l_rows.append(row)
        if not l_rows:
            return ("surjective", None, [])
        ln = [[_dot(lr, nc) for nc in null] for lr in l_rows]    # B = L N
        conds = positive_combinations(ln)
        ls = [[_dot(lr, sc) for sc in s_cols] for lr in l_rows]  # L S
        g_rows = []
        seen = set()
        for c in conds:
            row = _int_row([sum(Fraction(ci) * ls[i][j] for i, ci in enumerate(c))
                            for j in range(2 * k)])
            if row not in seen:
                seen.add(row)
                g_rows.append(row)
        return ("surjective", None, g_rows)

    def _full_index(self, reps, wires) -> int:
        """Index of the unprojected glued map on the product integral lattice."""
        k = len(wires)
        dims, kerns, _, offs, nred = self._rep_data(reps)
        ncols = k + nred
        rows = []
        for ei, (ai, bi, sa, sb, d) in enumerate(wires):
            ra = self._attach_rows(reps, kerns, dims, ai, sa)
            rb = self._attach_rows(reps, kerns, dims, bi, sb)
            for c in range(3):
                row = [0] * ncols
                row[ei] = -d[c]
                for j in range(dims[bi]):
                    row[k + offs[bi] + j] += rb[c][j]
                for j in range(dims[ai]):
                    row[k + offs[ai] + j] -= ra[c][j]
                rows.append(row)
        if not rows:
            return 1
        idx = lattice_index(IntMatrix.from_rows(rows, cols_hint=ncols))
        from .lattice import INFINITE
        assert idx is not INFINITE, "solvable wiring must have finite index"
        return idx


def _dot(row, col):
    return sum(a * b for a, b in zip(row, col))


def _int_row(row) -> tuple[int, ...]:
    """Scale a rational row by a positive factor to primitive integers."""
    from math import gcd
    fr = [Fraction(x) for x in row]
    den = 1
    for x in fr:
        den = den * x.denominator // gcd(den, x.denominator)
    ints = [int(x * den) for x in fr]
    g = 0
    for x in ints:
        g = gcd(g, abs(x))
    if g > 1:
        ints = [x // g for x in ints]
    return tuple(ints)


def _right_inverse_and_null(rows):
    """For surjective M: columns of a rational right inverse, plus a nullspace basis."""
    m = len(rows)
    rhs_cols = [[Fraction(1) if i == j else Fraction(0) for i in range(m)]
                for j in range(m)]
    sol = solve_rational_multi(rows, rhs_cols)
    assert sol is not None, "system claimed surjective but inconsistent"
    s_cols, null = sol
    return [list(c) for c in s_cols], [list(b) for b in null]


# -- the gluing recursion ------------------------------------------------------


_WEIGHT_MEMO: dict = {}
_RESOLUTION_MEMO: dict = {}


def clear_caches():
    _WEIGHT_MEMO.clear()
    _RESOLUTION_MEMO.clear()


def _resolutions(t: CurveType, seed: int, repl_genus: int) -> list[Resolution]:
    """Resolutions for a seeded generic shift, shared between weight modes."""
    key = (t.canonical_key(), seed, repl_genus)
    hit = _RESOLUTION_MEMO.get(key)
    if hit is not None:
        return hit
    for attempt in range(RESAMPLE_CAP):
        shifts = sample_shifts(t, seed, attempt)
        try:
            res = resolve_with_shifts(t, shifts, repl_genus)
        except NonGenericShift:
            continue
        _RESOLUTION_MEMO[key] = res
        return res
    raise ShiftExhausted(
        f"no generic shift found in {RESAMPLE_CAP} attempts for {t}")


def curve_weight(t: CurveType, order: int, mode: str, seed: int = 0,
                 repl_genus: int = 0, depth_cap: int = 8, _depth: int = 0):
    """Weight of a general curve type: closed product if transverse, else the
    sum over shift resolutions, evaluated recursively."""
    if mode not in ("lambda", "q"):
        raise ValueError(f"unknown mode {mode!r}")
    key = (t.canonical_key(), order, mode, seed, repl_genus)
    hit = _WEIGHT_MEMO.get(key)
    if hit is not None:
        return hit
    comps = t.component_types()
    if len(comps) > 1:
        acc = None
        for c in comps:
            w = curve_weight(c, order, mode, seed, repl_genus, depth_cap, _depth)
            acc = w if acc is None else acc * w
        _WEIGHT_MEMO[key] = acc
        return acc
    if not is_general(t):
        raise ValueError("curve weights are defined for general curves only")
    if _depth > depth_cap:
        raise DepthExceeded(f"resolution recursion exceeded depth {depth_cap}")
    if is_transverse(t):
        w = transverse_weight(t, order, mode)
        _WEIGHT_MEMO[key] = w
        return w
    resolutions = _resolutions(t, seed, repl_genus)
    for r in resolutions:
        for part in r.vertex_types:
            if not is_transverse(part) and part.n_internal >= t.n_internal:
                raise DepthExceeded(
                    "resolution did not reduce the internal edge count")
    total = (LaurentSeries.zero(order) if mode == "lambda"
             else QHalfLaurent.zero())
    for r in resolutions:
        prod = (LaurentSeries.monomial(r.index, 0, order) if mode == "lambda"
                else QHalfLaurent.monomial(r.index, 0))
        for part in r.vertex_types:
            w = curve_weight(part, order, mode, seed, repl_genus,
                             depth_cap, _depth + 1)
            aut = automorphism_count(part)
            prod = prod * w
            if aut != 1:
                prod = prod.scale(Fraction(1, aut))
        total = total + prod
    _WEIGHT_MEMO[key] = total
    return total


def weight_trace(t: CurveType, order: int, mode: str, seed: int = 0,
                 repl_genus: int = 0) -> dict:
    """Derivation record of curve_weight: the resolution tree with indices.

    Mirrors the recursion without recomputing anything (values come from the
    same memoized calls), so it is cheap to emit after a weight query.
    """
    node: dict = {"ends": [list(d) for _, d, _ in
                           sorted(t.external_edges, key=lambda e: e[2])],
                  "internal_edges": t.n_internal}
    comps = t.component_types()
    if len(comps) > 1:
        node["kind"] = "disconnected"
        node["components"] = [weight_trace(c, order, mode, seed, repl_genus)
                              for c in comps]
        return node
    if is_transverse(t):
        node["kind"] = "transverse"
        node["multiplicity"] = multiplicity(t)
        node["vertex_wedges"] = []
        for v in t.vertices:
            star = vertex_star(t, v).star
            ends = [d for _, d, _ in star.external_edges]
            kind, n = _classify_star(ends)
            node["vertex_wedges"].append(n if kind == "wedge" else "marker")
        return node
    node["kind"] = "resolved"
    node["resolutions"] = []
    for r in _resolutions(t, seed, repl_genus):
        node["resolutions"].append({
            "index": r.index,
            "vertex_automorphisms": [automorphism_count(p) for p in r.vertex_types],
            "vertex_curves": [weight_trace(p, order, mode, seed, repl_genus)
                              for p in r.vertex_types],
        })
    return node


def substitution_consistent(t: CurveType, order: int, seed: int = 0,
                            repl_genus: int = 0) -> bool:
    """Check that the q-weight substituted at q^(1/2) = i e^(i x/2) matches the
    series weight divided by one power of x per zero-derivative end."""
    wq = curve_weight(t, order, "q", seed, repl_genus)
    wl = curve_weight(t, order, "lambda", seed, repl_genus)
    sub, real = q_to_lambda(wq, order)
    if not real:
        return False
    kzero = t.zero_end_count()
    return sub.agrees(wl.shift(-kzero))
