"""Exact linear feasibility by Fourier-Motzkin elimination.

Two uses downstream: deciding whether a deformation admits a solution with
all replacement lengths strictly positive (with the right-hand side kept
symbolic so one elimination serves many shift vectors), and the cone
intersection tests behind the toric convexity assumptions.  Problem sizes are
tiny, so no effort is spent fighting FM's worst-case growth beyond gcd
normalization and deduplication.
"""

from __future__ import annotations

from fractions import Fraction
from math import gcd
from typing import Sequence


def _normalize(row: tuple[int, ...]) -> tuple[int, ...]:
    g = 0
    for x in row:
        g = gcd(g, abs(x))
    if g > 1:
        row = tuple(x // g for x in row)
    return row


def _to_int_rows(rows: Sequence[Sequence[Fraction | int]]) -> list[tuple[int, ...]]:
    out = []
    for r in rows:
        fr = [Fraction(x) for x in r]
        den = 1
        for x in fr:
            den = den * x.denominator // gcd(den, x.denominator)
        out.append(tuple(int(x * den) for x in fr))
    return out


def positive_combinations(b_rows: Sequence[Sequence[Fraction | int]]) -> list[tuple[int, ...]]:
    """Nonnegative combinations c with c*B = 0, generating the test cone.

    For the system  B s > r  (componentwise, strict) the returned rows are
    complete: the system is feasible iff  c . r < 0  for every returned c.
    Replacing > by >= everywhere turns the criterion into c . r <= 0.
    """
    m = len(b_rows)
    if m == 0:
        return []
    n = len(b_rows[0])
    ints = _to_int_rows(b_rows)
    # each work row: (B-part, combination-part)
    work = [(_r, tuple(1 if i == j else 0 for j in range(m)))
            for i, _r in enumerate(ints)]
    # re-pair: normalization above must scale both parts together
    work = []
    for i, r in enumerate(ints):
        comb = tuple(1 if i == j else 0 for j in range(m))
        work.append((r, comb))
    for var in range(n):
        pos = [w for w in work if w[0][var] > 0]
        neg = [w for w in work if w[0][var] < 0]
        zero = [w for w in work if w[0][var] == 0]
        new = list(zero)
        for p in pos:
            for q in neg:
                a, b = p[0][var], -q[0][var]
                row = tuple(b * x + a * y for x, y in zip(p[0], q[0]))
                comb = tuple(b * x + a * y for x, y in zip(p[1], q[1]))
                g = 0
                for x in row + comb:
                    g = gcd(g, abs(x))
                if g > 1:
                    row = tuple(x // g for x in row)
                    comb = tuple(x // g for x in comb)
                new.append((row, comb))
        # dedupe
        seen = set()
        work = []
        for w in new:
            if w not in seen:
                seen.add(w)
                work.append(w)
    return [comb for row, comb in work if all(x == 0 for x in row)]


def classify_strict(conditions: Sequence[Sequence[int]],
                    r: Sequence[Fraction | int]) -> str:
    """Evaluate precomputed combination rows against a concrete rhs.

    'feasible'  : some s with B s > r exists;
    'boundary'  : only non-strict solutions exist (a genericity failure);
    'infeasible': no solution even allowing equality.
    """
    boundary = False
    for c in conditions:
        val = sum(Fraction(a) * Fraction(b) for a, b in zip(c, r))
        if val > 0:
            return "infeasible"
        if val == 0:
            boundary = True
    return "boundary" if boundary else "feasible"


def feasible_strict(b_rows: Sequence[Sequence[Fraction | int]],
                    r: Sequence[Fraction | int]) -> bool:
    return classify_strict(positive_combinations(b_rows), r) == "feasible"


def cone_meets_cone(gens_a: Sequence[Sequence[int]],
                    gens_b: Sequence[Sequence[int]]) -> bool:
    """Whether cone(gens_a) and cone(gens_b) share a nonzero point.

    Works for arbitrary (possibly dependent) generators: asks, coordinate by
    coordinate, for a common point with that coordinate equal to +-1.
    """
    if not gens_a or not gens_b:
        return False
    dim = len(gens_a[0])
    na, nb = len(gens_a), len(gens_b)
    # variables: a_1..a_na, b_1..b_nb  (all >= 0)
    # equalities: sum a_i g_i - sum b_j h_j = 0
    for coord in range(dim):
        for sign in (1, -1):
            # feasibility with the shared point's coordinate fixed to sign
            rows = []
            rhs = []
            for d in range(dim):
                row = [g[d] for g in gens_a] + [-h[d] for h in gens_b]
                rows.append(row)
                rhs.append(0)
            fix = [g[coord] for g in gens_a] + [0] * nb
            if _feasible_eq_nonneg(rows, rhs, fix, sign):
                return True
    return False


def _feasible_eq_nonneg(eq_rows, eq_rhs, fix_row, fix_val) -> bool:
    """Feasibility of {x >= 0, eq_rows x = eq_rhs, fix_row x = fix_val}."""
    n = len(fix_row)
    ineqs = []  # rows of B for B x >= r
    rhs = []
    for row, b in list(zip(eq_rows, eq_rhs)) + [(fix_row, fix_val)]:
        ineqs.append(list(row))
        rhs.append(b)
        ineqs.append([-x for x in row])
        rhs.append(-b)
    for i in range(n):
        ineqs.append([1 if j == i else 0 for j in range(n)])
        rhs.append(0)
    conds = positive_combinations(ineqs)
    for c in conds:
        val = sum(Fraction(a) * Fraction(b) for a, b in zip(c, rhs))
        if val > 0:
            return False
    return True
