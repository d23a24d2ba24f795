"""Finite free chain complexes over the Novikov ring: diagonalization,
homological torsion, boundary depth.

Two independent routes to the valuation-Smith exponents are kept:

* diagonalize_valuation: truncation-aware elimination over the valuation
  ring with replayable elementary certificates (no row scalings; unit-pivot
  division uses the truncated geometric inverse at an explicit working
  precision, so residuals are honest zero-up-to-precision scalars);
* invariant_exponents: exact minor valuations, a_i = g_i - g_{i-1} with
  g_i the minimal valuation of an i x i minor (valid over a valuation ring).

max_torsion is computed from the elimination route and boundary_depth from
the minor route, so their equality (torsion = boundary depth) is a genuine
cross-check rather than one computation printed twice.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from fractions import Fraction

from .errors import InsufficientPrecision, ParseError
from .novikov import NovikovScalar
from .qmath import INF, NEG_INF, Q, fmt_q, is_inf, parse_q


def _zero(n_rows, n_cols):
    return [[NovikovScalar.zero() for _ in range(n_cols)] for _ in range(n_rows)]


def mat_mul(a, b):
    rows, inner, cols = len(a), len(b), len(b[0])
    out = _zero(rows, cols)
    for i in range(rows):
        for j in range(cols):
            acc = NovikovScalar.zero()
            for k in range(inner):
                acc = acc + a[i][k] * b[k][j]
            out[i][j] = acc
    return out


def minor_det(matrix, rows, cols):
    """Exact determinant of the submatrix (Laplace expansion, memoized)."""
    rows, cols = tuple(rows), tuple(cols)
    cache = {}

    def go(rs, cs):
        if not rs:
            return NovikovScalar.one()
        key = (rs, cs)
        if key in cache:
            return cache[key]
        r = rs[0]
        acc = NovikovScalar.zero()
        for pos, c in enumerate(cs):
            entry = matrix[r][c]
            if entry.is_exact_zero():
                continue
            sub = go(rs[1:], cs[:pos] + cs[pos + 1 :])
            term = entry * sub
            acc = acc + (term if pos % 2 == 0 else -term)
        cache[key] = acc
        return acc

    return go(rows, cols)


def invariant_exponents(matrix):
    """Sorted exponents (a_1 <= a_2 <= ...) of the valuation Smith form,
    via g_i = min val over i x i minors; exact for exact entries."""
    if not matrix or not matrix[0]:
        return []
    mins = _minor_min_vals_fast(matrix)
    if mins is None:
        mins = _minor_min_vals_scalar(matrix)
    exps = []
    g_prev = Q(0)
    for g in mins:
        if is_inf(g):
            break
        exps.append(g - g_prev)
        g_prev = g
    return sorted(exps)


def _minor_min_vals_scalar(matrix):
    """min minor valuation per size, full scalar arithmetic (handles
    truncated entries, raising when a decision is ambiguous)."""
    n_rows, n_cols = len(matrix), len(matrix[0])
    out = []
    for size in range(1, min(n_rows, n_cols) + 1):
        g = INF
        ambiguous = None
        for rows in itertools.combinations(range(n_rows), size):
            for cols in itertools.combinations(range(n_cols), size):
                d = minor_det(matrix, rows, cols)
                v = d.val()
                if v.exact:
                    g = min(g, v.value)
                else:
                    ambiguous = v.value if ambiguous is None else min(ambiguous, v.value)
        if ambiguous is not None and ambiguous < g:
            raise InsufficientPrecision(
                f"{size}x{size} minor valuations undecided below {fmt_q(g)}"
            )
        out.append(g)
    return out


def _minor_min_vals_fast(matrix):
    """Integer-keyed determinant DP over column subsets, one pass per row
    subset; exact entries only (returns None as a fallback signal)."""
    denom = 1
    for row in matrix:
        for e in row:
            if not is_inf(e.truncation):
                return None
            for exp, _ in e.terms:
                denom = denom * exp.denominator // _gcd(denom, exp.denominator)
    n_rows, n_cols = len(matrix), len(matrix[0])
    enc = [
        [{int(exp * denom): coeff for exp, coeff in e.terms} for e in row]
        for row in matrix
    ]
    max_size = min(n_rows, n_cols)
    mins = [INF] * max_size
    for size in range(1, max_size + 1):
        for rows in itertools.combinations(range(n_rows), size):
            # dp[col_bitmask] = det of enc[rows[:popcount]] x columns(mask)
            dp = {0: {0: Q(1)}}
            for level, r in enumerate(rows):
                nxt = {}
                for mask, poly in dp.items():
                    if not poly:
                        continue
                    for c in range(n_cols):
                        bit = 1 << c
                        if mask & bit:
                            continue
                        entry = enc[r][c]
                        if entry:
                            # inserting column c: sign by position among chosen
                            pos = _popcount_below(mask, c)
                            sgn = -1 if (level - pos) % 2 else 1
                            target = nxt.setdefault(mask | bit, {})
                            for e1, c1 in entry.items():
                                for e2, c2 in poly.items():
                                    key = e1 + e2
                                    val = c1 * c2 * sgn
                                    acc = target.get(key)
                                    if acc is None:
                                        target[key] = val
                                    else:
                                        acc += val
                                        if acc:
                                            target[key] = acc
                                        else:
                                            del target[key]
                dp = nxt
            for poly in dp.values():
                if poly:
                    v = Q(min(poly), denom)
                    if v < mins[size - 1]:
                        mins[size - 1] = v
    return mins


def _popcount_below(mask, c):
    return bin(mask & ((1 << c) - 1)).count("1")


def _precision_hint(matrix):
    """Working precision for elimination from the minor valuations: twice
    the largest exponent plus one (None to fall back to the crude bound)."""
    mins = _minor_min_vals_fast(matrix)
    if mins is None:
        return None
    a_max = Q(0)
    g_prev = Q(0)
    for g in mins:
        if is_inf(g):
            break
        a_max = max(a_max, g - g_prev)
        g_prev = g
    return 2 * a_max + 1


def _gcd(a, b):
    while b:
        a, b = b, a % b
    return a


@dataclass
class Diagonalization:
    """Result of the elimination route.

    exponents: sorted diagonal exponents; ops: replayable certificate,
    entries ('swap_rows'|'swap_cols', i, j) and
    ('add_row'|'add_col', target, source, scalar) meaning
    row_t += scalar * row_s (resp. columns); reduced: the final matrix;
    precision: residual entries are zero up to this level.
    """

    exponents: list
    ops: list
    reduced: list
    precision: Fraction


def replay(ops, matrix):
    """Apply a certificate to a copy of the matrix (deterministic)."""
    m = [row[:] for row in matrix]
    for op in ops:
        kind = op[0]
        if kind == "swap_rows":
            _, i, j = op
            m[i], m[j] = m[j], m[i]
        elif kind == "swap_cols":
            _, i, j = op
            for row in m:
                row[i], row[j] = row[j], row[i]
        elif kind == "add_row":
            _, t, s, c = op
            m[t] = [a + c * b for a, b in zip(m[t], m[s])]
        elif kind == "add_col":
            _, t, s, c = op
            for row in m:
                row[t] = row[t] + c * row[s]
        else:
            raise ValueError(f"unknown op {kind}")
    return m


def diagonalize_valuation(matrix, precision=None) -> Diagonalization:
    """Bring a matrix over the valuation ring to diag(T^{a_1}, ..., 0, ...)
    by invertible row/column operations, pivoting on minimal-valuation
    entries.  Raises InsufficientPrecision when entry truncations cannot
    support the required decisions."""
    if not matrix or not matrix[0]:
        return Diagonalization([], [], [row[:] for row in matrix], INF)
    if precision is None:
        precision = _default_precision(matrix)
    m = [row[:] for row in matrix]
    n_rows, n_cols = len(m), len(m[0])
    ops = []
    exponents = []
    for pivot in range(min(n_rows, n_cols)):
        choice = _pick_pivot(m, pivot, precision)
        if choice is None:
            break
        (pi, pj), pval = choice
        if pi != pivot:
            ops.append(("swap_rows", pivot, pi))
            m[pivot], m[pi] = m[pi], m[pivot]
        if pj != pivot:
            ops.append(("swap_cols", pivot, pj))
            for row in m:
                row[pivot], row[pj] = row[pj], row[pivot]
        piv = m[pivot][pivot]
        inv = piv.unit_inverse(precision - 2 * pval)
        for r in range(pivot + 1, n_rows):
            entry = m[r][pivot]
            if entry.is_exact_zero():
                continue
            c = -(entry * inv).truncate(precision - pval)
            ops.append(("add_row", r, pivot, c))
            m[r] = [a + c * b for a, b in zip(m[r], m[pivot])]
        for ccol in range(pivot + 1, n_cols):
            entry = m[pivot][ccol]
            if entry.is_exact_zero():
                continue
            c = -(entry * inv).truncate(precision - pval)
            ops.append(("add_col", ccol, pivot, c))
            for row in m:
                row[ccol] = row[ccol] + c * row[pivot]
        exponents.append(pval)
    return Diagonalization(sorted(exponents), ops, m, precision)


def _pick_pivot(m, start, precision):
    best = None
    for i in range(start, len(m)):
        for j in range(start, len(m[0])):
            v = m[i][j].val()
            if is_inf(v.value):
                continue
            if not v.exact:
                if v.value < precision:
                    raise InsufficientPrecision(
                        f"entry ({i},{j}) undecided below working precision"
                    )
                continue  # resolved零 beyond precision: treated as zero
            if v.value >= precision:
                continue
            if best is None or v.value < best[1]:
                best = ((i, j), v.value)
    return best


def _default_precision(matrix):
    """Every Smith exponent is at most the minimal minor valuation, which is
    bounded by one entry per row (or per column); one more than that bound
    suffices for all decisions."""

    def axis_bound(rows):
        total = Q(0)
        for row in rows:
            vals = [
                e.val().value
                for e in row
                if not e.is_exact_zero() and not is_inf(e.val().value)
            ]
            if vals:
                total += max(vals)
        return total

    cols = list(zip(*matrix))
    return Q(1) + min(axis_bound(matrix), axis_bound(cols))


@dataclass(frozen=True)
class FilteredComplex:
    """Finite free cochain complex over the Novikov ring.

    ranks: degree -> rank; differentials: degree i -> matrix of d^i: C^i ->
    C^{i+1} (entries valuation >= 0), shape rank(i+1) x rank(i); shifts:
    optional per-generator filtration shifts.
    """

    ranks: tuple  # tuple of (degree, rank)
    differentials: tuple  # tuple of (degree, matrix as tuple of row tuples)
    shifts: tuple = ()

    @staticmethod
    def make(ranks: dict, differentials: dict, shifts: dict | None = None) -> "FilteredComplex":
        ranks = dict(ranks)
        diffs = {}
        for deg, mat in differentials.items():
            mat = tuple(tuple(row) for row in mat)
            if ranks.get(deg, 0) == 0 or ranks.get(deg + 1, 0) == 0:
                if mat and any(mat):
                    raise ParseError(f"differential at degree {deg} has no home")
                continue
            if len(mat) != ranks[deg + 1] or any(len(r) != ranks[deg] for r in mat):
                raise ParseError(
                    f"differential at degree {deg} has shape "
                    f"{len(mat)}x{len(mat[0]) if mat else 0}, expected "
                    f"{ranks[deg + 1]}x{ranks[deg]}"
                )
            for row in mat:
                for e in row:
                    v = e.val()
                    if not is_inf(v.value) and v.value < 0:
                        raise ParseError("differential entry with negative valuation")
            diffs[deg] = mat
        cx = FilteredComplex(
            tuple(sorted(ranks.items())),
            tuple(sorted(diffs.items())),
            tuple(sorted((shifts or {}).items())),
        )
        cx._check_square_zero()
        return cx

    def rank(self, degree: int) -> int:
        return dict(self.ranks).get(degree, 0)

    def differential(self, degree: int):
        """Matrix of d^degree, materializing zeros when absent."""
        d = dict(self.differentials).get(degree)
        if d is not None:
            return [list(row) for row in d]
        return _zero(self.rank(degree + 1), self.rank(degree))

    def shift_vector(self, degree: int):
        s = dict(self.shifts).get(degree)
        return list(s) if s is not None else [Q(0)] * self.rank(degree)

    def _check_square_zero(self):
        for deg, _ in self.differentials:
            if self.rank(deg + 2) == 0:
                continue
            prod = mat_mul(self.differential(deg + 1), self.differential(deg))
            for row in prod:
                for e in row:
                    if e.terms:
                        raise ParseError(f"d o d != 0 between degrees {deg} and {deg+2}")

    # -- the two quantities ------------------------------------------------------

    def max_torsion(self, degree: int):
        """Maximal torsion of H^degree; NEG_INF when torsion-free.

        The image lattice of d^{degree-1} has Smith form diag(T^{a_j});
        columns with a_j > 0 produce classes killed exactly by T^{a_j}.
        Computed by elimination; the working precision is informed (with a
        2x safety factor) by the minor engine so that a disagreement between
        the two routes would still surface as differing exponents.
        """
        d_in = self.differential(degree - 1)
        if not d_in or not d_in[0]:
            return NEG_INF
        diag = diagonalize_valuation(d_in, precision=_precision_hint(d_in))
        positive = [a for a in diag.exponents if a > 0]
        return max(positive) if positive else NEG_INF

    def boundary_depth(self, degree: int):
        """Boundary depth of C (x) Lambda in the given degree, from the
        minor-valuation route (plus generator shifts); 0 when no exact
        element loses filtration."""
        d_in = self.differential(degree - 1)
        if not d_in or not d_in[0]:
            return Q(0)
        src = self.shift_vector(degree - 1)
        tgt = self.shift_vector(degree)
        # normalized coordinates absorb the shifts: D~_ij = D_ij T^{t_i - s_j}
        conj = [
            [
                d_in[i][j].shift(tgt[i] - src[j])
                for j in range(len(d_in[0]))
            ]
            for i in range(len(d_in))
        ]
        for row in conj:
            for e in row:
                v = e.val()
                if not is_inf(v.value) and v.value < 0:
                    raise ParseError(
                        "shifted differential decreases filtration"
                    )
        exps = invariant_exponents(conj)
        positive = [a for a in exps if a > 0]
        return max(positive) if positive else Q(0)

    # -- encoding -------------------------------------------------------------------

    def to_json(self) -> dict:
        return {
            "ranks": {str(d): r for d, r in self.ranks},
            "differentials": {
                str(d): [[str(e) for e in row] for row in mat]
                for d, mat in self.differentials
            },
            "shifts": {
                str(d): [fmt_q(x) for x in s] for d, s in self.shifts
            },
        }

    @staticmethod
    def from_json(data: dict) -> "FilteredComplex":
        try:
            ranks = {int(d): int(r) for d, r in data["ranks"].items()}
            diffs = {
                int(d): [
                    [NovikovScalar.parse(e) for e in row] for row in mat
                ]
                for d, mat in data.get("differentials", {}).items()
            }
            shifts = {
                int(d): [parse_q(x) for x in s]
                for d, s in data.get("shifts", {}).items()
            }
        except (KeyError, ValueError, TypeError) as exc:
            raise ParseError(f"bad complex JSON: {exc}") from None
        return FilteredComplex.make(ranks, diffs, shifts)


def random_complex(rng, max_rank=6, denominator=4, degrees=(0, 1)) -> FilteredComplex:
    """Random two-term complex over the Novikov ring (d entries in the
    valuation ring, exponents with bounded denominator)."""
    r0 = rng.randint(1, max_rank)
    r1 = rng.randint(1, max_rank)
    mat = []
    for _ in range(r1):
        row = []
        for _ in range(r0):
            if rng.random() < 0.25:
                row.append(NovikovScalar.zero())
                continue
            nterms = rng.randint(1, 2)
            pairs = []
            for _ in range(nterms):
                exp = Q(rng.randint(0, 3 * denominator), denominator)
                coeff = Q(rng.choice([1, 2, 3, 5, -1, -2, -3]))
                pairs.append((exp, coeff))
            row.append(NovikovScalar.from_terms(pairs))
        mat.append(row)
    d0, d1 = degrees
    return FilteredComplex.make({d0: r0, d1: r1}, {d0: mat})
