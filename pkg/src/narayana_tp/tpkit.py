"""Total positivity checks on finite matrices and sequence truncations.

Three TP/STP methods are offered:

``brute``
    Every minor up to a given order, in canonical order (ascending order,
    then lexicographic rows, then lexicographic columns).  This is the oracle
    of record.
``fekete``
    Solid minors only (consecutive rows and columns).  Sufficient for strict
    total positivity, useless for the nonstrict case.
``neville``
    Neville elimination of the matrix and its transpose.  For nonsingular
    square matrices the matrix is TP iff both eliminations need no row
    exchanges, every multiplier is nonnegative and every diagonal pivot is
    positive.  Singular or rectangular input falls back to ``brute`` when
    small enough.

A failing verdict always carries the canonically smallest failing minor.
"""

import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from fractions import Fraction
from itertools import combinations
from math import comb

from .errors import DimensionError, MethodError, ParameterError, ResourceError
from .exactmat import ExactMatrix, MinorSpec, det, format_rational, integer_det, integer_rows, minor, transpose
from .families import Explicit, Hadamard, Sequence, Shifted

MINOR_BUDGET = 10 ** 7
NEVILLE_FALLBACK_ORDER = 8
WORKERS_ENV = "NARAYANA_TP_WORKERS"

TP_METHODS = ("brute", "neville")
STP_METHODS = ("brute", "fekete")


@dataclass(frozen=True)
class TPVerdict:
    property: str
    status: str
    method: str
    max_minor_order: int
    witness: MinorSpec = None
    witness_value: Fraction = None
    fallback: bool = False

    @property
    def holds(self):
        return self.status == "holds"

    def to_json(self):
        out = {
            "property": self.property,
            "status": self.status,
            "method": self.method,
            "maxMinorOrder": self.max_minor_order,
            "witness": None,
        }
        if self.witness is not None:
            out["witness"] = dict(self.witness.to_json(), value=format_rational(self.witness_value))
        if self.fallback:
            out["fallback"] = "brute"
        return out


@dataclass(frozen=True)
class SeqVerdict:
    property: str
    sequence: str
    order: int
    status: str
    tp_verdict: TPVerdict = None
    witness: MinorSpec = None
    witness_value: Fraction = None
    witness_offset: int = None

    @property
    def holds(self):
        return self.status == "holds"

    def to_json(self):
        out = {
            "property": self.property,
            "sequence": self.sequence,
            "order": self.order,
            "status": self.status,
            "witness": None,
        }
        if self.tp_verdict is not None:
            out["method"] = self.tp_verdict.method
            out["maxMinorOrder"] = self.tp_verdict.max_minor_order
            out["witness"] = self.tp_verdict.to_json()["witness"]
        elif self.witness is not None:
            out["witness"] = dict(self.witness.to_json(), value=format_rational(self.witness_value),
                                  hankelOffset=self.witness_offset)
        return out


def default_workers():
    raw = os.environ.get(WORKERS_ENV, "").strip()
    if not raw:
        return 1
    try:
        return max(1, int(raw))
    except ValueError:
        raise ParameterError(f"{WORKERS_ENV} must be an integer, got {raw!r}")


def minor_count(rows, cols, max_order):
    return sum(comb(rows, k) * comb(cols, k) for k in range(1, max_order + 1))


# --- brute force ----------------------------------------------------------------

def _tp_bad(v):
    return v < 0


def _stp_bad(v):
    return v <= 0


def _scan_laplace(a, nrows, ncols, max_order, bad):
    """First failing (rows, cols) in canonical order, or None.

    Minors of order k are obtained from order k-1 by expansion along the
    last selected column, so no division is ever performed.
    """
    row_combos = [list(combinations(range(nrows), 1))]
    col_combos = [list(combinations(range(ncols), 1))]
    prev = [[a[r[0]][c[0]] for c in col_combos[0]] for r in row_combos[0]]
    for ri, r in enumerate(row_combos[0]):
        for ci, c in enumerate(col_combos[0]):
            if bad(prev[ri][ci]):
                return r, c
    for k in range(2, max_order + 1):
        r_index = {rc: i for i, rc in enumerate(row_combos[-1])}
        c_index = {cc: i for i, cc in enumerate(col_combos[-1])}
        rks = list(combinations(range(nrows), k))
        cks = list(combinations(range(ncols), k))
        # expansion terms for each row set: (sign, row, index of row set without it)
        r_terms = []
        for R in rks:
            terms = []
            for pos, r in enumerate(R):
                sign = 1 if (pos + k - 1) % 2 == 0 else -1
                terms.append((sign, r, r_index[R[:pos] + R[pos + 1:]]))
            r_terms.append(terms)
        c_terms = [(C[-1], c_index[C[:-1]]) for C in cks]
        cur = []
        for ri, terms in enumerate(r_terms):
            line = []
            for last, csub in c_terms:
                v = 0
                for sign, r, rsub in terms:
                    x = a[r][last]
                    if x:
                        p = prev[rsub][csub]
                        v = v + x * p if sign > 0 else v - x * p
                if bad(v):
                    return rks[ri], cks[len(line)]
                line.append(v)
            cur.append(line)
        prev = cur
        row_combos.append(rks)
        col_combos.append(cks)
    return None


def _scan_chunk(args):
    a, k, row_sets, ncols, strict = args
    for R in row_sets:
        for C in combinations(range(ncols), k):
            v = integer_det([[a[r][c] for c in C] for r in R])
            if v < 0 or (strict and v == 0):
                return R, C
    return None


def _scan_parallel(a, nrows, ncols, max_order, strict, workers):
    with ProcessPoolExecutor(max_workers=workers) as pool:
        for k in range(1, max_order + 1):
            rks = list(combinations(range(nrows), k))
            step = max(1, len(rks) // (4 * workers))
            chunks = [(a, k, rks[i:i + step], ncols, strict) for i in range(0, len(rks), step)]
            # chunks are in canonical order; the first hit is the minimum
            for hit in pool.map(_scan_chunk, chunks):
                if hit is not None:
                    return hit
    return None


def _brute(m, max_order, strict, workers=None, budget=MINOR_BUDGET):
    max_order = min(max_order, m.rows, m.cols)
    count = minor_count(m.rows, m.cols, max_order)
    if count > budget:
        raise ResourceError(f"{count} minors exceed the budget of {budget}")
    # positive row scaling keeps every minor's sign
    a, _ = integer_rows(m)
    workers = default_workers() if workers is None else workers
    if workers > 1:
        hit = _scan_parallel(a, m.rows, m.cols, max_order, strict, workers)
    else:
        hit = _scan_laplace(a, m.rows, m.cols, max_order, _stp_bad if strict else _tp_bad)
    if hit is None:
        return None
    spec = MinorSpec(hit[0], hit[1])
    return spec, minor(m, spec)


def _minimal_witness(m, strict, upto=None):
    """Canonical first failing minor, searching orders up to ``upto``."""
    upto = min(m.rows, m.cols) if upto is None else upto
    return _brute(m, upto, strict)


# --- Neville elimination -----------------------------------------------------------

def neville_elimination(rows):
    """Neville elimination without row exchanges.

    Returns ``(ok, multipliers, pivots)``.  ``ok`` is False when a row
    exchange would be required (a nonzero entry below a zero in the pivot
    column).  ``multipliers[k]`` lists the multipliers used in column k from
    the top down; ``pivots`` are the final diagonal entries.
    """
    A = [list(r) for r in rows]
    n, ncols = len(A), len(A[0]) if A else 0
    multipliers = []
    for k in range(min(n, ncols) - 1):
        seen_zero = False
        for i in range(k, n):
            if A[i][k] == 0:
                seen_zero = True
            elif seen_zero:
                return False, multipliers, None
        mults = [Fraction(0)] * (n - k - 1)
        for i in range(n - 1, k, -1):
            if A[i][k] == 0:
                continue
            f = A[i][k] / A[i - 1][k]
            mults[i - k - 1] = f
            upper = A[i - 1]
            A[i] = [x - f * y for x, y in zip(A[i], upper)]
        multipliers.append(mults)
    pivots = [A[i][i] for i in range(min(n, ncols))]
    return True, multipliers, pivots


def _neville_tp(m):
    """True/False when Neville elimination is conclusive, None otherwise."""
    if not m.is_square or det(m) == 0:
        return None
    for M in (m, transpose(m)):
        ok, mults, pivots = neville_elimination(M.to_lists())
        if not ok or any(f < 0 for col in mults for f in col):
            return False
        if any(p <= 0 for p in pivots):
            return False
    return True


# --- public checks ---------------------------------------------------------------

def check_tp(m, method="brute", max_order=None, workers=None):
    full = min(m.rows, m.cols)
    if m.rows == 0 or m.cols == 0:
        raise DimensionError("empty matrix")
    if method in ("fekete", "fekete-solid"):
        raise MethodError("solid minors do not certify nonstrict total positivity")
    if method == "brute":
        order = full if max_order is None else min(max_order, full)
        hit = _brute(m, order, strict=False, workers=workers)
        if hit is None:
            return TPVerdict("TP", "holds", "brute", order)
        return TPVerdict("TP", "fails", "brute", order, hit[0], hit[1])
    if method == "neville":
        result = _neville_tp(m)
        fallback = result is None
        if fallback:
            if max(m.rows, m.cols) > NEVILLE_FALLBACK_ORDER:
                raise ResourceError("Neville elimination inconclusive on a singular or "
                                    "rectangular matrix above the brute-force fallback size")
            hit = _brute(m, full, strict=False, workers=workers)
        else:
            hit = None if result else _minimal_witness(m, strict=False)
        if hit is None:
            return TPVerdict("TP", "holds", "neville", full, fallback=fallback)
        return TPVerdict("TP", "fails", "neville", full, hit[0], hit[1], fallback=fallback)
    raise MethodError(f"unknown TP method {method!r}")


def _solid_scan(a, nrows, ncols):
    for k in range(1, min(nrows, ncols) + 1):
        for i in range(nrows - k + 1):
            for j in range(ncols - k + 1):
                v = integer_det([row[j:j + k] for row in a[i:i + k]])
                if v <= 0:
                    return tuple(range(i, i + k)), tuple(range(j, j + k))
    return None


def check_stp(m, method="fekete", workers=None):
    full = min(m.rows, m.cols)
    if m.rows == 0 or m.cols == 0:
        raise DimensionError("empty matrix")
    if method == "fekete-solid":
        method = "fekete"
    if method not in STP_METHODS:
        raise MethodError(f"unknown STP method {method!r}")
    for i in range(m.rows):
        for j in range(m.cols):
            if m[i, j] <= 0:
                return TPVerdict("STP", "fails", method, full, MinorSpec((i,), (j,)), m[i, j])
    if method == "brute":
        hit = _brute(m, full, strict=True, workers=workers)
    else:
        a, _ = integer_rows(m)
        solid = _solid_scan(a, m.rows, m.cols)
        hit = None
        if solid is not None:
            spec = MinorSpec(*solid)
            try:
                hit = _minimal_witness(m, strict=True, upto=spec.order)
            except ResourceError:
                hit = spec, minor(m, spec)
    if hit is None:
        return TPVerdict("STP", "holds", method, full)
    return TPVerdict("STP", "fails", method, full, hit[0], hit[1])


# --- sequences ---------------------------------------------------------------------

def toeplitz_truncation(seq, order):
    if order < 1:
        raise ParameterError("order must be at least 1")
    terms = seq.terms(order)
    return ExactMatrix.from_function(order, order, lambda n, k: terms[n - k] if n >= k else 0)


def hankel_truncation(seq, order, offset=0):
    if order < 1:
        raise ParameterError("order must be at least 1")
    if offset not in (0, 1):
        raise ParameterError("Hankel offset must be 0 or 1")
    terms = seq.terms(2 * order - 1, start=offset)
    return ExactMatrix.from_function(order, order, lambda n, k: terms[n + k])


def is_pf_truncated(seq, order, max_minor_order=None, method="brute", workers=None):
    """TP of the order-``order`` Toeplitz truncation; says nothing beyond it."""
    verdict = check_tp(toeplitz_truncation(seq, order), method, max_minor_order, workers)
    return SeqVerdict("PF-truncated", str(seq), order, verdict.status, tp_verdict=verdict)


def is_sm_truncated(seq, order):
    """Sylvester's criterion on both Hankel truncations ``[a_{i+j}]`` and ``[a_{i+j+1}]``."""
    for offset in (0, 1):
        h = hankel_truncation(seq, order, offset)
        for k in range(1, order + 1):
            d = det(h.leading(k))
            if d <= 0:
                return SeqVerdict("SM-truncated", str(seq), order, "fails",
                                  witness=MinorSpec(range(k), range(k)), witness_value=d,
                                  witness_offset=offset)
    return SeqVerdict("SM-truncated", str(seq), order, "holds")


def seq_transform(kind, a, b=None):
    if kind == "shift":
        return Shifted(a)
    if kind == "hadamard":
        if b is None:
            raise ParameterError("hadamard needs two sequences")
        return Hadamard(a, b)
    raise ParameterError(f"unknown sequence transform {kind!r}")


def constant_sequence(value):
    return Explicit((), value)


__all__ = [
    "TPVerdict", "SeqVerdict", "check_tp", "check_stp", "neville_elimination",
    "toeplitz_truncation", "hankel_truncation", "is_pf_truncated", "is_sm_truncated",
    "seq_transform", "constant_sequence", "minor_count", "Sequence",
]
