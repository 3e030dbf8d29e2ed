"""Exact checks of closed-form identities and matrix decompositions."""

from dataclasses import dataclass, field

from .errors import ParameterError, PivotError
from .exactmat import ExactMatrix, format_rational, ldl_decompose, mat_mul, transpose
from .families import binomial, build_matrix, delannoy, family, triangle_entry


@dataclass(frozen=True)
class IdentityReport:
    identity_id: str
    checked_range: dict
    status: str
    counterexample: dict = None
    details: dict = field(default_factory=dict)

    @property
    def holds(self):
        return self.status == "verified"

    def to_json(self):
        return {
            "identityId": self.identity_id,
            "checkedRange": self.checked_range,
            "status": self.status,
            "counterexample": self.counterexample,
            **({"details": self.details} if self.details else {}),
        }


def _report(identity_id, checked_range, mismatch, details=None):
    if mismatch is None:
        return IdentityReport(identity_id, checked_range, "verified", None, details or {})
    params, lhs, rhs = mismatch
    cx = {"params": params, "lhs": format_rational(lhs), "rhs": format_rational(rhs)}
    return IdentityReport(identity_id, checked_range, "counterexample", cx, details or {})


def _first_mismatch(lhs, rhs):
    for i in range(lhs.rows):
        for j in range(lhs.cols):
            if lhs[i, j] != rhs[i, j]:
                return {"row": i, "col": j}, lhs[i, j], rhs[i, j]
    return None


def verify_vandermonde(max_n, max_k):
    if max_n < 0 or max_k < 0:
        raise ParameterError("bounds must be nonnegative")
    mismatch = None
    for n in range(max_n + 1):
        for k in range(max_k + 1):
            lhs = sum(binomial(n, i) * binomial(k, i) for i in range(min(n, k) + 1))
            rhs = binomial(n + k, k)
            if lhs != rhs:
                mismatch = ({"n": n, "k": k}, lhs, rhs)
                break
        if mismatch:
            break
    return _report("vandermonde", {"maxN": max_n, "maxK": max_k}, mismatch)


def verify_pascal_decomp(order):
    """P P^T against the Pascal square."""
    p = build_matrix("pascal", "triangle", order)
    square = build_matrix("pascal", "square", order)
    return _report("pascal-decomp", {"order": order}, _first_mismatch(mat_mul(p, transpose(p)), square))


def verify_delannoy_decomp(order):
    """P diag(1, 2, 4, ...) P^T against ``[D(n, k)]`` from the recurrence."""
    p = build_matrix("pascal", "triangle", order)
    two = ExactMatrix.diagonal([2 ** j for j in range(order)])
    lhs = mat_mul(mat_mul(p, two), transpose(p))
    square = ExactMatrix.from_function(order, order, delannoy)
    return _report("delannoy-decomp", {"order": order}, _first_mismatch(lhs, square))


def verify_delannoy_closed_sum(max_n, max_k):
    mismatch = None
    for n in range(max_n + 1):
        for k in range(max_k + 1):
            closed = sum(2 ** j * binomial(k, j) * binomial(n, j) for j in range(min(n, k) + 1))
            if closed != delannoy(n, k):
                mismatch = ({"n": n, "k": k}, delannoy(n, k), closed)
                break
        if mismatch:
            break
    return _report("delannoy-closed-sum", {"maxN": max_n, "maxK": max_k}, mismatch)


def symmetry_report(fid, size):
    """Compare ``T(n, k)`` with ``T(n, n - k)`` on the first ``size`` rows."""
    fid = family(fid)
    mismatch = None
    for n in range(size):
        for k in range(n + 1):
            a, b = triangle_entry(fid, n, k), triangle_entry(fid, n, n - k)
            if a != b:
                mismatch = ({"row": n, "col": k}, a, b)
                break
        if mismatch:
            break
    return _report(f"symmetry:{fid}", {"rows": size}, mismatch)


LDL_FAMILIES = ("narayana-a", "narayana-b", "m-narayana", "fuss-narayana-a", "fuss-narayana-b")


def narayana_square_ldl(tag, m=None, order=8):
    """Exact LDL of a square truncation.

    Returns ``(L, D, report)``; ``L`` and ``D`` are None when the square is
    not symmetric (the report then names the first asymmetric entry) or when
    a leading principal minor vanishes.
    """
    if tag not in LDL_FAMILIES:
        raise ParameterError(f"LDL is not offered for {tag!r}")
    fid = family(tag, m)
    sq = build_matrix(fid, "square", order)
    rng = {"family": str(fid), "order": order}
    for i in range(order):
        for j in range(i):
            if sq[i, j] != sq[j, i]:
                rep = _report(f"ldl:{fid}", rng, ({"row": i, "col": j}, sq[i, j], sq[j, i]),
                              {"reason": "square truncation is not symmetric"})
                return None, None, rep
    try:
        L, D = ldl_decompose(sq)
    except PivotError as exc:
        rep = IdentityReport(f"ldl:{fid}", rng, "counterexample",
                             {"params": {"pivotOrder": exc.order}, "lhs": "0", "rhs": "nonzero"},
                             {"reason": str(exc)})
        return None, None, rep
    back = mat_mul(mat_mul(L, ExactMatrix.diagonal(D)), transpose(L))
    details = {"D": [format_rational(d) for d in D], "allPositive": all(d > 0 for d in D)}
    return L, D, _report(f"ldl:{fid}", rng, _first_mismatch(back, sq), details)
