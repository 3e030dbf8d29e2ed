"""Entry rules and matrix builders for the combinatorial families.

Every matrix family is described by a zero-based *triangle rule* ``T(n, k)``,
nonzero only for ``0 <= k <= n``.  The three shapes are then

* triangle:          ``T(n, k)``
* reversed-triangle: ``T(n, n - k)``
* square:            ``T(n + k, k)``

For most families ``T`` is the textbook number itself.  Three families are
re-based so that the triangle starts at row 0:

* ``m-narayana``: ``T(n, k) = NA_m(n + m, k)`` (the numbers live on ``n >= m``)
* ``delannoy``:   ``T(n, k) = D(n - k, k)``, whose square is ``[D(n, k)]``
* ``eulerian``:   ``T(n, k) = A(n + 1, k + 1)`` (Eulerian numbers start at 1)

This module also hosts the exhaustive enumeration oracles (Dyck paths,
Delannoy lattice paths, permutations by excedances) used to cross-check the
closed forms.
"""

import itertools
import re
from collections import Counter
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from math import comb, factorial

from .errors import ConsistencyError, ParameterError, ResourceError
from .exactmat import ExactMatrix, as_rational

MATRIX_FAMILIES = (
    "pascal", "narayana-a", "narayana-b", "m-narayana",
    "fuss-narayana-a", "fuss-narayana-b", "delannoy", "eulerian",
)
PARAMETERIZED = ("m-narayana", "fuss-narayana-a", "fuss-narayana-b")
SHAPES = ("triangle", "reversed-triangle", "square")

DYCK_SEMILENGTH_CAP = 12
LATTICE_CAP = 8
PERMUTATION_CAP = 8


# --- scalar rules -----------------------------------------------------------

def binomial(n, k):
    if k < 0 or n < 0 or k > n:
        return 0
    return comb(n, k)


def _exact_quotient(num, den, what):
    q, r = divmod(num, den)
    if r:
        raise ConsistencyError(f"{what} is not an integer: {num}/{den}")
    return q


def narayana_a(n, k):
    if n < 0 or not 0 <= k <= n:
        return 0
    return _exact_quotient(binomial(n + 1, k) * binomial(n, k), k + 1, f"NA({n},{k})")


def narayana_b(n, k):
    if n < 0 or not 0 <= k <= n:
        return 0
    return binomial(n, k) ** 2


def m_narayana(m, n, k):
    """m-Narayana number ``(m+1)/(n+2) * C(n+2, k+1) * C(n-m, k)``."""
    if m < 0:
        raise ParameterError("m must be nonnegative")
    if n < m or not 0 <= k <= n - m:
        return 0
    num = (m + 1) * binomial(n + 2, k + 1) * binomial(n - m, k)
    return _exact_quotient(num, n + 2, f"NA_<{m}>({n},{k})")


def fuss_narayana(kind, m, n, k):
    if m < 1:
        raise ParameterError("Fuss-Narayana numbers need m >= 1")
    if n < 0 or not 0 <= k <= n:
        return 0
    if kind == "A":
        num = binomial(n + 1, k) * binomial(m * (n + 1), n - k)
        return _exact_quotient(num, n + 1, f"FNA_<{m}>({n},{k})")
    if kind == "B":
        return binomial(n, k) * binomial(m * n, n - k)
    raise ParameterError(f"unknown Fuss-Narayana type {kind!r}")


@lru_cache(maxsize=None)
def _delannoy_table(size):
    t = [[1] * size for _ in range(size)]
    for n in range(1, size):
        for k in range(1, size):
            t[n][k] = t[n - 1][k] + t[n - 1][k - 1] + t[n][k - 1]
    return tuple(tuple(r) for r in t)


def delannoy(n, k):
    if n < 0 or k < 0:
        return 0
    size = 8
    while size <= max(n, k):
        size *= 2
    return _delannoy_table(size)[n][k]


@lru_cache(maxsize=None)
def _eulerian_row(n):
    if n == 1:
        return (1,)
    prev = _eulerian_row(n - 1)
    get = lambda k: prev[k - 1] if 1 <= k <= n - 1 else 0
    return tuple(k * get(k) + (n - k + 1) * get(k - 1) for k in range(1, n + 1))


def eulerian(n, k):
    """Number of permutations of ``n`` letters with ``k - 1`` excedances."""
    if n < 1 or not 1 <= k <= n:
        return 0
    return _eulerian_row(n)[k - 1]


def catalan(n):
    return binomial(2 * n, n) // (n + 1)


# --- matrix families ----------------------------------------------------------

@dataclass(frozen=True)
class FamilyId:
    tag: str
    m: int = None

    def __post_init__(self):
        if self.tag not in MATRIX_FAMILIES:
            raise ParameterError(f"unknown matrix family {self.tag!r}")
        if self.tag in PARAMETERIZED:
            if self.m is None:
                raise ParameterError(f"{self.tag} needs a parameter m")
            if self.m < 0 or (self.tag.startswith("fuss") and self.m < 1):
                raise ParameterError(f"invalid m={self.m} for {self.tag}")
        elif self.m is not None:
            raise ParameterError(f"{self.tag} takes no parameter m")

    def __str__(self):
        return self.tag if self.m is None else f"{self.tag}<{self.m}>"


def family(tag, m=None):
    return tag if isinstance(tag, FamilyId) else FamilyId(tag, m)


def triangle_entry(fid, n, k):
    """Zero-based triangle rule ``T(n, k)``; zero outside ``0 <= k <= n``."""
    if n < 0 or not 0 <= k <= n:
        return 0
    tag = fid.tag
    if tag == "pascal":
        return binomial(n, k)
    if tag == "narayana-a":
        return narayana_a(n, k)
    if tag == "narayana-b":
        return narayana_b(n, k)
    if tag == "m-narayana":
        return m_narayana(fid.m, n + fid.m, k)
    if tag == "fuss-narayana-a":
        return fuss_narayana("A", fid.m, n, k)
    if tag == "fuss-narayana-b":
        return fuss_narayana("B", fid.m, n, k)
    if tag == "delannoy":
        return delannoy(n - k, k)
    if tag == "eulerian":
        return eulerian(n + 1, k + 1)
    raise ParameterError(tag)


def shape_entry(fid, shape, n, k):
    if shape == "triangle":
        return triangle_entry(fid, n, k)
    if shape in ("reversed-triangle", "reversed"):
        return triangle_entry(fid, n, n - k) if k <= n else 0
    if shape == "square":
        return triangle_entry(fid, n + k, k)
    raise ParameterError(f"unknown shape {shape!r}")


def build_matrix(fid, shape, size):
    """Leading ``size x size`` truncation of a family matrix."""
    fid = family(fid)
    if size < 1:
        raise ParameterError("size must be at least 1")
    return ExactMatrix.from_function(size, size, lambda n, k: shape_entry(fid, shape, n, k))


# --- sequences ------------------------------------------------------------------

SEQUENCE_FAMILIES = (
    "factorial", "factorial-shift-product", "factorial-squared",
    "inv-factorial", "inv-factorial-shift-product", "inv-factorial-squared",
    "inv-pochhammer-factorial",
)


def pochhammer(t, n):
    t = as_rational(t)
    out = Fraction(1)
    for i in range(n):
        out *= t + i
    return out


class Sequence:
    """An infinite sequence given by an exact term rule."""

    def term(self, n):
        raise NotImplementedError

    def terms(self, count, start=0):
        return [self.term(n) for n in range(start, start + count)]


@dataclass(frozen=True)
class NamedSequence(Sequence):
    tag: str
    t: Fraction = None

    def __post_init__(self):
        if self.tag not in SEQUENCE_FAMILIES:
            raise ParameterError(f"unknown sequence {self.tag!r}")
        if self.tag == "inv-pochhammer-factorial":
            if self.t is None or as_rational(self.t) <= 0:
                raise ParameterError("inv-pochhammer-factorial needs t > 0")
            object.__setattr__(self, "t", as_rational(self.t))
        elif self.t is not None:
            raise ParameterError(f"{self.tag} takes no parameter t")

    def term(self, n):
        if n < 0:
            raise ParameterError("sequence index must be nonnegative")
        tag = self.tag
        if tag == "factorial":
            return Fraction(factorial(n))
        if tag == "factorial-shift-product":
            return Fraction(factorial(n) * factorial(n + 1))
        if tag == "factorial-squared":
            return Fraction(factorial(n) ** 2)
        if tag == "inv-factorial":
            return Fraction(1, factorial(n))
        if tag == "inv-factorial-shift-product":
            return Fraction(1, factorial(n) * factorial(n + 1))
        if tag == "inv-factorial-squared":
            return Fraction(1, factorial(n) ** 2)
        return 1 / (pochhammer(self.t, n) * factorial(n))

    def __str__(self):
        return self.tag if self.t is None else f"{self.tag}(t={self.t})"


@dataclass(frozen=True)
class Shifted(Sequence):
    base: Sequence

    def term(self, n):
        return self.base.term(n + 1)

    def __str__(self):
        return f"shift({self.base})"


@dataclass(frozen=True)
class Hadamard(Sequence):
    left: Sequence
    right: Sequence

    def term(self, n):
        return self.left.term(n) * self.right.term(n)

    def __str__(self):
        return f"hadamard({self.left},{self.right})"


@dataclass(frozen=True)
class Explicit(Sequence):
    """Finitely many given terms followed by a constant ``fill``."""

    values: tuple
    fill: Fraction = Fraction(0)

    def __post_init__(self):
        object.__setattr__(self, "values", tuple(as_rational(v) for v in self.values))
        object.__setattr__(self, "fill", as_rational(self.fill))

    def term(self, n):
        return self.values[n] if n < len(self.values) else self.fill

    def __str__(self):
        return f"explicit({','.join(str(v) for v in self.values)};{self.fill})"


def sequence(tag, t=None):
    return NamedSequence(tag, None if t is None else as_rational(t))


def sequence_term(seq, n):
    return seq.term(n)


def _split_args(s):
    parts, depth, cur = [], 0, ""
    for ch in s:
        if ch == "," and depth == 0:
            parts.append(cur)
            cur = ""
            continue
        depth += (ch == "(") - (ch == ")")
        cur += ch
    parts.append(cur)
    return [p.strip() for p in parts]


def parse_sequence(text, t=None):
    """Parse ``factorial``, ``inv-pochhammer-factorial`` (with ``t``),
    ``shift(x)``, ``hadamard(x,y)`` or ``explicit(1,0,1)``."""
    text = text.strip()
    mt = re.fullmatch(r"([a-z-]+)\((.*)\)", text)
    if mt:
        head, args = mt.group(1), _split_args(mt.group(2))
        if head == "shift" and len(args) == 1:
            return Shifted(parse_sequence(args[0], t))
        if head == "hadamard" and len(args) == 2:
            return Hadamard(parse_sequence(args[0], t), parse_sequence(args[1], t))
        if head == "explicit" and args:
            return Explicit(tuple(Fraction(a) for a in args))
        raise ParameterError(f"cannot parse sequence {text!r}")
    if text == "inv-pochhammer-factorial":
        return sequence(text, t)
    return sequence(text)


# --- enumeration oracles -------------------------------------------------------

@lru_cache(maxsize=None)
def _dyck_histogram(semilength):
    """Counter of ``(peaks, final descent length)`` over all Dyck paths."""
    hist = Counter()

    def walk(path, ups, downs):
        if ups == semilength and downs == semilength:
            peaks = sum(1 for a, b in zip(path, path[1:]) if a == "U" and b == "D")
            tail = len(path) - len(path.rstrip("D"))
            hist[(peaks, tail)] += 1
            return
        if ups < semilength:
            walk(path + "U", ups + 1, downs)
        if downs < ups:
            walk(path + "D", ups, downs + 1)

    walk("", 0, 0)
    return dict(hist)


def count_dyck_paths(semilength, peaks=None, tail_down_steps=0, exact_tail=False):
    """Count Dyck paths by exhaustive enumeration.

    ``peaks=None`` counts all peak numbers.  With ``exact_tail`` the final
    descent must have length exactly ``tail_down_steps``; otherwise the last
    ``tail_down_steps`` steps must merely be down-steps.
    """
    if semilength > DYCK_SEMILENGTH_CAP:
        raise ResourceError(f"semilength {semilength} exceeds enumeration cap {DYCK_SEMILENGTH_CAP}")
    if semilength < 0:
        return 0
    total = 0
    for (p, tail), c in _dyck_histogram(semilength).items():
        if peaks is not None and p != peaks:
            continue
        if (tail == tail_down_steps) if exact_tail else (tail >= tail_down_steps):
            total += c
    return total


def narayana_a_by_paths(n, k):
    """NA(n, k) as Dyck paths of semilength n+1 with k+1 peaks."""
    return count_dyck_paths(n + 1, k + 1)


def m_narayana_by_paths(m, n, k):
    """NA_m(n, k) as Dyck paths of semilength n+2 with k+2 peaks whose final
    descent has length exactly m+1."""
    return count_dyck_paths(n + 2, k + 2, m + 1, exact_tail=True)


def count_delannoy_paths(n, k):
    if n > LATTICE_CAP or k > LATTICE_CAP:
        raise ResourceError(f"lattice enumeration capped at {LATTICE_CAP}")
    if n < 0 or k < 0:
        return 0

    def walk(x, y):
        if x == n and y == k:
            return 1
        total = 0
        for dx, dy in ((1, 0), (0, 1), (1, 1)):
            if x + dx <= n and y + dy <= k:
                total += walk(x + dx, y + dy)
        return total

    return walk(0, 0)


@lru_cache(maxsize=None)
def _excedance_histogram(n):
    hist = Counter()
    for perm in itertools.permutations(range(1, n + 1)):
        hist[sum(1 for i, p in enumerate(perm, start=1) if p > i)] += 1
    return dict(hist)


def count_excedance_permutations(n, excedances):
    if n > PERMUTATION_CAP:
        raise ResourceError(f"permutation enumeration capped at n={PERMUTATION_CAP}")
    if n < 0:
        return 0
    return _excedance_histogram(n).get(excedances, 0)
