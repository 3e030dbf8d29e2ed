"""Registry of checkable statements, the batch runner and report persistence.

Each statement expands into a deterministic list of sub-jobs.  A sub-job
builds its inputs, runs one check and yields a JSON-ready verdict together
with a flag saying whether the outcome supports the statement.  Conjectures
are only ever reported as ``conjecture-consistent`` or
``counterexample-found``; every report is scoped to the truncations checked.
"""

import configparser
import hashlib
import json
import math
import time
from dataclasses import dataclass
from fractions import Fraction
from pathlib import Path

from . import __version__
from .errors import ConsistencyError, DimensionError, MethodError, ParameterError, ResourceError
from .exactmat import diag_scale, to_csv
from .families import (
    build_matrix, count_delannoy_paths, count_dyck_paths, count_excedance_permutations,
    delannoy, eulerian, family, m_narayana, m_narayana_by_paths, narayana_a, narayana_a_by_paths,
    sequence,
)
from .identities import (
    IdentityReport, narayana_square_ldl, symmetry_report, verify_delannoy_closed_sum,
    verify_delannoy_decomp, verify_pascal_decomp, verify_vandermonde,
)
from .tpkit import (
    check_stp, check_tp, hankel_truncation, is_pf_truncated, is_sm_truncated, seq_transform,
    toeplitz_truncation,
)

SCHEMA_VERSION = 1
DEFAULT_BRUTE_ORDER = 6
DEFAULT_T_VALUES = (Fraction(1, 2), Fraction(1), Fraction(2), Fraction(3))

GUARDED = (ResourceError, MethodError, ParameterError, DimensionError, ConsistencyError)


@dataclass(frozen=True)
class Job:
    label: str
    run: object
    matrix: object = None
    expect_counterexample: bool = False


@dataclass(frozen=True)
class Statement:
    id: str
    kind: str
    description: str
    defaults: dict
    plan: object


@dataclass
class Report:
    statement_id: str
    kind: str
    params: dict
    status: str
    verdicts: list
    entry_digest: dict
    wall_time_millis: int = 0
    tool_version: str = __version__
    scope: str = ""

    @property
    def exit_code(self):
        if self.status in ("fails", "counterexample", "counterexample-found"):
            return 1
        if self.status == "error":
            return 2
        return 0

    def to_json(self):
        return {
            "schemaVersion": SCHEMA_VERSION,
            "statementId": self.statement_id,
            "kind": self.kind,
            "params": self.params,
            "status": self.status,
            "scope": self.scope,
            "verdicts": self.verdicts,
            "entryDigest": self.entry_digest,
            "toolVersion": self.tool_version,
            "wallTimeMillis": self.wall_time_millis,
        }


def stable_section(report_json):
    """The part of a report that must be byte-identical across reruns."""
    return {k: v for k, v in report_json.items() if k != "wallTimeMillis"}


def dumps(obj):
    return json.dumps(obj, sort_keys=True, indent=2, ensure_ascii=True) + "\n"


def matrix_digest(m):
    return hashlib.sha256(f"{m.rows}x{m.cols}\n{to_csv(m)}".encode("ascii")).hexdigest()


# --- job helpers ---------------------------------------------------------------------

def _verdict_ok(v):
    if isinstance(v, IdentityReport):
        return v.holds
    return v.holds


def _tp_jobs(fid, shape, size, brute_order):
    m = build_matrix(fid, shape, size)
    jobs = [Job(f"{fid} {shape} n={size} TP neville", lambda: check_tp(m, "neville"), m)]
    b = min(size, brute_order)
    mb = build_matrix(fid, shape, b)
    jobs.append(Job(f"{fid} {shape} n={b} TP brute", lambda: check_tp(mb, "brute"), mb))
    return jobs


def _stp_jobs(fid, size, brute_order):
    m = build_matrix(fid, "square", size)
    jobs = [Job(f"{fid} square n={size} STP fekete", lambda: check_stp(m, "fekete"), m)]
    b = min(size, brute_order)
    mb = build_matrix(fid, "square", b)
    jobs.append(Job(f"{fid} square n={b} STP brute", lambda: check_stp(mb, "brute"), mb))
    return jobs


def _m_values(p, default):
    return p.get("m") if p.get("m") is not None else list(default)


def _t_values(p):
    return p.get("t") if p.get("t") is not None else list(DEFAULT_T_VALUES)


def _equality(identity_id, params, pairs):
    """IdentityReport from (params, lhs, rhs) triples; first mismatch wins."""
    for prm, lhs, rhs in pairs:
        if lhs != rhs:
            return IdentityReport(identity_id, params, "counterexample",
                                  {"params": prm, "lhs": str(lhs), "rhs": str(rhs)})
    return IdentityReport(identity_id, params, "verified")


def _matrix_equality(identity_id, a, b):
    return _equality(identity_id, {"order": a.rows}, (
        ({"row": i, "col": j}, a[i, j], b[i, j]) for i in range(a.rows) for j in range(a.cols)))


# --- plans ---------------------------------------------------------------------------

def _plan_tp(tags, shapes):
    def plan(p):
        jobs = []
        for tag in tags:
            for shape in shapes:
                jobs += _tp_jobs(family(tag), shape, p["size"], p["bruteOrder"])
        return jobs
    return plan


def _plan_stp(tags):
    def plan(p):
        jobs = []
        for tag in tags:
            jobs += _stp_jobs(family(tag), p["size"], p["bruteOrder"])
        return jobs
    return plan


def _plan_param_tp(tags, shapes, default_m):
    def plan(p):
        jobs = []
        for m in _m_values(p, default_m):
            for tag in tags:
                for shape in shapes:
                    jobs += _tp_jobs(family(tag, m), shape, p["size"], p["bruteOrder"])
        return jobs
    return plan


def _plan_param_stp(tags, default_m):
    def plan(p):
        jobs = []
        for m in _m_values(p, default_m):
            for tag in tags:
                jobs += _stp_jobs(family(tag, m), p["size"], p["bruteOrder"])
        return jobs
    return plan


def _plan_pf(p):
    seqs = [sequence("inv-factorial"), sequence("inv-factorial-shift-product"),
            sequence("inv-factorial-squared")]
    seqs += [sequence("inv-pochhammer-factorial", t) for t in _t_values(p)]
    jobs = []
    n, b = p["size"], min(p["size"], p["bruteOrder"])
    for s in seqs:
        jobs.append(Job(f"{s} Toeplitz n={n} PF neville",
                        lambda s=s: is_pf_truncated(s, n, method="neville"), toeplitz_truncation(s, n)))
        jobs.append(Job(f"{s} Toeplitz n={b} PF brute",
                        lambda s=s: is_pf_truncated(s, b, method="brute"), toeplitz_truncation(s, b)))
    return jobs


def _plan_sm(p):
    n = p["size"]
    fac = sequence("factorial")
    named = [fac, sequence("factorial-shift-product"), sequence("factorial-squared")]
    jobs = []
    for s in named:
        jobs.append(Job(f"{s} Hankel n={n} SM", lambda s=s: is_sm_truncated(s, n),
                        hankel_truncation(s, n)))
    c = min(n, p["bruteOrder"])
    h = hankel_truncation(fac, c)
    jobs.append(Job(f"factorial Hankel n={c} STP fekete", lambda: check_stp(h, "fekete"), h))
    for s in named:
        jobs.append(Job(f"shift({s}) Hankel n={c - 1 or 1} SM",
                        lambda s=s: is_sm_truncated(seq_transform("shift", s), max(c - 1, 1))))
    for i, a in enumerate(named):
        for b in named[i:]:
            hs = seq_transform("hadamard", a, b)
            jobs.append(Job(f"{hs} Hankel n={c} SM", lambda hs=hs: is_sm_truncated(hs, c)))
    terms = 11
    jobs.append(Job("hadamard(factorial,shift(factorial)) == factorial-shift-product",
                    lambda: _equality("hadamard-shift-product", {"maxN": terms - 1}, (
                        ({"n": k}, seq_transform("hadamard", fac, seq_transform("shift", fac)).term(k),
                         named[1].term(k)) for k in range(terms)))))
    jobs.append(Job("hadamard(factorial,factorial) == factorial-squared",
                    lambda: _equality("hadamard-squared", {"maxN": terms - 1}, (
                        ({"n": k}, seq_transform("hadamard", fac, fac).term(k), named[2].term(k))
                        for k in range(terms)))))
    return jobs


def _fact(n):
    return math.factorial(n)


def _plan_scaling(p):
    n = p["size"]
    cases = [
        ("narayana-a", "inv-factorial-shift-product",
         lambda i: _fact(i) * _fact(i + 1), lambda k: Fraction(1, _fact(k) * _fact(k + 1))),
        ("narayana-b", "inv-factorial-squared",
         lambda i: _fact(i) ** 2, lambda k: Fraction(1, _fact(k) ** 2)),
        ("pascal", "inv-factorial", lambda i: _fact(i), lambda k: Fraction(1, _fact(k))),
    ]
    jobs = []
    for tag, seq_tag, a, b in cases:
        t = toeplitz_truncation(sequence(seq_tag), n)
        scaled = diag_scale(t, [a(i) for i in range(n)], [b(k) for k in range(n)])
        jobs.append(Job(f"diag-scaled Toeplitz of {seq_tag} == {tag} triangle n={n}",
                        lambda s=scaled, tag=tag: _matrix_equality(
                            f"scaling:{tag}-triangle", s, build_matrix(tag, "triangle", n)), scaled))
    squares = [
        ("narayana-a", "factorial-shift-product", lambda i: Fraction(1, _fact(i) * _fact(i + 1))),
        ("narayana-b", "factorial-squared", lambda i: Fraction(1, _fact(i) ** 2)),
        ("pascal", "factorial", lambda i: Fraction(1, _fact(i))),
    ]
    for tag, seq_tag, a in squares:
        h = hankel_truncation(sequence(seq_tag), n)
        f = [a(i) for i in range(n)]
        scaled = diag_scale(h, f, f)
        jobs.append(Job(f"diag-scaled Hankel of {seq_tag} == {tag} square n={n}",
                        lambda s=scaled, tag=tag: _matrix_equality(
                            f"scaling:{tag}-square", s, build_matrix(tag, "square", n)), scaled))
    # the scaled and unscaled Toeplitz matrices share every minor sign
    t = toeplitz_truncation(sequence("inv-factorial-shift-product"), min(n, p["bruteOrder"]))
    jobs.append(Job("TP verdict of Toeplitz of inv-factorial-shift-product (unscaled)",
                    lambda: check_tp(t, "brute"), t))
    return jobs


def _plan_pascal_decomp(p):
    return [Job(f"P P^T == Pascal square n={p['size']}", lambda: verify_pascal_decomp(p["size"]))]


def _plan_delannoy_decomp(p):
    n = p["size"]
    return [
        Job(f"P diag(2^j) P^T == Delannoy square n={n}", lambda: verify_delannoy_decomp(n)),
        Job(f"Delannoy recurrence == closed sum n,k<={n}", lambda: verify_delannoy_closed_sum(n, n)),
    ]


def _plan_vandermonde(p):
    n = p["size"]
    return [Job(f"Vandermonde convolution n,k<={n}", lambda: verify_vandermonde(n, n))]


def _plan_symmetry(p):
    n = p["size"]
    jobs = [Job(f"narayana-a symmetric rows<{n}", lambda: symmetry_report("narayana-a", n)),
            Job(f"narayana-b symmetric rows<{n}", lambda: symmetry_report("narayana-b", n))]
    for m in _m_values(p, range(1, 5)):
        if m >= 1:
            jobs.append(Job(f"m-narayana<{m}> asymmetric rows<{n}",
                            lambda m=m: symmetry_report(family("m-narayana", m), n),
                            expect_counterexample=True))
    for m in _m_values(p, range(2, 5)):
        if m >= 2:
            for tag in ("fuss-narayana-a", "fuss-narayana-b"):
                jobs.append(Job(f"{tag}<{m}> asymmetric rows<{n}",
                                lambda m=m, tag=tag: symmetry_report(family(tag, m), n),
                                expect_counterexample=True))
    return jobs


def _plan_dyck(p):
    n = min(p["size"], 10)
    jobs = [Job(f"NA(n,k) == Dyck paths (semilength n+1, k+1 peaks) n<={n}",
                lambda: _equality("dyck:narayana-a", {"maxN": n}, (
                    ({"n": a, "k": k}, narayana_a_by_paths(a, k), narayana_a(a, k))
                    for a in range(n + 1) for k in range(a + 1))))]
    top = min(n, 9)
    for m in _m_values(p, range(0, 4)):
        jobs.append(Job(f"NA_<{m}>(n,k) == Dyck paths (semilength n+2, k+2 peaks, "
                        f"final descent {m + 1}) n<={top}",
                        lambda m=m: _equality(f"dyck:m-narayana<{m}>", {"maxN": top}, (
                            ({"n": a, "k": k}, m_narayana_by_paths(m, a, k), m_narayana(m, a, k))
                            for a in range(m, top + 1) for k in range(a - m + 1)))))
    jobs.append(Job(f"narayana-a row sums are Catalan numbers n<={min(n, 9)}",
                    lambda: _equality("catalan-row-sums", {"maxN": min(n, 9)}, (
                        ({"n": a}, sum(narayana_a(a, k) for k in range(a + 1)),
                         count_dyck_paths(a + 1)) for a in range(min(n, 9) + 1)))))
    return jobs


def _plan_eulerian(p):
    n = min(p["size"], 8)
    return [
        Job(f"Eulerian recurrence == excedance enumeration n<={n}",
            lambda: _equality("eulerian:excedances", {"maxN": n}, (
                ({"n": a, "k": k}, count_excedance_permutations(a, k - 1), eulerian(a, k))
                for a in range(1, n + 1) for k in range(1, a + 1)))),
        Job(f"Eulerian row sums == n! n<={p['size']}",
            lambda: _equality("eulerian:row-sums", {"maxN": p["size"]}, (
                ({"n": a}, sum(eulerian(a, k) for k in range(1, a + 1)), _fact(a))
                for a in range(1, p["size"] + 1)))),
    ]


def _plan_delannoy_paths(p):
    n = min(p["size"], 6)
    return [Job(f"Delannoy recurrence == lattice path enumeration n,k<={n}",
                lambda: _equality("delannoy:paths", {"maxN": n}, (
                    ({"n": a, "k": b}, count_delannoy_paths(a, b), delannoy(a, b))
                    for a in range(n + 1) for b in range(n + 1))))]


def _plan_ldl(p):
    n = p["size"]
    return [Job(f"LDL of {tag} square n={n}", lambda tag=tag: narayana_square_ldl(tag, None, n)[2],
                build_matrix(tag, "square", n))
            for tag in ("narayana-a", "narayana-b")]


def _plan_delannoy_triangle(p):
    return _tp_jobs(family("delannoy"), "triangle", p["size"], p["bruteOrder"])


def _plan_delannoy_square(p):
    return _tp_jobs(family("delannoy"), "square", p["size"], p["bruteOrder"])


THEOREM, CONJECTURE, IDENTITY = "theorem", "conjecture", "identity"


def _s(id, kind, description, plan, **defaults):
    base = {"size": {THEOREM: 8, CONJECTURE: 7, IDENTITY: 12}[kind], "m": None, "t": None,
            "bruteOrder": DEFAULT_BRUTE_ORDER}
    base.update(defaults)
    return Statement(id, kind, description, base, plan)


STATEMENTS = {s.id: s for s in [
    _s("pascal-triangle-tp", THEOREM, "Pascal triangle is TP",
       _plan_tp(["pascal"], ["triangle"])),
    _s("pascal-square-stp", THEOREM, "Pascal square is STP", _plan_stp(["pascal"])),
    _s("narayana-triangle-tp", THEOREM, "Narayana triangles of type A and B are TP",
       _plan_tp(["narayana-a", "narayana-b"], ["triangle"])),
    _s("narayana-square-stp", THEOREM, "Narayana squares of type A and B are STP",
       _plan_stp(["narayana-a", "narayana-b"])),
    _s("m-narayana-triangle-tp", THEOREM, "m-Narayana triangles are TP",
       _plan_param_tp(["m-narayana"], ["triangle"], range(0, 5))),
    _s("m-narayana-reversed-tp", THEOREM, "reversed m-Narayana triangles are TP",
       _plan_param_tp(["m-narayana"], ["reversed-triangle"], range(0, 5))),
    _s("m-narayana-square-stp", THEOREM, "m-Narayana squares are STP",
       _plan_param_stp(["m-narayana"], range(0, 5))),
    _s("fuss-narayana-triangles-tp", CONJECTURE,
       "Fuss-Narayana triangles (types A, B; plain and reversed) are TP",
       _plan_param_tp(["fuss-narayana-a", "fuss-narayana-b"], ["triangle", "reversed-triangle"],
                      range(1, 5))),
    _s("fuss-narayana-squares-stp", CONJECTURE, "Fuss-Narayana squares (types A, B) are STP",
       _plan_param_stp(["fuss-narayana-a", "fuss-narayana-b"], range(1, 5))),
    _s("delannoy-triangle-tp", THEOREM, "Delannoy triangle [D(n-k,k)] is TP",
       _plan_delannoy_triangle),
    _s("delannoy-square-tp", THEOREM, "Delannoy square [D(n,k)] is TP", _plan_delannoy_square),
    _s("eulerian-square-stp", CONJECTURE, "Eulerian square [A(n+k,k)] is STP",
       _plan_stp(["eulerian"])),
    _s("pf-pochhammer", THEOREM,
       "1/n!, 1/(n!(n+1)!), 1/(n!)^2 and 1/((t)_n n!) are PF on Toeplitz truncations", _plan_pf),
    _s("sm-factorial-family", THEOREM,
       "n!, n!(n+1)!, (n!)^2 are SM on Hankel truncations; shift and Hadamard closure", _plan_sm),
    _s("scaling-equivalence", THEOREM,
       "positive diagonal scalings of Toeplitz/Hankel matrices give the family matrices",
       _plan_scaling),
    _s("pascal-decomp", IDENTITY, "Pascal square equals P P^T", _plan_pascal_decomp, size=16),
    _s("delannoy-decomp", IDENTITY, "Delannoy square equals P diag(2^j) P^T",
       _plan_delannoy_decomp),
    _s("vandermonde", IDENTITY, "Vandermonde convolution for binomials", _plan_vandermonde,
       size=20),
    _s("narayana-symmetry", IDENTITY,
       "NA and NB triangles are symmetric; m-Narayana and Fuss-Narayana triangles are not",
       _plan_symmetry),
    _s("dyck-path-interpretation", IDENTITY,
       "Narayana and m-Narayana numbers count Dyck paths by peaks", _plan_dyck, size=10),
    _s("delannoy-lattice-paths", IDENTITY, "Delannoy numbers count lattice paths",
       _plan_delannoy_paths, size=6),
    _s("eulerian-excedances", IDENTITY, "Eulerian numbers count permutations by excedances",
       _plan_eulerian, size=8),
    _s("narayana-square-ldl", IDENTITY,
       "exact LDL factorizations of the Narayana squares (evidence for the open Cholesky problem)",
       _plan_ldl, size=8),
]}


# --- params and config ---------------------------------------------------------------

def parse_int_list(text):
    """``"3"``, ``"0..4"`` or ``"1,2,5"`` to a list of ints."""
    if isinstance(text, (list, tuple, range)):
        return [int(x) for x in text]
    if isinstance(text, int):
        return [text]
    text = str(text).strip()
    if ".." in text:
        lo, hi = text.split("..", 1)
        return list(range(int(lo), int(hi) + 1))
    return [int(x) for x in text.split(",") if x.strip()]


def parse_rational_list(text):
    if isinstance(text, (list, tuple)):
        return [Fraction(x) for x in text]
    return [Fraction(x.strip()) for x in str(text).split(",") if x.strip()]


def load_config(path):
    """Read INI-style presets: a ``[defaults]`` section plus one section per statement id."""
    cp = configparser.ConfigParser()
    with open(path) as fh:
        cp.read_file(fh)
    out = {}
    for section in cp.sections():
        out[section] = _normalize_overrides(dict(cp[section]))
    return out


def _normalize_overrides(raw):
    out = {}
    for key, value in raw.items():
        if value is None:
            continue
        key = {"brute_order": "bruteOrder", "bruteorder": "bruteOrder"}.get(key, key)
        if key in ("size", "bruteOrder"):
            out[key] = int(value)
        elif key == "m":
            out[key] = parse_int_list(value)
        elif key == "t":
            out[key] = parse_rational_list(value)
        else:
            raise ParameterError(f"unknown parameter {key!r}")
    return out


def resolve_params(statement_id, overrides=None, config=None):
    st = STATEMENTS[statement_id]
    params = dict(st.defaults)
    if config:
        params.update(config.get("defaults", {}))
        params.update(config.get(statement_id, {}))
    if overrides:
        params.update(_normalize_overrides(overrides))
    if params["size"] < 1:
        raise ParameterError("size must be at least 1")
    return params


def _params_json(p):
    return {
        "size": p["size"],
        "bruteOrder": p["bruteOrder"],
        "m": p["m"],
        "t": None if p["t"] is None else [str(Fraction(x)) for x in p["t"]],
    }


# --- runner ----------------------------------------------------------------------------

def run_statement(statement_id, params=None, config=None):
    if statement_id not in STATEMENTS:
        raise KeyError(f"unknown statement {statement_id!r}")
    st = STATEMENTS[statement_id]
    p = resolve_params(statement_id, params, config)
    t0 = time.perf_counter()
    verdicts, digests = [], {}
    failed = errored = False
    try:
        jobs = st.plan(p)
    except GUARDED as exc:
        jobs = []
        verdicts.append({"label": "plan", "ok": False, "error": f"{type(exc).__name__}: {exc}"})
        errored = True
    for job in jobs:
        if job.matrix is not None:
            digests[job.label] = matrix_digest(job.matrix)
        try:
            v = job.run()
        except GUARDED as exc:
            verdicts.append({"label": job.label, "ok": False,
                             "error": f"{type(exc).__name__}: {exc}"})
            errored = True
            continue
        ok = _verdict_ok(v)
        if job.expect_counterexample:
            ok = not ok
        failed = failed or not ok
        entry = {"label": job.label, "ok": ok, "verdict": v.to_json()}
        if job.expect_counterexample:
            entry["expected"] = "counterexample"
        verdicts.append(entry)
    if st.kind == CONJECTURE:
        status = "counterexample-found" if failed else ("error" if errored else "conjecture-consistent")
    elif st.kind == IDENTITY:
        status = "counterexample" if failed else ("error" if errored else "verified")
    else:
        status = "fails" if failed else ("error" if errored else "holds")
    scope = f"finite truncations only (size parameter {p['size']}); no claim about infinite matrices"
    return Report(statement_id, st.kind, _params_json(p), status, verdicts, digests,
                  int(round((time.perf_counter() - t0) * 1000)), __version__, scope)


def write_reports(reports, directory):
    """One JSON file per statement, then ``index.json`` last."""
    out = Path(directory)
    out.mkdir(parents=True, exist_ok=True)
    index = []
    for rep in reports:
        data = rep.to_json()
        name = f"{rep.statement_id}.json"
        (out / name).write_text(dumps(data))
        index.append({"statementId": rep.statement_id, "kind": rep.kind, "status": rep.status,
                      "file": name,
                      "digest": hashlib.sha256(dumps(stable_section(data)).encode()).hexdigest()})
    (out / "index.json").write_text(dumps({"schemaVersion": SCHEMA_VERSION,
                                           "toolVersion": __version__, "reports": index}))
    return out / "index.json"
