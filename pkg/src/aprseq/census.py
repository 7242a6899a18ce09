"""Exhaustive enumeration of symmetric matrices over GF(p).

Matrices are indexed by an odometer over the n(n+1)/2 upper-triangle entries
(row-major, i <= j, first entry fastest).  Two engines compute the
apr/epr/qpr words of every matrix:

* ``numpy`` evaluates every minor of a whole block of matrices at once by
  expanding along the last row, level by level, reducing mod p;
* ``scalar`` runs the short-circuit letter evaluator of :mod:`minorseq` on
  one matrix at a time.  It is slow and exists to cross-check the first.

Every check on a matrix depends only on its three words, so the checks run
once per distinct word triple, with the smallest matrix index as witness.
"""

from __future__ import annotations

import os
from dataclasses import dataclass, field
from itertools import permutations, product
from typing import Iterator

import numpy as np

from .attain import check_necessary, classify_no_A
from .exactfield import FieldSpec
from .minorseq import apr_sequence, epr_sequence, qpr_sequence
from .symmatrix import SymMatrix, format_matrix

DEFAULT_BUDGET = 1 << 24
BUDGET_ENV = "APRSEQ_CENSUS_BUDGET"
LETTERS = "ANS"  # base-3 digit of each letter in a word code
CHUNK = 1 << 16


class CensusBudgetError(ValueError):
    def __init__(self, required: int, budget: int):
        super().__init__(f"census needs {required} matrices, budget is {budget} (set {BUDGET_ENV} to raise it)")
        self.required, self.budget = required, budget


class CensusViolation(AssertionError):
    """A census result contradicts a field-independent statement."""


def budget() -> int:
    raw = os.environ.get(BUDGET_ENV)
    return int(raw) if raw else DEFAULT_BUDGET


def _check_field(f: FieldSpec, n: int) -> int:
    if f.is_rational:
        raise ValueError("a census needs a finite prime field")
    if n < 1:
        raise ValueError("order must be positive")
    total = f.modulus ** (n * (n + 1) // 2)
    if total > budget():
        raise CensusBudgetError(total, budget())
    return total


def upper_positions(n: int) -> list[tuple[int, int]]:
    return [(i, j) for i in range(n) for j in range(i, n)]


def matrix_at(f: FieldSpec, n: int, index: int) -> SymMatrix:
    """The matrix with odometer position ``index``."""
    p = f.modulus
    rows = [[0] * n for _ in range(n)]
    for i, j in upper_positions(n):
        index, d = divmod(index, p)
        rows[i][j] = rows[j][i] = d
    return SymMatrix(rows, f)


def enumerate_symmetric(f: FieldSpec, n: int) -> Iterator[SymMatrix]:
    """Every symmetric matrix over GF(p) exactly once, in odometer order."""
    _check_field(f, n)
    pos = upper_positions(n)
    p = f.modulus
    for digits in product(range(p), repeat=len(pos)):
        rows = [[0] * n for _ in range(n)]
        # product() turns its last factor fastest; the odometer turns the first
        for (i, j), d in zip(pos, reversed(digits)):
            rows[i][j] = rows[j][i] = d
        yield SymMatrix(rows, f)


# -- word codes -----------------------------------------------------------


def encode_word(word: str) -> int:
    return sum(LETTERS.index(c) * 3**k for k, c in enumerate(word))


def decode_word(code: int, length: int) -> str:
    out = []
    for _ in range(length):
        code, d = divmod(code, 3)
        out.append(LETTERS[d])
    return "".join(out)


def _split_key(key: int, n: int) -> tuple[str, str, str]:
    a, rest = key % 3 ** (n - 1), key // 3 ** (n - 1)
    e, q = rest % 3**n, rest // 3**n
    return decode_word(a, n - 1), decode_word(e, n), decode_word(q, n)


# -- numpy engine ---------------------------------------------------------


def _masks_by_size(n: int) -> list[list[int]]:
    out = [[] for _ in range(n + 1)]
    for m in range(1 << n):
        out[bin(m).count("1")].append(m)
    return out


def _bits(m: int) -> list[int]:
    return [i for i in range(m.bit_length()) if m >> i & 1]


def _block_keys(p: int, n: int, start: int, stop: int) -> np.ndarray:
    """Combined word keys for matrices start..stop-1."""
    idx = np.arange(start, stop, dtype=np.int64)
    b = [[None] * n for _ in range(n)]
    for i, j in upper_positions(n):
        idx, d = np.divmod(idx, p)
        b[i][j] = b[j][i] = d.astype(np.int32)

    size = stop - start
    masks = _masks_by_size(n)
    apr_code = np.zeros(size, dtype=np.int64)
    epr_code = np.zeros(size, dtype=np.int64)
    qpr_code = np.zeros(size, dtype=np.int64)
    prev: dict[tuple[int, int], np.ndarray] = {}
    for k in range(1, n + 1):
        cur = {}
        ap_any = np.zeros(size, bool)
        ap_all = np.ones(size, bool)
        pr_any = np.zeros(size, bool)
        pr_all = np.ones(size, bool)
        for R in masks[k]:
            r = R.bit_length() - 1
            rest = R & ~(1 << r)
            for C in masks[k]:
                if C < R:
                    continue
                if k == 1:
                    val = b[r][C.bit_length() - 1]
                else:
                    val = np.zeros(size, dtype=np.int32)
                    for pos_j, j in enumerate(_bits(C)):
                        sub = C & ~(1 << j)
                        term = b[r][j] * prev[(rest, sub) if rest <= sub else (sub, rest)]
                        if (k - 1 + pos_j) % 2:
                            val -= term
                        else:
                            val += term
                    val %= p
                cur[(R, C)] = val
                nz = val != 0
                common = bin(R & C).count("1")
                if R == C:
                    pr_any |= nz
                    pr_all &= nz
                elif common == k - 1:
                    ap_any |= nz
                    ap_all &= nz
        prev = cur
        weight = 3 ** (k - 1)
        epr_code += weight * _letter_digit(pr_any, pr_all)
        if k < n:
            apr_code += weight * _letter_digit(ap_any, ap_all)
            qpr_code += weight * _letter_digit(pr_any | ap_any, pr_all & ap_all)
        else:
            qpr_code += weight * _letter_digit(pr_any, pr_all)
    return apr_code + 3 ** (n - 1) * (epr_code + 3**n * qpr_code)


def _letter_digit(any_nz: np.ndarray, all_nz: np.ndarray) -> np.ndarray:
    # A -> 0, N -> 1, S -> 2
    return np.where(all_nz, 0, np.where(any_nz, 2, 1)).astype(np.int64)


def _scan_numpy(p: int, n: int, start: int, stop: int) -> dict[int, list[int]]:
    found: dict[int, list[int]] = {}
    for lo in range(start, stop, CHUNK):
        hi = min(stop, lo + CHUNK)
        keys = _block_keys(p, n, lo, hi)
        uniq, first, counts = np.unique(keys, return_index=True, return_counts=True)
        for key, i, c in zip(uniq.tolist(), first.tolist(), counts.tolist()):
            _merge_one(found, key, c, lo + i)
    return found


# -- scalar engine ---------------------------------------------------------


def _is_orbit_minimum(B: SymMatrix, index: int, f: FieldSpec) -> bool:
    pos = upper_positions(B.n)
    p = f.modulus
    for perm in permutations(range(B.n)):
        code = 0
        for i, j in reversed(pos):
            code = code * p + B.rows[perm[i]][perm[j]]
        if code < index:
            return False
    return True


def _scan_scalar(f: FieldSpec, n: int, start: int, stop: int, orbit_minimum: bool = False) -> dict[int, list[int]]:
    found: dict[int, list[int]] = {}
    for index in range(start, stop):
        B = matrix_at(f, n, index)
        if orbit_minimum and not _is_orbit_minimum(B, index, f):
            continue
        a = apr_sequence(B).word if n >= 2 else ""
        key = encode_word(a) + 3 ** (n - 1) * (
            encode_word(epr_sequence(B).word) + 3**n * encode_word(qpr_sequence(B).word))
        _merge_one(found, key, 1, index)
    return found


# -- merging and reports ---------------------------------------------------


def _merge_one(found: dict, key: int, count: int, index: int):
    entry = found.get(key)
    if entry is None:
        found[key] = [count, index]
    else:
        entry[0] += count
        entry[1] = min(entry[1], index)


def merge_partials(parts) -> dict[int, list[int]]:
    """Associative, commutative merge: counts add, witnesses take the minimum index."""
    out: dict[int, list[int]] = {}
    for part in parts:
        for key, (count, index) in part.items():
            _merge_one(out, key, count, index)
    return out


def _scan_range(args):
    engine, p, n, start, stop, orbit = args
    if engine == "numpy":
        return _scan_numpy(p, n, start, stop)
    return _scan_scalar(FieldSpec.gf(p), n, start, stop, orbit)


@dataclass
class CensusReport:
    field: FieldSpec
    n: int
    matrix_count: int
    sequences: dict = field(default_factory=dict)
    epr_sequences: dict = field(default_factory=dict)
    qpr_sequences: dict = field(default_factory=dict)
    violations: list = field(default_factory=list)
    visited: int = 0

    @property
    def ok(self) -> bool:
        return not self.violations

    def words(self) -> set[str]:
        return set(self.sequences)

    def witness(self, word: str, kind: str = "apr") -> SymMatrix:
        table = {"apr": self.sequences, "epr": self.epr_sequences, "qpr": self.qpr_sequences}[kind]
        return matrix_at(self.field, self.n, table[word]["witness_index"])

    def to_json(self, witnesses: bool = True) -> dict:
        def table(d):
            out = {}
            for w, v in sorted(d.items()):
                row = dict(v)
                if witnesses:
                    row["witness"] = format_matrix(matrix_at(self.field, self.n, v["witness_index"])).splitlines()
                out[w] = row
            return out

        return {
            "field": str(self.field),
            "n": self.n,
            "matrix_count": self.matrix_count,
            "visited": self.visited,
            "apr": table(self.sequences),
            "epr": table(self.epr_sequences),
            "qpr": table(self.qpr_sequences),
            "violations": self.violations,
        }


def _after_first(word: str, pattern: str) -> str | None:
    i = word.find(pattern)
    return None if i < 0 else word[i + len(pattern):]


def triple_violations(a: str, e: str, q: str, n: int) -> list[str]:
    """Field-independent statements that the words of one matrix must satisfy."""
    bad = []
    if n == 2 and a == "S":
        bad.append("apr of a 2x2 matrix is S")
    if len(a) >= 2 and not check_necessary(a):
        bad.append("apr fails the necessary condition")
    tail = _after_first(a, "NN")
    if tail is not None and set(tail) - {"N"}:
        bad.append("apr has a non-N letter after NN")
    first_n = a.find("N")
    if first_n >= 0 and "A" in a[first_n:]:
        bad.append("apr contains NA as a subsequence")
    if "A" in a and first_n >= 0 and set(a[first_n:]) - {"N"}:
        bad.append("apr contains A and a non-N letter after its first N")
    first_qn = q.find("N")
    if first_qn >= 0 and set(q[first_qn:]) - {"N"}:
        bad.append("qpr has a non-N letter after an N")
    tail = _after_first(e, "NN")
    if tail is not None and set(tail) - {"N"}:
        bad.append("epr has a non-N letter after NN")
    for k in range(n):
        want_qk = e[k] if k == n - 1 else _combine(e[k], a[k])
        if q[k] != want_qk:
            bad.append(f"qpr letter {k + 1} is {q[k]}, expected {want_qk} from epr and apr")
    return bad


def _combine(x: str, y: str) -> str:
    if x == y == "A":
        return "A"
    if x == y == "N":
        return "N"
    return "S"


def _build_report(f: FieldSpec, n: int, total: int, found: dict[int, list[int]]) -> CensusReport:
    report = CensusReport(f, n, total)
    for key in sorted(found):
        count, index = found[key]
        report.visited += count
        a, e, q = _split_key(key, n)
        for table, w in ((report.sequences, a), (report.epr_sequences, e), (report.qpr_sequences, q)):
            if n == 1 and table is report.sequences:
                continue
            entry = table.setdefault(w, {"count": 0, "witness_index": index})
            entry["count"] += count
            entry["witness_index"] = min(entry["witness_index"], index)
        if n >= 2:
            for msg in triple_violations(a, e, q, n):
                report.violations.append({
                    "check": msg, "apr": a, "epr": e, "qpr": q, "witness_index": index,
                    "witness": format_matrix(matrix_at(f, n, index)).splitlines(),
                })
    return report


def apr_census(
    f: FieldSpec, n: int, engine: str = "numpy", workers: int = 1, orbit_minimum: bool = False,
) -> CensusReport:
    """Words of every symmetric matrix over ``f`` of order n, with checks.

    ``orbit_minimum`` (scalar engine only) visits one matrix per
    permutation-similarity orbit; word sets are unchanged, counts are not.
    """
    if engine not in ("numpy", "scalar"):
        raise ValueError("engine must be 'numpy' or 'scalar'")
    if orbit_minimum and engine != "scalar":
        raise ValueError("orbit_minimum is only available with the scalar engine")
    total = _check_field(f, n)
    p = f.modulus
    workers = max(1, workers)
    step = -(-total // workers)
    ranges = [(engine, p, n, lo, min(total, lo + step), orbit_minimum) for lo in range(0, total, step)]
    if workers == 1:
        parts = [_scan_range(r) for r in ranges]
    else:
        from concurrent.futures import ProcessPoolExecutor

        with ProcessPoolExecutor(workers) as pool:
            parts = list(pool.map(_scan_range, ranges))
    return _build_report(f, n, total, merge_partials(parts))


def census_cross_check(f: FieldSpec, n: int, report: CensusReport | None = None, **kw) -> CensusReport:
    """Raise :class:`CensusViolation` unless the census agrees with the word-level theory.

    Every observed apr-word passes the necessary condition, and an {S, N}-word
    of length n-1 is observed exactly when :func:`classify_no_A` accepts it.
    """
    if n < 2:
        raise ValueError("apr-words need n >= 2")
    report = report or apr_census(f, n, **kw)
    if report.violations:
        v = report.violations[0]
        raise CensusViolation(f"{v['check']} (apr {v['apr']}) at witness {v['witness']}")
    for w, entry in report.sequences.items():
        if len(w) >= 2 and not check_necessary(w):
            raise CensusViolation(f"observed {w} fails the necessary condition: {format_matrix(report.witness(w))}")
    for letters in product("NS", repeat=n - 1):
        w = "".join(letters)
        accepted = classify_no_A(w).accepted
        seen = w in report.sequences
        if seen and not accepted:
            raise CensusViolation(f"{w} observed but has no admissible form; witness {format_matrix(report.witness(w))}")
        if accepted and not seen:
            raise CensusViolation(f"{w} has an admissible form but is never observed over {f}")
    return report
